//! Well-formedness of run-time configurations.
//!
//! Run-time types replace pool variables by pool addresses. *Strong*
//! agreement checks a cell (its class or layout, ghost parameters and
//! contents); *weak* agreement checks only that a value or pool address
//! points at something of the expected run-time type. A heap is
//! well-formed when every cell strongly agrees with the type recorded in
//! its own ghost data, and a frame is well-formed against a typing context
//! when every variable weakly agrees with its type resolved through the
//! frame.
//!
//! Every check returns the first [`Violation`] found; callers that only
//! need a verdict use `.is_ok()`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::ast::{ClassType, Ident, PoolApplied, PoolArg, PoolBound};
use crate::heap::{Frame, Heap, ObjId, PoolAddr, PoolId, Slot, Value};
use crate::lookup::ProgramIndex;
use crate::wf::{CtxType, TypingContext};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuntimeType {
    Class(Ident, Vec<PoolAddr>),
    Pool(Ident, Vec<PoolAddr>),
    Bound(Ident, Vec<PoolAddr>),
}

impl fmt::Display for RuntimeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |a: &[PoolAddr]| a.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            RuntimeType::Class(c, a) | RuntimeType::Pool(c, a) => write!(f, "{c}<{}>", args(a)),
            RuntimeType::Bound(c, a) => write!(f, "[{c}<{}>]", args(a)),
        }
    }
}

/// A heap address: an unpooled object, a pool, or a pool member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Address {
    Obj(ObjId),
    Pool(PoolId),
    Member(PoolId, usize),
}

/// The first condition found not to hold.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct Violation(pub String);

type Check = Result<(), Violation>;

fn fail<T>(msg: impl Into<String>) -> Result<T, Violation> {
    Err(Violation(msg.into()))
}

fn context<T>(r: Result<T, Violation>, prefix: impl FnOnce() -> String) -> Result<T, Violation> {
    r.map_err(|v| Violation(format!("{}: {}", prefix(), v.0)))
}

/// Substitutes pool addresses for a class's pool parameters.
fn resolve_args(args: &[PoolArg], formals: &[Ident], actuals: &[PoolAddr]) -> Result<Vec<PoolAddr>, Violation> {
    args.iter()
        .map(|a| match a {
            PoolArg::None => Ok(PoolAddr::None),
            PoolArg::Var(v) => match formals.iter().position(|f| f == v) {
                Some(i) if i < actuals.len() => Ok(actuals[i]),
                _ => fail(format!("pool variable `{v}` is not a parameter")),
            },
        })
        .collect()
}

fn resolve_in_frame(args: &[PoolArg], frame: &Frame) -> Result<Vec<PoolAddr>, Violation> {
    args.iter()
        .map(|a| frame.pool(a).ok_or_else(|| Violation(format!("pool variable `{a}` is not bound to a pool"))))
        .collect()
}

fn lookup<T>(r: Result<T, crate::lookup::LookupError>) -> Result<T, Violation> {
    r.map_err(|e| Violation(e.to_string()))
}

/// Checks each ghost parameter of a `class` instance against its bound.
fn ghost_params_agree(heap: &Heap, idx: &ProgramIndex, class: &Ident, ghost: &[PoolAddr]) -> Check {
    let params = lookup(idx.pool_params_of(class))?;
    if params.len() != ghost.len() {
        return fail(format!("`{class}` takes {} pool parameters, found {}", params.len(), ghost.len()));
    }
    for (i, (p, g)) in params.iter().zip(ghost).enumerate() {
        let bound: &PoolBound = lookup(idx.bound_of(class, p))?;
        let args = resolve_args(&bound.args, params, ghost)?;
        let tau = RuntimeType::Bound(bound.class_name.clone(), args);
        context(weak_agree(heap, idx, Slot::Pool(*g), &tau), || format!("pool parameter {} `{p}`", i + 1))?;
    }
    Ok(())
}

fn field_type(idx: &ProgramIndex, class: &Ident, field: &Ident, ghost: &[PoolAddr]) -> Result<RuntimeType, Violation> {
    let params = lookup(idx.pool_params_of(class))?;
    let ty: &ClassType = lookup(idx.field_type_of(class, field))?;
    Ok(RuntimeType::Class(ty.class_name.clone(), resolve_args(&ty.args, params, ghost)?))
}

/// Strong agreement of a heap address with a run-time type.
pub fn agrees(heap: &Heap, idx: &ProgramIndex, addr: Address, tau: &RuntimeType) -> Check {
    match (addr, tau) {
        (Address::Obj(o), RuntimeType::Class(c, pis)) => {
            let cell = heap.object(o).map_err(|e| Violation(e.to_string()))?;
            if &cell.class != c || &cell.ghost != pis {
                return fail(format!("{o} has run-time type {}<..>, expected {tau}", cell.class));
            }
            if pis.first() != Some(&PoolAddr::None) {
                return fail(format!("{o} is unpooled but its first pool parameter is not `none`"));
            }
            ghost_params_agree(heap, idx, c, pis)?;
            let fields = lookup(idx.fields_of(c))?;
            if fields.len() != cell.record.len() {
                return fail(format!("{o} has {} fields, class `{c}` declares {}", cell.record.len(), fields.len()));
            }
            for f in fields {
                let k = lookup(idx.field_offset_class(c, f))?;
                let ft = field_type(idx, c, f, pis)?;
                context(weak_agree(heap, idx, Slot::Val(cell.record[k]), &ft), || format!("{o}.{f}"))?;
            }
            Ok(())
        }
        (Address::Pool(p), RuntimeType::Pool(l, pis)) => {
            let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
            if &cell.layout != l || &cell.ghost != pis {
                return fail(format!("{p} has run-time type {}<..>, expected {tau}", cell.layout));
            }
            if pis.first() != Some(&PoolAddr::Pool(p)) {
                return fail(format!("the first pool parameter of {p} is not {p} itself"));
            }
            let (class, clusters) = lookup(idx.layout_of(l))?;
            context(ghost_params_agree(heap, idx, class, pis), || format!("{p}"))?;
            if cell.clusters.len() != clusters.len() {
                return fail(format!("{p} has {} clusters, layout `{l}` declares {}", cell.clusters.len(), clusters.len()));
            }
            for (i, (c, fs)) in cell.clusters.iter().zip(clusters).enumerate() {
                if c.width != fs.len() {
                    return fail(format!("{p} cluster {i} has width {}, layout `{l}` declares {}", c.width, fs.len()));
                }
                if c.slots.len() % c.width.max(1) != 0 {
                    return fail(format!("{p} cluster {i} holds a partial record"));
                }
            }
            let n = cell.size();
            if let Some((i, c)) = cell.clusters.iter().enumerate().find(|(_, c)| c.len() != n) {
                return fail(format!("{p} cluster {i} has {} records, cluster 0 has {n}", c.len()));
            }
            let member = RuntimeType::Class(class.clone(), pis.clone());
            for k in 0..n {
                agrees(heap, idx, Address::Member(p, k), &member)?;
            }
            Ok(())
        }
        (Address::Member(p, n), RuntimeType::Class(c, pis)) => {
            let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
            if &cell.ghost != pis || pis.first() != Some(&PoolAddr::Pool(p)) {
                return fail(format!("({p}, {n}) does not have pool parameters {tau}"));
            }
            let class = lookup(idx.layout_class(&cell.layout))?;
            if class != c {
                return fail(format!("({p}, {n}) is a `{class}`, expected `{c}`"));
            }
            if n >= cell.size() {
                return fail(format!("({p}, {n}) is past the end of the pool"));
            }
            for f in lookup(idx.fields_of(c))? {
                let (i, j) = lookup(idx.field_offset_layout(&cell.layout, f))?;
                let v = heap.read_slot(p, n, i, j).map_err(|e| Violation(e.to_string()))?;
                let ft = field_type(idx, c, f, pis)?;
                context(weak_agree(heap, idx, Slot::Val(v), &ft), || format!("({p}, {n}).{f}"))?;
            }
            Ok(())
        }
        _ => fail(format!("{addr:?} cannot have run-time type {tau}")),
    }
}

/// Weak agreement of a value or pool address with a run-time type.
pub fn weak_agree(heap: &Heap, idx: &ProgramIndex, subject: Slot, tau: &RuntimeType) -> Check {
    match (subject, tau) {
        (Slot::Val(Value::Null), RuntimeType::Class(..)) => Ok(()),
        (Slot::Val(Value::Obj(o)), RuntimeType::Class(c, pis)) => {
            let cell = heap.object(o).map_err(|e| Violation(e.to_string()))?;
            if &cell.class != c || &cell.ghost != pis {
                return fail(format!("{o} : {}<{}> does not match {tau}", cell.class, render(&cell.ghost)));
            }
            // Unpooled objects live in `none`.
            if pis.first() != Some(&PoolAddr::None) {
                return fail(format!("{o} is unpooled but {tau} places it in a pool"));
            }
            Ok(())
        }
        (Slot::Val(Value::Loc(p, n)), RuntimeType::Class(c, pis)) => {
            let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
            if &cell.ghost != pis || pis.first() != Some(&PoolAddr::Pool(p)) {
                return fail(format!("({p}, {n}) : {}<{}> does not match {tau}", cell.layout, render(&cell.ghost)));
            }
            let class = lookup(idx.layout_class(&cell.layout))?;
            if class != c {
                return fail(format!("({p}, {n}) is a `{class}`, expected `{c}`"));
            }
            if n >= cell.size() {
                return fail(format!("({p}, {n}) is past the end of the pool"));
            }
            Ok(())
        }
        (Slot::Pool(PoolAddr::Pool(p)), RuntimeType::Pool(l, pis)) => {
            let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
            if &cell.layout != l || &cell.ghost != pis || pis.first() != Some(&PoolAddr::Pool(p)) {
                return fail(format!("{p} : {}<{}> does not match {tau}", cell.layout, render(&cell.ghost)));
            }
            Ok(())
        }
        (Slot::Pool(PoolAddr::None), RuntimeType::Bound(..)) => Ok(()),
        (Slot::Pool(PoolAddr::Pool(p)), RuntimeType::Bound(c, pis)) => {
            let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
            let class = lookup(idx.layout_class(&cell.layout))?;
            if class != c || &cell.ghost != pis || pis.first() != Some(&PoolAddr::Pool(p)) {
                return fail(format!("{p} : {}<{}> does not satisfy {tau}", cell.layout, render(&cell.ghost)));
            }
            Ok(())
        }
        (s, _) => fail(format!("{} cannot have run-time type {tau}", render_slot(s))),
    }
}

fn render(pis: &[PoolAddr]) -> String {
    pis.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_slot(s: Slot) -> String {
    match s {
        Slot::Val(v) => v.to_string(),
        Slot::Pool(p) => p.to_string(),
    }
}

/// Every cell strongly agrees with the run-time type its ghost data records.
pub fn wf_heap(heap: &Heap, idx: &ProgramIndex) -> Check {
    for (o, cell) in heap.objects() {
        agrees(heap, idx, Address::Obj(o), &RuntimeType::Class(cell.class.clone(), cell.ghost.clone()))?;
    }
    for k in 0..heap.pool_count() {
        let p = PoolId(k);
        let cell = heap.pool(p).map_err(|e| Violation(e.to_string()))?;
        agrees(heap, idx, Address::Pool(p), &RuntimeType::Pool(cell.layout.clone(), cell.ghost.clone()))?;
    }
    Ok(())
}

/// The frame binds exactly the context's names, each weakly agreeing with
/// its type resolved through the frame.
pub fn wf_frame(ctx: &TypingContext, heap: &Heap, idx: &ProgramIndex, frame: &Frame) -> Check {
    if frame.len() != ctx.len() {
        let mut extra: Vec<&Ident> = frame.names().filter(|n| ctx.get(n).is_none()).collect();
        extra.sort();
        return match extra.first() {
            Some(n) => fail(format!("frame binds `{n}`, which the context does not declare")),
            None => fail("frame is missing a variable of the context"),
        };
    }
    for e in ctx.entries() {
        let Some(slot) = frame.get(&e.name) else {
            return fail(format!("frame does not bind `{}`", e.name));
        };
        let tau = match &e.ty {
            CtxType::Class(t) => RuntimeType::Class(t.class_name.clone(), resolve_in_frame(t.args(), frame)?),
            CtxType::Pool(t) => RuntimeType::Pool(t.layout_name.clone(), resolve_in_frame(t.args(), frame)?),
            CtxType::Bound(b) => RuntimeType::Bound(b.class_name.clone(), resolve_in_frame(b.args(), frame)?),
        };
        context(weak_agree(heap, idx, slot, &tau), || format!("variable `{}`", e.name))?;
    }
    Ok(())
}

/// Configuration well-formedness: heap and frame together.
pub fn wf_config(ctx: &TypingContext, heap: &Heap, idx: &ProgramIndex, frame: &Frame) -> Check {
    wf_heap(heap, idx)?;
    wf_frame(ctx, heap, idx, frame)
}

/// The class of the object a non-null value denotes.
pub fn class_of_value<'h>(heap: &'h Heap, idx: &'h ProgramIndex, v: Value) -> Option<&'h Ident> {
    match v {
        Value::Null => None,
        Value::Obj(o) => heap.object(o).ok().map(|c| &c.class),
        Value::Loc(p, _) => idx.layout_class(&heap.pool(p).ok()?.layout).ok(),
    }
}

/// Reads field `f` of the object `v` denotes, through the object record or
/// its pool's layout.
pub fn read_field_of(heap: &Heap, idx: &ProgramIndex, v: Value, f: &str) -> Option<Value> {
    match v {
        Value::Null => None,
        Value::Obj(o) => {
            let class = &heap.object(o).ok()?.class;
            heap.read_field(o, idx.field_offset_class(class, f).ok()?).ok()
        }
        Value::Loc(p, n) => {
            let layout = &heap.pool(p).ok()?.layout;
            let (i, j) = idx.field_offset_layout(layout, f).ok()?;
            heap.read_slot(p, n, i, j).ok()
        }
    }
}

/// Structural isomorphism of the object graphs reachable from paired roots.
///
/// Objects correspond when they have the same class and their fields, read
/// in declaration order, hold corresponding values. Ghost pool parameters
/// and physical placement are ignored. The correspondence is a bijection
/// shared by all root pairs.
pub fn heap_iso(
    heap_a: &Heap,
    idx_a: &ProgramIndex,
    roots_a: &[Value],
    heap_b: &Heap,
    idx_b: &ProgramIndex,
    roots_b: &[Value],
) -> bool {
    if roots_a.len() != roots_b.len() {
        return false;
    }
    let mut fwd: HashMap<Value, Value> = HashMap::new();
    let mut bwd: HashMap<Value, Value> = HashMap::new();
    let mut queue: VecDeque<(Value, Value)> = roots_a.iter().copied().zip(roots_b.iter().copied()).collect();
    while let Some((a, b)) = queue.pop_front() {
        match (a, b) {
            (Value::Null, Value::Null) => continue,
            (Value::Null, _) | (_, Value::Null) => return false,
            _ => {}
        }
        match (fwd.get(&a), bwd.get(&b)) {
            (Some(&b2), Some(&a2)) if b2 == b && a2 == a => continue,
            (None, None) => {}
            _ => return false,
        }
        fwd.insert(a, b);
        bwd.insert(b, a);
        let (Some(ca), Some(cb)) = (class_of_value(heap_a, idx_a, a), class_of_value(heap_b, idx_b, b)) else {
            return false;
        };
        if ca != cb {
            return false;
        }
        let (Ok(fa), Ok(fb)) = (idx_a.fields_of(ca), idx_b.fields_of(cb)) else {
            return false;
        };
        if fa != fb {
            return false;
        }
        for f in fa {
            match (read_field_of(heap_a, idx_a, a, f), read_field_of(heap_b, idx_b, b, f)) {
                (Some(va), Some(vb)) => queue.push_back((va, vb)),
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;
    use crate::parser::parse_program;

    const SRC: &str = "
class Student<<ps: [Student<<ps, pp>>], pp: [Professor<<pp, ps>>]>> {
    supervisor: Professor<<pp, ps>>;
    friend: Student<<ps, pp>>;
}
class Professor<<pp: [Professor<<pp, ps>>], ps: [Student<<ps, pp>>]>> {
    student: Student<<ps, pp>>;
}
class Node<<n: [Node<<n>>]>> { next: Node<<n>>; }
class Holder<<h: [Holder<<h, s>>], s: [Node<<s>>]>> { item: Node<<s>>; }
layout StudentSplit: [Student] = rec {supervisor} + rec {friend};
layout ProfessorSplit: [Professor] = rec {student};
layout NodeL: [Node] = rec {next};
";

    fn index() -> ProgramIndex {
        ProgramIndex::new(parse_program(SRC).unwrap()).0
    }

    fn pools(h: &mut Heap) -> (PoolId, PoolId) {
        let s = h.reserve_pool();
        let p = h.reserve_pool();
        let (ps, pp) = (PoolAddr::Pool(s), PoolAddr::Pool(p));
        h.alloc_pool(s, ident("StudentSplit"), vec![ps, pp], &[1, 1]).unwrap();
        h.alloc_pool(p, ident("ProfessorSplit"), vec![pp, ps], &[1]).unwrap();
        (s, p)
    }

    #[test]
    fn empty_heap_is_well_formed() {
        assert!(wf_heap(&Heap::new(), &index()).is_ok());
    }

    #[test]
    fn weak_agreement_clauses() {
        let idx = index();
        let mut h = Heap::new();
        let (s, p) = pools(&mut h);
        let (ps, pp) = (PoolAddr::Pool(s), PoolAddr::Pool(p));
        let stu = RuntimeType::Class(ident("Student"), vec![PoolAddr::None, pp]);
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Null), &stu).is_ok());
        let any = RuntimeType::Bound(ident("Professor"), vec![ps, pp]);
        assert!(weak_agree(&h, &idx, Slot::Pool(PoolAddr::None), &any).is_ok());
        // A member of a Student pool is not a Professor.
        h.pool_append(s).unwrap();
        let prof = RuntimeType::Class(ident("Professor"), vec![ps, pp]);
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Loc(s, 0)), &prof).is_err());
        let stu_in = RuntimeType::Class(ident("Student"), vec![ps, pp]);
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Loc(s, 0)), &stu_in).is_ok());
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Loc(s, 5)), &stu_in).is_err());
        let o = h.alloc_object(ident("Student"), vec![PoolAddr::None, pp], 2);
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Obj(o)), &stu).is_ok());
        assert!(weak_agree(&h, &idx, Slot::Val(Value::Obj(o)), &stu_in).is_err());
        let bound = RuntimeType::Bound(ident("Student"), vec![ps, pp]);
        assert!(weak_agree(&h, &idx, Slot::Pool(ps), &bound).is_ok());
        assert!(weak_agree(&h, &idx, Slot::Pool(pp), &bound).is_err());
        let pool_ty = RuntimeType::Pool(ident("StudentSplit"), vec![ps, pp]);
        assert!(weak_agree(&h, &idx, Slot::Pool(ps), &pool_ty).is_ok());
        assert!(weak_agree(&h, &idx, Slot::Pool(pp), &pool_ty).is_err());
    }

    #[test]
    fn strong_agreement_and_corruption() {
        let idx = index();
        let mut h = Heap::new();
        let (s, p) = pools(&mut h);
        let nodes = h.reserve_pool();
        h.alloc_pool(nodes, ident("NodeL"), vec![PoolAddr::Pool(nodes)], &[1]).unwrap();
        let o = h.alloc_object(ident("Holder"), vec![PoolAddr::None, PoolAddr::Pool(nodes)], 1);
        assert!(wf_heap(&h, &idx).is_ok());
        let n = h.pool_append(s).unwrap();
        let m = h.pool_append(p).unwrap();
        h.write_slot(s, n, 0, 0, Value::Loc(p, m)).unwrap();
        h.write_slot(p, m, 0, 0, Value::Loc(s, n)).unwrap();
        let k = h.pool_append(nodes).unwrap();
        h.write_field(o, 0, Value::Loc(nodes, k)).unwrap();
        assert!(wf_heap(&h, &idx).is_ok(), "{:?}", wf_heap(&h, &idx));
        // Retarget a field across pools.
        let mut bad = h.clone();
        bad.write_field(o, 0, Value::Loc(s, n)).unwrap();
        assert!(wf_heap(&bad, &idx).is_err());
        let mut bad = h.clone();
        bad.write_slot(s, n, 0, 0, Value::Loc(s, n)).unwrap();
        assert!(wf_heap(&bad, &idx).is_err());
        // Unequal cluster lengths.
        let mut bad = h.clone();
        bad.pool_mut(s).unwrap().clusters[1].slots.push(Value::Null);
        let err = wf_heap(&bad, &idx).unwrap_err();
        assert!(err.0.contains("records"), "{err}");
        // An unpooled object whose pool parameter violates its bound.
        let mut bad = h.clone();
        bad.alloc_object(ident("Student"), vec![PoolAddr::None, PoolAddr::Pool(p)], 2);
        assert!(wf_heap(&bad, &idx).is_err());
    }

    #[test]
    fn frames() {
        use crate::typeck::method_context;
        let src = "class A<<a: [A<<a>>]>> { f: A<<a>>; def m(x: A<<a>>): A<<a>> { pools q: LA<<q>> locals y: A<<q>> ; x } }
layout LA: [A] = rec {f};";
        let idx = ProgramIndex::new(parse_program(src).unwrap()).0;
        let ctx = method_context(&idx, "A", "m").unwrap();
        let mut h = Heap::new();
        let recv = h.alloc_object(ident("A"), vec![PoolAddr::None], 1);
        let q = h.reserve_pool();
        h.alloc_pool(q, ident("LA"), vec![PoolAddr::Pool(q)], &[1]).unwrap();
        let mut f = Frame::new();
        f.bind(ident("a"), Slot::Pool(PoolAddr::None));
        f.bind(crate::ast::Ident::this(), Slot::Val(Value::Obj(recv)));
        f.bind(ident("x"), Slot::Val(Value::Null));
        f.bind(ident("q"), Slot::Pool(PoolAddr::Pool(q)));
        assert!(wf_frame(&ctx, &h, &idx, &f).is_err(), "y is missing");
        f.bind(ident("y"), Slot::Val(Value::Null));
        assert!(wf_frame(&ctx, &h, &idx, &f).is_ok());
        let r = h.pool_append(q).unwrap();
        f.bind(ident("y"), Slot::Val(Value::Loc(q, r)));
        assert!(wf_frame(&ctx, &h, &idx, &f).is_ok());
        f.bind(ident("y"), Slot::Val(Value::Obj(recv)));
        assert!(wf_frame(&ctx, &h, &idx, &f).is_err());
    }

    fn list(len: usize, pooled: bool) -> (Heap, Value) {
        let mut h = Heap::new();
        let mut items = Vec::new();
        let pool = pooled.then(|| {
            let p = h.reserve_pool();
            h.alloc_pool(p, ident("NodeL"), vec![PoolAddr::Pool(p)], &[1]).unwrap();
            p
        });
        for _ in 0..len {
            items.push(match pool {
                Some(p) => Value::Loc(p, h.pool_append(p).unwrap()),
                None => Value::Obj(h.alloc_object(ident("Node"), vec![PoolAddr::None], 1)),
            });
        }
        for w in items.windows(2) {
            match w[0] {
                Value::Obj(o) => h.write_field(o, 0, w[1]).unwrap(),
                Value::Loc(p, n) => h.write_slot(p, n, 0, 0, w[1]).unwrap(),
                Value::Null => unreachable!(),
            }
        }
        (h, items.first().copied().unwrap_or(Value::Null))
    }

    #[test]
    fn isomorphism() {
        let idx = index();
        let (a, ra) = list(3, true);
        let (b, rb) = list(3, false);
        let (c, rc) = list(2, true);
        assert!(heap_iso(&a, &idx, &[ra], &a, &idx, &[ra]));
        assert!(heap_iso(&a, &idx, &[ra], &b, &idx, &[rb]));
        assert!(heap_iso(&b, &idx, &[rb], &a, &idx, &[ra]));
        assert!(!heap_iso(&a, &idx, &[ra], &c, &idx, &[rc]));
        // Two roots aliasing one node cannot map to two distinct nodes.
        let (d, _) = list(2, false);
        assert!(!heap_iso(&b, &idx, &[rb, rb], &d, &idx, &[Value::Obj(ObjId(0)), Value::Obj(ObjId(1))]));
    }
}
