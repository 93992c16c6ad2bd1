//! Big-step evaluation.
//!
//! Sequences are evaluated by walking their spine, so straight-line method
//! bodies of any length use constant native stack; method calls recurse,
//! bounded by a configurable call depth.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::ast::*;
use crate::config::{self, RuntimeType};
use crate::diag::{Code, Diagnostic};
use crate::heap::{Frame, Heap, HeapError, PoolAddr, Slot, Value};
use crate::lookup::ProgramIndex;
use crate::typeck::method_context;
use crate::wf::TypingContext;

pub const DEFAULT_MAX_DEPTH: usize = 10_000;

/// The reduction rule that produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Value,
    Variable,
    Assignment,
    NewObject,
    NewPooledObject,
    ObjectRead,
    ObjectWrite,
    PooledObjectRead,
    PooledObjectWrite,
    MethodCall,
    Declaration,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Value => "Value",
            Rule::Variable => "Variable",
            Rule::Assignment => "Assignment",
            Rule::NewObject => "New Object",
            Rule::NewPooledObject => "New Pooled Object",
            Rule::ObjectRead => "Object Read",
            Rule::ObjectWrite => "Object Write",
            Rule::PooledObjectRead => "Pooled Object Read",
            Rule::PooledObjectWrite => "Pooled Object Write",
            Rule::MethodCall => "Method Call",
            Rule::Declaration => "Variable/Pool Declaration",
        }
    }

    pub fn is_field_read(self) -> bool {
        matches!(self, Rule::ObjectRead | Rule::PooledObjectRead)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("null dereference at {span}: `{var}` is null in {what}")]
    NullDeref { var: String, what: String, span: Span },
    #[error("call depth exceeded at {span}: more than {limit} nested calls")]
    DepthExceeded { limit: usize, span: Span },
    #[error("invariant violation after {rule} at {span}: {detail}")]
    Invariant { rule: Rule, span: Span, detail: String },
    #[error("evaluation stuck at {span}: {detail}")]
    Stuck { span: Span, detail: String },
    #[error("{0}")]
    Entry(Diagnostic),
}

impl RuntimeError {
    /// The catalogue code, for errors that have one.
    pub fn code(&self) -> Option<Code> {
        match self {
            RuntimeError::NullDeref { .. } => Some(Code::R001),
            RuntimeError::DepthExceeded { .. } => Some(Code::R002),
            RuntimeError::Entry(d) => Some(d.code),
            RuntimeError::Invariant { .. } | RuntimeError::Stuck { .. } => None,
        }
    }
}

type Eval<T> = Result<T, RuntimeError>;

fn stuck(span: Span, detail: impl fmt::Display) -> RuntimeError {
    RuntimeError::Stuck { span, detail: detail.to_string() }
}

fn heap_err(span: Span) -> impl Fn(HeapError) -> RuntimeError {
    move |e| stuck(span, e)
}

/// Result of running an entry method.
#[derive(Debug)]
pub struct Outcome {
    pub heap: Heap,
    pub value: Value,
    /// The entry method's frame when its body finished.
    pub frame: Frame,
}

struct Activation<'p> {
    ctx: Option<Rc<TypingContext>>,
    class: &'p Ident,
}

/// Evaluates expressions of one program.
pub struct Interpreter<'p> {
    idx: &'p ProgramIndex,
    max_depth: usize,
    depth: usize,
    check_invariants: bool,
    contexts: HashMap<(Ident, Ident), Rc<TypingContext>>,
    observer: Option<Box<dyn FnMut(Rule, Value) + 'p>>,
}

impl<'p> Interpreter<'p> {
    pub fn new(idx: &'p ProgramIndex) -> Self {
        Interpreter {
            idx,
            max_depth: DEFAULT_MAX_DEPTH,
            depth: 0,
            check_invariants: false,
            contexts: HashMap::new(),
            observer: None,
        }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    /// Check configuration well-formedness after every evaluation step.
    pub fn with_invariants(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    /// Called once per rule application with the value it produced.
    pub fn with_observer(mut self, f: impl FnMut(Rule, Value) + 'p) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    /// Runs `class::method` with every pool parameter `none`, an unpooled
    /// receiver and a `null` argument.
    pub fn run_entry(&mut self, class: &str, method: &str) -> Eval<Outcome> {
        let entry_span = Span::new(1, 1);
        let cd = self.idx.class_of(class).map_err(|e| RuntimeError::Entry(e.at(entry_span)))?;
        self.idx.method_decl(class, method).map_err(|e| RuntimeError::Entry(e.at(cd.span)))?;
        let mut heap = Heap::new();
        let ghost = vec![PoolAddr::None; cd.pool_params.len()];
        let recv = heap.alloc_object(cd.name.clone(), ghost, cd.fields.len());
        let (value, frame) = self.call(&mut heap, Value::Obj(recv), &ident(method), Value::Null, cd.span)?;
        Ok(Outcome { heap, value, frame })
    }

    /// Calls `method` on `receiver` with `arg`, as a call expression would.
    pub fn invoke(&mut self, heap: &mut Heap, receiver: Value, method: &str, arg: Value) -> Eval<Value> {
        let m = Ident::new(method).ok_or_else(|| stuck(Span::default(), format!("`{method}` is not a method name")))?;
        self.call(heap, receiver, &m, arg, Span::default()).map(|(v, _)| v)
    }

    fn context_for(&mut self, class: &Ident, method: &Ident, span: Span) -> Eval<Rc<TypingContext>> {
        let key = (class.clone(), method.clone());
        if let Some(c) = self.contexts.get(&key) {
            return Ok(c.clone());
        }
        let ctx = Rc::new(method_context(self.idx, class, method).map_err(|d| stuck(span, d.message))?);
        self.contexts.insert(key, ctx.clone());
        Ok(ctx)
    }

    fn call(&mut self, heap: &mut Heap, receiver: Value, method: &Ident, arg: Value, span: Span) -> Eval<(Value, Frame)> {
        if self.depth >= self.max_depth {
            return Err(RuntimeError::DepthExceeded { limit: self.max_depth, span });
        }
        let idx = self.idx;
        // getThis
        let (class, ghost) = match receiver {
            Value::Null => unreachable!("callers trap null receivers"),
            Value::Obj(o) => {
                let cell = heap.object(o).map_err(heap_err(span))?;
                (idx.class_of(&cell.class).map_err(|e| stuck(span, e))?, cell.ghost.clone())
            }
            Value::Loc(p, _) => {
                let cell = heap.pool(p).map_err(heap_err(span))?;
                let c = idx.layout_class(&cell.layout).map_err(|e| stuck(span, e))?;
                (idx.class_of(c).map_err(|e| stuck(span, e))?, cell.ghost.clone())
            }
        };
        let m = idx.method_decl(&class.name, method).map_err(|e| stuck(span, e))?;
        if ghost.len() != class.pool_params.len() {
            return Err(stuck(span, format!("receiver has {} pool parameters, `{}` takes {}", ghost.len(), class.name, class.pool_params.len())));
        }
        let mut frame = Frame::new();
        frame.bind(Ident::this(), Slot::Val(receiver));
        frame.bind(m.param.clone(), Slot::Val(arg));
        for (p, g) in class.pool_params.iter().zip(&ghost) {
            frame.bind(p.name.clone(), Slot::Pool(*g));
        }
        let act = Activation {
            ctx: if self.check_invariants { Some(self.context_for(&class.name, &m.name, m.span)?) } else { None },
            class: &class.name,
        };
        self.depth += 1;
        let result = self.eval_body(heap, &mut frame, m, &act);
        self.depth -= 1;
        let value = result?;
        if self.check_invariants {
            let formals = class.param_names();
            let args: Vec<PoolAddr> = m
                .return_type
                .args
                .iter()
                .map(|a| match a {
                    PoolArg::None => PoolAddr::None,
                    PoolArg::Var(v) => formals.iter().position(|f| f == v).map_or(PoolAddr::None, |i| ghost[i]),
                })
                .collect();
            let tau = RuntimeType::Class(m.return_type.class_name.clone(), args);
            config::weak_agree(heap, idx, Slot::Val(value), &tau).map_err(|v| RuntimeError::Invariant {
                rule: Rule::MethodCall,
                span,
                detail: format!("result of `{}::{}`: {v}", class.name, m.name),
            })?;
        }
        Ok((value, frame))
    }

    fn eval_body(&mut self, heap: &mut Heap, frame: &mut Frame, m: &MethodDecl, act: &Activation<'_>) -> Eval<Value> {
        let reserved: Vec<_> = m.pools.iter().map(|_| heap.reserve_pool()).collect();
        for l in &m.locals {
            frame.bind(l.name.clone(), Slot::Val(Value::Null));
        }
        for (p, id) in m.pools.iter().zip(&reserved) {
            frame.bind(p.name.clone(), Slot::Pool(PoolAddr::Pool(*id)));
        }
        for (p, id) in m.pools.iter().zip(&reserved) {
            let ghost = resolve_pools(frame, &p.ty.args, p.span)?;
            let (_, clusters) = self.idx.layout_of(&p.ty.layout_name).map_err(|e| stuck(p.span, e))?;
            let widths: Vec<usize> = clusters.iter().map(Vec::len).collect();
            heap.alloc_pool(*id, p.ty.layout_name.clone(), ghost, &widths).map_err(heap_err(p.span))?;
        }
        let v = self.eval(heap, frame, &m.body, act)?;
        self.observe(Rule::Declaration, v);
        Ok(v)
    }

    fn observe(&mut self, rule: Rule, v: Value) {
        if let Some(f) = &mut self.observer {
            f(rule, v);
        }
    }

    fn eval(&mut self, heap: &mut Heap, frame: &mut Frame, e: &Expr, act: &Activation<'_>) -> Eval<Value> {
        let mut out = Value::Null;
        for part in e.spine() {
            out = self.eval_one(heap, frame, part, act)?;
        }
        Ok(out)
    }

    fn eval_one(&mut self, heap: &mut Heap, frame: &mut Frame, e: &Expr, act: &Activation<'_>) -> Eval<Value> {
        let (rule, v) = self.step(heap, frame, e, act)?;
        self.observe(rule, v);
        if let Some(ctx) = &act.ctx {
            config::wf_config(ctx, heap, self.idx, frame).map_err(|v| RuntimeError::Invariant {
                rule,
                span: e.span,
                detail: format!("in `{}`: {v}", act.class),
            })?;
        }
        Ok(v)
    }

    fn step(&mut self, heap: &mut Heap, frame: &mut Frame, e: &Expr, act: &Activation<'_>) -> Eval<(Rule, Value)> {
        let span = e.span;
        let idx = self.idx;
        let var = |frame: &Frame, x: &str| frame.value(x).ok_or_else(|| stuck(span, format!("`{x}` is not bound to a value")));
        Ok(match &e.kind {
            ExprKind::Null => (Rule::Value, Value::Null),
            ExprKind::Var(x) => (Rule::Variable, var(frame, x)?),
            ExprKind::This => (Rule::Variable, var(frame, "this")?),
            ExprKind::Assign { target, rhs } => {
                let v = self.eval(heap, frame, rhs, act)?;
                frame.bind(target.clone(), Slot::Val(v));
                (Rule::Assignment, v)
            }
            ExprKind::New(t) => {
                let ghost = resolve_pools(frame, &t.args, span)?;
                match ghost.first() {
                    Some(PoolAddr::Pool(p)) => {
                        let cell = heap.pool(*p).map_err(heap_err(span))?;
                        let class = idx.layout_class(&cell.layout).map_err(|e| stuck(span, e))?;
                        if class != &t.class_name {
                            return Err(stuck(span, format!("{p} holds `{class}`, not `{}`", t.class_name)));
                        }
                        let n = heap.pool_append(*p).map_err(heap_err(span))?;
                        (Rule::NewPooledObject, Value::Loc(*p, n))
                    }
                    _ => {
                        let fields = idx.fields_of(&t.class_name).map_err(|e| stuck(span, e))?.len();
                        (Rule::NewObject, Value::Obj(heap.alloc_object(t.class_name.clone(), ghost, fields)))
                    }
                }
            }
            ExprKind::FieldRead { receiver, field } => match var(frame, receiver)? {
                Value::Null => return Err(null_deref(receiver, format!("the read `{receiver}.{field}`"), span)),
                Value::Obj(o) => {
                    let class = &heap.object(o).map_err(heap_err(span))?.class;
                    let i = idx.field_offset_class(class, field).map_err(|e| stuck(span, e))?;
                    (Rule::ObjectRead, heap.read_field(o, i).map_err(heap_err(span))?)
                }
                Value::Loc(p, n) => {
                    let layout = &heap.pool(p).map_err(heap_err(span))?.layout;
                    let (i, j) = idx.field_offset_layout(layout, field).map_err(|e| stuck(span, e))?;
                    (Rule::PooledObjectRead, heap.read_slot(p, n, i, j).map_err(heap_err(span))?)
                }
            },
            ExprKind::FieldWrite { receiver, field, source } => {
                let v = var(frame, source)?;
                match var(frame, receiver)? {
                    Value::Null => {
                        return Err(null_deref(receiver, format!("the write `{receiver}.{field} = {source}`"), span))
                    }
                    Value::Obj(o) => {
                        let class = &heap.object(o).map_err(heap_err(span))?.class;
                        let i = idx.field_offset_class(class, field).map_err(|e| stuck(span, e))?;
                        heap.write_field(o, i, v).map_err(heap_err(span))?;
                        (Rule::ObjectWrite, v)
                    }
                    Value::Loc(p, n) => {
                        let layout = &heap.pool(p).map_err(heap_err(span))?.layout;
                        let (i, j) = idx.field_offset_layout(layout, field).map_err(|e| stuck(span, e))?;
                        heap.write_slot(p, n, i, j, v).map_err(heap_err(span))?;
                        (Rule::PooledObjectWrite, v)
                    }
                }
            }
            ExprKind::Call { receiver, method, arg } => {
                let recv = var(frame, receiver)?;
                if recv == Value::Null {
                    return Err(null_deref(receiver, format!("the call `{receiver}.{method}({arg})`"), span));
                }
                let a = var(frame, arg)?;
                let (v, _) = self.call(heap, recv, method, a, span)?;
                (Rule::MethodCall, v)
            }
            ExprKind::Seq(..) => unreachable!("sequences are flattened by `eval`"),
        })
    }
}

fn null_deref(var: &str, what: String, span: Span) -> RuntimeError {
    RuntimeError::NullDeref { var: var.to_string(), what, span }
}

fn resolve_pools(frame: &Frame, args: &[PoolArg], span: Span) -> Eval<Vec<PoolAddr>> {
    args.iter()
        .map(|a| frame.pool(a).ok_or_else(|| stuck(span, format!("pool `{a}` is not bound"))))
        .collect()
}

/// Stack size for threads that run deeply recursive programs.
pub const EVAL_STACK_BYTES: usize = 1 << 30;

/// Runs `f` on a thread with a stack large enough for the default call
/// depth limit.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(EVAL_STACK_BYTES)
        .spawn(f)
        .expect("spawn evaluation thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
