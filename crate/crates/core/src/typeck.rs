//! Expression and pool typing.
//!
//! Expressions are typed bidirectionally: `null` has no synthesised type
//! and is only accepted where a type is expected (an assignment's right
//! side, a method body's result, or the second component of a sequence in
//! checking position).

use std::collections::HashSet;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::lookup::ProgramIndex;
use crate::wf::{self, Assumptions, CtxType, TypingContext};

/// Derives `y : expected` for a pool argument.
pub fn type_of_pool(
    idx: &ProgramIndex,
    ctx: &TypingContext,
    pool: &PoolArg,
    expected: &PoolBound,
    span: Span,
) -> Result<(), Diagnostic> {
    type_of_pool_in(idx, ctx, pool, expected, span, &mut Assumptions::default())
}

pub(crate) fn type_of_pool_in(
    idx: &ProgramIndex,
    ctx: &TypingContext,
    pool: &PoolArg,
    expected: &PoolBound,
    span: Span,
    assumed: &mut Assumptions,
) -> Result<(), Diagnostic> {
    let mismatch = |found: &dyn std::fmt::Display| {
        Diagnostic::new(Code::E200, span, format!("pool `{pool}` has bound `{found}`, expected `{expected}`"))
    };
    match pool {
        PoolArg::None => {
            if assumed.holds(expected) {
                Ok(())
            } else {
                wf::wf_bound_in(idx, ctx, expected, span, assumed)
            }
        }
        PoolArg::Var(v) => match ctx.get(v) {
            None => Err(Diagnostic::new(Code::E100, span, format!("unknown pool variable `{v}`"))),
            Some(CtxType::Bound(b)) if b == expected => Ok(()),
            Some(CtxType::Bound(b)) => Err(mismatch(b)),
            Some(CtxType::Pool(t)) => {
                let class = idx.layout_class(&t.layout_name).map_err(|e| e.at(span))?;
                let derived = PoolBound::new(class.clone(), t.args.clone());
                if &derived == expected {
                    Ok(())
                } else {
                    Err(mismatch(&derived))
                }
            }
            Some(CtxType::Class(t)) => Err(Diagnostic::new(
                Code::E200,
                span,
                format!("`{v}` is an object variable of type `{t}`, not a pool"),
            )),
        },
    }
}

fn object_var<'c>(ctx: &'c TypingContext, name: &str, span: Span) -> Result<&'c ClassType, Diagnostic> {
    match ctx.get(name) {
        Some(CtxType::Class(t)) => Ok(t),
        Some(other) => Err(Diagnostic::new(
            Code::E200,
            span,
            format!("`{name}` is a pool of type `{other}`, not an object"),
        )),
        None => Err(Diagnostic::new(Code::E100, span, format!("unknown variable `{name}`"))),
    }
}

fn instantiate(idx: &ProgramIndex, recv: &ClassType, ty: &ClassType, span: Span) -> Result<ClassType, Diagnostic> {
    let params = idx.pool_params_of(&recv.class_name).map_err(|e| e.at(span))?;
    ty.subst(params, &recv.args)
        .map_err(|e| Diagnostic::new(Code::E210, span, format!("receiver type `{recv}`: {e}")))
}

fn expect_eq(found: &ClassType, expected: &ClassType, span: Span, what: &str) -> Result<(), Diagnostic> {
    if found == expected {
        Ok(())
    } else {
        Err(Diagnostic::new(Code::E200, span, format!("{what}: expected `{expected}`, found `{found}`")))
    }
}

/// Synthesises the type of `e`.
pub fn type_of_expr(idx: &ProgramIndex, ctx: &TypingContext, e: &Expr) -> Result<ClassType, Diagnostic> {
    let spine = e.spine();
    let (last, init) = spine.split_last().expect("spine is never empty");
    for s in init {
        synth_one(idx, ctx, s)?;
    }
    synth_one(idx, ctx, last)
}

/// Checks `e` against `expected`.
pub fn check_expr(idx: &ProgramIndex, ctx: &TypingContext, e: &Expr, expected: &ClassType) -> Result<(), Diagnostic> {
    let spine = e.spine();
    let (last, init) = spine.split_last().expect("spine is never empty");
    for s in init {
        synth_one(idx, ctx, s)?;
    }
    check_one(idx, ctx, last, expected)
}

fn check_one(idx: &ProgramIndex, ctx: &TypingContext, e: &Expr, expected: &ClassType) -> Result<(), Diagnostic> {
    match &e.kind {
        ExprKind::Null => wf::wf_class_type(idx, ctx, expected, e.span),
        ExprKind::Seq(..) => check_expr(idx, ctx, e, expected),
        _ => {
            let found = synth_one(idx, ctx, e)?;
            expect_eq(&found, expected, e.span, "type mismatch")
        }
    }
}

fn synth_one(idx: &ProgramIndex, ctx: &TypingContext, e: &Expr) -> Result<ClassType, Diagnostic> {
    let span = e.span;
    match &e.kind {
        ExprKind::Null => Err(Diagnostic::new(
            Code::E201,
            span,
            "`null` needs an expected type; it may only be assigned or returned",
        )),
        ExprKind::Var(x) => object_var(ctx, x, span).cloned(),
        ExprKind::This => object_var(ctx, "this", span).cloned(),
        ExprKind::New(t) => {
            wf::wf_class_type(idx, ctx, t, span)?;
            Ok(t.clone())
        }
        ExprKind::FieldRead { receiver, field } => {
            let recv = object_var(ctx, receiver, span)?;
            let declared = idx.field_type_of(&recv.class_name, field).map_err(|e| e.at(span))?;
            instantiate(idx, recv, declared, span)
        }
        ExprKind::FieldWrite { receiver, field, source } => {
            let recv = object_var(ctx, receiver, span)?;
            let declared = idx.field_type_of(&recv.class_name, field).map_err(|e| e.at(span))?;
            let ty = instantiate(idx, recv, declared, span)?;
            let src = object_var(ctx, source, span)?;
            expect_eq(src, &ty, span, &format!("writing `{source}` to field `{field}`"))?;
            Ok(ty)
        }
        ExprKind::Call { receiver, method, arg } => {
            let recv = object_var(ctx, receiver, span)?;
            let m = idx.method_of(&recv.class_name, method).map_err(|e| e.at(span))?;
            let param_ty = instantiate(idx, recv, m.param_type, span)?;
            let arg_ty = object_var(ctx, arg, span)?;
            expect_eq(arg_ty, &param_ty, span, &format!("argument of `{method}`"))?;
            instantiate(idx, recv, m.return_type, span)
        }
        ExprKind::Assign { target, rhs } => {
            let ty = object_var(ctx, target, span)?.clone();
            check_expr(idx, ctx, rhs, &ty)?;
            Ok(ty)
        }
        ExprKind::Seq(..) => type_of_expr(idx, ctx, e),
    }
}

/// The method-body context: class pool parameters, `this`, the parameter,
/// the method's pools and its locals, in that order.
pub fn method_context(idx: &ProgramIndex, class: &str, method: &str) -> Result<TypingContext, Diagnostic> {
    let cd = idx.class_of(class).map_err(|e| e.at(Span::default()))?;
    let m = idx.method_decl(class, method).map_err(|e| e.at(cd.span))?;
    let dup = |n: Ident| Diagnostic::new(Code::E230, m.span, format!("name `{n}` is bound more than once"));
    let mut ctx = TypingContext::for_class(cd).map_err(dup)?;
    let own = cd.pool_params.iter().map(|p| PoolArg::Var(p.name.clone())).collect();
    ctx.insert(Ident::this(), CtxType::Class(ClassType::new(cd.name.clone(), own)), cd.span).map_err(dup)?;
    ctx.insert(m.param.clone(), CtxType::Class(m.param_type.clone()), m.span).map_err(dup)?;
    for p in &m.pools {
        ctx.insert(p.name.clone(), CtxType::Pool(p.ty.clone()), p.span).map_err(dup)?;
    }
    for l in &m.locals {
        ctx.insert(l.name.clone(), CtxType::Class(l.ty.clone()), l.span).map_err(dup)?;
    }
    Ok(ctx)
}

/// Pool arguments in a method's types and `new` expressions must be class
/// pool parameters, method pools (not in the signature), or `none`.
pub fn check_method_scope(cd: &ClassDecl, m: &MethodDecl) -> Result<(), Diagnostic> {
    let params: HashSet<&str> = cd.pool_params.iter().map(|p| p.name.as_str()).collect();
    let mut inner = params.clone();
    inner.extend(m.pools.iter().map(|p| p.name.as_str()));
    let sig = format!("the signature of method `{}`", m.name);
    wf::check_scope(&m.param_type.args, &params, true, &sig, m.span)?;
    wf::check_scope(&m.return_type.args, &params, true, &sig, m.span)?;
    for p in &m.pools {
        wf::check_scope(&p.ty.args, &inner, true, &format!("the type of pool `{}`", p.name), p.span)?;
    }
    for l in &m.locals {
        wf::check_scope(&l.ty.args, &inner, true, &format!("the type of local `{}`", l.name), l.span)?;
    }
    let mut stack = m.body.spine();
    while let Some(e) = stack.pop() {
        match &e.kind {
            ExprKind::New(t) => wf::check_scope(&t.args, &inner, true, &format!("`new {t}`"), e.span)?,
            ExprKind::Assign { rhs, .. } => stack.extend(rhs.spine()),
            ExprKind::Seq(..) => stack.extend(e.spine()),
            _ => {}
        }
    }
    Ok(())
}

/// Scope check, context well-formedness and body typing for one method.
pub fn check_method_body(idx: &ProgramIndex, class: &str, method: &str) -> Result<(), Diagnostic> {
    let cd = idx.class_of(class).map_err(|e| e.at(Span::default()))?;
    let m = idx.method_decl(class, method).map_err(|e| e.at(cd.span))?;
    check_method_scope(cd, m)?;
    let ctx = method_context(idx, class, method)?;
    wf::wf_context(idx, &ctx)?;
    check_expr(idx, &ctx, &m.body, &m.return_type)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn index(src: &str) -> ProgramIndex {
        let (idx, diags) = ProgramIndex::new(parse_program(src).unwrap());
        assert!(diags.is_empty(), "{diags:?}");
        idx
    }

    const PROG: &str = "
class Student<<ps: [Student<<ps, pp>>], pp: [Professor<<pp, ps>>]>> {
    supervisor: Professor<<pp, ps>>;
    friend: Student<<ps, pp>>;
    def advisor(s: Student<<ps, pp>>): Professor<<pp, ps>> {
        pools
        locals
        ;
        s.supervisor
    }
    def nothing(s: Student<<ps, pp>>): Student<<ps, pp>> {
        pools
        locals
        ;
        null
    }
}
class Professor<<pp: [Professor<<pp, ps>>], ps: [Student<<ps, pp>>]>> {
    student: Student<<ps, pp>>;
}
layout StudentSplit: [Student] = rec {supervisor} + rec {friend};
layout ProfessorSplit: [Professor] = rec {student};
";

    fn body_ctx(idx: &ProgramIndex) -> TypingContext {
        method_context(idx, "Student", "advisor").unwrap()
    }

    fn parse_body(src: &str) -> Expr {
        let prog = parse_program(&format!(
            "class T<<t: [T<<t>>]>> {{ def m(u: T<<t>>): T<<t>> {{ pools locals ; {src} }} }}"
        ))
        .unwrap();
        let m = &prog.classes[0].methods[0];
        m.body.clone()
    }

    #[test]
    fn method_context_order() {
        let idx = index(PROG);
        let names: Vec<String> = body_ctx(&idx).names().map(|n| n.to_string()).collect();
        assert_eq!(names, vec!["ps", "pp", "this", "s"]);
    }

    #[test]
    fn reads_substitute_receiver_pools() {
        let idx = index(PROG);
        let ctx = body_ctx(&idx);
        let e = Expr::new(
            ExprKind::FieldRead { receiver: ident("s"), field: ident("supervisor") },
            Span::default(),
        );
        assert_eq!(type_of_expr(&idx, &ctx, &e).unwrap().to_string(), "Professor<<pp, ps>>");
    }

    #[test]
    fn null_needs_expected_type() {
        let idx = index(PROG);
        let ctx = body_ctx(&idx);
        let null = Expr::new(ExprKind::Null, Span::default());
        assert_eq!(type_of_expr(&idx, &ctx, &null).unwrap_err().code, Code::E201);
        let t = ClassType::new(ident("Student"), vec![PoolArg::Var(ident("ps")), PoolArg::Var(ident("pp"))]);
        assert!(check_expr(&idx, &ctx, &null, &t).is_ok());
        assert!(check_method_body(&idx, "Student", "nothing").is_ok());
        assert!(check_method_body(&idx, "Student", "advisor").is_ok());
    }

    #[test]
    fn writes_and_calls() {
        let idx = index(PROG);
        let ctx = body_ctx(&idx);
        let call = Expr::new(
            ExprKind::Call { receiver: ident("s"), method: ident("advisor"), arg: ident("s") },
            Span::default(),
        );
        assert_eq!(type_of_expr(&idx, &ctx, &call).unwrap().to_string(), "Professor<<pp, ps>>");
        let write = Expr::new(
            ExprKind::FieldWrite { receiver: ident("s"), field: ident("friend"), source: ident("s") },
            Span::default(),
        );
        assert!(type_of_expr(&idx, &ctx, &write).is_ok());
        let bad = Expr::new(
            ExprKind::FieldWrite { receiver: ident("s"), field: ident("supervisor"), source: ident("s") },
            Span::default(),
        );
        assert_eq!(type_of_expr(&idx, &ctx, &bad).unwrap_err().code, Code::E200);
        let unknown = Expr::new(
            ExprKind::FieldRead { receiver: ident("s"), field: ident("nope") },
            Span::default(),
        );
        assert_eq!(type_of_expr(&idx, &ctx, &unknown).unwrap_err().code, Code::E100);
    }

    #[test]
    fn sequences_and_assignments() {
        let idx = index("class T<<t: [T<<t>>]>> { }");
        let mut ctx = TypingContext::new();
        let tt = ClassType::new(ident("T"), vec![PoolArg::Var(ident("t"))]);
        ctx.insert(ident("t"), CtxType::Bound(tt.to_bound()), Span::default()).unwrap();
        ctx.insert(ident("u"), CtxType::Class(tt.clone()), Span::default()).unwrap();
        assert!(type_of_expr(&idx, &ctx, &parse_body("u = null; u")).is_ok());
        assert_eq!(type_of_expr(&idx, &ctx, &parse_body("null; u")).unwrap_err().code, Code::E201);
        assert_eq!(type_of_expr(&idx, &ctx, &parse_body("u = new T<<t>>")).unwrap(), tt);
        assert_eq!(type_of_expr(&idx, &ctx, &parse_body("u = new T<<none>>")).unwrap_err().code, Code::E200);
    }

    #[test]
    fn pool_typing() {
        let idx = index(PROG);
        let ctx = body_ctx(&idx);
        let sb = PoolBound::new(ident("Student"), vec![PoolArg::Var(ident("ps")), PoolArg::Var(ident("pp"))]);
        assert!(type_of_pool(&idx, &ctx, &PoolArg::Var(ident("ps")), &sb, Span::default()).is_ok());
        assert_eq!(
            type_of_pool(&idx, &ctx, &PoolArg::Var(ident("pp")), &sb, Span::default()).unwrap_err().code,
            Code::E200
        );
        assert!(type_of_pool(&idx, &ctx, &PoolArg::None, &sb, Span::default()).is_ok());
        assert_eq!(
            type_of_pool(&idx, &ctx, &PoolArg::Var(ident("s")), &sb, Span::default()).unwrap_err().code,
            Code::E200
        );
    }
}
