//! Well-formedness of bounds, types, contexts, layouts, classes and programs.
//!
//! Bound well-formedness is checked against a typing context. A `none`
//! argument asks for the well-formedness of the bound it is checked
//! against, which for mutually recursive classes loops back to the goal
//! being proven; such goals are discharged coinductively (an in-progress
//! goal holds).

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::ast::*;
use crate::diag::{sort_by_position, Code, Diagnostic};
use crate::lookup::ProgramIndex;
use crate::typeck;

/// The three kinds of types a context entry can carry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CtxType {
    Class(ClassType),
    Pool(PoolType),
    Bound(PoolBound),
}

impl fmt::Display for CtxType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxType::Class(t) => write!(f, "{t}"),
            CtxType::Pool(t) => write!(f, "{t}"),
            CtxType::Bound(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CtxEntry {
    pub name: Ident,
    pub ty: CtxType,
    pub span: Span,
}

/// Ordered map from variable names to types; `this` is an ordinary entry.
#[derive(Clone, Debug, Default)]
pub struct TypingContext {
    entries: Vec<CtxEntry>,
    by_name: HashMap<Ident, usize>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry; fails with the name if it is already bound.
    pub fn insert(&mut self, name: Ident, ty: CtxType, span: Span) -> Result<(), Ident> {
        if self.by_name.contains_key(&name) {
            return Err(name);
        }
        self.by_name.insert(name.clone(), self.entries.len());
        self.entries.push(CtxEntry { name, ty, span });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&CtxType> {
        self.by_name.get(name).map(|&i| &self.entries[i].ty)
    }

    pub fn entries(&self) -> &[CtxEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> {
        self.entries.iter().map(|e| &e.name)
    }

    /// Context of a class body: each pool parameter typed by its bound.
    pub fn for_class(decl: &ClassDecl) -> Result<TypingContext, Ident> {
        let mut ctx = TypingContext::new();
        for p in &decl.pool_params {
            ctx.insert(p.name.clone(), CtxType::Bound(p.bound.clone()), p.span)?;
        }
        Ok(ctx)
    }
}

/// Goals currently being proven; see the module docs.
#[derive(Default)]
pub(crate) struct Assumptions(Vec<PoolBound>);

impl Assumptions {
    pub(crate) fn holds(&self, bound: &PoolBound) -> bool {
        self.0.contains(bound)
    }
}

pub fn wf_bound(idx: &ProgramIndex, ctx: &TypingContext, bound: &PoolBound, span: Span) -> Result<(), Diagnostic> {
    wf_bound_in(idx, ctx, bound, span, &mut Assumptions::default())
}

pub(crate) fn wf_bound_in(
    idx: &ProgramIndex,
    ctx: &TypingContext,
    bound: &PoolBound,
    span: Span,
    assumed: &mut Assumptions,
) -> Result<(), Diagnostic> {
    let class = &bound.class_name;
    let params = idx.pool_params_of(class).map_err(|e| e.at(span))?;
    if params.len() != bound.args.len() {
        return Err(Diagnostic::new(
            Code::E210,
            span,
            format!(
                "`{bound}` is ill-formed: class `{class}` takes {} pool argument(s), found {}",
                params.len(),
                bound.args.len()
            ),
        ));
    }
    assumed.0.push(bound.clone());
    let result = (|| {
        for (i, (param, arg)) in params.iter().zip(&bound.args).enumerate() {
            let declared = idx.bound_of(class, param).map_err(|e| e.at(span))?;
            let expected = declared.subst(params, &bound.args).expect("arity checked above");
            if let Err(inner) = typeck::type_of_pool_in(idx, ctx, arg, &expected, span, assumed) {
                if inner.code == Code::E100 {
                    return Err(inner);
                }
                return Err(Diagnostic::new(
                    Code::E210,
                    span,
                    format!(
                        "`{bound}` is ill-formed: pool argument {} `{arg}` does not satisfy `{expected}` ({})",
                        i + 1,
                        inner.message
                    ),
                ));
            }
        }
        Ok(())
    })();
    assumed.0.pop();
    result
}

pub fn wf_class_type(idx: &ProgramIndex, ctx: &TypingContext, ty: &ClassType, span: Span) -> Result<(), Diagnostic> {
    wf_bound(idx, ctx, &ty.to_bound(), span)
}

pub fn wf_pool_type(idx: &ProgramIndex, ctx: &TypingContext, ty: &PoolType, span: Span) -> Result<(), Diagnostic> {
    let class = idx.layout_class(&ty.layout_name).map_err(|e| e.at(span))?;
    wf_bound(idx, ctx, &PoolBound::new(class.clone(), ty.args.clone()), span)
}

pub fn wf_ctx_type(idx: &ProgramIndex, ctx: &TypingContext, ty: &CtxType, span: Span) -> Result<(), Diagnostic> {
    match ty {
        CtxType::Class(t) => wf_class_type(idx, ctx, t, span),
        CtxType::Pool(t) => wf_pool_type(idx, ctx, t, span),
        CtxType::Bound(b) => wf_bound(idx, ctx, b, span),
    }
}

/// Every entry is well-formed, and every pool variable whose bound is
/// derivable names itself as its bound's first argument.
pub fn wf_context(idx: &ProgramIndex, ctx: &TypingContext) -> Result<(), Diagnostic> {
    for entry in ctx.entries() {
        wf_ctx_type(idx, ctx, &entry.ty, entry.span)?;
        let first = match &entry.ty {
            CtxType::Pool(t) => t.first_arg(),
            CtxType::Bound(b) => b.first_arg(),
            CtxType::Class(_) => continue,
        };
        if first.var() != Some(&entry.name) {
            return Err(Diagnostic::new(
                Code::E210,
                entry.span,
                format!(
                    "the type `{}` of pool `{}` must have `{}` as its first pool argument",
                    entry.ty, entry.name, entry.name
                ),
            ));
        }
    }
    Ok(())
}

/// The clusters of a layout partition its class's fields exactly.
pub fn wf_layout_decl(idx: &ProgramIndex, ld: &LayoutDecl) -> Result<(), Diagnostic> {
    let fields = idx.fields_of(&ld.class_name).map_err(|e| e.at(ld.span))?;
    let declared: HashSet<&Ident> = fields.iter().collect();
    let mut seen = HashSet::new();
    for cluster in &ld.clusters {
        for (f, span) in &cluster.fields {
            if !declared.contains(f) {
                return Err(Diagnostic::new(
                    Code::E100,
                    *span,
                    format!("layout `{}`: class `{}` has no field `{f}`", ld.name, ld.class_name),
                ));
            }
            if !seen.insert(f) {
                return Err(Diagnostic::new(
                    Code::E220,
                    *span,
                    format!("layout `{}`: field `{f}` appears in more than one place", ld.name),
                ));
            }
        }
    }
    if let Some(missing) = fields.iter().find(|f| !seen.contains(f)) {
        return Err(Diagnostic::new(
            Code::E221,
            ld.span,
            format!("layout `{}`: field `{missing}` of class `{}` is not placed in any cluster", ld.name, ld.class_name),
        ));
    }
    Ok(())
}

/// Pool arguments must name one of `allowed`; `none` only where `allow_none`.
pub(crate) fn check_scope<'a>(
    args: impl IntoIterator<Item = &'a PoolArg>,
    allowed: &HashSet<&str>,
    allow_none: bool,
    what: &dyn fmt::Display,
    span: Span,
) -> Result<(), Diagnostic> {
    for arg in args {
        match arg {
            PoolArg::None if !allow_none => {
                return Err(Diagnostic::new(
                    Code::E230,
                    span,
                    format!("`none` may not appear in {what}"),
                ))
            }
            PoolArg::Var(v) if !allowed.contains(v.as_str()) => {
                return Err(Diagnostic::new(
                    Code::E230,
                    span,
                    format!("pool argument `{v}` in {what} is neither a class pool parameter nor a method pool"),
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_header(idx: &ProgramIndex, cd: &ClassDecl) -> Result<TypingContext, Diagnostic> {
    let first = &cd.pool_params[0];
    let own: Vec<PoolArg> = cd.pool_params.iter().map(|p| PoolArg::Var(p.name.clone())).collect();
    if first.bound != PoolBound::new(cd.name.clone(), own.clone()) {
        return Err(Diagnostic::new(
            Code::E230,
            first.span,
            format!(
                "the first pool parameter of `{}` must be bounded by `{}`",
                cd.name,
                PoolBound::new(cd.name.clone(), own)
            ),
        ));
    }
    let allowed: HashSet<&str> = cd.pool_params.iter().map(|p| p.name.as_str()).collect();
    for p in &cd.pool_params {
        let what = format!("the bound of pool parameter `{}`", p.name);
        check_scope(&p.bound.args, &allowed, false, &what, p.span)?;
    }
    let ctx = TypingContext::for_class(cd)
        .map_err(|n| Diagnostic::new(Code::E230, cd.span, format!("duplicate pool parameter `{n}`")))?;
    wf_context(idx, &ctx)?;
    Ok(ctx)
}

/// Checks one class. Header problems stop the class; otherwise each field
/// and each method reports its first problem.
pub fn wf_class_decl(idx: &ProgramIndex, cd: &ClassDecl) -> Vec<Diagnostic> {
    let ctx = match check_header(idx, cd) {
        Ok(ctx) => ctx,
        Err(d) => return vec![d],
    };
    let params: HashSet<&str> = cd.pool_params.iter().map(|p| p.name.as_str()).collect();
    let mut diags = Vec::new();
    for f in &cd.fields {
        let what = format!("the type of field `{}`", f.name);
        if let Err(d) = check_scope(&f.ty.args, &params, true, &what, f.span)
            .and_then(|_| wf_class_type(idx, &ctx, &f.ty, f.span))
        {
            diags.push(d);
        }
    }
    for m in &cd.methods {
        let check = || -> Result<(), Diagnostic> {
            typeck::check_method_scope(cd, m)?;
            wf_class_type(idx, &ctx, &m.param_type, m.span)?;
            wf_class_type(idx, &ctx, &m.return_type, m.span)?;
            typeck::check_method_body(idx, &cd.name, &m.name)
        };
        if let Err(d) = check() {
            diags.push(d);
        }
    }
    diags
}

/// Name uniqueness, then layouts, then classes. Diagnostics come back in
/// source order.
pub fn wf_program(idx: &ProgramIndex, index_diags: &[Diagnostic]) -> Vec<Diagnostic> {
    let mut diags = index_diags.to_vec();
    let prog = idx.program();
    for ld in &prog.layouts {
        if is_indexed_layout(idx, ld) {
            if let Err(d) = wf_layout_decl(idx, ld) {
                diags.push(d);
            }
        }
    }
    for cd in &prog.classes {
        if is_indexed_class(idx, cd) {
            diags.extend(wf_class_decl(idx, cd));
        }
    }
    sort_by_position(&mut diags);
    diags
}

fn is_indexed_class(idx: &ProgramIndex, cd: &ClassDecl) -> bool {
    idx.class_of(&cd.name).is_ok_and(|c| std::ptr::eq(c, cd))
}

fn is_indexed_layout(idx: &ProgramIndex, ld: &LayoutDecl) -> bool {
    idx.layout_decl(&ld.name).is_ok_and(|l| std::ptr::eq(l, ld))
}
