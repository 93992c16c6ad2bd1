//! Abstract syntax of pool- and layout-parameterised programs.
//!
//! Types are flat: a head name applied to a nonempty list of pool
//! arguments. Expressions only ever use bare variable names as receivers
//! and arguments, so evaluation order is fixed by `Seq` and `Assign`.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::mem;
use std::ops::Deref;

/// Reserved words of the surface language.
pub const KEYWORDS: &[&str] = &[
    "class", "layout", "rec", "pools", "locals", "def", "new", "null", "this", "none",
];

/// Source position (1-based). Metadata only; see [`Program::strip_spans`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A validated identifier: `[A-Za-z_][A-Za-z0-9_]*` and not a keyword.
///
/// `this` is a keyword but also the name under which the receiver is
/// bound in typing contexts and frames; [`Ident::this`] builds it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

impl Ident {
    pub fn new(text: &str) -> Option<Ident> {
        if is_identifier(text) && !KEYWORDS.contains(&text) {
            Some(Ident(text.to_string()))
        } else {
            None
        }
    }

    pub fn this() -> Ident {
        Ident("this".to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Panicking constructor for identifiers known to be valid (tests, generated code).
pub fn ident(text: &str) -> Ident {
    Ident::new(text).unwrap_or_else(|| panic!("`{text}` is not a valid identifier"))
}

pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Deref for Ident {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A pool argument: the global `none` pool or a pool variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PoolArg {
    None,
    Var(Ident),
}

impl PoolArg {
    pub fn var(&self) -> Option<&Ident> {
        match self {
            PoolArg::None => None,
            PoolArg::Var(v) => Some(v),
        }
    }
}

impl fmt::Display for PoolArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolArg::None => f.write_str("none"),
            PoolArg::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("substitution arity mismatch: {formals} formals, {actuals} actuals")]
pub struct ArityError {
    pub formals: usize,
    pub actuals: usize,
}

/// Common shape of the three type forms: a head applied to pool arguments.
pub trait PoolApplied: Sized + Clone {
    fn head(&self) -> &Ident;
    fn args(&self) -> &[PoolArg];
    fn with_args(&self, args: Vec<PoolArg>) -> Self;

    /// Replaces every occurrence of `formals[i]` by `actuals[i]`.
    fn subst(&self, formals: &[Ident], actuals: &[PoolArg]) -> Result<Self, ArityError> {
        if formals.len() != actuals.len() {
            return Err(ArityError { formals: formals.len(), actuals: actuals.len() });
        }
        let args = self
            .args()
            .iter()
            .map(|arg| match arg {
                PoolArg::Var(v) => formals
                    .iter()
                    .position(|f| f == v)
                    .map(|i| actuals[i].clone())
                    .unwrap_or_else(|| arg.clone()),
                PoolArg::None => PoolArg::None,
            })
            .collect();
        Ok(self.with_args(args))
    }

    fn free_pool_vars(&self) -> BTreeSet<Ident> {
        self.args().iter().filter_map(|a| a.var().cloned()).collect()
    }

    fn first_arg(&self) -> &PoolArg {
        &self.args()[0]
    }
}

macro_rules! pool_applied {
    ($ty:ident, $head:ident, $open:literal, $close:literal) => {
        #[derive(Clone, PartialEq, Eq, Hash, Debug)]
        pub struct $ty {
            pub $head: Ident,
            pub args: Vec<PoolArg>,
        }

        impl $ty {
            pub fn new($head: Ident, args: Vec<PoolArg>) -> Self {
                assert!(!args.is_empty(), "pool argument lists are nonempty");
                $ty { $head, args }
            }
        }

        impl PoolApplied for $ty {
            fn head(&self) -> &Ident {
                &self.$head
            }
            fn args(&self) -> &[PoolArg] {
                &self.args
            }
            fn with_args(&self, args: Vec<PoolArg>) -> Self {
                $ty::new(self.$head.clone(), args)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{}<<", $open, self.$head)?;
                write_list(f, &self.args)?;
                write!(f, ">>{}", $close)
            }
        }
    };
}

pool_applied!(ClassType, class_name, "", "");
pool_applied!(PoolType, layout_name, "", "");
pool_applied!(PoolBound, class_name, "[", "]");

impl ClassType {
    pub fn to_bound(&self) -> PoolBound {
        PoolBound::new(self.class_name.clone(), self.args.clone())
    }
}

impl PoolBound {
    pub fn to_class_type(&self) -> ClassType {
        ClassType::new(self.class_name.clone(), self.args.clone())
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExprKind {
    Null,
    Var(Ident),
    This,
    New(ClassType),
    Call { receiver: Ident, method: Ident, arg: Ident },
    FieldRead { receiver: Ident, field: Ident },
    FieldWrite { receiver: Ident, field: Ident, source: Ident },
    Assign { target: Ident, rhs: Box<Expr> },
    /// Sequencing; types as, and yields, its second component.
    Seq(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Right-nested sequence of `items`; `None` when empty.
    pub fn seq(items: Vec<Expr>) -> Option<Expr> {
        let mut iter = items.into_iter().rev();
        let mut acc = iter.next()?;
        for e in iter {
            let span = e.span;
            acc = Expr::new(ExprKind::Seq(Box::new(e), Box::new(acc)), span);
        }
        Some(acc)
    }

    /// The non-`Seq` components of the right spine, in evaluation order.
    /// Walks iteratively so very long method bodies do not recurse.
    pub fn spine(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                ExprKind::Seq(first, second) => {
                    out.extend(first.spine());
                    cur = second;
                }
                _ => {
                    out.push(cur);
                    return out;
                }
            }
        }
    }
}

// Long straight-line bodies nest `Seq` thousands deep; drop them without recursion.
impl Drop for Expr {
    fn drop(&mut self) {
        let mut stack: Vec<Box<Expr>> = Vec::new();
        let take = |kind: &mut ExprKind, stack: &mut Vec<Box<Expr>>| {
            match mem::replace(kind, ExprKind::Null) {
                ExprKind::Seq(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                ExprKind::Assign { rhs, .. } => stack.push(rhs),
                _ => {}
            }
        };
        take(&mut self.kind, &mut stack);
        while let Some(mut e) = stack.pop() {
            take(&mut e.kind, &mut stack);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolParam {
    pub name: Ident,
    pub bound: PoolBound,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: Ident,
    pub ty: ClassType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolLocal {
    pub name: Ident,
    pub ty: PoolType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarLocal {
    pub name: Ident,
    pub ty: ClassType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: Ident,
    pub param: Ident,
    pub param_type: ClassType,
    pub return_type: ClassType,
    pub pools: Vec<PoolLocal>,
    pub locals: Vec<VarLocal>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: Ident,
    pub pool_params: Vec<PoolParam>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn param_names(&self) -> Vec<Ident> {
        self.pool_params.iter().map(|p| p.name.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecl {
    pub fields: Vec<(Ident, Span)>,
    pub span: Span,
}

impl ClusterDecl {
    pub fn field_names(&self) -> impl Iterator<Item = &Ident> {
        self.fields.iter().map(|(f, _)| f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutDecl {
    pub name: Ident,
    pub class_name: Ident,
    pub clusters: Vec<ClusterDecl>,
    pub span: Span,
}

impl LayoutDecl {
    pub fn cluster_fields(&self) -> Vec<Vec<Ident>> {
        self.clusters.iter().map(|c| c.field_names().cloned().collect()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
    pub layouts: Vec<LayoutDecl>,
}

impl Program {
    /// Resets every source position, so `==` afterwards compares structure only.
    pub fn strip_spans(&mut self) {
        let zero = Span::default();
        for c in &mut self.classes {
            c.span = zero;
            c.pool_params.iter_mut().for_each(|p| p.span = zero);
            c.fields.iter_mut().for_each(|f| f.span = zero);
            for m in &mut c.methods {
                m.span = zero;
                m.pools.iter_mut().for_each(|p| p.span = zero);
                m.locals.iter_mut().for_each(|l| l.span = zero);
                let mut stack = vec![&mut m.body];
                while let Some(e) = stack.pop() {
                    e.span = zero;
                    match &mut e.kind {
                        ExprKind::Seq(a, b) => {
                            stack.push(a);
                            stack.push(b);
                        }
                        ExprKind::Assign { rhs, .. } => stack.push(rhs),
                        _ => {}
                    }
                }
            }
        }
        for l in &mut self.layouts {
            l.span = zero;
            for c in &mut l.clusters {
                c.span = zero;
                c.fields.iter_mut().for_each(|(_, s)| *s = zero);
            }
        }
    }
}

/// Renames pool variables inside a type according to `map`; names not in
/// the map are kept.
pub fn rename<T: PoolApplied>(ty: &T, map: &HashMap<Ident, Ident>) -> T {
    ty.with_args(
        ty.args()
            .iter()
            .map(|a| match a {
                PoolArg::Var(v) => PoolArg::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                PoolArg::None => PoolArg::None,
            })
            .collect(),
    )
}
