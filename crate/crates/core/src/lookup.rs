//! Indexed lookup functions over a parsed program.
//!
//! Everything the checker and the interpreter need to ask about
//! declarations is precomputed here once: class and layout tables, field
//! order, and per-layout `(cluster, slot)` offsets. All indices are 0-based.

use std::collections::HashMap;
use std::fmt;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LookupError {
    UnknownClass(String),
    UnknownLayout(String),
    UnknownField { class: String, field: String },
    UnknownMethod { class: String, method: String },
    UnknownPoolParam { class: String, param: String },
    UnknownLayoutField { layout: String, field: String },
}

impl LookupError {
    pub fn at(&self, span: Span) -> Diagnostic {
        Diagnostic::new(Code::E100, span, self.to_string())
    }
}

impl fmt::Display for LookupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LookupError::UnknownClass(c) => write!(f, "unknown class `{c}`"),
            LookupError::UnknownLayout(l) => write!(f, "unknown layout `{l}`"),
            LookupError::UnknownField { class, field } => {
                write!(f, "class `{class}` has no field `{field}`")
            }
            LookupError::UnknownMethod { class, method } => {
                write!(f, "class `{class}` has no method `{method}`")
            }
            LookupError::UnknownPoolParam { class, param } => {
                write!(f, "class `{class}` has no pool parameter `{param}`")
            }
            LookupError::UnknownLayoutField { layout, field } => {
                write!(f, "layout `{layout}` does not place field `{field}`")
            }
        }
    }
}

impl std::error::Error for LookupError {}

pub type Lookup<T> = Result<T, LookupError>;

struct ClassEntry {
    decl: usize,
    params: Vec<Ident>,
    fields: Vec<Ident>,
    field_offsets: HashMap<Ident, usize>,
    methods: HashMap<Ident, usize>,
}

struct LayoutEntry {
    decl: usize,
    offsets: HashMap<Ident, (usize, usize)>,
    clusters: Vec<Vec<Ident>>,
}

/// Immutable view of a program with constant-time lookups.
pub struct ProgramIndex {
    program: Program,
    classes: HashMap<Ident, ClassEntry>,
    layouts: HashMap<Ident, LayoutEntry>,
}

/// The parts of a method declaration, as returned by [`ProgramIndex::method_of`].
#[derive(Clone, Copy, Debug)]
pub struct MethodParts<'a> {
    pub return_type: &'a ClassType,
    pub param: &'a Ident,
    pub param_type: &'a ClassType,
    pub pools: &'a [PoolLocal],
    pub locals: &'a [VarLocal],
    pub body: &'a Expr,
}

impl ProgramIndex {
    /// Builds the index. Later declarations reusing a class or layout name
    /// are reported as E101 and left out of the tables.
    pub fn new(program: Program) -> (ProgramIndex, Vec<Diagnostic>) {
        let mut diags = Vec::new();
        let mut classes = HashMap::new();
        for (i, c) in program.classes.iter().enumerate() {
            if classes.contains_key(&c.name) {
                diags.push(Diagnostic::new(
                    Code::E101,
                    c.span,
                    format!("class `{}` is declared more than once", c.name),
                ));
                continue;
            }
            let fields: Vec<Ident> = c.fields.iter().map(|f| f.name.clone()).collect();
            let field_offsets = fields.iter().cloned().enumerate().map(|(k, f)| (f, k)).collect();
            let methods = c.methods.iter().enumerate().map(|(k, m)| (m.name.clone(), k)).collect();
            classes.insert(
                c.name.clone(),
                ClassEntry { decl: i, params: c.param_names(), fields, field_offsets, methods },
            );
        }
        let mut layouts = HashMap::new();
        for (i, l) in program.layouts.iter().enumerate() {
            if layouts.contains_key(&l.name) {
                diags.push(Diagnostic::new(
                    Code::E101,
                    l.span,
                    format!("layout `{}` is declared more than once", l.name),
                ));
                continue;
            }
            let clusters = l.cluster_fields();
            let mut offsets = HashMap::new();
            for (ci, cluster) in clusters.iter().enumerate() {
                for (j, f) in cluster.iter().enumerate() {
                    offsets.entry(f.clone()).or_insert((ci, j));
                }
            }
            layouts.insert(l.name.clone(), LayoutEntry { decl: i, offsets, clusters });
        }
        (ProgramIndex { program, classes, layouts }, diags)
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    fn class_entry(&self, class: &str) -> Lookup<&ClassEntry> {
        self.classes.get(class).ok_or_else(|| LookupError::UnknownClass(name(class)))
    }

    fn layout_entry(&self, layout: &str) -> Lookup<&LayoutEntry> {
        self.layouts.get(layout).ok_or_else(|| LookupError::UnknownLayout(name(layout)))
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.classes.contains_key(class)
    }

    pub fn class_of(&self, class: &str) -> Lookup<&ClassDecl> {
        Ok(&self.program.classes[self.class_entry(class)?.decl])
    }

    pub fn pool_params_of(&self, class: &str) -> Lookup<&[Ident]> {
        Ok(&self.class_entry(class)?.params)
    }

    pub fn bound_of(&self, class: &str, param: &str) -> Lookup<&PoolBound> {
        let decl = self.class_of(class)?;
        decl.pool_params
            .iter()
            .find(|p| p.name.as_str() == param)
            .map(|p| &p.bound)
            .ok_or_else(|| LookupError::UnknownPoolParam { class: name(class), param: name(param) })
    }

    pub fn method_of(&self, class: &str, method: &str) -> Lookup<MethodParts<'_>> {
        let entry = self.class_entry(class)?;
        let k = entry.methods.get(method).ok_or_else(|| LookupError::UnknownMethod {
            class: name(class),
            method: name(method),
        })?;
        let m = &self.program.classes[entry.decl].methods[*k];
        Ok(MethodParts {
            return_type: &m.return_type,
            param: &m.param,
            param_type: &m.param_type,
            pools: &m.pools,
            locals: &m.locals,
            body: &m.body,
        })
    }

    pub fn method_decl(&self, class: &str, method: &str) -> Lookup<&MethodDecl> {
        let entry = self.class_entry(class)?;
        let k = entry.methods.get(method).ok_or_else(|| LookupError::UnknownMethod {
            class: name(class),
            method: name(method),
        })?;
        Ok(&self.program.classes[entry.decl].methods[*k])
    }

    pub fn field_type_of(&self, class: &str, field: &str) -> Lookup<&ClassType> {
        let entry = self.class_entry(class)?;
        let k = self.field_offset_class(class, field)?;
        Ok(&self.program.classes[entry.decl].fields[k].ty)
    }

    pub fn fields_of(&self, class: &str) -> Lookup<&[Ident]> {
        Ok(&self.class_entry(class)?.fields)
    }

    pub fn layout_decl(&self, layout: &str) -> Lookup<&LayoutDecl> {
        Ok(&self.program.layouts[self.layout_entry(layout)?.decl])
    }

    /// The layout's class and its cluster field lists.
    pub fn layout_of(&self, layout: &str) -> Lookup<(&Ident, &[Vec<Ident>])> {
        let entry = self.layout_entry(layout)?;
        Ok((&self.program.layouts[entry.decl].class_name, &entry.clusters))
    }

    pub fn layout_class(&self, layout: &str) -> Lookup<&Ident> {
        Ok(self.layout_of(layout)?.0)
    }

    pub fn field_offset_class(&self, class: &str, field: &str) -> Lookup<usize> {
        self.class_entry(class)?
            .field_offsets
            .get(field)
            .copied()
            .ok_or_else(|| LookupError::UnknownField { class: name(class), field: name(field) })
    }

    /// `(cluster index, index within the cluster)` of a field.
    pub fn field_offset_layout(&self, layout: &str, field: &str) -> Lookup<(usize, usize)> {
        self.layout_entry(layout)?.offsets.get(field).copied().ok_or_else(|| {
            LookupError::UnknownLayoutField { layout: name(layout), field: name(field) }
        })
    }
}

fn name(text: &str) -> String {
    text.to_string()
}
