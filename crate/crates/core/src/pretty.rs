//! Canonical source rendering. Output re-parses to the same program.

use std::fmt::{self, Write};

use crate::ast::*;

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.classes {
            write_class(f, c)?;
        }
        for l in &self.layouts {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn write_class(f: &mut fmt::Formatter<'_>, c: &ClassDecl) -> fmt::Result {
    write!(f, "class {}<<", c.name)?;
    for (i, p) in c.pool_params.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}: {}", p.name, p.bound)?;
    }
    writeln!(f, ">> {{")?;
    for fd in &c.fields {
        writeln!(f, "    {}: {};", fd.name, fd.ty)?;
    }
    for m in &c.methods {
        writeln!(f, "    def {}({}: {}): {} {{", m.name, m.param, m.param_type, m.return_type)?;
        f.write_str("        pools")?;
        for p in &m.pools {
            write!(f, " {}: {}", p.name, p.ty)?;
        }
        f.write_str("\n        locals")?;
        for l in &m.locals {
            write!(f, " {}: {}", l.name, l.ty)?;
        }
        f.write_str(" ;\n")?;
        let spine = m.body.spine();
        for (i, e) in spine.iter().enumerate() {
            let sep = if i + 1 < spine.len() { ";" } else { "" };
            writeln!(f, "        {e}{sep}")?;
        }
        writeln!(f, "    }}")?;
    }
    writeln!(f, "}}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Null => f.write_str("null"),
            ExprKind::Var(x) => write!(f, "{x}"),
            ExprKind::This => f.write_str("this"),
            ExprKind::New(t) => write!(f, "new {t}"),
            ExprKind::Call { receiver, method, arg } => write!(f, "{receiver}.{method}({arg})"),
            ExprKind::FieldRead { receiver, field } => write!(f, "{receiver}.{field}"),
            ExprKind::FieldWrite { receiver, field, source } => {
                write!(f, "{receiver}.{field} = {source}")
            }
            ExprKind::Assign { target, rhs } => match rhs.kind {
                // Sequencing binds looser than assignment and has no surface parentheses.
                ExprKind::Seq(..) => Err(fmt::Error),
                _ => write!(f, "{target} = {rhs}"),
            },
            ExprKind::Seq(..) => {
                let spine = self.spine();
                for (i, e) in spine.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for LayoutDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layout {}: [{}] = ", self.name, self.class_name)?;
        for (i, c) in self.clusters.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let mut fields = String::new();
            for (k, name) in c.field_names().enumerate() {
                if k > 0 {
                    fields.push_str(", ");
                }
                write!(fields, "{name}")?;
            }
            write!(f, "rec {{{fields}}}")?;
        }
        f.write_str(";")
    }
}
