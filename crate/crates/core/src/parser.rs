//! Recursive-descent parser for `.shapes` source text.
//!
//! On a syntax error the parser records one diagnostic, skips to the next
//! `class` or `layout` keyword and carries on, so each top-level
//! declaration contributes at most one E001.

use std::collections::HashSet;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Kw(k) => format!("keyword `{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

const SYMBOLS: &[&str] = &["<<", ">>", ":", ",", ";", "{", "}", "[", "]", "(", ")", "=", ".", "+"];

fn lex(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let bytes = source.as_bytes();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < bytes.len() {
        let c = bytes[i];
        let span = Span::new(line, col);
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
        } else if source[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            col += (i - start) as u32;
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, span });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| source[i..].starts_with(**s)) {
            i += sym.len();
            col += sym.len() as u32;
            out.push(Token { tok: Tok::Sym(sym), span });
        } else {
            let ch = source[i..].chars().next().unwrap_or('?');
            return Err(Diagnostic::new(Code::E001, span, format!("unexpected character `{ch}`")));
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Diagnostic {
        Diagnostic::new(
            Code::E001,
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.at_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<Span> {
        if self.at_kw(k) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&format!("`{k}`")))
        }
    }

    fn ident(&mut self) -> PResult<(Ident, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                // The lexer only produces non-keyword identifiers here.
                Ok((Ident::new(&s).expect("lexed identifier"), span))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn program(&mut self) -> (Program, Vec<Diagnostic>) {
        let mut prog = Program::default();
        let mut diags = Vec::new();
        loop {
            let result = match self.peek() {
                Tok::Eof => break,
                Tok::Kw("class") => self.class_decl().map(|c| prog.classes.push(c)),
                Tok::Kw("layout") => self.layout_decl().map(|l| prog.layouts.push(l)),
                _ => Err(self.error("`class` or `layout`")),
            };
            if let Err(d) = result {
                diags.push(d);
                if !matches!(self.peek(), Tok::Kw("class") | Tok::Kw("layout")) {
                    self.bump();
                }
                while !matches!(self.peek(), Tok::Eof | Tok::Kw("class") | Tok::Kw("layout")) {
                    self.bump();
                }
            }
        }
        (prog, diags)
    }

    fn pool_args(&mut self) -> PResult<Vec<PoolArg>> {
        self.expect_sym("<<")?;
        let mut args = vec![self.pool_arg()?];
        while self.at_sym(",") {
            self.bump();
            args.push(self.pool_arg()?);
        }
        self.expect_sym(">>")?;
        Ok(args)
    }

    fn pool_arg(&mut self) -> PResult<PoolArg> {
        if self.at_kw("none") {
            self.bump();
            return Ok(PoolArg::None);
        }
        match self.ident() {
            Ok((v, _)) => Ok(PoolArg::Var(v)),
            Err(_) => Err(self.error("a pool argument")),
        }
    }

    fn class_type(&mut self) -> PResult<ClassType> {
        let (name, _) = self.ident()?;
        Ok(ClassType::new(name, self.pool_args()?))
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        let span = self.expect_kw("class")?;
        let (name, _) = self.ident()?;
        self.expect_sym("<<")?;
        let mut pool_params = vec![self.pool_param()?];
        while self.at_sym(",") {
            self.bump();
            pool_params.push(self.pool_param()?);
        }
        self.expect_sym(">>")?;
        self.expect_sym("{")?;
        let mut fields = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let (fname, fspan) = self.ident()?;
            self.expect_sym(":")?;
            let ty = self.class_type()?;
            self.expect_sym(";")?;
            fields.push(FieldDecl { name: fname, ty, span: fspan });
        }
        let mut methods = Vec::new();
        while self.at_kw("def") {
            methods.push(self.method_decl()?);
        }
        self.expect_sym("}")?;
        let decl = ClassDecl { name, pool_params, fields, methods, span };
        check_class_names(&decl)?;
        Ok(decl)
    }

    fn pool_param(&mut self) -> PResult<PoolParam> {
        let (name, span) = self.ident()?;
        self.expect_sym(":")?;
        self.expect_sym("[")?;
        let (class_name, _) = self.ident()?;
        let args = self.pool_args()?;
        self.expect_sym("]")?;
        Ok(PoolParam { name, bound: PoolBound::new(class_name, args), span })
    }

    fn method_decl(&mut self) -> PResult<MethodDecl> {
        let span = self.expect_kw("def")?;
        let (name, _) = self.ident()?;
        self.expect_sym("(")?;
        let (param, _) = self.ident()?;
        self.expect_sym(":")?;
        let param_type = self.class_type()?;
        self.expect_sym(")")?;
        self.expect_sym(":")?;
        let return_type = self.class_type()?;
        self.expect_sym("{")?;
        self.expect_kw("pools")?;
        let mut pools = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let (pname, pspan) = self.ident()?;
            self.expect_sym(":")?;
            let (layout, _) = self.ident()?;
            let args = self.pool_args()?;
            pools.push(PoolLocal { name: pname, ty: PoolType::new(layout, args), span: pspan });
        }
        self.expect_kw("locals")?;
        let mut locals = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let (lname, lspan) = self.ident()?;
            self.expect_sym(":")?;
            let ty = self.class_type()?;
            locals.push(VarLocal { name: lname, ty, span: lspan });
        }
        self.expect_sym(";")?;
        let body = self.seq_expr()?;
        self.expect_sym("}")?;
        Ok(MethodDecl { name, param, param_type, return_type, pools, locals, body, span })
    }

    fn seq_expr(&mut self) -> PResult<Expr> {
        let mut items = vec![self.assign_expr()?];
        while self.at_sym(";") {
            self.bump();
            items.push(self.assign_expr()?);
        }
        Ok(Expr::seq(items).expect("nonempty"))
    }

    fn assign_expr(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Sym("=")) {
            let (target, span) = self.ident()?;
            self.bump();
            let rhs = self.assign_expr()?;
            return Ok(Expr::new(ExprKind::Assign { target, rhs: Box::new(rhs) }, span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek() {
            Tok::Kw("null") => {
                self.bump();
                ExprKind::Null
            }
            Tok::Kw("this") => {
                self.bump();
                ExprKind::This
            }
            Tok::Kw("new") => {
                self.bump();
                ExprKind::New(self.class_type()?)
            }
            Tok::Ident(_) => {
                let (x, _) = self.ident()?;
                if !self.at_sym(".") {
                    return Ok(Expr::new(ExprKind::Var(x), span));
                }
                self.bump();
                let (member, _) = self.ident()?;
                if self.at_sym("(") {
                    self.bump();
                    let (arg, _) = self.ident()?;
                    self.expect_sym(")")?;
                    ExprKind::Call { receiver: x, method: member, arg }
                } else if self.at_sym("=") {
                    self.bump();
                    let (source, _) = self.ident()?;
                    ExprKind::FieldWrite { receiver: x, field: member, source }
                } else {
                    ExprKind::FieldRead { receiver: x, field: member }
                }
            }
            _ => return Err(self.error("an expression")),
        };
        Ok(Expr::new(kind, span))
    }

    fn layout_decl(&mut self) -> PResult<LayoutDecl> {
        let span = self.expect_kw("layout")?;
        let (name, _) = self.ident()?;
        self.expect_sym(":")?;
        self.expect_sym("[")?;
        let (class_name, _) = self.ident()?;
        self.expect_sym("]")?;
        self.expect_sym("=")?;
        let mut clusters = vec![self.cluster()?];
        while self.at_sym("+") {
            self.bump();
            clusters.push(self.cluster()?);
        }
        self.expect_sym(";")?;
        Ok(LayoutDecl { name, class_name, clusters, span })
    }

    fn cluster(&mut self) -> PResult<ClusterDecl> {
        let span = self.expect_kw("rec")?;
        self.expect_sym("{")?;
        if self.at_sym("}") {
            return Err(Diagnostic::new(Code::E001, span, "empty cluster: `rec` needs at least one field"));
        }
        let mut fields = vec![self.ident()?];
        while self.at_sym(",") {
            self.bump();
            fields.push(self.ident()?);
        }
        self.expect_sym("}")?;
        Ok(ClusterDecl { fields, span })
    }
}

/// Name distinctness within a class: pool parameters, fields, methods, and
/// per method the parameter, pools, locals, `this`, and the class parameters.
fn check_class_names(decl: &ClassDecl) -> PResult<()> {
    fn unique<'a>(
        what: &str,
        items: impl IntoIterator<Item = (&'a Ident, Span)>,
        seen: &mut HashSet<&'a str>,
    ) -> PResult<()> {
        for (name, span) in items {
            if !seen.insert(name.as_str()) {
                return Err(Diagnostic::new(Code::E001, span, format!("duplicate {what} `{name}`")));
            }
        }
        Ok(())
    }
    let mut params = HashSet::new();
    unique("pool parameter", decl.pool_params.iter().map(|p| (&p.name, p.span)), &mut params)?;
    unique("field", decl.fields.iter().map(|f| (&f.name, f.span)), &mut HashSet::new())?;
    unique("method", decl.methods.iter().map(|m| (&m.name, m.span)), &mut HashSet::new())?;
    for m in &decl.methods {
        let mut seen = params.clone();
        unique("variable", [(&m.param, m.span)], &mut seen)?;
        unique("pool", m.pools.iter().map(|p| (&p.name, p.span)), &mut seen)?;
        unique("local", m.locals.iter().map(|l| (&l.name, l.span)), &mut seen)?;
    }
    Ok(())
}

/// Parses a whole program. Never returns both an AST and diagnostics.
pub fn parse_program(source: &str) -> Result<Program, Vec<Diagnostic>> {
    let toks = lex(source).map_err(|d| vec![d])?;
    let (prog, diags) = Parser { toks, pos: 0 }.program();
    if diags.is_empty() {
        Ok(prog)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> Program {
        parse_program(src).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn parse_err(src: &str) -> Vec<Diagnostic> {
        parse_program(src).expect_err("expected a syntax error")
    }

    #[test]
    fn smallest_class() {
        let p = parse_ok("class C<<p: [C<<p>>]>> { }");
        assert_eq!(p.classes.len(), 1);
        let c = &p.classes[0];
        assert_eq!(c.pool_params.len(), 1);
        assert!(c.fields.is_empty() && c.methods.is_empty());
        assert_eq!(c.pool_params[0].bound.to_string(), "[C<<p>>]");
    }

    #[test]
    fn layout_clusters() {
        let p = parse_ok("layout L: [Video] = rec {id, likes} + rec {views};");
        let l = &p.layouts[0];
        assert_eq!(l.name.as_str(), "L");
        assert_eq!(l.class_name.as_str(), "Video");
        let names: Vec<Vec<String>> = l
            .cluster_fields()
            .into_iter()
            .map(|c| c.into_iter().map(|f| f.to_string()).collect())
            .collect();
        assert_eq!(names, vec![vec!["id", "likes"], vec!["views"]]);
    }

    #[test]
    fn empty_cluster_rejected() {
        let d = parse_err("layout L: [V] = rec { };");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::E001);
        assert_eq!(d[0].span, Span::new(1, 17));
    }

    #[test]
    fn none_as_declared_name() {
        let d = parse_err("class C<<none: [C<<none>>]>> { }");
        assert_eq!(d[0].code, Code::E001);
        let d = parse_err(
            "class C<<p: [C<<p>>]>> { def m(x: C<<p>>): C<<p>> { pools none: L<<none>> locals ; x } }",
        );
        assert_eq!(d[0].code, Code::E001);
    }

    #[test]
    fn expressions() {
        let src = "class C<<p: [C<<p>>]>> {
            f: C<<p>>;
            def m(x: C<<p>>): C<<p>> {
                pools locals y: C<<p>> ;
                y = new C<<p>>; y.f = x; y = y.f; y.m(x); y = x = null; this
            }
        }";
        let p = parse_ok(src);
        let body = &p.classes[0].methods[0].body;
        let kinds: Vec<&ExprKind> = body.spine().into_iter().map(|e| &e.kind).collect();
        assert_eq!(kinds.len(), 6);
        assert!(matches!(kinds[0], ExprKind::Assign { rhs, .. } if matches!(rhs.kind, ExprKind::New(_))));
        assert!(matches!(kinds[1], ExprKind::FieldWrite { .. }));
        assert!(matches!(kinds[2], ExprKind::Assign { rhs, .. } if matches!(rhs.kind, ExprKind::FieldRead { .. })));
        assert!(matches!(kinds[3], ExprKind::Call { .. }));
        assert!(matches!(kinds[4], ExprKind::Assign { rhs, .. } if matches!(rhs.kind, ExprKind::Assign { .. })));
        assert!(matches!(kinds[5], ExprKind::This));
    }

    #[test]
    fn comments_and_positions() {
        let src = "// header\nclass C<<p: [C<<p>>]>> {\n  f: C<<p>>; // trailing\n}";
        let p = parse_ok(src);
        assert_eq!(p.classes[0].span, Span::new(2, 1));
        assert_eq!(p.classes[0].fields[0].span, Span::new(3, 3));
    }

    #[test]
    fn unbalanced_brackets() {
        let d = parse_err("class C<<p: [C<<p>>>> { }");
        assert_eq!(d[0].code, Code::E001);
        let d = parse_err("class C<<p: [C<<p>>]>> { ");
        assert_eq!(d[0].code, Code::E001);
    }

    #[test]
    fn one_error_per_declaration() {
        let src = "class A<<p: [A<<p>>]>> { f: }\nclass B<<p: [B<<p>>]>> { }\nlayout L: [B] = ;";
        let d = parse_err(src);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].span.line, 1);
        assert_eq!(d[1].span.line, 3);
    }

    #[test]
    fn duplicate_names_in_class() {
        let d = parse_err("class C<<p: [C<<p>>]>> { f: C<<p>>; f: C<<p>>; }");
        assert!(d[0].message.contains("duplicate field"));
        let d = parse_err(
            "class C<<p: [C<<p>>]>> { def m(x: C<<p>>): C<<p>> { pools locals x: C<<p>> ; x } }",
        );
        assert!(d[0].message.contains("duplicate local"));
        let d = parse_err(
            "class C<<p: [C<<p>>]>> { def m(p: C<<p>>): C<<p>> { pools locals ; p } }",
        );
        assert!(d[0].message.contains("duplicate variable"));
    }

    #[test]
    fn stray_character() {
        let d = parse_err("class C<<p: [C<<p>>]>> { } $");
        assert_eq!(d[0].code, Code::E001);
        assert_eq!(d[0].span, Span::new(1, 28));
    }
}
