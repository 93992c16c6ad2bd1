//! The example corpus: its manifest, layout variants of its programs, and
//! output normalisation used to compare runs.
//!
//! Each manifest line reads `PATH EXIT CODES ENTRY`, where `CODES` is a
//! comma-separated list of `CODE@LINE` (or `-`) and `ENTRY` is
//! `Class::method` (or `-` for programs that are only checked).

use std::collections::HashMap;
use std::path::PathBuf;

use crate::ast::{ClusterDecl, Program};
use crate::diag::Code;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub path: String,
    pub exit: i32,
    pub codes: Vec<(Code, u32)>,
    pub entry: Option<String>,
}

impl Expectation {
    pub fn is_positive(&self) -> bool {
        self.exit == 0
    }
}

/// Directory holding the corpus shipped with this crate.
pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn parse_manifest(text: &str) -> Result<Vec<Expectation>, String> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| format!("manifest line {}: {what}: `{raw}`", k + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [path, exit, codes, entry] = fields[..] else {
            return Err(bad("expected four fields"));
        };
        let exit = exit.parse().map_err(|_| bad("bad exit code"))?;
        let codes = if codes == "-" {
            Vec::new()
        } else {
            codes
                .split(',')
                .map(|c| {
                    let (code, line) = c.split_once('@').ok_or_else(|| bad("expected CODE@LINE"))?;
                    let code = Code::parse(code).ok_or_else(|| bad("unknown code"))?;
                    let line = line.parse().map_err(|_| bad("bad line number"))?;
                    Ok((code, line))
                })
                .collect::<Result<_, String>>()?
        };
        let entry = (entry != "-").then(|| entry.to_string());
        out.push(Expectation { path: path.to_string(), exit, codes, entry });
    }
    Ok(out)
}

/// Reads the shipped manifest.
pub fn corpus() -> Result<Vec<Expectation>, String> {
    let path = corpus_dir().join("MANIFEST");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_manifest(&text)
}

/// Ways of rearranging every layout of a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayoutVariant {
    /// As written.
    Declared,
    /// All fields in one cluster (array of structures).
    SingleCluster,
    /// One cluster per field (structure of arrays).
    FullSoa,
}

impl LayoutVariant {
    pub const ALL: [LayoutVariant; 3] = [LayoutVariant::Declared, LayoutVariant::SingleCluster, LayoutVariant::FullSoa];
}

/// Rewrites every layout's clusters; field order within the layout is kept.
pub fn with_layout_variant(program: &Program, variant: LayoutVariant) -> Program {
    let mut p = program.clone();
    for l in &mut p.layouts {
        let fields: Vec<_> = l.clusters.iter().flat_map(|c| c.fields.iter().cloned()).collect();
        let span = l.clusters.first().map_or(l.span, |c| c.span);
        l.clusters = match variant {
            LayoutVariant::Declared => continue,
            LayoutVariant::SingleCluster => vec![ClusterDecl { fields, span }],
            LayoutVariant::FullSoa => fields.into_iter().map(|f| ClusterDecl { span: f.1, fields: vec![f] }).collect(),
        };
    }
    p
}

/// Renumbers `obj@K` and `pool@K` by order of first appearance.
pub fn normalize_addresses(text: &str) -> String {
    let mut maps: [HashMap<String, usize>; 2] = Default::default();
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let next = ["obj@", "pool@"]
            .iter()
            .enumerate()
            .filter_map(|(k, pat)| rest.find(pat).map(|i| (i, k, pat.len())))
            .min();
        let Some((i, k, plen)) = next else {
            out.push_str(rest);
            return out;
        };
        let digits = rest[i + plen..].bytes().take_while(u8::is_ascii_digit).count();
        out.push_str(&rest[..i + plen]);
        if digits == 0 {
            rest = &rest[i + plen..];
            continue;
        }
        let num = &rest[i + plen..i + plen + digits];
        let fresh = maps[k].len();
        let id = *maps[k].entry(num.to_string()).or_insert(fresh);
        out.push_str(&id.to_string());
        rest = &rest[i + plen + digits..];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn manifest_lines() {
        let m = parse_manifest("# c\na.shapes 1 E210@12,E220@3 -\n\nb.shapes 0 - A::m\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].codes, vec![(Code::E210, 12), (Code::E220, 3)]);
        assert_eq!(m[0].entry, None);
        assert_eq!(m[1].entry.as_deref(), Some("A::m"));
        assert!(parse_manifest("a 1 E999@1 -").is_err());
        assert!(parse_manifest("a 1").is_err());
    }

    #[test]
    fn variants() {
        let p = parse_program(
            "class A<<a: [A<<a>>]>> { f: A<<a>>; g: A<<a>>; h: A<<a>>; }\nlayout L: [A] = rec {f, h} + rec {g};",
        )
        .unwrap();
        let shape = |p: &Program| p.layouts[0].cluster_fields().iter().map(|c| c.len()).collect::<Vec<_>>();
        assert_eq!(shape(&with_layout_variant(&p, LayoutVariant::Declared)), vec![2, 1]);
        assert_eq!(shape(&with_layout_variant(&p, LayoutVariant::SingleCluster)), vec![3]);
        assert_eq!(shape(&with_layout_variant(&p, LayoutVariant::FullSoa)), vec![1, 1, 1]);
    }

    #[test]
    fn address_normalisation() {
        assert_eq!(normalize_addresses("obj@7 (pool@3, 1) obj@2 obj@7 pool@x"), "obj@0 (pool@0, 1) obj@1 obj@0 pool@x");
    }
}
