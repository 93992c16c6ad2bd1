//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::process::Command;

use proptest::prelude::*;
use shapes::ast::{Ident, Program};
use shapes::cli::load;
use shapes::corpus::{corpus_dir, with_layout_variant, Expectation, LayoutVariant};
use shapes::eval::{Interpreter, Outcome, Rule};
use shapes::heap::Value;
use shapes::lookup::ProgramIndex;
use shapes::parser::parse_program;
use shapes::wf::wf_program;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `shapes` binary.
pub fn shapes(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_shapes")).args(args).output().expect("run shapes");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn corpus_path(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

pub fn corpus_source(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).expect("read corpus file")
}

pub fn split_entry(entry: &str) -> (&str, &str) {
    entry.split_once("::").expect("Class::method")
}

/// One run of an entry method under a layout variant.
pub struct VariantRun {
    pub idx: ProgramIndex,
    pub outcome: Outcome,
    pub trace: Vec<(Rule, Value)>,
    pub locals: Vec<Ident>,
}

impl VariantRun {
    /// Field-read results in evaluation order.
    pub fn reads(&self) -> Vec<Value> {
        self.trace.iter().filter(|(r, _)| r.is_field_read()).map(|(_, v)| *v).collect()
    }

    /// Result, entry locals, then every cell's identity in address order.
    pub fn roots(&self) -> Vec<Value> {
        let mut roots = vec![self.outcome.value];
        for l in &self.locals {
            roots.push(self.outcome.frame.value(l).unwrap_or(Value::Null));
        }
        let heap = &self.outcome.heap;
        roots.extend(heap.objects().map(|(o, _)| Value::Obj(o)));
        for (p, cell) in heap.pools() {
            roots.extend((0..cell.size()).map(|n| Value::Loc(p, n)));
        }
        roots
    }
}

pub fn run_variant(program: &Program, entry: &str, variant: LayoutVariant, invariants: bool) -> Result<VariantRun, String> {
    let (idx, dups) = ProgramIndex::new(with_layout_variant(program, variant));
    let diags = wf_program(&idx, &dups);
    if !diags.is_empty() {
        return Err(format!("{variant:?} variant rejected: {}", diags[0]));
    }
    let (class, method) = split_entry(entry);
    let locals = idx.method_decl(class, method).map_err(|e| e.to_string())?.locals.iter().map(|l| l.name.clone()).collect();
    let mut trace = Vec::new();
    let outcome = {
        let mut interp = Interpreter::new(&idx).with_invariants(invariants).with_observer(|r, v| trace.push((r, v)));
        interp.run_entry(class, method).map_err(|e| format!("{variant:?}: {e}"))?
    };
    Ok(VariantRun { idx, outcome, trace, locals })
}

/// The two sequences correspond element-wise under one bijection that
/// maps `null` to itself.
pub fn value_isomorphic(a: &[Value], b: &[Value]) -> bool {
    bijective(&[&[Value::Null], a].concat(), &[&[Value::Null], b].concat())
}

/// The two sequences correspond element-wise under one bijection.
pub fn bijective<T: Eq + Hash>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut bwd = HashMap::new();
    a.iter().zip(b).all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *bwd.entry(y).or_insert(x) == x)
}

/// Values printed by field-read lines of a `--trace` log.
pub fn traced_reads(stderr: &str) -> Vec<&str> {
    stderr
        .lines()
        .filter_map(|l| l.strip_prefix("[Object Read] ").or_else(|| l.strip_prefix("[Pooled Object Read] ")))
        .collect()
}

/// Writes `program` rearranged by `variant` to a scratch file and runs it
/// through the binary with `--trace`.
pub fn run_variant_cli(program: &Program, name: &str, entry: &str, variant: LayoutVariant) -> Output {
    let dir = std::env::temp_dir().join(format!("shapes-variants-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    let path = dir.join(format!("{variant:?}-{name}"));
    std::fs::write(&path, with_layout_variant(program, variant).to_string()).expect("write variant");
    let out = shapes(&["run", &path.display().to_string(), "--entry", entry, "--trace", "--check-invariants"]);
    let _ = std::fs::remove_file(&path);
    out
}

pub fn positive_entries(manifest: &[Expectation]) -> Vec<(&Expectation, &str)> {
    manifest
        .iter()
        .filter(|e| e.is_positive())
        .filter_map(|e| e.entry.as_deref().map(|en| (e, en)))
        .collect()
}

pub fn has_pools(program: &Program) -> bool {
    program.classes.iter().flat_map(|c| &c.methods).any(|m| !m.pools.is_empty())
}

pub fn parse(src: &str) -> Program {
    parse_program(src).unwrap_or_else(|d| panic!("parse failed: {d:?}"))
}

/// A one-class program whose fields are split into clusters at the cut
/// points, in the shuffled order.
pub fn layout_program(order: &[usize], cuts: &[bool]) -> String {
    let n = order.len();
    let mut src = String::from("class C<<p: [C<<p>>]>> {\n");
    for k in 0..n {
        src.push_str(&format!("    f{k}: C<<p>>;\n"));
    }
    src.push_str("}\nlayout L: [C] = rec {");
    for (pos, f) in order.iter().enumerate() {
        if pos > 0 {
            src.push_str(if cuts[pos - 1] { "} + rec {" } else { ", " });
        }
        src.push_str(&format!("f{f}"));
    }
    src.push_str("};\n");
    src
}

pub fn layout_program_strategy() -> impl Strategy<Value = String> {
    (1usize..=12)
        .prop_flat_map(|n| (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(any::<bool>(), n - 1)))
        .prop_map(|(order, cuts)| layout_program(&order, &cuts))
}

/// Field offsets of the program's layout `L` over class `C` are total,
/// injective, cover every slot once, and agree with class offsets.
pub fn check_offset_algebra(src: &str) -> Result<(), String> {
    let idx = load(src).map_err(|d| format!("rejected: {}", d[0]))?;
    let fields = idx.fields_of("C").map_err(|e| e.to_string())?;
    let (_, clusters) = idx.layout_of("L").map_err(|e| e.to_string())?;
    let mut seen = HashSet::new();
    for f in fields {
        let (i, j) = idx.field_offset_layout("L", f).map_err(|e| format!("not total at {f}: {e}"))?;
        if !seen.insert((i, j)) {
            return Err(format!("({i}, {j}) assigned twice"));
        }
        if clusters.get(i).and_then(|c| c.get(j)) != Some(f) {
            return Err(format!("({i}, {j}) does not hold {f}"));
        }
    }
    let slots: usize = clusters.iter().map(Vec::len).sum();
    if seen.len() != slots {
        return Err(format!("{} offsets for {slots} slots", seen.len()));
    }
    for (k, f) in fields.iter().enumerate() {
        if idx.field_offset_class("C", f).map_err(|e| e.to_string())? != k {
            return Err(format!("class offset of {f} is not {k}"));
        }
    }
    Ok(())
}
