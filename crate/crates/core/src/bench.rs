//! List-traversal microbenchmark.
//!
//! A singly linked list of `Student`s is built and then walked by chasing
//! `next` references, once with the students in a pool whose layout keeps
//! `next` in its own cluster and once with unpooled students. The language
//! has no loops, so the driver calls unrolled methods that each advance a
//! fixed number of steps. Timings are informational only.

use std::fmt;
use std::time::Instant;

use crate::ast::ident;
use crate::cli::load;
use crate::heap::{Heap, PoolAddr, Value};
use crate::eval::Interpreter;

/// Steps performed by one call of an unrolled method.
pub const CHUNK: usize = 64;

/// The benchmark program.
pub fn bench_program() -> String {
    let steps = |stmt: &str| vec![stmt; CHUNK].join(";\n        ");
    format!(
        "class Student<<s: [Student<<s>>]>> {{
    next: Student<<s>>;
    name: Student<<s>>;
    email: Student<<s>>;
    advisor: Student<<s>>;
}}
layout Split: [Student] = rec {{next}} + rec {{name, email, advisor}};
class Walker<<w: [Walker<<w, s>>], s: [Student<<s>>]>> {{
    def first(x: Student<<s>>): Student<<s>> {{
        pools
        locals cur: Student<<s>>
        ;
        cur = new Student<<s>>
    }}
    def grow(x: Student<<s>>): Student<<s>> {{
        pools
        locals cur: Student<<s>> nxt: Student<<s>>
        ;
        cur = x;
        nxt = new Student<<s>>;
        cur.next = nxt;
        nxt
    }}
    def growChunk(x: Student<<s>>): Student<<s>> {{
        pools
        locals cur: Student<<s>> nxt: Student<<s>>
        ;
        cur = x;
        {grow};
        cur
    }}
    def step(x: Student<<s>>): Student<<s>> {{
        pools
        locals cur: Student<<s>>
        ;
        cur = x;
        cur = cur.next
    }}
    def walkChunk(x: Student<<s>>): Student<<s>> {{
        pools
        locals cur: Student<<s>>
        ;
        cur = x;
        {walk}
    }}
}}
",
        grow = steps("nxt = new Student<<s>>;\n        cur.next = nxt;\n        cur = nxt"),
        walk = steps("cur = cur.next"),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchReport {
    pub n: usize,
    pub pooled_ns: u128,
    pub unpooled_ns: u128,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pooled n={} elapsed_ns={}", self.n, self.pooled_ns)?;
        writeln!(f, "unpooled n={} elapsed_ns={}", self.n, self.unpooled_ns)
    }
}

/// Builds an `n`-element list and returns the traversal time in
/// nanoseconds (at least 1).
fn run_once(n: usize, pooled: bool) -> Result<u128, String> {
    let idx = load(&bench_program()).map_err(|d| format!("benchmark program rejected: {}", d[0]))?;
    let mut heap = Heap::new();
    let students = if pooled {
        let p = heap.reserve_pool();
        let (_, clusters) = idx.layout_of("Split").map_err(|e| e.to_string())?;
        let widths: Vec<usize> = clusters.iter().map(Vec::len).collect();
        heap.alloc_pool(p, ident("Split"), vec![PoolAddr::Pool(p)], &widths).map_err(|e| e.to_string())?;
        PoolAddr::Pool(p)
    } else {
        PoolAddr::None
    };
    let walker = Value::Obj(heap.alloc_object(ident("Walker"), vec![PoolAddr::None, students], 0));
    let mut interp = Interpreter::new(&idx);
    let mut call = |heap: &mut Heap, m: &str, x: Value| interp.invoke(heap, walker, m, x).map_err(|e| e.to_string());
    let head = call(&mut heap, "first", Value::Null)?;
    let mut last = head;
    let rest = n - 1;
    for _ in 0..rest / CHUNK {
        last = call(&mut heap, "growChunk", last)?;
    }
    for _ in 0..rest % CHUNK {
        last = call(&mut heap, "grow", last)?;
    }
    let start = Instant::now();
    let mut cur = head;
    for _ in 0..rest / CHUNK {
        cur = call(&mut heap, "walkChunk", cur)?;
    }
    for _ in 0..rest % CHUNK {
        cur = call(&mut heap, "step", cur)?;
    }
    let elapsed = start.elapsed().as_nanos().max(1);
    if cur != last {
        return Err(format!("traversal ended at {cur}, expected {last}"));
    }
    Ok(elapsed)
}

/// Times full traversal of an `n`-element pooled list and unpooled list.
pub fn bench_traversal(n: usize) -> Result<BenchReport, String> {
    if n == 0 {
        return Err("the list needs at least one element".into());
    }
    Ok(BenchReport { n, pooled_ns: run_once(n, true)?, unpooled_ns: run_once(n, false)? })
}

/// Parses the two report lines back into `(label, n, elapsed_ns)`.
pub fn parse_report(text: &str) -> Option<Vec<(String, usize, u128)>> {
    text.lines()
        .map(|line| {
            let mut parts = line.split_whitespace();
            let label = parts.next()?.to_string();
            let n = parts.next()?.strip_prefix("n=")?.parse().ok()?;
            let ns = parts.next()?.strip_prefix("elapsed_ns=")?.parse().ok()?;
            parts.next().is_none().then_some((label, n, ns))
        })
        .collect()
}
