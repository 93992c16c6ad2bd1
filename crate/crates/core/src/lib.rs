//! Parser, checker and interpreter for a small object calculus whose
//! classes are parameterised by pools and whose pools store their objects
//! under programmer-chosen field layouts.

pub mod ast;
pub mod diag;
pub mod lookup;
pub mod parser;
pub mod pretty;
pub mod typeck;
pub mod wf;
pub mod heap;
pub mod config;
pub mod eval;
pub mod cli;
pub mod corpus;
pub mod bench;
