//! Evaluation harness for type inference tools.
//!
//! The pipeline has four stages: tools are executed over a corpus of small
//! annotated code snippets ([`runner`]), their raw output is converted into
//! a uniform prediction format ([`translator`]), predictions are compared
//! against the ground truth ([`analyzer`]) and the results are rendered as
//! tables and machine-readable documents ([`report`]). The [`cli`] module
//! wires the stages together behind the `typebench` binary.

pub mod analyzer;
pub mod cli;
pub mod corpus;
pub mod report;
pub mod runner;
pub mod translator;
pub mod typeexpr;
