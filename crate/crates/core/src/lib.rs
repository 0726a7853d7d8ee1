//! Equations in one variable over free groups, decided through unambiguous
//! context-free grammars for the kernel of the evaluation map.
//!
//! The pipeline: [`kernel_grammar`] builds a grammar for all words mapped
//! to the identity, [`automata`] intersects it with regular constraints
//! (reduced, cyclically reduced, fixed degree), and [`analysis`] answers
//! emptiness, shortest-witness, census and growth questions on the result.
//! [`equations`] packages these for a subgroup basis and an element, and
//! [`oracle`] provides brute-force ground truth.

pub mod analysis;
pub mod automata;
pub mod cli;
pub mod equations;
pub mod freegroup;
pub mod grammar;
pub mod kernel_grammar;
pub mod oracle;
