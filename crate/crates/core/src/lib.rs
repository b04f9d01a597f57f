//! Difference families, designs and graceful labelings over finite fields,
//! modelled through the Singer cycle of PG(F_q^v).

pub mod field;
pub mod graph;
pub mod singer;
pub mod admissible;
pub mod verify;
pub mod search;
pub mod json;
pub mod catalog;
