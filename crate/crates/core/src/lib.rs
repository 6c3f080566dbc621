//! Computing over finite partial structures.

pub mod arith;
pub mod cli;
pub mod corpus;
pub mod logic;
pub mod prog2formula;
pub mod st;
pub mod structures;
pub mod tm;
pub mod verify;
