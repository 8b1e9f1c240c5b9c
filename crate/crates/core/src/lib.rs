pub mod arith;
pub mod error;
pub mod kernel;
pub mod numtheory;
pub mod bernoulli;
pub mod powersum;
pub mod exec;
pub mod congruences;
pub mod scanner;
