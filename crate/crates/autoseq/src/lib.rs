//! Finite automata with output over base-q digits, exact root-of-unity
//! arithmetic, Dirichlet characters, and the classification of completely
//! multiplicative automatic sequences as character-matching or eventually
//! zero on primes, together with desk-scale executable versions of the
//! constructions behind that dichotomy.

pub mod characters;
pub mod cli;
pub mod dfao;
pub mod multfun;
pub mod numtheory;
pub mod proofs;
pub mod values;

pub use dfao::{Dfao, KernelReport};
pub use multfun::CMFunction;
pub use values::UnitValue;
