pub mod classifier;
pub mod diophantine;
pub mod numeric;
pub mod function;
pub mod jet;
pub mod verifier;
