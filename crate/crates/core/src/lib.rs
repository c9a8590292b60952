pub mod arith;
pub mod poly;
pub mod groebner;
pub mod ideal;
pub mod local_model;
pub mod verifier;
