//! Partial 2-descent on hyperelliptic curves over Q.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`], [`poly`], [`fp`], [`hensel`], [`factor`], [`form`], [`realroots`]:
//!   exact integer/rational algebra, binary forms and factorization over Q.
//! * [`nf`]: number fields, primes, valuations and local square classes.
//! * [`local`]: p-adic and real solubility of `y^2 = f(x)`.
//! * [`selmer`]: the fake 2-Selmer set computation.
//! * [`edwards`]: the parametrization corpus for `x^3 + y^4 + z^5 = 0` and the
//!   elimination of its curves by local obstructions.

pub mod arith;
pub mod error;
pub mod fp;
pub mod poly;
pub mod hensel;
pub mod factor;
pub mod form;
pub mod realroots;
pub mod nf;
pub mod place;
pub mod f2;
pub mod sqclass;
pub mod arithdata;
pub mod local;
pub mod selmer;
pub mod edwards;
