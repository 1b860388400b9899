//! Arithmetic-plane computations over a declared lattice of number fields.
//!
//! Fields are monogenic orders `Z[α]` given by monic integer polynomials.
//! Rational primes are split by factoring the defining polynomial modulo
//! `p`; each irreducible local factor is a point of the spectrum with its
//! residue field realised as `F_p[t]/(g)`. On top of that the crate builds
//! the fibrewise norm morphisms, the splitting predicates `Π` and `Ψ`, the
//! Galois action on spectra and empirical natural densities.
//!
//! The crate is `no_std` and only needs `alloc`. Threading, files and the
//! command line live in the `arithplane` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod chebotarev;
pub mod density;
pub mod ff;
pub mod intpoly;
pub mod lattice;
pub mod plane;
pub mod scan;
pub mod sieve;
pub mod spectrum;

pub use density::{CompiledExpr, DensityEstimate, FrobeniusStats, SetExpr};
pub use ff::{FqElement, FqField, PrimeField};
pub use intpoly::{IntPoly, RatPoly, Rational};
pub use lattice::{Extension, Lattice, LatticeBuilder, NumberField};
pub use plane::FiberPoint;
pub use scan::{Runner, Serial};
pub use spectrum::SplitPrime;
