//! # mlsd
//!
//! A Module-LWE / Module-SIS digital signature scheme over
//! R_q = Z_q[x]/(x^256 + 1) with q = 12289 and module rank 2, together with
//! a core-SVP estimator for the primal and dual lattice attacks on it.
//!
//! ```
//! use mlsd::{Scheme, Seed256, VerifyPolicy};
//!
//! let scheme = Scheme::default();
//! let (pk, sk) = scheme.keygen(&Seed256([1; 32]));
//! let sig = scheme.sign(&sk, &pk, b"message", &Seed256([2; 32]), VerifyPolicy::Z2);
//! assert!(scheme.verify(&pk, b"message", &sig, VerifyPolicy::Z2).is_ok());
//! ```
//!
//! Signatures carry `(z1, z2, z3, h)`. The verifier recomputes
//! `w = z2 + z3 - <P, z1>`, which equals the encoded message digest plus
//! small noise, and checks `h` against a digest of `decode(z2)`.
//! [`VerifyPolicy`] selects whether the signer derives `h` from the secret
//! key or from `z2`.

#![forbid(unsafe_code)]

pub mod codec;
pub mod estimator;
pub mod kat;
pub mod params;
pub mod ring;
pub mod sampling;
pub mod scheme;

pub use codec::{BitString, CodecError};
pub use params::{NttConstants, ParamSet};
pub use ring::{ModuleMat, ModuleVec, PolyNtt, PolyRq, Ring};
pub use sampling::Seed256;
pub use scheme::{HSource, PublicKey, Reject, Scheme, SecretKey, Signature, VerifyPolicy};
