//! Key generation, signing and verification, plus the agreement harness that
//! measures how often each verification condition fails on honest signatures.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{self, decode, encode, mu_payload, CodecError};
use crate::params::{ParamError, ParamSet};
use crate::ring::{ModuleMat, ModuleVec, PolyNtt, PolyRq, Ring, Transpose};
use crate::sampling::{crh, gen_a, gen_se, hash_h, shake256, Seed256};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub rho: Seed256,
    pub p: ModuleVec<PolyRq>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub s: ModuleVec<PolyRq>,
    /// Keygen error vector; present only for freshly generated keys.
    pub e: Option<ModuleVec<PolyRq>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub z1: ModuleVec<PolyRq>,
    pub z2: PolyRq,
    pub z3: PolyRq,
    pub h: Seed256,
}

/// Where the signer's `h` digest comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HSource {
    /// Decode of `<A^T s, e2>`, computed with the secret key.
    SecretDerived,
    /// Decode of `z2`, which the verifier can recompute exactly.
    Z2Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyPolicy {
    pub h_source: HSource,
    pub check_h: bool,
}

impl VerifyPolicy {
    pub const LITERAL: VerifyPolicy = VerifyPolicy {
        h_source: HSource::SecretDerived,
        check_h: true,
    };
    pub const Z2: VerifyPolicy = VerifyPolicy {
        h_source: HSource::Z2Derived,
        check_h: true,
    };
}

impl Default for VerifyPolicy {
    fn default() -> Self {
        Self::LITERAL
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Reject {
    #[error("decoded message digest does not match")]
    MuMismatch,
    #[error("h does not match the digest of decode(z2)")]
    HMismatch,
    #[error("malformed signature: {0}")]
    Parse(#[from] CodecError),
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("agreement measurement needs at least one trial")]
    NoTrials,
}

/// The signing noise (e1, e2, e3, e4) expanded from the coin r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigningNoise {
    pub e1: ModuleVec<PolyRq>,
    pub e2: ModuleVec<PolyRq>,
    pub e3: PolyRq,
    pub e4: PolyRq,
}

/// A parameter set bound to its ring context.
#[derive(Clone, Debug)]
pub struct Scheme {
    ring: Ring,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::new(ParamSet::default()).expect("default parameters are valid")
    }
}

impl Scheme {
    pub fn new(params: ParamSet) -> Result<Self, SchemeError> {
        crate::params::validate_params(&params)?;
        Ok(Scheme {
            ring: Ring::new(params)?,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn params(&self) -> &ParamSet {
        self.ring.params()
    }

    pub fn expand_a(&self, rho: &Seed256) -> ModuleMat {
        gen_a(rho, &self.ring)
    }

    /// Keygen secrets: s from nonces 0..k, e from k..2k.
    pub fn derive_secrets(&self, xi: &Seed256) -> (ModuleVec<PolyRq>, ModuleVec<PolyRq>) {
        let k = self.params().k;
        let s = (0..k).map(|i| gen_se(xi, i as u8, &self.ring)).collect();
        let e = (k..2 * k)
            .map(|i| gen_se(xi, i as u8, &self.ring))
            .collect();
        (s, e)
    }

    /// Signing noise: e1 from nonces 0..k, e2 from k..2k, e3 = 2k, e4 = 2k+1.
    pub fn derive_signing_noise(&self, r: &Seed256) -> SigningNoise {
        let k = self.params().k;
        let se = |nonce: usize| gen_se(r, nonce as u8, &self.ring);
        SigningNoise {
            e1: (0..k).map(se).collect(),
            e2: (k..2 * k).map(se).collect(),
            e3: se(2 * k),
            e4: se(2 * k + 1),
        }
    }

    pub fn keygen(&self, zeta: &Seed256) -> (PublicKey, SecretKey) {
        let r = &self.ring;
        let (rho, xi) = hash_h(zeta.as_bytes());
        let a_hat = self.expand_a(&rho);
        let (s, e) = self.derive_secrets(&xi);
        let as_hat = r
            .matvec(&a_hat, &r.vec_ntt(&s), Transpose::Yes)
            .expect("rank k");
        let p = r.vec_add(&r.vec_inverse(&as_hat), &e).expect("rank k");
        (PublicKey { rho, p }, SecretKey { s, e: Some(e) })
    }

    fn h_digest(&self, mu: &Seed256, v: &PolyRq) -> Seed256 {
        let inner = crh(&decode(v, &self.ring).to_bytes());
        let mut buf = [0u8; 64];
        buf[..32].copy_from_slice(mu.as_bytes());
        buf[32..].copy_from_slice(inner.as_bytes());
        crh(&buf)
    }

    pub fn sign(
        &self,
        sk: &SecretKey,
        pk: &PublicKey,
        message: &[u8],
        r_coin: &Seed256,
        policy: VerifyPolicy,
    ) -> Signature {
        let r = &self.ring;
        let mu = crh(message);
        let a_hat = self.expand_a(&pk.rho);
        let noise = self.derive_signing_noise(r_coin);
        let e1_hat = r.vec_ntt(&noise.e1);
        let e2_hat = r.vec_ntt(&noise.e2);
        let p_hat = r.vec_ntt(&pk.p);

        let z1 = r
            .vec_add(
                &r.vec_inverse(&r.matvec(&a_hat, &e1_hat, Transpose::Yes).expect("rank k")),
                &noise.e2,
            )
            .expect("rank k");

        let z2 = r.add(
            &r.ntt_inverse(&r.inner_product(&p_hat, &e2_hat).expect("rank k")),
            &noise.e4,
        );

        let ap_hat = r.matvec(&a_hat, &p_hat, Transpose::No).expect("rank k");
        let encoded = encode(&mu_payload(&mu, self.params()), r).expect("payload length");
        let z3 = r.add(
            &r.add(
                &r.ntt_inverse(&r.inner_product(&ap_hat, &e1_hat).expect("rank k")),
                &noise.e3,
            ),
            &encoded,
        );

        let h = match policy.h_source {
            HSource::SecretDerived => {
                let as_hat = r
                    .matvec(&a_hat, &r.vec_ntt(&sk.s), Transpose::Yes)
                    .expect("rank k");
                let ase2 = r.ntt_inverse(&r.inner_product(&as_hat, &e2_hat).expect("rank k"));
                self.h_digest(&mu, &ase2)
            }
            HSource::Z2Derived => self.h_digest(&mu, &z2),
        };

        Signature { z1, z2, z3, h }
    }

    /// w = z2 + z3 - <P, z1>.
    pub fn verification_residue(&self, pk: &PublicKey, sig: &Signature) -> Result<PolyRq, Reject> {
        let r = &self.ring;
        let p_hat: ModuleVec<PolyNtt> = r.vec_ntt(&pk.p);
        let z1_hat = r.vec_ntt(&sig.z1);
        let pz1 =
            r.ntt_inverse(
                &r.inner_product(&p_hat, &z1_hat)
                    .map_err(|_| CodecError::Length {
                        expected: pk.p.len(),
                        actual: sig.z1.len(),
                    })?,
            );
        Ok(r.sub(&r.add(&sig.z2, &sig.z3), &pz1))
    }

    pub fn verify(
        &self,
        pk: &PublicKey,
        message: &[u8],
        sig: &Signature,
        policy: VerifyPolicy,
    ) -> Result<(), Reject> {
        let mu = crh(message);
        let w = self.verification_residue(pk, sig)?;
        if decode(&w, &self.ring) != mu_payload(&mu, self.params()) {
            return Err(Reject::MuMismatch);
        }
        if policy.check_h && sig.h != self.h_digest(&mu, &sig.z2) {
            return Err(Reject::HMismatch);
        }
        Ok(())
    }

    /// Parse and verify a serialized signature.
    pub fn verify_bytes(
        &self,
        pk: &PublicKey,
        message: &[u8],
        sig_bytes: &[u8],
        policy: VerifyPolicy,
    ) -> Result<(), Reject> {
        let sig = codec::parse_sig(sig_bytes, &self.ring)?;
        self.verify(pk, message, &sig, policy)
    }

    /// Run `trials` honest keygen/sign/verify cycles and count failures of
    /// each verification condition separately.
    ///
    /// Trial i draws (zeta, r, message) from SHAKE-256 over
    /// `master || "trial" || i (u64 LE)`, so the counts do not depend on how
    /// trials are scheduled across threads.
    pub fn measure_agreement(
        &self,
        trials: u64,
        policy: VerifyPolicy,
        master: &Seed256,
    ) -> Result<AgreementReport, SchemeError> {
        if trials == 0 {
            return Err(SchemeError::NoTrials);
        }
        let (mu_failures, h_failures) = (0..trials)
            .into_par_iter()
            .map(|i| {
                let (zeta, r_coin, msg) = trial_inputs(master, i);
                let (pk, sk) = self.keygen(&zeta);
                let sig = self.sign(&sk, &pk, &msg, &r_coin, policy);
                let mu = crh(&msg);
                let w = self.verification_residue(&pk, &sig).expect("rank k");
                let mu_fail = decode(&w, &self.ring) != mu_payload(&mu, self.params());
                let h_fail = sig.h != self.h_digest(&mu, &sig.z2);
                (mu_fail as u64, h_fail as u64)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        Ok(AgreementReport {
            trials,
            policy,
            mu_failures,
            h_failures,
            mu_rate: RateEstimate::wilson(mu_failures, trials),
            h_rate: RateEstimate::wilson(h_failures, trials),
        })
    }
}

/// Per-trial inputs for [`Scheme::measure_agreement`].
pub fn trial_inputs(master: &Seed256, i: u64) -> (Seed256, Seed256, [u8; 32]) {
    let mut buf = [0u8; 96];
    shake256(&[master.as_bytes(), b"trial", &i.to_le_bytes()], &mut buf);
    let zeta = Seed256::from_slice(&buf[..32]).expect("32 bytes");
    let r = Seed256::from_slice(&buf[32..64]).expect("32 bytes");
    let mut msg = [0u8; 32];
    msg.copy_from_slice(&buf[64..]);
    (zeta, r, msg)
}

/// A failure rate with its 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl RateEstimate {
    pub fn wilson(failures: u64, trials: u64) -> Self {
        const Z: f64 = 1.959_963_984_540_054;
        let n = trials as f64;
        let p = failures as f64 / n;
        let z2 = Z * Z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        RateEstimate {
            rate: p,
            lower: if failures == 0 {
                0.0
            } else {
                (centre - half).max(0.0)
            },
            upper: if failures == trials {
                1.0
            } else {
                (centre + half).min(1.0)
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub trials: u64,
    pub policy: VerifyPolicy,
    /// Honest signatures whose residue did not decode to the message digest.
    pub mu_failures: u64,
    /// Honest signatures whose h differs from the verifier's recomputation.
    pub h_failures: u64,
    pub mu_rate: RateEstimate,
    pub h_rate: RateEstimate,
}
