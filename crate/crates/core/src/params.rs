//! Parameter sets and the constants derived from them.
//!
//! Every other module consumes a validated [`ParamSet`]; the NTT tables in
//! [`NttConstants`] are derived deterministically so that independent
//! implementations agree on every known-answer vector.

use std::fmt;

use thiserror::Error;

/// Identifier byte written into every key and signature header.
pub const ML_SD_256X2_ID: u8 = 0x01;

/// A complete parameter set for the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamSet {
    /// Ring degree; coefficients per polynomial.
    pub n: usize,
    /// Coefficient modulus.
    pub q: u32,
    /// Module rank.
    pub k: usize,
    /// Centered binomial parameter.
    pub eta: u32,
    /// Coefficients per encoded message bit (1 or 4).
    pub redundancy: usize,
}

impl ParamSet {
    /// The single parameter set: n = 256, q = 12289, k = 2, eta = 16.
    pub const ML_SD_256X2: ParamSet = ParamSet {
        n: 256,
        q: 12289,
        k: 2,
        eta: 16,
        redundancy: 1,
    };

    pub const fn name(&self) -> &'static str {
        "ML-SD-256x2"
    }

    /// Header identifier for this set, if it is a registered preset.
    pub fn id(&self) -> Option<u8> {
        let base = ParamSet {
            redundancy: Self::ML_SD_256X2.redundancy,
            ..*self
        };
        (base == Self::ML_SD_256X2).then_some(ML_SD_256X2_ID)
    }

    /// Resolve a header identifier to its parameter set.
    pub fn from_id(id: u8) -> Option<ParamSet> {
        (id == ML_SD_256X2_ID).then_some(Self::ML_SD_256X2)
    }

    /// Same set with a different codec redundancy.
    pub fn with_redundancy(self, redundancy: usize) -> ParamSet {
        ParamSet { redundancy, ..self }
    }

    /// Packing width: ceil(log2(q)).
    pub fn bits_per_coeff(&self) -> u32 {
        u32::BITS - (self.q - 1).leading_zeros()
    }

    /// Message bits carried by one ring element.
    pub fn mu_bits(&self) -> usize {
        self.n / self.redundancy
    }

    /// floor(q/2), the encoding of a one bit.
    pub fn half_q(&self) -> u32 {
        self.q / 2
    }

    /// floor(q/4), the single-coefficient decoding threshold.
    pub fn quarter_q(&self) -> u32 {
        self.q / 4
    }

    /// Bytes in one packed polynomial.
    pub fn packed_poly_bytes(&self) -> usize {
        (self.n * self.bits_per_coeff() as usize).div_ceil(8)
    }
}

impl Default for ParamSet {
    fn default() -> Self {
        Self::ML_SD_256X2
    }
}

/// One violated parameter invariant.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParamViolation {
    #[error("ring degree {0} is not a power of two")]
    DegreeNotPowerOfTwo(usize),
    #[error("modulus {0} is not prime")]
    ModulusNotPrime(u32),
    #[error("modulus {q} is not 1 mod 2n = {two_n}")]
    NoNegacyclicRoot { q: u32, two_n: usize },
    #[error("module rank must be positive")]
    ZeroRank,
    #[error("binomial parameter must be positive")]
    ZeroEta,
    #[error("redundancy {0} is not 1 or 4")]
    BadRedundancy(usize),
    #[error("redundancy {redundancy} does not divide n = {n}")]
    RedundancyDoesNotDivide { n: usize, redundancy: usize },
    #[error("modulus {0} does not fit the 16-bit sampler")]
    ModulusTooLarge(u32),
}

/// The full list of violations, returned by [`validate_params`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParamError(pub Vec<ParamViolation>);

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameter set:")?;
        for v in &self.0 {
            write!(f, " {v};")?;
        }
        Ok(())
    }
}

pub(crate) fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Check every parameter invariant and return all of the violations.
pub fn validate_params(p: &ParamSet) -> Result<(), ParamError> {
    let mut errs = Vec::new();
    let n_ok = p.n.is_power_of_two();
    if !n_ok {
        errs.push(ParamViolation::DegreeNotPowerOfTwo(p.n));
    }
    if !is_prime(p.q) {
        errs.push(ParamViolation::ModulusNotPrime(p.q));
    }
    if p.q > 1 << 16 {
        errs.push(ParamViolation::ModulusTooLarge(p.q));
    }
    if p.q < 2 || !(p.q as u64 - 1).is_multiple_of(2 * p.n as u64) {
        errs.push(ParamViolation::NoNegacyclicRoot {
            q: p.q,
            two_n: 2 * p.n,
        });
    }
    if p.k == 0 {
        errs.push(ParamViolation::ZeroRank);
    }
    if p.eta == 0 {
        errs.push(ParamViolation::ZeroEta);
    }
    if p.redundancy != 1 && p.redundancy != 4 {
        errs.push(ParamViolation::BadRedundancy(p.redundancy));
    } else if !p.n.is_multiple_of(p.redundancy) {
        errs.push(ParamViolation::RedundancyDoesNotDivide {
            n: p.n,
            redundancy: p.redundancy,
        });
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(ParamError(errs))
    }
}

/// Roots of unity and twiddle tables for the negacyclic transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NttConstants {
    pub q: u32,
    pub n: usize,
    /// Smallest generator of the multiplicative group mod q.
    pub generator: u32,
    /// Primitive 2n-th root of unity.
    pub gamma: u32,
    /// gamma^2, a primitive n-th root of unity.
    pub omega: u32,
    pub gamma_inv: u32,
    pub omega_inv: u32,
    pub n_inv: u32,
    /// gamma^i for i in 0..n.
    pub gamma_pows: Vec<u32>,
    /// n^-1 * gamma^-i for i in 0..n.
    pub gamma_inv_pows_scaled: Vec<u32>,
    /// omega^i for i in 0..n/2.
    pub omega_pows: Vec<u32>,
    /// omega^-i for i in 0..n/2.
    pub omega_inv_pows: Vec<u32>,
}

pub(crate) fn pow_mod(base: u32, mut exp: u64, q: u32) -> u32 {
    let q64 = q as u64;
    let mut b = base as u64 % q64;
    let mut acc = 1u64 % q64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q64;
        }
        b = b * b % q64;
        exp >>= 1;
    }
    acc as u32
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Derive the NTT roots: gamma = g^((q-1)/2n) for the smallest generator g.
pub fn derive_ntt_constants(p: &ParamSet) -> Result<NttConstants, ParamError> {
    let mut errs = Vec::new();
    if !p.n.is_power_of_two() || p.n < 2 {
        errs.push(ParamViolation::DegreeNotPowerOfTwo(p.n));
    }
    if !is_prime(p.q) {
        errs.push(ParamViolation::ModulusNotPrime(p.q));
    } else if !(p.q as u64 - 1).is_multiple_of(2 * p.n as u64) {
        errs.push(ParamViolation::NoNegacyclicRoot {
            q: p.q,
            two_n: 2 * p.n,
        });
    }
    if p.q > 1 << 16 {
        errs.push(ParamViolation::ModulusTooLarge(p.q));
    }
    if !errs.is_empty() {
        return Err(ParamError(errs));
    }

    let q = p.q;
    let n = p.n;
    let order = q - 1;
    let factors = prime_factors(order);
    let generator = (2..q)
        .find(|&g| {
            factors
                .iter()
                .all(|&f| pow_mod(g, (order / f) as u64, q) != 1)
        })
        .expect("a prime modulus has a generator");

    let gamma = pow_mod(generator, (order as u64) / (2 * n as u64), q);
    let omega = (gamma as u64 * gamma as u64 % q as u64) as u32;
    let inv = |x: u32| pow_mod(x, (q - 2) as u64, q);
    let gamma_inv = inv(gamma);
    let omega_inv = inv(omega);
    let n_inv = inv(n as u32 % q);

    let powers = |base: u32, count: usize, scale: u32| -> Vec<u32> {
        let mut acc = scale as u64;
        (0..count)
            .map(|_| {
                let v = acc as u32;
                acc = acc * base as u64 % q as u64;
                v
            })
            .collect()
    };

    Ok(NttConstants {
        q,
        n,
        generator,
        gamma,
        omega,
        gamma_inv,
        omega_inv,
        n_inv,
        gamma_pows: powers(gamma, n, 1),
        gamma_inv_pows_scaled: powers(gamma_inv, n, n_inv),
        omega_pows: powers(omega, n / 2, 1),
        omega_inv_pows: powers(omega_inv, n / 2, 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Multiplicative order by brute force.
    fn order_of(x: u32, q: u32) -> u32 {
        let mut acc = x as u64;
        let mut k = 1;
        while acc != 1 {
            acc = acc * x as u64 % q as u64;
            k += 1;
        }
        k
    }

    #[test]
    fn default_set_is_valid() {
        let p = ParamSet::default();
        assert_eq!(validate_params(&p), Ok(()));
        assert_eq!(validate_params(&p.with_redundancy(4)), Ok(()));
        assert_eq!(p.bits_per_coeff(), 14);
        assert_eq!(p.half_q(), 6144);
        assert_eq!(p.quarter_q(), 3072);
        assert_eq!(p.mu_bits(), 256);
        assert_eq!(p.with_redundancy(4).mu_bits(), 64);
        assert_eq!(p.packed_poly_bytes(), 448);
        assert_eq!(p.id(), Some(0x01));
    }

    #[test]
    fn default_ntt_constants() {
        let c = derive_ntt_constants(&ParamSet::default()).unwrap();
        assert_eq!(c.generator, 11);
        assert_eq!(c.gamma, 3400);
        assert_eq!(pow_mod(c.gamma, 512, 12289), 1);
        assert_eq!(pow_mod(c.gamma, 256, 12289), 12288);
        assert_eq!(order_of(c.gamma, 12289), 512);
        assert_eq!(order_of(c.omega, 12289), 256);
        assert_eq!(c.n_inv, 12241);
        assert_eq!(256 * 12241 % 12289, 1);
        assert_eq!(c.gamma as u64 * c.gamma_inv as u64 % 12289, 1);
        assert_eq!(c.omega as u64 * c.omega_inv as u64 % 12289, 1);
    }

    #[test]
    fn derivation_is_deterministic() {
        let p = ParamSet::default();
        assert_eq!(
            derive_ntt_constants(&p).unwrap(),
            derive_ntt_constants(&p).unwrap()
        );
    }

    #[test]
    fn composite_modulus_rejected() {
        let p = ParamSet {
            q: 12,
            ..ParamSet::default()
        };
        let err = derive_ntt_constants(&p).unwrap_err();
        assert!(err.0.contains(&ParamViolation::ModulusNotPrime(12)));
    }

    #[test]
    fn non_power_of_two_degree() {
        let p = ParamSet {
            n: 100,
            ..ParamSet::default()
        };
        let err = validate_params(&p).unwrap_err();
        assert!(err.0.contains(&ParamViolation::DegreeNotPowerOfTwo(100)));
    }

    #[test]
    fn degree_512_has_roots() {
        // 12288 / 1024 = 12
        let p = ParamSet {
            n: 512,
            ..ParamSet::default()
        };
        assert_eq!(validate_params(&p), Ok(()));
        let c = derive_ntt_constants(&p).unwrap();
        assert_eq!(order_of(c.gamma, 12289), 1024);
        assert_eq!(p.id(), None);
    }

    #[test]
    fn errors_are_collected() {
        let p = ParamSet {
            n: 100,
            q: 12,
            k: 0,
            eta: 0,
            redundancy: 3,
        };
        let err = validate_params(&p).unwrap_err();
        assert!(err.0.len() >= 5, "{err}");
    }
}
