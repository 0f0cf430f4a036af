//! Core-SVP cost estimates for the primal and dual BKZ attacks, and key and
//! signature size accounting.
//!
//! The cost of BKZ with block size b is one SVP call in dimension b:
//! 2^(0.292 b) classically and 2^(0.265 b) quantumly. Both searches scan the
//! full grid m in [1, max_samples], b in [50, d] and break ties by smaller b,
//! then smaller m.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec;
use crate::params::ParamSet;

pub const CLASSICAL_SVP_EXPONENT: f64 = 0.292;
pub const QUANTUM_SVP_EXPONENT: f64 = 0.265;
/// log2 of the number of short vectors one sieve call returns, per unit of b.
pub const SIEVE_VECTORS_EXPONENT: f64 = 0.2075;
pub const MIN_BLOCK_SIZE: usize = 50;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EstimatorError {
    #[error("block size {0} is below the model's validity range (>= 50)")]
    BlockSizeTooSmall(usize),
    #[error("invalid LWE instance: {0}")]
    InvalidInstance(&'static str),
    #[error("no (m, b) in the search grid makes the {0} attack succeed")]
    NoSolution(AttackKind),
    #[error("module rank must be positive")]
    ZeroRank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Primal,
    Dual,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Primal => "primal",
            AttackKind::Dual => "dual",
        })
    }
}

/// How the dual attack's short-vector length and advantage are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualConvention {
    /// l = delta^d q^(n/d), eps = sqrt(2) exp(-2 pi^2 tau^2); the convention
    /// of the widely used NewHope/Kyber estimation script.
    #[default]
    Reference,
    /// l = delta^(d-1) q^(n/d), eps = 4 exp(-2 pi^2 tau^2).
    Textbook,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LweInstance {
    pub n_lwe: usize,
    pub q: u32,
    pub sigma: f64,
    pub max_samples: usize,
}

impl LweInstance {
    /// Instance of dimension `n_lwe` with centered-binomial noise and
    /// `2 * n_lwe` samples.
    pub fn with_binomial_noise(n_lwe: usize, q: u32, eta: u32) -> Self {
        LweInstance {
            n_lwe,
            q,
            sigma: (eta as f64 / 2.0).sqrt(),
            max_samples: 2 * n_lwe,
        }
    }

    fn validate(&self) -> Result<(), EstimatorError> {
        if self.n_lwe == 0 {
            return Err(EstimatorError::InvalidInstance("dimension is zero"));
        }
        if self.q < 2 {
            return Err(EstimatorError::InvalidInstance("modulus below 2"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(EstimatorError::InvalidInstance("sigma must be positive"));
        }
        if self.max_samples == 0 {
            return Err(EstimatorError::InvalidInstance("no samples"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttackEstimate {
    pub kind: AttackKind,
    /// Samples used.
    pub m: usize,
    /// BKZ block size.
    pub b: usize,
    pub classical_cost: f64,
    pub quantum_cost: f64,
    /// floor(classical_cost)
    pub classical_bits: u32,
    /// floor(quantum_cost)
    pub quantum_bits: u32,
}

impl AttackEstimate {
    fn new(kind: AttackKind, m: usize, b: usize, log2_repeat: f64) -> Self {
        let classical_cost = CLASSICAL_SVP_EXPONENT * b as f64 + log2_repeat;
        let quantum_cost = QUANTUM_SVP_EXPONENT * b as f64 + log2_repeat;
        AttackEstimate {
            kind,
            m,
            b,
            classical_cost,
            quantum_cost,
            classical_bits: classical_cost.floor() as u32,
            quantum_bits: quantum_cost.floor() as u32,
        }
    }
}

/// Root-Hermite factor of BKZ-b: ((pi b)^(1/b) b / (2 pi e))^(1/(2(b-1))).
pub fn bkz_delta(b: usize) -> Result<f64, EstimatorError> {
    if b < MIN_BLOCK_SIZE {
        return Err(EstimatorError::BlockSizeTooSmall(b));
    }
    Ok(ln_delta(b).exp())
}

fn ln_delta(b: usize) -> f64 {
    let b = b as f64;
    ((PI * b).ln() / b + (b / (2.0 * PI * E)).ln()) / (2.0 * (b - 1.0))
}

fn ln_delta_table(max_b: usize) -> Vec<f64> {
    (0..=max_b)
        .map(|b| {
            if b < MIN_BLOCK_SIZE {
                f64::NAN
            } else {
                ln_delta(b)
            }
        })
        .collect()
}

/// Primal (unique-SVP embedding) attack: the smallest b such that
/// sigma sqrt(b) <= delta^(2b - d - 1) q^(m/d) for some m, d = n + m + 1.
pub fn primal_cost(inst: &LweInstance) -> Result<AttackEstimate, EstimatorError> {
    inst.validate()?;
    let n = inst.n_lwe;
    let ln_q = (inst.q as f64).ln();
    let ln_sigma = inst.sigma.ln();
    let max_d = n + inst.max_samples + 1;
    let table = ln_delta_table(max_d);

    (1..=inst.max_samples)
        .into_par_iter()
        .filter_map(|m| {
            let d = n + m + 1;
            (MIN_BLOCK_SIZE..=d)
                .find(|&b| {
                    let lhs = ln_sigma + 0.5 * (b as f64).ln();
                    let rhs =
                        (2.0 * b as f64 - d as f64 - 1.0) * table[b] + (m as f64 / d as f64) * ln_q;
                    lhs <= rhs
                })
                .map(|b| (b, m))
        })
        .min()
        .map(|(b, m)| AttackEstimate::new(AttackKind::Primal, m, b, 0.0))
        .ok_or(EstimatorError::NoSolution(AttackKind::Primal))
}

/// log2 of the number of repetitions the dual distinguisher needs.
pub fn dual_log2_repetitions(
    inst: &LweInstance,
    m: usize,
    b: usize,
    convention: DualConvention,
) -> f64 {
    let n = inst.n_lwe as f64;
    let d = (m + inst.n_lwe) as f64;
    let ld = ln_delta(b);
    let ln_q = (inst.q as f64).ln();
    let (exponent, log2_c) = match convention {
        DualConvention::Reference => (d, 0.5),
        DualConvention::Textbook => (d - 1.0, 2.0),
    };
    let ln_len = exponent * ld + (n / d) * ln_q;
    let tau = (ln_len + inst.sigma.ln() - ln_q).exp();
    let log2_eps = log2_c - 2.0 * PI * PI * tau * tau / LN_2;
    (-2.0 * log2_eps - SIEVE_VECTORS_EXPONENT * b as f64).max(0.0)
}

/// Dual (short dual vector distinguisher) attack, minimized over the grid.
pub fn dual_cost(
    inst: &LweInstance,
    convention: DualConvention,
) -> Result<AttackEstimate, EstimatorError> {
    inst.validate()?;
    let best = (1..=inst.max_samples)
        .into_par_iter()
        .filter_map(|m| {
            let d = m + inst.n_lwe;
            (MIN_BLOCK_SIZE..=d)
                .map(|b| {
                    let rep = dual_log2_repetitions(inst, m, b, convention);
                    (CLASSICAL_SVP_EXPONENT * b as f64 + rep, b, m, rep)
                })
                .filter(|c| c.0.is_finite())
                .min_by(cmp_candidates)
        })
        .min_by(cmp_candidates);
    best.map(|(_, b, m, rep)| AttackEstimate::new(AttackKind::Dual, m, b, rep))
        .ok_or(EstimatorError::NoSolution(AttackKind::Dual))
}

fn cmp_candidates(
    x: &(f64, usize, usize, f64),
    y: &(f64, usize, usize, f64),
) -> std::cmp::Ordering {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
}

/// Key and signature sizes in bytes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeReport {
    /// 32 + k n log2(q) / 8
    pub pk_it: f64,
    /// k n log2(q) / 8
    pub sk_it: f64,
    /// (k + 2) n log2(q) / 8 + 32
    pub sig_it: f64,
    pub pk_wire: usize,
    pub sk_wire: usize,
    pub sig_wire: usize,
}

pub fn key_sizes(p: &ParamSet) -> Result<SizeReport, EstimatorError> {
    if p.k == 0 {
        return Err(EstimatorError::ZeroRank);
    }
    let poly_bits = p.n as f64 * (p.q as f64).log2();
    let k = p.k as f64;
    Ok(SizeReport {
        pk_it: 32.0 + k * poly_bits / 8.0,
        sk_it: k * poly_bits / 8.0,
        sig_it: (k + 2.0) * poly_bits / 8.0 + 32.0,
        pk_wire: codec::pk_len(p),
        sk_wire: codec::sk_len(p),
        sig_wire: codec::sig_len(p),
    })
}

/// One row of the parameter/security table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub q: u32,
    pub k: usize,
    pub eta: u32,
    pub sizes: SizeReport,
    pub instance: LweInstance,
    pub primal: AttackEstimate,
    pub dual: AttackEstimate,
}

pub fn table_row(
    p: &ParamSet,
    inst: &LweInstance,
    convention: DualConvention,
) -> Result<TableRow, EstimatorError> {
    Ok(TableRow {
        n: p.n,
        q: p.q,
        k: p.k,
        eta: p.eta,
        sizes: key_sizes(p)?,
        instance: *inst,
        primal: primal_cost(inst)?,
        dual: dual_cost(inst, convention)?,
    })
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>6} {:>2} {:>4} | {:>7} {:>7} {:>7} | {:>5} {:>5} {:>10} | {:>5} {:>5} {:>10}",
            "n", "q", "k", "eta", "pk", "sk", "sig", "m", "b", "primal", "m", "b", "dual"
        )?;
        let bits = |a: &AttackEstimate| format!("{} ({})", a.classical_bits, a.quantum_bits);
        write!(
            f,
            "{:>5} {:>6} {:>2} {:>4} | {:>7} {:>7} {:>7} | {:>5} {:>5} {:>10} | {:>5} {:>5} {:>10}",
            self.n,
            self.q,
            self.k,
            self.eta,
            format!("{:.1}", self.sizes.pk_it),
            format!("{:.1}", self.sizes.sk_it),
            format!("{:.1}", self.sizes.sig_it),
            self.primal.m,
            self.primal.b,
            bits(&self.primal),
            self.dual.m,
            self.dual.b,
            bits(&self.dual),
        )
    }
}
