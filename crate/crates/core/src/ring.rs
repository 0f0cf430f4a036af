//! Arithmetic in R_q = Z_q[x]/(x^n + 1) and over rank-k modules.
//!
//! Coefficient-domain values ([`PolyRq`]) and NTT-domain values
//! ([`PolyNtt`]) are distinct types, so a product can only be formed after an
//! explicit transform. Coefficients are always stored in `[0, q)`.

use thiserror::Error;

use crate::params::{derive_ntt_constants, NttConstants, ParamError, ParamSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("coefficient {value} at index {index} is not below q = {q}")]
    CoefficientOutOfRange { index: usize, value: u32, q: u32 },
}

/// A polynomial in coefficient representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRq {
    coeffs: Vec<u32>,
}

/// A polynomial in NTT (evaluation) representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyNtt {
    evals: Vec<u32>,
}

impl PolyRq {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl PolyNtt {
    pub fn evals(&self) -> &[u32] {
        &self.evals
    }
}

/// A length-k vector of ring elements, all in the same domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVec<P> {
    elems: Vec<P>,
}

impl<P> ModuleVec<P> {
    pub fn new(elems: Vec<P>) -> Self {
        ModuleVec { elems }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, P> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[P] {
        &self.elems
    }

    pub fn into_inner(self) -> Vec<P> {
        self.elems
    }
}

impl<P> std::ops::Index<usize> for ModuleVec<P> {
    type Output = P;

    fn index(&self, i: usize) -> &P {
        &self.elems[i]
    }
}

impl<P> FromIterator<P> for ModuleVec<P> {
    fn from_iter<I: IntoIterator<Item = P>>(iter: I) -> Self {
        ModuleVec::new(iter.into_iter().collect())
    }
}

/// A k x k matrix of NTT-domain ring elements, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMat {
    k: usize,
    entries: Vec<PolyNtt>,
}

impl ModuleMat {
    pub fn from_rows(k: usize, entries: Vec<PolyNtt>) -> Result<Self, RingError> {
        if entries.len() != k * k {
            return Err(RingError::LengthMismatch {
                expected: k * k,
                actual: entries.len(),
            });
        }
        Ok(ModuleMat { k, entries })
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn get(&self, row: usize, col: usize) -> &PolyNtt {
        &self.entries[row * self.k + col]
    }

    pub fn entries(&self) -> &[PolyNtt] {
        &self.entries
    }
}

/// Whether [`Ring::matvec`] multiplies by the matrix or by its transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transpose {
    No,
    Yes,
}

/// Ring context: parameters plus the NTT tables.
#[derive(Clone, Debug)]
pub struct Ring {
    params: ParamSet,
    ntt: NttConstants,
}

impl Ring {
    pub fn new(params: ParamSet) -> Result<Self, ParamError> {
        let ntt = derive_ntt_constants(&params)?;
        Ok(Ring { params, ntt })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn ntt_constants(&self) -> &NttConstants {
        &self.ntt
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    #[inline]
    fn mul_mod(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.params.q as u64) as u32
    }

    #[inline]
    fn add_mod(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.params.q {
            s - self.params.q
        } else {
            s
        }
    }

    #[inline]
    fn sub_mod(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.params.q - b
        }
    }

    pub fn zero(&self) -> PolyRq {
        PolyRq {
            coeffs: vec![0; self.n()],
        }
    }

    /// The constant polynomial `c mod q`.
    pub fn constant(&self, c: u32) -> PolyRq {
        let mut p = self.zero();
        p.coeffs[0] = c % self.q();
        p
    }

    /// The monomial x^i (i < n).
    pub fn monomial(&self, i: usize) -> PolyRq {
        let mut p = self.zero();
        p.coeffs[i] = 1;
        p
    }

    pub fn from_coeffs(&self, coeffs: Vec<u32>) -> Result<PolyRq, RingError> {
        if coeffs.len() != self.n() {
            return Err(RingError::LengthMismatch {
                expected: self.n(),
                actual: coeffs.len(),
            });
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, &c)| c >= self.q()) {
            return Err(RingError::CoefficientOutOfRange {
                index,
                value,
                q: self.q(),
            });
        }
        Ok(PolyRq { coeffs })
    }

    /// Build from arbitrary signed integers, reducing into `[0, q)`.
    pub fn from_signed(&self, values: &[i64]) -> Result<PolyRq, RingError> {
        if values.len() != self.n() {
            return Err(RingError::LengthMismatch {
                expected: self.n(),
                actual: values.len(),
            });
        }
        let q = self.q() as i64;
        Ok(PolyRq {
            coeffs: values.iter().map(|&v| v.rem_euclid(q) as u32).collect(),
        })
    }

    pub fn ntt_from_evals(&self, evals: Vec<u32>) -> Result<PolyNtt, RingError> {
        let p = self.from_coeffs(evals)?;
        Ok(PolyNtt { evals: p.coeffs })
    }

    /// Centered representative of one coefficient, in `(-q/2, q/2]`.
    pub fn centered(&self, c: u32) -> i32 {
        if c > self.q() / 2 {
            c as i32 - self.q() as i32
        } else {
            c as i32
        }
    }

    pub fn centered_coeffs(&self, p: &PolyRq) -> Vec<i32> {
        p.coeffs.iter().map(|&c| self.centered(c)).collect()
    }

    /// max_i min(c_i, q - c_i).
    pub fn inf_norm(&self, p: &PolyRq) -> u32 {
        p.coeffs
            .iter()
            .map(|&c| c.min(self.q() - c))
            .max()
            .unwrap_or(0)
    }

    // Cyclic length-n transform in natural order, in place.
    fn cyclic_ntt(&self, a: &mut [u32], twiddles: &[u32]) {
        let n = a.len();
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = twiddles[j * stride];
                    let u = a[start + j];
                    let v = self.mul_mod(a[start + j + half], w);
                    a[start + j] = self.add_mod(u, v);
                    a[start + j + half] = self.sub_mod(u, v);
                }
            }
            len <<= 1;
        }
    }

    /// evals_i = sum_j gamma^j p_j omega^(ij).
    pub fn ntt_forward(&self, p: &PolyRq) -> PolyNtt {
        let mut a: Vec<u32> = p
            .coeffs
            .iter()
            .zip(&self.ntt.gamma_pows)
            .map(|(&c, &g)| self.mul_mod(c, g))
            .collect();
        self.cyclic_ntt(&mut a, &self.ntt.omega_pows);
        PolyNtt { evals: a }
    }

    pub fn ntt_inverse(&self, p: &PolyNtt) -> PolyRq {
        let mut a = p.evals.clone();
        self.cyclic_ntt(&mut a, &self.ntt.omega_inv_pows);
        for (c, &g) in a.iter_mut().zip(&self.ntt.gamma_inv_pows_scaled) {
            *c = self.mul_mod(*c, g);
        }
        PolyRq { coeffs: a }
    }

    pub fn pointwise_mul(&self, a: &PolyNtt, b: &PolyNtt) -> PolyNtt {
        debug_assert_eq!(a.evals.len(), b.evals.len());
        PolyNtt {
            evals: a
                .evals
                .iter()
                .zip(&b.evals)
                .map(|(&x, &y)| self.mul_mod(x, y))
                .collect(),
        }
    }

    pub fn add_ntt(&self, a: &PolyNtt, b: &PolyNtt) -> PolyNtt {
        PolyNtt {
            evals: a
                .evals
                .iter()
                .zip(&b.evals)
                .map(|(&x, &y)| self.add_mod(x, y))
                .collect(),
        }
    }

    pub fn add(&self, a: &PolyRq, b: &PolyRq) -> PolyRq {
        PolyRq {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.add_mod(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &PolyRq, b: &PolyRq) -> PolyRq {
        PolyRq {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.sub_mod(x, y))
                .collect(),
        }
    }

    /// Ring product via the NTT.
    pub fn mul(&self, a: &PolyRq, b: &PolyRq) -> PolyRq {
        self.ntt_inverse(&self.pointwise_mul(&self.ntt_forward(a), &self.ntt_forward(b)))
    }

    /// O(n^2) negacyclic product, independent of the NTT path.
    pub fn schoolbook_mul(&self, a: &PolyRq, b: &PolyRq) -> PolyRq {
        let n = self.n();
        let q = self.q() as u64;
        let mut acc = vec![0u64; n];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                let prod = x as u64 * y as u64 % q;
                let t = i + j;
                if t < n {
                    acc[t] = (acc[t] + prod) % q;
                } else {
                    acc[t - n] = (acc[t - n] + q - prod) % q;
                }
            }
        }
        PolyRq {
            coeffs: acc.into_iter().map(|c| c as u32).collect(),
        }
    }

    pub fn vec_ntt(&self, v: &ModuleVec<PolyRq>) -> ModuleVec<PolyNtt> {
        v.iter().map(|p| self.ntt_forward(p)).collect()
    }

    pub fn vec_inverse(&self, v: &ModuleVec<PolyNtt>) -> ModuleVec<PolyRq> {
        v.iter().map(|p| self.ntt_inverse(p)).collect()
    }

    pub fn vec_add(
        &self,
        a: &ModuleVec<PolyRq>,
        b: &ModuleVec<PolyRq>,
    ) -> Result<ModuleVec<PolyRq>, RingError> {
        check_len(a.len(), b.len())?;
        Ok(a.iter()
            .zip(b.iter())
            .map(|(x, y)| self.add(x, y))
            .collect())
    }

    pub fn vec_sub(
        &self,
        a: &ModuleVec<PolyRq>,
        b: &ModuleVec<PolyRq>,
    ) -> Result<ModuleVec<PolyRq>, RingError> {
        check_len(a.len(), b.len())?;
        Ok(a.iter()
            .zip(b.iter())
            .map(|(x, y)| self.sub(x, y))
            .collect())
    }

    /// out_i = sum_j M_ij * v_j, with M the matrix or its transpose.
    pub fn matvec(
        &self,
        m: &ModuleMat,
        v: &ModuleVec<PolyNtt>,
        transpose: Transpose,
    ) -> Result<ModuleVec<PolyNtt>, RingError> {
        let k = m.rank();
        check_len(k, v.len())?;
        let zero = PolyNtt {
            evals: vec![0; self.n()],
        };
        Ok((0..k)
            .map(|i| {
                (0..k).fold(zero.clone(), |acc, j| {
                    let entry = match transpose {
                        Transpose::No => m.get(i, j),
                        Transpose::Yes => m.get(j, i),
                    };
                    self.add_ntt(&acc, &self.pointwise_mul(entry, &v[j]))
                })
            })
            .collect())
    }

    /// sum_i a_i * b_i.
    pub fn inner_product(
        &self,
        a: &ModuleVec<PolyNtt>,
        b: &ModuleVec<PolyNtt>,
    ) -> Result<PolyNtt, RingError> {
        check_len(a.len(), b.len())?;
        let zero = PolyNtt {
            evals: vec![0; self.n()],
        };
        Ok(a.iter().zip(b.iter()).fold(zero, |acc, (x, y)| {
            self.add_ntt(&acc, &self.pointwise_mul(x, y))
        }))
    }
}

fn check_len(expected: usize, actual: usize) -> Result<(), RingError> {
    if expected != actual {
        return Err(RingError::LengthMismatch { expected, actual });
    }
    Ok(())
}
