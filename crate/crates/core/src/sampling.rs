//! Seed expansion and hashing.
//!
//! `gen_a` expands SHAKE-128 over `rho || i || j` by 14-bit rejection
//! sampling; `gen_se` draws centered binomial coefficients from SHAKE-256 over
//! `xi || nonce`. `hash_h` and `crh` are plain SHAKE-256. The byte layouts are
//! part of the known-answer contract.

use std::fmt;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Shake128, Shake256};

use crate::ring::{ModuleMat, PolyRq, Ring};

/// 32 bytes of seed or digest material.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed256(pub [u8; 32]);

impl Seed256 {
    pub const LEN: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        bytes.try_into().ok().map(Seed256)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Seed256(out))
    }
}

impl fmt::Debug for Seed256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed256({})", self.to_hex())
    }
}

impl From<[u8; 32]> for Seed256 {
    fn from(b: [u8; 32]) -> Self {
        Seed256(b)
    }
}

/// SHAKE-256 squeezed to `out.len()` bytes.
pub fn shake256(parts: &[&[u8]], out: &mut [u8]) {
    let mut h = Shake256::default();
    for p in parts {
        h.update(p);
    }
    h.finalize_xof().read(out);
}

/// H(input) split into (rho, xi).
pub fn hash_h(input: &[u8]) -> (Seed256, Seed256) {
    let mut buf = [0u8; 64];
    shake256(&[input], &mut buf);
    let mut rho = [0u8; 32];
    let mut xi = [0u8; 32];
    rho.copy_from_slice(&buf[..32]);
    xi.copy_from_slice(&buf[32..]);
    (Seed256(rho), Seed256(xi))
}

/// Collision-resistant hash to 256 bits.
pub fn crh(message: &[u8]) -> Seed256 {
    let mut out = [0u8; 32];
    shake256(&[message], &mut out);
    Seed256(out)
}

const SHAKE128_RATE: usize = 168;

/// Uniform NTT-domain matrix from `rho`. Entry (i, j) reads SHAKE-128 of
/// `rho || i || j` two bytes at a time, little-endian, masked to
/// `bits_per_coeff` bits and accepted below q.
pub fn gen_a(rho: &Seed256, ring: &Ring) -> ModuleMat {
    let p = ring.params();
    let k = p.k;
    let mask = (1u32 << p.bits_per_coeff()) - 1;
    let mut entries = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut xof = Shake128::default();
            xof.update(&rho.0);
            xof.update(&[i as u8, j as u8]);
            let mut reader = xof.finalize_xof();
            let mut evals = Vec::with_capacity(p.n);
            let mut buf = [0u8; SHAKE128_RATE];
            'fill: loop {
                reader.read(&mut buf);
                for pair in buf.chunks_exact(2) {
                    let c = u16::from_le_bytes([pair[0], pair[1]]) as u32 & mask;
                    if c < p.q {
                        evals.push(c);
                        if evals.len() == p.n {
                            break 'fill;
                        }
                    }
                }
            }
            entries.push(ring.ntt_from_evals(evals).expect("sampled below q"));
        }
    }
    ModuleMat::from_rows(k, entries).expect("k*k entries")
}

/// Centered binomial polynomial from `xi || nonce`.
///
/// Coefficient c consumes stream bits `[2*eta*c, 2*eta*(c+1))` (bit b of byte
/// i is stream bit 8i+b); the first eta bits are added, the next eta
/// subtracted.
pub fn gen_se(xi: &Seed256, nonce: u8, ring: &Ring) -> PolyRq {
    let p = ring.params();
    let eta = p.eta as usize;
    let total_bits = p.n * 2 * eta;
    let mut buf = vec![0u8; total_bits.div_ceil(8)];
    shake256(&[&xi.0, &[nonce]], &mut buf);

    let bit = |pos: usize| ((buf[pos / 8] >> (pos % 8)) & 1) as i64;
    let coeffs: Vec<i64> = (0..p.n)
        .map(|c| {
            let base = c * 2 * eta;
            let pos: i64 = (0..eta).map(|t| bit(base + t)).sum();
            let neg: i64 = (0..eta).map(|t| bit(base + eta + t)).sum();
            pos - neg
        })
        .collect();
    ring.from_signed(&coeffs).expect("n coefficients")
}
