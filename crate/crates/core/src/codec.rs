//! Message encoding into ring elements, coefficient packing, and the binary
//! key and signature formats.
//!
//! Every file starts with a 6-byte header: `"MLDS" || version || param-id`.
//!
//! | object    | payload                                             |
//! |-----------|-----------------------------------------------------|
//! | public key| `rho(32) || pack(P_0) || ... || pack(P_{k-1})`       |
//! | secret key| `pack(s_0) || ... || pack(s_{k-1})`                  |
//! | signature | `pack(z1_0) || ... || pack(z1_{k-1}) || pack(z2) || pack(z3) || h(32)` |
//!
//! Packing is little-endian with `ceil(log2 q)` bits per coefficient.

use thiserror::Error;

use crate::params::ParamSet;
use crate::ring::{ModuleVec, PolyRq, Ring};
use crate::sampling::Seed256;
use crate::scheme::{PublicKey, SecretKey, Signature};

pub const MAGIC: [u8; 4] = *b"MLDS";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("expected {expected} message bits, got {actual}")]
    BitLength { expected: usize, actual: usize },
    #[error("expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown parameter set id {0:#04x}")]
    UnknownParamSet(u8),
    #[error("coefficient {value} at index {index} is not below q")]
    CoefficientOutOfRange { index: usize, value: u32 },
    #[error("secret coefficient at index {index} exceeds eta")]
    SecretOutOfRange { index: usize },
}

/// An ordered bit sequence, one entry per message bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// The first `nbits` bits of `bytes`, least-significant bit first.
    pub fn from_bytes(bytes: &[u8], nbits: usize) -> Self {
        assert!(
            nbits <= bytes.len() * 8,
            "not enough bytes for {nbits} bits"
        );
        BitString(
            (0..nbits)
                .map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1)
                .collect(),
        )
    }

    /// Pack LSB-first; a trailing partial byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            out[i / 8] |= (b as u8) << (i % 8);
        }
        out
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The message bits carried in one signature: all of mu, or its first
/// `mu_bits` bits when the codec is redundant.
pub fn mu_payload(mu: &Seed256, p: &ParamSet) -> BitString {
    BitString::from_bytes(mu.as_bytes(), p.mu_bits().min(256))
}

fn dist(a: u32, b: u32, q: u32) -> u32 {
    let d = a.abs_diff(b);
    d.min(q - d)
}

/// Map each bit to floor(q/2) in `redundancy` coefficients spaced n/redundancy apart.
pub fn encode(bits: &BitString, ring: &Ring) -> Result<PolyRq, CodecError> {
    let p = ring.params();
    let mu_bits = p.mu_bits();
    if bits.len() != mu_bits {
        return Err(CodecError::BitLength {
            expected: mu_bits,
            actual: bits.len(),
        });
    }
    let mut coeffs = vec![0u32; p.n];
    for (i, &b) in bits.bits().iter().enumerate() {
        if b {
            for j in 0..p.redundancy {
                coeffs[i + j * mu_bits] = p.half_q();
            }
        }
    }
    Ok(ring.from_coeffs(coeffs).expect("encoded values below q"))
}

/// Inverse of [`encode`] under small additive noise.
///
/// With redundancy 1, a bit is 1 iff the coefficient lies strictly within
/// floor(q/4) of floor(q/2). With redundancy 4, the distances of the four
/// copies to floor(q/2) are summed and the bit is 0 iff the sum exceeds q.
pub fn decode(v: &PolyRq, ring: &Ring) -> BitString {
    let p = ring.params();
    let (q, half) = (p.q, p.half_q());
    let c = v.coeffs();
    let mu_bits = p.mu_bits();
    let bits = (0..mu_bits)
        .map(|i| {
            if p.redundancy == 1 {
                dist(c[i], half, q) < p.quarter_q()
            } else {
                let t: u32 = (0..p.redundancy)
                    .map(|j| dist(c[i + j * mu_bits], half, q))
                    .sum();
                t <= q
            }
        })
        .collect();
    BitString(bits)
}

/// Little-endian packing at `bits_per_coeff` bits per coefficient.
pub fn pack_poly(v: &PolyRq, p: &ParamSet) -> Vec<u8> {
    let width = p.bits_per_coeff();
    let mut out = Vec::with_capacity(p.packed_poly_bytes());
    let mut acc: u64 = 0;
    let mut filled = 0u32;
    for &c in v.coeffs() {
        debug_assert!(c < (1 << width));
        acc |= (c as u64) << filled;
        filled += width;
        while filled >= 8 {
            out.push(acc as u8);
            acc >>= 8;
            filled -= 8;
        }
    }
    if filled > 0 {
        out.push(acc as u8);
    }
    out
}

/// Inverse of [`pack_poly`]; rejects wrong lengths and coefficients >= q.
pub fn unpack_poly(bytes: &[u8], ring: &Ring) -> Result<PolyRq, CodecError> {
    let p = ring.params();
    let expected = p.packed_poly_bytes();
    if bytes.len() != expected {
        return Err(CodecError::Length {
            expected,
            actual: bytes.len(),
        });
    }
    let width = p.bits_per_coeff();
    let mask = (1u64 << width) - 1;
    let mut coeffs = Vec::with_capacity(p.n);
    let mut acc: u64 = 0;
    let mut filled = 0u32;
    let mut iter = bytes.iter();
    for index in 0..p.n {
        while filled < width {
            acc |= (*iter.next().expect("length checked") as u64) << filled;
            filled += 8;
        }
        let value = (acc & mask) as u32;
        acc >>= width;
        filled -= width;
        if value >= p.q {
            return Err(CodecError::CoefficientOutOfRange { index, value });
        }
        coeffs.push(value);
    }
    Ok(ring.from_coeffs(coeffs).expect("range checked"))
}

fn header(p: &ParamSet) -> [u8; HEADER_LEN] {
    let id = p.id().expect("registered parameter set");
    [MAGIC[0], MAGIC[1], MAGIC[2], MAGIC[3], VERSION, id]
}

fn check_header<'a>(
    bytes: &'a [u8],
    ring: &Ring,
    payload_len: usize,
) -> Result<&'a [u8], CodecError> {
    if bytes.len() < HEADER_LEN {
        return Err(CodecError::Length {
            expected: HEADER_LEN + payload_len,
            actual: bytes.len(),
        });
    }
    if bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(CodecError::UnsupportedVersion(bytes[4]));
    }
    if ParamSet::from_id(bytes[5]).is_none() || ring.params().id() != Some(bytes[5]) {
        return Err(CodecError::UnknownParamSet(bytes[5]));
    }
    if bytes.len() != HEADER_LEN + payload_len {
        return Err(CodecError::Length {
            expected: HEADER_LEN + payload_len,
            actual: bytes.len(),
        });
    }
    Ok(&bytes[HEADER_LEN..])
}

fn unpack_vec(bytes: &[u8], count: usize, ring: &Ring) -> Result<ModuleVec<PolyRq>, CodecError> {
    let step = ring.params().packed_poly_bytes();
    bytes
        .chunks_exact(step)
        .take(count)
        .enumerate()
        .map(|(i, chunk)| {
            unpack_poly(chunk, ring).map_err(|e| match e {
                CodecError::CoefficientOutOfRange { index, value } => {
                    CodecError::CoefficientOutOfRange {
                        index: i * ring.n() + index,
                        value,
                    }
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(ModuleVec::new)
}

pub fn pk_len(p: &ParamSet) -> usize {
    HEADER_LEN + 32 + p.k * p.packed_poly_bytes()
}

pub fn sk_len(p: &ParamSet) -> usize {
    HEADER_LEN + p.k * p.packed_poly_bytes()
}

pub fn sig_len(p: &ParamSet) -> usize {
    HEADER_LEN + (p.k + 2) * p.packed_poly_bytes() + 32
}

pub fn serialize_pk(pk: &PublicKey, p: &ParamSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(pk_len(p));
    out.extend_from_slice(&header(p));
    out.extend_from_slice(pk.rho.as_bytes());
    for poly in pk.p.iter() {
        out.extend(pack_poly(poly, p));
    }
    out
}

pub fn parse_pk(bytes: &[u8], ring: &Ring) -> Result<PublicKey, CodecError> {
    let p = ring.params();
    let body = check_header(bytes, ring, pk_len(p) - HEADER_LEN)?;
    let rho = Seed256::from_slice(&body[..32]).expect("32 bytes");
    let polys = unpack_vec(&body[32..], p.k, ring)?;
    Ok(PublicKey { rho, p: polys })
}

pub fn serialize_sk(sk: &SecretKey, p: &ParamSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(sk_len(p));
    out.extend_from_slice(&header(p));
    for poly in sk.s.iter() {
        out.extend(pack_poly(poly, p));
    }
    out
}

pub fn parse_sk(bytes: &[u8], ring: &Ring) -> Result<SecretKey, CodecError> {
    let p = ring.params();
    let body = check_header(bytes, ring, sk_len(p) - HEADER_LEN)?;
    let s = unpack_vec(body, p.k, ring)?;
    for (i, poly) in s.iter().enumerate() {
        if let Some(j) = poly.coeffs().iter().position(|&c| c.min(p.q - c) > p.eta) {
            return Err(CodecError::SecretOutOfRange { index: i * p.n + j });
        }
    }
    Ok(SecretKey { s, e: None })
}

pub fn serialize_sig(sig: &Signature, p: &ParamSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(sig_len(p));
    out.extend_from_slice(&header(p));
    for poly in sig.z1.iter() {
        out.extend(pack_poly(poly, p));
    }
    out.extend(pack_poly(&sig.z2, p));
    out.extend(pack_poly(&sig.z3, p));
    out.extend_from_slice(sig.h.as_bytes());
    out
}

pub fn parse_sig(bytes: &[u8], ring: &Ring) -> Result<Signature, CodecError> {
    let p = ring.params();
    let body = check_header(bytes, ring, sig_len(p) - HEADER_LEN)?;
    let step = p.packed_poly_bytes();
    let mut polys = unpack_vec(&body[..(p.k + 2) * step], p.k + 2, ring)?.into_inner();
    let z3 = polys.pop().expect("k + 2 polys");
    let z2 = polys.pop().expect("k + 2 polys");
    let h = Seed256::from_slice(&body[(p.k + 2) * step..]).expect("32 bytes");
    Ok(Signature {
        z1: ModuleVec::new(polys),
        z2,
        z3,
        h,
    })
}
