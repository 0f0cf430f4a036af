//! Known-answer test fixtures.
//!
//! Case i derives its inputs from SHAKE-256 over `seed || "kat" || i (u32 LE)`:
//! zeta (32 bytes), r (32 bytes), then a message of `33 * (i + 1)` bytes.

use std::fmt::Write;

use crate::codec::{serialize_pk, serialize_sig, serialize_sk};
use crate::sampling::{shake256, Seed256};
use crate::scheme::{Scheme, VerifyPolicy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatCase {
    pub index: u32,
    pub zeta: Seed256,
    pub r: Seed256,
    pub msg: Vec<u8>,
    pub pk: Vec<u8>,
    pub sk: Vec<u8>,
    pub sig: Vec<u8>,
    pub accepted: bool,
}

impl KatCase {
    /// `case <i>: zeta=<hex> r=<hex> msg=<hex> pk=<hex> sk=<hex> sig=<hex> verdict=<accept|reject>`
    pub fn to_line(&self) -> String {
        format!(
            "case {}: zeta={} r={} msg={} pk={} sk={} sig={} verdict={}",
            self.index,
            self.zeta.to_hex(),
            self.r.to_hex(),
            hex::encode(&self.msg),
            hex::encode(&self.pk),
            hex::encode(&self.sk),
            hex::encode(&self.sig),
            if self.accepted { "accept" } else { "reject" }
        )
    }
}

pub fn kat_inputs(seed: &Seed256, index: u32) -> (Seed256, Seed256, Vec<u8>) {
    let mlen = 33 * (index as usize + 1);
    let mut buf = vec![0u8; 64 + mlen];
    shake256(&[seed.as_bytes(), b"kat", &index.to_le_bytes()], &mut buf);
    let zeta = Seed256::from_slice(&buf[..32]).expect("32 bytes");
    let r = Seed256::from_slice(&buf[32..64]).expect("32 bytes");
    (zeta, r, buf[64..].to_vec())
}

pub fn kat_case(scheme: &Scheme, seed: &Seed256, index: u32, policy: VerifyPolicy) -> KatCase {
    let p = scheme.params();
    let (zeta, r, msg) = kat_inputs(seed, index);
    let (pk, sk) = scheme.keygen(&zeta);
    let sig = scheme.sign(&sk, &pk, &msg, &r, policy);
    let accepted = scheme.verify(&pk, &msg, &sig, policy).is_ok();
    KatCase {
        index,
        zeta,
        r,
        msg,
        pk: serialize_pk(&pk, p),
        sk: serialize_sk(&sk, p),
        sig: serialize_sig(&sig, p),
        accepted,
    }
}

/// The full fixture text, one newline-terminated line per case.
pub fn kat_file(scheme: &Scheme, seed: &Seed256, count: u32, policy: VerifyPolicy) -> String {
    let mut out = String::new();
    for i in 0..count {
        writeln!(out, "{}", kat_case(scheme, seed, i, policy).to_line()).expect("write to string");
    }
    out
}
