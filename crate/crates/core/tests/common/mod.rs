//! Reference implementations written directly from the equations with
//! big integers. They share nothing with the library except SHA-256 itself,
//! which is checked separately against frozen vectors.

#![allow(dead_code)]

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

pub fn sha(data: &[u8]) -> Vec<u8> {
    Sha256::digest(data).to_vec()
}

pub fn frame(fields: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::new();
    for f in fields {
        out.extend_from_slice(&(f.len() as u32).to_be_bytes());
        out.extend_from_slice(f);
    }
    out
}

fn stream(key: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::new();
    let mut i: u32 = 0;
    while out.len() < len {
        out.extend(sha(&frame(&[key, &i.to_be_bytes()])));
        i += 1;
    }
    out.truncate(len);
    out
}

pub fn expand(data: &[u8], width: usize) -> Vec<u8> {
    if width <= 32 {
        sha(data)[..width].to_vec()
    } else {
        stream(data, width)
    }
}

pub fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn int(bytes: &[u8]) -> BigUint {
    BigUint::from_bytes_be(bytes)
}

pub fn bytes(n: &BigUint, width: usize) -> Vec<u8> {
    let mut out = vec![0u8; width];
    if *n != BigUint::from(0u8) {
        let raw = n.to_bytes_be();
        assert!(raw.len() <= width, "value wider than {width} bytes");
        out[width - raw.len()..].copy_from_slice(&raw);
    }
    out
}

pub fn effective_modulus(src: &[u8]) -> BigUint {
    let one = BigUint::from(1u8);
    if int(src) > one {
        return int(src);
    }
    let mut c: u32 = 1;
    loop {
        let candidate = int(&expand(&frame(&[src, &c.to_be_bytes()]), src.len()));
        if candidate > one {
            return candidate;
        }
        c += 1;
    }
}

pub fn mod_reduce(x: &[u8], src: &[u8]) -> Vec<u8> {
    bytes(&(int(x) % effective_modulus(src)), x.len())
}

pub fn mul(x: &[u8], y: &[u8]) -> Vec<u8> {
    let modulus = BigUint::from(1u8) << (8 * x.len());
    bytes(&((int(x) * int(y)) % modulus), x.len())
}

pub fn sym(key: &[u8], data: &[u8]) -> Vec<u8> {
    xor(data, &stream(key, data.len()))
}

pub fn registration_digest(uid: &[u8], pw: &[u8], s: &[u8], l: usize) -> Vec<u8> {
    xor(&expand(&sha(&frame(&[uid, s])), l), &expand(pw, l))
}

pub fn private_key(m: &[u8], up: &[u8], s: &[u8], a: &[u8], l: usize) -> Vec<u8> {
    mod_reduce(m, &xor(up, &expand(&frame(&[s, a]), l)))
}

pub fn access_query(digest: &[u8], uid: &[u8], upk: &[u8], l: usize) -> Vec<u8> {
    mul(digest, &expand(&sha(&frame(&[uid, upk])), l))
}

pub fn session_key(up: &[u8], m: &[u8], a: &[u8], l: usize) -> Vec<u8> {
    let kgc = sha(&frame(&[m, b"KGC"]));
    let inner = sha(&frame(&[m, a]));
    expand(&sym(&kgc, &frame(&[up, &inner])), l)
}

#[allow(clippy::too_many_arguments)]
pub fn validation(
    uid: &[u8],
    usk: &[u8],
    s: &[u8],
    r: &[u8],
    upk: &[u8],
    m: &[u8],
    a: &[u8],
    l: usize,
) -> (Vec<u8>, Vec<u8>) {
    let v1 = mod_reduce(&expand(&sha(&frame(&[uid, usk, s])), l), r);
    let v2 = mod_reduce(&expand(&sha(&frame(&[uid, upk, m])), l), &expand(a, l));
    (v1, v2)
}

/// Full owner-to-user round trip, written out step by step.
pub fn seal_and_open(payload: &[u8], s: &[u8], m: &[u8], opk: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let kd = sha(&frame(&[m, s, b"DATA"]));
    let mask = expand(&sha(&frame(&[s, m])), payload.len());
    let de = xor(&sym(&kd, payload), &mask);
    let dc = sym(&kd, &frame(&[&de, opk]));
    let opened = sym(&kd, &dc);
    let de_len = u32::from_be_bytes(opened[..4].try_into().unwrap()) as usize;
    let de_star = &opened[4..4 + de_len];
    let recovered = sym(&kd, &xor(de_star, &mask));
    (dc, recovered)
}

/// Deterministic byte source for test inputs (splitmix64), independent of
/// the library's generator.
pub struct Bytes(u64);

impl Bytes {
    pub fn new(seed: u64) -> Self {
        Bytes(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn take(&mut self, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n + 8);
        while out.len() < n {
            out.extend_from_slice(&self.next_u64().to_le_bytes());
        }
        out.truncate(n);
        out
    }
}
