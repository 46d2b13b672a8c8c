//! Byte-string algebra shared by every protocol equation: hashing, width
//! expansion, length-prefixed concatenation, XOR, modular reduction, wrapping
//! multiplication, a hash-counter stream cipher and a seeded byte stream.
//!
//! The cipher is deterministic and unauthenticated. It exists so protocol
//! transcripts are reproducible; it is not production cryptography.

mod arith;
mod bytes;
mod rng;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use bytes::ByteString;
pub use rng::Rng;

/// Output width of [`hash`].
pub const DIGEST_WIDTH: usize = 32;

fn counter_bytes(counter: u32) -> [u8; 4] {
    counter.to_be_bytes()
}

/// SHA-256.
pub fn hash(data: &[u8]) -> ByteString {
    ByteString::new(Sha256::digest(data).to_vec())
}

/// Maps `data` onto exactly `target_width` bytes.
///
/// Up to 32 bytes this is a prefix of `hash(data)`. Wider outputs concatenate
/// `hash(frame_concat([data, i]))` for `i = 0, 1, ...` (4-byte big-endian
/// counter) and truncate.
pub fn expand(data: &[u8], target_width: usize) -> Result<ByteString> {
    if target_width == 0 {
        return Err(Error::InvalidWidth(0));
    }
    if target_width <= DIGEST_WIDTH {
        let mut digest = hash(data).into_vec();
        digest.truncate(target_width);
        return Ok(ByteString::new(digest));
    }
    Ok(keystream(data, target_width))
}

fn keystream(key: &[u8], len: usize) -> ByteString {
    let mut out = Vec::with_capacity(len.next_multiple_of(DIGEST_WIDTH));
    let mut counter = 0u32;
    while out.len() < len {
        out.extend_from_slice(&hash(&frame_concat(&[key, &counter_bytes(counter)])));
        counter = counter
            .checked_add(1)
            .expect("keystream exceeds 2^32 blocks");
    }
    out.truncate(len);
    ByteString::new(out)
}

/// Unambiguous concatenation: every field is written as a 4-byte big-endian
/// length followed by its bytes.
pub fn frame_concat(fields: &[&[u8]]) -> ByteString {
    let total = fields.iter().map(|f| f.len() + 4).sum();
    let mut out = Vec::with_capacity(total);
    for field in fields {
        let len = u32::try_from(field.len()).expect("field longer than 4 GiB");
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(field);
    }
    ByteString::new(out)
}

/// Inverse of [`frame_concat`]. Fails unless the input is consumed exactly.
pub fn frame_split(framed: &[u8]) -> Result<Vec<ByteString>> {
    let mut fields = Vec::new();
    let mut rest = framed;
    while !rest.is_empty() {
        if rest.len() < 4 {
            return Err(Error::Framing(format!(
                "{} trailing bytes cannot hold a length prefix",
                rest.len()
            )));
        }
        let (prefix, tail) = rest.split_at(4);
        let len = u32::from_be_bytes(prefix.try_into().expect("4-byte prefix")) as usize;
        if tail.len() < len {
            return Err(Error::Framing(format!(
                "field declares {len} bytes but only {} remain",
                tail.len()
            )));
        }
        let (field, next) = tail.split_at(len);
        fields.push(ByteString::from(field));
        rest = next;
    }
    Ok(fields)
}

/// Octet-wise exclusive-or of two equal-width strings.
pub fn xor(x: &[u8], y: &[u8]) -> Result<ByteString> {
    if x.len() != y.len() {
        return Err(Error::WidthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(ByteString::new(
        x.iter().zip(y).map(|(a, b)| a ^ b).collect(),
    ))
}

/// Modulus actually used by [`mod_reduce`] for `modulus_src`.
///
/// Sources whose integer value is 0 or 1 are replaced by
/// `expand(frame_concat([modulus_src, c]), L)` for `c = 1, 2, ...` until the
/// value exceeds 1.
pub fn effective_modulus(modulus_src: &[u8]) -> Result<ByteString> {
    let width = modulus_src.len();
    if width == 0 {
        return Err(Error::InvalidWidth(0));
    }
    if !arith::is_degenerate_modulus(modulus_src) {
        return Ok(ByteString::from(modulus_src));
    }
    let mut counter = 1u32;
    loop {
        let candidate = expand(&frame_concat(&[modulus_src, &counter_bytes(counter)]), width)?;
        if !arith::is_degenerate_modulus(&candidate) {
            return Ok(candidate);
        }
        counter += 1;
    }
}

/// `int(x) mod int(effective_modulus(modulus_src))` as big-endian bytes of
/// the common width.
pub fn mod_reduce(x: &[u8], modulus_src: &[u8]) -> Result<ByteString> {
    if x.len() != modulus_src.len() {
        return Err(Error::WidthMismatch {
            left: x.len(),
            right: modulus_src.len(),
        });
    }
    let modulus = effective_modulus(modulus_src)?;
    Ok(ByteString::new(arith::rem_be(x, &modulus, x.len())))
}

/// `int(x) * int(y) mod 2^(8L)` for two width-`L` strings.
pub fn mul_mod_width(x: &[u8], y: &[u8]) -> Result<ByteString> {
    if x.len() != y.len() {
        return Err(Error::WidthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(ByteString::new(arith::mul_wrapping_be(x, y, x.len())))
}

/// XORs `plaintext` with the keystream `hash(frame_concat([key, i]))`,
/// `i = 0, 1, ...`. Length-preserving and its own inverse.
pub fn sym_encrypt(key: &[u8], plaintext: &[u8]) -> ByteString {
    assert!(!key.is_empty(), "symmetric key must not be empty");
    if plaintext.is_empty() {
        return ByteString::default();
    }
    let stream = keystream(key, plaintext.len());
    ByteString::new(plaintext.iter().zip(stream.iter()).map(|(p, k)| p ^ k).collect())
}

pub fn sym_decrypt(key: &[u8], ciphertext: &[u8]) -> ByteString {
    sym_encrypt(key, ciphertext)
}

pub fn random_bytes(rng: &mut Rng, width: usize) -> ByteString {
    rng.random_bytes(width)
}
