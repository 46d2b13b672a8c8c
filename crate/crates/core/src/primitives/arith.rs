//! Unsigned big-endian integer arithmetic over fixed-width byte strings.
//!
//! Values are at most a few hundred bits wide, so the reduction is plain
//! binary long division over little-endian `u64` limbs.

use std::cmp::Ordering;

fn to_limbs(bytes: &[u8]) -> Vec<u64> {
    let mut limbs = Vec::with_capacity(bytes.len().div_ceil(8) + 1);
    for chunk in bytes.rchunks(8) {
        let mut word = [0u8; 8];
        word[8 - chunk.len()..].copy_from_slice(chunk);
        limbs.push(u64::from_be_bytes(word));
    }
    limbs
}

fn from_limbs(limbs: &[u64], width: usize) -> Vec<u8> {
    let mut out = vec![0u8; width];
    for (i, limb) in limbs.iter().enumerate() {
        for (j, byte) in limb.to_le_bytes().iter().enumerate() {
            let pos = i * 8 + j;
            if pos < width {
                out[width - 1 - pos] = *byte;
            } else {
                debug_assert_eq!(*byte, 0, "value does not fit in {width} bytes");
            }
        }
    }
    out
}

fn cmp_limbs(a: &[u64], b: &[u64]) -> Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

// a -= b, requires a >= b and a.len() >= b.len()
fn sub_assign(a: &mut [u64], b: &[u64]) {
    let mut borrow = false;
    for (i, limb) in a.iter_mut().enumerate() {
        let rhs = b.get(i).copied().unwrap_or(0);
        let (d1, o1) = limb.overflowing_sub(rhs);
        let (d2, o2) = d1.overflowing_sub(borrow as u64);
        *limb = d2;
        borrow = o1 || o2;
    }
    debug_assert!(!borrow);
}

// a = (a << 1) | bit
fn shl1_push(a: &mut [u64], bit: bool) {
    let mut carry = bit as u64;
    for limb in a.iter_mut() {
        let next = *limb >> 63;
        *limb = (*limb << 1) | carry;
        carry = next;
    }
}

/// `true` when the big-endian integer is 0 or 1.
pub(crate) fn is_degenerate_modulus(bytes: &[u8]) -> bool {
    match bytes.split_last() {
        None => true,
        Some((last, rest)) => *last <= 1 && rest.iter().all(|&b| b == 0),
    }
}

/// `int(x) mod int(modulus)`, big-endian, encoded into `width` bytes.
/// The modulus must be nonzero.
pub(crate) fn rem_be(x: &[u8], modulus: &[u8], width: usize) -> Vec<u8> {
    let m = to_limbs(modulus);
    debug_assert!(m.iter().any(|&l| l != 0), "modulus is zero");
    let mut r = vec![0u64; m.len() + 1];
    for byte in x {
        for bit in (0..8).rev() {
            shl1_push(&mut r, (byte >> bit) & 1 == 1);
            if cmp_limbs(&r, &m) != Ordering::Less {
                sub_assign(&mut r, &m);
            }
        }
    }
    from_limbs(&r, width)
}

/// `int(x) * int(y) mod 2^(8 * width)`, big-endian.
pub(crate) fn mul_wrapping_be(x: &[u8], y: &[u8], width: usize) -> Vec<u8> {
    // little-endian views
    let a: Vec<u8> = x.iter().rev().copied().collect();
    let b: Vec<u8> = y.iter().rev().copied().collect();
    let mut acc = vec![0u8; width];
    for (i, &ai) in a.iter().enumerate().take(width) {
        if ai == 0 {
            continue;
        }
        let mut carry = 0u32;
        for j in 0..width - i {
            let bj = b.get(j).copied().unwrap_or(0) as u32;
            let t = acc[i + j] as u32 + ai as u32 * bj + carry;
            acc[i + j] = t as u8;
            carry = t >> 8;
        }
    }
    acc.reverse();
    acc
}
