mod common;

use acshare_core::primitives::{
    effective_modulus, expand, frame_concat, frame_split, hash, mod_reduce, mul_mod_width,
    sym_decrypt, sym_encrypt, xor,
};
use acshare_core::protocol::{
    access_query, derive_private_key, derive_session_key, registration_digest,
    validation_messages, CipherBundle, SystemParams, ValidationInputs,
};
use acshare_core::{ByteString, KeyLength, Rng};
use common::Bytes;
use proptest::prelude::*;

// frozen from Python hashlib / struct
#[test]
fn sha256_vectors() {
    assert_eq!(
        hash(b"").to_hex(),
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    );
    assert_eq!(
        hash(b"abc").to_hex(),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
}

#[test]
fn expand_vectors() {
    assert_eq!(expand(b"abc", 8).unwrap().to_hex(), "ba7816bf8f01cfea");
    assert_eq!(
        expand(b"abc", 40).unwrap().to_hex(),
        "22ff5d3ba768c0865e63d5f5e9f6fd470f3d046e3ba4ec175c999eb1fd732bfc1f43f2c23225c39e"
    );
    assert_eq!(frame_concat(&[b"AB", b"C"]).to_hex(), "0000000241420000000143");
}

#[test]
fn zero_modulus_rederivation_vector() {
    assert_eq!(effective_modulus(&[0u8; 8]).unwrap().to_hex(), "b3d4d2fc6c178f9a");
}

#[test]
fn expand_matches_oracle_at_all_widths() {
    let mut b = Bytes::new(1);
    for w in 1..=160 {
        let data = b.take(w % 37);
        assert_eq!(expand(&data, w).unwrap().as_bytes(), &common::expand(&data, w)[..]);
    }
}

#[test]
fn mod_reduce_matches_oracle() {
    let mut b = Bytes::new(7);
    for w in [1usize, 2, 3, 8, 16, 32, 64] {
        for i in 0..2_000 {
            let x = b.take(w);
            let mut m = b.take(w);
            match i % 40 {
                0 => m.iter_mut().for_each(|v| *v = 0),
                1 => {
                    m.iter_mut().for_each(|v| *v = 0);
                    m[w - 1] = 1;
                }
                // small moduli exercise the long-division tail
                2 => {
                    m.iter_mut().take(w - 1).for_each(|v| *v = 0);
                }
                _ => {}
            }
            let got = mod_reduce(&x, &m).unwrap();
            assert_eq!(got.as_bytes(), &common::mod_reduce(&x, &m)[..], "w={w} i={i}");
            assert!(common::int(&got) < common::effective_modulus(&m));
        }
    }
}

#[test]
fn mul_matches_oracle() {
    let mut b = Bytes::new(8);
    for w in [1usize, 7, 8, 9, 16, 32, 64] {
        for _ in 0..500 {
            let x = b.take(w);
            let y = b.take(w);
            assert_eq!(mul_mod_width(&x, &y).unwrap().as_bytes(), &common::mul(&x, &y)[..]);
        }
    }
}

#[test]
fn protocol_equations_match_oracle() {
    let mut b = Bytes::new(9);
    for k in KeyLength::ALL {
        let l = k.width();
        for _ in 0..100 {
            let uid_len = 1 + (b.next_u64() % 20) as usize;
            let uid = b.take(uid_len);
            let pw = b.take(16);
            let s = b.take(l);
            let m = b.take(l);
            let up = b.take(l);
            let a = b.take(l);
            let r = b.take(l);

            let md = registration_digest(&uid, &pw, &s, l).unwrap();
            assert_eq!(md.0.as_bytes(), &common::registration_digest(&uid, &pw, &s, l)[..]);

            let upk = derive_private_key(&m, &up, &s, &a, l).unwrap();
            assert_eq!(upk.as_bytes(), &common::private_key(&m, &up, &s, &a, l)[..]);

            let q = access_query(&md, &uid, &upk, l).unwrap();
            assert_eq!(q.0.as_bytes(), &common::access_query(&md.0, &uid, &upk, l)[..]);

            let usk = derive_session_key(&up, &m, &a, l).unwrap();
            assert_eq!(usk.as_bytes(), &common::session_key(&up, &m, &a, l)[..]);

            let v = validation_messages(
                &ValidationInputs {
                    user_id: &uid,
                    session_key: &usk,
                    s: &s,
                    nonce: &r,
                    private_key: &upk,
                    m: &m,
                    attribute: &a,
                },
                l,
            )
            .unwrap();
            let (v1, v2) = common::validation(&uid, &usk, &s, &r, &upk, &m, &a, l);
            assert_eq!(v.v1.as_bytes(), &v1[..]);
            assert_eq!(v.v2.as_bytes(), &v2[..]);
        }
    }
}

#[test]
fn cipher_bundle_matches_oracle() {
    let mut rng = Rng::new(4);
    let mut b = Bytes::new(10);
    for k in KeyLength::ALL {
        let params = SystemParams::generate(&mut rng, k);
        for len in [1usize, 5, 32, 33, 200] {
            let payload = b.take(len);
            let opk = b.take(k.width());
            let bundle = CipherBundle::seal(&payload, &params, &opk).unwrap();
            let (dc, recovered) = common::seal_and_open(&payload, &params.s, &params.m, &opk);
            assert_eq!(bundle.wrapped.as_bytes(), &dc[..]);
            assert_eq!(recovered, payload);
            assert_eq!(bundle.payload_digest.as_bytes(), &common::sha(&payload)[..]);
        }
    }
}

proptest! {
    #[test]
    fn frame_concat_is_injective(
        a in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..8), 0..5),
        b in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..8), 0..5),
    ) {
        let fa: Vec<&[u8]> = a.iter().map(Vec::as_slice).collect();
        let fb: Vec<&[u8]> = b.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(a == b, frame_concat(&fa) == frame_concat(&fb));
        let split = frame_split(&frame_concat(&fa)).unwrap();
        prop_assert_eq!(split, a.iter().map(|f| ByteString::from(f.as_slice())).collect::<Vec<_>>());
    }

    #[test]
    fn xor_is_an_involution(pair in (1usize..80).prop_flat_map(|n| (
        proptest::collection::vec(any::<u8>(), n),
        proptest::collection::vec(any::<u8>(), n),
    ))) {
        let (x, y) = pair;
        let once = xor(&x, &y).unwrap();
        prop_assert_eq!(xor(&once, &y).unwrap().into_vec(), x);
    }

    #[test]
    fn cipher_inverts(key in proptest::collection::vec(any::<u8>(), 1..40),
                      text in proptest::collection::vec(any::<u8>(), 0..300)) {
        let c = sym_encrypt(&key, &text);
        prop_assert_eq!(c.width(), text.len());
        prop_assert_eq!(sym_decrypt(&key, &c).into_vec(), text);
    }

    #[test]
    fn mod_reduce_bound(pair in prop_oneof![Just(8usize), Just(16), Just(32), Just(64)]
        .prop_flat_map(|n| (
            proptest::collection::vec(any::<u8>(), n),
            proptest::collection::vec(any::<u8>(), n),
        ))) {
        let (x, m) = pair;
        let r = mod_reduce(&x, &m).unwrap();
        prop_assert_eq!(r.width(), x.len());
        prop_assert!(common::int(&r) < common::effective_modulus(&m));
        prop_assert_eq!(r.as_bytes(), &common::mod_reduce(&x, &m)[..]);
    }
}
