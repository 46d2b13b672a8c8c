//! Stateless realisations of the protocol equations. Every paired check
//! (registration digest, access query, validation messages) is computed by a
//! single function here, so the user side and the server side agree byte for
//! byte whenever their inputs agree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{
    expand, frame_concat, hash, mod_reduce, mul_mod_width, sym_decrypt, sym_encrypt, xor,
    ByteString, Rng,
};

const DATA_KEY_LABEL: &[u8] = b"DATA";
const KGC_KEY_LABEL: &[u8] = b"KGC";

/// Supported key-length settings. The protocol width `L` is the bit length
/// divided by eight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum KeyLength {
    Bits64,
    Bits128,
    Bits256,
    Bits512,
}

impl KeyLength {
    pub const ALL: [KeyLength; 4] = [
        KeyLength::Bits64,
        KeyLength::Bits128,
        KeyLength::Bits256,
        KeyLength::Bits512,
    ];

    pub fn bits(self) -> u32 {
        match self {
            KeyLength::Bits64 => 64,
            KeyLength::Bits128 => 128,
            KeyLength::Bits256 => 256,
            KeyLength::Bits512 => 512,
        }
    }

    pub fn width(self) -> usize {
        self.bits() as usize / 8
    }
}

impl TryFrom<u32> for KeyLength {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        KeyLength::ALL
            .into_iter()
            .find(|k| k.bits() == bits)
            .ok_or_else(|| {
                Error::Config(format!(
                    "key length {bits} not supported (expected 64, 128, 256 or 512)"
                ))
            })
    }
}

impl From<KeyLength> for u32 {
    fn from(k: KeyLength) -> u32 {
        k.bits()
    }
}

impl FromStr for KeyLength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: u32 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("key length {s:?} is not an integer")))?;
        KeyLength::try_from(bits)
    }
}

impl fmt::Display for KeyLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// KGC secrets: security parameter `s` and master key `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams {
    pub s: ByteString,
    pub m: ByteString,
    pub width: usize,
}

impl SystemParams {
    /// Draws `s` and `m` from `rng`, redrawing `m` until it differs from `s`.
    pub fn generate(rng: &mut Rng, key_length: KeyLength) -> Self {
        let width = key_length.width();
        let s = rng.random_bytes(width);
        let mut m = rng.random_bytes(width);
        while m == s {
            m = rng.random_bytes(width);
        }
        SystemParams { s, m, width }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credentials {
    pub user_id: ByteString,
    pub password: ByteString,
}

impl Credentials {
    pub fn new(user_id: impl Into<ByteString>, password: impl Into<ByteString>) -> Result<Self> {
        let user_id = user_id.into();
        let password = password.into();
        if user_id.is_empty() || password.is_empty() {
            return Err(Error::Config("user id and password must be non-empty".into()));
        }
        Ok(Credentials { user_id, password })
    }
}

/// Key material issued by the KGC to one principal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    pub public_key: ByteString,
    pub attribute: ByteString,
    pub private_key: ByteString,
    pub session_key: Option<ByteString>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherBundle {
    pub encrypted: ByteString,
    pub wrapped: ByteString,
    pub payload_digest: ByteString,
}

impl CipherBundle {
    /// Runs the owner side of the encryption phase for `payload`.
    pub fn seal(
        payload: &[u8],
        params: &SystemParams,
        owner_private_key: &[u8],
    ) -> Result<Self> {
        let encrypted = encrypt_data(payload, &params.s, &params.m)?;
        let data_key = derive_data_key(&params.m, &params.s);
        let wrapped = wrap_ciphertext(&encrypted, owner_private_key, &data_key);
        Ok(CipherBundle {
            encrypted,
            wrapped,
            payload_digest: hash(payload),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationDigest(pub ByteString);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessQuery(pub ByteString);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationPair {
    pub v1: ByteString,
    pub v2: ByteString,
    pub nonce: ByteString,
}

fn require_non_empty(fields: &[(&str, &[u8])]) -> Result<()> {
    match fields.iter().find(|(_, v)| v.is_empty()) {
        Some((name, _)) => Err(Error::Config(format!("{name} must be non-empty"))),
        None => Ok(()),
    }
}

/// `M = expand(h(U_ID || s), L) XOR expand(U_ps, L)`.
pub fn registration_digest(
    user_id: &[u8],
    password: &[u8],
    s: &[u8],
    width: usize,
) -> Result<RegistrationDigest> {
    require_non_empty(&[("user id", user_id), ("password", password), ("s", s)])?;
    let bound = expand(&hash(&frame_concat(&[user_id, s])), width)?;
    Ok(RegistrationDigest(xor(&bound, &expand(password, width)?)?))
}

/// `U_pk = m mod (U^P XOR expand(s || a, L))`.
pub fn derive_private_key(
    m: &[u8],
    public_key: &[u8],
    s: &[u8],
    attribute: &[u8],
    width: usize,
) -> Result<ByteString> {
    require_non_empty(&[("m", m), ("public key", public_key), ("s", s), ("attribute", attribute)])?;
    let mask = expand(&frame_concat(&[s, attribute]), width)?;
    mod_reduce(m, &xor(public_key, &mask)?)
}

/// Data-encryption key `K_D = h(m || s || "DATA")`.
pub fn derive_data_key(m: &[u8], s: &[u8]) -> ByteString {
    hash(&frame_concat(&[m, s, DATA_KEY_LABEL]))
}

/// Key used by the KGC when issuing session keys, `h(m || "KGC")`.
pub fn derive_kgc_key(m: &[u8]) -> ByteString {
    hash(&frame_concat(&[m, KGC_KEY_LABEL]))
}

fn payload_mask(s: &[u8], m: &[u8], len: usize) -> Result<ByteString> {
    expand(&hash(&frame_concat(&[s, m])), len)
}

/// `D^E = E(D) XOR expand(h(s || m), |D|)`.
pub fn encrypt_data(payload: &[u8], s: &[u8], m: &[u8]) -> Result<ByteString> {
    if payload.is_empty() {
        return Err(Error::EmptyPayload);
    }
    let data_key = derive_data_key(m, s);
    xor(&sym_encrypt(&data_key, payload), &payload_mask(s, m, payload.len())?)
}

/// `D^C = E(D^E || O_pk)`.
pub fn wrap_ciphertext(encrypted: &[u8], owner_private_key: &[u8], data_key: &[u8]) -> ByteString {
    sym_encrypt(data_key, &frame_concat(&[encrypted, owner_private_key]))
}

/// `q = M * expand(h(U_ID || U_pk), L) mod 2^(8L)`.
pub fn access_query(
    digest: &RegistrationDigest,
    user_id: &[u8],
    private_key: &[u8],
    width: usize,
) -> Result<AccessQuery> {
    require_non_empty(&[("user id", user_id), ("private key", private_key)])?;
    let binding = expand(&hash(&frame_concat(&[user_id, private_key])), width)?;
    Ok(AccessQuery(mul_mod_width(&digest.0, &binding)?))
}

/// `U_sk = expand(E_{K_K}(U^P || h(m || a)), L)`.
pub fn derive_session_key(
    public_key: &[u8],
    m: &[u8],
    attribute: &[u8],
    width: usize,
) -> Result<ByteString> {
    require_non_empty(&[("public key", public_key), ("m", m), ("attribute", attribute)])?;
    let inner = hash(&frame_concat(&[m, attribute]));
    let sealed = sym_encrypt(&derive_kgc_key(m), &frame_concat(&[public_key, &inner]));
    expand(&sealed, width)
}

/// Inputs to [`validation_messages`]; the same struct is filled from the
/// user's values on one side and the server's stored copies on the other.
#[derive(Debug, Clone, Copy)]
pub struct ValidationInputs<'a> {
    pub user_id: &'a [u8],
    pub session_key: &'a [u8],
    pub s: &'a [u8],
    pub nonce: &'a [u8],
    pub private_key: &'a [u8],
    pub m: &'a [u8],
    pub attribute: &'a [u8],
}

/// `v1 = expand(h(U_ID || U_sk || s), L) mod r`,
/// `v2 = expand(h(U_ID || U_pk || m), L) mod expand(a, L)`.
pub fn validation_messages(inputs: &ValidationInputs<'_>, width: usize) -> Result<ValidationPair> {
    let ValidationInputs {
        user_id,
        session_key,
        s,
        nonce,
        private_key,
        m,
        attribute,
    } = *inputs;
    require_non_empty(&[
        ("user id", user_id),
        ("session key", session_key),
        ("s", s),
        ("nonce", nonce),
        ("private key", private_key),
        ("m", m),
        ("attribute", attribute),
    ])?;
    let first = expand(&hash(&frame_concat(&[user_id, session_key, s])), width)?;
    let second = expand(&hash(&frame_concat(&[user_id, private_key, m])), width)?;
    Ok(ValidationPair {
        v1: mod_reduce(&first, nonce)?,
        v2: mod_reduce(&second, &expand(attribute, width)?)?,
        nonce: ByteString::from(nonce),
    })
}

/// Inverse of [`wrap_ciphertext`]: returns `(D^E*, O_pk)`.
pub fn unwrap_ciphertext(wrapped: &[u8], data_key: &[u8]) -> Result<(ByteString, ByteString)> {
    let framed = sym_decrypt(data_key, wrapped);
    let mut fields = crate::primitives::frame_split(&framed)
        .map_err(|e| Error::CorruptCiphertext(e.to_string()))?;
    if fields.len() != 2 {
        return Err(Error::CorruptCiphertext(format!(
            "expected 2 framed fields, found {}",
            fields.len()
        )));
    }
    let owner_key = fields.pop().expect("two fields");
    let encrypted = fields.pop().expect("two fields");
    Ok((encrypted, owner_key))
}

/// `D* = DE(D^E* XOR expand(h(s || m), |D^E*|))`.
pub fn decrypt_data(encrypted: &[u8], s: &[u8], m: &[u8]) -> Result<ByteString> {
    if encrypted.is_empty() {
        return Ok(ByteString::default());
    }
    let unmasked = xor(encrypted, &payload_mask(s, m, encrypted.len())?)?;
    Ok(sym_decrypt(&derive_data_key(m, s), &unmasked))
}
