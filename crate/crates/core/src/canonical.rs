//! Canonical JSON and SHA-256 digests.
//!
//! Canonical form: object keys sorted by byte order, no insignificant
//! whitespace, exact numbers rendered as plain decimals without trailing
//! zeros. Amounts whose decimal expansion does not terminate are rendered as
//! `"p/q"` strings.

use std::fmt;
use std::str::FromStr;

use serde_json::{Number, Value};
use sha2::{Digest as _, Sha256};

use crate::money::{fraction_string, to_decimal_literal, Money, Rational};

/// Compact rendering of a JSON value. `serde_json::Map` is ordered, so keys
/// come out sorted.
pub fn to_canonical_string(value: &Value) -> String {
    serde_json::to_string(value).expect("serializing a Value cannot fail")
}

pub fn to_canonical_bytes(value: &Value) -> Vec<u8> {
    to_canonical_string(value).into_bytes()
}

/// Exact number as a JSON value: a decimal literal when it terminates,
/// otherwise a `"p/q"` string.
pub fn rational_value(value: &Rational) -> Value {
    match to_decimal_literal(value) {
        Some(literal) => Value::Number(
            Number::from_str(&literal).expect("decimal literal is a valid JSON number"),
        ),
        None => Value::String(fraction_string(value)),
    }
}

pub fn money_value(value: &Money) -> Value {
    rational_value(value.as_rational())
}

/// Exact amount as a `"p/q"` string (or `"p"` for integers).
pub fn exact_string(value: &Money) -> Value {
    Value::String(value.to_string())
}

/// A 32-byte SHA-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; 32]);

    pub fn of(bytes: &[u8]) -> Digest {
        Digest(Sha256::digest(bytes).into())
    }

    /// SHA-256 over the concatenation of `parts`.
    pub fn of_parts(parts: &[&[u8]]) -> Digest {
        let mut hasher = Sha256::new();
        for part in parts {
            hasher.update(part);
        }
        Digest(hasher.finalize().into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Strict lowercase-hex parse; anything that would not re-render to the
    /// same text is rejected.
    pub fn from_hex(text: &str) -> Option<Digest> {
        if text.len() != 64 || text.bytes().any(|b| b.is_ascii_uppercase()) {
            return None;
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(text, &mut out).ok()?;
        Some(Digest(out))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}
