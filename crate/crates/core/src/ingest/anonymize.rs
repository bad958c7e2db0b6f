use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::error::{Error, Result};

/// Maps a raw user key (typically a phone number) to an opaque user id.
///
/// Keyed HMAC-SHA256 truncated to 128 bits: deterministic for a fixed salt,
/// not invertible or linkable across salts without the secret.
pub fn anonymize(raw_user_key: &str, salt: &str) -> Result<String> {
    if salt.is_empty() {
        return Err(Error::Config("anonymization salt must not be empty".into()));
    }
    let mut mac = Hmac::<Sha256>::new_from_slice(salt.as_bytes())
        .map_err(|e| Error::Config(format!("invalid salt: {}", e)))?;
    mac.update(raw_user_key.as_bytes());
    let digest = mac.finalize().into_bytes();
    Ok(format!("u{}", hex::encode(&digest[..16])))
}
