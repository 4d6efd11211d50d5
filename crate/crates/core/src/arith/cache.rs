//! Binary on-disk cache for the smallest-prime-factor table.
//!
//! Layout: magic `RMFSIEVE` (8 bytes), format version (u32 LE), limit
//! (u64 LE), then `spf(n)` as u32 LE for `n = 2..=limit`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::sieve::FactorSieve;
use crate::error::{Error, Result};
use crate::seed::keyed_hash;

pub const CACHE_MAGIC: &[u8; 8] = b"RMFSIEVE";
pub const CACHE_VERSION: u32 = 1;
/// Environment variable naming the default cache path.
pub const CACHE_ENV: &str = "RMFLAB_SIEVE_CACHE";

const SPOT_CHECKS: u64 = 1000;

pub fn save_sieve(sieve: &FactorSieve, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&sieve.limit().to_le_bytes())?;
    for &s in &sieve.raw_table()[2..] {
        w.write_all(&s.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a cached table, validating the header, the length, and the
/// `spf(n) | n` invariant on a hash-chosen sample of entries.
pub fn load_sieve(path: &Path, cap: u64) -> Result<FactorSieve> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Cache("truncated header".into()))?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)
        .map_err(|_| Error::Cache("truncated header".into()))?;
    let version = u32::from_le_bytes(b4);
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b8)
        .map_err(|_| Error::Cache("truncated header".into()))?;
    let limit = u64::from_le_bytes(b8);
    if limit < 2 || limit > cap.min(u32::MAX as u64) {
        return Err(Error::Cache(format!("limit {limit} outside 2..={cap}")));
    }
    let count = (limit - 1) as usize;
    let mut bytes = Vec::with_capacity(count * 4);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 4 {
        return Err(Error::Cache(format!(
            "expected {} table bytes, found {}",
            count * 4,
            bytes.len()
        )));
    }
    let mut spf = Vec::with_capacity(limit as usize + 1);
    spf.push(0u32);
    spf.push(1u32);
    spf.extend(
        bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])),
    );
    for i in 0..SPOT_CHECKS {
        let n = 2 + keyed_hash(limit, i) % (limit - 1);
        let s = spf[n as usize] as u64;
        if s < 2 || !n.is_multiple_of(s) {
            return Err(Error::Cache(format!("entry for {n} fails validation")));
        }
    }
    Ok(FactorSieve::from_raw(limit, spf))
}

/// Loads the cache at `path` when it covers `limit`, else builds the sieve
/// and writes the cache.
pub fn load_or_build(path: &Path, limit: u64, cap: u64) -> Result<FactorSieve> {
    if path.exists() {
        if let Ok(s) = load_sieve(path, cap) {
            if s.limit() == limit {
                return Ok(s);
            }
        }
    }
    let sieve = FactorSieve::with_cap(limit, cap)?;
    save_sieve(&sieve, path)?;
    Ok(sieve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve::DEFAULT_SIEVE_CAP;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let s = FactorSieve::new(5000).unwrap();
        save_sieve(&s, &path).unwrap();
        let t = load_sieve(&path, DEFAULT_SIEVE_CAP).unwrap();
        assert_eq!(t.limit(), 5000);
        assert_eq!(t.raw_table(), s.raw_table());
        assert_eq!(t.primes(), s.primes());
        let len = std::fs::metadata(&path).unwrap().len();
        assert_eq!(len, 8 + 4 + 8 + 4 * 4999);
    }

    #[test]
    fn rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let s = FactorSieve::new(100).unwrap();
        save_sieve(&s, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_sieve(&path, DEFAULT_SIEVE_CAP), Err(Error::Cache(_))));

        save_sieve(&s, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // every table entry set to 7
        for c in bytes[20..].chunks_exact_mut(4) {
            c.copy_from_slice(&7u32.to_le_bytes());
        }
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_sieve(&path, DEFAULT_SIEVE_CAP).is_err());

        bytes.truncate(30);
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_sieve(&path, DEFAULT_SIEVE_CAP).is_err());
    }
}
