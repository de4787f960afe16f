//! Size limits for exhaustive verification.

use std::str::FromStr;

use crate::error::{Error, Result};

/// Environment variable read by [`Caps::from_env`].
pub const CAPS_ENV: &str = "CRD_CACHE_CAPS";

/// Upper bounds on point counts and on the number of block intersections
/// evaluated while computing cross intersection numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_points: u64,
    pub max_intersections: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_points: 4096,
            max_intersections: 10_000_000,
        }
    }
}

impl Caps {
    /// Defaults overridden by `CRD_CACHE_CAPS`, e.g. `points=8192,intersections=50000000`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(raw) if !raw.trim().is_empty() => raw.parse(),
            _ => Ok(Caps::default()),
        }
    }

    pub(crate) fn check_points(&self, v: u64) -> Result<()> {
        if v > self.max_points {
            return Err(Error::SizeCapExceeded {
                what: "point count",
                requested: v,
                limit: self.max_points,
            });
        }
        Ok(())
    }
}

impl FromStr for Caps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut caps = Caps::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidCaps(s.to_string()))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCaps(s.to_string()))?;
            match key.trim() {
                "points" => caps.max_points = value,
                "intersections" => caps.max_intersections = value,
                _ => return Err(Error::InvalidCaps(s.to_string())),
            }
        }
        Ok(caps)
    }
}
