use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The Calabi-Yau dimension `n` of the category, `2 <= n <= infinity`.
///
/// `Infinite` stands for the ordinary derived category of the A2 quiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub fn finite(n: i64) -> Result<Self> {
        if n < 2 || n > u32::MAX as i64 {
            return Err(Error::InvalidLevel(n.to_string()));
        }
        Ok(Level::Finite(n as u32))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Level::Finite(_))
    }

    /// `n` as an integer, or `InfiniteLevel` for n = infinity.
    pub fn get(self) -> Result<i64> {
        match self {
            Level::Finite(n) => Ok(n as i64),
            Level::Infinite => Err(Error::InfiniteLevel),
        }
    }

    /// The shift `[3n - 4]` identified with the central braid `(s1 s2)^3`.
    pub fn tau_shift(self) -> Result<i64> {
        Ok(3 * self.get()? - 4)
    }

    /// Twisted period exponent `(n - 2) / 2`.
    pub fn nu(self) -> Result<f64> {
        Ok((self.get()? as f64 - 2.0) / 2.0)
    }

    pub(crate) fn check_same(self, other: Level) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LevelMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "oo" => Ok(Level::Infinite),
            other => {
                let n: i64 = other
                    .parse()
                    .map_err(|_| Error::InvalidLevel(other.to_string()))?;
                Level::finite(n)
            }
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Level::Finite(n) => s.serialize_u32(*n),
            Level::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Level::finite(n).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_levels() {
        assert_eq!("4".parse::<Level>().unwrap(), Level::Finite(4));
        assert_eq!("inf".parse::<Level>().unwrap(), Level::Infinite);
        assert!("1".parse::<Level>().is_err());
        assert!("x".parse::<Level>().is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let s = serde_json::to_string(&Level::Infinite).unwrap();
        assert_eq!(s, "\"inf\"");
        let l: Level = serde_json::from_str("7").unwrap();
        assert_eq!(l, Level::Finite(7));
    }
}
