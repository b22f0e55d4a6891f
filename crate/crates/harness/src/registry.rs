//! Method names accepted by the benchmark and price runners.

use std::fmt;
use std::str::FromStr;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Offline split conformal prediction, sequential split.
    Scp,
    /// Online sequential split, sequential split of each window.
    Osscp,
    /// Online sequential split with a randomized split of each window.
    OsscpRand,
    /// ACI with a fixed learning rate.
    Aci(f64),
    Agaci,
    /// Best past γ among the AgACI experts.
    Naive,
    Enbpi,
    EnbpiV2,
}

impl Method {
    pub fn uses_online_steps(&self) -> bool {
        matches!(self, Method::Osscp | Method::Aci(_) | Method::Agaci | Method::Naive)
    }

    pub fn uses_ensemble(&self) -> bool {
        matches!(self, Method::Enbpi | Method::EnbpiV2)
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let m = match s {
            "scp" => Method::Scp,
            "osscp" => Method::Osscp,
            "osscp_rand" => Method::OsscpRand,
            "agaci" => Method::Agaci,
            "naive" => Method::Naive,
            "enbpi" => Method::Enbpi,
            "enbpi_v2" => Method::EnbpiV2,
            _ => {
                let gamma = s
                    .strip_prefix("aci_")
                    .and_then(|g| g.parse::<f64>().ok())
                    .filter(|g| (0.0..=1.0).contains(g))
                    .ok_or_else(|| HarnessError::UnknownMethod(s.to_string()))?;
                Method::Aci(gamma)
            }
        };
        Ok(m)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Scp => f.write_str("scp"),
            Method::Osscp => f.write_str("osscp"),
            Method::OsscpRand => f.write_str("osscp_rand"),
            Method::Aci(g) => write!(f, "aci_{g}"),
            Method::Agaci => f.write_str("agaci"),
            Method::Naive => f.write_str("naive"),
            Method::Enbpi => f.write_str("enbpi"),
            Method::EnbpiV2 => f.write_str("enbpi_v2"),
        }
    }
}

pub fn parse_methods<S: AsRef<str>>(names: &[S]) -> Result<Vec<Method>, HarnessError> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}
