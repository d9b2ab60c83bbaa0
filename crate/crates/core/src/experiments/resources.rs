use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit connectivity of the target device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    AllToAll,
    Linear,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::AllToAll => "all-to-all",
            Topology::Linear => "linear",
        })
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-to-all" => Ok(Topology::AllToAll),
            "linear" => Ok(Topology::Linear),
            _ => Err(Error::InvalidParameter(format!("unknown topology '{s}'"))),
        }
    }
}

/// Two-qubit gate count of the full circuit on `n` qubits.
///
/// Every rotation costs two CNOTs. On a line, the first gate is placed on
/// neighbours; each later gate `i = 3..=n` needs a SWAP chain, giving
/// `2 + (n - 2)(3(n - 3) + 8)` in total.
pub fn cnot_count(n: usize, topology: Topology) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 qubits, got {n}")));
    }
    let n = n as u64;
    Ok(match topology {
        Topology::AllToAll => 2 * n,
        Topology::Linear => 2 + (n - 2) * (3 * (n - 2) + 5),
    })
}
