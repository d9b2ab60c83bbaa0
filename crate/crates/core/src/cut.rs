//! Cut assignments and the two equivalent objectives.
//!
//! A cut is a bit vector `z` with `z_i = 1` meaning node `i` is in `A`.
//! The cut value counts each crossing edge once; the Ising energy is
//! `1/2 * sum w_ij s_i s_j` with spins `s = 2z - 1`. The two satisfy
//! `cut = W/2 - energy`, where `W` is the total edge weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CutAssignment {
    bits: Vec<bool>,
}

impl CutAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        CutAssignment { bits }
    }

    pub fn zeros(n: usize) -> Self {
        CutAssignment { bits: vec![false; n] }
    }

    /// Spins in `{-1, +1}`, with `+1` for nodes in `A`.
    pub fn from_spins(spins: &[i8]) -> Self {
        CutAssignment {
            bits: spins.iter().map(|&s| s > 0).collect(),
        }
    }

    /// Assignment with the listed nodes in `A`.
    pub fn from_set(n: usize, a: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &v in a {
            bits[v] = true;
        }
        CutAssignment { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn spin(&self, i: usize) -> f64 {
        if self.bits[i] {
            1.0
        } else {
            -1.0
        }
    }

    pub fn spins(&self) -> Vec<i8> {
        self.bits.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }

    pub fn complement(&self) -> Self {
        CutAssignment {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    pub fn same_up_to_complement(&self, other: &CutAssignment) -> bool {
        self.len() == other.len()
            && (self.bits == other.bits || self.bits.iter().zip(&other.bits).all(|(a, b)| a != b))
    }

    /// Node sets `(A, complement of A)`.
    pub fn sides(&self) -> (Vec<usize>, Vec<usize>) {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..self.len()).partition(|&i| self.bits[i]);
        (a, b)
    }
}

impl fmt::Display for CutAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CutAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("assignment must be a bit string, got '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(CutAssignment::new)
    }
}

impl Serialize for CutAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CutAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Both objective values of one assignment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub cut_value: f64,
    pub ising_energy: f64,
}

impl ObjectiveValue {
    pub fn of(g: &Graph, z: &CutAssignment) -> Self {
        ObjectiveValue {
            cut_value: cut_value(g, z),
            ising_energy: ising_energy(g, z),
        }
    }
}

fn check_len(g: &Graph, z: &CutAssignment) {
    assert_eq!(z.len(), g.n(), "assignment length {} does not match graph size {}", z.len(), g.n());
}

/// Total weight of edges whose endpoints lie on different sides.
pub fn cut_value(g: &Graph, z: &CutAssignment) -> f64 {
    check_len(g, z);
    g.edges()
        .iter()
        .filter(|e| z.get(e.i) != z.get(e.j))
        .map(|e| e.w)
        .sum()
}

/// `1/2 * sum over edges of w_ij s_i s_j`.
pub fn ising_energy(g: &Graph, z: &CutAssignment) -> f64 {
    check_len(g, z);
    0.5 * g
        .edges()
        .iter()
        .map(|e| if z.get(e.i) == z.get(e.j) { e.w } else { -e.w })
        .sum::<f64>()
}

/// `achieved / optimum`. Both arguments must be cut values or both energies.
pub fn approx_ratio(achieved: f64, optimum: f64) -> Result<f64> {
    if optimum == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(achieved / optimum)
}
