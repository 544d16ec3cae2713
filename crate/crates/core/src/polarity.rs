//! Classical-nonclassical polarity (CNP) of one-, two- and three-mode states.
//!
//! - Single mode: `P1 = -(λ - 1/2)(Λ - 1/2)` from the reduced 2x2 block.
//! - Bipartition α : rest: `Pn = g(1/4) = -2 Π (ν̃_j² - 1/4)` on the matrix
//!   partially transposed on α.
//! - Totals add every single-mode term, every reduced-pair term (three modes
//!   only) and every 1 x (n-1) bipartition once. A second, invariant-based
//!   closed form is evaluated alongside and must agree.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::invariants::{g_eval, minor_invariants, partial_transpose, symplectic_eigenvalues};
use crate::state::CovarianceState;

/// Half-width of the band around zero reported as [`Classification::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Agreement required between the minor path and the eigenvalue path of a
/// bipartite CNP, relative to the magnitude of the polynomial's terms.
pub const CROSS_CHECK_TOL: f64 = 1e-9;
/// Agreement required between the summed and closed-form totals.
pub const TOTAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Entangled,
    Separable,
    Boundary,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Entangled => "entangled",
            Classification::Separable => "separable",
            Classification::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Report key: a reduced mode pair, or one mode against the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bipartition {
    Pair(usize, usize),
    Split(usize),
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bipartition::Pair(a, b) => write!(f, "{a}-{b}"),
            Bipartition::Split(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarityReport {
    pub single: Vec<f64>,
    /// Two-mode CNPs of the reduced pairs (three-mode states only).
    pub pairs: BTreeMap<(usize, usize), f64>,
    /// `P_{α:rest}`. For two modes only the `0` entry is listed, since
    /// `0:1` and `1:0` are the same bipartition.
    pub bipartite: BTreeMap<usize, f64>,
    pub total: f64,
    pub total_closed_form: f64,
    pub classifications: BTreeMap<Bipartition, Classification>,
}

pub fn single_mode_cnp(state: &CovarianceState, mode: usize) -> Result<f64> {
    let st = state.mode_stats(mode)?;
    Ok(-(st.lambda_min - 0.5) * (st.lambda_max - 0.5))
}

fn check_bipartite_modes(n: usize) -> Result<()> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedModeCount(n));
    }
    Ok(())
}

/// Symplectic eigenvalues `ν̃` of the state partially transposed on `mode`.
pub fn transposed_spectrum(state: &CovarianceState, mode: usize) -> Result<Vec<f64>> {
    symplectic_eigenvalues(&partial_transpose(state.matrix(), mode)?)
}

/// `P_{mode:rest}` from the transposed minor invariants, cross-checked
/// against the product over transposed symplectic eigenvalues.
pub fn bipartite_cnp(state: &CovarianceState, mode: usize) -> Result<f64> {
    check_bipartite_modes(state.n_modes())?;
    let pt = partial_transpose(state.matrix(), mode)?;
    let value = g_eval(&minor_invariants(&pt)?, 0.25);

    let nus = symplectic_eigenvalues(&pt)?;
    let from_nu = -2.0 * nus.iter().map(|nu| nu * nu - 0.25).product::<f64>();
    let magnitude = 2.0 * nus.iter().map(|nu| nu * nu + 0.25).product::<f64>();
    if (value - from_nu).abs() > CROSS_CHECK_TOL * magnitude.max(1.0) {
        return Err(Error::CrossCheckFailure {
            what: "bipartite CNP (minors vs symplectic eigenvalues)",
            primary: value,
            secondary: from_nu,
        });
    }
    Ok(value)
}

pub fn classify(value: f64, boundary_tol: f64) -> Classification {
    if value > boundary_tol {
        Classification::Entangled
    } else if value < -boundary_tol {
        Classification::Separable
    } else {
        Classification::Boundary
    }
}

/// `max(0, -ln(2 ν̃_min))` for the bipartition `mode : rest`.
pub fn log_negativity(state: &CovarianceState, mode: usize) -> Result<f64> {
    if state.n_modes() < 2 {
        return Err(Error::UnsupportedModeCount(state.n_modes()));
    }
    let nu_min = transposed_spectrum(state, mode)?.into_iter().fold(f64::INFINITY, f64::min);
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

/// All CNPs of a 1-, 2- or 3-mode state plus both forms of the total.
pub fn total_cnp(state: &CovarianceState) -> Result<PolarityReport> {
    let n = state.n_modes();
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedModeCount(n));
    }
    let single = (0..n).map(|m| single_mode_cnp(state, m)).collect::<Result<Vec<_>>>()?;
    let trace_sum: f64 = (0..n)
        .map(|m| state.mode_stats(m).map(|s| s.lambda_min + s.lambda_max))
        .sum::<Result<f64>>()?;
    let inv = minor_invariants(state.matrix())?;

    let mut pairs = BTreeMap::new();
    let mut bipartite = BTreeMap::new();
    match n {
        2 => {
            bipartite.insert(0, bipartite_cnp(state, 0)?);
        }
        3 => {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                pairs.insert((a, b), bipartite_cnp(&state.reduced(&[a, b])?, 0)?);
            }
            for m in 0..3 {
                bipartite.insert(m, bipartite_cnp(state, m)?);
            }
        }
        _ => {}
    }

    let total = single.iter().sum::<f64>() + pairs.values().sum::<f64>() + bipartite.values().sum::<f64>();
    let total_closed_form = match n {
        1 => trace_sum / 2.0 - inv.get(0) - 0.25,
        2 => trace_sum / 2.0 - inv.get(1) / 2.0 - 5.0 / 8.0 - 2.0 * inv.get(0),
        _ => {
            -3.0 / 8.0 * inv.get(2) - inv.get(1) / 2.0 - 6.0 * inv.get(0) - 33.0 / 32.0
                + trace_sum / 2.0
        }
    };
    if (total - total_closed_form).abs() > TOTAL_TOL * total.abs().max(1.0) {
        return Err(Error::CrossCheckFailure {
            what: "total CNP (summed parts vs closed form)",
            primary: total,
            secondary: total_closed_form,
        });
    }

    let classifications = pairs
        .iter()
        .map(|(&(a, b), &v)| (Bipartition::Pair(a, b), classify(v, BOUNDARY_TOL)))
        .chain(bipartite.iter().map(|(&m, &v)| (Bipartition::Split(m), classify(v, BOUNDARY_TOL))))
        .collect();

    Ok(PolarityReport { single, pairs, bipartite, total, total_closed_form, classifications })
}

struct KeyedMap<'a, K, V>(&'a BTreeMap<K, V>, fn(&K) -> String);

impl<K, V: Serialize> Serialize for KeyedMap<'_, K, V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(&(self.1)(k), v)?;
        }
        map.end()
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl Serialize for PolarityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PolarityReport", 6)?;
        s.serialize_field("single", &self.single)?;
        s.serialize_field("pairs", &KeyedMap(&self.pairs, |(a, b)| format!("{a}-{b}")))?;
        s.serialize_field("bipartite", &KeyedMap(&self.bipartite, |m| m.to_string()))?;
        s.serialize_field("total", &self.total)?;
        s.serialize_field("total_closed_form", &self.total_closed_form)?;
        s.serialize_field("classifications", &KeyedMap(&self.classifications, |b| b.to_string()))?;
        s.end()
    }
}
