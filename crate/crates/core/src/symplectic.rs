//! Symplectic matrices of linear-optical and squeezing elements, and
//! networks built from them.
//!
//! Conventions (quadrature ordering, Ω = ⊕ [[0, 1], [-1, 0]]):
//!
//! - `R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]` acting on one mode's `(x, p)`.
//! - Beam splitter on `(i, j)` with transmissivity τ and phase φ:
//!   `[[√τ I, √(1-τ) R(φ)], [-√(1-τ) R(-φ), √τ I]]`.
//! - Squeezer: `R(φ/2) diag(e^{-r}, e^{r}) R(-φ/2)`; at φ = 0 the x quadrature is squeezed.
//! - Two-mode squeezer: `cosh r I + sinh r [[0, Z(φ)], [Z(φ), 0]]` with
//!   `Z(φ) = [[cos φ, sin φ], [sin φ, -cos φ]]`.
//!
//! Random networks draw from ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, so a seed reproduces the same network on
//! every platform.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::invariants::symplectic_eigenvalues;
use crate::state::{self, CovarianceState};

/// Tolerance for `SΩSᵀ = Ω` and `SSᵀ = I`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Maximum `|ν - 1/2|` for a state to count as pure.
pub const PURITY_TOL: f64 = 1e-8;
/// Relative tolerance when pairing `e^{2r}` with `e^{-2r}`.
pub const PAIRING_TOL: f64 = 1e-8;

/// A single Gaussian unitary element.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianOp {
    BeamSplitter { modes: [usize; 2], transmissivity: f64, phase: f64 },
    Phase { mode: usize, angle: f64 },
    Squeeze { mode: usize, r: f64, phi: f64 },
    TwoModeSqueeze { modes: [usize; 2], r: f64, phi: f64 },
    /// Full 2n x 2n symplectic matrix acting on all modes.
    Raw { matrix: DMatrix<f64> },
}

/// An ordered circuit of [`GaussianOp`]s on `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    n_modes: usize,
    ops: Vec<GaussianOp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticCheck {
    pub symplectic: bool,
    pub passive: bool,
}

/// The symplectic form for `n` modes.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for m in 0..n {
        w[(2 * m, 2 * m + 1)] = 1.0;
        w[(2 * m + 1, 2 * m)] = -1.0;
    }
    w
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn check_index(mode: usize, n: usize) -> Result<()> {
    if mode >= n {
        return Err(Error::InvalidOp(format!("mode {mode} out of range for {n} mode(s)")));
    }
    Ok(())
}

fn check_pair(modes: [usize; 2], n: usize) -> Result<()> {
    check_index(modes[0], n)?;
    check_index(modes[1], n)?;
    if modes[0] == modes[1] {
        return Err(Error::InvalidOp(format!("two-mode element on repeated mode {}", modes[0])));
    }
    Ok(())
}

impl GaussianOp {
    pub fn is_passive_kind(&self) -> bool {
        matches!(self, GaussianOp::BeamSplitter { .. } | GaussianOp::Phase { .. })
    }

    /// Checks indices and parameters against an `n`-mode system.
    pub fn validate(&self, n: usize) -> Result<()> {
        let finite = |vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidOp("non-finite parameter".into()))
            }
        };
        match self {
            GaussianOp::BeamSplitter { modes, transmissivity, phase } => {
                check_pair(*modes, n)?;
                finite(&[*transmissivity, *phase])?;
                if !(0.0..=1.0).contains(transmissivity) {
                    return Err(Error::InvalidOp(format!(
                        "transmissivity {transmissivity} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            GaussianOp::Phase { mode, angle } => {
                check_index(*mode, n)?;
                finite(&[*angle])
            }
            GaussianOp::Squeeze { mode, r, phi } => {
                check_index(*mode, n)?;
                finite(&[*r, *phi])
            }
            GaussianOp::TwoModeSqueeze { modes, r, phi } => {
                check_pair(*modes, n)?;
                finite(&[*r, *phi])
            }
            GaussianOp::Raw { matrix } => {
                if matrix.shape() != (2 * n, 2 * n) {
                    return Err(Error::InvalidOp(format!(
                        "raw matrix is {}x{}, expected {}x{}",
                        matrix.nrows(),
                        matrix.ncols(),
                        2 * n,
                        2 * n
                    )));
                }
                let dev = symplectic_deviation(matrix);
                if dev > SYMPLECTIC_TOL {
                    return Err(Error::NotSymplectic(dev));
                }
                Ok(())
            }
        }
    }
}

fn embed_1(n: usize, mode: usize, block: &Matrix2<f64>) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    s.fixed_view_mut::<2, 2>(2 * mode, 2 * mode).copy_from(block);
    s
}

// blocks = [[ii, ij], [ji, jj]]
fn embed_2(n: usize, [i, j]: [usize; 2], blocks: [[Matrix2<f64>; 2]; 2]) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let idx = [i, j];
    for (a, row) in blocks.iter().enumerate() {
        for (b, blk) in row.iter().enumerate() {
            s.fixed_view_mut::<2, 2>(2 * idx[a], 2 * idx[b]).copy_from(blk);
        }
    }
    s
}

/// The full `2n x 2n` symplectic matrix of `op`, identity on untouched modes.
pub fn op_matrix(op: &GaussianOp, n: usize) -> Result<DMatrix<f64>> {
    op.validate(n)?;
    let eye = Matrix2::identity();
    let s = match *op {
        GaussianOp::BeamSplitter { modes, transmissivity, phase } => {
            let t = transmissivity.sqrt();
            let r = (1.0 - transmissivity).sqrt();
            embed_2(
                n,
                modes,
                [[eye * t, rotation(phase) * r], [rotation(-phase) * -r, eye * t]],
            )
        }
        GaussianOp::Phase { mode, angle } => embed_1(n, mode, &rotation(angle)),
        GaussianOp::Squeeze { mode, r, phi } => {
            let d = Matrix2::new((-r).exp(), 0.0, 0.0, r.exp());
            embed_1(n, mode, &(rotation(phi / 2.0) * d * rotation(-phi / 2.0)))
        }
        GaussianOp::TwoModeSqueeze { modes, r, phi } => {
            let (sp, cp) = phi.sin_cos();
            let z = Matrix2::new(cp, sp, sp, -cp) * r.sinh();
            embed_2(n, modes, [[eye * r.cosh(), z], [z, eye * r.cosh()]])
        }
        GaussianOp::Raw { ref matrix } => matrix.clone(),
    };
    Ok(s)
}

impl NetworkSpec {
    pub fn new(n_modes: usize, ops: Vec<GaussianOp>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("network needs at least one mode".into()));
        }
        for op in &ops {
            op.validate(n_modes)?;
        }
        Ok(Self { n_modes, ops })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { n_modes, ops: Vec::new() }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ops(&self) -> &[GaussianOp] {
        &self.ops
    }

    pub fn push(&mut self, op: GaussianOp) -> Result<()> {
        op.validate(self.n_modes)?;
        self.ops.push(op);
        Ok(())
    }

    /// Product `S_k ... S_1` of all element matrices.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        self.ops.iter().try_fold(DMatrix::identity(2 * self.n_modes, 2 * self.n_modes), |acc, op| {
            Ok(op_matrix(op, self.n_modes)? * acc)
        })
    }
}

pub(crate) fn apply_matrix(state: &CovarianceState, s: &DMatrix<f64>) -> CovarianceState {
    let m = s * state.matrix() * s.transpose();
    let m = (&m + m.transpose()) * 0.5;
    CovarianceState::from_parts_unchecked(m, s * state.mean())
}

pub(crate) fn apply_op(state: &CovarianceState, op: &GaussianOp) -> Result<CovarianceState> {
    Ok(apply_matrix(state, &op_matrix(op, state.n_modes())?))
}

/// Propagates `state` through `network`: `γ → SγSᵀ`, `mean → S mean`, op by op.
pub fn apply(state: &CovarianceState, network: &NetworkSpec) -> Result<CovarianceState> {
    if state.n_modes() != network.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: network.n_modes(),
            found: state.n_modes(),
        });
    }
    let out = network.ops().iter().try_fold(state.clone(), |st, op| apply_op(&st, op))?;
    let report = state::validate(out.matrix())?;
    if let Some(what) = report.failure() {
        return Err(Error::InvalidCovariance(format!("{what} lost after network application")));
    }
    Ok(out)
}

fn symplectic_deviation(s: &DMatrix<f64>) -> f64 {
    let w = omega(s.nrows() / 2);
    (s * &w * s.transpose() - w).amax()
}

/// Tests `SΩSᵀ = Ω` and, for passivity, additionally `SSᵀ = I`.
pub fn check_symplectic(s: &DMatrix<f64>) -> Result<SymplecticCheck> {
    let (rows, cols) = s.shape();
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    if rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    let symplectic = symplectic_deviation(s) <= SYMPLECTIC_TOL;
    let orthogonal = (s * s.transpose() - DMatrix::identity(rows, rows)).amax() <= SYMPLECTIC_TOL;
    Ok(SymplecticCheck { symplectic, passive: symplectic && orthogonal })
}

/// `depth` layers of (random beam splitter, random phase shifter).
pub fn random_passive_network(n: usize, depth: usize, seed: u64) -> Result<NetworkSpec> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("random network needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Vec::with_capacity(2 * depth);
    for _ in 0..depth {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        ops.push(GaussianOp::BeamSplitter {
            modes: [i, j],
            transmissivity: rng.random::<f64>(),
            phase: rng.random_range(0.0..TAU),
        });
        let mode = rng.random_range(0..n);
        ops.push(GaussianOp::Phase { mode, angle: rng.random_range(0.0..TAU) });
    }
    Ok(NetworkSpec { n_modes: n, ops })
}

/// Squeezing parameters `r_k >= 0` (ascending) of a pure state.
///
/// For a pure state the eigenvalues of `2γ` come in reciprocal pairs
/// `e^{±2 r_k}`.
pub fn squeezing_spectrum(state: &CovarianceState) -> Result<Vec<f64>> {
    let nus = symplectic_eigenvalues(state.matrix())?;
    let impurity = nus.iter().map(|nu| (nu - 0.5).abs()).fold(0.0, f64::max);
    if impurity > PURITY_TOL {
        return Err(Error::NotPure(impurity));
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(state.matrix() * 2.0).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let n = state.n_modes();
    let mut rs = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = (eig[k], eig[2 * n - 1 - k]);
        if lo.is_nan() || lo <= 0.0 || ((lo * hi) - 1.0).abs() > PAIRING_TOL {
            return Err(Error::PairingFailure(format!(
                "eigenvalues {lo} and {hi} of 2γ are not reciprocal"
            )));
        }
        rs.push(((hi.ln() - lo.ln()) / 4.0).max(0.0));
    }
    rs.sort_by(f64::total_cmp);
    Ok(rs)
}
