//! Covariance-matrix representation of Gaussian states.
//!
//! Matrices use the real quadrature ordering `(x1, p1, ..., xn, pn)` with
//! vacuum covariance `I/2`. The complex `(a, a†)` ordering is reachable via
//! [`to_complex_basis`] and [`to_quadrature_basis`].

use nalgebra::{Complex, DMatrix, DVector, Matrix2, SymmetricEigen};

use crate::error::{Error, Result};
use crate::symplectic::{self, GaussianOp};

/// Absolute tolerance on symmetry, positivity and the uncertainty bound.
pub const VALIDITY_TOL: f64 = 1e-10;

/// An n-mode Gaussian state given by its covariance matrix and mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    matrix: DMatrix<f64>,
    mean: DVector<f64>,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub positive: bool,
    pub uncertainty_ok: bool,
    /// Smallest symplectic eigenvalue (NaN if it could not be computed).
    pub nu_min: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric && self.positive && self.uncertainty_ok
    }

    /// Name of the first failed check, if any.
    pub fn failure(&self) -> Option<&'static str> {
        if !self.symmetric {
            Some("symmetry")
        } else if !self.positive {
            Some("positivity")
        } else if !self.uncertainty_ok {
            Some("uncertainty")
        } else {
            None
        }
    }
}

/// Per-mode statistics of the reduced single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStats {
    /// Minimum eigenvalue of the 2x2 block (minimum quadrature variance).
    pub lambda_min: f64,
    /// Maximum eigenvalue of the 2x2 block.
    pub lambda_max: f64,
    pub purity: f64,
    pub mean_photons: f64,
}

/// Standard states accepted by [`make_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Thermal { n_th: f64 },
    SqueezedThermal { r: f64, phi: f64, n_th: f64 },
    Tmsv { r: f64 },
    FromMatrix(DMatrix<f64>),
}

pub(crate) fn check_square_even(matrix: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    if rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    Ok(rows / 2)
}

/// Symmetry, positivity and uncertainty checks on a raw matrix.
pub fn validate(matrix: &DMatrix<f64>) -> Result<ValidationReport> {
    let n = check_square_even(matrix)?;
    let asymmetry = (matrix - matrix.transpose()).amax();
    let sym = (matrix + matrix.transpose()) * 0.5;

    let min_eig = if n == 0 {
        f64::INFINITY
    } else {
        SymmetricEigen::new(sym.clone()).eigenvalues.min()
    };
    let positive = n > 0 && min_eig > -VALIDITY_TOL;

    let nu_min = if n == 0 {
        f64::NAN
    } else {
        symplectic_moduli(&sym)
            .map(|m| m.into_iter().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN)
    };
    Ok(ValidationReport {
        symmetric: asymmetry <= VALIDITY_TOL,
        positive,
        uncertainty_ok: positive && nu_min >= 0.5 - VALIDITY_TOL,
        nu_min,
    })
}

// Moduli of all eigenvalues of Ωγ; no pairing or positivity requirement.
fn symplectic_moduli(matrix: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = matrix.nrows() / 2;
    let product = symplectic::omega(n) * matrix;
    let schur = nalgebra::Schur::try_new(product, f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().map(|z| z.norm()).collect())
}

impl CovarianceState {
    /// Validates `matrix` and builds a state; the mean defaults to zero.
    pub fn new(matrix: DMatrix<f64>, mean: Option<DVector<f64>>) -> Result<Self> {
        let report = validate(&matrix)?;
        if let Some(what) = report.failure() {
            return Err(Error::InvalidCovariance(format!(
                "{what} check failed (nu_min = {})",
                report.nu_min
            )));
        }
        let dim = matrix.nrows();
        let mean = match mean {
            Some(m) if m.len() != dim => {
                return Err(Error::InvalidParameter(format!(
                    "mean has length {}, expected {dim}",
                    m.len()
                )))
            }
            Some(m) => m,
            None => DVector::zeros(dim),
        };
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix, mean })
    }

    pub(crate) fn from_parts_unchecked(matrix: DMatrix<f64>, mean: DVector<f64>) -> Self {
        Self { matrix, mean }
    }

    pub fn vacuum(n: usize) -> Self {
        Self::from_parts_unchecked(DMatrix::identity(2 * n, 2 * n) * 0.5, DVector::zeros(2 * n))
    }

    pub fn thermal(n_th: f64) -> Result<Self> {
        Self::squeezed_thermal(0.0, 0.0, n_th)
    }

    /// Single-mode squeezed thermal state with eigenvalues `(1/2 + n_th) e^{∓2r}`;
    /// `phi` rotates the squeezing axis.
    pub fn squeezed_thermal(r: f64, phi: f64, n_th: f64) -> Result<Self> {
        if n_th < 0.0 || !n_th.is_finite() {
            return Err(Error::InvalidParameter(format!("n_th must be >= 0, got {n_th}")));
        }
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("r and phi must be finite".into()));
        }
        let s = symplectic::op_matrix(&GaussianOp::Squeeze { mode: 0, r, phi }, 1)?;
        let matrix = &s * s.transpose() * (0.5 + n_th);
        Ok(Self::from_parts_unchecked(matrix, DVector::zeros(2)))
    }

    /// Two-mode squeezed vacuum: the two-mode squeezer acting on vacuum.
    pub fn tmsv(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter("r must be finite".into()));
        }
        let op = GaussianOp::TwoModeSqueeze { modes: [0, 1], r, phi: 0.0 };
        symplectic::apply_op(&Self::vacuum(2), &op)
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Same covariance matrix, different first moments.
    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.matrix.nrows() {
            return Err(Error::InvalidParameter(format!(
                "mean has length {}, expected {}",
                mean.len(),
                self.matrix.nrows()
            )));
        }
        Ok(Self { matrix: self.matrix.clone(), mean })
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::IndexOutOfRange { index: mode, n_modes: self.n_modes() });
        }
        Ok(())
    }

    /// The 2x2 block coupling `row_mode` and `col_mode`.
    pub fn block(&self, row_mode: usize, col_mode: usize) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(2 * row_mode, 2 * col_mode).into_owned()
    }

    /// Principal sub-state on `modes`, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("mode set is empty".into()));
        }
        for (k, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::DuplicateIndex(m));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let matrix = self.matrix.select_rows(&idx).select_columns(&idx);
        let mean = self.mean.select_rows(&idx);
        Ok(Self { matrix, mean })
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.matrix.nrows(), other.matrix.nrows());
        let mut matrix = DMatrix::zeros(da + db, da + db);
        matrix.view_mut((0, 0), (da, da)).copy_from(&self.matrix);
        matrix.view_mut((da, da), (db, db)).copy_from(&other.matrix);
        let mean = DVector::from_iterator(
            da + db,
            self.mean.iter().chain(other.mean.iter()).copied(),
        );
        Self { matrix, mean }
    }

    pub fn mode_stats(&self, mode: usize) -> Result<ModeStats> {
        self.check_mode(mode)?;
        let b = self.block(mode, mode);
        let (lambda_min, lambda_max) = eigen_2x2(&b);
        let det = b.determinant();
        let (mx, mp) = (self.mean[2 * mode], self.mean[2 * mode + 1]);
        Ok(ModeStats {
            lambda_min,
            lambda_max,
            purity: 1.0 / (2.0 * det.sqrt()),
            mean_photons: b.trace() / 2.0 - 0.5 + (mx * mx + mp * mp) / 2.0,
        })
    }
}

/// Eigenvalues `(min, max)` of a symmetric 2x2 matrix.
pub(crate) fn eigen_2x2(b: &Matrix2<f64>) -> (f64, f64) {
    let mid = (b[(0, 0)] + b[(1, 1)]) / 2.0;
    let half_diff = (b[(0, 0)] - b[(1, 1)]) / 2.0;
    let off = (b[(0, 1)] + b[(1, 0)]) / 2.0;
    let radius = half_diff.hypot(off);
    (mid - radius, mid + radius)
}

/// Builds one of the standard states on `n` modes.
///
/// `Vacuum`, `Thermal` and `SqueezedThermal` are replicated on every mode;
/// `Tmsv` requires `n == 2`; `FromMatrix` must describe `n` modes.
pub fn make_state(spec: &StateSpec, n: usize) -> Result<CovarianceState> {
    if n == 0 {
        return Err(Error::InvalidParameter("mode count must be positive".into()));
    }
    let replicate = |single: CovarianceState| {
        (1..n).fold(single.clone(), |acc, _| acc.tensor(&single))
    };
    match spec {
        StateSpec::Vacuum => Ok(CovarianceState::vacuum(n)),
        StateSpec::Thermal { n_th } => CovarianceState::thermal(*n_th).map(replicate),
        StateSpec::SqueezedThermal { r, phi, n_th } => {
            CovarianceState::squeezed_thermal(*r, *phi, *n_th).map(replicate)
        }
        StateSpec::Tmsv { r } => {
            if n != 2 {
                return Err(Error::InvalidParameter(format!("tmsv needs 2 modes, got {n}")));
            }
            CovarianceState::tmsv(*r)
        }
        StateSpec::FromMatrix(m) => {
            let state = CovarianceState::new(m.clone(), None)?;
            if state.n_modes() != n {
                return Err(Error::DimensionMismatch { expected: n, found: state.n_modes() });
            }
            Ok(state)
        }
    }
}

// Per-mode unitary mapping (x, p) to (a, a†): a = (x + ip)/√2.
fn mode_unitary(n: usize) -> DMatrix<Complex<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    for m in 0..n {
        let (x, p) = (2 * m, 2 * m + 1);
        u[(x, x)] = Complex::new(h, 0.0);
        u[(x, p)] = Complex::new(0.0, h);
        u[(p, x)] = Complex::new(h, 0.0);
        u[(p, p)] = Complex::new(0.0, -h);
    }
    u
}

/// Quadrature-basis matrix to the complex `(a, a†)` basis.
pub fn to_complex_basis(matrix: &DMatrix<f64>) -> Result<DMatrix<Complex<f64>>> {
    let n = check_square_even(matrix)?;
    let u = mode_unitary(n);
    let m = matrix.map(|v| Complex::new(v, 0.0));
    Ok(&u * m * u.adjoint())
}

/// Complex-basis matrix back to the quadrature basis.
///
/// The input must be Hermitian and must map onto a real matrix.
pub fn to_quadrature_basis(matrix: &DMatrix<Complex<f64>>) -> Result<DMatrix<f64>> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    if rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    let herm_dev = (matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm_dev > VALIDITY_TOL {
        return Err(Error::NotHermitian(herm_dev));
    }
    let u = mode_unitary(rows / 2);
    let q = u.adjoint() * matrix * &u;
    let imag = q.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > VALIDITY_TOL {
        return Err(Error::InvalidParameter(format!(
            "complex-basis matrix lacks the [[a, b*], [b, a]] mode structure (imaginary residue {imag:e})"
        )));
    }
    Ok(q.map(|z| z.re))
}
