//! Symplectic invariants, partial transposition and symplectic eigenvalues.
//!
//! The invariant `I_k` of an n-mode covariance matrix is the sum of all
//! order-(n-k) block minors: for every pair (R, C) of k-element sets of mode
//! indices, the determinant of the matrix left after deleting block rows R
//! and block columns C (original order kept, no cofactor signs). Pairs with
//! R != C come in transposed couples, which produces the familiar factors of
//! two, e.g. `I_1 = |γ_A| + |γ_B| + 2|x|` for two modes. Equivalently `I_k`
//! is the elementary symmetric polynomial of degree n-k in the squared
//! symplectic eigenvalues, which [`invariants_from_nu`] evaluates directly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::check_square_even;
use crate::symplectic::omega;

/// Relative tolerance used when pairing the `±iν` eigenvalues of Ωγ.
pub const NU_PAIRING_TOL: f64 = 1e-9;

/// Invariants `I_0 .. I_{n-1}` of one (possibly partially transposed) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    pub n_modes: usize,
    pub values: Vec<f64>,
    /// Computed on a partially transposed matrix (the `Ĩ_k`).
    pub transposed: bool,
}

impl InvariantSet {
    /// `I_k`, with the convention `I_n = 1`.
    pub fn get(&self, k: usize) -> f64 {
        if k == self.n_modes {
            1.0
        } else {
            self.values[k]
        }
    }
}

/// `TγT` with T flipping the momentum of `mode`.
pub fn partial_transpose(matrix: &DMatrix<f64>, mode: usize) -> Result<DMatrix<f64>> {
    let n = check_square_even(matrix)?;
    if mode >= n {
        return Err(Error::IndexOutOfRange { index: mode, n_modes: n });
    }
    let p = 2 * mode + 1;
    let mut out = matrix.clone();
    for k in 0..2 * n {
        out[(p, k)] = -out[(p, k)];
        out[(k, p)] = -out[(k, p)];
    }
    Ok(out)
}

/// Ascending symplectic eigenvalues: moduli of the `±iν` eigenvalue pairs of Ωγ.
pub fn symplectic_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_square_even(matrix)?;
    let sym = (matrix + matrix.transpose()) * 0.5;
    if n == 0 || sym.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let schur = nalgebra::Schur::try_new(omega(n) * &sym, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::PairingFailure("Schur iteration did not converge".into()))?;
    let eig = schur.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for z in eig.iter() {
        if z.re.abs() > NU_PAIRING_TOL * scale {
            return Err(Error::PairingFailure(format!("eigenvalue {z} of Ωγ is not imaginary")));
        }
        if z.im >= 0.0 {
            upper.push(z.im);
        } else {
            lower.push(-z.im);
        }
    }
    if upper.len() != n {
        // a zero imaginary part can land on either side; rebalance by magnitude
        let mut all: Vec<f64> = upper.iter().chain(&lower).copied().collect();
        all.sort_by(f64::total_cmp);
        upper = all.iter().skip(1).step_by(2).copied().collect();
        lower = all.iter().step_by(2).copied().collect();
    }
    upper.sort_by(f64::total_cmp);
    lower.sort_by(f64::total_cmp);
    upper
        .iter()
        .zip(&lower)
        .map(|(&a, &b)| {
            if (a - b).abs() > NU_PAIRING_TOL * a.max(b) {
                Err(Error::PairingFailure(format!("±iν pair mismatch: {a} vs {b}")))
            } else {
                Ok((a + b) / 2.0)
            }
        })
        .collect()
}

/// Determinant of the submatrix keeping block rows `rows` and block columns `cols`.
pub fn block_minor(matrix: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let expand = |modes: &[usize]| modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect::<Vec<_>>();
    matrix.select_rows(&expand(rows)).select_columns(&expand(cols)).determinant()
}

// Index sets of size `size` drawn from 0..n, ascending.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Minor-sum invariants `I_0 .. I_{n-1}` for n in {1, 2, 3}.
pub fn minor_invariants(matrix: &DMatrix<f64>) -> Result<InvariantSet> {
    let n = check_square_even(matrix)?;
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedModeCount(n));
    }
    let values = (0..n)
        .map(|k| {
            let kept = subsets(n, n - k);
            kept.iter()
                .flat_map(|rows| kept.iter().map(move |cols| (rows, cols)))
                .map(|(rows, cols)| block_minor(matrix, rows, cols))
                .sum()
        })
        .collect();
    Ok(InvariantSet { n_modes: n, values, transposed: false })
}

/// Invariants `Ĩ_k` of the matrix partially transposed on `mode`.
pub fn transposed_invariants(matrix: &DMatrix<f64>, mode: usize) -> Result<InvariantSet> {
    let mut inv = minor_invariants(&partial_transpose(matrix, mode)?)?;
    inv.transposed = true;
    Ok(inv)
}

/// `I_k = e_{n-k}(ν_1², ..., ν_n²)`.
pub fn invariants_from_nu(nus: &[f64]) -> InvariantSet {
    let n = nus.len();
    // esp[d] = elementary symmetric polynomial of degree d
    let mut esp = vec![0.0; n + 1];
    esp[0] = 1.0;
    for (count, nu) in nus.iter().enumerate() {
        let sq = nu * nu;
        for d in (1..=count + 1).rev() {
            esp[d] += esp[d - 1] * sq;
        }
    }
    InvariantSet {
        n_modes: n,
        values: (0..n).map(|k| esp[n - k]).collect(),
        transposed: false,
    }
}

/// `g(x) = 2 Σ_{j=0}^{n} (-1)^{j+1} x^j I_j` with `I_n = 1`, which equals
/// `-2 Π_j (ν_j² - x)`.
pub fn g_eval(inv: &InvariantSet, x: f64) -> f64 {
    let mut acc = 0.0;
    let mut power = 1.0;
    for j in 0..=inv.n_modes {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        acc += sign * power * inv.get(j);
        power *= x;
    }
    2.0 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::CovarianceState;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn tmsv(r: f64) -> DMatrix<f64> {
        CovarianceState::tmsv(r).unwrap().matrix().clone()
    }

    #[test]
    fn partial_transpose_examples() {
        let th = CovarianceState::thermal(0.3).unwrap().tensor(&CovarianceState::thermal(1.2).unwrap());
        assert_eq!(&partial_transpose(th.matrix(), 0).unwrap(), th.matrix());

        let t = tmsv(0.7);
        let twice = partial_transpose(&partial_transpose(&t, 1).unwrap(), 1).unwrap();
        assert_eq!(twice, t);

        let nus = symplectic_eigenvalues(&partial_transpose(&tmsv(0.5), 0).unwrap()).unwrap();
        assert_abs_diff_eq!(nus[0], (-1f64).exp() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nus[1], 1f64.exp() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nus[0], 0.183_939_7, epsilon = 1e-7);
        assert_abs_diff_eq!(nus[1], 1.359_140_9, epsilon = 1e-7);

        assert!(matches!(partial_transpose(&t, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn symplectic_eigenvalue_examples() {
        let nus = symplectic_eigenvalues(CovarianceState::vacuum(3).matrix()).unwrap();
        for nu in nus {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-14);
        }
        let nus = symplectic_eigenvalues(CovarianceState::thermal(1.0).unwrap().matrix()).unwrap();
        assert_abs_diff_eq!(nus[0], 1.5, epsilon = 1e-14);
        for r in [0.1, 0.8, 1.5] {
            for nu in symplectic_eigenvalues(&tmsv(r)).unwrap() {
                assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-12);
            }
        }
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(symplectic_eigenvalues(&neg), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn minor_invariant_examples() {
        let inv = minor_invariants(CovarianceState::vacuum(2).matrix()).unwrap();
        assert_abs_diff_eq!(inv.values[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.values[0], 1.0 / 16.0, epsilon = 1e-15);

        let inv = minor_invariants(&tmsv(0.9)).unwrap();
        assert_abs_diff_eq!(inv.values[1], 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(inv.values[0], 1.0 / 16.0, epsilon = 1e-13);

        let inv = minor_invariants(CovarianceState::vacuum(3).matrix()).unwrap();
        assert_abs_diff_eq!(inv.values[2], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.values[1], 3.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.values[0], 1.0 / 64.0, epsilon = 1e-15);

        let inv = minor_invariants(CovarianceState::thermal(1.0).unwrap().matrix()).unwrap();
        assert_eq!(inv.values.len(), 1);
        assert_abs_diff_eq!(inv.values[0], 2.25, epsilon = 1e-15);

        assert!(matches!(
            minor_invariants(CovarianceState::vacuum(4).matrix()),
            Err(Error::UnsupportedModeCount(4))
        ));
    }

    #[test]
    fn two_mode_expansion_matches_block_formula() {
        let t = tmsv(0.4);
        let inv = minor_invariants(&t).unwrap();
        let expected = block_minor(&t, &[0], &[0]) + block_minor(&t, &[1], &[1]) + 2.0 * block_minor(&t, &[1], &[0]);
        assert_relative_eq!(inv.values[1], expected, max_relative = 1e-14);
    }

    #[test]
    fn invariants_from_nu_examples() {
        let inv = invariants_from_nu(&[0.5, 0.5]);
        assert_eq!(inv.values, vec![0.0625, 0.5]);
        let inv = invariants_from_nu(&[0.5, 0.5, 0.5]);
        assert_eq!(inv.values, vec![0.015625, 0.1875, 0.75]);

        let (a, b) = ((-1f64).exp() / 2.0, 1f64.exp() / 2.0);
        let inv = invariants_from_nu(&[a, b]);
        assert_abs_diff_eq!(inv.values[1], ((-2f64).exp() + 2f64.exp()) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(inv.values[1], 1.881_097_8, epsilon = 1e-7);
        assert_abs_diff_eq!(inv.values[0], 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn g_eval_examples() {
        let vac = minor_invariants(CovarianceState::vacuum(2).matrix()).unwrap();
        assert_abs_diff_eq!(g_eval(&vac, 0.25), 0.0, epsilon = 1e-15);

        let pt = transposed_invariants(&tmsv(0.5), 0).unwrap();
        assert!(pt.transposed);
        assert_abs_diff_eq!(g_eval(&pt, 0.25), (2f64.cosh() - 1.0) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g_eval(&pt, 0.25), 0.690_548_9, epsilon = 1e-7);

        assert_eq!(g_eval(&pt, 0.0), -2.0 * pt.values[0]);
    }

    #[test]
    fn g_vanishes_on_squared_eigenvalues() {
        let m = partial_transpose(&tmsv(0.6), 1).unwrap();
        let inv = minor_invariants(&m).unwrap();
        for nu in symplectic_eigenvalues(&m).unwrap() {
            assert_abs_diff_eq!(g_eval(&inv, nu * nu), 0.0, epsilon = 1e-8);
        }
    }
}
