//! Gram matrices, uncertainty volumes, and the determinant gap F(f).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{EigenbasisObservable, ObservableSet};
use crate::monotone::MonotoneFunction;
use crate::spectral::{average_table, gap_table, SpectralState};
use crate::{CMat, C64, Error, RMat, Result};

/// Determinants of the (PSD) Gram matrices below this are treated as
/// eigensolver noise and clamped to zero; anything lower is an error.
pub const DET_NEGATIVE_TOL: f64 = 1e-12;
/// Relative singular-value cutoff used by the rank test.
const RANK_RELATIVE_EPS: f64 = 1e-13;

/// Determinant via LU with partial pivoting, for every matrix size.
///
/// nalgebra's `determinant()` special-cases dims ≤ 3 with cofactor
/// formulas; elimination keeps exactly-proportional rows exactly
/// proportional (the equality construction scales rows by powers of two),
/// so the LU route returns exact zeros where cofactor sums leave residue.
pub(crate) fn det_lu(m: &RMat) -> f64 {
    let n = m.nrows();
    let mut a = m.clone_owned();
    let mut det = 1.0f64;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[(col, col)].abs();
        for r in (col + 1)..n {
            let v = a[(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap_rows(piv, col);
            det = -det;
        }
        let pivot = a[(col, col)];
        det *= pivot;
        for r in (col + 1)..n {
            // true division (not multiplication by a reciprocal) keeps the
            // multiplier exact when one row is a power-of-two multiple of
            // another, so dependent Grams collapse to an exactly zero pivot
            let l = a[(r, col)] / pivot;
            if l != 0.0 {
                for c in (col + 1)..n {
                    a[(r, c)] -= l * a[(col, c)];
                }
            }
        }
    }
    det
}

/// Everything the determinant route produces for one (ρ, A_1..A_N, f).
#[derive(Debug, Clone)]
pub struct GramReport {
    pub f: MonotoneFunction,
    /// State dimension n.
    pub dim: usize,
    /// Number of observables N.
    pub n_obs: usize,
    /// Symmetrized covariance Gram matrix.
    pub cov_gram: RMat,
    /// QFI-side Gram matrix (f(0)/2 · QFI inner products of i[ρ, A_h]).
    pub qfi_gram: RMat,
    /// Antisymmetric Robertson matrix Im Tr(ρ A_h A_j).
    pub robertson: RMat,
    pub cov_det: f64,
    pub qfi_det: f64,
    /// Exactly zero for odd N.
    pub robertson_det: f64,
    /// √max(cov_det, 0).
    pub cov_vol: f64,
    /// √max(qfi_det, 0).
    pub qfi_vol: f64,
    /// F(f) = cov_det − qfi_det.
    pub f_det: f64,
    /// True when the centered observables are linearly dependent.
    pub equality_flag: bool,
}

fn volume_from_det(det: f64) -> Result<f64> {
    if det < -DET_NEGATIVE_TOL {
        return Err(Error::NotPositiveSemidefinite(det));
    }
    Ok(det.max(0.0).sqrt())
}

fn robertson_matrix(evals: &[f64], eo: &[EigenbasisObservable]) -> RMat {
    let n_obs = eo.len();
    let n = evals.len();
    let mut rob = RMat::zeros(n_obs, n_obs);
    for h in 0..n_obs {
        for j in (h + 1)..n_obs {
            let (ah, aj) = (eo[h].coeffs(), eo[j].coeffs());
            let mut r = 0.0;
            for k in 0..n {
                for l in 0..n {
                    r += evals[k] * (ah[(k, l)] * aj[(l, k)]).im;
                }
            }
            rob[(h, j)] = r;
            rob[(j, h)] = -r;
        }
    }
    rob
}

fn robertson_det(rob: &RMat) -> f64 {
    // antisymmetric matrices of odd order are singular
    if rob.nrows() % 2 == 1 {
        0.0
    } else {
        det_lu(rob)
    }
}

/// Build the covariance and QFI Gram matrices, their determinants and
/// volumes, the Robertson matrix, and the gap F(f) = det Cov − det QFI.
pub fn build_gram_report(
    f: MonotoneFunction,
    state: &SpectralState,
    obs: &ObservableSet,
) -> Result<GramReport> {
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observables are {}-dimensional, state is {}-dimensional",
            obs.dim(),
            state.dim()
        )));
    }
    let eo = obs.in_eigenbasis(state)?;
    let evals = state.eigenvalues();
    let n = state.dim();
    let n_obs = obs.len();
    let avg = average_table(evals);
    let gaps = gap_table(f, evals)?;

    let mut cov = RMat::zeros(n_obs, n_obs);
    let mut qfi = RMat::zeros(n_obs, n_obs);
    for h in 0..n_obs {
        for j in h..n_obs {
            let (ah, aj) = (eo[h].coeffs(), eo[j].coeffs());
            let mut c = 0.0;
            let mut q = 0.0;
            // accumulate (k,l) together with (l,k) so the entry is bitwise
            // symmetric in (h, j); exact copies of an observable then give
            // exactly proportional Gram rows and an exactly zero pivot
            for k in 0..n {
                let re = (ah[(k, k)] * aj[(k, k)]).re;
                c += avg[(k, k)] * re;
                q += gaps[(k, k)] * re;
                for l in (k + 1)..n {
                    let re = (ah[(k, l)] * aj[(l, k)]).re + (ah[(l, k)] * aj[(k, l)]).re;
                    c += avg[(k, l)] * re;
                    q += gaps[(k, l)] * re;
                }
            }
            cov[(h, j)] = c;
            cov[(j, h)] = c;
            qfi[(h, j)] = q;
            qfi[(j, h)] = q;
        }
    }
    let rob = robertson_matrix(evals, &eo);

    let cov_det = det_lu(&cov);
    let qfi_det = det_lu(&qfi);
    let cov_vol = volume_from_det(cov_det)?;
    let qfi_vol = volume_from_det(qfi_det)?;
    let equality_flag = equality_flag_from_coeffs(n, &eo);

    Ok(GramReport {
        f,
        dim: n,
        n_obs,
        robertson_det: robertson_det(&rob),
        cov_gram: cov,
        qfi_gram: qfi,
        robertson: rob,
        cov_det,
        qfi_det,
        cov_vol,
        qfi_vol,
        f_det: cov_det - qfi_det,
        equality_flag,
    })
}

/// F(f) ≥ −tol·max(1, |det Cov|)?
pub fn check_main_inequality(report: &GramReport, tol: f64) -> bool {
    report.f_det >= -tol * report.cov_det.abs().max(1.0)
}

fn equality_flag_from_coeffs(n: usize, eo: &[EigenbasisObservable]) -> bool {
    let n_obs = eo.len();
    let cols = 2 * n * n;
    if n_obs > cols {
        return true;
    }
    // flatten each centered coefficient matrix into a real row
    let mut stack = RMat::zeros(n_obs, cols);
    for (h, e) in eo.iter().enumerate() {
        for (idx, z) in e.coeffs().iter().enumerate() {
            stack[(h, idx)] = z.re;
            stack[(h, idx + n * n)] = z.im;
        }
    }
    let sv = stack.svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    if smax == 0.0 {
        return true;
    }
    let threshold = smax * (cols as f64) * RANK_RELATIVE_EPS;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    rank < n_obs
}

/// True when the centered observables are linearly dependent over ℝ in
/// the eigenbasis of the state — the equality case of the volume bound.
pub fn check_equality_condition(state: &SpectralState, obs: &ObservableSet) -> Result<bool> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observables are {}-dimensional, state is {}-dimensional",
            obs.dim(),
            state.dim()
        )));
    }
    let eo = obs.in_eigenbasis(state)?;
    Ok(equality_flag_from_coeffs(state.dim(), &eo))
}

/// The antisymmetric matrix R_hj = Im Tr(ρ A_h A_j) (equivalently
/// −(i/2)Tr(ρ[A_h, A_j])) and its determinant, which is the classical
/// Robertson lower bound for det Cov.
pub fn robertson_bound(state: &SpectralState, obs: &ObservableSet) -> Result<(RMat, f64)> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observables are {}-dimensional, state is {}-dimensional",
            obs.dim(),
            state.dim()
        )));
    }
    let eo = obs.in_eigenbasis(state)?;
    let rob = robertson_matrix(state.eigenvalues(), &eo);
    let det = robertson_det(&rob);
    Ok((rob, det))
}

/// Hadamard's inequality det H ≤ ∏_j H_jj for a real symmetric PSD matrix,
/// with slack 1e-10·max(1, |∏ H_jj|).
pub fn hadamard_check(h: &RMat) -> Result<bool> {
    if h.nrows() != h.ncols() || h.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1.0);
    let mut sym_defect = 0.0f64;
    for k in 0..h.nrows() {
        for l in 0..h.ncols() {
            sym_defect = sym_defect.max((h[(k, l)] - h[(l, k)]).abs());
        }
    }
    if sym_defect > 1e-10 * scale {
        return Err(Error::Domain(format!(
            "matrix is not symmetric (defect {sym_defect:.3e})"
        )));
    }
    let min_eig = h
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v));
    if min_eig < -1e-10 * scale {
        return Err(Error::NotPositiveSemidefinite(min_eig));
    }
    let prod: f64 = (0..h.nrows()).map(|j| h[(j, j)]).product();
    Ok(det_lu(h) <= prod + 1e-10 * prod.abs().max(1.0))
}

fn validate_chain_spectrum(lambdas: &[f64]) -> Result<()> {
    let n = lambdas.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parameter(format!(
            "chain construction needs an even dimension ≥ 2, got {n}"
        )));
    }
    if lambdas[0] <= 0.0 {
        return Err(Error::Parameter(format!(
            "chain spectrum must be positive, got λ_1 = {}",
            lambdas[0]
        )));
    }
    for w in lambdas.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Parameter(
                "chain spectrum must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// The spin-chain configuration where the standard Robertson bound beats
/// every QFI volume: ρ = diag(λ) with λ strictly increasing, and for each
/// index pair (2j−1, 2j) one σy-like and one σx-like observable supported
/// on that pair. The Gram matrices are diagonal with entries twice the
/// tilde-mean gap, while det R = ∏_j (λ_{2j} − λ_{2j−1})².
pub fn pauli_chain_counterexample(
    lambdas: &[f64],
) -> Result<(SpectralState, ObservableSet)> {
    validate_chain_spectrum(lambdas)?;
    let n = lambdas.len();
    let state = SpectralState::from_diagonal(lambdas)?;
    let mut mats = Vec::with_capacity(n);
    for j in 0..n / 2 {
        let (a, b) = (2 * j, 2 * j + 1);
        let mut my = CMat::zeros(n, n);
        my[(a, b)] = C64::new(0.0, 1.0);
        my[(b, a)] = C64::new(0.0, -1.0);
        mats.push(my);
        let mut mx = CMat::zeros(n, n);
        mx[(a, b)] = C64::new(1.0, 0.0);
        mx[(b, a)] = C64::new(1.0, 0.0);
        mats.push(mx);
    }
    Ok((state, ObservableSet::new(mats)?))
}

/// Closed forms for the chain: the N skew informations (2 × gap per pair
/// member) and the Robertson determinant ∏_j (λ_{2j} − λ_{2j−1})².
pub fn pauli_chain_reference(
    f: MonotoneFunction,
    lambdas: &[f64],
) -> Result<(Vec<f64>, f64)> {
    validate_chain_spectrum(lambdas)?;
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    let mut skews = Vec::with_capacity(lambdas.len());
    let mut rob_det = 1.0;
    for j in 0..lambdas.len() / 2 {
        let (a, b) = (lambdas[2 * j], lambdas[2 * j + 1]);
        let skew = 2.0 * crate::spectral::tilde_mean_gap(f, a, b)?;
        skews.push(skew);
        skews.push(skew);
        let d = b - a;
        rob_det *= d * d;
    }
    Ok((skews, rob_det))
}

/// A seeded family where all Robertson brackets vanish identically while
/// the QFI volume stays bounded away from zero: real symmetric hollow
/// observables (mixed combinations of E_kl + E_lk) against a real diagonal
/// state with well-separated spectrum. Every Tr(ρ A_h A_j) is real, so the
/// Robertson matrix is exactly zero, but the observables stay linearly
/// independent.
pub fn commuting_counterexample(
    dim: usize,
    n_obs: usize,
    seed: u64,
) -> Result<(SpectralState, ObservableSet)> {
    if dim < 2 {
        return Err(Error::Parameter(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    let max_obs = dim * (dim - 1) / 2;
    if n_obs == 0 || n_obs > max_obs {
        return Err(Error::Parameter(format!(
            "need 1 ≤ N ≤ n(n−1)/2 = {max_obs} hollow directions, got N = {n_obs}"
        )));
    }
    if n_obs > crate::metric::MAX_OBSERVABLES {
        return Err(Error::Parameter(format!(
            "at most {} observables are supported, got {n_obs}",
            crate::metric::MAX_OBSERVABLES
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // strictly increasing, well separated: λ_i ∝ i + 1 + U(0, 0.4)
    let raw: Vec<f64> = (0..dim)
        .map(|i| (i + 1) as f64 + rng.random_range(0.0..0.4))
        .collect();
    let total: f64 = raw.iter().sum();
    let lambdas: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let state = SpectralState::from_diagonal(&lambdas)?;

    let mut pairs = Vec::with_capacity(max_obs);
    for k in 0..dim {
        for l in (k + 1)..dim {
            pairs.push((k, l));
        }
    }

    let basis_mat = |&(k, l): &(usize, usize)| {
        let mut b = CMat::zeros(dim, dim);
        b[(k, l)] = C64::new(1.0, 0.0);
        b[(l, k)] = C64::new(1.0, 0.0);
        b
    };

    let mut mats: Vec<CMat> = Vec::with_capacity(n_obs);
    for h in 0..n_obs {
        let mut a = basis_mat(&pairs[h]);
        for j in 0..h {
            let c = rng.random_range(-0.5..0.5);
            let b = basis_mat(&pairs[j]);
            a += b.map(|z| z * c);
        }
        mats.push(a);
    }
    Ok((state, ObservableSet::new(mats)?))
}
