//! Spectral decomposition of states and Kubo–Ando mean superoperators.
//!
//! A [`SpectralState`] stores ρ = U Λ U† with eigenvalues sorted in
//! descending order. All mean superoperators act *entrywise* on matrices
//! already expressed in the eigenbasis of ρ: m_f(L_ρ, R_ρ) multiplies the
//! (k, l) coefficient by the scalar mean m_f(λ_k, λ_l).

use crate::monotone::MonotoneFunction;
use crate::{CMat, C64, Error, RMat, Result};

/// Max-entry hermiticity defect accepted when decomposing a matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Accepted deviation of the trace from one for density-matrix input.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in [-EIGENVALUE_CLAMP, 0) are clamped to zero; anything
/// below is rejected as not positive semidefinite.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;
/// Accepted reconstruction error ‖UΛU† − H‖_max (relative to max(1, ‖H‖_max)).
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// A state is flagged faithful when its smallest eigenvalue exceeds this.
pub const DEFAULT_FAITHFUL_FLOOR: f64 = 1e-12;

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..m.nrows() {
        for l in 0..m.ncols() {
            worst = worst.max((m[(k, l)] - m[(l, k)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition ρ = U Λ U† of a positive semidefinite matrix,
/// eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SpectralState {
    eigenvalues: Vec<f64>,
    basis: CMat,
    faithful: bool,
}

impl SpectralState {
    /// Decompose a self-adjoint PSD matrix. With `trace_one` the trace must
    /// equal one within [`TRACE_TOL`] (density-matrix input).
    pub fn decompose(h: &CMat, trace_one: bool) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a nonempty square matrix, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let defect = hermiticity_defect(h);
        if defect > HERMITICITY_TOL {
            return Err(Error::NotSelfAdjoint(defect));
        }
        if trace_one {
            let tr = h.trace();
            if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
                return Err(Error::TraceNotOne(tr.re));
            }
        }
        let n = h.nrows();
        let sym = CMat::from_fn(n, n, |k, l| (h[(k, l)] + h[(l, k)].conj()) * 0.5);
        let eig = sym.clone().symmetric_eigen();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let basis = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

        for lam in eigenvalues.iter_mut() {
            if *lam < 0.0 {
                if *lam < -EIGENVALUE_CLAMP {
                    return Err(Error::NotPositiveSemidefinite(*lam));
                }
                *lam = 0.0;
            }
        }

        let state = Self::assemble(eigenvalues, basis)?;
        let recon_scale = 1.0f64.max(max_abs(&sym));
        let recon = max_abs(&(state.density() - &sym));
        if recon > RECONSTRUCTION_TOL * recon_scale {
            return Err(Error::Domain(format!(
                "eigendecomposition failed to reconstruct input (defect {recon:.3e})"
            )));
        }
        Ok(state)
    }

    /// Exact constructor for an already-diagonal state: the basis is the
    /// sorting permutation, so `density()` reproduces `diag` bit for bit.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty diagonal".into()));
        }
        let mut entries = diag.to_vec();
        for lam in entries.iter_mut() {
            if *lam < 0.0 {
                if *lam < -EIGENVALUE_CLAMP {
                    return Err(Error::NotPositiveSemidefinite(*lam));
                }
                *lam = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(sum));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| entries[b].total_cmp(&entries[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| entries[i]).collect();
        let mut basis = CMat::zeros(n, n);
        for (col, &orig) in order.iter().enumerate() {
            basis[(orig, col)] = C64::new(1.0, 0.0);
        }
        Self::assemble(eigenvalues, basis)
    }

    /// Build a state from explicit spectral data. `eigenvalues` must be
    /// sorted descending, nonnegative, and sum to one; `basis` must be
    /// unitary. Intended for constructions where eigenvalues are known
    /// exactly (pure states, frozen spectra).
    pub fn from_parts(eigenvalues: Vec<f64>, basis: CMat) -> Result<Self> {
        let sum: f64 = eigenvalues.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(sum));
        }
        Self::assemble(eigenvalues, basis)
    }

    fn assemble(eigenvalues: Vec<f64>, basis: CMat) -> Result<Self> {
        let n = eigenvalues.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis is {}x{}, expected {n}x{n}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        for w in eigenvalues.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Domain("eigenvalues not sorted descending".into()));
            }
        }
        if let Some(&min) = eigenvalues.last() {
            if min < 0.0 {
                return Err(Error::NotPositiveSemidefinite(min));
            }
        }
        let gram = basis.adjoint() * &basis;
        let unit_defect = max_abs(&(gram - CMat::identity(n, n)));
        if unit_defect > RECONSTRUCTION_TOL {
            return Err(Error::Domain(format!(
                "basis is not unitary (defect {unit_defect:.3e})"
            )));
        }
        let faithful = eigenvalues[n - 1] > DEFAULT_FAITHFUL_FLOOR;
        Ok(Self {
            eigenvalues,
            basis,
            faithful,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors, in eigenvalue order.
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// True when every eigenvalue exceeds [`DEFAULT_FAITHFUL_FLOOR`].
    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn require_faithful(&self) -> Result<()> {
        if self.faithful {
            Ok(())
        } else {
            Err(Error::NotFaithful(self.min_eigenvalue()))
        }
    }

    /// ρ as a dense matrix, U Λ U†.
    pub fn density(&self) -> CMat {
        let n = self.dim();
        let lam = CMat::from_fn(n, n, |k, l| {
            if k == l {
                C64::new(self.eigenvalues[k], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.basis * lam * self.basis.adjoint()
    }

    /// U† A U: express `a` in the eigenbasis of the state.
    pub fn to_eigenbasis(&self, a: &CMat) -> Result<CMat> {
        self.check_dim(a)?;
        Ok(self.basis.adjoint() * a * &self.basis)
    }

    /// U X U†: map eigenbasis coefficients back to the original basis.
    pub fn from_eigenbasis(&self, x: &CMat) -> Result<CMat> {
        self.check_dim(x)?;
        Ok(&self.basis * x * self.basis.adjoint())
    }

    fn check_dim(&self, m: &CMat) -> Result<()> {
        let n = self.dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, state dimension is {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }
}

/// Kubo–Ando mean m_f(x, y) = y f(x/y), evaluated in the normal form
/// M · f(m/M) with m = min, M = max so the argument stays in (0, 1].
/// With `use_tilde` the transformed function f̃ is used instead; f̃ extends
/// continuously by zero when either argument vanishes.
pub fn scalar_mean(f: MonotoneFunction, x: f64, y: f64, use_tilde: bool) -> Result<f64> {
    check_mean_arg(x)?;
    check_mean_arg(y)?;
    if use_tilde && !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    if x == y {
        return Ok(x);
    }
    if x == 0.0 || y == 0.0 {
        if use_tilde {
            return Ok(0.0);
        }
        return Err(Error::ZeroMeanArgument { x, y });
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let phi = if use_tilde {
        f.eval_tilde(lo / hi)?
    } else {
        f.eval(lo / hi)?
    };
    Ok(hi * phi)
}

fn check_mean_arg(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!(
            "mean arguments must be finite and nonnegative, got {v}"
        )));
    }
    Ok(())
}

/// The gap (x + y)/2 − m_f̃(x, y), written per family so that nearby
/// arguments do not cancel. For every regular f in the catalog the gap
/// admits a product form:
///
/// - SLD:  (x − y)² / (2(x + y))
/// - WY:   d²/2 with d = (x − y)/(√x + √y)
/// - WYD:  (x^β − y^β)(x^{1−β} − y^{1−β}) / 2, via expm1 on log ratios
pub fn tilde_mean_gap(f: MonotoneFunction, x: f64, y: f64) -> Result<f64> {
    check_mean_arg(x)?;
    check_mean_arg(y)?;
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    if x == y {
        return Ok(0.0);
    }
    if x == 0.0 || y == 0.0 {
        return Ok(0.5 * (x + y));
    }
    match f {
        MonotoneFunction::Sld => {
            let d = x - y;
            Ok(d * d / (2.0 * (x + y)))
        }
        MonotoneFunction::Wy => {
            let d = (x - y) / (x.sqrt() + y.sqrt());
            Ok(0.5 * d * d)
        }
        MonotoneFunction::Wyd { beta } => {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            // ln_1p on the exact difference keeps l fully accurate when
            // lo ≈ hi (ln(lo/hi) would lose ~ε/|l| relative digits there);
            // for separated arguments the plain log of the ratio is the
            // accurate form, since ln_1p near −1 amplifies the rounding
            // of the quotient by hi/lo.
            let r = (lo - hi) / hi;
            let l = if r > -0.5 { r.ln_1p() } else { (lo / hi).ln() };
            Ok(0.5 * hi * (beta * l).exp_m1() * ((1.0 - beta) * l).exp_m1())
        }
        MonotoneFunction::Rld => unreachable!("RLD is not regular"),
    }
}

/// Table of scalar means m(λ_k, λ_l) over a spectrum.
pub(crate) fn mean_table(f: MonotoneFunction, evals: &[f64], use_tilde: bool) -> Result<RMat> {
    let n = evals.len();
    let mut t = RMat::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            let m = scalar_mean(f, evals[k], evals[l], use_tilde)?;
            t[(k, l)] = m;
            t[(l, k)] = m;
        }
    }
    Ok(t)
}

/// Table of gaps (λ_k + λ_l)/2 − m̃(λ_k, λ_l) over a spectrum.
pub(crate) fn gap_table(f: MonotoneFunction, evals: &[f64]) -> Result<RMat> {
    let n = evals.len();
    let mut t = RMat::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            let g = tilde_mean_gap(f, evals[k], evals[l])?;
            t[(k, l)] = g;
            t[(l, k)] = g;
        }
    }
    Ok(t)
}

/// Table of arithmetic means (λ_k + λ_l)/2 over a spectrum.
pub(crate) fn average_table(evals: &[f64]) -> RMat {
    let n = evals.len();
    RMat::from_fn(n, n, |k, l| 0.5 * (evals[k] + evals[l]))
}

/// Apply m_f(L_ρ, R_ρ) to `x`, which must already be expressed in the
/// eigenbasis of `state`: the (k, l) entry is multiplied by m(λ_k, λ_l).
pub fn mean_superop_apply(
    f: MonotoneFunction,
    state: &SpectralState,
    x: &CMat,
    use_tilde: bool,
) -> Result<CMat> {
    let n = state.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, state dimension is {n}",
            x.nrows(),
            x.ncols()
        )));
    }
    if !use_tilde {
        state.require_faithful()?;
    }
    let t = mean_table(f, state.eigenvalues(), use_tilde)?;
    Ok(CMat::from_fn(n, n, |k, l| x[(k, l)] * t[(k, l)]))
}

/// Apply the inverse m_f(L_ρ, R_ρ)⁻¹ to `x` (eigenbasis coefficients):
/// the (k, l) entry is divided by m(λ_k, λ_l). Requires a faithful state.
pub fn mean_superop_solve(
    f: MonotoneFunction,
    state: &SpectralState,
    x: &CMat,
    use_tilde: bool,
) -> Result<CMat> {
    let n = state.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, state dimension is {n}",
            x.nrows(),
            x.ncols()
        )));
    }
    state.require_faithful()?;
    let t = mean_table(f, state.eigenvalues(), use_tilde)?;
    Ok(CMat::from_fn(n, n, |k, l| x[(k, l)] / t[(k, l)]))
}
