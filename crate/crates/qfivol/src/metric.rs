//! Covariance, QFI inner products, and metric-adjusted skew information.

use crate::monotone::MonotoneFunction;
use crate::spectral::{hermiticity_defect, mean_superop_apply, mean_table, SpectralState};
use crate::spectral::{gap_table, HERMITICITY_TOL};
use crate::{CMat, C64, Error, Result};

/// Imaginary parts below this are numerical residue and silently dropped
/// when a quantity is real by symmetry; anything larger is an error.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Hard cap on the number of observables handled at once.
pub const MAX_OBSERVABLES: usize = 8;

fn real_part_checked(z: C64) -> Result<f64> {
    if z.im.abs() <= IMAG_RESIDUE_TOL {
        Ok(z.re)
    } else {
        Err(Error::ImaginaryResidue(z.im))
    }
}

pub(crate) fn require_self_adjoint(m: &CMat) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_TOL {
        return Err(Error::NotSelfAdjoint(defect));
    }
    Ok(())
}

fn check_dims(state: &SpectralState, m: &CMat) -> Result<()> {
    if m.nrows() != state.dim() || m.ncols() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable is {}x{}, state dimension is {}",
            m.nrows(),
            m.ncols(),
            state.dim()
        )));
    }
    Ok(())
}

/// A − Tr(ρA)·I in the original basis.
pub fn center(state: &SpectralState, a: &CMat) -> Result<CMat> {
    check_dims(state, a)?;
    require_self_adjoint(a)?;
    let mean = real_part_checked((state.density() * a).trace())?;
    let n = state.dim();
    let mut out = a.clone();
    for k in 0..n {
        out[(k, k)] -= C64::new(mean, 0.0);
    }
    Ok(out)
}

/// Centered eigenbasis coefficients of an observable:
/// 𝒜 = U†AU − Tr(ρA)·I, together with the subtracted mean.
#[derive(Debug, Clone)]
pub struct EigenbasisObservable {
    coeffs: CMat,
    trace_mean: f64,
}

impl EigenbasisObservable {
    pub fn new(state: &SpectralState, a: &CMat) -> Result<Self> {
        check_dims(state, a)?;
        require_self_adjoint(a)?;
        let hat = state.to_eigenbasis(a)?;
        let mut tr = C64::new(0.0, 0.0);
        for (k, lam) in state.eigenvalues().iter().enumerate() {
            tr += hat[(k, k)] * *lam;
        }
        let trace_mean = real_part_checked(tr)?;
        let n = state.dim();
        let mut coeffs = hat;
        for k in 0..n {
            coeffs[(k, k)] -= C64::new(trace_mean, 0.0);
        }
        Ok(Self { coeffs, trace_mean })
    }

    pub fn coeffs(&self) -> &CMat {
        &self.coeffs
    }

    pub fn trace_mean(&self) -> f64 {
        self.trace_mean
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }
}

/// An ordered list of self-adjoint observables on a common space.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    matrices: Vec<CMat>,
    dim: usize,
}

impl ObservableSet {
    pub fn new(matrices: Vec<CMat>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Parameter("observable set is empty".into()));
        }
        if matrices.len() > MAX_OBSERVABLES {
            return Err(Error::Parameter(format!(
                "at most {MAX_OBSERVABLES} observables are supported, got {}",
                matrices.len()
            )));
        }
        let dim = matrices[0].nrows();
        for (h, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "observable {h} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            require_self_adjoint(m)?;
        }
        Ok(Self { matrices, dim })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, h: usize) -> &CMat {
        &self.matrices[h]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMat> {
        self.matrices.iter()
    }

    pub fn in_eigenbasis(&self, state: &SpectralState) -> Result<Vec<EigenbasisObservable>> {
        self.matrices
            .iter()
            .map(|a| EigenbasisObservable::new(state, a))
            .collect()
    }
}

/// Symmetrized covariance ½Tr(ρ(AB + BA)) − Tr(ρA)Tr(ρB), evaluated by
/// the defining traces.
pub fn covariance(state: &SpectralState, a: &CMat, b: &CMat) -> Result<f64> {
    check_dims(state, a)?;
    check_dims(state, b)?;
    require_self_adjoint(a)?;
    require_self_adjoint(b)?;
    let rho = state.density();
    let sym = ((a * b) + (b * a)).map(|z| z * 0.5);
    let second = real_part_checked((&rho * sym).trace())?;
    let mean_a = real_part_checked((&rho * a).trace())?;
    let mean_b = real_part_checked((rho * b).trace())?;
    Ok(second - mean_a * mean_b)
}

/// i(ρA − Aρ); self-adjoint whenever A is.
pub fn commutator_i(state: &SpectralState, a: &CMat) -> Result<CMat> {
    check_dims(state, a)?;
    require_self_adjoint(a)?;
    let rho = state.density();
    let comm = &rho * a - a * rho;
    Ok(comm.map(|z| C64::new(-z.im, z.re)))
}

/// QFI inner product ⟨X, Y⟩_{ρ,f} = Tr(X · m_f(L_ρ, R_ρ)⁻¹(Y)) =
/// Σ_{kl} conj(X̂_kl) Ŷ_kl / m_f(λ_k, λ_l). Requires a regular f and a
/// faithful state; X and Y must be self-adjoint.
pub fn qfi_inner(
    f: MonotoneFunction,
    state: &SpectralState,
    x: &CMat,
    y: &CMat,
) -> Result<f64> {
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    check_dims(state, x)?;
    check_dims(state, y)?;
    require_self_adjoint(x)?;
    require_self_adjoint(y)?;
    state.require_faithful()?;
    let xh = state.to_eigenbasis(x)?;
    let yh = state.to_eigenbasis(y)?;
    let t = mean_table(f, state.eigenvalues(), false)?;
    let n = state.dim();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            acc += xh[(k, l)].conj() * yh[(k, l)] / t[(k, l)];
        }
    }
    real_part_checked(acc)
}

/// Metric-adjusted skew information
/// I_ρ^f(A) = (f(0)/2)⟨i[ρ,A], i[ρ,A]⟩_{ρ,f}, evaluated through the gap
/// form Σ_{kl} ((λ_k + λ_l)/2 − m̃(λ_k, λ_l)) |𝒜_kl|², which extends
/// continuously to non-faithful states and is nonnegative term by term.
pub fn skew_information(f: MonotoneFunction, state: &SpectralState, a: &CMat) -> Result<f64> {
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    let ea = EigenbasisObservable::new(state, a)?;
    let gaps = gap_table(f, state.eigenvalues())?;
    let n = state.dim();
    let mut acc = 0.0;
    for k in 0..n {
        for l in 0..n {
            acc += gaps[(k, l)] * ea.coeffs()[(k, l)].norm_sqr();
        }
    }
    Ok(acc)
}

/// Absolute defect of the pairing identity
/// (f(0)/2)⟨i[ρ,A], i[ρ,B]⟩_{ρ,f} = Cov_ρ(A, B) − Tr(m_f̃(L_ρ, R_ρ)(A₀) B₀)
/// with A₀, B₀ the centered observables.
pub fn pairing_residual(
    f: MonotoneFunction,
    state: &SpectralState,
    a: &CMat,
    b: &CMat,
) -> Result<f64> {
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    state.require_faithful()?;
    let ca = commutator_i(state, a)?;
    let cb = commutator_i(state, b)?;
    let lhs = 0.5 * f.at_zero() * qfi_inner(f, state, &ca, &cb)?;

    let cov = covariance(state, a, b)?;
    let ea = EigenbasisObservable::new(state, a)?;
    let eb = EigenbasisObservable::new(state, b)?;
    let smoothed = mean_superop_apply(f, state, ea.coeffs(), true)?;
    let n = state.dim();
    let mut tr = C64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            tr += smoothed[(k, l)] * eb.coeffs()[(l, k)];
        }
    }
    let cross = real_part_checked(tr)?;
    Ok((lhs - (cov - cross)).abs())
}
