//! Independent combinatorial evaluation of F(f), used as an oracle for
//! the determinant route.
//!
//! F(f) = (1/N!) Σ_{α,β ∈ 𝒞} H_f(λ_α, λ_β) · K(α, β) where 𝒞 is the set
//! of multi-indices of length N over {1..n}, H is a product gap of scalar
//! means, and K is a sum of squared determinants of re/im coefficient
//! slices. The enumeration cost is n^{2N}·N!·2^N, so a budget guard keeps
//! the routine at genuinely small sizes.

use itertools::Itertools;

use crate::metric::{EigenbasisObservable, ObservableSet};
use crate::monotone::MonotoneFunction;
use crate::spectral::{tilde_mean_gap, SpectralState};
use crate::volume::det_lu;
use crate::{C64, Error, RMat, Result};

/// Compensated (Kahan) accumulator for the long alternating sums.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumeration caps for the brute-force route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_dim: usize,
    pub max_obs: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_dim: 3,
            max_obs: 3,
        }
    }
}

impl OracleBudget {
    /// Alternative cap trading dimension for observable count.
    pub fn wide() -> Self {
        Self {
            max_dim: 4,
            max_obs: 2,
        }
    }

    /// Total work of the enumeration: n^{2N} · N! · 2^N.
    pub fn terms(dim: usize, n_obs: usize) -> u128 {
        (dim as u128).pow(2 * n_obs as u32) * factorial(n_obs) * (1u128 << n_obs)
    }

    pub fn admit(&self, dim: usize, n_obs: usize) -> Result<()> {
        if dim > self.max_dim || n_obs > self.max_obs {
            return Err(Error::BudgetExceeded {
                n: dim,
                n_obs,
                terms: Self::terms(dim, n_obs),
                max_n: self.max_dim,
                max_obs: self.max_obs,
            });
        }
        Ok(())
    }
}

/// A length-N tuple of eigenvalue indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, j: usize) -> usize {
        self.0[j]
    }

    /// The eigenvalue tuple λ_α.
    pub fn select(&self, values: &[f64]) -> Vec<f64> {
        self.0.iter().map(|&i| values[i]).collect()
    }
}

/// All n^len multi-indices in lexicographic order.
pub fn multi_indices(n: usize, len: usize) -> Vec<MultiIndex> {
    assert!(n >= 1 && len >= 1, "multi-index enumeration needs n, len ≥ 1");
    (0..len)
        .map(|_| 0..n)
        .multi_cartesian_product()
        .map(MultiIndex)
        .collect()
}

/// A choice of real or imaginary part per position: bit j = 0 selects
/// Re, bit j = 1 selects Im.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReImSelector {
    bits: u32,
    len: usize,
}

impl ReImSelector {
    pub fn all(len: usize) -> Vec<Self> {
        assert!(len >= 1 && len <= 32);
        (0..(1u32 << len)).map(|bits| Self { bits, len }).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// C⁰ = Re, C¹ = Im at position j.
    pub fn component(&self, j: usize, z: C64) -> f64 {
        if (self.bits >> j) & 1 == 0 {
            z.re
        } else {
            z.im
        }
    }
}

/// H_f(x, y) = ∏_j (x_j + y_j)/2 − ∏_j ((x_j + y_j)/2 − m̃(x_j, y_j)).
/// Entries must be strictly positive.
pub fn h_value(f: MonotoneFunction, xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "tuple lengths {} and {} must match and be nonzero",
            xs.len(),
            ys.len()
        )));
    }
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    let mut avg_prod = 1.0;
    let mut gap_prod = 1.0;
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x.is_finite() && y.is_finite()) || x <= 0.0 || y <= 0.0 {
            return Err(Error::Domain(format!(
                "H requires strictly positive entries, got ({x}, {y})"
            )));
        }
        avg_prod *= 0.5 * (x + y);
        gap_prod *= tilde_mean_gap(f, x, y)?;
    }
    Ok(avg_prod - gap_prod)
}

/// det of the N×N real slice D^{u}_{hj} = C^{u(j)}(𝒜^h_{α_j β_j}).
pub fn d_determinant(
    u: &ReImSelector,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    coeffs: &[EigenbasisObservable],
) -> Result<f64> {
    let n_obs = coeffs.len();
    if alpha.len() != n_obs || beta.len() != n_obs || u.len() != n_obs || n_obs == 0 {
        return Err(Error::DimensionMismatch(format!(
            "selector/index lengths must equal the number of observables ({n_obs})"
        )));
    }
    let m = RMat::from_fn(n_obs, n_obs, |h, j| {
        u.component(j, coeffs[h].coeffs()[(alpha.at(j), beta.at(j))])
    });
    Ok(det_lu(&m))
}

/// K(α, β) = Σ_{u ∈ {0,1}^N} det(D^u)², the production route.
pub fn k_value(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    coeffs: &[EigenbasisObservable],
) -> Result<f64> {
    let mut acc = 0.0;
    for u in ReImSelector::all(coeffs.len()) {
        let d = d_determinant(&u, alpha, beta, coeffs)?;
        acc += d * d;
    }
    #[cfg(debug_assertions)]
    {
        let perm = k_value_permutation_route(alpha, beta, coeffs)?;
        debug_assert!(
            (acc - perm).abs() <= 1e-10 * acc.abs().max(perm.abs()).max(1.0),
            "K route mismatch: {acc} vs {perm}"
        );
    }
    Ok(acc)
}

/// The same K as a sum over permutations of determinants of paired
/// coefficient products: Σ_σ det ℬ^σ with
/// ℬ^σ_{hj} = Re(𝒜^h_{α_{σ(h)} β_{σ(h)}} · 𝒜^j_{β_{σ(h)} α_{σ(h)}}).
pub fn k_value_permutation_route(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    coeffs: &[EigenbasisObservable],
) -> Result<f64> {
    let n_obs = coeffs.len();
    if alpha.len() != n_obs || beta.len() != n_obs || n_obs == 0 {
        return Err(Error::DimensionMismatch(format!(
            "index lengths must equal the number of observables ({n_obs})"
        )));
    }
    let mut acc = KahanSum::default();
    for sigma in (0..n_obs).permutations(n_obs) {
        let m = RMat::from_fn(n_obs, n_obs, |h, j| {
            let (a, b) = (alpha.at(sigma[h]), beta.at(sigma[h]));
            (coeffs[h].coeffs()[(a, b)] * coeffs[j].coeffs()[(b, a)]).re
        });
        acc.add(det_lu(&m));
    }
    Ok(acc.value())
}

/// Cross-check data from a full enumeration with both K routes.
#[derive(Debug, Clone, Copy)]
pub struct OracleOutcome {
    pub value: f64,
    /// max over (α, β) of |K_sq − K_perm| / max(1, |K|).
    pub max_k_route_dev: f64,
    /// smallest K encountered (should stay ≥ −1e-12; it is a sum of squares).
    pub min_k: f64,
}

fn bruteforce_impl(
    f: MonotoneFunction,
    state: &SpectralState,
    obs: &ObservableSet,
    budget: &OracleBudget,
    check_routes: bool,
) -> Result<OracleOutcome> {
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
    if state.min_eigenvalue() <= 0.0 {
        return Err(Error::NotFaithful(state.min_eigenvalue()));
    }
    let n = state.dim();
    let n_obs = obs.len();
    budget.admit(n, n_obs)?;

    let eo = obs.in_eigenbasis(state)?;
    let evals = state.eigenvalues();
    let indices = multi_indices(n, n_obs);

    let mut acc = KahanSum::default();
    let mut max_dev = 0.0f64;
    let mut min_k = f64::INFINITY;
    for alpha in &indices {
        let xs = alpha.select(evals);
        for beta in &indices {
            let ys = beta.select(evals);
            let h = h_value(f, &xs, &ys)?;
            let k = k_value(alpha, beta, &eo)?;
            min_k = min_k.min(k);
            if check_routes {
                let perm = k_value_permutation_route(alpha, beta, &eo)?;
                let dev = (k - perm).abs() / k.abs().max(perm.abs()).max(1.0);
                max_dev = max_dev.max(dev);
            }
            acc.add(h * k);
        }
    }
    Ok(OracleOutcome {
        value: acc.value() / factorial(n_obs) as f64,
        max_k_route_dev: max_dev,
        min_k,
    })
}

/// Brute-force F(f) under the default budget (n ≤ 3, N ≤ 3).
pub fn f_bruteforce(
    f: MonotoneFunction,
    state: &SpectralState,
    obs: &ObservableSet,
) -> Result<f64> {
    Ok(bruteforce_impl(f, state, obs, &OracleBudget::default(), false)?.value)
}

pub fn f_bruteforce_with_budget(
    f: MonotoneFunction,
    state: &SpectralState,
    obs: &ObservableSet,
    budget: &OracleBudget,
) -> Result<f64> {
    Ok(bruteforce_impl(f, state, obs, budget, false)?.value)
}

/// Brute-force F(f) evaluating K by both routes on every (α, β).
pub fn f_bruteforce_checked(
    f: MonotoneFunction,
    state: &SpectralState,
    obs: &ObservableSet,
    budget: &OracleBudget,
) -> Result<OracleOutcome> {
    bruteforce_impl(f, state, obs, budget, true)
}

/// The exchange identity ∏_{j≤N} (Σ_{k≤n} Q_{jk}) = Σ_{u ∈ {1..n}^N} ∏_j Q_{j u(j)},
/// checked within 1e-12·max(1, |lhs|, |rhs|) on an N×n table.
pub fn product_sum_exchange_check(values: &RMat) -> Result<bool> {
    let (n_rows, n_cols) = (values.nrows(), values.ncols());
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::DimensionMismatch("empty table".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("table entries must be finite".into()));
    }
    if (n_cols as f64).powi(n_rows as i32) > 1e8 {
        return Err(Error::Parameter(format!(
            "exchange enumeration too large: {n_cols}^{n_rows} terms"
        )));
    }
    let mut lhs = 1.0;
    for j in 0..n_rows {
        let row_sum: f64 = (0..n_cols).map(|k| values[(j, k)]).sum();
        lhs *= row_sum;
    }
    let mut rhs = KahanSum::default();
    for u in (0..n_rows).map(|_| 0..n_cols).multi_cartesian_product() {
        let mut prod = 1.0;
        for (j, &k) in u.iter().enumerate() {
            prod *= values[(j, k)];
        }
        rhs.add(prod);
    }
    let rhs = rhs.value();
    Ok((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0))
}

fn permutation_sign(sigma: &[usize]) -> Result<f64> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::Parameter(format!(
                "{sigma:?} is not a permutation of 0..{n}"
            )));
        }
        seen[s] = true;
    }
    let mut inversions = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if sigma[i] > sigma[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// det(M with rows permuted by σ) = sgn(σ) · det(M), within
/// 1e-12·max(1, |det M|).
pub fn row_permutation_sign_check(m: &RMat, sigma: &[usize]) -> Result<bool> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if sigma.len() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "permutation length {} does not match matrix order {}",
            sigma.len(),
            m.nrows()
        )));
    }
    let sign = permutation_sign(sigma)?;
    let permuted = RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(sigma[i], j)]);
    let base = det_lu(m);
    Ok((det_lu(&permuted) - sign * base).abs() <= 1e-12 * base.abs().max(1.0))
}
