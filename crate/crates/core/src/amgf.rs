//! The averaged moment generating function.
//!
//! For a random vector `X` and `ℓ` uniform on the unit sphere, the AMGF
//! `Φ_X(λ) = E[e^{λ⟨ℓ,X⟩}]` depends on `X` only through `z = λ‖X‖`, via
//! the sphere average `φ_n(z) = E_ℓ[e^{z⟨ℓ,η⟩}]` (any unit `η`).  This
//! module evaluates `log φ_n` exactly (to quadrature tolerance), provides
//! its exponential-growth lower bounds in `ε`-parameterized form, and
//! estimates the vector and matrix sphere averages by seeded Monte Carlo
//! as an independent check.
//!
//! `log φ_n` is reconstructed from the derivative identity
//! `(log φ_n)'(z) = I_{n/2}(z)/I_{n/2−1}(z)`: the Bessel ratio is bounded
//! in `[0, 1)`, so integrating it from `0` cannot overflow at any `z`,
//! unlike the `Γ`/`I_ν` closed form.

use crate::error::{Error, Result};
use crate::logmean::{log_mean_with_se, tree_reduce, ExponentAccumulator};
use crate::matrix::Matrix;
use crate::quad::adaptive_simpson;
use crate::rng::{chunk_layout, chunk_rng, unit_sphere};
use crate::specfun::{bessel_ratio, BesselOrder};

/// Default relative tolerance of the `log φ_n` quadrature; comfortably
/// inside the `1e-9` accuracy contract.
pub const LOG_PHI_REL_TOL: f64 = 1e-11;

/// Below this `z`, `log φ_n(z) = z²/(2n)` to well past double precision.
const SMALL_Z_CUTOFF: f64 = 1e-8;

/// Evaluation request for `φ_n(z)`: ambient dimension and `z = ‖λX‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiQuery {
    pub n: u32,
    pub z: f64,
}

impl PhiQuery {
    pub fn new(n: u32, z: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be >= 1".to_string()));
        }
        if !z.is_finite() || z < 0.0 {
            return Err(Error::domain(format!("phi argument z = {z} must be finite and >= 0")));
        }
        Ok(PhiQuery { n, z })
    }
}

/// Which evaluation path produced a [`LogPhiResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMethod {
    /// `n = 1`: `log cosh z` in its overflow-free form.
    ClosedFormHyperbolic,
    /// `n ≥ 2`: adaptive quadrature of the Bessel ratio.
    RatioQuadrature,
    /// Leading series term for very small `z`.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPhiResult {
    /// `log φ_n(z) ≥ 0`.
    pub log_value: f64,
    pub method: PhiMethod,
}

/// `log φ_n(z)` at the default tolerance ([`LOG_PHI_REL_TOL`]).
pub fn log_phi(q: PhiQuery) -> Result<LogPhiResult> {
    log_phi_with_tol(q, LOG_PHI_REL_TOL)
}

/// `log φ_n(z)` with an explicit relative quadrature tolerance.
pub fn log_phi_with_tol(q: PhiQuery, rel_tol: f64) -> Result<LogPhiResult> {
    let q = PhiQuery::new(q.n, q.z)?;
    let tol_ok = rel_tol.is_finite() && rel_tol > 0.0;
    if !tol_ok {
        return Err(Error::domain(format!("relative tolerance {rel_tol} must be positive")));
    }
    if q.n == 1 {
        // log cosh z = z + log(1 + e^{−2z}) − log 2.
        let log_value = q.z + (-2.0 * q.z).exp().ln_1p() - std::f64::consts::LN_2;
        return Ok(LogPhiResult { log_value: log_value.max(0.0), method: PhiMethod::ClosedFormHyperbolic });
    }
    if q.z <= SMALL_Z_CUTOFF {
        return Ok(LogPhiResult { log_value: q.z * q.z / (2.0 * f64::from(q.n)), method: PhiMethod::Series });
    }
    let nu = BesselOrder::for_dimension(q.n)?;
    let integrand = |y: f64| Ok(bessel_ratio(nu, y)?.value);
    // A coarse pass sizes the absolute tolerance off the integral's own
    // magnitude, making `rel_tol` an effective relative target.
    let rough = coarse_simpson(integrand, q.z)?;
    // Purely relative: `rough > 0` for any `z` past the series cutoff, and
    // the near-cubic integrand lets Simpson meet even sub-ulp targets.
    let abs_tol = (rel_tol * rough).max(1e-300);
    let value = adaptive_simpson(integrand, 0.0, q.z, abs_tol)?;
    Ok(LogPhiResult { log_value: value.max(0.0), method: PhiMethod::RatioQuadrature })
}

fn coarse_simpson(mut f: impl FnMut(f64) -> Result<f64>, z: f64) -> Result<f64> {
    const PANELS: u32 = 64;
    let h = z / f64::from(PANELS);
    let mut sum = 0.0;
    for i in 0..PANELS {
        let a = f64::from(i) * h;
        let b = a + h;
        let mid = a + 0.5 * h;
        sum += (b - a) / 6.0 * (f(a)? + 4.0 * f(mid)? + f(b)?);
    }
    Ok(sum)
}

/// Exponential-growth lower bound on `log φ_n`:
/// `(n/2)·log(1−ε²) + ε·z ≤ log φ_n(z)` for every `ε ∈ (0, 1)`.
pub fn lemma1_lower_bound(n: u32, z: f64, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dimension must be >= 1".to_string()));
    }
    if !z.is_finite() || z < 0.0 {
        return Err(Error::domain(format!("z = {z} must be finite and >= 0")));
    }
    check_eps(eps)?;
    Ok(f64::from(n) / 2.0 * (-eps * eps).ln_1p() + eps * z)
}

/// Matrix analog of [`lemma1_lower_bound`]: with `u ∈ S^{m−1}`,
/// `v ∈ S^{n−1}` independent and `z = ‖λA‖`,
/// `log E[e^{λ uᵀAv}] ≥ ((m+n)/2)·log(1−ε²) + ε²·z`.
pub fn lemma4_lower_bound(m: u32, n: u32, z: f64, eps: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::domain("dimensions must be >= 1".to_string()));
    }
    if !z.is_finite() || z < 0.0 {
        return Err(Error::domain(format!("z = {z} must be finite and >= 0")));
    }
    check_eps(eps)?;
    Ok(f64::from(m + n) / 2.0 * (-eps * eps).ln_1p() + eps * eps * z)
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::domain(format!("eps = {eps} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

/// Monte Carlo estimate of `log φ_n(z)` from sphere samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate {
    pub n: u32,
    pub log_estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of the matrix sphere average
/// `log E[e^{λ uᵀAv}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixEnergyEstimate {
    pub m: usize,
    pub n: usize,
    pub log_estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

const MIN_SAMPLES: u64 = 100;

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::domain(format!("samples = {samples} must be >= {MIN_SAMPLES}")));
    }
    Ok(())
}

/// Estimates `log φ_n(z)` by averaging `e^{z·ℓ₁}` over uniform sphere
/// points `ℓ`, in log domain, with a delta-method standard error.
///
/// Deterministic for fixed `(n, z, samples, seed)`: samples are consumed
/// in chunks of [`crate::rng::CHUNK_SIZE`], each on its own generator
/// stream, and chunk partials are combined by a fixed pairwise tree.
pub fn mc_phi(n: u32, z: f64, samples: u64, seed: u64) -> Result<PhiEstimate> {
    if n < 2 {
        return Err(Error::domain("mc_phi requires dimension >= 2".to_string()));
    }
    if !z.is_finite() || z < 0.0 {
        return Err(Error::domain(format!("z = {z} must be finite and >= 0")));
    }
    check_samples(samples)?;
    if z == 0.0 {
        return Ok(PhiEstimate { n, log_estimate: 0.0, std_error: 0.0, samples, seed });
    }
    let mut ell = vec![0.0; n as usize];
    let mut parts = Vec::new();
    for (index, count) in chunk_layout(samples) {
        let mut rng = chunk_rng(seed, index);
        let mut acc = ExponentAccumulator::new();
        for _ in 0..count {
            unit_sphere(&mut rng, &mut ell);
            acc.push(z * ell[0]);
        }
        parts.push(acc.finish());
    }
    let (log_estimate, std_error) = log_mean_with_se(tree_reduce(parts).expect("samples >= 100"));
    Ok(PhiEstimate { n, log_estimate, std_error, samples, seed })
}

/// Estimates `log E[e^{λ uᵀAv}]` over independent uniform `u ∈ S^{m−1}`,
/// `v ∈ S^{n−1}` (drawn in that order per sample), with the same
/// chunked determinism contract as [`mc_phi`].
pub fn mc_matrix_energy(
    m: usize,
    n: usize,
    a: &Matrix,
    lambda: f64,
    samples: u64,
    seed: u64,
) -> Result<MatrixEnergyEstimate> {
    if a.rows() != m || a.cols() != n {
        return Err(Error::dims(format!(
            "matrix is {}x{}, expected {m}x{n}",
            a.rows(),
            a.cols()
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::domain(format!("lambda = {lambda} must be finite")));
    }
    check_samples(samples)?;
    if lambda == 0.0 || a.max_abs() == 0.0 {
        return Ok(MatrixEnergyEstimate { m, n, log_estimate: 0.0, std_error: 0.0, samples, seed });
    }
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut av = vec![0.0; m];
    let mut parts = Vec::new();
    for (index, count) in chunk_layout(samples) {
        let mut rng = chunk_rng(seed, index);
        let mut acc = ExponentAccumulator::new();
        for _ in 0..count {
            unit_sphere(&mut rng, &mut u);
            unit_sphere(&mut rng, &mut v);
            a.matvec(&v, &mut av);
            let form: f64 = u.iter().zip(&av).map(|(x, y)| x * y).sum();
            acc.push(lambda * form);
        }
        parts.push(acc.finish());
    }
    let (log_estimate, std_error) = log_mean_with_se(tree_reduce(parts).expect("samples >= 100"));
    Ok(MatrixEnergyEstimate { m, n, log_estimate, std_error, samples, seed })
}
