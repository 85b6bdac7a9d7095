//! Seeded samplers with certified variance proxies, and the statistical
//! experiments that check the sub-Gaussian bounds against them.
//!
//! Each sampler family carries a hard-coded variance proxy justified
//! analytically (Hoeffding's lemma for the bounded families, the exact
//! MGF for Gaussians) rather than estimated from data, because the
//! directional-MGF definition needs a certified σ.  Experiments compare a
//! Monte Carlo statistic against its theoretical target with a
//! 3-standard-error margin and report `inconclusive` — not `fail` — when
//! the target sits inside the margin, so certifying an inequality never
//! flakes; coverage experiments instead use an exact one-sided
//! Clopper–Pearson binomial bound.
//!
//! The shipped matrix ensemble has iid entries; the directional
//! definition of matrix sub-Gaussianity does not require independence,
//! but no standard dependent ensemble with a certified proxy is included.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::bounds::{
    optimize_eps_matrix, optimize_eps_net, optimize_eps_thm2, radius_eps_net, radius_hkz,
    radius_matrix_thm4, radius_scalar, radius_thm2, radius_thm3, BoundMethod, BoundParams,
};
use crate::error::{Error, Result};
use crate::logmean::{log_mean_with_se, tree_reduce, ExponentAccumulator};
use crate::matrix::Matrix;
use crate::rng::{chunk_layout, chunk_rng, derive_seed, unit_sphere};
use crate::specfun::ln_gamma;

/// Sampler families; the vector families draw iid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    Rademacher,
    BoundedUniform,
    GaussianMatrix,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian_vector",
            Family::Rademacher => "rademacher_vector",
            Family::BoundedUniform => "bounded_uniform_vector",
            Family::GaussianMatrix => "gaussian_matrix",
        }
    }
}

/// A sampler family with its dimensions, scale, and certified variance
/// proxy.
///
/// Proxies: Gaussian coordinates with standard deviation `s` are
/// sub-Gaussian with proxy `s` exactly; coordinates bounded in `[−a, a]`
/// (Rademacher at `±a`, uniform on `[−a, a]`) have proxy `a` by
/// Hoeffding's lemma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub family: Family,
    pub n: u32,
    pub m: Option<u32>,
    pub scale: f64,
    pub variance_proxy: f64,
}

impl SamplerSpec {
    pub fn gaussian_vector(n: u32, sigma: f64) -> Result<Self> {
        Self::vector(Family::Gaussian, n, sigma)
    }

    pub fn rademacher_vector(n: u32, scale: f64) -> Result<Self> {
        Self::vector(Family::Rademacher, n, scale)
    }

    pub fn bounded_uniform_vector(n: u32, half_width: f64) -> Result<Self> {
        Self::vector(Family::BoundedUniform, n, half_width)
    }

    pub fn gaussian_matrix(m: u32, n: u32, sigma: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("row count must be >= 1".to_string()));
        }
        let mut spec = Self::vector(Family::GaussianMatrix, n, sigma)?;
        spec.m = Some(m);
        Ok(spec)
    }

    fn vector(family: Family, n: u32, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be >= 1".to_string()));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::domain(format!("scale = {scale} must be finite and > 0")));
        }
        Ok(SamplerSpec { family, n, m: None, scale, variance_proxy: scale })
    }

    pub fn is_matrix(&self) -> bool {
        self.family == Family::GaussianMatrix
    }

    fn rows(&self) -> Result<u32> {
        self.m.ok_or_else(|| Error::dims("matrix sampler is missing its row count".to_string()))
    }
}

/// One draw from a sampler.
#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl Realization {
    /// Euclidean norm for vectors, operator norm for matrices.
    pub fn norm(&self) -> Result<f64> {
        match self {
            Realization::Vector(v) => Ok(v.iter().map(|x| x * x).sum::<f64>().sqrt()),
            Realization::Matrix(a) => operator_norm(a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }
}

/// Outcome of one statistical experiment: the measured statistic, its
/// uncertainty interval, the theoretical target, and the verdict derived
/// deterministically from the three.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub spec: SamplerSpec,
    pub seed: u64,
    pub samples: u64,
    pub statistic: f64,
    /// `(lo, hi)`: a ±3·SE interval for MGF experiments, `(lower
    /// confidence bound, 1.0)` for coverage experiments.
    pub stderr_or_ci: (f64, f64),
    pub target: f64,
    pub verdict: Verdict,
}

/// Verdict for a statistic that must not exceed its target: `fail` only
/// when the target lies below the 3·SE margin, `inconclusive` when it is
/// inside, `pass` when the statistic clears it by more than 3·SE.
fn upper_bound_verdict(diff: f64, se: f64) -> Verdict {
    if se == 0.0 {
        if diff <= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else if diff > 3.0 * se {
        Verdict::Fail
    } else if diff >= -3.0 * se {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

enum VectorDraw {
    Gaussian(f64),
    Rademacher(f64),
    Uniform(Uniform<f64>),
}

impl VectorDraw {
    fn for_spec(spec: &SamplerSpec) -> Result<Self> {
        Ok(match spec.family {
            Family::Gaussian => VectorDraw::Gaussian(spec.scale),
            Family::Rademacher => VectorDraw::Rademacher(spec.scale),
            Family::BoundedUniform => VectorDraw::Uniform(
                Uniform::new_inclusive(-spec.scale, spec.scale)
                    .map_err(|e| Error::domain(format!("bad uniform support: {e}")))?,
            ),
            Family::GaussianMatrix => {
                return Err(Error::dims("matrix sampler used in a vector context".to_string()))
            }
        })
    }

    fn fill(&self, rng: &mut ChaCha12Rng, out: &mut [f64]) {
        match self {
            VectorDraw::Gaussian(s) => {
                for x in out.iter_mut() {
                    *x = s * rng.sample::<f64, _>(StandardNormal);
                }
            }
            VectorDraw::Rademacher(s) => {
                for x in out.iter_mut() {
                    *x = if rng.random::<bool>() { *s } else { -*s };
                }
            }
            VectorDraw::Uniform(d) => {
                for x in out.iter_mut() {
                    *x = d.sample(rng);
                }
            }
        }
    }
}

fn fill_gaussian_matrix(a: &mut Matrix, scale: f64, rng: &mut ChaCha12Rng) {
    for x in a.data_mut() {
        *x = scale * rng.sample::<f64, _>(StandardNormal);
    }
}

fn check_count(count: u64) -> Result<()> {
    if count == 0 {
        return Err(Error::domain("sample count must be >= 1".to_string()));
    }
    Ok(())
}

const MIN_MC_SAMPLES: u64 = 100;

fn check_mc_samples(samples: u64) -> Result<()> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::domain(format!("samples = {samples} must be >= {MIN_MC_SAMPLES}")));
    }
    Ok(())
}

/// Streams `count` vector draws through `f`, chunked per the determinism
/// contract.
fn stream_vectors(
    spec: &SamplerSpec,
    count: u64,
    seed: u64,
    mut f: impl FnMut(&[f64]) -> Result<()>,
) -> Result<()> {
    let draw = VectorDraw::for_spec(spec)?;
    let mut x = vec![0.0; spec.n as usize];
    for (index, len) in chunk_layout(count) {
        let mut rng = chunk_rng(seed, index);
        for _ in 0..len {
            draw.fill(&mut rng, &mut x);
            f(&x)?;
        }
    }
    Ok(())
}

/// Streams `count` matrix draws through `f`, chunked as above.
fn stream_matrices(
    spec: &SamplerSpec,
    count: u64,
    seed: u64,
    mut f: impl FnMut(&Matrix) -> Result<()>,
) -> Result<()> {
    let m = spec.rows()?;
    let mut a = Matrix::zeros(m as usize, spec.n as usize)?;
    for (index, len) in chunk_layout(count) {
        let mut rng = chunk_rng(seed, index);
        for _ in 0..len {
            fill_gaussian_matrix(&mut a, spec.scale, &mut rng);
            f(&a)?;
        }
    }
    Ok(())
}

/// Materializes `count` draws; deterministic in `(spec, count, seed)`.
pub fn sample_batch(spec: &SamplerSpec, count: u64, seed: u64) -> Result<Vec<Realization>> {
    check_count(count)?;
    let mut out = Vec::with_capacity(count as usize);
    if spec.is_matrix() {
        stream_matrices(spec, count, seed, |a| {
            out.push(Realization::Matrix(a.clone()));
            Ok(())
        })?;
    } else {
        stream_vectors(spec, count, seed, |x| {
            out.push(Realization::Vector(x.to_vec()));
            Ok(())
        })?;
    }
    Ok(out)
}

const OPNORM_SEED: u64 = 0x6F70_6E6F_726D;
const OPNORM_REL_TOL: f64 = 1e-12;
const OPNORM_MAX_ITER: u32 = 50_000;

/// Largest singular value by power iteration on the smaller of `AᵀA` and
/// `AAᵀ`, from a fixed seeded random start.
///
/// Converged when the residual `‖Bv − λv‖` falls below `1e-12·λ` (which
/// bounds the distance from `λ` to the spectrum of the Gram operator `B`);
/// hitting the 50 000-iteration cap returns
/// [`Error::PowerIterationDiverged`] with the last relative residual.
pub fn operator_norm(a: &Matrix) -> Result<f64> {
    if a.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("matrix entries must be finite".to_string()));
    }
    if a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let (rows, cols) = (a.rows(), a.cols());
    let iterate_cols = cols <= rows;
    let dim = cols.min(rows);
    let mut v = vec![0.0; dim];
    unit_sphere(&mut chunk_rng(OPNORM_SEED, 0), &mut v);
    let mut t = vec![0.0; cols.max(rows)];
    let mut w = vec![0.0; dim];
    let mut last_gap = f64::INFINITY;
    for _ in 0..OPNORM_MAX_ITER {
        if iterate_cols {
            let t = &mut t[..rows];
            a.matvec(&v, t);
            a.tr_matvec(t, &mut w);
        } else {
            let t = &mut t[..cols];
            a.tr_matvec(&v, t);
            a.matvec(t, &mut w);
        }
        let lam: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        let w_norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        // Componentwise, not √(‖w‖²−λ²): the latter cancels to a ~1e-8·λ
        // noise floor and can never meet the tolerance.
        let residual = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| {
                let d = wi - lam * vi;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        last_gap = residual / lam.max(f64::MIN_POSITIVE);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / w_norm;
        }
        if residual <= OPNORM_REL_TOL * lam {
            return Ok(lam.max(0.0).sqrt());
        }
    }
    Err(Error::PowerIterationDiverged { iterations: OPNORM_MAX_ITER, gap: last_gap })
}

/// One-sided lower Clopper–Pearson bound: the largest `p` such that
/// observing at least `successes` out of `trials` still has probability
/// `≥ 1 − confidence` under `Bin(trials, p)`... i.e. the exact binomial
/// lower confidence bound at the given level.
///
/// Solved by bisection on the log-domain binomial upper tail; the
/// endpoint cases have closed forms (`0` successes → `0`, all successes →
/// `α^{1/N}` with `α = 1 − confidence`).
pub fn clopper_pearson_lower(successes: u64, trials: u64, confidence: f64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1".to_string()));
    }
    if successes > trials {
        return Err(Error::domain(format!("successes {successes} exceed trials {trials}")));
    }
    if !confidence.is_finite() || confidence <= 0.0 || confidence >= 1.0 {
        return Err(Error::domain(format!("confidence = {confidence} must lie in (0, 1)")));
    }
    let alpha = 1.0 - confidence;
    if successes == 0 {
        return Ok(0.0);
    }
    let n = trials as f64;
    if successes == trials {
        return Ok((alpha.ln() / n).exp());
    }
    let ln_n_fact = ln_gamma(n + 1.0);
    let log_coef: Vec<f64> = (successes..=trials)
        .map(|j| {
            let jf = j as f64;
            ln_n_fact - ln_gamma(jf + 1.0) - ln_gamma(n - jf + 1.0)
        })
        .collect();
    let log_upper_tail = |q: f64| -> f64 {
        let lq = q.ln();
        let l1q = (-q).ln_1p();
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for (offset, lc) in log_coef.iter().enumerate() {
            let j = (successes + offset as u64) as f64;
            let a = lc + j * lq + (n - j) * l1q;
            if a <= max {
                sum += (a - max).exp();
            } else {
                sum = sum * (max - a).exp() + 1.0;
                max = a;
            }
        }
        max + sum.ln()
    };
    let log_alpha = alpha.ln();
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_upper_tail(mid) < log_alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Chunked log-domain mean of `exp(exponent(rng))` over `total` draws.
fn accumulate_exponents(
    total: u64,
    seed: u64,
    mut exponent: impl FnMut(&mut ChaCha12Rng) -> f64,
) -> (f64, f64) {
    let mut parts = Vec::new();
    for (index, count) in chunk_layout(total) {
        let mut rng = chunk_rng(seed, index);
        let mut acc = ExponentAccumulator::new();
        for _ in 0..count {
            acc.push(exponent(&mut rng));
        }
        parts.push(acc.finish());
    }
    log_mean_with_se(tree_reduce(parts).expect("nonzero sample count"))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Stream label separating direction draws from per-direction sample
/// streams (which use labels `0..directions`).
const DIRECTION_LABEL: u64 = u64::MAX;

/// Checks the defining directional MGF bound
/// `E[e^{λ⟨ℓ,X⟩}] ≤ e^{λ²σ²/2}` on `directions` random unit directions
/// (direction pairs `(u, v)` for the matrix family), each estimated from
/// `samples` fresh draws.
///
/// The report's statistic is the worst per-direction log estimate
/// relative to the common log target `λ²σ²/2`; the verdict is the worst
/// per-direction verdict under the 3·SE rule.
pub fn directional_mgf_check(
    spec: &SamplerSpec,
    lambda: f64,
    directions: u32,
    samples: u64,
    seed: u64,
) -> Result<McReport> {
    if !lambda.is_finite() {
        return Err(Error::domain(format!("lambda = {lambda} must be finite")));
    }
    if directions == 0 {
        return Err(Error::domain("directions must be >= 1".to_string()));
    }
    check_mc_samples(samples)?;
    let target = lambda * lambda * spec.variance_proxy * spec.variance_proxy / 2.0;
    let mut dir_rng = chunk_rng(derive_seed(seed, DIRECTION_LABEL), 0);

    let mut worst: Option<(f64, f64)> = None;
    let mut verdict = Verdict::Pass;
    for d in 0..directions {
        let est_seed = derive_seed(seed, u64::from(d));
        let (log_est, se) = if spec.is_matrix() {
            let m = spec.rows()? as usize;
            let mut u = vec![0.0; m];
            let mut v = vec![0.0; spec.n as usize];
            unit_sphere(&mut dir_rng, &mut u);
            unit_sphere(&mut dir_rng, &mut v);
            let mut a = Matrix::zeros(m, spec.n as usize)?;
            let mut av = vec![0.0; m];
            accumulate_exponents(samples, est_seed, |rng| {
                fill_gaussian_matrix(&mut a, spec.scale, rng);
                a.matvec(&v, &mut av);
                lambda * dot(&u, &av)
            })
        } else {
            let mut ell = vec![0.0; spec.n as usize];
            unit_sphere(&mut dir_rng, &mut ell);
            let draw = VectorDraw::for_spec(spec)?;
            let mut x = vec![0.0; spec.n as usize];
            accumulate_exponents(samples, est_seed, |rng| {
                draw.fill(rng, &mut x);
                lambda * dot(&ell, &x)
            })
        };
        let diff = log_est - target;
        let dir_verdict = upper_bound_verdict(diff, se);
        verdict = worst_of(verdict, dir_verdict);
        if worst.is_none_or(|(stat, _)| diff > stat - target) {
            worst = Some((log_est, se));
        }
    }
    let (statistic, se) = worst.expect("directions >= 1");
    Ok(McReport {
        spec: *spec,
        seed,
        samples: u64::from(directions) * samples,
        statistic,
        stderr_or_ci: (statistic - 3.0 * se, statistic + 3.0 * se),
        target,
        verdict,
    })
}

fn worst_of(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Fail, _) | (_, Fail) => Fail,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => Pass,
    }
}

/// Checks the averaged MGF bound `Φ_X(λ) ≤ e^{λ²σ²/2}` by jointly
/// sampling `(X, ℓ)` — or `(A, u, v)` for matrices — and comparing the
/// log-domain estimate to `λ²σ²/2` under the 3·SE rule.
pub fn amgf_bound_check(
    spec: &SamplerSpec,
    lambda: f64,
    samples: u64,
    seed: u64,
) -> Result<McReport> {
    if !lambda.is_finite() {
        return Err(Error::domain(format!("lambda = {lambda} must be finite")));
    }
    check_mc_samples(samples)?;
    let target = lambda * lambda * spec.variance_proxy * spec.variance_proxy / 2.0;
    let (statistic, se) = if spec.is_matrix() {
        let m = spec.rows()? as usize;
        let mut a = Matrix::zeros(m, spec.n as usize)?;
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; spec.n as usize];
        let mut av = vec![0.0; m];
        accumulate_exponents(samples, seed, |rng| {
            fill_gaussian_matrix(&mut a, spec.scale, rng);
            unit_sphere(rng, &mut u);
            unit_sphere(rng, &mut v);
            a.matvec(&v, &mut av);
            lambda * dot(&u, &av)
        })
    } else {
        let draw = VectorDraw::for_spec(spec)?;
        let mut x = vec![0.0; spec.n as usize];
        let mut ell = vec![0.0; spec.n as usize];
        accumulate_exponents(samples, seed, |rng| {
            draw.fill(rng, &mut x);
            unit_sphere(rng, &mut ell);
            lambda * dot(&ell, &x)
        })
    };
    let verdict = upper_bound_verdict(statistic - target, se);
    Ok(McReport {
        spec: *spec,
        seed,
        samples,
        statistic,
        stderr_or_ci: (statistic - 3.0 * se, statistic + 3.0 * se),
        target,
        verdict,
    })
}

/// How the `ε` of an ε-parameterized bound is chosen in
/// [`coverage_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsChoice {
    Unset,
    Fixed(f64),
    Optimize,
}

/// Draws `samples` realizations, counts how many land inside the radius
/// certified by `method` at failure probability `delta`, and certifies
/// the coverage with an exact one-sided Clopper–Pearson lower bound at
/// the 99.9% level: pass iff that lower bound is at least `1 − δ`.
///
/// The bound's parameters are assembled from the sampler's certified
/// proxy and dimensions, so they cannot disagree with the draws; vector
/// methods demand a vector family and the matrix method the matrix
/// family.
pub fn coverage_experiment(
    spec: &SamplerSpec,
    method: BoundMethod,
    delta: f64,
    eps: EpsChoice,
    samples: u64,
    seed: u64,
) -> Result<McReport> {
    check_count(samples)?;
    let radius = coverage_radius(spec, method, delta, eps)?;
    let mut successes: u64 = 0;
    if spec.is_matrix() {
        stream_matrices(spec, samples, seed, |a| {
            if operator_norm(a)? <= radius {
                successes += 1;
            }
            Ok(())
        })?;
    } else {
        stream_vectors(spec, samples, seed, |x| {
            if dot(x, x).sqrt() <= radius {
                successes += 1;
            }
            Ok(())
        })?;
    }
    let lower = clopper_pearson_lower(successes, samples, 0.999)?;
    let target = 1.0 - delta;
    let verdict = if lower >= target { Verdict::Pass } else { Verdict::Fail };
    Ok(McReport {
        spec: *spec,
        seed,
        samples,
        statistic: successes as f64 / samples as f64,
        stderr_or_ci: (lower, 1.0),
        target,
        verdict,
    })
}

fn coverage_radius(
    spec: &SamplerSpec,
    method: BoundMethod,
    delta: f64,
    eps: EpsChoice,
) -> Result<f64> {
    let base = BoundParams::new(spec.n, spec.variance_proxy, delta)?;
    if method == BoundMethod::MatrixThm4 {
        if !spec.is_matrix() {
            return Err(Error::dims("matrix bound requires the matrix sampler".to_string()));
        }
        let m = spec.rows()?;
        return match eps {
            EpsChoice::Fixed(e) => {
                Ok(radius_matrix_thm4(&base.with_m(m)?.with_eps(e)?)?.radius)
            }
            EpsChoice::Optimize => Ok(optimize_eps_matrix(m, spec.n, spec.variance_proxy, delta)?.1),
            EpsChoice::Unset => Err(Error::domain("matrix bound requires eps (fixed or auto)".to_string())),
        };
    }
    if spec.is_matrix() {
        return Err(Error::dims(format!(
            "vector bound {} cannot cover the matrix sampler",
            method.name()
        )));
    }
    match method {
        BoundMethod::Scalar => Ok(radius_scalar(&base)?.radius),
        BoundMethod::EpsNet => match eps {
            EpsChoice::Fixed(e) => Ok(radius_eps_net(&base.with_eps(e)?)?.radius),
            EpsChoice::Optimize => Ok(optimize_eps_net(spec.n, spec.variance_proxy, delta)?.1),
            EpsChoice::Unset => Err(Error::domain("eps_net requires eps (fixed or auto)".to_string())),
        },
        BoundMethod::Thm2 => match eps {
            EpsChoice::Fixed(e) => Ok(radius_thm2(&base.with_eps(e)?)?.radius),
            EpsChoice::Optimize => Ok(optimize_eps_thm2(spec.n, spec.variance_proxy, delta)?.1),
            EpsChoice::Unset => Err(Error::domain("thm2 requires eps (fixed or auto)".to_string())),
        },
        BoundMethod::Thm3 => Ok(radius_thm3(&base)?.radius),
        BoundMethod::Hkz => Ok(radius_hkz(&base)?.radius),
        BoundMethod::MatrixThm4 => unreachable!("handled above"),
    }
}

/// Empirical `1−δ` quantile of the norm: the order statistic at (1-based)
/// rank `⌈(1−δ)·samples⌉`, the conservative upper convention.
pub fn empirical_norm_quantile(
    spec: &SamplerSpec,
    delta: f64,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::domain(format!("delta = {delta} must lie strictly inside (0, 1)")));
    }
    check_count(samples)?;
    let mut norms = Vec::with_capacity(samples as usize);
    if spec.is_matrix() {
        stream_matrices(spec, samples, seed, |a| {
            norms.push(operator_norm(a)?);
            Ok(())
        })?;
    } else {
        stream_vectors(spec, samples, seed, |x| {
            norms.push(dot(x, x).sqrt());
            Ok(())
        })?;
    }
    norms.sort_by(f64::total_cmp);
    let rank = ((1.0 - delta) * samples as f64).ceil().max(1.0) as usize;
    Ok(norms[rank.min(norms.len()) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn closed_form_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        ((s + (s * s - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
    }

    #[test]
    fn sampler_specs_certify_their_scale() {
        let g = SamplerSpec::gaussian_vector(5, 2.0).unwrap();
        assert_eq!(g.variance_proxy, 2.0);
        let r = SamplerSpec::rademacher_vector(3, 1.5).unwrap();
        assert_eq!(r.variance_proxy, 1.5);
        let b = SamplerSpec::bounded_uniform_vector(4, 0.7).unwrap();
        assert_eq!(b.variance_proxy, 0.7);
        let m = SamplerSpec::gaussian_matrix(2, 3, 1.0).unwrap();
        assert_eq!(m.m, Some(2));
        assert!(SamplerSpec::gaussian_vector(0, 1.0).is_err());
        assert!(SamplerSpec::rademacher_vector(3, 0.0).is_err());
        assert!(SamplerSpec::gaussian_matrix(0, 3, 1.0).is_err());
    }

    #[test]
    fn rademacher_support_is_plus_minus_scale() {
        let spec = SamplerSpec::rademacher_vector(4, 1.0).unwrap();
        for r in sample_batch(&spec, 200, 3).unwrap() {
            let Realization::Vector(v) = r else { panic!("expected vectors") };
            assert!(v.iter().all(|&x| x == 1.0 || x == -1.0));
        }
    }

    #[test]
    fn gaussian_sample_mean_is_centered() {
        let spec = SamplerSpec::gaussian_vector(1, 1.0).unwrap();
        let mut sum = 0.0;
        let count = 1_000_000u64;
        stream_vectors(&spec, count, 17, |x| {
            sum += x[0];
            Ok(())
        })
        .unwrap();
        let mean = sum / count as f64;
        assert!(mean.abs() < 4.0 / (count as f64).sqrt(), "{mean}");
    }

    #[test]
    fn batches_are_bit_reproducible() {
        let spec = SamplerSpec::bounded_uniform_vector(3, 2.0).unwrap();
        let a = sample_batch(&spec, 500, 11).unwrap();
        let b = sample_batch(&spec, 500, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_batch(&spec, 500, 12).unwrap();
        assert_ne!(a, c);

        let mspec = SamplerSpec::gaussian_matrix(2, 2, 1.0).unwrap();
        let ma = sample_batch(&mspec, 50, 7).unwrap();
        let mb = sample_batch(&mspec, 50, 7).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn operator_norm_known_matrices() {
        let id = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((operator_norm(&id).unwrap() - 1.0).abs() < 1e-12);

        let a = Matrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        assert!((operator_norm(&a).unwrap() - 45f64.sqrt()).abs() < 1e-10);

        // Rank-1 uvᵀ with ‖u‖ = 2, ‖v‖ = 3.
        let u = [2.0, 0.0];
        let v = [0.0, 3.0, 0.0];
        let r1 = Matrix::from_fn(2, 3, |i, j| u[i] * v[j]).unwrap();
        assert!((operator_norm(&r1).unwrap() - 6.0).abs() < 1e-10);

        let diag = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, -7.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        assert!((operator_norm(&diag).unwrap() - 7.0).abs() < 1e-12);

        assert_eq!(operator_norm(&Matrix::zeros(3, 2).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_matches_closed_form_on_random_matrices() {
        let mut rng = chunk_rng(99, 0);
        for _ in 0..500 {
            let e: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let m = Matrix::from_rows(&[vec![e[0], e[1]], vec![e[2], e[3]]]).unwrap();
            let want = closed_form_2x2(e[0], e[1], e[2], e[3]);
            let got = operator_norm(&m).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "{m:?}: {got} vs {want}");
        }
    }

    #[test]
    fn operator_norm_transpose_invariant() {
        let a = Matrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![0.3, 4.0, 1.0]]).unwrap();
        let at = Matrix::from_fn(3, 2, |i, j| a[(j, i)]).unwrap();
        let na = operator_norm(&a).unwrap();
        let nat = operator_norm(&at).unwrap();
        assert!((na - nat).abs() < 1e-10 * na);
    }

    #[test]
    fn clopper_pearson_edge_cases() {
        assert_eq!(clopper_pearson_lower(0, 100, 0.999).unwrap(), 0.0);
        // All successes: p_L = α^{1/N}.
        let p = clopper_pearson_lower(50, 50, 0.999).unwrap();
        assert!((p - 0.001f64.powf(1.0 / 50.0)).abs() < 1e-10);
        assert!(clopper_pearson_lower(5, 4, 0.999).is_err());
        assert!(clopper_pearson_lower(1, 10, 1.0).is_err());
    }

    #[test]
    fn clopper_pearson_matches_direct_polynomial_root() {
        // Small case solvable with naive arithmetic: N = 10, x = 7.
        let n = 10u64;
        let x = 7u64;
        let alpha = 0.001;
        let tail = |q: f64| {
            let mut acc = 0.0;
            for j in x..=n {
                let mut coef = 1.0;
                for i in 0..j {
                    coef *= (n - i) as f64 / (i + 1) as f64;
                }
                acc += coef * q.powi(j as i32) * (1.0 - q).powi((n - j) as i32);
            }
            acc
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = 0.5 * (lo + hi);
        let got = clopper_pearson_lower(x, n, 0.999).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn clopper_pearson_monotone_in_successes() {
        let mut prev = -1.0;
        for x in [0u64, 10, 500, 900, 990, 1000] {
            let p = clopper_pearson_lower(x, 1000, 0.999).unwrap();
            assert!(p > prev || (x == 0 && p == 0.0));
            prev = p;
        }
    }

    #[test]
    fn directional_check_gaussian_equality_case() {
        // True directional MGF equals the target exactly, so the verdict
        // must not be fail and the estimate must hug the target.
        let spec = SamplerSpec::gaussian_vector(4, 1.0).unwrap();
        let rep = directional_mgf_check(&spec, 1.0, 5, 20_000, 7).unwrap();
        assert_ne!(rep.verdict, Verdict::Fail);
        assert!((rep.statistic - rep.target).abs() < 0.05);
    }

    #[test]
    fn directional_check_rademacher_passes_with_margin() {
        let spec = SamplerSpec::rademacher_vector(3, 1.0).unwrap();
        let rep = directional_mgf_check(&spec, 2.0, 5, 20_000, 7).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.statistic < rep.target);
    }

    #[test]
    fn directional_check_zero_lambda_is_exact() {
        let spec = SamplerSpec::bounded_uniform_vector(3, 1.0).unwrap();
        let rep = directional_mgf_check(&spec, 0.0, 3, 1000, 1).unwrap();
        assert_eq!(rep.statistic, 0.0);
        assert_eq!(rep.target, 0.0);
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn directional_check_covers_matrix_family() {
        let spec = SamplerSpec::gaussian_matrix(2, 3, 1.0).unwrap();
        let rep = directional_mgf_check(&spec, 1.0, 4, 20_000, 3).unwrap();
        assert_ne!(rep.verdict, Verdict::Fail);
    }

    #[test]
    fn amgf_check_gaussian_and_zero_lambda() {
        let spec = SamplerSpec::gaussian_vector(2, 1.0).unwrap();
        let rep = amgf_bound_check(&spec, 1.0, 50_000, 5).unwrap();
        assert_ne!(rep.verdict, Verdict::Fail);
        assert!((rep.statistic - rep.target).abs() <= 4.0 * (rep.stderr_or_ci.1 - rep.statistic) / 3.0 + 0.02);

        let zero = amgf_bound_check(&spec, 0.0, 1000, 5).unwrap();
        assert_eq!(zero.statistic, 0.0);
        assert_eq!(zero.verdict, Verdict::Pass);
    }

    #[test]
    fn amgf_check_rademacher_strictly_below() {
        let spec = SamplerSpec::rademacher_vector(5, 1.0).unwrap();
        let rep = amgf_bound_check(&spec, 2.0, 50_000, 5).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn coverage_gaussian_thm3() {
        let spec = SamplerSpec::gaussian_vector(10, 1.0).unwrap();
        let rep =
            coverage_experiment(&spec, BoundMethod::Thm3, 0.01, EpsChoice::Unset, 20_000, 7).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.statistic > 0.99);
        assert!(rep.stderr_or_ci.0 >= rep.target);
    }

    #[test]
    fn coverage_near_delta_one_still_passes() {
        let spec = SamplerSpec::gaussian_vector(5, 1.0).unwrap();
        let rep =
            coverage_experiment(&spec, BoundMethod::Thm2, 0.9, EpsChoice::Optimize, 20_000, 7)
                .unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.statistic >= 0.1);
    }

    #[test]
    fn coverage_matrix_bound() {
        let spec = SamplerSpec::gaussian_matrix(2, 2, 1.0).unwrap();
        let rep = coverage_experiment(
            &spec,
            BoundMethod::MatrixThm4,
            0.1,
            EpsChoice::Optimize,
            2_000,
            7,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn coverage_rejects_family_mismatches() {
        let vec_spec = SamplerSpec::gaussian_vector(4, 1.0).unwrap();
        assert!(coverage_experiment(&vec_spec, BoundMethod::MatrixThm4, 0.1, EpsChoice::Optimize, 100, 0)
            .is_err());
        let mat_spec = SamplerSpec::gaussian_matrix(2, 2, 1.0).unwrap();
        assert!(coverage_experiment(&mat_spec, BoundMethod::Thm3, 0.1, EpsChoice::Unset, 100, 0)
            .is_err());
        assert!(coverage_experiment(&vec_spec, BoundMethod::Thm2, 0.1, EpsChoice::Unset, 100, 0)
            .is_err());
    }

    #[test]
    fn experiments_are_deterministic() {
        let spec = SamplerSpec::gaussian_vector(3, 1.0).unwrap();
        let a = directional_mgf_check(&spec, 0.5, 3, 5000, 21).unwrap();
        let b = directional_mgf_check(&spec, 0.5, 3, 5000, 21).unwrap();
        assert_eq!(a, b);
        let c = coverage_experiment(&spec, BoundMethod::Hkz, 0.1, EpsChoice::Unset, 5000, 21).unwrap();
        let d = coverage_experiment(&spec, BoundMethod::Hkz, 0.1, EpsChoice::Unset, 5000, 21).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn gaussian_quantile_sits_below_the_radii() {
        let spec = SamplerSpec::gaussian_vector(10, 1.0).unwrap();
        let delta = 0.01;
        let q = empirical_norm_quantile(&spec, delta, 100_000, 13).unwrap();
        let p = BoundParams::new(10, 1.0, delta).unwrap();
        let hkz = radius_hkz(&p).unwrap().radius;
        let thm3 = radius_thm3(&p).unwrap().radius;
        assert!(q <= hkz && hkz <= thm3, "q={q} hkz={hkz} thm3={thm3}");
        // The sphere-average radius at grid-optimal ε is compared but not
        // asserted against thm3: no proven ordering exists between them.
        let (_, thm2) = optimize_eps_thm2(10, 1.0, delta).unwrap();
        eprintln!("ordering check: quantile {q:.4} <= hkz {hkz:.4} <= thm3 {thm3:.4}; thm2(opt) {thm2:.4}");
    }

    #[test]
    fn quantile_rank_convention() {
        let spec = SamplerSpec::gaussian_vector(2, 1.0).unwrap();
        // With δ = 0.5 and 101 samples the rank is ⌈50.5⌉ = 51, the median.
        let q = empirical_norm_quantile(&spec, 0.5, 101, 3).unwrap();
        let mut norms: Vec<f64> = sample_batch(&spec, 101, 3)
            .unwrap()
            .iter()
            .map(|r| r.norm().unwrap())
            .collect();
        norms.sort_by(f64::total_cmp);
        assert_eq!(q, norms[50]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn operator_norm_2x2_closed_form_property(
            a in -5.0f64..5.0, b in -5.0f64..5.0,
            c in -5.0f64..5.0, d in -5.0f64..5.0,
        ) {
            prop_assume!(a.abs() + b.abs() + c.abs() + d.abs() > 1e-6);
            let m = Matrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
            let want = closed_form_2x2(a, b, c, d);
            let got = operator_norm(&m).unwrap();
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }

        #[test]
        fn vector_norms_respect_support(
            n in 1u32..6,
            scale in 0.1f64..3.0,
            seed in 0u64..50,
        ) {
            let spec = SamplerSpec::bounded_uniform_vector(n, scale).unwrap();
            for r in sample_batch(&spec, 64, seed).unwrap() {
                let norm = r.norm().unwrap();
                prop_assert!(norm <= scale * f64::from(n).sqrt() + 1e-12);
            }
        }
    }
}
