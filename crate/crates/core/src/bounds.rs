//! Concentration radii: given a variance proxy σ and failure probability
//! δ, each method returns the smallest radius `r` it can certify with
//! `P(‖X‖ > r) ≤ δ`.
//!
//! Methods with an explicit constant structure satisfy
//! `r² = σ²(C₁·dim + C₂·L)` with `L = log(1/δ)` and `dim = n` (vectors)
//! or `m + n` (matrices); `C₁`/`C₂` are reported so methods can be
//! compared constant-by-constant.  All logarithms are natural.

use crate::error::{Error, Result};

/// Inputs shared by every bound: dimension(s), variance proxy, failure
/// probability, and the optional `ε` used by the parameterized methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub n: u32,
    pub m: Option<u32>,
    pub sigma: f64,
    pub delta: f64,
    pub eps: Option<f64>,
}

impl BoundParams {
    pub fn new(n: u32, sigma: f64, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be >= 1".to_string()));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(Error::domain(format!("delta = {delta} must lie strictly inside (0, 1)")));
        }
        Ok(BoundParams { n, m: None, sigma, delta, eps: None })
    }

    pub fn with_m(mut self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("row count must be >= 1".to_string()));
        }
        self.m = Some(m);
        Ok(self)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        self.eps = Some(eps);
        Ok(self)
    }

    /// `L = log(1/δ)`.
    pub fn log_inv_delta(&self) -> f64 {
        -self.delta.ln()
    }

    fn require_eps(&self) -> Result<f64> {
        self.eps.ok_or_else(|| Error::domain("this method requires eps".to_string()))
    }

    fn require_m(&self) -> Result<u32> {
        self.m.ok_or_else(|| Error::domain("matrix bound requires the row count m".to_string()))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::domain(format!("eps = {eps} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Scalar,
    EpsNet,
    Thm2,
    Thm3,
    Hkz,
    MatrixThm4,
}

impl BoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            BoundMethod::Scalar => "scalar",
            BoundMethod::EpsNet => "eps_net",
            BoundMethod::Thm2 => "thm2",
            BoundMethod::Thm3 => "thm3",
            BoundMethod::Hkz => "hkz",
            BoundMethod::MatrixThm4 => "matrix_thm4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub method: BoundMethod,
    pub radius: f64,
    /// Dimension coefficient where the method has `C₁·dim + C₂·L` form.
    pub c1: Option<f64>,
    /// `log(1/δ)` coefficient, same condition.
    pub c2: Option<f64>,
    /// The `ε` the radius was evaluated at, for parameterized methods.
    pub eps_used: Option<f64>,
}

fn assemble(method: BoundMethod, p: &BoundParams, dim: u32, c1: f64, c2: f64, eps: Option<f64>) -> BoundResult {
    let radius = p.sigma * (c1 * f64::from(dim) + c2 * p.log_inv_delta()).sqrt();
    BoundResult { method, radius, c1: Some(c1), c2: Some(c2), eps_used: eps }
}

/// One-dimensional bound from the two-sided Gaussian-style tail
/// `P(|X| > r) ≤ 2 e^{−r²/2σ²}`: `r = σ √(2 log 2 + 2 L)`.
pub fn radius_scalar(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    if p.n != 1 {
        return Err(Error::domain(format!("scalar bound applies only to n = 1, got n = {}", p.n)));
    }
    Ok(assemble(BoundMethod::Scalar, &p, 1, 2.0 * std::f64::consts::LN_2, 2.0, None))
}

/// Constants of the classical covering argument:
/// `C₁ = 2·log(1 + 2/(1−ε))/ε²`, `C₂ = 2/ε²`.
pub fn eps_net_constants(eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let e2 = eps * eps;
    Ok(((2.0 * (1.0 + 2.0 / (1.0 - eps)).ln()) / e2, 2.0 / e2))
}

/// Constants of the sphere-average argument:
/// `C₁ = log(1/(1−ε²))/ε²`, `C₂ = 2/ε²`.  Shares `C₂` with the covering
/// constants but always has the smaller `C₁`.
pub fn thm2_constants(eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let e2 = eps * eps;
    Ok((-(-e2).ln_1p() / e2, 2.0 / e2))
}

/// Radius with the covering-argument constants at the supplied `ε`.
pub fn radius_eps_net(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    let eps = p.require_eps()?;
    let (c1, c2) = eps_net_constants(eps)?;
    Ok(assemble(BoundMethod::EpsNet, &p, p.n, c1, c2, Some(eps)))
}

/// Radius with the sphere-average constants at the supplied `ε`.
pub fn radius_thm2(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    let eps = p.require_eps()?;
    let (c1, c2) = thm2_constants(eps)?;
    Ok(assemble(BoundMethod::Thm2, &p, p.n, c1, c2, Some(eps)))
}

/// The tail probability certified at radius `r` by the sphere-average
/// argument: `δ = min(1, (1−ε²)^{−n/2} e^{−ε²r²/(2σ²)})`; exact algebraic
/// inverse of [`radius_thm2`].
pub fn tail_delta_thm2(n: u32, sigma: f64, eps: f64, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dimension must be >= 1".to_string()));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    check_eps(eps)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::domain(format!("radius = {r} must be finite and >= 0")));
    }
    let e2 = eps * eps;
    let log_delta = -f64::from(n) / 2.0 * (-e2).ln_1p() - e2 * r * r / (2.0 * sigma * sigma);
    Ok(if log_delta >= 0.0 { 1.0 } else { log_delta.exp() })
}

/// Parameter-free radius `r = σ(√n + √(2L))`.
pub fn radius_thm3(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    let radius = p.sigma * (f64::from(p.n).sqrt() + (2.0 * p.log_inv_delta()).sqrt());
    Ok(BoundResult { method: BoundMethod::Thm3, radius, c1: None, c2: None, eps_used: None })
}

/// Reference radius `r = σ√(n + 2√(nL) + 2L)`, the tightest of the
/// compared closed forms.
pub fn radius_hkz(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    let nf = f64::from(p.n);
    let l = p.log_inv_delta();
    let radius = p.sigma * (nf + 2.0 * (nf * l).sqrt() + 2.0 * l).sqrt();
    Ok(BoundResult { method: BoundMethod::Hkz, radius, c1: None, c2: None, eps_used: None })
}

/// Operator-norm radius for an `m × n` sub-Gaussian matrix:
/// `r = σ √((log(1/(1−ε²))/ε⁴)(m+n) + (2/ε⁴)L)`.
pub fn radius_matrix_thm4(p: &BoundParams) -> Result<BoundResult> {
    let p = validated(p)?;
    let m = p.require_m()?;
    let eps = p.require_eps()?;
    let e2 = eps * eps;
    let (c1v, c2v) = thm2_constants(eps)?;
    let (c1, c2) = (c1v / e2, c2v / e2);
    Ok(assemble(BoundMethod::MatrixThm4, &p, m + p.n, c1, c2, Some(eps)))
}

fn validated(p: &BoundParams) -> Result<BoundParams> {
    let mut q = BoundParams::new(p.n, p.sigma, p.delta)?;
    if let Some(m) = p.m {
        q = q.with_m(m)?;
    }
    if let Some(eps) = p.eps {
        q = q.with_eps(eps)?;
    }
    Ok(q)
}

/// ε-tolerance of the golden-section searches.
const EPS_SEARCH_TOL: f64 = 1e-10;
const PRESCAN_POINTS: usize = 1000;

/// Minimizes a smooth objective over (0, 1): a 1000-point pre-scan locates
/// the bracket and checks unimodality (the searched objectives diverge at
/// both endpoints but are not proven unimodal); golden-section refines the
/// bracket, falling back to the grid argmin if the scan saw more than one
/// descent-ascent alternation.
pub(crate) fn minimize_over_unit_interval(obj: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 1.0 / (PRESCAN_POINTS as f64 + 1.0);
    let values: Vec<f64> = (0..PRESCAN_POINTS).map(|i| obj((i as f64 + 1.0) * step)).collect();
    let best_i = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale.max(1.0);
    let mut ascending = false;
    let mut unimodal = true;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > tol {
            ascending = true;
        } else if d < -tol && ascending {
            unimodal = false;
            break;
        }
    }
    let x_best = (best_i as f64 + 1.0) * step;
    if !unimodal {
        return (x_best, values[best_i]);
    }
    let lo = if best_i == 0 { step * 1e-6 } else { x_best - step };
    let hi = if best_i == PRESCAN_POINTS - 1 { 1.0 - step * 1e-6 } else { x_best + step };
    golden_section(obj, lo, hi)
}

fn golden_section(obj: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = obj(c);
    let mut fd = obj(d);
    while b - a > EPS_SEARCH_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = obj(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, obj(x))
}

/// Minimizes [`radius_thm2`] over `ε ∈ (0, 1)`, returning `(ε*, radius)`.
pub fn optimize_eps_thm2(n: u32, sigma: f64, delta: f64) -> Result<(f64, f64)> {
    let p = BoundParams::new(n, sigma, delta)?;
    let nf = f64::from(n);
    let l = p.log_inv_delta();
    let (eps, _) = minimize_over_unit_interval(|e| {
        let e2 = e * e;
        (-(-e2).ln_1p() * nf + 2.0 * l) / e2
    });
    let radius = radius_thm2(&p.with_eps(eps)?)?.radius;
    Ok((eps, radius))
}

/// Minimizes [`radius_eps_net`] over `ε ∈ (0, 1)`, returning `(ε*, radius)`.
pub fn optimize_eps_net(n: u32, sigma: f64, delta: f64) -> Result<(f64, f64)> {
    let p = BoundParams::new(n, sigma, delta)?;
    let nf = f64::from(n);
    let l = p.log_inv_delta();
    let (eps, _) = minimize_over_unit_interval(|e| {
        let e2 = e * e;
        (2.0 * (1.0 + 2.0 / (1.0 - e)).ln() * nf + 2.0 * l) / e2
    });
    let radius = radius_eps_net(&p.with_eps(eps)?)?.radius;
    Ok((eps, radius))
}

/// Minimizes [`radius_matrix_thm4`] over `ε ∈ (0, 1)`, returning
/// `(ε*, radius)`; symmetric in `(m, n)` since only `m + n` enters.
pub fn optimize_eps_matrix(m: u32, n: u32, sigma: f64, delta: f64) -> Result<(f64, f64)> {
    let p = BoundParams::new(n, sigma, delta)?.with_m(m)?;
    let dim = f64::from(m + n);
    let l = p.log_inv_delta();
    let (eps, _) = minimize_over_unit_interval(|e| {
        let e2 = e * e;
        (-(-e2).ln_1p() * dim + 2.0 * l) / (e2 * e2)
    });
    let radius = radius_matrix_thm4(&p.with_eps(eps)?)?.radius;
    Ok((eps, radius))
}

/// Evaluates every vector method on the same parameters, in a stable
/// order: scalar (only when `n = 1`), covering bound (supplied or
/// optimized `ε`), sphere-average bound (optimized `ε`), then the two
/// parameter-free radii.
pub fn compare_methods(p: &BoundParams) -> Result<Vec<BoundResult>> {
    let p = validated(p)?;
    let mut out = Vec::with_capacity(5);
    if p.n == 1 {
        out.push(radius_scalar(&p)?);
    }
    let net_eps = match p.eps {
        Some(e) => e,
        None => optimize_eps_net(p.n, p.sigma, p.delta)?.0,
    };
    out.push(radius_eps_net(&BoundParams { eps: Some(net_eps), ..p })?);
    let (thm2_eps, _) = optimize_eps_thm2(p.n, p.sigma, p.delta)?;
    out.push(radius_thm2(&BoundParams { eps: Some(thm2_eps), ..p })?);
    out.push(radius_thm3(&p)?);
    out.push(radius_hkz(&p)?);
    Ok(out)
}
