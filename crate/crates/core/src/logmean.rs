//! Log-domain sample mean of `exp(a_j)` with a delta-method standard error.
//!
//! Exponents are accumulated per chunk as running log-sum-exp of `a_j` and
//! `2·a_j`; chunk partials are then merged by a pairwise tree in index
//! order, so the reduction is independent of scheduling and reproducible
//! to the bit.  Nothing is ever exponentiated before its max is known, so
//! exponents near ±700 and beyond are handled without overflow.

/// Log-sum-exp partials of one chunk: `l1 = log Σ e^{a_j}`,
/// `l2 = log Σ e^{2 a_j}`, and the number of terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LsePartial {
    pub l1: f64,
    pub l2: f64,
    pub count: u64,
}

/// Streaming accumulator for one chunk of exponents.
#[derive(Debug, Clone)]
pub(crate) struct ExponentAccumulator {
    max1: f64,
    sum1: f64,
    max2: f64,
    sum2: f64,
    count: u64,
}

impl ExponentAccumulator {
    pub fn new() -> Self {
        ExponentAccumulator {
            max1: f64::NEG_INFINITY,
            sum1: 0.0,
            max2: f64::NEG_INFINITY,
            sum2: 0.0,
            count: 0,
        }
    }

    pub fn push(&mut self, a: f64) {
        stream_lse(&mut self.max1, &mut self.sum1, a);
        stream_lse(&mut self.max2, &mut self.sum2, 2.0 * a);
        self.count += 1;
    }

    pub fn finish(self) -> LsePartial {
        assert!(self.count > 0, "empty chunk");
        LsePartial {
            l1: self.max1 + self.sum1.ln(),
            l2: self.max2 + self.sum2.ln(),
            count: self.count,
        }
    }
}

fn stream_lse(max: &mut f64, sum: &mut f64, a: f64) {
    if a <= *max {
        *sum += (a - *max).exp();
    } else {
        *sum = *sum * (*max - a).exp() + 1.0;
        *max = a;
    }
}

fn lse2(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

fn merge(a: LsePartial, b: LsePartial) -> LsePartial {
    LsePartial { l1: lse2(a.l1, b.l1), l2: lse2(a.l2, b.l2), count: a.count + b.count }
}

/// Pairwise reduction in index order; the combining sequence depends only
/// on the number of partials.
pub(crate) fn tree_reduce(mut parts: Vec<LsePartial>) -> Option<LsePartial> {
    if parts.is_empty() {
        return None;
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|pair| if pair.len() == 2 { merge(pair[0], pair[1]) } else { pair[0] })
            .collect();
    }
    Some(parts[0])
}

/// `ln(1 − e^d)` for `d ≤ 0`, branching at `−ln 2` to keep full precision
/// on both sides; returns `−∞` when `d ≥ 0` (zero sample variance up to
/// rounding).
fn ln_one_minus_exp(d: f64) -> f64 {
    if d >= 0.0 {
        f64::NEG_INFINITY
    } else if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}

/// Log of the sample mean of `e^{a_j}` and the delta-method standard error
/// of that log.
///
/// With `N` terms, log mean = `l1 − ln N`; the sample variance of the
/// weights is `e^{l2 − ln(N−1)}·(1 − e^d)` with `d = 2 l1 − ln N − l2 ≤ 0`
/// (Cauchy–Schwarz), and `SE(log mean) = SE(mean)/mean` — all assembled in
/// log domain so huge weights cannot overflow.
pub(crate) fn log_mean_with_se(p: LsePartial) -> (f64, f64) {
    let n = p.count as f64;
    let log_mean = p.l1 - n.ln();
    if p.count < 2 {
        return (log_mean, f64::INFINITY);
    }
    let d = 2.0 * p.l1 - n.ln() - p.l2;
    let ln_var_factor = ln_one_minus_exp(d);
    if ln_var_factor == f64::NEG_INFINITY {
        return (log_mean, 0.0);
    }
    let half_ln_var = 0.5 * (p.l2 - (n - 1.0).ln() + ln_var_factor);
    let se = (half_ln_var - 0.5 * n.ln() - log_mean).exp();
    (log_mean, se)
}
