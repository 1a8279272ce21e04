//! Offspring distribution {pi_k}: generating function f, the ratio function
//! h(s) = (1 - f(s))/(1 - s), extinction root, and tail diagnostics.
//!
//! Everything that has to stay accurate when the argument is exponentially
//! close to 1 is expressed through `gap(w) = mu - h(1 - w)`, evaluated
//! directly in the small quantity `w`. The `heavylog` family has infinite
//! support with sums carried out by an exact prefix plus an Euler-Maclaurin
//! analytic tail, so its slowly varying behaviour survives down to
//! w = e^-200 and below.

use crate::error::{Error, Result};
use crate::numeric::{self, fit_line, UniformPchip};
use rayon::prelude::*;
use std::sync::Arc;

/// Classification of E(Z log Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XLogXClass {
    Finite,
    Infinite,
    Undetermined,
}

/// Default switch point between exact summation and the analytic tail for
/// heavy-tailed families. Sums are split-point independent (tested), so this
/// only trades construction time against loop length.
pub const HEAVYLOG_KMAX_DEFAULT: u64 = 100_000_000;

const GAP_V_MAX: f64 = 200.0;
const GAP_DV: f64 = 0.02;
const EXACT_CUT_GAP: u64 = 2048;
const EXACT_CUT_NORM: u64 = 8192;

#[derive(Debug)]
struct HeavyLog {
    alpha: f64,
    mu: f64,
    c: f64,
    pi0: f64,
    k_max: u64,
    /// gap(v) = mu - h(1 - e^-v) tabulated on a uniform v grid.
    gap_table: UniformPchip,
    /// Local log-log slope at v_max, used for the power-law extension.
    gap_end_slope: f64,
    gap_end_value: f64,
}

#[derive(Debug, Clone)]
enum Family {
    Binary,
    Geometric { p: f64 },
    Table { probs: Vec<f64> },
    HeavyLog(Arc<HeavyLog>),
}

/// An offspring law with mean mu > 1 and genuine branching (pi0 + pi1 < 1).
#[derive(Debug, Clone)]
pub struct OffspringLaw {
    family: Family,
    mu: f64,
    q: f64,
}

impl PartialEq for OffspringLaw {
    fn eq(&self, other: &Self) -> bool {
        match (&self.family, &other.family) {
            (Family::Binary, Family::Binary) => true,
            (Family::Geometric { p: a }, Family::Geometric { p: b }) => a == b,
            (Family::Table { probs: a }, Family::Table { probs: b }) => a == b,
            (Family::HeavyLog(a), Family::HeavyLog(b)) => {
                a.alpha == b.alpha && a.mu == b.mu && a.k_max == b.k_max
            }
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Heavy-tail summation engine.
//
// a(x) = x^-2 (ln x)^-(1+alpha); sums of a(k) * g(k) over k >= 2 are an exact
// prefix plus Euler-Maclaurin: sum_{k=m}^inf phi(k) =
// int_m^inf phi + phi(m)/2 - phi'(m)/12 + O(phi''').
// ---------------------------------------------------------------------------

/// Infinite power sum  sum_{k=k0}^inf k^-r (ln k)^-b  for r >= 1 (b > 1 when
/// r == 1). Split-point independent to ~1e-13 relative.
fn heavy_power_sum(r: f64, b: f64, k0: u64, exact_until: u64) -> f64 {
    assert!(k0 >= 2);
    assert!(r > 1.0 || b > 1.0, "divergent power sum requested");
    let phi = |x: f64| x.powf(-r) * x.ln().powf(-b);
    let mut s = 0.0;
    let cut = exact_until.max(k0 + 1);
    for k in k0..=cut {
        s += phi(k as f64);
    }
    let m = (cut + 1) as f64;
    let integral = if r == 1.0 {
        // Closed form: int_m^inf dx / (x (ln x)^b) = (ln m)^(1-b) / (b-1).
        m.ln().powf(1.0 - b) / (b - 1.0)
    } else {
        // x = e^v; integrand decays like e^((1-r) v).
        let g = |v: f64| ((1.0 - r) * v).exp() * v.powf(-b);
        let mut acc = 0.0;
        let mut v = m.ln();
        loop {
            let piece = numeric::integrate_gl16(&g, v, v + 2.0);
            acc += piece;
            v += 2.0;
            if piece.abs() <= 1e-17 * acc.abs() || v > 1500.0 {
                break;
            }
        }
        acc
    };
    let dphi = |x: f64| -phi(x) * (r / x + b / (x * x.ln()));
    s + integral + 0.5 * phi(m) - dphi(m) / 12.0
}

/// Finite-range variant of the above with analytic integral (r == 1 only),
/// used for partial-sum divergence diagnostics.
fn heavy_log_partial(b: f64, k0: u64, k1: u64, exact_until: u64) -> f64 {
    assert!(k0 >= 2 && k1 >= k0);
    let phi = |x: f64| x.ln().powf(-b) / x;
    if k1 <= exact_until {
        return (k0..=k1).map(|k| phi(k as f64)).sum();
    }
    let mut s: f64 = (k0..=exact_until).map(|k| phi(k as f64)).sum();
    let (m, n) = ((exact_until + 1) as f64, k1 as f64);
    let integral = if b == 1.0 {
        (n.ln() / m.ln()).ln()
    } else {
        (n.ln().powf(1.0 - b) - m.ln().powf(1.0 - b)) / (1.0 - b)
    };
    let dphi = |x: f64| -phi(x) * (1.0 / x + b / (x * x.ln()));
    s += integral + 0.5 * (phi(m) + phi(n)) + (dphi(n) - dphi(m)) / 12.0;
    s
}

/// rho(x, w) = x - (1 - (1-w)^x)/w, the summand of gap(w) against pi.
/// Two-regime evaluation: Taylor for x*w small, expm1 otherwise. `l` must be
/// ln(1 - w).
#[inline]
fn rho(x: f64, w: f64, l: f64) -> f64 {
    let xw = x * w;
    if xw <= 1e-3 {
        let c2 = 0.5 * x * (x - 1.0);
        c2 * w * (1.0 - (x - 2.0) * w / 3.0 + (x - 2.0) * (x - 3.0) * w * w / 12.0)
    } else {
        x + (x * l).exp_m1() / w
    }
}

/// sum_{k>=2} a(k) rho(k, w) for the heavylog weight a(k); gap(w) = c * this.
fn gap_raw_heavylog(alpha: f64, w: f64, exact_cut: u64) -> f64 {
    let l = if w >= 1.0 { f64::NEG_INFINITY } else { (-w).ln_1p() };
    let a = |x: f64| x.powi(-2) * x.ln().powf(-(1.0 + alpha));
    let phi = |x: f64| a(x) * rho(x, w, l);
    let mut s = 0.0;
    for k in 2..=exact_cut {
        s += phi(k as f64);
    }
    let m = (exact_cut + 1) as f64;
    // Tail integral. Beyond x* = 60/w the factor (1-w)^x is dead and
    // rho(x, w) = x - 1/w exactly, which integrates in closed form against
    // the x^-1 part and numerically (fast decay) against the x^-2 part.
    let x_star = (60.0 / w).max(m);
    let mut integral = 0.0;
    if x_star > m {
        let g = |v: f64| {
            let x = v.exp();
            phi(x) * x
        };
        let mut v = m.ln();
        let v_end = x_star.ln();
        while v < v_end {
            let hi = (v + 2.0).min(v_end);
            integral += numeric::integrate_gl16(&g, v, hi);
            v = hi;
        }
    }
    let b = 1.0 + alpha;
    integral += x_star.ln().powf(-alpha) / alpha;
    // - (1/w) int_{x*}^inf x^-2 (ln x)^-b dx, numerically (e^-v decay).
    let g2 = |v: f64| (-v).exp() * v.powf(-b);
    let mut j = 0.0;
    let mut v = x_star.ln();
    loop {
        let piece = numeric::integrate_gl16(&g2, v, v + 2.0);
        j += piece;
        v += 2.0;
        if piece.abs() <= 1e-17 * j.abs() || v > 1500.0 {
            break;
        }
    }
    integral -= j / w;
    let dphi = |x: f64| (phi(x + 0.5) - phi(x - 0.5)) * 1.0; // h = 0.5 central
    s + integral + 0.5 * phi(m) - dphi(m) / 12.0
}

impl HeavyLog {
    fn build(alpha: f64, mu: f64, k_max: u64) -> Result<Arc<Self>> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "heavylog alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(mu > 1.0) {
            return Err(Error::Domain(format!(
                "heavylog mean must exceed 1, got {mu}"
            )));
        }
        let b = 1.0 + alpha;
        let exact = EXACT_CUT_NORM.min(k_max);
        let s_mean = heavy_power_sum(1.0, b, 2, exact); // sum k^-1 (ln k)^-b
        let s_mass = heavy_power_sum(2.0, b, 2, exact); // sum k^-2 (ln k)^-b
        let c = mu / s_mean;
        let pi0 = 1.0 - c * s_mass;
        if !(pi0 >= -1e-12) {
            return Err(Error::Domain(format!(
                "heavylog:{alpha},{mu} infeasible: pi_0 = {pi0:.6e} < 0 (mean too large for this alpha)"
            )));
        }
        let pi0 = pi0.max(0.0);
        let n = (GAP_V_MAX / GAP_DV).round() as usize + 1;
        let cut = EXACT_CUT_GAP.min(k_max);
        let vals: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| {
                let v = j as f64 * GAP_DV;
                c * gap_raw_heavylog(alpha, (-v).exp(), cut)
            })
            .collect();
        let gap_end_value = vals[n - 1];
        // Log-log slope over the last factor-of-two of the grid.
        let lo = ((GAP_V_MAX * 0.5) / GAP_DV).round() as usize;
        let xs: Vec<f64> = (lo..n).map(|j| (j as f64 * GAP_DV).ln()).collect();
        let ys: Vec<f64> = (lo..n).map(|j| vals[j].ln()).collect();
        let (gap_end_slope, _) = fit_line(&xs, &ys);
        let gap_table = UniformPchip::new(0.0, GAP_DV, vals);
        Ok(Arc::new(HeavyLog {
            alpha,
            mu,
            c,
            pi0,
            k_max,
            gap_table,
            gap_end_slope,
            gap_end_value,
        }))
    }

    fn gap(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let v = -w.ln();
        if v <= 0.0 {
            return self.gap_table.eval(0.0);
        }
        if v <= GAP_V_MAX {
            self.gap_table.eval(v)
        } else {
            self.gap_end_value * (v / GAP_V_MAX).powf(self.gap_end_slope)
        }
    }
}

impl OffspringLaw {
    /// Parses the locked grammar
    /// `binary | geometric:<p> | table:<p0>,<p1>,... | heavylog:<alpha>,<mu>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest, rest_pos) = match spec.find(':') {
            Some(i) => (&spec[..i], &spec[i + 1..], i + 1),
            None => (spec, "", spec.len()),
        };
        let num = |s: &str, pos: usize| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Parse {
                pos,
                msg: format!("expected a number, found `{s}`"),
            })
        };
        match head {
            "binary" => {
                if !rest.is_empty() {
                    return Err(Error::Parse {
                        pos: rest_pos,
                        msg: "binary takes no parameters".into(),
                    });
                }
                Ok(Self::binary())
            }
            "geometric" => {
                let p = num(rest, rest_pos)?;
                Self::geometric(p)
            }
            "table" => {
                let mut probs = Vec::new();
                let mut pos = rest_pos;
                for part in rest.split(',') {
                    probs.push(num(part, pos)?);
                    pos += part.len() + 1;
                }
                Self::from_table(probs)
            }
            "heavylog" => {
                let mut it = rest.splitn(2, ',');
                let a_str = it.next().unwrap_or("");
                let m_str = it.next().ok_or(Error::Parse {
                    pos: rest_pos + a_str.len(),
                    msg: "heavylog needs two parameters: alpha,mu".into(),
                })?;
                let alpha = num(a_str, rest_pos)?;
                let mu = num(m_str, rest_pos + a_str.len() + 1)?;
                Self::heavy_log(alpha, mu)
            }
            other => Err(Error::Parse {
                pos: 0,
                msg: format!(
                    "unknown offspring family `{other}` (expected binary | geometric | table | heavylog)"
                ),
            }),
        }
    }

    /// Deterministic binary splitting: pi_2 = 1.
    pub fn binary() -> Self {
        OffspringLaw {
            family: Family::Binary,
            mu: 2.0,
            q: 0.0,
        }
    }

    /// Geometric offspring pi_k = (1-p) p^k with f(s) = (1-p)/(1-ps).
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("geometric p must be in (0,1), got {p}")));
        }
        let mu = p / (1.0 - p);
        if mu <= 1.0 {
            return Err(Error::Domain(format!(
                "geometric p = {p} gives mean {mu} <= 1 (subcritical)"
            )));
        }
        Ok(OffspringLaw {
            family: Family::Geometric { p },
            mu,
            q: (1.0 - p) / p,
        })
    }

    /// Explicit finite table pi_0..pi_K; entries below 1e-18 are kept.
    pub fn from_table(mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Domain("table needs at least pi_0, pi_1".into()));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Domain("table probabilities must be >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "table probabilities sum to {total}, expected 1"
            )));
        }
        for p in &mut probs {
            *p /= total;
        }
        let mu: f64 = probs.iter().enumerate().map(|(k, &p)| k as f64 * p).sum();
        if mu <= 1.0 {
            return Err(Error::Domain(format!("table mean {mu} <= 1 (subcritical)")));
        }
        if probs[0] + probs[1] >= 1.0 - 1e-15 {
            return Err(Error::Domain(
                "pi_0 + pi_1 must be < 1 for genuine branching".into(),
            ));
        }
        let mut law = OffspringLaw {
            family: Family::Table { probs },
            mu,
            q: 0.0,
        };
        law.q = law.solve_extinction_root()?;
        Ok(law)
    }

    /// Heavy-tailed family pi_k = c k^-2 (ln k)^-(1+alpha) for k >= 2, with
    /// pi_0 and c solved so the law is normalized with mean mu. Its
    /// E(Z log Z) diverges for every alpha in (0,1).
    pub fn heavy_log(alpha: f64, mu: f64) -> Result<Self> {
        let hl = HeavyLog::build(alpha, mu, HEAVYLOG_KMAX_DEFAULT)?;
        let mut law = OffspringLaw {
            family: Family::HeavyLog(hl),
            mu,
            q: 0.0,
        };
        law.q = law.solve_extinction_root()?;
        Ok(law)
    }

    /// Formats the law back to its spec string; `parse` of the result gives
    /// an equal law.
    pub fn spec_string(&self) -> String {
        match &self.family {
            Family::Binary => "binary".into(),
            Family::Geometric { p } => format!("geometric:{}", numeric::fmt_real(*p)),
            Family::Table { probs } => {
                let parts: Vec<String> = probs.iter().map(|&p| numeric::fmt_real(p)).collect();
                format!("table:{}", parts.join(","))
            }
            Family::HeavyLog(hl) => format!(
                "heavylog:{},{}",
                numeric::fmt_real(hl.alpha),
                numeric::fmt_real(hl.mu)
            ),
        }
    }

    /// Mean number of offspring, mu = h(1).
    pub fn mean(&self) -> f64 {
        self.mu
    }

    /// The unique q in [0,1) with h(q) = 1 (equivalently f(q) = q).
    pub fn extinction_root(&self) -> f64 {
        self.q
    }

    /// pi_k for a single k.
    pub fn prob(&self, k: u64) -> f64 {
        match &self.family {
            Family::Binary => {
                if k == 2 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Geometric { p } => (1.0 - p) * p.powi(k as i32),
            Family::Table { probs } => probs.get(k as usize).copied().unwrap_or(0.0),
            Family::HeavyLog(hl) => match k {
                0 => hl.pi0,
                1 => 0.0,
                _ => {
                    let x = k as f64;
                    hl.c * x.powi(-2) * x.ln().powf(-(1.0 + hl.alpha))
                }
            },
        }
    }

    /// Generating function f(s) = sum pi_k s^k on [0,1].
    pub fn pgf(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("pgf argument {s} outside [0,1]")));
        }
        Ok(match &self.family {
            Family::Binary => s * s,
            Family::Geometric { p } => (1.0 - p) / (1.0 - p * s),
            Family::Table { probs } => probs.iter().rev().fold(0.0, |acc, &p| acc * s + p),
            Family::HeavyLog(_) => {
                if s == 1.0 {
                    1.0
                } else {
                    let w = 1.0 - s;
                    1.0 - w * self.h_one_minus(w)
                }
            }
        })
    }

    /// h(s) = (1 - f(s))/(1 - s), with h(1) = mu taken as the limit.
    pub fn h(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("h argument {s} outside [0,1]")));
        }
        Ok(self.h_one_minus(1.0 - s))
    }

    /// h(1 - w) evaluated stably in the distance-from-one variable; exact
    /// for w = 0 (returns mu).
    pub fn h_one_minus(&self, w: f64) -> f64 {
        self.mu - self.gap_one_minus(w)
    }

    /// gap(w) = mu - h(1 - w) >= 0, the Uchiyama-condition left-hand side.
    /// Stable for w down to underflow.
    pub fn gap_one_minus(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let w = w.min(1.0);
        match &self.family {
            Family::Binary => w,
            Family::Geometric { p } => {
                // mu - p/(1 - p(1-w)) = p^2 w / ((1-p)(1-p+pw))
                p * p * w / ((1.0 - p) * (1.0 - p + p * w))
            }
            Family::Table { probs } => {
                let l = if w >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    (-w).ln_1p()
                };
                probs
                    .iter()
                    .enumerate()
                    .skip(2)
                    .map(|(k, &p)| p * rho(k as f64, w, l))
                    .sum()
            }
            Family::HeavyLog(hl) => hl.gap(w),
        }
    }

    /// tail_gap(s) = mu - h(1 - s) for s in (0, 1]; nonincreasing as s drops
    /// to 0 with limit 0.
    pub fn tail_gap(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("tail_gap argument {s} outside (0,1]")));
        }
        Ok(self.gap_one_minus(s))
    }

    fn solve_extinction_root(&self) -> Result<f64> {
        if self.mu <= 1.0 {
            return Err(Error::Hypothesis(format!(
                "extinction root needs mu > 1, got {}",
                self.mu
            )));
        }
        if self.prob(0) == 0.0 {
            return Ok(0.0);
        }
        // h is nondecreasing with h(0) = 1 - pi_0 < 1 and h(1) = mu > 1.
        numeric::solve_bracketed(
            |s| self.h_one_minus(1.0 - s) - 1.0,
            0.0,
            1.0 - 1e-14,
            1e-13,
            0.0,
            300,
        )
    }

    /// Inverse PGF: the unique s in [q,1] with f(s) = v, for v in [q,1].
    pub fn pgf_inverse(&self, v: f64) -> Result<f64> {
        let q = self.q;
        if !(v >= q - 1e-12 && v <= 1.0) {
            return Err(Error::Domain(format!(
                "pgf_inverse argument {v} outside [q,1] = [{q},1]"
            )));
        }
        let v = v.clamp(q, 1.0);
        if v == 1.0 {
            return Ok(1.0);
        }
        match &self.family {
            Family::Binary => Ok(v.sqrt()),
            Family::Geometric { p } => Ok((1.0 - (1.0 - p) / v) / p),
            _ => {
                if 1.0 - v < 1e-3 {
                    // Near one, invert in the w variable to keep full
                    // relative precision.
                    return Ok(1.0 - self.inverse_one_minus(1.0 - v));
                }
                numeric::solve_bracketed(
                    |s| self.pgf(s).unwrap() - v,
                    q,
                    1.0,
                    f64::MIN_POSITIVE,
                    1e-15,
                    300,
                )
            }
        }
    }

    /// Solves w' h(1 - w') = w for w', i.e. 1 - f^-1(1 - w) without
    /// cancellation. Exact relative accuracy down to underflow.
    pub fn inverse_one_minus(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        if let Family::Binary = self.family {
            // w'(2 - w') = w
            return w / (1.0 + (1.0 - w).sqrt());
        }
        if let Family::Geometric { p } = self.family {
            // h(1-w') = p/(1-p+pw'); solve the quadratic p w'^2 + (1-p) w' - (1-p) w = 0.
            let a = p;
            let b = 1.0 - p;
            let disc = b * b + 4.0 * a * b * w;
            return 2.0 * b * w / (b + disc.sqrt());
        }
        // h in [1, mu] brackets w' in [w/mu, w].
        let lo = w / self.mu * 0.999_999;
        let hi = (w * 1.000_001).min(1.0 - self.q);
        numeric::solve_bracketed(
            |wp| wp * self.h_one_minus(wp) - w,
            lo,
            hi,
            0.0,
            1e-15,
            300,
        )
        .expect("inverse_one_minus bracket is guaranteed by 1 <= h <= mu")
    }

    /// Whether E(Z+ log Z+) is finite; parametric families are classified
    /// analytically.
    pub fn xlogx(&self) -> XLogXClass {
        match &self.family {
            Family::Binary | Family::Table { .. } => XLogXClass::Finite,
            Family::Geometric { .. } => XLogXClass::Finite,
            Family::HeavyLog(_) => XLogXClass::Infinite,
        }
    }

    /// Partial sum sum_{2 <= k <= K} k ln k pi_k, the divergence diagnostic
    /// behind `xlogx`.
    pub fn xlogx_partial_sum(&self, k_cap: u64) -> f64 {
        match &self.family {
            Family::Binary => {
                if k_cap >= 2 {
                    2.0 * 2f64.ln()
                } else {
                    0.0
                }
            }
            Family::Geometric { p } => {
                let mut s = 0.0;
                let mut pw = p * p * (1.0 - p);
                for k in 2..=k_cap.min(10_000) {
                    let x = k as f64;
                    s += x * x.ln() * pw;
                    pw *= p;
                    if pw < 1e-300 {
                        break;
                    }
                }
                s
            }
            Family::Table { probs } => probs
                .iter()
                .enumerate()
                .skip(2)
                .take_while(|(k, _)| *k as u64 <= k_cap)
                .map(|(k, &p)| k as f64 * (k as f64).ln() * p)
                .sum(),
            Family::HeavyLog(hl) => {
                if k_cap < 2 {
                    return 0.0;
                }
                // k ln k * c k^-2 (ln k)^-(1+a) = c k^-1 (ln k)^-a
                hl.c * heavy_log_partial(hl.alpha, 2, k_cap, EXACT_CUT_NORM.min(hl.k_max))
            }
        }
    }

    pub(crate) fn heavylog_params(&self) -> Option<(f64, f64, f64)> {
        match &self.family {
            Family::HeavyLog(hl) => Some((hl.alpha, hl.c, hl.pi0)),
            _ => None,
        }
    }

    /// Upper support bound for finite-support laws.
    pub(crate) fn finite_support(&self) -> Option<usize> {
        match &self.family {
            Family::Binary => Some(2),
            Family::Table { probs } => Some(probs.len() - 1),
            _ => None,
        }
    }

    pub(crate) fn is_geometric(&self) -> Option<f64> {
        match &self.family {
            Family::Geometric { p } => Some(*p),
            _ => None,
        }
    }

    /// P(Z+ > k) for the heavylog tail, exact via the analytic tail sum.
    pub(crate) fn heavylog_tail_mass(&self, k: u64) -> f64 {
        match &self.family {
            Family::HeavyLog(hl) => {
                hl.c * heavy_power_sum(2.0, 1.0 + hl.alpha, k + 1, (k + 1).max(256))
            }
            _ => 0.0,
        }
    }
}

/// Report of the Uchiyama-condition tail fit produced by
/// `uchiyama_estimate` in the laplace module.
#[derive(Debug, Clone)]
pub struct UchiyamaReport {
    /// -(fitted slope) of log gap against log(-log s).
    pub alpha_fit: f64,
    /// Quadratic coefficient of the same regression; near zero for a
    /// genuine power law, large for exponential decay.
    pub curvature: f64,
    pub rms_residual: f64,
    /// True when the power-law model is adequate (small curvature).
    pub power_law_ok: bool,
    /// True when the sampled gap decreased monotonically (no numeric noise).
    pub monotone: bool,
    /// (u, gap(e^-u), residual from the power fit): the residual curve is
    /// the slowly varying factor, reported but never parameterized.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Least-squares estimate of the tail exponent alpha from
/// gap(e^-u) ~ u^-alpha over u in [u_lo, u_hi].
pub fn fit_tail_exponent(law: &OffspringLaw, u_lo: f64, u_hi: f64, n: usize) -> UchiyamaReport {
    assert!(u_hi > u_lo && u_lo > 0.0 && n >= 3);
    let ratio = (u_hi / u_lo).powf(1.0 / (n - 1) as f64);
    let mut us = Vec::with_capacity(n);
    let mut u = u_lo;
    for _ in 0..n {
        us.push(u);
        u *= ratio;
    }
    let gaps: Vec<f64> = us.iter().map(|&u| law.gap_one_minus((-u).exp())).collect();
    let xs: Vec<f64> = us.iter().map(|&u| u.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|&g| g.ln()).collect();
    let (slope, intercept) = fit_line(&xs, &ys);
    let (_, _, c2) = numeric::fit_quadratic(&xs, &ys);
    let mut rms = 0.0;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let resid = ys[i] - (intercept + slope * xs[i]);
        rms += resid * resid;
        samples.push((us[i], gaps[i], resid));
    }
    let rms_residual = (rms / n as f64).sqrt();
    let monotone = gaps.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12));
    UchiyamaReport {
        alpha_fit: -slope,
        curvature: c2,
        rms_residual,
        power_law_ok: c2.abs() <= 0.5,
        monotone,
        samples,
    }
}
