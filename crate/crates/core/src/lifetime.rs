//! Lifetime distribution G, the Malthusian parameter beta, the tilted law
//! G_beta(t) = mu int_0^t e^{-beta u} dG(u), and nu = 1/mean(G_beta).

use crate::error::{Error, Result};
use crate::numeric;
use rand::Rng;
use statrs::function::gamma::gamma_lr;
use std::path::Path;

/// Lattice classification of a lifetime law. `Unknown` carries the scanned
/// minimum of |1 - char.fn.| for empirical laws; it is a heuristic only and
/// is never upgraded to strongly-non-lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticeClass {
    StronglyNonLattice,
    Lattice,
    Unknown { scanned_min: f64 },
}

#[derive(Debug, Clone)]
pub enum LifetimeLaw {
    Dirac { tau: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { a: f64, b: f64 },
    Empirical { path: String, ts: Vec<f64>, jumps: Vec<f64> },
}

impl PartialEq for LifetimeLaw {
    fn eq(&self, other: &Self) -> bool {
        use LifetimeLaw::*;
        match (self, other) {
            (Dirac { tau: a }, Dirac { tau: b }) => a == b,
            (Exponential { rate: a }, Exponential { rate: b }) => a == b,
            (Gamma { shape: s1, rate: r1 }, Gamma { shape: s2, rate: r2 }) => {
                s1 == s2 && r1 == r2
            }
            (Uniform { a: a1, b: b1 }, Uniform { a: a2, b: b2 }) => a1 == a2 && b1 == b2,
            (
                Empirical { ts: t1, jumps: j1, .. },
                Empirical { ts: t2, jumps: j2, .. },
            ) => t1 == t2 && j1 == j2,
            _ => false,
        }
    }
}

impl LifetimeLaw {
    /// Parses `dirac:<tau> | exp:<lambda> | gamma:<shape>,<rate> |
    /// uniform:<a>,<b> | empirical:<path>`.
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
        let two = |rest: &str| -> Result<(f64, f64)> {
            let mut it = rest.splitn(2, ',');
            let a_str = it.next().unwrap_or("");
            let b_str = it.next().ok_or(Error::Parse {
                pos: rest_pos + a_str.len(),
                msg: "expected two comma-separated parameters".into(),
            })?;
            Ok((num(a_str, rest_pos)?, num(b_str, rest_pos + a_str.len() + 1)?))
        };
        match head {
            "dirac" => {
                let tau = num(rest, rest_pos)?;
                if tau <= 0.0 {
                    return Err(Error::Domain(format!("dirac tau must be > 0, got {tau}")));
                }
                Ok(LifetimeLaw::Dirac { tau })
            }
            "exp" => {
                let rate = num(rest, rest_pos)?;
                if rate <= 0.0 {
                    return Err(Error::Domain(format!("exp rate must be > 0, got {rate}")));
                }
                Ok(LifetimeLaw::Exponential { rate })
            }
            "gamma" => {
                let (shape, rate) = two(rest)?;
                if shape <= 0.0 || rate <= 0.0 {
                    return Err(Error::Domain(format!(
                        "gamma parameters must be > 0, got shape={shape}, rate={rate}"
                    )));
                }
                Ok(LifetimeLaw::Gamma { shape, rate })
            }
            "uniform" => {
                let (a, b) = two(rest)?;
                if !(a >= 0.0 && b > a) {
                    return Err(Error::Domain(format!(
                        "uniform needs 0 <= a < b, got a={a}, b={b}"
                    )));
                }
                Ok(LifetimeLaw::Uniform { a, b })
            }
            "empirical" => Self::load_empirical(rest),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!(
                    "unknown lifetime family `{other}` (expected dirac | exp | gamma | uniform | empirical)"
                ),
            }),
        }
    }

    /// Loads an empirical CDF from a two-column CSV `t,G` with strictly
    /// increasing t and G nondecreasing into [0,1], reaching 1 at the end.
    pub fn load_empirical(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(Path::new(path))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim().eq_ignore_ascii_case("t,g") => {}
            other => {
                return Err(Error::Domain(format!(
                    "empirical file {path}: expected header `t,G`, found {other:?}"
                )))
            }
        }
        let mut ts = Vec::new();
        let mut cdf = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, ',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.trim().parse::<f64>().ok()).ok_or_else(|| {
                    Error::Domain(format!("empirical file {path}: bad row {}", lineno + 2))
                })
            };
            let t = parse(parts.next())?;
            let g = parse(parts.next())?;
            if let Some(&last) = ts.last() {
                if t <= last {
                    return Err(Error::Domain(format!(
                        "empirical file {path}: t not strictly increasing at row {}",
                        lineno + 2
                    )));
                }
            }
            if t < 0.0 {
                return Err(Error::Domain(format!(
                    "empirical file {path}: negative time at row {}",
                    lineno + 2
                )));
            }
            if let Some(&lastg) = cdf.last() {
                if g < lastg - 1e-15 {
                    return Err(Error::Domain(format!(
                        "empirical file {path}: G not nondecreasing at row {}",
                        lineno + 2
                    )));
                }
            }
            if !(-1e-12..=1.0 + 1e-9).contains(&g) {
                return Err(Error::Domain(format!(
                    "empirical file {path}: G outside [0,1] at row {}",
                    lineno + 2
                )));
            }
            ts.push(t);
            cdf.push(g.clamp(0.0, 1.0));
        }
        if ts.is_empty() {
            return Err(Error::Domain(format!("empirical file {path}: no data rows")));
        }
        let last = *cdf.last().unwrap();
        if (last - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "empirical file {path}: G(max t) = {last}, defective lifetimes unsupported"
            )));
        }
        let mut jumps = Vec::with_capacity(cdf.len());
        let mut prev = 0.0;
        for &g in &cdf {
            jumps.push((g / last) - prev);
            prev = g / last;
        }
        Ok(LifetimeLaw::Empirical {
            path: path.to_string(),
            ts,
            jumps,
        })
    }

    pub fn spec_string(&self) -> String {
        match self {
            LifetimeLaw::Dirac { tau } => format!("dirac:{}", numeric::fmt_real(*tau)),
            LifetimeLaw::Exponential { rate } => format!("exp:{}", numeric::fmt_real(*rate)),
            LifetimeLaw::Gamma { shape, rate } => format!(
                "gamma:{},{}",
                numeric::fmt_real(*shape),
                numeric::fmt_real(*rate)
            ),
            LifetimeLaw::Uniform { a, b } => {
                format!("uniform:{},{}", numeric::fmt_real(*a), numeric::fmt_real(*b))
            }
            LifetimeLaw::Empirical { path, .. } => format!("empirical:{path}"),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            LifetimeLaw::Dirac { tau } => {
                if t >= *tau {
                    1.0
                } else {
                    0.0
                }
            }
            LifetimeLaw::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
            LifetimeLaw::Gamma { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * t)
                }
            }
            LifetimeLaw::Uniform { a, b } => ((t - a) / (b - a)).clamp(0.0, 1.0),
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                let mut acc = 0.0;
                for (&ti, &ji) in ts.iter().zip(jumps) {
                    if ti <= t {
                        acc += ji;
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// int_0^t u dG(u), used for mass-centroid quadrature weights.
    pub fn m1_cdf(&self, t: f64) -> f64 {
        match self {
            LifetimeLaw::Dirac { tau } => {
                if t >= *tau {
                    *tau
                } else {
                    0.0
                }
            }
            LifetimeLaw::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    let l = *rate;
                    1.0 / l - (-l * t).exp() * (t + 1.0 / l)
                }
            }
            LifetimeLaw::Gamma { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    shape / rate * gamma_lr(shape + 1.0, rate * t)
                }
            }
            LifetimeLaw::Uniform { a, b } => {
                let t = t.clamp(*a, *b);
                if t <= *a {
                    0.0
                } else {
                    (t * t - a * a) / (2.0 * (b - a))
                }
            }
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                let mut acc = 0.0;
                for (&ti, &ji) in ts.iter().zip(jumps) {
                    if ti <= t {
                        acc += ti * ji;
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// int_0^t u^2 dG(u).
    pub fn m2_cdf(&self, t: f64) -> f64 {
        match self {
            LifetimeLaw::Dirac { tau } => {
                if t >= *tau {
                    tau * tau
                } else {
                    0.0
                }
            }
            LifetimeLaw::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    let l = *rate;
                    2.0 / (l * l) - (-l * t).exp() * (t * t + 2.0 * t / l + 2.0 / (l * l))
                }
            }
            LifetimeLaw::Gamma { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    shape * (shape + 1.0) / (rate * rate) * gamma_lr(shape + 2.0, rate * t)
                }
            }
            LifetimeLaw::Uniform { a, b } => {
                let t = t.clamp(*a, *b);
                if t <= *a {
                    0.0
                } else {
                    (t * t * t - a * a * a) / (3.0 * (b - a))
                }
            }
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                let mut acc = 0.0;
                for (&ti, &ji) in ts.iter().zip(jumps) {
                    if ti <= t {
                        acc += ti * ti * ji;
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Laplace transform int_0^inf e^{-beta t} dG(t), closed form per family.
    pub fn laplace(&self, beta: f64) -> f64 {
        match self {
            LifetimeLaw::Dirac { tau } => (-beta * tau).exp(),
            LifetimeLaw::Exponential { rate } => rate / (rate + beta),
            LifetimeLaw::Gamma { shape, rate } => (rate / (rate + beta)).powf(*shape),
            LifetimeLaw::Uniform { a, b } => {
                if beta == 0.0 {
                    1.0
                } else {
                    ((-beta * a).exp() - (-beta * b).exp()) / (beta * (b - a))
                }
            }
            LifetimeLaw::Empirical { ts, jumps, .. } => ts
                .iter()
                .zip(jumps)
                .map(|(&t, &j)| j * (-beta * t).exp())
                .sum(),
        }
    }

    /// p-quantile of G (smallest t with G(t) >= p).
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            LifetimeLaw::Dirac { tau } => *tau,
            LifetimeLaw::Exponential { rate } => -(-p).ln_1p() / rate,
            LifetimeLaw::Gamma { shape, rate } => {
                if p == 0.0 {
                    return 0.0;
                }
                if p == 1.0 {
                    return f64::INFINITY;
                }
                // Bracket by doubling from the mean, then bisect.
                let mut hi = (shape / rate).max(1.0 / rate);
                while self.cdf(hi) < p {
                    hi *= 2.0;
                }
                numeric::solve_bracketed(|t| self.cdf(t) - p, 0.0, hi, 1e-12 * hi, 1e-12, 300)
                    .unwrap_or(hi)
            }
            LifetimeLaw::Uniform { a, b } => a + p * (b - a),
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                let mut acc = 0.0;
                for (&ti, &ji) in ts.iter().zip(jumps) {
                    acc += ji;
                    if acc >= p - 1e-15 {
                        return ti;
                    }
                }
                *ts.last().unwrap()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            LifetimeLaw::Dirac { tau } => *tau,
            LifetimeLaw::Exponential { rate } => 1.0 / rate,
            LifetimeLaw::Gamma { shape, rate } => shape / rate,
            LifetimeLaw::Uniform { a, b } => 0.5 * (a + b),
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                ts.iter().zip(jumps).map(|(&t, &j)| t * j).sum()
            }
        }
    }

    /// Parametric families are classified analytically; empirical laws get a
    /// numeric scan of |1 - characteristic function| over theta and stay
    /// `Unknown` regardless of the scanned minimum.
    pub fn lattice_class(&self) -> LatticeClass {
        match self {
            LifetimeLaw::Dirac { .. } => LatticeClass::Lattice,
            LifetimeLaw::Exponential { .. }
            | LifetimeLaw::Gamma { .. }
            | LifetimeLaw::Uniform { .. } => LatticeClass::StronglyNonLattice,
            LifetimeLaw::Empirical { ts, jumps, .. } => {
                let t_scale = self.mean().max(1e-12);
                let theta_min = 1.0 / t_scale;
                let theta_max = 500.0 / t_scale;
                let n = 20_000;
                let mut min = f64::INFINITY;
                for i in 0..=n {
                    let theta = theta_min + (theta_max - theta_min) * i as f64 / n as f64;
                    let (mut re, mut im) = (0.0, 0.0);
                    for (&t, &j) in ts.iter().zip(jumps) {
                        re += j * (theta * t).cos();
                        im += j * (theta * t).sin();
                    }
                    let d = ((1.0 - re) * (1.0 - re) + im * im).sqrt();
                    if d < min {
                        min = d;
                    }
                }
                LatticeClass::Unknown { scanned_min: min }
            }
        }
    }

    /// Draws one lifetime.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::Distribution;
        match self {
            LifetimeLaw::Dirac { tau } => *tau,
            LifetimeLaw::Exponential { rate } => {
                rand_distr::Exp::new(*rate).unwrap().sample(rng)
            }
            LifetimeLaw::Gamma { shape, rate } => {
                rand_distr::Gamma::new(*shape, 1.0 / rate).unwrap().sample(rng)
            }
            LifetimeLaw::Uniform { a, b } => rng.random_range(*a..*b),
            LifetimeLaw::Empirical { .. } => {
                let u: f64 = rng.random();
                self.quantile(u)
            }
        }
    }
}

/// Solves int e^{-beta t} dG(t) = 1/mu for the unique beta > 0. Dirac and
/// exponential go through their closed forms; everything else is bracketed
/// root finding on the Laplace transform.
pub fn malthusian(law: &LifetimeLaw, mu: f64) -> Result<f64> {
    if !(mu > 1.0) {
        return Err(Error::Hypothesis(format!(
            "malthusian parameter needs mu > 1, got {mu}"
        )));
    }
    if law.cdf(0.0) >= 1.0 {
        return Err(Error::Hypothesis("lifetime concentrated at 0".into()));
    }
    match law {
        LifetimeLaw::Dirac { tau } => Ok(mu.ln() / tau),
        LifetimeLaw::Exponential { rate } => Ok(rate * (mu - 1.0)),
        _ => {
            let target = 1.0 / mu;
            if law.laplace(f64::INFINITY).is_nan() {}
            let atom0 = law.cdf(0.0);
            if atom0 >= target {
                return Err(Error::Hypothesis(format!(
                    "mu * G({{0}}) = {} >= 1: no Malthusian parameter exists",
                    mu * atom0
                )));
            }
            let mut hi = 1.0 / law.mean().max(1e-12);
            let mut tries = 0;
            while law.laplace(hi) > target {
                hi *= 2.0;
                tries += 1;
                if tries > 200 {
                    return Err(Error::Numeric(format!(
                        "malthusian bracket never closed: laplace({hi:e}) = {} > {target}",
                        law.laplace(hi)
                    )));
                }
            }
            numeric::solve_bracketed(|b| law.laplace(b) - target, 0.0, hi, 0.0, 1e-13, 300)
        }
    }
}

#[derive(Debug, Clone)]
enum TiltedFamily {
    Dirac { tau: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    /// density scale * e^{-rate t} on [a, b]
    TruncExp { a: f64, b: f64, rate: f64, scale: f64 },
    Atoms { ts: Vec<f64>, ws: Vec<f64> },
}

/// The beta-tilted lifetime G_beta, a genuine probability law whose mean is
/// 1/nu. Tilting maps each parametric family onto a closed-form companion
/// (Exp(l) -> Exp(l+beta), Gamma(k,r) -> Gamma(k,r+beta), uniform -> a
/// truncated exponential, atoms -> reweighted atoms).
#[derive(Debug, Clone)]
pub struct TiltedLifetime {
    family: TiltedFamily,
    pub beta: f64,
    pub mu: f64,
    /// Measured total mass mu * int e^{-beta u} dG(u); 1 up to rounding.
    pub mass: f64,
}

/// Builds G_beta and verifies it is a probability law. A (beta, mu) pair
/// whose mass deviates from 1 by more than 1e-6 is rejected.
pub fn tilt(law: &LifetimeLaw, beta: f64, mu: f64) -> Result<TiltedLifetime> {
    let mass = mu * law.laplace(beta);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "tilted mass {} deviates from 1: (beta, mu) = ({beta}, {mu}) is not a Malthusian pair",
            mass
        )));
    }
    let family = match law {
        LifetimeLaw::Dirac { tau } => TiltedFamily::Dirac { tau: *tau },
        LifetimeLaw::Exponential { rate } => TiltedFamily::Exponential { rate: rate + beta },
        LifetimeLaw::Gamma { shape, rate } => TiltedFamily::Gamma {
            shape: *shape,
            rate: rate + beta,
        },
        LifetimeLaw::Uniform { a, b } => TiltedFamily::TruncExp {
            a: *a,
            b: *b,
            rate: beta,
            scale: mu / (b - a),
        },
        LifetimeLaw::Empirical { ts, jumps, .. } => {
            let ws: Vec<f64> = ts
                .iter()
                .zip(jumps)
                .map(|(&t, &j)| mu * j * (-beta * t).exp())
                .collect();
            TiltedFamily::Atoms { ts: ts.clone(), ws }
        }
    };
    Ok(TiltedLifetime {
        family,
        beta,
        mu,
        mass,
    })
}

impl TiltedLifetime {
    pub fn cdf(&self, t: f64) -> f64 {
        match &self.family {
            TiltedFamily::Dirac { tau } => {
                if t >= *tau {
                    1.0
                } else {
                    0.0
                }
            }
            TiltedFamily::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
            TiltedFamily::Gamma { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * t)
                }
            }
            TiltedFamily::TruncExp { a, b, rate, scale } => {
                let t = t.clamp(*a, *b);
                if t <= *a {
                    0.0
                } else if *rate == 0.0 {
                    scale * (t - a)
                } else {
                    scale / rate * ((-rate * a).exp() - (-rate * t).exp())
                }
            }
            TiltedFamily::Atoms { ts, ws } => {
                let mut acc = 0.0;
                for (&ti, &wi) in ts.iter().zip(ws) {
                    if ti <= t {
                        acc += wi;
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.family, TiltedFamily::Dirac { .. })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.family,
            TiltedFamily::Dirac { .. } | TiltedFamily::Atoms { .. }
        )
    }

    pub fn atoms(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.family {
            TiltedFamily::Dirac { tau } => Some((vec![*tau], vec![1.0])),
            TiltedFamily::Atoms { ts, ws } => Some((ts.clone(), ws.clone())),
            _ => None,
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match &self.family {
            TiltedFamily::Dirac { tau } => *tau,
            TiltedFamily::Exponential { rate } => -(-p).ln_1p() / rate,
            TiltedFamily::Gamma { shape, rate } => {
                if p == 0.0 {
                    return 0.0;
                }
                let mut hi = (shape / rate).max(1.0 / rate);
                while self.cdf(hi) < p && hi.is_finite() {
                    hi *= 2.0;
                }
                numeric::solve_bracketed(|t| self.cdf(t) - p, 0.0, hi, 1e-12 * hi, 1e-12, 300)
                    .unwrap_or(hi)
            }
            TiltedFamily::TruncExp { a, b, rate, scale } => {
                if *rate == 0.0 {
                    return a + p / scale;
                }
                let ea = (-rate * a).exp();
                let t = -((ea - p * rate / scale).ln()) / rate;
                t.clamp(*a, *b)
            }
            TiltedFamily::Atoms { ts, ws } => {
                let mut acc = 0.0;
                for (&ti, &wi) in ts.iter().zip(ws) {
                    acc += wi;
                    if acc >= p - 1e-15 {
                        return ti;
                    }
                }
                *ts.last().unwrap()
            }
        }
    }

    /// j-th raw moment by adaptive quadrature against the tilted density
    /// (exact sums for atomic laws). This is the production route; closed
    /// forms serve as test oracles.
    pub fn moment_quadrature(&self, j: u32) -> f64 {
        match &self.family {
            TiltedFamily::Dirac { tau } => tau.powi(j as i32),
            TiltedFamily::Atoms { ts, ws } => ts
                .iter()
                .zip(ws)
                .map(|(&t, &w)| t.powi(j as i32) * w)
                .sum(),
            _ => {
                let hi = self.quantile(1.0 - 1e-14);
                let f = |t: f64| t.powi(j as i32) * self.density(t);
                numeric::integrate_adaptive(&f, self.support_lo(), hi, 1e-12)
            }
        }
    }

    fn support_lo(&self) -> f64 {
        match &self.family {
            TiltedFamily::TruncExp { a, .. } => *a,
            _ => 0.0,
        }
    }

    /// Density where the family has one (panics for atomic laws).
    pub fn density(&self, t: f64) -> f64 {
        match &self.family {
            TiltedFamily::Exponential { rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    rate * (-rate * t).exp()
                }
            }
            TiltedFamily::Gamma { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    let ln_pdf = shape * rate.ln() + (shape - 1.0) * t.ln()
                        - rate * t
                        - statrs::function::gamma::ln_gamma(*shape);
                    ln_pdf.exp()
                }
            }
            TiltedFamily::TruncExp { a, b, rate, scale } => {
                if t < *a || t > *b {
                    0.0
                } else {
                    scale * (-rate * t).exp()
                }
            }
            _ => panic!("density undefined for atomic tilted laws"),
        }
    }

    /// Mean of G_beta (= 1/nu).
    pub fn mean(&self) -> f64 {
        self.moment_quadrature(1)
    }

    pub fn second_moment(&self) -> f64 {
        self.moment_quadrature(2)
    }

    /// Draws from G_beta; used by sampling cross-checks.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::Distribution;
        match &self.family {
            TiltedFamily::Dirac { tau } => *tau,
            TiltedFamily::Exponential { rate } => {
                rand_distr::Exp::new(*rate).unwrap().sample(rng)
            }
            TiltedFamily::Gamma { shape, rate } => {
                rand_distr::Gamma::new(*shape, 1.0 / rate).unwrap().sample(rng)
            }
            _ => {
                let u: f64 = rng.random();
                self.quantile(u)
            }
        }
    }

    /// Cell masses of dG_beta on a uniform grid: m[i] covers
    /// [(i-1/2)d, (i+1/2)d].
    pub fn cell_masses(&self, delta: f64, n: usize) -> Vec<f64> {
        let mut m = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        for i in 0..=n {
            let edge = (i as f64 + 0.5) * delta;
            let c = self.cdf(edge);
            m.push(c - prev);
            prev = c;
        }
        m
    }
}

/// nu = 1 / (first moment of G_beta), Eq. of the theorem. Quadrature route.
pub fn nu(law: &LifetimeLaw, beta: f64, mu: f64) -> Result<f64> {
    let gb = tilt(law, beta, mu)?;
    let mean = gb.mean();
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::Numeric(format!("tilted mean {mean} not positive/finite")));
    }
    Ok(1.0 / mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parse_and_classes() {
        let d = LifetimeLaw::parse("dirac:1.0").unwrap();
        assert_eq!(d.lattice_class(), LatticeClass::Lattice);
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        assert_eq!(e.lattice_class(), LatticeClass::StronglyNonLattice);
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        assert!((u.mean() - 1.0).abs() < 1e-15);
        assert!(LifetimeLaw::parse("uniform:1.5,0.5").is_err());
        assert!(LifetimeLaw::parse("exp:-1").is_err());
        assert!(LifetimeLaw::parse("weibull:1").is_err());
    }

    #[test]
    fn malthusian_closed_forms() {
        let d = LifetimeLaw::parse("dirac:1.0").unwrap();
        assert!((malthusian(&d, 2.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        let d2 = LifetimeLaw::parse("dirac:2.0").unwrap();
        assert!((malthusian(&d2, 4.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        assert!((malthusian(&e, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malthusian_numeric_matches_gamma_closed_form() {
        // (r/(r+beta))^k = 1/mu  =>  beta = r (mu^{1/k} - 1)
        let g = LifetimeLaw::parse("gamma:2.0,3.0").unwrap();
        let beta = malthusian(&g, 2.0).unwrap();
        let exact = 3.0 * (2f64.powf(0.5) - 1.0);
        assert!((beta - exact).abs() < 1e-10 * exact, "{beta} vs {exact}");
        // defining property
        assert!((g.laplace(beta) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn malthusian_monotone_in_mu() {
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        let mut prev = 0.0;
        for i in 1..20 {
            let mu = 1.0 + 0.25 * i as f64;
            let b = malthusian(&u, mu).unwrap();
            assert!(b > prev, "beta should grow with mu");
            prev = b;
        }
    }

    #[test]
    fn malthusian_rejects_subcritical() {
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        assert!(matches!(malthusian(&e, 0.9), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn tilt_masses_and_mismatch() {
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        let gb = tilt(&e, 1.0, 2.0).unwrap();
        assert!((gb.mass - 1.0).abs() < 1e-12);
        // Exp(1) tilted at (beta=1, mu=2) is Exp(2).
        assert!((gb.cdf(1.0) - (1.0 - (-2f64).exp())).abs() < 1e-14);
        assert!(matches!(tilt(&e, 0.7, 2.0), Err(Error::Consistency(_))));
    }

    #[test]
    fn tilt_dirac_is_point_mass() {
        let d = LifetimeLaw::parse("dirac:1.0").unwrap();
        let gb = tilt(&d, 2f64.ln(), 2.0).unwrap();
        assert!((gb.mass - 1.0).abs() < 1e-14);
        assert_eq!(gb.cdf(0.999), 0.0);
        assert_eq!(gb.cdf(1.0), 1.0);
    }

    #[test]
    fn tilt_uniform_mass_reaches_one() {
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        let beta = malthusian(&u, 2.0).unwrap();
        let gb = tilt(&u, beta, 2.0).unwrap();
        assert!((gb.cdf(1.5) - 1.0).abs() < 1e-10);
        assert!((gb.cdf(10.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nu_closed_forms() {
        let d = LifetimeLaw::parse("dirac:0.5").unwrap();
        let beta = malthusian(&d, 3.0).unwrap();
        assert!((nu(&d, beta, 3.0).unwrap() - 2.0).abs() < 1e-12); // nu = 1/tau
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        // nu^{-1} = mu lambda/(lambda+beta)^2 = 2/4 => nu = 2
        assert!((nu(&e, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn nu_uniform_quadrature_vs_sampling() {
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        let beta = malthusian(&u, 2.0).unwrap();
        let gb = tilt(&u, beta, 2.0).unwrap();
        let nu_quad = nu(&u, beta, 2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let x = gb.sample(&mut rng);
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let sd = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(
            (mean - 1.0 / nu_quad).abs() < 3.0 * sd,
            "MC mean {mean} vs 1/nu {} (3se = {})",
            1.0 / nu_quad,
            3.0 * sd
        );
    }

    #[test]
    fn tilted_moments_converge_under_refinement() {
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        let beta = malthusian(&u, 2.0).unwrap();
        let gb = tilt(&u, beta, 2.0).unwrap();
        // Adaptive quadrature against panel quadrature, orders 1..4.
        for j in 1..=4u32 {
            let adaptive = gb.moment_quadrature(j);
            let f = |t: f64| t.powi(j as i32) * gb.density(t);
            let panels = numeric::integrate_panels(&f, 0.5, 1.5, 64);
            assert!(
                ((adaptive - panels) / panels).abs() < 1e-6,
                "moment {j}: {adaptive} vs {panels}"
            );
        }
        // nu * mean(G_beta) = 1
        let nv = nu(&u, beta, 2.0).unwrap();
        assert!((nv * gb.mean() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empirical_csv_round_trip_and_lattice_scan() {
        let dir = std::env::temp_dir().join("seneta_core_lifetime_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("emp.csv");
        // Staircase of a Dirac at 1: three atoms at 1-eps, 1, 1+eps.
        std::fs::write(&path, "t,G\n0.999,0.25\n1.0,0.75\n1.001,1.0\n").unwrap();
        let law = LifetimeLaw::load_empirical(path.to_str().unwrap()).unwrap();
        assert!((law.mean() - 1.0).abs() < 1e-3);
        match law.lattice_class() {
            LatticeClass::Unknown { scanned_min } => {
                assert!(scanned_min < 0.05, "near-Dirac scan minimum {scanned_min}");
            }
            other => panic!("expected Unknown, got {other:?}"),
        }
        let beta = malthusian(&law, 2.0).unwrap();
        let gb = tilt(&law, beta, 2.0).unwrap();
        assert!((gb.mass - 1.0).abs() < 1e-10);
        // non-monotone CDF must be rejected
        let bad = dir.join("bad.csv");
        std::fs::write(&bad, "t,G\n0.5,0.5\n1.0,0.25\n2.0,1.0\n").unwrap();
        assert!(LifetimeLaw::load_empirical(bad.to_str().unwrap()).is_err());
    }
}
