//! Shared numerical kernels: bracketed root finding, Gauss-Legendre
//! quadrature, monotone cubic interpolation and least-squares fits.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Finds the root of a continuous monotone-ish function inside a bracket.
///
/// Bisection guarantees progress; a secant proposal is tried first on every
/// step and accepted when it stays inside the current bracket. Terminates
/// when the bracket width drops below `tol_abs + tol_rel * |mid|`.
pub fn solve_bracketed<F>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!(
            "no sign change in bracket [{lo}, {hi}]: f(lo)={flo:e}, f(hi)={fhi:e}"
        )));
    }
    for _ in 0..max_iter {
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        if width <= tol_abs + tol_rel * mid.abs() {
            return Ok(mid);
        }
        // Secant proposal; fall back to the midpoint when it leaves the
        // bracket or makes no progress.
        let mut x = lo - flo * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    Err(Error::Numeric(format!(
        "root finder did not converge: bracket [{lo}, {hi}], f(lo)={flo:e}, f(hi)={fhi:e}"
    )))
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n with the Bonnet recurrence; nodes on (-1, 1).
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    GL16.get_or_init(|| legendre_nodes(16))
}

/// 16-point Gauss-Legendre on a single interval.
pub fn integrate_gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (xs, ws) = gl16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Composite Gauss-Legendre with `panels` equal panels.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += integrate_gl16(f, a + i as f64 * h, a + (i + 1) as f64 * h);
    }
    acc
}

/// Adaptive panel-splitting quadrature. Each panel is accepted when a GL16
/// estimate agrees with the sum of its two halves to `tol` (relative to the
/// running total scale).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        scale: f64,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = integrate_gl16(f, a, m);
        let right = integrate_gl16(f, m, b);
        let err = (left + right - whole).abs();
        if depth == 0 || err <= tol * scale.max(left.abs() + right.abs()) {
            return left + right;
        }
        recurse(f, a, m, left, tol, depth - 1, scale)
            + recurse(f, m, b, right, tol, depth - 1, scale)
    }
    let whole = integrate_gl16(f, a, b);
    recurse(f, a, b, whole, tol, 40, whole.abs())
}

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant on a uniform grid.
///
/// Evaluation outside the grid extends linearly with the one-sided end
/// slopes, which is the behaviour the log-grid solvers rely on.
#[derive(Debug, Clone)]
pub struct UniformPchip {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl UniformPchip {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2, "pchip needs at least two nodes");
        assert!(dx > 0.0);
        let n = y.len();
        let mut sec = vec![0.0; n - 1];
        for i in 0..n - 1 {
            sec[i] = (y[i + 1] - y[i]) / dx;
        }
        let mut d = vec![0.0; n];
        d[0] = sec[0];
        d[n - 1] = sec[n - 2];
        for i in 1..n - 1 {
            if sec[i - 1] * sec[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // Harmonic mean keeps the interpolant monotone on each cell.
                d[i] = 2.0 * sec[i - 1] * sec[i] / (sec[i - 1] + sec[i]);
            }
        }
        // Endpoint limiter (Fritsch-Carlson three-times rule).
        if d[0].signum() != sec[0].signum() {
            d[0] = 0.0;
        } else if d[0].abs() > 3.0 * sec[0].abs() {
            d[0] = 3.0 * sec[0];
        }
        if d[n - 1].signum() != sec[n - 2].signum() {
            d[n - 1] = 0.0;
        } else if d[n - 1].abs() > 3.0 * sec[n - 2].abs() {
            d[n - 1] = 3.0 * sec[n - 2];
        }
        UniformPchip { x0, dx, y, d }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.y.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// End slopes used for linear extension beyond the grid.
    pub fn end_slopes(&self) -> (f64, f64) {
        (self.d[0], self.d[self.y.len() - 1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = (x - self.x0) / self.dx;
        if t <= 0.0 {
            return self.y[0] + self.d[0] * (x - self.x0);
        }
        if t >= (n - 1) as f64 {
            return self.y[n - 1] + self.d[n - 1] * (x - self.x_max());
        }
        let i = t.floor() as usize;
        let i = i.min(n - 2);
        let s = t - i as f64;
        let h = self.dx;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        // Cubic Hermite basis.
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

/// Ordinary least squares `y ~ a + b x`. Returns `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares quadratic `y ~ c0 + c1 x + c2 x^2` via the 3x3 normal
/// equations. Returns `(c0, c1, c2)`.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 3);
    let n = xs.len() as f64;
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    let (mut t0, mut t1, mut t2) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        t0 += y;
        t1 += x * y;
        t2 += x2 * y;
    }
    let a = [[n, s1, s2], [s1, s2, s3], [s2, s3, s4]];
    let mut b = [t0, t1, t2];
    // Gaussian elimination with partial pivoting on the 3x3 system.
    let mut m = a;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..3).rev() {
        for k in col + 1..3 {
            b[col] -= m[col][k] * b[k];
        }
        b[col] /= m[col][col];
    }
    (b[0], b[1], b[2])
}

/// Formats a real with 17 significant digits, enough for a lossless f64
/// round trip in the emitted CSV files.
pub fn fmt_real(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracketed_root_matches_closed_form() {
        let r = solve_bracketed(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 1e-14, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12, "sqrt(2) via bracket, got {r}");
    }

    #[test]
    fn bracketed_root_rejects_bad_bracket() {
        assert!(solve_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 100).is_err());
    }

    #[test]
    fn gl16_is_exact_for_low_degree_polynomials() {
        // GL16 integrates degree <= 31 exactly.
        let f = |x: f64| 5.0 * x.powi(7) - x.powi(3) + 2.0;
        let exact = 5.0 / 8.0 * (2f64.powi(8) - 1.0) - (2f64.powi(4) - 1.0) / 4.0 + 2.0;
        assert!((integrate_gl16(&f, 1.0, 2.0) - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // int_0^1 1/sqrt(x) dx = 2, integrable singularity at 0.
        let v = integrate_adaptive(&|x: f64| 1.0 / (x + 1e-14).sqrt(), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn pchip_preserves_monotone_data() {
        let y: Vec<f64> = (0..50).map(|i| ((i as f64) * 0.3).tanh()).collect();
        let p = UniformPchip::new(0.0, 0.3, y);
        let mut prev = f64::NEG_INFINITY;
        let mut x = 0.0;
        while x < 14.7 {
            let v = p.eval(x);
            assert!(v >= prev - 1e-15, "non-monotone at {x}: {v} < {prev}");
            prev = v;
            x += 0.017;
        }
    }

    #[test]
    fn pchip_reproduces_linear_data_exactly() {
        let y: Vec<f64> = (0..10).map(|i| 3.0 + 2.0 * i as f64).collect();
        let p = UniformPchip::new(0.0, 1.0, y);
        for &x in &[-1.0, 0.25, 4.5, 8.99, 11.0] {
            assert!((p.eval(x) - (3.0 + 2.0 * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.7 * x).collect();
        let (slope, icept) = fit_line(&xs, &ys);
        assert!((slope + 0.7).abs() < 1e-12);
        assert!((icept - 1.5).abs() < 1e-12);
    }

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.1 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - x + 0.25 * x * x).collect();
        let (c0, c1, c2) = fit_quadratic(&xs, &ys);
        assert!((c0 - 2.0).abs() < 1e-10);
        assert!((c1 + 1.0).abs() < 1e-10);
        assert!((c2 - 0.25).abs() < 1e-10);
    }

    #[test]
    fn fmt_real_round_trips() {
        for &x in &[0.1, -3.25e-17, 6.02e23, std::f64::consts::PI] {
            let s = fmt_real(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "round trip of {s}");
        }
    }
}
