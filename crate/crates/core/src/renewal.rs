//! Renewal function U_beta of the tilted lifetime on a uniform grid and the
//! decomposition 1 + U_beta(t) = nu t + Utilde_beta(t).

use crate::error::{Error, Result};
use crate::lifetime::TiltedLifetime;

#[derive(Debug, Clone, Copy)]
pub struct RenewalOptions {
    /// Accept lattice / unclassified tilted laws anyway.
    pub override_non_lattice: bool,
    /// Whether sigma-type integrals against dUtilde include the unit atom
    /// at 0. The mass identity always accounts for the atom.
    pub include_atom: bool,
}

impl Default for RenewalOptions {
    fn default() -> Self {
        RenewalOptions {
            override_non_lattice: false,
            include_atom: false,
        }
    }
}

/// Discretized renewal quantities on the grid t_i = i * delta.
#[derive(Debug, Clone)]
pub struct RenewalTable {
    pub delta: f64,
    pub horizon: f64,
    pub nu: f64,
    /// U_beta(i delta), nondecreasing, U[0] = G_beta(0).
    pub u: Vec<f64>,
    /// Utilde_beta(i delta) = 1 + U[i] - nu i delta.
    pub ut: Vec<f64>,
    /// Signed increments of Utilde; d_ut[0] = 1 is the unit atom at 0.
    pub d_ut: Vec<f64>,
    /// Most negative Utilde value seen (discretization can produce small
    /// negative wiggles; reported, not assumed away).
    pub min_utilde: f64,
    pub include_atom: bool,
}

/// Builds the renewal table by forward substitution of the discretized
/// renewal equation U = G_beta + G_beta (*) U with midpoint-mass cells.
pub fn build_table(
    gb: &TiltedLifetime,
    delta: f64,
    horizon: f64,
    opts: RenewalOptions,
) -> Result<RenewalTable> {
    if gb.is_lattice() && !opts.override_non_lattice {
        return Err(Error::Hypothesis(
            "lattice lifetime: renewal decomposition needs a strongly non-lattice law \
             (use the discrete-time oracle instead, or pass the override flag)"
                .into(),
        ));
    }
    if gb.is_atomic() && !gb.is_lattice() && !opts.override_non_lattice {
        return Err(Error::Hypothesis(
            "empirical lifetime has unknown lattice class; pass the override flag to proceed"
                .into(),
        ));
    }
    let mean = gb.mean();
    let nu = 1.0 / mean;
    if delta > mean / 50.0 * (1.0 + 1e-12) {
        return Err(Error::Accuracy(format!(
            "delta = {delta} too coarse: need delta <= (1/nu)/50 = {}",
            mean / 50.0
        )));
    }
    if horizon < 20.0 * mean * (1.0 - 1e-12) {
        return Err(Error::Accuracy(format!(
            "horizon = {horizon} too short: need horizon >= 20/nu = {}",
            20.0 * mean
        )));
    }
    let g0 = gb.cdf(0.0);
    if g0 >= 1.0 {
        return Err(Error::Hypothesis("tilted lifetime concentrated at 0".into()));
    }
    let n = (horizon / delta).ceil() as usize;
    let m = gb.cell_masses(delta, n);
    let mut u = vec![0.0; n + 1];
    u[0] = g0;
    for j in 1..=n {
        let mut acc = gb.cdf(j as f64 * delta);
        for i in 1..=j {
            acc += m[i] * u[j - i];
        }
        u[j] = acc / (1.0 - m[0]);
    }
    let mut ut = vec![0.0; n + 1];
    let mut d_ut = vec![0.0; n + 1];
    let mut min_utilde = f64::INFINITY;
    for j in 0..=n {
        ut[j] = 1.0 + u[j] - nu * j as f64 * delta;
        if ut[j] < min_utilde {
            min_utilde = ut[j];
        }
        d_ut[j] = if j == 0 { 1.0 } else { ut[j] - ut[j - 1] };
    }
    Ok(RenewalTable {
        delta,
        horizon: n as f64 * delta,
        nu,
        u,
        ut,
        d_ut,
        min_utilde,
        include_atom: opts.include_atom,
    })
}

impl RenewalTable {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// |Utilde(horizon) - Utilde(t)|: the measured tail envelope.
    pub fn utilde_tail(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!(
                "utilde_tail: t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        let i = (t / self.delta).floor() as usize;
        let i = i.min(self.ut.len() - 1);
        Ok((self.ut[self.ut.len() - 1] - self.ut[i]).abs())
    }

    /// Total mass of dUtilde including the unit atom at 0; converges to
    /// (nu^2/2) int t^2 dG_beta as the horizon grows.
    pub fn utilde_total_mass(&self) -> f64 {
        *self.ut.last().unwrap()
    }

    /// Re-evaluates the discretized renewal identity; the builder solves it
    /// exactly, so this measures only accumulated rounding.
    pub fn identity_residual(&self, gb: &TiltedLifetime) -> f64 {
        let n = self.u.len() - 1;
        let m = gb.cell_masses(self.delta, n);
        let mut worst = 0.0f64;
        for j in 0..=n {
            let mut acc = gb.cdf(j as f64 * self.delta) + m[0] * self.u[j];
            for i in 1..=j {
                acc += m[i] * self.u[j - i];
            }
            worst = worst.max((self.u[j] - acc).abs());
        }
        worst
    }

    /// |U(horizon)/horizon - nu| / nu, the elementary-renewal (Wald) check.
    pub fn wald_deviation(&self) -> f64 {
        let last = *self.u.last().unwrap();
        (last / self.horizon - self.nu).abs() / self.nu
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::{malthusian, tilt, LifetimeLaw};

    fn exp2_tilt() -> TiltedLifetime {
        // Yule case: Exp(1) tilted at (beta=1, mu=2) is Exp(2).
        let e = LifetimeLaw::parse("exp:1.0").unwrap();
        tilt(&e, 1.0, 2.0).unwrap()
    }

    fn uniform_tilt() -> TiltedLifetime {
        let u = LifetimeLaw::parse("uniform:0.5,1.5").unwrap();
        let beta = malthusian(&u, 2.0).unwrap();
        tilt(&u, beta, 2.0).unwrap()
    }

    #[test]
    fn poisson_renewal_function_is_linear() {
        let gb = exp2_tilt();
        let table = build_table(&gb, 0.01, 15.0, RenewalOptions::default()).unwrap();
        assert_eq!(table.u[0], 0.0);
        assert!((table.nu - 2.0).abs() < 1e-9);
        // U(t) = 2t exactly for the Poisson process; Utilde == 1.
        for (j, &ut) in table.ut.iter().enumerate() {
            assert!(
                (ut - 1.0).abs() < 0.01,
                "Utilde({}) = {ut}, expected 1 within 1%",
                j as f64 * table.delta
            );
        }
        assert!(table.utilde_tail(7.0).unwrap() < 0.01);
        // Total mass: (nu^2/2) E[T^2] = (4/2)(1/2) = 1.
        let predicted = 0.5 * table.nu * table.nu * gb.second_moment();
        assert!(
            (table.utilde_total_mass() - predicted).abs() < 0.02 * predicted,
            "mass {} vs predicted {predicted}",
            table.utilde_total_mass()
        );
    }

    #[test]
    fn utilde_zero_is_one() {
        let table = build_table(&uniform_tilt(), 0.02, 25.0, RenewalOptions::default()).unwrap();
        assert_eq!(table.ut[0], 1.0 + table.u[0]);
        assert_eq!(table.d_ut[0], 1.0);
    }

    #[test]
    fn uniform_tilt_mass_identity_and_tail() {
        let gb = uniform_tilt();
        let mean = gb.mean();
        let table =
            build_table(&gb, mean / 60.0, 32.0 * mean, RenewalOptions::default()).unwrap();
        let predicted = 0.5 * table.nu * table.nu * gb.second_moment();
        let measured = table.utilde_total_mass();
        assert!(
            (measured - predicted).abs() < 0.02 * predicted,
            "Utilde mass {measured} vs (nu^2/2) E T^2 = {predicted}"
        );
        assert!(table.min_utilde > -1e-3, "Utilde dipped to {}", table.min_utilde);
        // Exponential-tail smallness: envelope at 15/nu below 1% of mass.
        let env = table.utilde_tail(15.0 * mean).unwrap();
        assert!(env < 0.01 * measured, "tail envelope {env}");
        assert!(table.utilde_tail(table.horizon).unwrap() == 0.0);
    }

    #[test]
    fn renewal_identity_residual_is_rounding_only() {
        let table = build_table(&uniform_tilt(), 0.02, 25.0, RenewalOptions::default()).unwrap();
        let gb = uniform_tilt();
        assert!(table.identity_residual(&gb) <= 1e-8);
    }

    #[test]
    fn wald_limit() {
        let gb = uniform_tilt();
        let mean = gb.mean();
        let table =
            build_table(&gb, mean / 50.0, 35.0 * mean, RenewalOptions::default()).unwrap();
        assert!(table.wald_deviation() <= 0.01, "U(T)/T off by {}", table.wald_deviation());
    }

    #[test]
    fn grid_refinement_stability() {
        let gb = uniform_tilt();
        let mean = gb.mean();
        let coarse = build_table(&gb, mean / 50.0, 25.0 * mean, RenewalOptions::default()).unwrap();
        let fine = build_table(&gb, mean / 100.0, 25.0 * mean, RenewalOptions::default()).unwrap();
        for j in 0..coarse.u.len() {
            let t = j as f64 * coarse.delta;
            if t < mean {
                continue;
            }
            let uc = coarse.u[j];
            let uf = fine.u[2 * j];
            assert!(
                (uc - uf).abs() <= 0.005 * uf.max(1e-9),
                "refinement moved U({t}) from {uc} to {uf}"
            );
        }
    }

    #[test]
    fn lattice_inputs_rejected_without_override() {
        let d = LifetimeLaw::parse("dirac:1.0").unwrap();
        let gb = tilt(&d, 2f64.ln(), 2.0).unwrap();
        assert!(matches!(
            build_table(&gb, 0.005, 25.0, RenewalOptions::default()),
            Err(Error::Hypothesis(_))
        ));
        let opts = RenewalOptions {
            override_non_lattice: true,
            ..Default::default()
        };
        assert!(build_table(&gb, 0.005, 25.0, opts).is_ok());
    }

    #[test]
    fn coarse_grid_rejected() {
        let gb = exp2_tilt();
        assert!(matches!(
            build_table(&gb, 0.2, 15.0, RenewalOptions::default()),
            Err(Error::Accuracy(_))
        ));
        assert!(matches!(
            build_table(&gb, 0.005, 3.0, RenewalOptions::default()),
            Err(Error::Accuracy(_))
        ));
    }
}
