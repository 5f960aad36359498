//! Polytropic equation of state and the admissibility checks built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::PrimitiveState;

/// EOS constants and the admissibility margins used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermoParams {
    pub gamma: f64,
    /// Polytropic constant `A` in `rho = A p^(1/gamma) exp(-S/gamma)`.
    pub a: f64,
    /// Reference pressure (also the shift used by the boundary problem).
    pub pbar: f64,
    /// Light-speed margin.
    pub nu: f64,
    /// Lower bound on the normal magnetic field at the interface.
    pub kappa: f64,
    /// Rayleigh–Taylor margin.
    pub epsilon: f64,
    /// Accept `gamma > 2`. Causality is then no longer automatic and is
    /// reported per state instead of assumed.
    pub allow_gamma_above_two: bool,
}

impl Default for ThermoParams {
    fn default() -> Self {
        ThermoParams {
            gamma: 4.0 / 3.0,
            a: 1.0,
            pbar: 0.1,
            nu: 0.05,
            kappa: 0.1,
            epsilon: 0.1,
            allow_gamma_above_two: false,
        }
    }
}

impl ThermoParams {
    pub fn with_gamma(gamma: f64) -> Self {
        ThermoParams { gamma, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.gamma, self.a, self.pbar, self.nu, self.kappa, self.epsilon]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parameters("non-finite parameter".into()));
        }
        if self.gamma <= 1.0 {
            return Err(Error::Parameters(format!("gamma = {} must exceed 1", self.gamma)));
        }
        if self.gamma > 2.0 && !self.allow_gamma_above_two {
            return Err(Error::Parameters(format!(
                "gamma = {} exceeds 2; set allow_gamma_above_two to accept it",
                self.gamma
            )));
        }
        for (name, x) in [
            ("a", self.a),
            ("pbar", self.pbar),
            ("nu", self.nu),
            ("kappa", self.kappa),
            ("epsilon", self.epsilon),
        ] {
            if x <= 0.0 {
                return Err(Error::Parameters(format!("{name} = {x} must be positive")));
            }
        }
        if self.nu >= 1.0 {
            return Err(Error::Parameters(format!("nu = {} must be below 1", self.nu)));
        }
        Ok(())
    }
}

fn positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Hyperbolicity(format!("(9') {what} = {x} must be positive")))
    }
}

/// `rho(p, S) = A p^(1/gamma) exp(-S/gamma)`.
pub fn density(params: &ThermoParams, p: f64, s: f64) -> Result<f64> {
    positive("pressure", p)?;
    Ok(params.a * p.powf(1.0 / params.gamma) * (-s / params.gamma).exp())
}

/// Inverse of [`density`] at fixed entropy.
pub fn pressure_from_density(params: &ThermoParams, rho: f64, s: f64) -> Result<f64> {
    positive("density", rho)?;
    Ok((rho / params.a).powf(params.gamma) * s.exp())
}

pub fn internal_energy(params: &ThermoParams, p: f64, rho: f64) -> Result<f64> {
    positive("pressure", p)?;
    positive("density", rho)?;
    Ok(p / ((params.gamma - 1.0) * rho))
}

/// Relativistic specific enthalpy `1 + e + p/rho`.
pub fn enthalpy(params: &ThermoParams, p: f64, rho: f64) -> Result<f64> {
    Ok(1.0 + internal_energy(params, p, rho)? + p / rho)
}

/// `c_s^2 = (gamma p / rho) / h`.
pub fn sound_speed_sq(params: &ThermoParams, p: f64, rho: f64) -> Result<f64> {
    let h = enthalpy(params, p, rho)?;
    Ok(params.gamma * p / rho / h)
}

/// `1 + gamma (2 - gamma) p / ((gamma - 1) rho)`; positive iff `c_s^2 < 1`.
pub fn causality_indicator(params: &ThermoParams, p: f64, rho: f64) -> f64 {
    let g = params.gamma;
    1.0 + g * (2.0 - g) * p / ((g - 1.0) * rho)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Short condition tag, e.g. `"(9')"`.
    pub tag: &'static str,
    pub description: &'static str,
    /// Signed margin; non-negative means the check passed.
    pub margin: f64,
    pub passed: bool,
}

impl Check {
    pub(crate) fn new(tag: &'static str, description: &'static str, margin: f64, strict: bool) -> Self {
        let passed = if strict { margin > 0.0 } else { margin >= 0.0 };
        Check { tag, description, margin, passed: passed && margin.is_finite() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub checks: Vec<Check>,
    pub admissible: bool,
}

impl HyperbolicityReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, tag: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.tag == tag)
    }

    /// First failure as an error, for callers that need a hard stop.
    pub fn into_result(self) -> Result<()> {
        // Callers that know the speed report light-speed violations directly;
        // here every failure is phrased through its tag.
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::Hyperbolicity(format!(
                "{} {} (margin {:.3e})",
                c.tag, c.description, c.margin
            ))),
        }
    }
}

/// Every admissibility condition on a single state, with margins.
pub fn hyperbolicity_report(params: &ThermoParams, state: &PrimitiveState) -> HyperbolicityReport {
    let p = state.pressure;
    let speed = state.speed();
    let mut checks = vec![
        Check::new("(9')", "pressure must be positive", p, true),
        Check::new("(5.1)", "pressure must be at least pbar", p - params.pbar, false),
        Check::new("(5.1\")", "1 - |v| must be at least nu", 1.0 - speed - params.nu, false),
    ];
    let cs2 = density(params, p, state.entropy).and_then(|rho| sound_speed_sq(params, p, rho));
    let cs_margin = match cs2 {
        Ok(c) => c.min(1.0 - c),
        Err(_) => f64::NEG_INFINITY,
    };
    checks.push(Check::new("(9)", "sound speed squared must lie in (0, 1)", cs_margin, true));
    let gamma_margin = if params.allow_gamma_above_two {
        // Override: the per-state causality check above carries the verdict.
        (2.0 - params.gamma).max(0.0)
    } else {
        2.0 - params.gamma
    };
    checks.push(Check::new("gamma<=2", "adiabatic index must not exceed 2", gamma_margin, false));
    let admissible = checks.iter().all(|c| c.passed);
    HyperbolicityReport { checks, admissible }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn density_examples() {
        let p = ThermoParams::default();
        assert!(close(density(&p, 1.0, 0.0).unwrap(), 1.0));
        let p2 = ThermoParams::with_gamma(2.0);
        assert!(close(density(&p2, 4.0, 0.0).unwrap(), 2.0));
        assert!(density(&p, -1.0, 0.0).is_err());
        assert!(density(&p, 0.0, 0.0).is_err());
    }

    #[test]
    fn thermo_examples() {
        let p = ThermoParams::default();
        assert!(close(internal_energy(&p, 1.0, 1.0).unwrap(), 3.0));
        assert!(close(enthalpy(&p, 1.0, 1.0).unwrap(), 5.0));
        assert!(close(sound_speed_sq(&p, 1.0, 1.0).unwrap(), 4.0 / 15.0));
        let p2 = ThermoParams::with_gamma(2.0);
        assert!(close(internal_energy(&p2, 1.0, 1.0).unwrap(), 1.0));
        assert!(close(enthalpy(&p2, 1.0, 1.0).unwrap(), 3.0));
        assert!(close(sound_speed_sq(&p2, 1.0, 1.0).unwrap(), 2.0 / 3.0));
        assert!(enthalpy(&p, 1e-300, 1.0).unwrap() - 1.0 < 1e-290);
    }

    #[test]
    fn report_examples() {
        let params = ThermoParams { nu: 0.1, ..Default::default() };
        let ok = PrimitiveState::new(1.0, [0.0; 3], [0.0; 3], 0.0);
        assert!(hyperbolicity_report(&params, &ok).admissible);

        let neg = PrimitiveState::new(-1.0, [0.0; 3], [0.0; 3], 0.0);
        let r = hyperbolicity_report(&params, &neg);
        assert!(!r.admissible);
        assert!(!r.check("(9')").unwrap().passed);

        let fast = PrimitiveState::new(1.0, [0.99, 0.0, 0.0], [0.0; 3], 0.0);
        let r = hyperbolicity_report(&params, &fast);
        let c = r.check("(5.1\")").unwrap();
        assert!(!c.passed);
        assert!((c.margin - (0.01 - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn gamma_override_is_reported() {
        let strict = ThermoParams::with_gamma(2.5);
        assert!(strict.validate().is_err());
        let loose = ThermoParams { allow_gamma_above_two: true, ..strict };
        assert!(loose.validate().is_ok());
        // With gamma = 2.5 causality fails once p/rho is large enough.
        let hot = PrimitiveState::new(100.0, [0.0; 3], [0.0; 3], 10.0);
        let r = hyperbolicity_report(&loose, &hot);
        assert!(!r.check("(9)").unwrap().passed);
        let rho = density(&loose, 100.0, 10.0).unwrap();
        assert!(causality_indicator(&loose, 100.0, rho) < 0.0);
    }
}
