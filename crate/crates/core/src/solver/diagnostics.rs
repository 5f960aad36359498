use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// One row of the linearized-run diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticRecord {
    pub step: usize,
    pub t: f64,
    /// `|||U'|||_{H1}^2 + |phi|^2 + |dt phi|^2 + |d2 phi|^2`.
    #[serde(rename = "I")]
    pub i_total: f64,
    /// Tangential energy: `d1` weighted by `min(x1, 1)`.
    pub tan_energy: f64,
    pub h1_energy: f64,
    pub hn_jump_l2: f64,
    pub hn_jump_max: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub entropy_residual: f64,
    pub prop2_residual: f64,
    pub rt_term: f64,
    pub boundary_flux: f64,
}

/// One row of the periodic-run diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicRecord {
    pub step: usize,
    pub t: f64,
    pub div_h_l2: f64,
    pub div_h_max: f64,
    pub w_max: f64,
    pub entropy_residual: f64,
    pub symmetric_energy: f64,
    pub min_pressure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsSeries<R> {
    pub records: Vec<R>,
}

impl<R> Default for DiagnosticsSeries<R> {
    fn default() -> Self {
        DiagnosticsSeries { records: Vec::new() }
    }
}

impl<R: Serialize> DiagnosticsSeries<R> {
    pub fn push(&mut self, r: R) {
        self.records.push(r);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r).map_err(|e| crate::Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Write the series as CSV with `#`-prefixed header comment lines.
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        for c in comments {
            writeln!(f, "# {c}")?;
        }
        f.write_all(self.to_csv()?.as_bytes())?;
        Ok(())
    }
}

/// Least-squares affine fit `a + b t` of `log(I + delta)` and the largest
/// excess of the data above it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallFit {
    pub delta: f64,
    pub intercept: f64,
    pub slope: f64,
    /// `max(log(I + delta) - fit)`, clipped at zero.
    pub max_excess: f64,
    /// `max - min` of `log(I + delta)`.
    pub range: f64,
    pub all_finite: bool,
}

impl GronwallFit {
    pub fn relative_excess(&self) -> f64 {
        if self.range > 0.0 {
            self.max_excess / self.range
        } else {
            0.0
        }
    }
}

pub fn gronwall_fit(t: &[f64], values: &[f64], delta: f64) -> GronwallFit {
    let all_finite = values.iter().all(|v| v.is_finite() && *v >= 0.0);
    let y: Vec<f64> = values.iter().map(|v| (v + delta).ln()).collect();
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let stt: f64 = t.iter().map(|x| (x - mt) * (x - mt)).sum();
    let sty: f64 = t.iter().zip(&y).map(|(x, v)| (x - mt) * (v - my)).sum();
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    let intercept = my - slope * mt;
    let max_excess = t
        .iter()
        .zip(&y)
        .map(|(x, v)| v - (intercept + slope * x))
        .fold(0.0_f64, f64::max);
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    GronwallFit { delta, intercept, slope, max_excess, range: hi - lo, all_finite }
}
