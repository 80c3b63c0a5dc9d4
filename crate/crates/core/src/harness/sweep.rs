use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_slope, LinearFit};
use crate::error::{Result, SbtError};
use crate::force::ForceDensity;
use crate::geometry::Frame;
use crate::par;
use crate::residuals::{cross_section, CrossSectionReport};

/// Abscissa used for a log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    /// `log ε`
    LogEps,
    /// `log(ε |log ε|)`
    LogEpsAbsLogEps,
}

impl Regressor {
    pub fn apply(self, eps: f64) -> f64 {
        match self {
            Regressor::LogEps => eps.ln(),
            Regressor::LogEpsAbsLogEps => (eps * eps.ln().abs()).ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub quantity: String,
    pub regressor: Regressor,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Residual norms over the `n_s` cross sections at one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub eps: f64,
    pub ur_max: f64,
    pub force_residual_max: f64,
    pub force_residual_l2: f64,
    pub centerline_residual_max: f64,
    pub centerline_residual_l2: f64,
    /// Max over `s` of, in order: `|f_p - ½ f_normal|`, `|f_1 - ½(f + f_t e_t)|`,
    /// `|f_2|`, `|f_3|`, `|f_4|`.
    pub component_deviation_max: [f64; 5],
    /// Max over `s` of the relative mismatch between the summed components
    /// and the directly integrated traction.
    pub closure_max: f64,
    pub runtime_seconds: f64,
}

/// An ε whose quadrature did not reach the requested tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsFailure {
    pub eps: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub config_hash: String,
    pub c_gamma: f64,
    pub kappa_max: f64,
    pub kappa3: f64,
    pub eps_limit: f64,
    pub n_theta: usize,
    pub n_s: usize,
    pub records: Vec<EpsRecord>,
    pub failures: Vec<EpsFailure>,
    pub slopes: Vec<SlopeFit>,
}

impl SweepReport {
    /// The report with wall-clock fields zeroed; two runs of the same config
    /// produce identical payloads.
    pub fn payload(&self) -> SweepReport {
        let mut p = self.clone();
        for r in &mut p.records {
            r.runtime_seconds = 0.0;
        }
        p
    }

    pub fn slope(&self, quantity: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.quantity == quantity)
    }
}

fn component_deviations(frame: &Frame, force: &ForceDensity, r: &CrossSectionReport) -> [f64; 5] {
    let at = frame.at(r.s);
    let f = force.eval(r.s);
    let ft = at.tangent * at.tangent.dot(&f);
    let c = &r.components;
    [
        (c.pressure - (f - ft) * 0.5).norm(),
        (c.one - (f + ft) * 0.5).norm(),
        c.two.norm(),
        c.three.norm(),
        c.four.norm(),
    ]
}

fn summarize(eps: f64, frame: &Frame, force: &ForceDensity, sections: &[CrossSectionReport], runtime: f64) -> EpsRecord {
    let n = sections.len() as f64;
    let max = |f: &dyn Fn(&CrossSectionReport) -> f64| sections.iter().map(f).fold(0.0, f64::max);
    let l2 = |f: &dyn Fn(&CrossSectionReport) -> f64| (sections.iter().map(|r| f(r).powi(2)).sum::<f64>() / n).sqrt();
    let mut dev = [0.0f64; 5];
    for r in sections {
        for (d, v) in dev.iter_mut().zip(component_deviations(frame, force, r)) {
            *d = d.max(v);
        }
    }
    EpsRecord {
        eps,
        ur_max: max(&|r| r.ur_max),
        force_residual_max: max(&|r| r.force_residual()),
        force_residual_l2: l2(&|r| r.force_residual()),
        centerline_residual_max: max(&|r| r.centerline_residual_max),
        centerline_residual_l2: l2(&|r| r.centerline_residual_max),
        component_deviation_max: dev,
        closure_max: max(&|r| r.closure_error()),
        runtime_seconds: runtime,
    }
}

/// Series with a value at or below this are rounding noise and not fitted.
const NUMERICAL_ZERO: f64 = 1e-13;

const COMPONENT_NAMES: [&str; 5] = [
    "component_p_deviation",
    "component_1_deviation",
    "component_2",
    "component_3",
    "component_4",
];

fn fit_all(records: &[EpsRecord]) -> Vec<SlopeFit> {
    let mut series: Vec<(String, Regressor, Vec<f64>)> = vec![
        ("ur_max".into(), Regressor::LogEpsAbsLogEps, records.iter().map(|r| r.ur_max).collect()),
        ("force_residual_max".into(), Regressor::LogEps, records.iter().map(|r| r.force_residual_max).collect()),
        (
            "centerline_residual_max".into(),
            Regressor::LogEpsAbsLogEps,
            records.iter().map(|r| r.centerline_residual_max).collect(),
        ),
    ];
    for (j, name) in COMPONENT_NAMES.iter().enumerate() {
        series.push((
            (*name).into(),
            Regressor::LogEps,
            records.iter().map(|r| r.component_deviation_max[j]).collect(),
        ));
    }
    series
        .into_iter()
        .filter(|(_, _, ys)| ys.iter().all(|y| *y > NUMERICAL_ZERO && y.is_finite()))
        .filter_map(|(quantity, regressor, ys)| {
            let pts: Vec<(f64, f64)> = records.iter().zip(&ys).map(|(r, y)| (regressor.apply(r.eps), y.ln())).collect();
            let LinearFit { slope, intercept, r_squared } = fit_slope(&pts).ok()?;
            Some(SlopeFit {
                quantity,
                regressor,
                slope,
                intercept,
                r_squared,
            })
        })
        .collect()
}

/// Runs every ε of `cfg` over `n_s` uniformly spaced cross sections and fits
/// the residual decay rates. Writes the report when `cfg.output_dir` is set.
///
/// An ε whose quadrature misses its tolerance is listed in
/// [`SweepReport::failures`] and left out of the fits.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let frame = cfg.centerline.build()?;
    let force = cfg.force.build()?;
    let eps_list = cfg.resolved_eps(&frame)?;
    let s_grid: Vec<f64> = (0..cfg.n_s).map(|i| i as f64 / cfg.n_s as f64).collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &eps in &eps_list {
        let spec = cfg.quadrature_for(eps);
        let start = Instant::now();
        let sections: Result<Vec<CrossSectionReport>> =
            par::map(&s_grid, |&s| cross_section(&frame, &force, eps, s, cfg.n_theta, &spec))
                .into_iter()
                .collect();
        match sections {
            Ok(sections) => {
                records.push(summarize(eps, &frame, &force, &sections, start.elapsed().as_secs_f64()))
            }
            Err(e @ SbtError::ToleranceNotMet { .. }) => failures.push(EpsFailure {
                eps,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let slopes = if records.len() >= 3 { fit_all(&records) } else { Vec::new() };
    let report = SweepReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
        c_gamma: frame.centerline().c_gamma(),
        kappa_max: frame.kappa_max(),
        kappa3: frame.kappa3(),
        eps_limit: frame.eps_limit(),
        n_theta: cfg.n_theta,
        n_s: cfg.n_s,
        records,
        failures,
        slopes,
    };
    if let Some(dir) = &cfg.output_dir {
        write_report(&report, dir)?;
    }
    Ok(report)
}

/// Writes `report.json` and the per-ε table `sweep.csv` into `dir`.
pub fn write_report(report: &SweepReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    w.write_record([
        "eps",
        "ur_max",
        "force_residual_max",
        "force_residual_l2",
        "centerline_residual_max",
        "centerline_residual_l2",
        "closure_max",
        "runtime_seconds",
    ])?;
    for r in &report.records {
        w.write_record(
            [
                r.eps,
                r.ur_max,
                r.force_residual_max,
                r.force_residual_l2,
                r.centerline_residual_max,
                r.centerline_residual_l2,
                r.closure_max,
                r.runtime_seconds,
            ]
            .iter()
            .map(|v| format!("{v:.17e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{CurveSpec, ForceSpec};

    #[test]
    fn small_sweep_is_reproducible() {
        let mut cfg = ExperimentConfig::new(CurveSpec::named("circle"), ForceSpec::Constant { constant: [1.0, 0.5, 1.0] });
        cfg.eps_list = vec![0.01, 0.005, 0.0025];
        cfg.n_s = 4;
        cfg.n_theta = 32;
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.payload(), b.payload());
        assert_eq!(a.records.len(), 3);
        assert!(a.records.iter().all(|r| r.closure_max < 1e-10));
        assert!(a.slope("ur_max").is_some());
    }

    #[test]
    fn inadmissible_eps_rejected() {
        let mut cfg = ExperimentConfig::new(CurveSpec::named("circle"), ForceSpec::named("constant"));
        cfg.eps_list = vec![0.05, 0.01, 0.005];
        assert!(matches!(run_sweep(&cfg), Err(SbtError::EpsilonTooLarge { .. })));
    }

    #[test]
    fn report_files_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(CurveSpec::named("circle"), ForceSpec::named("harmonic"));
        cfg.eps_list = vec![0.01, 0.005, 0.0025];
        cfg.n_s = 2;
        cfg.n_theta = 32;
        cfg.output_dir = Some(dir.path().to_path_buf());
        let report = run_sweep(&cfg).unwrap();
        let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        let back: SweepReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        let rows = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(rows.lines().count(), 4);
    }
}
