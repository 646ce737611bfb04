//! Experiment runners: sweep a metric over transmit power (outage, BER) or
//! an SNR grid (pdf, cdf) with the requested methods, emitting CSV rows.
//!
//! The Monte Carlo branch exploits the linearity of the received SNR in the
//! transmit power: one sample set at the scenario's reference power serves
//! the whole sweep through threshold/argument rescaling, so a power sweep is
//! as deterministic and as cheap as a single run.

use rayon::prelude::*;
use rislink::cascade::{risd_snr, Method, Which};
use rislink::mc::{empirical_cdf, empirical_outage, simulate, SampleSet};
use rislink::metrics::{ber, outage, OutageMethod};
use rislink::specfun::gamma_q;
use rislink::Error;

use crate::scenario::Settings;

/// One CSV record in the `sweep,method,value,err,meta` schema.
#[derive(Debug, Clone)]
pub struct Row {
    pub sweep: f64,
    pub method: String,
    pub value: f64,
    pub err: f64,
    pub meta: Vec<(String, String)>,
}

impl Row {
    pub fn csv_line(&self) -> String {
        let meta = self
            .meta
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!("{},{},{},{},{}", self.sweep, self.method, self.value, self.err, meta)
    }
}

pub const CSV_HEADER: &str = "sweep,method,value,err,meta";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMethod {
    Exact,
    Bound,
    Asymptotic,
    Mc,
}

impl RunMethod {
    pub fn parse_list(s: &str) -> Result<Vec<RunMethod>, String> {
        s.split(',')
            .map(|m| match m.trim() {
                "exact" => Ok(RunMethod::Exact),
                "bound" => Ok(RunMethod::Bound),
                "asymptotic" => Ok(RunMethod::Asymptotic),
                "mc" => Ok(RunMethod::Mc),
                other => Err(format!("unknown method `{other}` (want exact|bound|asymptotic|mc)")),
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunMethod::Exact => "exact",
            RunMethod::Bound => "bound",
            RunMethod::Asymptotic => "asymptotic",
            RunMethod::Mc => "mc",
        }
    }
}

/// Outcome of one method sweep: rows, or a surfaced per-method limitation
/// that must not abort the other methods.
fn surface(method: RunMethod, e: &Error) -> Option<String> {
    match e {
        Error::DimensionLimit { n, max, .. } => Some(format!(
            "method `{}` skipped: exact multivariate evaluation is limited to N <= {max} (scenario has N = {n})",
            method.name()
        )),
        _ => None,
    }
}

fn base_meta(s: &Settings) -> Vec<(String, String)> {
    vec![
        ("n".into(), s.n.to_string()),
        ("L".into(), s.phase_bits.to_string()),
        ("omega".into(), (s.direct_enabled as u8).to_string()),
        ("a".into(), s.path_exponent.to_string()),
        ("topology".into(), s.topology.clone()),
        ("seed".into(), s.seed.to_string()),
        ("trials".into(), s.trials.to_string()),
    ]
}

/// SNR samples at the scenario's reference power; rescaled per sweep point.
fn reference_samples(s: &Settings) -> Result<SampleSet, Error> {
    let sc = s.scenario().map_err(|e| Error::Domain(e.to_string()))?;
    simulate(&sc, &s.mc_config())
}

fn power_scale(s: &Settings, p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - s.p_t_dbm) / 10.0)
}

/// Outage sweep over transmit power.  Errors other than surfaced dimension
/// limits abort the run.
pub fn run_outage(s: &Settings, methods: &[RunMethod]) -> Result<(Vec<Row>, Vec<String>), Error> {
    let powers = s.sweep_powers();
    let gamma_th = s.gamma_th();
    let meta = base_meta(s);
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &method in methods {
        match method {
            RunMethod::Mc => {
                let set = reference_samples(s)?;
                for &p in &powers {
                    // γ(P) = γ(P_ref)·P/P_ref, so rescale the threshold.
                    let (v, e) = empirical_outage(&set, gamma_th / power_scale(s, p))?;
                    rows.push(Row { sweep: p, method: "mc".into(), value: v, err: e, meta: meta.clone() });
                }
            }
            m => {
                let om = match m {
                    RunMethod::Exact => OutageMethod::Exact,
                    RunMethod::Bound => OutageMethod::Bound,
                    RunMethod::Asymptotic => OutageMethod::Asymptotic,
                    RunMethod::Mc => unreachable!(),
                };
                let cfgs = vec![s.element().map_err(|e| Error::Domain(e.to_string()))?; s.n];
                let results: Vec<Result<f64, Error>> = powers
                    .par_iter()
                    .map(|&p| {
                        let snr = s.snr_config(p).map_err(|e| Error::Domain(e.to_string()))?;
                        outage(&snr, &cfgs, gamma_th, om)
                    })
                    .collect();
                let mut skipped = false;
                for (&p, r) in powers.iter().zip(results) {
                    match r {
                        Ok(v) => rows.push(Row {
                            sweep: p,
                            method: m.name().into(),
                            value: v,
                            err: 0.0,
                            meta: meta.clone(),
                        }),
                        Err(e) => match surface(m, &e) {
                            Some(note) if !skipped => {
                                notes.push(note);
                                skipped = true;
                            }
                            Some(_) => {}
                            None => return Err(e),
                        },
                    }
                }
            }
        }
    }
    Ok((rows, notes))
}

/// Average-BER sweep over transmit power.
pub fn run_ber(s: &Settings, methods: &[RunMethod]) -> Result<(Vec<Row>, Vec<String>), Error> {
    let powers = s.sweep_powers();
    let modu = s.modulation_params().map_err(|e| Error::Domain(e.to_string()))?;
    let meta = base_meta(s);
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &method in methods {
        match method {
            RunMethod::Mc => {
                let set = reference_samples(s)?;
                for &p in &powers {
                    let scale = power_scale(s, p);
                    let n = set.snr.len() as f64;
                    let (mut sum, mut sum2) = (0.0, 0.0);
                    for &g in &set.snr {
                        let bep = 0.5 * gamma_q(modu.p, modu.q * g * scale)?;
                        sum += bep;
                        sum2 += bep * bep;
                    }
                    let mean = sum / n;
                    let se = ((sum2 / n - mean * mean).max(0.0) / n).sqrt();
                    rows.push(Row { sweep: p, method: "mc".into(), value: mean, err: se, meta: meta.clone() });
                }
            }
            RunMethod::Asymptotic => {
                notes.push("method `asymptotic` skipped: only defined for outage".into());
            }
            m => {
                let lib_method = if m == RunMethod::Exact { Method::Exact } else { Method::Bound };
                let cfgs = vec![s.element().map_err(|e| Error::Domain(e.to_string()))?; s.n];
                let results: Vec<Result<f64, Error>> = powers
                    .par_iter()
                    .map(|&p| {
                        let snr = s.snr_config(p).map_err(|e| Error::Domain(e.to_string()))?;
                        ber(&snr, &cfgs, &modu, lib_method)
                    })
                    .collect();
                let mut skipped = false;
                for (&p, r) in powers.iter().zip(results) {
                    match r {
                        Ok(v) => rows.push(Row {
                            sweep: p,
                            method: m.name().into(),
                            value: v,
                            err: 0.0,
                            meta: meta.clone(),
                        }),
                        Err(e) => match surface(m, &e) {
                            Some(note) if !skipped => {
                                notes.push(note);
                                skipped = true;
                            }
                            Some(_) => {}
                            None => return Err(e),
                        },
                    }
                }
            }
        }
    }
    Ok((rows, notes))
}

/// PDF or CDF of the combined SNR on the scenario's grid, at the scenario's
/// reference transmit power.
pub fn run_density(s: &Settings, methods: &[RunMethod], which: Which) -> Result<(Vec<Row>, Vec<String>), Error> {
    let grid = s.snr_grid();
    let meta = base_meta(s);
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &method in methods {
        match method {
            RunMethod::Mc => {
                let set = reference_samples(s)?;
                let dist = empirical_cdf(&set, &grid)?;
                match which {
                    Which::Cdf => {
                        for (&g, &c) in grid.iter().zip(&dist.cdf) {
                            rows.push(Row {
                                sweep: g,
                                method: "mc".into(),
                                value: c,
                                err: dist.dkw_halfwidth,
                                meta: meta.clone(),
                            });
                        }
                    }
                    Which::Pdf => {
                        // Histogram density between adjacent grid points.
                        for w in grid.windows(2).zip(dist.cdf.windows(2)) {
                            let (g, c) = w;
                            let mid = (g[0] * g[1]).sqrt();
                            let width = g[1] - g[0];
                            let mass = (c[1] - c[0]).max(0.0);
                            let err = (mass.max(1e-12) / set.snr.len() as f64).sqrt() / width;
                            rows.push(Row {
                                sweep: mid,
                                method: "mc".into(),
                                value: mass / width,
                                err,
                                meta: meta.clone(),
                            });
                        }
                    }
                }
            }
            RunMethod::Asymptotic => {
                notes.push("method `asymptotic` skipped: only defined for outage".into());
            }
            m => {
                let lib_method = if m == RunMethod::Exact { Method::Exact } else { Method::Bound };
                let cfgs = vec![s.element().map_err(|e| Error::Domain(e.to_string()))?; s.n];
                let snr = s.snr_config(s.p_t_dbm).map_err(|e| Error::Domain(e.to_string()))?;
                let results: Vec<Result<f64, Error>> = grid
                    .par_iter()
                    .map(|&g| risd_snr(&snr, &cfgs, g, which, lib_method))
                    .collect();
                let mut skipped = false;
                for (&g, r) in grid.iter().zip(results) {
                    match r {
                        Ok(v) => rows.push(Row {
                            sweep: g,
                            method: m.name().into(),
                            value: v,
                            err: 0.0,
                            meta: meta.clone(),
                        }),
                        Err(e) => match surface(m, &e) {
                            Some(note) if !skipped => {
                                notes.push(note);
                                skipped = true;
                            }
                            Some(_) => {}
                            None => return Err(e),
                        },
                    }
                }
            }
        }
    }
    Ok((rows, notes))
}
