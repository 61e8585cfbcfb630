//! Dispatch of experiments and output writing.

use std::io::Write;

use num_complex::Complex64;
use qgrd::cqms::{distance, total_boundedness_probe, DistanceConfig, ProbeConfig, RdConstants, State};
use qgrd::format::{fmt_num, round_sig};
use qgrd::grp_alg::{star, GroupAlgElement};
use qgrd::length::{word_length, LengthFunction};
use qgrd::random::{gaussian_element, stream};
use qgrd::rd::{compare_modular, growth_table, rd_test, RdConfig};
use qgrd::spectral::{dirac, lip_lower_bound, lip_seminorm, summability_partial, SummabilityThresholds};
use qgrd::{Label, QuantumGroupInstance};
use serde::Serialize;
use serde_json::json;

use crate::config::{Experiment, Format, RunConfig};
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let instance = QuantumGroupInstance::build(&cfg.descriptor()?)?;
    let gens = generators(&instance, cfg)?;
    let length = |radius: usize| -> Result<LengthFunction, CliError> { Ok(word_length(&instance, &gens, radius)?) };
    match cfg.experiment() {
        Experiment::Growth => {
            let n = cfg.n()?;
            let t = growth_table(&instance, &length(n)?, n)?;
            emit(cfg, &t, &t.to_csv())
        }
        Experiment::ModularContrast => {
            let n = cfg.n()?;
            let r = compare_modular(&instance, &length(n)?, n)?;
            emit(cfg, &r, &r.to_csv())
        }
        Experiment::RdFit => {
            let n = cfg.n()?;
            let mut rc = RdConfig::for_instance(&instance, cfg.samples.unwrap_or(100), cfg.seed());
            if let Some(tol) = cfg.tol {
                rc.tol = tol;
            }
            let l = length(rc.m_scale * n + rc.m_offset + rc.m_extra)?;
            let r = rd_test(&instance, &l, n, &rc)?;
            let csv = format!("{}# s = {}, c = {}\n", r.to_csv(), fmt_num(r.s), fmt_num(r.c));
            emit(cfg, &r, &csv)
        }
        Experiment::Dirac => {
            let m = cfg.m()?;
            let d = dirac(&instance, &length(m)?, m)?;
            let spectrum: Vec<_> = d
                .spectrum()
                .into_iter()
                .map(|(v, mult)| json!({ "eigenvalue": v, "multiplicity": mult }))
                .collect();
            emit(cfg, &spectrum, &d.spectrum_csv())
        }
        Experiment::Summability => {
            let n = cfg.n()?;
            let r = summability_partial(
                &instance,
                &length(n)?,
                cfg.p()?,
                n,
                cfg.s,
                SummabilityThresholds::default(),
            )?;
            let verdict = serde_json::to_value(r.verdict).expect("enum serializes");
            let csv = format!(
                "{}# verdict = {}, final = {}\n",
                r.to_csv(),
                verdict.as_str().unwrap_or_default(),
                fmt_num(r.final_sum())
            );
            emit(cfg, &r, &csv)
        }
        Experiment::Lipnorm => {
            let (k, m) = (cfg.k()?, cfg.m()?);
            let m_max = cfg.m_prime.unwrap_or(m + 4);
            let l = length(m_max.max(m))?;
            let a = match &cfg.element {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
                    GroupAlgElement::from_json(&instance, &text)?
                }
                None => random_element(&instance, &l, cfg.seed())?,
            };
            let est = lip_seminorm(&instance, &a, k, &l, m, cfg.tol(), m_max)?;
            let lower = lip_lower_bound(&instance, &a, k, &l)?.sqrt();
            let result = json!({
                "value": est.value,
                "converged": est.converged,
                "m_used": est.m_used,
                "history": est.history,
                "lower_bound": lower,
                "element": serde_json::from_str::<serde_json::Value>(&a.to_json()).expect("valid JSON"),
            });
            let mut csv = String::from("M,value\n");
            for (mm, v) in &est.history {
                csv.push_str(&format!("{},{}\n", mm, fmt_num(*v)));
            }
            emit(cfg, &result, &csv)?;
            if !est.converged {
                return Err(CliError::not_converged(format!(
                    "seminorm still moving at M = {} (tolerance {})",
                    est.m_used,
                    cfg.tol()
                )));
            }
            Ok(())
        }
        Experiment::Distance => {
            let (k, m) = (cfg.k()?, cfg.m()?);
            let mut dc = DistanceConfig::new(k, m);
            dc.m_prime = cfg.m_prime;
            if let Some(tol) = cfg.tol {
                dc.tol = tol;
            }
            let l = length(dc.m_prime())?;
            let s1 = State::parse(&instance, &l, m, cfg.state1.as_deref().unwrap_or_default())?;
            let s2 = State::parse(&instance, &l, m, cfg.state2.as_deref().unwrap_or_default())?;
            let r = distance(&instance, &l, &s1, &s2, &dc)?;
            let csv = format!(
                "value,seminorm,feasibility_residual,converged,basis_size\n{},{},{},{},{}\n",
                fmt_num(r.value),
                fmt_num(r.seminorm),
                fmt_num(r.feasibility_residual),
                r.converged,
                r.basis_size
            );
            emit(cfg, &r, &csv)?;
            if !r.converged {
                return Err(CliError::not_converged("barrier method did not reach the requested gap"));
            }
            Ok(())
        }
        Experiment::Probe => {
            let (k, n) = (cfg.k()?, cfg.n()?);
            let mut pc = ProbeConfig::new(k, n, cfg.samples.unwrap_or(100), cfg.seed());
            pc.m_prime = cfg.m_prime;
            let rd = match (cfg.c, cfg.s) {
                (Some(c), Some(s)) => Some(RdConstants { c, s }),
                _ => None,
            };
            let support = pc.support.unwrap_or(n + 1);
            let l = length(pc.m_prime.unwrap_or(2 * support).max(support))?;
            let r = total_boundedness_probe(&instance, &l, rd, &pc)?;
            let csv = format!(
                "{}# c_n = {}, low_violations = {}, tail_violations = {}\n",
                r.to_csv(),
                fmt_num(r.c_n),
                r.low_violations,
                r.tail_violations
            );
            emit(cfg, &r, &csv)
        }
    }
}

fn generators(instance: &QuantumGroupInstance, cfg: &RunConfig) -> Result<Vec<Label>, CliError> {
    let Some(text) = &cfg.generators else {
        return Ok(instance.canonical_generators());
    };
    // split on commas outside brackets so that `[1,0],[0,1]` works
    let mut items = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&text[start..]);
    items
        .into_iter()
        .map(|item| {
            let item = item.trim();
            let label: Label = serde_json::from_str(item)
                .or_else(|_| serde_json::from_value(json!(item)))
                .map_err(|_| CliError::invalid(format!("cannot read generator `{item}`")))?;
            Ok(instance.normalize_label(label)?)
        })
        .collect()
}

/// Self-adjoint element with Gaussian coefficients on `0 < l <= 1`.
fn random_element(instance: &QuantumGroupInstance, l: &LengthFunction, seed: u64) -> Result<GroupAlgElement, CliError> {
    let trivial = instance.trivial();
    let labels: Vec<Label> = l.ball(1.0)?.into_iter().map(|(x, _)| x).filter(|x| *x != trivial).collect();
    let x = gaussian_element(instance, &labels, &mut stream(seed, 0, 0))?;
    Ok(x.add(&star(instance, &x)?).scale(Complex64::new(0.5, 0.0)))
}

fn emit<T: Serialize>(cfg: &RunConfig, result: &T, csv: &str) -> Result<(), CliError> {
    let config = serde_json::to_string(cfg).expect("config serializes");
    let body = match cfg.format() {
        Format::Csv => format!("# qgrd {}\n# config: {}\n{}", env!("CARGO_PKG_VERSION"), config, csv),
        Format::Json => {
            let mut result = serde_json::to_value(result).expect("result serializes");
            round_numbers(&mut result);
            let doc = json!({
                "version": env!("CARGO_PKG_VERSION"),
                "config": serde_json::from_str::<serde_json::Value>(&config).expect("valid JSON"),
                "result": result,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("result serializes"))
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}

/// Rounds every float to the 12 significant digits used in CSV output.
fn round_numbers(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}
