//! Dispatch of a validated [`RunConfig`] to the numeric core.

use phivar::stochastic::{
    chain_cov, chain_cov_exact, chain_sigma2, ensemble_stats, equidistribution_stat, initial_law, martingale_residual,
    restricted_nstep, restricted_one_step, sample_ensemble, sample_path, transition_matrix, STATES,
};
use phivar::{
    checked_cells, convergence_report, phi_limit, variation_index, AlphaMode, CompensatedSum, Matrix, PeriodicBase,
    Sign, Spec, VariationIndex,
};
use serde_json::{json, Map, Value};

use crate::config::{CommandConfig, RunConfig};
use crate::report::*;
use crate::CliError;

fn spec_json(spec: &Spec) -> Value {
    let base = match spec.base {
        PeriodicBase::Tent => json!({ "kind": "tent" }),
        PeriodicBase::Trig { nu, rho } => json!({ "kind": "trig", "nu": nu, "rho": rho }),
    };
    let (mode, magnitude) = match spec.mode {
        AlphaMode::Critical => ("critical", spec.alpha_magnitude()),
        AlphaMode::General(m) => ("general", m),
    };
    json!({
        "base": base,
        "b": spec.b,
        "alpha_sign": spec.sign.symbol(),
        "mode": mode,
        "alpha_magnitude": magnitude,
        "alpha": spec.alpha(),
    })
}

fn params_json(command: &CommandConfig) -> Value {
    match command {
        CommandConfig::Eval { spec, t, tol } => json!({ "spec": spec_json(spec), "t": t, "tol": tol }),
        CommandConfig::Variation { spec, n, t, q } => json!({ "spec": spec_json(spec), "n": n, "t": t, "q": q }),
        CommandConfig::Limit { spec, t } => json!({ "spec": spec_json(spec), "t": t }),
        CommandConfig::Chain { b, sign, n_max } => json!({ "b": b, "sign": sign.symbol(), "n_max": n_max }),
        CommandConfig::Mc { spec, n, count, seed } => {
            json!({ "spec": spec_json(spec), "n": n, "count": count, "seed": seed })
        }
        CommandConfig::Diagnose { spec, n, seed, levels } => {
            json!({ "spec": spec_json(spec), "n": n, "seed": seed, "levels": levels })
        }
    }
}

fn progress(config: &RunConfig, msg: impl AsRef<str>) {
    if config.progress {
        eprintln!("phivar: {}", msg.as_ref());
    }
}

fn matrix_strings<T: Clone + ToString>(m: &Matrix<T>) -> Vec<Vec<String>> {
    m.rows().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Runs the configured command and returns its report.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let command = &config.command;
    let params = params_json(command);
    let body = match command {
        CommandConfig::Eval { spec, t, tol } => {
            let rows =
                t.iter().map(|&t| Ok(EvalRow { t, f: spec.eval_f(t, *tol)? })).collect::<Result<Vec<_>, CliError>>()?;
            Body::Eval { rows }
        }
        CommandConfig::Variation { spec, n, t, q } => {
            let mut rows = Vec::new();
            let mut levels = n.clone();
            levels.sort_unstable();
            levels.dedup();
            for &level in &levels {
                progress(config, format!("variation: level {level}"));
                let report = convergence_report(spec, &[level], t, q)?;
                rows.extend(report.rows.into_iter().map(|r| {
                    let v_q: Map<String, Value> = r.v_q.iter().map(|(q, v)| (q.to_string(), json!(v))).collect();
                    VariationRowOut {
                        n: r.n,
                        t: r.t,
                        v_phi: r.v_phi,
                        v_q,
                        theory_limit: r.theory_limit,
                        ratio: r.ratio,
                    }
                }));
            }
            Body::Variation { rows }
        }
        CommandConfig::Limit { spec, t } => {
            let rows = t
                .iter()
                .map(|&t| match phi_limit(spec, t) {
                    Ok(l) => Ok(LimitRowOut {
                        t,
                        value: Some(l.value),
                        formula_id: Some(l.formula_id.name().into()),
                        sigma2: Some(l.sigma2),
                    }),
                    // Non-critical specs have no Φ-variation limit; the row
                    // then carries only the variation index.
                    Err(phivar::Error::Mode) => Ok(LimitRowOut { t, value: None, formula_id: None, sigma2: None }),
                    Err(e) => Err(CliError::from(e)),
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let index = variation_index(spec);
            let class = match index {
                VariationIndex::BoundedVariation => "bounded_variation",
                VariationIndex::Critical => "critical",
                VariationIndex::Rough { .. } => "rough",
            };
            Body::Limit { rows, variation_index: IndexOut { class: class.into(), p: index.p() } }
        }
        CommandConfig::Chain { b, sign, n_max } => Body::Chain(chain_body(*b, *sign, *n_max)?),
        CommandConfig::Mc { spec, n, count, seed } => {
            progress(config, format!("mc: sampling {count} paths of length {n}"));
            let ens = sample_ensemble(spec, *n, *count, *seed)?;
            let stats = ensemble_stats(spec, &ens)?;
            let theory_limit = phi_limit(spec, 1.0).ok().map(|l| l.value);
            Body::Mc(McOut {
                n: stats.n,
                count: stats.count,
                seed: *seed,
                mean: stats.mean,
                variance: stats.variance,
                second_moment_per_step: stats.second_moment_per_step,
                sigma2: stats.sigma2,
                ks_normal: stats.ks_normal,
                scaled_phi: stats.scaled_phi,
                scaled_phi_std_error: stats.scaled_phi_std_error,
                theory_limit,
                transitions: stats.transitions.map(|t| TransitionsOut {
                    frequencies: t.frequencies.iter().map(|r| r.to_vec()).collect(),
                    max_abs_z: t.max_abs_z,
                    degenerate_entries_exact: t.degenerate_entries_exact,
                }),
            })
        }
        CommandConfig::Diagnose { spec, n, seed, levels } => {
            Body::Diagnose(diagnose_body(config, spec, *n, *seed, *levels)?)
        }
    };
    Ok(Report::new(command.name(), params, body))
}

fn chain_body(b: u64, sign: Sign, n_max: u32) -> Result<ChainOut, CliError> {
    let p = transition_matrix(b, sign)?;
    let mu1 = initial_law(b)?;
    let restricted = restricted_one_step(b, sign)?;
    // (½, 0, ½) is invariant for both signs.
    let half = phivar::stochastic::Rational::new(1, 2);
    let zero = phivar::stochastic::Rational::new(0, 1);
    let stationary = vec![half, zero, half];
    debug_assert_eq!(p.left_apply(&stationary), stationary);
    let sigma2 = chain_sigma2(b, sign)?;
    let covariances = (0..=n_max)
        .map(|n| {
            Ok(CovOut { n, exact: chain_cov_exact(b, sign, n)?.to_string(), value: chain_cov::<f64>(b, sign, n)? })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let nstep = (1..=n_max)
        .map(|n| Ok(NstepOut { n, matrix: matrix_strings(&restricted_nstep(b, sign, n)?) }))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ChainOut {
        b,
        sign: sign.symbol().into(),
        states: STATES.to_vec(),
        transition_matrix: matrix_strings(&p),
        mu1: mu1.iter().map(ToString::to_string).collect(),
        restricted_one_step: matrix_strings(&restricted),
        stationary: stationary.iter().map(ToString::to_string).collect(),
        sigma2: sigma2.to_string(),
        sigma2_f64: *sigma2.numer() as f64 / *sigma2.denom() as f64,
        covariances,
        nstep,
    })
}

fn diagnose_body(config: &RunConfig, spec: &Spec, n: u32, seed: u64, levels: u32) -> Result<DiagnoseOut, CliError> {
    let mut martingale = Vec::new();
    for level in 1..=levels {
        progress(config, format!("diagnose: martingale residuals at level {level}"));
        let cells = checked_cells(spec.b, level - 1)?;
        let mut max_abs = 0.0f64;
        let mut mean = CompensatedSum::new();
        for r in 0..cells {
            let res: f64 = martingale_residual(spec, level, r)?;
            max_abs = max_abs.max(res.abs());
            mean.add(res);
        }
        martingale.push(ResidualRow {
            level,
            cells,
            max_abs_residual: max_abs,
            mean_residual: mean.value() / cells as f64,
        });
    }
    progress(config, format!("diagnose: path of length {n}"));
    let path = sample_path(spec, n, seed, 0)?;
    let (qv, qv_target) = match (&path.qv, spec.base) {
        (Some(qv), PeriodicBase::Trig { nu, rho }) => {
            let mut ks: Vec<u32> =
                std::iter::successors(Some(1u32), |k| k.checked_mul(2)).take_while(|&k| k <= n).collect();
            if ks.last() != Some(&n) && n > 0 {
                ks.push(n);
            }
            let rows = ks
                .into_iter()
                .map(|k| QvRow { k, qv: qv[k as usize], qv_per_step: qv[k as usize] / f64::from(k) })
                .collect();
            let target = 2.0 * std::f64::consts::PI.powi(2) * (nu * nu + rho * rho);
            (Some(rows), Some(target))
        }
        _ => (None, None),
    };
    let equidistribution_ks = if n >= 100 { Some(equidistribution_stat(&path, spec.b)?) } else { None };
    Ok(DiagnoseOut { n, seed, martingale, qv, qv_target, equidistribution_ks })
}
