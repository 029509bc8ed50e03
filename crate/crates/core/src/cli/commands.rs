//! Command implementations. Each returns a report value and an exit code.

use super::report::{class, q, qs, status};
use super::scenario::ScenarioFile;
use crate::chern::{
    bundle_delta_vb, ch1_par, ch2_par, delta_par, delta_par_rank2, delta_par_via_characters,
    shift_weights, tensor_line_bundle, ParabolicBundle,
};
use crate::error::{Error, Result};
use crate::localize::delta_vb_loc;
use crate::minimize::{
    global_minimum, minimize, ExtensionCandidate, MinimizationReport, SearchConfig,
};
use crate::model::Model;
use crate::rational::{self, Q};
use crate::testgen::random_class;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
    /// Printed to stderr when the exit code is nonzero.
    pub message: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            exit: 0,
            message: None,
        }
    }

    fn failed(report: Value, err: Error) -> Self {
        Outcome {
            report,
            exit: err.exit_code(),
            message: Some(err.to_string()),
        }
    }
}

pub fn load(text: &str) -> Result<(ScenarioFile, Model)> {
    let file = ScenarioFile::parse(text)?;
    let model = file.to_model()?;
    Ok((file, model))
}

fn invariants(b: &ParabolicBundle) -> Value {
    let chow = b.divisor().chow();
    let mut m = Map::new();
    m.insert("ch1_par".into(), class(&ch1_par(b), chow));
    m.insert("ch2_par".into(), q(&ch2_par(b)));
    m.insert("delta_vb".into(), q(&bundle_delta_vb(b)));
    m.insert("delta_par".into(), q(&delta_par(b)));
    m.insert(
        "delta_par_characters".into(),
        q(&delta_par_via_characters(b)),
    );
    if b.rank() == 2 {
        if let Ok(v) = delta_par_rank2(b) {
            m.insert("delta_par_rank2".into(), q(&v));
        }
    }
    Value::Object(m)
}

fn warnings(bundles: &[&ParabolicBundle]) -> Value {
    let mut w: Vec<String> = bundles
        .iter()
        .flat_map(|b| b.defaulted().iter())
        .map(|p| format!("permutation at {p} not given; identity assumed"))
        .collect();
    w.sort();
    w.dedup();
    json!(w)
}

/// Global invariants of `Ě` and of the extended bundle `E`.
pub fn cmd_delta(file: &ScenarioFile, model: &Model) -> Result<Outcome> {
    let check = model.check_bundle()?;
    let ext = model.extended_bundle()?;
    Ok(Outcome::ok(json!({
        "command": "delta",
        "scenario": file.canonical(),
        "rank": model.rank(),
        "base": invariants(&check),
        "blown_up": invariants(&ext),
        "warnings": warnings(&[&check, &ext]),
    })))
}

fn extension_summary(model: &Model, u: usize) -> Value {
    match (&model.extensions()[u], model.chain(u)) {
        (Some(e), Some(c)) => json!({
            "g": c.g(),
            "mu_chain": e.mu_chain,
            "beta0": q(&e.flag.beta0),
            "f0_deg_delta": e.flag.f0_deg_delta,
        }),
        _ => json!("pullback"),
    }
}

pub fn cmd_decompose(file: &ScenarioFile, model: &Model) -> Result<Outcome> {
    let d = model.decomposition()?;
    let locals: Vec<Value> = d
        .locals
        .iter()
        .enumerate()
        .map(|(u, t)| {
            json!({
                "point": t.point,
                "delta_par_loc": q(&t.value),
                "baseline": q(&t.baseline),
                "above_baseline": q(&(&t.value - &t.baseline)),
                "delta_vb_loc": q(&delta_vb_loc(&model.local_chern(u), model.rank() as i64).unwrap_or_default()),
                "extension": extension_summary(model, u),
            })
        })
        .collect();
    let ok = d.passes();
    let report = json!({
        "command": "decompose",
        "scenario": file.canonical(),
        "delta_par": q(&d.lhs),
        "delta_par_base": q(&d.global),
        "locals": locals,
        "rhs": q(&d.rhs),
        "discrepancy": q(&d.discrepancy()),
        "pullback_route_rhs": q(&d.alternate_rhs),
        "pullback_route_discrepancy": q(&d.alternate_discrepancy()),
        "status": status(ok),
    });
    Ok(if ok {
        Outcome::ok(report)
    } else {
        let err = Error::CheckFailed(format!(
            "decomposition discrepancy {}",
            rational::render(&d.discrepancy())
        ));
        Outcome::failed(report, err)
    })
}

fn candidate(c: &ExtensionCandidate) -> Value {
    json!({
        "g": c.g,
        "mu_chain": c.mu_seq,
        "mu": c.mu(),
        "deg_delta_loc": c.d,
        "f0_deg_delta": c.f0_deg_delta,
        "tau": c.tau,
        "beta0": q(&c.beta0),
        "delta_vb_loc": q(&c.delta_vb_loc()),
    })
}

fn minimization(r: &MinimizationReport) -> Value {
    let s = &r.search;
    let c = &r.certificates;
    json!({
        "point": r.point,
        "kappa": s.kappa,
        "betas": qs(&r.betas),
        "baseline": q(&r.baseline),
        "minimum": q(r.minimum()),
        "minimum_absolute": q(&r.minimum_absolute()),
        "cap": s.cap,
        "g_max_used": s.g_max_used,
        "pruned_g": s.pruned_g,
        "pruned_sequences": s.pruned_sequences,
        "evaluated": s.evaluated,
        "argmin": s.argmin.iter().map(candidate).collect::<Vec<_>>(),
        "certificates": {
            "panov": status(c.panov_ok),
            "stationarity": status(c.stationarity_ok),
            "stationarity_as_stated": status(c.stated_stationarity_ok),
            "interior_argmins": c.interior_argmins,
            "g_bound": status(c.bound_ok),
        },
        "note": "beta0 ranges over [0, 1/4]: an elementary transformation along the exceptional curve maps beta0 to 1/2 - beta0",
    })
}

pub fn cmd_minimize(
    file: &ScenarioFile,
    model: &Model,
    point: Option<&str>,
    config: &SearchConfig,
) -> Result<Outcome> {
    if model.rank() != 2 {
        return Err(Error::rank2(model.rank(), "minimization"));
    }
    let cfg = json!({ "cap": config.cap, "prune": config.prune });
    if let Some(p) = point {
        let r = minimize(model, p, config)?;
        return Ok(Outcome::ok(json!({
            "command": "minimize",
            "scenario": file.canonical(),
            "config": cfg,
            "points": [minimization(&r)],
        })));
    }
    let g = global_minimum(model, config)?;
    let report = json!({
        "command": "minimize",
        "scenario": file.canonical(),
        "config": cfg,
        "points": g.reports.iter().map(minimization).collect::<Vec<_>>(),
        "delta_par_base": q(&g.global),
        "delta_par_min": q(&g.delta_par_min),
        "stability": match g.stability_check {
            None => json!("not asserted"),
            Some(ok) => status(ok),
        },
    });
    Ok(if g.stability_check == Some(false) {
        let err = Error::invariant(
            "stable-restriction",
            format!(
                "scenario asserts stability but the minimal extension has delta_par {}",
                rational::render(&g.delta_par_min)
            ),
        );
        Outcome::failed(report, err)
    } else {
        Outcome::ok(report)
    })
}

struct Check {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn value(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "status": status(self.failures.is_empty()),
            "failures": self.failures,
        })
    }
}

const TENSOR_TRIALS: usize = 8;

fn tensor_check(
    b: &ParabolicBundle,
    rng: &mut ChaCha8Rng,
    label: &str,
    c: &mut Check,
) -> Result<()> {
    let (vb, par) = (bundle_delta_vb(b), delta_par(b));
    for _ in 0..TENSOR_TRIALS {
        let l = random_class(rng, b.divisor().chow());
        let t = tensor_line_bundle(b, &l)?;
        c.expect(bundle_delta_vb(&t) == vb && delta_par(&t) == par, || {
            format!(
                "{label}: invariants change under L = {:?}",
                l.coeffs().iter().map(rational::render).collect::<Vec<_>>()
            )
        });
    }
    Ok(())
}

/// A uniform shift keeping every weight of the flag in [-1, 0], on a 1/24 grid.
fn admissible_shift(weights: &[Q], rng: &mut ChaCha8Rng) -> Q {
    let lo = -rational::int(1) - weights.first().cloned().unwrap_or_default();
    let hi = -weights.last().cloned().unwrap_or_default();
    let steps = ((&hi - &lo) * rational::int(24)).floor();
    let n = rational::to_i64(&steps).unwrap_or(0);
    let k = if n > 0 { rng.gen_range(0..=n) } else { 0 };
    lo + rational::frac(k, 24)
}

fn alpha_check(
    b: &ParabolicBundle,
    rng: &mut ChaCha8Rng,
    label: &str,
    c: &mut Check,
) -> Result<()> {
    let par = delta_par(b);
    for (i, f) in b.flags().iter().enumerate() {
        let shift = admissible_shift(f.weights(), rng);
        let s = shift_weights(b, i, &shift)?;
        c.expect(delta_par(&s) == par, || {
            format!(
                "{label}: shifting component {} by {} changes delta_par",
                b.divisor().components()[i].name,
                rational::render(&shift)
            )
        });
    }
    Ok(())
}

fn dual_path_check(b: &ParabolicBundle, label: &str, c: &mut Check) -> Result<()> {
    let par = delta_par(b);
    c.expect(delta_par_via_characters(b) == par, || {
        format!("{label}: beta form and character form differ")
    });
    if b.rank() == 2 {
        c.expect(delta_par_rank2(b)? == par, || {
            format!("{label}: rank-2 form differs")
        });
    }
    Ok(())
}

pub fn cmd_check(file: &ScenarioFile, model: &Model, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check = model.check_bundle()?;
    let ext = model.extended_bundle()?;
    let bundles = [("base", &check), ("blown_up", &ext)];

    let mut tensor = Check::new("tensor_invariance");
    let mut alpha = Check::new("alpha_tot_cancellation");
    let mut dual = Check::new("dual_path");
    for (label, b) in bundles {
        tensor_check(b, &mut rng, label, &mut tensor)?;
        alpha_check(b, &mut rng, label, &mut alpha)?;
        dual_path_check(b, label, &mut dual)?;
    }

    let mut decomposition = Check::new("decomposition");
    let d = model.decomposition()?;
    decomposition.expect(d.passes(), || {
        format!(
            "discrepancy {} (pullback route {})",
            rational::render(&d.discrepancy()),
            rational::render(&d.alternate_discrepancy())
        )
    });

    let mut chains = Check::new("chain_telescoping");
    for (u, mp) in model.surface().multiple_points().iter().enumerate() {
        let Some(chain) = model.chain(u) else {
            continue;
        };
        let direct = delta_vb_loc(&chain.local_chern(&mp.name), chain.rank() as i64)?;
        let tele = chain.delta_vb_loc_telescoped()?;
        let steps = chain.delta_vb_loc_by_steps();
        chains.expect(
            direct == tele && &tele == steps && !direct.is_negative(),
            || {
                format!(
                    "{}: direct {}, telescoped {}, by steps {}",
                    mp.name,
                    rational::render(&direct),
                    rational::render(&tele),
                    rational::render(steps)
                )
            },
        );
    }

    let all = [tensor, alpha, dual, decomposition, chains];
    let ok = all.iter().all(|c| c.failures.is_empty());
    let report = json!({
        "command": "check",
        "scenario": file.canonical(),
        "seed": seed,
        "checks": all.iter().map(Check::value).collect::<Vec<_>>(),
        "status": status(ok),
    });
    Ok(if ok {
        Outcome::ok(report)
    } else {
        let failed: Vec<&str> = all
            .iter()
            .filter(|c| !c.failures.is_empty())
            .map(|c| c.name)
            .collect();
        Outcome::failed(
            report,
            Error::CheckFailed(format!("failed: {}", failed.join(", "))),
        )
    })
}
