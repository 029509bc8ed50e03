//! Rank-2 search for the extension minimizing the local parabolic
//! discriminant at one exceptional divisor.

use crate::elemtrans::{mu_sequences, rank2_local_degrees, validate_mu_seq};
use crate::error::{Error, Result};
use crate::localize::{
    delta_par_global, delta_par_loc_diff_rank2, pullback_baseline, ExceptionalFlag,
};
use crate::model::{Extension, Model};
use crate::rational::{self, Q};
use num_traits::{Signed, Zero};

/// One numerical extension across an exceptional divisor. Field order is the
/// tie-breaking order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtensionCandidate {
    pub g: usize,
    pub mu_seq: Vec<i64>,
    pub d: Vec<i64>,
    pub f0_deg_delta: i64,
    pub tau: Vec<i64>,
    pub beta0: Q,
}

impl ExtensionCandidate {
    pub fn pullback(kappa: usize) -> Self {
        ExtensionCandidate {
            g: 0,
            mu_seq: vec![],
            d: vec![0; kappa],
            f0_deg_delta: 0,
            tau: vec![1; kappa],
            beta0: Q::zero(),
        }
    }

    pub fn mu(&self) -> i64 {
        self.mu_seq.last().copied().unwrap_or(0)
    }

    /// `½ Σ_j (μ_j − ½)`
    pub fn delta_vb_loc(&self) -> Q {
        self.mu_seq.iter().fold(Q::zero(), |acc, &m| {
            acc + (rational::int(m) - rational::half()) / rational::int(2)
        })
    }

    pub fn flag(&self) -> ExceptionalFlag {
        ExceptionalFlag {
            beta0: self.beta0.clone(),
            f0_deg_delta: self.f0_deg_delta,
            tau: self.tau.clone(),
        }
    }

    pub fn validate(&self, kappa: usize) -> Result<()> {
        validate_mu_seq(&self.mu_seq)?;
        if self.g != self.mu_seq.len() {
            return Err(Error::invariant(
                "candidate-length",
                "g must equal the chain length",
            ));
        }
        if self.d.len() != kappa || self.tau.len() != kappa {
            return Err(Error::invariant(
                "incident-count",
                "one local degree and one tau per incident component",
            ));
        }
        for &d in &self.d {
            rank2_local_degrees(self.g as i64, d)?;
        }
        let mu = self.mu();
        self.flag().validate(mu)?;
        if self.f0_deg_delta > mu {
            return Err(Error::invariant(
                "exceptional-flag-degree",
                format!(
                    "candidate degree {} exceeds the cap {mu}",
                    self.f0_deg_delta
                ),
            ));
        }
        if self.beta0 > rational::quarter() {
            return Err(Error::invariant(
                "beta0-range",
                "candidate beta0 must lie in [0, 1/4]",
            ));
        }
        Ok(())
    }

    pub fn to_extension(&self) -> Extension {
        Extension {
            mu_chain: self.mu_seq.clone(),
            deg_delta_loc: self.d.clone(),
            flag: self.flag(),
        }
    }
}

fn check_betas(betas: &[Q]) -> Result<()> {
    for b in betas {
        if b.is_negative() || b >= &rational::half() {
            return Err(Error::invariant(
                "rank2-beta-range",
                format!("incident beta {} is outside [0, 1/2)", rational::render(b)),
            ));
        }
    }
    Ok(())
}

/// Local difference `Δ^Par_loc(E) − Δ^Par_loc(φ*Ě)` of a candidate.
pub fn candidate_value(c: &ExtensionCandidate, betas: &[Q]) -> Result<Q> {
    check_betas(betas)?;
    c.validate(betas.len())?;
    delta_par_loc_diff_rank2(&c.delta_vb_loc(), &c.flag(), &c.d, betas)
}

fn signed_sum(tau: &[i64], betas: &[Q]) -> Q {
    tau.iter()
        .zip(betas)
        .fold(Q::zero(), |acc, (&t, b)| acc + rational::int(t) * b)
}

/// Minimizes `β₀² + β₀·(f₀ − 2Σ τ_i β_i)` over `β₀ ∈ [0, 1/4]`; returns the
/// minimizer and the minimum.
pub fn optimal_beta0(f0_deg_delta: i64, tau: &[i64], betas: &[Q]) -> (Q, Q) {
    let s = signed_sum(tau, betas) * rational::int(2);
    let lin = rational::int(f0_deg_delta) - &s;
    let b0 = rational::clamp(-&lin / rational::int(2), &Q::zero(), &rational::quarter());
    let v = &b0 * &b0 + &b0 * &lin;
    (b0, v)
}

/// `(g² − 2g)/4 − (g + 1)κ/2`
pub fn g_lower_bound(g: usize, kappa: usize) -> Q {
    let g = g as i64;
    rational::frac(g * g - 2 * g, 4) - rational::frac((g + 1) * kappa as i64, 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Upper bound on `μ` of the extension; defaults to `max(κ, 1)`.
    pub cap: Option<i64>,
    pub prune: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            cap: None,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub kappa: usize,
    pub cap: i64,
    pub minimum: Q,
    pub argmin: Vec<ExtensionCandidate>,
    pub g_max_used: usize,
    pub pruned_g: Vec<usize>,
    pub pruned_sequences: usize,
    pub evaluated: usize,
}

fn tau_patterns(kappa: usize) -> Vec<Vec<i64>> {
    (0..1usize << kappa)
        .map(|mask| {
            (0..kappa)
                .map(|i| {
                    if mask >> (kappa - 1 - i) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect()
}

fn grid(g: i64) -> Vec<i64> {
    (-g..=g).step_by(2).collect()
}

/// All `d` vectors minimizing `Σ β_i d_i` for `g` steps.
fn best_d_vectors(g: usize, betas: &[Q]) -> (Q, Vec<Vec<i64>>) {
    let g = g as i64;
    let mut value = Q::zero();
    let mut options: Vec<Vec<i64>> = Vec::with_capacity(betas.len());
    for b in betas {
        if b.is_zero() {
            options.push(grid(g));
        } else {
            value -= b * rational::int(g);
            options.push(vec![-g]);
        }
    }
    let mut out = vec![vec![]];
    for opt in options {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                opt.iter().map(move |&d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    (value, out)
}

/// Exact minimum over the candidate space for incident weights `betas`.
///
/// Candidates with `β₀ = 0` do not see `f₀` or `τ`; they are represented by
/// `f₀ = μ` and `τ = +1`.
pub fn minimize_betas(betas: &[Q], config: &SearchConfig) -> Result<SearchResult> {
    check_betas(betas)?;
    let kappa = betas.len();
    if kappa == 0 {
        return Err(Error::invariant(
            "incident-count",
            "an exceptional divisor without incident components",
        ));
    }
    let cap = config.cap.unwrap_or((kappa as i64).max(1));
    if cap < 0 {
        return Err(Error::invariant(
            "search-cap",
            "the cap must be nonnegative",
        ));
    }
    let beta_sum = rational::sum(betas);
    let taus = tau_patterns(kappa);
    let mut best: Option<Q> = None;
    let mut hits: Vec<ExtensionCandidate> = Vec::new();
    let mut result = SearchResult {
        kappa,
        cap,
        minimum: Q::zero(),
        argmin: vec![],
        g_max_used: 0,
        pruned_g: vec![],
        pruned_sequences: 0,
        evaluated: 0,
    };

    for g in 0..=cap as usize {
        if config.prune {
            if let Some(b) = &best {
                if &g_lower_bound(g, kappa) > b {
                    result.pruned_g.push(g);
                    continue;
                }
            }
        }
        result.g_max_used = g;
        let (d_value, _) = best_d_vectors(g, betas);
        for seq in mu_sequences(g, cap) {
            let mu = seq.last().copied().unwrap_or(0);
            let probe = ExtensionCandidate {
                g,
                mu_seq: seq.clone(),
                d: vec![],
                f0_deg_delta: mu,
                tau: vec![1; kappa],
                beta0: Q::zero(),
            };
            let vb = probe.delta_vb_loc();
            if config.prune {
                if let Some(b) = &best {
                    let bound = &vb
                        - rational::frac(mu, 4)
                        - (rational::int(g as i64) + rational::half()) * &beta_sum;
                    if &bound > b {
                        result.pruned_sequences += 1;
                        continue;
                    }
                }
            }
            let base = &vb + &d_value;
            let mut options = vec![(mu, vec![1; kappa], Q::zero(), Q::zero())];
            for tau in &taus {
                for f0 in grid(mu) {
                    let (b0, h) = optimal_beta0(f0, tau, betas);
                    if b0.is_positive() {
                        options.push((f0, tau.clone(), b0, h));
                    }
                }
            }
            for (f0, tau, b0, h) in options {
                result.evaluated += 1;
                let value = &base + &h;
                let better = best.as_ref().is_none_or(|b| &value < b);
                if better {
                    best = Some(value.clone());
                    hits.clear();
                }
                if best.as_ref() == Some(&value) {
                    hits.push(ExtensionCandidate {
                        g,
                        mu_seq: seq.clone(),
                        d: vec![],
                        f0_deg_delta: f0,
                        tau,
                        beta0: b0,
                    });
                }
            }
        }
    }

    let minimum = best.expect("the pullback candidate is always evaluated");
    let mut argmin = Vec::new();
    // every d vector minimizing Σ β_i d_i ties
    for c in hits {
        let (_, d_vectors) = best_d_vectors(c.g, betas);
        for d in d_vectors {
            argmin.push(ExtensionCandidate { d, ..c.clone() });
        }
    }
    argmin.sort();
    argmin.dedup();
    result.minimum = minimum;
    result.argmin = argmin;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificates {
    /// `μ ≤ κ` at every argmin.
    pub panov_ok: bool,
    /// At every argmin with `0 < β₀ < 1/4` the objective is stationary in
    /// `β₀`: `deg^δ(F⁰) = 2Σ τ_i β_i − 2β₀`.
    pub stationarity_ok: bool,
    /// The same check against `deg^δ(F⁰) = 2β₀ + 2Σ τ_i β_i`.
    pub stated_stationarity_ok: bool,
    pub interior_argmins: usize,
    /// The minimum is at least the `g` bound of every argmin.
    pub bound_ok: bool,
}

pub fn certificates(result: &SearchResult, betas: &[Q]) -> Certificates {
    let kappa = result.kappa as i64;
    let mut c = Certificates {
        panov_ok: true,
        stationarity_ok: true,
        stated_stationarity_ok: true,
        interior_argmins: 0,
        bound_ok: true,
    };
    for a in &result.argmin {
        c.panov_ok &= a.mu() <= kappa;
        c.bound_ok &= result.minimum >= g_lower_bound(a.g, result.kappa);
        if a.beta0.is_positive() && a.beta0 < rational::quarter() {
            c.interior_argmins += 1;
            let s = signed_sum(&a.tau, betas) * rational::int(2);
            let f0 = rational::int(a.f0_deg_delta);
            let twice_b0 = &a.beta0 * rational::int(2);
            c.stationarity_ok &= f0 == &s - &twice_b0;
            c.stated_stationarity_ok &= f0 == &twice_b0 + &s;
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizationReport {
    pub point: String,
    pub betas: Vec<Q>,
    /// `Δ^Par_loc(φ*Ě, P)`
    pub baseline: Q,
    pub search: SearchResult,
    pub certificates: Certificates,
}

impl MinimizationReport {
    /// Relative to the baseline.
    pub fn minimum(&self) -> &Q {
        &self.search.minimum
    }

    pub fn minimum_absolute(&self) -> Q {
        &self.baseline + &self.search.minimum
    }
}

pub fn minimize_at(model: &Model, u: usize, config: &SearchConfig) -> Result<MinimizationReport> {
    let betas = model.incident_rank2_betas(u)?;
    let search = minimize_betas(&betas, config)?;
    let baseline = pullback_baseline(&model.with_extension(u, None)?.local_record(u)?);
    Ok(MinimizationReport {
        point: model.surface().multiple_points()[u].name.clone(),
        certificates: certificates(&search, &betas),
        betas,
        baseline,
        search,
    })
}

pub fn minimize(model: &Model, point: &str, config: &SearchConfig) -> Result<MinimizationReport> {
    let u = model.point_index(point).ok_or_else(|| {
        Error::invariant("declared-point", format!("no multiple point named {point}"))
    })?;
    minimize_at(model, u, config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalMinimum {
    /// `Δ^Par(Ě)`
    pub global: Q,
    pub reports: Vec<MinimizationReport>,
    /// `Δ^Par(Ě) + Σ_u Δ^Par_loc(E^min, P_u)`
    pub delta_par_min: Q,
    /// Present when the scenario asserts the stability hypothesis:
    /// whether `Δ^Par_min ≥ 0` holds.
    pub stability_check: Option<bool>,
}

pub fn global_minimum(model: &Model, config: &SearchConfig) -> Result<GlobalMinimum> {
    if model.rank() != 2 {
        return Err(Error::rank2(model.rank(), "minimization"));
    }
    let global = delta_par_global(&model.check_bundle()?);
    let reports = (0..model.surface().multiple_points().len())
        .map(|u| minimize_at(model, u, config))
        .collect::<Result<Vec<_>>>()?;
    let delta_par_min = reports
        .iter()
        .fold(global.clone(), |acc, r| acc + r.minimum_absolute());
    let stability_check = model
        .stable_restriction
        .then(|| !delta_par_min.is_negative());
    Ok(GlobalMinimum {
        global,
        reports,
        delta_par_min,
        stability_check,
    })
}
