//! Acceptance suite. Each criterion prints one PASS/FAIL line; all comparisons
//! are exact rational equalities.

use num_traits::{Signed, Zero};
use parchern::chern::{
    bundle_delta_vb, delta_par, delta_par_rank2, delta_par_via_characters, shift_weights,
    tensor_line_bundle, ParabolicBundle,
};
use parchern::elemtrans::{
    ch_exceptional_twist, chain_from_mu_seq, mu_sequences, rank2_bits, rank2_local_degrees,
    reduce_to_pure, update_filtration_degrees, SplittingType,
};
use parchern::localize::{delta_vb_loc, LocalChernData};
use parchern::minimize::{
    g_lower_bound, minimize_betas, ExtensionCandidate, SearchConfig, SearchResult,
};
use parchern::model::{Extension, Model};
use parchern::rational::{frac, int};
use parchern::surface::pair;
use parchern::testgen::{random_class, random_model, GenParams};
use parchern::Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n} [{name}]: {}  {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

/// Mixed-rank scenarios: rank 1 and 3 as pullbacks, rank 2 with random
/// extensions.
fn mixed_scenarios(seed: u64, n: usize) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let params = match i % 3 {
                0 => GenParams::pullback(1),
                1 => GenParams::rank2_with_extensions(),
                _ => GenParams::pullback(3),
            };
            random_model(&mut rng, &params).expect("generator produces valid scenarios")
        })
        .collect()
}

fn bundles(m: &Model) -> [ParabolicBundle; 2] {
    [m.check_bundle().unwrap(), m.extended_bundle().unwrap()]
}

#[test]
fn criterion_1_tensor_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let models = mixed_scenarios(1, 120);
    let mut cases = 0;
    let mut failures = Vec::new();
    for (s, m) in models.iter().enumerate() {
        for b in bundles(m) {
            for _ in 0..3 {
                let l = random_class(&mut rng, b.divisor().chow());
                let t = tensor_line_bundle(&b, &l).unwrap();
                cases += 1;
                if bundle_delta_vb(&t) != bundle_delta_vb(&b) || delta_par(&t) != delta_par(&b) {
                    failures.push(s);
                }
            }
        }
    }
    let ranks: BTreeSet<usize> = models.iter().map(Model::rank).collect();
    let ok = failures.is_empty() && models.len() >= 100 && ranks.len() == 3;
    report(
        1,
        "tensor invariance",
        ok,
        &format!(
            "{} scenarios, ranks {ranks:?}, {cases} twists, failing scenarios {failures:?}",
            models.len()
        ),
    );
    assert!(ok);
}

/// A shift on a 1/24 grid keeping the flag inside [-1, 0].
fn admissible_shift(weights: &[Q], rng: &mut ChaCha8Rng) -> Q {
    let lo = -int(1) - &weights[0];
    let hi = -weights.last().unwrap().clone();
    let n = ((&hi - &lo) * int(24))
        .floor()
        .to_integer()
        .try_into()
        .unwrap_or(0i64);
    lo + frac(rng.gen_range(0..=n), 24)
}

#[test]
fn criterion_2_alpha_tot_cancellation() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let models = mixed_scenarios(2, 120);
    let (mut cases, mut nonzero) = (0, 0);
    let mut failures = Vec::new();
    for (s, m) in models.iter().enumerate() {
        for b in bundles(m) {
            let base = delta_par(&b);
            let mut all = b.clone();
            for i in 0..b.flags().len() {
                let c = admissible_shift(b.flags()[i].weights(), &mut rng);
                nonzero += usize::from(!c.is_zero());
                cases += 1;
                if delta_par(&shift_weights(&b, i, &c).unwrap()) != base {
                    failures.push(s);
                }
                all = shift_weights(&all, i, &c).unwrap();
            }
            cases += 1;
            if delta_par(&all) != base {
                failures.push(s);
            }
        }
    }
    let ok = failures.is_empty() && models.len() >= 100 && nonzero > 0;
    report(
        2,
        "alpha_tot cancellation",
        ok,
        &format!(
            "{} scenarios, {cases} shifts ({nonzero} nonzero), failing {failures:?}",
            models.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_dual_path() {
    let mut models = mixed_scenarios(3, 120);
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..60 {
        models.push(random_model(&mut rng, &GenParams::rank2_with_extensions()).unwrap());
    }
    let (mut general, mut rank2) = (0, 0);
    let mut failures = Vec::new();
    for (s, m) in models.iter().enumerate() {
        for b in bundles(m) {
            let beta_form = delta_par(&b);
            general += 1;
            if delta_par_via_characters(&b) != beta_form {
                failures.push(format!("{s}: character form"));
            }
            if b.rank() == 2 {
                rank2 += 1;
                if delta_par_rank2(&b).unwrap() != beta_form {
                    failures.push(format!("{s}: rank-2 form"));
                }
            }
        }
    }
    let ok = failures.is_empty() && rank2 > 0;
    report(
        3,
        "dual-path equality",
        ok,
        &format!("{general} bundles, {rank2} of rank 2, failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_4_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut points, mut kappas, mut gs) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    let mut failures = Vec::new();
    let n = 200;
    for s in 0..n {
        let m = random_model(&mut rng, &GenParams::rank2_with_extensions()).unwrap();
        points.insert(m.surface().multiple_points().len());
        for (u, mp) in m.surface().multiple_points().iter().enumerate() {
            kappas.insert(mp.kappa());
            gs.insert(m.chain(u).map_or(0, |c| c.g()));
        }
        let d = m.decomposition().unwrap();
        if !d.passes() {
            failures.push((s, d.discrepancy()));
        }
    }
    let covered = points == BTreeSet::from([1, 2, 3])
        && kappas == BTreeSet::from([3, 4])
        && gs == BTreeSet::from([0, 1, 2, 3]);
    let ok = failures.is_empty() && covered;
    report(
        4,
        "decomposition",
        ok,
        &format!(
            "{n} scenarios, points {points:?}, kappa {kappas:?}, g {gs:?}, failures {failures:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_worked_example() {
    let e = SplittingType::from_twists(&[0, 1]).unwrap();
    let chains = reduce_to_pure(&e).unwrap();
    let c = &chains[0];
    let telescoped = c.delta_vb_loc_telescoped().unwrap();
    let by_steps = c.delta_vb_loc_by_steps().clone();
    // E' = φ*Ě(−P) is pure; 0 → E' → E → O_P(0) → 0.
    let (a_q, ch2_q) = ch_exceptional_twist(0);
    let direct = delta_vb_loc(
        &LocalChernData {
            point: "P".into(),
            a: -2 + a_q,
            ch2_loc: int(-1) + ch2_q,
        },
        2,
    )
    .unwrap();
    let quarter = frac(1, 4);
    let ok = chains.len() == 1
        && c.g() == 1
        && c.types()[0] == SplittingType::from_twists(&[1, 1]).unwrap()
        && telescoped == quarter
        && by_steps == quarter
        && direct == quarter;
    report(
        5,
        "O+O(1) worked example",
        ok,
        &format!(
            "g = {}, telescoped {telescoped}, per step {by_steps}, direct {direct}",
            c.g()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_local_bg() {
    let mut chains = 0;
    let mut failures = Vec::new();
    for g in 0..=6 {
        for seq in mu_sequences(g, 6) {
            let c = chain_from_mu_seq(&seq, 0).unwrap();
            let v = delta_vb_loc(&c.local_chern("P"), 2).unwrap();
            let mu = seq.last().copied().unwrap_or(0);
            let bound = frac((g * g) as i64 - 2 * g as i64, 4) + frac(mu, 2);
            chains += 1;
            let nonneg = !v.is_negative() && (v.is_zero() == (g == 0));
            let agree =
                &v == c.delta_vb_loc_by_steps() && v == c.delta_vb_loc_telescoped().unwrap();
            if !(nonneg && agree && v >= bound) {
                failures.push(seq);
            }
        }
    }
    let ok = failures.is_empty();
    report(
        6,
        "local BG",
        ok,
        &format!("{chains} chains with mu <= 6, failures {failures:?}"),
    );
    assert!(ok);
}

fn betas_k3(rng: &mut ChaCha8Rng) -> Vec<Q> {
    (0..3).map(|_| frac(rng.gen_range(0..=12), 48)).collect()
}

#[derive(Default)]
struct MinimizerTally {
    mismatches: Vec<Vec<Q>>,
    panov: usize,
    interior: usize,
    stated_violations: Vec<String>,
}

impl MinimizerTally {
    fn record(&mut self, betas: &[Q], pruned: &SearchResult, full: &SearchResult) {
        if pruned.minimum != full.minimum || pruned.argmin != full.argmin {
            self.mismatches.push(betas.to_vec());
        }
        for a in &pruned.argmin {
            self.panov += usize::from(a.mu() > 3);
            if a.beta0.is_positive() && a.beta0 < frac(1, 4) {
                self.interior += 1;
                let signed: Q = a.tau.iter().zip(betas).map(|(&t, b)| int(t) * b).sum();
                if int(a.f0_deg_delta) != int(2) * &a.beta0 + int(2) * signed {
                    self.stated_violations.push(format!(
                        "betas {:?}: deg = {}, beta0 = {}",
                        betas.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        a.f0_deg_delta,
                        a.beta0
                    ));
                }
            }
        }
    }
}

#[test]
fn criterion_7_minimizer() {
    let cap = SearchConfig {
        cap: Some(8),
        prune: true,
    };
    let full = SearchConfig {
        cap: Some(8),
        prune: false,
    };
    let first_pruned = (0..=12).find(|&g| g_lower_bound(g, 3).is_positive());

    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut samples: Vec<Vec<Q>> = (0..12).map(|_| betas_k3(&mut rng)).collect();
    // small weights put the optimal beta0 strictly inside (0, 1/4)
    samples.push(vec![frac(1, 100); 3]);
    samples.push(vec![frac(1, 60), frac(1, 40), frac(1, 30)]);
    samples.push(vec![frac(1, 48), Q::zero(), frac(1, 24)]);
    let mut tally = MinimizerTally::default();
    for betas in &samples {
        let p = minimize_betas(betas, &cap).unwrap();
        let f = minimize_betas(betas, &full).unwrap();
        tally.record(betas, &p, &f);
    }

    let zero = minimize_betas(&[Q::zero(), Q::zero(), Q::zero()], &cap).unwrap();
    let zero_ok = zero.minimum.is_zero() && zero.argmin == vec![ExtensionCandidate::pullback(3)];

    let ok = tally.mismatches.is_empty()
        && first_pruned == Some(9)
        && g_lower_bound(9, 3) == frac(3, 4)
        && zero_ok
        && tally.panov == 0
        && tally.stated_violations.is_empty();
    report(
        7,
        "minimizer soundness",
        ok,
        &format!(
            "pruned/unpruned mismatches {}, first pruned g {:?}, zero-beta unique pullback {zero_ok}, \
             Panov violations {}, interior argmins {}, stationarity deg = 2 beta0 + 2 sum tau beta fails at {:?}",
            tally.mismatches.len(),
            first_pruned,
            tally.panov,
            tally.interior,
            tally.stated_violations
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_deg_loc_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut failures = Vec::new();
    let mut steps = 0;
    for s in 0..120 {
        let m = random_model(&mut rng, &GenParams::rank2_with_extensions()).unwrap();
        let mut exts = m.extensions().to_vec();
        let mut step_ok = true;
        for (u, mp) in m.surface().multiple_points().iter().enumerate() {
            let Some(ext) = &exts[u] else { continue };
            let kappa = mp.kappa();
            let g = ext.mu_chain.len();
            let hits: Vec<Vec<bool>> = (0..g)
                .map(|_| (0..kappa).map(|_| rng.gen_bool(0.5)).collect())
                .collect();
            let bits = rank2_bits(&hits);
            let mut prev: Option<Vec<i64>> = None;
            for j in 0..=g {
                let prefix = chain_from_mu_seq(&ext.mu_chain[..j], 0).unwrap();
                let degs = update_filtration_degrees(&prefix, kappa, &bits[..j].to_vec()).unwrap();
                let d: Vec<i64> = (0..kappa).map(|i| degs.deg_delta(i)).collect();
                step_ok &= d.iter().all(|x| x.abs() <= j as i64);
                step_ok &= d.iter().zip(&degs.per_incident).all(|(&x, pair)| {
                    rank2_local_degrees(j as i64, x)
                        .map(|v| v.to_vec() == *pair)
                        .unwrap_or(false)
                });
                if let Some(p) = &prev {
                    steps += kappa;
                    step_ok &= p.iter().zip(&d).all(|(a, b)| (a - b).abs() == 1);
                }
                prev = Some(d);
            }
            exts[u] = Some(Extension {
                deg_delta_loc: prev.unwrap(),
                ..ext.clone()
            });
        }
        let m2 = Model::new(
            m.surface().clone(),
            2,
            m.ch1().clone(),
            m.ch2().clone(),
            m.flags().to_vec(),
            m.crossings().to_vec(),
            exts,
            None,
            false,
        )
        .unwrap();
        // degree of E on each strict transform, from ch₁(E)·D_i on the blow-up
        let e = m2.extended_bundle().unwrap();
        let chow = e.divisor().chow();
        let degrees_ok = (0..m2.surface().components().len()).all(|i| {
            let want = pair(e.ch1(), &e.divisor().components()[i].class, chow).unwrap();
            let base: i64 = m2.flags()[i].total_degree();
            let local: i64 = m2
                .surface()
                .multiple_points()
                .iter()
                .enumerate()
                .filter_map(|(u, mp)| {
                    mp.position_of(i)
                        .map(|p| m2.local_degrees(u)[p].iter().sum::<i64>())
                })
                .sum();
            int(e.flags()[i].total_degree()) == want && e.flags()[i].total_degree() == base + local
        });
        let per_step_ok = (0..m2.surface().components().len()).all(|i| {
            let base = m2.flags()[i].gr_degrees().to_vec();
            let mut expect = base.clone();
            for (u, mp) in m2.surface().multiple_points().iter().enumerate() {
                if let Some(p) = mp.position_of(i) {
                    for (k, v) in m2.local_degrees(u)[p].iter().enumerate() {
                        expect[k] += v;
                    }
                }
            }
            e.flags()[i].gr_degrees() == expect.as_slice()
        });
        if !(step_ok && degrees_ok && per_step_ok) {
            failures.push(s);
        }
    }
    let ok = failures.is_empty() && steps > 0;
    report(
        8,
        "deg_loc bookkeeping",
        ok,
        &format!("120 scenarios, {steps} per-component steps, failing {failures:?}"),
    );
    assert!(ok);
}
