//! Local contributions at exceptional divisors and the local/global
//! decomposition of `Δ^Par`.

use crate::chern::{delta_par, ParabolicBundle};
use crate::error::{Error, Result};
use crate::parastruct::Permutation;
use crate::rational::{self, Q};
use crate::surface::{BlownUp, DivisorClass};
use num_traits::{Signed, Zero};

/// Local Chern character at one exceptional divisor: `ch₁_loc = a·[P]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChernData {
    pub point: String,
    pub a: i64,
    pub ch2_loc: Q,
}

impl LocalChernData {
    pub fn zero(point: &str) -> Self {
        LocalChernData {
            point: point.to_string(),
            a: 0,
            ch2_loc: Q::zero(),
        }
    }

    /// `(ch₁_loc)²`, using `[P]² = -1`.
    pub fn ch1_sq(&self) -> Q {
        rational::int(-self.a * self.a)
    }
}

/// `(1/2r)(ch₁_loc)² − ch₂_loc`
pub fn delta_vb_loc(d: &LocalChernData, r: i64) -> Result<Q> {
    if r <= 0 {
        return Err(Error::invariant(
            "positive-rank",
            format!("rank {r} is not positive"),
        ));
    }
    Ok(d.ch1_sq() / rational::int(2 * r) - &d.ch2_loc)
}

/// Splits `ch(E) − ch(φ*Ě)` into per-point local data.
///
/// `ch1` is a class on the blow-up, `check_ch1` a class on the base surface.
/// The `ch₂` difference cannot be split among several points from the
/// characters alone; pass per-point records (from elementary-transformation
/// chains) in that case. Records must reproduce the `ch₁` coefficients and
/// the total `ch₂` difference.
pub fn ch_decompose(
    ch1: &DivisorClass,
    ch2: &Q,
    check_ch1: &DivisorClass,
    check_ch2: &Q,
    x: &BlownUp,
    point_names: &[String],
    records: Option<&[LocalChernData]>,
) -> Result<Vec<LocalChernData>> {
    let diff = ch1 - &x.pullback(check_ch1);
    if !x.base_part(&diff).is_zero() {
        return Err(Error::invariant(
            "exceptional-support",
            "ch1(E) - pullback ch1 is not supported on exceptional classes",
        ));
    }
    let mut coeffs = Vec::with_capacity(x.exceptional_count());
    for u in 0..x.exceptional_count() {
        let c = x.exceptional_coefficient(&diff, u);
        coeffs.push(rational::to_i64(c).ok_or_else(|| {
            Error::invariant("integral-ch1", "local ch1 coefficient is not an integer")
        })?);
    }
    let ch2_diff = ch2 - check_ch2;
    match records {
        Some(recs) => {
            if recs.len() != coeffs.len() {
                return Err(Error::invariant(
                    "local-record-per-point",
                    format!(
                        "{} records for {} exceptional divisors",
                        recs.len(),
                        coeffs.len()
                    ),
                ));
            }
            for (rec, a) in recs.iter().zip(&coeffs) {
                if rec.a != *a {
                    return Err(Error::invariant(
                        "local-ch1",
                        format!(
                            "record at {} has a = {} but ch1 gives {}",
                            rec.point, rec.a, a
                        ),
                    ));
                }
            }
            let total = rational::sum(recs.iter().map(|r| &r.ch2_loc));
            if total != ch2_diff {
                return Err(Error::invariant(
                    "local-ch2",
                    format!(
                        "records sum to ch2 {} but the difference is {}",
                        rational::render(&total),
                        rational::render(&ch2_diff)
                    ),
                ));
            }
            Ok(recs.to_vec())
        }
        None => match coeffs.len() {
            0 if ch2_diff.is_zero() => Ok(vec![]),
            0 => Err(Error::invariant(
                "local-ch2",
                "ch2 differs from the pullback but there is no exceptional divisor",
            )),
            1 => Ok(vec![LocalChernData {
                point: point_names[0].clone(),
                a: coeffs[0],
                ch2_loc: ch2_diff,
            }]),
            _ => Err(Error::invariant(
                "ambiguous-ch2-split",
                "several exceptional divisors need per-point records to split ch2",
            )),
        },
    }
}

/// Local graded degrees `deg_loc(Gr(D_i, k; E), P)` for each incident
/// component, in incidence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDegrees {
    pub per_incident: Vec<Vec<i64>>,
}

impl LocalDegrees {
    pub fn zero(kappa: usize, r: usize) -> Self {
        LocalDegrees {
            per_incident: vec![vec![0; r]; kappa],
        }
    }

    /// Rank 2: `deg_loc` of the quotient minus that of the sub line.
    pub fn deg_delta(&self, i: usize) -> i64 {
        self.per_incident[i][1] - self.per_incident[i][0]
    }
}

/// The rank-2 flag on an exceptional divisor together with its comparison
/// to the flags of the incident components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalFlag {
    pub beta0: Q,
    pub f0_deg_delta: i64,
    pub tau: Vec<i64>,
}

impl ExceptionalFlag {
    /// Checks the constraints tying the flag to the splitting type `μ`.
    pub fn validate(&self, mu: i64) -> Result<()> {
        if self.beta0.is_negative() || self.beta0 >= rational::half() {
            return Err(Error::invariant(
                "rank2-beta-range",
                format!(
                    "beta0 {} is outside [0, 1/2)",
                    rational::render(&self.beta0)
                ),
            ));
        }
        if self.f0_deg_delta < -mu || (self.f0_deg_delta - mu).rem_euclid(2) != 0 {
            return Err(Error::invariant(
                "exceptional-flag-degree",
                format!(
                    "deg of F0 difference {} must be >= -{mu} and congruent to {mu} mod 2",
                    self.f0_deg_delta
                ),
            ));
        }
        if let Some(t) = self.tau.iter().find(|t| t.abs() != 1) {
            return Err(Error::invariant(
                "tau-sign",
                format!("tau must be +1 or -1, got {t}"),
            ));
        }
        Ok(())
    }
}

/// Data of one incident component at an exceptional divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidentData {
    pub betas: Vec<Q>,
    pub deg_loc: Vec<i64>,
    /// Oriented from the component to the exceptional divisor.
    pub sigma_to_exceptional: Permutation,
}

/// Everything the local parabolic invariant at one exceptional divisor
/// depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRecord {
    pub point: String,
    pub delta_vb_loc: Q,
    pub exceptional_betas: Vec<Q>,
    pub exceptional_gr: Vec<i64>,
    pub incident: Vec<IncidentData>,
    /// Unordered pairs of incident positions with the permutation of the base
    /// flags at the blown-up point, oriented from the first to the second.
    pub pairwise: Vec<(usize, usize, Permutation)>,
}

fn dot_sigma(x: &[Q], y: &[Q], sigma: &Permutation) -> Q {
    (0..x.len()).fold(Q::zero(), |acc, k| acc + &x[k] * &y[sigma.apply(k)])
}

/// `Δ^Par_loc(φ*Ě, P)`: the part of the local term that survives for the
/// pullback with zero weight on `P`.
pub fn pullback_baseline(rec: &LocalRecord) -> Q {
    let mut v = Q::zero();
    for inc in &rec.incident {
        for b in &inc.betas {
            v += b * b / rational::int(2);
        }
    }
    v + compensation(rec)
}

// both orders of each pair, halved
fn compensation(rec: &LocalRecord) -> Q {
    let mut v = Q::zero();
    for (i, j, sigma) in &rec.pairwise {
        let bi = &rec.incident[*i].betas;
        let bj = &rec.incident[*j].betas;
        v += (dot_sigma(bi, bj, sigma) + dot_sigma(bj, bi, &sigma.inverse())) / rational::int(2);
    }
    v
}

pub fn delta_par_loc(rec: &LocalRecord) -> Q {
    let mut v = rec.delta_vb_loc.clone();
    for (b, &d) in rec.exceptional_betas.iter().zip(&rec.exceptional_gr) {
        v += b * rational::int(d);
        v += b * b / rational::int(2);
    }
    for inc in &rec.incident {
        for (b, &d) in inc.betas.iter().zip(&inc.deg_loc) {
            v += b * rational::int(d);
            v += b * b / rational::int(2);
        }
        v -= dot_sigma(
            &inc.betas,
            &rec.exceptional_betas,
            &inc.sigma_to_exceptional,
        );
    }
    v + compensation(rec)
}

/// Rank-2 difference `Δ^Par_loc(E, P) − Δ^Par_loc(φ*Ě, P)`.
pub fn delta_par_loc_diff_rank2(
    delta_vb_loc: &Q,
    flag: &ExceptionalFlag,
    deg_delta_loc: &[i64],
    betas: &[Q],
) -> Result<Q> {
    if deg_delta_loc.len() != betas.len() || flag.tau.len() != betas.len() {
        return Err(Error::invariant(
            "incident-count",
            "local degrees, tau signs and incident betas must have the same length",
        ));
    }
    let b0 = &flag.beta0;
    let mut v = delta_vb_loc + b0 * rational::int(flag.f0_deg_delta) + b0 * b0;
    for ((b, &d), &t) in betas.iter().zip(deg_delta_loc).zip(&flag.tau) {
        v += b * rational::int(d);
        v -= rational::int(2 * t) * b * b0;
    }
    Ok(v)
}

/// `Δ^Par(Ě)` evaluated on a bundle over the base divisor in which every
/// multiple point has been listed once per incident pair.
pub fn delta_par_global(check_bundle: &ParabolicBundle) -> Q {
    delta_par(check_bundle)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTerm {
    pub point: String,
    pub value: Q,
    pub baseline: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub lhs: Q,
    pub global: Q,
    pub locals: Vec<LocalTerm>,
    pub rhs: Q,
    /// `Δ^Par(φ*Ě) + Σ (Δ^Par_loc(E) − Δ^Par_loc(φ*Ě))`
    pub alternate_rhs: Q,
}

impl DecompositionReport {
    pub fn discrepancy(&self) -> Q {
        &self.lhs - &self.rhs
    }

    pub fn alternate_discrepancy(&self) -> Q {
        &self.lhs - &self.alternate_rhs
    }

    pub fn passes(&self) -> bool {
        self.discrepancy().is_zero() && self.alternate_discrepancy().is_zero()
    }
}

/// Compares `Δ^Par(E)` with the global term plus local terms, and with the
/// pullback plus local differences.
pub fn decomposition_check(
    bundle: &ParabolicBundle,
    pullback: &ParabolicBundle,
    check_bundle: &ParabolicBundle,
    records: &[LocalRecord],
) -> DecompositionReport {
    let lhs = delta_par(bundle);
    let global = delta_par_global(check_bundle);
    let locals: Vec<LocalTerm> = records
        .iter()
        .map(|r| LocalTerm {
            point: r.point.clone(),
            value: delta_par_loc(r),
            baseline: pullback_baseline(r),
        })
        .collect();
    let rhs = locals.iter().fold(global.clone(), |acc, t| acc + &t.value);
    let alternate_rhs = locals
        .iter()
        .fold(delta_par(pullback), |acc, t| acc + &t.value - &t.baseline);
    DecompositionReport {
        lhs,
        global,
        locals,
        rhs,
        alternate_rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn delta_vb_loc_examples() {
        assert_eq!(delta_vb_loc(&LocalChernData::zero("P"), 2).unwrap(), int(0));
        let d = LocalChernData {
            point: "P".into(),
            a: -1,
            ch2_loc: frac(-3, 4),
        };
        assert_eq!(delta_vb_loc(&d, 2).unwrap(), frac(1, 2));
        assert!(delta_vb_loc(&d, 0).is_err());
    }

    #[test]
    fn diff_rank2_examples() {
        let pullback = ExceptionalFlag {
            beta0: int(0),
            f0_deg_delta: 0,
            tau: vec![1],
        };
        assert_eq!(
            delta_par_loc_diff_rank2(&int(0), &pullback, &[0], &[int(0)]).unwrap(),
            int(0)
        );
        // Δ^Vb_loc = 1/4, β₀ = 1/4, deg^δ = −1, β = 1/4, d = −1, τ = +1
        let f = ExceptionalFlag {
            beta0: frac(1, 4),
            f0_deg_delta: -1,
            tau: vec![1],
        };
        let v = delta_par_loc_diff_rank2(&frac(1, 4), &f, &[-1], &[frac(1, 4)]).unwrap();
        let (vb, b0, f0, b, d) = (frac(1, 4), frac(1, 4), int(-1), frac(1, 4), int(-1));
        let by_terms = &vb + &b0 * &f0 + &b * &d + &b0 * &b0 - int(2) * &b * &b0;
        assert_eq!(v, by_terms);
        assert_eq!(v, frac(-5, 16));
    }

    fn rank2_record(
        vb: Q,
        flag: &ExceptionalFlag,
        deg_p: i64,
        d: &[i64],
        g: i64,
        betas: &[Q],
        pair_taus: &[(usize, usize, bool)],
    ) -> LocalRecord {
        // exceptional flag: β(P) = (−β₀, β₀), deg F⁰ from deg E|_P and deg^δ
        let f0 = (deg_p - flag.f0_deg_delta) / 2;
        LocalRecord {
            point: "P".into(),
            delta_vb_loc: vb,
            exceptional_betas: vec![-flag.beta0.clone(), flag.beta0.clone()],
            exceptional_gr: vec![f0, deg_p - f0],
            incident: betas
                .iter()
                .zip(d)
                .zip(&flag.tau)
                .map(|((b, &d), &t)| IncidentData {
                    betas: vec![-b.clone(), b.clone()],
                    deg_loc: vec![(g - d) / 2, (g + d) / 2],
                    sigma_to_exceptional: if t == 1 {
                        Permutation::identity(2)
                    } else {
                        Permutation::swap()
                    },
                })
                .collect(),
            pairwise: pair_taus
                .iter()
                .map(|&(i, j, swap)| {
                    let s = if swap {
                        Permutation::swap()
                    } else {
                        Permutation::identity(2)
                    };
                    (i, j, s)
                })
                .collect(),
        }
    }

    #[test]
    fn only_vb_survives_without_weights_on_p() {
        let f = ExceptionalFlag {
            beta0: int(0),
            f0_deg_delta: 0,
            tau: vec![1, -1, 1],
        };
        let betas = [frac(1, 5), frac(1, 7), frac(1, 3)];
        let rec = rank2_record(frac(1, 4), &f, 0, &[0, 0, 0], 0, &betas, &[(0, 1, false)]);
        assert_eq!(delta_par_loc(&rec) - pullback_baseline(&rec), frac(1, 4));
    }

    #[test]
    fn pullback_baseline_formula() {
        let betas = [frac(1, 4), frac(1, 4), frac(1, 4)];
        let f = ExceptionalFlag {
            beta0: int(0),
            f0_deg_delta: 0,
            tau: vec![1, 1, 1],
        };
        let pairs = [(0, 1, false), (0, 2, false), (1, 2, false)];
        let rec = rank2_record(int(0), &f, 0, &[0, 0, 0], 0, &betas, &pairs);
        // ½·3·2β² + 3·2β²
        assert_eq!(pullback_baseline(&rec), frac(3, 16) + frac(3, 8));
        assert_eq!(delta_par_loc(&rec), pullback_baseline(&rec));
        let zero = rank2_record(
            int(0),
            &f,
            0,
            &[0, 0, 0],
            0,
            &[int(0), int(0), int(0)],
            &pairs,
        );
        assert_eq!(delta_par_loc(&zero), int(0));
    }

    #[test]
    fn ch_decompose_splits_single_point() {
        use crate::surface::{blow_up, ChowModel, Component, MultiplePoint, SurfaceScenario};
        let chow = ChowModel::new(vec!["H".into()], vec![vec![1]]).unwrap();
        let line = |n: &str| Component {
            name: n.into(),
            class: DivisorClass::from_integers(&[1]),
        };
        let s = SurfaceScenario::new(
            chow,
            vec![line("L1"), line("L2"), line("L3")],
            vec![],
            vec![MultiplePoint {
                name: "P".into(),
                incident: vec![0, 1, 2],
            }],
        )
        .unwrap();
        let x = blow_up(&s).unwrap();
        let names = vec!["P".to_string()];
        let c = DivisorClass::from_integers(&[1]);
        // E = φ*Ě(−P), rank 2: ch1 = c − 2P, ch2 = ch2 + c·(−P) + 2·(−P)²/2
        let ch1 = DivisorClass::from_integers(&[1, -2]);
        let ch2 = frac(1, 3) - int(1);
        let parts = ch_decompose(&ch1, &ch2, &c, &frac(1, 3), &x, &names, None).unwrap();
        assert_eq!(parts[0].a, -2);
        assert_eq!(parts[0].ch2_loc, int(-1));
        assert_eq!(delta_vb_loc(&parts[0], 2).unwrap(), int(0));
        let same = ch_decompose(
            &x.pullback(&c),
            &frac(1, 3),
            &c,
            &frac(1, 3),
            &x,
            &names,
            None,
        )
        .unwrap();
        assert_eq!(same, vec![LocalChernData::zero("P")]);
        let bad = DivisorClass::from_integers(&[2, 0]);
        assert!(ch_decompose(&bad, &ch2, &c, &frac(1, 3), &x, &names, None).is_err());
    }

    proptest! {
        #[test]
        fn twist_keeps_delta_vb_loc(a in -6i64..6, n in -40i64..40, b in -4i64..4, r in 1i64..4) {
            let d = LocalChernData { point: "P".into(), a, ch2_loc: frac(n, 4) };
            // ⊗ O(bP): a ↦ a + rb, ch2 ↦ ch2 + (aP)(bP) + r(bP)²/2
            let t = LocalChernData {
                point: "P".into(),
                a: a + r * b,
                ch2_loc: frac(n, 4) - int(a * b) - frac(r * b * b, 2),
            };
            prop_assert_eq!(delta_vb_loc(&d, r).unwrap(), delta_vb_loc(&t, r).unwrap());
        }

        #[test]
        fn cross_terms_vanish(c in -5i64..5, a in proptest::collection::vec(-4i64..4, 2)) {
            use crate::surface::{pair, ChowModel};
            let chow = ChowModel::with_exceptional(
                vec!["H".into(), "P".into(), "Q".into()],
                vec![vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]],
                vec![false, true, true],
            ).unwrap();
            let v = DivisorClass::from_integers(&[c, a[0], a[1]]);
            let sq = pair(&v, &v, &chow).unwrap();
            prop_assert_eq!(sq, int(c * c - a[0] * a[0] - a[1] * a[1]));
        }

        #[test]
        fn diff_formula_matches_two_local_evaluations(
            vb in 0i64..8, b0 in 0i64..=12, f0 in -3i64..4, g in 0i64..4,
            bs in proptest::collection::vec(0i64..24, 3),
            ds in proptest::collection::vec(0i64..4, 3),
            taus in proptest::collection::vec(any::<bool>(), 3),
            swaps in proptest::collection::vec(any::<bool>(), 3),
        ) {
            let betas: Vec<Q> = bs.iter().map(|&b| frac(b, 48)).collect();
            let d: Vec<i64> = ds.iter().map(|&k| -g + 2 * (k % (g + 1))).collect();
            let flag = ExceptionalFlag {
                beta0: frac(b0, 48),
                f0_deg_delta: -g + 2 * f0.rem_euclid(g + 1),
                tau: taus.iter().map(|&t| if t { 1 } else { -1 }).collect(),
            };
            let pairs = [(0, 1, swaps[0]), (0, 2, swaps[1]), (1, 2, swaps[2])];
            let rec = rank2_record(frac(vb, 4), &flag, -g, &d, g, &betas, &pairs);
            let diff = delta_par_loc_diff_rank2(&frac(vb, 4), &flag, &d, &betas).unwrap();
            prop_assert_eq!(delta_par_loc(&rec) - pullback_baseline(&rec), diff);
        }
    }
}
