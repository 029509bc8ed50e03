//! Seeded random scenarios: curve configurations in the plane with multiple
//! points, parabolic bundles on them and rank-2 extensions.

use crate::elemtrans::mu_sequences;
use crate::error::Result;
use crate::localize::ExceptionalFlag;
use crate::model::{Extension, Model};
use crate::parastruct::{CrossingPermutation, FlagData, Permutation};
use crate::rational::{self, Q};
use crate::surface::{
    ChowModel, Component, DivisorClass, IntersectionPoint, MultiplePoint, SurfaceScenario,
};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub rank: usize,
    pub points: std::ops::RangeInclusive<usize>,
    pub kappas: Vec<usize>,
    pub max_g: usize,
    pub extensions: bool,
}

impl GenParams {
    /// Rank-2 scenarios with 1–3 multiple points of order 3 or 4 and chains
    /// of length at most 3.
    pub fn rank2_with_extensions() -> Self {
        GenParams {
            rank: 2,
            points: 1..=3,
            kappas: vec![3, 4],
            max_g: 3,
            extensions: true,
        }
    }

    pub fn pullback(rank: usize) -> Self {
        GenParams {
            rank,
            points: 0..=2,
            kappas: vec![3, 4],
            max_g: 0,
            extensions: false,
        }
    }
}

/// Plane curves of degree 1–3 meeting at `points` multiple points; every
/// other intersection is an ordinary crossing. Two curves share at most
/// `deg·deg` points.
pub fn random_surface<R: Rng>(
    rng: &mut R,
    points: usize,
    kappas: &[usize],
) -> Result<SurfaceScenario> {
    loop {
        let n = rng.gen_range(4..=7);
        let degrees: Vec<i64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    1
                } else {
                    rng.gen_range(2..=3)
                }
            })
            .collect();
        let mut shared = vec![vec![0i64; n]; n];
        let mut mps = Vec::new();
        for u in 0..points {
            let kappa = *kappas.choose(rng).expect("nonempty kappa list");
            if kappa > n {
                break;
            }
            let mut placed = None;
            for _ in 0..50 {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(rng);
                idx.truncate(kappa);
                let ok = idx.iter().enumerate().all(|(x, &a)| {
                    idx[x + 1..]
                        .iter()
                        .all(|&b| shared[a][b] < degrees[a] * degrees[b])
                });
                if ok {
                    placed = Some(idx);
                    break;
                }
            }
            let Some(idx) = placed else { break };
            for (x, &a) in idx.iter().enumerate() {
                for &b in &idx[x + 1..] {
                    shared[a][b] += 1;
                    shared[b][a] += 1;
                }
            }
            mps.push(MultiplePoint {
                name: format!("P{}", u + 1),
                incident: idx,
            });
        }
        if mps.len() != points {
            continue;
        }
        let chow = ChowModel::new(vec!["H".into()], vec![vec![1]])?;
        let components = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| Component {
                name: format!("C{}", i + 1),
                class: DivisorClass::from_integers(&[d]),
            })
            .collect();
        let mut crossings = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for _ in 0..degrees[a] * degrees[b] - shared[a][b] {
                    crossings.push(IntersectionPoint {
                        name: format!("y{}", crossings.len() + 1),
                        components: (a, b),
                    });
                }
            }
        }
        return SurfaceScenario::new(chow, components, crossings, mps);
    }
}

fn random_permutation<R: Rng>(rng: &mut R, r: usize) -> Permutation {
    let mut v: Vec<usize> = (0..r).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffled identity")
}

fn random_weights<R: Rng>(rng: &mut R, r: usize) -> Vec<Q> {
    let mut w: Vec<Q> = (0..r)
        .map(|_| rational::frac(-rng.gen_range(0..=24), 24))
        .collect();
    w.sort();
    w
}

/// Integers summing to `total`, with small spread.
fn random_split<R: Rng>(rng: &mut R, r: usize, total: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (0..r - 1).map(|_| rng.gen_range(-3..=3)).collect();
    let rest = total - v.iter().sum::<i64>();
    v.push(rest);
    v.shuffle(rng);
    v
}

fn random_extension<R: Rng>(rng: &mut R, kappa: usize, max_g: usize) -> Extension {
    let g = rng.gen_range(0..=max_g);
    let seqs = mu_sequences(g, g as i64 + 3);
    let mu_chain = seqs.choose(rng).cloned().unwrap_or_default();
    let mu = mu_chain.last().copied().unwrap_or(0);
    let gi = g as i64;
    let deg_delta_loc = (0..kappa)
        .map(|_| -gi + 2 * rng.gen_range(0..=gi))
        .collect();
    Extension {
        mu_chain,
        deg_delta_loc,
        flag: ExceptionalFlag {
            beta0: rational::frac(rng.gen_range(0..12), 24),
            f0_deg_delta: -mu + 2 * rng.gen_range(0..=mu + 1),
            tau: (0..kappa)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect(),
        },
    }
}

/// A parabolic bundle on a random configuration, with random extensions at
/// the multiple points when `params.extensions` is set.
pub fn random_model<R: Rng>(rng: &mut R, params: &GenParams) -> Result<Model> {
    let points = rng.gen_range(params.points.clone());
    let surface = random_surface(rng, points, &params.kappas)?;
    let r = params.rank;
    let c = rng.gen_range(-3..=3);
    let ch1 = DivisorClass::from_integers(&[c]);
    let ch2 = rational::frac(rng.gen_range(-30..=30), rng.gen_range(1..=6));
    let flags = surface
        .components()
        .iter()
        .map(|comp| {
            let total = c * rational::to_i64(comp.class.coeff(0)).expect("integral degree");
            FlagData::new(random_weights(rng, r), random_split(rng, r, total))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut crossings: Vec<CrossingPermutation> = surface
        .crossings()
        .iter()
        .map(|p| CrossingPermutation {
            point: p.name.clone(),
            pair: p.components,
            sigma: random_permutation(rng, r),
        })
        .collect();
    for mp in surface.multiple_points() {
        for (x, &a) in mp.incident.iter().enumerate() {
            for &b in &mp.incident[x + 1..] {
                crossings.push(CrossingPermutation {
                    point: mp.name.clone(),
                    pair: (a, b),
                    sigma: random_permutation(rng, r),
                });
            }
        }
    }
    let extensions = surface
        .multiple_points()
        .iter()
        .map(|mp| {
            (params.extensions && r == 2).then(|| random_extension(rng, mp.kappa(), params.max_g))
        })
        .collect();
    Model::new(
        surface, r, ch1, ch2, flags, crossings, extensions, None, false,
    )
}

/// A random integral class on the basis of the given model.
pub fn random_class<R: Rng>(rng: &mut R, chow: &ChowModel) -> DivisorClass {
    let coeffs: Vec<i64> = (0..chow.dim()).map(|_| rng.gen_range(-3..=3)).collect();
    DivisorClass::from_integers(&coeffs)
}
