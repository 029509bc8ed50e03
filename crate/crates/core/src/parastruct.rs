//! Numerical shadows of full-flag parabolic structures.

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use num_traits::{One, Signed};

/// Weights and graded degrees of a complete flag on one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagData {
    weights: Vec<Q>,
    gr_degrees: Vec<i64>,
}

impl FlagData {
    pub fn new(weights: Vec<Q>, gr_degrees: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invariant(
                "flag-rank",
                "a flag needs at least one step",
            ));
        }
        if weights.len() != gr_degrees.len() {
            return Err(Error::invariant(
                "flag-rank",
                format!(
                    "{} weights but {} graded degrees",
                    weights.len(),
                    gr_degrees.len()
                ),
            ));
        }
        let lo = -Q::one();
        for w in &weights {
            if w < &lo || w.is_positive() {
                return Err(Error::invariant(
                    "weight-range",
                    format!("weight {} is outside [-1, 0]", rational::render(w)),
                ));
            }
        }
        if weights.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invariant(
                "weights-nondecreasing",
                "weights must be listed in nondecreasing order",
            ));
        }
        Ok(FlagData {
            weights,
            gr_degrees,
        })
    }

    /// All weights equal to `w`, graded degrees given.
    pub fn uniform(rank: usize, w: Q, gr_degrees: Vec<i64>) -> Result<Self> {
        Self::new(vec![w; rank], gr_degrees)
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn gr_degrees(&self) -> &[i64] {
        &self.gr_degrees
    }

    pub fn total_degree(&self) -> i64 {
        self.gr_degrees.iter().sum()
    }

    /// Same flag with every weight moved by `c`. Fails if a weight leaves [-1, 0].
    pub fn shifted_uniformly(&self, c: &Q) -> Result<Self> {
        Self::new(
            self.weights.iter().map(|w| w + c).collect(),
            self.gr_degrees.clone(),
        )
    }

    pub fn with_gr_degrees(&self, gr_degrees: Vec<i64>) -> Result<Self> {
        Self::new(self.weights.clone(), gr_degrees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedWeights {
    pub alpha_tot: Q,
    pub betas: Vec<Q>,
}

impl NormalizedWeights {
    /// Recovers `α(k) = β(k) + α^tot / r`.
    pub fn weights(&self) -> Vec<Q> {
        let mean = &self.alpha_tot / rational::int(self.betas.len() as i64);
        self.betas.iter().map(|b| b + &mean).collect()
    }
}

pub fn normalize(flag: &FlagData) -> NormalizedWeights {
    let alpha_tot = rational::sum(flag.weights());
    let mean = &alpha_tot / rational::int(flag.rank() as i64);
    NormalizedWeights {
        betas: flag.weights().iter().map(|w| w - &mean).collect(),
        alpha_tot,
    }
}

/// A permutation of `{0, …, r-1}`, stored as the image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let r = images.len();
        let mut seen = vec![false; r];
        for &k in &images {
            if k >= r || seen[k] {
                return Err(Error::invariant(
                    "permutation-bijective",
                    format!("{images:?} is not a permutation of 0..{r}"),
                ));
            }
            seen[k] = true;
        }
        Ok(Permutation(images))
    }

    /// From the 1-based image list used in scenario files.
    pub fn from_one_based(images: &[i64]) -> Result<Self> {
        let zero_based = images
            .iter()
            .map(|&k| {
                usize::try_from(k - 1).map_err(|_| {
                    Error::invariant(
                        "permutation-bijective",
                        format!("{images:?} is not a permutation of 1..{}", images.len()),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero_based)
    }

    pub fn identity(r: usize) -> Self {
        Permutation((0..r).collect())
    }

    /// The rank-2 transposition.
    pub fn swap() -> Self {
        Permutation(vec![1, 0])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<i64> {
        self.0.iter().map(|&k| k as i64 + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &s) in self.0.iter().enumerate() {
            inv[s] = k;
        }
        Permutation(inv)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Permutation(other.0.iter().map(|&k| self.0[k]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &s)| k == s)
    }
}

/// The permutation comparing the flags of components `i` and `j` at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingPermutation {
    pub point: String,
    pub pair: (usize, usize),
    pub sigma: Permutation,
}

impl CrossingPermutation {
    /// The same data seen from `(j, i)`.
    pub fn reversed(&self) -> Self {
        CrossingPermutation {
            point: self.point.clone(),
            pair: (self.pair.1, self.pair.0),
            sigma: self.sigma.inverse(),
        }
    }

    /// The permutation oriented from `i` to `j`, if this record is about
    /// that pair.
    pub fn oriented(&self, i: usize, j: usize) -> Option<Permutation> {
        if self.pair == (i, j) {
            Some(self.sigma.clone())
        } else if self.pair == (j, i) {
            Some(self.sigma.inverse())
        } else {
            None
        }
    }
}

/// `+1` when the two rank-2 flags agree at the point, `-1` otherwise.
pub fn tau_sign(perm: &CrossingPermutation) -> Result<i64> {
    sign_of(&perm.sigma)
}

pub fn sign_of(sigma: &Permutation) -> Result<i64> {
    if sigma.rank() != 2 {
        return Err(Error::rank2(sigma.rank(), "tau sign"));
    }
    Ok(if sigma.is_identity() { 1 } else { -1 })
}

pub fn permutation_for_sign(tau: i64) -> Result<Permutation> {
    match tau {
        1 => Ok(Permutation::identity(2)),
        -1 => Ok(Permutation::swap()),
        t => Err(Error::invariant(
            "tau-sign",
            format!("tau must be +1 or -1, got {t}"),
        )),
    }
}

/// Rank-2 flag on one component: `β(D,1) = -β`, `β(D,2) = β`, sub line
/// `F` of degree `f_degree` inside `E|_D` of degree `total_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank2Flag {
    pub beta: Q,
    pub f_degree: i64,
    pub total_degree: i64,
    /// Average of the two weights; the flag's `α^tot / 2`.
    pub mean_weight: Q,
    pub self_intersection: i64,
}

impl Rank2Flag {
    pub fn new(
        beta: Q,
        f_degree: i64,
        total_degree: i64,
        mean_weight: Q,
        self_intersection: i64,
    ) -> Result<Self> {
        check_half_open(&beta)?;
        Ok(Rank2Flag {
            beta,
            f_degree,
            total_degree,
            mean_weight,
            self_intersection,
        })
    }

    pub fn from_flag(flag: &FlagData, self_intersection: i64) -> Result<Self> {
        if flag.rank() != 2 {
            return Err(Error::rank2(flag.rank(), "rank-2 flag"));
        }
        let w = flag.weights();
        let beta = (&w[1] - &w[0]) / rational::int(2);
        let mean = (&w[0] + &w[1]) / rational::int(2);
        Self::new(
            beta,
            flag.gr_degrees()[0],
            flag.total_degree(),
            mean,
            self_intersection,
        )
    }

    /// `deg(E|_D / F) - deg F`
    pub fn deg_delta(&self) -> i64 {
        self.total_degree - 2 * self.f_degree
    }

    pub fn weights(&self) -> [Q; 2] {
        [
            &self.mean_weight - &self.beta,
            &self.mean_weight + &self.beta,
        ]
    }

    /// Change of `Δ^Vb` caused by the elementary transformation that
    /// [`shift_rank2`] records on the underlying bundle.
    pub fn shift_delta_vb_change(&self) -> Q {
        rational::frac(self.deg_delta(), 2) - rational::frac(self.self_intersection, 4)
    }
}

fn check_half_open(beta: &Q) -> Result<()> {
    if beta.is_negative() || beta >= &rational::half() {
        return Err(Error::invariant(
            "rank2-beta-range",
            format!("beta {} is outside [0, 1/2)", rational::render(beta)),
        ));
    }
    Ok(())
}

/// Shifts the weights on one component by `θ` and passes to the elementary
/// transformation of the underlying bundle along that component.
///
/// The new bundle is the kernel of `E → (E|_D)/F`, so its restriction has
/// total degree `deg E|_D - D²`, its new sub line is the old quotient twisted
/// by `-D`, and the new quotient is the old `F`.
pub fn shift_rank2(flag: &Rank2Flag, theta: &Q) -> Result<Rank2Flag> {
    if !theta.is_positive() || theta >= &Q::one() {
        return Err(Error::invariant(
            "shift-range",
            format!("theta {} is outside (0, 1)", rational::render(theta)),
        ));
    }
    let beta = rational::half() - &flag.beta;
    check_half_open(&beta)?;
    let quotient = flag.total_degree - flag.f_degree;
    let d2 = flag.self_intersection;
    Ok(Rank2Flag {
        beta,
        f_degree: quotient - d2,
        total_degree: flag.total_degree - d2,
        mean_weight: theta + &flag.mean_weight - rational::half(),
        self_intersection: d2,
    })
}

/// Brings `β` into `[0, 1/4]`, shifting only when `β > 1/4`. The shift is
/// chosen so the new weights are centred on `-1/2`.
pub fn normalize_to_quarter(flag: &Rank2Flag) -> Result<Rank2Flag> {
    check_half_open(&flag.beta)?;
    if flag.beta <= rational::quarter() {
        return Ok(flag.clone());
    }
    shift_rank2(flag, &-&flag.mean_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        let n = normalize(&FlagData::new(vec![frac(-1, 2), frac(-1, 2)], vec![0, 0]).unwrap());
        assert_eq!(n.alpha_tot, int(-1));
        assert_eq!(n.betas, vec![int(0), int(0)]);

        let n = normalize(&FlagData::new(vec![frac(-3, 4), frac(-1, 4)], vec![0, 0]).unwrap());
        assert_eq!(n.alpha_tot, int(-1));
        assert_eq!(n.betas, vec![frac(-1, 4), frac(1, 4)]);

        let n = normalize(&FlagData::new(vec![int(0); 3], vec![0; 3]).unwrap());
        assert_eq!(n.alpha_tot, int(0));
        assert!(n.betas.iter().all(Zero::is_zero));
    }

    #[test]
    fn flag_validation() {
        assert!(FlagData::new(vec![frac(-1, 4), frac(-1, 2)], vec![0, 0]).is_err());
        assert!(FlagData::new(vec![frac(1, 4)], vec![0]).is_err());
        assert!(FlagData::new(vec![int(-2)], vec![0]).is_err());
        assert!(FlagData::new(vec![int(0), int(0)], vec![0]).is_err());
        // equal steps are allowed
        assert!(FlagData::new(vec![int(-1), int(-1), int(0)], vec![1, 2, 3]).is_ok());
    }

    fn flag(beta: Q, f: i64, total: i64, d2: i64) -> Rank2Flag {
        Rank2Flag::new(beta, f, total, frac(-1, 2), d2).unwrap()
    }

    #[test]
    fn shift_examples() {
        let t = frac(1, 3);
        assert_eq!(
            shift_rank2(&flag(frac(3, 8), 0, 0, 1), &t).unwrap().beta,
            frac(1, 8)
        );
        assert_eq!(
            shift_rank2(&flag(frac(1, 4), 0, 0, 1), &t).unwrap().beta,
            frac(1, 4)
        );
        let r = shift_rank2(&flag(int(0), 0, 0, 1), &t);
        assert!(matches!(
            r,
            Err(Error::Invariant {
                invariant: "rank2-beta-range",
                ..
            })
        ));
    }

    #[test]
    fn quarter_examples() {
        assert_eq!(
            normalize_to_quarter(&flag(frac(2, 5), 1, 3, -1))
                .unwrap()
                .beta,
            frac(1, 10)
        );
        let f = flag(frac(1, 5), 1, 3, -1);
        assert_eq!(normalize_to_quarter(&f).unwrap(), f);
        let f = flag(frac(1, 4), 1, 3, -1);
        assert_eq!(normalize_to_quarter(&f).unwrap(), f);
    }

    #[test]
    fn quarter_shift_centres_weights() {
        let f = Rank2Flag::from_flag(
            &FlagData::new(vec![frac(-9, 10), frac(-1, 10)], vec![2, 5]).unwrap(),
            3,
        )
        .unwrap();
        let g = normalize_to_quarter(&f).unwrap();
        assert_eq!(g.weights(), [frac(-6, 10), frac(-4, 10)]);
        assert_eq!(g.total_degree, 4);
        assert_eq!(g.f_degree, 2);
    }

    #[test]
    fn tau_examples() {
        let id = CrossingPermutation {
            point: "y".into(),
            pair: (0, 1),
            sigma: Permutation::identity(2),
        };
        let sw = CrossingPermutation {
            sigma: Permutation::swap(),
            ..id.clone()
        };
        assert_eq!(tau_sign(&id).unwrap(), 1);
        assert_eq!(tau_sign(&sw).unwrap(), -1);
        assert_eq!(tau_sign(&sw.reversed()).unwrap(), tau_sign(&sw).unwrap());
        let r3 = CrossingPermutation {
            sigma: Permutation::identity(3),
            ..id
        };
        assert!(matches!(tau_sign(&r3), Err(Error::UnsupportedRank { .. })));
    }

    #[test]
    fn permutation_parsing() {
        let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.one_based(), vec![2, 3, 1]);
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
    }

    fn perm(r: usize) -> impl Strategy<Value = Permutation> {
        Just((0..r).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    fn weights(r: usize) -> impl Strategy<Value = Vec<Q>> {
        proptest::collection::vec((0i64..=12).prop_map(|n| frac(-n, 12)), r).prop_map(|mut v| {
            v.sort();
            v
        })
    }

    // single-component rank-2 Δ^Par written out by hand
    fn local_delta(delta_vb: &Q, f: &Rank2Flag) -> Q {
        delta_vb + &f.beta * int(f.deg_delta()) - &f.beta * &f.beta * int(f.self_intersection)
    }

    proptest! {
        #[test]
        fn crossing_inverse_is_consistent(p in (1usize..5).prop_flat_map(perm)) {
            let c = CrossingPermutation { point: "y".into(), pair: (2, 5), sigma: p.clone() };
            let back = c.reversed();
            prop_assert!(p.compose(&back.sigma).is_identity());
            prop_assert!(back.sigma.compose(&p).is_identity());
            prop_assert_eq!(c.oriented(5, 2).unwrap(), back.sigma);
        }

        #[test]
        fn normalize_round_trips_and_is_shift_invariant(
            w in (1usize..5).prop_flat_map(weights),
            c in -6i64..=6,
        ) {
            let r = w.len();
            let f = FlagData::new(w.clone(), vec![0; r]).unwrap();
            let n = normalize(&f);
            prop_assert!(rational::sum(&n.betas).is_zero());
            prop_assert_eq!(n.weights(), w.clone());
            let shift = frac(c, 24);
            let moved: Vec<Q> = n.betas.iter().map(|b| b + &shift).collect();
            let m = normalize(&FlagData { weights: moved, gr_degrees: vec![0; r] });
            prop_assert_eq!(m.betas, n.betas);
        }

        #[test]
        fn double_shift_restores_beta(b in 1i64..50, f in -5i64..5, t in -5i64..5, d2 in -3i64..4) {
            let fl = flag(frac(b, 100), f, t, d2);
            let once = shift_rank2(&fl, &frac(1, 3)).unwrap();
            let twice = shift_rank2(&once, &frac(2, 3)).unwrap();
            prop_assert_eq!(&twice.beta, &fl.beta);
            // two elementary transformations along D give E(-D)
            prop_assert_eq!(twice.total_degree, fl.total_degree - 2 * d2);
            prop_assert_eq!(twice.f_degree, fl.f_degree - d2);
        }

        #[test]
        fn shift_preserves_local_delta(b in 1i64..50, f in -5i64..5, t in -5i64..5, d2 in -3i64..4) {
            let fl = flag(frac(b, 100), f, t, d2);
            let sh = shift_rank2(&fl, &frac(1, 2)).unwrap();
            let before = local_delta(&int(0), &fl);
            // E' = ker(E -> i_*(E|_D / F)): ch1 drops by D, ch2 by q - D²/2
            let q = t - f;
            let vb_change = frac(-2 * t + d2, 4) + int(q) - frac(d2, 2);
            prop_assert_eq!(&vb_change, &fl.shift_delta_vb_change());
            let after = local_delta(&vb_change, &sh);
            prop_assert_eq!(before, after);
        }
    }
}
