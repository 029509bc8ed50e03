//! Global parabolic Chern invariants.

use crate::error::{Error, Result};
use crate::parastruct::{normalize, sign_of, CrossingPermutation, FlagData, Permutation};
use crate::rational::{self, Q};
use crate::surface::{pair, Divisor, DivisorClass};
use num_traits::Zero;

/// A parabolic bundle with complete flags on every component of a divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicBundle {
    divisor: Divisor,
    rank: usize,
    ch1: DivisorClass,
    ch2: Q,
    flags: Vec<FlagData>,
    /// One permutation per divisor point, oriented from the point's first
    /// component to its second.
    sigmas: Vec<Permutation>,
    defaulted: Vec<String>,
}

impl ParabolicBundle {
    /// Validates the data against `divisor`. Points without a permutation get
    /// the identity; their names are kept in [`ParabolicBundle::defaulted`].
    pub fn new(
        divisor: Divisor,
        rank: usize,
        ch1: DivisorClass,
        ch2: Q,
        flags: Vec<FlagData>,
        crossings: &[CrossingPermutation],
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invariant("positive-rank", "rank must be at least 1"));
        }
        if ch1.dim() != divisor.chow().dim() {
            return Err(Error::invariant(
                "basis-mismatch",
                "ch1 is not a class over the surface basis",
            ));
        }
        if !ch1.is_integral() {
            return Err(Error::invariant(
                "integral-ch1",
                "ch1 must be an integral class",
            ));
        }
        if flags.len() != divisor.components().len() {
            return Err(Error::invariant(
                "flag-per-component",
                format!(
                    "{} flags for {} components",
                    flags.len(),
                    divisor.components().len()
                ),
            ));
        }
        for (c, f) in divisor.components().iter().zip(&flags) {
            if f.rank() != rank {
                return Err(Error::invariant(
                    "flag-rank",
                    format!(
                        "flag on {} has {} steps, bundle rank is {rank}",
                        c.name,
                        f.rank()
                    ),
                ));
            }
            let expected = pair(&ch1, &c.class, divisor.chow())?;
            if rational::int(f.total_degree()) != expected {
                return Err(Error::invariant(
                    "graded-degree-sum",
                    format!(
                        "graded degrees on {} sum to {} but ch1·{} = {}",
                        c.name,
                        f.total_degree(),
                        c.name,
                        rational::render(&expected)
                    ),
                ));
            }
        }

        let mut used = vec![false; crossings.len()];
        let mut sigmas = Vec::with_capacity(divisor.points().len());
        let mut defaulted = Vec::new();
        for p in divisor.points() {
            let (a, b) = p.components;
            let mut found: Option<Permutation> = None;
            for (n, c) in crossings.iter().enumerate() {
                if c.point != p.name {
                    continue;
                }
                let Some(s) = c.oriented(a, b) else { continue };
                used[n] = true;
                if s.rank() != rank {
                    return Err(Error::invariant(
                        "permutation-rank",
                        format!(
                            "permutation at {} has size {}, rank is {rank}",
                            p.name,
                            s.rank()
                        ),
                    ));
                }
                match &found {
                    Some(prev) if prev != &s => {
                        return Err(Error::invariant(
                            "crossing-inverse",
                            format!(
                                "permutations given for both orders at {} are not inverse",
                                p.name
                            ),
                        ))
                    }
                    _ => found = Some(s),
                }
            }
            match found {
                Some(s) => sigmas.push(s),
                None => {
                    defaulted.push(format!(
                        "{}:{}-{}",
                        p.name,
                        divisor.components()[a].name,
                        divisor.components()[b].name
                    ));
                    sigmas.push(Permutation::identity(rank));
                }
            }
        }
        if let Some(n) = used.iter().position(|u| !u) {
            return Err(Error::invariant(
                "declared-point",
                format!(
                    "permutation for {} does not match any meeting point of the divisor",
                    crossings[n].point
                ),
            ));
        }
        Ok(ParabolicBundle {
            divisor,
            rank,
            ch1,
            ch2,
            flags,
            sigmas,
            defaulted,
        })
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ch1(&self) -> &DivisorClass {
        &self.ch1
    }

    pub fn ch2(&self) -> &Q {
        &self.ch2
    }

    pub fn flags(&self) -> &[FlagData] {
        &self.flags
    }

    pub fn sigma(&self, point: usize) -> &Permutation {
        &self.sigmas[point]
    }

    /// Points whose permutation was not supplied and defaulted to the identity.
    pub fn defaulted(&self) -> &[String] {
        &self.defaulted
    }

    /// The crossing data in the form accepted by [`ParabolicBundle::new`].
    pub fn crossing_permutations(&self) -> Vec<CrossingPermutation> {
        self.divisor
            .points()
            .iter()
            .zip(&self.sigmas)
            .map(|(p, s)| CrossingPermutation {
                point: p.name.clone(),
                pair: p.components,
                sigma: s.clone(),
            })
            .collect()
    }

    fn ch1_sq(&self) -> Q {
        pair(&self.ch1, &self.ch1, self.divisor.chow()).expect("validated basis")
    }

    /// Replaces the flag on one component, keeping everything else.
    pub fn with_flag(&self, component: usize, flag: FlagData) -> Result<Self> {
        let mut flags = self.flags.clone();
        flags[component] = flag;
        Self::new(
            self.divisor.clone(),
            self.rank,
            self.ch1.clone(),
            self.ch2.clone(),
            flags,
            &self.crossing_permutations(),
        )
    }
}

/// `ch₁^Vb − Σ_i α^tot(D_i)·[D_i]`
pub fn ch1_par(b: &ParabolicBundle) -> DivisorClass {
    let mut c = b.ch1.clone();
    for (comp, flag) in b.divisor.components().iter().zip(&b.flags) {
        let tot = rational::sum(flag.weights());
        c = &c - &comp.class.scaled(&tot);
    }
    c
}

/// Sum over ordered pairs `i ≠ j` and meeting points of `Σ_k x(i,k)·x(j,σ(k))`,
/// halved. Each point is visited once and counted for both orders.
fn half_cross_sum(b: &ParabolicBundle, values: &[Vec<Q>]) -> Q {
    let mut acc = Q::zero();
    for (p, sigma) in b.divisor.points().iter().zip(&b.sigmas) {
        let (i, j) = p.components;
        let inv = sigma.inverse();
        let mut forward = Q::zero();
        let mut backward = Q::zero();
        for k in 0..b.rank {
            forward += &values[i][k] * &values[j][sigma.apply(k)];
            backward += &values[j][k] * &values[i][inv.apply(k)];
        }
        acc += (forward + backward) / rational::int(2);
    }
    acc
}

pub fn ch2_par(b: &ParabolicBundle) -> Q {
    let mut v = b.ch2.clone();
    let weights: Vec<Vec<Q>> = b.flags.iter().map(|f| f.weights().to_vec()).collect();
    for (i, flag) in b.flags.iter().enumerate() {
        let d2 = b.divisor.self_intersection(i);
        for (a, &deg) in flag.weights().iter().zip(flag.gr_degrees()) {
            v -= a * rational::int(deg);
            v += a * a * &d2 / rational::int(2);
        }
    }
    v + half_cross_sum(b, &weights)
}

/// `(1/2r)·ch₁² − ch₂`
pub fn delta_vb(ch1_sq: &Q, ch2: &Q, r: i64) -> Result<Q> {
    if r <= 0 {
        return Err(Error::invariant(
            "positive-rank",
            format!("rank {r} is not positive"),
        ));
    }
    Ok(ch1_sq / rational::int(2 * r) - ch2)
}

pub fn bundle_delta_vb(b: &ParabolicBundle) -> Q {
    delta_vb(&b.ch1_sq(), &b.ch2, b.rank as i64).expect("rank is positive")
}

/// `Δ^Par` through the trace-free weights `β`.
pub fn delta_par(b: &ParabolicBundle) -> Q {
    let betas: Vec<Vec<Q>> = b.flags.iter().map(|f| normalize(f).betas).collect();
    let mut v = bundle_delta_vb(b);
    for (i, flag) in b.flags.iter().enumerate() {
        let d2 = b.divisor.self_intersection(i);
        for (beta, &deg) in betas[i].iter().zip(flag.gr_degrees()) {
            v += beta * rational::int(deg);
            v -= beta * beta * &d2 / rational::int(2);
        }
    }
    v - half_cross_sum(b, &betas)
}

/// `Δ^Par` as `(1/2r)·(ch₁^Par)² − ch₂^Par`.
pub fn delta_par_via_characters(b: &ParabolicBundle) -> Q {
    let c = ch1_par(b);
    let sq = pair(&c, &c, b.divisor.chow()).expect("validated basis");
    delta_vb(&sq, &ch2_par(b), b.rank as i64).expect("rank is positive")
}

/// The rank-2 form with `β_i`, `deg^δ` and the signs `τ`.
pub fn delta_par_rank2(b: &ParabolicBundle) -> Result<Q> {
    if b.rank != 2 {
        return Err(Error::rank2(b.rank, "rank-2 discriminant"));
    }
    let mut v = bundle_delta_vb(b);
    let beta: Vec<Q> = b
        .flags
        .iter()
        .map(|f| (&f.weights()[1] - &f.weights()[0]) / rational::int(2))
        .collect();
    for (i, flag) in b.flags.iter().enumerate() {
        let g = flag.gr_degrees();
        let deg_delta = rational::int(g[1] - g[0]);
        v += &beta[i] * deg_delta;
        v -= &beta[i] * &beta[i] * b.divisor.self_intersection(i);
    }
    for (p, sigma) in b.divisor.points().iter().zip(&b.sigmas) {
        let (i, j) = p.components;
        // both orders of the pair
        v -= rational::int(2 * sign_of(sigma)?) * &beta[i] * &beta[j];
    }
    Ok(v)
}

/// `E ⊗ L` for an integral class `L`; weights and permutations are kept.
pub fn tensor_line_bundle(b: &ParabolicBundle, l: &DivisorClass) -> Result<ParabolicBundle> {
    let chow = b.divisor.chow();
    if l.dim() != chow.dim() {
        return Err(Error::invariant(
            "basis-mismatch",
            "L is not a class over the surface basis",
        ));
    }
    if !l.is_integral() {
        return Err(Error::invariant(
            "integral-line-bundle",
            "L must be an integral class",
        ));
    }
    let r = rational::int(b.rank as i64);
    let ch1 = &b.ch1 + &l.scaled(&r);
    let ch2 = &b.ch2 + pair(&b.ch1, l, chow)? + &r * pair(l, l, chow)? / rational::int(2);
    let mut flags = Vec::with_capacity(b.flags.len());
    for (comp, f) in b.divisor.components().iter().zip(&b.flags) {
        let shift = rational::to_i64(&pair(l, &comp.class, chow)?).ok_or_else(|| {
            Error::invariant("integral-line-bundle", "L·D is not a machine integer")
        })?;
        flags.push(f.with_gr_degrees(f.gr_degrees().iter().map(|d| d + shift).collect())?);
    }
    ParabolicBundle::new(
        b.divisor.clone(),
        b.rank,
        ch1,
        ch2,
        flags,
        &b.crossing_permutations(),
    )
}

/// Moves every weight on `component` by `c`.
pub fn shift_weights(b: &ParabolicBundle, component: usize, c: &Q) -> Result<ParabolicBundle> {
    b.with_flag(component, b.flags[component].shifted_uniformly(c)?)
}

/// `ch₂` from `c₁` and `c₂`: `½c₁² − c₂`.
pub fn ch2_from_chern_classes(c1_sq: &Q, c2: &Q) -> Q {
    c1_sq / rational::int(2) - c2
}
