//! Splitting types on an exceptional line and elementary transformations
//! reducing a bundle to a twisted pullback near the line.

use crate::error::{Error, Result};
use crate::localize::{LocalChernData, LocalDegrees};
use crate::rational::{self, Q};
use num_traits::Zero;
use std::collections::BTreeMap;

/// `E|_P ≅ ⊕ O(m_j)^{r_j}` with `m_1 < … < m_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplittingType {
    parts: Vec<(i64, usize)>,
}

impl SplittingType {
    pub fn new(parts: Vec<(i64, usize)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invariant("splitting-type", "empty splitting type"));
        }
        if parts.iter().any(|&(_, r)| r == 0) {
            return Err(Error::invariant(
                "splitting-type",
                "multiplicities must be positive",
            ));
        }
        if parts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invariant(
                "splitting-type",
                "twists must be strictly increasing",
            ));
        }
        Ok(SplittingType { parts })
    }

    /// From a list of twists in any order, one per line summand.
    pub fn from_twists(twists: &[i64]) -> Result<Self> {
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for &m in twists {
            *counts.entry(m).or_default() += 1;
        }
        Self::new(counts.into_iter().collect())
    }

    pub fn pure(m: i64, r: usize) -> Self {
        SplittingType {
            parts: vec![(m, r)],
        }
    }

    pub fn parts(&self) -> &[(i64, usize)] {
        &self.parts
    }

    pub fn twists(&self) -> Vec<i64> {
        self.parts
            .iter()
            .flat_map(|&(m, r)| std::iter::repeat_n(m, r))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.parts.iter().map(|p| p.1).sum()
    }

    pub fn min_twist(&self) -> i64 {
        self.parts[0].0
    }

    pub fn max_twist(&self) -> i64 {
        self.parts[self.parts.len() - 1].0
    }

    pub fn mu(&self) -> i64 {
        self.max_twist() - self.min_twist()
    }

    pub fn degree(&self) -> i64 {
        self.parts.iter().map(|&(m, r)| m * r as i64).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.parts.len() == 1
    }

    /// Multiplicity of the lowest twist.
    pub fn r1(&self) -> usize {
        self.parts[0].1
    }
}

/// `ch(O(c·P)) = (c, −c²/2)` on the blow-up, using `P² = −1`.
fn ch_exceptional_line(c: i64) -> (i64, Q) {
    (c, rational::frac(-c * c, 2))
}

/// Chern character `(a, ch₂)` of the sheaf `O_P(m)` supported on the
/// exceptional line, from `0 → O(−(m+1)P) → O(−mP) → O_P(m) → 0`.
pub fn ch_exceptional_twist(m: i64) -> (i64, Q) {
    let (a0, c0) = ch_exceptional_line(-m);
    let (a1, c1) = ch_exceptional_line(-(m + 1));
    (a0 - a1, c0 - c1)
}

/// What one elementary transformation `E' = ker(E → O_P(m₁)^{r₁})` does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    /// Change of the coefficient of `[P]` in `ch₁`.
    pub delta_a: i64,
    pub delta_ch2: Q,
    /// Decrease of `Δ^Vb_loc`.
    pub delta_vb_drop: Q,
    pub new_degree: i64,
    pub min_lower: i64,
    pub max_upper: i64,
    pub mu_upper: i64,
    /// Every splitting type meeting the constraints.
    pub candidates: Vec<SplittingType>,
}

/// Sorted integer lists of length `r` with entries in `[lo, hi]`, summing to
/// `total` and with spread at most `spread`.
fn sorted_lists(r: usize, lo: i64, hi: i64, total: i64, spread: i64) -> Vec<Vec<i64>> {
    fn go(
        prefix: &mut Vec<i64>,
        left: usize,
        lo: i64,
        hi: i64,
        total: i64,
        spread: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if left == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let cap = prefix.first().map_or(hi, |&f| hi.min(f + spread));
        for m in lo..=cap {
            let l = left as i64;
            // remaining entries are at least m and at most cap
            if m * l > total || cap * l < total {
                continue;
            }
            prefix.push(m);
            go(prefix, left - 1, m, hi, total - m, spread, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if lo <= hi {
        go(&mut Vec::new(), r, lo, hi, total, spread, &mut out);
    }
    out
}

pub fn elementary_step(s: &SplittingType) -> Result<StepOutcome> {
    if s.is_pure() {
        return Err(Error::invariant(
            "non-pure-splitting",
            "an elementary transformation needs a non-pure splitting type",
        ));
    }
    let parts = s.parts();
    let (m1, r1) = parts[0];
    let (m2, _) = parts[1];
    let r1i = r1 as i64;
    let (a, ch2) = ch_exceptional_twist(m1);
    let r = s.rank() as i64;
    let drop = parts[1..].iter().fold(Q::zero(), |acc, &(mi, ri)| {
        acc + (rational::int(mi - m1) - rational::half()) * rational::int(r1i * ri as i64)
    }) / rational::int(r);
    let min_lower = (m1 + 1).min(m2);
    let max_upper = (m1 + 1).max(s.max_twist());
    let new_degree = s.degree() + r1i;
    let mu_upper = s.mu() - 1;
    let candidates = sorted_lists(s.rank(), min_lower, max_upper, new_degree, mu_upper)
        .iter()
        .map(|t| SplittingType::from_twists(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(StepOutcome {
        delta_a: -a * r1i,
        delta_ch2: -ch2 * rational::int(r1i),
        delta_vb_drop: drop,
        new_degree,
        min_lower,
        max_upper,
        mu_upper,
        candidates,
    })
}

/// The split choice `E'|_P ≅ O(m₁+1)^{r₁} ⊕ (rest)`, always admissible.
pub fn greedy_successor(s: &SplittingType) -> Result<SplittingType> {
    let parts = s.parts();
    let (m1, r1) = parts[0];
    let mut twists = vec![m1 + 1; r1];
    for &(m, r) in &parts[1..] {
        twists.extend(std::iter::repeat_n(m, r));
    }
    SplittingType::from_twists(&twists)
}

/// A reduction `E = E(g) → … → E(0)` to a pure splitting type.
///
/// Types are stored in build order: `types[0]` is the pure `E(0)` and
/// `types[g]` is `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRecord {
    types: Vec<SplittingType>,
    /// `Δ^Vb_loc(E)` accumulated from the per-step drops.
    delta_vb_loc: Q,
}

impl ChainRecord {
    fn from_types(types: Vec<SplittingType>) -> Result<Self> {
        let mut acc = Q::zero();
        for w in types.windows(2) {
            let step = elementary_step(&w[1])?;
            if !step.candidates.contains(&w[0]) {
                return Err(Error::invariant(
                    "elementary-step",
                    "consecutive splitting types violate the step constraints",
                ));
            }
            acc += step.delta_vb_drop;
        }
        if !types[0].is_pure() {
            return Err(Error::invariant(
                "pure-endpoint",
                "the chain must end at a pure type",
            ));
        }
        Ok(ChainRecord {
            types,
            delta_vb_loc: acc,
        })
    }

    pub fn g(&self) -> usize {
        self.types.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.types[0].rank()
    }

    pub fn types(&self) -> &[SplittingType] {
        &self.types
    }

    pub fn splitting(&self) -> &SplittingType {
        &self.types[self.g()]
    }

    /// `μ(E(1)), …, μ(E(g))`
    pub fn mu_seq(&self) -> Vec<i64> {
        self.types[1..].iter().map(SplittingType::mu).collect()
    }

    pub fn mu(&self) -> i64 {
        self.splitting().mu()
    }

    /// Twist `k` of the pure endpoint `E(0)|_P = O(k)^r`.
    pub fn endpoint_twist(&self) -> i64 {
        self.types[0].min_twist()
    }

    /// `Δ^Vb_loc(E)` from the per-step drops.
    pub fn delta_vb_loc_by_steps(&self) -> &Q {
        &self.delta_vb_loc
    }

    /// Rank 2: `½ Σ_j (μ_j − ½)`.
    pub fn delta_vb_loc_telescoped(&self) -> Result<Q> {
        if self.rank() != 2 {
            return Err(Error::rank2(self.rank(), "telescoped local discriminant"));
        }
        Ok(self.mu_seq().iter().fold(Q::zero(), |acc, &m| {
            acc + (rational::int(m) - rational::half()) / rational::int(2)
        }))
    }

    /// Local Chern data of `E` relative to `φ*Ě`, assuming `E(0) = φ*Ě(−kP)`
    /// with `k` the endpoint twist. Built from the `O_P(m)` characters of
    /// each step.
    pub fn local_chern(&self, point: &str) -> LocalChernData {
        let r = self.rank() as i64;
        let k = self.endpoint_twist();
        let mut a = -r * k;
        let mut ch2 = rational::frac(-r * k * k, 2);
        for t in &self.types[1..] {
            let (da, dc) = ch_exceptional_twist(t.min_twist());
            let r1 = t.r1() as i64;
            a += da * r1;
            ch2 += dc * rational::int(r1);
        }
        LocalChernData {
            point: point.to_string(),
            a,
            ch2_loc: ch2,
        }
    }
}

/// All reductions of `s` to a pure type. Rank 2 enumerates every admissible
/// chain; higher ranks follow the split choice only.
pub fn reduce_to_pure(s: &SplittingType) -> Result<Vec<ChainRecord>> {
    let mut out = Vec::new();
    if s.rank() == 2 {
        let mut down = vec![s.clone()];
        enumerate_down(&mut down, &mut out)?;
    } else {
        let mut down = vec![s.clone()];
        while !down[down.len() - 1].is_pure() {
            let next = greedy_successor(&down[down.len() - 1])?;
            down.push(next);
        }
        down.reverse();
        out.push(ChainRecord::from_types(down)?);
    }
    out.sort_by_key(|c| c.mu_seq());
    Ok(out)
}

fn enumerate_down(down: &mut Vec<SplittingType>, out: &mut Vec<ChainRecord>) -> Result<()> {
    let last = down[down.len() - 1].clone();
    if last.is_pure() {
        let mut types = down.clone();
        types.reverse();
        out.push(ChainRecord::from_types(types)?);
        return Ok(());
    }
    for next in elementary_step(&last)?.candidates {
        down.push(next);
        enumerate_down(down, out)?;
        down.pop();
    }
    Ok(())
}

/// Checks that `mu_seq` is a rank-2 chain from a pure type: strictly
/// increasing and `μ_j ≡ j (mod 2)`.
pub fn validate_mu_seq(mu_seq: &[i64]) -> Result<()> {
    let mut prev = 0;
    for (j, &m) in mu_seq.iter().enumerate() {
        if m <= prev {
            return Err(Error::invariant(
                "mu-chain-increasing",
                format!("{mu_seq:?} is not strictly increasing from 0"),
            ));
        }
        if (m - (j as i64 + 1)).rem_euclid(2) != 0 {
            return Err(Error::invariant(
                "mu-chain-parity",
                format!("{mu_seq:?}: entry {} must have the parity of {}", m, j + 1),
            ));
        }
        prev = m;
    }
    Ok(())
}

/// The rank-2 chain with the given `μ` sequence starting from `O(k) ⊕ O(k)`.
/// `E(j)|_P` has degree `2k − j`.
pub fn chain_from_mu_seq(mu_seq: &[i64], k: i64) -> Result<ChainRecord> {
    validate_mu_seq(mu_seq)?;
    let mut types = vec![SplittingType::pure(k, 2)];
    for (j, &m) in mu_seq.iter().enumerate() {
        let deg = 2 * k - (j as i64 + 1);
        let lo = (deg - m) / 2;
        types.push(SplittingType::from_twists(&[lo, lo + m])?);
    }
    ChainRecord::from_types(types)
}

/// Rank-2 `μ` sequences of length `g` with `μ_g ≤ cap`, in lexicographic order.
pub fn mu_sequences(g: usize, cap: i64) -> Vec<Vec<i64>> {
    fn go(prefix: &mut Vec<i64>, g: usize, cap: i64, out: &mut Vec<Vec<i64>>) {
        let j = prefix.len();
        if j == g {
            out.push(prefix.clone());
            return;
        }
        let prev = prefix.last().copied().unwrap_or(0);
        let remaining = (g - j - 1) as i64;
        // each later entry adds at least one
        let mut m = prev + 1;
        while m + remaining <= cap {
            prefix.push(m);
            go(prefix, g, cap, out);
            prefix.pop();
            m += 2;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), g, cap, &mut out);
    out
}

/// Which flag steps of each incident component are hit by each build step:
/// `bits[j][i][k] ∈ {0, 1}`, summing over `k` to the step's `r₁`.
pub type TauBits = Vec<Vec<Vec<u8>>>;

/// `deg_loc(Gr(D_i, k; E), P) = −k₀ + Σ_j τ_{j,i,k}` where `k₀` is the
/// endpoint twist.
pub fn update_filtration_degrees(
    record: &ChainRecord,
    kappa: usize,
    bits: &TauBits,
) -> Result<LocalDegrees> {
    let r = record.rank();
    if bits.len() != record.g() {
        return Err(Error::invariant(
            "tau-bits",
            format!(
                "{} steps of bits for a chain of length {}",
                bits.len(),
                record.g()
            ),
        ));
    }
    let k0 = record.endpoint_twist();
    let mut degs = vec![vec![-k0; r]; kappa];
    for (j, step) in bits.iter().enumerate() {
        let r1 = record.types()[j + 1].r1();
        if step.len() != kappa {
            return Err(Error::invariant(
                "tau-bits",
                "one bit vector per incident component",
            ));
        }
        for (i, v) in step.iter().enumerate() {
            if v.len() != r || v.iter().any(|&b| b > 1) {
                return Err(Error::invariant(
                    "tau-bits",
                    "bits are 0/1, one per flag step",
                ));
            }
            if v.iter().map(|&b| b as usize).sum::<usize>() != r1 {
                return Err(Error::invariant(
                    "tau-bits",
                    format!(
                        "step {} must hit exactly {r1} flag step(s) on each component",
                        j + 1
                    ),
                ));
            }
            for (k, &b) in v.iter().enumerate() {
                degs[i][k] += b as i64;
            }
        }
    }
    Ok(LocalDegrees { per_incident: degs })
}

/// Rank-2 bits where `true` means the step hits the sub line `F^i`.
pub fn rank2_bits(sub_hit: &[Vec<bool>]) -> TauBits {
    sub_hit
        .iter()
        .map(|step| {
            step.iter()
                .map(|&s| if s { vec![1, 0] } else { vec![0, 1] })
                .collect()
        })
        .collect()
}

/// Rank 2 with endpoint twist 0: `deg_loc` of `(F^i, quotient)` for a
/// given `deg^δ_loc = d` after `g` steps.
pub fn rank2_local_degrees(g: i64, d: i64) -> Result<[i64; 2]> {
    if d.abs() > g || (g - d).rem_euclid(2) != 0 {
        return Err(Error::invariant(
            "local-degree-range",
            format!("deg^δ_loc = {d} needs |d| <= {g} and d ≡ {g} mod 2"),
        ));
    }
    Ok([(g - d) / 2, (g + d) / 2])
}
