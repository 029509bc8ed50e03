//! A resolved scenario: the base configuration, the parabolic bundle `Ě` on
//! it, and the chosen extensions across the exceptional divisors.

use crate::chern::ParabolicBundle;
use crate::elemtrans::{chain_from_mu_seq, rank2_local_degrees, ChainRecord};
use crate::error::{Error, Result};
use crate::localize::{
    decomposition_check, delta_vb_loc, DecompositionReport, ExceptionalFlag, IncidentData,
    LocalChernData, LocalRecord,
};
use crate::parastruct::{
    normalize, permutation_for_sign, CrossingPermutation, FlagData, Permutation,
};
use crate::rational::{self, Q};
use crate::surface::{blow_up, BlownUp, DivisorClass, SurfaceScenario};
use num_traits::Zero;

/// A rank-2 extension across one exceptional divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub mu_chain: Vec<i64>,
    /// `deg^δ_loc` per incident component, in incidence order.
    pub deg_delta_loc: Vec<i64>,
    pub flag: ExceptionalFlag,
}

/// `ch` of the extended bundle on the blow-up, supplied independently of the
/// extension records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttestedCharacter {
    pub ch1: DivisorClass,
    pub ch2: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    surface: SurfaceScenario,
    blown_up: BlownUp,
    rank: usize,
    ch1: DivisorClass,
    ch2: Q,
    flags: Vec<FlagData>,
    crossings: Vec<CrossingPermutation>,
    extensions: Vec<Option<Extension>>,
    chains: Vec<Option<ChainRecord>>,
    attested: Option<AttestedCharacter>,
    /// The scenario asserts the stability hypothesis under which the minimal
    /// extension has `Δ^Par ≥ 0`.
    pub stable_restriction: bool,
}

impl Model {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        surface: SurfaceScenario,
        rank: usize,
        ch1: DivisorClass,
        ch2: Q,
        flags: Vec<FlagData>,
        crossings: Vec<CrossingPermutation>,
        extensions: Vec<Option<Extension>>,
        attested: Option<AttestedCharacter>,
        stable_restriction: bool,
    ) -> Result<Self> {
        let blown_up = blow_up(&surface)?;
        let m = surface.multiple_points().len();
        if extensions.len() != m {
            return Err(Error::invariant(
                "extension-per-point",
                format!(
                    "{} extension slots for {m} multiple points",
                    extensions.len()
                ),
            ));
        }
        if extensions.iter().any(Option::is_some) && rank != 2 {
            return Err(Error::rank2(rank, "extensions across exceptional divisors"));
        }
        let mut chains = Vec::with_capacity(m);
        for (ext, mp) in extensions.iter().zip(surface.multiple_points()) {
            let Some(ext) = ext else {
                chains.push(None);
                continue;
            };
            let chain = chain_from_mu_seq(&ext.mu_chain, 0)?;
            let kappa = mp.kappa();
            if ext.deg_delta_loc.len() != kappa || ext.flag.tau.len() != kappa {
                return Err(Error::invariant(
                    "incident-count",
                    format!(
                        "extension at {} needs one entry per incident component",
                        mp.name
                    ),
                ));
            }
            ext.flag.validate(chain.mu())?;
            for &d in &ext.deg_delta_loc {
                rank2_local_degrees(chain.g() as i64, d)?;
            }
            chains.push(Some(chain));
        }
        if let Some(a) = &attested {
            if a.ch1.dim() != blown_up.chow().dim() {
                return Err(Error::invariant(
                    "basis-mismatch",
                    "attested ch1 is not a class over the blown-up basis",
                ));
            }
        }
        let model = Model {
            surface,
            blown_up,
            rank,
            ch1,
            ch2,
            flags,
            crossings,
            extensions,
            chains,
            attested,
            stable_restriction,
        };
        // surface every data error up front
        model.check_bundle()?;
        model.extended_bundle()?;
        Ok(model)
    }

    pub fn surface(&self) -> &SurfaceScenario {
        &self.surface
    }

    pub fn blown_up(&self) -> &BlownUp {
        &self.blown_up
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

    pub fn crossings(&self) -> &[CrossingPermutation] {
        &self.crossings
    }

    pub fn extensions(&self) -> &[Option<Extension>] {
        &self.extensions
    }

    pub fn chain(&self, u: usize) -> Option<&ChainRecord> {
        self.chains[u].as_ref()
    }

    pub fn attested(&self) -> Option<&AttestedCharacter> {
        self.attested.as_ref()
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.surface
            .multiple_points()
            .iter()
            .position(|p| p.name == name)
    }

    /// `Ě` on the base divisor with multiple points listed pairwise.
    pub fn check_bundle(&self) -> Result<ParabolicBundle> {
        ParabolicBundle::new(
            self.surface.pairwise_divisor()?,
            self.rank,
            self.ch1.clone(),
            self.ch2.clone(),
            self.flags.clone(),
            &self.crossings,
        )
    }

    fn base_crossings(&self) -> Vec<CrossingPermutation> {
        let names: Vec<&String> = self.surface.crossings().iter().map(|c| &c.name).collect();
        self.crossings
            .iter()
            .filter(|c| names.contains(&&c.point))
            .cloned()
            .collect()
    }

    /// Local Chern data at point `u` of the assembled extension.
    pub fn local_chern(&self, u: usize) -> LocalChernData {
        let name = &self.surface.multiple_points()[u].name;
        match &self.chains[u] {
            Some(c) => c.local_chern(name),
            None => LocalChernData::zero(name),
        }
    }

    /// `deg_loc(Gr(D_i, k; E), P_u)` for every incident component.
    pub fn local_degrees(&self, u: usize) -> Vec<Vec<i64>> {
        let mp = &self.surface.multiple_points()[u];
        match (&self.extensions[u], &self.chains[u]) {
            (Some(ext), Some(chain)) => ext
                .deg_delta_loc
                .iter()
                .map(|&d| {
                    rank2_local_degrees(chain.g() as i64, d)
                        .expect("validated at construction")
                        .to_vec()
                })
                .collect(),
            _ => vec![vec![0; self.rank]; mp.kappa()],
        }
    }

    /// Flag on the exceptional divisor over point `u` and the permutations
    /// from each incident component to it.
    fn exceptional_flag(&self, u: usize) -> Result<(FlagData, Vec<Permutation>)> {
        let mp = &self.surface.multiple_points()[u];
        match &self.extensions[u] {
            Some(ext) => {
                let deg_p = -self.local_chern(u).a;
                let f = (deg_p - ext.flag.f0_deg_delta) / 2;
                let mid = -rational::half();
                let b0 = &ext.flag.beta0;
                let flag = FlagData::new(vec![&mid - b0, &mid + b0], vec![f, deg_p - f])?;
                let sigmas = ext
                    .flag
                    .tau
                    .iter()
                    .map(|&t| permutation_for_sign(t))
                    .collect::<Result<Vec<_>>>()?;
                Ok((flag, sigmas))
            }
            None => Ok((
                FlagData::uniform(self.rank, Q::zero(), vec![0; self.rank])?,
                vec![Permutation::identity(self.rank); mp.kappa()],
            )),
        }
    }

    fn bundle_on_blow_up(&self, pullback: bool) -> Result<ParabolicBundle> {
        let x = &self.blown_up;
        let mps = self.surface.multiple_points();
        let mut ch1 = x.pullback(&self.ch1);
        let mut ch2 = self.ch2.clone();
        let mut flags = self.flags.clone();
        let mut crossings = self.base_crossings();
        let mut exceptional = Vec::with_capacity(mps.len());
        for (u, mp) in mps.iter().enumerate() {
            let (flag, sigmas) = if pullback {
                (
                    FlagData::uniform(self.rank, Q::zero(), vec![0; self.rank])?,
                    vec![Permutation::identity(self.rank); mp.kappa()],
                )
            } else {
                self.exceptional_flag(u)?
            };
            if !pullback {
                let loc = self.local_chern(u);
                ch1 = &ch1 + &x.exceptional_class(u).scaled(&rational::int(loc.a));
                ch2 += &loc.ch2_loc;
                for (&i, degs) in mp.incident.iter().zip(self.local_degrees(u)) {
                    let gr = flags[i]
                        .gr_degrees()
                        .iter()
                        .zip(&degs)
                        .map(|(a, b)| a + b)
                        .collect();
                    flags[i] = flags[i].with_gr_degrees(gr)?;
                }
            }
            for (pos, sigma) in sigmas.into_iter().enumerate() {
                let p = &x.divisor().points()[x.incidence_point(u, pos)];
                crossings.push(CrossingPermutation {
                    point: p.name.clone(),
                    pair: p.components,
                    sigma,
                });
            }
            exceptional.push(flag);
        }
        if !pullback {
            if let Some(a) = &self.attested {
                ch1 = a.ch1.clone();
                ch2 = a.ch2.clone();
            }
        }
        flags.extend(exceptional);
        ParabolicBundle::new(x.divisor().clone(), self.rank, ch1, ch2, flags, &crossings)
    }

    /// `E` on the blow-up: `Ě` extended by the given extensions, or by the
    /// pullback where none is given. An attested character replaces the
    /// assembled `ch`.
    pub fn extended_bundle(&self) -> Result<ParabolicBundle> {
        self.bundle_on_blow_up(false)
    }

    /// `φ*Ě` with zero weights on every exceptional divisor.
    pub fn pullback_bundle(&self) -> Result<ParabolicBundle> {
        self.bundle_on_blow_up(true)
    }

    /// Incident `β` vectors at point `u`, in incidence order.
    pub fn incident_betas(&self, u: usize) -> Vec<Vec<Q>> {
        self.surface.multiple_points()[u]
            .incident
            .iter()
            .map(|&i| normalize(&self.flags[i]).betas)
            .collect()
    }

    /// Rank 2: `β_i = β(D_i, 2)` for each incident component.
    pub fn incident_rank2_betas(&self, u: usize) -> Result<Vec<Q>> {
        if self.rank != 2 {
            return Err(Error::rank2(self.rank, "rank-2 incident weights"));
        }
        Ok(self
            .incident_betas(u)
            .into_iter()
            .map(|b| b[1].clone())
            .collect())
    }

    /// Permutations of the base flags at the multiple point, one per
    /// unordered pair of incidence positions.
    pub fn pairwise_permutations(&self, u: usize) -> Result<Vec<(usize, usize, Permutation)>> {
        let check = self.check_bundle()?;
        let mp = &self.surface.multiple_points()[u];
        let mut out = Vec::new();
        for (n, p) in check.divisor().points().iter().enumerate() {
            if p.name != mp.name {
                continue;
            }
            let (a, b) = p.components;
            let pa = mp
                .position_of(a)
                .expect("pairwise point of this multiple point");
            let pb = mp
                .position_of(b)
                .expect("pairwise point of this multiple point");
            out.push((pa, pb, check.sigma(n).clone()));
        }
        Ok(out)
    }

    pub fn local_record(&self, u: usize) -> Result<LocalRecord> {
        let mp = &self.surface.multiple_points()[u];
        let (flag, sigmas) = self.exceptional_flag(u)?;
        let incident = self
            .incident_betas(u)
            .into_iter()
            .zip(self.local_degrees(u))
            .zip(sigmas)
            .map(|((betas, deg_loc), sigma)| IncidentData {
                betas,
                deg_loc,
                sigma_to_exceptional: sigma,
            })
            .collect();
        Ok(LocalRecord {
            point: mp.name.clone(),
            delta_vb_loc: delta_vb_loc(&self.local_chern(u), self.rank as i64)?,
            exceptional_betas: normalize(&flag).betas,
            exceptional_gr: flag.gr_degrees().to_vec(),
            incident,
            pairwise: self.pairwise_permutations(u)?,
        })
    }

    pub fn local_records(&self) -> Result<Vec<LocalRecord>> {
        (0..self.surface.multiple_points().len())
            .map(|u| self.local_record(u))
            .collect()
    }

    pub fn decomposition(&self) -> Result<DecompositionReport> {
        Ok(decomposition_check(
            &self.extended_bundle()?,
            &self.pullback_bundle()?,
            &self.check_bundle()?,
            &self.local_records()?,
        ))
    }

    /// The same scenario with the given extension at point `u`.
    pub fn with_extension(&self, u: usize, ext: Option<Extension>) -> Result<Self> {
        let mut exts = self.extensions.clone();
        exts[u] = ext;
        Model::new(
            self.surface.clone(),
            self.rank,
            self.ch1.clone(),
            self.ch2.clone(),
            self.flags.clone(),
            self.crossings.clone(),
            exts,
            None,
            self.stable_restriction,
        )
    }
}
