//! The scenario file: JSON with exact rationals as `"p/q"` strings or
//! integer literals. Floating-point numbers are rejected.

use crate::error::{Error, Result};
use crate::localize::ExceptionalFlag;
use crate::model::{AttestedCharacter, Extension, Model};
use crate::parastruct::{CrossingPermutation, FlagData, Permutation};
use crate::rational::{self, Q};
use crate::surface::{
    ChowModel, Component, DivisorClass, IntersectionPoint, MultiplePoint, SurfaceScenario,
};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// An exact rational read from a string or an integer literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Q);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::render(&self.0))
    }
}

struct ExactVisitor;

impl Visitor<'_> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
        rational::parse(v).map(Exact).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
        Ok(Exact(rational::int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
        i64::try_from(v)
            .map(|v| Exact(rational::int(v)))
            .map_err(|_| E::custom("integer literal out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exact, E> {
        Err(E::custom(format!(
            "floating-point literal {v} is not allowed; write rationals as \"p/q\""
        )))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Exact, D::Error> {
        d.deserialize_any(ExactVisitor)
    }
}

/// Coefficients keyed by basis class name; absent names are zero.
pub type ClassSpec = BTreeMap<String, Exact>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub name: String,
    pub class: ClassSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingSpec {
    pub name: String,
    pub components: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplePointSpec {
    pub name: String,
    pub incident: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSurface {
    pub basis: Vec<String>,
    pub intersection: Vec<Vec<i64>>,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub crossings: Vec<CrossingSpec>,
    #[serde(default)]
    pub multiple_points: Vec<MultiplePointSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagSpec {
    pub weights: Vec<Exact>,
    pub gr_degrees: Vec<i64>,
}

/// `σ` at a crossing (or at a multiple point, per pair of incident
/// components), 1-based: `sigma[k-1] = σ(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationSpec {
    pub point: String,
    pub components: [String; 2],
    pub sigma: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub rank: usize,
    pub ch1: ClassSpec,
    pub ch2: Exact,
    pub flags: BTreeMap<String, FlagSpec>,
    #[serde(default)]
    pub permutations: Vec<PermutationSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    pub mu_chain: Vec<i64>,
    pub deg_delta_loc: BTreeMap<String, i64>,
    pub f0_deg_delta: i64,
    pub beta0: Exact,
    pub tau: BTreeMap<String, i64>,
}

/// `ch` of the extended bundle, over the blown-up basis (base classes plus
/// one class per multiple point, named after the point).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttestedSpec {
    pub ch1: ClassSpec,
    pub ch2: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub base_surface: BaseSurface,
    pub bundle: BundleSpec,
    #[serde(default)]
    pub extensions: BTreeMap<String, ExtensionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attested: Option<AttestedSpec>,
    #[serde(default)]
    pub stable_restriction: bool,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Canonical echo: sorted keys, rationals in lowest terms.
    pub fn canonical(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("scenario serializes")
    }

    pub fn to_model(&self) -> Result<Model> {
        let bs = &self.base_surface;
        let chow = ChowModel::new(bs.basis.clone(), bs.intersection.clone())?;
        let mut components = Vec::with_capacity(bs.components.len());
        for c in &bs.components {
            let class = class_from_spec(&c.class, &chow)?;
            if !class.is_integral() {
                return Err(Error::invariant(
                    "integral-class",
                    format!("component {} has a non-integral class", c.name),
                ));
            }
            components.push(Component {
                name: c.name.clone(),
                class,
            });
        }
        let comp_index = |name: &str| {
            bs.components
                .iter()
                .position(|c| c.name == name)
                .ok_or_else(|| {
                    Error::invariant("declared-component", format!("no component named {name}"))
                })
        };
        if let Some(dup) = bs
            .components
            .iter()
            .enumerate()
            .find(|(i, c)| bs.components[..*i].iter().any(|d| d.name == c.name))
        {
            return Err(Error::invariant(
                "distinct-component-names",
                format!("component name {} is used more than once", dup.1.name),
            ));
        }
        let crossings = bs
            .crossings
            .iter()
            .map(|c| {
                Ok(IntersectionPoint {
                    name: c.name.clone(),
                    components: (comp_index(&c.components[0])?, comp_index(&c.components[1])?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mps = bs
            .multiple_points
            .iter()
            .map(|p| {
                Ok(MultiplePoint {
                    name: p.name.clone(),
                    incident: p
                        .incident
                        .iter()
                        .map(|n| comp_index(n))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let surface = SurfaceScenario::new(chow, components, crossings, mps)?;

        let b = &self.bundle;
        let ch1 = class_from_spec(&b.ch1, surface.chow())?;
        for name in b.flags.keys() {
            comp_index(name)?;
        }
        let flags = bs
            .components
            .iter()
            .map(|c| {
                let f = b.flags.get(&c.name).ok_or_else(|| {
                    Error::invariant(
                        "flag-per-component",
                        format!("no flag given for {}", c.name),
                    )
                })?;
                FlagData::new(
                    f.weights.iter().map(|w| w.0.clone()).collect(),
                    f.gr_degrees.clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let crossings = b
            .permutations
            .iter()
            .map(|p| {
                Ok(CrossingPermutation {
                    point: p.point.clone(),
                    pair: (comp_index(&p.components[0])?, comp_index(&p.components[1])?),
                    sigma: Permutation::from_one_based(&p.sigma)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        for name in self.extensions.keys() {
            if !bs.multiple_points.iter().any(|p| &p.name == name) {
                return Err(Error::invariant(
                    "declared-point",
                    format!("extension given for undeclared multiple point {name}"),
                ));
            }
        }
        let extensions = bs
            .multiple_points
            .iter()
            .map(|p| {
                self.extensions
                    .get(&p.name)
                    .map(|e| extension_from_spec(e, p))
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;

        let attested = match &self.attested {
            Some(a) => {
                let names: Vec<String> = bs
                    .basis
                    .iter()
                    .chain(bs.multiple_points.iter().map(|p| &p.name))
                    .cloned()
                    .collect();
                let n = names.len();
                let up = ChowModel::new(names, vec![vec![0; n]; n])?;
                Some(AttestedCharacter {
                    ch1: class_from_spec(&a.ch1, &up)?,
                    ch2: a.ch2.0.clone(),
                })
            }
            None => None,
        };

        Model::new(
            surface,
            b.rank,
            ch1,
            b.ch2.0.clone(),
            flags,
            crossings,
            extensions,
            attested,
            self.stable_restriction,
        )
    }
}

fn class_from_spec(spec: &ClassSpec, chow: &ChowModel) -> Result<DivisorClass> {
    let mut coeffs = vec![rational::zero(); chow.dim()];
    for (name, v) in spec {
        let i = chow.index_of(name).ok_or_else(|| {
            Error::invariant("declared-basis", format!("no basis class named {name}"))
        })?;
        coeffs[i] = v.0.clone();
    }
    chow.class(coeffs)
}

/// Values keyed by incident component name, returned in incidence order.
fn per_incident(
    map: &BTreeMap<String, i64>,
    p: &MultiplePointSpec,
    what: &str,
) -> Result<Vec<i64>> {
    if map.len() != p.incident.len() || p.incident.iter().any(|c| !map.contains_key(c)) {
        return Err(Error::invariant(
            "incident-count",
            format!(
                "{what} at {} must name exactly its incident components",
                p.name
            ),
        ));
    }
    Ok(p.incident.iter().map(|c| map[c]).collect())
}

fn extension_from_spec(e: &ExtensionSpec, p: &MultiplePointSpec) -> Result<Extension> {
    Ok(Extension {
        mu_chain: e.mu_chain.clone(),
        deg_delta_loc: per_incident(&e.deg_delta_loc, p, "deg_delta_loc")?,
        flag: ExceptionalFlag {
            beta0: e.beta0.0.clone(),
            f0_deg_delta: e.f0_deg_delta,
            tau: per_incident(&e.tau, p, "tau")?,
        },
    })
}
