//! Divisor classes on a smooth projective surface and their behaviour under
//! blowing up general multiple points of a curve configuration.
//!
//! A [`ChowModel`] is a finite basis of `A¹ ⊗ ℚ` together with the integral
//! intersection form. Points are never represented as cycles: every point
//! class has degree one, so the pairing of two divisor classes is simply a
//! rational number.

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowModel {
    names: Vec<String>,
    form: Vec<Vec<i64>>,
    exceptional: Vec<bool>,
}

impl ChowModel {
    /// A model with no exceptional classes.
    pub fn new(names: Vec<String>, form: Vec<Vec<i64>>) -> Result<Self> {
        let n = names.len();
        Self::with_exceptional(names, form, vec![false; n])
    }

    pub fn with_exceptional(
        names: Vec<String>,
        form: Vec<Vec<i64>>,
        exceptional: Vec<bool>,
    ) -> Result<Self> {
        let n = names.len();
        if form.len() != n || form.iter().any(|row| row.len() != n) {
            return Err(Error::invariant(
                "intersection-matrix-shape",
                format!("expected a {n}x{n} matrix"),
            ));
        }
        if exceptional.len() != n {
            return Err(Error::invariant(
                "intersection-matrix-shape",
                "exceptional flags do not match the basis",
            ));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(Error::invariant(
                "distinct-basis-names",
                "basis class names must be distinct",
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if form[i][j] != form[j][i] {
                    return Err(Error::invariant(
                        "intersection-matrix-symmetric",
                        format!(
                            "entry ({}, {}) differs from ({}, {})",
                            names[i], names[j], names[j], names[i]
                        ),
                    ));
                }
            }
        }
        for e in (0..n).filter(|&e| exceptional[e]) {
            if form[e][e] != -1 || (0..n).any(|f| f != e && form[e][f] != 0) {
                return Err(Error::invariant(
                    "exceptional-class",
                    format!(
                        "{} must have self-intersection -1 and be orthogonal to the rest",
                        names[e]
                    ),
                ));
            }
        }
        Ok(ChowModel {
            names,
            form,
            exceptional,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.form[i][j]
    }

    pub fn is_exceptional(&self, i: usize) -> bool {
        self.exceptional[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> DivisorClass {
        DivisorClass::zero(self.dim())
    }

    pub fn basis_class(&self, i: usize) -> DivisorClass {
        let mut c = self.zero();
        c.coeffs[i] = Q::one();
        c
    }

    pub fn class(&self, coeffs: Vec<Q>) -> Result<DivisorClass> {
        if coeffs.len() != self.dim() {
            return Err(Error::invariant(
                "basis-mismatch",
                format!(
                    "class has {} coefficients, basis has {}",
                    coeffs.len(),
                    self.dim()
                ),
            ));
        }
        Ok(DivisorClass { coeffs })
    }

    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Q> {
        pair(a, b, self)
    }
}

/// A rational combination of the basis classes of some [`ChowModel`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    coeffs: Vec<Q>,
}

impl DivisorClass {
    pub fn zero(dim: usize) -> Self {
        DivisorClass {
            coeffs: vec![Q::zero(); dim],
        }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        DivisorClass {
            coeffs: coeffs.iter().map(|&c| rational::int(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Q {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scaled(&self, s: &Q) -> Self {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Pads with zero coefficients up to `dim` (pullback to a blow-up whose
    /// basis extends this one).
    pub fn extended(&self, dim: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim, Q::zero());
        DivisorClass { coeffs }
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "divisor classes over different bases"
        );
    }
}

impl Add<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.assert_same_dim(rhs);
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.assert_same_dim(rhs);
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&DivisorClass> for &Q {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scaled(self)
    }
}

/// Intersection pairing `A¹ × A¹ → ℚ`.
pub fn pair(a: &DivisorClass, b: &DivisorClass, chow: &ChowModel) -> Result<Q> {
    let n = chow.dim();
    if a.dim() != n || b.dim() != n {
        return Err(Error::invariant(
            "basis-mismatch",
            format!(
                "pairing classes of length {} and {} over a basis of {n}",
                a.dim(),
                b.dim()
            ),
        ));
    }
    let mut acc = Q::zero();
    for (i, ai) in a.coeffs.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            let e = chow.form[i][j];
            if e != 0 && !bj.is_zero() {
                acc += ai * bj * rational::int(e);
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub class: DivisorClass,
}

/// A transverse meeting point of two distinct components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub name: String,
    pub components: (usize, usize),
}

impl IntersectionPoint {
    pub fn joins(&self, i: usize, j: usize) -> bool {
        self.components == (i, j) || self.components == (j, i)
    }
}

/// A divisor whose components are listed together with every point where two
/// of them meet. This is the input shape the Chern formulas consume; on the
/// base surface the points of a multiple point appear once per incident pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    chow: ChowModel,
    components: Vec<Component>,
    points: Vec<IntersectionPoint>,
}

impl Divisor {
    pub fn new(
        chow: ChowModel,
        components: Vec<Component>,
        points: Vec<IntersectionPoint>,
    ) -> Result<Self> {
        for c in &components {
            if c.class.dim() != chow.dim() {
                return Err(Error::invariant(
                    "basis-mismatch",
                    format!("component {} is not a class over the surface basis", c.name),
                ));
            }
            if !c.class.is_integral() {
                return Err(Error::invariant(
                    "integral-component-class",
                    format!("component {} has a non-integral class", c.name),
                ));
            }
        }
        let names: BTreeSet<&String> = components.iter().map(|c| &c.name).collect();
        if names.len() != components.len() {
            return Err(Error::invariant(
                "distinct-component-names",
                "component names must be distinct",
            ));
        }
        for p in &points {
            let (a, b) = p.components;
            if a >= components.len() || b >= components.len() {
                return Err(Error::invariant(
                    "declared-component",
                    format!("point {} refers to an undeclared component", p.name),
                ));
            }
            if a == b {
                return Err(Error::invariant(
                    "transverse-crossing",
                    format!("point {} joins a component to itself", p.name),
                ));
            }
        }
        let d = Divisor {
            chow,
            components,
            points,
        };
        d.check_crossing_counts()?;
        Ok(d)
    }

    fn check_crossing_counts(&self) -> Result<()> {
        let n = self.components.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let product = self.pair_components(i, j);
                let count = self.points.iter().filter(|p| p.joins(i, j)).count();
                if product != rational::int(count as i64) {
                    return Err(Error::invariant(
                        "crossing-count",
                        format!(
                            "{}·{} = {} but {} meeting point(s) are declared",
                            self.components[i].name,
                            self.components[j].name,
                            rational::render(&product),
                            count
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn chow(&self) -> &ChowModel {
        &self.chow
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn points(&self) -> &[IntersectionPoint] {
        &self.points
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    pub fn pair_components(&self, i: usize, j: usize) -> Q {
        pair(
            &self.components[i].class,
            &self.components[j].class,
            &self.chow,
        )
        .expect("component classes share the divisor basis")
    }

    pub fn self_intersection(&self, i: usize) -> Q {
        self.pair_components(i, i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplePoint {
    pub name: String,
    pub incident: Vec<usize>,
}

impl MultiplePoint {
    pub fn kappa(&self) -> usize {
        self.incident.len()
    }

    pub fn position_of(&self, component: usize) -> Option<usize> {
        self.incident.iter().position(|&c| c == component)
    }
}

/// The base surface `X̌` with its curve configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceScenario {
    chow: ChowModel,
    components: Vec<Component>,
    crossings: Vec<IntersectionPoint>,
    multiple_points: Vec<MultiplePoint>,
}

impl SurfaceScenario {
    pub fn new(
        chow: ChowModel,
        components: Vec<Component>,
        crossings: Vec<IntersectionPoint>,
        multiple_points: Vec<MultiplePoint>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in crossings
            .iter()
            .map(|p| &p.name)
            .chain(multiple_points.iter().map(|p| &p.name))
        {
            if !seen.insert(name.clone()) {
                return Err(Error::invariant(
                    "distinct-point-names",
                    format!("point name {name} is used more than once"),
                ));
            }
        }
        for mp in &multiple_points {
            if mp.incident.len() < 3 {
                return Err(Error::invariant(
                    "multiple-point-order",
                    format!(
                        "{} has {} incident components, at least 3 required",
                        mp.name,
                        mp.incident.len()
                    ),
                ));
            }
            let distinct: BTreeSet<usize> = mp.incident.iter().copied().collect();
            if distinct.len() != mp.incident.len() {
                return Err(Error::invariant(
                    "distinct-incident-components",
                    format!("{} lists a component twice", mp.name),
                ));
            }
            if mp.incident.iter().any(|&c| c >= components.len()) {
                return Err(Error::invariant(
                    "declared-component",
                    format!("{} refers to an undeclared component", mp.name),
                ));
            }
            if chow.index_of(&mp.name).is_some() {
                return Err(Error::invariant(
                    "distinct-basis-names",
                    format!("{} collides with a basis class name", mp.name),
                ));
            }
        }
        let s = SurfaceScenario {
            chow,
            components,
            crossings,
            multiple_points,
        };
        // validates classes, crossing references and intersection numbers
        s.pairwise_divisor()?;
        Ok(s)
    }

    pub fn chow(&self) -> &ChowModel {
        &self.chow
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn crossings(&self) -> &[IntersectionPoint] {
        &self.crossings
    }

    pub fn multiple_points(&self) -> &[MultiplePoint] {
        &self.multiple_points
    }

    /// The divisor on `X̌` in which each multiple point is listed once per
    /// unordered pair of incident components.
    pub fn pairwise_divisor(&self) -> Result<Divisor> {
        let mut points = self.crossings.clone();
        for mp in &self.multiple_points {
            for (x, &a) in mp.incident.iter().enumerate() {
                for &b in &mp.incident[x + 1..] {
                    points.push(IntersectionPoint {
                        name: mp.name.clone(),
                        components: (a, b),
                    });
                }
            }
        }
        Divisor::new(self.chow.clone(), self.components.clone(), points)
    }
}

/// The blow-up `X → X̌` at every multiple point.
///
/// Basis of `A¹(X)`: the base basis followed by one exceptional class per
/// multiple point. Components of the divisor on `X`: strict transforms in
/// base order, then the exceptional curves. Points: the base crossings, then
/// one point `D_i ∩ P_u` per incidence, grouped by multiple point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlownUp {
    base_dim: usize,
    divisor: Divisor,
    n_strict: usize,
    incidence_offsets: Vec<usize>,
}

pub fn blow_up(scenario: &SurfaceScenario) -> Result<BlownUp> {
    let base = scenario.chow();
    let base_dim = base.dim();
    let m = scenario.multiple_points().len();
    let dim = base_dim + m;

    let mut names = base.names().to_vec();
    names.extend(scenario.multiple_points().iter().map(|p| p.name.clone()));
    let mut form = vec![vec![0i64; dim]; dim];
    for (i, row) in form.iter_mut().enumerate().take(base_dim) {
        for (j, e) in row.iter_mut().enumerate().take(base_dim) {
            *e = base.entry(i, j);
        }
    }
    let mut exceptional = vec![false; dim];
    for u in 0..m {
        form[base_dim + u][base_dim + u] = -1;
        exceptional[base_dim + u] = true;
    }
    for (i, flag) in exceptional.iter_mut().enumerate().take(base_dim) {
        *flag = base.is_exceptional(i);
    }
    let chow = ChowModel::with_exceptional(names, form, exceptional)?;

    let exceptional_class = |u: usize| chow.basis_class(base_dim + u);
    let mut components = Vec::with_capacity(scenario.components().len() + m);
    for (i, c) in scenario.components().iter().enumerate() {
        let mut class = c.class.extended(dim);
        for (u, mp) in scenario.multiple_points().iter().enumerate() {
            if mp.incident.contains(&i) {
                class = &class - &exceptional_class(u);
            }
        }
        components.push(Component {
            name: c.name.clone(),
            class,
        });
    }
    let n_strict = components.len();
    for (u, mp) in scenario.multiple_points().iter().enumerate() {
        components.push(Component {
            name: mp.name.clone(),
            class: exceptional_class(u),
        });
    }

    let mut points = scenario.crossings().to_vec();
    let mut incidence_offsets = Vec::with_capacity(m);
    for (u, mp) in scenario.multiple_points().iter().enumerate() {
        incidence_offsets.push(points.len());
        for &i in &mp.incident {
            points.push(IntersectionPoint {
                name: format!("{}@{}", scenario.components()[i].name, mp.name),
                components: (i, n_strict + u),
            });
        }
    }

    let divisor = Divisor::new(chow, components, points)?;
    Ok(BlownUp {
        base_dim,
        divisor,
        n_strict,
        incidence_offsets,
    })
}

impl BlownUp {
    pub fn chow(&self) -> &ChowModel {
        self.divisor.chow()
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn strict_count(&self) -> usize {
        self.n_strict
    }

    pub fn exceptional_count(&self) -> usize {
        self.incidence_offsets.len()
    }

    pub fn pullback(&self, c: &DivisorClass) -> DivisorClass {
        c.extended(self.chow().dim())
    }

    pub fn strict_transform(&self, i: usize) -> &DivisorClass {
        &self.divisor.components()[i].class
    }

    pub fn exceptional_class(&self, u: usize) -> DivisorClass {
        self.chow().basis_class(self.base_dim + u)
    }

    /// Component index of the exceptional curve over multiple point `u`.
    pub fn exceptional_component(&self, u: usize) -> usize {
        self.n_strict + u
    }

    /// Point index of `D_i ∩ P_u` where `i` is the `pos`-th incident
    /// component of multiple point `u`.
    pub fn incidence_point(&self, u: usize, pos: usize) -> usize {
        self.incidence_offsets[u] + pos
    }

    /// Coefficient of `[P_u]` in a class on `X`.
    pub fn exceptional_coefficient<'a>(&self, c: &'a DivisorClass, u: usize) -> &'a Q {
        c.coeff(self.base_dim + u)
    }

    /// The base part of a class on `X` (coefficients of the pulled-back basis).
    pub fn base_part(&self, c: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coeffs: c.coeffs[..self.base_dim].to_vec(),
        }
    }
}
