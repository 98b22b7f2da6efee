//! Cubical sets with dyadic-rational vertices.
//!
//! The central objects are [`ElementaryCube`] (a product of degenerate points
//! and nondegenerate intervals inside some ambient `R^n`), [`LabeledCube`]
//! (an elementary cube together with an explicit parametrization of its
//! nondegenerate directions, possibly permuted, reversed, or degenerate), and
//! [`CubicalChain`] (a finite integer combination of labeled cubes).
//!
//! On top of the chain calculus the module provides:
//!
//! * [`CubicalChain::boundary`] — the cubical boundary operator, with the
//!   convention that the boundary of an interval is `top - bottom` and a
//!   product picks up the sign `(-1)^(dimension of the left factor)`;
//! * [`normalize_chain`] — collapse degenerate cubes to zero and rewrite
//!   every labeled cube as `±1` times its canonical relabeling;
//! * [`cut_chain`] — split a chain along an axis-aligned hyperplane into the
//!   upper part, the lower part, and the signed slice, satisfying
//!   `∂(c⁺) = (∂c)⁺ - c⁰` and `∂(c⁻) = (∂c)⁻ + c⁰`;
//! * [`crease_homotopy`] — an explicit prism operator `K` with
//!   `∂K(c) + K(∂c) = E(cut(c) - c)`, where `E` embeds a chain at the two
//!   ends of a collar direction; this exhibits a chain and its cut as
//!   homologous;
//! * [`subdivide_set`] / [`CubicalComplex::build`] — global hyperplane
//!   subdivision of cube sets and assembly of the free chain complex of a
//!   face-closed cube set.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::complex::GradedFreeComplex;
use crate::int::{bi, IntegerMatrix};
use crate::{Error, Result};

/// A dyadic rational `num / 2^exp`, kept in lowest terms (`num` odd, or
/// `num = 0` with `exp = 0`). Dyadic vertices are closed under midpoints, so
/// repeated hyperplane subdivision never leaves the coordinate ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    /// `num / 2^exp`, normalized to lowest terms.
    pub fn new(mut num: i64, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic { num: 0, exp: 0 };
        }
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        Dyadic { num, exp }
    }

    pub fn integer(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    pub fn zero() -> Self {
        Dyadic::integer(0)
    }

    pub fn one() -> Self {
        Dyadic::integer(1)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// The exponent of the (power of two) denominator.
    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// The midpoint `(a + b) / 2`, again a dyadic rational.
    pub fn midpoint(a: Dyadic, b: Dyadic) -> Dyadic {
        let exp = a.exp.max(b.exp);
        let an = (a.num as i128) << (exp - a.exp);
        let bn = (b.num as i128) << (exp - b.exp);
        let sum = an + bn;
        let mut num = sum;
        let mut e = exp + 1;
        while e > 0 && num % 2 == 0 {
            num /= 2;
            e -= 1;
        }
        Dyadic {
            num: i64::try_from(num).expect("dyadic midpoint overflow"),
            exp: e,
        }
    }
}

impl std::ops::Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let sum = ((self.num as i128) << (exp - self.exp)) + ((rhs.num as i128) << (exp - rhs.exp));
        Dyadic::new(i64::try_from(sum).expect("dyadic sum overflow"), exp)
    }
}

impl std::ops::Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + Dyadic::new(-rhs.num, rhs.exp)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let lhs = (self.num as i128) << (exp - self.exp);
        let rhs = (other.num as i128) << (exp - other.exp);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1i64 << self.exp)
        }
    }
}

/// One coordinate of an elementary cube: a degenerate point `{a}` or a
/// nondegenerate interval `[a, b]` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Point(Dyadic),
    Interval(Dyadic, Dyadic),
}

impl Component {
    pub fn is_interval(&self) -> bool {
        matches!(self, Component::Interval(_, _))
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Point(a) => write!(f, "{{{a}}}"),
            Component::Interval(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// An axis-aligned product of points and intervals in `R^n`. Its dimension
/// is the number of nondegenerate (interval) components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ElementaryCube {
    components: Vec<Component>,
}

impl ElementaryCube {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            if let Component::Interval(a, b) = c {
                if a >= b {
                    return Err(Error::InvalidCube(format!(
                        "component {i} is [{a},{b}] but intervals need strictly increasing endpoints"
                    )));
                }
            }
        }
        Ok(ElementaryCube { components })
    }

    /// A single point with the given integer coordinates.
    pub fn vertex(coords: &[i64]) -> Self {
        ElementaryCube {
            components: coords
                .iter()
                .map(|&c| Component::Point(Dyadic::integer(c)))
                .collect(),
        }
    }

    /// The unit cube `[0,1]^n`.
    pub fn unit(n: usize) -> Self {
        ElementaryCube {
            components: vec![Component::Interval(Dyadic::zero(), Dyadic::one()); n],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    /// The number of nondegenerate components.
    pub fn dim(&self) -> usize {
        self.components.iter().filter(|c| c.is_interval()).count()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Indices of the nondegenerate components, in increasing order.
    pub fn interval_axes(&self) -> Vec<usize> {
        self.components
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.is_interval().then_some(i))
            .collect()
    }

    fn with_component(&self, index: usize, component: Component) -> ElementaryCube {
        let mut components = self.components.clone();
        components[index] = component;
        ElementaryCube { components }
    }

    /// The product cube, with `other`'s coordinates appended after `self`'s.
    pub fn product(&self, other: &ElementaryCube) -> ElementaryCube {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        ElementaryCube { components }
    }

    /// All codimension-one faces (top and bottom in every nondegenerate
    /// direction).
    pub fn faces(&self) -> Vec<ElementaryCube> {
        let mut out = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            if let Component::Interval(a, b) = c {
                out.push(self.with_component(i, Component::Point(*b)));
                out.push(self.with_component(i, Component::Point(*a)));
            }
        }
        out
    }
}

impl fmt::Display for ElementaryCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// How one formal coordinate of a labeled cube maps into the carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoordMap {
    /// The formal coordinate runs along the carrier's `component`-th axis,
    /// bottom-to-top when `reversed` is false and top-to-bottom otherwise.
    To { component: usize, reversed: bool },
    /// The formal coordinate is collapsed: the parametrization does not
    /// depend on it, so the labeled cube is degenerate.
    Collapsed,
}

/// A parametrized elementary cube: a formal `k`-cube mapped onto a carrier,
/// with each non-collapsed formal coordinate running along one nondegenerate
/// carrier axis. The non-collapsed coordinates must hit every nondegenerate
/// axis exactly once, so degeneracy is recorded purely by `Collapsed` slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabeledCube {
    carrier: ElementaryCube,
    coords: Vec<CoordMap>,
}

impl LabeledCube {
    pub fn new(carrier: ElementaryCube, coords: Vec<CoordMap>) -> Result<Self> {
        let mut hit = BTreeSet::new();
        for (j, c) in coords.iter().enumerate() {
            if let CoordMap::To { component, .. } = c {
                match carrier.components.get(*component) {
                    Some(Component::Interval(_, _)) => {}
                    Some(Component::Point(_)) => {
                        return Err(Error::InvalidCube(format!(
                            "formal coordinate {j} targets degenerate component {component}"
                        )));
                    }
                    None => {
                        return Err(Error::InvalidCube(format!(
                            "formal coordinate {j} targets component {component} of a cube in R^{}",
                            carrier.ambient_dim()
                        )));
                    }
                }
                if !hit.insert(*component) {
                    return Err(Error::InvalidCube(format!(
                        "carrier component {component} is targeted twice"
                    )));
                }
            }
        }
        let expected: BTreeSet<usize> = carrier.interval_axes().into_iter().collect();
        if hit != expected {
            return Err(Error::InvalidCube(format!(
                "formal coordinates cover carrier components {hit:?} but the nondegenerate components are {expected:?}"
            )));
        }
        Ok(LabeledCube { carrier, coords })
    }

    /// The canonical labeling: formal coordinates in carrier-axis order, none
    /// reversed, none collapsed.
    pub fn canonical(carrier: ElementaryCube) -> Self {
        let coords = carrier
            .interval_axes()
            .into_iter()
            .map(|component| CoordMap::To {
                component,
                reversed: false,
            })
            .collect();
        LabeledCube { carrier, coords }
    }

    pub fn carrier(&self) -> &ElementaryCube {
        &self.carrier
    }

    pub fn coords(&self) -> &[CoordMap] {
        &self.coords
    }

    /// The formal dimension (number of formal coordinates, collapsed ones
    /// included).
    pub fn formal_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.carrier.ambient_dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.coords.iter().any(|c| matches!(c, CoordMap::Collapsed))
    }

    /// The face obtained by freezing formal coordinate `j` at `1` (`top`) or
    /// `0`. A collapsed coordinate is simply dropped.
    fn face(&self, j: usize, top: bool) -> LabeledCube {
        let mut coords = self.coords.clone();
        let map = coords.remove(j);
        match map {
            CoordMap::Collapsed => LabeledCube {
                carrier: self.carrier.clone(),
                coords,
            },
            CoordMap::To {
                component,
                reversed,
            } => {
                let (a, b) = match self.carrier.components[component] {
                    Component::Interval(a, b) => (a, b),
                    Component::Point(_) => unreachable!("validated at construction"),
                };
                let value = if top != reversed { b } else { a };
                LabeledCube {
                    carrier: self.carrier.with_component(component, Component::Point(value)),
                    coords,
                }
            }
        }
    }

    /// The product parametrization: `other`'s carrier axes and formal
    /// coordinates are appended after `self`'s.
    pub fn product(&self, other: &LabeledCube) -> LabeledCube {
        let shift = self.carrier.ambient_dim();
        let carrier = self.carrier.product(&other.carrier);
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().map(|c| match c {
            CoordMap::Collapsed => CoordMap::Collapsed,
            CoordMap::To {
                component,
                reversed,
            } => CoordMap::To {
                component: component + shift,
                reversed: *reversed,
            },
        }));
        LabeledCube { carrier, coords }
    }

    /// The sign and canonical relabeling, or `None` for a degenerate cube.
    /// The sign is the parity of the permutation sorting the formal
    /// coordinates into carrier-axis order, times `(-1)` for each reversed
    /// coordinate.
    pub fn normal_form(&self) -> Option<(i64, LabeledCube)> {
        let mut targets = Vec::with_capacity(self.coords.len());
        let mut sign = 1i64;
        for c in &self.coords {
            match c {
                CoordMap::Collapsed => return None,
                CoordMap::To {
                    component,
                    reversed,
                } => {
                    targets.push(*component);
                    if *reversed {
                        sign = -sign;
                    }
                }
            }
        }
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                if targets[i] > targets[j] {
                    sign = -sign;
                }
            }
        }
        Some((sign, LabeledCube::canonical(self.carrier.clone())))
    }

    /// The boundary as a chain of labeled cubes: the alternating sum of top
    /// minus bottom faces, `∂σ = Σ_j (-1)^j (σ|_{j,top} - σ|_{j,bottom})`.
    pub fn boundary(&self) -> CubicalChain {
        let mut out = CubicalChain::zero();
        let mut sign = 1i64;
        for j in 0..self.coords.len() {
            out.add_term(self.face(j, true), sign);
            out.add_term(self.face(j, false), -sign);
            sign = -sign;
        }
        out
    }
}

impl fmt::Display for LabeledCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.carrier)?;
        if self.coords.is_empty() {
            return Ok(());
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| match c {
                CoordMap::Collapsed => "*".to_string(),
                CoordMap::To {
                    component,
                    reversed: false,
                } => component.to_string(),
                CoordMap::To {
                    component,
                    reversed: true,
                } => format!("{component}'"),
            })
            .collect();
        write!(f, "<{}>", parts.join(","))
    }
}

/// A finite integer combination of labeled cubes. Zero coefficients are
/// never stored, so `==` is equality of raw (unnormalized) chains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CubicalChain {
    terms: BTreeMap<LabeledCube, i64>,
}

impl CubicalChain {
    pub fn zero() -> Self {
        CubicalChain::default()
    }

    pub fn from_cube(cube: LabeledCube) -> Self {
        let mut c = CubicalChain::zero();
        c.add_term(cube, 1);
        c
    }

    pub fn add_term(&mut self, cube: LabeledCube, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(cube).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .expect("zero entry just created");
            self.terms.remove(&key);
        }
    }

    pub fn add_chain(&mut self, other: &CubicalChain, scale: i64) {
        for (cube, coeff) in &other.terms {
            self.add_term(cube.clone(), coeff * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LabeledCube, i64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn scaled(&self, scale: i64) -> CubicalChain {
        let mut out = CubicalChain::zero();
        out.add_chain(self, scale);
        out
    }

    /// The cubical boundary, extended linearly from [`LabeledCube::boundary`].
    pub fn boundary(&self) -> CubicalChain {
        let mut out = CubicalChain::zero();
        for (cube, coeff) in &self.terms {
            out.add_chain(&cube.boundary(), *coeff);
        }
        out
    }

    /// The chain-level product, `(Σ aσ)(Σ bτ) = Σ ab (σ × τ)`. All signs of
    /// the product calculus live in the boundary operator, not here.
    pub fn product(&self, other: &CubicalChain) -> CubicalChain {
        let mut out = CubicalChain::zero();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                out.add_term(s.product(t), a * b);
            }
        }
        out
    }

    /// The ambient dimension shared by every cube in the chain (`None` when
    /// the chain is zero). Mixed ambient dimensions are an error.
    pub fn ambient_dim(&self) -> Result<Option<usize>> {
        let mut dims = self.terms.keys().map(|c| c.ambient_dim());
        let first = match dims.next() {
            None => return Ok(None),
            Some(d) => d,
        };
        if dims.any(|d| d != first) {
            return Err(Error::Shape(
                "chain mixes cubes of different ambient dimensions".into(),
            ));
        }
        Ok(Some(first))
    }
}

impl std::ops::Add for CubicalChain {
    type Output = CubicalChain;
    fn add(mut self, rhs: CubicalChain) -> CubicalChain {
        self.add_chain(&rhs, 1);
        self
    }
}

impl std::ops::Sub for CubicalChain {
    type Output = CubicalChain;
    fn sub(mut self, rhs: CubicalChain) -> CubicalChain {
        self.add_chain(&rhs, -1);
        self
    }
}

impl std::ops::Neg for CubicalChain {
    type Output = CubicalChain;
    fn neg(self) -> CubicalChain {
        self.scaled(-1)
    }
}

impl fmt::Display for CubicalChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (cube, coeff) in &self.terms {
            if first {
                if *coeff < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *coeff < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = coeff.abs();
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "{cube}")?;
        }
        Ok(())
    }
}

/// Rewrite a chain in canonical form: degenerate cubes are dropped, and every
/// labeled cube is replaced by `sign · (canonical relabeling)`. Normalization
/// is linear and idempotent, and commutes with the boundary.
pub fn normalize_chain(chain: &CubicalChain) -> CubicalChain {
    let mut out = CubicalChain::zero();
    for (cube, coeff) in chain.terms() {
        if let Some((sign, canon)) = cube.normal_form() {
            out.add_term(canon, sign * coeff);
        }
    }
    out
}

/// The three pieces of a hyperplane cut: the part on or above the level, the
/// part on or below it, and the signed slice at the level.
#[derive(Clone, Debug)]
pub struct CutResult {
    pub plus: CubicalChain,
    pub minus: CubicalChain,
    pub slice: CubicalChain,
}

impl CutResult {
    /// `plus + minus`: the chain with every straddling cube subdivided at
    /// the cut level. This is the "cut" that the crease homotopy compares
    /// against the original chain.
    pub fn subdivision(&self) -> CubicalChain {
        self.plus.clone() + self.minus.clone()
    }
}

fn non_generic(axis: usize, level: Dyadic, reason: &str) -> Error {
    Error::NonGenericCut {
        axis,
        level: level.to_string(),
        reason: reason.to_string(),
    }
}

/// Cut a chain along the hyperplane `x_axis = level`.
///
/// The cut is *generic* when the level avoids every vertex of the chain on
/// that axis: each cube's `axis` component must be a point different from
/// the level or an interval whose endpoints differ from it. Non-generic cuts
/// are rejected.
///
/// For a straddling cube the upper/lower parts keep the cube's labeling on
/// the shrunken carrier and the slice drops the formal coordinate running
/// along the cut axis, with sign `(-1)^j · dir`, where `j` is that formal
/// coordinate's position and `dir` is `+1` forward / `-1` reversed. With
/// this sign the pieces satisfy, exactly and term-by-term,
///
/// ```text
/// ∂(c⁺) = (∂c)⁺ - c⁰        ∂(c⁻) = (∂c)⁻ + c⁰
/// ```
pub fn cut_chain(chain: &CubicalChain, axis: usize, level: Dyadic) -> Result<CutResult> {
    let mut plus = CubicalChain::zero();
    let mut minus = CubicalChain::zero();
    let mut slice = CubicalChain::zero();
    for (cube, coeff) in chain.terms() {
        if axis >= cube.ambient_dim() {
            return Err(Error::Shape(format!(
                "cut axis {axis} out of range for a cube in R^{}",
                cube.ambient_dim()
            )));
        }
        match cube.carrier().components()[axis] {
            Component::Point(a) => {
                if a == level {
                    return Err(non_generic(
                        axis,
                        level,
                        "level passes through a degenerate coordinate",
                    ));
                }
                if a > level {
                    plus.add_term(cube.clone(), coeff);
                } else {
                    minus.add_term(cube.clone(), coeff);
                }
            }
            Component::Interval(a, b) => {
                if a == level || b == level {
                    return Err(non_generic(axis, level, "level passes through an endpoint"));
                }
                if a > level {
                    plus.add_term(cube.clone(), coeff);
                } else if b < level {
                    minus.add_term(cube.clone(), coeff);
                } else {
                    let upper = LabeledCube {
                        carrier: cube
                            .carrier()
                            .with_component(axis, Component::Interval(level, b)),
                        coords: cube.coords().to_vec(),
                    };
                    let lower = LabeledCube {
                        carrier: cube
                            .carrier()
                            .with_component(axis, Component::Interval(a, level)),
                        coords: cube.coords().to_vec(),
                    };
                    plus.add_term(upper, coeff);
                    minus.add_term(lower, coeff);

                    let (j, reversed) = cube
                        .coords()
                        .iter()
                        .enumerate()
                        .find_map(|(j, c)| match c {
                            CoordMap::To {
                                component,
                                reversed,
                            } if *component == axis => Some((j, *reversed)),
                            _ => None,
                        })
                        .expect("straddling axis is nondegenerate, so some coordinate targets it");
                    let mut coords = cube.coords().to_vec();
                    coords.remove(j);
                    let mid = LabeledCube {
                        carrier: cube
                            .carrier()
                            .with_component(axis, Component::Point(level)),
                        coords,
                    };
                    let dir = if reversed { -1 } else { 1 };
                    let sign = if j % 2 == 0 { dir } else { -dir };
                    slice.add_term(mid, coeff * sign);
                }
            }
        }
    }
    Ok(CutResult { plus, minus, slice })
}

/// Embed a chain in one higher ambient dimension by pinning a new last
/// coordinate at `height`. Formal coordinates are untouched, so this is a
/// chain map.
pub fn embed_at(chain: &CubicalChain, height: Dyadic) -> Result<CubicalChain> {
    chain.ambient_dim()?;
    let mut out = CubicalChain::zero();
    for (cube, coeff) in chain.terms() {
        let mut components = cube.carrier().components().to_vec();
        components.push(Component::Point(height));
        out.add_term(
            LabeledCube {
                carrier: ElementaryCube { components },
                coords: cube.coords().to_vec(),
            },
            coeff,
        );
    }
    Ok(out)
}

/// The collar-difference embedding `E = ι₁ - ι₀`: the chain at height `1`
/// minus the chain at height `0` of a new last axis.
pub fn collar_difference(chain: &CubicalChain) -> Result<CubicalChain> {
    Ok(embed_at(chain, Dyadic::one())? - embed_at(chain, Dyadic::zero())?)
}

/// The prism over one cube: `(-1)^(k+1) (σ - σ⁺ - σ⁻) × [0,1]`, zero when
/// the cut does not straddle `σ` and zero on points.
fn kappa_cube(cube: &LabeledCube, coeff: i64, axis: usize, level: Dyadic) -> Result<CubicalChain> {
    let k = cube.formal_dim();
    if k == 0 {
        return Ok(CubicalChain::zero());
    }
    let single = CubicalChain::from_cube(cube.clone()).scaled(coeff);
    let cut = cut_chain(&single, axis, level)?;
    let difference = single - cut.subdivision();
    if difference.is_zero() {
        return Ok(CubicalChain::zero());
    }
    let collar = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(1)));
    let sign = if k % 2 == 0 { -1 } else { 1 };
    Ok(difference.product(&collar).scaled(sign))
}

fn kappa_chain(chain: &CubicalChain, axis: usize, level: Dyadic) -> Result<CubicalChain> {
    chain.ambient_dim()?;
    let mut out = CubicalChain::zero();
    for (cube, coeff) in chain.terms() {
        out.add_chain(&kappa_cube(cube, coeff, axis, level)?, 1);
    }
    Ok(out)
}

/// The crease homotopy `K` for the cut along `x_axis = level`.
///
/// `K(c)` lives in one higher ambient dimension (a collar `[0,1]` appended
/// as the new last axis) and satisfies, exactly and term-by-term,
///
/// ```text
/// ∂K(c) + K(∂c) = E(cut(c) - c)
/// ```
///
/// where `cut(c)` is the subdivision `c⁺ + c⁻` and `E = ι₁ - ι₀` embeds a
/// chain at the two ends of the collar. So a chain and its cut become
/// homologous once pushed into the collar, and in particular `[E(cut z)] =
/// [E(z)]` for every cycle `z`.
///
/// The homotopy is only defined in positive dimensions: chains containing a
/// formal 0-cube are rejected. (A generic cut fixes 0-chains, so `K` extends
/// by zero there; [`crease_residual`] uses that extension to state the
/// identity for chains of mixed dimension.)
pub fn crease_homotopy(chain: &CubicalChain, axis: usize, level: Dyadic) -> Result<CubicalChain> {
    if chain.terms().any(|(cube, _)| cube.formal_dim() == 0) {
        return Err(Error::CreaseDimensionZero);
    }
    kappa_chain(chain, axis, level)
}

/// The residual `∂K(c) + K(∂c) - E(cut(c) - c)` of the crease identity,
/// computed with `K` extended by zero on 0-chains. It vanishes identically
/// (term-by-term, before normalization) for every generic cut.
pub fn crease_residual(chain: &CubicalChain, axis: usize, level: Dyadic) -> Result<CubicalChain> {
    let k_c = kappa_chain(chain, axis, level)?;
    let k_dc = kappa_chain(&chain.boundary(), axis, level)?;
    let cut = cut_chain(chain, axis, level)?;
    let rhs = collar_difference(&(cut.subdivision() - chain.clone()))?;
    Ok(k_c.boundary() + k_dc - rhs)
}

/// Globally subdivide a set of elementary cubes along `x_axis = level`:
/// every cube whose `axis` component strictly straddles the level is replaced
/// by its two halves, all other cubes are kept. The union of the cubes — and
/// hence the homology of the face closure — is unchanged.
pub fn subdivide_set(
    cubes: &BTreeSet<ElementaryCube>,
    axis: usize,
    level: Dyadic,
) -> Result<BTreeSet<ElementaryCube>> {
    let mut out = BTreeSet::new();
    for cube in cubes {
        if axis >= cube.ambient_dim() {
            return Err(Error::Shape(format!(
                "subdivision axis {axis} out of range for a cube in R^{}",
                cube.ambient_dim()
            )));
        }
        match cube.components()[axis] {
            Component::Interval(a, b) if a < level && level < b => {
                out.insert(cube.with_component(axis, Component::Interval(a, level)));
                out.insert(cube.with_component(axis, Component::Interval(level, b)));
            }
            _ => {
                out.insert(cube.clone());
            }
        }
    }
    Ok(out)
}

/// The free chain complex of a finite cubical set, with one generator per
/// elementary cube (canonically labeled) and the cubical boundary as
/// differential.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    cubes: Vec<Vec<ElementaryCube>>,
    index: BTreeMap<ElementaryCube, (usize, usize)>,
    complex: GradedFreeComplex,
}

impl CubicalComplex {
    /// Close the generating cubes under faces and assemble the chain complex.
    /// All generators must share one ambient dimension.
    pub fn build(generators: &[ElementaryCube]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidComplex(
                "a cubical set needs at least one cube".into(),
            ));
        }
        let ambient = generators[0].ambient_dim();
        if generators.iter().any(|c| c.ambient_dim() != ambient) {
            return Err(Error::Shape(
                "cubical set mixes cubes of different ambient dimensions".into(),
            ));
        }

        let mut closed: BTreeSet<ElementaryCube> = BTreeSet::new();
        let mut stack: Vec<ElementaryCube> = generators.to_vec();
        while let Some(cube) = stack.pop() {
            if closed.insert(cube.clone()) {
                stack.extend(cube.faces());
            }
        }

        let max_dim = closed.iter().map(|c| c.dim()).max().unwrap_or(0);
        let mut cubes: Vec<Vec<ElementaryCube>> = vec![Vec::new(); max_dim + 1];
        for cube in closed {
            cubes[cube.dim()].push(cube);
        }
        let mut index = BTreeMap::new();
        for (d, level) in cubes.iter().enumerate() {
            for (i, cube) in level.iter().enumerate() {
                index.insert(cube.clone(), (d, i));
            }
        }

        let ranks: Vec<usize> = cubes.iter().map(|level| level.len()).collect();
        let labels: Vec<Vec<String>> = cubes
            .iter()
            .map(|level| level.iter().map(|c| c.to_string()).collect())
            .collect();

        let mut diffs = Vec::new();
        for d in 1..=max_dim {
            let mut m = IntegerMatrix::zeros(ranks[d - 1], ranks[d]);
            for (col, cube) in cubes[d].iter().enumerate() {
                for (cell, coeff) in
                    LabeledCube::canonical(cube.clone()).boundary().terms()
                {
                    let (fd, row) = index[cell.carrier()];
                    debug_assert_eq!(fd, d - 1);
                    m.set(row, col, bi(coeff));
                }
            }
            diffs.push(m);
        }

        let complex = GradedFreeComplex::with_labels(0, ranks, labels, diffs)?;
        complex.verify()?;
        Ok(CubicalComplex {
            cubes,
            index,
            complex,
        })
    }

    pub fn complex(&self) -> &GradedFreeComplex {
        &self.complex
    }

    /// The cubes of dimension `d`, in generator order.
    pub fn cubes_of_dim(&self, d: usize) -> &[ElementaryCube] {
        self.cubes.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The coordinates of a pure-dimensional chain in the generator basis of
    /// its dimension. The chain is normalized first, so any labeling of the
    /// underlying cubes is accepted.
    pub fn chain_vector(&self, chain: &CubicalChain) -> Result<(i64, Vec<BigInt>)> {
        let normalized = normalize_chain(chain);
        let mut degree: Option<usize> = None;
        for (cube, _) in normalized.terms() {
            let d = cube.formal_dim();
            match degree {
                None => degree = Some(d),
                Some(existing) if existing != d => {
                    return Err(Error::Shape(format!(
                        "chain mixes dimensions {existing} and {d}"
                    )));
                }
                _ => {}
            }
        }
        let degree = degree.ok_or_else(|| {
            Error::Shape("the zero chain has no dimension to express".into())
        })?;
        let mut vector = vec![BigInt::from(0); self.cubes[degree].len()];
        for (cube, coeff) in normalized.terms() {
            let (d, i) = *self.index.get(cube.carrier()).ok_or_else(|| {
                Error::InvalidCube(format!("cube {} is not in the complex", cube.carrier()))
            })?;
            debug_assert_eq!(d, degree);
            vector[i] = bi(coeff);
        }
        Ok((degree as i64, vector))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{homology, present_homology, Coefficients};
    use crate::random::{
        generic_cut_level, random_cubical_chain, random_elementary_cube, random_labeled_cube,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dy(num: i64, exp: u32) -> Dyadic {
        Dyadic::new(num, exp)
    }

    fn interval(a: i64, b: i64) -> Component {
        Component::Interval(Dyadic::integer(a), Dyadic::integer(b))
    }

    fn point(a: i64) -> Component {
        Component::Point(Dyadic::integer(a))
    }

    /// The four edges of the boundary of `[0,1]^2`.
    fn square_perimeter_edges() -> Vec<ElementaryCube> {
        vec![
            ElementaryCube::new(vec![interval(0, 1), point(0)]).unwrap(),
            ElementaryCube::new(vec![interval(0, 1), point(1)]).unwrap(),
            ElementaryCube::new(vec![point(0), interval(0, 1)]).unwrap(),
            ElementaryCube::new(vec![point(1), interval(0, 1)]).unwrap(),
        ]
    }

    #[test]
    fn dyadic_arithmetic_and_order() {
        assert_eq!(dy(4, 2), Dyadic::integer(1));
        assert_eq!(dy(6, 1), Dyadic::integer(3));
        assert_eq!(dy(0, 5), Dyadic::zero());
        assert!(dy(1, 1) < Dyadic::one());
        assert!(dy(3, 2) > dy(1, 1)); // 3/4 > 1/2
        assert!(dy(-1, 1) < Dyadic::zero());
        assert_eq!(
            Dyadic::midpoint(Dyadic::zero(), Dyadic::one()),
            dy(1, 1)
        );
        assert_eq!(Dyadic::midpoint(dy(1, 1), Dyadic::one()), dy(3, 2));
        assert_eq!(dy(3, 2).to_string(), "3/4");
        assert_eq!(Dyadic::integer(-2).to_string(), "-2");
    }

    #[test]
    fn labeled_cube_validation() {
        let carrier = ElementaryCube::new(vec![interval(0, 1), point(2)]).unwrap();
        // Targeting a degenerate component is rejected.
        assert!(LabeledCube::new(
            carrier.clone(),
            vec![CoordMap::To { component: 1, reversed: false }],
        )
        .is_err());
        // Missing a nondegenerate component is rejected.
        assert!(LabeledCube::new(carrier.clone(), vec![CoordMap::Collapsed]).is_err());
        // Hitting one component twice is rejected.
        let square = ElementaryCube::unit(2);
        assert!(LabeledCube::new(
            square,
            vec![
                CoordMap::To { component: 0, reversed: false },
                CoordMap::To { component: 0, reversed: false },
            ],
        )
        .is_err());
        // Intervals need increasing endpoints.
        assert!(ElementaryCube::new(vec![Component::Interval(
            Dyadic::one(),
            Dyadic::zero()
        )])
        .is_err());

        let ok = LabeledCube::new(
            carrier,
            vec![
                CoordMap::Collapsed,
                CoordMap::To { component: 0, reversed: true },
            ],
        )
        .unwrap();
        assert_eq!(ok.formal_dim(), 2);
        assert!(ok.is_degenerate());
    }

    #[test]
    fn boundary_of_interval_is_top_minus_bottom() {
        let sigma = LabeledCube::canonical(ElementaryCube::unit(1));
        let boundary = sigma.boundary();
        let top = LabeledCube::canonical(ElementaryCube::vertex(&[1]));
        let bottom = LabeledCube::canonical(ElementaryCube::vertex(&[0]));
        let mut expected = CubicalChain::zero();
        expected.add_term(top, 1);
        expected.add_term(bottom, -1);
        assert_eq!(boundary, expected);
    }

    #[test]
    fn product_boundary_follows_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let s = random_labeled_cube(&mut rng, 2, 2, false);
            let t = random_labeled_cube(&mut rng, 2, 2, false);
            let cs = CubicalChain::from_cube(s.clone());
            let ct = CubicalChain::from_cube(t.clone());
            let product = cs.product(&ct);
            let sign = if s.formal_dim() % 2 == 0 { 1 } else { -1 };
            let expected = cs.boundary().product(&ct) + cs.product(&ct.boundary()).scaled(sign);
            assert_eq!(product.boundary(), expected);
        }
    }

    #[test]
    fn normalization_signs() {
        let cube = ElementaryCube::unit(3);
        let canonical = LabeledCube::canonical(cube.clone());
        let fwd = |component| CoordMap::To { component, reversed: false };

        // A 3-cycle of the axes is even: the two labelings add up.
        let cycled = LabeledCube::new(cube.clone(), vec![fwd(1), fwd(2), fwd(0)]).unwrap();
        let mut chain = CubicalChain::from_cube(cycled);
        chain.add_term(canonical.clone(), 1);
        let mut doubled = CubicalChain::zero();
        doubled.add_term(canonical.clone(), 2);
        assert_eq!(normalize_chain(&chain), doubled);

        // A transposition is odd: the two labelings cancel.
        let swapped = LabeledCube::new(cube.clone(), vec![fwd(1), fwd(0), fwd(2)]).unwrap();
        let mut chain = CubicalChain::from_cube(swapped);
        chain.add_term(canonical.clone(), 1);
        assert!(normalize_chain(&chain).is_zero());

        // One reversed coordinate also flips the sign.
        let reversed = LabeledCube::new(
            cube.clone(),
            vec![
                CoordMap::To { component: 0, reversed: true },
                fwd(1),
                fwd(2),
            ],
        )
        .unwrap();
        let mut chain = CubicalChain::from_cube(reversed);
        chain.add_term(canonical, 1);
        assert!(normalize_chain(&chain).is_zero());

        // Degenerate cubes normalize to zero.
        let line = ElementaryCube::unit(1);
        let degenerate = LabeledCube::new(
            line,
            vec![CoordMap::Collapsed, fwd(0)],
        )
        .unwrap();
        assert!(normalize_chain(&CubicalChain::from_cube(degenerate)).is_zero());
    }

    #[test]
    fn normalization_is_idempotent_and_commutes_with_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let chain = random_cubical_chain(&mut rng, 3, 3, 4, true);
            let once = normalize_chain(&chain);
            assert_eq!(normalize_chain(&once), once);
            assert_eq!(
                normalize_chain(&chain.boundary()),
                normalize_chain(&once.boundary())
            );
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let chain = random_cubical_chain(&mut rng, 4, 4, 5, true);
            assert!(chain.boundary().boundary().is_zero());
            assert!(normalize_chain(&normalize_chain(&chain).boundary().boundary()).is_zero());
        }
    }

    #[test]
    fn unit_interval_cut_in_halves() {
        let sigma = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(1)));
        let half = dy(1, 1);
        let cut = cut_chain(&sigma, 0, half).unwrap();

        let upper = ElementaryCube::new(vec![Component::Interval(half, Dyadic::one())]).unwrap();
        let lower = ElementaryCube::new(vec![Component::Interval(Dyadic::zero(), half)]).unwrap();
        let mid = ElementaryCube::new(vec![Component::Point(half)]).unwrap();
        assert_eq!(cut.plus, CubicalChain::from_cube(LabeledCube::canonical(upper)));
        assert_eq!(cut.minus, CubicalChain::from_cube(LabeledCube::canonical(lower)));
        assert_eq!(cut.slice, CubicalChain::from_cube(LabeledCube::canonical(mid.clone())));

        // ∂(c⁺) = {1} - {1/2} = (∂c)⁺ - c⁰.
        let boundary_plus = cut.plus.boundary();
        let mut expected = CubicalChain::zero();
        expected.add_term(LabeledCube::canonical(ElementaryCube::vertex(&[1])), 1);
        expected.add_term(LabeledCube::canonical(mid), -1);
        assert_eq!(boundary_plus, expected);
    }

    #[test]
    fn cut_rejects_non_generic_levels_and_bad_axes() {
        let sigma = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(1)));
        match cut_chain(&sigma, 0, Dyadic::one()) {
            Err(Error::NonGenericCut { axis: 0, .. }) => {}
            other => panic!("expected a non-generic cut error, got {other:?}"),
        }
        let vertex = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::vertex(&[2])));
        assert!(matches!(
            cut_chain(&vertex, 0, Dyadic::integer(2)),
            Err(Error::NonGenericCut { .. })
        ));
        assert!(matches!(
            cut_chain(&sigma, 3, dy(1, 1)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn cut_identities_hold_term_by_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let chain = random_cubical_chain(&mut rng, 3, 3, 4, true);
            if chain.is_zero() {
                continue;
            }
            let axis = rng.gen_range(0..3);
            let level = generic_cut_level(&mut rng, &chain, axis);
            let cut = cut_chain(&chain, axis, level).unwrap();
            let boundary_cut = cut_chain(&chain.boundary(), axis, level).unwrap();

            // ∂(c⁺) = (∂c)⁺ - c⁰ and ∂(c⁻) = (∂c)⁻ + c⁰, as raw chains.
            assert_eq!(cut.plus.boundary(), boundary_cut.plus.clone() - cut.slice.clone());
            assert_eq!(cut.minus.boundary(), boundary_cut.minus.clone() + cut.slice.clone());
            // Consequences: cutting commutes with ∂ on subdivisions, and the
            // slice of a boundary is minus the boundary of the slice.
            assert_eq!(cut.subdivision().boundary(), boundary_cut.subdivision());
            assert_eq!(cut.slice.boundary(), -boundary_cut.slice);
        }
    }

    #[test]
    fn crease_identity_on_a_creased_square() {
        // Cut the unit square through x = 1/2 and check
        // ∂K(c) + K(∂c) = E(cut(c) - c) with every term written out.
        let square = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(2)));
        let level = dy(1, 1);
        let k = crease_homotopy(&square, 0, level).unwrap();
        assert!(!k.is_zero());
        let cut = cut_chain(&square, 0, level).unwrap();
        let k_boundary = crease_homotopy(&square.boundary(), 0, level).unwrap();
        let rhs = collar_difference(&(cut.subdivision() - square)).unwrap();
        assert_eq!(k.boundary() + k_boundary, rhs);
        assert!(crease_residual(
            &CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(2))),
            0,
            level
        )
        .unwrap()
        .is_zero());
    }

    #[test]
    fn crease_identity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..30 {
            let chain = random_cubical_chain(&mut rng, 3, 3, 4, true);
            if chain.is_zero() {
                continue;
            }
            let axis = rng.gen_range(0..3);
            let level = generic_cut_level(&mut rng, &chain, axis);
            let residual = crease_residual(&chain, axis, level).unwrap();
            assert!(residual.is_zero(), "residual {residual} for cut at {level}");
        }
    }

    #[test]
    fn crease_rejects_points_and_degree_one_needs_no_homotopy_downstairs() {
        let vertex = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::vertex(&[0])));
        assert!(matches!(
            crease_homotopy(&vertex, 0, dy(1, 1)),
            Err(Error::CreaseDimensionZero)
        ));

        // For a 1-chain, K(∂c) = 0, so ∂K(c) alone reaches E(cut(c) - c).
        let edge = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::unit(1)));
        let level = dy(1, 1);
        let k = crease_homotopy(&edge, 0, level).unwrap();
        let cut = cut_chain(&edge, 0, level).unwrap();
        let rhs = collar_difference(&(cut.subdivision() - edge)).unwrap();
        assert_eq!(k.boundary(), rhs);
    }

    #[test]
    fn creased_cycle_classes_agree_in_homology() {
        // z = ∂(unit square) is a 1-cycle; after the collar embedding, the
        // cut cycle and the original cycle are the same homology class.
        let square = LabeledCube::canonical(ElementaryCube::unit(2));
        let z = CubicalChain::from_cube(square).boundary();
        let level = dy(1, 1);
        let axis = 0;

        let k = crease_homotopy(&z, axis, level).unwrap();
        let cut = cut_chain(&z, axis, level).unwrap();
        let e_z = collar_difference(&z).unwrap();
        let e_cut = collar_difference(&cut.subdivision()).unwrap();

        let mut generators: Vec<ElementaryCube> = Vec::new();
        for chain in [&k, &e_z, &e_cut] {
            for (cube, _) in chain.terms() {
                generators.push(cube.carrier().clone());
            }
        }
        let complex = CubicalComplex::build(&generators).unwrap();
        let difference = e_cut - e_z;
        let (degree, vector) = complex.chain_vector(&difference).unwrap();
        assert_eq!(degree, 1);
        let presentation = present_homology(complex.complex(), 1).unwrap();
        let class = presentation.class_of(&vector).unwrap();
        assert!(class.is_zero(), "creased cycle moved homology class: {class}");
    }

    #[test]
    fn complex_of_a_vertex_and_of_squares() {
        let vertex = CubicalComplex::build(&[ElementaryCube::vertex(&[3])]).unwrap();
        let h = homology(vertex.complex(), Coefficients::Integers).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].to_string(), "Z");

        // The perimeter of a square is a circle: betti (1, 1).
        let perimeter = CubicalComplex::build(&square_perimeter_edges()).unwrap();
        let h = homology(perimeter.complex(), Coefficients::Integers).unwrap();
        assert_eq!(h[0].to_string(), "Z");
        assert_eq!(h[1].to_string(), "Z");

        // The solid square is contractible: betti (1, 0, 0).
        let solid = CubicalComplex::build(&[ElementaryCube::unit(2)]).unwrap();
        let h = homology(solid.complex(), Coefficients::Integers).unwrap();
        assert_eq!(h[0].to_string(), "Z");
        assert!(h[1].is_trivial());
        assert!(h[2].is_trivial());
    }

    #[test]
    fn generator_boundary_matches_the_assembled_differential() {
        let complex = CubicalComplex::build(&[ElementaryCube::unit(2)]).unwrap();
        for d in 1..=2usize {
            for (i, cube) in complex.cubes_of_dim(d).iter().enumerate() {
                let chain = CubicalChain::from_cube(LabeledCube::canonical(cube.clone()));
                let (_, vector) = complex.chain_vector(&chain.boundary()).unwrap();
                let matrix = complex.complex().differential(d as i64);
                for (row, value) in vector.iter().enumerate() {
                    assert_eq!(matrix.at(row, i), value);
                }
            }
        }
    }

    #[test]
    fn torus_from_a_product_of_perimeters() {
        // The product of two square perimeters in R^4 is a torus:
        // homology (Z, Z^2, Z).
        let edges = square_perimeter_edges();
        let mut generators = Vec::new();
        for a in &edges {
            for b in &edges {
                generators.push(a.product(b));
            }
        }
        let torus = CubicalComplex::build(&generators).unwrap();
        let h = homology(torus.complex(), Coefficients::Integers).unwrap();
        assert_eq!(h[0].to_string(), "Z");
        assert_eq!(h[1].to_string(), "Z^2");
        assert_eq!(h[2].to_string(), "Z");
    }

    #[test]
    fn subdivision_preserves_homology() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        // The perimeter, subdivided through a generic level.
        let perimeter: BTreeSet<ElementaryCube> =
            square_perimeter_edges().into_iter().collect();
        let subdivided = subdivide_set(&perimeter, 0, dy(1, 2)).unwrap();
        assert_eq!(subdivided.len(), 6);
        let before = CubicalComplex::build(&perimeter.iter().cloned().collect::<Vec<_>>()).unwrap();
        let after = CubicalComplex::build(&subdivided.iter().cloned().collect::<Vec<_>>()).unwrap();
        let hb = homology(before.complex(), Coefficients::Integers).unwrap();
        let ha = homology(after.complex(), Coefficients::Integers).unwrap();
        assert_eq!(hb.len(), ha.len());
        for (b, a) in hb.iter().zip(&ha) {
            assert_eq!(b.free_rank, a.free_rank);
            assert_eq!(b.cyclic_factors, a.cyclic_factors);
        }

        // Random cube sets, subdivided along random hyperplanes.
        for _ in 0..4 {
            let mut generators = Vec::new();
            for _ in 0..rng.gen_range(2..=4) {
                generators.push(random_elementary_cube(&mut rng, 3, 2));
            }
            let set: BTreeSet<ElementaryCube> = generators.iter().cloned().collect();
            let axis = rng.gen_range(0..3);
            let level = Dyadic::new(rng.gen_range(-29..=29), 3);
            let cut_set = subdivide_set(&set, axis, level).unwrap();
            let before = CubicalComplex::build(&generators).unwrap();
            let after =
                CubicalComplex::build(&cut_set.iter().cloned().collect::<Vec<_>>()).unwrap();
            let hb = homology(before.complex(), Coefficients::Integers).unwrap();
            let ha = homology(after.complex(), Coefficients::Integers).unwrap();
            let hb: Vec<String> = hb.iter().map(|g| g.to_string()).collect();
            let ha: Vec<String> = ha.iter().map(|g| g.to_string()).collect();
            let pad = hb.len().max(ha.len());
            let padded = |v: &[String]| {
                let mut v = v.to_vec();
                v.resize(pad, "0".to_string());
                v
            };
            assert_eq!(padded(&hb), padded(&ha));
        }
    }

    #[test]
    fn chain_vector_round_trip_and_errors() {
        let complex = CubicalComplex::build(&square_perimeter_edges()).unwrap();
        let edge = LabeledCube::canonical(
            ElementaryCube::new(vec![interval(0, 1), point(0)]).unwrap(),
        );
        let (degree, vector) = complex
            .chain_vector(&CubicalChain::from_cube(edge.clone()))
            .unwrap();
        assert_eq!(degree, 1);
        assert_eq!(vector.iter().filter(|v| **v != bi(0)).count(), 1);

        // Mixed dimensions and missing cubes are rejected.
        let mut mixed = CubicalChain::from_cube(edge);
        mixed.add_term(LabeledCube::canonical(ElementaryCube::vertex(&[0, 0])), 1);
        assert!(complex.chain_vector(&mixed).is_err());
        let far = CubicalChain::from_cube(LabeledCube::canonical(ElementaryCube::vertex(&[7, 7])));
        assert!(complex.chain_vector(&far).is_err());
    }
}
