//! Bounded complexes of finitely generated free abelian groups, their
//! homology over Z, Q, and Z/m, presentations of homology with explicit
//! generators and class coordinates, chain maps, short exact sequences,
//! connecting homomorphisms, and long-exact-sequence verification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;

use crate::int::{
    kernel_basis, smith_normal_form, solve, IntegerMatrix, SmithDecomposition,
};
use crate::{Error, Result};

/// Coefficient ring for a homology computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    Rationals,
    Mod(i64),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Rationals => write!(f, "Q"),
            Coefficients::Mod(m) => write!(f, "Z/{m}"),
        }
    }
}

/// A complex of free abelian groups supported on a finite window of
/// (possibly negative) degrees, with a chosen ordered generating set in
/// each degree and differentials lowering degree by one.
#[derive(Clone, Debug)]
pub struct GradedFreeComplex {
    min_degree: i64,
    ranks: Vec<usize>,
    labels: Vec<Vec<String>>,
    /// diffs[j] maps degree `min_degree + j + 1` to `min_degree + j`.
    diffs: Vec<IntegerMatrix>,
}

impl GradedFreeComplex {
    /// Build a complex from per-degree ranks and the internal differentials.
    /// `diffs[j]` must have shape `ranks[j] x ranks[j+1]`.
    pub fn new(min_degree: i64, ranks: Vec<usize>, diffs: Vec<IntegerMatrix>) -> Result<Self> {
        let labels = ranks
            .iter()
            .enumerate()
            .map(|(j, &r)| {
                let d = min_degree + j as i64;
                (0..r).map(|i| format!("g{d}_{i}")).collect()
            })
            .collect();
        Self::with_labels(min_degree, ranks, labels, diffs)
    }

    pub fn with_labels(
        min_degree: i64,
        ranks: Vec<usize>,
        labels: Vec<Vec<String>>,
        diffs: Vec<IntegerMatrix>,
    ) -> Result<Self> {
        if labels.len() != ranks.len() {
            return Err(Error::InvalidComplex(format!(
                "label table covers {} degrees but the complex has {}",
                labels.len(),
                ranks.len()
            )));
        }
        for (j, (l, &r)) in labels.iter().zip(&ranks).enumerate() {
            if l.len() != r {
                return Err(Error::InvalidComplex(format!(
                    "degree {} has rank {} but {} labels",
                    min_degree + j as i64,
                    r,
                    l.len()
                )));
            }
        }
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::InvalidComplex(format!(
                "expected {} differentials for {} degrees, got {}",
                ranks.len().saturating_sub(1),
                ranks.len(),
                diffs.len()
            )));
        }
        for (j, m) in diffs.iter().enumerate() {
            if m.rows() != ranks[j] || m.cols() != ranks[j + 1] {
                return Err(Error::InvalidComplex(format!(
                    "differential into degree {} has shape {}x{}, expected {}x{}",
                    min_degree + j as i64,
                    m.rows(),
                    m.cols(),
                    ranks[j],
                    ranks[j + 1]
                )));
            }
        }
        Ok(GradedFreeComplex { min_degree, ranks, labels, diffs })
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.min_degree..=self.max_degree()
    }

    pub fn rank(&self, d: i64) -> usize {
        let j = d - self.min_degree;
        if j < 0 || j >= self.ranks.len() as i64 {
            0
        } else {
            self.ranks[j as usize]
        }
    }

    pub fn labels_at(&self, d: i64) -> &[String] {
        let j = d - self.min_degree;
        if j < 0 || j >= self.ranks.len() as i64 {
            &[]
        } else {
            &self.labels[j as usize]
        }
    }

    /// The differential out of degree `d`, with zero-sized fallbacks
    /// outside the support window.
    pub fn differential(&self, d: i64) -> IntegerMatrix {
        let j = d - self.min_degree - 1;
        if j >= 0 && (j as usize) < self.diffs.len() {
            self.diffs[j as usize].clone()
        } else {
            IntegerMatrix::zeros(self.rank(d - 1), self.rank(d))
        }
    }

    /// Check that the differential squares to zero over the integers.
    pub fn verify(&self) -> Result<()> {
        for d in self.degrees() {
            let sq = self.differential(d).mul(&self.differential(d + 1));
            if !sq.is_zero() {
                return Err(Error::BoundarySquareNonzero {
                    ring: "Z".into(),
                    degree: d,
                });
            }
        }
        Ok(())
    }

    /// Check that the differential squares to zero modulo `m`.
    pub fn verify_mod(&self, m: i64) -> Result<()> {
        if m < 2 {
            return Err(Error::BadModulus(m));
        }
        let mb = BigInt::from(m);
        for d in self.degrees() {
            let sq = self.differential(d).mul(&self.differential(d + 1));
            if !sq.mod_m(&mb).is_zero() {
                return Err(Error::BoundarySquareNonzero {
                    ring: format!("Z/{m}"),
                    degree: d,
                });
            }
        }
        Ok(())
    }

    /// Degree shift: the result has `C'[d] = C[d - s]`, with the customary
    /// sign `(-1)^s` on the differential.
    pub fn shifted(&self, s: i64) -> Self {
        let diffs = if s.rem_euclid(2) == 0 {
            self.diffs.clone()
        } else {
            self.diffs.iter().map(|m| m.neg()).collect()
        };
        GradedFreeComplex {
            min_degree: self.min_degree + s,
            ranks: self.ranks.clone(),
            labels: self.labels.clone(),
            diffs,
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }
}

/// An abelian group presented as `Z^free_rank` plus finite cyclic factors.
/// With `modulus = Some(m)` the group is a module over Z/m and the free
/// rank is zero; the factors then list its cyclic decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: i64,
    pub free_rank: usize,
    pub cyclic_factors: Vec<BigInt>,
    pub modulus: Option<i64>,
}

impl HomologyGroup {
    pub fn trivial(degree: i64, modulus: Option<i64>) -> Self {
        HomologyGroup { degree, free_rank: 0, cyclic_factors: Vec::new(), modulus }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.cyclic_factors.is_empty()
    }

    /// Minimal number of generators.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.cyclic_factors.len()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.cyclic_factors {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Homology of every degree in the support window, over the chosen ring.
pub fn homology(c: &GradedFreeComplex, coeff: Coefficients) -> Result<Vec<HomologyGroup>> {
    match coeff {
        Coefficients::Integers => {
            c.verify()?;
            let mut out = Vec::new();
            for d in c.degrees() {
                let out_rank = smith_normal_form(&c.differential(d)).rank;
                let in_snf = smith_normal_form(&c.differential(d + 1));
                out.push(HomologyGroup {
                    degree: d,
                    free_rank: c.rank(d) - out_rank - in_snf.rank,
                    cyclic_factors: in_snf.invariant_factors(),
                    modulus: None,
                });
            }
            Ok(out)
        }
        Coefficients::Rationals => {
            c.verify()?;
            let mut out = Vec::new();
            for d in c.degrees() {
                let out_rank = c.differential(d).rank_rational();
                let in_rank = c.differential(d + 1).rank_rational();
                out.push(HomologyGroup {
                    degree: d,
                    free_rank: c.rank(d) - out_rank - in_rank,
                    cyclic_factors: Vec::new(),
                    modulus: None,
                });
            }
            Ok(out)
        }
        Coefficients::Mod(m) => homology_mod(c, m),
    }
}

/// Homology with Z/m coefficients, reported as a cyclic decomposition.
///
/// Only requires the differential to square to zero modulo m, so it also
/// serves complexes that are honest complexes over Z/m but not over Z.
pub fn homology_mod(c: &GradedFreeComplex, m: i64) -> Result<Vec<HomologyGroup>> {
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    c.verify_mod(m)?;
    let mb = BigInt::from(m);
    let mut out = Vec::new();
    for d in c.degrees() {
        let n = c.rank(d);
        if n == 0 {
            out.push(HomologyGroup::trivial(d, Some(m)));
            continue;
        }
        // Lattice of mod-m cycles: x-projection of ker [D_d | m*I].
        let d_out = c.differential(d);
        let scaled_out = IntegerMatrix::identity(c.rank(d - 1)).scale(&mb);
        let aug = d_out.hstack(&scaled_out);
        let ker = kernel_basis(&smith_normal_form(&aug));
        let mut proj = IntegerMatrix::zeros(n, ker.cols());
        for j in 0..ker.cols() {
            for i in 0..n {
                proj.set(i, j, ker.at(i, j).clone());
            }
        }
        let cycles_snf = smith_normal_form(&proj);
        // Mod-m boundaries: columns of D_{d+1} together with m*I.
        let rels = c
            .differential(d + 1)
            .hstack(&IntegerMatrix::identity(n).scale(&mb));
        let mut coord_cols = Vec::with_capacity(rels.cols());
        for j in 0..rels.cols() {
            let col = rels.column(j);
            let x = solve(&cycles_snf, &col).ok_or_else(|| Error::Internal(format!(
                "mod-{m} boundary escaped the cycle lattice in degree {d}"
            )))?;
            coord_cols.push(x);
        }
        let x = IntegerMatrix::from_columns(proj.cols(), &coord_cols);
        let factors: Vec<BigInt> = smith_normal_form(&x)
            .diagonal()
            .into_iter()
            .filter(|c| c > &BigInt::one())
            .collect();
        for f in &factors {
            debug_assert!((&mb % f).is_zero(), "cyclic factor must divide the modulus");
        }
        out.push(HomologyGroup {
            degree: d,
            free_rank: 0,
            cyclic_factors: factors,
            modulus: Some(m),
        });
    }
    Ok(out)
}

/// A presentation of one homology group: an explicit cycle basis and the
/// boundary relations written in cycle coordinates, with the relation
/// matrix in Smith normal form so individual cycles can be classified.
#[derive(Clone, Debug)]
pub struct HomologyPresentation {
    pub degree: i64,
    ambient_rank: usize,
    /// Columns form a basis of the cycle lattice in degree `degree`.
    pub cycle_basis: IntegerMatrix,
    cycle_snf: SmithDecomposition,
    /// Boundaries expressed in cycle coordinates; its column span is the
    /// subgroup of boundaries.
    pub relations: IntegerMatrix,
    relation_snf: SmithDecomposition,
}

/// Coordinates of a homology class in the canonical slot basis of a
/// presentation: `orders[i]` is the order of the slot (0 meaning infinite)
/// and `coords[i]` is the coordinate, already reduced modulo the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub coords: Vec<BigInt>,
    pub orders: Vec<BigInt>,
}

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(&self.orders)
            .map(|(c, o)| {
                if o.is_zero() {
                    format!("{c}")
                } else {
                    format!("{c} (mod {o})")
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn present_homology(c: &GradedFreeComplex, degree: i64) -> Result<HomologyPresentation> {
    let n = c.rank(degree);
    let d_out = c.differential(degree);
    let cycle_basis = kernel_basis(&smith_normal_form(&d_out));
    let cycle_snf = smith_normal_form(&cycle_basis);
    let d_in = c.differential(degree + 1);
    let mut rel_cols = Vec::with_capacity(d_in.cols());
    for j in 0..d_in.cols() {
        let col = d_in.column(j);
        let y = solve(&cycle_snf, &col).ok_or(Error::BoundarySquareNonzero {
            ring: "Z".into(),
            degree,
        })?;
        rel_cols.push(y);
    }
    let relations = IntegerMatrix::from_columns(cycle_basis.cols(), &rel_cols);
    let relation_snf = smith_normal_form(&relations);
    Ok(HomologyPresentation {
        degree,
        ambient_rank: n,
        cycle_basis,
        cycle_snf,
        relations,
        relation_snf,
    })
}

impl HomologyPresentation {
    /// The slots of the canonical decomposition that carry the group:
    /// `(index, order)` pairs, order 0 for free slots, order >= 2 for
    /// torsion slots. Slots of order 1 are dropped.
    pub fn slots(&self) -> Vec<(usize, BigInt)> {
        let z = self.cycle_basis.cols();
        let diag = self.relation_snf.diagonal();
        let mut out = Vec::new();
        for i in 0..z {
            let order = if i < diag.len() { diag[i].clone() } else { BigInt::zero() };
            if order.is_one() {
                continue;
            }
            out.push((i, order));
        }
        out
    }

    pub fn group(&self) -> HomologyGroup {
        let slots = self.slots();
        let free_rank = slots.iter().filter(|(_, o)| o.is_zero()).count();
        let cyclic_factors = slots
            .iter()
            .filter(|(_, o)| !o.is_zero())
            .map(|(_, o)| o.clone())
            .collect();
        HomologyGroup {
            degree: self.degree,
            free_rank,
            cyclic_factors,
            modulus: None,
        }
    }

    /// Classify a cycle. Fails with `NotACycle` when the chain is not
    /// annihilated by the differential.
    pub fn class_of(&self, chain: &[BigInt]) -> Result<HomologyClass> {
        if chain.len() != self.ambient_rank {
            return Err(Error::Shape(format!(
                "chain has {} entries, degree {} has rank {}",
                chain.len(),
                self.degree,
                self.ambient_rank
            )));
        }
        let x = solve(&self.cycle_snf, chain).ok_or(Error::NotACycle { degree: self.degree })?;
        let y = self.relation_snf.u.mul_vec(&x);
        let mut coords = Vec::new();
        let mut orders = Vec::new();
        for (slot, order) in self.slots() {
            if order.is_zero() {
                coords.push(y[slot].clone());
            } else {
                coords.push(y[slot].mod_floor(&order));
            }
            orders.push(order);
        }
        Ok(HomologyClass { coords, orders })
    }

    /// A cycle representing the generator of the given kept slot
    /// (indexing into `slots()`).
    pub fn generator_chain(&self, slot_index: usize) -> Vec<BigInt> {
        let (slot, _) = self.slots()[slot_index];
        let reps = self.cycle_basis.mul(&self.relation_snf.u_inv);
        reps.column(slot)
    }

    pub fn classes_equal(&self, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
        let diff: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(self.class_of(&diff)?.is_zero())
    }

    /// Coordinates of a cycle in the cycle basis (unique when it exists).
    pub fn cycle_coordinates(&self, chain: &[BigInt]) -> Result<Vec<BigInt>> {
        solve(&self.cycle_snf, chain).ok_or(Error::NotACycle { degree: self.degree })
    }
}

/// A degree-homogeneous map of complexes. `maps[j]` sends generators of
/// source degree `source_min + j` into target degree `source_min + j + shift`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub shift: i64,
    source_min: i64,
    maps: Vec<IntegerMatrix>,
}

impl ChainMap {
    pub fn new(
        source: &GradedFreeComplex,
        target: &GradedFreeComplex,
        shift: i64,
        maps: Vec<IntegerMatrix>,
    ) -> Result<Self> {
        let expected = source.degrees().count();
        if maps.len() != expected {
            return Err(Error::InvalidChainMap(format!(
                "map table covers {} degrees, source has {}",
                maps.len(),
                expected
            )));
        }
        for (j, m) in maps.iter().enumerate() {
            let d = source.min_degree() + j as i64;
            let (er, ec) = (target.rank(d + shift), source.rank(d));
            if m.rows() != er || m.cols() != ec {
                return Err(Error::InvalidChainMap(format!(
                    "map at degree {d} has shape {}x{}, expected {er}x{ec}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(ChainMap { shift, source_min: source.min_degree(), maps })
    }

    /// The matrix at source degree `d`, with zero fallbacks outside the
    /// stored window.
    pub fn matrix_at(
        &self,
        d: i64,
        source: &GradedFreeComplex,
        target: &GradedFreeComplex,
    ) -> IntegerMatrix {
        let j = d - self.source_min;
        if j >= 0 && (j as usize) < self.maps.len() {
            self.maps[j as usize].clone()
        } else {
            IntegerMatrix::zeros(target.rank(d + self.shift), source.rank(d))
        }
    }
}

/// Check the commuting squares `D_T f = (-1)^shift f D_S` in every degree.
pub fn verify_chain_map(
    source: &GradedFreeComplex,
    target: &GradedFreeComplex,
    map: &ChainMap,
) -> Result<()> {
    for d in source.degrees() {
        let f_d = map.matrix_at(d, source, target);
        let f_prev = map.matrix_at(d - 1, source, target);
        let lhs = target.differential(d + map.shift).mul(&f_d);
        let mut rhs = f_prev.mul(&source.differential(d));
        if map.shift.rem_euclid(2) == 1 {
            rhs = rhs.neg();
        }
        if lhs != rhs {
            return Err(Error::InvalidChainMap(format!(
                "square at degree {d} does not commute"
            )));
        }
    }
    Ok(())
}

/// A levelwise short exact sequence of complexes
/// `0 -> sub -> total -> quotient -> 0`.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub sub: GradedFreeComplex,
    pub total: GradedFreeComplex,
    pub quotient: GradedFreeComplex,
    pub include: ChainMap,
    pub project: ChainMap,
}

impl ShortExactSequence {
    fn window(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self
            .sub
            .min_degree()
            .min(self.total.min_degree())
            .min(self.quotient.min_degree());
        let hi = self
            .sub
            .max_degree()
            .max(self.total.max_degree())
            .max(self.quotient.max_degree());
        lo..=hi
    }

    /// Verify levelwise exactness over Z: the inclusion is injective, the
    /// projection is onto with all invariant factors 1, the composite is
    /// zero, and the kernel of the projection is exactly the image of the
    /// inclusion (as lattices, not just ranks).
    pub fn verify(&self) -> Result<()> {
        self.sub.verify()?;
        self.total.verify()?;
        self.quotient.verify()?;
        if self.include.shift != 0 || self.project.shift != 0 {
            return Err(Error::NotExact("structure maps must preserve degree".into()));
        }
        verify_chain_map(&self.sub, &self.total, &self.include)?;
        verify_chain_map(&self.total, &self.quotient, &self.project)?;
        for d in self.window() {
            let i_d = self.include.matrix_at(d, &self.sub, &self.total);
            let p_d = self.project.matrix_at(d, &self.total, &self.quotient);
            if self.sub.rank(d) + self.quotient.rank(d) != self.total.rank(d) {
                return Err(Error::NotExact(format!(
                    "rank bookkeeping fails at degree {d}"
                )));
            }
            let snf_i = smith_normal_form(&i_d);
            if snf_i.rank != self.sub.rank(d) {
                return Err(Error::NotExact(format!(
                    "inclusion is not injective at degree {d}"
                )));
            }
            let snf_p = smith_normal_form(&p_d);
            if snf_p.rank != self.quotient.rank(d)
                || snf_p.diagonal().iter().take(snf_p.rank).any(|x| !x.is_one())
            {
                return Err(Error::NotExact(format!(
                    "projection is not onto at degree {d}"
                )));
            }
            if !p_d.mul(&i_d).is_zero() {
                return Err(Error::NotExact(format!(
                    "projection after inclusion is nonzero at degree {d}"
                )));
            }
            let ker_p = kernel_basis(&snf_p);
            for j in 0..ker_p.cols() {
                if solve(&snf_i, &ker_p.column(j)).is_none() {
                    return Err(Error::NotExact(format!(
                        "kernel of the projection exceeds the image of the inclusion at degree {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The connecting construction: given a cycle `z` in the quotient at
    /// `degree`, lift it, push through the total differential, and pull
    /// back along the inclusion. The result is a cycle in the sub-complex
    /// at `degree - 1`, well-defined up to boundaries.
    pub fn connecting_chain(&self, degree: i64, z: &[BigInt]) -> Result<Vec<BigInt>> {
        let dq = self.quotient.differential(degree);
        if !dq.mul_vec(z).iter().all(|x| x.is_zero()) {
            return Err(Error::NotACycle { degree });
        }
        let p_d = self.project.matrix_at(degree, &self.total, &self.quotient);
        let lift = solve(&smith_normal_form(&p_d), z).ok_or_else(|| {
            Error::NotExact(format!("cycle cannot be lifted at degree {degree}"))
        })?;
        let pushed = self.total.differential(degree).mul_vec(&lift);
        let i_prev = self
            .include
            .matrix_at(degree - 1, &self.sub, &self.total);
        let back = solve(&smith_normal_form(&i_prev), &pushed).ok_or_else(|| {
            Error::NotExact(format!(
                "boundary of the lift misses the sub-complex at degree {}",
                degree - 1
            ))
        })?;
        let check = self.sub.differential(degree - 1).mul_vec(&back);
        if !check.iter().all(|x| x.is_zero()) {
            return Err(Error::Internal(
                "connecting chain is not a cycle".into(),
            ));
        }
        Ok(back)
    }

    /// Full long-exact-sequence verification: computes homology of all
    /// three complexes and checks exactness at every spot.
    pub fn long_exact_check(&self) -> Result<LongExactReport> {
        self.verify()?;
        let window = self.window();
        let (lo, hi) = (*window.start(), *window.end());
        let mut degrees = Vec::new();
        for k in lo..=hi + 1 {
            let pa = present_homology(&self.sub, k)?;
            let pb = present_homology(&self.total, k)?;
            let pc = present_homology(&self.quotient, k)?;
            let pa_prev = present_homology(&self.sub, k - 1)?;
            let pb_prev = present_homology(&self.total, k - 1)?;

            let i_k = self.include.matrix_at(k, &self.sub, &self.total);
            let p_k = self.project.matrix_at(k, &self.total, &self.quotient);
            let i_prev = self.include.matrix_at(k - 1, &self.sub, &self.total);

            let i_star = induced_on_cycles(&i_k, &pa, &pb)?;
            let p_star = induced_on_cycles(&p_k, &pb, &pc)?;
            let i_star_prev = induced_on_cycles(&i_prev, &pa_prev, &pb_prev)?;
            let delta = self.connecting_on_cycles(k, &pc, &pa_prev)?;

            let exact_at_total = exact_between(&i_star, &pb.relations, &p_star, &pc.relations);
            let exact_at_quotient =
                exact_between(&p_star, &pc.relations, &delta, &pa_prev.relations);
            let exact_at_sub_below =
                exact_between(&delta, &pa_prev.relations, &i_star_prev, &pb_prev.relations);

            degrees.push(LongExactDegree {
                degree: k,
                sub: pa.group(),
                total: pb.group(),
                quotient: pc.group(),
                exact_at_total,
                exact_at_quotient,
                exact_at_sub_below,
            });
        }
        Ok(LongExactReport { degrees })
    }

    /// Matrix of the connecting map on cycle coordinates.
    fn connecting_on_cycles(
        &self,
        degree: i64,
        from: &HomologyPresentation,
        to: &HomologyPresentation,
    ) -> Result<IntegerMatrix> {
        let mut cols = Vec::new();
        for j in 0..from.cycle_basis.cols() {
            let z = from.cycle_basis.column(j);
            let chain = self.connecting_chain(degree, &z)?;
            cols.push(to.cycle_coordinates(&chain)?);
        }
        Ok(IntegerMatrix::from_columns(to.cycle_basis.cols(), &cols))
    }
}

/// Express the action of `map` on cycle bases: columns are the images of
/// the source cycle basis written in the target cycle basis.
pub fn induced_on_cycles(
    map: &IntegerMatrix,
    from: &HomologyPresentation,
    to: &HomologyPresentation,
) -> Result<IntegerMatrix> {
    let image = map.mul(&from.cycle_basis);
    let mut cols = Vec::new();
    for j in 0..image.cols() {
        cols.push(to.cycle_coordinates(&image.column(j))?);
    }
    Ok(IntegerMatrix::from_columns(to.cycle_basis.cols(), &cols))
}

/// Exactness of `G1 --a--> G2 --b--> G3` where `G_i` is presented as the
/// quotient of its cycle-coordinate lattice by `rel_i`:
/// checks image(a) ⊆ kernel(b) and kernel(b) ⊆ image(a) at the level of
/// homology classes.
pub fn exact_between(
    a: &IntegerMatrix,
    rel2: &IntegerMatrix,
    b: &IntegerMatrix,
    rel3: &IntegerMatrix,
) -> bool {
    // b ∘ a must vanish in G3, i.e. land in the relations of G3.
    let comp = b.mul(a);
    let snf3 = smith_normal_form(rel3);
    for j in 0..comp.cols() {
        if solve(&snf3, &comp.column(j)).is_none() {
            return false;
        }
    }
    // Every x with b(x) a boundary must be a(y) + relation. The lattice of
    // such x is the projection of ker [b | rel3] to the x-block.
    let z2 = b.cols();
    let ker = kernel_basis(&smith_normal_form(&b.hstack(rel3)));
    let target = a.hstack(rel2);
    let snf_target = smith_normal_form(&target);
    for j in 0..ker.cols() {
        let g: Vec<BigInt> = (0..z2).map(|i| ker.at(i, j).clone()).collect();
        if solve(&snf_target, &g).is_none() {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct LongExactDegree {
    pub degree: i64,
    pub sub: HomologyGroup,
    pub total: HomologyGroup,
    pub quotient: HomologyGroup,
    /// image(H(sub) -> H(total)) = kernel(H(total) -> H(quotient))
    pub exact_at_total: bool,
    /// image(H(total) -> H(quotient)) = kernel(connecting map)
    pub exact_at_quotient: bool,
    /// image(connecting map) = kernel(H(sub) -> H(total)) one degree down
    pub exact_at_sub_below: bool,
}

#[derive(Clone, Debug)]
pub struct LongExactReport {
    pub degrees: Vec<LongExactDegree>,
}

impl LongExactReport {
    pub fn all_exact(&self) -> bool {
        self.degrees
            .iter()
            .all(|d| d.exact_at_total && d.exact_at_quotient && d.exact_at_sub_below)
    }
}

/// One degree of a coefficient-comparison report: integral homology in this
/// and the previous degree, homology mod m, and the group predicted from
/// the integral data by tensoring and torsion products.
#[derive(Clone, Debug)]
pub struct CoefficientDegreeReport {
    pub degree: i64,
    pub integral: HomologyGroup,
    pub integral_below: HomologyGroup,
    pub modular: Vec<BigInt>,
    pub predicted: Vec<BigInt>,
    pub isomorphic: bool,
    pub rank_checks: Vec<RankCheck>,
}

/// Generator-count identity at one maximal prime power dividing m.
#[derive(Clone, Debug)]
pub struct RankCheck {
    pub prime: i64,
    pub modular_generators: usize,
    pub predicted_generators: usize,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct CoefficientReport {
    pub modulus: i64,
    pub degrees: Vec<CoefficientDegreeReport>,
}

impl CoefficientReport {
    pub fn all_pass(&self) -> bool {
        self.degrees
            .iter()
            .all(|d| d.isomorphic && d.rank_checks.iter().all(|r| r.ok))
    }
}

fn prime_factorization(mut x: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// Split a cyclic order into prime-power parts (the canonical form used
/// to compare finite abelian groups).
fn prime_power_parts(x: &BigInt) -> Vec<BigInt> {
    let as_i64 = i64::try_from(x.clone()).expect("cyclic factor fits in i64 by construction");
    prime_factorization(as_i64)
        .into_iter()
        .map(|(p, e)| BigInt::from(p.pow(e)))
        .collect()
}

fn canonical_parts(factors: &[BigInt]) -> Vec<BigInt> {
    let mut parts: Vec<BigInt> = factors.iter().flat_map(|f| prime_power_parts(f)).collect();
    parts.sort();
    parts
}

/// Compare homology mod m against the group assembled from integral
/// homology: `H_k ⊗ Z/m` plus the torsion product of `H_{k-1}` with Z/m.
/// Checks both abstract isomorphism and, for each maximal prime power
/// dividing m, the generator-count identity.
pub fn coefficient_comparison(c: &GradedFreeComplex, m: i64) -> Result<CoefficientReport> {
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    let integral = homology(c, Coefficients::Integers)?;
    let modular = homology_mod(c, m)?;
    let mb = BigInt::from(m);
    let mut degrees = Vec::new();
    for (idx, d) in c.degrees().enumerate() {
        let h_k = &integral[idx];
        let h_below = if idx == 0 {
            HomologyGroup::trivial(d - 1, None)
        } else {
            integral[idx - 1].clone()
        };
        // H_k ⊗ Z/m: each Z becomes Z/m, each Z/t becomes Z/gcd(t, m).
        let mut predicted: Vec<BigInt> = Vec::new();
        for _ in 0..h_k.free_rank {
            predicted.push(mb.clone());
        }
        for t in &h_k.cyclic_factors {
            let g = t.gcd(&mb);
            if g > BigInt::one() {
                predicted.push(g);
            }
        }
        // Torsion product of H_{k-1} with Z/m: each Z/s contributes Z/gcd(s, m).
        for s in &h_below.cyclic_factors {
            let g = s.gcd(&mb);
            if g > BigInt::one() {
                predicted.push(g);
            }
        }
        let modular_factors = modular[idx].cyclic_factors.clone();
        let isomorphic = canonical_parts(&predicted) == canonical_parts(&modular_factors);
        let mut rank_checks = Vec::new();
        for (p, _) in prime_factorization(m) {
            let pb = BigInt::from(p);
            let lhs = modular_factors
                .iter()
                .filter(|f| (*f % &pb).is_zero())
                .count();
            let rhs = h_k.free_rank
                + h_k
                    .cyclic_factors
                    .iter()
                    .filter(|t| (*t % &pb).is_zero())
                    .count()
                + h_below
                    .cyclic_factors
                    .iter()
                    .filter(|s| (*s % &pb).is_zero())
                    .count();
            rank_checks.push(RankCheck {
                prime: p,
                modular_generators: lhs,
                predicted_generators: rhs,
                ok: lhs == rhs,
            });
        }
        degrees.push(CoefficientDegreeReport {
            degree: d,
            integral: h_k.clone(),
            integral_below: h_below,
            modular: modular_factors,
            predicted,
            isomorphic,
            rank_checks,
        });
    }
    Ok(CoefficientReport { modulus: m, degrees })
}
