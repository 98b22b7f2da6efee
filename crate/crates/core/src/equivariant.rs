//! Circle-equivariant chain models: a finite complex equipped with a
//! degree-raising rotation operator J (squaring to zero and anticommuting
//! with the differential) spawns three twisted complexes over the
//! polynomial, Laurent, and co-polynomial ranges of a formal variable u of
//! degree -2, with differential `(g, k) -> (Dg, k) + (Jg, k+1)`.
//!
//! The module computes those theories on degree windows (internally padded
//! so every reported degree is exact), and realizes the two standard short
//! exact sequences relating them: multiplication by u against the base
//! complex, and the polynomial/Laurent/co-polynomial localization.

use std::collections::BTreeMap;

use crate::complex::{
    homology, ChainMap, Coefficients, GradedFreeComplex, HomologyGroup, ShortExactSequence,
};
use crate::int::IntegerMatrix;
use crate::{Error, Result};

/// A complex with a rotation operator. `rotation[j]` raises degree by one
/// out of degree `base.min_degree() + j`.
#[derive(Clone, Debug)]
pub struct CircleComplex {
    pub base: GradedFreeComplex,
    rotation: Vec<IntegerMatrix>,
}

impl CircleComplex {
    pub fn new(base: GradedFreeComplex, rotation: Vec<IntegerMatrix>) -> Result<Self> {
        base.verify()?;
        let expected = base.degrees().count();
        if rotation.len() != expected {
            return Err(Error::InvalidRotation(format!(
                "rotation table covers {} degrees, complex has {expected}",
                rotation.len()
            )));
        }
        for (j, m) in rotation.iter().enumerate() {
            let d = base.min_degree() + j as i64;
            if m.rows() != base.rank(d + 1) || m.cols() != base.rank(d) {
                return Err(Error::InvalidRotation(format!(
                    "rotation at degree {d} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    base.rank(d + 1),
                    base.rank(d)
                )));
            }
        }
        let cc = CircleComplex { base, rotation };
        for d in cc.base.degrees() {
            let jj = cc.rotation_at(d + 1).mul(&cc.rotation_at(d));
            if !jj.is_zero() {
                return Err(Error::InvalidRotation(format!(
                    "rotation squared is nonzero out of degree {d}"
                )));
            }
            let anti = cc
                .rotation_at(d - 1)
                .mul(&cc.base.differential(d))
                .add(&cc.base.differential(d + 1).mul(&cc.rotation_at(d)));
            if !anti.is_zero() {
                return Err(Error::InvalidRotation(format!(
                    "rotation does not anticommute with the differential at degree {d}"
                )));
            }
        }
        Ok(cc)
    }

    pub fn rotation_at(&self, d: i64) -> IntegerMatrix {
        let j = d - self.base.min_degree();
        if j >= 0 && (j as usize) < self.rotation.len() {
            self.rotation[j as usize].clone()
        } else {
            IntegerMatrix::zeros(self.base.rank(d + 1), self.base.rank(d))
        }
    }
}

/// Which power range of u the twisted complex allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// k >= 0 (polynomial powers).
    Plus,
    /// all integer k (Laurent powers).
    Laurent,
    /// k <= 0, with the k = 0 rotation term truncated away.
    Minus,
}

impl Variant {
    fn allows(&self, k: i64) -> bool {
        match self {
            Variant::Plus => k >= 0,
            Variant::Laurent => true,
            Variant::Minus => k <= 0,
        }
    }

    /// Whether the rotation component out of power k is kept.
    fn keeps_rotation(&self, k: i64) -> bool {
        self.allows(k + 1)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Plus => write!(f, "plus"),
            Variant::Laurent => write!(f, "laurent"),
            Variant::Minus => write!(f, "minus"),
        }
    }
}

/// The (base degree, u-power) blocks present in one twisted degree,
/// in increasing base degree.
fn blocks(cc: &CircleComplex, variant: Variant, degree: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for b in cc.base.degrees() {
        if cc.base.rank(b) == 0 {
            continue;
        }
        let diff = b - degree;
        if diff.rem_euclid(2) != 0 {
            continue;
        }
        let k = diff / 2;
        if variant.allows(k) {
            out.push((b, k));
        }
    }
    out
}

fn block_offsets(cc: &CircleComplex, layout: &[(i64, i64)]) -> (BTreeMap<(i64, i64), usize>, usize) {
    let mut map = BTreeMap::new();
    let mut total = 0;
    for &(b, k) in layout {
        map.insert((b, k), total);
        total += cc.base.rank(b);
    }
    (map, total)
}

fn power_label(base: &str, k: i64) -> String {
    match k {
        0 => base.to_string(),
        1 => format!("{base}*u"),
        _ => format!("{base}*u^{k}"),
    }
}

/// The twisted complex of the chosen variant, restricted to a degree
/// window. Differentials at the window edges are truncated; callers who
/// need exact homology should pad the window (as `twisted_homology` does).
pub fn twisted_complex(
    cc: &CircleComplex,
    variant: Variant,
    lo: i64,
    hi: i64,
) -> Result<GradedFreeComplex> {
    if lo > hi {
        return Err(Error::BadWindow(format!("window {lo}..{hi} is empty")));
    }
    let mut ranks = Vec::new();
    let mut labels = Vec::new();
    let mut diffs = Vec::new();
    for d in lo..=hi {
        let layout = blocks(cc, variant, d);
        let (_, total) = block_offsets(cc, &layout);
        ranks.push(total);
        let mut degree_labels = Vec::with_capacity(total);
        for &(b, k) in &layout {
            for name in cc.base.labels_at(b) {
                degree_labels.push(power_label(name, k));
            }
        }
        labels.push(degree_labels);
    }
    for d in lo + 1..=hi {
        let src = blocks(cc, variant, d);
        let dst = blocks(cc, variant, d - 1);
        let (src_off, src_total) = block_offsets(cc, &src);
        let (dst_off, dst_total) = block_offsets(cc, &dst);
        let mut m = IntegerMatrix::zeros(dst_total, src_total);
        for (&(b, k), &c0) in &src_off {
            let diff = cc.base.differential(b);
            if let Some(&r0) = dst_off.get(&(b - 1, k)) {
                for i in 0..diff.rows() {
                    for j in 0..diff.cols() {
                        m.set(r0 + i, c0 + j, diff.at(i, j).clone());
                    }
                }
            }
            if variant.keeps_rotation(k) {
                let rot = cc.rotation_at(b);
                if let Some(&r0) = dst_off.get(&(b + 1, k + 1)) {
                    for i in 0..rot.rows() {
                        for j in 0..rot.cols() {
                            m.set(r0 + i, c0 + j, rot.at(i, j).clone());
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    GradedFreeComplex::with_labels(lo, ranks, labels, diffs)
}

const WINDOW_PAD: i64 = 2;

/// Homology of the twisted complex, exact on every degree of the window
/// (computed on an internally padded window and trimmed).
pub fn twisted_homology(
    cc: &CircleComplex,
    variant: Variant,
    lo: i64,
    hi: i64,
    coeff: Coefficients,
) -> Result<Vec<HomologyGroup>> {
    let padded = twisted_complex(cc, variant, lo - WINDOW_PAD, hi + WINDOW_PAD)?;
    let all = homology(&padded, coeff)?;
    Ok(all
        .into_iter()
        .filter(|g| g.degree >= lo && g.degree <= hi)
        .collect())
}

/// Build the identity-block chain map sending block (b, k) of the source
/// layout to block (b, k + power_shift) of the target layout.
fn block_map(
    cc: &CircleComplex,
    source: &GradedFreeComplex,
    target: &GradedFreeComplex,
    source_blocks: impl Fn(i64) -> Vec<(i64, i64)>,
    target_blocks: impl Fn(i64) -> Vec<(i64, i64)>,
    power_shift: i64,
    keep: impl Fn(i64) -> bool,
) -> Result<ChainMap> {
    let mut maps = Vec::new();
    for d in source.degrees() {
        let src = source_blocks(d);
        let dst = target_blocks(d);
        let (src_off, src_total) = block_offsets(cc, &src);
        let (dst_off, dst_total) = block_offsets(cc, &dst);
        debug_assert_eq!(src_total, source.rank(d));
        debug_assert_eq!(dst_total, target.rank(d));
        let mut m = IntegerMatrix::zeros(dst_total, src_total);
        for (&(b, k), &c0) in &src_off {
            if !keep(k) {
                continue;
            }
            if let Some(&r0) = dst_off.get(&(b, k + power_shift)) {
                for i in 0..cc.base.rank(b) {
                    m.set(r0 + i, c0 + i, num_bigint::BigInt::from(1));
                }
            }
        }
        maps.push(m);
    }
    ChainMap::new(source, target, 0, maps)
}

/// The base complex cut down to a window (zero ranks outside its support).
fn windowed_base(cc: &CircleComplex, lo: i64, hi: i64) -> Result<GradedFreeComplex> {
    let mut ranks = Vec::new();
    let mut labels = Vec::new();
    let mut diffs = Vec::new();
    for d in lo..=hi {
        ranks.push(cc.base.rank(d));
        labels.push(cc.base.labels_at(d).to_vec());
        if d > lo {
            diffs.push(cc.base.differential(d));
        }
    }
    GradedFreeComplex::with_labels(lo, ranks, labels, diffs)
}

/// The multiplication-by-u sequence: the polynomial theory shifted by two
/// includes into the polynomial theory, with quotient the base complex.
/// Windows are padded internally; the sequence is levelwise exact on the
/// whole padded window.
pub fn u_multiplication_sequence(
    cc: &CircleComplex,
    lo: i64,
    hi: i64,
) -> Result<ShortExactSequence> {
    if lo > hi {
        return Err(Error::BadWindow(format!("window {lo}..{hi} is empty")));
    }
    let (l, h) = (lo - WINDOW_PAD, hi + WINDOW_PAD);
    let total = twisted_complex(cc, Variant::Plus, l, h)?;
    let sub = twisted_complex(cc, Variant::Plus, l + 2, h + 2)?.shifted(-2);
    let quotient = windowed_base(cc, l, h)?;
    let include = block_map(
        cc,
        &sub,
        &total,
        |d| blocks(cc, Variant::Plus, d + 2),
        |d| blocks(cc, Variant::Plus, d),
        1,
        |_| true,
    )?;
    // Projection keeps only the k = 0 block, which is the base in that degree.
    let mut proj_maps = Vec::new();
    for d in total.degrees() {
        let src = blocks(cc, Variant::Plus, d);
        let (src_off, src_total) = block_offsets(cc, &src);
        let mut m = IntegerMatrix::zeros(quotient.rank(d), src_total);
        if let Some(&c0) = src_off.get(&(d, 0)) {
            for i in 0..cc.base.rank(d) {
                m.set(i, c0 + i, num_bigint::BigInt::from(1));
            }
        }
        proj_maps.push(m);
    }
    let project = ChainMap::new(&total, &quotient, 0, proj_maps)?;
    Ok(ShortExactSequence { sub, total, quotient, include, project })
}

/// The localization sequence: u times the polynomial theory includes into
/// the Laurent theory, with quotient the co-polynomial theory.
pub fn localization_sequence(
    cc: &CircleComplex,
    lo: i64,
    hi: i64,
) -> Result<ShortExactSequence> {
    if lo > hi {
        return Err(Error::BadWindow(format!("window {lo}..{hi} is empty")));
    }
    let (l, h) = (lo - WINDOW_PAD, hi + WINDOW_PAD);
    let total = twisted_complex(cc, Variant::Laurent, l, h)?;
    let sub = twisted_complex(cc, Variant::Plus, l + 2, h + 2)?.shifted(-2);
    let quotient = twisted_complex(cc, Variant::Minus, l, h)?;
    let include = block_map(
        cc,
        &sub,
        &total,
        |d| blocks(cc, Variant::Plus, d + 2),
        |d| blocks(cc, Variant::Laurent, d),
        1,
        |_| true,
    )?;
    let project = block_map(
        cc,
        &total,
        &quotient,
        |d| blocks(cc, Variant::Laurent, d),
        |d| blocks(cc, Variant::Minus, d),
        0,
        |k| k <= 0,
    )?;
    Ok(ShortExactSequence { sub, total, quotient, include, project })
}

fn same_group(a: &HomologyGroup, b: &HomologyGroup) -> bool {
    a.free_rank == b.free_rank && a.cyclic_factors == b.cyclic_factors
}

/// One compared pair of homology groups in the stabilization report.
#[derive(Clone, Debug)]
pub struct StabilizationPair {
    pub degree: i64,
    pub lhs: HomologyGroup,
    pub rhs: HomologyGroup,
    pub isomorphic: bool,
}

/// Periodicity and stabilization facts about the twisted theories:
/// the Laurent theory is two-periodic; in low degrees the polynomial
/// theory is two-periodic as well and agrees with the Laurent theory.
#[derive(Clone, Debug)]
pub struct StabilizationReport {
    /// Laurent degree d versus Laurent degree d - 2.
    pub laurent_periodicity: Vec<StabilizationPair>,
    /// Laurent degree d versus the stable polynomial value (degree -2 for
    /// even d, degree -1 for odd d).
    pub stable_values: Vec<StabilizationPair>,
    /// Polynomial degree d versus polynomial degree d - 2, for d <= -1.
    pub plus_periodicity: Vec<StabilizationPair>,
}

impl StabilizationReport {
    pub fn all_pass(&self) -> bool {
        self.laurent_periodicity
            .iter()
            .chain(&self.stable_values)
            .chain(&self.plus_periodicity)
            .all(|p| p.isomorphic)
    }
}

pub fn stabilization_check(cc: &CircleComplex, lo: i64, hi: i64) -> Result<StabilizationReport> {
    if lo > hi {
        return Err(Error::BadWindow(format!("window {lo}..{hi} is empty")));
    }
    let laurent = twisted_homology(cc, Variant::Laurent, lo - 2, hi, Coefficients::Integers)?;
    let plus_lo = (lo - 2).min(-3);
    let plus = twisted_homology(cc, Variant::Plus, plus_lo, hi, Coefficients::Integers)?;
    let lau = |d: i64| laurent[(d - (lo - 2)) as usize].clone();
    let plu = |d: i64| plus[(d - plus_lo) as usize].clone();

    let mut laurent_periodicity = Vec::new();
    let mut stable_values = Vec::new();
    let mut plus_periodicity = Vec::new();
    for d in lo..=hi {
        let a = lau(d);
        let b = lau(d - 2);
        laurent_periodicity.push(StabilizationPair {
            degree: d,
            isomorphic: same_group(&a, &b),
            lhs: a.clone(),
            rhs: b,
        });
        let stable_degree = if d.rem_euclid(2) == 0 { -2 } else { -1 };
        let s = plu(stable_degree);
        stable_values.push(StabilizationPair {
            degree: d,
            isomorphic: same_group(&a, &s),
            lhs: a,
            rhs: s,
        });
        if d <= -1 {
            let p = plu(d);
            let q = plu(d - 2);
            plus_periodicity.push(StabilizationPair {
                degree: d,
                isomorphic: same_group(&p, &q),
                lhs: p,
                rhs: q,
            });
        }
    }
    Ok(StabilizationReport { laurent_periodicity, stable_values, plus_periodicity })
}
