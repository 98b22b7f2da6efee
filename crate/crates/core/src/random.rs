//! Seeded random generators for property suites: complexes assembled from
//! elementary blocks, basis-scrambled by small unimodular conjugation;
//! short exact sequences with a twisted direct-sum total complex; and
//! circle complexes with rotation operators built from verified block
//! models. Everything is deterministic for a fixed RNG seed.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::complex::{ChainMap, GradedFreeComplex, ShortExactSequence};
use crate::cubical::{Component, CoordMap, CubicalChain, Dyadic, ElementaryCube, LabeledCube};
use crate::equivariant::CircleComplex;
use crate::int::{bi, IntegerMatrix};

/// A random unimodular matrix and its exact inverse, built as a short
/// product of elementary operations so entries stay small.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, shears: usize) -> (IntegerMatrix, IntegerMatrix) {
    #[derive(Clone)]
    enum Op {
        Swap(usize, usize),
        Negate(usize),
        /// row[dst] += c * row[src]
        Shear(usize, usize, i64),
    }
    let mut ops = Vec::new();
    if n > 1 {
        for _ in 0..shears {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i {
                j = rng.gen_range(0..n);
            }
            match rng.gen_range(0..4) {
                0 => ops.push(Op::Swap(i, j)),
                1 => ops.push(Op::Negate(i)),
                _ => ops.push(Op::Shear(i, j, if rng.gen::<bool>() { 1 } else { -1 })),
            }
        }
    } else if n == 1 && rng.gen::<bool>() {
        ops.push(Op::Negate(0));
    }

    let mut p = IntegerMatrix::identity(n);
    let mut p_inv = IntegerMatrix::identity(n);
    // rows/negations tracked as full products so inverse order is explicit
    let apply = |m: &mut IntegerMatrix, op: &Op| {
        let e = match op {
            Op::Swap(i, j) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*i, *i, BigInt::zero());
                e.set(*j, *j, BigInt::zero());
                e.set(*i, *j, BigInt::one());
                e.set(*j, *i, BigInt::one());
                e
            }
            Op::Negate(i) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*i, *i, bi(-1));
                e
            }
            Op::Shear(dst, src, c) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*dst, *src, bi(*c));
                e
            }
        };
        *m = e.mul(m);
    };
    let apply_inv = |m: &mut IntegerMatrix, op: &Op| {
        let e = match op {
            Op::Swap(i, j) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*i, *i, BigInt::zero());
                e.set(*j, *j, BigInt::zero());
                e.set(*i, *j, BigInt::one());
                e.set(*j, *i, BigInt::one());
                e
            }
            Op::Negate(i) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*i, *i, bi(-1));
                e
            }
            Op::Shear(dst, src, c) => {
                let mut e = IntegerMatrix::identity(n);
                e.set(*dst, *src, bi(-*c));
                e
            }
        };
        *m = m.mul(&e);
    };
    for op in &ops {
        apply(&mut p, op);
        apply_inv(&mut p_inv, op);
    }
    (p, p_inv)
}

fn max_abs_entry(m: &IntegerMatrix) -> i64 {
    let mut best: i64 = 0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.at(i, j);
            let a = num_traits::Signed::abs(v);
            let a64 = i64::try_from(a).unwrap_or(i64::MAX);
            best = best.max(a64);
        }
    }
    best
}

/// Elementary building blocks for random complexes: a lone generator, or a
/// pair `x -> t*y` across adjacent degrees.
#[derive(Clone, Copy, Debug)]
enum Block {
    Free { degree: i64 },
    Pair { degree: i64, factor: i64 },
}

/// A random bounded complex on degrees `[0, max_degree]`, built from
/// elementary blocks and conjugated degreewise by small unimodular
/// matrices. Per-degree rank is at most `max_rank`; differential entries
/// are bounded by `entry_bound`.
pub fn random_complex<R: Rng>(
    rng: &mut R,
    max_degree: i64,
    max_rank: usize,
    entry_bound: i64,
) -> GradedFreeComplex {
    loop {
        let n_degrees = (max_degree + 1) as usize;
        let mut blocks = Vec::new();
        let mut ranks = vec![0usize; n_degrees];
        let budget: usize = rng.gen_range(1..=3.max(n_degrees));
        for _ in 0..budget {
            if max_degree >= 1 && rng.gen::<bool>() {
                let d = rng.gen_range(0..max_degree);
                if ranks[d as usize] < max_rank && ranks[(d + 1) as usize] < max_rank {
                    blocks.push(Block::Pair { degree: d, factor: rng.gen_range(1..=3) });
                    ranks[d as usize] += 1;
                    ranks[(d + 1) as usize] += 1;
                }
            } else {
                let d = rng.gen_range(0..=max_degree);
                if ranks[d as usize] < max_rank {
                    blocks.push(Block::Free { degree: d });
                    ranks[d as usize] += 1;
                }
            }
        }
        if ranks.iter().all(|&r| r == 0) {
            blocks.push(Block::Free { degree: 0 });
            ranks[0] = 1;
        }
        // Block-diagonal differentials: assign slots in block order.
        let mut next_slot = vec![0usize; n_degrees];
        let mut diffs: Vec<IntegerMatrix> = (1..n_degrees)
            .map(|j| IntegerMatrix::zeros(ranks[j - 1], ranks[j]))
            .collect();
        for b in &blocks {
            match *b {
                Block::Free { degree } => {
                    next_slot[degree as usize] += 1;
                }
                Block::Pair { degree, factor } => {
                    let lo = next_slot[degree as usize];
                    next_slot[degree as usize] += 1;
                    let hi = next_slot[(degree + 1) as usize];
                    next_slot[(degree + 1) as usize] += 1;
                    diffs[degree as usize].set(lo, hi, bi(factor));
                }
            }
        }
        // Conjugate: D'_d = P_{d-1} D_d P_d^{-1}.
        let conj: Vec<(IntegerMatrix, IntegerMatrix)> = ranks
            .iter()
            .map(|&r| {
                let shears = rng.gen_range(0..=2);
                random_unimodular(rng, r, shears)
            })
            .collect();
        let diffs: Vec<IntegerMatrix> = diffs
            .iter()
            .enumerate()
            .map(|(j, d)| conj[j].0.mul(d).mul(&conj[j + 1].1))
            .collect();
        if diffs.iter().any(|d| max_abs_entry(d) > entry_bound) {
            continue;
        }
        let c = GradedFreeComplex::new(0, ranks, diffs).expect("shapes are consistent");
        c.verify().expect("block complexes square to zero");
        return c;
    }
}

/// A random levelwise short exact sequence. The total complex is the
/// direct sum of the outer complexes with an upper-triangular twist
/// `h = D_sub ∘ g − g ∘ D_quot` (for a random degree-0 map g), which
/// squares to zero identically.
pub fn random_exact_sequence<R: Rng>(
    rng: &mut R,
    max_degree: i64,
    max_rank: usize,
    entry_bound: i64,
) -> ShortExactSequence {
    let sub = random_complex(rng, max_degree, max_rank, entry_bound);
    let quotient = random_complex(rng, max_degree, max_rank, entry_bound);
    // Random degree-0 map g: quotient -> sub (not a chain map; its failure
    // to be one is exactly the twist).
    let g: Vec<IntegerMatrix> = quotient
        .degrees()
        .map(|d| {
            let mut m = IntegerMatrix::zeros(sub.rank(d), quotient.rank(d));
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if rng.gen_range(0..3) == 0 {
                        m.set(i, j, bi(rng.gen_range(-1..=1)));
                    }
                }
            }
            m
        })
        .collect();
    let g_at = |d: i64| -> IntegerMatrix {
        let j = d - quotient.min_degree();
        if j >= 0 && (j as usize) < g.len() {
            g[j as usize].clone()
        } else {
            IntegerMatrix::zeros(sub.rank(d), quotient.rank(d))
        }
    };
    let lo = sub.min_degree().min(quotient.min_degree());
    let hi = sub.max_degree().max(quotient.max_degree());
    let mut ranks = Vec::new();
    let mut diffs = Vec::new();
    let mut includes = Vec::new();
    let mut projects = Vec::new();
    for d in lo..=hi {
        let (ra, rc) = (sub.rank(d), quotient.rank(d));
        ranks.push(ra + rc);
        if d > lo {
            // [[D_A, h], [0, D_C]] with h_d = D_A(d) g_d - g_{d-1} D_C(d)
            let h = sub
                .differential(d)
                .mul(&g_at(d))
                .add(&g_at(d - 1).mul(&quotient.differential(d)).neg());
            let top = sub.differential(d).hstack(&h);
            let bottom = IntegerMatrix::zeros(quotient.rank(d - 1), sub.rank(d))
                .hstack(&quotient.differential(d));
            diffs.push(top.vstack(&bottom));
        }
        let mut inc = IntegerMatrix::zeros(ra + rc, ra);
        for i in 0..ra {
            inc.set(i, i, BigInt::one());
        }
        let mut proj = IntegerMatrix::zeros(rc, ra + rc);
        for i in 0..rc {
            proj.set(i, ra + i, BigInt::one());
        }
        includes.push(inc);
        projects.push(proj);
    }
    let total = GradedFreeComplex::new(lo, ranks, diffs).expect("shapes are consistent");
    total.verify().expect("twisted sum squares to zero");
    // The inclusion/projection tables must cover the sub/quotient windows.
    let include = ChainMap::new(
        &sub,
        &total,
        0,
        sub.degrees()
            .map(|d| includes[(d - lo) as usize].clone())
            .collect(),
    )
    .expect("inclusion shapes");
    let project = ChainMap::new(
        &total,
        &quotient,
        0,
        quotient
            .degrees()
            .map(|d| projects[(d - lo) as usize].clone())
            .collect(),
    )
    .expect("projection shapes");
    ShortExactSequence { sub, total, quotient, include, project }
}

/// The degree-(-1) twist of a random exact sequence: the block of the
/// total differential mapping quotient coordinates into sub coordinates.
/// For a cycle z of the quotient, `twist * z` represents the connecting
/// map's value directly, giving an independent oracle.
pub fn twist_block(ses: &ShortExactSequence, degree: i64) -> IntegerMatrix {
    let d_total = ses.total.differential(degree);
    let ra_out = ses.sub.rank(degree - 1);
    let ra_in = ses.sub.rank(degree);
    let rc_in = ses.quotient.rank(degree);
    let mut m = IntegerMatrix::zeros(ra_out, rc_in);
    for i in 0..ra_out {
        for j in 0..rc_in {
            m.set(i, j, d_total.at(i, ra_in + j).clone());
        }
    }
    m
}

/// Rotation-aware building blocks for random circle complexes.
#[derive(Clone, Copy, Debug)]
enum CircleBlock {
    /// one generator, zero rotation
    Point { degree: i64 },
    /// generators p (degree d) and c (degree d+1) with J p = c
    FreeOrbit { degree: i64 },
    /// x -> t*y with zero rotation
    Cone { degree: i64, factor: i64 },
    /// x, y, Jx, Jy with D x = t y, D(Jx) = -t Jy, J x = Jx, J y = Jy
    Paired { degree: i64, factor: i64 },
}

/// A random circle complex on base degrees `[0, max_degree]` built from
/// rotation-compatible blocks, conjugated degreewise. Per-degree base rank
/// is at most `max_rank`; differential and rotation entries are bounded by
/// `entry_bound`.
pub fn random_circle_complex<R: Rng>(
    rng: &mut R,
    max_degree: i64,
    max_rank: usize,
    entry_bound: i64,
) -> CircleComplex {
    loop {
        let n_degrees = (max_degree + 1) as usize;
        let mut ranks = vec![0usize; n_degrees];
        let mut blocks = Vec::new();
        let budget = rng.gen_range(1..=3);
        for _ in 0..budget {
            let choice = rng.gen_range(0..4);
            match choice {
                0 => {
                    let d = rng.gen_range(0..=max_degree);
                    if ranks[d as usize] < max_rank {
                        blocks.push(CircleBlock::Point { degree: d });
                        ranks[d as usize] += 1;
                    }
                }
                1 if max_degree >= 1 => {
                    let d = rng.gen_range(0..max_degree);
                    if ranks[d as usize] < max_rank && ranks[(d + 1) as usize] < max_rank {
                        blocks.push(CircleBlock::FreeOrbit { degree: d });
                        ranks[d as usize] += 1;
                        ranks[(d + 1) as usize] += 1;
                    }
                }
                2 if max_degree >= 1 => {
                    let d = rng.gen_range(0..max_degree);
                    if ranks[d as usize] < max_rank && ranks[(d + 1) as usize] < max_rank {
                        blocks.push(CircleBlock::Cone { degree: d, factor: rng.gen_range(1..=2) });
                        ranks[d as usize] += 1;
                        ranks[(d + 1) as usize] += 1;
                    }
                }
                _ if max_degree >= 2 => {
                    let d = rng.gen_range(0..=max_degree - 2);
                    if ranks[d as usize] < max_rank
                        && ranks[(d + 1) as usize] + 1 < max_rank
                        && ranks[(d + 2) as usize] < max_rank
                    {
                        blocks.push(CircleBlock::Paired { degree: d, factor: rng.gen_range(1..=2) });
                        ranks[d as usize] += 1;
                        ranks[(d + 1) as usize] += 2;
                        ranks[(d + 2) as usize] += 1;
                    }
                }
                _ => {}
            }
        }
        if ranks.iter().all(|&r| r == 0) {
            blocks.push(CircleBlock::Point { degree: 0 });
            ranks[0] = 1;
        }
        let mut next_slot = vec![0usize; n_degrees];
        let mut diffs: Vec<IntegerMatrix> = (1..n_degrees)
            .map(|j| IntegerMatrix::zeros(ranks[j - 1], ranks[j]))
            .collect();
        let mut rots: Vec<IntegerMatrix> = (0..n_degrees)
            .map(|j| {
                let up = if j + 1 < n_degrees { ranks[j + 1] } else { 0 };
                IntegerMatrix::zeros(up, ranks[j])
            })
            .collect();
        let take = |d: i64, next_slot: &mut Vec<usize>| -> usize {
            let s = next_slot[d as usize];
            next_slot[d as usize] += 1;
            s
        };
        for b in &blocks {
            match *b {
                CircleBlock::Point { degree } => {
                    take(degree, &mut next_slot);
                }
                CircleBlock::FreeOrbit { degree } => {
                    let p = take(degree, &mut next_slot);
                    let c = take(degree + 1, &mut next_slot);
                    rots[degree as usize].set(c, p, BigInt::one());
                }
                CircleBlock::Cone { degree, factor } => {
                    let y = take(degree, &mut next_slot);
                    let x = take(degree + 1, &mut next_slot);
                    diffs[degree as usize].set(y, x, bi(factor));
                }
                CircleBlock::Paired { degree, factor } => {
                    let y = take(degree, &mut next_slot);
                    let x = take(degree + 1, &mut next_slot);
                    let jy = take(degree + 1, &mut next_slot);
                    let jx = take(degree + 2, &mut next_slot);
                    diffs[degree as usize].set(y, x, bi(factor));
                    diffs[(degree + 1) as usize].set(jy, jx, bi(-factor));
                    rots[degree as usize].set(jy, y, BigInt::one());
                    rots[(degree + 1) as usize].set(jx, x, BigInt::one());
                }
            }
        }
        // Conjugate both structures by the same degreewise change of basis.
        let conj: Vec<(IntegerMatrix, IntegerMatrix)> = ranks
            .iter()
            .map(|&r| {
                let shears = rng.gen_range(0..=2);
                random_unimodular(rng, r, shears)
            })
            .collect();
        let diffs: Vec<IntegerMatrix> = diffs
            .iter()
            .enumerate()
            .map(|(j, d)| conj[j].0.mul(d).mul(&conj[j + 1].1))
            .collect();
        let rots: Vec<IntegerMatrix> = rots
            .iter()
            .enumerate()
            .map(|(j, r)| {
                if j + 1 < n_degrees {
                    conj[j + 1].0.mul(r).mul(&conj[j].1)
                } else {
                    r.clone()
                }
            })
            .collect();
        if diffs.iter().any(|m| max_abs_entry(m) > entry_bound)
            || rots.iter().any(|m| max_abs_entry(m) > entry_bound)
        {
            continue;
        }
        let base = GradedFreeComplex::new(0, ranks, diffs).expect("shapes are consistent");
        return CircleComplex::new(base, rots).expect("block models satisfy the rotation laws");
    }
}

/// A random dyadic rational with denominator at most `2^max_exp` and absolute
/// value at most 3.
pub fn random_dyadic<R: Rng>(rng: &mut R, max_exp: u32) -> Dyadic {
    let exp = rng.gen_range(0..=max_exp);
    Dyadic::new(rng.gen_range(-3 * (1i64 << exp)..=3 * (1i64 << exp)), exp)
}

/// A random elementary cube in `R^ambient` with at most `max_dim`
/// nondegenerate components, each of integer length 1 or 2.
pub fn random_elementary_cube<R: Rng>(
    rng: &mut R,
    ambient: usize,
    max_dim: usize,
) -> ElementaryCube {
    let mut components = Vec::new();
    let mut dim = 0;
    for _ in 0..ambient {
        let a = random_dyadic(rng, 2);
        if dim < max_dim && rng.gen_bool(0.6) {
            let b = a + Dyadic::integer(rng.gen_range(1..=2));
            components.push(Component::Interval(a, b));
            dim += 1;
        } else {
            components.push(Component::Point(a));
        }
    }
    ElementaryCube::new(components).expect("generated intervals are increasing")
}

/// A random labeling of a random carrier: the nondegenerate axes in shuffled
/// order, each possibly reversed, plus an occasional collapsed slot when
/// `allow_collapsed` is set.
pub fn random_labeled_cube<R: Rng>(
    rng: &mut R,
    ambient: usize,
    max_dim: usize,
    allow_collapsed: bool,
) -> LabeledCube {
    let carrier = random_elementary_cube(rng, ambient, max_dim);
    let mut axes = carrier.interval_axes();
    for i in (1..axes.len()).rev() {
        let j = rng.gen_range(0..=i);
        axes.swap(i, j);
    }
    let mut coords: Vec<CoordMap> = axes
        .into_iter()
        .map(|component| CoordMap::To {
            component,
            reversed: rng.gen_bool(0.3),
        })
        .collect();
    if allow_collapsed && rng.gen_bool(0.25) {
        let slot = rng.gen_range(0..=coords.len());
        coords.insert(slot, CoordMap::Collapsed);
    }
    LabeledCube::new(carrier, coords).expect("labels cover exactly the nondegenerate axes")
}

/// A random chain with the given number of terms (coefficients in `[-3, 3]`).
pub fn random_cubical_chain<R: Rng>(
    rng: &mut R,
    ambient: usize,
    max_dim: usize,
    terms: usize,
    allow_collapsed: bool,
) -> CubicalChain {
    let mut chain = CubicalChain::zero();
    for _ in 0..terms {
        let coeff = rng.gen_range(-3..=3i64);
        chain.add_term(
            random_labeled_cube(rng, ambient, max_dim, allow_collapsed),
            coeff,
        );
    }
    chain
}

/// A random generating set for a cubical complex.
pub fn random_cubical_set<R: Rng>(
    rng: &mut R,
    ambient: usize,
    count: usize,
    max_dim: usize,
) -> Vec<ElementaryCube> {
    (0..count)
        .map(|_| random_elementary_cube(rng, ambient, max_dim))
        .collect()
}

/// A cut level on the given axis that avoids every vertex of the chain, found
/// by rejection sampling among eighth-integer levels.
pub fn generic_cut_level<R: Rng>(rng: &mut R, chain: &CubicalChain, axis: usize) -> Dyadic {
    'outer: for _ in 0..500 {
        let candidate = Dyadic::new(rng.gen_range(-47..=47), 3);
        for (cube, _) in chain.terms() {
            match cube.carrier().components()[axis] {
                Component::Point(a) => {
                    if a == candidate {
                        continue 'outer;
                    }
                }
                Component::Interval(a, b) => {
                    if a == candidate || b == candidate {
                        continue 'outer;
                    }
                }
            }
        }
        return candidate;
    }
    unreachable!("a chain has finitely many vertex levels, so some eighth is generic")
}
