//! The flow complex of a height-like function on an implicit surface: find
//! the critical points, count the connecting flow lines with signs, and turn
//! the result into a chain complex whose homology is the homology of the
//! surface. The critical values additionally filter the complex, and the
//! filtration can be torn apart level by level and reassembled through long
//! exact sequences.

pub mod critical;
pub mod expr;
pub mod flow;
mod geom;
pub mod incidence;
pub mod surface;

pub use critical::{find_critical_points, CriticalPoint};
pub use expr::{parse_expr, Expr, Program};
pub use flow::{descend, Terminal, Trajectory};
pub use incidence::{incidence_matrices, IncidenceMatrices};
pub use surface::Surface;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::complex::{
    homology, ChainMap, Coefficients, GradedFreeComplex, HomologyGroup, ShortExactSequence,
};
use crate::int::IntegerMatrix;
use crate::{Error, Result};

/// Two critical values within this distance share a level of the filtration.
const LEVEL_TOLERANCE: f64 = 1e-9;

/// How a set of critical data came to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Entered by hand, e.g. a textbook cell structure.
    Symbolic,
    /// Computed from a surface by the critical point and flow machinery.
    Numerical,
}

/// One critical point, as the complex layer sees it.
#[derive(Clone, Debug)]
pub struct MorseCriticalPoint {
    pub position: [f64; 3],
    pub value: f64,
    pub index: usize,
}

/// Critical points sorted by value together with the signed flow-line counts
/// between adjacent indices: `boundaries[k-1]` maps index-`k` points to
/// index-`k-1` points.
#[derive(Clone, Debug)]
pub struct MorseData {
    pub provenance: Provenance,
    points: Vec<MorseCriticalPoint>,
    boundaries: Vec<IntegerMatrix>,
}

impl MorseData {
    /// Package hand-entered critical data, validating that the points come
    /// sorted by value and that the boundary matrix shapes match the index
    /// counts.
    pub fn symbolic(
        points: Vec<MorseCriticalPoint>,
        boundaries: Vec<IntegerMatrix>,
    ) -> Result<Self> {
        let data = MorseData {
            provenance: Provenance::Symbolic,
            points,
            boundaries,
        };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].value < w[0].value {
                return Err(Error::InvalidComplex(
                    "critical points must be sorted by value".into(),
                ));
            }
        }
        let degrees = self.boundaries.len() + 1;
        for p in &self.points {
            if p.index >= degrees {
                return Err(Error::InvalidComplex(format!(
                    "critical point of index {} but only {} boundary matrices",
                    p.index,
                    self.boundaries.len()
                )));
            }
        }
        let counts = self.index_counts();
        for (k, b) in self.boundaries.iter().enumerate() {
            if b.rows() != counts[k] || b.cols() != counts[k + 1] {
                return Err(Error::InvalidComplex(format!(
                    "boundary from index {} has shape {}x{}, expected {}x{}",
                    k + 1,
                    b.rows(),
                    b.cols(),
                    counts[k],
                    counts[k + 1]
                )));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[MorseCriticalPoint] {
        &self.points
    }

    pub fn boundaries(&self) -> &[IntegerMatrix] {
        &self.boundaries
    }

    /// Number of critical points of each index, `0..=boundaries.len()`.
    pub fn index_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.boundaries.len() + 1];
        for p in &self.points {
            counts[p.index] += 1;
        }
        counts
    }

    /// Ids into `points`, grouped by index and keeping the value order.
    fn ids_by_index(&self) -> Vec<Vec<usize>> {
        let mut ids = vec![Vec::new(); self.boundaries.len() + 1];
        for (i, p) in self.points.iter().enumerate() {
            ids[p.index].push(i);
        }
        ids
    }
}

/// Run the whole pipeline on a surface: critical points, flow lines, signed
/// counts. The boundary matrices are verified to square to zero over the
/// integers before the data is returned.
pub fn morse_data(surface: &Surface) -> Result<MorseData> {
    let critical = find_critical_points(surface)?;
    let matrices = incidence_matrices(surface, &critical)?;
    let data = MorseData {
        provenance: Provenance::Numerical,
        points: critical
            .iter()
            .map(|p| MorseCriticalPoint {
                position: p.position,
                value: p.value,
                index: p.index,
            })
            .collect(),
        boundaries: vec![matrices.d1, matrices.d2],
    };
    data.validate()?;
    build_morse_complex(&data, Coefficients::Integers)?;
    Ok(data)
}

/// The chain complex generated by the critical points, graded by index, with
/// the flow-line counts as differential. The differential is verified to
/// square to zero over the requested ring — a complex that only closes
/// modulo `m` is accepted for `Mod(m)` and rejected over the integers.
pub fn build_morse_complex(
    data: &MorseData,
    coefficients: Coefficients,
) -> Result<GradedFreeComplex> {
    let counts = data.index_counts();
    let labels = data
        .ids_by_index()
        .iter()
        .map(|ids| ids.iter().map(|i| format!("p{i}")).collect())
        .collect();
    let complex =
        GradedFreeComplex::with_labels(0, counts, labels, data.boundaries.to_vec())?;
    match coefficients {
        Coefficients::Integers | Coefficients::Rationals => complex.verify()?,
        Coefficients::Mod(m) => complex.verify_mod(m)?,
    }
    Ok(complex)
}

/// Homology of the flow complex over the chosen coefficients.
pub fn morse_homology(
    data: &MorseData,
    coefficients: Coefficients,
) -> Result<Vec<HomologyGroup>> {
    let complex = build_morse_complex(data, coefficients)?;
    homology(&complex, coefficients)
}

/// One level of the critical-value filtration.
#[derive(Clone, Debug)]
pub struct FiltrationLevel {
    /// Representative critical value (the smallest in the level).
    pub value: f64,
    /// Ids of the critical points on this level.
    pub points: Vec<usize>,
    /// How many of them have each index: the level contributes a free
    /// summand of this rank in each degree.
    pub multiplicities: Vec<usize>,
}

/// The critical-value filtration of the flow complex, with the homology
/// reassembled level by level through long exact sequences.
#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub levels: Vec<FiltrationLevel>,
    /// Rational Betti numbers accumulated by the level-by-level recursion
    /// `rank H_k(up to level i) = rank H_k(below) + multiplicity
    /// - rank delta_k - rank delta_{k+1}`.
    pub betti: Vec<usize>,
}

/// Slice the complex along critical values and reassemble its homology.
///
/// Each level's sublevel complex sits in a short exact sequence between the
/// previous sublevel complex and a quotient with zero differential; the
/// sequences are verified exactly (including the long exact sequence in
/// homology), and the connecting-map ranks drive the Betti recursion.
pub fn filtration_report(data: &MorseData) -> Result<FiltrationReport> {
    let degree_count = data.boundaries.len() + 1;
    let ids_by_index = data.ids_by_index();

    // Group value-sorted points into levels.
    let mut levels: Vec<FiltrationLevel> = Vec::new();
    let mut level_of = vec![0usize; data.points.len()];
    for (i, p) in data.points.iter().enumerate() {
        match levels.last_mut() {
            Some(level) if (p.value - level.value).abs() <= LEVEL_TOLERANCE => {
                level.points.push(i);
                level.multiplicities[p.index] += 1;
            }
            _ => levels.push(FiltrationLevel {
                value: p.value,
                points: vec![i],
                multiplicities: {
                    let mut m = vec![0usize; degree_count];
                    m[p.index] = 1;
                    m
                },
            }),
        }
        level_of[i] = levels.len() - 1;
    }

    // The filtration is respected exactly when every flow-line count points
    // from a strictly higher level to a strictly lower one. In particular
    // incidences inside one level must vanish, which is what makes each
    // level's quotient differential zero.
    for (k, b) in data.boundaries.iter().enumerate() {
        for (r, &row_id) in ids_by_index[k].iter().enumerate() {
            for (c, &col_id) in ids_by_index[k + 1].iter().enumerate() {
                if !b.at(r, c).is_zero() && level_of[row_id] >= level_of[col_id] {
                    return Err(Error::InvalidComplex(format!(
                        "incidence from p{col_id} to p{row_id} does not descend \
                         the critical-value filtration"
                    )));
                }
            }
        }
    }

    // Points are value-sorted, so within each index the points of the first
    // i levels form a prefix, and the sublevel complex is a leading block of
    // the full boundary matrices.
    let prefix_counts = |through: usize| -> Vec<usize> {
        (0..degree_count)
            .map(|k| {
                ids_by_index[k]
                    .iter()
                    .filter(|&&id| level_of[id] <= through)
                    .count()
            })
            .collect()
    };
    let sublevel_complex = |through: usize| -> Result<GradedFreeComplex> {
        let counts = prefix_counts(through);
        let diffs = (0..data.boundaries.len())
            .map(|k| block(&data.boundaries[k], counts[k], counts[k + 1]))
            .collect();
        GradedFreeComplex::new(0, counts, diffs)
    };

    let mut betti: Vec<i64> = levels[0]
        .multiplicities
        .iter()
        .map(|&m| m as i64)
        .collect();
    for i in 1..levels.len() {
        let sub = sublevel_complex(i - 1)?;
        let total = sublevel_complex(i)?;
        let quotient = GradedFreeComplex::new(
            0,
            levels[i].multiplicities.clone(),
            (0..degree_count - 1)
                .map(|k| {
                    IntegerMatrix::zeros(
                        levels[i].multiplicities[k],
                        levels[i].multiplicities[k + 1],
                    )
                })
                .collect(),
        )?;

        let include_maps = (0..degree_count)
            .map(|k| prefix_inclusion(total.rank(k as i64), sub.rank(k as i64)))
            .collect();
        let project_maps = (0..degree_count)
            .map(|k| suffix_projection(quotient.rank(k as i64), total.rank(k as i64)))
            .collect();
        let ses = ShortExactSequence {
            include: ChainMap::new(&sub, &total, 0, include_maps)?,
            project: ChainMap::new(&total, &quotient, 0, project_maps)?,
            sub,
            total,
            quotient,
        };
        let les = ses.long_exact_check()?;
        if !les.all_exact() {
            return Err(Error::NotExact(format!(
                "long exact sequence fails at filtration level {i}"
            )));
        }

        // Rational rank of each connecting map `H_k(quotient) ->
        // H_{k-1}(sublevel)`: span the connecting chains together with the
        // boundaries they are measured against.
        let mut delta_rank = vec![0i64; degree_count + 1];
        for k in 1..degree_count as i64 {
            let m_k = ses.quotient.rank(k);
            if m_k == 0 {
                continue;
            }
            let mut chains = Vec::with_capacity(m_k);
            for j in 0..m_k {
                let mut z = vec![BigInt::zero(); m_k];
                z[j] = BigInt::one();
                chains.push(ses.connecting_chain(k, &z)?);
            }
            let chains = IntegerMatrix::from_columns(ses.sub.rank(k - 1), &chains);
            let bounds = ses.sub.differential(k);
            delta_rank[k as usize] =
                (bounds.hstack(&chains).rank_rational() - bounds.rank_rational()) as i64;
        }

        for k in 0..degree_count {
            betti[k] += levels[i].multiplicities[k] as i64 - delta_rank[k] - delta_rank[k + 1];
            if betti[k] < 0 {
                return Err(Error::Internal(format!(
                    "Betti recursion went negative in degree {k} at level {i}"
                )));
            }
        }
    }

    Ok(FiltrationReport {
        levels,
        betti: betti.into_iter().map(|b| b as usize).collect(),
    })
}

/// Top-left block of a matrix.
fn block(m: &IntegerMatrix, rows: usize, cols: usize) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, m.at(i, j).clone());
        }
    }
    out
}

/// The inclusion of the first `sub` basis vectors into `total` of them.
fn prefix_inclusion(total: usize, sub: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(total, sub);
    for i in 0..sub {
        m.set(i, i, BigInt::one());
    }
    m
}

/// The projection of `total` basis vectors onto the last `quot` of them.
fn suffix_projection(quot: usize, total: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(quot, total);
    for i in 0..quot {
        m.set(i, total - quot + i, BigInt::one());
    }
    m
}
