//! Signed counts of flow lines between critical points of adjacent index.
//!
//! Saddle-to-minimum counts come from the two branches of each saddle's
//! descending direction. Maximum-to-saddle counts come from a bisection
//! search around a small circle of seeds at each maximum: a flow line into a
//! saddle shows up as an angle where the trajectory's exit side at that
//! saddle flips, and the flip direction carries the sign.

use std::collections::HashMap;

use super::critical::CriticalPoint;
use super::flow::{descend, Terminal, Trajectory, EVENT_RADIUS};
use super::geom::{add_scaled, dot};
use super::surface::Surface;
use crate::int::{bi, IntegerMatrix};
use crate::{Error, Result};

/// Distance from a critical point at which flow seeds are planted.
const SEED_RADIUS: f64 = 1e-2;
/// Seeds on the initial circle around each maximum.
const CIRCLE_SEEDS: usize = 64;
/// A passage counts as solid — part of a trajectory's label — when its
/// closest approach is within this fraction of the event ball.
const SOLID_FRACTION: f64 = 0.3;
/// Bisection stops refining below this angular width.
const ANGLE_FLOOR: f64 = 1e-9;
/// Trajectory budget per maximum.
const FLOW_BUDGET: usize = 10_000;

/// Boundary matrices of the flow complex: `d1` maps saddles to minima,
/// `d2` maps maxima to saddles. Rows and columns follow the order of the
/// critical point list restricted to each index.
pub struct IncidenceMatrices {
    pub d1: IntegerMatrix,
    pub d2: IntegerMatrix,
}

pub fn incidence_matrices(
    surface: &Surface,
    points: &[CriticalPoint],
) -> Result<IncidenceMatrices> {
    let of_index =
        |k: usize| -> Vec<usize> { (0..points.len()).filter(|&i| points[i].index == k).collect() };
    let minima = of_index(0);
    let saddles = of_index(1);
    let maxima = of_index(2);
    let min_row: HashMap<usize, usize> =
        minima.iter().enumerate().map(|(r, &id)| (id, r)).collect();
    let saddle_row: HashMap<usize, usize> =
        saddles.iter().enumerate().map(|(r, &id)| (id, r)).collect();

    let mut d1 = IntegerMatrix::zeros(minima.len(), saddles.len());
    for (j, &s) in saddles.iter().enumerate() {
        for (minimum, count) in saddle_column(surface, points, s)? {
            let i = min_row[&minimum];
            let updated = d1.at(i, j) + bi(count);
            d1.set(i, j, updated);
        }
    }

    let mut d2 = IntegerMatrix::zeros(saddles.len(), maxima.len());
    if !saddles.is_empty() {
        for (j, &m) in maxima.iter().enumerate() {
            for (saddle, count) in maximum_column(surface, points, m)? {
                let i = saddle_row[&saddle];
                let updated = d2.at(i, j) + bi(count);
                d2.set(i, j, updated);
            }
        }
    }

    Ok(IncidenceMatrices { d1, d2 })
}

/// Flow both branches of a saddle's descending direction. A branch reaching
/// a minimum contributes its branch sign; a branch captured by another
/// saddle is a flow line between saddles and contributes to no minimum.
fn saddle_column(
    surface: &Surface,
    points: &[CriticalPoint],
    saddle: usize,
) -> Result<Vec<(usize, i64)>> {
    let q = &points[saddle];
    let mut column = Vec::new();
    for branch in [1.0, -1.0] {
        let seed = add_scaled(q.position, q.descending(), branch * SEED_RADIUS);
        let trajectory = descend(surface, points, seed)?;
        match trajectory.terminal {
            Terminal::Minimum(m) => column.push((m, branch as i64)),
            Terminal::Saddle(_) => {}
        }
    }
    Ok(column)
}

/// The label of a trajectory: which saddles it passed solidly, on which exit
/// side of each, and where it ended. Trajectories with equal labels are
/// homotopic as far as the incidence count is concerned.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FlowLabel {
    events: Vec<(usize, i64)>,
    terminal: Terminal,
}

fn label_of(points: &[CriticalPoint], trajectory: &Trajectory) -> FlowLabel {
    let events = trajectory
        .passages
        .iter()
        .filter(|p| p.closest <= SOLID_FRACTION * EVENT_RADIUS)
        .map(|p| {
            let side = dot(p.exit, points[p.point].descending());
            (p.point, if side >= 0.0 { 1 } else { -1 })
        })
        .collect();
    FlowLabel {
        events,
        terminal: trajectory.terminal,
    }
}

/// How two labels on the ends of an arc differ.
enum Divergence {
    /// The first difference is an exit-side flip at one saddle: the arc
    /// contains a flow line into that saddle, with this sweep sign.
    Separatrix { saddle: usize, sign: i64 },
    /// The first difference is an event appearing or disappearing — the
    /// signature of a passage drifting across the solid threshold, not of a
    /// flow line.
    Structural,
    /// Events agree but the terminals differ: a flow line was missed.
    TerminalOnly,
}

fn diverge(lo: &FlowLabel, hi: &FlowLabel) -> Option<Divergence> {
    if lo == hi {
        return None;
    }
    for (a, b) in lo.events.iter().zip(hi.events.iter()) {
        if a == b {
            continue;
        }
        if a.0 == b.0 {
            // Exit side flipped at the same saddle. The descending direction
            // sweeps from its negative to its positive side as the angle
            // increases exactly when the flow line counts positively.
            return Some(Divergence::Separatrix {
                saddle: a.0,
                sign: if a.1 < b.1 { 1 } else { -1 },
            });
        }
        return Some(Divergence::Structural);
    }
    if lo.events.len() != hi.events.len() {
        return Some(Divergence::Structural);
    }
    Some(Divergence::TerminalOnly)
}

/// Outcome of flowing one seed angle.
enum Outcome {
    Label(FlowLabel),
    Separatrix(usize),
}

struct CircleTracer<'a> {
    surface: &'a Surface,
    points: &'a [CriticalPoint],
    maximum: usize,
    flows_used: usize,
}

impl<'a> CircleTracer<'a> {
    fn seed(&self, angle: f64) -> [f64; 3] {
        let p = &self.points[self.maximum];
        let q = add_scaled(p.position, p.frame[0], SEED_RADIUS * angle.cos());
        add_scaled(q, p.frame[1], SEED_RADIUS * angle.sin())
    }

    fn flow(&mut self, angle: f64) -> Result<Outcome> {
        if self.flows_used >= FLOW_BUDGET {
            return Err(Error::UnresolvedIncidence {
                from_point: self.maximum,
                to_point: self.maximum,
                reason: format!("trajectory budget of {FLOW_BUDGET} exhausted"),
            });
        }
        self.flows_used += 1;
        let trajectory = descend(self.surface, self.points, self.seed(angle))?;
        Ok(match trajectory.terminal {
            Terminal::Saddle(s) => Outcome::Separatrix(s),
            Terminal::Minimum(_) => Outcome::Label(label_of(self.points, &trajectory)),
        })
    }

    /// A seed at `angle` was captured by `saddle`. Find clean labels on both
    /// flanks of the capture corridor and read the sweep sign off them.
    fn resolve_flanks(
        &mut self,
        angle: f64,
        saddle: usize,
        width_hint: f64,
    ) -> Result<(f64, FlowLabel, f64, FlowLabel, i64)> {
        let mut eps = width_hint / 8.0;
        let cap = width_hint * 0.49;
        for _ in 0..60 {
            let left = self.flow(angle - eps)?;
            let right = self.flow(angle + eps)?;
            match (left, right) {
                (Outcome::Label(l), Outcome::Label(r)) => {
                    if let Some(Divergence::Separatrix { saddle: s, sign }) = diverge(&l, &r) {
                        if s == saddle {
                            return Ok((angle - eps, l, angle + eps, r, sign));
                        }
                    }
                    // Labels too coarse or polluted by threshold noise —
                    // move in closer.
                    eps /= 8.0;
                }
                // Still inside the capture corridor — move out.
                _ => eps = (eps * 4.0).min(cap),
            }
        }
        Err(Error::UnresolvedIncidence {
            from_point: self.maximum,
            to_point: saddle,
            reason: "no clean exit-side flip brackets the captured flow line".into(),
        })
    }
}

/// All signed flow-line counts out of one maximum, by bisection over the
/// seed circle.
fn maximum_column(
    surface: &Surface,
    points: &[CriticalPoint],
    maximum: usize,
) -> Result<Vec<(usize, i64)>> {
    let mut tracer = CircleTracer {
        surface,
        points,
        maximum,
        flows_used: 0,
    };
    let mut counts: Vec<(usize, i64)> = Vec::new();
    let step = std::f64::consts::TAU / CIRCLE_SEEDS as f64;

    // Sample the circle. Seeds landing dead on a flow line are resolved into
    // a counted crossing plus a label on either flank; the span between the
    // two flanks is settled and must not become an arc of its own.
    let mut ring: Vec<(f64, FlowLabel, bool)> = Vec::new();
    for i in 0..CIRCLE_SEEDS {
        let angle = i as f64 * step;
        match tracer.flow(angle)? {
            Outcome::Label(label) => ring.push((angle, label, false)),
            Outcome::Separatrix(s) => {
                let (la, ll, ra, rl, sign) = tracer.resolve_flanks(angle, s, step)?;
                counts.push((s, sign));
                ring.push((la, ll, true));
                ring.push((ra, rl, false));
            }
        }
    }

    let mut arcs: Vec<(f64, FlowLabel, f64, FlowLabel)> = Vec::new();
    for w in ring.windows(2) {
        if !w[0].2 {
            arcs.push((w[0].0, w[0].1.clone(), w[1].0, w[1].1.clone()));
        }
    }
    let first = ring.first().expect("ring is nonempty").clone();
    let last = ring.last().expect("ring is nonempty").clone();
    if !last.2 {
        arcs.push((last.0, last.1, first.0 + std::f64::consts::TAU, first.1));
    }

    while let Some((lo, label_lo, hi, label_hi)) = arcs.pop() {
        let Some(divergence) = diverge(&label_lo, &label_hi) else {
            continue;
        };
        let mid = 0.5 * (lo + hi);
        if hi - lo < ANGLE_FLOOR || mid <= lo || mid >= hi {
            match divergence {
                Divergence::Separatrix { saddle, sign } => counts.push((saddle, sign)),
                Divergence::Structural => {}
                Divergence::TerminalOnly => {
                    let to = match label_lo.terminal {
                        Terminal::Minimum(m) | Terminal::Saddle(m) => m,
                    };
                    return Err(Error::UnresolvedIncidence {
                        from_point: maximum,
                        to_point: to,
                        reason: "trajectories split between endpoints with no \
                                 recorded saddle passage in between"
                            .into(),
                    });
                }
            }
            continue;
        }
        match tracer.flow(mid)? {
            Outcome::Label(label) => {
                arcs.push((lo, label_lo, mid, label.clone()));
                arcs.push((mid, label, hi, label_hi));
            }
            Outcome::Separatrix(s) => {
                let (la, ll, ra, rl, sign) = tracer.resolve_flanks(mid, s, hi - lo)?;
                counts.push((s, sign));
                arcs.push((lo, label_lo, la, ll));
                arcs.push((ra, rl, hi, label_hi));
            }
        }
    }

    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::critical::find_critical_points;
    use num_traits::Zero;

    #[test]
    fn sphere_has_empty_incidence_matrices() {
        let surface = Surface::sphere();
        let points = find_critical_points(&surface).unwrap();
        let m = incidence_matrices(&surface, &points).unwrap();
        assert_eq!((m.d1.rows(), m.d1.cols()), (1, 0));
        assert_eq!((m.d2.rows(), m.d2.cols()), (0, 1));
    }

    #[test]
    fn dented_sphere_incidences() {
        // One minimum, one saddle, two maxima. Both saddle branches fall to
        // the same minimum (net zero), and each maximum sends exactly one
        // flow line into the saddle.
        let surface = Surface::dented_sphere();
        let points = find_critical_points(&surface).unwrap();
        let m = incidence_matrices(&surface, &points).unwrap();
        assert_eq!((m.d1.rows(), m.d1.cols()), (1, 1));
        assert!(m.d1.at(0, 0).is_zero());
        assert_eq!((m.d2.rows(), m.d2.cols()), (1, 2));
        assert_eq!(m.d2.at(0, 0) * m.d2.at(0, 0), crate::int::bi(1));
        assert_eq!(m.d2.at(0, 1) * m.d2.at(0, 1), crate::int::bi(1));
    }

    #[test]
    fn torus_incidences_vanish() {
        // Each saddle's branches either cancel at the minimum or run into
        // the other saddle; the maximum's two flow lines into the upper
        // saddle cross it on opposite sides and cancel.
        let surface = Surface::torus();
        let points = find_critical_points(&surface).unwrap();
        let m = incidence_matrices(&surface, &points).unwrap();
        assert_eq!((m.d1.rows(), m.d1.cols()), (1, 2));
        assert_eq!((m.d2.rows(), m.d2.cols()), (2, 1));
        for j in 0..2 {
            assert!(m.d1.at(0, j).is_zero(), "d1 column {j}");
            assert!(m.d2.at(j, 0).is_zero(), "d2 row {j}");
        }
    }
}
