//! Downhill gradient flow of `f` on the surface `{F = 0}`.
//!
//! The flow integrates `ẋ = -g` where `g = ∇f - ⟨∇f, n̂⟩n̂` is the tangential
//! part of the gradient (`n̂ = ∇F/|∇F|`, which extends smoothly off the
//! surface). Steps are fourth-order Runge–Kutta followed by a Newton
//! projection back onto the surface, with the arc length per step throttled
//! near critical points so capture balls are never jumped over.

use super::critical::CriticalPoint;
use super::geom::{dist, dot, norm, normalize, reject, sub};
use super::surface::Surface;
use crate::{Error, Result};

/// Base arc length advanced per step.
const ARC_STEP: f64 = 0.01;
/// Fraction of the distance to the nearest critical point allowed per step.
const PROXIMITY_FACTOR: f64 = 0.3;
/// Hard cap on steps per trajectory.
const MAX_STEPS: usize = 100_000;
/// A trajectory this close to a minimum has arrived.
const MINIMUM_CAPTURE: f64 = 1e-3;
/// A trajectory this close to a saddle lies on its stable manifold for all
/// practical purposes; only converged separatrices get this close.
const SADDLE_CAPTURE: f64 = 1e-5;
/// Passing through this ball around a saddle is recorded as a passage.
pub const EVENT_RADIUS: f64 = 0.05;
/// Constraint residual the projection drives the point to.
const PROJECTION_TOL: f64 = 1e-12;
/// Retries (each halving the step) when a step breaks monotonicity.
const MAX_RETRIES: usize = 40;

/// Where a downhill trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Captured by the minimum with this id in the critical point list.
    Minimum(usize),
    /// Captured by the saddle with this id — a separatrix.
    Saddle(usize),
}

/// One recorded pass through a saddle's event ball.
#[derive(Clone, Copy, Debug)]
pub struct Passage {
    /// Id of the saddle passed.
    pub point: usize,
    /// Closest approach to the saddle while inside the ball.
    pub closest: f64,
    /// Offset from the saddle at the moment of leaving the ball.
    pub exit: [f64; 3],
}

/// A completed downhill trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<[f64; 3]>,
    pub values: Vec<f64>,
    /// `∫ |g|² dt` along the path, which must equal the drop in `f`.
    pub energy: f64,
    pub terminal: Terminal,
    pub passages: Vec<Passage>,
}

impl Trajectory {
    pub fn start_value(&self) -> f64 {
        *self.values.first().expect("trajectories are nonempty")
    }

    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("trajectories are nonempty")
    }
}

/// Newton-project a point onto the surface along the constraint gradient.
pub fn project_to_surface(
    surface: &Surface,
    start: [f64; 3],
    scratch: &mut Vec<f64>,
) -> Result<[f64; 3]> {
    let mut y = start;
    for _ in 0..25 {
        let jet = surface.flow_jet(y, scratch);
        if jet.constraint.abs() <= PROJECTION_TOL {
            return Ok(y);
        }
        let g2 = dot(jet.constraint_gradient, jet.constraint_gradient);
        if g2 < 1e-18 {
            break;
        }
        let t = jet.constraint / g2;
        y = [
            y[0] - t * jet.constraint_gradient[0],
            y[1] - t * jet.constraint_gradient[1],
            y[2] - t * jet.constraint_gradient[2],
        ];
    }
    Err(Error::FlowFailed(format!(
        "projection onto the surface did not converge from {start:?}"
    )))
}

/// The tangential gradient `∇f - ⟨∇f, n̂⟩n̂` and the value of `f`, or `None`
/// where the constraint gradient vanishes.
fn tangential_gradient(
    surface: &Surface,
    y: [f64; 3],
    scratch: &mut Vec<f64>,
) -> Option<([f64; 3], f64)> {
    let jet = surface.flow_jet(y, scratch);
    let n = normalize(jet.constraint_gradient)?;
    Some((reject(jet.function_gradient, n), jet.function))
}

/// Flow downhill from `start` until capture at a minimum or a saddle.
pub fn descend(
    surface: &Surface,
    points: &[CriticalPoint],
    start: [f64; 3],
) -> Result<Trajectory> {
    let mut scratch = Vec::new();
    let mut y = project_to_surface(surface, start, &mut scratch)?;
    let (mut g, mut f) = tangential_gradient(surface, y, &mut scratch)
        .ok_or_else(|| Error::FlowFailed("constraint gradient vanished".into()))?;

    let mut path = vec![y];
    let mut values = vec![f];
    let mut energy = 0.0;
    // Per-saddle passage state: closest approach so far while inside the
    // event ball, `None` while outside.
    let mut inside: Vec<Option<f64>> = points
        .iter()
        .map(|p| {
            let d = dist(y, p.position);
            (p.index == 1 && d < EVENT_RADIUS).then_some(d)
        })
        .collect();
    let mut passages = Vec::new();

    for _ in 0..MAX_STEPS {
        // Capture checks at the current point.
        let mut nearest = f64::INFINITY;
        for (id, p) in points.iter().enumerate() {
            let d = dist(y, p.position);
            nearest = nearest.min(d);
            if p.index == 0 && d < MINIMUM_CAPTURE {
                return Ok(Trajectory {
                    points: path,
                    values,
                    energy,
                    terminal: Terminal::Minimum(id),
                    passages,
                });
            }
            if p.index == 1 && d < SADDLE_CAPTURE {
                return Ok(Trajectory {
                    points: path,
                    values,
                    energy,
                    terminal: Terminal::Saddle(id),
                    passages,
                });
            }
        }

        let speed = norm(g);
        if speed < 1e-14 {
            return Err(Error::FlowFailed(format!(
                "flow stalled away from every critical point near {y:?}"
            )));
        }
        let arc = ARC_STEP.min(PROXIMITY_FACTOR * nearest);
        let mut h = arc / speed;

        // One Runge–Kutta step with the energy integrand carried alongside;
        // halve the step until the projected result decreases `f`.
        let mut accepted = None;
        for _ in 0..=MAX_RETRIES {
            if let Some(step) = rk4_attempt(surface, y, g, h, &mut scratch) {
                let (y1, de) = step;
                if surface.in_box(y1, 0.0) {
                    if let Ok(projected) = project_to_surface(surface, y1, &mut scratch) {
                        if let Some((g1, f1)) = tangential_gradient(surface, projected, &mut scratch)
                        {
                            if f1 < f {
                                accepted = Some((projected, g1, f1, de));
                                break;
                            }
                        }
                    }
                } else {
                    return Err(Error::FlowFailed(format!(
                        "trajectory left the search box near {y1:?}"
                    )));
                }
            }
            h *= 0.5;
        }
        let Some((y1, g1, f1, de)) = accepted else {
            return Err(Error::FlowFailed(format!(
                "no monotone step found near {y:?}"
            )));
        };

        y = y1;
        g = g1;
        f = f1;
        energy += de;
        path.push(y);
        values.push(f);

        for (id, p) in points.iter().enumerate() {
            if p.index != 1 {
                continue;
            }
            let d = dist(y, p.position);
            match inside[id] {
                None if d < EVENT_RADIUS => inside[id] = Some(d),
                Some(closest) if d < EVENT_RADIUS => inside[id] = Some(closest.min(d)),
                Some(closest) => {
                    passages.push(Passage {
                        point: id,
                        closest,
                        exit: sub(y, p.position),
                    });
                    inside[id] = None;
                }
                None => {}
            }
        }
    }

    Err(Error::FlowFailed(format!(
        "step limit reached; last point {y:?}"
    )))
}

/// One classical RK4 step of `ẋ = -g(x)` from `y` with the first stage `g`
/// already evaluated. Returns the endpoint and the energy increment
/// `∫ |g|² dt` integrated with the same stages.
fn rk4_attempt(
    surface: &Surface,
    y: [f64; 3],
    g: [f64; 3],
    h: f64,
    scratch: &mut Vec<f64>,
) -> Option<([f64; 3], f64)> {
    let at = |base: [f64; 3], dir: [f64; 3], t: f64| {
        [base[0] - t * dir[0], base[1] - t * dir[1], base[2] - t * dir[2]]
    };
    let k1 = g;
    let (k2, _) = tangential_gradient(surface, at(y, k1, h / 2.0), scratch)?;
    let (k3, _) = tangential_gradient(surface, at(y, k2, h / 2.0), scratch)?;
    let (k4, _) = tangential_gradient(surface, at(y, k3, h), scratch)?;
    let y1 = [
        y[0] - h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] - h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] - h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ];
    let sq = |v: [f64; 3]| dot(v, v);
    let de = h / 6.0 * (sq(k1) + 2.0 * sq(k2) + 2.0 * sq(k3) + sq(k4));
    Some((y1, de))
}
