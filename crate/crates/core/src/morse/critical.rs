//! Locating and classifying the critical points of `f` restricted to the
//! surface `{F = 0}`.
//!
//! A constrained critical point satisfies `∇f = λ∇F` and `F = 0`. The finder
//! runs Newton's method on that square system from a grid of seeds across the
//! search box, then classifies each accepted point by the eigenvalues of the
//! Hessian of `f - λF` restricted to the tangent plane.

use super::geom::{
    add_scaled, cross, det3, dot, norm, normalize, reject, solve4, sub, symmetric_eigen_2x2,
};
use super::surface::Surface;
use crate::{Error, Result};

/// Acceptance thresholds: the constraint residual and the stationarity
/// residual of a point the finder reports.
const CONSTRAINT_TOL: f64 = 1e-10;
const STATIONARY_TOL: f64 = 1e-8;
/// Two candidates closer than this are the same critical point.
const DEDUPE_RADIUS: f64 = 1e-6;
/// A restricted-Hessian eigenvalue inside this margin around zero means the
/// critical point is degenerate and the Morse machinery must refuse it.
const DEGENERACY_MARGIN: f64 = 1e-6;
/// Newton seeds per axis across the search box.
const SEEDS_PER_AXIS: usize = 9;

/// A nondegenerate critical point of `f` on the surface, with the local
/// frames the flow machinery needs.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub position: [f64; 3],
    pub value: f64,
    /// Number of descending directions: 0 minimum, 1 saddle, 2 maximum.
    pub index: usize,
    /// Lagrange multiplier at the point.
    pub multiplier: f64,
    /// Unit surface normal `∇F/|∇F|`.
    pub normal: [f64; 3],
    /// Restricted-Hessian eigenvalues, ascending.
    pub eigenvalues: [f64; 2],
    /// Unit tangent eigenvectors matching `eigenvalues`. Each has its
    /// largest-magnitude coordinate positive; for an index-2 point the pair
    /// is additionally oriented so `det[e1, e2, normal] > 0`.
    pub frame: [[f64; 3]; 2],
}

impl CriticalPoint {
    /// The descending eigendirection of a saddle.
    pub fn descending(&self) -> [f64; 3] {
        self.frame[0]
    }
}

/// Find all critical points in the search box, sorted by `(value, position)`.
pub fn find_critical_points(surface: &Surface) -> Result<Vec<CriticalPoint>> {
    let mut scratch = Vec::new();
    let bounds = surface.bounds();
    let mut raw: Vec<([f64; 3], f64)> = Vec::new();

    let coordinate = |axis: usize, step: usize| -> f64 {
        let [lo, hi] = bounds[axis];
        lo + (step as f64 + 0.5) / SEEDS_PER_AXIS as f64 * (hi - lo)
    };

    for ix in 0..SEEDS_PER_AXIS {
        for iy in 0..SEEDS_PER_AXIS {
            for iz in 0..SEEDS_PER_AXIS {
                let seed = [coordinate(0, ix), coordinate(1, iy), coordinate(2, iz)];
                if let Some((p, lambda)) = newton_from_seed(surface, seed, &mut scratch) {
                    raw.push((p, lambda));
                }
            }
        }
    }

    raw.sort_by(|a, b| {
        let ka = (a.0[0], a.0[1], a.0[2]);
        let kb = (b.0[0], b.0[1], b.0[2]);
        ka.partial_cmp(&kb).expect("finite coordinates")
    });
    let mut unique: Vec<([f64; 3], f64)> = Vec::new();
    for (p, lambda) in raw {
        if unique
            .iter()
            .all(|(q, _)| sub(p, *q).iter().map(|d| d * d).sum::<f64>().sqrt() > DEDUPE_RADIUS)
        {
            unique.push((p, lambda));
        }
    }

    let mut points: Vec<CriticalPoint> = unique
        .into_iter()
        .map(|(p, lambda)| classify(surface, p, lambda, &mut scratch))
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| {
        let ka = (a.value, a.position[0], a.position[1], a.position[2]);
        let kb = (b.value, b.position[0], b.position[1], b.position[2]);
        ka.partial_cmp(&kb).expect("finite values")
    });
    Ok(points)
}

/// Newton iteration on `G(x, λ) = (∇f - λ∇F, F)` from one seed. Returns a
/// point only when the residuals pass the acceptance thresholds and the
/// point lies in the search box.
fn newton_from_seed(
    surface: &Surface,
    seed: [f64; 3],
    scratch: &mut Vec<f64>,
) -> Option<([f64; 3], f64)> {
    let jet = surface.flow_jet(seed, scratch);
    let g2 = dot(jet.constraint_gradient, jet.constraint_gradient);
    if g2 < 1e-16 {
        return None;
    }
    let mut lambda = dot(jet.function_gradient, jet.constraint_gradient) / g2;
    let mut x = seed;

    for _ in 0..60 {
        let jet = surface.full_jet(x, scratch);
        let df = jet.flow.function_gradient;
        let dg = jet.flow.constraint_gradient;
        let residual = [
            df[0] - lambda * dg[0],
            df[1] - lambda * dg[1],
            df[2] - lambda * dg[2],
            jet.flow.constraint,
        ];
        let mut jac = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                jac[i][j] = jet.function_hessian[i][j] - lambda * jet.constraint_hessian[i][j];
            }
            jac[i][3] = -dg[i];
            jac[3][i] = dg[i];
        }
        let delta = solve4(jac, [-residual[0], -residual[1], -residual[2], -residual[3]])?;
        x = [x[0] + delta[0], x[1] + delta[1], x[2] + delta[2]];
        lambda += delta[3];
        if !x.iter().all(|c| c.is_finite()) || !surface.in_box(x, 2.0) {
            return None;
        }
        let step = (delta.iter().map(|d| d * d).sum::<f64>()).sqrt();
        if step < 1e-13 {
            break;
        }
    }

    let jet = surface.flow_jet(x, scratch);
    let stationary = sub(
        jet.function_gradient,
        [
            lambda * jet.constraint_gradient[0],
            lambda * jet.constraint_gradient[1],
            lambda * jet.constraint_gradient[2],
        ],
    );
    if jet.constraint.abs() <= CONSTRAINT_TOL
        && norm(stationary) <= STATIONARY_TOL
        && surface.in_box(x, 1e-9)
    {
        Some((x, lambda))
    } else {
        None
    }
}

/// Classify one critical point via the restricted Hessian; reject degenerate
/// ones.
fn classify(
    surface: &Surface,
    position: [f64; 3],
    multiplier: f64,
    scratch: &mut Vec<f64>,
) -> Result<CriticalPoint> {
    let jet = surface.full_jet(position, scratch);
    let normal = normalize(jet.flow.constraint_gradient).ok_or_else(|| {
        Error::InvalidSurface(format!(
            "constraint gradient vanishes at critical point {position:?}"
        ))
    })?;

    // A deterministic tangent basis: start from the coordinate axis least
    // aligned with the normal.
    let mut axis = [0.0; 3];
    let least = (0..3)
        .min_by(|&i, &j| normal[i].abs().partial_cmp(&normal[j].abs()).expect("finite"))
        .expect("three axes");
    axis[least] = 1.0;
    let e1 = normalize(reject(axis, normal)).expect("axis was chosen transverse to the normal");
    let e2 = cross(normal, e1);

    // The Hessian of f - λF, restricted to the tangent plane.
    let m = |v: [f64; 3], w: [f64; 3]| -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i]
                    * (jet.function_hessian[i][j] - multiplier * jet.constraint_hessian[i][j])
                    * w[j];
            }
        }
        acc
    };
    let (eigenvalues, vecs2) = symmetric_eigen_2x2(m(e1, e1), m(e1, e2), m(e2, e2));
    for mu in eigenvalues {
        if mu.abs() <= DEGENERACY_MARGIN {
            return Err(Error::DegenerateCriticalPoint {
                position,
                eigenvalue: mu,
                margin: DEGENERACY_MARGIN,
            });
        }
    }
    let index = eigenvalues.iter().filter(|mu| **mu < 0.0).count();

    let lift = |v: [f64; 2]| -> [f64; 3] {
        let w = add_scaled(scale3(e1, v[0]), e2, v[1]);
        // Largest-magnitude coordinate positive, for a reproducible sign.
        let lead = (0..3)
            .max_by(|&i, &j| w[i].abs().partial_cmp(&w[j].abs()).expect("finite"))
            .expect("three coordinates");
        if w[lead] < 0.0 {
            scale3(w, -1.0)
        } else {
            w
        }
    };
    let mut frame = [lift(vecs2[0]), lift(vecs2[1])];
    if index == 2 && det3(frame[0], frame[1], normal) < 0.0 {
        frame[1] = scale3(frame[1], -1.0);
    }

    Ok(CriticalPoint {
        position,
        value: jet.flow.function,
        index,
        multiplier,
        normal,
        eigenvalues,
        frame,
    })
}

fn scale3(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}
