//! Small fixed-dimension vector helpers shared by the numerical routines.

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm(sub(a, b))
}

pub fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add_scaled(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

pub fn normalize(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm(a);
    if n < 1e-300 {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

/// The component of `v` orthogonal to the unit vector `unit`.
pub fn reject(v: [f64; 3], unit: [f64; 3]) -> [f64; 3] {
    add_scaled(v, unit, -dot(v, unit))
}

/// Determinant of the 3x3 matrix with the given columns.
pub fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    dot(a, cross(b, c))
}

/// Solve a 4x4 linear system by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Eigenvalues (ascending) and matching unit eigenvectors of a symmetric
/// 2x2 matrix `[[a, b], [b, c]]`. For a (near-)diagonal matrix the
/// eigenvectors are the coordinate axes, which keeps the output
/// deterministic when the eigenvalues coincide.
pub fn symmetric_eigen_2x2(a: f64, b: f64, c: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let mean = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let lo = mean - disc;
    let hi = mean + disc;
    if b.abs() < 1e-13 {
        if a <= c {
            ([a, c], [[1.0, 0.0], [0.0, 1.0]])
        } else {
            ([c, a], [[0.0, 1.0], [1.0, 0.0]])
        }
    } else {
        let vec_for = |mu: f64| -> [f64; 2] {
            let v = [b, mu - a];
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            [v[0] / n, v[1] / n]
        };
        ([lo, hi], [vec_for(lo), vec_for(hi)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        let a = [
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 4.0, 1.0],
            [0.0, 0.0, 1.0, 5.0],
        ];
        let x_true = [1.0, -2.0, 3.0, -4.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                b[i] += a[i][j] * x_true[j];
            }
        }
        let x = solve4(a, b).unwrap();
        for i in 0..4 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
        let singular = [[1.0, 2.0, 0.0, 0.0]; 4];
        assert!(solve4(singular, b).is_none());
    }

    #[test]
    fn eigen_decomposition_reconstructs_the_matrix() {
        for (a, b, c) in [(3.0, 1.0, -2.0), (1.0, 0.0, 1.0), (-1.0, 2.5, 4.0), (2.0, 1e-15, 1.0)] {
            let (vals, vecs) = symmetric_eigen_2x2(a, b, c);
            assert!(vals[0] <= vals[1]);
            for k in 0..2 {
                let v = vecs[k];
                let mv = [a * v[0] + b * v[1], b * v[0] + c * v[1]];
                assert!((mv[0] - vals[k] * v[0]).abs() < 1e-10);
                assert!((mv[1] - vals[k] * v[1]).abs() < 1e-10);
            }
            // Eigenvectors are orthonormal.
            let (u, v) = (vecs[0], vecs[1]);
            assert!((u[0] * v[0] + u[1] * v[1]).abs() < 1e-12);
            assert!((u[0] * u[0] + u[1] * u[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_products_orient() {
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        assert_eq!(cross(x, y), [0.0, 0.0, 1.0]);
        assert_eq!(det3(x, y, [0.0, 0.0, 1.0]), 1.0);
    }
}
