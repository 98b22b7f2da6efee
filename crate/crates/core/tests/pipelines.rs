//! Cross-module pipelines: cubical models feeding exact homology, checked
//! against the numerical flow complexes of the matching surfaces, plus
//! coefficient comparisons and subdivision invariance on the same models.

use std::collections::BTreeSet;

use strata_core::complex::{coefficient_comparison, homology, Coefficients, HomologyGroup};
use strata_core::cubical::{subdivide_set, Component, CubicalComplex, Dyadic, ElementaryCube};
use strata_core::equivariant::stabilization_check;
use strata_core::morse::{morse_data, morse_homology, Surface};
use strata_core::random::random_circle_complex;

fn cube(xs: (i64, i64), ys: (i64, i64), zs: (i64, i64)) -> ElementaryCube {
    let component = |(a, b): (i64, i64)| {
        if a == b {
            Component::Point(Dyadic::integer(a))
        } else {
            Component::Interval(Dyadic::integer(a), Dyadic::integer(b))
        }
    };
    ElementaryCube::new(vec![component(xs), component(ys), component(zs)])
        .expect("intervals are increasing")
}

/// The boundary surface of a square donut: `([0,3]^2 minus the open middle
/// square) x [0,1]`. A genuine cubical torus with 32 squares.
fn torus_model() -> Vec<ElementaryCube> {
    let mut squares = Vec::new();
    for z in [0, 1] {
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) == (1, 1) {
                    continue;
                }
                squares.push(cube((i, i + 1), (j, j + 1), (z, z)));
            }
        }
    }
    for j in 0..3 {
        squares.push(cube((0, 0), (j, j + 1), (0, 1)));
        squares.push(cube((3, 3), (j, j + 1), (0, 1)));
        squares.push(cube((j, j + 1), (0, 0), (0, 1)));
        squares.push(cube((j, j + 1), (3, 3), (0, 1)));
    }
    squares.push(cube((1, 1), (1, 2), (0, 1)));
    squares.push(cube((2, 2), (1, 2), (0, 1)));
    squares.push(cube((1, 2), (1, 1), (0, 1)));
    squares.push(cube((1, 2), (2, 2), (0, 1)));
    assert_eq!(squares.len(), 32);
    squares
}

/// The six faces of the unit cube: a cubical sphere.
fn sphere_model() -> Vec<ElementaryCube> {
    vec![
        cube((0, 0), (0, 1), (0, 1)),
        cube((1, 1), (0, 1), (0, 1)),
        cube((0, 1), (0, 0), (0, 1)),
        cube((0, 1), (1, 1), (0, 1)),
        cube((0, 1), (0, 1), (0, 0)),
        cube((0, 1), (0, 1), (1, 1)),
    ]
}

fn betti(groups: &[HomologyGroup]) -> Vec<usize> {
    groups.iter().map(|g| g.free_rank).collect()
}

fn torsion_free(groups: &[HomologyGroup]) -> bool {
    groups.iter().all(|g| g.cyclic_factors.is_empty())
}

#[test]
fn torus_model_is_the_oracle_for_the_torus_flow_complex() {
    let complex = CubicalComplex::build(&torus_model()).unwrap();
    let cubical = homology(complex.complex(), Coefficients::Integers).unwrap();
    assert_eq!(betti(&cubical), vec![1, 2, 1]);
    assert!(torsion_free(&cubical));

    let data = morse_data(&Surface::torus()).unwrap();
    let flow = morse_homology(&data, Coefficients::Integers).unwrap();
    assert_eq!(betti(&flow), betti(&cubical));
    assert!(torsion_free(&flow));
}

#[test]
fn cube_boundary_is_the_oracle_for_the_sphere_flow_complex() {
    let complex = CubicalComplex::build(&sphere_model()).unwrap();
    let cubical = homology(complex.complex(), Coefficients::Integers).unwrap();
    assert_eq!(betti(&cubical), vec![1, 0, 1]);
    assert!(torsion_free(&cubical));

    let data = morse_data(&Surface::sphere()).unwrap();
    let flow = morse_homology(&data, Coefficients::Integers).unwrap();
    assert_eq!(betti(&flow), betti(&cubical));
}

#[test]
fn subdividing_the_torus_model_preserves_its_homology() {
    let original: BTreeSet<ElementaryCube> = torus_model().into_iter().collect();
    let reference = homology(
        CubicalComplex::build(&torus_model()).unwrap().complex(),
        Coefficients::Integers,
    )
    .unwrap();

    // Split along planes through cube interiors on every axis in turn.
    let mut cubes = original;
    for (axis, level) in [
        (0, Dyadic::new(1, 1)),
        (1, Dyadic::new(5, 1)),
        (2, Dyadic::new(1, 2)),
    ] {
        cubes = subdivide_set(&cubes, axis, level).unwrap();
        let generators: Vec<ElementaryCube> = cubes.iter().cloned().collect();
        let subdivided = homology(
            CubicalComplex::build(&generators).unwrap().complex(),
            Coefficients::Integers,
        )
        .unwrap();
        for (a, b) in reference.iter().zip(&subdivided) {
            assert_eq!(a.free_rank, b.free_rank, "axis {axis}");
            assert_eq!(a.cyclic_factors, b.cyclic_factors, "axis {axis}");
        }
    }
}

#[test]
fn coefficient_comparison_holds_on_the_torus_model() {
    let complex = CubicalComplex::build(&torus_model()).unwrap();
    for m in [2, 3, 4] {
        let report = coefficient_comparison(complex.complex(), m).unwrap();
        assert!(report.all_pass(), "modulus {m}");
    }
}

#[test]
fn twisted_theories_stabilize_on_random_circle_complexes() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let cc = random_circle_complex(&mut rng, 3, 3, 2);
        let report = stabilization_check(&cc, -4, 2).unwrap();
        assert!(report.all_pass());
    }
}
