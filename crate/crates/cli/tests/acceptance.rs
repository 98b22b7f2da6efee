//! The acceptance gate: one test per shipped guarantee, each printing a
//! single pass line (visible with `--nocapture`) and enforcing its wall-time
//! budget. Tolerances and budgets are pinned as constants below.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_cli::format::parse_complex_file;
use strata_cli::report::parse_machine_block;
use strata_core::complex::{
    coefficient_comparison, homology, Coefficients, GradedFreeComplex, HomologyGroup,
};
use strata_core::cubical::{
    crease_residual, cut_chain, normalize_chain, subdivide_set, CubicalComplex, ElementaryCube,
};
use strata_core::equivariant::{
    localization_sequence, twisted_homology, u_multiplication_sequence, CircleComplex, Variant,
};
use strata_core::int::{bi, smith_normal_form, IntegerMatrix};
use strata_core::morse::{build_morse_complex, filtration_report, morse_data, morse_homology, Surface};
use strata_core::random::{
    generic_cut_level, random_circle_complex, random_cubical_chain, random_cubical_set,
    random_dyadic,
};

/// How close a computed critical point must sit to its closed-form position.
const POSITION_TOLERANCE: f64 = 1e-6;

fn finish(criterion: &str, clock: Instant, budget: Duration) {
    let elapsed = clock.elapsed();
    assert!(
        elapsed < budget,
        "{criterion} exceeded its {budget:?} budget: took {elapsed:?}"
    );
    println!("{criterion}: PASS in {elapsed:.2?} (budget {budget:?})");
}

fn betti(groups: &[HomologyGroup]) -> Vec<usize> {
    groups.iter().map(|g| g.free_rank).collect()
}

fn expect_group(groups: &[HomologyGroup], degree: i64, free_rank: usize, what: &str) {
    let g = groups
        .iter()
        .find(|g| g.degree == degree)
        .unwrap_or_else(|| panic!("{what}: degree {degree} missing"));
    assert_eq!(g.free_rank, free_rank, "{what} at degree {degree}");
    assert!(
        g.cyclic_factors.is_empty(),
        "{what} at degree {degree}: unexpected torsion {:?}",
        g.cyclic_factors
    );
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn criterion_01_point_homology_via_the_binary() {
    let clock = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(["homology", &fixture("pt.cx")])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "exit code");
    let text = String::from_utf8(out.stdout).unwrap();
    let pairs = parse_machine_block(&text).expect("machine block");
    let homology_keys: Vec<&(String, String)> =
        pairs.iter().filter(|(k, _)| k.starts_with("h.")).collect();
    assert_eq!(homology_keys.len(), 1, "only degree 0 present");
    assert_eq!(homology_keys[0].0, "h.0");
    assert_eq!(homology_keys[0].1, "Z");
    finish("criterion 01 (point homology)", clock, Duration::from_secs(1));
}

/// The point with trivial rotation and the circle with its fundamental
/// rotation, both entered through the file format.
fn equivariant_fixtures() -> (CircleComplex, CircleComplex) {
    let pt = parse_complex_file("dim 0\ngen 0: p\nrot p:\n")
        .unwrap()
        .circle
        .unwrap();
    let s1 = parse_complex_file("dim 1\ngen 0: p\ngen 1: c\nrot p: +1*c\n")
        .unwrap()
        .circle
        .unwrap();
    (pt, s1)
}

#[test]
fn criterion_02_equivariant_calculations_on_the_window() {
    let clock = Instant::now();
    let (pt, s1) = equivariant_fixtures();
    let (lo, hi) = (-6, 2);
    let groups = |cc: &CircleComplex, variant: Variant| {
        twisted_homology(cc, variant, lo, hi, Coefficients::Integers).unwrap()
    };

    let plus_pt = groups(&pt, Variant::Plus);
    let laurent_pt = groups(&pt, Variant::Laurent);
    let plus_s1 = groups(&s1, Variant::Plus);
    let laurent_s1 = groups(&s1, Variant::Laurent);
    let minus_s1 = groups(&s1, Variant::Minus);
    for d in lo..=hi {
        let even = d.rem_euclid(2) == 0;
        expect_group(&plus_pt, d, (even && d <= 0) as usize, "plus theory of the point");
        expect_group(&laurent_pt, d, even as usize, "laurent theory of the point");
        expect_group(&plus_s1, d, (d == 1) as usize, "plus theory of the circle");
        expect_group(&laurent_s1, d, 0, "laurent theory of the circle");
        expect_group(&minus_s1, d, (d == 0) as usize, "minus theory of the circle");
    }
    finish(
        "criterion 02 (equivariant calculations)",
        clock,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_03_gysin_and_localization_exactness() {
    let clock = Instant::now();
    let (pt, s1) = equivariant_fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut complexes = vec![pt, s1];
    for _ in 0..20 {
        complexes.push(random_circle_complex(&mut rng, 4, 3, 3));
    }
    for (i, cc) in complexes.iter().enumerate() {
        for (name, ses) in [
            ("gysin", u_multiplication_sequence(cc, -4, 2).unwrap()),
            ("localization", localization_sequence(cc, -4, 2).unwrap()),
        ] {
            ses.verify()
                .unwrap_or_else(|e| panic!("complex {i}, {name}: not short exact: {e}"));
            let les = ses.long_exact_check().unwrap();
            assert!(les.all_exact(), "complex {i}, {name}: inexact joint");
        }
    }
    finish(
        "criterion 03 (gysin and localization exactness, 22 complexes)",
        clock,
        Duration::from_secs(30),
    );
}

/// gcd of all k x k minors: the k-th determinantal divisor.
fn minor_gcd(a: &IntegerMatrix, k: usize) -> BigInt {
    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }
    let mut g = bi(0);
    for rows in combos(a.rows(), k) {
        for cols in combos(a.cols(), k) {
            let mut sub = IntegerMatrix::zeros(k, k);
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    sub.set(i, j, a.at(r, c).clone());
                }
            }
            g = g.gcd(&sub.determinant().unwrap());
        }
    }
    g
}

#[test]
fn criterion_04_smith_normal_form_on_random_matrices() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..50 {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let mut a = IntegerMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                a.set(i, j, bi(rng.gen_range(-9..=9)));
            }
        }
        let snf = smith_normal_form(&a);
        assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d, "trial {trial}: U*A*V != D");
        for (name, m) in [("U", &snf.u), ("V", &snf.v)] {
            let det = m.determinant().unwrap();
            assert!(
                det == bi(1) || det == bi(-1),
                "trial {trial}: det {name} = {det}"
            );
        }
        let diagonal = snf.diagonal();
        let mut seen_zero = false;
        for pair in diagonal.windows(2) {
            if pair[0] == bi(0) {
                seen_zero = true;
            }
            if seen_zero {
                assert_eq!(pair[1], bi(0), "trial {trial}: zero before nonzero");
            } else if pair[1] != bi(0) {
                assert_eq!(
                    &pair[1] % &pair[0],
                    bi(0),
                    "trial {trial}: divisibility {} | {} fails",
                    pair[0],
                    pair[1]
                );
            }
        }
        // Determinant-divisor oracle: the product of the first k diagonal
        // entries is the gcd of all k x k minors of A.
        let mut product = bi(1);
        for k in 1..=rows.min(cols) {
            product *= &diagonal[k - 1];
            assert_eq!(
                product,
                minor_gcd(&a, k),
                "trial {trial}: determinant divisor mismatch at k = {k}"
            );
        }
    }
    finish(
        "criterion 04 (smith normal form, 50 matrices)",
        clock,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_05_cubical_calculus() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(51);

    for trial in 0..200 {
        let chain = random_cubical_chain(&mut rng, 4, 3, 5, true);
        assert!(
            normalize_chain(&chain.boundary().boundary()).is_zero(),
            "trial {trial}: boundary of boundary does not normalize to zero"
        );
    }

    for trial in 0..100 {
        let chain = random_cubical_chain(&mut rng, 4, 3, 4, true);
        let axis = rng.gen_range(0..4);
        let level = generic_cut_level(&mut rng, &chain, axis);
        let cut = cut_chain(&chain, axis, level).unwrap();
        let boundary_cut = cut_chain(&chain.boundary(), axis, level).unwrap();
        let plus = cut.plus.boundary() - boundary_cut.plus + cut.slice.clone();
        let minus = cut.minus.boundary() - boundary_cut.minus - cut.slice.clone();
        assert!(plus.is_zero(), "trial {trial}: upper cut identity fails");
        assert!(minus.is_zero(), "trial {trial}: lower cut identity fails");
        assert!(
            crease_residual(&chain, axis, level).unwrap().is_zero(),
            "trial {trial}: crease identity fails"
        );
    }

    for trial in 0..10 {
        let generators = random_cubical_set(&mut rng, 3, 5, 3);
        let original = CubicalComplex::build(&generators).unwrap();
        let reference = homology(original.complex(), Coefficients::Integers).unwrap();
        let set: BTreeSet<ElementaryCube> = generators.into_iter().collect();
        let axis = rng.gen_range(0..3);
        let level = random_dyadic(&mut rng, 3);
        let subdivided: Vec<ElementaryCube> = subdivide_set(&set, axis, level)
            .unwrap()
            .into_iter()
            .collect();
        let after = homology(
            CubicalComplex::build(&subdivided).unwrap().complex(),
            Coefficients::Integers,
        )
        .unwrap();
        assert_eq!(reference.len(), after.len(), "trial {trial}: degree ranges differ");
        for (a, b) in reference.iter().zip(&after) {
            assert_eq!(a.free_rank, b.free_rank, "trial {trial}, degree {}", a.degree);
            assert_eq!(
                a.cyclic_factors, b.cyclic_factors,
                "trial {trial}, degree {}",
                a.degree
            );
        }
    }

    finish(
        "criterion 05 (cubical calculus: 200 boundaries, 100 cuts, 10 subdivisions)",
        clock,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_sphere_flow_complex() {
    let clock = Instant::now();
    let data = morse_data(&Surface::sphere()).unwrap();
    assert_eq!(data.points().len(), 2, "two critical points");
    for (point, expected) in data.points().iter().zip([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]) {
        for axis in 0..3 {
            assert!(
                (point.position[axis] - expected[axis]).abs() < POSITION_TOLERANCE,
                "critical point off its pole: {:?}",
                point.position
            );
        }
    }
    let integral = morse_homology(&data, Coefficients::Integers).unwrap();
    assert_eq!(betti(&integral), vec![1, 0, 1]);
    assert!(integral.iter().all(|g| g.cyclic_factors.is_empty()));
    let mod2 = morse_homology(&data, Coefficients::Mod(2)).unwrap();
    let mod2_dims: Vec<usize> = mod2.iter().map(|g| g.generator_count()).collect();
    assert_eq!(mod2_dims, vec![1, 0, 1]);
    finish("criterion 06 (sphere flow complex)", clock, Duration::from_secs(10));
}

#[test]
fn criterion_07_torus_flow_complex() {
    let clock = Instant::now();
    let data = morse_data(&Surface::torus()).unwrap();
    assert_eq!(data.points().len(), 4, "four critical points");
    let expected = [
        [-3.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [3.0, 0.0, 0.0],
    ];
    for (point, target) in data.points().iter().zip(expected) {
        for axis in 0..3 {
            assert!(
                (point.position[axis] - target[axis]).abs() < POSITION_TOLERANCE,
                "critical point off the axis: {:?}",
                point.position
            );
        }
    }
    let indices: Vec<usize> = data.points().iter().map(|p| p.index).collect();
    assert_eq!(indices, vec![0, 1, 1, 2], "index vector");
    for boundary in data.boundaries() {
        assert!(boundary.is_zero(), "incidences vanish over Z");
        assert!(
            boundary.mod_m(&bi(2)).is_zero(),
            "incidences vanish over Z/2"
        );
    }
    let integral = morse_homology(&data, Coefficients::Integers).unwrap();
    assert_eq!(betti(&integral), vec![1, 2, 1]);
    assert!(integral.iter().all(|g| g.cyclic_factors.is_empty()));
    finish("criterion 07 (torus flow complex)", clock, Duration::from_secs(60));
}

#[test]
fn criterion_08_dented_sphere_flow_complex() {
    let clock = Instant::now();
    let data = morse_data(&Surface::dented_sphere()).unwrap();
    assert_eq!(data.points().len(), 4, "four critical points");

    // The saddle-to-maxima block has rank one over Z/2: the two flow lines
    // into the saddle come from different maxima.
    let d2 = &data.boundaries()[1];
    let odd_invariant_factors = smith_normal_form(d2)
        .diagonal()
        .into_iter()
        .filter(|d| (d % bi(2)) != bi(0))
        .count();
    assert_eq!(odd_invariant_factors, 1, "Z/2-rank of the top boundary");

    // The signed boundary operator squares to zero exactly.
    let d1 = &data.boundaries()[0];
    assert!(d1.mul(d2).is_zero(), "boundary square over Z");
    build_morse_complex(&data, Coefficients::Integers)
        .unwrap()
        .verify()
        .unwrap();

    let integral = morse_homology(&data, Coefficients::Integers).unwrap();
    assert_eq!(betti(&integral), vec![1, 0, 1]);
    assert!(integral.iter().all(|g| g.cyclic_factors.is_empty()));
    finish(
        "criterion 08 (dented sphere flow complex)",
        clock,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_09_filtration_reassembles_homology_on_the_catalog() {
    let clock = Instant::now();
    for name in Surface::catalog_names() {
        let surface = Surface::catalog(name).unwrap();
        let data = morse_data(&surface).unwrap();
        let report = filtration_report(&data).unwrap();

        // Each critical level contributes a free summand of rank m_k in
        // degree k: the reported multiplicities must count exactly the
        // level's critical points by index.
        let mut covered = 0;
        for level in &report.levels {
            let mut expected = vec![0usize; data.boundaries().len() + 1];
            for &id in &level.points {
                expected[data.points()[id].index] += 1;
            }
            assert_eq!(level.multiplicities, expected, "{name}: level multiplicities");
            covered += level.points.len();
        }
        assert_eq!(covered, data.points().len(), "{name}: all points on levels");

        let rational = morse_homology(&data, Coefficients::Rationals).unwrap();
        assert_eq!(
            report.betti,
            betti(&rational),
            "{name}: reassembled Betti numbers"
        );
    }
    finish(
        "criterion 09 (filtration reassembly, all catalog surfaces)",
        clock,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_10_universal_coefficients() {
    let clock = Instant::now();
    // The doubling complex 0 -> Z --2--> Z -> 0.
    let doubling = GradedFreeComplex::new(
        0,
        vec![1, 1],
        vec![IntegerMatrix::from_rows(&[vec![2]])],
    )
    .unwrap();
    for m in [2, 3, 4] {
        let report = coefficient_comparison(&doubling, m).unwrap();
        assert!(report.all_pass(), "doubling complex, modulus {m}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..10 {
        let generators = random_cubical_set(&mut rng, 3, 5, 3);
        let complex = CubicalComplex::build(&generators).unwrap();
        for m in [2, 3, 4] {
            let report = coefficient_comparison(complex.complex(), m).unwrap();
            assert!(report.all_pass(), "trial {trial}, modulus {m}");
        }
    }
    finish(
        "criterion 10 (universal coefficients, m in {2,3,4})",
        clock,
        Duration::from_secs(10),
    );
}
