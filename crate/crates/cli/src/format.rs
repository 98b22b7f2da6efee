//! The two input file formats.
//!
//! A complex file is line-oriented: `dim N` fixes the top degree, `gen k:`
//! lines declare labeled generators, `bnd label:` lines give boundaries as
//! signed integer combinations of lower generators, and optional `rot
//! label:` lines attach a degree-raising rotation operator. `#` starts a
//! comment. A surface file carries `constraint`, `function`, and `box`
//! lines describing an implicit surface with a height-like function on it.

use std::collections::HashMap;

use strata_core::complex::GradedFreeComplex;
use strata_core::equivariant::CircleComplex;
use strata_core::int::IntegerMatrix;
use strata_core::morse::Surface;

/// A parsed complex file: the complex itself, plus the rotation structure
/// when any `rot` line was present.
#[derive(Debug)]
pub struct ParsedComplex {
    pub complex: GradedFreeComplex,
    pub circle: Option<CircleComplex>,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, String> {
    Err(format!("line {line}: {}", message.into()))
}

fn check_label(line: usize, label: &str) -> Result<(), String> {
    if label.is_empty()
        || label.contains(':')
        || label.contains('#')
        || label.chars().any(char::is_whitespace)
    {
        return fail(line, format!("invalid label `{label}`"));
    }
    Ok(())
}

/// One `±coef*label` term.
fn parse_term(line: usize, token: &str) -> Result<(i64, &str), String> {
    let Some((coef, label)) = token.split_once('*') else {
        return fail(line, format!("term `{token}` is not of the form ±coef*label"));
    };
    let coef: i64 = coef
        .parse()
        .map_err(|_| format!("line {line}: bad coefficient in term `{token}`"))?;
    check_label(line, label)?;
    Ok((coef, label))
}

pub fn parse_complex_file(text: &str) -> Result<ParsedComplex, String> {
    let mut dim: Option<usize> = None;
    // label -> (degree, slot within degree)
    let mut index: HashMap<String, (usize, usize)> = HashMap::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    // (line, generator label, terms) for second-pass matrix assembly
    let mut bnd_lines: Vec<(usize, String, Vec<(i64, String)>)> = Vec::new();
    let mut rot_lines: Vec<(usize, String, Vec<(i64, String)>)> = Vec::new();
    let mut seen_bnd: HashMap<String, usize> = HashMap::new();
    let mut seen_rot: HashMap<String, usize> = HashMap::new();

    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (directive, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match directive {
            "dim" => {
                if dim.is_some() {
                    return fail(n, "dim given twice");
                }
                let d: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| format!("line {n}: dim wants a nonnegative integer"))?;
                if d > 64 {
                    return fail(n, "dim larger than 64 is not supported");
                }
                dim = Some(d);
                labels = vec![Vec::new(); d + 1];
            }
            "gen" => {
                let Some(d) = dim else {
                    return fail(n, "gen before dim");
                };
                let Some((k, names)) = rest.split_once(':') else {
                    return fail(n, "expected `gen k: label...`");
                };
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| format!("line {n}: bad degree in gen line"))?;
                if k > d {
                    return fail(n, format!("generator degree {k} exceeds dim {d}"));
                }
                for name in names.split_whitespace() {
                    check_label(n, name)?;
                    if index.contains_key(name) {
                        return fail(n, format!("label `{name}` already declared"));
                    }
                    index.insert(name.to_string(), (k, labels[k].len()));
                    labels[k].push(name.to_string());
                }
            }
            "bnd" | "rot" => {
                if dim.is_none() {
                    return fail(n, format!("{directive} before dim"));
                }
                let Some((name, terms)) = rest.split_once(':') else {
                    return fail(n, format!("expected `{directive} label: ±coef*label ...`"));
                };
                let name = name.trim();
                if !index.contains_key(name) {
                    return fail(n, format!("unknown label `{name}`"));
                }
                let seen = if directive == "bnd" {
                    &mut seen_bnd
                } else {
                    &mut seen_rot
                };
                if let Some(first) = seen.insert(name.to_string(), n) {
                    return fail(
                        n,
                        format!("{directive} for `{name}` already given on line {first}"),
                    );
                }
                let mut parsed = Vec::new();
                for token in terms.split_whitespace() {
                    let (coef, label) = parse_term(n, token)?;
                    parsed.push((coef, label.to_string()));
                }
                let entry = (n, name.to_string(), parsed);
                if directive == "bnd" {
                    bnd_lines.push(entry);
                } else {
                    rot_lines.push(entry);
                }
            }
            other => {
                return fail(n, format!("unknown directive `{other}` (want dim/gen/bnd/rot)"));
            }
        }
    }

    let Some(d) = dim else {
        return Err("file has no dim line".into());
    };

    let ranks: Vec<usize> = labels.iter().map(|l| l.len()).collect();
    let mut diffs: Vec<IntegerMatrix> = (0..d)
        .map(|k| IntegerMatrix::zeros(ranks[k], ranks[k + 1]))
        .collect();
    for (n, name, terms) in &bnd_lines {
        let (k, col) = index[name];
        if k == 0 && !terms.is_empty() {
            return fail(*n, format!("degree-0 generator `{name}` has no boundary"));
        }
        for (coef, target) in terms {
            let Some(&(tk, row)) = index.get(target.as_str()) else {
                return fail(*n, format!("unknown label `{target}`"));
            };
            if tk + 1 != k {
                return fail(
                    *n,
                    format!(
                        "boundary of degree-{k} generator `{name}` hits `{target}` of \
                         degree {tk}, expected degree {}",
                        k as i64 - 1
                    ),
                );
            }
            let updated = diffs[k - 1].at(row, col) + strata_core::int::bi(*coef);
            diffs[k - 1].set(row, col, updated);
        }
    }

    let complex = GradedFreeComplex::with_labels(0, ranks.clone(), labels, diffs)
        .map_err(|e| e.to_string())?;
    complex.verify().map_err(|e| e.to_string())?;

    let circle = if rot_lines.is_empty() {
        None
    } else {
        let mut rotation: Vec<IntegerMatrix> = (0..=d)
            .map(|k| {
                let above = if k + 1 <= d { ranks[k + 1] } else { 0 };
                IntegerMatrix::zeros(above, ranks[k])
            })
            .collect();
        for (n, name, terms) in &rot_lines {
            let (k, col) = index[name];
            for (coef, target) in terms {
                let Some(&(tk, row)) = index.get(target.as_str()) else {
                    return fail(*n, format!("unknown label `{target}`"));
                };
                if tk != k + 1 {
                    return fail(
                        *n,
                        format!(
                            "rotation of degree-{k} generator `{name}` hits `{target}` of \
                             degree {tk}, expected degree {}",
                            k + 1
                        ),
                    );
                }
                let updated = rotation[k].at(row, col) + strata_core::int::bi(*coef);
                rotation[k].set(row, col, updated);
            }
        }
        Some(CircleComplex::new(complex.clone(), rotation).map_err(|e| e.to_string())?)
    };

    Ok(ParsedComplex { complex, circle })
}

/// Serialize a complex (plus optional rotation data) in the same format.
/// Labels containing whitespace, `:`, or `#` cannot be represented.
pub fn emit_complex_file(
    complex: &GradedFreeComplex,
    circle: Option<&CircleComplex>,
) -> Result<String, String> {
    if complex.min_degree() != 0 {
        return Err("only complexes starting in degree 0 can be serialized".into());
    }
    let top = complex.max_degree();
    let mut out = format!("dim {top}\n");
    for d in complex.degrees() {
        out.push_str(&format!("gen {d}:"));
        for label in complex.labels_at(d) {
            check_label(0, label).map_err(|_| format!("label `{label}` cannot be serialized"))?;
            out.push_str(&format!(" {label}"));
        }
        out.push('\n');
    }
    let mut term_lines = |kind: &str, d: i64, matrix: &IntegerMatrix, targets: &[String]| {
        for (col, label) in complex.labels_at(d).iter().enumerate() {
            let mut terms = String::new();
            for row in 0..matrix.rows() {
                let c = matrix.at(row, col);
                if *c != strata_core::int::bi(0) {
                    let sign = if *c > strata_core::int::bi(0) { "+" } else { "" };
                    terms.push_str(&format!(" {sign}{c}*{}", targets[row]));
                }
            }
            if !terms.is_empty() {
                out.push_str(&format!("{kind} {label}:{terms}\n"));
            }
        }
    };
    for d in 1..=top {
        let matrix = complex.differential(d);
        term_lines("bnd", d, &matrix, complex.labels_at(d - 1));
    }
    if let Some(cc) = circle {
        for d in 0..=top {
            let matrix = cc.rotation_at(d);
            term_lines("rot", d, &matrix, complex.labels_at(d + 1));
        }
        // Rotation presence must survive a round trip even when the
        // operator is identically zero.
        drop(term_lines);
        if !out.contains("\nrot ") {
            if let Some(first) = complex
                .degrees()
                .flat_map(|d| complex.labels_at(d).iter())
                .next()
            {
                out.push_str(&format!("rot {first}:\n"));
            } else {
                return Err("cannot serialize rotation data on an empty complex".into());
            }
        }
    }
    Ok(out)
}

/// Parse a surface file: `constraint EXPR`, `function EXPR`,
/// `box x0 x1 y0 y1 z0 z1`, each exactly once, `#` comments allowed.
pub fn parse_surface_file(text: &str) -> Result<Surface, String> {
    let mut constraint: Option<(usize, String)> = None;
    let mut function: Option<(usize, String)> = None;
    let mut bounds: Option<(usize, [[f64; 2]; 3])> = None;
    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (directive, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match directive {
            "constraint" | "function" => {
                let slot = if directive == "constraint" {
                    &mut constraint
                } else {
                    &mut function
                };
                if let Some((first, _)) = slot {
                    return fail(n, format!("{directive} already given on line {first}"));
                }
                if rest.is_empty() {
                    return fail(n, format!("{directive} wants an expression"));
                }
                *slot = Some((n, rest.to_string()));
            }
            "box" => {
                if let Some((first, _)) = bounds {
                    return fail(n, format!("box already given on line {first}"));
                }
                let nums: Vec<f64> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("line {n}: box wants six numbers"))?;
                if nums.len() != 6 {
                    return fail(n, "box wants six numbers: x0 x1 y0 y1 z0 z1");
                }
                bounds = Some((
                    n,
                    [
                        [nums[0], nums[1]],
                        [nums[2], nums[3]],
                        [nums[4], nums[5]],
                    ],
                ));
            }
            other => {
                return fail(
                    n,
                    format!("unknown directive `{other}` (want constraint/function/box)"),
                );
            }
        }
    }
    let (_, constraint) = constraint.ok_or("file has no constraint line")?;
    let (_, function) = function.ok_or("file has no function line")?;
    let (_, bounds) = bounds.ok_or("file has no box line")?;
    let surface =
        Surface::from_sources(&constraint, &function, bounds).map_err(|e| e.to_string())?;

    // The numerics downstream assume the constraint is regular where it
    // vanishes; reject surfaces whose gradient collapses near the zero set
    // on a coarse sample of the box.
    let mut scratch = Vec::new();
    let span = (0..3)
        .map(|a| bounds[a][1] - bounds[a][0])
        .fold(f64::NEG_INFINITY, f64::max);
    for i in 0..9 {
        for j in 0..9 {
            for k in 0..9 {
                let p = [
                    bounds[0][0] + (i as f64 + 0.5) / 9.0 * (bounds[0][1] - bounds[0][0]),
                    bounds[1][0] + (j as f64 + 0.5) / 9.0 * (bounds[1][1] - bounds[1][0]),
                    bounds[2][0] + (k as f64 + 0.5) / 9.0 * (bounds[2][1] - bounds[2][0]),
                ];
                let jet = surface.flow_jet(p, &mut scratch);
                // Away from the zero set the constraint may do whatever it
                // likes (square roots go imaginary, gradients blow up);
                // regularity only concerns samples near the surface itself.
                if !jet.constraint.is_finite()
                    || jet.constraint.abs() >= 1e-3 * span.max(1.0)
                {
                    continue;
                }
                let grad = jet.constraint_gradient;
                let grad_norm =
                    (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
                if !grad_norm.is_finite() || grad_norm < 1e-6 {
                    return Err(format!(
                        "constraint looks singular near {p:?}: |F| = {:.2e} but |grad F| = {:.2e}",
                        jet.constraint.abs(),
                        grad_norm
                    ));
                }
            }
        }
    }
    Ok(surface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use strata_core::complex::Coefficients;

    #[test]
    fn parses_a_point_complex() {
        let parsed = parse_complex_file("# a single point\ndim 0\ngen 0: p\n").unwrap();
        assert_eq!(parsed.complex.rank(0), 1);
        assert_eq!(parsed.complex.labels_at(0), &["p".to_string()]);
        assert!(parsed.circle.is_none());
    }

    #[test]
    fn parses_rotation_lines_into_a_circle_complex() {
        let text = "dim 1\ngen 0: p\ngen 1: c\nrot p: +1*c\n";
        let parsed = parse_complex_file(text).unwrap();
        let circle = parsed.circle.expect("rot line present");
        assert_eq!(circle.rotation_at(0).at(0, 0), &strata_core::int::bi(1));
    }

    #[test]
    fn undeclared_label_in_boundary_names_the_line() {
        let err = parse_complex_file("dim 1\ngen 1: e\nbnd e: +1*v\n").unwrap_err();
        assert!(err.starts_with("line 3:"), "{err}");
        assert!(err.contains("unknown label `v`"), "{err}");
    }

    #[test]
    fn boundary_degree_mismatch_is_rejected() {
        let err =
            parse_complex_file("dim 2\ngen 0: v\ngen 2: s\nbnd s: +1*v\n").unwrap_err();
        assert!(err.contains("degree"), "{err}");
    }

    #[test]
    fn boundary_square_failure_is_reported() {
        // d(s) = e with d(e) = v: the composite is v, not zero.
        let text = "dim 2\ngen 0: v\ngen 1: e\ngen 2: s\nbnd e: +1*v\nbnd s: +1*e\n";
        let err = parse_complex_file(text).unwrap_err();
        assert!(err.contains("boundary of boundary is nonzero"), "{err}");
        assert!(err.contains("degree"), "{err}");
    }

    #[test]
    fn random_complexes_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let c = strata_core::random::random_complex(&mut rng, 4, 4, 3);
            let text = emit_complex_file(&c, None).unwrap();
            let back = parse_complex_file(&text).unwrap();
            assert!(back.circle.is_none());
            for d in c.degrees() {
                assert_eq!(back.complex.rank(d), c.rank(d));
                assert_eq!(back.complex.labels_at(d), c.labels_at(d));
                assert_eq!(back.complex.differential(d), c.differential(d));
            }
        }
    }

    #[test]
    fn circle_complexes_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let cc = strata_core::random::random_circle_complex(&mut rng, 3, 3, 2);
            let text = emit_complex_file(&cc.base, Some(&cc)).unwrap();
            let back = parse_complex_file(&text).unwrap();
            let circle = back.circle.expect("rotation present");
            for d in cc.base.degrees() {
                assert_eq!(back.complex.differential(d), cc.base.differential(d));
                assert_eq!(circle.rotation_at(d), cc.rotation_at(d));
            }
        }
    }

    #[test]
    fn zero_rotation_survives_a_round_trip() {
        let parsed = parse_complex_file("dim 0\ngen 0: p\nrot p:\n").unwrap();
        assert!(parsed.circle.is_some());
        let text = emit_complex_file(&parsed.complex, parsed.circle.as_ref()).unwrap();
        let back = parse_complex_file(&text).unwrap();
        assert!(back.circle.is_some());
    }

    #[test]
    fn parsed_point_has_expected_homology() {
        let parsed = parse_complex_file("dim 0\ngen 0: p\n").unwrap();
        let h = strata_core::complex::homology(&parsed.complex, Coefficients::Integers)
            .unwrap();
        assert_eq!(h[0].free_rank, 1);
    }

    #[test]
    fn parses_a_surface_file() {
        let text = "constraint x^2 + y^2 + z^2 - 1\nfunction z\nbox -1.5 1.5 -1.5 1.5 -1.5 1.5\n";
        let surface = parse_surface_file(text).unwrap();
        assert_eq!(surface.bounds()[2], [-1.5, 1.5]);
        // The unit sphere's north pole satisfies the constraint.
        let mut scratch = Vec::new();
        let jet = surface.flow_jet([0.0, 0.0, 1.0], &mut scratch);
        assert!(jet.constraint.abs() < 1e-12);
        assert_eq!(jet.function, 1.0);
    }

    #[test]
    fn singular_constraints_are_rejected() {
        // The zero set of x^2 + y^2 + z^2 is a single point with vanishing
        // gradient, sitting at a sample point of the box.
        let text = "constraint x^2 + y^2 + z^2\nfunction z\nbox -9 9 -9 9 -9 9\n";
        let err = parse_surface_file(text).unwrap_err();
        assert!(err.contains("singular"), "{err}");
    }

    #[test]
    fn missing_surface_sections_are_reported() {
        let err = parse_surface_file("constraint x\nbox 0 1 0 1 0 1\n").unwrap_err();
        assert!(err.contains("function"), "{err}");
    }
}
