//! `strata` — homology computations from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check
//! fails, 2 on input errors (bad files, flags, or windows).

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_core::complex::{
    coefficient_comparison, homology, Coefficients, HomologyGroup, ShortExactSequence,
};
use strata_core::cubical::{crease_residual, cut_chain, normalize_chain};
use strata_core::equivariant::{
    localization_sequence, twisted_homology, u_multiplication_sequence, CircleComplex, Variant,
};
use strata_core::morse::{
    descend, filtration_report, find_critical_points, morse_data, morse_homology, Surface,
};
use strata_core::random::{generic_cut_level, random_cubical_chain};
use strata_core::Error as CoreError;

use strata_cli::format::{parse_complex_file, parse_surface_file, ParsedComplex};
use strata_cli::report::Report;

#[derive(Parser)]
#[command(
    name = "strata",
    version,
    about = "Exact homology of hand-written complexes, circle-equivariant theories, \
             and numerically computed flow complexes on implicit surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Polynomial powers (k >= 0).
    Plus,
    /// All integer powers.
    Laurent,
    /// Co-polynomial powers (k <= 0).
    Minus,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plus => Variant::Plus,
            VariantArg::Laurent => Variant::Laurent,
            VariantArg::Minus => Variant::Minus,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Homology of a complex file over z, q, or zN.
    Homology {
        file: PathBuf,
        #[arg(long, default_value = "z")]
        coeff: String,
    },
    /// Twisted homology of a complex file with rotation data, on a degree window.
    Equivariant {
        file: PathBuf,
        #[arg(long)]
        variant: VariantArg,
        /// Degree window LO..HI (inclusive).
        #[arg(long)]
        window: String,
    },
    /// The multiplication-by-u sequence and its long exact sequence in homology.
    Gysin {
        file: PathBuf,
        #[arg(long)]
        window: String,
    },
    /// The localization sequence and its long exact sequence in homology.
    Localize {
        file: PathBuf,
        #[arg(long)]
        window: String,
    },
    /// Compare homology mod m against the prediction from integral homology.
    Uct {
        file: PathBuf,
        #[arg(long = "mod")]
        modulus: i64,
    },
    /// Critical points, flow-line counts, homology, and the critical-value
    /// filtration of a surface (catalog name or surface file).
    Morse {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value = "z")]
        coeff: String,
        /// Write descending trajectories (x y z f per line, blank line
        /// between trajectories) to this path.
        #[arg(long)]
        dump_flows: Option<PathBuf>,
    },
    /// Randomized exact checks of the cubical cut and crease identities.
    Cutcheck {
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// A command failure, classified for the exit-code contract.
enum Failure {
    /// Bad file or flags: exit 2.
    Input(String),
    /// A mathematical check failed or a numerical pipeline gave up: exit 1.
    Math(String),
}

fn input(message: impl Into<String>) -> Failure {
    Failure::Input(message.into())
}

/// Classify an error escaping a command after its inputs parsed: window,
/// modulus, and expression problems trace back to flags or file contents,
/// everything else is the mathematics failing.
fn from_core(e: CoreError) -> Failure {
    match e {
        CoreError::BadModulus(_)
        | CoreError::BadWindow(_)
        | CoreError::ExprParse(_)
        | CoreError::ExprDerivative(_)
        | CoreError::InvalidSurface(_) => Failure::Input(e.to_string()),
        _ => Failure::Math(e.to_string()),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.render());
            std::process::exit(if report.all_checks_pass() { 0 } else { 1 });
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(Failure::Math(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}

fn run(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Homology { file, coeff } => cmd_homology(&file, &coeff),
        Command::Equivariant {
            file,
            variant,
            window,
        } => cmd_equivariant(&file, variant.into(), &window),
        Command::Gysin { file, window } => cmd_sequence(&file, &window, SequenceKind::Gysin),
        Command::Localize { file, window } => {
            cmd_sequence(&file, &window, SequenceKind::Localization)
        }
        Command::Uct { file, modulus } => cmd_uct(&file, modulus),
        Command::Morse {
            surface,
            coeff,
            dump_flows,
        } => cmd_morse(&surface, &coeff, dump_flows.as_deref()),
        Command::Cutcheck { trials, seed } => cmd_cutcheck(trials, seed),
    }
}

fn load_complex(path: &std::path::Path) -> Result<ParsedComplex, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_complex_file(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn require_rotation(path: &std::path::Path, parsed: ParsedComplex) -> Result<CircleComplex, Failure> {
    parsed.circle.ok_or_else(|| {
        input(format!(
            "{}: no rot lines; rotation data is required for equivariant commands",
            path.display()
        ))
    })
}

fn parse_window(s: &str) -> Result<(i64, i64), Failure> {
    let parts = s
        .split_once("..")
        .ok_or_else(|| input(format!("window `{s}` is not of the form LO..HI")))?;
    let lo: i64 = parts
        .0
        .trim()
        .parse()
        .map_err(|_| input(format!("bad window bound `{}`", parts.0)))?;
    let hi: i64 = parts
        .1
        .trim()
        .parse()
        .map_err(|_| input(format!("bad window bound `{}`", parts.1)))?;
    if lo > hi {
        return Err(input(format!("window {lo}..{hi} is empty")));
    }
    Ok((lo, hi))
}

fn parse_coefficients(s: &str) -> Result<Coefficients, Failure> {
    match s {
        "z" => Ok(Coefficients::Integers),
        "q" => Ok(Coefficients::Rationals),
        _ => {
            let m: i64 = s
                .strip_prefix('z')
                .and_then(|rest| rest.parse().ok())
                .ok_or_else(|| input(format!("coefficient ring `{s}` is not z, q, or zN")))?;
            if m < 2 {
                return Err(input(format!("coefficient modulus {m} must be at least 2")));
            }
            Ok(Coefficients::Mod(m))
        }
    }
}

fn ring_name(c: Coefficients) -> String {
    match c {
        Coefficients::Integers => "Z".into(),
        Coefficients::Rationals => "Q".into(),
        Coefficients::Mod(m) => format!("Z/{m}"),
    }
}

fn homology_table(report: &mut Report, title: &str, groups: &[HomologyGroup]) {
    report.push_table(
        title,
        &["degree", "group"],
        groups
            .iter()
            .map(|g| vec![g.degree.to_string(), g.to_string()])
            .collect(),
    );
    for g in groups {
        report.set_machine(format!("h.{}", g.degree), g.to_string());
    }
}

fn cmd_homology(file: &std::path::Path, coeff: &str) -> Result<Report, Failure> {
    let parsed = load_complex(file)?;
    let coefficients = parse_coefficients(coeff)?;
    let groups = homology(&parsed.complex, coefficients).map_err(from_core)?;
    let mut report = Report::new(format!(
        "homology of {} over {}",
        file.display(),
        ring_name(coefficients)
    ));
    report.set_machine("command", "homology");
    report.set_machine("file", file.display().to_string());
    report.set_machine("coeff", ring_name(coefficients));
    homology_table(&mut report, "homology", &groups);
    Ok(report)
}

fn cmd_equivariant(
    file: &std::path::Path,
    variant: Variant,
    window: &str,
) -> Result<Report, Failure> {
    let (lo, hi) = parse_window(window)?;
    let cc = require_rotation(file, load_complex(file)?)?;
    let groups =
        twisted_homology(&cc, variant, lo, hi, Coefficients::Integers).map_err(from_core)?;
    let mut report = Report::new(format!(
        "equivariant homology ({variant}) of {} on degrees {lo}..{hi}",
        file.display()
    ));
    report.set_machine("command", "equivariant");
    report.set_machine("file", file.display().to_string());
    report.set_machine("variant", variant.to_string());
    report.set_machine("window", format!("{lo}..{hi}"));
    homology_table(&mut report, "twisted homology", &groups);
    Ok(report)
}

enum SequenceKind {
    Gysin,
    Localization,
}

fn cmd_sequence(
    file: &std::path::Path,
    window: &str,
    kind: SequenceKind,
) -> Result<Report, Failure> {
    let (lo, hi) = parse_window(window)?;
    let cc = require_rotation(file, load_complex(file)?)?;
    let (name, columns, ses): (&str, [&str; 3], ShortExactSequence) = match kind {
        SequenceKind::Gysin => (
            "gysin",
            ["H(plus, shifted)", "H(plus)", "H(base)"],
            u_multiplication_sequence(&cc, lo, hi).map_err(from_core)?,
        ),
        SequenceKind::Localization => (
            "localize",
            ["H(plus, shifted)", "H(laurent)", "H(minus)"],
            localization_sequence(&cc, lo, hi).map_err(from_core)?,
        ),
    };
    let mut report = Report::new(format!(
        "{name} sequence of {} on degrees {lo}..{hi}",
        file.display()
    ));
    report.set_machine("command", name);
    report.set_machine("file", file.display().to_string());
    report.set_machine("window", format!("{lo}..{hi}"));

    if let Err(e) = ses.verify() {
        report.push_check("sequence is short exact in every degree", false);
        report.push_note(e.to_string());
        report.set_machine("all_exact", "false");
        return Ok(report);
    }
    report.push_check("sequence is short exact in every degree", true);

    let les = ses.long_exact_check().map_err(from_core)?;
    let mut rows = Vec::new();
    for d in &les.degrees {
        if d.degree < lo || d.degree > hi {
            continue;
        }
        let exact = d.exact_at_total && d.exact_at_quotient && d.exact_at_sub_below;
        rows.push(vec![
            d.degree.to_string(),
            d.sub.to_string(),
            d.total.to_string(),
            d.quotient.to_string(),
            if exact { "yes".into() } else { "NO".into() },
        ]);
        report.set_machine(format!("sub.{}", d.degree), d.sub.to_string());
        report.set_machine(format!("total.{}", d.degree), d.total.to_string());
        report.set_machine(format!("quotient.{}", d.degree), d.quotient.to_string());
        report.set_machine(format!("exact.{}", d.degree), exact.to_string());
    }
    report.push_table(
        "long exact sequence",
        &["degree", columns[0], columns[1], columns[2], "exact"],
        rows,
    );
    report.push_check(
        "long exact sequence is exact at every junction",
        les.all_exact(),
    );
    report.set_machine("all_exact", les.all_exact().to_string());
    Ok(report)
}

fn cyclic_display<T: std::fmt::Display>(factors: &[T]) -> String {
    if factors.is_empty() {
        "0".into()
    } else {
        factors
            .iter()
            .map(|f| format!("Z/{f}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn cmd_uct(file: &std::path::Path, modulus: i64) -> Result<Report, Failure> {
    let parsed = load_complex(file)?;
    let comparison = coefficient_comparison(&parsed.complex, modulus).map_err(from_core)?;
    let mut report = Report::new(format!(
        "homology of {} mod {modulus} against the integral prediction",
        file.display()
    ));
    report.set_machine("command", "uct");
    report.set_machine("file", file.display().to_string());
    report.set_machine("mod", modulus.to_string());
    let mut rows = Vec::new();
    let mut all_iso = true;
    let mut all_ranks = true;
    for d in &comparison.degrees {
        all_iso &= d.isomorphic;
        all_ranks &= d.rank_checks.iter().all(|r| r.ok);
        rows.push(vec![
            d.degree.to_string(),
            d.integral.to_string(),
            cyclic_display(&d.modular),
            cyclic_display(&d.predicted),
            if d.isomorphic { "yes".into() } else { "NO".into() },
        ]);
        report.set_machine(format!("integral.{}", d.degree), d.integral.to_string());
        report.set_machine(format!("mod.{}", d.degree), cyclic_display(&d.modular));
        report.set_machine(
            format!("predicted.{}", d.degree),
            cyclic_display(&d.predicted),
        );
        report.set_machine(format!("match.{}", d.degree), d.isomorphic.to_string());
    }
    report.push_table(
        &format!("homology mod {modulus}"),
        &["degree", "integral", "mod m", "predicted", "match"],
        rows,
    );
    report.push_check(
        "mod-m homology matches the tensor/torsion prediction",
        all_iso,
    );
    report.push_check("generator counts match at every prime power", all_ranks);
    report.set_machine("all_pass", comparison.all_pass().to_string());
    Ok(report)
}

fn load_surface(selector: &str) -> Result<Surface, Failure> {
    if let Some(surface) = Surface::catalog(selector) {
        return Ok(surface);
    }
    let path = std::path::Path::new(selector);
    if !path.exists() {
        return Err(input(format!(
            "`{selector}` is neither a catalog surface ({}) nor a file",
            Surface::catalog_names().join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{selector}: {e}")))?;
    parse_surface_file(&text).map_err(|e| input(format!("{selector}: {e}")))
}

fn cmd_morse(
    selector: &str,
    coeff: &str,
    dump_flows: Option<&std::path::Path>,
) -> Result<Report, Failure> {
    let surface = load_surface(selector)?;
    let coefficients = parse_coefficients(coeff)?;
    let data = morse_data(&surface).map_err(from_core)?;
    let groups = morse_homology(&data, coefficients).map_err(from_core)?;
    let rational = morse_homology(&data, Coefficients::Rationals).map_err(from_core)?;
    let filtration = filtration_report(&data).map_err(from_core)?;
    let rational_betti: Vec<usize> = rational.iter().map(|g| g.free_rank).collect();
    let reassembled_ok = filtration.betti == rational_betti;

    let mut report = Report::new(format!(
        "flow complex of {} over {}",
        surface.name().unwrap_or(selector),
        ring_name(coefficients)
    ));
    report.set_machine("command", "morse");
    report.set_machine("surface", selector.to_string());
    report.set_machine("coeff", ring_name(coefficients));

    report.push_table(
        "critical points",
        &["id", "x", "y", "z", "value", "index"],
        data.points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                vec![
                    i.to_string(),
                    format!("{:+.6}", p.position[0]),
                    format!("{:+.6}", p.position[1]),
                    format!("{:+.6}", p.position[2]),
                    format!("{:+.6}", p.value),
                    p.index.to_string(),
                ]
            })
            .collect(),
    );
    report.set_machine("points", data.points().len().to_string());
    for (i, p) in data.points().iter().enumerate() {
        report.set_machine(
            format!("point.{i}"),
            format!(
                "{} {} {} {} {}",
                p.position[0], p.position[1], p.position[2], p.value, p.index
            ),
        );
    }

    homology_table(
        &mut report,
        &format!("homology over {}", ring_name(coefficients)),
        &groups,
    );
    report.set_machine(
        "betti",
        rational_betti
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    report.push_table(
        "critical-value filtration",
        &["level", "value", "multiplicities"],
        filtration
            .levels
            .iter()
            .enumerate()
            .map(|(i, level)| {
                vec![
                    i.to_string(),
                    format!("{:+.6}", level.value),
                    level
                        .multiplicities
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                ]
            })
            .collect(),
    );
    report.set_machine("filtration.levels", filtration.levels.len().to_string());
    report.set_machine(
        "filtration.betti",
        filtration
            .betti
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    report.push_check("boundary operator squares to zero over Z", true);
    report.push_check("filtration levels assemble through exact sequences", true);
    report.push_check(
        "reassembled Betti numbers match the flow complex homology",
        reassembled_ok,
    );

    if let Some(path) = dump_flows {
        let (dump, count) = flow_dump(&surface)?;
        std::fs::write(path, dump).map_err(|e| input(format!("{}: {e}", path.display())))?;
        report.push_note(format!(
            "wrote {count} descending trajectories to {}",
            path.display()
        ));
        report.set_machine("trajectories", count.to_string());
    }
    Ok(report)
}

/// Descending trajectories for plotting: two flows out of every saddle
/// (along both descending directions) and a ring of eight around every
/// maximum. One `x y z f` line per step, blank line between trajectories.
fn flow_dump(surface: &Surface) -> Result<(String, usize), Failure> {
    const OFFSET: f64 = 1e-2;
    let critical = find_critical_points(surface).map_err(from_core)?;
    let mut out = String::new();
    let mut count = 0;
    for point in &critical {
        let mut seeds: Vec<[f64; 3]> = Vec::new();
        match point.index {
            1 => {
                let u = point.descending();
                for sign in [1.0, -1.0] {
                    seeds.push([
                        point.position[0] + sign * OFFSET * u[0],
                        point.position[1] + sign * OFFSET * u[1],
                        point.position[2] + sign * OFFSET * u[2],
                    ]);
                }
            }
            2 => {
                for step in 0..8 {
                    let angle = std::f64::consts::TAU * step as f64 / 8.0;
                    let (s, c) = angle.sin_cos();
                    let dir = [
                        c * point.frame[0][0] + s * point.frame[1][0],
                        c * point.frame[0][1] + s * point.frame[1][1],
                        c * point.frame[0][2] + s * point.frame[1][2],
                    ];
                    seeds.push([
                        point.position[0] + OFFSET * dir[0],
                        point.position[1] + OFFSET * dir[1],
                        point.position[2] + OFFSET * dir[2],
                    ]);
                }
            }
            _ => {}
        }
        for seed in seeds {
            let trajectory = descend(surface, &critical, seed).map_err(from_core)?;
            for (p, f) in trajectory.points.iter().zip(&trajectory.values) {
                out.push_str(&format!("{} {} {} {}\n", p[0], p[1], p[2], f));
            }
            out.push('\n');
            count += 1;
        }
    }
    Ok((out, count))
}

fn cmd_cutcheck(trials: u32, seed: u64) -> Result<Report, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut square_failures = 0u32;
    let mut cut_failures = 0u32;
    let mut crease_failures = 0u32;
    for _ in 0..trials {
        let chain = random_cubical_chain(&mut rng, 4, 3, 5, true);
        if !normalize_chain(&chain.boundary().boundary()).is_zero() {
            square_failures += 1;
        }
        let axis = rng.gen_range(0..4);
        let level = generic_cut_level(&mut rng, &chain, axis);
        let cut = cut_chain(&chain, axis, level).map_err(from_core)?;
        let boundary_cut = cut_chain(&chain.boundary(), axis, level).map_err(from_core)?;
        let plus_residual =
            cut.plus.boundary() - boundary_cut.plus + cut.slice.clone();
        let minus_residual =
            cut.minus.boundary() - boundary_cut.minus - cut.slice.clone();
        if !plus_residual.is_zero() || !minus_residual.is_zero() {
            cut_failures += 1;
        }
        if !crease_residual(&chain, axis, level)
            .map_err(from_core)?
            .is_zero()
        {
            crease_failures += 1;
        }
    }
    let mut report = Report::new(format!(
        "cubical identities on {trials} random chains (seed {seed})"
    ));
    report.set_machine("command", "cutcheck");
    report.set_machine("trials", trials.to_string());
    report.set_machine("seed", seed.to_string());
    report.push_check(
        "boundary of boundary normalizes to zero",
        square_failures == 0,
    );
    report.push_check("cut identities hold term-by-term", cut_failures == 0);
    report.push_check("crease identity holds term-by-term", crease_failures == 0);
    report.set_machine("failures.square", square_failures.to_string());
    report.set_machine("failures.cut", cut_failures.to_string());
    report.set_machine("failures.crease", crease_failures.to_string());
    Ok(report)
}
