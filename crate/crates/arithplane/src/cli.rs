//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid lattice or unknown
//! field, 3 computation refused (excluded prime, violated hypothesis).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use arithplane_core::chebotarev::chebotarev_predict;
use arithplane_core::density::{self, format_cycle_type, DensityError};
use arithplane_core::lattice::{Certificate, Extension, LatticeError};
use arithplane_core::plane::{self, GaloisMode, PlaneError, SectionTrials};
use arithplane_core::spectrum::{self, SpectrumError};
use arithplane_core::{CompiledExpr, Lattice, SplitPrime};

use crate::config::{load_lattice_file, parse_int_poly, LoadError};
use crate::expr::{parse_expr, ExprError};
use crate::report;
use crate::runner::Threaded;

#[derive(Debug, Parser)]
#[command(
    name = "arithplane",
    version,
    about = "Prime splitting, norm fibres and splitting densities over a lattice of number fields"
)]
pub struct Cli {
    /// Lattice configuration file; without it only Q is available
    #[arg(long, global = true, value_name = "FILE")]
    pub lattice: Option<PathBuf>,
    /// Worker threads for prime scans
    #[arg(long, global = true, value_name = "K", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Write the primary output to FILE instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the lattice and print per-field and per-pair diagnostics
    Validate,
    /// Points of a field over a rational prime
    Split {
        #[arg(long)]
        field: String,
        #[arg(long)]
        prime: u64,
    },
    /// Whether the points over a prime have an extension of residue degree 1
    Pi(PredicateArgs),
    /// Whether the points over a prime split completely
    Psi(PredicateArgs),
    /// Pi-membership vector of each base point over a prime
    Fingerprint {
        /// Extension K/L; repeat for each member of the family
        #[arg(long = "ext", value_name = "K/L", required = true, value_parser = parse_ext_arg)]
        exts: Vec<(String, String)>,
        #[arg(long)]
        prime: u64,
    },
    /// Empirical density of a set expression
    Density {
        /// Set expression, e.g. "Psi(Qi/Q) & !{3}"
        #[arg(long)]
        expr: String,
        /// Norm bound N
        #[arg(long, value_name = "N")]
        max: u64,
        /// Write the checkpoint trace as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Frobenius cycle-type histogram of a field's polynomial
    Frobenius {
        #[arg(long)]
        field: String,
        #[arg(long, value_name = "N")]
        max: u64,
        /// Write the histogram as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Image of the points over a prime under an automorphism
    Galois {
        #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
        ext: (String, String),
        /// Index of the automorphism of K as listed by `validate`
        #[arg(long, value_name = "INDEX")]
        auto: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Direct)]
        mode: ModeArg,
    },
    /// Points whose residue kills a given element, up to a prime bound
    Annihilator {
        #[arg(long)]
        field: String,
        /// Coefficients of the element in the generator, constant first
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Run one of the checkers
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Args)]
pub struct PredicateArgs {
    #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
    pub ext: (String, String),
    #[arg(long)]
    pub prime: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    BruteForce,
    /// Run both modes and report any disagreement
    Both,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Compare Pi/Psi of KM/K with the pullback of M/L along K/L
    Pullback {
        #[arg(long, value_name = "L")]
        base: String,
        #[arg(long, value_name = "K")]
        k: String,
        #[arg(long, value_name = "M")]
        m: String,
        /// Compositum of K and M
        #[arg(long, value_name = "KM")]
        km: String,
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Psi(K1/L) & Psi(K2/L) against Psi(K1K2/L)
    PsiProduct {
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
        #[arg(long)]
        composite: String,
        #[arg(long, default_value = "Q")]
        base: String,
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Count points where Pi and Psi disagree
    PiEqPsi {
        #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
        ext: (String, String),
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Exact counting identity |A|+|B| = |A|B|+|A&B| at every checkpoint
    InclusionExclusion {
        #[arg(long, value_name = "EXPR")]
        a: String,
        #[arg(long, value_name = "EXPR")]
        b: String,
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Smallest point in the intersection of several Pi sets
    PiIntersection {
        /// Extension K/L; repeat for each set
        #[arg(long = "ext", value_name = "K/L", required = true, value_parser = parse_ext_arg)]
        exts: Vec<(String, String)>,
        #[arg(long, value_name = "N")]
        max: u64,
    },
    /// Enumerated norm fibre sizes against (|pK|-1)/(|pL|-1)
    NormFiber {
        #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
        ext: (String, String),
        #[arg(long, value_name = "N")]
        max: u64,
        /// Largest upper residue field enumerated element by element
        #[arg(long, value_name = "Q", default_value_t = 1 << 20)]
        enum_limit: u128,
    },
    /// Induced action under random choices of sections
    SectionIndependence {
        #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
        ext: (String, String),
        #[arg(long, value_name = "N")]
        max: u64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Coefficient box radius for the acting elements
        #[arg(long, default_value_t = 5)]
        radius: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest upper residue field for which norm fibres are tabulated
        #[arg(long, value_name = "Q", default_value_t = 1 << 20)]
        table_limit: u128,
    },
    /// Direct and brute-force Galois images for every declared automorphism
    GaloisModes {
        #[arg(long, value_name = "K/L", value_parser = parse_ext_arg)]
        ext: (String, String),
        #[arg(long, value_name = "N")]
        max: u64,
    },
}

fn parse_ext_arg(s: &str) -> Result<(String, String), String> {
    match s.split_once('/') {
        Some((k, l)) if !k.trim().is_empty() && !l.trim().is_empty() => Ok((k.trim().into(), l.trim().into())),
        _ => Err(format!("expected K/L, got `{s}`")),
    }
}

/// A failed invocation, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lattice(String),
    Refused(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lattice(_) => 2,
            Failure::Refused(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Lattice(m) | Failure::Refused(m) => m,
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::Lattice(e.to_string())
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Lattice(e.to_string())
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        Failure::Refused(e.to_string())
    }
}

impl From<PlaneError> for Failure {
    fn from(e: PlaneError) -> Self {
        Failure::Refused(e.to_string())
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::Lattice(e) => e.into(),
            DensityError::NotOverQ(_) => Failure::Lattice(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        Failure::Usage(format!("expression: {e}"))
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut out = String::new();
    let mut warnings = Vec::new();
    let result = execute(&cli, &mut out, &mut warnings).and_then(|()| match &cli.output {
        Some(path) => std::fs::write(path, &out).map_err(|e| io_failure(path, e)),
        None => stdout.write_all(out.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    });
    for w in warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(cli: &Cli) -> Result<Lattice, Failure> {
    match &cli.lattice {
        Some(path) => Ok(load_lattice_file(path)?),
        None => Ok(Lattice::default()),
    }
}

fn ext(lattice: &Lattice, (k, l): &(String, String)) -> Result<Extension, Failure> {
    Ok(lattice.extension(k, l)?)
}

fn refuse_excluded(e: &Extension, p: u64) -> Result<(), Failure> {
    match e.exclusion(p) {
        Some(reason) => Err(SpectrumError::Ramified { p, extension: e.name(), reason }.into()),
        None => Ok(()),
    }
}

fn require_prime(p: u64) -> Result<(), Failure> {
    if arithplane_core::arith::is_prime(p) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{p} is not a prime")))
    }
}

/// Points of the base of `e` over `p`, excluded primes refused.
fn base_points(e: &Extension, p: u64) -> Result<Vec<SplitPrime>, Failure> {
    require_prime(p)?;
    refuse_excluded(e, p)?;
    Ok(if e.base.degree() == 1 { vec![spectrum::rational_point(p)] } else { spectrum::split_prime(&e.base, p) })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass_fail(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn degrees(d: &[usize]) -> String {
    d.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn skipped_line(out: &mut String, skipped: &[density::Skipped]) {
    let ps: Vec<String> = skipped.iter().map(|s| s.p.to_string()).collect();
    let _ = writeln!(out, "excluded primes: {}", if ps.is_empty() { "none".into() } else { ps.join(" ") });
}

fn execute(cli: &Cli, out: &mut String, warnings: &mut Vec<String>) -> Result<(), Failure> {
    let lattice = load(cli)?;
    let runner = Threaded::new(cli.workers as usize);
    macro_rules! w {
        ($($t:tt)*) => {{ let _ = writeln!(out, $($t)*); }};
    }
    match &cli.command {
        Command::Validate => report::validate(&lattice, out),
        Command::Split { field, prime } => {
            require_prime(*prime)?;
            let f = lattice.field(field)?;
            let points = spectrum::split_prime(f, *prime);
            w!("{} over {}: {} point(s)", field, prime, points.len());
            for q in &points {
                w!("{q}  residue degree {}  norm {}", q.residue_degree(), q.norm());
            }
            if points.iter().any(|q| q.ramified) {
                warnings.push(format!("{prime} is ramified in the order of {field}"));
            }
        }
        Command::Pi(a) | Command::Psi(a) => {
            let is_pi = matches!(cli.command, Command::Pi(_));
            let e = ext(&lattice, &a.ext)?;
            for lower in base_points(&e, a.prime)? {
                let d = spectrum::relative_splitting(&e, &lower)?;
                let member = if is_pi { d.contains(&1) } else { d.iter().all(|&x| x == 1) };
                let name = if is_pi { "Pi" } else { "Psi" };
                w!("{lower} in {name}({}): {}  residue degrees [{}]", e.name(), yes_no(member), degrees(&d));
            }
        }
        Command::Fingerprint { exts, prime } => {
            let family = exts.iter().map(|x| ext(&lattice, x)).collect::<Result<Vec<_>, _>>()?;
            let base = family[0].base.name().to_string();
            if let Some(bad) = family.iter().find(|e| e.base.name() != base) {
                return Err(Failure::Usage(format!("{} and {} have different bases", family[0].name(), bad.name())));
            }
            for e in &family {
                refuse_excluded(e, *prime)?;
            }
            let names: Vec<String> = family.iter().map(|e| format!("Pi({})", e.name())).collect();
            w!("family: {}", names.join(" "));
            for lower in base_points(&family[0], *prime)? {
                let bits = spectrum::fingerprint(&lower, &family)?;
                let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                w!("{lower}: {s}");
            }
        }
        Command::Density { expr, max, csv } => {
            let parsed = parse_expr(expr)?;
            let compiled = CompiledExpr::new(&parsed, &lattice)?;
            let est = density::estimate_density(&compiled, *max, &runner)?;
            let prediction = chebotarev_predict(&compiled, &lattice);
            if prediction.is_none() {
                warnings.push("no declared Galois field covers the expression; no Chebotarev prediction".into());
            }
            report::density(&est, prediction.as_ref(), out);
            if let Some(path) = csv {
                std::fs::write(path, report::density_csv(&est)).map_err(|e| io_failure(path, e))?;
            }
        }
        Command::Frobenius { field, max, csv } => {
            density::require_over_q(&lattice, field)?;
            let f = lattice.field(field)?;
            let stats = density::frobenius_histogram(f, *max, &runner);
            w!("field: {field}  polynomial: {}", f.poly());
            w!("bound: {}  primes counted: {}", stats.bound, stats.total);
            for (t, c) in &stats.counts {
                w!("{:<12} {:>10} {:.6}", format_cycle_type(t), c, stats.frequency(t));
            }
            let skipped: Vec<String> = stats.skipped.iter().map(u64::to_string).collect();
            w!("excluded primes: {}", if skipped.is_empty() { "none".into() } else { skipped.join(" ") });
            if let Some(path) = csv {
                std::fs::write(path, report::frobenius_csv(&stats)).map_err(|e| io_failure(path, e))?;
            }
        }
        Command::Galois { ext: x, auto, prime, mode } => {
            let e = ext(&lattice, x)?;
            let autos = lattice.automorphisms(e.top.name())?;
            let sigma = autos.get(*auto).ok_or_else(|| {
                Failure::Usage(format!(
                    "{} has {} automorphisms; index {auto} is out of range",
                    e.top.name(),
                    autos.len()
                ))
            })?;
            require_prime(*prime)?;
            refuse_excluded(&e, *prime)?;
            w!("sigma: x -> {sigma}");
            for q in spectrum::split_prime(&e.top, *prime) {
                match mode {
                    ModeArg::Direct => w!("{q} -> {}", plane::galois_image(&e, sigma, &q, GaloisMode::Direct)?),
                    ModeArg::BruteForce => w!("{q} -> {}", plane::galois_image(&e, sigma, &q, GaloisMode::BruteForce)?),
                    ModeArg::Both => {
                        let d = plane::galois_image(&e, sigma, &q, GaloisMode::Direct)?;
                        let b = plane::galois_image(&e, sigma, &q, GaloisMode::BruteForce)?;
                        w!("{q} -> {d} (direct), {b} (brute force): {}", if d == b { "agree" } else { "DISAGREE" });
                    }
                }
            }
        }
        Command::Annihilator { field, gamma, max } => {
            let f = lattice.field(field)?;
            let g = parse_int_poly(gamma).map_err(|m| Failure::Usage(format!("gamma: {m}")))?;
            if g.is_zero() {
                return Err(Failure::Usage("gamma must be nonzero".into()));
            }
            let points = plane::annihilator_set(&g, f, *max, &runner);
            w!("gamma = {g} in {field}; points with p <= {max}: {}", points.len());
            for q in points {
                w!("{q}");
            }
        }
        Command::Check(c) => check(&lattice, c, &runner, out)?,
    }
    Ok(())
}

fn check(lattice: &Lattice, c: &CheckCommand, runner: &Threaded, out: &mut String) -> Result<(), Failure> {
    macro_rules! w {
        ($($t:tt)*) => {{ let _ = writeln!(out, $($t)*); }};
    }
    match c {
        CheckCommand::Pullback { base, k, m, km, max } => {
            let r = density::check_pullback(lattice, base, k, m, km, *max, runner)?;
            w!("pullback: L={base} K={k} M={m} KM={km} N={max}");
            w!("point of K | below | KM/K degrees | M/L degrees | Pi | Psi");
            for row in &r.rows {
                w!(
                    "{} | {} | [{}] | [{}] | {} | {}",
                    row.upper,
                    row.lower,
                    degrees(&row.direct_degrees),
                    degrees(&row.pullback_degrees),
                    if row.pi_agrees() { "agree" } else { "DISCREPANCY" },
                    if row.psi_agrees() { "agree" } else { "DISCREPANCY" },
                );
            }
            w!("points: {}", r.rows.len());
            w!("Pi agreements: {}/{}", r.pi_agreements(), r.rows.len());
            w!("Psi agreements: {}/{}", r.psi_agreements(), r.rows.len());
            skipped_line(out, &r.skipped);
        }
        CheckCommand::PsiProduct { k1, k2, composite, base, max } => {
            let r = density::check_psi_product(lattice, k1, k2, composite, base, *max, runner)?;
            let [a, b, c] = &r.extensions;
            w!("Psi({a}) & Psi({b}) vs Psi({c}), N={max}");
            w!("points checked: {}", r.checked);
            w!("intersection hits: {}  density {:.6}", r.intersection_hits, r.intersection_density());
            w!("violations: {}", r.violations.len());
            for v in &r.violations {
                w!("  {}: intersection {} composite {}", v.point, yes_no(v.intersection), yes_no(v.composite));
            }
            skipped_line(out, &r.skipped);
            w!("result: {}", pass_fail(r.violations.is_empty()));
        }
        CheckCommand::PiEqPsi { ext: (k, l), max } => {
            let r = density::check_pi_eq_psi(lattice, k, l, *max, runner)?;
            w!("Pi vs Psi for {}, N={max}; {} is {}Galois", r.extension, k, if r.galois { "" } else { "not " });
            w!("points checked: {}", r.checked);
            w!("disagreements: {}  density {:.6}", r.disagreements, r.disagreement_density());
            for q in &r.examples {
                w!("  {q}");
            }
            skipped_line(out, &r.skipped);
            if r.galois {
                w!("result: {}", pass_fail(r.disagreements == 0));
            }
        }
        CheckCommand::InclusionExclusion { a, b, max } => {
            let (ea, eb) = (parse_expr(a)?, parse_expr(b)?);
            let r = density::check_inclusion_exclusion(lattice, &ea, &eb, *max, runner)?;
            w!("A = {}  B = {}", r.a, r.b);
            w!("N,|A|,|B|,|A|B|,|A&B|,total,identity");
            for row in &r.rows {
                w!(
                    "{},{},{},{},{},{},{}",
                    row.n,
                    row.a,
                    row.b,
                    row.union,
                    row.intersection,
                    row.total,
                    if row.identity_holds() { "holds" } else { "FAILS" }
                );
            }
            skipped_line(out, &r.skipped);
            w!("result: {}", pass_fail(r.passed()));
        }
        CheckCommand::PiIntersection { exts, max } => {
            let base = &exts[0].1;
            if let Some((k, l)) = exts.iter().find(|(_, l)| l != base) {
                return Err(Failure::Usage(format!("{k}/{l} does not share the base {base}")));
            }
            let tops: Vec<&str> = exts.iter().map(|(k, _)| k.as_str()).collect();
            let r = density::check_pi_intersection(lattice, &tops, base, *max, runner)?;
            let sets: Vec<String> = r.extensions.iter().map(|e| format!("Pi({e})")).collect();
            w!("intersection of {}, N={max}", sets.join(" & "));
            match &r.witness {
                Some(q) => w!("witness: {q}"),
                None => w!("witness: none up to {max}"),
            }
            skipped_line(out, &r.skipped);
        }
        CheckCommand::NormFiber { ext: x, max, enum_limit } => {
            let e = ext(lattice, x)?;
            let r = plane::check_norm_fiber(&e, *max, *enum_limit, runner);
            w!("norm fibres for {}, p <= {max}", e.name());
            w!("points of K: {}  enumerated: {}  fibres compared: {}", r.points, r.enumerated, r.fibres);
            w!("mismatches: {}", r.mismatches.len());
            for m in &r.mismatches {
                w!("  {m}");
            }
            let ps: Vec<String> = r.excluded.iter().map(|(p, _)| p.to_string()).collect();
            w!("excluded primes: {}", if ps.is_empty() { "none".into() } else { ps.join(" ") });
            w!("result: {}", pass_fail(r.passed()));
        }
        CheckCommand::SectionIndependence { ext: x, max, trials, radius, seed, table_limit } => {
            let e = ext(lattice, x)?;
            let cfg = SectionTrials { trials: *trials, radius: *radius, seed: *seed, table_limit: *table_limit };
            let r = plane::check_section_independence(&e, *max, cfg, runner);
            w!("section independence for {}, p <= {max}, {trials} trials, box radius {radius}", e.name());
            w!("points: {}  comparisons: {}", r.points, r.comparisons);
            w!("mismatches: {}", r.mismatches.len());
            for m in &r.mismatches {
                w!("  {m}");
            }
            let ps: Vec<String> = r.excluded.iter().map(|(p, _)| p.to_string()).collect();
            w!("excluded primes: {}", if ps.is_empty() { "none".into() } else { ps.join(" ") });
            w!("result: {}", pass_fail(r.passed()));
        }
        CheckCommand::GaloisModes { ext: x, max } => {
            let e = ext(lattice, x)?;
            let autos = plane::relative_group(&e, lattice.automorphisms(e.top.name())?);
            let r = plane::check_galois_modes(&e, &autos, *max, runner);
            w!(
                "Galois image modes for {}, p <= {max}, {} automorphisms fixing {}",
                e.name(),
                autos.len(),
                e.base.name()
            );
            w!("comparisons: {}  primes outside Psi: {}", r.comparisons, r.outside_psi);
            w!("disagreements: {}", r.disagreements.len());
            for d in &r.disagreements {
                w!("  {d}");
            }
            let ps: Vec<String> = r.excluded.iter().map(u64::to_string).collect();
            w!("excluded primes: {}", if ps.is_empty() { "none".into() } else { ps.join(" ") });
            w!("result: {}", pass_fail(r.disagreements.is_empty()));
        }
    }
    Ok(())
}

pub(crate) fn certificate(c: Certificate) -> String {
    match c {
        Certificate::Linear => "linear".into(),
        Certificate::IrreducibleMod(p) => format!("irreducible mod {p}"),
        Certificate::Trusted => "trusted".into(),
    }
}

/// Help text of the program and of every subcommand, in declaration order.
pub fn full_help() -> String {
    use clap::CommandFactory;
    fn walk(cmd: &mut clap::Command, prefix: &str, out: &mut String) {
        let name = if prefix.is_empty() { cmd.get_name().to_string() } else { format!("{prefix} {}", cmd.get_name()) };
        let _ = writeln!(out, "==> {name} --help");
        let _ = writeln!(out, "{}", cmd.render_help());
        let mut subs: Vec<clap::Command> = cmd.get_subcommands().cloned().collect();
        for sub in subs.iter_mut().filter(|s| s.get_name() != "help") {
            walk(sub, &name, out);
        }
    }
    let mut cmd = Cli::command();
    cmd.build();
    let mut out = String::new();
    walk(&mut cmd, "", &mut out);
    out
}
