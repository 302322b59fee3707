use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use leibnizlab::automorphism::{aut_dim_audit, build_aut, AutParams, AutParamsJson};
use leibnizlab::catalog::{admissible_grid, build, identify, validate_family, Family, FamilySpec};
use leibnizlab::local::{
    certify_probes, default_probes, localaut_dim_audit, localaut_pattern, witness_local_not_global, DEFAULT_PROBE_COUNT,
};
use leibnizlab::matrix::MatrixJson;
use leibnizlab::scalar::{format_rational, parse_rational, Rational};
use leibnizlab::{is_automorphism, Algebra, AutCheck, Matrix, SeriesKind};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "leibnizlab", version, about = "Exact computations on the p-filiform Leibniz families mu1, mu2, mu3")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "LEIBNIZLAB_SEED", default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family member and write its multiplication table as JSON.
    Catalog {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Leibniz identity and report series and characteristic sequence.
    Analyze {
        #[arg(long)]
        algebra: PathBuf,
        /// Random samples when estimating the characteristic sequence.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Automorphisms.
    #[command(subcommand)]
    Aut(AutCommand),
    /// Local automorphisms.
    #[command(subcommand)]
    Localaut(LocalCommand),
    /// Show an operator that is local but not an automorphism.
    Witness {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Run every audit over a grid of admissible parameters.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "mu1,mu2,mu3")]
        families: Vec<Family>,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Treat the known mu2 automorphism-dimension offset as a mismatch.
        #[arg(long)]
        strict_remarks: bool,
    },
}

#[derive(Subcommand)]
enum AutCommand {
    /// Build the automorphism matrix for a parameter set.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
        /// Parameter JSON; the identity parameters when omitted.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Verify multiplicativity against the multiplication table.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the parameter count with the derivation algebra and the closed form.
    Audit {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Subcommand)]
enum LocalCommand {
    /// Write the local-automorphism matrix pattern as JSON.
    Pattern {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a matrix at a set of probe vectors.
    Certify {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        delta: PathBuf,
        /// `default`, or a JSON file holding a list of vectors.
        #[arg(long, default_value = "default")]
        probes: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare pattern free counts with the closed form over a grid.
    Audit {
        /// Grid bounds, e.g. `nmax=20,kmax=3`.
        #[arg(long, default_value = "nmax=20,kmax=3", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, value_delimiter = ',', default_value = "mu1,mu2,mu3")]
        families: Vec<Family>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
}

impl SpecArgs {
    fn spec(&self) -> Result<FamilySpec> {
        let s = FamilySpec::new(self.family, self.n, self.k)?;
        for w in s.warnings() {
            eprintln!("warning: {w}");
        }
        Ok(s)
    }
}

fn parse_grid(text: &str) -> std::result::Result<(usize, usize), String> {
    let (mut nmax, mut kmax) = (None, None);
    for part in text.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        let value: usize = value.trim().parse().map_err(|e| format!("{key}: {e}"))?;
        match key.trim() {
            "nmax" => nmax = Some(value),
            "kmax" => kmax = Some(value),
            other => return Err(format!("unknown grid key `{other}`")),
        }
    }
    Ok((nmax.ok_or("missing nmax")?, kmax.ok_or("missing kmax")?))
}

enum Status {
    Ok,
    Mismatch,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Mismatch) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let seed = cli.seed;
    match cli.command {
        Command::Catalog { spec, out } => {
            let a = build(&spec.spec()?);
            emit(out.as_deref(), &a.to_json_string())?;
            Ok(Status::Ok)
        }
        Command::Analyze { algebra, samples } => analyze(&read_algebra(&algebra)?, samples, seed),
        Command::Aut(AutCommand::Build { spec, params, check, out }) => {
            let s = spec.spec()?;
            let p = match params {
                Some(path) => {
                    let json: AutParamsJson =
                        serde_json::from_str(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
                    AutParams::from_json(&json)?
                }
                None => AutParams::identity(&s),
            };
            if p.family != s.family {
                bail!("parameters are for {}, not {}", p.family, s.family);
            }
            let m = build_aut(&s, &p)?.m;
            if let Some(path) = &out {
                emit(Some(path), &to_pretty(&m.to_json())?)?;
            }
            print!("{}", format_matrix(&m));
            if !check {
                return Ok(Status::Ok);
            }
            let verdict = is_automorphism(&build(&s), &m);
            println!("check: {}", describe_check(&build(&s), &verdict));
            Ok(if verdict.is_automorphism() { Status::Ok } else { Status::Mismatch })
        }
        Command::Aut(AutCommand::Audit { spec }) => {
            let audit = aut_dim_audit(&spec.spec()?);
            println!("{}", audit.spec);
            println!("parameters:       {}", audit.param_count);
            println!("closed form:      {}", audit.remark);
            println!("derivation dim:   {}", audit.derivation_dim);
            println!("tangent rank:     {}", audit.tangent_rank);
            println!("tangents are derivations: {}", audit.tangents_are_derivations);
            println!("form complete: {}, matches closed form: {}", audit.form_is_complete(), audit.matches_remark());
            Ok(if audit.form_is_complete() { Status::Ok } else { Status::Mismatch })
        }
        Command::Localaut(LocalCommand::Pattern { spec, out }) => {
            let pat = localaut_pattern(&spec.spec()?);
            emit(out.as_deref(), &to_pretty(&pat.to_json())?)?;
            if out.is_some() {
                println!("{} free entries, {} ties, dimension {}", pat.free.len(), pat.ties.len(), pat.free_count());
            }
            Ok(Status::Ok)
        }
        Command::Localaut(LocalCommand::Certify { algebra, delta, probes, report }) => {
            certify(&read_algebra(&algebra)?, &delta, &probes, report.as_deref(), seed)
        }
        Command::Localaut(LocalCommand::Audit { grid: (nmax, kmax), families, csv }) => {
            local_audit(&families, nmax, kmax, csv.as_deref())
        }
        Command::Witness { spec } => witness(&spec.spec()?, seed),
        Command::Sweep { families, nmax, kmax, csv, strict_remarks } => {
            sweep(&families, nmax, kmax, csv.as_deref(), strict_remarks, seed)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_algebra(path: &Path) -> Result<Algebra> {
    Algebra::from_json_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn format_matrix(m: &Matrix) -> String {
    let cells: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    cells.iter().map(|r| r.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join(" ") + "\n").collect()
}

fn describe_check(a: &Algebra, check: &AutCheck) -> String {
    match check {
        AutCheck::Automorphism => "automorphism".into(),
        AutCheck::Singular => "singular".into(),
        AutCheck::NotMultiplicative { i, j, defect } => {
            let names = a.basis_names();
            format!(
                "not multiplicative at ({}, {}): phi([x,y]) - [phi(x),phi(y)] = {}",
                names[*i],
                names[*j],
                a.format_vector(defect)
            )
        }
        other => format!("{other:?}"),
    }
}

fn analyze(a: &Algebra, samples: usize, seed: u64) -> Result<Status> {
    let names = a.basis_names();
    println!("dimension: {}", a.dim());
    let violations = a.leibniz_violations();
    if !violations.is_empty() {
        println!("leibniz: {} violating triples", violations.len());
        for v in &violations {
            println!("  ({}, {}, {}): {}", names[v.i], names[v.j], names[v.k], a.format_vector(&v.defect));
        }
        return Ok(Status::Mismatch);
    }
    println!("leibniz: ok");
    for kind in [SeriesKind::LowerCentral, SeriesKind::Derived] {
        let r = a.series(kind);
        let label = match kind {
            SeriesKind::LowerCentral => "lower central",
            SeriesKind::Derived => "derived",
        };
        let index = r.index.map_or("none".to_owned(), |i| i.to_string());
        println!("{label} series: {:?}, index {index}", r.subspace_dims);
    }
    if a.series(SeriesKind::LowerCentral).index.is_none() {
        println!("not nilpotent");
        return Ok(Status::Ok);
    }
    let (c, witness) = a.char_seq_estimate(samples, seed)?;
    println!("characteristic sequence: {c} at {}", a.format_vector(&witness));
    println!("graded dims: {:?}", a.graded_dims()?);
    match a.non_lie_witness() {
        Some(w) => println!("non-Lie: [{}, {}] gives {}", names[w.x], names[w.y], a.format_vector(&w.value)),
        None => println!("non-Lie: no witness (Lie algebra)"),
    }
    let Some(spec) = identify(a) else {
        println!("family: none");
        return Ok(Status::Ok);
    };
    let report = validate_family(a, &spec);
    println!("family: {spec}, checks {}", if report.ok() { "ok" } else { "FAILED" });
    if !report.ok() {
        println!("{report:?}");
        return Ok(Status::Mismatch);
    }
    Ok(Status::Ok)
}

fn read_probes(spec: &FamilySpec, probes: &str, seed: u64) -> Result<Vec<Vec<Rational>>> {
    if probes == "default" {
        return Ok(default_probes(spec, seed, DEFAULT_PROBE_COUNT));
    }
    let path = Path::new(probes);
    let raw: Vec<Vec<String>> =
        serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    raw.iter()
        .map(|v| {
            if v.len() != spec.n {
                bail!("probe of length {} for dimension {}", v.len(), spec.n);
            }
            v.iter().map(|s| Ok(parse_rational(s)?)).collect()
        })
        .collect()
}

fn certify(a: &Algebra, delta: &Path, probes: &str, report: Option<&Path>, seed: u64) -> Result<Status> {
    let Some(spec) = identify(a) else { bail!("the algebra is not one of mu1, mu2, mu3 in standard basis") };
    let json: MatrixJson =
        serde_json::from_str(&read(delta)?).with_context(|| format!("parsing {}", delta.display()))?;
    let m = Matrix::from_json(&json)?;
    if (m.rows(), m.cols()) != (spec.n, spec.n) {
        bail!("delta is {}x{}, expected {}x{}", m.rows(), m.cols(), spec.n, spec.n);
    }
    let points = read_probes(&spec, probes, seed)?;
    let r = certify_probes(&spec, &m, &points);
    let radical = r.certificates().filter(|c| !c.is_rational()).count();
    println!("{spec}: {}/{} probes certified ({radical} with radicals)", r.certified(), r.outcomes.len());
    if let Some((o, e)) = r.first_failure() {
        println!("first failure at {} [{}]: {}", a.format_vector(&o.point), e.case, e.reason);
    }
    if let Some(path) = report {
        let mut json = r.to_json();
        json.seed = (probes == "default").then_some(seed);
        fs::write(path, to_pretty(&json)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if r.all_certified() { Status::Ok } else { Status::Mismatch })
}

#[derive(Serialize)]
struct LocalAuditRow {
    family: Family,
    n: usize,
    k: usize,
    free_count: usize,
    closed_form: usize,
    aut_params: usize,
    matches: bool,
    exceeds_aut: bool,
}

fn grid(families: &[Family], nmax: usize, kmax: usize) -> Result<Vec<FamilySpec>> {
    let specs = admissible_grid(families, nmax, kmax);
    if specs.is_empty() {
        bail!("no admissible points with n <= {nmax}, k <= {kmax}");
    }
    Ok(specs)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn local_audit(families: &[Family], nmax: usize, kmax: usize, csv: Option<&Path>) -> Result<Status> {
    let rows: Vec<LocalAuditRow> = grid(families, nmax, kmax)?
        .iter()
        .map(|s| {
            let a = localaut_dim_audit(s);
            LocalAuditRow {
                family: s.family,
                n: s.n,
                k: s.k,
                free_count: a.free_count,
                closed_form: a.remark,
                aut_params: a.aut_param_count,
                matches: a.matches_remark(),
                exceeds_aut: a.exceeds_aut(),
            }
        })
        .collect();
    let bad: Vec<&LocalAuditRow> = rows.iter().filter(|r| !(r.matches && r.exceeds_aut)).collect();
    for r in &bad {
        println!(
            "mismatch: {}(n={}, k={}) free {} closed form {} aut {}",
            r.family, r.n, r.k, r.free_count, r.closed_form, r.aut_params
        );
    }
    println!("{} points, {} mismatches", rows.len(), bad.len());
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(if bad.is_empty() { Status::Ok } else { Status::Mismatch })
}

fn witness(spec: &FamilySpec, seed: u64) -> Result<Status> {
    let w = witness_local_not_global(spec, seed)?;
    let a = build(spec);
    println!("{spec}");
    print!("{}", format_matrix(&w.phi));
    println!("automorphism check: {}", describe_check(&a, &w.check));
    println!("in local pattern: {}", w.in_pattern);
    let radical = w.probes.certificates().filter(|c| !c.is_rational()).count();
    println!("probes: {}/{} certified ({radical} with radicals)", w.probes.certified(), w.probes.outcomes.len());
    if let Some((o, e)) = w.probes.first_failure() {
        println!("first failure at {} [{}]: {}", a.format_vector(&o.point), e.case, e.reason);
    }
    println!("local but not global: {}", w.ok());
    Ok(if w.ok() { Status::Ok } else { Status::Mismatch })
}

fn sweep(families: &[Family], nmax: usize, kmax: usize, csv: Option<&Path>, strict: bool, seed: u64) -> Result<Status> {
    let rows = leibnizlab::sweep(&grid(families, nmax, kmax)?, seed);
    let bad: Vec<_> = rows.iter().filter(|r| !r.ok(strict)).collect();
    for r in &bad {
        println!("mismatch: {r:?}");
    }
    let offsets = rows.iter().filter(|r| r.aut_dim_computed != r.aut_dim_remark).count();
    println!("{} points, {} mismatches, {offsets} automorphism-dimension offsets", rows.len(), bad.len());
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(if bad.is_empty() { Status::Ok } else { Status::Mismatch })
}
