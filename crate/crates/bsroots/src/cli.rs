//! Command-line front end: parse inputs, orchestrate the pipeline, and emit
//! human-readable tables or machine-readable reports.
//!
//! Subcommands:
//!
//! * `spectrum` — spectrum of a weighted-homogeneous germ, printed as a
//!   polynomial in `T = t^(1/m)`.
//! * `local-bs` — reduced and full local Bernstein–Sato root sets of a germ.
//! * `gamma` — the binomial (smooth-case) dimension table for given `n, d`.
//! * `tables` — the graded tables `γ, μ, ν, μ'', μ', δ` of a polynomial.
//! * `deltas` — the defect polynomial `Σ_k δ_k T^k`.
//! * `e2` — tables including the second-page dimensions `μ⁽²⁾, ν⁽²⁾`, with
//!   the cross-check `δ_k = μ⁽²⁾_k` off `d·R_Z` enforced before printing.
//! * `arnold` — the maximal node count of a hypersurface of given `n, d`.
//! * `analyze` — the full candidate-root classification.
//!
//! Exit codes: `0` success; `1` unusable input (syntax, files, flags);
//! `2` input that parses but contradicts the hypotheses (wrong or missing
//! singularity data); `3` successful analysis that left candidates
//! undetermined (the report is still printed); `4` an internal invariant
//! failed — a bug, never a user error.
//!
//! JSON output is canonical: keys sorted, two-space indentation, one
//! trailing newline, rationals as strings `"p/q"` in lowest terms.  Parsing
//! a report and re-serializing it reproduces the bytes exactly.
//!
//! The environment variable `BSROOTS_THREADS` caps the worker threads used
//! by the rank computations; output assembly is sequential and
//! deterministic regardless.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bsengine::{analyze, AnalyzeOptions, EngineError, RootReport, Status};
use crate::koszul::{
    arnold_number, compute_tables, gamma_table, ArithMode, GradedTable, KoszulError, TableBundle,
};
use crate::localspec::{
    ade_weights, aggregate, analyze_line_arrangement, local_bs_roots, parse_sing_file, spectrum,
    LocalError, SingularityData,
};
use crate::polyring::{parse_factored, parse_poly, HomogPoly, ParseError};
use crate::{parse_rat, rat_string, Rat};

// ======================================================================
// Exit codes and failure classification
// ======================================================================

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// A failed run, sorted by who is at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliFailure {
    /// The input cannot be used: syntax errors, unreadable files, bad
    /// weights, out-of-range options.
    Input(String),
    /// The input parses but is inconsistent with the mathematical
    /// hypotheses (singularity data that contradicts the tables).
    Data(String),
    /// An internal invariant failed; the tables are wrong and this is a
    /// bug.
    Invariant(String),
}

impl CliFailure {
    pub fn code(&self) -> i32 {
        match self {
            CliFailure::Input(_) => EXIT_INPUT,
            CliFailure::Data(_) => EXIT_DATA,
            CliFailure::Invariant(_) => EXIT_INVARIANT,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliFailure::Input(m) | CliFailure::Data(m) | CliFailure::Invariant(m) => m,
        }
    }
}

impl From<ParseError> for CliFailure {
    fn from(e: ParseError) -> Self {
        CliFailure::Input(e.to_string())
    }
}

impl From<LocalError> for CliFailure {
    fn from(e: LocalError) -> Self {
        CliFailure::Input(e.to_string())
    }
}

impl From<KoszulError> for CliFailure {
    fn from(e: KoszulError) -> Self {
        match e {
            // A non-isolated singular locus is a property of the input.
            KoszulError::NotIsolated { .. } => CliFailure::Input(e.to_string()),
            _ => CliFailure::Invariant(e.to_string()),
        }
    }
}

impl From<EngineError> for CliFailure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::WViolation { .. } | EngineError::TooManyNodes { .. } => {
                CliFailure::Data(e.to_string())
            }
            EngineError::ChiMismatch { .. } => CliFailure::Invariant(e.to_string()),
            EngineError::NotApplicable { .. } => CliFailure::Input(e.to_string()),
        }
    }
}

// ======================================================================
// Argument grammar
// ======================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned, human-readable text.
    Text,
    /// Tab-separated values.
    Tsv,
    /// Canonical JSON (sorted keys, byte-stable round trips).
    Json,
}

/// Exact computation of Bernstein–Sato root candidates for homogeneous
/// polynomials whose projective hypersurface has only isolated
/// weighted-homogeneous singularities.
#[derive(Debug, Parser)]
#[command(name = "bsroots", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum of a weighted-homogeneous germ as a polynomial in T = t^(1/m)
    Spectrum(GermArgs),
    /// Local Bernstein–Sato roots (reduced and full, up to sign) of a germ
    LocalBs(GermArgs),
    /// Binomial dimension table: coefficients of (t + ... + t^(d-1))^n
    Gamma(SizeArgs),
    /// Graded tables gamma, mu, nu, mu'', mu', delta of a polynomial
    Tables(AnalysisRequest),
    /// Defect polynomial: sum of delta_k T^k
    Deltas(AnalysisRequest),
    /// Tables with the second-page dimensions, cross-checked against delta
    E2(AnalysisRequest),
    /// Largest node count a hypersurface of these n, d can carry
    Arnold(SizeArgs),
    /// Classify every candidate root k/d, k in [1, nd)
    Analyze(AnalyzeArgs),
}

/// A local germ, given by weights or by a standard type.
#[derive(Debug, Args)]
#[command(group = ArgGroup::new("germ").required(true).args(["weights", "type_name"]))]
pub struct GermArgs {
    /// Comma-separated weights, e.g. "2/11,3/11"
    #[arg(long, value_name = "W1,W2,...")]
    pub weights: Option<String>,
    /// Singularity type preset: Ak (k >= 1), Dk (k >= 4), E6, E7, E8
    #[arg(long = "type", value_name = "NAME")]
    pub type_name: Option<String>,
    /// Chart dimension (number of local variables) for --type
    #[arg(long, value_name = "N", default_value_t = 2)]
    pub ambient: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Just the ambient size: variable count and degree.
#[derive(Debug, Args)]
pub struct SizeArgs {
    /// Number of variables n
    pub n: usize,
    /// Degree d
    pub d: u32,
    /// Last degree column to print (at most (n+1)*d)
    #[arg(long, value_name = "K")]
    pub kmax: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Inputs shared by the table-producing subcommands: the polynomial, its
/// variables, optional singularity data, and computation flags.
#[derive(Debug, Args)]
pub struct AnalysisRequest {
    /// The polynomial, e.g. "x^5 + y^4*z"
    #[arg(value_name = "POLY", required_unless_present = "lines")]
    pub poly: Option<String>,
    /// Comma-separated variable names; inferred from the input when omitted
    #[arg(long, value_name = "X,Y,...")]
    pub vars: Option<String>,
    /// A product of distinct linear forms (a line arrangement): expanded to
    /// the defining polynomial, with singularity data derived automatically
    #[arg(long, value_name = "PRODUCT", conflicts_with_all = ["poly", "sing"])]
    pub lines: Option<String>,
    /// JSON file listing the singular points (omit for a smooth
    /// hypersurface); records are {"weights": [...], "count": c},
    /// {"type": "A1", "count": c}, or
    /// {"local_poly": "...", "vars": [...], "count": c}
    #[arg(long, value_name = "FILE")]
    pub sing: Option<PathBuf>,
    /// Exact integer/rational linear algebra (the default)
    #[arg(long, conflicts_with = "modular")]
    pub exact: bool,
    /// Modular-arithmetic ranks with exact confirmation fallback
    #[arg(long)]
    pub modular: bool,
    /// Last degree column to print (at most (n+1)*d)
    #[arg(long, value_name = "K")]
    pub kmax: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub request: AnalysisRequest,
    /// For n = 3, accept a support interval reaching only d-1 in the
    /// closed-form root rule
    #[arg(long)]
    pub n3_kmax_variant: bool,
}

// ======================================================================
// Input loading
// ======================================================================

/// A parsed polynomial plus whatever singularity data came with it.
pub struct LoadedInput {
    pub poly: HomogPoly,
    pub vars: Vec<String>,
    pub szd: Option<SingularityData>,
}

impl AnalysisRequest {
    pub fn mode(&self) -> ArithMode {
        if self.modular {
            ArithMode::Modular
        } else {
            ArithMode::Exact
        }
    }

    /// Parse the polynomial (or expand the arrangement) and load the
    /// singularity data.
    pub fn load(&self) -> Result<LoadedInput, CliFailure> {
        if let Some(product) = &self.lines {
            let vars = self.resolve_vars(product)?;
            let (scalar, factors) = parse_factored(product, &vars)?;
            let arrangement = analyze_line_arrangement(&scalar, &factors)?;
            let szd = aggregate(arrangement.singularities)?;
            return Ok(LoadedInput {
                poly: arrangement.poly,
                vars,
                szd: Some(szd),
            });
        }
        let text = self.poly.as_deref().expect("clap requires POLY or --lines");
        let vars = self.resolve_vars(text)?;
        let poly = parse_poly(text, &vars)?;
        let szd = match &self.sing {
            Some(path) => {
                let body = std::fs::read_to_string(path).map_err(|e| {
                    CliFailure::Input(format!("cannot read {}: {e}", path.display()))
                })?;
                let records = parse_sing_file(&body, poly.n_vars() - 1)?;
                Some(aggregate(records)?)
            }
            None => None,
        };
        Ok(LoadedInput { poly, vars, szd })
    }

    fn resolve_vars(&self, text: &str) -> Result<Vec<String>, CliFailure> {
        let vars = match &self.vars {
            Some(list) => list
                .split(',')
                .map(|s| s.trim().to_string())
                .collect::<Vec<_>>(),
            None => infer_vars(text),
        };
        if vars.is_empty() || vars.iter().any(|v| v.is_empty()) {
            return Err(CliFailure::Input(
                "no variables: pass --vars or use named variables in the input".into(),
            ));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(CliFailure::Input(format!("duplicate variable {v:?}")));
            }
        }
        Ok(vars)
    }
}

/// Identifiers in order of first appearance: the default variable list
/// when none is given explicitly.
pub fn infer_vars(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::from(c);
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    ident.push(c2);
                    chars.next();
                } else {
                    break;
                }
            }
            if !out.contains(&ident) {
                out.push(ident);
            }
        }
    }
    out
}

/// Validate a print-range override: within `[0, (n+1)d]`, default `nd`.
fn resolve_kmax(kmax: Option<i64>, n: usize, d: u32) -> Result<i64, CliFailure> {
    let nd = n as i64 * i64::from(d);
    let cap = (n as i64 + 1) * i64::from(d);
    match kmax {
        None => Ok(nd),
        Some(k) if (0..=cap).contains(&k) => Ok(k),
        Some(k) => Err(CliFailure::Input(format!(
            "--kmax {k} is outside [0, {cap}] for n = {n}, d = {d}"
        ))),
    }
}

// ======================================================================
// Entry point
// ======================================================================

/// What a subcommand hands back: bytes for stdout and the exit code.
#[derive(Debug)]
pub struct CmdOutput {
    pub stdout: String,
    pub code: i32,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput {
            stdout,
            code: EXIT_OK,
        }
    }
}

/// Parse `std::env` arguments, run, print, and return the exit code.
pub fn run() -> i32 {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(failure) => {
            eprintln!("bsroots: {}", failure.message());
            failure.code()
        }
    }
}

/// Apply `BSROOTS_THREADS` before any parallel work starts.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("BSROOTS_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
}

pub fn dispatch(command: Command) -> Result<CmdOutput, CliFailure> {
    match command {
        Command::Spectrum(args) => cmd_spectrum(&args),
        Command::LocalBs(args) => cmd_local_bs(&args),
        Command::Gamma(args) => cmd_gamma(&args),
        Command::Tables(req) => cmd_tables(&req),
        Command::Deltas(req) => cmd_deltas(&req),
        Command::E2(req) => cmd_e2(&req),
        Command::Arnold(args) => cmd_arnold(&args),
        Command::Analyze(args) => cmd_analyze(&args),
    }
}

// ======================================================================
// Germ subcommands
// ======================================================================

fn germ_weights(args: &GermArgs) -> Result<Vec<Rat>, CliFailure> {
    if let Some(list) = &args.weights {
        list.split(',')
            .map(|s| {
                parse_rat(s.trim())
                    .ok_or_else(|| CliFailure::Input(format!("cannot parse weight {s:?}")))
            })
            .collect()
    } else {
        let name = args.type_name.as_deref().expect("clap requires one");
        Ok(ade_weights(name, args.ambient)?)
    }
}

#[derive(Serialize)]
struct SpectrumOutput {
    display: String,
    m: u64,
    spectral_numbers: Vec<String>,
}

fn cmd_spectrum(args: &GermArgs) -> Result<CmdOutput, CliFailure> {
    let weights = germ_weights(args)?;
    let sp = spectrum(&weights)?;
    let out = match args.format {
        Format::Text => format!("{}\nm = {}\n", sp.display_t_powers(), sp.m),
        Format::Tsv => {
            let mut s = String::from("exponent\tmultiplicity\n");
            let mut mults: Vec<(i64, u64)> = Vec::new();
            for a in &sp.entries {
                let e = scaled_int(a, sp.m);
                match mults.last_mut() {
                    Some((le, c)) if *le == e => *c += 1,
                    _ => mults.push((e, 1)),
                }
            }
            for (e, c) in mults {
                s.push_str(&format!("{e}\t{c}\n"));
            }
            s
        }
        Format::Json => canonical_json(&SpectrumOutput {
            display: sp.display_t_powers(),
            m: sp.m,
            spectral_numbers: sp.entries.iter().map(rat_string).collect(),
        }),
    };
    Ok(CmdOutput::ok(out))
}

#[derive(Serialize)]
struct LocalBsOutput {
    reduced: Vec<String>,
    full: Vec<String>,
}

fn cmd_local_bs(args: &GermArgs) -> Result<CmdOutput, CliFailure> {
    let weights = germ_weights(args)?;
    let (full, reduced) = local_bs_roots(&weights)?;
    let join = |set: &BTreeSet<Rat>| {
        set.iter()
            .map(rat_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let out = match args.format {
        Format::Text => format!("reduced: {}\nfull: {}\n", join(&reduced), join(&full)),
        Format::Tsv => format!(
            "set\troots\nreduced\t{}\nfull\t{}\n",
            join(&reduced),
            join(&full)
        ),
        Format::Json => canonical_json(&LocalBsOutput {
            reduced: reduced.iter().map(rat_string).collect(),
            full: full.iter().map(rat_string).collect(),
        }),
    };
    Ok(CmdOutput::ok(out))
}

// ======================================================================
// Table subcommands
// ======================================================================

fn check_size(n: usize, d: u32) -> Result<(), CliFailure> {
    if n < 2 {
        return Err(CliFailure::Input(format!(
            "need at least 2 variables, got {n}"
        )));
    }
    if d < 2 {
        return Err(CliFailure::Input(format!("need degree at least 2, got {d}")));
    }
    Ok(())
}

fn cmd_gamma(args: &SizeArgs) -> Result<CmdOutput, CliFailure> {
    check_size(args.n, args.d)?;
    let table = gamma_table(args.n, args.d);
    let hi = resolve_kmax(args.kmax, args.n, args.d)?;
    let out = match args.format {
        Format::Text => render_rows_text(&[&table], 0, hi),
        Format::Tsv => render_rows_tsv(&[&table], 0, hi),
        Format::Json => canonical_json(&table),
    };
    Ok(CmdOutput::ok(out))
}

#[derive(Serialize)]
struct ArnoldOutput {
    n: usize,
    d: u32,
    arnold_number: i64,
}

fn cmd_arnold(args: &SizeArgs) -> Result<CmdOutput, CliFailure> {
    if args.n < 3 {
        return Err(CliFailure::Input(format!(
            "the node bound needs at least 3 variables, got {}",
            args.n
        )));
    }
    if args.d < 2 {
        return Err(CliFailure::Input(format!(
            "need degree at least 2, got {}",
            args.d
        )));
    }
    let value = arnold_number(args.n, args.d);
    let out = match args.format {
        Format::Text => format!("{value}\n"),
        Format::Tsv => format!("n\td\tarnold\n{}\t{}\t{value}\n", args.n, args.d),
        Format::Json => canonical_json(&ArnoldOutput {
            n: args.n,
            d: args.d,
            arnold_number: value,
        }),
    };
    Ok(CmdOutput::ok(out))
}

/// Shared preamble of `tables`, `deltas`, `e2`: load, compute, and when
/// singularity data is present, gate on weighted homogeneity.
fn load_and_compute(
    req: &AnalysisRequest,
    with_e2: bool,
) -> Result<(LoadedInput, TableBundle), CliFailure> {
    let input = req.load()?;
    let bundle = compute_tables(&input.poly, req.mode(), with_e2)?;
    if let Some(szd) = &input.szd {
        crate::bsengine::validate_w(bundle.tau, Some(szd)).map_err(CliFailure::from)?;
    }
    Ok((input, bundle))
}

fn cmd_tables(req: &AnalysisRequest) -> Result<CmdOutput, CliFailure> {
    let (_, bundle) = load_and_compute(req, false)?;
    let hi = resolve_kmax(req.kmax, bundle.n, bundle.d)?;
    let out = match req.format {
        Format::Text => bundle.to_text_until(hi),
        Format::Tsv => bundle.to_tsv_until(hi),
        Format::Json => canonical_json(&bundle),
    };
    Ok(CmdOutput::ok(out))
}

#[derive(Serialize)]
struct DeltaOutput {
    display: String,
    degree: Option<i64>,
    /// `[k, delta_k]` pairs over the nonzero support.
    terms: Vec<(i64, i64)>,
}

fn delta_output(delta: &GradedTable) -> DeltaOutput {
    let terms: Vec<(i64, i64)> = (delta.offset..=delta.hi())
        .filter_map(|k| {
            let c = delta.get(k);
            (c != 0).then_some((k, c))
        })
        .collect();
    DeltaOutput {
        display: power_sum_display(&terms),
        degree: terms.last().map(|&(k, _)| k),
        terms,
    }
}

/// Render `Σ c_k T^k` ascending, e.g. `T^3+T^4+2T^6`; empty sums print `0`.
fn power_sum_display(terms: &[(i64, i64)]) -> String {
    let mut out = String::new();
    for &(k, c) in terms {
        if c == 0 {
            continue;
        }
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push(if c < 0 { '-' } else { '+' });
        }
        let mag = c.abs();
        if mag != 1 {
            out.push_str(&mag.to_string());
        }
        out.push_str(&format!("T^{k}"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn cmd_deltas(req: &AnalysisRequest) -> Result<CmdOutput, CliFailure> {
    let (_, bundle) = load_and_compute(req, false)?;
    let info = delta_output(&bundle.delta);
    let out = match req.format {
        Format::Text => match info.degree {
            Some(deg) => format!("{}\ndegree = {deg}\n", info.display),
            None => format!("{}\n", info.display),
        },
        Format::Tsv => {
            let mut s = String::from("k\tdelta\n");
            for (k, c) in &info.terms {
                s.push_str(&format!("{k}\t{c}\n"));
            }
            s
        }
        Format::Json => canonical_json(&info),
    };
    Ok(CmdOutput::ok(out))
}

fn cmd_e2(req: &AnalysisRequest) -> Result<CmdOutput, CliFailure> {
    let (input, bundle) = load_and_compute(req, true)?;
    // The second page must reproduce the defect away from d·R_Z.  The
    // check needs to know R_Z: singularity data makes it exact, and a
    // zero tail (smooth hypersurface) makes R_Z empty.
    let in_drz: Option<Box<dyn Fn(i64) -> bool>> = match &input.szd {
        Some(szd) => {
            let szd = szd.clone();
            let d = bundle.d;
            Some(Box::new(move |k: i64| {
                szd.contains(&Rat::new(k.into(), i64::from(d).into()))
            }))
        }
        None if bundle.tau == 0 => Some(Box::new(|_| false)),
        None => None,
    };
    if let Some(in_drz) = in_drz {
        let mu2 = bundle
            .mu2
            .as_ref()
            .expect("second page requested from compute_tables");
        for k in bundle.delta.offset..=bundle.delta.hi() {
            if in_drz(k) {
                continue;
            }
            let (dk, m2k) = (bundle.delta.get(k), mu2.get(k));
            if dk != m2k {
                return Err(CliFailure::Invariant(format!(
                    "second-page dimension disagrees with the defect off d*R_Z \
                     at k = {k}: mu2 = {m2k}, delta = {dk}"
                )));
            }
        }
    }
    let hi = resolve_kmax(req.kmax, bundle.n, bundle.d)?;
    let out = match req.format {
        Format::Text => bundle.to_text_until(hi),
        Format::Tsv => bundle.to_tsv_until(hi),
        Format::Json => canonical_json(&bundle),
    };
    Ok(CmdOutput::ok(out))
}

// ======================================================================
// analyze
// ======================================================================

fn cmd_analyze(args: &AnalyzeArgs) -> Result<CmdOutput, CliFailure> {
    let input = args.request.load()?;
    let bundle = compute_tables(&input.poly, args.request.mode(), false)?;
    let opts = AnalyzeOptions {
        n3_kmax_variant: args.n3_kmax_variant,
    };
    let report = analyze(&bundle, input.szd.as_ref(), &opts)?;
    let stdout = match args.request.format {
        Format::Text => report_text(&report),
        Format::Tsv => report_tsv(&report),
        Format::Json => canonical_json(&report),
    };
    let code = if report.r_f_complete {
        EXIT_OK
    } else {
        EXIT_UNDETERMINED
    };
    Ok(CmdOutput {
        stdout,
        code,
    })
}

fn join_rats(set: &crate::RationalSet) -> String {
    if set.is_empty() {
        return "(none)".into();
    }
    set.iter().map(rat_string).collect::<Vec<_>>().join(", ")
}

fn report_text(rep: &RootReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "n = {}, d = {}, tau_Z = {}, mu_Z = {}, chi(U) = {}, alpha_f = {}\n",
        rep.n,
        rep.d,
        rep.tau,
        rep.mu_z,
        rep.chi_u,
        rat_string(&rep.alpha_f)
    ));
    s.push_str(&format!("R_Z: {}\n\n", join_rats(&rep.r_z)));

    let kw = rep
        .statuses
        .last()
        .map_or(1, |st| st.k.to_string().len());
    let vw = rep
        .statuses
        .iter()
        .map(|st| rat_string(&st.value).len())
        .max()
        .unwrap_or(1);
    for st in &rep.statuses {
        let note = match st.status {
            Status::RootR0 => "positive defect".to_string(),
            Status::InRz => "local root".to_string(),
            Status::NonRoot if st.evidence.below_alpha_f => "below alpha_f".to_string(),
            Status::NonRoot => "no integer shift of a local root".to_string(),
            Status::Undetermined => "defect <= 0 on a shifted local root".to_string(),
        };
        s.push_str(&format!(
            "k = {:>kw$}  {:>vw$}  {:<12}  delta = {:<3}  {}\n",
            st.k,
            rat_string(&st.value),
            st.status.to_string(),
            st.evidence.delta,
            note,
        ));
    }
    s.push('\n');

    let cs = if rep.critical_set.is_empty() {
        "(empty)".to_string()
    } else {
        rep.critical_set
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    s.push_str(&format!("critical set: {cs}\n"));
    s.push_str(&format!(
        "all critical defects positive: {}\n",
        if rep.critical_deltas_positive {
            "yes"
        } else {
            "no"
        }
    ));
    match (rep.k_min, rep.k_max) {
        (Some(lo), Some(hi)) => s.push_str(&format!(
            "defect support outside d*R_Z: [{lo}, {hi}], connected: {}\n",
            if rep.connected_outside { "yes" } else { "no" }
        )),
        _ => s.push_str("defect support outside d*R_Z: empty\n"),
    }
    match rep.beta_f {
        Some(b) => s.push_str(&format!("beta_f = {b}\n")),
        None => s.push_str("beta_f = infinity\n"),
    }
    match &rep.tail_window {
        Some(tw) if tw.applicable => s.push_str(&format!(
            "window estimates: applicable{}; predicted support [{}, {}]\n",
            if tw.odp_case {
                " (all nodes)"
            } else {
                ""
            },
            tw.predicted_k_min.unwrap(),
            tw.predicted_k_max.unwrap()
        )),
        Some(_) => s.push_str("window estimates: hypotheses fail\n"),
        None => s.push_str("window estimates: not attempted (smooth or d < n)\n"),
    }
    match &rep.droots_from_support {
        Some(ks) => s.push_str(&format!(
            "closed-form d*R_f^0 from the support interval: {{{}}}\n",
            ks.iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        None => s.push_str("closed-form root rule: not applicable\n"),
    }
    s.push('\n');
    s.push_str(&format!("R_f^0 (roots at the origin): {}\n", join_rats(&rep.r_f0)));
    s.push_str(&format!("undetermined: {}\n", join_rats(&rep.undetermined)));
    s.push_str(&format!(
        "R_f (all certain roots): {}\n",
        join_rats(&rep.r_f)
    ));
    s.push_str(&format!(
        "complete: {}\n",
        if rep.r_f_complete {
            "yes"
        } else {
            "no — undetermined candidates remain"
        }
    ));
    s
}

fn report_tsv(rep: &RootReport) -> String {
    let mut s = String::from("k\tvalue\tstatus\tdelta\toutside_shifted_rz\tbelow_alpha_f\n");
    for st in &rep.statuses {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            st.k,
            rat_string(&st.value),
            st.status,
            st.evidence.delta,
            st.evidence.outside_shifted_rz,
            st.evidence.below_alpha_f
        ));
    }
    s
}

// ======================================================================
// Rendering helpers
// ======================================================================

/// Canonical JSON: sorted keys (via the value tree), pretty-printed, one
/// trailing newline.  Parsing and re-serializing reproduces the bytes.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("output types serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("value trees serialize");
    s.push('\n');
    s
}

fn scaled_int(a: &Rat, m: u64) -> i64 {
    use num_traits::ToPrimitive;
    (a * Rat::from_integer(i64::try_from(m).expect("m fits i64").into()))
        .to_integer()
        .to_i64()
        .expect("scaled exponent fits i64")
}

fn render_rows_tsv(rows: &[&GradedTable], lo: i64, hi: i64) -> String {
    let mut s = String::from("k");
    for k in lo..=hi {
        s.push_str(&format!("\t{k}"));
    }
    s.push('\n');
    for t in rows {
        s.push_str(t.label.name());
        for k in lo..=hi {
            s.push_str(&format!("\t{}", t.get(k)));
        }
        s.push('\n');
    }
    s
}

fn render_rows_text(rows: &[&GradedTable], lo: i64, hi: i64) -> String {
    let label_w = rows
        .iter()
        .map(|t| t.label.name().len())
        .max()
        .unwrap_or(1)
        .max(1);
    let widths: Vec<usize> = (lo..=hi)
        .map(|k| {
            rows.iter()
                .map(|t| t.get(k).to_string().len())
                .max()
                .unwrap_or(1)
                .max(k.to_string().len())
        })
        .collect();
    let mut s = format!("{:label_w$}", "k");
    for (i, k) in (lo..=hi).enumerate() {
        s.push_str(&format!(" {:>w$}", k, w = widths[i]));
    }
    s.push('\n');
    for t in rows {
        s.push_str(&format!("{:label_w$}", t.label.name()));
        for (i, k) in (lo..=hi).enumerate() {
            s.push_str(&format!(" {:>w$}", t.get(k), w = widths[i]));
        }
        s.push('\n');
    }
    s
}

// ======================================================================
// Tests
// ======================================================================

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(args).unwrap().command
    }

    #[test]
    fn parses_the_documented_invocations() {
        assert!(matches!(
            parse(&["bsroots", "spectrum", "--weights", "2/11,3/11"]),
            Command::Spectrum(_)
        ));
        assert!(matches!(
            parse(&["bsroots", "spectrum", "--type", "A1", "--ambient", "2"]),
            Command::Spectrum(_)
        ));
        assert!(matches!(
            parse(&["bsroots", "analyze", "x^5+y^4*z", "--sing", "f.json", "--format", "json"]),
            Command::Analyze(_)
        ));
        assert!(matches!(
            parse(&["bsroots", "deltas", "--lines", "x*y*z*(x+y+z)"]),
            Command::Deltas(_)
        ));
        // Mutually exclusive inputs are rejected at the grammar level.
        assert!(Cli::try_parse_from(["bsroots", "spectrum"]).is_err());
        assert!(Cli::try_parse_from([
            "bsroots", "spectrum", "--weights", "1/2", "--type", "A1"
        ])
        .is_err());
        assert!(Cli::try_parse_from([
            "bsroots", "tables", "x^2+y^2", "--exact", "--modular"
        ])
        .is_err());
        assert!(
            Cli::try_parse_from(["bsroots", "analyze", "x*y", "--lines", "x*y"]).is_err()
        );
    }

    #[test]
    fn spectrum_matches_the_published_display() {
        let out = cmd_spectrum(&GermArgs {
            weights: Some("2/11,3/11".into()),
            type_name: None,
            ambient: 2,
            format: Format::Text,
        })
        .unwrap();
        assert_eq!(
            out.stdout,
            "T^17+T^15+T^14+T^13+T^12+2T^11+T^10+T^9+T^8+T^7+T^5\nm = 11\n"
        );
        let node = cmd_spectrum(&GermArgs {
            weights: None,
            type_name: Some("A1".into()),
            ambient: 2,
            format: Format::Text,
        })
        .unwrap();
        assert_eq!(node.stdout, "T^2\nm = 2\n");
    }

    #[test]
    fn local_bs_lists_both_root_sets() {
        let out = cmd_local_bs(&GermArgs {
            weights: Some("1/2,1/2".into()),
            type_name: None,
            ambient: 2,
            format: Format::Text,
        })
        .unwrap();
        assert_eq!(out.stdout, "reduced: 1\nfull: 1\n");
        let cusp = cmd_local_bs(&GermArgs {
            weights: Some("1/3,1/2".into()),
            type_name: None,
            ambient: 2,
            format: Format::Json,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&cusp.stdout).unwrap();
        assert_eq!(v["reduced"], serde_json::json!(["5/6", "7/6"]));
        assert_eq!(v["full"], serde_json::json!(["5/6", "1", "7/6"]));
    }

    #[test]
    fn power_sum_display_shapes() {
        assert_eq!(power_sum_display(&[]), "0");
        assert_eq!(power_sum_display(&[(3, 1), (4, 1), (6, 1), (7, 1)]), "T^3+T^4+T^6+T^7");
        assert_eq!(power_sum_display(&[(5, 4), (6, 1)]), "4T^5+T^6");
        assert_eq!(power_sum_display(&[(2, -1), (3, 2)]), "-T^2+2T^3");
    }

    #[test]
    fn infer_vars_by_first_appearance() {
        assert_eq!(infer_vars("x^5 + y^4*z"), vec!["x", "y", "z"]);
        assert_eq!(infer_vars("z2*y + x0^2*z2"), vec!["z2", "y", "x0"]);
        assert_eq!(infer_vars("3*17 + 4"), Vec::<String>::new());
    }

    #[test]
    fn kmax_bounds_follow_the_window() {
        assert_eq!(resolve_kmax(None, 3, 5).unwrap(), 15);
        assert_eq!(resolve_kmax(Some(20), 3, 5).unwrap(), 20);
        assert!(resolve_kmax(Some(21), 3, 5).is_err());
        assert!(resolve_kmax(Some(-1), 3, 5).is_err());
    }

    #[test]
    fn canonical_json_round_trips_bytes() {
        let req = AnalysisRequest {
            poly: Some("x^5 + y^4*z".into()),
            vars: None,
            lines: None,
            sing: None,
            exact: false,
            modular: false,
            kmax: None,
            format: Format::Json,
        };
        let args = AnalyzeArgs {
            request: req,
            n3_kmax_variant: false,
        };
        // Smooth declaration of a singular table: data failure, exit 2.
        let err = cmd_analyze(&args).unwrap_err();
        assert_eq!(err.code(), EXIT_DATA);

        // A smooth input round-trips through the canonical serializer.
        let args = AnalyzeArgs {
            request: AnalysisRequest {
                poly: Some("x^3 + y^3 + z^3".into()),
                ..args.request
            },
            n3_kmax_variant: false,
        };
        let out = cmd_analyze(&args).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(out.stdout, again);
        assert_eq!(v["r_f"], serde_json::json!(["1", "4/3", "5/3", "2"]));
    }

    #[test]
    fn deltas_subcommand_prints_the_defect_polynomial() {
        let req = AnalysisRequest {
            poly: Some("x^5 + x^2*y^3 + y^4*z".into()),
            vars: None,
            lines: None,
            sing: None,
            exact: true,
            modular: false,
            kmax: None,
            format: Format::Text,
        };
        let out = cmd_deltas(&req).unwrap();
        assert_eq!(out.stdout, "T^3+T^4+T^6+T^7\ndegree = 7\n");
    }

    #[test]
    fn arrangement_input_expands_and_classifies() {
        // Three concurrent lines through [0:0:1]: a single ordinary triple
        // point, tau = mu = 4.
        let req = AnalysisRequest {
            poly: None,
            vars: Some("x,y,z".into()),
            lines: Some("x*y*(x+y)".into()),
            sing: None,
            exact: true,
            modular: false,
            kmax: None,
            format: Format::Json,
        };
        let args = AnalyzeArgs {
            request: req,
            n3_kmax_variant: false,
        };
        let out = cmd_analyze(&args).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["tau"], serde_json::json!(4));
        assert_eq!(v["r_z"], serde_json::json!(["2/3", "1", "4/3"]));
    }

    #[test]
    fn e2_cross_check_runs_when_r_z_is_known() {
        let req = AnalysisRequest {
            poly: Some("x^4 + y^4 + z^4".into()),
            vars: None,
            lines: None,
            sing: None,
            exact: true,
            modular: false,
            kmax: None,
            format: Format::Tsv,
        };
        let out = cmd_e2(&req).unwrap();
        assert!(out.stdout.contains("mu2"));
        assert!(out.stdout.contains("nu2"));
    }
}
