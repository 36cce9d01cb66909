//! The `veq` command line.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use veq_core::embedding::{
    check_composite_coreflection, check_composite_preservation, check_coreflection, check_full_on_arrows,
    check_fully_faithful, check_functoriality, check_morita, composite_paths, Embedding, EmbeddingError,
    EmbeddingSuite, MoritaPair,
};
use veq_core::enriched::check_category_laws;
use veq_core::universal::{check_derived_lemmas_with, check_equipment_with, Searcher, UniversalError};
use veq_core::vdc::{check_vdc_laws_scoped, LawScope};
use veq_core::{Counterexample, Path, SearchBounds, Status, VerificationReport};

use crate::build::{build, BuildError, Loaded, Scope};
use crate::fixtures;
use crate::output::{self, Format, EXIT_ERROR};
use crate::spec::{parse_spec, ParseError};

#[derive(Debug, Parser)]
#[command(name = "veq", version, about = "Finite virtual equipments and their enriched categories, checked by exhaustive search")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a spec file and check the substitution laws of its cells.
    Validate {
        file: PathBuf,
        /// Longest domain path the laws are checked on.
        #[arg(long, default_value_t = 4)]
        max_path: usize,
    },
    /// Derive a universal structure: `unit:A`, `restriction:K,g,f`,
    /// `companion:f`, `conjoint:f` or `composite:J1,J2[,J3...]`.
    Derive {
        file: PathBuf,
        #[arg(long)]
        what: Derivation,
        #[arg(long)]
        bounds: Option<BoundsArg>,
    },
    /// Build the enriched category representing an object and check its laws.
    Embed {
        file: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long)]
        bounds: Option<BoundsArg>,
    },
    /// Run a theorem check on the file's fragment.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        bounds: Option<BoundsArg>,
    },
    /// Re-render a `--format lines` stream read from a file or stdin.
    Report { file: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Laws,
    Equipment,
    Lemmas,
    Functoriality,
    PreservesComposites,
    #[value(name = "ff-2cells")]
    Ff2cells,
    FullArrows,
    Coreflective,
    Morita,
    All,
}

/// What `derive` should look for, by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Unit(String),
    Restriction { k: String, g: String, f: String },
    Companion(String),
    Conjoint(String),
    Composite(Vec<String>),
}

impl FromStr for Derivation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, args) = s.split_once(':').ok_or("expected KIND:ARGS")?;
        let args: Vec<String> = args.split(',').map(|a| a.trim().to_string()).collect();
        if args.iter().any(String::is_empty) {
            return Err("empty argument".into());
        }
        match (kind, args.as_slice()) {
            ("unit", [a]) => Ok(Derivation::Unit(a.clone())),
            ("restriction", [k, g, f]) => Ok(Derivation::Restriction {
                k: k.clone(),
                g: g.clone(),
                f: f.clone(),
            }),
            ("companion", [f]) => Ok(Derivation::Companion(f.clone())),
            ("conjoint", [f]) => Ok(Derivation::Conjoint(f.clone())),
            ("composite", js) if !js.is_empty() => Ok(Derivation::Composite(js.to_vec())),
            _ => Err(format!("cannot derive `{s}`")),
        }
    }
}

/// `path=K,flank=K,depth=K,work=N`; omitted keys keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundsArg {
    pub max_path: Option<usize>,
    pub max_flank: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_work: Option<u64>,
}

impl BoundsArg {
    pub fn apply(&self, mut b: SearchBounds) -> SearchBounds {
        if let Some(v) = self.max_path {
            b.max_path = v;
        }
        if let Some(v) = self.max_flank {
            b.max_flank = v;
        }
        if let Some(v) = self.max_depth {
            b.max_depth = v;
        }
        if let Some(v) = self.max_work {
            b.max_work = v;
        }
        b
    }
}

impl FromStr for BoundsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BoundsArg::default();
        for item in s.split(',').filter(|i| !i.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("`{item}` is not KEY=VALUE"))?;
            let bad = |_| format!("`{v}` is not a number");
            match k {
                "path" => out.max_path = Some(v.parse().map_err(bad)?),
                "flank" => out.max_flank = Some(v.parse().map_err(bad)?),
                "depth" => out.max_depth = Some(v.parse().map_err(bad)?),
                "work" => out.max_work = Some(v.parse().map_err(bad)?),
                _ => return Err(format!("unknown bound `{k}`; use path, flank, depth or work")),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Build { path: String, source: BuildError },
    #[error("{0}")]
    Usage(String),
}

/// Read a spec file. A path that does not exist but names a built-in
/// fixture (`B2`, `T3`, `F1`, optionally with `.veq`) loads the fixture.
pub fn load(path: &FsPath) -> Result<Loaded, CliError> {
    let shown = path.display().to_string();
    let stem = path.file_stem().map_or_else(|| shown.clone(), |s| s.to_string_lossy().into_owned());
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => match fixtures::source(&shown).or_else(|| fixtures::source(&stem)) {
            Some(t) if e.kind() == std::io::ErrorKind::NotFound => t.to_string(),
            _ => return Err(CliError::Io { path: shown, source: e }),
        },
    };
    let spec = parse_spec(&text).map_err(|source| CliError::Parse {
        path: shown.clone(),
        source,
    })?;
    build(&spec, &stem).map_err(|source| CliError::Build { path: shown, source })
}

/// Run the command line and write its report to `out`; returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(&cli.command) {
        Ok(Outcome::Reports(reports)) => {
            let _ = write!(out, "{}", output::render(&reports, cli.format));
            output::exit_code(output::overall(&reports))
        }
        Ok(Outcome::Records(records)) => {
            let _ = write!(out, "{}", output::render_records(&records, cli.format));
            output::exit_code(records.iter().fold(Status::Pass, |s, r| s.join(r.status)))
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

enum Outcome {
    Reports(Vec<VerificationReport>),
    Records(Vec<output::Record>),
}

fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { file, max_path } => {
            let loaded = load(file)?;
            Ok(Outcome::Reports(vec![validate(&loaded, *max_path)]))
        }
        Command::Derive { file, what, bounds } => {
            let loaded = load(file)?;
            let bounds = bounds.unwrap_or_default().apply(SearchBounds::universal());
            Ok(Outcome::Reports(vec![derive(&loaded, what, bounds)?]))
        }
        Command::Embed { file, object, bounds } => {
            let loaded = load(file)?;
            let bounds = bounds.unwrap_or_default().apply(SearchBounds::universal());
            Ok(Outcome::Reports(vec![embed(&loaded, object, bounds)?]))
        }
        Command::Verify { file, theorem, bounds } => {
            let loaded = load(file)?;
            Ok(Outcome::Reports(verify(&loaded, *theorem, bounds.unwrap_or_default())))
        }
        Command::Report { file } => {
            let mut text = String::new();
            let res = match file {
                Some(p) => std::fs::read_to_string(p).map(|t| text = t),
                None => std::io::stdin().read_to_string(&mut text).map(|_| ()),
            };
            res.map_err(|source| CliError::Io {
                path: file.as_ref().map_or("stdin".into(), |p| p.display().to_string()),
                source,
            })?;
            Ok(Outcome::Records(output::parse_records(&text).map_err(CliError::Usage)?))
        }
    }
}

fn timed(name: &str, f: impl FnOnce() -> VerificationReport) -> VerificationReport {
    let start = Instant::now();
    let mut r = f();
    if r.name != name {
        let mut wrapped = VerificationReport::new(name);
        wrapped.push(r);
        r = wrapped;
    }
    r.elapsed = Some(start.elapsed());
    r
}

/// A check that could not be run is a failed check.
fn failed(name: &str, e: impl std::fmt::Display) -> VerificationReport {
    let mut r = VerificationReport::new(name);
    r.fail(Counterexample::new(e.to_string()));
    r
}

fn law_scope(loaded: &Loaded) -> LawScope {
    match (&loaded.scope, loaded.vdc().is_thin()) {
        (Some(s), true) => LawScope {
            proarrows: Some(s.proarrows.iter().copied().collect()),
            arrows: None,
        },
        _ => LawScope::all(),
    }
}

pub fn validate(loaded: &Loaded, max_path: usize) -> VerificationReport {
    let bounds = SearchBounds::laws().with_path(max_path);
    timed("laws", || {
        let mut r = check_vdc_laws_scoped(loaded.vdc(), bounds, &law_scope(loaded));
        if loaded.vdc().is_thin() && loaded.scope.is_some() {
            r.note("thin store: arrangements range over the fragment's proarrows");
        }
        r
    })
}

pub fn derive(loaded: &Loaded, what: &Derivation, bounds: SearchBounds) -> Result<VerificationReport, CliError> {
    let v = loaded.vdc();
    let s = Searcher::new(v, bounds);
    let resolve = |e: veq_core::VdcError| CliError::Usage(e.to_string());
    let (label, found) = match what {
        Derivation::Unit(a) => (format!("unit:{a}"), s.find_unit(v.find_object(a).map_err(resolve)?)),
        Derivation::Restriction { k, g, f } => {
            let (kk, gg, ff) = (
                v.find_proarrow(k).map_err(resolve)?,
                v.find_arrow(g).map_err(resolve)?,
                v.find_arrow(f).map_err(resolve)?,
            );
            (format!("restriction:{k},{g},{f}"), s.find_restriction(kk, gg, ff))
        }
        Derivation::Companion(f) => {
            let ff = v.find_arrow(f).map_err(resolve)?;
            (format!("companion:{f}"), s.derive_bends(ff).map(|b| b.companion))
        }
        Derivation::Conjoint(f) => {
            let ff = v.find_arrow(f).map_err(resolve)?;
            (format!("conjoint:{f}"), s.derive_bends(ff).map(|b| b.conjoint))
        }
        Derivation::Composite(js) => {
            let ids = js.iter().map(|j| v.find_proarrow(j)).collect::<Result<Vec<_>, _>>().map_err(resolve)?;
            let path = v.path(&ids).map_err(resolve)?;
            (format!("composite:{}", js.join(",")), s.find_composite(&path))
        }
    };
    let kind = label.split(':').next().unwrap_or_default().to_string();
    let mut r = VerificationReport::new(format!("derive {label}")).with_bounds(bounds);
    match found {
        Ok(w) => {
            r.tick();
            r.note(format!("{} = {}", kind, v.proarrow_name(w.proarrow)));
            r.note(format!("structure cell {}", v.show_cell(&w.structure_cell)));
            for (alt, _) in &w.alternatives {
                r.note(format!("isomorphic alternative {}", v.proarrow_name(*alt)));
            }
        }
        Err(UniversalError::BoundsTooSmall(m)) => r.truncate(format!("{kind} BoundsTooSmall: {m}")),
        Err(e) => r.fail_msg(format!("{kind} {e}")),
    }
    Ok(r)
}

pub fn embed(loaded: &Loaded, object: &str, bounds: SearchBounds) -> Result<VerificationReport, CliError> {
    let v = loaded.vdc();
    let a = v.find_object(object).map_err(|e| CliError::Usage(e.to_string()))?;
    let s = Searcher::new(v, bounds);
    let emb = Embedding::new(&s);
    let mut r = VerificationReport::new(format!("embed |{object}|")).with_bounds(bounds);
    match emb.object(a) {
        Ok(rep) => {
            let c = &rep.category;
            r.note(format!("objects: {}", c.objects.join(" ")));
            for x in 0..c.size() {
                for y in 0..c.size() {
                    r.note(format!(
                        "hom({}, {}) = {}",
                        c.objects[x],
                        c.objects[y],
                        v.proarrow_name(c.hom(x, y))
                    ));
                }
            }
            r.push(check_category_laws(v, c));
        }
        Err(e) => r.fail_msg(e.to_string()),
    }
    Ok(r)
}

fn suite(loaded: &Loaded, bounds: SearchBounds) -> EmbeddingSuite {
    let Scope {
        objects,
        arrows,
        proarrows,
        mut morita,
    } = loaded.scope_or_all();
    if morita.is_empty() {
        morita = objects
            .iter()
            .map(|a| MoritaPair {
                a: *a,
                b: *a,
                equivalent: true,
            })
            .collect();
    }
    EmbeddingSuite {
        objects,
        arrows,
        proarrows,
        bounds,
        morita,
    }
}

fn embedding_check(
    name: &str,
    f: impl FnOnce() -> Result<VerificationReport, EmbeddingError>,
) -> VerificationReport {
    timed(name, || f().unwrap_or_else(|e| failed(name, e)))
}

/// Run the named theorem checks. Every check is reported, in a fixed order.
pub fn verify(loaded: &Loaded, theorem: Theorem, bounds: BoundsArg) -> Vec<VerificationReport> {
    let v = loaded.vdc();
    let want = |t: Theorem| theorem == t || theorem == Theorem::All;
    let ub = bounds.apply(SearchBounds::universal());
    let mut out = Vec::new();
    if want(Theorem::Laws) {
        out.push(validate(loaded, bounds.apply(SearchBounds::laws()).max_path));
    }
    let s = Searcher::new(v, ub);
    if want(Theorem::Equipment) {
        out.push(timed("equipment", || check_equipment_with(&s)));
    }
    if want(Theorem::Lemmas) {
        out.push(timed("lemmas", || check_derived_lemmas_with(&s)));
    }
    let emb = Embedding::new(&s);
    let suite = suite(loaded, ub);
    let objects = suite.all_objects(v);
    if want(Theorem::Functoriality) {
        out.push(embedding_check("functoriality", || {
            check_functoriality(&emb, &suite.proarrows, ub)
        }));
    }
    if want(Theorem::PreservesComposites) {
        let paths: Vec<Path> = composite_paths(v, &objects, &suite.proarrows);
        out.push(embedding_check("preserves-composites", || {
            check_composite_preservation(&emb, &paths, &suite.arrows, ub)
        }));
    }
    if want(Theorem::Ff2cells) {
        out.push(embedding_check("ff-2cells", || check_fully_faithful(&emb, &suite)));
    }
    if want(Theorem::FullArrows) {
        out.push(embedding_check("full-arrows", || {
            check_full_on_arrows(&emb, &objects, &suite.arrows)
        }));
    }
    if want(Theorem::Coreflective) {
        let mut r = VerificationReport::new("coreflective");
        r.push(embedding_check("coreflection", || check_coreflection(&emb, &objects, &suite.proarrows)));
        r.push(embedding_check("composite-coreflection", || {
            check_composite_coreflection(&emb, &suite.proarrows)
        }));
        out.push(r);
    }
    if want(Theorem::Morita) {
        let mut r = VerificationReport::new("morita");
        for pair in &suite.morita {
            let name = format!("morita {} {}", v.obj_name(pair.a), v.obj_name(pair.b));
            r.push(embedding_check(&name, || check_morita(&emb, *pair)));
        }
        out.push(r);
    }
    out
}
