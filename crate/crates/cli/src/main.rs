//! `skewlat`: validate, analyze and dualize finite skew lattices, spaces and
//! sheaves, emitting JSON certificates.

mod certificate;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use skewlat_core::assembly::{dissolution_checks, enumerate_nuclei_with_cap, is_nucleus, NUCLEUS_CAP};
use skewlat_core::duality::{counit, h, separate, unit_sigma, G};
use skewlat_core::io::{self, Document, IoError, SectionMap};
use skewlat_core::iso::{homeomorphism, lattice_isomorphism};
use skewlat_core::skew::{classify_with, green_d, shadow, ClassifyOptions, FULL_JOIN_COMPLETE_CAP};
use skewlat_core::topo::{front_topology, is_sober, sobrify, spectrum};
use skewlat_core::{bits, catalog, CheckResult, Error, FiniteFrame, FiniteSkewLattice};

use certificate::{error_verdict, Certificate, Input, Verdict};

#[derive(Parser)]
#[command(name = "skewlat", version, about = "Finite noncommutative frames and skew lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Size cap for exhaustive searches (analyze, nuclei).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Write the certificate and emitted structures into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the certificate as JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and run the validator for its kind.
    Validate { file: String },
    /// Identity catalog, 𝒟-classes and shadow of a skew lattice or lattice.
    Analyze { file: String },
    /// Spectrum of the shadow and the sheaf recovered from a left-handed ncframe.
    Dualize { file: String },
    /// The ncframe of pairs for a space and a sheaf on its front topology.
    Realize { space: String, sheaf: String },
    /// Unit of an ncframe, or the counit of a space and sheaf.
    Roundtrip {
        #[arg(num_args = 1..=2, required = true)]
        files: Vec<String>,
    },
    /// Nuclei of a frame; for a space also the dissolution checks.
    Nuclei { file: String },
    /// A morphism onto the two-element primitive separating two elements.
    Separate { file: String, a: String, b: String },
    /// Points of a frame (or of the shadow of a skew lattice, or the
    /// sobrification of a space).
    Spectrum { file: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Analyze { .. } => "analyze",
            Command::Dualize { .. } => "dualize",
            Command::Realize { .. } => "realize",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Nuclei { .. } => "nuclei",
            Command::Separate { .. } => "separate",
            Command::Spectrum { .. } => "spectrum",
        }
    }

    fn accepts_cap(&self) -> bool {
        matches!(self, Command::Analyze { .. } | Command::Nuclei { .. })
    }
}

/// Failures before any mathematics runs; exit code 2.
struct InputError(String);

/// A finished command: verdicts, report and emitted structures.
#[derive(Default)]
struct Outcome {
    verdicts: Vec<Verdict>,
    report: Value,
    emitted: BTreeMap<String, Value>,
    error: Option<String>,
}

impl Outcome {
    fn failed(e: &Error) -> Self {
        Outcome { verdicts: vec![error_verdict(e)], report: Value::Null, error: Some(e.to_string()), ..Default::default() }
    }
}

enum Loaded {
    Doc(Document),
    /// Parsed but failed validation.
    Invalid(Error),
}

struct Ctx {
    seed: u64,
    cap: Option<usize>,
    inputs: Vec<Input>,
}

impl Ctx {
    /// Reads a file, or a catalog entry written `catalog:NAME`.
    fn load(&mut self, path: &str) -> Result<Loaded, InputError> {
        let (text, parsed) = if let Some(name) = path.strip_prefix("catalog:") {
            let doc = catalog::named(name).ok_or_else(|| InputError(format!("unknown catalog entry `{name}`")))?;
            (io::to_value(&doc).to_string(), Ok(doc))
        } else {
            let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
            let parsed = io::parse(&text);
            (text, parsed)
        };
        match parsed {
            Ok(doc) => {
                self.inputs.push(Input::new(path, doc.kind(), text.as_bytes()));
                Ok(Loaded::Doc(doc))
            }
            Err(IoError::Parse(m)) => Err(InputError(format!("{path}: {m}"))),
            Err(IoError::Invalid(e)) => {
                self.inputs.push(Input::new(path, "invalid", text.as_bytes()));
                Ok(Loaded::Invalid(e))
            }
        }
    }
}

fn skew_of(doc: Document, path: &str) -> Result<FiniteSkewLattice, InputError> {
    match doc {
        Document::SkewLattice(s) => Ok(s),
        Document::Lattice(l) => Ok(FiniteSkewLattice::from_lattice(&l)),
        other => Err(InputError(format!("{path}: expected a skew lattice or lattice, got `{}`", other.kind()))),
    }
}

/// Runs `body`, turning library errors into a failed outcome.
fn checked(body: impl FnOnce() -> Result<Outcome, Error>) -> Outcome {
    body().unwrap_or_else(|e| Outcome::failed(&e))
}

macro_rules! load {
    ($ctx:expr, $path:expr) => {
        match $ctx.load($path)? {
            Loaded::Doc(d) => d,
            Loaded::Invalid(e) => return Ok(Outcome::failed(&e)),
        }
    };
}

fn validate(ctx: &mut Ctx, file: &str) -> Result<Outcome, InputError> {
    let doc = load!(ctx, file);
    let mut out = Outcome { report: json!({ "kind": doc.kind() }), ..Default::default() };
    let v = match &doc {
        Document::Presheaf(p) => {
            let (cover, family) = p.gluing_failure().expect("presheaf kept only on gluing failure");
            out.error = Some(format!("gluing fails for cover {cover:?} with family {family:?}"));
            vec![Verdict::flag("presheaf", true), Verdict::new("gluing", CheckResult::fail("gluing", [cover, family].concat()))]
        }
        Document::Sheaf(_) => vec![Verdict::flag("presheaf", true), Verdict::flag("gluing", true)],
        Document::Nucleus { table, frame: Some(l) } => vec![Verdict::new("nucleus", is_nucleus(l, table))],
        Document::Nucleus { frame: None, .. } => {
            out.report["note"] = json!("no frame given; table shape only");
            vec![Verdict::flag("nucleus_shape", true)]
        }
        other => vec![Verdict::flag(other.kind(), true)],
    };
    out.verdicts = v;
    Ok(out)
}

fn analyze(ctx: &mut Ctx, file: &str) -> Result<Outcome, InputError> {
    let s = skew_of(load!(ctx, file), file)?;
    let opts = ClassifyOptions { seed: ctx.seed, full_cap: ctx.cap.unwrap_or(FULL_JOIN_COMPLETE_CAP) };
    Ok(checked(|| {
        let report = classify_with(&s, opts);
        let d = green_d(&s)?;
        let (sh, proj) = shadow(&s)?;
        Ok(Outcome {
            verdicts: vec![Verdict::flag("skew_lattice", true)],
            report: json!({
                "size": s.size(),
                "commutative": s.is_commutative(),
                "properties": report,
                "classes": d.classes,
                "class_sizes": d.class_sizes(),
                "class_order": d.class_order,
                "shadow": io::lattice_json(&sh),
                "projection": proj.map,
            }),
            ..Default::default()
        })
    }))
}

fn dualize(ctx: &mut Ctx, file: &str) -> Result<Outcome, InputError> {
    let s = skew_of(load!(ctx, file), file)?;
    Ok(checked(|| {
        let g = G(&s)?;
        let unit = unit_sigma(&s)?;
        let shadow_iso = lattice_isomorphism(&g.shadow, g.base.opens_lattice().lattice()).is_some();
        let mut emitted = BTreeMap::new();
        emitted.insert("base".to_string(), io::space_json(&g.base));
        emitted.insert("sheaf".to_string(), io::sheaf_json(&g.sheaf));
        emitted.insert("section_map".to_string(), io::section_map_json(&SectionMap::from_g(&g)));
        Ok(Outcome {
            verdicts: vec![Verdict::flag("spatial", unit.bijective()), Verdict::flag("shadow_iso", shadow_iso)],
            report: json!({
                "points": g.base.points(),
                "shadow_iso": shadow_iso,
                "sigma_bijective": unit.bijective(),
                "discrete_base": g.base.is_discrete(),
                "stalks": g.stalk_sizes(),
                "spatial": unit.bijective(),
                "sigma": unit.sigma.map,
            }),
            emitted,
            error: None,
        })
    }))
}

fn realize(ctx: &mut Ctx, space: &str, sheaf: &str) -> Result<Outcome, InputError> {
    let y = match load!(ctx, space) {
        Document::Space(y) => y,
        other => return Err(InputError(format!("{space}: expected a space, got `{}`", other.kind()))),
    };
    let e = match load!(ctx, sheaf) {
        Document::Sheaf(e) => e,
        Document::Presheaf(p) => {
            let (cover, family) = p.gluing_failure().expect("presheaf kept only on gluing failure");
            return Ok(Outcome::failed(&Error::GluingFailure { cover, family }));
        }
        other => return Err(InputError(format!("{sheaf}: expected a sheaf, got `{}`", other.kind()))),
    };
    Ok(checked(|| {
        let a = h(&y, &e)?;
        let d = green_d(&a.skew)?;
        let mut emitted = BTreeMap::new();
        emitted.insert("ncframe".to_string(), io::skew_json(&a.skew));
        Ok(Outcome {
            verdicts: vec![Verdict::flag("realized", true)],
            report: json!({
                "size": a.skew.size(),
                "class_sizes": d.class_sizes(),
                "pairs": a.labels.iter().map(|&(u, s)| (bits::to_indices(y.opens()[u]), s)).collect::<Vec<_>>(),
            }),
            emitted,
            error: None,
        })
    }))
}

fn roundtrip(ctx: &mut Ctx, files: &[String]) -> Result<Outcome, InputError> {
    if let [file] = files {
        let s = skew_of(load!(ctx, file), file)?;
        return Ok(checked(|| {
            let unit = unit_sigma(&s)?;
            let hg = &unit.h.skew;
            if !unit.bijective() {
                let invariant = if hg.size() != s.size() {
                    format!("|A| = {}, |H(G(A))| = {}", s.size(), hg.size())
                } else {
                    "σ is not injective".to_string()
                };
                return Err(Error::IsoFailure(invariant));
            }
            Ok(Outcome {
                verdicts: vec![Verdict::flag("sigma_iso", true)],
                report: json!({ "sigma": unit.sigma.map, "size": s.size(), "stalks": unit.g.stalk_sizes() }),
                ..Default::default()
            })
        }));
    }
    let y = match load!(ctx, &files[0]) {
        Document::Space(y) => y,
        other => return Err(InputError(format!("{}: expected a space, got `{}`", files[0], other.kind()))),
    };
    let e = match load!(ctx, &files[1]) {
        Document::Sheaf(e) => e,
        other => return Err(InputError(format!("{}: expected a sheaf, got `{}`", files[1], other.kind()))),
    };
    Ok(checked(|| {
        let c = counit(&y, &e)?;
        if !c.iso {
            let invariant = if !c.homeomorphism {
                format!("f is not a homeomorphism: {} points, {} points in the dual base", y.points(), c.g.base.points())
            } else {
                "λ is not a bijection on sections".to_string()
            };
            return Err(Error::IsoFailure(invariant));
        }
        Ok(Outcome {
            verdicts: vec![Verdict::flag("counit_iso", true)],
            report: json!({ "f": c.morphism.f, "lambda": c.morphism.lambda.components, "size": c.a.skew.size() }),
            ..Default::default()
        })
    }))
}

fn nuclei(ctx: &mut Ctx, file: &str) -> Result<Outcome, InputError> {
    match load!(ctx, file) {
        Document::Lattice(l) => {
            let cap = ctx.cap.unwrap_or(NUCLEUS_CAP);
            Ok(checked(|| {
                let f = FiniteFrame::new(l)?;
                let asm = enumerate_nuclei_with_cap(&f, cap)?;
                let sp = spectrum(&f)?.space;
                let count_matches = asm.len() == 1usize << sp.points();
                let front_iso = homeomorphism(&spectrum(&asm.frame)?.space, &front_topology(&sp)).is_some();
                Ok(Outcome {
                    verdicts: vec![
                        Verdict::flag("boolean", asm.frame.is_boolean()),
                        Verdict::flag("count_matches", count_matches),
                        Verdict::flag("front_iso", front_iso),
                    ],
                    report: json!({
                        "count": asm.len(),
                        "boolean": asm.frame.is_boolean(),
                        "points": sp.points(),
                        "front_iso": front_iso,
                        "nuclei": asm.nuclei,
                        "assembly": io::lattice_json(asm.frame.lattice()),
                    }),
                    ..Default::default()
                })
            }))
        }
        Document::Space(y) => {
            if ctx.cap.is_some() {
                return Err(InputError("--cap applies to lattice input only".into()));
            }
            Ok(checked(|| {
                let r = dissolution_checks(&y)?;
                Ok(Outcome {
                    verdicts: vec![
                        Verdict::flag("boolean", r.boolean),
                        Verdict::flag("count_matches", r.count_matches),
                        Verdict::flag("front_iso", r.front_iso),
                        Verdict::flag("envelope_iso", r.envelope_iso),
                    ],
                    report: serde_json::to_value(&r).expect("serializable"),
                    ..Default::default()
                })
            }))
        }
        other => Err(InputError(format!("{file}: expected a lattice or space, got `{}`", other.kind()))),
    }
}

/// An element given by index or by label.
fn element(s: &FiniteSkewLattice, text: &str) -> Result<usize, InputError> {
    if let Ok(i) = text.parse::<usize>() {
        return if i < s.size() { Ok(i) } else { Err(InputError(format!("element {i} out of range"))) };
    }
    s.labels()
        .and_then(|l| l.iter().position(|x| x == text))
        .ok_or_else(|| InputError(format!("no element labelled `{text}`")))
}

fn separate_cmd(ctx: &mut Ctx, file: &str, a: &str, b: &str) -> Result<Outcome, InputError> {
    let s = skew_of(load!(ctx, file), file)?;
    let (a, b) = (element(&s, a)?, element(&s, b)?);
    Ok(checked(|| match separate(&s, a, b)? {
        Some(sep) => Ok(Outcome {
            verdicts: vec![Verdict::flag("separated", true)],
            report: json!({ "a": a, "b": b, "point": sep.point, "morphism": sep.morphism.map }),
            ..Default::default()
        }),
        None => Ok(Outcome {
            verdicts: vec![Verdict::new("separated", CheckResult::fail("separated", vec![a, b]))],
            report: json!({ "a": a, "b": b }),
            ..Default::default()
        }),
    }))
}

fn spectrum_cmd(ctx: &mut Ctx, file: &str) -> Result<Outcome, InputError> {
    let doc = load!(ctx, file);
    Ok(checked(|| {
        let (sp, extra) = match doc {
            Document::Lattice(l) => (spectrum(&FiniteFrame::new(l)?)?, Value::Null),
            Document::SkewLattice(s) => (spectrum(&FiniteFrame::new(shadow(&s)?.0)?)?, Value::Null),
            Document::Space(y) => {
                let (sp, map) = sobrify(&y);
                let homeo = homeomorphism(&y, &sp.space).is_some();
                (sp, json!({ "canonical_map": map, "sober": is_sober(&y).ok, "homeomorphic": homeo }))
            }
            other => return Err(Error::Malformed(format!("no spectrum for kind `{}`", other.kind()))),
        };
        let mut emitted = BTreeMap::new();
        emitted.insert("spectrum".to_string(), io::space_json(&sp.space));
        Ok(Outcome {
            verdicts: vec![Verdict::new("sober", is_sober(&sp.space))],
            report: json!({
                "points": sp.points.iter().map(|p| p.members().to_vec()).collect::<Vec<_>>(),
                "basic_open": sp.basic_open,
                "discrete": sp.space.is_discrete(),
                "space": extra,
            }),
            emitted,
            error: None,
        })
    }))
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Result<Outcome, InputError> {
    if ctx.cap.is_some() && !cli.command.accepts_cap() {
        return Err(InputError(format!("--cap is not an option of `{}`", cli.command.name())));
    }
    if ctx.cap == Some(0) {
        return Err(InputError("--cap must be positive".into()));
    }
    match &cli.command {
        Command::Validate { file } => validate(ctx, file),
        Command::Analyze { file } => analyze(ctx, file),
        Command::Dualize { file } => dualize(ctx, file),
        Command::Realize { space, sheaf } => realize(ctx, space, sheaf),
        Command::Roundtrip { files } => roundtrip(ctx, files),
        Command::Nuclei { file } => nuclei(ctx, file),
        Command::Separate { file, a, b } => separate_cmd(ctx, file, a, b),
        Command::Spectrum { file } => spectrum_cmd(ctx, file),
    }
}

fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v).expect("serializable") + "\n")
}

/// Writes emitted structures next to the certificate, which then refers to
/// them by file name.
fn write_out(dir: &Path, cert: &mut Certificate) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, v) in cert.emitted.iter_mut() {
        let file = format!("{name}.json");
        write_json(&dir.join(&file), v)?;
        *v = json!(file);
    }
    write_json(&dir.join("certificate.json"), &serde_json::to_value(&*cert).expect("serializable"))
}

fn summary(cert: &Certificate) -> String {
    let mut s = format!("skewlat {} ({})\n", cert.command.join(" "), cert.version);
    for i in &cert.inputs {
        s += &format!("input {} [{}] sha256:{}\n", i.path, i.kind, i.sha256);
    }
    for v in &cert.verdicts {
        let tag = if v.result.ok { "PASS" } else { "FAIL" };
        s += &format!("{tag} {}", v.name);
        if let Some(law) = &v.result.law {
            s += &format!(" law={law}");
        }
        if let Some(w) = &v.result.witness {
            s += &format!(" witness={w:?}");
        }
        s += "\n";
    }
    if let Some(e) = &cert.error {
        s += &format!("error: {e}\n");
    }
    if !cert.report.is_null() {
        s += &serde_json::to_string_pretty(&cert.report).expect("serializable");
        s += "\n";
    }
    for (name, v) in &cert.emitted {
        match v {
            Value::String(f) => s += &format!("emitted {name}: {f}\n"),
            other => s += &format!("emitted {name}: {other}\n"),
        }
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Ctx { seed: cli.seed, cap: cli.cap, inputs: Vec::new() };
    let outcome = match run(&cli, &mut ctx) {
        Ok(o) => o,
        Err(InputError(m)) => {
            eprintln!("skewlat: {m}");
            return ExitCode::from(2);
        }
    };
    let mut cert = Certificate {
        command: std::env::args().skip(1).collect(),
        version: env!("CARGO_PKG_VERSION"),
        seed: ctx.seed,
        cap: ctx.cap,
        inputs: ctx.inputs,
        verdicts: outcome.verdicts,
        report: outcome.report,
        emitted: outcome.emitted,
        error: outcome.error,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = write_out(dir, &mut cert) {
            eprintln!("skewlat: {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&cert).expect("serializable"));
    } else {
        print!("{}", summary(&cert));
    }
    if cert.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
