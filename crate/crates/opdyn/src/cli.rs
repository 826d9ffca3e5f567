//! Command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use opdyn_core::constructions::{ik_epsilon_witnesses, nest_block_operator, WitnessSet};
use opdyn_core::criteria::{spectral_growth, verify_nu, verify_wnu, DecayPolicy, NUCertificate, WNUCertificate};
use opdyn_core::dynamics::{
    default_n_schedule, default_tau_grid, distance_series, distribution_profile, li_yorke_evidence,
};
use opdyn_core::operators::orbit_norms;
use opdyn_core::{OperatorDescription, SparseVector};

use crate::manifest::{ConstructionParams, Manifest, ToolInfo};
use crate::output::{csv, float, resolve_out, write_atomic, write_json};
use crate::report::{describe_first_violation, CertificateDoc, Envelope, RadiusDoc};
use crate::spec::{load_spec, BlockSource, BuiltinSpec, CRuleSpec, ComplexValue, OperatorSpec, SpecDocument};
use crate::vecfile::{format_vector, read_vector};

const SCHEMA: &str = include_str!("../SCHEMA.md");

#[derive(Debug, Parser)]
#[command(name = "opdyn", version, about = "Orbit statistics and growth certificates for linear operators")]
#[command(after_long_help = SCHEMA)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write `i,norm` for the orbit of a vector.
    Orbit(OrbitArgs),
    /// Distributional function F^n(tau) of an orbit pair.
    Distfn(DistfnArgs),
    /// Check a norm-unimodality certificate.
    CertifyNu(CertifyNuArgs),
    /// Check a weak (fractional) growth certificate.
    CertifyWnu(CertifyWnuArgs),
    /// Growth rates ||T^n p||^(1/n) of a probe.
    Spectrum(SpectrumArgs),
    /// Write a construction as a manifest plus witness files.
    Build(BuildArgs),
    /// Windowed Li-Yorke evidence for an orbit pair.
    Liyorke(LiyorkeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub vector: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value = "orbit.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub x: PathBuf,
    /// Second point; the zero vector when omitted.
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DistfnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    /// Comma-separated tau grid (default: 13 geometric points, 1e-4 to 1e2).
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Comma-separated n schedule (default: 8, 16, ... up to --steps).
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[arg(long, default_value = "distfn.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "distfn.json")]
    pub summary: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub decay_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 100)]
    pub hold: usize,
    /// Do not accept decay on spectral-radius grounds when simulation cannot show it.
    #[arg(long)]
    pub no_spectral_fallback: bool,
}

impl DecayArgs {
    fn policy(&self) -> DecayPolicy {
        DecayPolicy {
            tol: self.decay_tol,
            horizon: self.horizon,
            hold: self.hold,
            spectral_fallback: !self.no_spectral_fallback,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Directory of `x_<m>.txt` files (default: the manifest's witnesses).
    #[arg(long)]
    pub witnesses: Option<PathBuf>,
    /// Restrict to these m (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub ms: Option<Vec<usize>>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyNuArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub witness: WitnessArgs,
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub decay: DecayArgs,
    #[arg(long, default_value = "certify_nu.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyWnuArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub witness: WitnessArgs,
    #[arg(long)]
    pub c_rule: String,
    #[arg(long)]
    pub n_rule: String,
    #[arg(long)]
    pub targets: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub decay: DecayArgs,
    #[arg(long, default_value = "certify_wnu.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Probe vector file; otherwise a seeded random probe on --probe-range.
    #[arg(long)]
    pub probe: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inclusive coordinate range `lo,hi` for the random probe.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probe_range: Option<Vec<i64>>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "spectrum.json")]
    pub summary: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildTarget {
    Nest,
    #[value(name = "ik_epsilon")]
    IkEpsilon,
    #[value(name = "example_shift_1")]
    ExampleShift1,
    #[value(name = "example_shift_2")]
    ExampleShift2,
    Jordan,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    pub target: BuildTarget,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// linear | sqrt | table:<file>
    #[arg(long, default_value = "linear")]
    pub c_rule: String,
    /// Materialized ik_epsilon blocks.
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    /// Leading ik_epsilon blocks replaced by identities.
    #[arg(long, default_value_t = 0)]
    pub identity_prefix: usize,
    /// Keep the ik_epsilon perturbation on blocks 1..=i only; later blocks become identities.
    #[arg(long, conflicts_with = "identity_prefix")]
    pub truncate_after: Option<usize>,
    #[arg(long)]
    pub transposed: bool,
    /// Number of nest witnesses x_1..x_k to write.
    #[arg(long, default_value_t = 64)]
    pub nest_witnesses: usize,
    /// Jordan eigenvalue as `re` or `re,im`.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub mu: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Output directory (default: $OPDYN_OUT_DIR or the working directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LiyorkeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value = "liyorke.json")]
    pub out: PathBuf,
}

/// Result of a successful run; errors map to exit status 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Refuted,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Refuted => 1,
        }
    }
}

struct Loaded {
    doc: SpecDocument,
    op: OperatorDescription,
    dir: PathBuf,
}

fn load(path: &Path) -> anyhow::Result<Loaded> {
    let doc = load_spec(path)?;
    let op = doc.operator.build(&path.display().to_string())?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { doc, op, dir })
}

fn read_vec(path: &Path) -> anyhow::Result<SparseVector> {
    read_vector(path).with_context(|| format!("in vector file {}", path.display()))
}

fn witness_dir(dir: &Path) -> anyhow::Result<WitnessSet> {
    let mut set = WitnessSet::default();
    let entries = std::fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))?;
    for entry in entries {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let Some(m) = name.strip_prefix("x_").and_then(|s| s.strip_suffix(".txt")).and_then(|s| s.parse().ok()) else {
            continue;
        };
        set.insert(m, read_vec(&path)?).with_context(|| format!("witness {}", path.display()))?;
    }
    if set.is_empty() {
        bail!("no x_<m>.txt witness files in {}", dir.display());
    }
    Ok(set)
}

fn witnesses(args: &WitnessArgs, loaded: &Loaded) -> anyhow::Result<WitnessSet> {
    let mut set = match (&args.witnesses, &loaded.doc.manifest) {
        (Some(dir), _) => witness_dir(dir)?,
        (None, Some(m)) if !m.witnesses.is_empty() => m.load_witnesses(&loaded.dir)?,
        _ => bail!("--witnesses is required unless --spec is a manifest with witnesses"),
    };
    if let Some(ms) = &args.ms {
        for m in ms {
            if set.get(*m).is_none() {
                bail!("no witness for m = {m}");
            }
        }
        set.0.retain(|m, _| ms.contains(m));
    }
    Ok(set)
}

fn manifest_params(loaded: &Loaded, flag: &str) -> anyhow::Result<ConstructionParams> {
    loaded
        .doc
        .manifest
        .as_ref()
        .and_then(|m| m.params.clone())
        .ok_or_else(|| anyhow!("{flag} manifest requires --spec to be an ik_epsilon manifest"))
}

/// `m value` lines with `#` comments.
fn read_table(path: &Path) -> anyhow::Result<BTreeMap<usize, f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut table = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let fields: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let ctx = || format!("{}:{}: expected `m value`", path.display(), k + 1);
        if fields.len() != 2 {
            bail!(ctx());
        }
        let m: usize = fields[0].parse().with_context(ctx)?;
        let v: f64 = fields[1].parse().with_context(ctx)?;
        if table.insert(m, v).is_some() {
            bail!("{}:{}: duplicate m = {m}", path.display(), k + 1);
        }
    }
    Ok(table)
}

fn per_m<T>(
    rule: &str,
    flag: &str,
    ms: &[usize],
    loaded: &Loaded,
    named: impl Fn(&str, &str, usize) -> Option<anyhow::Result<T>>,
    from_table: impl Fn(f64) -> anyhow::Result<T>,
    from_manifest: impl Fn(&crate::manifest::BlockParams) -> T,
) -> anyhow::Result<BTreeMap<usize, T>> {
    let mut out = BTreeMap::new();
    if rule == "manifest" {
        let params = manifest_params(loaded, flag)?;
        for &m in ms {
            let b = params
                .blocks
                .iter()
                .find(|b| b.index == m)
                .ok_or_else(|| anyhow!("{flag}: no block {m} in manifest"))?;
            out.insert(m, from_manifest(b));
        }
    } else if let Some(file) = rule.strip_prefix("table:") {
        let table = read_table(Path::new(file))?;
        for &m in ms {
            let v = table.get(&m).ok_or_else(|| anyhow!("{flag}: table {file} has no entry for m = {m}"))?;
            out.insert(m, from_table(*v)?);
        }
    } else {
        let (name, arg) = rule.split_once(':').unwrap_or((rule, ""));
        for &m in ms {
            let v = named(name, arg, m).ok_or_else(|| anyhow!("{flag}: unknown rule `{rule}`"))??;
            out.insert(m, v);
        }
    }
    Ok(out)
}

fn c_map(rule: &str, ms: &[usize], loaded: &Loaded) -> anyhow::Result<BTreeMap<usize, f64>> {
    per_m(
        rule,
        "--c-rule",
        ms,
        loaded,
        |name, _, m| match name {
            "linear" => Some(Ok(m as f64)),
            "sqrt" => Some(Ok((m as f64).sqrt())),
            "exp2-half" => Some(Ok((m as f64 / 2.0).exp2())),
            _ => None,
        },
        Ok,
        |b| b.c,
    )
}

fn n_map(rule: &str, ms: &[usize], loaded: &Loaded) -> anyhow::Result<BTreeMap<usize, usize>> {
    per_m(
        rule,
        "--n-rule",
        ms,
        loaded,
        |name, arg, m| {
            (name == "affine").then(|| {
                let (a, b) = arg.split_once(',').ok_or_else(|| anyhow!("--n-rule affine:<a>,<b>"))?;
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                Ok(a * m + b)
            })
        },
        |v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                bail!("--n-rule table values must be positive integers, got {v}")
            }
        },
        |b| b.m as usize,
    )
}

fn target_map(rule: &str, ms: &[usize], loaded: &Loaded) -> anyhow::Result<BTreeMap<usize, f64>> {
    per_m(
        rule,
        "--targets",
        ms,
        loaded,
        |name, arg, _| (name == "const").then(|| arg.parse::<f64>().map_err(|e| anyhow!("--targets const:<v>: {e}"))),
        Ok,
        |b| 1.0 - b.big_l as f64 / b.m as f64,
    )
}

fn certificate_outcome(report: &opdyn_core::criteria::CertificateReport, out: &Path) -> Outcome {
    match describe_first_violation(report) {
        None => {
            println!("pass ({})", out.display());
            Outcome::Success
        }
        Some(first) => {
            eprintln!("certificate refuted: {first}");
            println!("fail ({})", out.display());
            Outcome::Refuted
        }
    }
}

fn orbit(args: &OrbitArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.spec)?;
    let v = read_vec(&args.vector)?;
    let norms = orbit_norms(&loaded.op, &v, args.steps)?;
    let out = resolve_out(&args.out);
    write_atomic(
        &out,
        csv(&["i", "norm"], norms.iter().enumerate().map(|(i, &n)| [i.to_string(), float(n)])).as_bytes(),
    )?;
    Ok(Outcome::Success)
}

fn pair_series(pair: &PairArgs) -> anyhow::Result<opdyn_core::dynamics::DistanceSeries> {
    let loaded = load(&pair.spec)?;
    let x = read_vec(&pair.x)?;
    let y = match &pair.y {
        Some(p) => read_vec(p)?,
        None => SparseVector::zero(),
    };
    Ok(distance_series(&loaded.op, &x, &y, pair.steps)?)
}

#[derive(Serialize)]
struct DistfnSummary {
    tau: Vec<f64>,
    #[serde(rename = "F_lower_est")]
    f_lower_est: Vec<f64>,
    #[serde(rename = "F_upper_est")]
    f_upper_est: Vec<f64>,
    liminf_orbit_norm_est: f64,
    window: Vec<usize>,
    note: &'static str,
}

fn distfn(args: &DistfnArgs) -> anyhow::Result<Outcome> {
    let series = pair_series(&args.pair)?;
    let taus = args.taus.clone().unwrap_or_else(default_tau_grid);
    let schedule = args.schedule.clone().unwrap_or_else(|| default_n_schedule(args.pair.steps));
    let profile = distribution_profile(&series, &taus, &schedule)?;
    let rows = profile.n_schedule.iter().zip(&profile.f_values).flat_map(|(&n, row)| {
        profile.tau_grid.iter().zip(row).map(move |(&tau, &f)| [n.to_string(), float(tau), float(f)])
    });
    write_atomic(&resolve_out(&args.out), csv(&["n", "tau", "F"], rows).as_bytes())?;
    let summary = DistfnSummary {
        tau: profile.tau_grid.clone(),
        f_lower_est: profile.f_lower_est.clone(),
        f_upper_est: profile.f_upper_est.clone(),
        liminf_orbit_norm_est: profile.liminf_orbit_norm_est,
        window: profile.window.clone(),
        note: "windowed estimates over the listed n; the limits are only sampled on the listed tau grid",
    };
    write_json(&resolve_out(&args.summary), &Envelope::new(args, summary))?;
    Ok(Outcome::Success)
}

fn certify_nu(args: &CertifyNuArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.witness.spec)?;
    let set = witnesses(&args.witness, &loaded)?;
    let mut cert = NUCertificate::new(args.r, set);
    cert.decay = args.decay.policy();
    let report = verify_nu(&loaded.op, &cert)?;
    let out = resolve_out(&args.out);
    write_json(&out, &Envelope::new(args, CertificateDoc::from(&report)))?;
    Ok(certificate_outcome(&report, &out))
}

fn certify_wnu(args: &CertifyWnuArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.witness.spec)?;
    let set = witnesses(&args.witness, &loaded)?;
    let ms: Vec<usize> = set.iter().map(|(m, _)| m).collect();
    let cert = WNUCertificate {
        c: c_map(&args.c_rule, &ms, &loaded)?,
        n: n_map(&args.n_rule, &ms, &loaded)?,
        targets: target_map(&args.targets, &ms, &loaded)?,
        witnesses: set,
        decay: args.decay.policy(),
    };
    let report = verify_wnu(&loaded.op, &cert)?;
    let out = resolve_out(&args.out);
    write_json(&out, &Envelope::new(args, CertificateDoc::from(&report)))?;
    Ok(certificate_outcome(&report, &out))
}

#[derive(Serialize)]
struct SpectrumSummary {
    probe: Vec<(i64, ComplexValue)>,
    final_rate: Option<f64>,
    triangular_exact: Option<RadiusDoc>,
}

fn spectrum(args: &SpectrumArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.spec)?;
    let probe = match (&args.probe, &args.probe_range) {
        (Some(p), _) => read_vec(p)?,
        (None, Some(range)) => {
            let &[lo, hi] = range.as_slice() else { bail!("--probe-range takes `lo,hi`") };
            if lo > hi {
                bail!("--probe-range needs lo <= hi");
            }
            let mut rng = StdRng::seed_from_u64(args.seed);
            SparseVector::from_entries(
                (lo..=hi).map(|i| (i, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
            )?
        }
        (None, None) => bail!("give --probe or --probe-range"),
    };
    let growth = spectral_growth(&loaded.op, &probe, args.steps)?;
    let rows = growth.rates.iter().enumerate().map(|(k, &r)| [(k + 1).to_string(), float(r)]);
    write_atomic(&resolve_out(&args.out), csv(&["n", "rate"], rows).as_bytes())?;
    let summary = SpectrumSummary {
        probe: probe.iter().map(|(i, c)| (i, ComplexValue(c))).collect(),
        final_rate: growth.rates.last().copied(),
        triangular_exact: growth.triangular_exact.as_ref().map(RadiusDoc::from),
    };
    write_json(&resolve_out(&args.summary), &Envelope::new(args, summary))?;
    Ok(Outcome::Success)
}

fn c_rule_spec(rule: &str) -> anyhow::Result<CRuleSpec> {
    Ok(match rule {
        "linear" => CRuleSpec::Linear,
        "sqrt" => CRuleSpec::Sqrt,
        _ => {
            let file =
                rule.strip_prefix("table:").ok_or_else(|| anyhow!("--c-rule must be linear, sqrt or table:<file>"))?;
            let table = read_table(Path::new(file))?;
            if table.keys().copied().ne(1..=table.len()) {
                bail!("{file}: C table must list m = 1, 2, ... without gaps");
            }
            CRuleSpec::Table { values: table.into_values().collect() }
        }
    })
}

fn build(args: &BuildArgs) -> anyhow::Result<Outcome> {
    let dir = match &args.out_dir {
        Some(d) => d.clone(),
        None => resolve_out(Path::new(".")),
    };
    let (name, operator, params, witness_set) = match args.target {
        BuildTarget::Nest => {
            if args.nest_witnesses == 0 {
                bail!("--nest-witnesses must be positive");
            }
            let nest = nest_block_operator(args.transposed);
            ("nest", OperatorSpec::nest(args.transposed), None, nest.witnesses(1..=args.nest_witnesses))
        }
        BuildTarget::IkEpsilon => {
            let mut spec =
                OperatorSpec::ik_epsilon(args.epsilon, c_rule_spec(&args.c_rule)?, args.blocks, args.identity_prefix);
            if let OperatorSpec::BlockDiagonal {
                source: BlockSource::Builtin { builtin: BuiltinSpec::IkEpsilon { truncate_after, .. } },
            } = &mut spec
            {
                *truncate_after = args.truncate_after;
            }
            let params = spec.ik_params().expect("ik_epsilon spec")?;
            spec.build("arguments")?;
            let set = ik_epsilon_witnesses(&params)?;
            ("ik_epsilon", spec, Some(ConstructionParams::from_ik(&params)), set)
        }
        BuildTarget::ExampleShift1 => {
            ("example_shift_1", shift(crate::spec::WeightSpec::PaperExample1), None, WitnessSet::default())
        }
        BuildTarget::ExampleShift2 => {
            ("example_shift_2", shift(crate::spec::WeightSpec::PaperExample2), None, WitnessSet::default())
        }
        BuildTarget::Jordan => {
            let mu = match args.mu[..] {
                [re] => Complex64::new(re, 0.0),
                [re, im] => Complex64::new(re, im),
                _ => bail!("--mu takes `re` or `re,im`"),
            };
            let spec = OperatorSpec::Jordan { mu: ComplexValue(mu), n: args.n };
            spec.build("arguments")?;
            ("jordan", spec, None, WitnessSet::default())
        }
    };
    let mut files = BTreeMap::new();
    for (m, x) in witness_set.iter() {
        let rel = format!("{name}_witnesses/x_{m}.txt");
        write_atomic(&dir.join(&rel), format_vector(x).as_bytes())?;
        files.insert(m, rel);
    }
    let manifest =
        Manifest { tool: ToolInfo::current(), construction: name.into(), operator, params, witnesses: files };
    let path = dir.join(format!("{name}.json"));
    write_json(&path, &manifest)?;
    println!("{}", path.display());
    Ok(Outcome::Success)
}

fn shift(weights: crate::spec::WeightSpec) -> OperatorSpec {
    OperatorSpec::BilateralShift { weights }
}

#[derive(Serialize)]
struct LiYorkeDoc {
    pass: bool,
    sup_tail: f64,
    inf_tail: f64,
    note: &'static str,
}

fn liyorke(args: &LiyorkeArgs) -> anyhow::Result<Outcome> {
    let series = pair_series(&args.pair)?;
    let ev = li_yorke_evidence(&series, args.delta, args.eta)?;
    let doc = LiYorkeDoc {
        pass: ev.pass,
        sup_tail: ev.sup_tail,
        inf_tail: ev.inf_tail,
        note: "extremes over the second half of the computed series; evidence, not a limit",
    };
    write_json(&resolve_out(&args.out), &Envelope::new(args, doc))?;
    println!("{}", if ev.pass { "evidence found" } else { "no evidence" });
    Ok(Outcome::Success)
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Orbit(a) => orbit(a),
        Command::Distfn(a) => distfn(a),
        Command::CertifyNu(a) => certify_nu(a),
        Command::CertifyWnu(a) => certify_wnu(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Build(a) => build(a),
        Command::Liyorke(a) => liyorke(a),
    }
}
