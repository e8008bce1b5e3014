use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use edgecoh::analysis::extract_decay_time;
use edgecoh::config::{resolve_observable, Config};
use edgecoh::duality::{dualize_with, DualityContext, DualizeOptions};
use edgecoh::dynamics::{autocorrelator_with, diagonalize_model};
use edgecoh::models::floquet_coefficients;
use edgecoh::sweep::{job_memory_bytes, memory_cap_bytes, run_sweep, SweepPlan, MEMORY_CAP_ENV};
use edgecoh::szm::{detect_poles, expand_szm_with, resonance_report, ExpandOptions, Seed};
use edgecoh::{format_operator, parse_operator, Operator};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "edgecoh", version, about = "Edge-mode coherence in open spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Autocorrelators and decay times of edge and bulk operators.
    Autocorr(RunArgs),
    /// Rewrite an operator file through the ZXZ / coupled-Ising duality.
    Dualize(DualizeArgs),
    /// Order-by-order zero modes and their poles.
    Szm(SzmArgs),
    /// Resonance table for coprime ratios p/q.
    Resonances(ResonanceArgs),
    /// Parameter scans listed under `sweep` in a config.
    Sweep(SweepArgs),
    /// Coefficients of the effective Floquet Hamiltonian.
    FloquetCoeffs(FloquetArgs),
    /// Check a config and print it with defaults filled in.
    Validate(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, e.g. `run.times.t_max=1e7` (repeatable).
    #[arg(long = "set", value_name = "KEY=JSON")]
    set: Vec<String>,
    /// Decay threshold (overrides `run.threshold`).
    #[arg(long)]
    threshold: Option<f64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct DualizeArgs {
    /// Operator file in the term format.
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Site count when the input has no `# sites:` header.
    #[arg(long)]
    sites: Option<usize>,
    /// Refuse operators not even under both G_e and G_o.
    #[arg(long)]
    reject_asymmetric: bool,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SzmArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Highest order (overrides `run.seed_order`).
    #[arg(long)]
    seed_order: Option<usize>,
    /// Also scan ratios p/q with p, q up to this bound for poles.
    #[arg(long)]
    scan_poles: Option<u64>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ResonanceArgs {
    #[arg(long, default_value_t = 7)]
    q_max: u64,
    /// Largest number of bulk units the order oracle tries.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    force: bool,
    /// Memory cap in GiB.
    #[arg(long, env = MEMORY_CAP_ENV, hide_env_values = true)]
    memory_cap: Option<f64>,
}

#[derive(Args)]
struct FloquetArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.chain().any(|c| c.downcast_ref::<edgecoh::Error>().is_some_and(|e| e.is_validation()));
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Autocorr(a) => cmd_autocorr(&a),
        Command::Dualize(a) => cmd_dualize(&a),
        Command::Szm(a) => cmd_szm(&a),
        Command::Resonances(a) => cmd_resonances(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::FloquetCoeffs(a) => cmd_floquet(&a),
        Command::Validate(a) => {
            let c = load_config(&a)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
            Ok(())
        }
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> anyhow::Result<()> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for p in &parts[..parts.len() - 1] {
        let obj = node.as_object_mut().ok_or_else(|| anyhow!("`{key}`: `{p}` is not inside an object"))?;
        node = obj.entry(p.to_string()).or_insert_with(|| json!({}));
    }
    node.as_object_mut()
        .ok_or_else(|| anyhow!("`{key}` does not name an object field"))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn load_config(a: &ConfigArgs) -> anyhow::Result<Config> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut v: Value = serde_json::from_str(&text)
        .map_err(|e| edgecoh::Error::Config { key: "config".into(), message: e.to_string() })?;
    for s in &a.set {
        let (k, raw) = s
            .split_once('=')
            .ok_or_else(|| edgecoh::Error::Config { key: "--set".into(), message: format!("`{s}` is not KEY=VALUE") })?;
        let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut v, k, val).map_err(|e| edgecoh::Error::Config { key: k.into(), message: e.to_string() })?;
    }
    if let Some(t) = a.threshold {
        set_path(&mut v, "run.threshold", json!(t))?;
    }
    if let Some(o) = &a.out {
        set_path(&mut v, "output.dir", json!(o))?;
    }
    Ok(Config::from_json(&v.to_string())?)
}

fn refuse_existing(paths: &[PathBuf], force: bool) -> anyhow::Result<()> {
    if force {
        return Ok(());
    }
    if let Some(p) = paths.iter().find(|p| p.exists()) {
        bail!("{} exists (use --force to overwrite)", p.display());
    }
    Ok(())
}

fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn cmd_autocorr(a: &RunArgs) -> anyhow::Result<()> {
    let c = load_config(&a.config)?;
    let dir = &c.output.dir;
    let mut targets = vec![dir.join("decay.json")];
    for l in &c.run.observables {
        let p = dir.join(format!("{}.csv", file_stem(l)));
        targets.push(p.with_extension("json"));
        targets.push(p);
    }
    refuse_existing(&targets, a.force)?;
    let (need, cap) = (job_memory_bytes(&c.model)?, memory_cap_bytes()?);
    if need > cap {
        return Err(edgecoh::Error::MemoryBudget { need_bytes: need, cap_bytes: cap }.into());
    }
    let times = c.run.times.times()?;
    let spectrum = diagonalize_model(&c.model)?;
    let mut report = Vec::new();
    for label in &c.run.observables {
        let obs = resolve_observable(label, &c.model)?;
        let s = autocorrelator_with(&spectrum, &obs.operator, &times, c.run.autocorr_options())?
            .with_label(label.clone(), Some(c.model.clone()));
        let d = extract_decay_time(&s, obs.kind, c.run.decay_options())?;
        s.write(&dir.join(format!("{}.csv", file_stem(label))), true)?;
        eprintln!("{label}: {:?} = {:.6e}{}", d.kind, d.t, if d.censored { " (censored)" } else { "" });
        report.push(json!({ "observable": label, "decay": d, "plateau": s.plateau / s.norm }));
    }
    std::fs::write(dir.join("decay.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(())
}

fn cmd_dualize(a: &DualizeArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let op: Operator = parse_operator(&text, a.sites)?;
    let ctx = DualityContext::new(op.n_sites())?;
    let out = dualize_with(&op, &ctx, DualizeOptions { reject_asymmetric: a.reject_asymmetric })?;
    let text = format_operator(&out);
    match &a.output {
        Some(p) => {
            refuse_existing(std::slice::from_ref(p), a.force)?;
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn seed_stem(s: Seed) -> &'static str {
    match s {
        Seed::SigmaX => "psi_x",
        Seed::SigmaZ => "psi_z",
    }
}

fn cmd_szm(a: &SzmArgs) -> anyhow::Result<()> {
    let c = load_config(&a.config)?;
    let order = a.seed_order.unwrap_or(c.run.seed_order);
    let dir = &c.output.dir;
    let mut targets = vec![dir.join("poles.json")];
    for s in &c.run.seeds {
        targets.extend((0..=order).map(|n| dir.join(format!("{}_order{n}.txt", seed_stem(*s)))));
    }
    refuse_existing(&targets, a.force)?;
    std::fs::create_dir_all(dir)?;
    let mut poles = Vec::new();
    for &seed in &c.run.seeds {
        let e = expand_szm_with::<f64>(&c.model, seed, order, ExpandOptions { collect_poles: true, strict_kernel: false })?;
        for (n, op) in e.orders.iter().enumerate() {
            std::fs::write(dir.join(format!("{}_order{n}.txt", seed_stem(seed))), format_operator(op))?;
        }
        for (n, k) in e.kernel_residual.iter().enumerate().filter(|(_, k)| **k > 0.0) {
            eprintln!("{seed}: order {n} left a kernel component of norm {k:e}");
        }
        poles.extend(e.poles);
    }
    if let Some(q_max) = a.scan_poles {
        for &seed in &c.run.seeds {
            poles.extend(detect_poles(seed, order, q_max)?);
        }
    }
    std::fs::write(dir.join("poles.json"), serde_json::to_string_pretty(&poles)? + "\n")?;
    if a.scan_poles.is_none() {
        if let Some(p) = poles.first() {
            return Err(edgecoh::Error::Pole(p.clone()).into());
        }
    }
    Ok(())
}

fn cmd_resonances(a: &ResonanceArgs) -> anyhow::Result<()> {
    let opt = |o: Option<usize>| o.map(|n| n.to_string()).unwrap_or_default();
    println!("p,q,sigma_z_resonant,sigma_x_resonant,order_z,order_x,order_joint");
    for p in 1..=a.q_max {
        for q in 1..=a.q_max {
            if num_gcd(p, q) != 1 {
                continue;
            }
            let r = resonance_report(p, q, a.n_max)?;
            let o = r.predicted_order.expect("oracle attached");
            println!(
                "{p},{q},{},{},{},{},{}",
                r.sigma_z_resonant,
                r.sigma_x_resonant,
                opt(o.sigma_z),
                opt(o.sigma_x),
                opt(o.joint)
            );
        }
    }
    Ok(())
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn cmd_sweep(a: &SweepArgs) -> anyhow::Result<()> {
    let c = load_config(&a.config)?;
    if c.sweep.is_empty() {
        return Err(edgecoh::Error::Config { key: "sweep".into(), message: "no scans listed".into() }.into());
    }
    if let Some(cap) = a.memory_cap {
        std::env::set_var(MEMORY_CAP_ENV, cap.to_string());
    }
    let plans = SweepPlan::from_config(&c);
    let targets: Vec<PathBuf> = plans.iter().filter_map(|p| p.output.as_ref()).map(|d| d.join("summary.csv")).collect();
    refuse_existing(&targets, a.force)?;
    for p in &plans {
        p.validate()?;
    }
    for p in &plans {
        let r = run_sweep(p, a.workers)?;
        let dir: &Path = p.output.as_deref().expect("config plans have an output");
        let failed = r.records.iter().filter(|r| r.error.is_some()).count();
        eprintln!("{}: {} points, {failed} failed -> {}", p.axis, r.records.len(), dir.display());
    }
    Ok(())
}

fn cmd_floquet(a: &FloquetArgs) -> anyhow::Result<()> {
    let f = floquet_coefficients(a.lambda1, a.lambda2)?;
    let (c1, c2) = (f.c(a.lambda1)?, f.c(a.lambda2)?);
    let (d1, d2) = (f.d(a.lambda1)?, f.d(a.lambda2)?);
    let ratio = |x: f64, y: f64| if y == 0.0 { Value::Null } else { json!(x / y) };
    let out = json!({
        "lambda1": f.lambda1,
        "lambda2": f.lambda2,
        "a": f.a,
        "b": f.b,
        "c_edge": f.c_edge,
        "c": { "lambda1": c1, "lambda2": c2 },
        "d": { "lambda1": d1, "lambda2": d2 },
        "c_plus_d": { "lambda1": c1 + d1, "lambda2": c2 + d2 },
        "a_over_b": ratio(f.a, f.b),
        "b_over_a": ratio(f.b, f.a),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}
