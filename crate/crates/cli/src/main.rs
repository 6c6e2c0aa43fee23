mod cli;
mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use startree_core::construction::{Addr, Engine};
use startree_core::error::EngineError;
use startree_core::tree::Kind;
use startree_core::verifier::{exit_status, SuiteConfig, Verifier};
use startree_core::word::IsoWord;

use cli::{Cli, Command, MapArgs, OrbitArgs};
use config::{parse_addr, Config};

/// Everything that ends a run early, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, addresses, words or config: exit 2.
    Usage(String),
    /// Host membership could not be settled inside the region: exit 3.
    Horizon(String),
    /// Margin doubling or the stopping rule changed a result: exit 4.
    Unstable(String),
    /// Anything else: exit 1.
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Horizon(_) => 3,
            Failure::Unstable(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Horizon(m) | Failure::Unstable(m) | Failure::Other(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let msg = e.to_string();
        match e {
            EngineError::Horizon { .. } => Failure::Horizon(msg),
            EngineError::MarginUnstable { .. } | EngineError::NonConvergence { .. } => {
                Failure::Unstable(msg)
            }
            EngineError::InvalidAddr { .. }
            | EngineError::InvalidGenerator { .. }
            | EngineError::LevelOutOfRange { .. } => Failure::Usage(msg),
            EngineError::NoLeafCandidate { .. } => Failure::Other(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = Config::resolve(&cli.global)?;
    let mut out: Box<dyn Write> = match &cli.global.out {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let code = match cli.command {
        Command::Truncate => cmd_truncate(&cfg, &mut out)?,
        Command::Verify => cmd_verify(&cfg, &mut out)?,
        Command::Map(args) => cmd_map(&cfg, &args, &mut out)?,
        Command::Orbit(args) => cmd_orbit(&cfg, &args, &mut out)?,
        Command::Stats => cmd_stats(&cfg, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn engine_for(level: usize) -> Result<Engine, Failure> {
    Ok(Engine::build(level)?)
}

fn checked_addr(engine: &Engine, level: usize, s: &str) -> Result<Addr, Failure> {
    let a = parse_addr(s)?;
    engine.validate(level, &a)?;
    Ok(a)
}

fn checked_center(engine: &Engine, cfg: &Config, level: usize) -> Result<Addr, Failure> {
    let c = cfg.center_at(level);
    engine.validate(level, &c)?;
    Ok(c)
}

fn cmd_truncate(cfg: &Config, out: &mut dyn Write) -> Result<u8, Failure> {
    let engine = engine_for(cfg.level)?;
    let center = checked_center(&engine, cfg, cfg.level)?;
    let ball = engine.ball_at(cfg.level, &center, cfg.radius)?;
    out.write_all(&ball.tree.export(cfg.format))?;
    Ok(0)
}

fn cmd_verify(cfg: &Config, out: &mut dyn Write) -> Result<u8, Failure> {
    if cfg.radius == 0 {
        return Err(Failure::Usage("verify needs --radius of at least 1".into()));
    }
    cfg.warn_thin_margin();
    let suite = SuiteConfig {
        max_level: cfg.level,
        radius: cfg.radius,
        margin: cfg.explicit_margin(),
        stability_k: cfg.stability_k,
        center: cfg.center().cloned(),
    };
    let engine = engine_for(cfg.level + 1)?;
    if let Some(c) = cfg.center() {
        engine.validate(c.level(), c)?;
    }
    let reports = Verifier::new(engine)
        .with_stability_k(cfg.stability_k)
        .run_suite(&suite);
    for r in &reports {
        serde_json::to_writer(&mut *out, r).map_err(|e| Failure::Other(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(exit_status(&reports) as u8)
}

fn cmd_map(cfg: &Config, args: &MapArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let word: IsoWord = args
        .word
        .parse()
        .map_err(|e| Failure::Usage(format!("bad word `{}`: {e}", args.word)))?;
    if let Some(g) = word.max_generator().filter(|&g| g > cfg.level) {
        return Err(Failure::Usage(format!(
            "generator g{g} does not exist at level {}",
            cfg.level
        )));
    }
    let engine = engine_for(cfg.level)?;
    let a = checked_addr(&engine, cfg.level, &args.addr)?;
    match engine.apply_word(cfg.level, &word, &a)? {
        Some(img) => writeln!(out, "{img}")?,
        None => writeln!(out, "undefined")?,
    }
    Ok(0)
}

fn parse_gens(spec: Option<&str>, level: usize) -> Result<Vec<usize>, Failure> {
    let Some(spec) = spec else {
        return Ok((0..=level).collect());
    };
    let mut gens = Vec::new();
    for tok in spec.split([',', ' ']).filter(|t| !t.is_empty()) {
        let g: usize = tok
            .trim_start_matches('g')
            .parse()
            .map_err(|_| Failure::Usage(format!("bad generator `{tok}`")))?;
        if g > level {
            return Err(Failure::Usage(format!("generator {g} does not exist at level {level}")));
        }
        gens.push(g);
    }
    gens.sort_unstable();
    gens.dedup();
    Ok(gens)
}

fn cmd_orbit(cfg: &Config, args: &OrbitArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let level = cfg.level;
    let gens = parse_gens(args.gens.as_deref(), level)?;
    let engine = engine_for(level)?;
    let seeds = args
        .addr
        .iter()
        .map(|s| checked_addr(&engine, level, s))
        .collect::<Result<Vec<_>, _>>()?;
    checked_center(&engine, cfg, level)?;
    cfg.warn_thin_margin();
    let region = cfg.region(level);
    let orbit = engine.orbit(level, &gens, &seeds, &region)?;
    let wide = engine.orbit(level, &gens, &seeds, &region.doubled())?;
    for a in &orbit.members {
        writeln!(out, "{a}")?;
    }
    if orbit.members != wide.members {
        eprintln!(
            "warning: orbit changed when the margin was doubled from {} to {} ({} vs {} members)",
            region.margin,
            region.doubled().margin,
            orbit.members.len(),
            wide.members.len()
        );
        return Ok(4);
    }
    Ok(0)
}

fn cmd_stats(cfg: &Config, out: &mut dyn Write) -> Result<u8, Failure> {
    let level = cfg.level;
    let engine = engine_for(level)?;
    let center = checked_center(&engine, cfg, level)?;
    let ball = engine.ball_at(level, &center, cfg.radius)?;
    let t = &ball.tree;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut hosts = 0;
    for (v, a) in ball.addrs.iter().enumerate() {
        *histogram.entry(ball.degree(v)).or_default() += 1;
        hosts += usize::from(engine.is_host(level, a)?);
    }
    let count = |k: Kind| t.vertices().filter(|&v| t.kind(v) == k).count();
    let x_leaves: Vec<String> = engine
        .spec(level)?
        .x_leaves
        .iter()
        .filter(|x| ball.contains(x))
        .map(|x| x.to_string())
        .collect();
    let doc = json!({
        "level": level,
        "center": center.to_string(),
        "radius": cfg.radius,
        "vertices": t.len(),
        "edges": t.edge_count(),
        "interior": count(Kind::Interior),
        "leaves": count(Kind::Leaf),
        "frontier": count(Kind::Frontier),
        "degree_histogram": histogram,
        "hosts": hosts,
        "witness": engine.witness(level)?.to_string(),
        "x_leaves_in_ball": x_leaves,
    });
    writeln!(out, "{doc}")?;
    Ok(0)
}
