use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use branchdim::gap::certificate_search_with;
use branchdim::measures::{
    decay_check, default_depth, dimension_bracket_with, entropy, lyapunov_bracket_with, BracketOptions, CylinderRule,
};
use branchdim::optimizer::{maximize_dimension, write_csv, write_json, MaximizeOptions, MaximizerRecord, SweepOptions};
use branchdim::system::CatalogParams;
use branchdim::{Error, Result};

use crate::config::{self, Format, PSpec, Rule, RunFile, SystemRef};
use crate::{Cli, Command, OutputArgs, SystemArgs};

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::InvalidParameter(_)
        | Error::InvalidSymbol { .. }
        | Error::Partition { .. }
        | Error::Parse(_)
        | Error::Io(_)
        | Error::ZeroMass(_) => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(path) => RunFile::read(path)?,
        None => RunFile::default(),
    };
    match cli.command {
        Command::Dim { system, p, depth, coarse_bound, rule, budget, out } => {
            let rule = if coarse_bound {
                Some(Rule::Coarse)
            } else {
                rule.or(file.dim.rule).or(file.dim.coarse_bound.filter(|&c| c).map(|_| Rule::Coarse))
            };
            let p = p.map(PSpec::Text).or(file.dim.p.clone());
            dim(&file, &system, p, depth.or(file.dim.depth), rule, config::budget(budget, file.budget)?, &out)
        }
        Command::Maximize { system, l, depth, alpha, seeds, seed, plot, budget, out } => {
            let l = match (l, &file.maximize.l) {
                (Some(l), _) => l,
                (None, Some(v)) => config::l_value(v)?,
                (None, None) => return Err(Error::param("no L given (use --L N or --L A..B)")),
            };
            let m = &file.maximize;
            let opts = MaximizeArgs {
                range: config::parse_l_range(&l)?,
                depth: depth.or(m.depth),
                alpha: alpha.or(m.alpha).unwrap_or(0.75),
                seeds: seeds.or(m.seeds),
                seed: seed.or(m.seed),
                plot: plot.or(m.plot.clone()),
                budget: config::budget(budget, file.budget)?,
            };
            maximize(&file, &system, &opts, &out)
        }
        Command::Gapcert { system, max_len, max_symbol, tol, budget, out } => {
            let g = &file.gapcert;
            let budget = match budget.or(file.budget) {
                Some(b) => b,
                None => config::budget(None, None)?,
            };
            gapcert(
                &file,
                &system,
                max_symbol.or(g.max_symbol).unwrap_or(3),
                max_len.or(g.max_len).unwrap_or(3),
                tol.or(g.tol).unwrap_or(1e-6),
                budget,
                &out,
            )
        }
        Command::Validate { system, samples, out } => validate(&file, &system, samples.or(file.validate.samples).unwrap_or(100), &out),
    }
}

/// Flags naming a system replace the file's system entirely.
fn system_ref(args: &SystemArgs, file: &RunFile) -> SystemRef {
    let (system, path) = if args.system.is_some() || args.file.is_some() {
        (args.system.clone(), args.file.clone())
    } else {
        (file.system.clone(), file.file.clone())
    };
    SystemRef {
        system,
        file: path,
        params: CatalogParams {
            lengths: args.lengths.clone().or(file.lengths.clone()),
            orientation: None,
            tail_branches: args.tail_branches.or(file.tail_branches),
            prefix: args.prefix.or(file.prefix),
        },
    }
}

struct Sink {
    format: Format,
    path: Option<std::path::PathBuf>,
}

impl Sink {
    fn new(out: &OutputArgs, file: &RunFile) -> Self {
        let path = out.output.clone().or(file.output.clone());
        Self { format: config::format(out.format, file.format, path.as_deref()), path }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => write_file(p, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain values serialize");
    s.push('\n');
    s
}

fn join(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(" ")
}

fn dim(file: &RunFile, args: &SystemArgs, p: Option<PSpec>, depth: Option<usize>, rule: Option<Rule>, budget: u128, out: &OutputArgs) -> Result<u8> {
    let sink = Sink::new(out, file);
    let sys_ref = system_ref(args, file);
    let p = config::parse_p(&p.ok_or_else(|| Error::param("no probability vector given (use --p)"))?)?;
    let rule = match rule.unwrap_or(Rule::Combined) {
        Rule::Combined => CylinderRule::Combined,
        Rule::Orbit => CylinderRule::Orbit,
        Rule::Coarse => CylinderRule::Coarse,
    };
    let opts = BracketOptions { rule, budget };
    let depth = depth.unwrap_or_else(|| default_depth(p.support().len(), budget));
    let sys = sys_ref.load(true)?;
    let chi = lyapunov_bracket_with(&sys, &p, depth, &opts)?;
    let dim = dimension_bracket_with(&sys, &p, depth, &opts)?;
    let h = entropy(&p);
    let rule_name = serde_json::to_value(rule).expect("enum serializes");
    let rule_name = rule_name.as_str().unwrap_or_default();
    let text = match sink.format {
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "system   {}", sys.name()).ok();
            writeln!(s, "p        {}", join(p.weights())).ok();
            writeln!(s, "depth    {depth}").ok();
            writeln!(s, "rule     {rule_name}").ok();
            writeln!(s, "entropy  {h:.10}").ok();
            writeln!(s, "chi      [{:.10}, {:.10}]", chi.lo, chi.hi).ok();
            writeln!(s, "dim      [{:.10}, {:.10}]", dim.lo, dim.hi).ok();
            s
        }
        Format::Json => json_text(&serde_json::json!({
            "system": sys.name(),
            "p": p.weights(),
            "depth": depth,
            "rule": rule_name,
            "entropy": h,
            "chi_lo": chi.lo,
            "chi_hi": chi.hi,
            "dim_lo": dim.lo,
            "dim_hi": dim.hi,
        })),
        Format::Csv => format!(
            "system,p,depth,rule,entropy,chi_lo,chi_hi,dim_lo,dim_hi\n{},{},{depth},{rule_name},{h},{},{},{},{}\n",
            sys.name(),
            join(p.weights()),
            chi.lo,
            chi.hi,
            dim.lo,
            dim.hi
        ),
    };
    sink.emit(&text)?;
    Ok(0)
}

struct MaximizeArgs {
    range: (usize, usize),
    depth: Option<usize>,
    alpha: f64,
    seeds: Option<usize>,
    seed: Option<u64>,
    plot: Option<std::path::PathBuf>,
    budget: u128,
}

fn maximize(file: &RunFile, args: &SystemArgs, m: &MaximizeArgs, out: &OutputArgs) -> Result<u8> {
    let sink = Sink::new(out, file);
    let sys = system_ref(args, file).load(true)?;
    let mut opts = MaximizeOptions { bracket: BracketOptions { budget: m.budget, ..BracketOptions::default() }, ..MaximizeOptions::default() };
    if let Some(s) = m.seeds {
        opts.seeds = s;
    }
    if let Some(s) = m.seed {
        opts.seed = s;
    }
    let depths = SweepOptions { budget: m.budget, ..SweepOptions::default() };
    let mut records = Vec::new();
    let mut decay = Vec::new();
    for l in m.range.0..=m.range.1 {
        let depth = m.depth.unwrap_or_else(|| depths.depth_for(l));
        let r = maximize_dimension(&sys, l, depth, &opts)?;
        if !r.converged {
            eprintln!("warning: L={l} stopped with KKT residual {:.2e}", r.kkt_residual);
        }
        decay.push(decay_check(&sys, &r.p_opt, 1.0, m.alpha)?.fitted_c);
        records.push(MaximizerRecord::from(&r));
    }
    let text = match sink.format {
        Format::Text => {
            let mut s = format!("system {}  decay exponent alpha = {}\n", sys.name(), m.alpha);
            writeln!(s, "{:>3} {:>5} {:>12} {:>12} {:>9} {:>9} {:>8}  p", "L", "depth", "dim_lo", "dim_hi", "kkt", "converged", "C").ok();
            for (r, c) in records.iter().zip(&decay) {
                writeln!(
                    s,
                    "{:>3} {:>5} {:>12.8} {:>12.8} {:>9.1e} {:>9} {:>8.4}  {}",
                    r.l, r.depth, r.dim_lo, r.dim_hi, r.kkt_residual, r.converged, c, join(&r.p)
                )
                .ok();
            }
            s
        }
        Format::Json => {
            let mut buf = Vec::new();
            write_json(&mut buf, &records)?;
            String::from_utf8(buf).expect("json is utf-8")
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &records)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    sink.emit(&text)?;
    if let Some(path) = &m.plot {
        let mut s = String::from("# L dim_midpoint half_width\n");
        for r in &records {
            writeln!(s, "{} {:.10} {:.10}", r.l, 0.5 * (r.dim_lo + r.dim_hi), 0.5 * (r.dim_hi - r.dim_lo)).ok();
        }
        write_file(path, &s)?;
    }
    Ok(0)
}

fn gapcert(file: &RunFile, args: &SystemArgs, max_symbol: usize, max_len: usize, tol: f64, budget: u128, out: &OutputArgs) -> Result<u8> {
    let sink = Sink::new(out, file);
    if sink.format == Format::Csv {
        return Err(Error::param("gapcert writes text or json"));
    }
    let sys = system_ref(args, file).load(true)?;
    let found = certificate_search_with(&sys, max_symbol, max_len, tol, budget)?;
    let text = match (&found, sink.format) {
        (Some(c), Format::Json) => format!("{}\n", c.to_json()),
        (Some(c), _) => format!("system {}\n{c}\n", sys.name()),
        (None, Format::Json) => json_text(&serde_json::json!({ "valid": false, "inconclusive": true })),
        (None, _) => format!(
            "system {}\nno certificate among words of length <= {max_len} over symbols <= {max_symbol} (inconclusive)\n",
            sys.name()
        ),
    };
    sink.emit(&text)?;
    Ok(if found.is_some_and(|c| c.valid) { 0 } else { 1 })
}

fn validate(file: &RunFile, args: &SystemArgs, samples: usize, out: &OutputArgs) -> Result<u8> {
    let sink = Sink::new(out, file);
    if sink.format == Format::Csv {
        return Err(Error::param("validate writes text or json"));
    }
    let sys = system_ref(args, file).load(false)?;
    let report = sys.validate(samples);
    let text = match sink.format {
        Format::Json => json_text(&serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?),
        _ => report.to_string(),
    };
    sink.emit(&text)?;
    Ok(if report.all_passed() { 0 } else { 1 })
}
