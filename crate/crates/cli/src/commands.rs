use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde::Serialize;
use serde_json::{json, Value};

use sigman::configspace::{self, ConfigPath};
use sigman::energy::{self, SignalCurve, SignalRegion};
use sigman::gaussian::{self, G22Comparison};
use sigman::graphembed::{self, EmbedOptions, WeightedGraph};
use sigman::mesh::{self, PolylinePath, TriMesh};
use sigman::verify::{self, CORPUS_SIZE};
use sigman::ManifoldSpec;

use crate::report::{self, Failure, RunReport, Table};
use crate::{Cli, Command, ConfigCmd, EnergyCmd, GaussianCmd};

const DEFAULT_GRID: f64 = 0.01;
const DEFAULT_QUAD: usize = 4000;
const DEFAULT_VERIFY_SEED: u64 = 42;

/// What a command produced: the report body, its CSV columns and, when a
/// check failed, a description of it.
struct Outcome {
    outputs: Value,
    table: Table,
    failed: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let mut inputs = BTreeMap::new();
    let mut seed = None;
    let start = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Energy(EnergyCmd::Curve { path }) => {
            let p: PolylinePath = report::load("path", path, &mut inputs)?;
            ("energy curve", energy_curve(p)?)
        }
        Command::Energy(EnergyCmd::Region { mesh }) => {
            let m: TriMesh = report::load("mesh", mesh, &mut inputs)?;
            ("energy region", energy_region(m)?)
        }
        Command::Energy(EnergyCmd::Example22) => ("energy example22", example22(g.grid.unwrap_or(DEFAULT_GRID))?),
        Command::Gaussian(GaussianCmd::Fisher { mu, sigma }) => {
            ("gaussian fisher", fisher(*mu, *sigma, g.quad.unwrap_or(DEFAULT_QUAD))?)
        }
        Command::Gaussian(GaussianCmd::Bound { path }) => {
            let p: PolylinePath = report::load("path", path, &mut inputs)?;
            ("gaussian bound", gaussian_bound(p, g.quad.unwrap_or(DEFAULT_QUAD))?)
        }
        Command::Config(ConfigCmd::Energy { path }) => {
            let p: ConfigPath = report::load("path", path, &mut inputs)?;
            ("config energy", config_energy(&p)?)
        }
        Command::Config(ConfigCmd::Bounds { path, check }) => {
            let p: ConfigPath = report::load("path", path, &mut inputs)?;
            ("config bounds", config_bounds(&p, check.is_some())?)
        }
        Command::Embed { graph, manifold, anneal } => {
            let gr: WeightedGraph = report::load("graph", graph, &mut inputs)?;
            let m: ManifoldSpec = report::load("manifold", manifold, &mut inputs)?;
            let defaults = EmbedOptions::default();
            let opts = EmbedOptions {
                seed: g.seed.unwrap_or(defaults.seed),
                restarts: g.restarts.unwrap_or(defaults.restarts),
                max_iters: g.samples.unwrap_or(defaults.max_iters),
                tol_obj: g.tol.unwrap_or(defaults.tol_obj),
                anneal: *anneal,
                ..defaults
            };
            seed = Some(opts.seed);
            ("embed", embed(&gr, &m, &opts)?)
        }
        Command::VerifyAll => {
            let s = g.seed.unwrap_or(DEFAULT_VERIFY_SEED);
            seed = Some(s);
            ("verify-all", verify_all(s))
        }
    };
    let timing = (!g.no_timing).then(|| start.elapsed().as_secs_f64());
    let run = RunReport { command: name.to_string(), inputs, outputs: outcome.outputs, timing, seed };
    let mut text = serde_json::to_string_pretty(&run).context("cannot serialize the report")?;
    text.push('\n');
    report::write_text(g.out.as_deref(), &text)?;
    if let Some(csv) = &g.csv {
        report::write_text(Some(csv), &outcome.table.to_csv())?;
    }
    match outcome.failed {
        Some(what) => Err(Failure::CheckFailed(what)),
        None => Ok(()),
    }
}

fn energy_curve(p: PolylinePath) -> anyhow::Result<Outcome> {
    let rho = mesh::cumulative_arclength(&p);
    let mut table = Table::new(&["index", "param", "arclength"]);
    for (i, (t, s)) in p.params().iter().zip(&rho).enumerate() {
        table.push(vec![i.to_string(), fmt(*t), fmt(*s)]);
    }
    let r = energy::curve_energy(&SignalCurve::new(p)?);
    let failed = (!r.all_satisfied()).then(|| format!("curve energy exceeds its bound: {r:?}"));
    Ok(Outcome { outputs: to_value(&r), table, failed })
}

fn region_outcome(m: &TriMesh, r: energy::EnergyReport, extra: Value) -> anyhow::Result<Outcome> {
    let dist = mesh::geodesic_distance_field(m, m.sources())?;
    let mut table = Table::new(&["vertex", "distance"]);
    for (v, d) in dist.iter().enumerate() {
        table.push(vec![v.to_string(), fmt(*d)]);
    }
    let failed = (!r.all_satisfied()).then(|| format!("region energy exceeds its bound: {r:?}"));
    let mut outputs = to_value(&r);
    if let (Value::Object(o), Value::Object(e)) = (&mut outputs, extra) {
        o.extend(e);
    }
    Ok(Outcome { outputs, table, failed })
}

fn energy_region(m: TriMesh) -> anyhow::Result<Outcome> {
    let targets: Vec<usize> = m.marks().1.into_iter().collect();
    let sig = SignalRegion::new(m, targets)?;
    let r = energy::region_energy(&sig)?;
    region_outcome(sig.mesh(), r, json!({}))
}

fn example22(step: f64) -> anyhow::Result<Outcome> {
    let r = verify::example22(step)?;
    let grid = mesh::rectangle_grid([-1.0, 1.0], [0.0, 1.0], step)?;
    let m = grid.mesh.with_sources(grid.top)?;
    region_outcome(&m, r, json!({ "grid": step, "expected_e1": 1.0, "expected_e2": 2.0 / 3.0 }))
}

fn fisher(mu: f64, sigma: f64, quad: usize) -> anyhow::Result<Outcome> {
    let t = gaussian::fisher_metric_numeric(mu, sigma, quad)?;
    let g22 = G22Comparison::new(sigma, t.g22);
    let mut table = Table::new(&["entry", "value"]);
    for (k, v) in [("g11", t.g11), ("g12", t.g12), ("g22", t.g22), ("g22_paper", g22.g22_paper), ("g22_classical", g22.g22_classical)] {
        table.push(vec![k.to_string(), fmt(v)]);
    }
    let outputs = json!({
        "mu": mu,
        "sigma": sigma,
        "quad_points": quad,
        "tensor": to_value(&t),
        "g11_closed_form": 1.0 / (sigma * sigma),
        "g22": to_value(&g22),
        "g22_closest": g22.closest(),
    });
    Ok(Outcome { outputs, table, failed: None })
}

fn gaussian_bound(p: PolylinePath, quad: usize) -> anyhow::Result<Outcome> {
    let ManifoldSpec::GaussianParam { n, .. } = p.manifold() else {
        return Err(anyhow!("--path: manifold must be gaussian_param, got {}", p.manifold().kind_name()));
    };
    // Fisher comparison at the first marginal of the starting Gaussian.
    let start = p.start();
    let (mu, sigma) = (start[0], start[*n].sqrt());
    let t = gaussian::fisher_metric_numeric(mu, sigma, quad)?;
    let g22 = G22Comparison::new(sigma, t.g22);
    let r = gaussian::check_gaussian_lower_bound(&p)?;
    let mut table = Table::new(&["coordinate", "monotone"]);
    for (i, m) in r.monotone_coords.iter().enumerate() {
        table.push(vec![i.to_string(), m.to_string()]);
    }
    let failed = (r.hypotheses_hold && !r.satisfied).then(|| format!("e2 {} < lower bound {}", r.e2, r.lower_bound));
    let mut outputs = to_value(&r);
    if let Value::Object(o) = &mut outputs {
        o.insert("g22_numeric".into(), json!(g22.g22_numeric));
        o.insert("g22_paper".into(), json!(g22.g22_paper));
        o.insert("g22_classical".into(), json!(g22.g22_classical));
    }
    Ok(Outcome { outputs, table, failed })
}

fn component_table(p: &ConfigPath) -> anyhow::Result<(Table, Vec<Value>)> {
    let mut table = Table::new(&["particle", "e1", "e2"]);
    let mut list = Vec::new();
    for j in 0..p.particles() {
        let (e1, e2) = configspace::component_energies(p, j)?;
        table.push(vec![j.to_string(), fmt(e1), fmt(e2)]);
        list.push(json!({ "particle": j, "e1": e1, "e2": e2 }));
    }
    Ok((table, list))
}

fn config_energy(p: &ConfigPath) -> anyhow::Result<Outcome> {
    let r = configspace::config_path_energy(p)?;
    let (table, components) = component_table(p)?;
    let failed = (!r.all_satisfied()).then(|| format!("path energy exceeds its bound: {r:?}"));
    let mut outputs = to_value(&r);
    if let Value::Object(o) = &mut outputs {
        o.insert("components".into(), Value::Array(components));
    }
    Ok(Outcome { outputs, table, failed })
}

fn config_bounds(p: &ConfigPath, lower: bool) -> anyhow::Result<Outcome> {
    let r = configspace::check_config_bounds(p, lower)?;
    let (table, _) = component_table(p)?;
    let failed = (!r.all_ok()).then(|| "a configuration-space bound failed".to_string());
    Ok(Outcome { outputs: to_value(&r), table, failed })
}

fn embed(g: &WeightedGraph, m: &ManifoldSpec, opts: &EmbedOptions) -> anyhow::Result<Outcome> {
    let r = graphembed::minimize_ratio_variance(g, m, opts)?;
    let dim = m.chart_dim();
    let mut header = vec!["vertex".to_string()];
    header.extend((0..dim).map(|c| format!("x{c}")));
    let mut table = Table { header, rows: Vec::new() };
    for (v, p) in r.points.iter().enumerate() {
        let mut row = vec![v.to_string()];
        row.extend(p.iter().map(|c| fmt(*c)));
        table.push(row);
    }
    Ok(Outcome { outputs: to_value(&r), table, failed: None })
}

fn verify_all(seed: u64) -> Outcome {
    let corpora = verify::verify_all(seed);
    let mut table = Table::new(&["corpus", "total", "passed", "skipped", "status"]);
    let mut summary = serde_json::Map::new();
    eprintln!("{:<16} {:>6} {:>6} {:>7}  status", "corpus", "total", "passed", "skipped");
    for c in &corpora {
        let status = if c.ok() { "pass" } else { "FAIL" };
        eprintln!("{:<16} {:>6} {:>6} {:>7}  {status}", c.name, c.total, c.passed, c.skipped);
        table.push(vec![c.name.clone(), c.total.to_string(), c.passed.to_string(), c.skipped.to_string(), status.into()]);
        let entry = if c.total == CORPUS_SIZE { format!("{}/{}", c.passed, c.total) } else { status.to_lowercase() };
        summary.insert(c.name.clone(), Value::String(entry));
    }
    let failing: Vec<&str> = corpora.iter().filter(|c| !c.ok()).map(|c| c.name.as_str()).collect();
    let failed = (!failing.is_empty()).then(|| format!("failing corpora: {}", failing.join(", ")));
    Outcome { outputs: json!({ "summary": summary, "corpora": to_value(&corpora) }), table, failed }
}
