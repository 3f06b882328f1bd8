use lentparticle::{Error, Result};

use super::{report, run_experiment};
use crate::config::Params;
use crate::registry::REGISTRY;
use crate::report::{Check, Report, Table};

/// Shrinks an experiment's defaults so the whole registry reruns quickly.
fn reduced(name: &str, seed: u64) -> Params {
    let info = REGISTRY.iter().find(|e| e.name == name).expect("registered");
    let mut p = info.defaults();
    p.master_seed = seed;
    p.grid_steps = p.grid_steps.min(200);
    p.n_paths = match name {
        "mehler" => 8,
        "sde-poisson-lent-particle" => 60,
        _ => p.n_paths.min(200),
    };
    p.inner_paths = p.inner_paths.min(16);
    p
}

fn run_with(workers: usize, p: &Params) -> Result<(Vec<u8>, Vec<u8>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let r = pool.install(|| run_experiment(p))?;
    Ok((r.csv_bytes(), r.json_bytes()))
}

pub fn reproducibility(p: &Params) -> Result<Report> {
    let mut table = Table::new(&[
        "experiment",
        "csv_bytes",
        "json_bytes",
        "rerun_identical",
        "workers_1_vs_8_identical",
    ]);
    let mut checks = Vec::new();
    for info in REGISTRY.iter().filter(|e| e.name != "reproducibility") {
        let q = reduced(info.name, p.master_seed);
        let first = run_with(1, &q)?;
        let again = run_with(1, &q)?;
        let wide = run_with(8, &q)?;
        let (rerun, workers) = (first == again, first == wide);
        table.push(vec![
            info.name.to_string(),
            first.0.len().to_string(),
            first.1.len().to_string(),
            rerun.to_string(),
            workers.to_string(),
        ]);
        checks.push(Check::new(
            format!("byte-identical {}", info.name),
            rerun && workers,
            format!("rerun identical: {rerun}, 1 vs 8 workers identical: {workers}"),
        ));
    }
    Ok(report(p, table, checks))
}
