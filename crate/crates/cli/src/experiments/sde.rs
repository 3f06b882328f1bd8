use lentparticle::lent::{
    flow_oracle_profile, lent_particle_sde_poisson_profile, lent_particle_sde_profile, GradientEstimate, SdeSpec,
};
use lentparticle::paths::{simulate_brownian, MartingaleKind};
use lentparticle::stats::par_collect;
use lentparticle::{Error, Result, RngStream};

use crate::config::Params;
use crate::report::{num, Check, Report, Table};

const US: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const TS: [f64; 5] = [0.6, 0.7, 0.8, 0.9, 1.0];
const REL_TOL: f64 = 1e-2;
const MIN_SHARE: f64 = 0.99;
const EXACT_TOL: f64 = 1e-10;

fn specs(p: &Params) -> Result<Vec<SdeSpec>> {
    let names: Vec<&str> = match &p.sde {
        Some(n) => vec![n.as_str()],
        None => SdeSpec::REGISTRY.to_vec(),
    };
    names
        .into_iter()
        .map(|n| SdeSpec::from_registry(n, p.sde_params()))
        .collect()
}

fn rel_err(estimate: f64, oracle: f64) -> f64 {
    (estimate - oracle).abs() / (oracle.abs() + 1e-8)
}

/// Per-path failures that count as excluded rather than aborting the run.
fn excluded(e: &Error) -> bool {
    matches!(e, Error::NumericalBlowup { .. } | Error::SingularFlow { .. })
}

/// One `(u, t)` cell: estimates paired with oracles, one entry per path.
struct Cell {
    /// Perturbation time, or `jump` when it is the path's own jump time.
    u: String,
    t: f64,
    pairs: Vec<(f64, f64)>,
}

impl Cell {
    fn push(&mut self, est: &GradientEstimate, oracle: &GradientEstimate) {
        self.pairs.push((est.value, oracle.value));
    }

    fn share_within(&self) -> f64 {
        let ok = self.pairs.iter().filter(|(e, o)| rel_err(*e, *o) <= REL_TOL).count();
        ok as f64 / self.pairs.len().max(1) as f64
    }

    fn max_abs(&self) -> f64 {
        self.pairs.iter().map(|(e, o)| (e - o).abs()).fold(0.0, f64::max)
    }
}

fn finish(spec: &SdeSpec, cells: &[Cell], label: &str, table: &mut Table, checks: &mut Vec<Check>) {
    for c in cells {
        let share = c.share_within();
        let mean = |f: fn(&(f64, f64)) -> f64| c.pairs.iter().map(f).sum::<f64>() / c.pairs.len().max(1) as f64;
        let worst = c.pairs.iter().map(|(e, o)| rel_err(*e, *o)).fold(0.0, f64::max);
        table.push(vec![
            spec.name.clone(),
            c.u.clone(),
            num(c.t),
            label.to_string(),
            num(mean(|x| x.0)),
            num(mean(|x| x.1)),
            num(worst),
            num(share),
        ]);
        let name = format!("{label} {} u {} t {}", spec.name, c.u, c.t);
        if spec.name == "additive" {
            let gap = c.max_abs();
            checks.push(Check::new(
                name,
                !c.pairs.is_empty() && gap <= EXACT_TOL,
                format!("max |estimate - oracle| = {gap:e} over {} paths", c.pairs.len()),
            ));
        } else {
            checks.push(Check::new(
                name,
                !c.pairs.is_empty() && share >= MIN_SHARE,
                format!(
                    "{:.4} of {} paths within relative error {REL_TOL}",
                    share,
                    c.pairs.len()
                ),
            ));
        }
    }
}

const HEADER: [&str; 8] = [
    "sde",
    "u",
    "t",
    "method",
    "estimate",
    "oracle",
    "rel_err",
    "frac_within_tol",
];

pub fn sde_lent_particle(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let specs = specs(p)?;
    // per spec: estimate/oracle pairs in (u, t) order, or None when the path is excluded
    type PathRow = Vec<Option<Vec<(f64, f64)>>>;
    let rows = par_collect(p.n_paths, |i| -> Result<PathRow> {
        let b = simulate_brownian(&grid, RngStream::brownian(p.master_seed, i));
        specs
            .iter()
            .map(|s| {
                let mut out = Vec::with_capacity(US.len() * TS.len());
                for u in US {
                    let run = lent_particle_sde_profile(s, &b, u, &TS, p.theta)
                        .and_then(|lp| Ok((lp, flow_oracle_profile(s, &b, u, &TS)?)));
                    match run {
                        Ok((lp, fo)) => out.extend(lp.iter().zip(&fo).map(|(a, o)| (a.value, o.value))),
                        Err(e) if excluded(&e) => return Ok(None),
                        Err(e) => return Err(e),
                    }
                }
                Ok(Some(out))
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&HEADER);
    let mut checks = Vec::new();
    let mut excluded_paths = 0;
    for (j, spec) in specs.iter().enumerate() {
        let mut cells: Vec<Cell> = US
            .iter()
            .flat_map(|&u| {
                TS.iter().map(move |&t| Cell {
                    u: num(u),
                    t,
                    pairs: Vec::new(),
                })
            })
            .collect();
        for r in &rows {
            match &r[j] {
                Some(pairs) => cells.iter_mut().zip(pairs).for_each(|(c, pr)| c.pairs.push(*pr)),
                None => excluded_paths += 1,
            }
        }
        finish(spec, &cells, "jump-difference", &mut table, &mut checks);
    }
    Ok(Report {
        params: p.clone(),
        table,
        checks,
        excluded_paths,
        attempted_paths: p.n_paths * specs.len(),
    })
}

/// Expected share of unit-rate Poisson paths with exactly one jump on `[0, T]`.
fn single_jump_probability(horizon: f64) -> f64 {
    horizon * (-horizon).exp()
}

pub fn sde_poisson_lent_particle(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let specs = specs(p)?;
    let kind = MartingaleKind::SymmetricCompound;
    type PathRow = (usize, Vec<Option<Vec<(usize, GradientEstimate, GradientEstimate)>>>);
    let rows = par_collect(p.n_paths, |i| -> Result<PathRow> {
        let m = kind.simulate(&grid, p.master_seed, i);
        if m.jumps.len() != 1 {
            return Ok((m.jumps.len(), Vec::new()));
        }
        let b = simulate_brownian(&grid, RngStream::brownian(p.master_seed, i));
        let u = m.jumps[0].time;
        let snapped = grid.time(grid.snap_forward(u)?);
        let ts: Vec<(usize, f64)> = TS.iter().copied().enumerate().filter(|(_, t)| *t >= snapped).collect();
        let times: Vec<f64> = ts.iter().map(|x| x.1).collect();
        let per_spec = specs
            .iter()
            .map(|s| {
                let run = lent_particle_sde_poisson_profile(s, &b, &m, p.theta, &times)
                    .and_then(|(_, _, lp)| Ok((lp, flow_oracle_profile(s, &b, u, &times)?)));
                match run {
                    Ok((lp, fo)) => Ok(Some(
                        ts.iter()
                            .zip(lp.into_iter().zip(fo))
                            .map(|((k, _), (a, o))| (*k, a, o))
                            .collect(),
                    )),
                    Err(e) if excluded(&e) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((1, per_spec))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&HEADER);
    let mut checks = Vec::new();
    let singles = rows.iter().filter(|r| r.0 == 1).count();
    let freq = singles as f64 / p.n_paths as f64;
    let target = single_jump_probability(p.horizon);
    let se = (target * (1.0 - target) / p.n_paths as f64).sqrt();
    checks.push(Check::new(
        "single-jump frequency",
        (freq - target).abs() <= 4.0 * se,
        format!(
            "{singles} of {} paths, frequency {freq:.5} vs {target:.5}, se {se:.5}",
            p.n_paths
        ),
    ));

    let mut excluded_paths = 0;
    for (j, spec) in specs.iter().enumerate() {
        let mut cells: Vec<Cell> = TS
            .iter()
            .map(|&t| Cell {
                u: "jump".into(),
                t,
                pairs: Vec::new(),
            })
            .collect();
        for (count, per_spec) in &rows {
            if *count != 1 {
                continue;
            }
            match &per_spec[j] {
                Some(list) => list.iter().for_each(|(k, a, o)| cells[*k].push(a, o)),
                None => excluded_paths += 1,
            }
        }
        finish(spec, &cells, "poisson-jump-difference", &mut table, &mut checks);
    }
    Ok(Report {
        params: p.clone(),
        table,
        checks,
        excluded_paths,
        attempted_paths: singles * specs.len(),
    })
}
