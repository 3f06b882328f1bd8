use lentparticle::lent::{integration_by_parts_check, registered_pairs, supremum_gradient};
use lentparticle::paths::{simulate_brownian, SamplePath};
use lentparticle::stats::{par_collect, SampleStats};
use lentparticle::{Result, RngStream};

use super::{report, z_row};
use crate::config::Params;
use crate::report::{num, Check, Report, Table};

pub fn integration_by_parts(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let mut table = Table::new(&["pair", "lhs", "rhs", "pooled_std_error", "z_score"]);
    let mut checks = Vec::new();
    for pair in registered_pairs() {
        let r = integration_by_parts_check(&pair.f, &pair.g, &grid, p.n_paths, p.master_seed)?;
        let z = r.z_score();
        table.push(vec![
            pair.name.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.pooled_std_error),
            num(z),
        ]);
        checks.push(Check::new(
            format!("duality {}", pair.name),
            (r.lhs - r.rhs).abs() <= 4.0 * r.pooled_std_error,
            format!("lhs {:.6} rhs {:.6} pooled se {:.6}", r.lhs, r.rhs, r.pooled_std_error),
        ));
    }
    Ok(report(p, table, checks))
}

pub const SUPREMUM_U: f64 = 0.5;
pub const SUPREMUM_JUMP: f64 = 1.0 / 1_048_576.0;

pub fn supremum(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let k = SamplePath::zero(grid);
    let rows = par_collect(p.n_paths, |i| {
        let b = simulate_brownian(&grid, RngStream::brownian(p.master_seed, i));
        supremum_gradient(&k, &b, SUPREMUM_U, SUPREMUM_JUMP)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let tied = rows.iter().filter(|r| r.tied).count();
    let non_binary = rows
        .iter()
        .filter(|r| !r.tied && r.value != 0.0 && r.value != 1.0)
        .count();
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let s = SampleStats::from_slice(&values);
    let mut table = Table::new(&[
        "u",
        "a",
        "n_paths",
        "n_tied",
        "n_non_binary",
        "mean",
        "exact",
        "std_error",
        "z_score",
    ]);
    let mut checks = vec![Check::new(
        "supremum quotient is 0 or 1 off ties",
        non_binary == 0,
        format!("{non_binary} non-binary quotients, {tied} tied paths"),
    )];
    z_row(
        &mut table,
        &mut checks,
        "supremum mean".into(),
        vec![
            num(SUPREMUM_U),
            num(SUPREMUM_JUMP),
            p.n_paths.to_string(),
            tied.to_string(),
            non_binary.to_string(),
        ],
        s.mean,
        0.5,
        s.std_error(),
    );
    Ok(report(p, table, checks))
}
