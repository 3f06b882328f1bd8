//! One function per named experiment. Each returns the full report in
//! memory; nothing here touches the filesystem.

mod chaos;
mod duality;
mod ou;
mod repro;
mod sde;

use lentparticle::chaos::StepFunction;
use lentparticle::stats::z_score;
use lentparticle::Result;

use crate::config::Params;
use crate::report::{num, Check, Report, Table};

pub fn run_experiment(p: &Params) -> Result<Report> {
    match p.experiment.as_str() {
        "isometry" => chaos::isometry(p),
        "covariance-decay" => chaos::covariance_decay(p),
        "bessel" => chaos::bessel(p),
        "exp-vector-covariance" => chaos::exp_vector_covariance(p),
        "chaos-energy" => chaos::chaos_energy(p),
        "sde-lent-particle" => sde::sde_lent_particle(p),
        "sde-poisson-lent-particle" => sde::sde_poisson_lent_particle(p),
        "integration-by-parts" => duality::integration_by_parts(p),
        "mehler" => ou::mehler(p),
        "supremum" => duality::supremum(p),
        "reproducibility" => repro::reproducibility(p),
        other => Err(lentparticle::Error::Config(format!("unknown experiment '{other}'"))),
    }
}

/// Step functions on `[0, 1]` used as kernel factors.
pub(crate) fn factors() -> [StepFunction; 3] {
    [
        StepFunction::new(vec![0.0, 0.3, 0.7, 1.0], vec![1.0, -0.8, 0.6]).expect("valid"),
        StepFunction::new(vec![0.1, 0.6, 1.0], vec![1.3, 0.4]).expect("valid"),
        StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.5, 1.1]).expect("valid"),
    ]
}

/// A row `(…, empirical, exact, std_error, z_score)` and its 4-SE check.
pub(crate) fn z_row(
    table: &mut Table,
    checks: &mut Vec<Check>,
    label: String,
    mut lead: Vec<String>,
    empirical: f64,
    exact: f64,
    se: f64,
) {
    let z = z_score(empirical, exact, se);
    lead.extend([num(empirical), num(exact), num(se), num(z)]);
    table.push(lead);
    checks.push(Check::new(
        label,
        (empirical - exact).abs() <= 4.0 * se,
        format!("empirical {empirical:.6} vs exact {exact:.6}, z = {z:.3}"),
    ));
}

pub(crate) fn report(p: &Params, table: Table, checks: Vec<Check>) -> Report {
    Report {
        params: p.clone(),
        table,
        checks,
        excluded_paths: 0,
        attempted_paths: 0,
    }
}
