use lentparticle::chaos::{ChaosVector, CompiledChaos, SimplexKernel, StepFunction};
use lentparticle::mehler::{carre_du_champ, extrapolate_gamma, mehler_semigroup, semigroup_limit_gamma, InnerStreams};
use lentparticle::paths::simulate_brownian;
use lentparticle::stats::{par_collect, SampleStats};
use lentparticle::{Result, RngStream};

use super::report;
use crate::config::Params;
use crate::report::{num, Check, Report, Table};

const EIGEN_TIME: f64 = 0.5;
const BRACKET_TIMES: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Pathwise bound on `|P_t I_n − e^{-nt/2} I_n|` in inner standard errors.
const PATHWISE_Z: f64 = 5.0;

/// Inner streams for the second, independent inner sample of each outer path.
const SECOND_INNER: u64 = 0x5345_434f_4e44;

fn h() -> StepFunction {
    StepFunction::new(vec![0.0, 0.3, 1.0], vec![1.2, 0.7]).expect("valid")
}

struct Outer {
    gamma_b1: f64,
    eigen: [(f64, f64, f64); 2],
    bracket: [f64; 3],
    extrapolated: f64,
    gamma_f: f64,
}

pub fn mehler(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let one = StepFunction::indicator(0.0, 1.0)?;
    let b1 = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&one, 1, 1.0)), &grid)?;
    let pure: Vec<CompiledChaos> = (1..=2)
        .map(|n| CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&h(), n, 1.0)), &grid))
        .collect::<Result<_>>()?;
    // F = I_1(h) + I_2(h ⊗ h) / 2
    let f = CompiledChaos::new(
        &ChaosVector::new(
            0.0,
            vec![SimplexKernel::power(&h(), 1, 1.0), SimplexKernel::power(&h(), 2, 0.5)],
        ),
        &grid,
    )?;
    let count = p.inner_paths;
    let rows = par_collect(p.n_paths, |i| -> Result<Outer> {
        let b = simulate_brownian(&grid, RngStream::brownian(p.master_seed, i));
        let inner = InnerStreams {
            master_seed: p.master_seed,
            outer: i,
            count,
        };
        let gamma_b1 = carre_du_champ(&b1, &b, inner, p.theta)?.mean;
        let mut eigen = [(0.0, 0.0, 0.0); 2];
        for (n, (e, g)) in eigen.iter_mut().zip(&pure).enumerate() {
            let avg = mehler_semigroup(g, &b, EIGEN_TIME, inner)?;
            let target = (-((n + 1) as f64) * EIGEN_TIME / 2.0).exp() * g.evaluate(&b)?;
            *e = (avg.mean, target, avg.std_error);
        }
        let second = InnerStreams {
            master_seed: p.master_seed ^ SECOND_INNER,
            outer: i,
            count,
        };
        let br = semigroup_limit_gamma(&f, &b, &BRACKET_TIMES, second)?;
        Ok(Outer {
            gamma_b1,
            eigen,
            bracket: [br[0], br[1], br[2]],
            extrapolated: extrapolate_gamma(&BRACKET_TIMES, &br)?,
            gamma_f: carre_du_champ(&f, &b, second, p.theta)?.mean,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&["quantity", "t", "estimate", "reference", "std_error", "z_score"]);
    let mut checks = Vec::new();
    let stat = |g: &dyn Fn(&Outer) -> f64| SampleStats::from_slice(&rows.iter().map(g).collect::<Vec<_>>());

    let g1 = stat(&|r| r.gamma_b1);
    let z = (g1.mean - 1.0) / g1.std_error();
    table.push(vec![
        "gamma_b1".into(),
        "0".into(),
        num(g1.mean),
        num(1.0),
        num(g1.std_error()),
        num(z),
    ]);
    checks.push(Check::new(
        "carre du champ of B_1",
        z.abs() <= 4.0,
        format!("{:.6} vs 1, se {:.6}", g1.mean, g1.std_error()),
    ));

    for n in 0..2 {
        let zs: Vec<f64> = rows
            .iter()
            .map(|r| {
                let (m, t, se) = r.eigen[n];
                lentparticle::stats::z_score(m, t, se)
            })
            .collect();
        let worst = zs.iter().fold(0.0f64, |a, z| a.max(z.abs()));
        let est = stat(&|r| r.eigen[n].0);
        let target = stat(&|r| r.eigen[n].1);
        table.push(vec![
            format!("eigen_order_{}", n + 1),
            num(EIGEN_TIME),
            num(est.mean),
            num(target.mean),
            num(est.std_error()),
            num(worst),
        ]);
        checks.push(Check::new(
            format!("semigroup eigenvalue order {}", n + 1),
            worst <= PATHWISE_Z,
            format!("largest pathwise |z| = {worst:.3} over {} outer paths", rows.len()),
        ));
    }

    let gamma = stat(&|r| r.gamma_f);
    let se = gamma.std_error();
    for (k, &t) in BRACKET_TIMES.iter().enumerate() {
        let s = stat(&|r| r.bracket[k]);
        table.push(vec![
            "bracket".into(),
            num(t),
            num(s.mean),
            num(gamma.mean),
            num(s.std_error()),
            num((s.mean - gamma.mean) / se),
        ]);
    }
    let ex = stat(&|r| r.extrapolated);
    let z = (ex.mean - gamma.mean) / se;
    table.push(vec![
        "bracket_extrapolated".into(),
        "0".into(),
        num(ex.mean),
        num(gamma.mean),
        num(ex.std_error()),
        num(z),
    ]);
    table.push(vec![
        "gamma_rotation".into(),
        "0".into(),
        num(gamma.mean),
        num(gamma.mean),
        num(se),
        num(0.0),
    ]);
    checks.push(Check::new(
        "extrapolated bracket vs rotation gradient",
        z.abs() <= 3.0,
        format!("{:.6} vs {:.6}, se {:.6}", ex.mean, gamma.mean, se),
    ));
    Ok(report(p, table, checks))
}
