use std::f64::consts::{FRAC_PI_2, PI};

use lentparticle::chaos::{
    bessel_spectrum, covariance_curve, ChaosVector, CompiledChaos, CompiledKernel, ExtendedExponential, SimplexKernel,
    StepFunction,
};
use lentparticle::lent::gradient_chaos;
use lentparticle::paths::{rotate, simulate_brownian, MartingaleKind};
use lentparticle::stats::{par_collect, SampleStats};
use lentparticle::{Result, RngStream};

use super::{factors, report, z_row};
use crate::config::Params;
use crate::report::{num, Check, Report, Table};

const LAGS: [f64; 5] = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, FRAC_PI_2];

fn orders(p: &Params) -> Vec<usize> {
    p.order.map(|n| vec![n]).unwrap_or_else(|| vec![1, 2, 3])
}

/// Ordered-simplex kernel `g_1 ⊗ … ⊗ g_n` cycling through the fixed factors.
fn kernel(n: usize) -> SimplexKernel {
    let fs = factors();
    SimplexKernel::ordered((0..n).map(|i| fs[i % 3].clone()).collect(), 1.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn isometry(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let orders = orders(p);
    let kernels: Vec<SimplexKernel> = orders.iter().map(|&n| kernel(n)).collect();
    let compiled = kernels
        .iter()
        .map(|k| CompiledKernel::new(k, &grid))
        .collect::<Result<Vec<_>>>()?;
    let seed = p.master_seed;
    let drivers = [
        ("brownian", 0.0),
        ("compensated-poisson", FRAC_PI_2),
        ("symmetric-compound", FRAC_PI_2),
        ("rotation", p.theta),
    ];
    let rows = par_collect(p.n_paths, |i| -> Result<Vec<f64>> {
        let b = simulate_brownian(&grid, RngStream::brownian(seed, i));
        let n = MartingaleKind::CompensatedPoisson.simulate(&grid, seed, i);
        let m = MartingaleKind::SymmetricCompound.simulate(&grid, seed, i);
        let y = rotate(&b, &m, p.theta)?;
        let mut out = Vec::with_capacity(4 * compiled.len());
        for path in [&b, &n, &m, &y] {
            for c in &compiled {
                out.push(c.integrate(path)?.powi(2));
            }
        }
        Ok(out)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["driver", "order", "theta", "empirical", "exact", "std_error", "z_score"]);
    let mut checks = Vec::new();
    for (d, (name, theta)) in drivers.iter().enumerate() {
        for (j, (&n, k)) in orders.iter().zip(&kernels).enumerate() {
            let xs: Vec<f64> = rows.iter().map(|r| r[d * kernels.len() + j]).collect();
            let s = SampleStats::from_slice(&xs);
            let exact = factorial(n) * k.square_norm();
            z_row(
                &mut table,
                &mut checks,
                format!("isometry {name} order {n}"),
                vec![name.to_string(), n.to_string(), num(*theta)],
                s.mean,
                exact,
                s.std_error(),
            );
        }
    }
    Ok(report(p, table, checks))
}

pub fn covariance_decay(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let mut table = Table::new(&["order", "phi", "empirical", "exact", "std_error", "z_score"]);
    let mut checks = Vec::new();
    for n in orders(p) {
        let k = kernel(n);
        let norm = factorial(n) * k.square_norm();
        let f = CompiledChaos::new(&ChaosVector::single(k), &grid)?;
        let curve = covariance_curve(
            &f,
            &LAGS,
            p.n_paths,
            p.master_seed,
            MartingaleKind::CompensatedPoisson,
            0.0,
        )?;
        for pt in curve {
            z_row(
                &mut table,
                &mut checks,
                format!("covariance order {n} phi {:.4}", pt.phi),
                vec![n.to_string(), num(pt.phi)],
                pt.mean / norm,
                pt.phi.cos().powi(n as i32),
                pt.std_error / norm,
            );
        }
    }
    Ok(report(p, table, checks))
}

const SERIES_TOL: f64 = 1e-17;
const FOURIER_ANGLES: [f64; 4] = [0.0, PI / 4.0, FRAC_PI_2, PI];

pub fn bessel(p: &Params) -> Result<Report> {
    let norms = p
        .h_norm_sq
        .map(|h| vec![h])
        .unwrap_or_else(|| vec![0.5, 1.0, 4.0, 10.0]);
    let mut table = Table::new(&["h_norm_sq", "n", "c_n_sq"]);
    let mut checks = Vec::new();
    for hn in norms {
        let n_max = 40 + (4.0 * hn).ceil() as i64;
        let r = bessel_spectrum(hn, n_max, SERIES_TOL)?;
        for (n, c) in r.coefficients.iter().enumerate() {
            table.push(vec![num(hn), n.to_string(), num(*c)]);
        }
        let defect = r.parseval_defect();
        checks.push(Check::new(
            format!("parseval h_norm_sq {hn}"),
            defect <= 1e-10,
            format!("|sum c_n^2 - exp(h_norm_sq)| = {defect:e}"),
        ));
        for phi in FOURIER_ANGLES {
            let err = (r.fourier(phi) - (hn * phi.cos()).exp()).abs();
            checks.push(Check::new(
                format!("fourier h_norm_sq {hn} phi {phi:.4}"),
                err <= 1e-8,
                format!("|sum c_n^2 e^(i n phi) - exp(h_norm_sq cos phi)| = {err:e}"),
            ));
        }
    }
    Ok(report(p, table, checks))
}

pub fn exp_vector_covariance(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let hn = p.h_norm_sq.unwrap_or(1.0);
    let h = StepFunction::constant(0.0, 1.0, hn.sqrt())?;
    let f = ExtendedExponential::new(&h, &grid)?;
    let curve = covariance_curve(
        &f,
        &LAGS,
        p.n_paths,
        p.master_seed,
        MartingaleKind::CompensatedPoisson,
        0.0,
    )?;
    let mut table = Table::new(&["phi", "empirical", "exact", "std_error", "z_score"]);
    let mut checks = Vec::new();
    for pt in curve {
        z_row(
            &mut table,
            &mut checks,
            format!("exponential vector phi {:.4}", pt.phi),
            vec![num(pt.phi)],
            pt.mean,
            (hn * pt.phi.cos()).exp(),
            pt.std_error,
        );
    }
    Ok(report(p, table, checks))
}

/// `F = 0.5 + I_1(g_1) + I_2(sym(g_1 ⊗ g_2)) + I_3(g_3^{⊗3}) / 2`.
pub fn energy_functional() -> ChaosVector {
    let [g1, g2, g3] = factors();
    ChaosVector::new(
        0.5,
        vec![
            SimplexKernel::power(&g1, 1, 1.0),
            SimplexKernel::symmetric(vec![g1, g2], 1.0),
            SimplexKernel::power(&g3, 3, 0.5),
        ],
    )
}

pub fn chaos_energy(p: &Params) -> Result<Report> {
    let grid = p.grid();
    let fv = energy_functional();
    let f = CompiledChaos::new(&fv, &grid)?;
    let mut table = Table::new(&["driver", "theta", "empirical", "exact", "std_error", "z_score"]);
    let mut checks = Vec::new();
    for kind in [MartingaleKind::CompensatedPoisson, MartingaleKind::SymmetricCompound] {
        let xs = par_collect(p.n_paths, |i| -> Result<f64> {
            let b = simulate_brownian(&grid, RngStream::brownian(p.master_seed, i));
            let m = kind.simulate(&grid, p.master_seed, i);
            Ok(gradient_chaos(&f, &b, &m, p.theta)?.powi(2))
        });
        let xs = xs.into_iter().collect::<Result<Vec<_>>>()?;
        let s = SampleStats::from_slice(&xs);
        z_row(
            &mut table,
            &mut checks,
            format!("gradient energy {}", kind.name()),
            vec![kind.name().to_string(), num(p.theta)],
            s.mean,
            fv.energy(),
            s.std_error(),
        );
    }
    Ok(report(p, table, checks))
}
