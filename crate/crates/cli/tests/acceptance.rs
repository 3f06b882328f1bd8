//! Acceptance suite: every criterion at full size, with thresholds re-derived
//! from the returned table rows. One PASS/FAIL line per criterion goes to stderr.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use lentparticle::paths::MartingaleKind;
use lentparticle_cli::report::Table;
use lentparticle_cli::{find, run_experiment, Report};

fn full(name: &str) -> Report {
    let p = find(name).expect("registered").defaults();
    let r = run_experiment(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert_eq!(r.params, p);
    r
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.numbers(name)
}

fn text(t: &Table, name: &str) -> Vec<String> {
    let i = t.column(name).expect("column");
    t.rows.iter().map(|r| r[i].clone()).collect()
}

/// Every row within `k` standard errors of its `exact` column.
fn within(t: &Table, est: &str, exact: &str, se: &str, k: f64) -> (bool, f64) {
    let (e, x, s) = (col(t, est), col(t, exact), col(t, se));
    let worst = e
        .iter()
        .zip(&x)
        .zip(&s)
        .map(|((e, x), s)| (e - x).abs() / s)
        .fold(0.0, f64::max);
    (worst <= k && !e.is_empty(), worst)
}

struct Outcome {
    criterion: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn isometry() -> (bool, String) {
    let r = full("isometry");
    let t = &r.table;
    let drivers = text(t, "driver");
    let all_drivers = ["brownian", "compensated-poisson", "symmetric-compound", "rotation"]
        .iter()
        .all(|d| drivers.iter().filter(|x| x == d).count() == 3);
    let theta_ok = text(t, "driver")
        .iter()
        .zip(col(t, "theta"))
        .all(|(d, th)| d != "rotation" || th == 0.7);
    let (ok, worst) = within(t, "empirical", "exact", "std_error", 4.0);
    (
        ok && all_drivers
            && theta_ok
            && t.rows.len() == 12
            && r.params.grid_steps == 1000
            && r.params.n_paths == 100_000,
        format!("12 cells, worst |z| = {worst:.3}"),
    )
}

fn covariance_decay() -> (bool, String) {
    let r = full("covariance-decay");
    let t = &r.table;
    let exact_ok = col(t, "order")
        .iter()
        .zip(col(t, "phi"))
        .zip(col(t, "exact"))
        .all(|((n, phi), x)| (phi.cos().powi(*n as i32) - x).abs() < 1e-15);
    let lags: Vec<f64> = col(t, "phi")[..5].to_vec();
    let lags_ok = lags
        .iter()
        .zip([0.0, PI / 6.0, PI / 4.0, PI / 3.0, FRAC_PI_2])
        .all(|(a, b)| (a - b).abs() < 1e-15);
    let (ok, worst) = within(t, "empirical", "exact", "std_error", 4.0);
    (
        ok && exact_ok && lags_ok && t.rows.len() == 15,
        format!("15 cells, worst |z| = {worst:.3}"),
    )
}

fn bessel() -> (bool, String) {
    let r = full("bessel");
    let t = &r.table;
    let (hs, cs) = (col(t, "h_norm_sq"), col(t, "c_n_sq"));
    let n = col(t, "n");
    let mut worst_mass = 0.0f64;
    let mut worst_fourier = 0.0f64;
    let mut seen = Vec::new();
    for h in [0.5, 1.0, 4.0, 10.0] {
        let terms: Vec<(f64, f64)> = hs
            .iter()
            .zip(&n)
            .zip(&cs)
            .filter(|((x, _), _)| **x == h)
            .map(|((_, n), c)| (*n, *c))
            .collect();
        seen.push(!terms.is_empty());
        // rows hold n >= 0 and c_{-n}^2 = c_n^2; sum smallest terms first
        let weight = |n: f64| if n == 0.0 { 1.0 } else { 2.0 };
        let mass: f64 = terms.iter().rev().map(|(n, c)| weight(*n) * c).sum();
        worst_mass = worst_mass.max((mass - h.exp()).abs());
        for phi in [0.0, PI / 4.0, FRAC_PI_2, PI] {
            let f: f64 = terms.iter().rev().map(|(n, c)| weight(*n) * c * (n * phi).cos()).sum();
            worst_fourier = worst_fourier.max((f - (h * phi.cos()).exp()).abs());
        }
    }
    (
        seen.iter().all(|x| *x) && worst_mass <= 1e-10 && worst_fourier <= 1e-8,
        format!("mass defect {worst_mass:e}, Fourier defect {worst_fourier:e}"),
    )
}

fn exp_vector() -> (bool, String) {
    let r = full("exp-vector-covariance");
    let t = &r.table;
    let exact_ok = col(t, "phi")
        .iter()
        .zip(col(t, "exact"))
        .all(|(phi, x)| (phi.cos().exp() - x).abs() < 1e-14);
    let (ok, worst) = within(t, "empirical", "exact", "std_error", 4.0);
    (
        ok && exact_ok && t.rows.len() == 5 && r.params.h_norm_sq == Some(1.0),
        format!("5 angles, worst |z| = {worst:.3}"),
    )
}

/// `∫_0^1 f g` for step functions with breakpoints on multiples of 0.1.
fn inner(f: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64) -> f64 {
    (0..10).map(|i| 0.05 + 0.1 * i as f64).map(|s| f(s) * g(s) * 0.1).sum()
}

fn chaos_energy() -> (bool, String) {
    let g1 = |s: f64| {
        if s < 0.3 {
            1.0
        } else if s < 0.7 {
            -0.8
        } else {
            0.6
        }
    };
    let g2 = |s: f64| {
        if s < 0.1 {
            0.0
        } else if s < 0.6 {
            1.3
        } else {
            0.4
        }
    };
    let g3 = |s: f64| if s < 0.5 { 0.5 } else { 1.1 };
    let (a, b, c) = (inner(&g1, &g1), inner(&g2, &g2), inner(&g1, &g2));
    // sum n n! |f_n|^2 with |sym(g1 ⊗ g2)|^2 = (ab + c^2)/2 and |g3^{⊗3}/2|^2 = |g3|^6/4
    let energy = a + 4.0 * (a * b + c * c) / 2.0 + 18.0 * inner(&g3, &g3).powi(3) / 4.0;
    let r = full("chaos-energy");
    let t = &r.table;
    let exact_ok = col(t, "exact").iter().all(|x| (x - energy).abs() < 1e-12 * energy);
    let drivers = text(t, "driver");
    let (ok, worst) = within(t, "empirical", "exact", "std_error", 4.0);
    (
        ok && exact_ok && drivers == ["compensated-poisson", "symmetric-compound"] && r.params.theta == 1e-3,
        format!("target {energy:.6}, worst |z| = {worst:.3}"),
    )
}

/// Shares and exactness on the SDE tables.
///
/// For `dX = σ dB + b̄X dt` the Euler derivative is `σ (1 + b̄ dt)^{j - k}`
/// on every path, with `k`, `j` the grid indices of `u` and `t`.
fn sde_table(r: &Report, cells: usize) -> (bool, String) {
    let t = &r.table;
    let p = &r.params;
    let dt = p.horizon / p.grid_steps as f64;
    let lo = p.sigma;
    let hi = p.sigma * (1.0 + p.b * dt).powi(p.grid_steps as i32);
    let us = text(t, "u");
    let ts = col(t, "t");
    let additive_oracle = |row: usize| -> Option<f64> {
        let u: f64 = us[row].parse().ok()?;
        let steps = ((ts[row] - u) / dt).round() as i32;
        Some(p.sigma * (1.0 + p.b * dt).powi(steps))
    };
    let mut ok = t.rows.len() == cells;
    let mut worst_share = 1.0f64;
    let mut worst_additive = 0.0f64;
    for (row, ((sde, share), (rel, oracle))) in text(t, "sde")
        .iter()
        .zip(col(t, "frac_within_tol"))
        .zip(col(t, "rel_err").into_iter().zip(col(t, "oracle")))
        .enumerate()
    {
        if sde == "additive" {
            ok &= match additive_oracle(row) {
                Some(exact) => (oracle - exact).abs() <= 1e-12,
                // perturbation at the path's own jump time: a mean of values in [σ, σ(1 + b̄ dt)^n]
                None => lo - 1e-12 <= oracle && oracle <= hi + 1e-12,
            };
            let gap = rel * (oracle.abs() + 1e-8);
            worst_additive = worst_additive.max(gap);
            ok &= gap <= 1e-10;
        } else {
            worst_share = worst_share.min(share);
            ok &= share >= 0.99;
        }
    }
    ok &= !r.blew_up();
    (
        ok,
        format!("worst share within 1e-2: {worst_share:.4}, additive max gap {worst_additive:e}"),
    )
}

fn sde() -> (bool, String) {
    let r = full("sde-lent-particle");
    let specs = text(&r.table, "sde");
    let all = ["gbm", "additive", "sine-diffusion"]
        .iter()
        .all(|s| specs.iter().filter(|x| x == s).count() == 25);
    let p = &r.params;
    let (ok, detail) = sde_table(&r, 75);
    (
        ok && all && p.n_paths == 1000 && p.theta == 1e-4 && p.grid_steps == 10_000,
        detail,
    )
}

fn sde_poisson() -> (bool, String) {
    let r = full("sde-poisson-lent-particle");
    let (ok, detail) = sde_table(&r, 15);
    // single-jump frequency recounted from the same martingale streams
    let p = &r.params;
    let grid = p.grid();
    let singles = (0..p.n_paths as u64)
        .filter(|&i| {
            MartingaleKind::SymmetricCompound
                .simulate(&grid, p.master_seed, i)
                .jumps
                .len()
                == 1
        })
        .count();
    let freq = singles as f64 / p.n_paths as f64;
    let target = (-1.0f64).exp();
    let se = (target * (1.0 - target) / p.n_paths as f64).sqrt();
    let freq_ok = (freq - target).abs() <= 4.0 * se;
    (
        ok && freq_ok && r.passed(),
        format!("{detail}; single-jump frequency {freq:.5} vs {target:.5} (se {se:.5})"),
    )
}

fn ibp() -> (bool, String) {
    let r = full("integration-by-parts");
    let (ok, worst) = within(&r.table, "lhs", "rhs", "pooled_std_error", 4.0);
    (
        ok && r.table.rows.len() == 3 && r.params.n_paths == 100_000,
        format!("3 pairs, worst |z| = {worst:.3}"),
    )
}

fn mehler() -> (bool, String) {
    let r = full("mehler");
    let t = &r.table;
    let q = text(t, "quantity");
    let row = |name: &str| {
        let i = q.iter().position(|x| x == name).unwrap_or_else(|| panic!("{name}"));
        (
            col(t, "estimate")[i],
            col(t, "reference")[i],
            col(t, "std_error")[i],
            col(t, "z_score")[i],
        )
    };
    let (g, _, g_se, _) = row("gamma_b1");
    let gamma_ok = (g - 1.0).abs() <= 4.0 * g_se;
    let (_, _, _, z1) = row("eigen_order_1");
    let (_, _, _, z2) = row("eigen_order_2");
    let eigen_ok = z1 <= 5.0 && z2 <= 5.0;
    let brackets = q.iter().filter(|x| *x == "bracket").count() == 3;
    let (ex, _, _, _) = row("bracket_extrapolated");
    let (rot, _, rot_se, _) = row("gamma_rotation");
    let limit_ok = (ex - rot).abs() <= 3.0 * rot_se;
    (
        gamma_ok && eigen_ok && brackets && limit_ok,
        format!(
            "gamma[B_1] {g:.5} (se {g_se:.5}); pathwise |z| {z1:.2}, {z2:.2}; bracket limit {ex:.5} vs {rot:.5} (se {rot_se:.5})"
        ),
    )
}

fn supremum() -> (bool, String) {
    let r = full("supremum");
    let t = &r.table;
    let non_binary = col(t, "n_non_binary")[0];
    let (ok, worst) = within(t, "mean", "exact", "std_error", 4.0);
    (
        ok && non_binary == 0.0 && col(t, "exact")[0] == 0.5 && col(t, "u")[0] == 0.5,
        format!("{non_binary} non-binary quotients, |z| = {worst:.3}"),
    )
}

fn reproducibility() -> (bool, String) {
    let a = full("reproducibility");
    let b = full("reproducibility");
    let t = &a.table;
    let flags_ok = text(t, "rerun_identical")
        .iter()
        .chain(&text(t, "workers_1_vs_8_identical"))
        .all(|x| x == "true");
    let identical = a.csv_bytes() == b.csv_bytes() && a.json_bytes() == b.json_bytes();
    (
        flags_ok && identical && t.rows.len() == 10,
        format!("{} experiments compared at 1 and 8 workers", t.rows.len()),
    )
}

#[test]
fn acceptance_criteria() {
    type Criterion = fn() -> (bool, String);
    let criteria: [(&str, Criterion); 11] = [
        ("isometry", isometry),
        ("covariance decay", covariance_decay),
        ("spectral weights", bessel),
        ("exponential vector covariance", exp_vector),
        ("finite chaos energy", chaos_energy),
        ("SDE lent particle vs flow", sde),
        ("SDE Poisson route vs flow", sde_poisson),
        ("integration by parts", ibp),
        ("Mehler suite", mehler),
        ("supremum", supremum),
        ("reproducibility", reproducibility),
    ];
    let outcomes: Vec<Outcome> = criteria
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let (passed, detail) = f();
            let o = Outcome {
                criterion: i + 1,
                name,
                passed,
                detail,
            };
            // written to stderr directly so the line survives test output capture
            let _ = writeln!(
                std::io::stderr(),
                "{} criterion {:>2} {}: {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.criterion,
                o.name,
                o.detail
            );
            o
        })
        .collect();
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.criterion).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
