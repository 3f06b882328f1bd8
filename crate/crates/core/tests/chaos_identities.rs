//! Isometry, orthogonality and composition identities on simulated drivers.

use lentparticle::chaos::{ChaosVector, CompiledChaos, CompiledKernel, RotatedFunctional, SimplexKernel, StepFunction};
use lentparticle::lent::{gradient_chaos, sharp_by_contraction};
use lentparticle::mehler::gradient_brownian_rotation;
use lentparticle::paths::{rotate, simulate_brownian, MartingaleKind, PathKind, SamplePath};
use lentparticle::stats::{par_collect, SampleStats};
use lentparticle::{RngStream, TimeGrid};

fn g1() -> StepFunction {
    StepFunction::new(vec![0.0, 0.3, 0.7, 1.0], vec![1.0, -0.8, 0.6]).unwrap()
}

fn g2() -> StepFunction {
    StepFunction::new(vec![0.1, 0.6, 1.0], vec![1.3, 0.4]).unwrap()
}

fn drivers(grid: &TimeGrid, seed: u64, i: u64) -> Vec<(&'static str, SamplePath)> {
    let b = simulate_brownian(grid, RngStream::brownian(seed, i));
    let n = MartingaleKind::CompensatedPoisson.simulate(grid, seed, i);
    let m = MartingaleKind::SymmetricCompound.simulate(grid, seed, i);
    let y = rotate(&b, &m, 0.7).unwrap();
    vec![("B", b), ("N", n), ("M", m), ("Y", y)]
}

#[test]
fn isometry_with_mixed_factors_up_to_order_four() {
    let grid = TimeGrid::unit(200).unwrap();
    let kernels = [
        SimplexKernel::symmetric(vec![g1()], 1.0),
        SimplexKernel::symmetric(vec![g1(), g2()], 1.0),
        SimplexKernel::ordered(vec![g2(), g1(), g1()], 0.8),
        SimplexKernel::symmetric(vec![g1(), g2(), g1(), g2()], 0.5),
    ];
    let compiled: Vec<CompiledKernel> = kernels.iter().map(|k| CompiledKernel::new(k, &grid).unwrap()).collect();
    let rows = par_collect(20_000, |i| {
        drivers(&grid, 31, i)
            .into_iter()
            .flat_map(|(_, d)| {
                compiled
                    .iter()
                    .map(move |c| c.integrate(&d).unwrap().powi(2))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<f64>>()
    });
    for d in 0..4 {
        for (n, k) in kernels.iter().enumerate() {
            let xs: Vec<f64> = rows.iter().map(|r| r[d * 4 + n]).collect();
            let s = SampleStats::from_slice(&xs);
            let nf: f64 = (1..=n + 1).map(|j| j as f64).product();
            let target = nf * k.square_norm();
            assert!(
                (s.mean - target).abs() < 4.0 * s.std_error(),
                "driver {d} order {}: {} vs {target}",
                n + 1,
                s.mean
            );
        }
    }
}

#[test]
fn different_orders_are_orthogonal_across_rotation() {
    let grid = TimeGrid::unit(200).unwrap();
    let f1 = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&g1(), 1, 1.0)), &grid).unwrap();
    let f2 = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&g1(), 2, 1.0)), &grid).unwrap();
    let f3 = CompiledChaos::new(
        &ChaosVector::single(SimplexKernel::symmetric(vec![g1(), g2(), g2()], 1.0)),
        &grid,
    )
    .unwrap();
    let fs = [&f1, &f2, &f3];
    for kind in [MartingaleKind::CompensatedPoisson, MartingaleKind::SymmetricCompound] {
        let rows = par_collect(20_000, |i| {
            let b = simulate_brownian(&grid, RngStream::brownian(32, i));
            let m = kind.simulate(&grid, 32, i);
            let at = |f: &CompiledChaos, th: f64| f.rotated(&b, &m, th).unwrap();
            vec![
                at(fs[0], 0.9) * at(fs[1], 0.2),
                at(fs[1], 0.9) * at(fs[2], 0.2),
                at(fs[0], 0.9) * at(fs[2], 0.2),
            ]
        });
        for j in 0..3 {
            let xs: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let s = SampleStats::from_slice(&xs);
            assert!(s.mean.abs() < 4.0 * s.std_error(), "{kind:?} pair {j}: {}", s.mean);
        }
    }
}

#[test]
fn brownian_copy_gradient_equals_rotation_composition() {
    let grid = TimeGrid::unit(300).unwrap();
    let fv = ChaosVector::new(
        0.1,
        vec![
            SimplexKernel::power(&g1(), 1, 1.0),
            SimplexKernel::power(&g2(), 2, 0.5),
            SimplexKernel::symmetric(vec![g1(), g2(), g1()], 0.25),
        ],
    );
    let f = CompiledChaos::new(&fv, &grid).unwrap();
    for i in 0..20 {
        let b = simulate_brownian(&grid, RngStream::brownian(33, i));
        let hat = MartingaleKind::Brownian.simulate(&grid, 33, i);
        let via_chaos = gradient_chaos(&f, &b, &hat, 1e-3).unwrap();
        let via_composition = gradient_brownian_rotation(&f, &b, &hat, 1e-3).unwrap();
        assert!((via_chaos - via_composition).abs() < 1e-9 * via_chaos.abs().max(1.0));
        let exact = sharp_by_contraction(&f, &b, &hat).unwrap();
        assert!((via_chaos - exact).abs() < 1e-4 * exact.abs().max(1.0));
    }
}

/// `F = (∫h dB)²` read as a chaos vs. composed with the rotated path.
fn composition_gap(grid: &TimeGrid, b: &SamplePath, m: &SamplePath, theta: f64) -> f64 {
    let h = g1();
    let f = CompiledChaos::new(
        &ChaosVector::new(h.square_norm(), vec![SimplexKernel::power(&h, 2, 1.0)]),
        grid,
    )
    .unwrap();
    let linear = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&h, 1, 1.0)), grid).unwrap();
    let y = rotate(b, m, theta).unwrap();
    f.rotated(b, m, theta).unwrap() - linear.evaluate(&y).unwrap().powi(2)
}

#[test]
fn composition_holds_for_brownian_copy_but_not_poisson() {
    let grid = TimeGrid::unit(4000).unwrap();
    let h = g1();
    let hv = h.on_grid(&grid);
    let mut brownian_gap: f64 = 0.0;
    let mut poisson_checked = 0;
    for i in 0..20 {
        let b = simulate_brownian(&grid, RngStream::brownian(34, i));
        let hat = MartingaleKind::Brownian.simulate(&grid, 34, i);
        brownian_gap = brownian_gap.max(composition_gap(&grid, &b, &hat, std::f64::consts::FRAC_PI_2).abs());
        let n = MartingaleKind::CompensatedPoisson.simulate(&grid, 34, i);
        if n.jumps.is_empty() {
            continue;
        }
        // ‖h‖² − Σ h² (ΔÑ)²: the gap is ∫h² dt − ∫h² dN up to O(dt)
        let gap = composition_gap(&grid, &b, &n, std::f64::consts::FRAC_PI_2);
        let expected: f64 = h.square_norm() - hv.iter().zip(&n.increments).map(|(a, d)| a * a * d * d).sum::<f64>();
        assert!((gap - expected).abs() < 1e-9);
        let jump_part: f64 = n.jumps.iter().map(|j| hv[j.step - 1].powi(2)).sum();
        assert!((gap - (h.square_norm() - jump_part)).abs() < 0.05);
        if jump_part > 0.1 {
            poisson_checked += 1;
            assert!(gap.abs() > 0.01 || (h.square_norm() - jump_part).abs() < 0.05);
        }
    }
    assert!(brownian_gap < 0.2, "{brownian_gap}");
    assert!(poisson_checked > 3);
}

#[test]
fn jump_drivers_give_the_same_gradient_energy() {
    let grid = TimeGrid::unit(400).unwrap();
    let fv = ChaosVector::new(
        0.0,
        vec![
            SimplexKernel::power(&g1(), 1, 1.0),
            SimplexKernel::power(&g2(), 2, 0.5),
            SimplexKernel::power(&g1(), 3, 1.0 / 6.0),
        ],
    );
    let f = CompiledChaos::new(&fv, &grid).unwrap();
    let mut moments = Vec::new();
    for kind in [MartingaleKind::CompensatedPoisson, MartingaleKind::SymmetricCompound] {
        let xs = par_collect(20_000, |i| {
            let b = simulate_brownian(&grid, RngStream::brownian(35, i));
            let m = kind.simulate(&grid, 35, i);
            gradient_chaos(&f, &b, &m, 1e-3).unwrap().powi(2)
        });
        moments.push(SampleStats::from_slice(&xs));
    }
    let (a, b) = (&moments[0], &moments[1]);
    let combined = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() < 4.0 * combined, "{} vs {}", a.mean, b.mean);
    assert!((a.mean - fv.energy()).abs() < 4.0 * a.std_error());
}

#[test]
fn rotation_kind_is_recorded() {
    let grid = TimeGrid::unit(10).unwrap();
    let d = drivers(&grid, 1, 0);
    assert_eq!(d[3].1.kind, PathKind::Rotation);
}
