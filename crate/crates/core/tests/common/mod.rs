//! Shared helpers for the integration and acceptance targets.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use qwalk_core::classical::evolve_classical;
use qwalk_core::decoherence::{exact_step, mc_distribution, DensityOperator, KrausFamily};
use qwalk_core::rng::substream;
use qwalk_core::siy::{coin_marginal_and_jump_law, segment_kernel, siy_estimate, SiySamples};
use qwalk_core::{build_coin, position_distribution, step_pure, Distribution, InitialState, MeasurementFamily, PureState, WalkParams};

/// One randomly drawn configuration of the walk.
#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub params: WalkParams,
    pub init: InitialState,
    pub basis_coin: u8,
}

pub fn fuzz_case(seed: u64, index: u64) -> FuzzCase {
    let mut rng = substream(seed, "fuzz", index);
    let lambda = rng.random_range(0.0..2.5);
    let zeta = rng.random_range(0.0..2.5);
    // exercise the endpoints of p as well as the interior
    let p = match rng.random_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.0..1.0),
    };
    let horizon = rng.random_range(1..=14);
    let family = MeasurementFamily::ALL[rng.random_range(0..3)];
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    let init = InitialState::new(Complex64::new(raw[0], raw[1]) / norm, Complex64::new(raw[2], raw[3]) / norm)
        .unwrap_or_else(|_| InitialState::symmetric());
    FuzzCase {
        params: WalkParams::new(lambda, zeta, p, horizon).unwrap().with_family(family),
        init,
        basis_coin: rng.random_range(1..=2),
    }
}

fn check_distribution(name: &str, d: &Distribution, failures: &mut Vec<String>) {
    if (d.total_mass() - 1.0).abs() > 1e-9 {
        failures.push(format!("{name}: mass {}", d.total_mass()));
    }
    if !d.respects_parity(0.0) {
        failures.push(format!("{name}: mass off the parity lattice"));
    }
}

/// Every invariant of the suite on one configuration. Returns the violations.
pub fn check_invariants(case: &FuzzCase, seed: u64) -> Vec<String> {
    let mut failures = Vec::new();
    let params = &case.params;
    let t = params.horizon;

    for n in 1..=t {
        let defect = build_coin(n, params.lambda, params.zeta).unitarity_defect();
        if defect > 1e-12 {
            failures.push(format!("coin {n}: unitarity defect {defect}"));
        }
    }

    let mut state = PureState::new(&case.init);
    for n in 1..=t {
        state = step_pure(&state, n, params).unwrap();
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > 1e-10 {
            failures.push(format!("pure step {n}: norm drift {drift}"));
        }
    }
    check_distribution("pure", &position_distribution(&state).unwrap(), &mut failures);

    let kraus = KrausFamily::from_params(params);
    let mut rho = DensityOperator::from_initial(&case.init);
    for n in 1..=t {
        rho = exact_step(&rho, n, &kraus, params).unwrap();
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            failures.push(format!("density step {n}: trace {trace}"));
        }
        if rho.hermiticity_defect() > 1e-10 {
            failures.push(format!("density step {n}: hermiticity {}", rho.hermiticity_defect()));
        }
    }
    if !rho.is_positive_semidefinite(1e-8) {
        failures.push("density: not positive semidefinite".into());
    }
    check_distribution("exact", &rho.position_distribution().unwrap(), &mut failures);

    let start = (seed as usize + t) % t;
    let kernel = segment_kernel(start, t, params).unwrap();
    let (marginal, _) = coin_marginal_and_jump_law(&kernel);
    for (i, row) in marginal.row_sums().into_iter().enumerate() {
        if (row - 1.0).abs() > 1e-10 {
            failures.push(format!("coin marginal ({start}, {t}] row {i}: sum {row}"));
        }
    }

    let (classical, _) = evolve_classical(case.init.coin_weights(), params).unwrap();
    check_distribution("classical", &classical, &mut failures);
    let mc = mc_distribution(&case.init, &kraus, params, 200, seed).unwrap();
    check_distribution("trajectory", &mc, &mut failures);
    if params.decoherence > 0.0 && params.measurement_family == MeasurementFamily::Total {
        let samples = SiySamples { n_sigma: 3, n_i: 5, n_y: 7 };
        let siy = siy_estimate(&InitialState::basis(case.basis_coin), params, samples, seed).unwrap();
        check_distribution("siy", &siy, &mut failures);
    }
    failures
}
