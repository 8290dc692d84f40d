use csvortex::analysis::{
    ball_masses, check_concentration, check_rescaling, check_smallness, epsilon_sweep, CONCENTRATION_RADIUS,
};
use csvortex::geometry::{background_fields, TorusGrid, VortexSet};
use csvortex::radial::{solve_radial, RadialOptions};
use csvortex::torus::MonotoneOptions;
use csvortex::Error;

fn grid(n: usize) -> TorusGrid {
    TorusGrid::square(2.0, n, 0.2).unwrap()
}

#[test]
fn recorded_means_match_direct_quadrature() {
    let g = grid(64);
    let set = VortexSet::shared([0.7, 1.1], [1, 1]);
    let sweep = epsilon_sweep(&g, &set, &[0.2, 0.15], 0.2, &MonotoneOptions::default()).unwrap();
    // discrete background, independent of the continuum one used by the solver
    let bg = background_fields(&g, &set);
    for e in &sweep.entries {
        let (pair, report) = (e.pair.as_ref().unwrap(), e.report.as_ref().unwrap());
        for i in 0..2 {
            let direct = (g.integrate(&pair.u[i]) + g.integrate(&bg[i])) / g.area();
            assert!((report.means[i] - direct).abs() <= 1e-12, "{} vs {direct}", report.means[i]);
        }
    }
}

#[test]
fn malformed_ladders_are_rejected() {
    let g = grid(16);
    let set = VortexSet::empty();
    let opts = MonotoneOptions::default();
    assert!(epsilon_sweep(&g, &set, &[], 0.2, &opts).is_err());
    assert!(epsilon_sweep(&g, &set, &[0.1, 0.2], 0.2, &opts).is_err());
    assert!(epsilon_sweep(&g, &set, &[0.1, 0.1], 0.2, &opts).is_err());
}

#[test]
fn one_sided_vortex_concentrates_only_its_own_source() {
    let sweep = epsilon_sweep(&grid(128), &VortexSet::shared([1.0, 1.0], [1, 0]), &[0.2, 0.1, 0.05], 0.2, &MonotoneOptions::default())
        .unwrap();
    let checks = check_concentration(&sweep, CONCENTRATION_RADIUS).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.summary_line()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    let last = sweep.entries.last().unwrap();
    let m = ball_masses(&sweep.grid, last.full.as_ref().unwrap(), 0.05, [1.0, 1.0], CONCENTRATION_RADIUS);
    assert!(m[1].abs() < 1e-2 && m[2].abs() < 1e-2, "{m:?}");
}

#[test]
fn empty_configuration_passes_vacuously() {
    let g = grid(32);
    let sweep = epsilon_sweep(&g, &VortexSet::empty(), &[0.2, 0.1, 0.05], 0.2, &MonotoneOptions::default()).unwrap();
    let full = sweep.entries[2].full.as_ref().unwrap();
    assert_eq!(ball_masses(&g, full, 0.05, [0.3, 0.4], 0.5), [0.0; 3]);
    let smallness = check_smallness(&sweep, 0.2).unwrap();
    assert!(smallness.iter().all(|c| c.pass));
    assert!(check_concentration(&sweep, 0.5).unwrap().is_empty());

    let zero = solve_radial([0, 0], 20.0, 200, &RadialOptions::default()).unwrap();
    let rescaled = check_rescaling(&sweep, &zero, [0.3, 0.4], 0.25).unwrap();
    // m is identically zero, so strict decrease fails but the final bound holds
    assert_eq!(rescaled[0].measured, vec![0.0, 0.0]);
    assert!(rescaled[1].pass);
}

#[test]
fn short_ladder_and_mismatched_radial_base_are_errors() {
    let g = grid(64);
    let set = VortexSet::shared([1.0, 1.0], [1, 1]);
    let sweep = epsilon_sweep(&g, &set, &[0.2, 0.15], 0.2, &MonotoneOptions::default()).unwrap();
    let short = check_smallness(&sweep, 0.2);
    assert!(matches!(short, Err(Error::LadderTooShort { len: 2, need: 3 })), "{short:?}");
    let zero = solve_radial([0, 0], 20.0, 200, &RadialOptions::default()).unwrap();
    assert!(matches!(check_rescaling(&sweep, &zero, [1.0, 1.0], 0.25), Err(Error::VortexMismatch { .. })));
}
