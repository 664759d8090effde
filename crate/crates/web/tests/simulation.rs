use cnlab_web::Simulation;

#[test]
fn taylor_green_vorticity_decays_at_rate_two() {
    let mut sim = Simulation::new(32, "taylor_green_2d", 1.0, 0, 1.0).unwrap();
    // ω = -2 sin x₁ sin x₂ for the unit-amplitude vortex.
    let w0 = sim.vorticity();
    let peak0 = w0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((peak0 - 2.0).abs() < 1e-12);
    sim.advance(0.5, 100).unwrap();
    assert!((sim.time() - 0.5).abs() < 1e-15);
    let peak = sim.vorticity().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((peak - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
}

#[test]
fn rgba_has_four_bytes_per_point() {
    let sim = Simulation::new(16, "random_divfree", 0.5, 3, 1.0).unwrap();
    let rgba = sim.vorticity_rgba();
    assert_eq!(rgba.len(), 16 * 16 * 4);
    assert!(rgba.chunks(4).all(|p| p[3] == 255));
}

#[test]
fn block_spectrum_and_besov_agree() {
    let sim = Simulation::new(32, "taylor_green_2d", 1.0, 0, 1.0).unwrap();
    let blocks = sim.block_norms(false);
    // |k|² = 2 lies in the first sharp block.
    assert_eq!(blocks[0], 0.0);
    assert!((blocks[1] - 1.0).abs() < 1e-12);
    assert!(blocks[2..].iter().all(|&b| b < 1e-12));
    assert!((sim.besov(-1.0, false) - 1.0).abs() < 1e-12);
}

#[test]
fn heat_curve_peaks_at_kato_value() {
    let sim = Simulation::new(16, "taylor_green_2d", 1.0, 0, 1.0).unwrap();
    let curve = sim.heat_curve(1.0).unwrap();
    assert_eq!(curve.len() % 2, 0);
    let peak = curve.chunks(2).map(|p| p[1]).fold(0.0, f64::max);
    let kato = sim.kato(1.0).unwrap();
    // (1 + ‖u‖_2) multiplies the supremum, which golden-section refinement can only raise.
    assert!(kato >= peak);
    assert!(Simulation::new(16, "taylor_green_2d", 1.0, 0, -1.0).is_err());
    assert!(sim.heat_curve(0.0).is_err());
}
