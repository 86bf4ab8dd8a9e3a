//! The model spectrum against the finite-difference operator.

use std::f64::consts::{SQRT_2, TAU};

use revivalkit::direct_spectrum::{discretize, spectrum_between, Parity, Stencil, WindowOptions};
use revivalkit::dynamics::{detect_peaks, exact_return, level_return, uniform_grid, PhaseData};
use revivalkit::model_spectrum::{Family, ModelOptions, SpectralModel};
use revivalkit::potential::canonical_double_well;
use revivalkit::wavepacket::{Packet, PacketSpec};

#[test]
fn return_peaks_agree_between_backends() {
    let h = 1e-4;
    let v = canonical_double_well();
    let spec = PacketSpec::revival_defaults(h, 0.0).unwrap();
    let bound = 1.2 * TAU * SQRT_2 / h.ln().abs() * spec.radius() as f64 + 1.0;
    let opts = ModelOptions {
        lambda_bound: bound,
        ..ModelOptions::default()
    };
    let model = SpectralModel::new(&v, h, opts).unwrap();
    let window = model.solve_families().unwrap();
    let packet = Packet::from_window(&spec, &window, 1.0).unwrap();
    let center = packet.alpha.as_ref().unwrap().center;
    let phase = PhaseData::from_model(&model, &window, Family::Alpha, center).unwrap();
    let grid = uniform_grid(phase.t_hyp(), 3.5 * phase.t_hyp().abs(), 64);
    let c_model: Vec<f64> = exact_return(&window, &packet, &grid).unwrap().iter().map(|z| z.norm()).collect();

    let top = bound * h;
    let dx = h / (10.0 * (2.0 * (top + 0.25)).sqrt());
    let op = discretize(&v, h, 1.6, dx, Stencil::Fourth).unwrap();
    let direct = spectrum_between(&op, -top, top, true, WindowOptions { samples: 0 }).unwrap();
    let even: Vec<f64> = direct.parity_class(Parity::Even).iter().map(|e| e / h).collect();
    let c_direct: Vec<f64> = level_return(&even, &spec, &grid).unwrap().iter().map(|z| z.norm()).collect();

    assert!(c_model.iter().chain(&c_direct).all(|c| *c <= 1.0 + 1e-12));
    let pm = detect_peaks(&grid, &c_model, 0.3).unwrap();
    let pd = detect_peaks(&grid, &c_direct, 0.3).unwrap();
    assert!(pm.times.len() >= 3, "{:?}", pm.times);
    for t in &pm.times[..3] {
        let nearest = pd.times.iter().map(|s| (s - t).abs()).fold(f64::MAX, f64::min);
        assert!(nearest <= 0.05 * t, "model peak {t} vs direct {:?}", pd.times);
    }
}
