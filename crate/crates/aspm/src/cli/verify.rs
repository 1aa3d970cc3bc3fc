//! Cross-module invariant suite behind `aspm verify`.

use crate::analytics;
use crate::coding::{
    bits_to_symbols, symbols_to_bits, symbols_to_train, Detection, LinkConfig, Signaling,
};
use crate::detection::{detect_coherent, detect_noncoherent};
use crate::harness::empirical_lambda;
use crate::link::{
    calibrate_noise, channel_coherent, channel_noncoherent, receive_coherent,
    receive_noncoherent, shape, ChannelSpec, PhaseMode,
};
use crate::shaping::{acf_diagnostics, hilbert_pair_error, PsfPair};
use crate::specfun::{
    bessel_i0_scaled, erf, erfc, integrate, marcum_default_spec, marcum_q1, QuadratureSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Outcome of one named invariant check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn erf_complementarity() -> CheckResult {
    let mut worst = 0.0f64;
    let mut x = -6.0;
    while x <= 6.0 {
        worst = worst.max((erf(x) + erfc(x) - 1.0).abs());
        x += 0.01;
    }
    check(
        "specfun.erf_erfc_complementarity",
        worst <= 1e-14,
        format!("max |erf+erfc-1| = {worst:.2e} on [-6, 6] (bound 1e-14)"),
    )
}

fn quadrature_closed_forms() -> CheckResult {
    let cases: [(&str, Box<dyn Fn(f64) -> f64>, QuadratureSpec, f64); 5] = [
        ("const", Box::new(|_| 1.0), QuadratureSpec::on(0.0, 1.0), 1.0),
        (
            "rayleigh",
            Box::new(|x: f64| x * (-x * x / 2.0).exp()),
            QuadratureSpec::to_infinity(0.0, 1.0),
            1.0,
        ),
        (
            "exp",
            Box::new(|x: f64| (-x).exp()),
            QuadratureSpec::to_infinity(0.0, 0.0),
            1.0,
        ),
        (
            "sin",
            Box::new(|x: f64| x.sin()),
            QuadratureSpec::on(0.0, std::f64::consts::PI),
            2.0,
        ),
        (
            "arctan",
            Box::new(|x: f64| 1.0 / (1.0 + x * x)),
            QuadratureSpec::on(0.0, 1.0),
            std::f64::consts::FRAC_PI_4,
        ),
    ];
    let mut worst = 0.0f64;
    let mut ok = true;
    for (_, f, spec, exact) in &cases {
        match integrate(f, spec) {
            Ok(r) => {
                let err = (r.value - exact).abs();
                worst = worst.max(err);
                ok &= err <= 10.0 * spec.abs_tol.max(spec.rel_tol * exact.abs());
            }
            Err(_) => ok = false,
        }
    }
    check(
        "specfun.quadrature_closed_forms",
        ok,
        format!("5 known integrals, max abs error {worst:.2e}"),
    )
}

fn marcum_endpoints() -> CheckResult {
    let spec = marcum_default_spec();
    let mut ok = true;
    let mut worst = 0.0f64;
    for &a in &[0.0, 1.0, 3.0, 8.0] {
        match marcum_q1(a, 0.0, &spec) {
            Ok(q) => {
                let err = (q - 1.0).abs();
                worst = worst.max(err);
                ok &= err <= 1e-9;
            }
            Err(_) => ok = false,
        }
    }
    if let Ok(q) = marcum_q1(0.0, 2.0, &spec) {
        let err = (q - (-2.0f64).exp()).abs();
        worst = worst.max(err);
        ok &= err <= 1e-10;
    } else {
        ok = false;
    }
    check(
        "specfun.marcum_q_endpoints",
        ok,
        format!("Q1(a,0)=1 and Q1(0,2)=e^-2, max abs error {worst:.2e}"),
    )
}

fn marcum_derivative() -> CheckResult {
    let spec = marcum_default_spec();
    let mut worst = 0.0f64;
    for &lambda in &[0.0f64, 1.0, 4.0, 16.0] {
        let mut x = 0.5f64;
        while x <= 20.0 {
            let h = 1e-4 * (1.0 + x);
            let qp = marcum_q1(lambda.sqrt(), (x + h).sqrt(), &spec).unwrap();
            let qm = marcum_q1(lambda.sqrt(), (x - h).sqrt(), &spec).unwrap();
            let fd = (qp - qm) / (2.0 * h);
            let closed = -0.5
                * (-(lambda + x) / 2.0 + (lambda * x).sqrt()).exp()
                * bessel_i0_scaled((lambda * x).sqrt()).unwrap();
            worst = worst.max((fd - closed).abs());
            x += 1.5;
        }
    }
    check(
        "specfun.marcum_derivative_identity",
        worst <= 1e-6,
        format!("finite difference vs closed form, max abs error {worst:.2e} (bound 1e-6)"),
    )
}

fn dual_path_agreement() -> CheckResult {
    let mut worst = 0.0f64;
    for &m in &[2u32, 4, 8, 16, 30] {
        for &lambda in &[1.0, 4.0, 16.0, 64.0] {
            let s = analytics::ber_noncoherent_sum(lambda, m).unwrap();
            let i = analytics::ber_noncoherent_integral(lambda, m).unwrap();
            worst = worst.max((s - i).abs() / s.abs().max(1e-300));
        }
    }
    check(
        "analytics.noncoherent_dual_path",
        worst <= 1e-10,
        format!("binomial sum vs integral, max rel error {worst:.2e} (bound 1e-10)"),
    )
}

fn ber_at_zero() -> CheckResult {
    let mut worst = 0.0f64;
    for &m in &[2u32, 4, 16, 256, 4096] {
        worst = worst.max((analytics::ber_noncoherent(0.0, m).unwrap() - 0.5).abs());
        worst = worst.max((analytics::ber_coherent(0.0, m).unwrap() - 0.5).abs());
        worst = worst.max((analytics::ber_coherent_unipolar(0.0, m).unwrap() - 0.5).abs());
    }
    check(
        "analytics.ber_half_at_zero_snr",
        worst <= 1e-6,
        format!("P_b(0) vs 1/2 over all variants, max abs error {worst:.2e}"),
    )
}

fn binary_reductions() -> CheckResult {
    let mut worst = 0.0f64;
    let mut gb = 0.5;
    while gb <= 32.0 {
        let lambda = 2.0 * gb;
        let c = analytics::ber_coherent(lambda, 2).unwrap();
        let c_exact = 0.5 * erfc(gb.sqrt());
        worst = worst.max((c - c_exact).abs() / c_exact);
        let nc = analytics::ber_noncoherent(lambda, 2).unwrap();
        let nc_exact = 0.5 * (-gb / 2.0).exp();
        worst = worst.max((nc - nc_exact).abs() / nc_exact);
        gb += 0.5;
    }
    check(
        "analytics.binary_reductions",
        worst <= 1e-12,
        format!("M=2 vs closed forms, max rel error {worst:.2e} (bound 1e-12)"),
    )
}

fn arrival_integral() -> CheckResult {
    let mut worst = 0.0f64;
    for &m in &[4u32, 16, 64, 256] {
        let v = analytics::arrival_time_correct_prob(0.0, m).unwrap();
        worst = worst.max((v - 2.0 / m as f64).abs());
    }
    check(
        "analytics.arrival_integral_two_over_m",
        worst <= 1e-9,
        format!("arrival-time integral at mu=0 vs 2/M, max abs error {worst:.2e}"),
    )
}

fn appendix_identity() -> CheckResult {
    let mut worst = 0.0f64;
    for k in 1..=8 {
        for &lambda in &[0.0, 1.0, 4.0, 16.0] {
            let (_, _, err) = analytics::verify_appendix_identity(lambda, k).unwrap();
            worst = worst.max(err);
        }
    }
    check(
        "analytics.appendix_identity",
        worst <= 1e-8,
        format!("integration-by-parts identity, max abs error {worst:.2e} (bound 1e-8)"),
    )
}

fn orderings() -> CheckResult {
    let mut ok = true;
    for &m in &[4u32, 16, 64] {
        for &mu in &[1.0f64, 2.0, 3.0, 4.0] {
            let lambda = 2.0 * mu * mu;
            ok &= analytics::ber_coherent_unipolar(lambda, m).unwrap()
                > analytics::ber_coherent(lambda, m).unwrap();
        }
    }
    let gb = 10.0;
    let mut prev = f64::INFINITY;
    let mut m = 2u32;
    while m <= 4096 {
        let p = analytics::ber_noncoherent(2.0 * gb * (m as f64).log2(), m).unwrap();
        ok &= p < prev;
        prev = p;
        m *= 2;
    }
    check(
        "analytics.orderings",
        ok,
        "unipolar > bipolar at mu in 1..4; noncoherent decreasing in M at Eb/N0 = 10".into(),
    )
}

fn psf_acf(psf: &PsfPair) -> CheckResult {
    match acf_diagnostics(psf) {
        Ok(d) => check(
            "shaping.acf_error",
            d.acf_error <= 2e-2,
            format!("max |w - RC| = {:.3e} (bound 2e-2)", d.acf_error),
        ),
        Err(e) => check("shaping.acf_error", false, e.to_string()),
    }
}

fn psf_ssb(psf: &PsfPair) -> CheckResult {
    match hilbert_pair_error(psf) {
        Ok(f) => check(
            "shaping.single_sideband",
            f <= 1e-3,
            format!("negative-frequency energy fraction {f:.3e} (bound 1e-3)"),
        ),
        Err(e) => check("shaping.single_sideband", false, e.to_string()),
    }
}

fn psf_v2_lattice(psf: &PsfPair) -> CheckResult {
    match acf_diagnostics(psf) {
        Ok(d) => {
            let mut worst = 0.0f64;
            let max_j = (psf.length as isize - 1) / 4;
            for j in 2..=max_j {
                worst = worst.max(d.at_lag(&d.v2, 4 * j));
                worst = worst.max(d.at_lag(&d.v2, -4 * j));
            }
            check(
                "shaping.v2_sampling_lattice",
                worst <= 1e-2,
                format!("max v2 on |lag| >= 8 lattice = {worst:.3e} (bound 1e-2)"),
            )
        }
        Err(e) => check("shaping.v2_sampling_lattice", false, e.to_string()),
    }
}

fn psf_papr(psf: &PsfPair) -> CheckResult {
    match acf_diagnostics(psf) {
        Ok(d) => {
            let gap = d.designed_train_papr_db - d.shaped_train_papr_db;
            check(
                "shaping.papr_reduction",
                gap >= 10.0,
                format!(
                    "designed {:.2} dB, shaped {:.2} dB, gap {gap:.2} dB (need >= 10)",
                    d.designed_train_papr_db, d.shaped_train_papr_db
                ),
            )
        }
        Err(e) => check("shaping.papr_reduction", false, e.to_string()),
    }
}

fn link_configs() -> (LinkConfig, LinkConfig) {
    (
        LinkConfig {
            m: 16,
            n_p: 128,
            n: 2,
            signaling: Signaling::Bipolar,
            detection: Detection::Coherent,
            psf_id: None,
            allow_overlap: true,
        },
        LinkConfig {
            m: 16,
            n_p: 128,
            n: 4,
            signaling: Signaling::Unipolar,
            detection: Detection::Noncoherent,
            psf_id: None,
            allow_overlap: true,
        },
    )
}

fn calibration(psf: &PsfPair) -> CheckResult {
    let (coherent, noncoherent) = link_configs();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (cfg, seed) in [(&coherent, 11u64), (&noncoherent, 12)] {
        match calibrate_noise(64.0, cfg, psf, 1.0)
            .map_err(|e| e.to_string())
            .and_then(|cal| {
                empirical_lambda(cfg, psf, cal.sigma, 1.0, 300_000, seed)
                    .map_err(|e| e.to_string())
            }) {
            Ok(measured) => {
                let rel = (measured - 64.0).abs() / 64.0;
                worst = worst.max(rel);
                ok &= rel <= 0.01;
            }
            Err(_) => ok = false,
        }
    }
    check(
        "link.lambda_calibration",
        ok,
        format!("empirical lambda vs target 64, worst rel error {worst:.3e} (bound 1%)"),
    )
}

fn phase_invariance(psf: &PsfPair) -> CheckResult {
    let (_, cfg) = link_configs();
    let bits: Vec<u8> = (0..64).map(|i| ((i * 5) % 7 == 0) as u8).collect();
    let symbols = bits_to_symbols(&bits, &cfg).unwrap();
    let train = symbols_to_train(&symbols, &cfg, psf.length).unwrap();
    let (x_g, x_h) = shape(&train, psf, &cfg);
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let mut reference: Option<(Vec<f64>, Vec<u32>)> = None;
    let mut worst = 0.0f64;
    let mut ok = true;
    for &phi in &[0.0, std::f64::consts::PI / 7.0, std::f64::consts::PI / 3.0, 3.0] {
        let chan = ChannelSpec {
            sigma: 0.0,
            phase: PhaseMode::Fixed(phi),
            gain: 1.0,
        };
        let y = receive_noncoherent(
            &channel_noncoherent(&x_g, &x_h, &chan, &mut rng).unwrap(),
            psf,
        );
        let decisions: Vec<u32> = detect_noncoherent(&y, &cfg)
            .unwrap()
            .symbols
            .iter()
            .map(|s| s.position)
            .collect();
        match &reference {
            None => reference = Some((y.samples.clone(), decisions)),
            Some((r, d)) => {
                for (a, b) in r.iter().zip(&y.samples) {
                    worst = worst.max((a - b).abs() / a.abs().max(1e-12));
                }
                ok &= &decisions == d;
            }
        }
    }
    check(
        "link.phase_invariance",
        ok && worst <= 1e-10,
        format!("y_nc^2 across phase sweep, max rel spread {worst:.2e}; decisions identical: {ok}"),
    )
}

fn noiseless_round_trip(psf: &PsfPair) -> CheckResult {
    let (coherent, noncoherent) = link_configs();
    let mut ok = true;
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    for cfg in [&coherent, &noncoherent] {
        let bits: Vec<u8> = (0..1600).map(|i| ((i * 31 + 7) % 5 < 2) as u8).collect();
        let symbols = bits_to_symbols(&bits, cfg).unwrap();
        let train = symbols_to_train(&symbols, cfg, psf.length).unwrap();
        let (x_g, x_h) = shape(&train, psf, cfg);
        let chan = ChannelSpec::noiseless();
        let decoded = match cfg.detection {
            Detection::Coherent => detect_coherent(
                &receive_coherent(&channel_coherent(&x_g, &x_h, &chan, &mut rng).unwrap(), psf),
                cfg,
            )
            .unwrap(),
            Detection::Noncoherent => detect_noncoherent(
                &receive_noncoherent(
                    &channel_noncoherent(&x_g, &x_h, &chan, &mut rng).unwrap(),
                    psf,
                ),
                cfg,
            )
            .unwrap(),
        };
        ok &= symbols_to_bits(&decoded, cfg).unwrap() == bits;
    }
    check(
        "link.noiseless_round_trip",
        ok,
        "coherent and noncoherent 16-ary links decode noiseless bits exactly".into(),
    )
}

/// Run every invariant check against the given PSF.
pub fn run_invariant_suite(psf: &PsfPair) -> Vec<CheckResult> {
    vec![
        erf_complementarity(),
        quadrature_closed_forms(),
        marcum_endpoints(),
        marcum_derivative(),
        dual_path_agreement(),
        ber_at_zero(),
        binary_reductions(),
        arrival_integral(),
        appendix_identity(),
        orderings(),
        psf_acf(psf),
        psf_ssb(psf),
        psf_v2_lattice(psf),
        psf_papr(psf),
        calibration(psf),
        phase_invariance(psf),
        noiseless_round_trip(psf),
    ]
}
