//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every criterion is evaluated and reported even when an earlier
//! one fails; the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use subrayleigh::analysis::{count_zeros, dominant_frequency, visibility, SampledSignal, ScanGrid};
use subrayleigh::config::{OracleSettings, ScanConfig, Scenario};
use subrayleigh::correlation::{
    classical_intensity, correlation_from_matrix, g2_closed_form, g2_grating, g_n,
    ClosedFormVariant, GratingRule,
};
use subrayleigh::diffraction::{fraunhofer_field, sinc};
use subrayleigh::geometry::{detector_offset, paper_emitter_pair, resolve_layout};
use subrayleigh::permanent::{permanent_enumerate, permanent_ryser, AmplitudeMatrix};
use subrayleigh::scan::{run_oracle_check, run_scan, run_scan_with_workers};
use subrayleigh::{Aperture, Complex64, Geometry, PlacementStrategy, Transverse};

// tolerances
const C1_RATIO: f64 = 2.0;
const C1_TOL: f64 = 0.02;
const C2_RATIO: f64 = 4.0;
const C2_TOL: f64 = 0.04;
const C3_REL: f64 = 1e-6;
const C3_GRID: usize = 512;
const C4_VISIBILITY: f64 = 0.999;
const C5_MARGIN: f64 = 100.0;
const C5_REL: f64 = 0.01;
const C5_SELF: f64 = 1e-3;
const C6_REL: f64 = 1e-6;
const C6_LIMIT_REL: f64 = 1e-9;
const C7_REL: f64 = 1e-9;
const C8_REL: f64 = 1e-12;
const C8_COUNT: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 frequency doubling", criterion_1),
        ("2 frequency quadrupling", criterion_2),
        ("3 closed-form cross-validation", criterion_3),
        ("4 contrast", criterion_4),
        ("5 Fraunhofer oracle", criterion_5),
        ("6 grating product form", criterion_6),
        ("7 classical sanity", criterion_7),
        ("8 permanent oracle", criterion_8),
        ("9 property suite", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn criterion_1() -> Outcome {
    let config = ScanConfig::for_scenario(Scenario::G2Mirror);
    match run_scan(&config) {
        Ok(r) => {
            let ratio = r.metadata.frequency_ratio;
            outcome(
                (ratio - C1_RATIO).abs() <= C1_TOL,
                format!(
                    "ratio {ratio:.5} (G2 {:.4}/m, classical {:.4}/m, {} points, flattening {:?})",
                    r.report.dominant_frequency,
                    r.classical_report.dominant_frequency,
                    r.signal.len(),
                    r.metadata.flattening
                ),
            )
        }
        Err(e) => outcome(false, format!("scan failed: {e}")),
    }
}

fn criterion_2() -> Outcome {
    let config = ScanConfig::for_scenario(Scenario::G4Quad);
    let primary = run_scan(&config);
    // the same measurement over twice the window, to report a number even
    // when the default window is refused
    let wide = ScanConfig {
        scan_max: 2.0 * config.scan_max,
        steps: 2048,
        ..config.clone()
    };
    let wide_note = match run_scan(&wide) {
        Ok(r) => format!(
            "; over (0, {:.0} mm] with 2048 points: ratio {:.4}, G4 zeros {}",
            wide.scan_max * 1e3,
            r.metadata.frequency_ratio,
            r.report.zero_count
        ),
        Err(e) => format!("; wide window also failed: {e}"),
    };
    let zeros = g4_zero_positions(&config);
    match primary {
        Ok(r) => {
            let ratio = r.metadata.frequency_ratio;
            outcome(
                (ratio - C2_RATIO).abs() <= C2_TOL,
                format!("ratio {ratio:.4}{wide_note}; {zeros}"),
            )
        }
        Err(e) => outcome(false, format!("default window: {e}{wide_note}; {zeros}")),
    }
}

/// Sharp minima of the raw G4 in units of ρ/2, where a sin²(4x) law would
/// put them at integers.
fn g4_zero_positions(config: &ScanConfig) -> String {
    let g = &config.geometry;
    let ap = &config.aperture;
    let half_rho = 0.5 * detector_offset(g, ap);
    let emitters = subrayleigh::geometry::paper_emitter_quad(g, ap);
    let n = 4000;
    let xs: Vec<f64> = (1..=n)
        .map(|i| 8.0 * half_rho * i as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&r| {
            let d = resolve_layout(PlacementStrategy::PaperQuad, r, g, ap);
            g_n(&d, &emitters, ap, g).map_or(f64::NAN, |v| v.value())
        })
        .collect();
    let scaled = |v: Vec<f64>| -> String {
        v.iter()
            .map(|x| format!("{:.2}", x / half_rho))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let minima: Vec<f64> = (1..n - 1)
        .filter(|&i| vals[i] < vals[i - 1] && vals[i] <= vals[i + 1])
        .map(|i| xs[i])
        .collect();
    format!(
        "in units of ρ/2 the G4 zeros sit at [{}] and its local minima at [{}], where sin²(4x) puts zeros at 1, 2, 3, ...",
        scaled(zero_set(&xs, &vals)),
        scaled(minima)
    )
}

fn criterion_3() -> Outcome {
    let g = Geometry::default();
    let ap = Aperture::default();
    let rho = detector_offset(&g, &ap);
    let scan_max = 2.0 * g.wavelength() * g.detector_distance() / ap.height();
    let grid = match ScanGrid::new(0.0, scan_max, C3_GRID + 2, &[0.0, rho]) {
        Ok(grid) => grid,
        Err(e) => return outcome(false, e.to_string()),
    };
    let emitters = paper_emitter_pair(&g, &ap, 0.0);
    let mut closed = Vec::new();
    let mut general = Vec::new();
    for &r in &grid.coordinates {
        let c = g2_closed_form(r, ClosedFormVariant::Minus, &ap, &g, false);
        let d = resolve_layout(PlacementStrategy::MirrorPair, r, &g, &ap);
        match (c, g_n(&d, &emitters, &ap, &g)) {
            (Ok(c), Ok(v)) => {
                closed.push(c.value());
                general.push(v.value());
            }
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("r = {r:e}: {e}")),
        }
    }
    let points = closed.len();
    let pointwise = max_relative(&closed, &general);
    let ratio_min = ratio_extreme(&general, &closed, f64::min);
    let ratio_max = ratio_extreme(&general, &closed, f64::max);
    if pointwise <= C3_REL {
        return outcome(
            true,
            format!("pointwise max relative deviation {pointwise:.2e} over {points} points"),
        );
    }
    let cmax = closed.iter().cloned().fold(0.0, f64::max);
    let gmax = general.iter().cloned().fold(0.0, f64::max);
    let shape = closed
        .iter()
        .zip(&general)
        .map(|(c, v)| (c / cmax - v / gmax).abs())
        .fold(0.0, f64::max);
    let zc = zero_set(&grid.coordinates, &closed);
    let zg = zero_set(&grid.coordinates, &general);
    let zeros_match = zc.len() == zg.len()
        && zc
            .iter()
            .zip(&zg)
            .all(|(a, b)| (a - b).abs() <= grid.step * (1.0 + 1e-9));
    outcome(
        shape <= C3_REL && zeros_match,
        format!(
            "pointwise max relative deviation {pointwise:.3e}; g_n/closed ranges over [{ratio_min:.4e}, {ratio_max:.4e}] (not constant); \
             shape test max deviation {shape:.3e} over {points} points; zero sets {} ({} vs {} zeros)",
            if zeros_match { "match" } else { "differ" },
            zc.len(),
            zg.len()
        ),
    )
}

fn max_relative(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

fn ratio_extreme(num: &[f64], den: &[f64], pick: fn(f64, f64) -> f64) -> f64 {
    let peak = den.iter().cloned().fold(0.0, f64::max);
    num.iter()
        .zip(den)
        .filter(|(_, d)| **d > 1e-6 * peak)
        .map(|(n, d)| n / d)
        .reduce(pick)
        .unwrap_or(f64::NAN)
}

/// Local minima that drop quadratically towards zero: the value is below 5%
/// of the values three nodes away on either side.
fn zero_set(xs: &[f64], v: &[f64]) -> Vec<f64> {
    const REACH: usize = 3;
    (REACH..v.len().saturating_sub(REACH))
        .filter(|&i| v[i] <= v[i - 1] && v[i] <= v[i + 1])
        .filter(|&i| v[i] <= 0.05 * v[i - REACH].min(v[i + REACH]))
        .map(|i| xs[i])
        .collect()
}

fn criterion_4() -> Outcome {
    let config = ScanConfig::for_scenario(Scenario::G2Mirror);
    let result = match run_scan(&config) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("scan failed: {e}")),
    };
    let g = &config.geometry;
    let ap = &config.aperture;
    let k = g.wavenumber();
    let rho = detector_offset(g, ap);
    // the published B₋ envelope, written out here
    let paper = |r: f64| {
        let b = 4.0 / PI * (r * r - rho * rho);
        let amp = 8.0 * g.amplitude().powi(2) * g.detector_distance().powi(2)
            / (PI * PI * k * k * g.source_distance().powi(2) * b);
        amp * amp
    };
    let flat: Vec<f64> = result
        .signal
        .coordinates()
        .iter()
        .zip(result.signal.values())
        .map(|(&r, &v)| v / paper(r))
        .collect();
    match result.signal.with_values(flat).and_then(|s| visibility(&s)) {
        Ok(v) => outcome(
            v >= C4_VISIBILITY,
            format!(
                "visibility {v:.6} with the published envelope, {:.6} with the exact envelope",
                result.report.visibility
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_5() -> Outcome {
    let config = ScanConfig {
        oracle: Some(OracleSettings::default()),
        ..ScanConfig::for_scenario(Scenario::G2Mirror)
    };
    match run_oracle_check(&config, 4) {
        Ok(r) => {
            let raw_error = (r.raw_magnitude_ratio - 1.0).abs();
            outcome(
                r.fraunhofer_validity_margin >= C5_MARGIN
                    && r.max_relative_error <= C5_REL
                    && r.max_self_change <= C5_SELF,
                format!(
                    "margin {:.1}, max |U| relative error {:.3e} over {} points ({} near zeros skipped), \
                     self change {:.2e}, phase-difference error {:.3e} rad; \
                     quadrature equals {:?}·closed form, raw |U| ratio {:.6} (unconverted error {:.1}%)",
                    r.fraunhofer_validity_margin,
                    r.max_relative_error,
                    r.sample_count,
                    r.skipped_near_zero,
                    r.max_self_change,
                    r.max_phase_difference_error,
                    r.normalization,
                    r.raw_magnitude_ratio,
                    100.0 * raw_error
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_6() -> Outcome {
    let g = Geometry::default();
    let mut details = Vec::new();
    let mut pass = true;
    for m in [3usize, 5] {
        let grating = match Aperture::grating(20e-6, 20e-6, 60e-6, m) {
            Ok(a) => a,
            Err(e) => return outcome(false, e.to_string()),
        };
        let emitters = paper_emitter_pair(&g, &grating, 0.0);
        let k = g.wavenumber();
        let d = 60e-6;
        let period = PI * g.detector_distance() / (k * d);
        let mut worst = 0.0f64;
        let mut literal = (f64::INFINITY, 0.0f64);
        let mut constant = f64::NAN;
        for i in 1..=200 {
            let r1 = 0.05 * i as f64 / 200.0;
            // stay away from Dirichlet singular points θ = nπ
            let frac = (r1 / period).fract();
            if !(0.02..=0.98).contains(&frac) {
                continue;
            }
            for rule in [GratingRule::PlusOffset, GratingRule::MinusOffset] {
                let c = match g2_grating(r1, rule, &emitters, &grating, &g, true) {
                    Ok(c) => c,
                    Err(e) => return outcome(false, e.to_string()),
                };
                let product = c.product_form.unwrap_or(f64::NAN);
                if product < 1e-12 * c.single_slit.max(1e-300) || c.direct == 0.0 {
                    continue;
                }
                let q = c.direct / product;
                literal = (literal.0.min(q), literal.1.max(q));
                constant = c.emitter_array_factor;
                worst = worst.max((q - constant).abs() / constant);
            }
        }
        let limit = g2_grating(
            1e-12,
            GratingRule::PlusOffset,
            &emitters,
            &grating,
            &g,
            true,
        )
        .map(|c| c.grating_factor)
        .unwrap_or(f64::NAN);
        let m2 = (m * m) as f64;
        let limit_err = (limit - m2).abs() / m2;
        pass &= worst <= C6_REL && limit_err <= C6_LIMIT_REL;
        details.push(format!(
            "M={m}: direct/product in [{:.9}, {:.9}], equal to the emitter array factor {constant} within {worst:.2e}; factor at r→0 {limit:.12} (M² error {limit_err:.1e})",
            literal.0, literal.1
        ));
    }
    outcome(pass, details.join("; "))
}

fn criterion_7() -> Outcome {
    let g = Geometry::default();
    let ap = Aperture::default();
    let u = fraunhofer_field(Transverse::ORIGIN, Transverse::ORIGIN, &ap, &g);
    let expected = (g.amplitude() * ap.height() * ap.width()
        / (g.wavelength() * g.source_distance().powi(2) * g.detector_distance().powi(2)))
    .powi(2);
    let axis_err = (u.norm_sqr() - expected).abs() / expected;

    let mut grating_err = 0.0f64;
    for m in [3usize, 5] {
        let grating = Aperture::grating(ap.height(), ap.width(), 60e-6, m).expect("valid grating");
        for order in 0..=2 {
            // principal maxima at r = n λ r_z/d
            let r = order as f64 * g.wavelength() * g.detector_distance() / 60e-6;
            let det = Transverse::on_x(r);
            let single = classical_intensity(det, &ap, &g).expect("rect");
            let full = classical_intensity(det, &grating, &g).expect("grating");
            let m2 = (m * m) as f64;
            grating_err = grating_err.max((full / single - m2).abs() / m2);
        }
    }
    outcome(
        axis_err <= C7_REL && grating_err <= C7_REL,
        format!("on-axis |U|² relative error {axis_err:.2e}; grating principal maxima M² factor error {grating_err:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20240601);
    let mut worst = 0.0f64;
    for i in 0..C8_COUNT {
        let n = 2 + i % 5;
        let m = AmplitudeMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .expect("finite");
        let a = permanent_enumerate(&m);
        let b = permanent_ryser(&m);
        worst = worst.max((a - b).norm() / a.norm().max(b.norm()));
    }
    outcome(
        worst <= C8_REL,
        format!("max relative difference {worst:.2e} over {C8_COUNT} matrices, N in 2..=6"),
    )
}

/// Deterministic replay of the named invariants; the randomized versions
/// live in the `properties` test target.
fn criterion_9() -> Outcome {
    let g = Geometry::default();
    let ap = Aperture::default();
    let emitters = subrayleigh::geometry::paper_emitter_quad(&g, &ap);
    let r = 3.7e-3;
    let detectors = resolve_layout(PlacementStrategy::PaperQuad, r, &g, &ap);
    let matrix =
        subrayleigh::correlation::amplitude_matrix(&detectors, &emitters, &ap, &g).expect("matrix");
    let base = correlation_from_matrix(&matrix).expect("G4").value();
    let mut checks = Vec::new();

    let permuted = matrix
        .permute_rows(&[2, 0, 3, 1])
        .permute_cols(&[3, 1, 0, 2]);
    let p = correlation_from_matrix(&permuted).expect("G4").value();
    checks.push(("permutation invariance", (p - base).abs() <= 1e-12 * base));

    let phased = matrix.scale(Complex64::cis(1.234));
    let q = correlation_from_matrix(&phased).expect("G4").value();
    checks.push(("global-phase invariance", (q - base).abs() <= 1e-12 * base));

    let scaled_g = g.with_amplitude(1.7).expect("amplitude");
    let s = g_n(&detectors, &emitters, &ap, &scaled_g)
        .expect("G4")
        .value();
    let classical = classical_intensity(Transverse::on_x(r), &ap, &g).expect("I");
    let classical_scaled = classical_intensity(Transverse::on_x(r), &ap, &scaled_g).expect("I");
    checks.push((
        "A-scaling exponents",
        (s / base - 1.7f64.powi(8)).abs() <= 1e-10 * 1.7f64.powi(8)
            && (classical_scaled / classical - 1.7f64.powi(2)).abs() <= 1e-10 * 1.7f64.powi(2),
    ));

    let continuity = [1e-3, 1e-5, 1e-7, 1e-9]
        .iter()
        .all(|&x| (sinc(x) - 1.0).abs() <= x * x && (sinc(-x) - sinc(x)).abs() == 0.0);
    let smooth = (1..100).all(|i| {
        let x = 2e-4 * i as f64 / 100.0 - 1e-4;
        (sinc(x) - x.sin() / x).abs() <= 1e-15 || x == 0.0
    });
    checks.push(("sinc continuity", continuity && smooth));

    let config = ScanConfig {
        steps: 256,
        ..ScanConfig::for_scenario(Scenario::G2Mirror)
    };
    let det = match (
        run_scan_with_workers(&config, 1),
        run_scan_with_workers(&config, 3),
    ) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    checks.push(("determinism across worker counts", det));

    // analysis invariants on a constructed signal
    let xs: Vec<f64> = (0..512).map(|i| i as f64 / 512.0).collect();
    let sig = SampledSignal::new(
        xs.clone(),
        xs.iter().map(|x| (PI * 10.0 * x).sin().powi(2)).collect(),
    )
    .expect("signal");
    let f = dominant_frequency(&sig).unwrap_or(f64::NAN);
    checks.push((
        "sin² frequency and zeros",
        (f - 10.0).abs() < 0.05 && count_zeros(&sig, 1e-6) == 9,
    ));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!(
                "{} invariant groups hold (randomized suite in the properties target)",
                checks.len()
            )
        } else {
            format!("violated: {}", failed.join(", "))
        },
    )
}
