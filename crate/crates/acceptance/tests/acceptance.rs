//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::sync::Mutex;

use ctc_probe::kernels::{EinsteinCylinder, Geometry, PoincareAdS2, TimeMachine};
use ctc_probe::response::{
    image_term, response_ads2, response_ec_modesum_oracle, response_einstein_cylinder,
    response_minkowski_closed, response_minkowski_integral, response_time_machine,
    response_truncated_switching,
};
use ctc_probe::sweep::{run_sweep, SweepConfig, SweepTable};
use ctc_probe::{DetectorConfig, QuadratureConfig, ResponseResult, Result, TimeMachineOptions};

const RESIDUE_BOUND: f64 = 1e-10;

/// Every probability computed by the suite, for the physicality criterion.
static SEEN: Mutex<Vec<(String, f64, f64)>> = Mutex::new(Vec::new());

fn record(label: impl Into<String>, r: &ResponseResult) {
    SEEN.lock()
        .unwrap()
        .push((label.into(), r.probability, r.relative_residue()));
}

fn record_table(label: &str, table: &SweepTable) {
    for row in &table.rows {
        let residue = if row.status == "ok" {
            0.0
        } else {
            f64::INFINITY
        };
        for (col, p) in [
            ("P_TM", row.p_tm),
            ("P_AdS2", row.p_ads2),
            ("P_EC", row.p_ec),
            ("P_M", row.p_m),
        ] {
            SEEN.lock()
                .unwrap()
                .push((format!("{label} {col} at {}", row.swept), p, residue));
        }
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn minkowski(omega: f64) -> Result<ResponseResult> {
    let r = response_minkowski_closed(&DetectorConfig::new(omega))?;
    record(format!("P_M({omega})"), &r);
    Ok(r)
}

fn ads2(omega: f64, w: f64, q: &QuadratureConfig) -> Result<ResponseResult> {
    let r = response_ads2(&DetectorConfig::new(omega), &PoincareAdS2::new(w)?, q)?;
    record(format!("P_AdS2({omega}, {w})"), &r);
    Ok(r)
}

fn ec(omega: f64, ell: f64, gamma: f64) -> Result<ResponseResult> {
    let geom = EinsteinCylinder::new(ell, gamma)?;
    let r = response_einstein_cylinder(&DetectorConfig::new(omega), &geom, &cfg())?;
    record(format!("P_EC({omega}, {ell}, {gamma})"), &r);
    Ok(r)
}

fn tm(det: &DetectorConfig, w: f64, ell: f64, n: u32) -> Result<ResponseResult> {
    let geom = TimeMachine::from_curvature(w, ell)?;
    let r = response_time_machine(det, &geom, &cfg(), n)?;
    record(
        format!("P_TM({}, {w}, {ell}, N={n}, xi={})", det.omega, det.xi),
        &r,
    );
    Ok(r)
}

fn closed_form_vs_integral() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for omega in [0.0, 0.1, 0.5, 1.0, 3.0, 5.0] {
        let closed = minkowski(omega)?;
        let integral = response_minkowski_integral(&DetectorConfig::new(omega), &cfg())?;
        record(format!("P_M integral({omega})"), &integral);
        worst = worst.max(rel(integral.probability, closed.probability));
    }
    outcome(
        worst < 1e-8,
        format!("max relative gap {worst:.2e} (bound 1e-8)"),
    )
}

fn zero_gap() -> Result<Outcome> {
    let p = minkowski(0.0)?.probability;
    let gap = (p - 0.5).abs();
    outcome(
        gap < 1e-12,
        format!("P_M(0) = {p:.16} (|P - 1/2| = {gap:.1e})"),
    )
}

fn cylinder_oracle() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for omega in [0.1, 1.0] {
        for ell in [10.0, 20.0, 100.0] {
            for gamma in [0.0, 0.01] {
                let split = ec(omega, ell, gamma)?;
                let geom = EinsteinCylinder::new(ell, gamma)?;
                let modes = response_ec_modesum_oracle(&DetectorConfig::new(omega), &geom, 4000)?;
                worst = worst.max(rel(split.probability, modes.probability));
            }
        }
    }
    outcome(
        worst < 1e-6,
        format!("max relative gap over 12 points {worst:.2e} (bound 1e-6)"),
    )
}

fn ir_limits() -> Result<Outcome> {
    let omega = 0.1;
    let pm = minkowski(omega)?.probability;
    let near = rel(ads2(omega, 1e-3, &cfg())?.probability, pm);
    let d2 = (ads2(omega, 0.02, &cfg())?.probability - pm).abs();
    let d1 = (ads2(omega, 0.01, &cfg())?.probability - pm).abs();
    let ratio = d2 / d1;
    let flat = rel(ec(omega, 1e4, 0.01)?.probability, pm);
    outcome(
        near < 1e-3 && (ratio / 4.0 - 1.0).abs() < 0.1 && flat < 1e-4,
        format!(
            "AdS2 w=1e-3 gap {near:.2e} (bound 1e-3), w-ratio 0.02/0.01 {ratio:.3} (w^2 gives 4), EC l=1e4 gap {flat:.2e} (bound 1e-4)"
        ),
    )
}

fn contour_radius() -> Result<Outcome> {
    let gap = |w: f64| -> Result<f64> {
        let at = |r: f64| {
            let q = QuadratureConfig {
                detour_radius: r,
                ..cfg()
            };
            ads2(0.1, w, &q)
        };
        Ok((at(0.2)?.probability - at(0.4)?.probability).abs())
    };
    // poles at +-2/w: outside the Gaussian window for w = 0.05, inside for w = 0.3
    let (a, b) = (gap(0.05)?, gap(0.3)?);
    outcome(
        a < 1e-8 && b < 1e-8,
        format!("|P(r=0.2) - P(r=0.4)| = {a:.2e} at w=0.05, {b:.2e} at w=0.3 (bound 1e-8)"),
    )
}

fn zeroth_image() -> Result<Outcome> {
    let det = DetectorConfig::new(0.1);
    let geom = TimeMachine::from_curvature(0.05, 100.0)?;
    let p0 = image_term(&det, &geom, 0, &cfg())?.value;
    SEEN.lock()
        .unwrap()
        .push(("P^(0)".into(), p0.re, p0.im.abs() / p0.re.abs()));
    let gap = rel(p0.re, ads2(0.1, 0.05, &cfg())?.probability);
    outcome(gap < 1e-4, format!("relative gap {gap:.2e} (bound 1e-4)"))
}

/// A shipped figure configuration with its grid replaced.
fn sweep(config: &str, grid: Vec<f64>) -> Result<SweepTable> {
    let path = format!("{}/../../configs/{config}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ctc_probe::Error::Input(format!("{path}: {e}")))?;
    let config = SweepConfig {
        grid,
        ..SweepConfig::from_json(&text)?
    };
    run_sweep(&config)
}

fn circumference_trend() -> Result<Outcome> {
    let table = sweep("fig2.json", vec![10.0, 25.0, 50.0, 100.0, 150.0])?;
    record_table("circumference sweep", &table);
    let to_ads2: Vec<f64> = table
        .rows
        .iter()
        .map(|r| (r.p_tm - r.p_ads2).abs())
        .collect();
    let first = &table.rows[0];
    let to_ec = (first.p_tm - first.p_ec).abs();
    outcome(
        strictly_decreasing(&to_ads2) && to_ec < to_ads2[0],
        format!(
            "|P_TM - P_AdS2| over l = 10..150: {}; at l=10 |P_TM - P_EC| = {to_ec:.3e}",
            fmt(&to_ads2)
        ),
    )
}

fn curvature_trend() -> Result<Outcome> {
    let grid: Vec<f64> = (0..=6).map(|k| 1e-3 * 2f64.powi(k)).collect();
    let table = sweep("fig3.json", grid)?;
    record_table("curvature sweep", &table);
    let to_ads2: Vec<f64> = table
        .rows
        .iter()
        .map(|r| (r.p_tm - r.p_ads2).abs())
        .collect();
    let to_ec: Vec<f64> = table.rows.iter().map(|r| (r.p_tm - r.p_ec).abs()).collect();
    let ec_rev: Vec<f64> = to_ec.iter().rev().copied().collect();
    outcome(
        strictly_decreasing(&to_ads2) && strictly_decreasing(&ec_rev),
        format!(
            "over w = 0.001..0.064: |P_TM - P_AdS2| {}; |P_TM - P_EC| {}",
            fmt(&to_ads2),
            fmt(&to_ec)
        ),
    )
}

fn image_convergence() -> Result<Outcome> {
    let det = DetectorConfig::new(0.1);
    let mut passed = true;
    let mut parts = Vec::new();
    for ell in [10.0, 25.0, 50.0, 100.0, 150.0] {
        let p10 = tm(&det, 0.05, ell, 10)?;
        let p15 = tm(&det, 0.05, ell, 15)?;
        let tail = p10.image_sum.as_ref().expect("image sum").tail_estimate;
        let frac = tail / p10.probability;
        let step = (p15.probability - p10.probability).abs();
        passed &= frac < 1e-2 && step < tail;
        parts.push(format!("l={ell}: tail {tail:.2e}, |dP| {step:.2e}"));
    }
    outcome(
        passed,
        format!("tail(N=10) vs |P(N=15) - P(N=10)|: {}", parts.join("; ")),
    )
}

fn truncated_switching() -> Result<Outcome> {
    let det = DetectorConfig::new(0.1);
    let full = minkowski(0.1)?.probability;
    let opts = TimeMachineOptions::default();
    let mut gaps = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let r = response_truncated_switching(&det, &Geometry::Minkowski, eps, &cfg(), &opts)?;
        record(format!("truncated P_M(eps={eps})"), &r);
        gaps.push(rel(r.probability, full));
    }
    let at = gaps[2];
    outcome(
        at < 1e-4 && strictly_decreasing(&gaps),
        format!(
            "relative gap at eps = 0.2, 0.1, 0.05: {} (bound 1e-4 at 0.05)",
            fmt(&gaps)
        ),
    )
}

fn trajectory_invariance() -> Result<Outcome> {
    let q = cfg();
    let a = tm(&DetectorConfig::new(0.1), 0.05, 50.0, 10)?;
    let b = tm(&DetectorConfig::new(0.1).with_xi(5.0), 0.05, 50.0, 10)?;
    let gap = (a.probability - b.probability).abs();
    let bound =
        q.abs_tol.max(q.rel_tol * a.probability.abs()) + a.quadrature_error + b.quadrature_error;
    outcome(
        gap < bound,
        format!("|P(xi=1) - P(xi=5)| = {gap:.2e} (bound {bound:.2e})"),
    )
}

fn physicality() -> Result<Outcome> {
    let seen = SEEN.lock().unwrap();
    let bad: Vec<&(String, f64, f64)> = seen
        .iter()
        .filter(|(_, p, residue)| !(p.is_finite() && *p >= 0.0 && *residue < RESIDUE_BOUND))
        .collect();
    let worst = seen
        .iter()
        .map(|s| s.2)
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    let mut detail = format!(
        "{} values, worst relative residue {worst:.1e} (bound 1e-10)",
        seen.len()
    );
    if let Some((label, p, residue)) = bad.first() {
        detail.push_str(&format!(
            "; {} offending, first {label}: P = {p:e}, residue {residue:e}",
            bad.len()
        ));
    }
    outcome(bad.is_empty(), detail)
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 12] = [
    (
        "Minkowski closed form vs momentum integral",
        closed_form_vs_integral,
    ),
    ("Minkowski zero gap", zero_gap),
    ("Einstein cylinder vs mode sum", cylinder_oracle),
    ("infrared limits", ir_limits),
    ("AdS2 detour radius", contour_radius),
    ("zeroth image vs AdS2", zeroth_image),
    ("circumference trend", circumference_trend),
    ("curvature trend", curvature_trend),
    ("image-sum convergence", image_convergence),
    ("truncated switching", truncated_switching),
    ("trajectory radius invariance", trajectory_invariance),
    ("physicality", physicality),
];

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {:>2} {} {name}: {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
        if !passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of {} criteria passed; failed {failed:?}",
            CRITERIA.len() - failed.len(),
            CRITERIA.len()
        );
        ExitCode::FAILURE
    }
}
