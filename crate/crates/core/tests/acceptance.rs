//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so every line is
//! printed even when an earlier criterion fails.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

use gkdv::cli::report::BandRow;
use gkdv::indices::{classify, compute_indices, solitary_limit_report, Modulational, DEFAULT_SOLITARY_PATH};
use gkdv::monodromy::{closed_form_m0, integrate_monodromy, monodromy_derivatives};
use gkdv::profile::{gradients, reconstruct_profile, well_energy_window, StepPolicy, WaveParameters};
use gkdv::spectrum::{hill_spectrum, null_basis, real_axis_scan, real_part_slope, trace_bands, trace_bands_at, ChainPartner};

type Outcome = Result<String, String>;

/// Power-law wave at a fraction of the way from the well bottom to the
/// separatrix level.
fn wave(p: f64, a: f64, c: f64, frac: f64) -> WaveParameters {
    let probe = WaveParameters::power_law(p, a, 0.0, c).unwrap();
    let (lo, hi) = well_energy_window(&probe).unwrap();
    let hi = if hi.is_finite() { hi } else { lo + 1.0 };
    WaveParameters::power_law(p, a, lo + frac * (hi - lo), c).unwrap()
}

fn fixed(p: f64, a: f64, e: f64) -> WaveParameters {
    WaveParameters::power_law(p, a, e, 1.0).unwrap()
}

/// Ten generic parameter sets used by several criteria.
fn generic_sets() -> Vec<WaveParameters> {
    vec![
        fixed(1.0, 0.0, -0.1),
        wave(1.0, 0.05, 1.3, 0.4),
        fixed(2.0, 0.0, -0.1),
        wave(2.0, 0.02, 1.2, 0.6),
        fixed(3.0, 0.02, -0.15),
        wave(3.0, 0.0, 0.8, 0.3),
        wave(5.0, 0.01, 1.0, 0.5),
        wave(5.0, 0.0, 1.5, 0.7),
        wave(6.0, 0.0, 1.0, 0.5),
        wave(1.0, -0.03, 0.6, 0.8),
    ]
}

fn fmt_params(w: &WaveParameters) -> String {
    format!("(p={}, a={}, E={:.6}, c={})", w.nonlinearity.exponent().unwrap_or(f64::NAN), w.a, w.energy, w.c)
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20_241_016);
    let ps = [1.0, 2.0, 3.0, 5.0];
    let points: Vec<WaveParameters> = (0..20)
        .map(|i| {
            let p = ps[i % 4];
            let a = rng.gen_range(-0.03..0.03);
            let c = rng.gen_range(0.6..1.8);
            let frac = rng.gen_range(0.15..0.85);
            wave(p, a, c, frac)
        })
        .collect();
    let worst: Vec<(f64, String)> = points
        .par_iter()
        .map(|w| {
            let g = gradients(w, StepPolicy::default()).map_err(|e| format!("{}: {e}", fmt_params(w)))?;
            let ir = g.identity_residuals(w);
            Ok((ir.max_action().max(ir.max_linear()), fmt_params(w)))
        })
        .collect::<Result<_, String>>()?;
    let (max, at) = worst.into_iter().fold((0.0, String::new()), |acc, x| if x.0 > acc.0 { x } else { acc });
    if max <= 1e-5 {
        Ok(format!("20 points, max relative residual {max:.2e}"))
    } else {
        Err(format!("relative residual {max:.2e} > 1e-5 at {at}"))
    }
}

fn criterion_2() -> Outcome {
    let mut worst_det: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    let mut total = 0;
    let mut max_mu: f64 = 0.0;
    for w in [fixed(1.0, 0.0, -0.1), fixed(3.0, 0.02, -0.15)] {
        let prof = reconstruct_profile(&w, 256, false).map_err(|e| e.to_string())?;
        // |μ| up to 2(2π/T)³; beyond that M has entries of size e^{|μ|^{1/3}T}
        // and det M carries roundoff of ε times that size.
        let s = (2.0 * std::f64::consts::PI / prof.period).powi(3);
        max_mu = max_mu.max(2.0 * s);
        let mut mus = Vec::new();
        for k in 0..50 {
            let r = s * (0.02 + 0.04 * k as f64);
            let mu = match k % 3 {
                0 => Complex64::new(if k % 2 == 0 { r } else { -r }, 0.0),
                1 => Complex64::new(0.0, if k % 2 == 0 { r } else { -r }),
                _ => Complex64::from_polar(r, 0.3 + 0.7 * k as f64),
            };
            mus.push(mu);
        }
        let dets: Vec<f64> = mus
            .par_iter()
            .map(|&mu| integrate_monodromy(&prof, mu, 1e-12).map(|m| m.det_residual))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        total += dets.len();
        worst_det = dets.into_iter().fold(worst_det, f64::max);
        let d = monodromy_derivatives(&prof, 1, 1e-12).map_err(|e| e.to_string())?;
        worst_trace = worst_trace.max((d.tr0 - 3.0).abs());
        worst_slope = worst_slope.max(d.tr1.abs());
    }
    let msg = format!("{total} mu (|mu| <= {max_mu:.2}): max |det M - 1| {worst_det:.2e}, |a(0) - 3| {worst_trace:.2e}, |a'(0)| {worst_slope:.2e}");
    if worst_det <= 1e-8 && worst_trace <= 1e-7 && worst_slope <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Outcome {
    let res: Vec<(f64, f64)> = generic_sets()
        .par_iter()
        .map(|w| {
            let g = gradients(w, StepPolicy::default()).map_err(|e| format!("{}: {e}", fmt_params(w)))?;
            let prof = reconstruct_profile(w, 256, false).map_err(|e| e.to_string())?;
            let d = monodromy_derivatives(&prof, 3, 1e-12).map_err(|e| e.to_string())?;
            let idx = compute_indices(w, &g, Some(&d)).map_err(|e| format!("{}: {e}", fmt_params(w)))?;
            let cc = idx.cross_check.expect("cross-check requested");
            Ok((cc.tr2_relative, cc.tr3_relative))
        })
        .collect::<Result<_, String>>()?;
    let t2 = res.iter().map(|r| r.0).fold(0.0, f64::max);
    let t3 = res.iter().map(|r| r.1).fold(0.0, f64::max);
    let msg = format!("10 sets: max relative mismatch tr2 {t2:.2e}, tr3 {t3:.2e}");
    if t2 <= 1e-3 && t3 <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let res: Vec<(usize, usize, f64, String)> = generic_sets()
        .par_iter()
        .map(|w| {
            let g = gradients(w, StepPolicy::default()).map_err(|e| e.to_string())?;
            let prof = reconstruct_profile(w, 256, false).map_err(|e| e.to_string())?;
            let d = monodromy_derivatives(&prof, 1, 1e-12).map_err(|e| e.to_string())?;
            let cf = closed_form_m0(&prof, &g).map_err(|e| e.to_string())?;
            let mismatch = (cf.m0 - d.m0).abs().max();
            Ok((cf.jordan.algebraic, cf.jordan.geometric, mismatch, fmt_params(w)))
        })
        .collect::<Result<_, String>>()?;
    let bad: Vec<_> = res.iter().filter(|r| r.0 != 3 || r.1 != 2 || r.2 > 1e-6).collect();
    let worst = res.iter().map(|r| r.2).fold(0.0, f64::max);
    if bad.is_empty() {
        Ok(format!("10 sets: multiplicities (3, 2), max closed-form mismatch {worst:.2e}"))
    } else {
        Err(format!("{} sets fail, first {:?}", bad.len(), bad[0]))
    }
}

fn criterion_5() -> Outcome {
    let (a0, e0) = DEFAULT_SOLITARY_PATH;
    let mut lines = Vec::new();
    let mut below: Option<f64> = None;
    let mut above: Option<f64> = None;
    for p in [1.0, 2.0, 3.0, 5.0, 6.0] {
        let r = solitary_limit_report(p, a0, e0).map_err(|e| format!("p={p}: {e}"))?;
        if r.delta_sign != (4.0 - p).signum() {
            return Err(format!("p={p}: sign of delta {} but 4 - p = {}", r.delta_sign, 4.0 - p));
        }
        if !r.asymptotic_agrees() {
            return Err(format!("p={p}: orientation sign {} against asymptotic {}", r.orientation_sign, r.asymptotic_sign));
        }
        let slot = if p < 4.0 { &mut below } else { &mut above };
        match slot {
            None => *slot = Some(r.orientation_sign),
            Some(s) if *s != r.orientation_sign => return Err(format!("p={p}: orientation sign not uniform on its side of 4")),
            _ => {}
        }
        lines.push(format!("p={p}:{:+}", r.orientation_sign));
    }
    if below == above {
        return Err("orientation sign does not flip across p = 4".into());
    }
    let sweep: Vec<f64> = (0..12)
        .into_par_iter()
        .map(|i| {
            let w = wave(1.0, 0.0, 1.0, 0.04 + 0.08 * i as f64);
            let g = gradients(&w, StepPolicy::default()).map_err(|e| e.to_string())?;
            compute_indices(&w, &g, None).map(|idx| idx.delta).map_err(|e| e.to_string())
        })
        .collect::<Result<_, String>>()?;
    if let Some(d) = sweep.iter().find(|&&d| !(d > 0.0)) {
        return Err(format!("KdV sweep has delta = {d}"));
    }
    Ok(format!("orientation {}; KdV delta > 0 on 12 energies", lines.join(" ")))
}

/// Hill vs bands at κ = γ, and slopes of the unstable branches.
fn bands_against_hill(w: &WaveParameters, nodes: usize) -> Result<(f64, Option<f64>, Modulational), String> {
    let g = gradients(w, StepPolicy::default()).map_err(|e| e.to_string())?;
    let idx = compute_indices(w, &g, None).map_err(|e| e.to_string())?;
    let class = classify(&idx).modulational;
    let prof = reconstruct_profile(w, nodes, false).map_err(|e| e.to_string())?;
    let gammas = [0.05, 0.1, 0.2];
    let bands = trace_bands_at(&prof, &idx, &gammas, 1e-12).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for &gm in &gammas {
        let h = hill_spectrum(&prof, gm, 128).map_err(|e| e.to_string())?;
        for z in &h.near_origin {
            let d = bands
                .branches
                .iter()
                .flatten()
                .filter(|p| p.kappa == gm)
                .map(|p| (p.mu - z).norm() / p.mu.norm().max(z.norm()))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    let mut slope_err = None;
    if class == Modulational::UnstableTwoBranches {
        let fine = trace_bands(&prof, &idx, 0.2, 20).map_err(|e| e.to_string())?;
        let mut err: f64 = 0.0;
        for (j, y) in fine.normal_form.y.iter().enumerate() {
            if y.im == 0.0 {
                continue;
            }
            let s = real_part_slope(&fine.branches[j], 0.05).ok_or("slope fit failed")?;
            if s == 0.0 {
                return Err(format!("branch {j} has zero real part"));
            }
            err = err.max((s - y.im).abs() / y.im.abs());
        }
        slope_err = Some(err);
    }
    Ok((worst, slope_err, class))
}

fn criterion_6() -> Outcome {
    let (hill_s, slope, class_s) = bands_against_hill(&fixed(5.0, 1e-4, -1e-6), 512)?;
    let (hill_k, _, class_k) = bands_against_hill(&fixed(1.0, 0.0, -0.1), 512)?;
    let slope = slope.ok_or("p = 5 near-solitary wave is not in the two-branch regime")?;
    let msg = format!(
        "p=5 ({class_s:?}) Hill/bands {hill_s:.2e}, slope error {:.2}%; p=1 ({class_k:?}) Hill/bands {hill_k:.2e}",
        100.0 * slope
    );
    if hill_s <= 5e-3 && hill_k <= 5e-3 && slope <= 0.05 && class_k == Modulational::StableTripleImaginary {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let mut sets = generic_sets();
    sets[7] = fixed(5.0, 0.0, -1e-4);
    let res: Vec<(usize, usize, f64, String)> = sets
        .par_iter()
        .map(|w| {
            let g = gradients(w, StepPolicy::default()).map_err(|e| e.to_string())?;
            let idx = compute_indices(w, &g, None).map_err(|e| e.to_string())?;
            let prof = reconstruct_profile(w, 256, false).map_err(|e| e.to_string())?;
            let scan = real_axis_scan(&prof, None, 2048, None).map_err(|e| format!("{}: {e}", fmt_params(w)))?;
            Ok((scan.periodic_positive, scan.antiperiodic_positive, idx.tr3, fmt_params(w)))
        })
        .collect::<Result<_, String>>()?;
    for (per, anti, tr3, at) in &res {
        if anti % 2 != 0 {
            return Err(format!("{at}: {anti} positive antiperiodic roots"));
        }
        if (per % 2 == 1) != (*tr3 > 0.0) {
            return Err(format!("{at}: {per} positive periodic roots with tr3 = {tr3:.3e}"));
        }
    }
    let long = &res[7];
    if long.0 != 1 {
        return Err(format!("{}: expected exactly one positive periodic root, found {}", long.3, long.0));
    }
    let counts: Vec<String> = res.iter().map(|r| format!("{}/{}", r.0, r.1)).collect();
    Ok(format!("10 sets, periodic/antiperiodic counts {}", counts.join(" ")))
}

fn criterion_8() -> Outcome {
    let sets = generic_sets();
    let res: Vec<([f64; 3], Option<f64>, ChainPartner, String)> = sets
        .par_iter()
        .map(|w| {
            let prof = reconstruct_profile(w, 512, true).map_err(|e| e.to_string())?;
            let g = gradients(w, StepPolicy::default()).map_err(|e| e.to_string())?;
            let nb = null_basis(&prof, &g).map_err(|e| format!("{}: {e}", fmt_params(w)))?;
            Ok((nb.residuals, nb.inner_product_relative, nb.partner, fmt_params(w)))
        })
        .collect::<Result<_, String>>()?;
    let mut paired = 0;
    let mut worst = [0.0f64; 4];
    for (r, pair, _, at) in &res {
        if r[0] > 1e-5 || r[1] > 1e-5 || r[2] > 1e-4 {
            return Err(format!("{at}: residuals {r:?}"));
        }
        for k in 0..3 {
            worst[k] = worst[k].max(r[k]);
        }
        if let Some(p) = pair {
            paired += 1;
            worst[3] = worst[3].max(*p);
            if *p > 1e-3 {
                return Err(format!("{at}: pairing mismatch {p:.2e}"));
            }
        }
    }
    if paired == 0 {
        return Err("no set had the mass partner, pairing never checked".into());
    }
    Ok(format!(
        "10 sets: residuals {:.1e} {:.1e} {:.1e}; pairing {:.1e} on {paired} sets",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gkdv")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("gkdv {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let first = run_cli(&["validate", "--preset", "kdv"])?;
    let second = run_cli(&["validate", "--preset", "kdv"])?;
    if first != second {
        return Err("repeated validate output differs".into());
    }
    let csv_bytes = run_cli(&["band-trace", "--preset", "kdv", "--format", "csv"])?;
    let json_bytes = run_cli(&["band-trace", "--preset", "kdv", "--format", "json"])?;
    let rows: Vec<BandRow> = csv::Reader::from_reader(csv_bytes.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let doc: serde_json::Value = serde_json::from_slice(&json_bytes).map_err(|e| e.to_string())?;
    let points: Vec<&serde_json::Value> =
        doc["result"]["bands"]["branches"].as_array().ok_or("no branches")?.iter().flat_map(|b| b.as_array().unwrap()).collect();
    if points.len() != rows.len() {
        return Err(format!("{} CSV rows vs {} JSON points", rows.len(), points.len()));
    }
    let mut worst: f64 = 0.0;
    for (row, p) in rows.iter().zip(&points) {
        let f = |v: &serde_json::Value| v.as_f64().unwrap();
        let pairs = [(row.kappa, f(&p["kappa"])), (row.re_mu, f(&p["mu"][0])), (row.im_mu, f(&p["mu"][1])), (row.residual, f(&p["residual"]))];
        for (x, y) in pairs {
            let d = if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()) };
            worst = worst.max(d);
        }
    }
    let msg = format!("{} validate bytes identical; {} band rows round-trip, max relative {worst:.1e}", first.len(), rows.len());
    if worst <= 1e-15 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("action-gradient identities", criterion_1),
        ("monodromy sanity", criterion_2),
        ("trace identities", criterion_3),
        ("Jordan structure", criterion_4),
        ("sign laws", criterion_5),
        ("normal form vs Hill", criterion_6),
        ("real-axis parity", criterion_7),
        ("null-basis residuals", criterion_8),
        ("determinism and round-trip", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(m) => println!("criterion {}: PASS  {name} [{secs:.1}s] {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.1}s] {m}", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
