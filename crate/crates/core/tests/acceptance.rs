//! End-to-end acceptance suite. One line per criterion; non-zero exit on failure.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use gevrey_lab::asymptotics::{asym_error_table, leading_terms, sharpness_sequence, CANONICAL_POINTS};
use gevrey_lab::cubic::{certified_roots, companion_roots, discriminant_parts, triple_distance};
use gevrey_lab::decay::{
    default_time_grid, energy_derivative_check, simulate_decay, DecayFit, ModePropagator, ModeState,
};
use gevrey_lab::modal::{char_coeffs, interpolation_check};
use gevrey_lab::numeric::mat3;
use gevrey_lab::regions::{classify_coords, mu_index, region_grid, ParamPoint, RegionLabel};
use gevrey_lab::resolvent::{lower_bound_check, scan_and_fit, SpectrumModel};

const SEED: u64 = 0;

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

fn pt(a: f64, b: f64) -> ParamPoint {
    ParamPoint::new(a, b).unwrap()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let mut o = f();
    let dt = t0.elapsed();
    if let Some(limit) = limit {
        if dt > limit {
            o.pass = false;
            o.detail.push_str(&format!("; runtime {dt:.2?} exceeds {limit:?}"));
            return o;
        }
    }
    o.detail.push_str(&format!("; {dt:.2?}"));
    o
}

fn samples() -> Vec<(ParamPoint, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..10_000)
        .map(|_| {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            let mu = 10f64.powf(12.0 * rng.random::<f64>());
            (pt(a, b), mu)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let worst = samples()
        .par_iter()
        .map(|(p, mu)| {
            let co = char_coeffs(*mu, p).unwrap();
            let a = certified_roots(&co).unwrap();
            let b = companion_roots(&co).unwrap();
            triple_distance(&a, &b)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("max |Δλ|/(1+|λ|) = {worst:.2e} over 10^4 samples"),
    )
}

fn vieta_suite() -> Outcome {
    let worst = samples()
        .par_iter()
        .map(|(p, mu)| {
            let co = char_coeffs(*mu, p).unwrap();
            let t = certified_roots(&co).unwrap();
            t.vieta_errors(&co).into_iter().fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-9, format!("max Vieta relative error {worst:.2e}"))
}

fn leading_terms_reproduction() -> Outcome {
    let mu: f64 = 1e10;
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, a, b) in CANONICAL_POINTS {
        let p = pt(a, b);
        let (dl, ql) = leading_terms(&p).unwrap();
        let parts = discriminant_parts(&char_coeffs(mu, &p).unwrap());
        let ratio = |sign: i8, ln_abs: f64, c: f64, e: f64| {
            f64::from(sign) * c.signum() * (ln_abs - c.abs().ln() - e * mu.ln()).exp()
        };
        let rd = ratio(parts.ln_delta.sign, parts.ln_delta.ln_abs, dl.coefficient, dl.exponent);
        let rq = ratio(parts.ln_q.sign, parts.ln_q.ln_abs, ql.coefficient, ql.exponent);
        for (what, r) in [("delta", rd), ("q", rq)] {
            worst = worst.max((r - 1.0).abs());
            if !(0.99..=1.01).contains(&r) {
                bad.push(format!("{name} ({a}, {b}) {what}/leading = {r:.4}"));
            }
        }
    }
    if bad.is_empty() {
        outcome(true, format!("max |ratio - 1| = {worst:.2e}"))
    } else {
        outcome(false, bad.join(", "))
    }
}

fn eigen_asymptotics() -> Outcome {
    let grid = [1e6, 1e8, 1e10, 1e12];
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, a, b) in CANONICAL_POINTS {
        let t = asym_error_table(&pt(a, b), &grid).unwrap();
        let cols: [Vec<f64>; 3] = [
            t.rows.iter().map(|r| r.err_lambda0).collect(),
            t.rows.iter().map(|r| r.err_re_pm).collect(),
            t.rows.iter().map(|r| r.err_im_pm).collect(),
        ];
        for (c, what) in cols.iter().zip(["lambda0", "re", "im"]) {
            let last = *c.last().unwrap();
            worst = worst.max(last);
            if last > 0.05 {
                bad.push(format!("{name} {what} error {last:.3e} at 1e12"));
            }
            if c.windows(2).any(|w| !(w[1] < w[0] || (w[1] == 0.0 && w[0] == 0.0))) {
                bad.push(format!("{name} {what} errors not decreasing: {c:?}"));
            }
        }
    }
    if bad.is_empty() {
        outcome(true, format!("max error at 1e12 = {worst:.2e}, all decreasing"))
    } else {
        outcome(false, bad.join(", "))
    }
}

fn resolvent_slopes() -> Outcome {
    let s = SpectrumModel::new(1.0, 2.0, 1_000_000_000, true).unwrap();
    let cases = [
        ("R1", 1.0, 1.0, -1.0, 0.05),
        ("R2", 0.5, 0.75, -0.5, 0.05),
        ("R3", 0.4, 0.3, -0.2, 0.05),
        ("R4", 0.75, 0.5, -2.0 / 3.0, 0.05),
        ("R5", 0.9, 0.2, -0.2 / 0.9, 0.05),
        ("S1", 0.1, 0.8, 1.2, 0.1),
        ("S2", 0.05, 0.2, 1.4, 0.1),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, a, b, want, tol) in cases {
        let p = pt(a, b);
        let r = scan_and_fit(&p, &s, 1e4, 1e8, 33).unwrap();
        let ok = (r.slope - want).abs() <= tol && (r.expected_slope - want).abs() < 1e-12;
        let bounded = r.point.alpha < 0.2 || r.max_scaled() <= 10.0;
        pass &= ok && bounded;
        parts.push(format!("{name} {:.4}", r.slope));
    }
    outcome(pass, format!("slopes: {}", parts.join(", ")))
}

fn sharpness_lower_bound() -> Outcome {
    let s = SpectrumModel::squares(10_000_000);
    let ns: Vec<u64> = (0..=70)
        .map(|i| 10f64.powf(i as f64 / 10.0).round() as u64)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut pass = true;
    let mut min_scaled = f64::INFINITY;
    let mut min_eb = f64::INFINITY;
    for (a, b) in [(0.5, 0.75), (0.4, 0.3), (0.75, 0.5)] {
        let lb = lower_bound_check(&pt(a, b), &s, &ns).unwrap();
        for r in &lb {
            min_eb = min_eb.min(r.eigen_bound);
            if r.mu >= 1e8 {
                min_scaled = min_scaled.min(r.scaled);
            }
        }
    }
    pass &= min_scaled >= 1.9 && min_eb >= 1.0 - 1e-12;
    outcome(
        pass,
        format!("min scaled value (mu >= 1e8) = {min_scaled:.4}, min |Re λ| N(Im λ) = {min_eb:.12}"),
    )
}

fn contraction_and_dissipation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // (point, μ, t, x, τ‖B‖): t for the contraction, τ in mode time units for the derivative.
    let cases: Vec<(ParamPoint, f64, f64, [Complex64; 3], f64)> = (0..1000)
        .map(|_| {
            let p = pt(rng.random(), rng.random());
            let mu = 10f64.powf(8.0 * rng.random::<f64>());
            let t = 10f64.powf(6.0 * rng.random::<f64>() - 3.0);
            let x = std::array::from_fn(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let tau = 10f64.powf(5.0 * rng.random::<f64>() - 3.0);
            (p, mu, t, x, tau)
        })
        .collect();
    let (worst_norm, worst_deriv) = cases
        .par_iter()
        .map(|(p, mu, t, x, tau)| {
            let m = ModePropagator::new(*mu, p).unwrap();
            let n = mat3::spectral_norm(&m.exp(*t).unwrap());
            let scale = mat3::spectral_norm(&m.block.matrix);
            let (_, _, rel) = energy_derivative_check(*mu, p, x, tau / scale).unwrap();
            (n, rel)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    outcome(
        worst_norm <= 1.0 + 1e-12 && worst_deriv <= 1e-8,
        format!("max ‖e^(Bt)‖ = {worst_norm:.15}, max derivative-identity error {worst_deriv:.2e}"),
    )
}

fn polynomial_decay_orders() -> Outcome {
    let s = SpectrumModel::squares(200);
    let grid = default_time_grid(1e-2, 1e5, 281);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, a, b, want) in [("S1", 0.1, 0.8, 1.0 / 1.2), ("S2", 0.05, 0.2, 1.0 / 1.4)] {
        let r = simulate_decay(&pt(a, b), &s, &ModeState::equidistributed(200), &grid).unwrap();
        match r.fit {
            DecayFit::Polynomial { order, window, .. } => {
                let inside = r.truncation_validity_horizon.is_none_or(|h| window[1] <= h);
                pass &= inside && ((order - want) / want).abs() <= 0.15;
                parts.push(format!(
                    "{name} order {order:.4} (target {want:.4}) on [{:.3}, {:.1}]",
                    window[0], window[1]
                ));
            }
            other => {
                pass = false;
                parts.push(format!("{name}: unexpected fit {other:?}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn non_decay_exhibit() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    let seq_spec = SpectrumModel::squares(10_000_000);
    // R5: λₙ,₀ → 0.
    let r5 = pt(0.9, 0.2);
    let l0: Vec<f64> = [1u64, 10, 100, 1000, 10_000, 100_000, 1_000_000, 10_000_000]
        .iter()
        .map(|&n| {
            certified_roots(&char_coeffs(seq_spec.mu(n), &r5).unwrap())
                .unwrap()
                .lambda0
                .re
        })
        .collect();
    let to_zero = l0.windows(2).all(|w| w[1].abs() < w[0].abs()) && l0.last().unwrap().abs() < 1e-7;
    pass &= to_zero;
    parts.push(format!("R5 λ0 at n=1e7: {:.3e}", l0.last().unwrap()));

    // S_I: Re λₙ,± → −1/2 with |λₙ| → ∞.
    let seq = sharpness_sequence(&pt(0.75, 0.0), &seq_spec, 0.1, 64).unwrap();
    let last = seq.last().unwrap();
    let re_ok = (last.re + 0.5).abs() < 1e-3
        && seq
            .windows(2)
            .skip(8)
            .all(|w| (w[1].re + 0.5).abs() <= (w[0].re + 0.5).abs());
    let grows = seq.windows(2).all(|w| w[1].modulus > w[0].modulus);
    pass &= re_ok && grows;
    parts.push(format!("SI Re λ+ at n=1e7: {:.6}, |λ| = {:.3e}", last.re, last.modulus));

    // Energy through the horizon.
    let s = SpectrumModel::squares(200);
    let grid = default_time_grid(1e-2, 1e5, 281);
    for (name, a, b) in [("R5", 0.9, 0.2), ("SI", 0.75, 0.0)] {
        let p = pt(a, b);
        let u0 = ModeState::slow_polarized(&p, &s).unwrap();
        let r = simulate_decay(&p, &s, &u0, &grid).unwrap();
        match r.fit {
            DecayFit::NonDecay { floor, energy_floor } => {
                pass &= energy_floor > 0.5 && floor > 0.5 && r.truncation_validity_horizon.is_some();
                parts.push(format!(
                    "{name} energy >= {energy_floor:.4}, operator norm >= {floor:.4} up to t = {:.3}",
                    r.truncation_validity_horizon.unwrap_or(f64::NAN)
                ));
            }
            other => {
                pass = false;
                parts.push(format!("{name}: unexpected fit {other:?}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn interpolation_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=64);
        let c = 10f64.powf(rng.random_range(-2.0..2.0));
        let pw = rng.random_range(0.5..3.0);
        let w: Vec<f64> = (1..=n).map(|i| c * (i as f64).powf(pw)).collect();
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut e = [
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
        ];
        e.sort_by(f64::total_cmp);
        if !interpolation_check(&x, &w, e[0], e[1], e[2]).unwrap() {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in 1000 vectors"))
}

fn region_grid_membership() -> Outcome {
    use RegionLabel::*;
    let listed = [
        (0.5, 0.5, R1),
        (0.25, 0.5, BoundaryResidual),
        (0.75, 0.0, SI),
        (1.0, 1.0, R1),
        (0.6, 0.7, R1),
        (0.6, 0.8, R2),
        (0.35, 0.69, R2),
        (0.5, 0.75, R2),
        (0.4, 0.3, R3),
        (0.5, 0.25, R3),
        (0.3, 0.5, R3),
        (0.75, 0.5, R4),
        (0.95, 0.9, R4),
        (0.9, 0.2, R5),
        (0.1, 0.8, S1),
        (0.05, 0.2, S2),
        (0.0, 0.0, S2),
        (1.0, 0.0, SI),
        (0.5, 0.0, BoundaryResidual),
        (0.3, 0.6, BoundaryResidual),
    ];
    let grid = region_grid(0.01).unwrap();
    let mut bad = Vec::new();
    for (a, b, want) in listed {
        let got = grid
            .iter()
            .find(|r| (r.alpha - a).abs() < 1e-12 && (r.beta - b).abs() < 1e-12)
            .map(|r| r.label);
        if got != Some(want) {
            bad.push(format!("({a}, {b}) -> {got:?}, want {want}"));
        }
    }

    // μ across the interfaces, one step of δ on either side.
    let d = 1e-6;
    let mu_at = |a: f64, b: f64| mu_index(&pt(a, b)).unwrap();
    let mut worst: f64 = 0.0;
    let mut crossings = 0;
    for i in 1..20 {
        let s = i as f64 / 20.0;
        let pairs = [
            // R1 | R2 along β = 2α − 1/2, α ∈ (1/2, 3/4)
            (
                (0.5 + 0.25 * s, 0.5 + 0.5 * s - d),
                (0.5 + 0.25 * s, 0.5 + 0.5 * s + d),
                (R1, R2),
            ),
            // R2 | R3 along β = 1/2, α ∈ (1/4, 1/2)
            ((0.25 + 0.25 * s, 0.5 + d), (0.25 + 0.25 * s, 0.5 - d), (R2, R3)),
            // R3 | R4 along α = 1/2, β ∈ (0, 1/2)
            ((0.5 - d, 0.5 * s), (0.5 + d, 0.5 * s), (R3, R4)),
            // R4 | R1 along β = α, α ∈ (1/2, 1)
            (
                (0.5 + 0.5 * s, 0.5 + 0.5 * s - d),
                (0.5 + 0.5 * s, 0.5 + 0.5 * s + d),
                (R4, R1),
            ),
        ];
        for ((a1, b1), (a2, b2), (l1, l2)) in pairs {
            if classify_coords(a1, b1) != l1 || classify_coords(a2, b2) != l2 {
                bad.push(format!(
                    "interface sample ({a1}, {b1}) / ({a2}, {b2}) not in {l1} / {l2}"
                ));
                continue;
            }
            worst = worst.max((mu_at(a1, b1) - mu_at(a2, b2)).abs());
            crossings += 1;
        }
    }
    if worst > 1e-4 {
        bad.push(format!("mu jump {worst:.2e} across an interface"));
    }
    if bad.is_empty() {
        outcome(
            true,
            format!("20 listed points match; max mu jump {worst:.2e} over {crossings} crossings"),
        )
    } else {
        outcome(false, bad.join(", "))
    }
}

type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 oracle equivalence", Some(10), oracle_equivalence),
        ("2 Vieta identities", None, vieta_suite),
        (
            "3 discriminant and q leading terms",
            Some(1),
            leading_terms_reproduction,
        ),
        ("4 eigenvalue asymptotics", Some(5), eigen_asymptotics),
        ("5 resolvent decay slopes", Some(60), resolvent_slopes),
        ("6 resolvent lower bound", None, sharpness_lower_bound),
        ("7 contraction and dissipation", None, contraction_and_dissipation),
        ("8 polynomial decay orders", Some(30), polynomial_decay_orders),
        ("9 non-decay exhibit", None, non_decay_exhibit),
        ("10 interpolation inequality", None, interpolation_inequality),
        ("11 region grid", None, region_grid_membership),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let o = timed(limit.map(Duration::from_secs), f);
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {failed} of 11 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
