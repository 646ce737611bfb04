//! Acceptance gate: eleven end-to-end criteria, one pass/fail line each.
//!
//! Every criterion prints exactly one line of the form
//! `criterion N (<what it checks>): PASS|FAIL — <measured detail>` and then
//! asserts.  Tolerances are pinned in the assertions; nothing is tuned at
//! run time.  Monte Carlo references are deterministic (fixed seeds).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rislink::cascade::{
    direct_snr_pdf, mobility_link_pdf, risd_snr, snr_transform, zi_moment, zi_pdf, zris_bound,
    zris_exact, DirectLink, ElementConfig, Method, Mobility, SNRConfig, SpecialCase, Which,
    ZSource,
};
use rislink::fading::{
    dgg_pdf, genk_pdf, genk_pdf_meijer, kappa_mu_pdf, rwp_pdf, sample_dgg, sample_genk,
    sample_kappa_mu, sample_rwp, DGGParams, GenKParams, KappaMuParams, PhaseNoise, RWPTopology,
};
use rislink::mc::{empirical_ber, empirical_cdf, simulate, MCConfig, SampleSet, ScenarioConfig};
use rislink::metrics::{ber_numeric, diversity_order, Modulation};
use rislink::specfun::gamma_q;

// ---------------------------------------------------------------------------
// Reporting and quadrature helpers
// ---------------------------------------------------------------------------

fn report(n: u32, desc: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n} ({desc}): {verdict} — {detail}");
    assert!(pass, "criterion {n} ({desc}): FAIL — {detail}");
}

/// Simpson's rule in u = ln x (handles power-law edges and heavy tails).
fn integrate_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let (a, b) = (lo.ln(), hi.ln());
    let h = (b - a) / n as f64;
    let g = |u: f64| {
        let x = u.exp();
        f(x) * x
    };
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Plain Simpson's rule on [a, b].
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Reference single-element cascade over a 2 m waypoint segment.
fn element(phase: PhaseNoise) -> ElementConfig {
    ElementConfig::reference(2.0, phase).unwrap()
}

/// Direct link matching the reference scenario fading, on a 2 m segment.
fn toy_direct() -> DirectLink {
    DirectLink {
        fading: GenKParams::new(1.0, 2.5454, 1.0).unwrap(),
        mobility: RWPTopology::one_d(2.0),
        path_exponent: 2.0,
    }
}

/// Physical element envelope: first hop × second hop × r^{−a/2}.
fn draw_element(cfg: &ElementConfig, rng: &mut ChaCha8Rng) -> f64 {
    let h = sample_kappa_mu(&cfg.first_hop, rng);
    let g = sample_dgg(&cfg.second_hop, rng);
    let r = match &cfg.mobility {
        Mobility::Waypoint(t) => sample_rwp(t, rng),
        Mobility::Static { distance } => *distance,
    };
    h * g * r.powf(-cfg.path_exponent / 2.0)
}

/// Empirical quantiles of a sorted sample at the given probe levels.
fn quantile_points(sorted: &[f64], levels: &[f64]) -> Vec<f64> {
    levels.iter().map(|p| sorted[((p * sorted.len() as f64) as usize).min(sorted.len() - 1)]).collect()
}

// ---------------------------------------------------------------------------
// 1. Normalization suite
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_01_density_normalizations() {
    let t0 = Instant::now();
    let mut worst_elem = 0.0f64; // elementary densities, tolerance 1e-6
    let mut worst_contour = 0.0f64; // contour-integral densities, tolerance 1e-3

    let km = KappaMuParams::new(4.0, 2.0).unwrap();
    worst_elem = worst_elem.max((integrate_log(|x| kappa_mu_pdf(&km, x).unwrap(), 1e-8, 20.0, 2000) - 1.0).abs());

    let dgg = DGGParams::unit(2.0, 1.0, 2.0, 2.0).unwrap();
    worst_elem = worst_elem.max((integrate_log(|x| dgg_pdf(&dgg, x).unwrap(), 1e-8, 50.0, 2000) - 1.0).abs());

    let gk = GenKParams::new(1.0, 2.5454, 1.0).unwrap();
    worst_elem = worst_elem.max((integrate_log(|x| genk_pdf(&gk, x).unwrap(), 1e-8, 40.0, 2000) - 1.0).abs());

    for topo in [RWPTopology::one_d(1.0), RWPTopology::two_d(1.0), RWPTopology::three_d(1.0)] {
        worst_elem = worst_elem.max((integrate(|r| rwp_pdf(&topo, r).unwrap(), 0.0, 1.0, 2000) - 1.0).abs());
    }

    // Contour-integral laws: mobility-averaged second hop, element statistic
    // (both phase models), and the direct-branch SNR density.  These have
    // power-law tails of index 2, so the truncated mass beyond x = 300 is
    // below 1e-5.
    // The contour form needs x bounded away from 0 (relative-tolerance
    // stalls on ~1e-8 values); the omitted mass below 1e-5 is ~1e-10.
    let gkm = integrate_log(|x| genk_pdf_meijer(&gk, x).unwrap(), 1e-5, 40.0, 800);
    worst_contour = worst_contour.max((gkm - 1.0).abs());
    let ml = integrate_log(|x| mobility_link_pdf(&dgg, &RWPTopology::one_d(2.0), 2.0, x).unwrap(), 1e-6, 300.0, 800);
    worst_contour = worst_contour.max((ml - 1.0).abs());
    for phase in [PhaseNoise::Perfect, PhaseNoise::Bits(1)] {
        let cfg = element(phase);
        let i = integrate_log(|x| zi_pdf(&cfg, x).unwrap(), 1e-6, 300.0, 800);
        worst_contour = worst_contour.max((i - 1.0).abs());
    }
    let ds = integrate_log(
        |g| direct_snr_pdf(&gk, &RWPTopology::one_d(2.0), 2.0, 1.0, g).unwrap(),
        1e-12,
        1e7,
        1200,
    );
    worst_contour = worst_contour.max((ds - 1.0).abs());

    let secs = t0.elapsed().as_secs_f64();
    let pass = worst_elem <= 1e-6 && worst_contour <= 1e-3 && secs < 300.0;
    report(
        1,
        "every analytic density integrates to 1",
        pass,
        &format!(
            "max |∫f−1| = {worst_elem:.2e} elementary (tol 1e-6), {worst_contour:.2e} contour-based (tol 1e-3), {secs:.0} s (< 300 s)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 2. Waypoint weight normalization and rejection of the mis-printed table
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_02_waypoint_weights() {
    let mut worst = 0.0f64;
    for topo in [RWPTopology::one_d(1.0), RWPTopology::two_d(1.0), RWPTopology::three_d(1.0)] {
        worst = worst.max((topo.normalization_sum() - 1.0).abs());
    }
    // The mis-transcribed 2-D exponent table must fail construction, and the
    // validation report must demonstrate the failure.
    let bad = RWPTopology::new(
        vec![324.0 / 73.0, -420.0 / 73.0, 96.0 / 73.0],
        vec![1, 3, 55],
        1.0,
    );
    let dir = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_rislink"))
        .args(["--out", dir.path().to_str().unwrap(), "validate", "fast"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let demonstrated = text
        .lines()
        .any(|l| l.starts_with("[PASS]") && l.contains("([1,3,55]) are rejected"));
    let pass = worst <= 1e-12 && bad.is_err() && demonstrated && out.status.success();
    report(
        2,
        "waypoint weights sum to 1 exactly; mis-printed 2-D table rejected",
        pass,
        &format!(
            "max |ΣB_j/(β_j+1) − 1| = {worst:.1e} (tol 1e-12); [1,3,55] variant rejected = {}; shown in validation report = {demonstrated}",
            bad.is_err()
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. Single-element quantized-phase density vs a physical simulation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_03_element_density_vs_simulation() {
    let cfg = element(PhaseNoise::Bits(1));
    let trials = 1_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // Physically, |Z e^{jθ}| = Z for a single element: the residual phase
    // cannot change the envelope law.  The samples below are the exact
    // physical envelope.
    let (lo, hi, bins) = (0.05f64, 3.0f64, 40usize);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for _ in 0..trials {
        let z = draw_element(&cfg, &mut rng);
        if z >= lo && z < hi {
            counts[((z - lo) / width) as usize] += 1;
        }
    }
    let mut sup = 0.0f64;
    for (i, c) in counts.iter().enumerate() {
        let center = lo + (i as f64 + 0.5) * width;
        let dens = *c as f64 / (trials as f64 * width);
        sup = sup.max((dens - zi_pdf(&cfg, center).unwrap()).abs());
    }
    report(
        3,
        "1-bit single-element density matches a 10⁶-sample physical histogram",
        sup <= 0.02,
        &format!(
            "sup-norm = {sup:.3} (tol 0.02).  The analytic 1-bit law is a formal quasi-density: \
             for one element the physical envelope is phase-free (|Z e^{{jθ}}| = Z), so the \
             quantization-dependent analytic density cannot coincide with the physical histogram"
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Element moments against simulation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_04_element_moments() {
    // Static receiver (waypoint averaging makes E[Z²] diverge at a = 2) and
    // ideal phase (so the analytic moments are physical).
    let cfg = ElementConfig::new(
        KappaMuParams::new(4.0, 2.0).unwrap(),
        DGGParams::unit(2.0, 1.0, 2.0, 2.0).unwrap(),
        Mobility::Static { distance: 2.0 },
        PhaseNoise::Perfect,
        2.0,
    )
    .unwrap();
    let m0 = zi_moment(&cfg, 0.0).unwrap();
    let trials = 1_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut s1, mut s2, mut s2sq, mut s4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let z = draw_element(&cfg, &mut rng);
        s1 += z;
        s2 += z * z;
        s2sq += z * z; // accumulator reused below for variance of z
        s4 += z * z * z * z;
    }
    let n = trials as f64;
    let (m1_mc, m2_mc) = (s1 / n, s2 / n);
    let se1 = ((s2sq / n - m1_mc * m1_mc) / n).sqrt();
    let se2 = ((s4 / n - m2_mc * m2_mc) / n).sqrt();
    let m1 = zi_moment(&cfg, 1.0).unwrap();
    let m2 = zi_moment(&cfg, 2.0).unwrap();
    let d1 = (m1 - m1_mc).abs() / se1;
    let d2 = (m2 - m2_mc).abs() / se2;
    let pass = (m0 - 1.0).abs() <= 1e-6 && d1 <= 3.0 && d2 <= 3.0;
    report(
        4,
        "element moments r ∈ {0,1,2} match a 10⁶-sample simulation",
        pass,
        &format!(
            "|m₀−1| = {:.1e} (tol 1e-6); m₁ off by {d1:.2} SE, m₂ off by {d2:.2} SE (tol 3 SE)",
            (m0 - 1.0).abs()
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. Two-element exact sum CDF against simulation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_05_two_element_exact_cdf() {
    let cfg = element(PhaseNoise::Perfect);
    let cfgs = [cfg.clone(), cfg.clone()];
    let trials = 400_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut z: Vec<f64> = (0..trials)
        .map(|_| draw_element(&cfg, &mut rng) + draw_element(&cfg, &mut rng))
        .collect();
    z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let levels: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let pts = quantile_points(&z, &levels);
    let mut worst = 0.0f64;
    for (p, x) in levels.iter().zip(&pts) {
        let f = zris_exact(&cfgs, *x, Which::Cdf).unwrap();
        worst = worst.max((f - p).abs());
    }
    report(
        5,
        "N = 2 exact sum CDF matches simulation at 10 grid points",
        worst <= 0.02,
        &format!("max |F_exact − F̂| = {worst:.4} over 10 quantile points (tol 0.02)"),
    );
}

// ---------------------------------------------------------------------------
// 6. Sum-statistic bound dominance and N = 1 degeneracy
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_06_bound_dominates_simulation() {
    let cfg = element(PhaseNoise::Perfect);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let levels: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let mut worst_slack = f64::INFINITY; // min over points of (bound − MC)
    for n in [2usize, 3] {
        let cfgs = vec![cfg.clone(); n];
        let trials = 200_000usize;
        let mut z: Vec<f64> = (0..trials)
            .map(|_| (0..n).map(|_| draw_element(&cfg, &mut rng)).sum())
            .collect();
        z.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (p, x) in levels.iter().zip(quantile_points(&z, &levels)) {
            let fb = zris_bound(&cfgs, x, Which::Cdf).unwrap();
            worst_slack = worst_slack.min(fb - p);
        }
    }
    // At N = 1 the inequality used by the bound is an identity.
    let mut worst_eq = 0.0f64;
    for i in 1..=10 {
        let x = 0.3 * i as f64;
        let e = zris_exact(std::slice::from_ref(&cfg), x, Which::Cdf).unwrap();
        let b = zris_bound(std::slice::from_ref(&cfg), x, Which::Cdf).unwrap();
        worst_eq = worst_eq.max((e - b).abs());
    }
    let pass = worst_slack >= -0.01 && worst_eq <= 1e-3;
    report(
        6,
        "CDF bound dominates simulation for N ∈ {2,3}; equals the exact law at N = 1",
        pass,
        &format!("min (bound − F̂) = {worst_slack:.4} (≥ −0.01); max N=1 |bound − exact| = {worst_eq:.1e} (tol 1e-3)"),
    );
}

// ---------------------------------------------------------------------------
// 7. Combined RIS + direct SNR law
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_07_combined_snr_law() {
    let cfg = element(PhaseNoise::Perfect);
    let direct = toy_direct();
    let s = SNRConfig::new(2.0, 1.5, true, 1, Some(direct.clone())).unwrap();
    let trials = 400_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut g: Vec<f64> = (0..trials)
        .map(|_| {
            let z = draw_element(&cfg, &mut rng);
            let zd = sample_genk(&direct.fading, &mut rng)
                * sample_rwp(&direct.mobility, &mut rng).powf(-direct.path_exponent / 2.0);
            2.0 * z * z + 1.5 * zd * zd
        })
        .collect();
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let levels: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    for (p, x) in levels.iter().zip(quantile_points(&g, &levels)) {
        let e = risd_snr(&s, std::slice::from_ref(&cfg), x, Which::Cdf, Method::Exact).unwrap();
        let b = risd_snr(&s, std::slice::from_ref(&cfg), x, Which::Cdf, Method::Bound).unwrap();
        worst = worst.max((e - p).abs());
        worst_slack = worst_slack.min(b - e);
    }
    let pass = worst <= 0.02 && worst_slack >= -1e-3;
    report(
        7,
        "N = 1 + direct exact SNR CDF matches simulation; bound dominates it",
        pass,
        &format!("max |F_exact − F̂| = {worst:.4} (tol 0.02); min (bound − exact) = {worst_slack:.1e} (≥ −1e-3)"),
    );
}

// ---------------------------------------------------------------------------
// 8. Outage diversity order
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_08_diversity_order() {
    let cfg = element(PhaseNoise::Bits(1));
    let g1 = diversity_order(std::slice::from_ref(&cfg), None).unwrap();
    let g3 = diversity_order(&[cfg.clone(), cfg.clone()], Some(&toy_direct())).unwrap();

    // Simulated slope of the outage curve between 1e-2 and 1e-4.
    let sc = ScenarioConfig::reference(1, PhaseNoise::Bits(1), false, 30.0).unwrap();
    let samples = simulate(&sc, &MCConfig::new(10_000_000, 23)).unwrap();
    let sorted = samples.sorted();
    let q2 = sorted[(0.01 * sorted.len() as f64) as usize];
    let q4 = sorted[(1e-4 * sorted.len() as f64) as usize];
    // Outage ∝ γ̄^{−G}: moving the threshold across two decades of outage
    // spans 2/G decades of SNR scale.
    let g_mc = 2.0 / (q2 / q4).log10();
    let pass = (g1 - 1.0).abs() <= 1e-9 && (g3 - 3.0).abs() <= 1e-9 && (g_mc - 1.0).abs() <= 0.15;
    report(
        8,
        "analytic diversity orders (1 and 3) and the simulated outage slope",
        pass,
        &format!("G(N=1) = {g1}; G(N=2 + direct) = {g3}; simulated slope = {g_mc:.3} (within 15% of 1)"),
    );
}

// ---------------------------------------------------------------------------
// 9. Published operating-point trends at 10⁷ trials
// ---------------------------------------------------------------------------

/// Sample quantile at outage level `q` (higher is better link).
fn outage_quantile(sorted: &[f64], q: f64) -> f64 {
    sorted[(q * sorted.len() as f64) as usize]
}

/// Transmit power (dBm) at which the average BPSK BER hits `target`,
/// rescaling a reference-power sample set (SNR is linear in transmit power).
fn ber_power_point(sorted: &[f64], target: f64) -> f64 {
    let ber_at = |p_dbm: f64| -> f64 {
        let scale = 10f64.powf((p_dbm - 30.0) / 10.0);
        let mut acc = 0.0;
        for &g in sorted {
            let x = g * scale;
            acc += if x > 0.0 { 0.5 * gamma_q(0.5, x).unwrap() } else { 0.5 };
        }
        acc / sorted.len() as f64
    };
    let (mut lo, mut hi) = (0.0f64, 60.0f64);
    for _ in 0..22 {
        let mid = 0.5 * (lo + hi);
        if ber_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn acceptance_criterion_09_operating_point_trends() {
    let trials = 10_000_000usize;
    let seed = 424_242u64;
    let run = |sc: &ScenarioConfig| -> Vec<f64> {
        let t = Instant::now();
        let s = simulate(sc, &MCConfig::new(trials, seed)).unwrap().sorted();
        assert!(t.elapsed().as_secs() < 1800, "single 10⁷-trial run exceeded 30 min");
        s
    };
    let scen = |n: usize, phase: PhaseNoise, omega: bool| ScenarioConfig::reference(n, phase, omega, 30.0).unwrap();

    // (a), (b): phase-quantization gaps at outage 1e-3, N = 10.
    let q_perfect = outage_quantile(&run(&scen(10, PhaseNoise::Perfect, false)), 1e-3);
    let q_l1 = outage_quantile(&run(&scen(10, PhaseNoise::Bits(1), false)), 1e-3);
    let l2 = run(&scen(10, PhaseNoise::Bits(2), false));
    let q_l2 = outage_quantile(&l2, 1e-3);
    let gap_a = 10.0 * (q_perfect / q_l1).log10();
    let gap_b = 10.0 * (q_l2 / q_l1).log10();

    // (c): BER 1e-4 power points for (N=10, L=2), (N=20, L=1), (N=50, L=1).
    let p10 = ber_power_point(&l2, 1e-4);
    drop(l2);
    let p20 = ber_power_point(&run(&scen(20, PhaseNoise::Bits(1), false)), 1e-4);
    let p50 = ber_power_point(&run(&scen(50, PhaseNoise::Bits(1), false)), 1e-4);

    // (d): direct-link gains at outage 1e-3.  The direct-only baseline keeps
    // the combined receiver but drives the RIS branch to −300 dB.
    let mut direct_only = scen(1, PhaseNoise::Perfect, true);
    direct_only.ris_cal_db = -300.0;
    let q_d = outage_quantile(&run(&direct_only), 1e-3);
    let q_n10 = outage_quantile(&run(&scen(10, PhaseNoise::Perfect, true)), 1e-3);
    let q_n20 = outage_quantile(&run(&scen(20, PhaseNoise::Perfect, true)), 1e-3);
    let gain10 = 10.0 * (q_n10 / q_d).log10();
    let gain20 = 10.0 * (q_n20 / q_d).log10();

    let pass = (gap_a - 6.0).abs() <= 1.5
        && (gap_b - 5.0).abs() <= 1.5
        && (p10 - 38.0).abs() <= 2.0
        && (p20 - 34.0).abs() <= 2.0
        && (p50 - 24.0).abs() <= 2.0
        && (gain10 - 8.0).abs() <= 2.0
        && (gain20 - 14.0).abs() <= 2.0;
    report(
        9,
        "published outage/BER operating points at 10⁷ trials",
        pass,
        &format!(
            "1-bit vs ideal gap {gap_a:.2} dB (6±1.5); 1-bit vs 2-bit gap {gap_b:.2} dB (5±1.5); \
             BER 1e-4 at {p10:.2}/{p20:.2}/{p50:.2} dBm (38/34/24 ±2); \
             direct-link gains {gain10:.2}/{gain20:.2} dB (8/14 ±2)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 10. BER quadrature
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_10_ber_quadrature() {
    let bpsk = Modulation::bpsk();
    // Rayleigh SNR, unit mean: closed form (1/2)(1 − √(1/2)) = 0.14644661…
    let exact = ber_numeric(|g| Ok(1.0 - (-g).exp()), &bpsk).unwrap();
    let d_exact = (exact - 0.146_446_6).abs();

    // Same quadrature on an empirical CDF vs the direct sample average.
    let trials = 1_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let snr: Vec<f64> = (0..trials).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let samples = SampleSet { snr };
    let (avg, _se) = empirical_ber(&samples, &bpsk).unwrap();
    let sorted = samples.sorted();
    let grid: Vec<f64> = (0..200).map(|i| 1e-6 * (2e7f64).powf(i as f64 / 199.0)).collect();
    let emp = empirical_cdf(&samples, &grid).unwrap();
    assert!(emp.cdf.last().copied().unwrap() > 0.999, "grid covers the sample range");
    let from_cdf = ber_numeric(
        |g| {
            let k = sorted.partition_point(|&s| s <= g);
            Ok(k as f64 / sorted.len() as f64)
        },
        &bpsk,
    )
    .unwrap();
    let rel = (from_cdf / avg - 1.0).abs();
    let pass = d_exact <= 1e-6 && rel <= 0.02;
    report(
        10,
        "BER quadrature: exponential closed form and empirical-CDF consistency",
        pass,
        &format!(
            "|quadrature − 0.1464466| = {d_exact:.2e} (tol 1e-6); empirical-CDF vs sample-average \
             relative gap = {rel:.4} (tol 0.02)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 11. Rayleigh-mode collapse
// ---------------------------------------------------------------------------

#[test]
fn acceptance_criterion_11_rayleigh_collapse() {
    // Full parametrization driven to the Rayleigh limit vs the dedicated
    // special-case presets, on 10-point grids.
    let km = KappaMuParams::new(1e-9, 1.0).unwrap();
    let sh = DGGParams::unit(1.0, 2.0, 2.0, 2.0).unwrap();
    let full_static = ElementConfig::new(
        km,
        sh,
        Mobility::Static { distance: 1.0 },
        PhaseNoise::Bits(1),
        2.0,
    )
    .unwrap();
    let preset_static = element(PhaseNoise::Bits(1)).with_special_case(SpecialCase::RayleighStatic);
    let full_mob = ElementConfig::new(
        km,
        sh,
        Mobility::Waypoint(RWPTopology::one_d(2.0)),
        PhaseNoise::Perfect,
        2.0,
    )
    .unwrap();
    let preset_mob = element(PhaseNoise::Perfect).with_special_case(SpecialCase::RayleighMobility);

    let mut worst = 0.0f64;
    for i in 1..=10 {
        let x = 0.3 * i as f64;
        worst = worst.max((zi_pdf(&full_static, x).unwrap() - zi_pdf(&preset_static, x).unwrap()).abs());
        worst = worst.max((zi_pdf(&full_mob, x).unwrap() - zi_pdf(&preset_mob, x).unwrap()).abs());
    }
    // Two-element sum statistics and the SNR pullback in the same limit.
    let full2 = [full_mob.clone(), full_mob.clone()];
    let pre2 = [preset_mob.clone(), preset_mob.clone()];
    let s = SNRConfig::new(1.0, 1.0, false, 2, None).unwrap();
    for i in 1..=10 {
        let x = 0.5 * i as f64;
        worst = worst.max((zris_exact(&full2, x, Which::Cdf).unwrap() - zris_exact(&pre2, x, Which::Cdf).unwrap()).abs());
        worst = worst.max((zris_bound(&full2, x, Which::Cdf).unwrap() - zris_bound(&pre2, x, Which::Cdf).unwrap()).abs());
        let a = snr_transform(&s, x, Which::Cdf, &ZSource::Bound(&full2)).unwrap();
        let b = snr_transform(&s, x, Which::Cdf, &ZSource::Bound(&pre2)).unwrap();
        worst = worst.max((a - b).abs());
    }
    report(
        11,
        "Rayleigh-limit parametrization collapses onto the special-case presets",
        worst <= 1e-3,
        &format!("max deviation = {worst:.1e} over all 10-point grids (tol 1e-3)"),
    );
}
