//! Validation suite: normalization and identity checks on every analytic
//! layer, plus (full suite) million-sample Monte Carlo cross-checks, rendered
//! both human- and machine-readably from the same records.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rislink::cascade::{snr_transform, zi_moment, zi_pdf, ElementConfig, Mobility, SNRConfig, Which, ZSource};
use rislink::fading::{
    dgg_pdf, genk_pdf, genk_pdf_meijer, kappa_mu_pdf, kappa_mu_series_pdf, rwp_pdf, sample_dgg,
    sample_kappa_mu, sample_rwp, DGGParams, GenKParams, KappaMuParams, PhaseNoise, RWPTopology,
};
use rislink::mc::{link_budget, simulate, MCConfig, ScenarioConfig};
use rislink::metrics::{ber_numeric, Modulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::from("validation report\n=================\n");
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {:<68} observed {:>12.6e}  tolerance {:>9.3e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.tolerance
            ));
        }
        out.push_str("\ndiscrepancy notes\n-----------------\n");
        for n in &self.notes {
            out.push_str(&format!("* {n}\n"));
        }
        out
    }

    /// Machine-readable rendering (CSV), derived from the same records.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("check,tolerance,observed,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "\"{}\",{},{},{}\n",
                c.name.replace('"', "'"),
                c.tolerance,
                c.observed,
                c.pass
            ));
        }
        out
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn check(report: &mut ValidationReport, name: &str, observed: f64, tolerance: f64) {
    report.checks.push(Check {
        name: name.into(),
        tolerance,
        observed,
        pass: observed.abs() <= tolerance,
    });
}

/// The first-hop expansion exactly as printed in the source derivation
/// (missing factor 2, `(μ+k)` in place of `Γ(μ+k)`, `x^{μ+k−1} e^{−ζx}` in
/// place of `x^{2(μ+k)−1} e^{−ζx²}`).  Kept only to quantify its departure
/// from the true density in the validation report.
fn first_hop_series_as_printed(kappa: f64, mu: f64, x: f64) -> f64 {
    let zeta = mu * (1.0 + kappa);
    let mut sum = 0.0;
    let mut kfact = 1.0f64;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            kfact *= kf;
        }
        let psi = mu.powf(mu + 2.0 * kf) * kappa.powf(kf) * (1.0 + kappa).powf(mu + kf)
            / (kfact * (mu + kf) * (mu * kappa).exp());
        sum += psi * x.powf(mu + kf - 1.0) * (-zeta * x).exp();
    }
    sum
}

pub fn run(suite: Suite) -> ValidationReport {
    let mut r = ValidationReport::default();
    let km = KappaMuParams::new(4.0, 2.0).unwrap();
    let dgg = DGGParams::unit(2.0, 1.0, 2.0, 2.0).unwrap();
    let genk = GenKParams::new(1.0, 2.5454, 1.0).unwrap();

    // --- density normalizations -------------------------------------------
    let i = simpson(|x| kappa_mu_pdf(&km, x).unwrap(), 1e-9, 8.0, 4000);
    check(&mut r, "first-hop density integrates to 1 (kappa=4, mu=2)", i - 1.0, 1e-6);
    let i = simpson(|x| if x > 0.0 { dgg_pdf(&dgg, x).unwrap() } else { 0.0 }, 1e-9, 20.0, 4000);
    check(&mut r, "second-hop dGG density integrates to 1 (2,1,2,2)", i - 1.0, 1e-4);
    let i = simpson(|x| if x > 0.0 { genk_pdf(&genk, x).unwrap() } else { 0.0 }, 1e-9, 30.0, 6000);
    check(&mut r, "direct-link generalized-K density integrates to 1 (m=1, M=2.5454)", i - 1.0, 1e-4);
    for (name, t) in [
        ("1-D", RWPTopology::one_d(1.0)),
        ("2-D", RWPTopology::two_d(1.0)),
        ("3-D", RWPTopology::three_d(1.0)),
    ] {
        check(
            &mut r,
            &format!("waypoint weight sum B_j/(beta_j+1) = 1 ({name})"),
            t.normalization_sum() - 1.0,
            1e-12,
        );
        let i = simpson(|x| rwp_pdf(&t, x).unwrap(), 0.0, 1.0, 2000);
        check(&mut r, &format!("waypoint density integrates to 1 ({name})"), i - 1.0, 1e-9);
    }

    // --- the 2-D table as printed does not normalize ------------------------
    let printed =
        RWPTopology { b: vec![324.0 / 73.0, -420.0 / 73.0, 96.0 / 73.0], beta: vec![1, 3, 55], dmax: 1.0 };
    let sum = printed.normalization_sum();
    r.checks.push(Check {
        name: "2-D waypoint exponents as printed ([1,3,55]) are rejected (weight sum != 1)".into(),
        tolerance: 0.05,
        observed: sum - 1.0,
        pass: (sum - 1.0).abs() > 0.05
            && RWPTopology::new(printed.b.clone(), printed.beta.clone(), 1.0).is_err(),
    });

    // --- series and special-function identities ----------------------------
    let mut sup = 0.0f64;
    for i in 1..=60 {
        let x = i as f64 * 0.05;
        sup = sup.max((kappa_mu_series_pdf(&km, x).unwrap() - kappa_mu_pdf(&km, x).unwrap()).abs());
    }
    check(&mut r, "corrected first-hop series matches the Bessel-form density (sup norm)", sup, 1e-9);
    let mut sup_printed = 0.0f64;
    for i in 1..=60 {
        let x = i as f64 * 0.05;
        sup_printed =
            sup_printed.max((first_hop_series_as_printed(4.0, 2.0, x) - kappa_mu_pdf(&km, x).unwrap()).abs());
    }
    r.checks.push(Check {
        name: "first-hop series as printed departs from the true density (sup norm)".into(),
        tolerance: 0.01,
        observed: sup_printed,
        pass: sup_printed > 0.01,
    });
    r.notes.push(format!(
        "The first-hop series expansion as printed is not a density (measured sup-norm departure {sup_printed:.3e} \
         at kappa=4, mu=2); the implementation carries the corrected kernel \
         2/(k! Gamma(mu+k)) mu^(mu+2k) kappa^k (1+kappa)^(mu+k) e^(-mu kappa) x^(2(mu+k)-1) e^(-zeta x^2), \
         validated against the Bessel form to 1e-9."
    ));

    let mut sup = 0.0f64;
    for i in 1..=40 {
        let x = i as f64 * 0.1;
        sup = sup.max((genk_pdf(&genk, x).unwrap() - genk_pdf_meijer(&genk, x).unwrap()).abs());
    }
    check(&mut r, "generalized-K Bessel form matches its contour-integral form (sup norm)", sup, 1e-8);

    // --- cascade layer ------------------------------------------------------
    let element = ElementConfig::reference(2.0, PhaseNoise::Perfect).unwrap();
    let m1 = zi_moment(&element, 1.0).unwrap();
    let closed = {
        let e = element.clone();
        // First-hop mean by quadrature, the rest by closed-form moments.
        let kmm = simpson(|x| x * kappa_mu_pdf(&e.first_hop, x).unwrap(), 1e-9, 8.0, 4000);
        let dg = e.second_hop.moment(1.0).unwrap();
        let mob = match &e.mobility {
            Mobility::Waypoint(t) => t.moment(-1.0).unwrap(),
            Mobility::Static { distance } => distance.powf(-1.0),
        };
        kmm * dg * mob
    };
    check(&mut r, "cascade mean equals the product of component moments", m1 / closed - 1.0, 1e-9);

    let i = simpson(|x| if x > 0.0 { zi_pdf(&element, x).unwrap() } else { 0.0 }, 1e-6, 40.0, 2000);
    check(&mut r, "single-element cascade density integrates to 1", i - 1.0, 1e-3);

    let cfgs = [element.clone()];
    let s1 = SNRConfig::new(2.0, 1.0, false, 1, None).unwrap();
    let src = ZSource::Exact(&cfgs[..]);
    let f_at = snr_transform(&s1, 2.0, Which::Cdf, &src).unwrap();
    let direct_cdf = {
        // independent check: F_gamma(2) with gbar=2 equals F_Z(1)
        use rislink::cascade::zris_exact;
        zris_exact(&cfgs, 1.0, Which::Cdf).unwrap()
    };
    check(&mut r, "SNR-domain distribution is the square-root pullback of the envelope law", f_at - direct_cdf, 1e-12);

    // --- BER quadrature ------------------------------------------------------
    let rayleigh = ber_numeric(|g: f64| Ok(1.0 - (-g).exp()), &Modulation::bpsk()).unwrap();
    check(
        &mut r,
        "unit-mean Rayleigh BPSK quadrature equals (1-sqrt(1/2))/2",
        rayleigh - 0.5 * (1.0 - 0.5f64.sqrt()),
        1e-6,
    );

    if suite == Suite::Full {
        full_suite_checks(&mut r);
    }

    r.notes.push(
        "The shadowing spread sigma_dB = 4 implies M = 1/(exp((4/8.686)^2)-1) ~= 4.233, conflicting with \
         the published M = 2.5454; the reference scenario pins M = 2.5454 as printed and scenario files \
         accept an explicit M."
            .into(),
    );
    r.notes.push(
        "Path-loss convention: amplitude factor H_l = d1^(-a/2) c/(4 pi f_c) with antenna gains applied \
         multiplicatively in both branch SNR scales; branch calibrations of -20 dB (RIS) and -16 dB (direct) \
         are frozen regression constants fitted once to the published operating points."
            .into(),
    );
    r
}

fn full_suite_checks(r: &mut ValidationReport) {
    // Million-sample element-density histogram vs the analytic cascade PDF.
    let element = ElementConfig::reference(2.0, PhaseNoise::Perfect).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000usize;
    let (lo, hi, bins) = (0.05f64, 3.0f64, 40usize);
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for _ in 0..n {
        let h = sample_kappa_mu(&element.first_hop, &mut rng);
        let g = sample_dgg(&element.second_hop, &mut rng);
        let rr = match &element.mobility {
            Mobility::Waypoint(t) => sample_rwp(t, &mut rng),
            Mobility::Static { distance } => *distance,
        };
        let z = h * g * rr.powf(-element.path_exponent / 2.0);
        if z >= lo && z < hi {
            counts[((z - lo) / w) as usize] += 1;
        }
    }
    let mut sup = 0.0f64;
    for (i, &c) in counts.iter().enumerate() {
        let mid = lo + (i as f64 + 0.5) * w;
        let emp = c as f64 / (n as f64 * w);
        sup = sup.max((emp - zi_pdf(&element, mid).unwrap()).abs());
    }
    check(r, "million-sample element histogram matches the analytic density (sup norm)", sup, 0.03);

    // Combined RIS+direct SNR: analytic CDF at empirical quantiles.
    let sc = ScenarioConfig::reference(1, PhaseNoise::Perfect, true, 30.0).unwrap();
    let (gr, gd) = link_budget(&sc);
    let set = simulate(&sc, &MCConfig { trials: 1_000_000, seed: 77, streams: 64 }).unwrap();
    let sorted = set.sorted();
    let cfgs = vec![sc.element.clone()];
    let s = SNRConfig::new(gr, gd, true, 1, sc.direct.clone()).unwrap();
    let mut worst = 0.0f64;
    for &q in &[0.1, 0.25, 0.5, 0.75, 0.9] {
        let x = sorted[(q * n as f64) as usize];
        let f = rislink::cascade::risd_snr(&s, &cfgs, x, Which::Cdf, rislink::cascade::Method::Exact).unwrap();
        worst = worst.max((f - q).abs());
    }
    check(r, "combined RIS+direct SNR law matches million-sample quantiles (max dev)", worst, 0.02);
}
