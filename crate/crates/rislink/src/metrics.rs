//! Link-level performance metrics: outage probability (exact, bound,
//! asymptotic), diversity order, and average BER (exact, bound, numeric
//! quadrature).
//!
//! The exact/bound paths reuse the cascade Mellin kernels with BER-specific
//! joint gamma factors obtained by integrating the SNR CDF against the
//! binary-modulation kernel `(q^p/2Γ(p)) γ^{p−1} e^{−qγ}` in closed form.
//! The asymptotic path closes each Mellin contour rightward and keeps the
//! dominant residues: the element small-argument exponent is
//! `p_i = min{α₁β₁, α₂β₂, 2μ}` (the first-hop amplitude density behaves as
//! `x^{2μ−1}` near zero, hence the factor 2), the direct link contributes
//! `p_d = min{2M, 2m}`, and the outage diversity order is `G_out = Σ p_i/2`.

use crate::cascade::{
    direct_kernel, element_kernel, risd_snr, DirectLink, ElementConfig, Method, SNRConfig, Which,
};
use crate::cascade::kernel::{self, MellinKernel};
use crate::specfun::{gamma_real, ln_gamma, ln_gamma_real};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Binary-modulation kernel parameters of the average-BER integral
/// (distinct from the phase-noise quantization fraction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub p: f64,
    pub q: f64,
}

impl Modulation {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::Domain(format!(
                "modulation parameters must be positive (got p={p}, q={q})"
            )));
        }
        Ok(Self { p, q })
    }

    /// Coherent BPSK: p = 1/2, q = 1.
    pub fn bpsk() -> Self {
        Self { p: 0.5, q: 1.0 }
    }

    /// Differential BPSK: p = 1, q = 1.
    pub fn dbpsk() -> Self {
        Self { p: 1.0, q: 1.0 }
    }
}

/// Outage evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageMethod {
    Exact,
    Bound,
    Asymptotic,
}

/// High-SNR exponents of the combined link.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExponents {
    /// Per-element small-argument exponents p_i = min{α₁β₁, α₂β₂, 2μ}.
    pub element: Vec<f64>,
    /// Direct-link exponent p_d = min{2M, 2m} when the branch is combined.
    pub direct: Option<f64>,
    /// Diversity order G_out = Σ p_i / 2 (direct branch included).
    pub g_out: f64,
}

impl AsymptoticExponents {
    pub fn compute(cfgs: &[ElementConfig], direct: Option<&DirectLink>) -> Result<Self> {
        let mut element = Vec::with_capacity(cfgs.len());
        for cfg in cfgs {
            let eff = cfg.effective()?;
            let p = (eff.second_hop.alpha1 * eff.second_hop.beta1)
                .min(eff.second_hop.alpha2 * eff.second_hop.beta2)
                .min(2.0 * eff.first_hop.mu);
            element.push(p);
        }
        let direct = direct.map(|dl| 2.0 * dl.fading.big_m.min(dl.fading.m));
        let g_out = (element.iter().sum::<f64>() + direct.unwrap_or(0.0)) / 2.0;
        Ok(Self { element, direct, g_out })
    }
}

/// Diversity order of the configured link (κ- and phase-level-independent).
pub fn diversity_order(cfgs: &[ElementConfig], direct: Option<&DirectLink>) -> Result<f64> {
    Ok(AsymptoticExponents::compute(cfgs, direct)?.g_out)
}

/// Outage probability `P(γ < γ_th)`.
pub fn outage(s: &SNRConfig, cfgs: &[ElementConfig], gamma_th: f64, method: OutageMethod) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Err(Error::Domain(format!("outage requires gamma_th > 0 (got {gamma_th})")));
    }
    match method {
        OutageMethod::Exact => risd_snr(s, cfgs, gamma_th, Which::Cdf, Method::Exact),
        OutageMethod::Bound => risd_snr(s, cfgs, gamma_th, Which::Cdf, Method::Bound),
        OutageMethod::Asymptotic => asymptotic_outage(s, cfgs, gamma_th),
    }
}

/// Dominant-residue outage approximation at high SNR:
/// `F(γ_th) ≈ Π_i A_i (c_i √(γ_th/γ̄))^{p_i} · joint(p)` where `(p_i, A_i)`
/// are the leading right-edge pole data of the per-variable kernels (ties at
/// the edge summed as simple residues).
fn asymptotic_outage(s: &SNRConfig, cfgs: &[ElementConfig], gamma_th: f64) -> Result<f64> {
    let mut ln_acc = 0.0f64;
    let mut sign = 1.0f64;
    let mut p_sum = 0.0f64;
    for cfg in cfgs {
        let k = element_kernel(cfg, true)?;
        let (p, a) = k.leading_right_pole()?;
        if a == 0.0 {
            // Leading residue suppressed (a denominator pole at the edge).
            return Ok(0.0);
        }
        ln_acc += a.abs().ln() + p * (k.ln_scale + 0.5 * (gamma_th / s.gbar_ris).ln());
        sign *= a.signum();
        p_sum += p;
    }
    if s.direct {
        let dl = s
            .direct_params
            .as_ref()
            .ok_or_else(|| Error::Domain("direct branch enabled but no direct-link parameters".into()))?;
        let dk = direct_kernel(dl, true)?;
        let (pd, ad) = dk.leading_right_pole()?;
        if ad == 0.0 {
            return Ok(0.0);
        }
        ln_acc += ad.abs().ln() + pd * (dk.ln_scale + 0.5 * (gamma_th / s.gbar_d).ln());
        sign *= ad.signum();
        ln_acc += ln_gamma_real(p_sum / 2.0)?
            - ln_gamma_real(p_sum)?
            - ln_gamma_real(1.0 + p_sum / 2.0 + pd / 2.0)?
            - (4.0f64).ln();
    } else {
        ln_acc -= ln_gamma_real(1.0 + p_sum)?;
    }
    Ok((sign * ln_acc.exp()).clamp(0.0, 1.0))
}

/// Average BER of the combined link in closed form.
pub fn ber(s: &SNRConfig, cfgs: &[ElementConfig], m: &Modulation, method: Method) -> Result<f64> {
    if cfgs.len() != s.n {
        return Err(Error::Domain(format!(
            "configured N = {} but {} element configs given",
            s.n,
            cfgs.len()
        )));
    }
    let n = cfgs.len() as f64;
    let ln_gp = ln_gamma_real(m.p)?;
    let value = if !s.direct {
        match method {
            Method::Exact => {
                let kernels: Vec<MellinKernel> = cfgs
                    .iter()
                    .map(|c| element_kernel(c, true))
                    .collect::<Result<_>>()?;
                let refs: Vec<&MellinKernel> = kernels.iter().collect();
                let ln_x = vec![-0.5 * (m.q * s.gbar_ris).ln(); cfgs.len()];
                let p = m.p;
                // Joint Γ(p+U/2)/Γ(1+U): net vertical growth π/4.
                let e = kernel::eval_sum(&refs, &ln_x, PI / 4.0, |u| {
                    Ok((ln_gamma(u / 2.0 + p)? - ln_gamma(u + 1.0)?).exp())
                })?;
                e.value * (-(2.0f64).ln() - ln_gp).exp()
            }
            Method::Bound => {
                let kernels: Vec<MellinKernel> = cfgs
                    .iter()
                    .map(|c| element_kernel(c, false))
                    .collect::<Result<_>>()?;
                let refs: Vec<&MellinKernel> = kernels.iter().collect();
                let ln_c: f64 = kernels.iter().map(|k| k.ln_scale).sum();
                let ln_arg = ln_c - n * n.ln() - (n / 2.0) * (m.q * s.gbar_ris).ln();
                let p = m.p;
                // Joint Γ(t)Γ(p+Nt/2)/Γ(1+t) adds net decay πN/4.
                let e = kernel::eval_product(&refs, ln_arg, 1e-9, -PI * n / 4.0, |t| {
                    Ok((ln_gamma(t)? + ln_gamma(n * t / 2.0 + p)? - ln_gamma(t + 1.0)?).exp())
                })?;
                e.value * (-(2.0f64).ln() - ln_gp).exp()
            }
        }
    } else {
        let dl = s
            .direct_params
            .as_ref()
            .ok_or_else(|| Error::Domain("direct branch enabled but no direct-link parameters".into()))?;
        let dk = direct_kernel(dl, true)?;
        let ln_x_d = -0.5 * (m.q * s.gbar_d).ln();
        let p = m.p;
        match method {
            Method::Exact => {
                let kernels: Vec<MellinKernel> = cfgs
                    .iter()
                    .map(|c| element_kernel(c, true))
                    .collect::<Result<_>>()?;
                let refs: Vec<&MellinKernel> = kernels.iter().collect();
                let ln_x = vec![-0.5 * (m.q * s.gbar_ris).ln(); cfgs.len()];
                let e = kernel::eval_sum_with_direct(&refs, &ln_x, &dk, ln_x_d, PI / 4.0, 0.0, |u, sd| {
                    Ok((ln_gamma(u / 2.0)? + ln_gamma(u / 2.0 + sd / 2.0 + p)?
                        - ln_gamma(u)?
                        - ln_gamma(u / 2.0 + sd / 2.0 + 1.0)?)
                    .exp())
                })?;
                e.value * (-(8.0f64).ln() - ln_gp).exp()
            }
            Method::Bound => {
                let kernels: Vec<MellinKernel> = cfgs
                    .iter()
                    .map(|c| element_kernel(c, false))
                    .collect::<Result<_>>()?;
                let refs: Vec<&MellinKernel> = kernels.iter().collect();
                let ln_c: f64 = kernels.iter().map(|k| k.ln_scale).sum();
                let ln_arg = ln_c - n * n.ln() - (n / 2.0) * (m.q * s.gbar_ris).ln();
                let e = kernel::eval_product_with_direct(
                    &refs,
                    ln_arg,
                    &dk,
                    ln_x_d,
                    1e-9,
                    -PI * n / 4.0,
                    0.0,
                    |t, sd| {
                        Ok((ln_gamma(n * t / 2.0)? + ln_gamma(n * t / 2.0 + sd / 2.0 + p)?
                            - ln_gamma(n * t / 2.0 + sd / 2.0 + 1.0)?)
                        .exp())
                    },
                )?;
                e.value * n * (-(8.0f64).ln() - ln_gp).exp()
            }
        }
    };
    Ok(value.clamp(0.0, 0.5))
}

/// Average BER by adaptive quadrature of the CDF form
/// `(q^p/2Γ(p)) ∫ γ^{p−1} e^{−qγ} F(γ) dγ` with the substitution `γ = w²/q`
/// (which removes the q-scale and softens the endpoint power).
///
/// # Errors
/// [`Error::QuadratureFailure`] if node doubling does not reach the 1e-8
/// absolute tolerance.
pub fn ber_numeric<F: Fn(f64) -> Result<f64>>(cdf: F, m: &Modulation) -> Result<f64> {
    const TOL: f64 = 1e-8;
    let p = m.p;
    let integrand = |w: f64| -> Result<f64> {
        Ok(w.powf(2.0 * p - 1.0) * (-w * w).exp() * cdf(w * w / m.q)?.clamp(0.0, 1.0))
    };
    let w_max = 6.5f64; // e^{−42} tail
    // Open midpoint rule with interval tripling: never touches w = 0, where
    // the integrand tends to F(0⁺) at p = 1/2 and is mildly singular below.
    let mut n = 3usize;
    let h0 = w_max / n as f64;
    let mut value = (0..n)
        .map(|i| integrand((i as f64 + 0.5) * h0))
        .sum::<Result<f64>>()?
        * h0;
    for it in 0..12 {
        let newn = 3 * n;
        let h = w_max / newn as f64;
        let mut sum = 0.0;
        for i in 0..newn {
            // Old nodes fall on i % 3 == 1; only the new ones are evaluated.
            if i % 3 != 1 {
                sum += integrand((i as f64 + 0.5) * h)?;
            }
        }
        let new_value = value / 3.0 + sum * h;
        let delta = (new_value - value).abs();
        value = new_value;
        n = newn;
        if it >= 2 && delta <= TOL * (1.0 + value.abs()) {
            return Ok(value / gamma_real(p)?);
        }
    }
    Err(Error::QuadratureFailure(format!(
        "BER quadrature did not reach tolerance {TOL} with {n} nodes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{snr_transform, ZSource};
    use crate::fading::PhaseNoise;
    use crate::fading::{GenKParams, RWPTopology};
    use num_complex::Complex64;

    fn reference_elements(n: usize) -> Vec<ElementConfig> {
        vec![ElementConfig::reference(2.0, PhaseNoise::Perfect).unwrap(); n]
    }

    fn reference_direct() -> DirectLink {
        DirectLink {
            fading: GenKParams::new(1.0, 2.5454, 1.0).unwrap(),
            mobility: RWPTopology::one_d(2.0),
            path_exponent: 2.0,
        }
    }

    #[test]
    fn ber_numeric_closed_forms() {
        // F ≡ 1: the kernel integrates to Γ(p), so the value is 1/2.
        let half = ber_numeric(|_| Ok(1.0), &Modulation::bpsk()).unwrap();
        assert!((half - 0.5).abs() < 1e-9, "{half}");
        // Rayleigh SNR, BPSK, γ̄ = 1: (1/2)(1 − √(γ̄/(1+γ̄))) = 0.14644661…
        let v = ber_numeric(|g| Ok(1.0 - (-g).exp()), &Modulation::bpsk()).unwrap();
        let want = 0.5 * (1.0 - (0.5f64).sqrt());
        assert!((v - want).abs() < 1e-6, "{v} vs {want}");
    }

    #[test]
    fn half_argument_gamma_ratio_identity() {
        // Γ(u/2)Γ(1+u)/(Γ(u)Γ(1+u/2)) = 2 — consistency anchor between the
        // PDF and CDF joint factors.
        for &u in &[0.7, 1.3, 2.9, 6.1] {
            let z = Complex64::new(u, 0.0);
            let r = (ln_gamma(z / 2.0).unwrap() + ln_gamma(z + 1.0).unwrap()
                - ln_gamma(z).unwrap()
                - ln_gamma(z / 2.0 + 1.0).unwrap())
            .exp();
            assert!((r.re - 2.0).abs() < 1e-12, "u={u}: {r}");
        }
    }

    #[test]
    fn diversity_order_values() {
        let two = reference_elements(2);
        let dl = reference_direct();
        // Elements: min{α₁β₁, α₂β₂, 2μ} = min{2, 4, 4} = 2 each; direct:
        // min{2M, 2m} = 2 ⇒ G_out = (2+2+2)/2 = 3.
        let g = diversity_order(&two, Some(&dl)).unwrap();
        assert!((g - 3.0).abs() < 1e-12, "{g}");
        // κ does not enter the exponents.
        let mut kappa10 = reference_elements(1)[0].clone();
        kappa10.first_hop = crate::fading::KappaMuParams::new(10.0, 2.0).unwrap();
        let mut kappa01 = kappa10.clone();
        kappa01.first_hop = crate::fading::KappaMuParams::new(0.1, 2.0).unwrap();
        assert_eq!(
            diversity_order(&[kappa10], None).unwrap(),
            diversity_order(&[kappa01], None).unwrap()
        );
        // N=1, no direct, defaults: min{2,4,4}/2 = 1.
        let g1 = diversity_order(&reference_elements(1), None).unwrap();
        assert!((g1 - 1.0).abs() < 1e-12, "{g1}");
    }

    #[test]
    fn asymptotic_outage_is_power_law_with_slope_g_out() {
        let cfgs = reference_elements(1);
        let s1 = SNRConfig::new(100.0, 1.0, false, 1, None).unwrap();
        let s2 = SNRConfig::new(10_000.0, 1.0, false, 1, None).unwrap();
        let o1 = outage(&s1, &cfgs, 1.0, OutageMethod::Asymptotic).unwrap();
        let o2 = outage(&s2, &cfgs, 1.0, OutageMethod::Asymptotic).unwrap();
        let slope = (o2.ln() - o1.ln()) / (100.0f64).ln();
        let g = diversity_order(&cfgs, None).unwrap();
        assert!((slope + g).abs() < 1e-9, "slope {slope} vs −{g}");
        // With direct branch: slope −3 over the same decade pair.
        let dl = reference_direct();
        let two = reference_elements(2);
        let sd1 = SNRConfig::new(100.0, 100.0, true, 2, Some(dl.clone())).unwrap();
        let sd2 = SNRConfig::new(10_000.0, 10_000.0, true, 2, Some(dl)).unwrap();
        let od1 = outage(&sd1, &two, 1.0, OutageMethod::Asymptotic).unwrap();
        let od2 = outage(&sd2, &two, 1.0, OutageMethod::Asymptotic).unwrap();
        let slope = (od2.ln() - od1.ln()) / (100.0f64).ln();
        assert!((slope + 3.0).abs() < 1e-9, "combined slope {slope}");
    }

    #[test]
    fn asymptotic_tracks_exact_tail() {
        let cfgs = reference_elements(1);
        // γ̄ placed so the exact outage sits near 1e-4.
        let s = SNRConfig::new(40_000.0, 1.0, false, 1, None).unwrap();
        let exact = outage(&s, &cfgs, 1.0, OutageMethod::Exact).unwrap();
        let asym = outage(&s, &cfgs, 1.0, OutageMethod::Asymptotic).unwrap();
        assert!(exact > 1e-6 && exact < 1e-2, "tail placement: exact {exact}");
        let ratio = asym / exact;
        assert!((0.5..=2.0).contains(&ratio), "asymptotic/exact = {ratio}");
    }

    #[test]
    fn outage_exact_is_the_snr_cdf() {
        let cfgs = reference_elements(1);
        let dl = reference_direct();
        let s = SNRConfig::new(2.0, 1.0, true, 1, Some(dl)).unwrap();
        for &g in &[0.5, 2.0, 10.0] {
            let a = outage(&s, &cfgs, g, OutageMethod::Exact).unwrap();
            let b = risd_snr(&s, &cfgs, g, Which::Cdf, Method::Exact).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ber_exact_matches_quadrature() {
        let cfgs = reference_elements(1);
        let s = SNRConfig::new(10.0, 1.0, false, 1, None).unwrap();
        let m = Modulation::bpsk();
        let closed = ber(&s, &cfgs, &m, Method::Exact).unwrap();
        let src = ZSource::Exact(&cfgs);
        let numeric = ber_numeric(|g| snr_transform(&s, g, Which::Cdf, &src), &m).unwrap();
        assert!(
            (closed - numeric).abs() <= 0.01 * numeric,
            "closed {closed} vs quadrature {numeric}"
        );
    }

    #[test]
    fn ber_monotone_and_bound_dominates() {
        let m = Modulation::bpsk();
        let one = reference_elements(1);
        let lo = ber(&SNRConfig::new(5.0, 1.0, false, 1, None).unwrap(), &one, &m, Method::Exact).unwrap();
        let hi = ber(&SNRConfig::new(50.0, 1.0, false, 1, None).unwrap(), &one, &m, Method::Exact).unwrap();
        assert!(hi < lo, "BER must fall with SNR: {hi} vs {lo}");
        let two = reference_elements(2);
        let dl = reference_direct();
        let s = SNRConfig::new(10.0, 5.0, true, 2, Some(dl)).unwrap();
        let exact = ber(&s, &two, &m, Method::Exact).unwrap();
        let bound = ber(&s, &two, &m, Method::Bound).unwrap();
        assert!(bound >= exact - 1e-6, "bound {bound} < exact {exact}");
        assert!(exact > 0.0 && exact <= 0.5);
    }
}
