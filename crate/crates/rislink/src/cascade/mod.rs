//! Analytic statistics of the RIS-assisted link: single-element cascade
//! density, exact N-element sum statistics, AM-GM upper bounds, SNR
//! transforms, the mobility-averaged direct link, and the combined
//! RIS + direct SNR statistics.
//!
//! # Model
//!
//! Each RIS element carries the cascade `Z_i = |h_i| · r^{−a/2} · |g_i|`
//! with κ-μ first hop `h_i`, double generalized-Gamma second hop `g_i`,
//! random-waypoint (or fixed) receiver distance `r`, and residual quantized
//! phase `θ_i ~ U(−qπ, qπ)`.  The Mellin transform of the element statistic
//! factors into gamma ratios:
//!
//! ```text
//! K_i(s) = Σ_{k,j} w_k B_j / (Γβ₁ Γβ₂) ·
//!          Γ(β₂ − s/α₂) Γ(β₁ − s/α₁) Γ(μ+k − s/2) Γ(1+β_j + (a/2)s)
//!          ────────────────────────────────────────────────────────
//!          Γ(2+β_j + (a/2)s) · Γ(1 − q s) Γ(1 + q s)
//! ```
//!
//! with argument scale `c = √ζ₁ · ζ₂` (`ζ₁ = μ(1+κ)`, `ζ₂` the second-hop
//! Mellin scale times the distance power).  The phase factors `Γ(1∓qs)`
//! implement the `sinc` characteristic of the quantized phase error; they
//! yield a *formal* amplitude statistic that is exact in the perfect-phase
//! limit (see the crate tests for the quantified gap at coarse quantization).
//!
//! Sum statistics couple element kernels only through gamma factors of
//! `U = Σ s_i`, which the internal evaluator reduces to a one-dimensional
//! convolution; the AM-GM bound path `F_Z(x) ≤ F_{ΠZ_i}((x/N)^N)` stays
//! univariate for any N.

pub(crate) mod kernel;

use crate::fading::{DGGParams, GenKParams, KappaMuParams, PhaseNoise, RWPTopology};
use crate::specfun::{Eval, ln_gamma, ln_gamma_real};
use crate::{Error, Result};
use kernel::{GammaFactor, KernelTerm, MellinKernel};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest element count served by the exact multivariate evaluations
/// (with a direct link the joint dimension is N+1).
pub const MAX_EXACT_ELEMENTS: usize = 3;

/// Receiver position model for the second hop.
#[derive(Debug, Clone, PartialEq)]
pub enum Mobility {
    /// Random-waypoint distance on `[0, dmax]`.
    Waypoint(RWPTopology),
    /// Fixed receiver at the given distance (degenerate topology).
    Static { distance: f64 },
}

impl Mobility {
    /// Distance scale entering the Mellin argument (`dmax` or the fixed r).
    fn distance_scale(&self) -> f64 {
        match self {
            Mobility::Waypoint(t) => t.dmax,
            Mobility::Static { distance } => *distance,
        }
    }
}

/// Parameter-limit presets for the element statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// Use the configured parameters as-is.
    Full,
    /// Rayleigh limit (κ→0, μ=1, α₁=1, β₁=2) with the mobility model kept.
    RayleighMobility,
    /// Rayleigh limit with the receiver pinned at half the maximum distance.
    RayleighStatic,
}

/// Per-element cascade configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementConfig {
    pub first_hop: KappaMuParams,
    pub second_hop: DGGParams,
    pub mobility: Mobility,
    pub phase: PhaseNoise,
    /// Path-loss exponent a ∈ [2, 5].
    pub path_exponent: f64,
    pub special_case: SpecialCase,
}

impl ElementConfig {
    pub fn new(
        first_hop: KappaMuParams,
        second_hop: DGGParams,
        mobility: Mobility,
        phase: PhaseNoise,
        path_exponent: f64,
    ) -> Result<Self> {
        if !(2.0..=5.0).contains(&path_exponent) {
            return Err(Error::Domain(format!(
                "path exponent must lie in [2, 5] (got {path_exponent})"
            )));
        }
        Ok(Self {
            first_hop,
            second_hop,
            mobility,
            phase,
            path_exponent,
            special_case: SpecialCase::Full,
        })
    }

    pub fn with_special_case(mut self, sc: SpecialCase) -> Self {
        self.special_case = sc;
        self
    }

    /// Reference element (κ=4, μ=2, unit dGG(2,1,2,2), 1-D waypoint, a=2).
    pub fn reference(dmax: f64, phase: PhaseNoise) -> Result<Self> {
        Self::new(
            KappaMuParams::new(4.0, 2.0)?,
            DGGParams::unit(2.0, 1.0, 2.0, 2.0)?,
            Mobility::Waypoint(RWPTopology::one_d(dmax)),
            phase,
            2.0,
        )
    }

    /// Resolve the special-case substitutions into concrete parameters.
    pub fn effective(&self) -> Result<Self> {
        match self.special_case {
            SpecialCase::Full => Ok(self.clone()),
            SpecialCase::RayleighMobility | SpecialCase::RayleighStatic => {
                let first = KappaMuParams::new(0.0, 1.0)?
                    .with_truncation(self.first_hop.series_trunc);
                let second = DGGParams::new(
                    1.0,
                    2.0,
                    self.second_hop.alpha2,
                    self.second_hop.beta2,
                    self.second_hop.msp1,
                    self.second_hop.msp2,
                )?;
                let mobility = if self.special_case == SpecialCase::RayleighStatic {
                    match &self.mobility {
                        Mobility::Static { distance } => Mobility::Static { distance: *distance },
                        Mobility::Waypoint(t) => Mobility::Static { distance: t.dmax / 2.0 },
                    }
                } else {
                    self.mobility.clone()
                };
                let mut out = Self::new(first, second, mobility, self.phase, self.path_exponent)?;
                out.special_case = SpecialCase::Full;
                Ok(out)
            }
        }
    }
}

/// Precomputed coefficients of the element Mellin kernel.
#[derive(Debug, Clone)]
pub struct CascadeCoefficients {
    /// First-hop rate constant ζ₁ = μ(1+κ).
    pub zeta1: f64,
    /// Second-hop argument scale ζ₂ = c_g · D^{a/2} (dGG Mellin scale times
    /// the distance power; D = dmax for waypoint mobility, the fixed distance
    /// otherwise).
    pub zeta2: f64,
    /// First-hop series weights w_k.
    pub series_weights: Vec<f64>,
    /// Mobility polynomial terms (B_j, β_j); empty for a static receiver.
    pub mobility_terms: Vec<(f64, f64)>,
    /// ln(√ζ₁ · ζ₂), the log of the full Mellin argument scale.
    pub ln_argument_scale: f64,
}

impl CascadeCoefficients {
    pub fn for_element(cfg: &ElementConfig) -> Result<Self> {
        let cfg = cfg.effective()?;
        let zeta1 = cfg.first_hop.zeta1();
        let d_scale = cfg.mobility.distance_scale();
        let zeta2 = cfg.second_hop.mellin_scale() * d_scale.powf(cfg.path_exponent / 2.0);
        let series_weights = cfg.first_hop.series_weights()?;
        let mobility_terms = match &cfg.mobility {
            Mobility::Waypoint(t) => t
                .b
                .iter()
                .zip(&t.beta)
                .map(|(&bj, &bej)| (bj, bej as f64))
                .collect(),
            Mobility::Static { .. } => Vec::new(),
        };
        Ok(Self {
            zeta1,
            zeta2,
            series_weights,
            mobility_terms,
            ln_argument_scale: 0.5 * zeta1.ln() + zeta2.ln(),
        })
    }
}

/// Direct source→user link: generalized-K fading with waypoint mobility.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectLink {
    pub fading: GenKParams,
    pub mobility: RWPTopology,
    pub path_exponent: f64,
}

/// SNR-level configuration combining the RIS and direct branches.
#[derive(Debug, Clone)]
pub struct SNRConfig {
    /// γ̄_RIS: average SNR scale of the RIS branch.
    pub gbar_ris: f64,
    /// γ̄_d: average SNR scale of the direct branch.
    pub gbar_d: f64,
    /// ω flag: whether the direct branch is combined in.
    pub direct: bool,
    /// Number of RIS elements.
    pub n: usize,
    pub direct_params: Option<DirectLink>,
}

impl SNRConfig {
    pub fn new(gbar_ris: f64, gbar_d: f64, direct: bool, n: usize, direct_params: Option<DirectLink>) -> Result<Self> {
        if !(gbar_ris > 0.0) || !(gbar_d > 0.0) {
            return Err(Error::Domain(format!(
                "SNR scales must be positive (got gbar_ris={gbar_ris}, gbar_d={gbar_d})"
            )));
        }
        if n == 0 {
            return Err(Error::Domain("element count must be >= 1".into()));
        }
        if direct && direct_params.is_none() {
            return Err(Error::Domain("direct branch enabled but no direct-link parameters given".into()));
        }
        Ok(Self { gbar_ris, gbar_d, direct, n, direct_params })
    }
}

/// Which statistic to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Pdf,
    Cdf,
}

/// Exact multivariate evaluation or the univariate AM-GM bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bound,
}

// ---------------------------------------------------------------------------
// Kernel constructors
// ---------------------------------------------------------------------------

/// Build the element Mellin kernel.  With `mellin_gamma` an extra Γ(s) factor
/// is included (the building block of the sum statistics, where each variable
/// carries its own Mellin gamma before the joint factor divides the total).
pub(crate) fn element_kernel(cfg: &ElementConfig, mellin_gamma: bool) -> Result<MellinKernel> {
    let eff = cfg.effective()?;
    let co = CascadeCoefficients::for_element(cfg)?;
    let a = eff.path_exponent;
    let q = eff.phase.q();
    let ln_norm = -ln_gamma_real(eff.second_hop.beta1)? - ln_gamma_real(eff.second_hop.beta2)?;
    let mob: Vec<Option<(f64, f64)>> = if co.mobility_terms.is_empty() {
        vec![None]
    } else {
        co.mobility_terms.iter().map(|&t| Some(t)).collect()
    };
    let mut terms = Vec::new();
    for (k, &wk) in co.series_weights.iter().enumerate() {
        for j in &mob {
            let mut num = vec![
                GammaFactor::new(eff.second_hop.beta2, -1.0 / eff.second_hop.alpha2),
                GammaFactor::new(eff.second_hop.beta1, -1.0 / eff.second_hop.alpha1),
                GammaFactor::new(eff.first_hop.mu + k as f64, -0.5),
            ];
            if mellin_gamma {
                num.push(GammaFactor::new(0.0, 1.0));
            }
            let mut den = Vec::new();
            let mut weight = wk;
            if let Some((bj, bej)) = j {
                num.push(GammaFactor::new(1.0 + bej, a / 2.0));
                den.push(GammaFactor::new(2.0 + bej, a / 2.0));
                weight *= bj;
            }
            if let Some(q) = q {
                den.push(GammaFactor::new(1.0, -q));
                den.push(GammaFactor::new(1.0, q));
            }
            terms.push(KernelTerm {
                ln_weight: weight.abs().max(1e-320).ln() + ln_norm,
                sign: weight.signum(),
                num,
                den,
            });
        }
    }
    Ok(MellinKernel { terms, ln_scale: co.ln_argument_scale })
}

/// Mellin kernel of the mobility-averaged direct link `Z_d = |x| r^{−a/2}`;
/// with `mellin_gamma` the Γ(s/2) factor of the SNR-domain transform is
/// included (used by the combined statistics).
pub(crate) fn direct_kernel(dl: &DirectLink, mellin_gamma: bool) -> Result<MellinKernel> {
    let ln_norm = -ln_gamma_real(dl.fading.m)? - ln_gamma_real(dl.fading.big_m)?;
    let a = dl.path_exponent;
    let mut terms = Vec::new();
    for (&bj, &bej) in dl.mobility.b.iter().zip(&dl.mobility.beta) {
        let bej = bej as f64;
        let mut num = vec![
            GammaFactor::new(dl.fading.big_m, -0.5),
            GammaFactor::new(dl.fading.m, -0.5),
            GammaFactor::new(1.0 + bej, a / 2.0),
        ];
        if mellin_gamma {
            num.push(GammaFactor::new(0.0, 0.5));
        }
        terms.push(KernelTerm {
            ln_weight: bj.abs().max(1e-320).ln() + ln_norm,
            sign: bj.signum(),
            num,
            den: vec![GammaFactor::new(2.0 + bej, a / 2.0)],
        });
    }
    Ok(MellinKernel {
        terms,
        ln_scale: (dl.fading.b / 2.0).ln() + (a / 2.0) * dl.mobility.dmax.ln(),
    })
}

// ---------------------------------------------------------------------------
// Element-level statistics
// ---------------------------------------------------------------------------

/// Mobility-averaged second-hop density of `V = r^{−a/2} |g|` (no first hop,
/// no phase).  Accepts any a ≥ 0; a = 0 degenerates to the plain dGG density.
pub fn mobility_link_pdf(p: &DGGParams, t: &RWPTopology, a: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("mobility_link_pdf requires x > 0 (got {x})")));
    }
    if a < 0.0 {
        return Err(Error::Domain(format!("path exponent must be >= 0 (got {a})")));
    }
    let ln_norm = -ln_gamma_real(p.beta1)? - ln_gamma_real(p.beta2)?;
    let mut terms = Vec::new();
    for (&bj, &bej) in t.b.iter().zip(&t.beta) {
        let bej = bej as f64;
        terms.push(KernelTerm {
            ln_weight: bj.abs().max(1e-320).ln() + ln_norm,
            sign: bj.signum(),
            num: vec![
                GammaFactor::new(p.beta2, -1.0 / p.alpha2),
                GammaFactor::new(p.beta1, -1.0 / p.alpha1),
                GammaFactor::new(1.0 + bej, a / 2.0),
            ],
            den: vec![GammaFactor::new(2.0 + bej, a / 2.0)],
        });
    }
    let k = MellinKernel {
        terms,
        ln_scale: p.mellin_scale().ln() + (a / 2.0) * t.dmax.ln(),
    };
    Ok(kernel::eval_univariate(&k, x.ln())?.value / x)
}

/// Single-element cascade density `f_{Z_i}(x)`.
pub fn zi_pdf(cfg: &ElementConfig, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("zi_pdf requires x > 0 (got {x})")));
    }
    let k = element_kernel(cfg, false)?;
    Ok(kernel::eval_univariate(&k, x.ln())?.value / x)
}

/// r-th moment of the element cascade, `⟨Z_i^r⟩`, via the gamma-ratio
/// closed form (kernel evaluated at `s = −r`).
///
/// # Errors
/// [`Error::StripViolation`] outside the moment strip — e.g. r ≥ 2(β_min+1)/a
/// under waypoint mobility, where `E[r^{−ar/2}]` diverges.
pub fn zi_moment(cfg: &ElementConfig, r: f64) -> Result<f64> {
    let k = element_kernel(cfg, false)?;
    let (lo, hi) = k.strip();
    match k.eval_real(-r) {
        Ok(v) => Ok((-r * k.ln_scale).exp() * v),
        Err(Error::StripViolation { .. }) => Err(Error::StripViolation { r, lo: -hi, hi: -lo }),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Sum statistics
// ---------------------------------------------------------------------------

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_EXACT_ELEMENTS {
        return Err(Error::DimensionLimit {
            n,
            max: MAX_EXACT_ELEMENTS,
            strategy: "use the AM-GM bound or Monte Carlo for larger arrays",
        });
    }
    Ok(())
}

/// Exact statistics of the element sum `Z = Σ_i Z_i` (N-variate evaluation,
/// N ≤ [`MAX_EXACT_ELEMENTS`]).
pub fn zris_exact(cfgs: &[ElementConfig], x: f64, which: Which) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("zris_exact requires x > 0 (got {x})")));
    }
    check_dim(cfgs.len())?;
    let kernels: Vec<MellinKernel> = cfgs
        .iter()
        .map(|c| element_kernel(c, true))
        .collect::<Result<_>>()?;
    let refs: Vec<&MellinKernel> = kernels.iter().collect();
    let ln_x = vec![x.ln(); cfgs.len()];
    let growth = PI / 2.0; // 1/Γ(U) grows like e^{π|Im U|/2}
    let eval = match which {
        Which::Pdf => {
            let e = kernel::eval_sum(&refs, &ln_x, growth, |u| Ok((-ln_gamma(u)?).exp()))?;
            Eval { value: e.value / x, error: e.error / x }
        }
        Which::Cdf => kernel::eval_sum(&refs, &ln_x, growth, |u| {
            Ok((-ln_gamma(u + 1.0)?).exp())
        })?,
    };
    Ok(match which {
        Which::Cdf => eval.value.clamp(0.0, 1.0),
        Which::Pdf => eval.value.max(0.0),
    })
}

/// AM-GM upper bound on the sum statistics, `F_Z(x) ≤ F_Y((x/N)^N)` with
/// `Y = Π_i Z_i` (univariate for any N).
pub fn zris_bound(cfgs: &[ElementConfig], x: f64, which: Which) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("zris_bound requires x > 0 (got {x})")));
    }
    let n = cfgs.len() as f64;
    let kernels: Vec<MellinKernel> = cfgs
        .iter()
        .map(|c| element_kernel(c, false))
        .collect::<Result<_>>()?;
    let refs: Vec<&MellinKernel> = kernels.iter().collect();
    let ln_c: f64 = kernels.iter().map(|k| k.ln_scale).sum();
    let ln_arg = ln_c + n * (x / n).ln();
    match which {
        Which::Cdf => {
            let e = kernel::eval_product(&refs, ln_arg, 1e-9, 0.0, |t| {
                Ok((ln_gamma(t)? - ln_gamma(t + 1.0)?).exp())
            })?;
            Ok(e.value.clamp(0.0, 1.0))
        }
        Which::Pdf => {
            let e = kernel::eval_product(&refs, ln_arg, f64::NEG_INFINITY, 0.0, |_| {
                Ok(Complex64::new(1.0, 0.0))
            })?;
            Ok((e.value * n / x).max(0.0))
        }
    }
}

/// Handle to a channel-amplitude statistic for the SNR transform.
#[derive(Debug, Clone, Copy)]
pub enum ZSource<'a> {
    Exact(&'a [ElementConfig]),
    Bound(&'a [ElementConfig]),
}

impl ZSource<'_> {
    pub fn value(&self, x: f64, which: Which) -> Result<f64> {
        match self {
            ZSource::Exact(cfgs) => zris_exact(cfgs, x, which),
            ZSource::Bound(cfgs) => zris_bound(cfgs, x, which),
        }
    }
}

/// Map amplitude statistics to SNR statistics under `γ = γ̄ Z²`:
/// `F_γ(γ) = F_Z(√(γ/γ̄))`, `f_γ(γ) = f_Z(√(γ/γ̄)) / (2√(γ̄ γ))`.
pub fn snr_transform(s: &SNRConfig, gamma: f64, which: Which, source: &ZSource) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("snr_transform requires gamma > 0 (got {gamma})")));
    }
    let z = (gamma / s.gbar_ris).sqrt();
    match which {
        Which::Cdf => source.value(z, Which::Cdf),
        Which::Pdf => Ok(source.value(z, Which::Pdf)? / (2.0 * (s.gbar_ris * gamma).sqrt())),
    }
}

/// Mobility-averaged direct-link SNR density at `γ = γ̄_d Z_d²`.
pub fn direct_snr_pdf(dl: &GenKParams, t: &RWPTopology, a: f64, gbar_d: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !(gbar_d > 0.0) {
        return Err(Error::Domain(format!(
            "direct_snr_pdf requires gamma, gbar_d > 0 (got {gamma}, {gbar_d})"
        )));
    }
    let link = DirectLink { fading: *dl, mobility: t.clone(), path_exponent: a };
    let k = direct_kernel(&link, false)?;
    let z = (gamma / gbar_d).sqrt();
    let fz = kernel::eval_univariate(&k, z.ln())?.value / z;
    Ok((fz / (2.0 * (gbar_d * gamma).sqrt())).max(0.0))
}

/// Combined RIS + direct SNR statistics `γ = γ̄_RIS Z² + ω γ̄_d Z_d²`
/// (maximal-ratio combining).  `method` selects the exact multivariate
/// evaluation or the AM-GM bound on the RIS branch.
pub fn risd_snr(s: &SNRConfig, cfgs: &[ElementConfig], gamma: f64, which: Which, method: Method) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("risd_snr requires gamma > 0 (got {gamma})")));
    }
    if cfgs.len() != s.n {
        return Err(Error::Domain(format!(
            "configured N = {} but {} element configs given",
            s.n,
            cfgs.len()
        )));
    }
    if !s.direct {
        let src = match method {
            Method::Exact => ZSource::Exact(cfgs),
            Method::Bound => ZSource::Bound(cfgs),
        };
        return snr_transform(s, gamma, which, &src);
    }
    let dl = s
        .direct_params
        .as_ref()
        .ok_or_else(|| Error::Domain("direct branch enabled but no direct-link parameters".into()))?;
    let dk = direct_kernel(dl, true)?;
    let ln_x_d = 0.5 * (gamma / s.gbar_d).ln();
    let n = cfgs.len() as f64;
    match method {
        Method::Exact => {
            check_dim(cfgs.len())?;
            let kernels: Vec<MellinKernel> = cfgs
                .iter()
                .map(|c| element_kernel(c, true))
                .collect::<Result<_>>()?;
            let refs: Vec<&MellinKernel> = kernels.iter().collect();
            let ln_x = vec![0.5 * (gamma / s.gbar_ris).ln(); cfgs.len()];
            // Joint factor Γ(U/2)/Γ(U) grows like e^{π|Im U|/4} net, plus the
            // 1/Γ(·+Sd/2) coupling — bounded by π/2 in U and π/4 in s_d.
            let (gu, gd) = (PI / 2.0, PI / 4.0);
            match which {
                Which::Cdf => {
                    let e = kernel::eval_sum_with_direct(&refs, &ln_x, &dk, ln_x_d, gu, gd, |u, sd| {
                        Ok((ln_gamma(u / 2.0)? - ln_gamma(u)? - ln_gamma(u / 2.0 + sd / 2.0 + 1.0)?).exp())
                    })?;
                    Ok((e.value / 4.0).clamp(0.0, 1.0))
                }
                Which::Pdf => {
                    let e = kernel::eval_sum_with_direct(&refs, &ln_x, &dk, ln_x_d, gu, gd, |u, sd| {
                        Ok((ln_gamma(u / 2.0)? - ln_gamma(u)? - ln_gamma(u / 2.0 + sd / 2.0)?).exp())
                    })?;
                    Ok((e.value / (4.0 * gamma)).max(0.0))
                }
            }
        }
        Method::Bound => {
            let kernels: Vec<MellinKernel> = cfgs
                .iter()
                .map(|c| element_kernel(c, false))
                .collect::<Result<_>>()?;
            let refs: Vec<&MellinKernel> = kernels.iter().collect();
            let ln_c: f64 = kernels.iter().map(|k| k.ln_scale).sum();
            let ln_arg = ln_c - n * n.ln() + (n / 2.0) * (gamma / s.gbar_ris).ln();
            let gd = PI / 4.0;
            match which {
                Which::Cdf => {
                    let e = kernel::eval_product_with_direct(&refs, ln_arg, &dk, ln_x_d, 1e-9, 0.0, gd, |t, sd| {
                        Ok((ln_gamma(n * t / 2.0)? - ln_gamma(n * t / 2.0 + sd / 2.0 + 1.0)?).exp())
                    })?;
                    Ok((e.value * n / 4.0).clamp(0.0, 1.0))
                }
                Which::Pdf => {
                    let e = kernel::eval_product_with_direct(&refs, ln_arg, &dk, ln_x_d, 1e-9, 0.0, gd, |t, sd| {
                        Ok((ln_gamma(n * t / 2.0)? - ln_gamma(n * t / 2.0 + sd / 2.0)?).exp())
                    })?;
                    Ok((e.value * n / (4.0 * gamma)).max(0.0))
                }
            }
        }
    }
}
