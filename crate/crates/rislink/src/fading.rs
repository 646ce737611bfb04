//! Channel ingredient distributions: analytic densities and exact samplers.
//!
//! * κ-μ fading for the source→RIS hop (κ = dominant-to-scattered power
//!   ratio, μ = real-valued cluster parameter), normalized to E[X²] = 1,
//! * double generalized-Gamma (dGG) for the RIS→user hop, a product of two
//!   generalized-Gamma variates,
//! * generalized-K for the direct link (small-scale severity m, shadowing M),
//! * random-waypoint (RWP) transceiver distance with polynomial density
//!   `f(r) = Σ_j B_j r^{β_j} / dmax^{β_j+1}` on `[0, dmax]`,
//! * quantized RIS phase noise θ ~ U(−qπ, qπ) with q = 2^{−L}.
//!
//! Every sampler draws from the *exact* distribution (Gamma mixtures, inverse
//! CDF), so Monte Carlo comparisons test the analytics, not the sampler.
//!
//! The κ-μ series expansion shipped here is the *corrected* kernel
//! `Σ_k ψ_k x^{2(μ+k)−1} e^{−μ(1+κ)x²}`: substituting the Bessel-I power
//! series into the κ-μ density produces Gamma-type components in x² (not in
//! x), and the corrected series is verified against the closed-form density
//! in the test suite.  The same Mellin kernel (gamma arguments `μ+k − s/2`)
//! propagates through the cascade statistics.

use crate::specfun::{bessel_i_log, bessel_k, fox_h, auto_contour, FoxHParams, GammaPair, ln_gamma_real, gamma_real};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use std::f64::consts::PI;

/// Relative tail-term stopping rule shared by every series in the crate.
pub const SERIES_TAIL_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// κ-μ fading parameters (unit mean square power).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuParams {
    /// Ratio of dominant to scattered power, κ ≥ 0.
    pub kappa: f64,
    /// Number of multipath clusters (real-valued), μ > 0.
    pub mu: f64,
    /// Maximum series length for the expansion form.
    pub series_trunc: usize,
}

impl KappaMuParams {
    pub fn new(kappa: f64, mu: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !(mu > 0.0) {
            return Err(Error::Domain(format!(
                "kappa-mu requires kappa >= 0, mu > 0 (got kappa={kappa}, mu={mu})"
            )));
        }
        Ok(Self {
            kappa,
            mu,
            series_trunc: 60,
        })
    }

    pub fn with_truncation(mut self, k: usize) -> Self {
        self.series_trunc = k.max(1);
        self
    }

    /// Rate constant ζ₁ = μ(1+κ) of the corrected series kernel.
    pub fn zeta1(&self) -> f64 {
        self.mu * (1.0 + self.kappa)
    }

    /// Signed series weights `w_k = (μκ)^k e^{−μκ} / (k! Γ(μ+k))`, stopped by
    /// the 1e-12 tail rule.  The component `k` is a Gamma(μ+k, 1/ζ₁) shape in
    /// x² with total mass `w_k Γ(μ+k)` (a Poisson(μκ) weight).
    pub(crate) fn series_weights(&self) -> Result<Vec<f64>> {
        let lam = self.mu * self.kappa;
        if lam <= 0.0 {
            return Ok(vec![(-ln_gamma_real(self.mu)?).exp()]);
        }
        let mut out = Vec::new();
        let mut sum_mass = 0.0;
        for k in 0..self.series_trunc {
            let kf = k as f64;
            let ln_w = kf * lam.ln() - lam - ln_gamma_real(kf + 1.0)? - ln_gamma_real(self.mu + kf)?;
            let w = ln_w.exp();
            out.push(w);
            // Poisson mass of this component; stop once the remaining tail is
            // negligible (past the mode).
            let mass = w * ln_gamma_real(self.mu + kf)?.exp();
            sum_mass += mass;
            if kf > lam && mass < SERIES_TAIL_TOL * sum_mass {
                return Ok(out);
            }
        }
        Err(Error::TruncationNotConverged {
            terms: self.series_trunc,
            last: (1.0 - sum_mass).abs(),
        })
    }
}

/// Double generalized-Gamma parameters: `X = X₁·X₂` with
/// `X_j^{α_j} ~ Gamma(β_j, Ω_j/β_j)` and
/// `Ω_j = (msp_j Γ(β_j) / Γ(β_j + 2/α_j))^{α_j/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DGGParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub msp1: f64,
    pub msp2: f64,
    /// Derived scale constants.
    pub omega1: f64,
    pub omega2: f64,
}

impl DGGParams {
    pub fn new(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64, msp1: f64, msp2: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha1", alpha1),
            ("beta1", beta1),
            ("alpha2", alpha2),
            ("beta2", beta2),
            ("msp1", msp1),
            ("msp2", msp2),
        ] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("dGG parameter {name} must be > 0 (got {v})")));
            }
        }
        let omega = |msp: f64, alpha: f64, beta: f64| -> Result<f64> {
            Ok((msp * gamma_real(beta)? / gamma_real(beta + 2.0 / alpha)?).powf(alpha / 2.0))
        };
        Ok(Self {
            alpha1,
            beta1,
            alpha2,
            beta2,
            msp1,
            msp2,
            omega1: omega(msp1, alpha1, beta1)?,
            omega2: omega(msp2, alpha2, beta2)?,
        })
    }

    /// Unit-power constructor used throughout the reference scenario.
    pub fn unit(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> Result<Self> {
        Self::new(alpha1, beta1, alpha2, beta2, 1.0, 1.0)
    }

    /// Mellin argument scale `c = (β₁/Ω₁)^{1/α₁} (β₂/Ω₂)^{1/α₂}` such that
    /// `E[X^r] = c^{−r} Γ(β₁+r/α₁)Γ(β₂+r/α₂) / (Γ(β₁)Γ(β₂))`.
    pub fn mellin_scale(&self) -> f64 {
        (self.beta1 / self.omega1).powf(1.0 / self.alpha1)
            * (self.beta2 / self.omega2).powf(1.0 / self.alpha2)
    }

    /// Closed-form moment `E[X^r]` (valid for r > −min(α₁β₁, α₂β₂)).
    pub fn moment(&self, r: f64) -> Result<f64> {
        let lo = -(self.alpha1 * self.beta1).min(self.alpha2 * self.beta2);
        if r <= lo {
            return Err(Error::StripViolation { r, lo, hi: f64::INFINITY });
        }
        Ok((self.mellin_scale().powf(-r))
            * (ln_gamma_real(self.beta1 + r / self.alpha1)? + ln_gamma_real(self.beta2 + r / self.alpha2)?
                - ln_gamma_real(self.beta1)?
                - ln_gamma_real(self.beta2)?)
            .exp())
    }
}

/// Generalized-K parameters for the direct link.  With the product
/// construction `X² = W·P`, `W ~ Gamma(m, m₀/m)`, `P ~ Gamma(M, 1)`, the
/// density is `f(x) = 2b/(Γ(m)Γ(M)) (bx/2)^{M+m−1} K_{M−m}(bx)` with
/// `b = 2√(m/m₀)` and `E[X²] = M·m₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenKParams {
    /// Small-scale severity.
    pub m: f64,
    /// Shadowing parameter.
    pub big_m: f64,
    /// Mean-power scale.
    pub m0: f64,
    /// Derived `b = 2√(m/m₀)`.
    pub b: f64,
    /// Optional shadowing spread the M value was derived from.
    pub sigma_db: Option<f64>,
}

impl GenKParams {
    pub fn new(m: f64, big_m: f64, m0: f64) -> Result<Self> {
        if !(m > 0.0) || !(big_m > 0.0) || !(m0 > 0.0) {
            return Err(Error::Domain(format!(
                "generalized-K requires m, M, m0 > 0 (got {m}, {big_m}, {m0})"
            )));
        }
        Ok(Self {
            m,
            big_m,
            m0,
            b: 2.0 * (m / m0).sqrt(),
            sigma_db: None,
        })
    }

    /// Map a lognormal shadowing spread in dB to M = 1/(exp(σ_n²) − 1) with
    /// σ_n = σ_dB/8.686.
    pub fn from_sigma_db(m: f64, sigma_db: f64, m0: f64) -> Result<Self> {
        let sigma_n = sigma_db / 8.686;
        let big_m = 1.0 / ((sigma_n * sigma_n).exp() - 1.0);
        let mut p = Self::new(m, big_m, m0)?;
        p.sigma_db = Some(sigma_db);
        Ok(p)
    }

    /// Construct with both σ_dB and an explicit M; fails unless they agree.
    pub fn from_sigma_db_checked(m: f64, sigma_db: f64, explicit_m: f64, m0: f64) -> Result<Self> {
        let derived = Self::from_sigma_db(m, sigma_db, m0)?;
        if (derived.big_m - explicit_m).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "explicit M = {explicit_m} conflicts with sigma_dB = {sigma_db} (implies M = {})",
                derived.big_m
            )));
        }
        Ok(derived)
    }

    /// Closed-form moment `E[X^r] = (2/b)^r Γ(M+r/2)Γ(m+r/2)/(Γ(M)Γ(m))`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        let lo = -2.0 * self.m.min(self.big_m);
        if r <= lo {
            return Err(Error::StripViolation { r, lo, hi: f64::INFINITY });
        }
        Ok((2.0 / self.b).powf(r)
            * (ln_gamma_real(self.big_m + r / 2.0)? + ln_gamma_real(self.m + r / 2.0)?
                - ln_gamma_real(self.big_m)?
                - ln_gamma_real(self.m)?)
            .exp())
    }
}

/// Random-waypoint distance distribution on `[0, dmax]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RWPTopology {
    /// Polynomial coefficients B_j.
    pub b: Vec<f64>,
    /// Polynomial exponents β_j.
    pub beta: Vec<u32>,
    /// Maximum distance (meters).
    pub dmax: f64,
}

impl RWPTopology {
    pub fn new(b: Vec<f64>, beta: Vec<u32>, dmax: f64) -> Result<Self> {
        if b.len() != beta.len() || b.is_empty() {
            return Err(Error::Domain("RWP coefficient lists must be non-empty and equal length".into()));
        }
        if !(dmax > 0.0) {
            return Err(Error::Domain(format!("RWP dmax must be > 0 (got {dmax})")));
        }
        let t = Self { b, beta, dmax };
        let norm = t.normalization_sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "RWP coefficients not normalized: sum B_j/(beta_j+1) = {norm}"
            )));
        }
        Ok(t)
    }

    /// `Σ_j B_j/(β_j+1)`; must equal 1 for a valid density on `[0, dmax]`.
    pub fn normalization_sum(&self) -> f64 {
        self.b
            .iter()
            .zip(&self.beta)
            .map(|(&bj, &bej)| bj / (bej as f64 + 1.0))
            .sum()
    }

    /// 1-D topology: B = [6, −6], β = [1, 2].
    pub fn one_d(dmax: f64) -> Self {
        Self::new(vec![6.0, -6.0], vec![1, 2], dmax).expect("built-in 1-D table")
    }

    /// 2-D topology: B = (1/73)[324, −420, 96], β = [1, 3, 5].
    pub fn two_d(dmax: f64) -> Self {
        Self::new(
            vec![324.0 / 73.0, -420.0 / 73.0, 96.0 / 73.0],
            vec![1, 3, 5],
            dmax,
        )
        .expect("built-in 2-D table")
    }

    /// 3-D topology: B = (1/72)[735, −1190, 455], β = [2, 4, 6].
    pub fn three_d(dmax: f64) -> Self {
        Self::new(
            vec![735.0 / 72.0, -1190.0 / 72.0, 455.0 / 72.0],
            vec![2, 4, 6],
            dmax,
        )
        .expect("built-in 3-D table")
    }

    /// `E[r^t] = Σ_j B_j dmax^t / (β_j + 1 + t)`, the gamma-ratio moment used
    /// by the cascade kernels.  Diverges (strip violation) at t ≤ −(β_min+1).
    pub fn moment(&self, t: f64) -> Result<f64> {
        let min_beta = *self.beta.iter().min().unwrap() as f64;
        if t <= -(min_beta + 1.0) {
            return Err(Error::StripViolation {
                r: t,
                lo: -(min_beta + 1.0),
                hi: f64::INFINITY,
            });
        }
        Ok(self
            .b
            .iter()
            .zip(&self.beta)
            .map(|(&bj, &bej)| bj * self.dmax.powf(t) / (bej as f64 + 1.0 + t))
            .sum())
    }

    /// CDF `F(r) = Σ_j B_j (r/dmax)^{β_j+1}/(β_j+1)`.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.dmax {
            return 1.0;
        }
        let u = r / self.dmax;
        self.b
            .iter()
            .zip(&self.beta)
            .map(|(&bj, &bej)| bj * u.powi(bej as i32 + 1) / (bej as f64 + 1.0))
            .sum()
    }
}

/// Residual phase error model at the RIS elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseNoise {
    /// Ideal continuous phase shifters (no residual error).
    Perfect,
    /// L-bit quantization: θ ~ U(−qπ, qπ) with q = 2^{−L}.
    Bits(u32),
}

impl PhaseNoise {
    /// Quantization half-width fraction q = 2^{−L}, `None` for perfect phase.
    pub fn q(&self) -> Option<f64> {
        match self {
            PhaseNoise::Perfect => None,
            PhaseNoise::Bits(l) => {
                debug_assert!(*l >= 1);
                Some(0.5f64.powi(*l as i32))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Analytic densities
// ---------------------------------------------------------------------------

/// κ-μ density (closed Bessel form, log-domain so μκ ≫ 700 cannot overflow).
pub fn kappa_mu_pdf(p: &KappaMuParams, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("kappa_mu_pdf requires x >= 0 (got {x})")));
    }
    if x == 0.0 {
        return Ok(if p.mu < 0.5 { f64::INFINITY } else if p.mu == 0.5 { kappa_mu_pdf(p, 1e-300)? } else { 0.0 });
    }
    if p.kappa < 1e-12 {
        // Nakagami-μ limit: f(x) = 2 μ^μ x^{2μ−1} e^{−μx²} / Γ(μ).
        let ln_f = 2.0f64.ln() + p.mu * p.mu.ln() + (2.0 * p.mu - 1.0) * x.ln()
            - p.mu * x * x
            - ln_gamma_real(p.mu)?;
        return Ok(ln_f.exp());
    }
    let k = p.kappa;
    let mu = p.mu;
    let ln_f = 2.0f64.ln() + mu.ln() + 0.5 * (mu + 1.0) * (1.0 + k).ln()
        - 0.5 * (mu - 1.0) * k.ln()
        - mu * k
        + mu * x.ln()
        - mu * (1.0 + k) * x * x
        + bessel_i_log(mu - 1.0, 2.0 * mu * (k * (1.0 + k)).sqrt() * x)?;
    Ok(ln_f.exp())
}

/// κ-μ density through the corrected series expansion
/// `f(x) = Σ_k ψ_k x^{2(μ+k)−1} e^{−μ(1+κ)x²}` with
/// `ψ_k = 2 μ^{μ+2k} κ^k (1+κ)^{μ+k} / (k! Γ(μ+k) e^{μκ})`.
///
/// # Errors
/// [`Error::TruncationNotConverged`] if the configured truncation leaves a
/// tail term above 1e-12 of the partial sum.
pub fn kappa_mu_series_pdf(p: &KappaMuParams, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("series pdf requires x >= 0 (got {x})")));
    }
    if x == 0.0 {
        return kappa_mu_pdf(p, 0.0);
    }
    let z1 = p.zeta1();
    let weights = p.series_weights()?;
    let mut sum = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        let a = p.mu + k as f64;
        // ψ_k x^{2(μ+k)−1} e^{−ζ₁x²} = 2 w ζ₁^{μ+k} x^{2(μ+k)−1} e^{−ζ₁x²}
        let ln_term = (2.0 * w).ln() + a * z1.ln() + (2.0 * a - 1.0) * x.ln() - z1 * x * x;
        sum += ln_term.exp();
    }
    Ok(sum)
}

/// dGG density through its Fox-H representation
/// `f(x) = H^{2,0}_{0,2}[c x | —; (β₁,1/α₁),(β₂,1/α₂)] / (x Γ(β₁) Γ(β₂))`.
pub fn dgg_pdf(p: &DGGParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("dgg_pdf requires x > 0 (got {x})")));
    }
    let params = FoxHParams::new(
        2,
        0,
        vec![],
        vec![
            GammaPair::new(p.beta1, 1.0 / p.alpha1),
            GammaPair::new(p.beta2, 1.0 / p.alpha2),
        ],
    )?;
    let contour = auto_contour(&params)?;
    let h = fox_h(&params, p.mellin_scale() * x, &contour)?;
    Ok(h.value * p.mellin_scale().powf(0.0) / x
        * (-ln_gamma_real(p.beta1)? - ln_gamma_real(p.beta2)?).exp())
}

/// Generalized-K density (stable Bessel-K form).
pub fn genk_pdf(p: &GenKParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("genk_pdf requires x > 0 (got {x})")));
    }
    let nu = p.big_m - p.m;
    let bx = p.b * x;
    let ln_f = (2.0 * p.b).ln() + (p.big_m + p.m - 1.0) * (bx / 2.0).ln()
        - ln_gamma_real(p.m)?
        - ln_gamma_real(p.big_m)?;
    Ok(ln_f.exp() * bessel_k(nu, bx)?)
}

/// Generalized-K density through its Meijer-G representation
/// `f(x) = b/(Γ(m)Γ(M)) G^{2,0}_{0,2}((bx/2)² | —; M+ν₀, m+ν₀)` shifted so the
/// power prefactor is absorbed into the G parameters:
/// with ν = (M+m−1)/2, f(x) = b · G^{2,0}_{0,2}((bx/2)² | —; (M+m−1)/2 + (M−m)/2, (M+m−1)/2 − (M−m)/2) / (Γ(m)Γ(M)).
pub fn genk_pdf_meijer(p: &GenKParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("genk_pdf_meijer requires x > 0 (got {x})")));
    }
    // K_ν(z) = (1/2) G^{2,0}_{0,2}(z²/4 | —; ν/2, −ν/2) and
    // (z/2)^{M+m−1} z^0: absorb (bx/2)^{M+m-1} = ((bx/2)²)^{(M+m−1)/2} into
    // the G parameters by shifting both lower entries by (M+m−1)/2.
    let shift = 0.5 * (p.big_m + p.m - 1.0);
    let nu = p.big_m - p.m;
    let params = FoxHParams::new(
        2,
        0,
        vec![],
        vec![
            GammaPair::new(shift + nu / 2.0, 1.0),
            GammaPair::new(shift - nu / 2.0, 1.0),
        ],
    )?;
    let contour = auto_contour(&params)?;
    let z = (p.b * x / 2.0).powi(2);
    let g = fox_h(&params, z, &contour)?;
    Ok(p.b * g.value * (-ln_gamma_real(p.m)? - ln_gamma_real(p.big_m)?).exp())
}

/// RWP distance density `Σ_j B_j r^{β_j} / dmax^{β_j+1}`.
pub fn rwp_pdf(t: &RWPTopology, r: f64) -> Result<f64> {
    if r < 0.0 || r > t.dmax {
        return Err(Error::Domain(format!(
            "rwp_pdf requires 0 <= r <= dmax (got r={r}, dmax={})",
            t.dmax
        )));
    }
    Ok(t.b
        .iter()
        .zip(&t.beta)
        .map(|(&bj, &bej)| bj * r.powi(bej as i32) / t.dmax.powi(bej as i32 + 1))
        .sum())
}

/// Characteristic factor of the quantized phase noise,
/// `⟨e^{−jθs}⟩ = sin(qπs)/(qπs)`, with the removable singularity handled.
pub fn phase_char(q: f64, s: Complex64) -> Result<Complex64> {
    if !(q > 0.0 && q <= 0.5) {
        return Err(Error::Domain(format!("phase_char requires 0 < q <= 1/2 (got {q})")));
    }
    let z = q * PI * s;
    if z.norm() < 1e-6 {
        // sin(z)/z = 1 − z²/6 + z⁴/120 − …
        let z2 = z * z;
        return Ok(Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0);
    }
    Ok(z.sin() / z)
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Draw one κ-μ amplitude: X² ~ ζ₁^{-1}·Gamma(μ+K, 1), K ~ Poisson(μκ)
/// (the exact Gamma-mixture representation, valid for real μ).
pub fn sample_kappa_mu<R: Rng + ?Sized>(p: &KappaMuParams, rng: &mut R) -> f64 {
    let lam = p.mu * p.kappa;
    let k = if lam > 0.0 {
        Poisson::new(lam).expect("valid Poisson rate").sample(rng)
    } else {
        0.0
    };
    let shape = p.mu + k;
    let g = Gamma::new(shape, 1.0).expect("valid Gamma shape").sample(rng);
    (g / p.zeta1()).sqrt()
}

/// Draw one dGG amplitude as the product of two generalized-Gamma variates.
pub fn sample_dgg<R: Rng + ?Sized>(p: &DGGParams, rng: &mut R) -> f64 {
    let g1 = Gamma::new(p.beta1, p.omega1 / p.beta1)
        .expect("valid Gamma")
        .sample(rng);
    let g2 = Gamma::new(p.beta2, p.omega2 / p.beta2)
        .expect("valid Gamma")
        .sample(rng);
    g1.powf(1.0 / p.alpha1) * g2.powf(1.0 / p.alpha2)
}

/// Draw one generalized-K amplitude (Nakagami amplitude with Gamma power).
pub fn sample_genk<R: Rng + ?Sized>(p: &GenKParams, rng: &mut R) -> f64 {
    let w = Gamma::new(p.m, p.m0 / p.m).expect("valid Gamma").sample(rng);
    let pw = Gamma::new(p.big_m, 1.0).expect("valid Gamma").sample(rng);
    (w * pw).sqrt()
}

/// Draw one RWP distance by inverse CDF (bisection + Newton polish on the
/// monotone polynomial CDF).
pub fn sample_rwp<R: Rng + ?Sized>(t: &RWPTopology, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let cdf_u = |v: f64| -> f64 {
        t.b.iter()
            .zip(&t.beta)
            .map(|(&bj, &bej)| bj * v.powi(bej as i32 + 1) / (bej as f64 + 1.0))
            .sum()
    };
    let pdf_u = |v: f64| -> f64 {
        t.b.iter()
            .zip(&t.beta)
            .map(|(&bj, &bej)| bj * v.powi(bej as i32))
            .sum()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut v = 0.5;
    for _ in 0..80 {
        let f = cdf_u(v) - u;
        if f > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let d = pdf_u(v);
        let newton = if d > 1e-12 { v - f / d } else { f64::NAN };
        v = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    v * t.dmax
}

/// Draw one residual phase θ ~ U(−qπ, qπ) (0 for perfect phase).
pub fn sample_phase<R: Rng + ?Sized>(p: &PhaseNoise, rng: &mut R) -> f64 {
    match p.q() {
        None => 0.0,
        Some(q) => rng.gen_range(-q * PI..q * PI),
    }
}

/// Tagged union of the fading amplitude families.
#[derive(Debug, Clone, PartialEq)]
pub enum FadingDistribution {
    KappaMu(KappaMuParams),
    Dgg(DGGParams),
    GenK(GenKParams),
}

impl FadingDistribution {
    /// Draw one amplitude from the exact distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingDistribution::KappaMu(p) => sample_kappa_mu(p, rng),
            FadingDistribution::Dgg(p) => sample_dgg(p, rng),
            FadingDistribution::GenK(p) => sample_genk(p, rng),
        }
    }
}
