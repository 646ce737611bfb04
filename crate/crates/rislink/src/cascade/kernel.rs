//! Internal Mellin-kernel machinery shared by the cascade statistics and the
//! outage/BER metrics.
//!
//! Every analytic statistic in this crate is a (possibly multivariate)
//! Mellin–Barnes integral whose per-variable integrand is a *series of gamma
//! products*:
//!
//! ```text
//! K(s) = Σ_t w_t · Π Γ(shift + scale·s) / Π Γ(shift + scale·s)
//! ```
//!
//! (series index `t` running over the power-series order k of the first-hop
//! density and the mobility polynomial branch j), integrated against
//! `exp(s·(ln c + ln x))` along a vertical line.  Multivariate statistics
//! couple N such kernels only through joint gamma factors that depend on
//! `U = Σ_i s_i` (and, with a direct link, on one extra variable `s_d`).  On
//! a common uniform node grid the N-fold tensor sum therefore collapses to a
//! discrete *convolution* of the per-variable node arrays followed by a
//! single sum over `U` — O(N·M²) instead of O(M^N) — which is what makes the
//! exact sum statistics cheap.

use crate::specfun::{Eval, ln_gamma};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default relative tolerance of the kernel evaluators.
pub(crate) const KERNEL_TOL: f64 = 1e-6;
/// Absolute convergence floor (all evaluated quantities are probabilities or
/// densities of order ≤ 1e2).
const ABS_FLOOR: f64 = 1e-12;

/// One gamma factor `Γ(shift + scale·s)`; `scale` may have either sign.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaFactor {
    pub shift: f64,
    pub scale: f64,
}

impl GammaFactor {
    pub fn new(shift: f64, scale: f64) -> Self {
        Self { shift, scale }
    }

    fn at(&self, s: Complex64) -> Complex64 {
        Complex64::new(self.shift, 0.0) + self.scale * s
    }
}

/// One series term: a signed log-weight and its gamma factors.
#[derive(Debug, Clone)]
pub(crate) struct KernelTerm {
    pub ln_weight: f64,
    pub sign: f64,
    pub num: Vec<GammaFactor>,
    pub den: Vec<GammaFactor>,
}

/// A per-variable Mellin kernel: series of gamma products plus the argument
/// scale `c` (the full integrand is `K(s)·exp(s(ln c + ln x))`).
#[derive(Debug, Clone)]
pub(crate) struct MellinKernel {
    pub terms: Vec<KernelTerm>,
    /// ln of the Mellin argument multiplier (everything except the evaluation
    /// point itself).
    pub ln_scale: f64,
}

impl MellinKernel {
    /// Admissible vertical strip: every numerator gamma argument must keep a
    /// positive real part on the line.
    pub fn strip(&self) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in &self.terms {
            for g in &t.num {
                if g.scale > 0.0 {
                    lo = lo.max(-g.shift / g.scale);
                } else if g.scale < 0.0 {
                    hi = hi.min(g.shift / -g.scale);
                }
            }
        }
        (lo, hi)
    }

    /// Pick the contour abscissa (strip midpoint, or unit offset from a
    /// one-sided strip).
    pub fn abscissa(&self) -> Result<f64> {
        let (lo, hi) = self.strip();
        if lo >= hi {
            return Err(Error::NoAdmissibleContour { lo, hi });
        }
        Ok(if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if hi.is_finite() {
            hi - 1.0
        } else if lo.is_finite() {
            lo + 1.0
        } else {
            0.0
        })
    }

    /// Worst-case exponential decay rate along the contour (minimum over
    /// series terms of `(π/2)(Σ|scale|_num − Σ|scale|_den)`).
    pub fn decay_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let num: f64 = t.num.iter().map(|g| g.scale.abs()).sum();
                let den: f64 = t.den.iter().map(|g| g.scale.abs()).sum();
                PI / 2.0 * (num - den)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Kernel value at a single complex point (series summed in the log
    /// domain, exponentiated per term).
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        'term: for t in &self.terms {
            let mut lg = Complex64::new(t.ln_weight, 0.0);
            for g in &t.num {
                lg += ln_gamma(g.at(s))?;
            }
            for g in &t.den {
                match ln_gamma(g.at(s)) {
                    Ok(v) => lg -= v,
                    Err(Error::GammaPole(_)) => continue 'term,
                    Err(e) => return Err(e),
                }
            }
            acc += t.sign * lg.exp();
        }
        Ok(acc)
    }

    /// Real-axis evaluation used by moment formulas: `K(s)` for real `s`
    /// strictly inside the strip.
    pub fn eval_real(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.strip();
        if !(s > lo && s < hi) {
            return Err(Error::StripViolation { r: s, lo, hi });
        }
        Ok(self.eval(Complex64::new(s, 0.0))?.re)
    }

    /// Right edge of the strip and the summed residue coefficient at it.
    ///
    /// For small arguments the contour closes rightward and the leading term
    /// is `−ΣRes ≈ coeff · (c x)^p`; each numerator gamma whose first pole
    /// sits at the edge contributes `(−1/scale)` times the remaining factors
    /// evaluated at `s = p` (ties at the edge are summed as simple poles).
    pub fn leading_right_pole(&self) -> Result<(f64, f64)> {
        let mut p = f64::INFINITY;
        for t in &self.terms {
            for g in &t.num {
                if g.scale < 0.0 {
                    p = p.min(g.shift / -g.scale);
                }
            }
        }
        if !p.is_finite() {
            return Err(Error::Domain("kernel has no right pole family".into()));
        }
        let sp = Complex64::new(p, 0.0);
        let mut coeff = 0.0;
        for t in &self.terms {
            'factor: for (gi, g) in t.num.iter().enumerate() {
                if g.scale < 0.0 && (g.shift / -g.scale - p).abs() < 1e-12 {
                    let mut lg = Complex64::new(t.ln_weight + (-1.0 / g.scale).ln(), 0.0);
                    for (oj, o) in t.num.iter().enumerate() {
                        if oj != gi {
                            lg += ln_gamma(o.at(sp))?;
                        }
                    }
                    for o in &t.den {
                        match ln_gamma(o.at(sp)) {
                            Ok(v) => lg -= v,
                            // A denominator gamma at a pole kills this residue.
                            Err(Error::GammaPole(_)) => continue 'factor,
                            Err(e) => return Err(e),
                        }
                    }
                    coeff += t.sign * lg.exp().re;
                }
            }
        }
        Ok((p, coeff))
    }
}

/// A shared uniform contour grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid {
    pub h: f64,
    pub half_n: usize,
}

impl Grid {
    pub fn len(&self) -> usize {
        2 * self.half_n + 1
    }

    pub fn t(&self, k: usize) -> f64 {
        (k as f64 - self.half_n as f64) * self.h
    }
}

/// Weighted node array `A[k] = K(σ + i t_k) · exp(s_k · ln_arg)` where
/// `ln_arg` already includes the kernel's own `ln_scale` plus the evaluation
/// point.
pub(crate) fn node_array(
    kernel: &MellinKernel,
    sigma: f64,
    grid: Grid,
    ln_arg: f64,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let s = Complex64::new(sigma, grid.t(k));
        out.push(kernel.eval(s)? * (s * ln_arg).exp());
    }
    Ok(out)
}

/// Full complex convolution (direct O(M·K)); entry `j` of the result
/// corresponds to the summed imaginary offset `(j − Σ half_n)·h`.
pub(crate) fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.norm_sqr() < 1e-320 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Adaptive node-halving driver: the closure evaluates the statistic for a
/// given grid spacing; refinement stops when consecutive values agree to the
/// relative tolerance (with an absolute probability-scale floor).
pub(crate) fn refine<F: FnMut(f64) -> Result<f64>>(mut eval: F, h0: f64, tol: f64) -> Result<Eval> {
    let mut h = h0;
    let mut prev = eval(h)?;
    let mut best_err = f64::INFINITY;
    for _ in 0..5 {
        h *= 0.5;
        let val = eval(h)?;
        let err = (val - prev).abs();
        if err <= tol * val.abs() + ABS_FLOOR {
            return Ok(Eval { value: val, error: err });
        }
        best_err = err;
        prev = val;
    }
    Err(Error::NonConvergentIntegral { err: best_err, tol })
}

/// Truncation half-length delivering ~e⁻⁴⁰ endpoint tails for a net
/// exponential rate (kernel decay minus joint-factor growth).
pub(crate) fn truncation_for_rate(rate: f64) -> f64 {
    if rate > 1e-3 {
        (40.0 / rate).clamp(10.0, 800.0)
    } else {
        200.0
    }
}

/// Initial grid spacing: the integrand oscillates like `e^{i t·ln_arg}`, so
/// the spacing must resolve the fastest phase rotation present.
fn initial_h(base: f64, ln_args: &[f64]) -> f64 {
    let w = ln_args.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    base.min(2.0 / (1.0 + w))
}

fn min_decay(kernels: &[&MellinKernel]) -> f64 {
    kernels
        .iter()
        .map(|k| k.decay_rate())
        .fold(f64::INFINITY, f64::min)
}

/// Univariate statistic `(1/2πi) ∫ K(s) e^{s·ln_arg} ds` (the caller applies
/// prefactors such as `x^{−1}`).
pub(crate) fn eval_univariate(kernel: &MellinKernel, ln_x: f64) -> Result<Eval> {
    let sigma = kernel.abscissa()?;
    eval_univariate_at(kernel, ln_x, sigma)
}

/// Same as [`eval_univariate`] with an explicit abscissa.
pub(crate) fn eval_univariate_at(kernel: &MellinKernel, ln_x: f64, sigma: f64) -> Result<Eval> {
    let t_max = truncation_for_rate(kernel.decay_rate());
    let ln_arg = kernel.ln_scale + ln_x;
    refine(
        |h| {
            let grid = Grid { h, half_n: (t_max / h).ceil() as usize };
            let a = node_array(kernel, sigma, grid, ln_arg)?;
            let sum: Complex64 = a.iter().sum();
            Ok(sum.re * h / (2.0 * PI))
        },
        initial_h(0.2, &[ln_arg]),
        KERNEL_TOL,
    )
}

/// N-variate sum statistic with a joint factor depending only on `U = Σ s_i`:
///
/// ```text
/// (1/2πi)^N ∮ Π_i K_i(s_i) e^{s_i ln_arg_i} · joint(Σ s_i) ds
/// ```
///
/// computed by convolving the per-variable node arrays.  `joint_growth` is
/// the vertical exponential growth rate of the joint factor (e.g. `π/2` for
/// `1/Γ(U)`), subtracted from the kernel decay when sizing the truncation.
pub(crate) fn eval_sum<J>(
    kernels: &[&MellinKernel],
    ln_x: &[f64],
    joint_growth: f64,
    joint: J,
) -> Result<Eval>
where
    J: Fn(Complex64) -> Result<Complex64>,
{
    let n = kernels.len();
    let sigmas: Vec<f64> = kernels.iter().map(|k| k.abscissa()).collect::<Result<_>>()?;
    let sigma_sum: f64 = sigmas.iter().sum();
    let t_max = truncation_for_rate(min_decay(kernels) - joint_growth);
    refine(
        |h| {
            let grid = Grid { h, half_n: (t_max / h).ceil() as usize };
            let mut conv: Option<Vec<Complex64>> = None;
            for (i, k) in kernels.iter().enumerate() {
                let a = node_array(k, sigmas[i], grid, k.ln_scale + ln_x[i])?;
                conv = Some(match conv {
                    None => a,
                    Some(c) => convolve(&c, &a),
                });
            }
            let c = conv.unwrap();
            let center = n * grid.half_n;
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &v) in c.iter().enumerate() {
                if v.norm_sqr() < 1e-320 {
                    continue;
                }
                let u = Complex64::new(sigma_sum, (j as f64 - center as f64) * h);
                sum += v * joint(u)?;
            }
            Ok(sum.re * (h / (2.0 * PI)).powi(n as i32))
        },
        {
            let args: Vec<f64> =
                kernels.iter().zip(ln_x).map(|(k, &lx)| k.ln_scale + lx).collect();
            initial_h(0.2, &args)
        },
        KERNEL_TOL,
    )
}

/// (N+1)-variate statistic: N summed variables coupled through `U = Σ s_i`
/// plus one direct-link variable `s_d`, with joint factor `joint(U, s_d)`.
pub(crate) fn eval_sum_with_direct<J>(
    ris: &[&MellinKernel],
    ln_x_ris: &[f64],
    direct: &MellinKernel,
    ln_x_d: f64,
    growth_u: f64,
    growth_d: f64,
    joint: J,
) -> Result<Eval>
where
    J: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let n = ris.len();
    let sigmas: Vec<f64> = ris.iter().map(|k| k.abscissa()).collect::<Result<_>>()?;
    let sigma_sum: f64 = sigmas.iter().sum();
    let sigma_d = direct.abscissa()?;
    let t_max = truncation_for_rate(min_decay(ris) - growth_u);
    let t_max_d = truncation_for_rate(direct.decay_rate() - growth_d);
    refine(
        |h| {
            let grid = Grid { h, half_n: (t_max / h).ceil() as usize };
            let grid_d = Grid { h, half_n: (t_max_d / h).ceil() as usize };
            let mut conv: Option<Vec<Complex64>> = None;
            for (i, k) in ris.iter().enumerate() {
                let a = node_array(k, sigmas[i], grid, k.ln_scale + ln_x_ris[i])?;
                conv = Some(match conv {
                    None => a,
                    Some(c) => convolve(&c, &a),
                });
            }
            let c = conv.unwrap();
            let d = node_array(direct, sigma_d, grid_d, direct.ln_scale + ln_x_d)?;
            let center = n * grid.half_n;
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &cv) in c.iter().enumerate() {
                if cv.norm_sqr() < 1e-320 {
                    continue;
                }
                let u = Complex64::new(sigma_sum, (j as f64 - center as f64) * h);
                for (l, &dv) in d.iter().enumerate() {
                    if dv.norm_sqr() < 1e-320 {
                        continue;
                    }
                    let sd = Complex64::new(sigma_d, grid_d.t(l));
                    sum += cv * dv * joint(u, sd)?;
                }
            }
            Ok(sum.re * (h / (2.0 * PI)).powi(n as i32 + 1))
        },
        {
            let mut args: Vec<f64> =
                ris.iter().zip(ln_x_ris).map(|(k, &lx)| k.ln_scale + lx).collect();
            args.push(direct.ln_scale + ln_x_d);
            initial_h(0.25, &args)
        },
        KERNEL_TOL,
    )
}

/// Strip intersection across kernels with an optional extra lower cutoff,
/// picking the abscissa that minimizes the integrand magnitude on the real
/// axis (saddle-point placement).  With many stacked kernels the midpoint
/// magnitude can exceed the result by tens of orders — fatal cancellation —
/// while the minimizer keeps the peak within a few orders of the value.
fn product_abscissa<J>(
    kernels: &[&MellinKernel],
    floor: f64,
    ln_arg: f64,
    joint: &J,
) -> Result<f64>
where
    J: Fn(Complex64) -> Result<Complex64>,
{
    let mut lo = floor;
    let mut hi = f64::INFINITY;
    for k in kernels {
        let (l, h) = k.strip();
        lo = lo.max(l);
        hi = hi.min(h);
    }
    if lo >= hi {
        return Err(Error::NoAdmissibleContour { lo, hi });
    }
    if !hi.is_finite() {
        hi = lo + 40.0;
    }
    let score = |sigma: f64| -> f64 {
        let s = Complex64::new(sigma, 0.0);
        let mut ln_mag = sigma * ln_arg;
        for k in kernels {
            match k.eval(s) {
                Ok(v) if v.norm() > 0.0 => ln_mag += v.norm().ln(),
                _ => return f64::INFINITY,
            }
        }
        match joint(s) {
            Ok(v) if v.norm() > 0.0 => ln_mag + v.norm().ln(),
            _ => f64::INFINITY,
        }
    };
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    let points = 160;
    for i in 1..points {
        let sigma = lo + (hi - lo) * i as f64 / points as f64;
        let sc = score(sigma);
        if sc < best.0 {
            best = (sc, sigma);
        }
    }
    Ok(best.1)
}

/// Univariate statistic on a *pointwise product* of kernels (the AM-GM bound
/// path): `(1/2πi) ∫ Π_i K_i(t) · e^{t·ln_arg} · joint(t) dt` where `ln_arg`
/// must already contain `Σ_i ln c_i` and the transformed evaluation point.
/// `floor` restricts the abscissa from below (joints like `1/t` need t > 0).
pub(crate) fn eval_product<J>(
    kernels: &[&MellinKernel],
    ln_arg: f64,
    floor: f64,
    joint_growth: f64,
    joint: J,
) -> Result<Eval>
where
    J: Fn(Complex64) -> Result<Complex64>,
{
    let sigma = product_abscissa(kernels, floor, ln_arg, &joint)?;
    let rate: f64 = kernels.iter().map(|k| k.decay_rate()).sum::<f64>() - joint_growth;
    let t_max = truncation_for_rate(rate);
    refine(
        |h| {
            let grid = Grid { h, half_n: (t_max / h).ceil() as usize };
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..grid.len() {
                let s = Complex64::new(sigma, grid.t(k));
                // Kernel magnitudes are Mellin transforms of densities — O(1)
                // each, so the pointwise product stays within f64 range.
                let mut v = (s * ln_arg).exp();
                for kern in kernels {
                    v *= kern.eval(s)?;
                    if v.norm_sqr() < 1e-320 {
                        break;
                    }
                }
                if v.norm_sqr() >= 1e-320 {
                    sum += v * joint(s)?;
                }
            }
            Ok(sum.re * h / (2.0 * PI))
        },
        initial_h(0.2, &[ln_arg]),
        KERNEL_TOL,
    )
}

/// Bivariate bound statistic: pointwise-product kernel in `t` coupled to the
/// direct-link kernel in `s_d` through `joint(t, s_d)`.
pub(crate) fn eval_product_with_direct<J>(
    kernels: &[&MellinKernel],
    ln_arg_ris: f64,
    direct: &MellinKernel,
    ln_x_d: f64,
    floor: f64,
    growth_t: f64,
    growth_d: f64,
    joint: J,
) -> Result<Eval>
where
    J: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let sigma_d = direct.abscissa()?;
    let sigma = {
        // Fold the direct coordinate in at its abscissa when scoring σ.
        let sd = Complex64::new(sigma_d, 0.0);
        let joint_t = |s: Complex64| joint(s, sd);
        product_abscissa(kernels, floor, ln_arg_ris, &joint_t)?
    };
    let rate: f64 = kernels.iter().map(|k| k.decay_rate()).sum::<f64>() - growth_t;
    let t_max = truncation_for_rate(rate);
    let t_max_d = truncation_for_rate(direct.decay_rate() - growth_d);
    refine(
        |h| {
            let grid = Grid { h, half_n: (t_max / h).ceil() as usize };
            let grid_d = Grid { h, half_n: (t_max_d / h).ceil() as usize };
            let d = node_array(direct, sigma_d, grid_d, direct.ln_scale + ln_x_d)?;
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..grid.len() {
                let s = Complex64::new(sigma, grid.t(k));
                let mut v = (s * ln_arg_ris).exp();
                for kern in kernels {
                    v *= kern.eval(s)?;
                    if v.norm_sqr() < 1e-320 {
                        break;
                    }
                }
                if v.norm_sqr() < 1e-320 {
                    continue;
                }
                for (l, &dv) in d.iter().enumerate() {
                    if dv.norm_sqr() < 1e-320 {
                        continue;
                    }
                    let sd = Complex64::new(sigma_d, grid_d.t(l));
                    sum += v * dv * joint(s, sd)?;
                }
            }
            Ok(sum.re * (h / (2.0 * PI)).powi(2))
        },
        initial_h(0.25, &[ln_arg_ris, direct.ln_scale + ln_x_d]),
        KERNEL_TOL,
    )
}
