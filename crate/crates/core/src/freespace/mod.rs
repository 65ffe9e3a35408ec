//! Free-space fundamental solution on the real line through its Laplace
//! transform `û(x,z) = √K(z) e^{−|x|√K(z)} / (2z)`.

mod contour;
mod invert;
mod spectral;
mod symbol;
mod tail;

use num_complex::Complex64;

pub use contour::InversionContour;
pub use invert::{invert_symbol, Inversion, Target, DIRECT_FROM_HORIZONS};
pub use spectral::{fit_and_check, SpectralParams, SpectralReport};
pub use symbol::Symbol;
pub use tail::{fit_stretch_exponent, TailAsymptote, TailFit, TailFitParams};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::quadrature;
use crate::special::gamma;

/// `û(x, z)` for `Re z > 0`, built on the quadrature route for `K`.
pub fn hat_u(spec: &KernelSpec, x: f64, z: Complex64) -> Result<Complex64> {
    let k = spec.symbol_k(z)?;
    let q = k.sqrt();
    Ok(q * (-x.abs() * q).exp() / (2.0 * z))
}

/// `u(x, t)` by contour inversion.
pub fn invert(spec: &KernelSpec, x: f64, t: f64, contour: &InversionContour) -> Result<Inversion> {
    invert_symbol(
        &Symbol::from_kernel(spec)?,
        Target::Density { x },
        t,
        contour,
    )
}

/// Fourier mode `ũ(ξ, t)` of the fundamental solution.
pub fn fourier_mode(
    spec: &KernelSpec,
    xi: f64,
    t: f64,
    contour: &InversionContour,
) -> Result<Inversion> {
    invert_symbol(
        &Symbol::from_kernel(spec)?,
        Target::Fourier { xi },
        t,
        contour,
    )
}

/// Small-time peak law `√A / (2 Γ(1 − α/2)) t^{−α/2}` from `K ≈ A z^α`.
pub fn peak_small_t(symbol: &Symbol, t: f64) -> f64 {
    let (a, alpha) = symbol.large_z();
    a.sqrt() / (2.0 * gamma(1.0 - 0.5 * alpha)) * t.powf(-0.5 * alpha)
}

/// Large-time peak law `√(mass / (4π t))`.
pub fn peak_large_t(symbol: &Symbol, t: f64) -> f64 {
    (symbol.mass() / (4.0 * std::f64::consts::PI * t)).sqrt()
}

/// `(u_{σρ}(x, t), u_ρ(x/√σ, t))`.
pub fn kernel_scaling_check(
    spec: &KernelSpec,
    sigma: f64,
    x: f64,
    t: f64,
    contour: &InversionContour,
) -> Result<(f64, f64)> {
    let scaled = spec.scaled(sigma)?;
    let lhs = invert(&scaled, x, t, contour)?.value;
    let rhs = invert(spec, x / sigma.sqrt(), t, contour)?.value;
    Ok((lhs, rhs))
}

/// `(u_{σρ}(x, t), √σ u_ρ(√σ x, t))`: the pair that follows from
/// `K_{σρ} = σ K_ρ` in the transform.
pub fn kernel_scaling_pair(
    spec: &KernelSpec,
    sigma: f64,
    x: f64,
    t: f64,
    contour: &InversionContour,
) -> Result<(f64, f64)> {
    let scaled = spec.scaled(sigma)?;
    let s = sigma.sqrt();
    let lhs = invert(&scaled, x, t, contour)?.value;
    let rhs = s * invert(spec, s * x, t, contour)?.value;
    Ok((lhs, rhs))
}

/// `∫ u(x, t) dx` by adaptive quadrature of the inverted profile over
/// `[0, X]` (doubled by evenness), `X` chosen where `u` has fallen below
/// `1e-16` of its peak.
pub fn mass_integral(symbol: &Symbol, t: f64, contour: &InversionContour) -> Result<f64> {
    let u = |x: f64| invert_symbol(symbol, Target::Density { x }, t, contour).map(|r| r.value);
    let peak = u(0.0)?;
    let mut x_end = 1e-3;
    for _ in 0..80 {
        if u(x_end)?.abs() < 1e-16 * peak {
            break;
        }
        x_end *= 2.0;
    }
    let failed = std::cell::Cell::new(None);
    let half = quadrature::integrate(
        |x| match u(x) {
            Ok(v) => Complex64::new(v, 0.0),
            Err(e) => {
                failed.set(Some(e.to_string()));
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        x_end,
        1e-11,
        1e-14,
    )?;
    if let Some(msg) = failed.take() {
        return Err(Error::Numerical(msg));
    }
    Ok(2.0 * half.re)
}

/// Stretch exponent of the far tail of `u(·, t)`.
pub fn tail_fit(
    spec: &KernelSpec,
    t: f64,
    params: &TailFitParams,
    contour: &InversionContour,
) -> Result<TailFit> {
    let symbol = Symbol::from_kernel(spec)?;
    fit_stretch_exponent(
        |x| invert_symbol(&symbol, Target::Density { x }, t, contour).map(|r| r.value),
        params,
    )
}

/// Fit the smoothing bound on `ũ(ξ, t)` for ξ up to `xi_max` and count
/// violations on held-out modes.
pub fn spectral_decay_check(
    spec: &KernelSpec,
    t: f64,
    xi_max: f64,
    params: &SpectralParams,
    contour: &InversionContour,
) -> Result<SpectralReport> {
    let symbol = Symbol::from_kernel(spec)?;
    let n = params.samples.max(4);
    let mut modes = Vec::with_capacity(n);
    for i in 0..n {
        let f = i as f64 / (n - 1) as f64;
        let xi = xi_max * params.xi_span.powf(1.0 - f);
        modes.push((
            xi,
            invert_symbol(&symbol, Target::Fourier { xi }, t, contour)?.value,
        ));
    }
    Ok(fit_and_check(&modes, t.powf(spec.alpha), params))
}
