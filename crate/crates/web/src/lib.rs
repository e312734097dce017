//! Browser bindings: sample a test function, plot its modulus of smoothness
//! with the fitted exponent, and compare intrinsic and windowed localized
//! Besov seminorms across translations.

use smlb::grid::{GridFunction, GridSpec, Region};
use smlb::norms::{moduli_at_scales, Exponent, LocalModuli, Order, SmoothnessParams, TQuadrature, TranslationLattice, WholeSpaceNorm};
use smlb::testlab::{estimate_smoothness_slope, generate, GeneratorSpec};
use smlb::windows::{make_window, windowed_lu_profile, WindowPreset};
use wasm_bindgen::prelude::*;

const SPACING: f64 = 1.0 / 512.0;
const HALF_WIDTH: f64 = 4.0;

fn quadrature() -> TQuadrature {
    TQuadrature { t_max: 1.0, levels_per_octave: 4, depth: 9 }
}

fn exponent(p: f64) -> Result<Exponent, String> {
    Exponent::finite(p).map_err(|e| e.to_string())
}

fn function(spec: &str) -> Result<GridFunction, String> {
    let grid = GridSpec::new(SPACING, HALF_WIDTH).map_err(|e| e.to_string())?;
    let spec = GeneratorSpec::parse_inline(spec).map_err(|e| e.to_string())?;
    Ok(generate(&spec, &grid).map_err(|e| e.to_string())?.samples)
}

/// Interleaved `(x, f(x))` pairs on `[-2, 2]`.
pub fn sample_points(spec: &str) -> Result<Vec<f64>, String> {
    let f = function(spec)?;
    Ok((0..f.len())
        .map(|i| (f.x(i), f.values()[i]))
        .filter(|(x, _)| x.abs() <= 2.0)
        .flat_map(|(x, y)| [x, y])
        .collect())
}

/// Scales, `omega_{p,[-1,1]}` at each scale, and the fitted exponent as the last entry.
pub fn modulus_curve(spec: &str, p: f64) -> Result<Vec<f64>, String> {
    let f = function(spec)?;
    let p = exponent(p)?;
    let tq = quadrature();
    let ball = Region::unit();
    let scales = tq.scales();
    let omega = moduli_at_scales(&f, p, Order::First, &ball, &TranslationLattice::single(0.0), &scales)
        .map_err(|e| e.to_string())?
        .remove(0);
    let slope = estimate_smoothness_slope(&f, p, &ball, &tq).unwrap_or(f64::NAN);
    Ok(scales.into_iter().chain(omega).chain([slope]).collect())
}

/// Lattice points, intrinsic seminorm over `B + a`, and windowed norm of
/// `(tau_a phi_0) f`, as three consecutive blocks.
pub fn localized_profiles(spec: &str, s: f64, p: f64, q: f64) -> Result<Vec<f64>, String> {
    let f = function(spec)?;
    let sp = SmoothnessParams::besov(s, exponent(p)?, exponent(q)?).map_err(|e| e.to_string())?;
    let ball = Region::unit();
    let lat = TranslationLattice::default_for(&ball);
    let tq = quadrature();
    let local = LocalModuli::compute(&f, sp.p, sp.order(), &ball, &lat, &tq).map_err(|e| e.to_string())?;
    let w = make_window(WindowPreset::Phi0, &ball).map_err(|e| e.to_string())?;
    let base = WholeSpaceNorm::besov(sp, tq).map_err(|e| e.to_string())?;
    let windowed = windowed_lu_profile(&f, &w, &base, &lat).map_err(|e| e.to_string())?;
    Ok(local.points.iter().copied().chain(local.seminorms(sp.s, sp.q)).chain(windowed).collect())
}

#[wasm_bindgen]
pub fn sample(spec: &str) -> Result<Vec<f64>, JsError> {
    sample_points(spec).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn modulus(spec: &str, p: f64) -> Result<Vec<f64>, JsError> {
    modulus_curve(spec, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn localized(spec: &str, s: f64, p: f64, q: f64) -> Result<Vec<f64>, JsError> {
    localized_profiles(spec, s, p, q).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_interleaves_points() {
        let v = sample_points("affine").unwrap();
        assert_eq!(v.len(), 2 * 2049);
        assert_eq!((v[0], v[1]), (-2.0, -2.0));
    }

    #[test]
    fn modulus_of_affine_is_linear() {
        let v = modulus_curve("affine", 2.0).unwrap();
        let n = quadrature().len();
        assert_eq!(v.len(), 2 * n + 1);
        assert!((v[2 * n] - 1.0).abs() < 0.02);
    }

    #[test]
    fn localized_blocks_have_lattice_length() {
        let v = localized_profiles("weier:s=0.5,J=9", 0.3, 2.0, 2.0).unwrap();
        assert_eq!(v.len(), 3 * 17);
        assert!(v[17..].iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(localized_profiles("weier:s=0.5,J=9", 1.5, 2.0, 2.0).is_err());
        assert!(modulus_curve("nope", 2.0).is_err());
    }
}
