//! Smooth compactly supported windows and the window-multiplier localized
//! norm `sup_a N((tau_a phi) f)`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Region};
use crate::norms::{CompactFunction, TranslationLattice, WholeSpaceNorm};

/// `exp(1 - 1/(1 - u^2))` on `(-1, 1)`, zero elsewhere; peak value 1 at 0.
pub fn bump_profile(u: f64) -> f64 {
    let r = 1.0 - u * u;
    if r <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / r).exp()
    }
}

const PANELS: usize = 32;

fn gauss_legendre() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 12;
        (0..n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 1.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn profile_integral(a: f64, b: f64) -> f64 {
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let mid = a + (i as f64 + 0.5) * h;
        total += gauss_legendre().iter().map(|&(x, w)| w * bump_profile(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// Normalized primitive of the profile: 0 below -1, 1 above 1.
pub fn smooth_step(v: f64) -> f64 {
    static TOTAL: OnceLock<f64> = OnceLock::new();
    if v <= -1.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    let total = *TOTAL.get_or_init(|| profile_integral(-1.0, 1.0));
    // Integrate over the shorter side for accuracy near the ends.
    if v <= 0.0 {
        profile_integral(-1.0, v) / total
    } else {
        1.0 - profile_integral(v, 1.0) / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum WindowPreset {
    /// Bump supported in `B/4`.
    Phi0,
    /// Equal to 1 on `4B`, supported in `5B`.
    Phi1,
    Custom { inner: f64, outer: f64 },
}

/// Even window centered at `center`: 1 on `|x - center| <= inner`, 0 on
/// `|x - center| >= outer`, values in `[0, 1]`. With `inner = 0` it is the
/// rescaled bump profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpWindow {
    pub center: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

pub fn make_window(preset: WindowPreset, ball: &Region) -> Result<BumpWindow> {
    let r = ball.radius;
    let (inner, outer) = match preset {
        WindowPreset::Phi0 => (0.0, r / 4.0),
        WindowPreset::Phi1 => (4.0 * r, 5.0 * r),
        WindowPreset::Custom { inner, outer } => (inner, outer),
    };
    BumpWindow::new(ball.center, inner, outer)
}

impl BumpWindow {
    pub fn new(center: f64, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius >= 0.0 && outer_radius.is_finite() && inner_radius < outer_radius && center.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "window needs 0 <= inner < outer (got {inner_radius}, {outer_radius})"
            )));
        }
        Ok(Self { center, inner_radius, outer_radius })
    }

    /// Value at displacement `u` from the center.
    pub fn value(&self, u: f64) -> f64 {
        let d = u.abs();
        if d >= self.outer_radius {
            return 0.0;
        }
        if d <= self.inner_radius {
            return 1.0;
        }
        if self.inner_radius == 0.0 {
            return bump_profile(d / self.outer_radius);
        }
        let mid = 0.5 * (self.inner_radius + self.outer_radius);
        let eps = 0.5 * (self.outer_radius - self.inner_radius);
        smooth_step((mid - d) / eps)
    }

    /// The window translated by `a` (`tau_a phi`).
    pub fn translated(&self, a: f64) -> Self {
        Self { center: self.center + a, ..*self }
    }

    /// Index range and values of the samples of this window on `f`'s grid,
    /// after checking that the support enlarged by `margin` lies in the valid domain.
    pub fn sample_on(&self, f: &GridFunction, margin: f64) -> Result<(usize, Vec<f64>)> {
        let dx = f.spacing();
        let (vlo, vhi) = f
            .valid_domain()
            .ok_or_else(|| Error::EmptyDomain("function has no valid samples".into()))?;
        let lo = self.center - self.outer_radius - margin;
        let hi = self.center + self.outer_radius + margin;
        let slack = 1e-9 * dx;
        if lo < vlo - slack || hi > vhi + slack {
            return Err(Error::MarginViolation(format!(
                "window support [{}, {}] enlarged by the difference margin {margin} is [{lo}, {hi}], outside the valid domain [{vlo}, {vhi}]",
                self.center - self.outer_radius,
                self.center + self.outer_radius
            )));
        }
        let i0 = ((self.center - self.outer_radius - f.origin()) / dx).ceil().max(0.0) as usize;
        let i1 = (((self.center + self.outer_radius - f.origin()) / dx).floor() as usize).min(f.len() - 1);
        let values = (i0..=i1).map(|i| self.value(f.x(i) - self.center)).collect();
        Ok((i0, values))
    }

    /// `(tau_a phi) f` as a compactly supported function.
    pub fn product(&self, f: &GridFunction, a: f64, margin: f64) -> Result<CompactFunction> {
        let (lo, weights) = self.translated(a).sample_on(f, margin)?;
        CompactFunction::product(f, lo, &weights)
    }

    pub fn sample(&self, f: &GridFunction) -> Result<GridFunction> {
        let (lo, w) = self.sample_on(f, 0.0)?;
        let mut values = vec![0.0; f.len()];
        values[lo..lo + w.len()].copy_from_slice(&w);
        GridFunction::new(f.spacing(), f.origin(), values)
    }
}

/// `base((tau_a w) f)` for every lattice point.
pub fn windowed_lu_profile(
    f: &GridFunction,
    w: &BumpWindow,
    base: &WholeSpaceNorm,
    lat: &TranslationLattice,
) -> Result<Vec<f64>> {
    lat.points()
        .par_iter()
        .map(|&a| base.eval(&w.product(f, a, base.margin())?))
        .collect()
}

/// `max_a base((tau_a w) f)` over the lattice.
pub fn windowed_lu_norm(f: &GridFunction, w: &BumpWindow, base: &WholeSpaceNorm, lat: &TranslationLattice) -> Result<f64> {
    Ok(windowed_lu_profile(f, w, base, lat)?.into_iter().fold(0.0, f64::max))
}

/// Ratio of the windowed norms for two windows; `0/0` is taken as 1.
pub fn phi_independence_ratio(
    f: &GridFunction,
    w1: &BumpWindow,
    w2: &BumpWindow,
    base: &WholeSpaceNorm,
    lat: &TranslationLattice,
) -> Result<f64> {
    let num = windowed_lu_norm(f, w1, base, lat)?;
    let den = if w1 == w2 { num } else { windowed_lu_norm(f, w2, base, lat)? };
    ratio_or_one(num, den)
}

pub(crate) fn ratio_or_one(num: f64, den: f64) -> Result<f64> {
    match (num == 0.0, den == 0.0) {
        (true, true) => Ok(1.0),
        (_, true) => Err(Error::Degenerate(format!("ratio {num}/0"))),
        _ => Ok(num / den),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::norms::{lp_lu_norm, Exponent, SmoothnessParams, TQuadrature};

    fn grid() -> GridSpec {
        GridSpec::new(1.0 / 512.0, 8.0).unwrap()
    }

    #[test]
    fn profile_and_step() {
        assert_eq!(bump_profile(0.0), 1.0);
        assert_eq!(bump_profile(1.0), 0.0);
        assert!((smooth_step(0.0) - 0.5).abs() < 1e-12);
        assert!((smooth_step(0.3) + smooth_step(-0.3) - 1.0).abs() < 1e-13);
        let mut prev = 0.0;
        for i in -100..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn presets_satisfy_invariants() {
        let f = GridFunction::sample(&grid(), |_| 1.0);
        let b = Region::unit();
        let phi0 = make_window(WindowPreset::Phi0, &b).unwrap();
        let s0 = phi0.sample(&f).unwrap();
        for (i, &v) in s0.values().iter().enumerate() {
            let x = f.x(i);
            assert!((0.0..=1.0).contains(&v));
            if x.abs() >= 0.25 {
                assert_eq!(v, 0.0);
            }
            assert_eq!(v, s0.values()[f.len() - 1 - i], "even");
        }
        assert_eq!(s0.value_at(0.0).unwrap(), 1.0);
        let phi1 = make_window(WindowPreset::Phi1, &b).unwrap();
        let s1 = phi1.sample(&f).unwrap();
        for (i, &v) in s1.values().iter().enumerate() {
            let x = f.x(i);
            if x.abs() <= 4.0 {
                assert_eq!(v, 1.0);
            }
            if x.abs() >= 5.0 {
                assert_eq!(v, 0.0);
            }
            assert!((0.0..=1.0).contains(&v));
        }
        let classic = make_window(WindowPreset::Custom { inner: 0.0, outer: 1.0 }, &b).unwrap();
        assert_eq!(classic.value(0.0), 1.0);
        assert!(make_window(WindowPreset::Custom { inner: 1.0, outer: 0.5 }, &b).is_err());
    }

    #[test]
    fn windowed_lp_of_constant() {
        let f = GridFunction::sample(&grid(), |_| -2.5);
        let b = Region::unit();
        let w = make_window(WindowPreset::Phi0, &b).unwrap();
        let lat = TranslationLattice::default_for(&b);
        let base = WholeSpaceNorm::Lp { p: Exponent::Finite(2.0) };
        let prof = windowed_lu_profile(&f, &w, &base, &lat).unwrap();
        let own = w.product(&GridFunction::sample(&grid(), |_| 1.0), 0.0, 0.0).unwrap().lp_norm(Exponent::Finite(2.0));
        for v in prof {
            assert!((v - 2.5 * own).abs() < 1e-12);
        }
    }

    #[test]
    fn plateau_window_dominates_lp_lu() {
        let f = GridFunction::sample(&grid(), |x| (5.0 * x).sin() + 0.3 * x);
        let b = Region::unit();
        let lat = TranslationLattice::new(-1.0, 1.0, 0.25).unwrap();
        let w = make_window(WindowPreset::Phi1, &b).unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinite] {
            let lhs = lp_lu_norm(&f, p, &b, &lat).unwrap();
            let rhs = windowed_lu_norm(&f, &w, &WholeSpaceNorm::Lp { p }, &lat).unwrap();
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn homogeneity_translation_and_ratio() {
        let g = grid();
        let f = GridFunction::sample(&g, |x| (3.0 * x).cos() * (1.0 + x.abs()).ln());
        let scaled = GridFunction::sample(&g, |x| -3.0 * ((3.0 * x).cos() * (1.0 + x.abs()).ln()));
        let b = Region::unit();
        let lat = TranslationLattice::new(-1.0, 1.0, 0.25).unwrap();
        let w = make_window(WindowPreset::Phi0, &b).unwrap();
        let sp = SmoothnessParams::besov(0.5, Exponent::Finite(2.0), Exponent::Finite(2.0)).unwrap();
        let tq = TQuadrature::new(1.0, 4, 8).unwrap();
        let base = WholeSpaceNorm::besov(sp, tq).unwrap();
        let n = windowed_lu_norm(&f, &w, &base, &lat).unwrap();
        let ns = windowed_lu_norm(&scaled, &w, &base, &lat).unwrap();
        assert!((ns - 3.0 * n).abs() <= 1e-12 * ns);
        assert_eq!(phi_independence_ratio(&f, &w, &w, &base, &lat).unwrap(), 1.0);
        let zero = GridFunction::sample(&g, |_| 0.0);
        let w2 = make_window(WindowPreset::Custom { inner: 0.0, outer: 0.5 }, &b).unwrap();
        assert_eq!(phi_independence_ratio(&zero, &w, &w2, &base, &lat).unwrap(), 1.0);
        // A lattice-aligned shift of f is absorbed by the sup.
        let shift = 0.5;
        let shifted = GridFunction::sample(&g, |x| (3.0 * (x - shift)).cos() * (1.0 + (x - shift).abs()).ln());
        let wide = TranslationLattice::new(-1.0, 1.5, 0.25).unwrap();
        let a = windowed_lu_profile(&f, &w, &base, &wide).unwrap();
        let c = windowed_lu_profile(&shifted, &w, &base, &wide).unwrap();
        for i in 0..a.len() - 2 {
            assert!((a[i] - c[i + 2]).abs() <= 1e-9 * a[i]);
        }
    }

    #[test]
    fn margin_violation_is_reported() {
        let f = GridFunction::sample(&grid(), |x| x);
        let b = Region::unit();
        let w = make_window(WindowPreset::Phi1, &b).unwrap();
        let lat = TranslationLattice::new(-3.5, 3.5, 3.5).unwrap();
        let base = WholeSpaceNorm::Lp { p: Exponent::Finite(2.0) };
        let err = windowed_lu_norm(&f, &w, &base, &lat).unwrap_err();
        assert!(err.is_domain_error());
    }
}
