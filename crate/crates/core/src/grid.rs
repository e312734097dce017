//! Uniformly sampled functions on a bounded interval, translation and
//! finite-difference operators, and residual checks for the exact product
//! and telescoping identities satisfied by those operators.
//!
//! Offsets are whole multiples of the grid spacing, so every difference is
//! an exact combination of stored samples. Samples that an operation cannot
//! define (because a shifted index falls off the array) are stored as NaN and
//! excluded from the valid index range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when snapping physical coordinates to grid indices.
const SNAP_EPS: f64 = 1e-9;

/// Uniform grid `[-half_width, half_width]` with spacing `spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: f64,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(spacing: f64, half_width: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParams(format!("grid spacing must be positive, got {spacing}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParams(format!("grid half-width must be positive, got {half_width}")));
        }
        let steps = half_width / spacing;
        if (steps - steps.round()).abs() > SNAP_EPS * steps.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "half-width {half_width} is not a whole multiple of spacing {spacing}"
            )));
        }
        Ok(Self { spacing, half_width })
    }

    pub fn origin(&self) -> f64 {
        -self.half_width
    }

    /// Number of samples, endpoints included.
    pub fn count(&self) -> usize {
        2 * (self.half_width / self.spacing).round() as usize + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin() + i as f64 * self.spacing
    }

    /// Same extent, half the spacing.
    pub fn refined(&self) -> Self {
        Self { spacing: self.spacing / 2.0, half_width: self.half_width }
    }

    /// Same extent, spacing multiplied by `factor`.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        Self::new(self.spacing * factor as f64, self.half_width)
    }
}

/// A closed ball of the real line: `[center - radius, center + radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: f64,
    pub radius: f64,
}

impl Region {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !center.is_finite() || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "region needs finite center and positive radius, got ({center}, {radius})"
            )));
        }
        Ok(Self { center, radius })
    }

    /// The unit ball centered at the origin.
    pub fn unit() -> Self {
        Self { center: 0.0, radius: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.center + self.radius
    }

    /// `self + a`.
    pub fn shifted(&self, a: f64) -> Self {
        Self { center: self.center + a, radius: self.radius }
    }

    /// Same center, radius multiplied by `factor` (so `2B + a` is
    /// `B.shifted(a).dilated(2.0)`).
    pub fn dilated(&self, factor: f64) -> Self {
        Self { center: self.center, radius: self.radius * factor }
    }

    /// Minkowski sum with `[-margin, margin]`.
    pub fn enlarged(&self, margin: f64) -> Self {
        Self { center: self.center, radius: self.radius + margin }
    }
}

/// A shift `h = steps * spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridOffset {
    pub steps: isize,
}

impl GridOffset {
    pub fn new(steps: isize) -> Self {
        Self { steps }
    }

    /// Converts a physical length into whole grid steps; fails when `h` is
    /// not (up to rounding) a multiple of `spacing`.
    pub fn from_length(h: f64, spacing: f64) -> Result<Self> {
        let steps = h / spacing;
        let rounded = steps.round();
        if !steps.is_finite() || (steps - rounded).abs() > SNAP_EPS * rounded.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "offset {h} is not a whole multiple of spacing {spacing}"
            )));
        }
        Ok(Self { steps: rounded as isize })
    }

    pub fn length(&self, spacing: f64) -> f64 {
        self.steps as f64 * spacing
    }

    pub fn abs_steps(&self) -> usize {
        self.steps.unsigned_abs()
    }

    pub fn scaled(&self, factor: isize) -> Self {
        Self { steps: self.steps * factor }
    }
}

/// Largest number of whole steps `k` with `k * spacing <= t`.
pub fn max_steps(t: f64, spacing: f64) -> usize {
    if t.is_nan() || t <= 0.0 {
        return 0;
    }
    (t / spacing + SNAP_EPS).floor() as usize
}

/// Real-valued samples on a uniform grid with explicit valid-range bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spacing: f64,
    origin: f64,
    values: Vec<f64>,
    valid: Option<(usize, usize)>,
    smooth: bool,
}

impl GridFunction {
    pub fn new(spacing: f64, origin: f64, values: Vec<f64>) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParams(format!("grid spacing must be positive, got {spacing}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidParams("grid origin must be finite".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidParams("grid function needs at least one sample".into()));
        }
        let valid = Some((0, values.len() - 1));
        Ok(Self { spacing, origin, values, valid, smooth: false })
    }

    /// Samples `f` at every point of `grid`.
    pub fn sample(grid: &GridSpec, mut f: impl FnMut(f64) -> f64) -> Self {
        let values = (0..grid.count()).map(|i| f(grid.x(i))).collect();
        Self {
            spacing: grid.spacing,
            origin: grid.origin(),
            values,
            valid: Some((0, grid.count() - 1)),
            smooth: false,
        }
    }

    /// Restricts the valid range to the inclusive index range `[lo, hi]`.
    pub fn with_valid_indices(mut self, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi || hi >= self.values.len() {
            return Err(Error::InvalidParams(format!(
                "valid range [{lo}, {hi}] outside sample range [0, {}]",
                self.values.len() - 1
            )));
        }
        self.valid = Some((lo, hi));
        Ok(self)
    }

    /// Marks the samples as coming from a function smooth at grid scale.
    pub fn with_smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    /// Inclusive index range of meaningful samples, `None` when empty.
    pub fn valid_indices(&self) -> Option<(usize, usize)> {
        self.valid
    }

    /// Physical extent `[valid_lo, valid_hi]` of meaningful samples.
    pub fn valid_domain(&self) -> Option<(f64, f64)> {
        self.valid.map(|(lo, hi)| (self.x(lo), self.x(hi)))
    }

    pub fn valid_count(&self) -> usize {
        self.valid.map_or(0, |(lo, hi)| hi - lo + 1)
    }

    pub fn is_valid_index(&self, i: isize) -> bool {
        matches!(self.valid, Some((lo, hi)) if i >= lo as isize && i <= hi as isize)
    }

    /// Index of the grid point at `x`, if `x` is (up to rounding) a grid point.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let s = (x - self.origin) / self.spacing;
        let r = s.round();
        if (s - r).abs() > SNAP_EPS * r.abs().max(1.0) || r < 0.0 || r >= self.values.len() as f64 {
            return None;
        }
        Some(r as usize)
    }

    /// Exact lookup at a grid point inside the valid domain.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let i = self.index_of(x)?;
        self.is_valid_index(i as isize).then(|| self.values[i])
    }

    /// Maximum of `|f|` over the valid range.
    pub fn sup_norm(&self) -> f64 {
        match self.valid {
            Some((lo, hi)) => self.values[lo..=hi].iter().fold(0.0, |m, v| m.max(v.abs())),
            None => 0.0,
        }
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.spacing == other.spacing && self.origin == other.origin && self.values.len() == other.values.len()
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(spacing {}, origin {}, {} samples) vs (spacing {}, origin {}, {} samples)",
                self.spacing,
                self.origin,
                self.values.len(),
                other.spacing,
                other.origin,
                other.values.len()
            )))
        }
    }

    /// Snapped inclusive index range of `region` (endpoints rounded outward),
    /// as signed indices that may fall outside the sample array.
    pub fn region_span(&self, region: &Region) -> (isize, isize) {
        let lo = ((region.lo() - self.origin) / self.spacing + SNAP_EPS).floor() as isize;
        let hi = ((region.hi() - self.origin) / self.spacing - SNAP_EPS).ceil() as isize;
        (lo, hi)
    }

    /// Snapped index range of `region`, checked to lie in the valid domain
    /// together with `margin_lo` / `margin_hi` extra samples on each side.
    pub fn region_indices(&self, region: &Region, margin_lo: usize, margin_hi: usize) -> Result<(usize, usize)> {
        let (lo, hi) = self.region_span(region);
        let (vlo, vhi) = match self.valid {
            Some(v) => v,
            None => return Err(Error::EmptyDomain("function has no valid samples".into())),
        };
        if lo - (margin_lo as isize) < vlo as isize || hi + (margin_hi as isize) > vhi as isize {
            return Err(Error::RegionOutsideDomain {
                lo: region.lo(),
                hi: region.hi(),
                margin: margin_lo.max(margin_hi) as f64 * self.spacing,
                valid_lo: self.x(vlo),
                valid_hi: self.x(vhi),
            });
        }
        Ok((lo as usize, hi as usize))
    }

    /// New function on the same grid; the valid range is `valid` (may be empty).
    fn derived(&self, values: Vec<f64>, valid: Option<(usize, usize)>) -> Self {
        Self { spacing: self.spacing, origin: self.origin, values, valid, smooth: self.smooth }
    }

    /// Valid range shrunk so that `i + shift` stays valid for every shift in
    /// `[min_shift, max_shift]` (both include 0).
    fn shrunk(&self, min_shift: isize, max_shift: isize) -> Option<(usize, usize)> {
        let (lo, hi) = self.valid?;
        let lo = lo as isize - min_shift;
        let hi = hi as isize - max_shift;
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// `(tau_a f)(x) = f(x - a)`.
    pub fn translate(&self, a: GridOffset) -> GridFunction {
        let n = self.values.len() as isize;
        let k = a.steps;
        let values = (0..n)
            .map(|i| {
                let j = i - k;
                if (0..n).contains(&j) {
                    self.values[j as usize]
                } else {
                    f64::NAN
                }
            })
            .collect();
        let valid = self.valid.and_then(|(lo, hi)| {
            let lo = (lo as isize + k).max(0);
            let hi = (hi as isize + k).min(n - 1);
            (lo <= hi).then_some((lo as usize, hi as usize))
        });
        self.derived(values, valid)
    }

    /// First difference `f(x + h) - f(x)`.
    pub fn diff1(&self, h: GridOffset) -> GridFunction {
        let k = h.steps;
        let valid = self.shrunk(k.min(0), k.max(0));
        let values = self.pointwise(valid, |i| {
            let f = &self.values;
            f[(i + k) as usize] - f[i as usize]
        });
        self.derived(values, valid)
    }

    /// Second difference, evaluated as `(f(x+2h) - f(x+h)) - (f(x+h) - f(x))`
    /// so that it coincides bit for bit with `diff1` applied twice.
    pub fn diff2(&self, h: GridOffset) -> GridFunction {
        let k = h.steps;
        let valid = self.shrunk((2 * k).min(0), (2 * k).max(0));
        let values = self.pointwise(valid, |i| {
            let f = &self.values;
            let (a, b, c) = (f[i as usize], f[(i + k) as usize], f[(i + 2 * k) as usize]);
            (c - b) - (b - a)
        });
        self.derived(values, valid)
    }

    /// Pointwise product on a common grid; valid ranges intersect.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        let valid = match (self.valid, other.valid) {
            (Some((a, b)), Some((c, d))) => {
                let (lo, hi) = (a.max(c), b.min(d));
                (lo <= hi).then_some((lo, hi))
            }
            _ => None,
        };
        Ok(Self {
            spacing: self.spacing,
            origin: self.origin,
            values,
            valid,
            smooth: self.smooth && other.smooth,
        })
    }

    /// Central difference `(f(x+dx) - f(x-dx)) / (2 dx)`.
    pub fn central_derivative(&self) -> Result<GridFunction> {
        if !self.smooth {
            return Err(Error::NotSmooth);
        }
        let valid = self.shrunk(-1, 1);
        let inv = 1.0 / (2.0 * self.spacing);
        let values = self.pointwise(valid, |i| {
            let f = &self.values;
            (f[(i + 1) as usize] - f[(i - 1) as usize]) * inv
        });
        Ok(self.derived(values, valid))
    }

    fn pointwise(&self, valid: Option<(usize, usize)>, op: impl Fn(isize) -> f64) -> Vec<f64> {
        let mut values = vec![f64::NAN; self.values.len()];
        if let Some((lo, hi)) = valid {
            for (i, v) in values.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *v = op(i as isize);
            }
        }
        values
    }
}

/// Index range on which every shift in `shifts` keeps both `f` and `g` valid.
fn common_range(f: &GridFunction, g: &GridFunction, shifts: &[isize]) -> Result<(usize, usize)> {
    let lo_shift = shifts.iter().copied().min().unwrap_or(0).min(0);
    let hi_shift = shifts.iter().copied().max().unwrap_or(0).max(0);
    let a = f.shrunk(lo_shift, hi_shift);
    let b = g.shrunk(lo_shift, hi_shift);
    match (a, b) {
        (Some((a0, a1)), Some((b0, b1))) if a0.max(b0) <= a1.min(b1) => Ok((a0.max(b0), a1.min(b1))),
        _ => Err(Error::EmptyDomain("no common valid samples for the requested offsets".into())),
    }
}

/// Maximum residual of `D_h(fg) = (D_h f)(tau_{-h} g) + f (D_h g)` over the
/// common valid domain.
pub fn check_leibniz1(f: &GridFunction, g: &GridFunction, h: GridOffset) -> Result<f64> {
    f.check_same_grid(g)?;
    let k = h.steps;
    let (lo, hi) = common_range(f, g, &[k])?;
    let (fv, gv) = (f.values(), g.values());
    let mut worst: f64 = 0.0;
    for i in lo..=hi {
        let j = (i as isize + k) as usize;
        let lhs = fv[j] * gv[j] - fv[i] * gv[i];
        let rhs = (fv[j] - fv[i]) * gv[j] + fv[i] * (gv[j] - gv[i]);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Maximum residual of
/// `D2_h(fg) = (D2_h f)(tau_{-2h} g) + (D2_h g)(tau_{-h} f) + (D_h f)(D_{2h} g)`.
pub fn check_leibniz2(f: &GridFunction, g: &GridFunction, h: GridOffset) -> Result<f64> {
    f.check_same_grid(g)?;
    let k = h.steps;
    let (lo, hi) = common_range(f, g, &[k, 2 * k])?;
    let (fv, gv) = (f.values(), g.values());
    let second = |v: &[f64], i: usize, j: usize, l: usize| (v[l] - v[j]) - (v[j] - v[i]);
    let mut worst: f64 = 0.0;
    for i in lo..=hi {
        let j = (i as isize + k) as usize;
        let l = (i as isize + 2 * k) as usize;
        let prod = |m: usize| fv[m] * gv[m];
        let lhs = (prod(l) - prod(j)) - (prod(j) - prod(i));
        let rhs = second(fv, i, j, l) * gv[l] + second(gv, i, j, l) * fv[j] + (fv[j] - fv[i]) * (gv[l] - gv[i]);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Maximum residual of the dyadic telescoping identity
/// `D_h = 2^-k D_{2^k h} - sum_{l<k} 2^-(l+1) D2_{2^l h}`.
pub fn check_telescoping(f: &GridFunction, h: GridOffset, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParams("telescoping depth k must be positive".into()));
    }
    let steps = h.steps;
    let far = steps
        .checked_mul(1isize << k)
        .ok_or_else(|| Error::InvalidParams("offset overflow".into()))?;
    let (lo, hi) = common_range(f, f, &[steps, far])?;
    let v = f.values();
    let at = |i: usize, s: isize| v[(i as isize + s) as usize];
    let mut worst: f64 = 0.0;
    #[allow(clippy::needless_range_loop)] // offsets index around i
    for i in lo..=hi {
        let lhs = at(i, steps) - v[i];
        let mut rhs = (at(i, far) - v[i]) / (1u64 << k) as f64;
        for l in 0..k {
            let s = steps << l;
            let d2 = (at(i, 2 * s) - at(i, s)) - (at(i, s) - v[i]);
            rhs -= d2 / (1u64 << (l + 1)) as f64;
        }
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(dx: f64, l: f64) -> GridSpec {
        GridSpec::new(dx, l).unwrap()
    }

    #[test]
    fn translate_identity_map() {
        let g = grid(0.25, 4.0);
        let f = GridFunction::sample(&g, |x| x);
        let t = f.translate(GridOffset::from_length(1.0, 0.25).unwrap());
        let (lo, hi) = t.valid_domain().unwrap();
        assert_eq!((lo, hi), (-3.0, 4.0));
        for i in t.valid_indices().unwrap().0..=t.valid_indices().unwrap().1 {
            assert_eq!(t.values()[i], t.x(i) - 1.0);
        }
    }

    #[test]
    fn translate_zero_is_bit_identical() {
        let f = GridFunction::sample(&grid(0.01, 2.0), f64::sin);
        assert_eq!(f.translate(GridOffset::new(0)), f);
    }

    #[test]
    fn translate_constant() {
        let f = GridFunction::sample(&grid(0.5, 2.0), |_| 3.0);
        let t = f.translate(GridOffset::new(-3));
        let (lo, hi) = t.valid_indices().unwrap();
        assert!(t.values()[lo..=hi].iter().all(|&v| v == 3.0));
        assert_eq!(t.valid_count(), f.len() - 3);
    }

    #[test]
    fn diff1_examples() {
        let g = grid(0.25, 4.0);
        let lin = GridFunction::sample(&g, |x| x).diff1(GridOffset::new(2));
        let (lo, hi) = lin.valid_indices().unwrap();
        assert!(lin.values()[lo..=hi].iter().all(|&v| v == 0.5));

        let sq = GridFunction::sample(&g, |x| x * x);
        let d = sq.diff1(GridOffset::new(1));
        let (lo, hi) = d.valid_indices().unwrap();
        for i in lo..=hi {
            let x = d.x(i);
            assert!((d.values()[i] - (0.5 * x + 0.0625)).abs() < 1e-12);
        }
        let c = GridFunction::sample(&g, |_| 7.0).diff1(GridOffset::new(-3));
        let (lo, hi) = c.valid_indices().unwrap();
        assert!(c.values()[lo..=hi].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diff2_examples() {
        let g = grid(0.25, 4.0);
        let lin = GridFunction::sample(&g, |x| 3.0 * x - 1.0).diff2(GridOffset::new(3));
        let (lo, hi) = lin.valid_indices().unwrap();
        assert!(lin.values()[lo..=hi].iter().all(|&v| v.abs() < 1e-12));
        let sq = GridFunction::sample(&g, |x| x * x).diff2(GridOffset::new(1));
        let (lo, hi) = sq.valid_indices().unwrap();
        assert!(sq.values()[lo..=hi].iter().all(|&v| (v - 0.125).abs() < 1e-12));
        assert_eq!(sq.valid_count(), g.count() - 2);
    }

    #[test]
    fn valid_count_shrinks_by_offset() {
        let f = GridFunction::sample(&grid(0.1, 3.0), f64::cos);
        for k in [-7isize, -1, 1, 5] {
            assert_eq!(f.diff1(GridOffset::new(k)).valid_count(), f.len() - k.unsigned_abs());
        }
        let far = f.diff1(GridOffset::new(f.len() as isize));
        assert!(far.valid_indices().is_none());
    }

    #[test]
    fn leibniz_examples() {
        let g = grid(0.25, 4.0);
        let x = GridFunction::sample(&g, |x| x);
        let s = GridFunction::sample(&g, f64::sin);
        assert!(check_leibniz1(&x, &s, GridOffset::new(1)).unwrap() <= 1e-12);
        let one = GridFunction::sample(&g, |_| 1.0);
        assert_eq!(check_leibniz1(&one, &one, GridOffset::new(2)).unwrap(), 0.0);
        assert!(check_leibniz2(&x, &x, GridOffset::new(1)).unwrap() <= 1e-12);
        assert_eq!(check_leibniz2(&one, &s, GridOffset::new(2)).unwrap(), 0.0);
    }

    #[test]
    fn leibniz_random() {
        let g = grid(1.0 / 64.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = GridFunction::sample(&g, |_| rng.random_range(-1.0..1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = GridFunction::sample(&g, |_| rng.random_range(-1.0..1.0));
        assert!(check_leibniz1(&f, &h, GridOffset::new(3)).unwrap() <= 1e-12);
        assert!(check_leibniz2(&f, &h, GridOffset::new(5)).unwrap() <= 1e-12);
    }

    #[test]
    fn leibniz_grid_mismatch() {
        let a = GridFunction::sample(&grid(0.25, 4.0), |x| x);
        let b = GridFunction::sample(&grid(0.5, 4.0), |x| x);
        assert!(matches!(check_leibniz1(&a, &b, GridOffset::new(1)), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn telescoping_examples() {
        let e = GridFunction::sample(&grid(1.0 / 128.0, 2.0), f64::exp);
        let r = check_telescoping(&e, GridOffset::new(1), 1).unwrap();
        assert!(r <= 1e-12 * (1.0 + e.sup_norm()));
        let aff = GridFunction::sample(&grid(0.25, 4.0), |x| 2.0 * x + 1.0);
        assert_eq!(check_telescoping(&aff, GridOffset::new(1), 3).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rnd = GridFunction::sample(&grid(1.0 / 64.0, 2.0), |_| rng.random_range(-1.0..1.0));
        assert!(check_telescoping(&rnd, GridOffset::new(1), 6).unwrap() <= 1e-11);
    }

    #[test]
    fn telescoping_empty_domain() {
        let f = GridFunction::sample(&grid(0.25, 1.0), |x| x);
        assert!(matches!(
            check_telescoping(&f, GridOffset::new(1), 4),
            Err(Error::EmptyDomain(_))
        ));
    }

    #[test]
    fn region_snapping_and_errors() {
        let f = GridFunction::sample(&grid(0.25, 4.0), |x| x);
        let r = Region::new(0.1, 1.0).unwrap();
        let (lo, hi) = f.region_indices(&r, 0, 0).unwrap();
        assert_eq!(f.x(lo), -1.0);
        assert_eq!(f.x(hi), 1.25);
        assert!(f.region_indices(&Region::new(3.5, 1.0).unwrap(), 0, 0).is_err());
        assert!(f.region_indices(&Region::unit(), 13, 0).is_err());
        assert!(f.region_indices(&Region::unit(), 12, 12).is_ok());
    }

    #[test]
    fn central_derivative_requires_smooth_tag() {
        let g = grid(1e-3, 1.0);
        let f = GridFunction::sample(&g, |x| x * x);
        assert_eq!(f.central_derivative(), Err(Error::NotSmooth));
        let d = f.with_smooth(true).central_derivative().unwrap();
        let i = d.index_of(0.5).unwrap();
        assert!((d.values()[i] - 1.0).abs() < 1e-9);
        assert_eq!(d.valid_count(), g.count() - 2);
    }

    #[test]
    fn offset_from_length() {
        assert_eq!(GridOffset::from_length(0.75, 0.25).unwrap().steps, 3);
        assert!(GridOffset::from_length(0.3, 0.25).is_err());
        assert_eq!(max_steps(0.25, 0.25), 1);
        assert_eq!(max_steps(0.2, 0.25), 0);
    }
}
