//! Norms and seminorms of sampled functions.
//!
//! Everything here works on a [`GridFunction`] restricted to closed regions:
//! `L_p` norms, the moduli of smoothness `omega` (first differences) and
//! `eta` (second differences), Besov and Lizorkin-Triebel seminorms, and the
//! intrinsic localized-uniform norms obtained by taking the supremum of those
//! region quantities over a lattice of translates `B + a`.
//!
//! The scale integral `int_0^{t_max} g(t) dt/t` is a trapezoid rule on the
//! geometric scales of a [`TQuadrature`]; the supremum over `|h| <= t` is an
//! exact maximum over whole-step offsets.

mod kernel;
pub mod whole;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{max_steps, GridFunction, Region};

pub use kernel::Order;
pub(crate) use kernel::{ball_sums, window_lp, window_offset_cummax, Power};
pub use whole::{CompactFunction, WholeSpaceNorm};

/// An exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = Error;
    fn try_from(r: ExponentRepr) -> Result<Self> {
        match r {
            ExponentRepr::Number(v) => Exponent::finite(v),
            ExponentRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Finite(v) => ExponentRepr::Number(v),
            Exponent::Infinite => ExponentRepr::Text("inf".into()),
        }
    }
}

impl Exponent {
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() && v >= 1.0 {
            Ok(Exponent::Finite(v))
        } else if v == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else {
            Err(Error::InvalidParams(format!("exponent must lie in [1, inf], got {v}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(v) => *v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Hashable identity (bit pattern of the value).
    pub fn key(&self) -> u64 {
        self.value().to_bits()
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            t => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidParams(format!("cannot parse exponent {s:?}")))
                .and_then(Exponent::finite),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceFamily {
    Besov,
    LizorkinTriebel,
}

/// Smoothness `s`, integrability `p` and summability `q` of a space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub family: SpaceFamily,
}

impl SmoothnessParams {
    pub fn new(family: SpaceFamily, s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParams(format!("smoothness s must be positive, got {s}")));
        }
        if family == SpaceFamily::LizorkinTriebel && p.is_infinite() {
            return Err(Error::InvalidParams("Lizorkin-Triebel spaces need p < inf".into()));
        }
        Ok(Self { s, p, q, family })
    }

    pub fn besov(s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        Self::new(SpaceFamily::Besov, s, p, q)
    }

    pub fn tl(s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        Self::new(SpaceFamily::LizorkinTriebel, s, p, q)
    }

    /// Integer `m` with `m < s <= m + 1`.
    pub fn derivative_count(&self) -> usize {
        (self.s.ceil() as usize).saturating_sub(1)
    }

    /// The same space with `s` lowered into `(0, 1]`.
    pub fn reduced(&self) -> Self {
        Self { s: self.s - self.derivative_count() as f64, ..*self }
    }

    /// Difference order used for `s` in `(0, 1]`.
    pub fn order(&self) -> Order {
        if self.reduced().s >= 1.0 {
            Order::Second
        } else {
            Order::First
        }
    }

    pub fn label(&self) -> String {
        format!("s{}_p{}_q{}", self.s, self.p, self.q)
    }
}

/// Geometric scales `t_j = t_max * 2^(-j/m)`, `j = 0..=J*m`, with trapezoid
/// weights in `log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TQuadrature {
    pub t_max: f64,
    pub levels_per_octave: u32,
    pub depth: u32,
}

impl Default for TQuadrature {
    fn default() -> Self {
        Self { t_max: 1.0, levels_per_octave: 4, depth: 10 }
    }
}

impl TQuadrature {
    pub fn new(t_max: f64, levels_per_octave: u32, depth: u32) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) || levels_per_octave == 0 || depth == 0 {
            return Err(Error::InvalidParams(format!(
                "quadrature needs t_max > 0, m >= 1, J >= 1 (got {t_max}, {levels_per_octave}, {depth})"
            )));
        }
        Ok(Self { t_max, levels_per_octave, depth })
    }

    pub fn with_depth(self, depth: u32) -> Result<Self> {
        Self::new(self.t_max, self.levels_per_octave, depth)
    }

    pub fn len(&self) -> usize {
        (self.depth * self.levels_per_octave) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_min(&self) -> f64 {
        self.t_max * 0.5f64.powi(self.depth as i32)
    }

    pub fn scales(&self) -> Vec<f64> {
        let m = self.levels_per_octave as f64;
        (0..self.len()).map(|j| self.t_max * (-(j as f64) / m).exp2()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        let w = std::f64::consts::LN_2 / self.levels_per_octave as f64;
        let n = self.len();
        (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * w } else { w }).collect()
    }

    /// Scales finer than the grid would see no offsets at all.
    pub fn check_spacing(&self, spacing: f64) -> Result<()> {
        if self.t_min() < spacing * (1.0 - 1e-12) {
            return Err(Error::InvalidParams(format!(
                "smallest scale {} is below the grid spacing {spacing}; reduce the depth or refine the grid",
                self.t_min()
            )));
        }
        Ok(())
    }

    /// Offset counts `floor(t_j / dx)` per scale.
    pub fn thresholds(&self, spacing: f64) -> Vec<usize> {
        self.scales().iter().map(|&t| max_steps(t, spacing)).collect()
    }

    /// `(sum_j w_j g_j^q)^(1/q)`, or `max_j g_j` when `q` is infinite.
    pub fn integrate(&self, integrand: &[f64], q: Exponent) -> f64 {
        match q {
            Exponent::Infinite => integrand.iter().fold(0.0, |m, &v| m.max(v)),
            Exponent::Finite(q) => {
                let s: f64 = self.weights().iter().zip(integrand).map(|(w, &g)| w * g.powf(q)).sum();
                s.powf(1.0 / q)
            }
        }
    }

    /// Besov-type scale integral of `t^(-s) * modulus(t)`.
    pub fn besov_integral(&self, moduli: &[f64], s: f64, q: Exponent) -> f64 {
        let integrand: Vec<f64> = self.scales().iter().zip(moduli).map(|(&t, &w)| t.powf(-s) * w).collect();
        self.integrate(&integrand, q)
    }
}

/// Lattice of translation parameters `a_min, a_min + step, ..., <= a_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationLattice {
    pub a_min: f64,
    pub a_max: f64,
    pub step: f64,
}

impl TranslationLattice {
    pub fn new(a_min: f64, a_max: f64, step: f64) -> Result<Self> {
        if !(a_min.is_finite() && a_max.is_finite() && a_min <= a_max) || !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lattice needs a_min <= a_max and step > 0 (got {a_min}, {a_max}, {step})"
            )));
        }
        Ok(Self { a_min, a_max, step })
    }

    /// Span `[-1, 1]` with step `radius(B) / 8`.
    pub fn default_for(ball: &Region) -> Self {
        Self { a_min: -1.0, a_max: 1.0, step: ball.radius / 8.0 }
    }

    pub fn single(a: f64) -> Self {
        Self { a_min: a, a_max: a, step: 1.0 }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.a_max - self.a_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.a_min + i as f64 * self.step).collect()
    }

    pub fn refined(&self) -> Self {
        Self { step: self.step / 2.0, ..*self }
    }

    pub fn shifted(&self, d: f64) -> Self {
        Self { a_min: self.a_min + d, a_max: self.a_max + d, ..*self }
    }
}

/// A real-valued functional on sampled functions (used as the base of
/// Sobolev-type norms).
pub trait NormFunctional {
    fn eval(&self, f: &GridFunction) -> Result<f64>;
}

impl<F> NormFunctional for F
where
    F: Fn(&GridFunction) -> Result<f64>,
{
    fn eval(&self, f: &GridFunction) -> Result<f64> {
        self(f)
    }
}

fn lattice_windows(f: &GridFunction, regions: &[Region], margin: usize) -> Result<Vec<(usize, usize)>> {
    regions.iter().map(|r| f.region_indices(r, margin, margin)).collect()
}

fn lattice_regions(ball: &Region, lat: &TranslationLattice) -> Vec<Region> {
    lat.points().into_iter().map(|a| ball.shifted(a)).collect()
}

/// `(sum_{x in A} |f(x)|^p dx)^(1/p)`, or `max_A |f|` for `p = inf`.
pub fn lp_norm(f: &GridFunction, p: Exponent, region: &Region) -> Result<f64> {
    let w = f.region_indices(region, 0, 0)?;
    let power = Power::of(p);
    Ok(power.finish(window_lp(f.values(), &[w], power)[0], f.spacing()))
}

/// Moduli at the given scales for each region: `[region][scale]`.
fn region_moduli(f: &GridFunction, p: Exponent, order: Order, regions: &[Region], scales: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dx = f.spacing();
    let ks: Vec<usize> = scales.iter().map(|&t| max_steps(t, dx)).collect();
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let windows = lattice_windows(f, regions, order.multiplier() * max_k)?;
    let power = Power::of(p);
    let cummax = window_offset_cummax(f.values(), &windows, order, power, max_k);
    Ok(cummax
        .into_iter()
        .map(|row| ks.iter().map(|&k| power.finish(row[k], dx)).collect())
        .collect())
}

/// `omega_{p,A}(f, t) = sup_{|h| <= t} ||D_h f||_{L_p(A)}`. Zero when `t` is
/// below the grid spacing (no admissible nonzero offset).
pub fn omega(f: &GridFunction, p: Exponent, region: &Region, t: f64) -> Result<f64> {
    Ok(region_moduli(f, p, Order::First, std::slice::from_ref(region), &[t])?[0][0])
}

/// `eta_{p,A}(f, t) = sup_{|h| <= t} ||D2_h f||_{L_p(A)}`.
pub fn eta(f: &GridFunction, p: Exponent, region: &Region, t: f64) -> Result<f64> {
    Ok(region_moduli(f, p, Order::Second, std::slice::from_ref(region), &[t])?[0][0])
}

/// `omega` or `eta` over `B + a` for every lattice point and arbitrary scales:
/// `[lattice point][scale]`.
pub fn moduli_at_scales(
    f: &GridFunction,
    p: Exponent,
    order: Order,
    ball: &Region,
    lat: &TranslationLattice,
    scales: &[f64],
) -> Result<Vec<Vec<f64>>> {
    region_moduli(f, p, order, &lattice_regions(ball, lat), scales)
}

/// True when `t` is too small to contain any whole-step offset.
pub fn is_degenerate_scale(f: &GridFunction, t: f64) -> bool {
    max_steps(t, f.spacing()) == 0
}

fn require_besov(sp: &SmoothnessParams) -> Result<()> {
    if sp.family != SpaceFamily::Besov {
        return Err(Error::InvalidParams("expected Besov parameters".into()));
    }
    Ok(())
}

fn require_tl(sp: &SmoothnessParams) -> Result<()> {
    if sp.family != SpaceFamily::LizorkinTriebel {
        return Err(Error::InvalidParams("expected Lizorkin-Triebel parameters".into()));
    }
    Ok(())
}

fn require_order(sp: &SmoothnessParams, order: Order) -> Result<()> {
    match order {
        Order::First if sp.s > 0.0 && sp.s < 1.0 => Ok(()),
        Order::Second if sp.s == 1.0 => Ok(()),
        Order::First => Err(Error::InvalidParams(format!("first differences need 0 < s < 1, got {}", sp.s))),
        Order::Second => Err(Error::InvalidParams(format!("second differences need s = 1, got {}", sp.s))),
    }
}

/// `(int_0^{t_max} (t^-s omega_{p,A}(f,t))^q dt/t)^(1/q)` for `0 < s < 1`.
pub fn besov_seminorm(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, region: &Region) -> Result<f64> {
    require_besov(sp)?;
    require_order(sp, Order::First)?;
    region_besov(f, sp, tq, region, Order::First)
}

/// Order-one Besov seminorm: `eta` in place of `omega`, weight `t^-1`.
pub fn besov1_seminorm(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, region: &Region) -> Result<f64> {
    require_besov(sp)?;
    require_order(sp, Order::Second)?;
    region_besov(f, sp, tq, region, Order::Second)
}

fn region_besov(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, region: &Region, order: Order) -> Result<f64> {
    tq.check_spacing(f.spacing())?;
    let moduli = region_moduli(f, sp.p, order, std::slice::from_ref(region), &tq.scales())?;
    Ok(tq.besov_integral(&moduli[0], sp.s, sp.q))
}

/// `G(x) = (int (t^(-s-1) int_{|h|<=t} |D^o_h f(x)| dh)^q dt/t)^(1/q)` from
/// the raw ball sums of each scale (`sums[j]` for this point).
fn tl_density(tq: &TQuadrature, sums: &[f64], dx: f64, s: f64, q: Exponent) -> f64 {
    let integrand: Vec<f64> = tq
        .scales()
        .iter()
        .zip(sums)
        .map(|(&t, &b)| t.powf(-s - 1.0) * b * dx)
        .collect();
    tq.integrate(&integrand, q)
}

/// Pointwise densities for every point covered by `sums` (`[scale][x]`).
pub(crate) fn tl_densities(tq: &TQuadrature, sums: &[Vec<f64>], dx: f64, s: f64, q: Exponent) -> Vec<f64> {
    let n = sums.first().map_or(0, Vec::len);
    let scales = tq.scales();
    let weights = tq.weights();
    let factors: Vec<f64> = scales.iter().map(|&t| t.powf(-s - 1.0) * dx).collect();
    (0..n)
        .map(|x| match q {
            Exponent::Infinite => sums.iter().zip(&factors).fold(0.0f64, |m, (row, c)| m.max(c * row[x])),
            Exponent::Finite(q) => {
                let acc: f64 = sums
                    .iter()
                    .zip(&factors)
                    .zip(&weights)
                    .map(|((row, c), w)| w * (c * row[x]).powf(q))
                    .sum();
                acc.powf(1.0 / q)
            }
        })
        .collect()
}

fn tl_exponent(sp: &SmoothnessParams, order: Order) -> Result<f64> {
    require_tl(sp)?;
    require_order(sp, order)?;
    Ok(sp.s)
}

/// Lizorkin-Triebel density at a single grid point `x`.
pub fn tl_pointwise(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, x: f64, order: Order) -> Result<f64> {
    let s = tl_exponent(sp, order)?;
    tq.check_spacing(f.spacing())?;
    let i = f
        .index_of(x)
        .ok_or_else(|| Error::InvalidParams(format!("{x} is not a grid point")))?;
    let ks = tq.thresholds(f.spacing());
    let margin = order.multiplier() * ks.iter().copied().max().unwrap_or(0);
    let point = Region { center: x, radius: f.spacing() * 0.25 };
    f.region_indices(&point, margin, margin)?;
    let sums = ball_sums(f.values(), i, i, order, &ks);
    let at: Vec<f64> = sums.iter().map(|row| row[0]).collect();
    Ok(tl_density(tq, &at, f.spacing(), s, sp.q))
}

/// `L_p(A)` norm of the Lizorkin-Triebel density.
pub fn tl_seminorm(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, region: &Region, order: Order) -> Result<f64> {
    let s = tl_exponent(sp, order)?;
    tq.check_spacing(f.spacing())?;
    let ks = tq.thresholds(f.spacing());
    let margin = order.multiplier() * ks.iter().copied().max().unwrap_or(0);
    let (lo, hi) = f.region_indices(region, margin, margin)?;
    let sums = ball_sums(f.values(), lo, hi, order, &ks);
    let dens = tl_densities(tq, &sums, f.spacing(), s, sp.q);
    let power = Power::of(sp.p);
    Ok(power.finish(window_lp(&dens, &[(0, dens.len() - 1)], power)[0], f.spacing()))
}

/// `sup_a ||f||_{L_p(B + a)}` over the lattice.
pub fn lp_lu_norm(f: &GridFunction, p: Exponent, ball: &Region, lat: &TranslationLattice) -> Result<f64> {
    Ok(lp_lu_profile(f, p, ball, lat)?.into_iter().fold(0.0, f64::max))
}

/// `||f||_{L_p(B + a)}` for each lattice point.
pub fn lp_lu_profile(f: &GridFunction, p: Exponent, ball: &Region, lat: &TranslationLattice) -> Result<Vec<f64>> {
    let windows = lattice_windows(f, &lattice_regions(ball, lat), 0)?;
    let power = Power::of(p);
    Ok(window_lp(f.values(), &windows, power)
        .into_iter()
        .map(|v| power.finish(v, f.spacing()))
        .collect())
}

/// Moduli `omega_{p,B+a}` or `eta_{p,B+a}` at every quadrature scale and
/// lattice point, computed in one sweep over offsets. Reused across `(s, q)`.
#[derive(Debug, Clone)]
pub struct LocalModuli {
    pub points: Vec<f64>,
    pub quadrature: TQuadrature,
    pub order: Order,
    pub p: Exponent,
    /// `[lattice point][scale]`
    pub moduli: Vec<Vec<f64>>,
}

impl LocalModuli {
    pub fn compute(
        f: &GridFunction,
        p: Exponent,
        order: Order,
        ball: &Region,
        lat: &TranslationLattice,
        tq: &TQuadrature,
    ) -> Result<Self> {
        tq.check_spacing(f.spacing())?;
        let moduli = region_moduli(f, p, order, &lattice_regions(ball, lat), &tq.scales())?;
        Ok(Self { points: lat.points(), quadrature: *tq, order, p, moduli })
    }

    /// Scale integral per lattice point.
    pub fn seminorms(&self, s: f64, q: Exponent) -> Vec<f64> {
        self.moduli.iter().map(|m| self.quadrature.besov_integral(m, s, q)).collect()
    }

    pub fn sup_seminorm(&self, s: f64, q: Exponent) -> f64 {
        self.seminorms(s, q).into_iter().fold(0.0, f64::max)
    }
}

/// Ball sums for every point of the union of lattice translates of `B`.
#[derive(Debug, Clone)]
pub struct LocalBallSums {
    quadrature: TQuadrature,
    order: Order,
    spacing: f64,
    /// Window of each lattice point, relative to the first covered index.
    windows: Vec<(usize, usize)>,
    /// `[scale][x]`
    sums: Vec<Vec<f64>>,
}

impl LocalBallSums {
    pub fn compute(f: &GridFunction, order: Order, ball: &Region, lat: &TranslationLattice, tq: &TQuadrature) -> Result<Self> {
        tq.check_spacing(f.spacing())?;
        let ks = tq.thresholds(f.spacing());
        let margin = order.multiplier() * ks.iter().copied().max().unwrap_or(0);
        let windows = lattice_windows(f, &lattice_regions(ball, lat), margin)?;
        let lo = windows.iter().map(|w| w.0).min().unwrap_or(0);
        let hi = windows.iter().map(|w| w.1).max().unwrap_or(0);
        let sums = ball_sums(f.values(), lo, hi, order, &ks);
        let windows = windows.into_iter().map(|(a, b)| (a - lo, b - lo)).collect();
        Ok(Self { quadrature: *tq, order, spacing: f.spacing(), windows, sums })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// `||G||_{L_p(B + a)}` per lattice point for density exponent `s`.
    pub fn seminorms(&self, s: f64, p: Exponent, q: Exponent) -> Vec<f64> {
        let dens = tl_densities(&self.quadrature, &self.sums, self.spacing, s, q);
        let power = Power::of(p);
        window_lp(&dens, &self.windows, power)
            .into_iter()
            .map(|v| power.finish(v, self.spacing))
            .collect()
    }

    pub fn sup_seminorm(&self, s: f64, p: Exponent, q: Exponent) -> f64 {
        self.seminorms(s, p, q).into_iter().fold(0.0, f64::max)
    }
}

fn lu_lp_part(f: &GridFunction, p: Exponent, ball: &Region, lat: &TranslationLattice) -> Result<f64> {
    lp_lu_norm(f, p, ball, lat)
}

/// `sup_a (int (t^-s omega_{p,B+a}(f,t))^q dt/t)^(1/q) + ||f||_{L_p,lu}`.
pub fn besov_lu_intrinsic(
    f: &GridFunction,
    sp: &SmoothnessParams,
    tq: &TQuadrature,
    ball: &Region,
    lat: &TranslationLattice,
) -> Result<f64> {
    require_besov(sp)?;
    require_order(sp, Order::First)?;
    let local = LocalModuli::compute(f, sp.p, Order::First, ball, lat, tq)?;
    Ok(local.sup_seminorm(sp.s, sp.q) + lu_lp_part(f, sp.p, ball, lat)?)
}

/// As [`besov_lu_intrinsic`] with `eta` and weight `t^-1` (`s = 1`).
pub fn besov1_lu_intrinsic(
    f: &GridFunction,
    sp: &SmoothnessParams,
    tq: &TQuadrature,
    ball: &Region,
    lat: &TranslationLattice,
) -> Result<f64> {
    require_besov(sp)?;
    require_order(sp, Order::Second)?;
    let local = LocalModuli::compute(f, sp.p, Order::Second, ball, lat, tq)?;
    Ok(local.sup_seminorm(1.0, sp.q) + lu_lp_part(f, sp.p, ball, lat)?)
}

/// `sup_a ||G||_{L_p(B + a)} + ||f||_{L_p,lu}` with the density of the given order.
pub fn tl_lu_intrinsic(
    f: &GridFunction,
    sp: &SmoothnessParams,
    tq: &TQuadrature,
    ball: &Region,
    lat: &TranslationLattice,
    order: Order,
) -> Result<f64> {
    let s = tl_exponent(sp, order)?;
    let local = LocalBallSums::compute(f, order, ball, lat, tq)?;
    Ok(local.sup_seminorm(s, sp.p, sp.q) + lu_lp_part(f, sp.p, ball, lat)?)
}

/// `sum_{k <= m} base(D^k f)` with `D` the central difference.
pub fn sobolev_norm(f: &GridFunction, m: usize, base: &dyn NormFunctional) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParams("Sobolev order must be positive".into()));
    }
    if !f.is_smooth() {
        return Err(Error::NotSmooth);
    }
    let mut total = base.eval(f)?;
    let mut g = f.clone();
    for _ in 0..m {
        g = g.central_derivative()?;
        total += base.eval(&g)?;
    }
    Ok(total)
}

/// Full norm of `f` in `B^s_{p,q}` or `F^s_{p,q}` restricted to `A`:
/// `||f||_{L_p(A)}` plus the seminorm for `s <= 1`, and for `s > 1` the sum
/// of those norms over derivatives of order `<= m`, `m < s <= m + 1`.
pub fn space_norm(f: &GridFunction, sp: &SmoothnessParams, tq: &TQuadrature, region: &Region) -> Result<f64> {
    let m = sp.derivative_count();
    let reduced = sp.reduced();
    let single = |g: &GridFunction| -> Result<f64> {
        let order = reduced.order();
        let semi = match reduced.family {
            SpaceFamily::Besov => region_besov(g, &reduced, tq, region, order)?,
            SpaceFamily::LizorkinTriebel => tl_seminorm(g, &reduced, tq, region, order)?,
        };
        Ok(lp_norm(g, reduced.p, region)? + semi)
    };
    if m == 0 {
        single(f)
    } else {
        sobolev_norm(f, m, &single)
    }
}
