//! Whole-line norms of compactly supported samples.
//!
//! A [`CompactFunction`] is zero outside its stored samples, so a difference
//! `D^o_k g(x)` only involves the terms `g(x + m k)` whose argument lies in the
//! support. For a fixed offset (or a fixed point) the line splits into a few
//! segments on which the set of live terms is constant. Segments with one live
//! term reduce to prefix sums (or range maxima); only overlapping segments are
//! evaluated sample by sample. Results agree with dense zero-padded evaluation
//! up to summation order.

use serde::{Deserialize, Serialize};

use super::{tl_densities, Exponent, NormFunctional, Order, Power, SmoothnessParams, SpaceFamily, TQuadrature};
use super::kernel::reduce_range;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `(multiple m, coefficient c)` of each term `c * g(x + m k)`.
fn terms(order: Order) -> &'static [(usize, f64)] {
    match order {
        Order::First => &[(0, -1.0), (1, 1.0)],
        Order::Second => &[(0, 1.0), (1, -2.0), (2, 1.0)],
    }
}

/// Samples `values[i]` at grid index `start + i`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactFunction {
    spacing: f64,
    start: isize,
    values: Vec<f64>,
    smooth: bool,
}

impl CompactFunction {
    /// Leading and trailing zeros are dropped.
    pub fn new(spacing: f64, start: isize, values: Vec<f64>) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParams(format!("grid spacing must be positive, got {spacing}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("compact function has non-finite samples".into()));
        }
        let first = values.iter().position(|&v| v != 0.0);
        let (start, values) = match first {
            None => (start, Vec::new()),
            Some(a) => {
                let b = values.iter().rposition(|&v| v != 0.0).unwrap_or(a);
                (start + a as isize, values[a..=b].to_vec())
            }
        };
        Ok(Self { spacing, start, values, smooth: false })
    }

    /// Pointwise product of `f` with `weights` placed at indices `lo..lo + weights.len()`.
    pub fn product(f: &GridFunction, lo: usize, weights: &[f64]) -> Result<Self> {
        let hi = lo + weights.len();
        if hi > f.len() {
            return Err(Error::MarginViolation(format!(
                "window samples [{lo}, {hi}) exceed the {} function samples",
                f.len()
            )));
        }
        let values = f.values()[lo..hi].iter().zip(weights).map(|(a, b)| a * b).collect();
        Ok(Self::new(f.spacing(), lo as isize, values)?.with_smooth(f.is_smooth()))
    }

    pub fn with_smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn start(&self) -> isize {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let values = self.values.iter().map(|v| v * lambda).collect();
        Self::new(self.spacing, self.start, values).expect("scaling keeps samples finite").with_smooth(self.smooth)
    }

    /// Central difference on the zero extension; the support grows by one sample per side.
    pub fn central_derivative(&self) -> Result<Self> {
        if !self.smooth {
            return Err(Error::NotSmooth);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let w = self.values.len() as isize;
        let g = |i: isize| if (0..w).contains(&i) { self.values[i as usize] } else { 0.0 };
        let h2 = 2.0 * self.spacing;
        let values = (-1..=w).map(|i| (g(i + 1) - g(i - 1)) / h2).collect();
        Ok(Self::new(self.spacing, self.start - 1, values)?.with_smooth(true))
    }

    /// Zero-padded samples as an ordinary grid function over `pad` extra
    /// samples per side.
    pub fn to_grid(&self, pad: usize) -> GridFunction {
        let mut values = vec![0.0; self.values.len() + 2 * pad];
        values[pad..pad + self.values.len()].copy_from_slice(&self.values);
        let origin = (self.start - pad as isize) as f64 * self.spacing;
        if values.is_empty() {
            values.push(0.0);
        }
        GridFunction::new(self.spacing, origin, values).expect("valid padded grid")
    }

    /// `||g||_p` over the line.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        let power = Power::of(p);
        let acc = self.values.iter().fold(0.0, |a, &v| power.combine(a, power.term(v)));
        power.finish(acc, self.spacing)
    }

    /// Raw reductions `R(k)` of `|D^o_k g|^p` over the line for `k = 0..=max_k`
    /// (entry 0 is zero). Offsets `-k` give the same value.
    pub fn difference_profile(&self, p: Exponent, order: Order, max_k: usize) -> Vec<f64> {
        let mut out = vec![0.0; max_k + 1];
        if self.is_zero() {
            return out;
        }
        let power = Power::of(p);
        let w = self.values.len() as isize;
        let pad = 3 * self.values.len();
        let padded = padded(&self.values, pad);
        let ranges = RangeReducer::new(&self.values, power);
        let terms = terms(order);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let k = k as isize;
            // Term m is live for x in [-m k, w - 1 - m k].
            let live: Vec<(isize, isize)> = terms.iter().map(|&(m, _)| (-(m as isize) * k, w - 1 - m as isize * k)).collect();
            let mut cuts: Vec<isize> = live.iter().flat_map(|&(a, b)| [a, b + 1]).collect();
            cuts.sort_unstable();
            cuts.dedup();
            let mut acc = 0.0;
            for seg in cuts.windows(2) {
                let (x0, x1) = (seg[0], seg[1] - 1);
                let active: Vec<usize> = (0..terms.len()).filter(|&i| live[i].0 <= x0 && x1 <= live[i].1).collect();
                let v = match active.as_slice() {
                    [] => continue,
                    [i] => {
                        let (m, c) = terms[*i];
                        let shift = m as isize * k;
                        ranges.scaled(x0 + shift, x1 + shift, c.abs())
                    }
                    _ => {
                        let b = (x0 + pad as isize) as usize;
                        let e = (x1 + 1 + pad as isize) as usize;
                        reduce_range(&padded, b, e, k, order, power)
                    }
                };
                acc = power.combine(acc, v);
            }
            *slot = acc;
        }
        out
    }

    /// Moduli `omega_p(g, t_j)` (first order) or `eta_p(g, t_j)` (second order)
    /// over the line at every quadrature scale.
    pub fn moduli(&self, p: Exponent, order: Order, tq: &TQuadrature) -> Result<Vec<f64>> {
        tq.check_spacing(self.spacing)?;
        let ks = tq.thresholds(self.spacing);
        let max_k = ks.iter().copied().max().unwrap_or(0);
        let profile = self.difference_profile(p, order, max_k);
        let mut cummax = profile;
        for k in 1..cummax.len() {
            cummax[k] = cummax[k].max(cummax[k - 1]);
        }
        let power = Power::of(p);
        Ok(ks.iter().map(|&k| power.finish(cummax[k], self.spacing)).collect())
    }

    /// Ball sums `sum_{1 <= |k| <= K_j} |D^o_k g(x)|` for every `x` where some
    /// sum can be nonzero, returned as `(first relative index, [scale][x])`.
    pub fn ball_sums(&self, order: Order, thresholds: &[usize]) -> (isize, Vec<Vec<f64>>) {
        let max_k = thresholds.iter().copied().max().unwrap_or(0);
        let reach = (order.multiplier() * max_k) as isize;
        let w = self.values.len() as isize;
        if self.is_zero() {
            return (0, vec![Vec::new(); thresholds.len()]);
        }
        let n = (w + 2 * reach) as usize;
        let mut sums = vec![vec![0.0; n]; thresholds.len()];
        let mut sorted: Vec<(usize, usize)> = thresholds.iter().copied().enumerate().map(|(j, k)| (k, j)).collect();
        sorted.sort_unstable();
        let strided = StridedSums::new(&self.values);
        let pad = (3 * w + 2 * reach) as usize;
        let padded = padded(&self.values, pad);
        let mut row = vec![0.0; thresholds.len()];
        for (xi, x) in (-reach..w + reach).enumerate() {
            row.iter_mut().for_each(|r| *r = 0.0);
            for dir in [1isize, -1] {
                self.one_sided_ball(x, dir, order, &sorted, max_k, &strided, &padded, pad, &mut row);
            }
            for (j, r) in row.iter().enumerate() {
                sums[j][xi] = *r;
            }
        }
        (-reach, sums)
    }

    /// Adds `sum_{1 <= k <= K_j} |D^o_{dir k} g(x)|` into `row[j]`.
    #[allow(clippy::too_many_arguments)]
    fn one_sided_ball(
        &self,
        x: isize,
        dir: isize,
        order: Order,
        sorted: &[(usize, usize)],
        max_k: usize,
        strided: &StridedSums,
        padded: &[f64],
        pad: usize,
        row: &mut [f64],
    ) {
        let w = self.values.len() as isize;
        let terms = terms(order);
        let kmax = max_k as isize;
        // k-interval on which each term is live, clipped to [1, kmax].
        let live: Vec<Option<(isize, isize)>> = terms
            .iter()
            .map(|&(m, _)| {
                let (a, b) = if m == 0 {
                    if (0..w).contains(&x) {
                        (1, kmax)
                    } else {
                        return None;
                    }
                } else {
                    let m = m as isize;
                    // x + dir m k in [0, w - 1]
                    let (lo, hi) = if dir > 0 { (-x, w - 1 - x) } else { (x - w + 1, x) };
                    (div_ceil(lo, m).max(1), div_floor(hi, m).min(kmax))
                };
                (a <= b).then_some((a, b))
            })
            .collect();
        let mut cuts: Vec<isize> = live.iter().flatten().flat_map(|&(a, b)| [a, b + 1]).collect();
        if cuts.is_empty() {
            return;
        }
        cuts.sort_unstable();
        cuts.dedup();
        let value = |k: isize| -> f64 {
            let at = |m: isize| padded[(pad as isize + x + dir * m * k) as usize];
            match order {
                Order::First => (at(1) - at(0)).abs(),
                Order::Second => {
                    let (a, b, c) = (at(0), at(1), at(2));
                    ((c - b) - (b - a)).abs()
                }
            }
        };
        // Sum over k in [k0, k1] of the single live term `i`.
        let single = |i: usize, k0: isize, k1: isize| -> f64 {
            let (m, c) = terms[i];
            if m == 0 {
                return (k1 - k0 + 1) as f64 * (c * self.values[x as usize]).abs();
            }
            let m = m as isize;
            let (y0, y1) = (x + dir * m * k0, x + dir * m * k1);
            c.abs() * strided.sum(y0.min(y1), y0.max(y1), m as usize)
        };
        let mut acc = 0.0;
        let mut next = 0;
        while next < sorted.len() && (sorted[next].0 as isize) < cuts[0] {
            row[sorted[next].1] += acc;
            next += 1;
        }
        for seg in cuts.windows(2) {
            let (k0, k1) = (seg[0], seg[1] - 1);
            let active: Vec<usize> = (0..terms.len())
                .filter(|&i| matches!(live[i], Some((a, b)) if a <= k0 && k1 <= b))
                .collect();
            match active.as_slice() {
                [] => {}
                [i] => {
                    while next < sorted.len() && (sorted[next].0 as isize) <= k1 {
                        let kk = sorted[next].0 as isize;
                        row[sorted[next].1] += acc + single(*i, k0, kk);
                        next += 1;
                    }
                    acc += single(*i, k0, k1);
                }
                _ => {
                    for k in k0..=k1 {
                        acc += value(k);
                        while next < sorted.len() && sorted[next].0 as isize == k {
                            row[sorted[next].1] += acc;
                            next += 1;
                        }
                    }
                }
            }
            while next < sorted.len() && (sorted[next].0 as isize) < seg[1] {
                row[sorted[next].1] += acc;
                next += 1;
            }
        }
        while next < sorted.len() {
            row[sorted[next].1] += acc;
            next += 1;
        }
    }

    /// Lizorkin-Triebel density `G` on the line, as `(first relative index, values)`.
    pub fn tl_density(&self, s: f64, q: Exponent, order: Order, tq: &TQuadrature) -> Result<(isize, Vec<f64>)> {
        tq.check_spacing(self.spacing)?;
        let (first, sums) = self.ball_sums(order, &tq.thresholds(self.spacing));
        Ok((first, tl_densities(tq, &sums, self.spacing, s, q)))
    }

    /// `||G||_p` over the line for the density of the given order.
    pub fn tl_seminorm(&self, s: f64, p: Exponent, q: Exponent, order: Order, tq: &TQuadrature) -> Result<f64> {
        let (_, dens) = self.tl_density(s, q, order, tq)?;
        let power = Power::of(p);
        let acc = dens.iter().fold(0.0, |a, &v| power.combine(a, power.term(v)));
        Ok(power.finish(acc, self.spacing))
    }
}

fn padded(values: &[f64], pad: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len() + 2 * pad];
    out[pad..pad + values.len()].copy_from_slice(values);
    out
}

fn div_floor(a: isize, b: isize) -> isize {
    a.div_euclid(b)
}

fn div_ceil(a: isize, b: isize) -> isize {
    -((-a).div_euclid(b))
}

/// Range reductions of `|g|^p` (prefix sums) or `|g|` (sparse-table maxima).
enum RangeReducer {
    Sum { power: Power, prefix: Vec<f64> },
    Max { table: Vec<Vec<f64>> },
}

impl RangeReducer {
    fn new(values: &[f64], power: Power) -> Self {
        if power.is_max() {
            let mut table = vec![values.iter().map(|v| v.abs()).collect::<Vec<_>>()];
            let mut width = 1;
            while 2 * width <= values.len() {
                let prev = table.last().expect("nonempty table");
                let next = (0..values.len() + 1 - 2 * width).map(|i| prev[i].max(prev[i + width])).collect();
                table.push(next);
                width *= 2;
            }
            RangeReducer::Max { table }
        } else {
            let mut prefix = Vec::with_capacity(values.len() + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &v in values {
                acc += power.term(v);
                prefix.push(acc);
            }
            RangeReducer::Sum { power, prefix }
        }
    }

    /// Reduction of `|c g(y)|^p` over `y in [a, b]` (within the support).
    fn scaled(&self, a: isize, b: isize, c: f64) -> f64 {
        let (a, b) = (a as usize, b as usize);
        match self {
            RangeReducer::Sum { power, prefix } => power.term(c) * (prefix[b + 1] - prefix[a]),
            RangeReducer::Max { table } => {
                let len = b - a + 1;
                let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
                let row = &table[level];
                c * row[a].max(row[b + 1 - (1 << level)])
            }
        }
    }
}

/// Prefix sums of `|g|` with stride 1 and stride 2.
struct StridedSums {
    unit: Vec<f64>,
    pair: Vec<f64>,
}

impl StridedSums {
    fn new(values: &[f64]) -> Self {
        let mut unit = Vec::with_capacity(values.len());
        let mut pair = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            let a = v.abs();
            unit.push(a + if i >= 1 { unit[i - 1] } else { 0.0 });
            pair.push(a + if i >= 2 { pair[i - 2] } else { 0.0 });
        }
        Self { unit, pair }
    }

    /// `sum |g(y)|` over `y = a, a + m, ..., b` (`b - a` a multiple of `m`, both in the support).
    fn sum(&self, a: isize, b: isize, m: usize) -> f64 {
        let (a, b) = (a as usize, b as usize);
        let table = if m == 1 { &self.unit } else { &self.pair };
        table[b] - if a >= m { table[a - m] } else { 0.0 }
    }
}

/// A norm on functions of the whole line, evaluated on compactly supported samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WholeSpaceNorm {
    Lp { p: Exponent },
    /// `||g||_p` plus the Besov seminorm (second differences when `s = 1`).
    Besov { params: SmoothnessParams, quadrature: TQuadrature },
    /// `||g||_p` plus the `L_p` norm of the density of the given order.
    LizorkinTriebel { params: SmoothnessParams, quadrature: TQuadrature, order: Order },
    /// `N(g) + N(g')` for the Besov norm `N`; `g` must be tagged smooth.
    SobolevBesov { params: SmoothnessParams, quadrature: TQuadrature },
}

impl WholeSpaceNorm {
    pub fn besov(params: SmoothnessParams, quadrature: TQuadrature) -> Result<Self> {
        if params.family != SpaceFamily::Besov || params.s > 1.0 {
            return Err(Error::InvalidParams("Besov base norm needs Besov parameters with s <= 1".into()));
        }
        Ok(WholeSpaceNorm::Besov { params, quadrature })
    }

    pub fn lizorkin_triebel(params: SmoothnessParams, quadrature: TQuadrature, order: Order) -> Result<Self> {
        if params.family != SpaceFamily::LizorkinTriebel {
            return Err(Error::InvalidParams("expected Lizorkin-Triebel parameters".into()));
        }
        let ok = match order {
            Order::First => params.s < 1.0,
            Order::Second => params.s == 1.0,
        };
        if !ok {
            return Err(Error::InvalidParams(format!("order {order:?} does not match s = {}", params.s)));
        }
        Ok(WholeSpaceNorm::LizorkinTriebel { params, quadrature, order })
    }

    pub fn p(&self) -> Exponent {
        match self {
            WholeSpaceNorm::Lp { p } => *p,
            WholeSpaceNorm::Besov { params, .. }
            | WholeSpaceNorm::LizorkinTriebel { params, .. }
            | WholeSpaceNorm::SobolevBesov { params, .. } => params.p,
        }
    }

    /// Difference order and largest physical reach of the differences.
    pub fn difference_order(&self) -> Option<Order> {
        match self {
            WholeSpaceNorm::Lp { .. } => None,
            WholeSpaceNorm::Besov { params, .. } | WholeSpaceNorm::SobolevBesov { params, .. } => Some(params.order()),
            WholeSpaceNorm::LizorkinTriebel { order, .. } => Some(*order),
        }
    }

    /// Physical margin the differences reach beyond the support.
    pub fn margin(&self) -> f64 {
        match self {
            WholeSpaceNorm::Lp { .. } => 0.0,
            WholeSpaceNorm::Besov { quadrature, .. }
            | WholeSpaceNorm::LizorkinTriebel { quadrature, .. }
            | WholeSpaceNorm::SobolevBesov { quadrature, .. } => {
                self.difference_order().map_or(1, Order::multiplier) as f64 * quadrature.t_max
            }
        }
    }

    pub fn eval(&self, g: &CompactFunction) -> Result<f64> {
        match self {
            WholeSpaceNorm::Lp { p } => Ok(g.lp_norm(*p)),
            WholeSpaceNorm::Besov { params, quadrature } => {
                let moduli = g.moduli(params.p, params.order(), quadrature)?;
                Ok(g.lp_norm(params.p) + quadrature.besov_integral(&moduli, params.s, params.q))
            }
            WholeSpaceNorm::LizorkinTriebel { params, quadrature, order } => {
                Ok(g.lp_norm(params.p) + g.tl_seminorm(params.s, params.p, params.q, *order, quadrature)?)
            }
            WholeSpaceNorm::SobolevBesov { params, quadrature } => {
                let base = WholeSpaceNorm::Besov { params: *params, quadrature: *quadrature };
                Ok(base.eval(g)? + base.eval(&g.central_derivative()?)?)
            }
        }
    }
}

impl NormFunctional for WholeSpaceNorm {
    /// Evaluates on the whole valid range, treating `f` as zero outside it.
    fn eval(&self, f: &GridFunction) -> Result<f64> {
        let (lo, hi) = f
            .valid_indices()
            .ok_or_else(|| Error::EmptyDomain("function has no valid samples".into()))?;
        let g = CompactFunction::new(f.spacing(), lo as isize, f.values()[lo..=hi].to_vec())?.with_smooth(f.is_smooth());
        WholeSpaceNorm::eval(self, &g)
    }
}
