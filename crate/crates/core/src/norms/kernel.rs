//! Dense difference kernels shared by every region-based norm.
//!
//! Windows are inclusive index ranges into a sample array. A single pass per
//! offset reduces `|D^o_k f|^p` over the blocks delimited by all window
//! endpoints; each window then combines its blocks. With one window this is a
//! plain left-to-right sum over the window.

use super::Exponent;

/// How differences are folded into a window value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Power {
    One,
    Two,
    Pow(f64),
    Max,
}

impl Power {
    pub(crate) fn of(p: Exponent) -> Self {
        match p {
            Exponent::Infinite => Power::Max,
            Exponent::Finite(1.0) => Power::One,
            Exponent::Finite(2.0) => Power::Two,
            Exponent::Finite(v) => Power::Pow(v),
        }
    }

    #[inline(always)]
    pub(crate) fn term(self, d: f64) -> f64 {
        match self {
            Power::One | Power::Max => d.abs(),
            Power::Two => d * d,
            Power::Pow(p) => d.abs().powf(p),
        }
    }

    #[inline(always)]
    pub(crate) fn combine(self, acc: f64, t: f64) -> f64 {
        match self {
            Power::Max => acc.max(t),
            _ => acc + t,
        }
    }

    pub(crate) fn is_max(self) -> bool {
        self == Power::Max
    }

    /// Turns a raw reduction into a norm: `(acc * dx)^(1/p)`, or `acc` for max.
    pub(crate) fn finish(self, acc: f64, dx: f64) -> f64 {
        match self {
            Power::Max => acc,
            Power::One => acc * dx,
            Power::Two => (acc * dx).sqrt(),
            Power::Pow(p) => (acc * dx).powf(1.0 / p),
        }
    }
}

/// Difference order: first (`D_h`) or second (`D2_h`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn multiplier(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Partition of the union of windows into blocks at every window endpoint.
pub(crate) struct Blocks {
    bounds: Vec<usize>,
    covered: Vec<bool>,
    spans: Vec<(usize, usize)>,
}

impl Blocks {
    pub(crate) fn new(windows: &[(usize, usize)]) -> Self {
        let mut bounds: Vec<usize> = windows.iter().flat_map(|&(lo, hi)| [lo, hi + 1]).collect();
        bounds.sort_unstable();
        bounds.dedup();
        let nblocks = bounds.len().saturating_sub(1);
        let mut covered = vec![false; nblocks];
        let spans = windows
            .iter()
            .map(|&(lo, hi)| {
                let b0 = bounds.binary_search(&lo).expect("window start is a bound");
                let b1 = bounds.binary_search(&(hi + 1)).expect("window end is a bound");
                covered[b0..b1].iter_mut().for_each(|c| *c = true);
                (b0, b1)
            })
            .collect();
        Self { bounds, covered, spans }
    }

    fn reduce(&self, power: Power, mut block: impl FnMut(usize, usize) -> f64, out: &mut [f64]) {
        let vals: Vec<f64> = (0..self.covered.len())
            .map(|b| if self.covered[b] { block(self.bounds[b], self.bounds[b + 1]) } else { 0.0 })
            .collect();
        for (o, &(b0, b1)) in out.iter_mut().zip(&self.spans) {
            *o = vals[b0..b1].iter().fold(0.0, |acc, &v| power.combine(acc, v));
        }
    }
}

#[inline(always)]
fn fold_terms(power: Power, it: impl Iterator<Item = f64>) -> f64 {
    match power {
        Power::One => it.fold(0.0, |s, d| s + d.abs()),
        Power::Two => it.fold(0.0, |s, d| s + d * d),
        Power::Pow(p) => it.fold(0.0, |s, d| s + d.abs().powf(p)),
        Power::Max => it.fold(0.0, |m, d| m.max(d.abs())),
    }
}

/// Reduction of `|D^o_k f(x)|` over `x in [b, e)`; all touched indices must exist.
#[inline]
pub(crate) fn reduce_range(values: &[f64], b: usize, e: usize, k: isize, order: Order, power: Power) -> f64 {
    let at = |shift: isize| {
        let s = (b as isize + shift) as usize;
        &values[s..s + (e - b)]
    };
    let base = &values[b..e];
    match order {
        Order::First => fold_terms(power, at(k).iter().zip(base).map(|(a, c)| a - c)),
        Order::Second => fold_terms(
            power,
            at(2 * k)
                .iter()
                .zip(at(k))
                .zip(base)
                .map(|((c, b), a)| (c - b) - (b - a)),
        ),
    }
}

/// Raw `L_p` reductions of `f` itself over each window.
pub(crate) fn window_lp(values: &[f64], windows: &[(usize, usize)], power: Power) -> Vec<f64> {
    let blocks = Blocks::new(windows);
    let mut out = vec![0.0; windows.len()];
    blocks.reduce(power, |b, e| fold_terms(power, values[b..e].iter().copied()), &mut out);
    out
}

/// For every window and every `m <= max_k`, the running maximum over offsets
/// `1 <= |k| <= m` of the raw reduction of `|D^o_k f|^p` over the window.
/// Entry `m = 0` is zero. Callers guarantee `order * max_k` samples of margin.
pub(crate) fn window_offset_cummax(
    values: &[f64],
    windows: &[(usize, usize)],
    order: Order,
    power: Power,
    max_k: usize,
) -> Vec<Vec<f64>> {
    let blocks = Blocks::new(windows);
    let mut out = vec![vec![0.0f64; max_k + 1]; windows.len()];
    let mut pos = vec![0.0; windows.len()];
    let mut neg = vec![0.0; windows.len()];
    for m in 1..=max_k {
        let k = m as isize;
        blocks.reduce(power, |b, e| reduce_range(values, b, e, k, order, power), &mut pos);
        blocks.reduce(power, |b, e| reduce_range(values, b, e, -k, order, power), &mut neg);
        for (w, row) in out.iter_mut().enumerate() {
            row[m] = row[m - 1].max(pos[w]).max(neg[w]);
        }
    }
    out
}

/// Ball sums `sum_{1 <= |k| <= K_j} |D^o_k f(x)|` for `x in [lo, hi]`, one row
/// per threshold `K_j` (in the order given). Callers guarantee the margin.
pub(crate) fn ball_sums(values: &[f64], lo: usize, hi: usize, order: Order, thresholds: &[usize]) -> Vec<Vec<f64>> {
    let n = hi - lo + 1;
    let mut sorted: Vec<(usize, usize)> = thresholds.iter().copied().enumerate().map(|(j, k)| (k, j)).collect();
    sorted.sort_unstable();
    let mut out = vec![Vec::new(); thresholds.len()];
    let mut acc = vec![0.0; n];
    let mut next = 0;
    while next < sorted.len() && sorted[next].0 == 0 {
        out[sorted[next].1] = acc.clone();
        next += 1;
    }
    let max_k = sorted.last().map_or(0, |&(k, _)| k);
    for m in 1..=max_k {
        let k = m as isize;
        let at = |shift: isize| {
            let s = (lo as isize + shift) as usize;
            &values[s..s + n]
        };
        let base = &values[lo..=hi];
        match order {
            Order::First => {
                for (((a, p), q), c) in acc.iter_mut().zip(at(k)).zip(at(-k)).zip(base) {
                    *a += (p - c).abs() + (q - c).abs();
                }
            }
            Order::Second => {
                let (p1, p2, n1, n2) = (at(k), at(2 * k), at(-k), at(-2 * k));
                for i in 0..n {
                    let c = base[i];
                    let fwd = (p2[i] - p1[i]) - (p1[i] - c);
                    let bwd = (n2[i] - n1[i]) - (n1[i] - c);
                    acc[i] += fwd.abs() + bwd.abs();
                }
            }
        }
        while next < sorted.len() && sorted[next].0 == m {
            out[sorted[next].1] = acc.clone();
            next += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_windows() {
        let v: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let windows = [(2, 10), (6, 20), (30, 35)];
        let sums = window_lp(&v, &windows, Power::One);
        for (w, &(lo, hi)) in windows.iter().enumerate() {
            let direct: f64 = v[lo..=hi].iter().sum();
            assert_eq!(sums[w], direct);
        }
        let maxes = window_lp(&v, &windows, Power::Max);
        assert_eq!(maxes, vec![10.0, 20.0, 35.0]);
    }

    #[test]
    fn cummax_matches_direct() {
        let v: Vec<f64> = (0..64).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let windows = [(20, 30), (25, 40)];
        let out = window_offset_cummax(&v, &windows, Order::Second, Power::Two, 8);
        for (w, &(lo, hi)) in windows.iter().enumerate() {
            let mut best: f64 = 0.0;
            for m in 1..=8isize {
                for k in [m, -m] {
                    let s: f64 = (lo..=hi)
                        .map(|x| {
                            let x = x as isize;
                            let f = |i: isize| v[i as usize];
                            let d = (f(x + 2 * k) - f(x + k)) - (f(x + k) - f(x));
                            d * d
                        })
                        .sum();
                    best = best.max(s);
                }
                assert_eq!(out[w][m as usize], best);
            }
        }
    }

    #[test]
    fn ball_sums_thresholds() {
        let v: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let out = ball_sums(&v, 20, 25, Order::First, &[3, 0, 5]);
        assert!(out[1].iter().all(|&s| s == 0.0));
        let direct = |x: usize, kk: usize| -> f64 {
            (1..=kk as isize)
                .map(|k| {
                    let x = x as isize;
                    (v[(x + k) as usize] - v[x as usize]).abs() + (v[(x - k) as usize] - v[x as usize]).abs()
                })
                .sum()
        };
        for x in 20..=25 {
            assert!((out[0][x - 20] - direct(x, 3)).abs() < 1e-14);
            assert!((out[2][x - 20] - direct(x, 5)).abs() < 1e-14);
        }
    }
}
