//! Test functions with known regularity, a brute-force modulus oracle,
//! log-log slope estimation, and the two inequality checkers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, Region};
use crate::norms::{lp_norm, moduli_at_scales, Exponent, Order, TQuadrature, TranslationLattice};
use crate::windows::bump_profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Polynomial,
    Sawtooth,
    Step,
    Bump,
    Weierstrass,
    RandomFourier,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Polynomial => "polynomial",
            GeneratorKind::Sawtooth => "sawtooth",
            GeneratorKind::Step => "step",
            GeneratorKind::Bump => "bump",
            GeneratorKind::Weierstrass => "weierstrass",
            GeneratorKind::RandomFourier => "random_fourier",
        }
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self {
            GeneratorKind::Polynomial => &[],
            GeneratorKind::Sawtooth => &["period", "amplitude"],
            GeneratorKind::Step => &["at", "height"],
            GeneratorKind::Bump => &["center", "radius"],
            GeneratorKind::Weierstrass => &["s", "J", "override"],
            GeneratorKind::RandomFourier => &["s", "kmax", "override"],
        }
    }
}

/// Kind, parameters and seed of a generated function; the grid is supplied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, params: &[(&str, f64)], seed: u64) -> Self {
        let params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self { kind, params, seed }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn param_or(&self, key: &str, default: f64) -> f64 {
        self.param(key).unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        for (k, v) in &self.params {
            let known = match self.kind {
                GeneratorKind::Polynomial => k.strip_prefix('c').is_some_and(|d| d.parse::<u32>().is_ok_and(|n| n <= 16)),
                _ => self.kind.allowed().contains(&k.as_str()),
            };
            if !known {
                return Err(Error::InvalidParams(format!("unknown parameter {k:?} for {}", self.kind.name())));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("parameter {k} must be finite")));
            }
        }
        let positive = |key: &str, default: f64| {
            let v = self.param_or(key, default);
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidParams(format!("{} needs {key} > 0, got {v}", self.kind.name())))
            }
        };
        match self.kind {
            GeneratorKind::Sawtooth => positive("period", 2.0).map(drop),
            GeneratorKind::Bump => positive("radius", 0.5).map(drop),
            GeneratorKind::Weierstrass | GeneratorKind::RandomFourier => {
                let s = self
                    .param("s")
                    .ok_or_else(|| Error::InvalidParams(format!("{} needs an exponent s", self.kind.name())))?;
                if !(s > 0.0 && s < 1.0) && self.kind == GeneratorKind::Weierstrass {
                    return Err(Error::InvalidParams(format!("Weierstrass exponent must lie in (0, 1), got {s}")));
                }
                if s <= 0.0 {
                    return Err(Error::InvalidParams(format!("decay exponent must be positive, got {s}")));
                }
                for key in ["J", "kmax"] {
                    if let Some(v) = self.param(key) {
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(Error::InvalidParams(format!("{key} must be a nonnegative integer, got {v}")));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Pins the grid-dependent defaults (`J`, `kmax`) so that the same
    /// function can be resampled on a finer grid.
    pub fn pinned(&self, grid: &GridSpec) -> Self {
        let mut out = self.clone();
        match self.kind {
            GeneratorKind::Weierstrass if self.param("J").is_none() => {
                out.params.insert("J".into(), default_weierstrass_depth(grid.spacing) as f64);
            }
            GeneratorKind::RandomFourier if self.param("kmax").is_none() => {
                out.params.insert("kmax".into(), nyquist_index(grid.spacing) as f64);
            }
            _ => {}
        }
        out
    }

    /// Parses `kind[:args]` where args are `key=value` pairs separated by
    /// commas; `const:c` is shorthand for a constant polynomial.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let (head, args) = text.split_once(':').unwrap_or((text, ""));
        let bad = |msg: String| Error::InvalidParams(format!("cannot parse function {text:?}: {msg}"));
        let mut params = BTreeMap::new();
        let mut seed = 0;
        let mut positional = Vec::new();
        for item in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => {
                    let v: f64 = v.trim().parse().map_err(|_| bad(format!("bad number in {item:?}")))?;
                    if k.trim() == "seed" {
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(bad("seed must be a nonnegative integer".into()));
                        }
                        seed = v as u64;
                    } else {
                        params.insert(k.trim().to_string(), v);
                    }
                }
                None => positional.push(item.parse::<f64>().map_err(|_| bad(format!("bad number {item:?}")))?),
            }
        }
        let kind = match head.trim() {
            "const" | "constant" => {
                let c = match positional.as_slice() {
                    [] => params.remove("c").unwrap_or(1.0),
                    [c] => *c,
                    _ => return Err(bad("const takes one value".into())),
                };
                params.insert("c0".into(), c);
                positional.clear();
                GeneratorKind::Polynomial
            }
            "affine" => {
                let slope = params.remove("slope").unwrap_or(1.0);
                let offset = params.remove("offset").unwrap_or(0.0);
                params.insert("c1".into(), slope);
                params.insert("c0".into(), offset);
                GeneratorKind::Polynomial
            }
            "square" => {
                params.insert("c2".into(), 1.0);
                GeneratorKind::Polynomial
            }
            "poly" | "polynomial" => GeneratorKind::Polynomial,
            "sawtooth" => GeneratorKind::Sawtooth,
            "step" => GeneratorKind::Step,
            "bump" => GeneratorKind::Bump,
            "weier" | "weierstrass" => GeneratorKind::Weierstrass,
            "fourier" | "random_fourier" => GeneratorKind::RandomFourier,
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        if !positional.is_empty() {
            return Err(bad("positional values are only accepted by const".into()));
        }
        let spec = Self { kind, params, seed };
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_inline(s)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        let mut sep = ':';
        for (k, v) in &self.params {
            write!(f, "{sep}{k}={v}")?;
            sep = ',';
        }
        if self.kind == GeneratorKind::RandomFourier {
            write!(f, "{sep}seed={}", self.seed)?;
        }
        Ok(())
    }
}

/// Largest `J` with `2^J dx <= 1`.
pub fn default_weierstrass_depth(spacing: f64) -> u32 {
    ((1.0 / spacing).log2() + 1e-9).floor().max(0.0) as u32
}

/// Highest frequency index `k` of `cos(k pi x)` representable on the grid.
pub fn nyquist_index(spacing: f64) -> u64 {
    (1.0 / spacing + 1e-9).floor() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedFunction {
    pub spec: GeneratorSpec,
    pub samples: GridFunction,
    pub smooth_tag: bool,
    /// Besov/Hölder exponent the construction guarantees; infinite for smooth
    /// functions, `None` when it depends on `p` (step).
    pub claimed_regularity: Option<f64>,
}

/// Samples the function described by `spec` on `grid`. Deterministic in `spec.seed`.
pub fn generate(spec: &GeneratorSpec, grid: &GridSpec) -> Result<GeneratedFunction> {
    spec.validate()?;
    let dx = grid.spacing;
    let (samples, smooth_tag, claimed) = match spec.kind {
        GeneratorKind::Polynomial => {
            let coeffs = polynomial_coefficients(spec);
            let f = GridFunction::sample(grid, |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c));
            (f, true, Some(f64::INFINITY))
        }
        GeneratorKind::Sawtooth => {
            let period = spec.param_or("period", 2.0);
            let amp = spec.param_or("amplitude", 1.0);
            let f = GridFunction::sample(grid, |x| {
                let r = x.rem_euclid(period);
                amp * r.min(period - r)
            });
            (f, false, Some(1.0))
        }
        GeneratorKind::Step => {
            let at = spec.param_or("at", 0.0);
            let h = spec.param_or("height", 1.0);
            (GridFunction::sample(grid, |x| if x >= at { h } else { 0.0 }), false, None)
        }
        GeneratorKind::Bump => {
            let c = spec.param_or("center", 0.0);
            let r = spec.param_or("radius", 0.5);
            (GridFunction::sample(grid, |x| bump_profile((x - c) / r)), true, Some(f64::INFINITY))
        }
        GeneratorKind::Weierstrass => {
            let s = spec.param_or("s", 0.5);
            let depth = match spec.param("J") {
                Some(j) => j as u32,
                None => default_weierstrass_depth(dx),
            };
            if (depth as f64).exp2() * dx > 1.0 + 1e-12 && spec.param_or("override", 0.0) == 0.0 {
                return Err(Error::InvalidParams(format!(
                    "grid spacing {dx} is too coarse for J = {depth}: 2^J * dx = {} > 1, so the finest oscillation is below the grid scale (pass override=1 to accept)",
                    (depth as f64).exp2() * dx
                )));
            }
            let f = GridFunction::sample(grid, |x| {
                (0..=depth).map(|j| (-(j as f64) * s).exp2() * ((j as f64).exp2() * std::f64::consts::PI * x).cos()).sum()
            });
            (f, false, Some(s))
        }
        GeneratorKind::RandomFourier => {
            let s = spec.param_or("s", 0.5);
            let nyq = nyquist_index(dx);
            let kmax = match spec.param("kmax") {
                Some(k) => k as u64,
                None => nyq,
            };
            if kmax > nyq && spec.param_or("override", 0.0) == 0.0 {
                return Err(Error::InvalidParams(format!(
                    "kmax = {kmax} exceeds the grid's highest frequency index {nyq} (pass override=1 to accept)"
                )));
            }
            let f = random_fourier(grid, s, kmax, spec.seed);
            // Band-limited well below the grid frequency.
            let smooth = (kmax as f64) * dx <= 1.0 / 16.0;
            (f, smooth, Some(if smooth { f64::INFINITY } else { s }))
        }
    };
    Ok(GeneratedFunction { spec: spec.clone(), samples: samples.with_smooth(smooth_tag), smooth_tag, claimed_regularity: claimed })
}

fn polynomial_coefficients(spec: &GeneratorSpec) -> Vec<f64> {
    let mut coeffs = Vec::new();
    for (k, v) in &spec.params {
        let d: usize = k[1..].parse().expect("validated coefficient key");
        if coeffs.len() <= d {
            coeffs.resize(d + 1, 0.0);
        }
        coeffs[d] = *v;
    }
    coeffs
}

/// `sum_{k=1}^{kmax} k^-(s + 1/2) (a_k cos k pi x + b_k sin k pi x)` with
/// standard normal `a_k, b_k` drawn in order `a_1, b_1, a_2, ...`.
fn random_fourier(grid: &GridSpec, s: f64, kmax: u64, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=kmax)
        .map(|k| {
            let c = (k as f64).powf(-(s + 0.5));
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (c * a, c * b)
        })
        .collect();
    let n = grid.count();
    let mut values = vec![0.0; n];
    let dx = grid.spacing;
    let period = 2.0 / dx;
    let offset = grid.origin() / dx;
    if period.fract() == 0.0 && offset.fract() == 0.0 && period <= 1u64.wrapping_shl(26) as f64 {
        // cos(k pi x_i) = cos(2 pi k (i + offset) / period): exact table lookup.
        let period = period as i64;
        let table: Vec<(f64, f64)> = (0..period)
            .map(|m| {
                let ang = 2.0 * std::f64::consts::PI * m as f64 / period as f64;
                (ang.cos(), ang.sin())
            })
            .collect();
        for (k, &(a, b)) in (1..=kmax as i64).zip(&coeffs) {
            let step = k % period;
            let mut m = (k * offset as i64).rem_euclid(period);
            for v in values.iter_mut() {
                let (c, sn) = table[m as usize];
                *v += a * c + b * sn;
                m += step;
                if m >= period {
                    m -= period;
                }
            }
        }
    } else {
        for (k, &(a, b)) in (1..=kmax).zip(&coeffs) {
            let w = k as f64 * std::f64::consts::PI;
            for (i, v) in values.iter_mut().enumerate() {
                let x = grid.x(i);
                *v += a * (w * x).cos() + b * (w * x).sin();
            }
        }
    }
    GridFunction::new(dx, grid.origin(), values).expect("grid has samples")
}

/// The default ten-function corpus, with grid-dependent parameters pinned.
pub fn default_corpus(seed: u64, grid: &GridSpec) -> Vec<(String, GeneratorSpec)> {
    use GeneratorKind::*;
    let entries = [
        ("const", GeneratorSpec::new(Polynomial, &[("c0", 1.0)], 0)),
        ("affine", GeneratorSpec::new(Polynomial, &[("c1", 1.0)], 0)),
        ("square", GeneratorSpec::new(Polynomial, &[("c2", 1.0)], 0)),
        ("sawtooth", GeneratorSpec::new(Sawtooth, &[("period", 2.0)], 0)),
        ("step", GeneratorSpec::new(Step, &[("at", 0.0)], 0)),
        ("bump", GeneratorSpec::new(Bump, &[("center", 0.0), ("radius", 0.5)], 0)),
        ("weier_0.3", GeneratorSpec::new(Weierstrass, &[("s", 0.3)], 0)),
        ("weier_0.5", GeneratorSpec::new(Weierstrass, &[("s", 0.5)], 0)),
        ("weier_0.7", GeneratorSpec::new(Weierstrass, &[("s", 0.7)], 0)),
        ("fourier_0.6", GeneratorSpec::new(RandomFourier, &[("s", 0.6)], seed)),
    ];
    entries.into_iter().map(|(id, spec)| (id.to_string(), spec.pinned(grid))).collect()
}

/// `omega_{p,A}(f, t)` by exhaustive enumeration of offsets and points.
pub fn oracle_omega_bruteforce(f: &GridFunction, p: Exponent, region: &Region, t: f64) -> Result<f64> {
    let dx = f.spacing();
    let values = f.values();
    let kmax: i64 = if t > 0.0 { (t / dx + 1e-9).floor() as i64 } else { 0 };
    let (vlo, vhi) = f
        .valid_indices()
        .ok_or_else(|| Error::EmptyDomain("function has no valid samples".into()))?;
    let lo_pos = (region.center - region.radius - f.origin()) / dx;
    let hi_pos = (region.center + region.radius - f.origin()) / dx;
    let mut points = Vec::new();
    for i in -(kmax + 1)..(values.len() as i64 + kmax + 1) {
        let x = i as f64;
        if x + 1.0 > lo_pos + 1e-9 && x - 1.0 < hi_pos - 1e-9 {
            points.push(i);
        }
    }
    for &i in &points {
        if i - kmax < vlo as i64 || i + kmax > vhi as i64 {
            return Err(Error::RegionOutsideDomain {
                lo: region.center - region.radius,
                hi: region.center + region.radius,
                margin: kmax as f64 * dx,
                valid_lo: f.x(vlo),
                valid_hi: f.x(vhi),
            });
        }
    }
    let mut best: f64 = 0.0;
    for k in -kmax..=kmax {
        if k == 0 {
            continue;
        }
        let mut acc: f64 = 0.0;
        for &i in &points {
            let d = (values[(i + k) as usize] - values[i as usize]).abs();
            match p {
                Exponent::Infinite => acc = acc.max(d),
                Exponent::Finite(q) => acc += d.powf(q),
            }
        }
        let norm = match p {
            Exponent::Infinite => acc,
            Exponent::Finite(q) => (acc * dx).powf(1.0 / q),
        };
        best = best.max(norm);
    }
    Ok(best)
}

/// Least-squares slope of `log omega` against `log t` over the scales where
/// the modulus is positive and strictly above its value at the next finer scale.
pub fn estimate_smoothness_slope(f: &GridFunction, p: Exponent, region: &Region, tq: &TQuadrature) -> Result<f64> {
    tq.check_spacing(f.spacing())?;
    let scales = tq.scales();
    let moduli = moduli_at_scales(f, p, Order::First, region, &TranslationLattice::single(0.0), &scales)?.remove(0);
    let n = scales.len();
    let keep: Vec<usize> = (0..n)
        .filter(|&j| moduli[j] > 0.0 && (j + 1 == n || moduli[j] > moduli[j + 1]))
        .collect();
    if keep.len() < 2 {
        return Err(Error::Degenerate("modulus is zero or flat at every scale".into()));
    }
    let xs: Vec<f64> = keep.iter().map(|&j| scales[j].ln()).collect();
    let ys: Vec<f64> = keep.iter().map(|&j| moduli[j].ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Values `u(t_j)` on the scales of a quadrature, nondecreasing in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneSequence {
    quadrature: TQuadrature,
    values: Vec<f64>,
}

impl MonotoneSequence {
    /// `values[j]` is `u(t_j)` with `t_j` decreasing in `j`.
    pub fn new(quadrature: TQuadrature, values: Vec<f64>) -> Result<Self> {
        if values.len() != quadrature.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} values, got {}",
                quadrature.len(),
                values.len()
            )));
        }
        for (j, v) in values.iter().enumerate() {
            if !(*v >= 0.0 && v.is_finite()) || (j > 0 && values[j - 1] < *v) {
                return Err(Error::NonMonotone { index: j });
            }
        }
        Ok(Self { quadrature, values })
    }

    pub fn from_fn(quadrature: TQuadrature, u: impl Fn(f64) -> f64) -> Result<Self> {
        let values = quadrature.scales().into_iter().map(u).collect();
        Self::new(quadrature, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MalphaResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `sup_{t <= 1/2} t^alpha u(t)` against `(int (t^alpha u(t))^q dt/t)^(1/q)`,
/// with the bound `2^|alpha| (ln 2)^(-1/q)` on their ratio.
pub fn check_malpha(u: &MonotoneSequence, alpha: f64, q: f64) -> Result<MalphaResult> {
    if !(q >= 1.0 && q.is_finite()) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!("need finite alpha and q in [1, inf), got {alpha}, {q}")));
    }
    let tq = &u.quadrature;
    let scales = tq.scales();
    let weighted: Vec<f64> = scales.iter().zip(&u.values).map(|(t, v)| t.powf(alpha) * v).collect();
    let lhs = scales
        .iter()
        .zip(&weighted)
        .filter(|(t, _)| **t <= 0.5 * (1.0 + 1e-12))
        .fold(0.0f64, |m, (_, w)| m.max(*w));
    let rhs = tq.integrate(&weighted, Exponent::Finite(q));
    let ratio = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { lhs / rhs };
    let bound = alpha.abs().exp2() * std::f64::consts::LN_2.powf(-1.0 / q);
    Ok(MalphaResult { lhs, rhs, ratio, bound, pass: ratio <= bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchaudResult {
    pub a: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Marchaud-type bound
/// `omega_{p,B+a}(f,t) <= 4t ||f||_{L_p(2B+a)} + t |ln t| M / ln 2`,
/// `M = max_{tau <= 1/2} eta_{p,B+a}(f,tau)/tau` over the quadrature scales.
pub fn check_marchaud(f: &GridFunction, p: Exponent, ball: &Region, a: f64, t: f64, tq: &TQuadrature) -> Result<MarchaudResult> {
    Ok(marchaud_batch(f, p, ball, &TranslationLattice::single(a), &[t], tq)?.remove(0))
}

/// [`check_marchaud`] for every lattice position and every `t`, sharing the
/// modulus sweeps. Results are ordered by position, then by `t`.
pub fn marchaud_batch(
    f: &GridFunction,
    p: Exponent,
    ball: &Region,
    lat: &TranslationLattice,
    ts: &[f64],
    tq: &TQuadrature,
) -> Result<Vec<MarchaudResult>> {
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t <= 0.5)) {
        return Err(Error::InvalidParams(format!("Marchaud check needs 0 < t <= 1/2, got {t}")));
    }
    tq.check_spacing(f.spacing())?;
    let points = lat.points();
    let margin = (1.0 / f.spacing() + 1e-9).floor() as usize;
    for &a in &points {
        f.region_indices(&ball.dilated(2.0).shifted(a), margin, margin).map_err(|e| match e {
            Error::RegionOutsideDomain { lo, hi, valid_lo, valid_hi, .. } => Error::MarginViolation(format!(
                "2B + a = [{lo}, {hi}] needs a margin of 1 inside the valid domain [{valid_lo}, {valid_hi}]"
            )),
            other => other,
        })?;
    }
    let taus: Vec<f64> = tq.scales().into_iter().filter(|t| *t <= 0.5 * (1.0 + 1e-12)).collect();
    let etas = moduli_at_scales(f, p, Order::Second, ball, lat, &taus)?;
    let omegas = moduli_at_scales(f, p, Order::First, ball, lat, ts)?;
    let mut out = Vec::with_capacity(points.len() * ts.len());
    for (i, &a) in points.iter().enumerate() {
        let m = taus.iter().zip(&etas[i]).fold(0.0f64, |acc, (tau, e)| acc.max(e / tau));
        let big = lp_norm(f, p, &ball.dilated(2.0).shifted(a))?;
        for (j, &t) in ts.iter().enumerate() {
            let lhs = omegas[i][j];
            let rhs = 4.0 * t * big + t * t.ln().abs() * m / std::f64::consts::LN_2;
            out.push(MarchaudResult { a, t, lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-6) });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::omega;
    use rand::Rng;

    fn grid() -> GridSpec {
        GridSpec::new(1.0 / 4096.0, 8.0).unwrap()
    }

    #[test]
    fn inline_specs_round_trip() {
        let s = GeneratorSpec::parse_inline("weier:s=0.5,J=10").unwrap();
        assert_eq!(s.kind, GeneratorKind::Weierstrass);
        assert_eq!(s.param("J"), Some(10.0));
        let c = GeneratorSpec::parse_inline("const:1").unwrap();
        assert_eq!(c.param("c0"), Some(1.0));
        let f = GeneratorSpec::parse_inline("fourier:s=0.6,seed=9").unwrap();
        assert_eq!(f.seed, 9);
        assert_eq!(GeneratorSpec::parse_inline(&f.to_string()).unwrap(), f);
        assert!(GeneratorSpec::parse_inline("weier:J=3").is_err());
        assert!(GeneratorSpec::parse_inline("nope").is_err());
        assert!(GeneratorSpec::parse_inline("step:width=2").is_err());
    }

    #[test]
    fn generators_basic_shapes() {
        let g = grid();
        let c = generate(&GeneratorSpec::parse_inline("const:3").unwrap(), &g).unwrap();
        assert!(c.samples.values().iter().all(|&v| v == 3.0));
        assert!(c.smooth_tag);
        let step = generate(&GeneratorSpec::parse_inline("step").unwrap(), &g).unwrap();
        let vals = step.samples.values();
        assert!(vals.iter().all(|&v| v == 0.0 || v == 1.0));
        let jumps = vals.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(jumps, 1);
        assert_eq!(step.samples.value_at(0.0), Some(1.0));
        assert_eq!(step.samples.value_at(-1.0 / 4096.0), Some(0.0));
        let saw = generate(&GeneratorSpec::parse_inline("sawtooth").unwrap(), &g).unwrap();
        assert_eq!(saw.samples.value_at(0.5), Some(0.5));
        assert_eq!(saw.samples.value_at(-1.5), Some(0.5));
        assert_eq!(saw.samples.value_at(3.0), Some(1.0));
    }

    #[test]
    fn weierstrass_bound_and_depth() {
        let g = grid();
        let w = generate(&GeneratorSpec::parse_inline("weier:s=0.5,J=10").unwrap(), &g).unwrap();
        assert!(w.samples.sup_norm() <= 1.0 / (1.0 - 0.5f64.sqrt()) + 1e-12);
        assert_eq!(w.claimed_regularity, Some(0.5));
        assert_eq!(default_weierstrass_depth(1.0 / 4096.0), 12);
        let coarse = GridSpec::new(1.0 / 256.0, 8.0).unwrap();
        let err = generate(&GeneratorSpec::parse_inline("weier:s=0.5,J=10").unwrap(), &coarse).unwrap_err();
        assert!(err.to_string().contains("too coarse"));
        assert!(generate(&GeneratorSpec::parse_inline("weier:s=0.5,J=10,override=1").unwrap(), &coarse).is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        let g = GridSpec::new(1.0 / 512.0, 4.0).unwrap();
        let spec = GeneratorSpec::parse_inline("fourier:s=0.6,seed=7").unwrap();
        let a = generate(&spec, &g).unwrap();
        let b = generate(&spec, &g).unwrap();
        assert_eq!(a.samples.values(), b.samples.values());
        let other = generate(&GeneratorSpec { seed: 8, ..spec.clone() }, &g).unwrap();
        assert_ne!(a.samples.values(), other.samples.values());
        assert!(!a.smooth_tag);
        let smooth = generate(&GeneratorSpec::parse_inline("fourier:s=0.6,kmax=8,seed=7").unwrap(), &g).unwrap();
        assert!(smooth.smooth_tag);
    }

    #[test]
    fn fourier_table_matches_direct_sum() {
        let g = GridSpec::new(1.0 / 64.0, 2.0).unwrap();
        let f = random_fourier(&g, 0.6, 40, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<(f64, f64)> = (1..=40u64)
            .map(|k| {
                let c = (k as f64).powf(-1.1);
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (c * a, c * b)
            })
            .collect();
        for i in 0..g.count() {
            let x = g.x(i);
            let direct: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let w = (k + 1) as f64 * std::f64::consts::PI * x;
                    a * w.cos() + b * w.sin()
                })
                .sum();
            assert!((f.values()[i] - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn oracle_matches_on_examples() {
        let g = grid();
        let step = generate(&GeneratorSpec::parse_inline("step").unwrap(), &g).unwrap().samples;
        let b = Region::unit();
        assert!((oracle_omega_bruteforce(&step, Exponent::Finite(1.0), &b, 0.25).unwrap() - 0.25).abs() < 1e-12);
        let c = generate(&GeneratorSpec::parse_inline("const:2").unwrap(), &g).unwrap().samples;
        assert_eq!(oracle_omega_bruteforce(&c, Exponent::Finite(2.0), &b, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn oracle_agrees_with_norms_on_random_cases() {
        let g = GridSpec::new(1.0 / 128.0, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let f = GridFunction::sample(&g, |_| rng.random_range(-1.0..1.0));
            let center = rng.random_range(-1.5..1.5);
            let radius = rng.random_range(0.01..1.0);
            let t = rng.random_range(0.0..1.0);
            let region = Region::new(center, radius).unwrap();
            for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinite] {
                let a = omega(&f, p, &region, t).unwrap();
                let b = oracle_omega_bruteforce(&f, p, &region, t).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.max(b), "{a} vs {b}");
            }
        }
        let f = GridFunction::sample(&g, |x| x);
        let edge = Region::new(3.5, 0.4).unwrap();
        assert!(oracle_omega_bruteforce(&f, Exponent::Finite(1.0), &edge, 0.5).unwrap_err().is_domain_error());
    }

    #[test]
    fn slopes_of_simple_functions() {
        let g = grid();
        let tq = TQuadrature::default();
        let b = Region::unit();
        let id = generate(&GeneratorSpec::parse_inline("affine").unwrap(), &g).unwrap().samples;
        assert!((estimate_smoothness_slope(&id, Exponent::Infinite, &b, &tq).unwrap() - 1.0).abs() <= 0.02);
        let step = generate(&GeneratorSpec::parse_inline("step").unwrap(), &g).unwrap().samples;
        assert!((estimate_smoothness_slope(&step, Exponent::Finite(1.0), &b, &tq).unwrap() - 1.0).abs() <= 0.05);
        let c = generate(&GeneratorSpec::parse_inline("const:1").unwrap(), &g).unwrap().samples;
        assert!(matches!(estimate_smoothness_slope(&c, Exponent::Finite(1.0), &b, &tq), Err(Error::Degenerate(_))));
    }

    #[test]
    fn malpha_examples() {
        let tq = TQuadrature::new(1.0, 64, 16).unwrap();
        let ones = MonotoneSequence::from_fn(tq, |_| 1.0).unwrap();
        let r = check_malpha(&ones, 0.5, 2.0).unwrap();
        assert!((r.lhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-3);
        assert!(r.pass);
        let lin = MonotoneSequence::from_fn(tq, |t| t).unwrap();
        let r = check_malpha(&lin, -0.5, 2.0).unwrap();
        assert!((r.lhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-3);
        let zero = MonotoneSequence::from_fn(tq, |_| 0.0).unwrap();
        assert_eq!(check_malpha(&zero, 1.0, 1.0).unwrap().ratio, 0.0);
        assert_eq!(
            MonotoneSequence::from_fn(tq, |t| 1.0 - t),
            Err(Error::NonMonotone { index: 1 })
        );
    }

    #[test]
    fn marchaud_on_square() {
        let g = grid();
        let sq = generate(&GeneratorSpec::parse_inline("square").unwrap(), &g).unwrap().samples;
        let tq = TQuadrature::default();
        let b = Region::unit();
        let r = check_marchaud(&sq, Exponent::Infinite, &b, 0.0, 0.25, &tq).unwrap();
        // omega = max |2xh + h^2| over [-1, 1] = 2t + t^2; eta / tau = 2 tau, max 1 at tau = 1/2.
        assert!((r.lhs - (0.5 + 0.0625)).abs() < 1e-12);
        let expected = 4.0 * 0.25 * 4.0 + 0.25 * 4f64.ln() * 1.0 / std::f64::consts::LN_2;
        assert!((r.rhs - expected).abs() < 1e-12);
        assert!(r.pass);
        let c = generate(&GeneratorSpec::parse_inline("const:1").unwrap(), &g).unwrap().samples;
        assert_eq!(check_marchaud(&c, Exponent::Finite(2.0), &b, 0.0, 0.5, &tq).unwrap().lhs, 0.0);
        assert!(check_marchaud(&c, Exponent::Finite(2.0), &b, 5.5, 0.5, &tq).unwrap_err().is_domain_error());
        assert!(check_marchaud(&c, Exponent::Finite(2.0), &b, 0.0, 0.75, &tq).is_err());
    }
}
