//! Empirical verification: equivalence of intrinsic and windowed localized
//! norms as bounded ratio spread over a corpus, plus the identity, `M_alpha`
//! and Marchaud suites.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_leibniz1, check_leibniz2, check_telescoping, GridFunction, GridOffset, GridSpec, Region};
use crate::norms::{
    lp_lu_norm, Exponent, LocalBallSums, LocalModuli, Order, SmoothnessParams, SpaceFamily,
    TQuadrature, TranslationLattice, WholeSpaceNorm,
};
use crate::testlab::{check_malpha, default_corpus, generate, marchaud_batch, GeneratorSpec, MonotoneSequence};
use crate::windows::{make_window, windowed_lu_norm, BumpWindow, WindowPreset};

/// Rows whose sides are both at or below this are excluded from the spread.
pub const RATIO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// Besov, first differences.
    T31,
    /// Besov with `s = 1`, second differences.
    T32,
    /// Lizorkin-Triebel, first-order density.
    T33,
    /// Lizorkin-Triebel with `s = 1`, second-order density.
    T34,
    /// Independence of the window.
    P21,
    /// Localization commutes with `W^1`.
    P22,
    /// Windowed and ball-based `L_p` localization agree.
    P23,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] =
        [TheoremId::T31, TheoremId::T32, TheoremId::T33, TheoremId::T34, TheoremId::P21, TheoremId::P22, TheoremId::P23];

    fn is_intrinsic(self) -> bool {
        matches!(self, TheoremId::T31 | TheoremId::T32 | TheoremId::T33 | TheoremId::T34)
    }

    /// Parameter sets exercised by the full run.
    pub fn default_params(self) -> Vec<SmoothnessParams> {
        let e = |v: f64| Exponent::finite(v).expect("valid exponent");
        let inf = Exponent::Infinite;
        let b = |s, p, q| SmoothnessParams::besov(s, p, q).expect("valid params");
        let f = |s, p, q| SmoothnessParams::tl(s, p, q).expect("valid params");
        match self {
            TheoremId::T31 => vec![b(0.3, e(2.0), e(2.0)), b(0.5, e(2.0), e(2.0)), b(0.5, inf, inf), b(0.7, e(1.0), e(1.0))],
            TheoremId::T32 => vec![b(1.0, e(2.0), e(2.0)), b(1.0, inf, e(1.0))],
            TheoremId::T33 => vec![f(0.5, e(2.0), e(2.0)), f(0.3, e(2.0), e(1.0))],
            TheoremId::T34 => vec![f(1.0, e(2.0), e(2.0))],
            TheoremId::P21 | TheoremId::P23 => vec![b(0.5, e(2.0), e(2.0))],
            TheoremId::P22 => vec![b(0.3, e(2.0), e(2.0))],
        }
    }

    fn check_params(self, sp: &SmoothnessParams) -> Result<()> {
        let ok = match self {
            TheoremId::T31 | TheoremId::P21 | TheoremId::P22 => sp.family == SpaceFamily::Besov && sp.s < 1.0,
            TheoremId::T32 => sp.family == SpaceFamily::Besov && sp.s == 1.0,
            TheoremId::T33 => sp.family == SpaceFamily::LizorkinTriebel && sp.s < 1.0,
            TheoremId::T34 => sp.family == SpaceFamily::LizorkinTriebel && sp.s == 1.0,
            TheoremId::P23 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("parameters {} do not fit {self}", sp.label())))
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParams(format!("unknown theorem id {s:?}")))
    }
}

/// Spread budgets per theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub t31: f64,
    pub t32: f64,
    pub t33: f64,
    pub t34: f64,
    pub p21: f64,
    pub p22: f64,
    pub p23: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { t31: 50.0, t32: 50.0, t33: 80.0, t34: 80.0, p21: 10.0, p22: 10.0, p23: 10.0 }
    }
}

impl Budgets {
    pub fn get(&self, id: TheoremId) -> f64 {
        match id {
            TheoremId::T31 => self.t31,
            TheoremId::T32 => self.t32,
            TheoremId::T33 => self.t33,
            TheoremId::T34 => self.t34,
            TheoremId::P21 => self.p21,
            TheoremId::P22 => self.p22,
            TheoremId::P23 => self.p23,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub grid: GridSpec,
    pub quadrature: TQuadrature,
    pub ball: Region,
    pub lattice: TranslationLattice,
    pub budgets: Budgets,
    pub seed: u64,
    /// Spacing of the grid the `phi_1` one-sided check runs on; `None` skips it.
    pub one_sided_spacing: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let ball = Region::unit();
        Self {
            grid: GridSpec { spacing: 1.0 / 1024.0, half_width: 8.0 },
            quadrature: TQuadrature::default(),
            ball,
            lattice: TranslationLattice::default_for(&ball),
            budgets: Budgets::default(),
            seed: 7,
            one_sided_spacing: Some(1.0 / 256.0),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.check_spacing(self.grid.spacing)?;
        GridSpec::new(self.grid.spacing, self.grid.half_width)?;
        if let Some(c) = self.one_sided_spacing {
            decimation_factor(self.grid.spacing, c)?;
        }
        Ok(())
    }

    /// Quadrature for the Marchaud constant `M`: scales `tau <= 1/2` down to the grid.
    pub fn marchaud_quadrature(&self) -> TQuadrature {
        let m = self.quadrature.levels_per_octave;
        let depth = ((0.5 / self.grid.spacing).log2() + 1e-9).floor().max(1.0) as u32;
        TQuadrature { t_max: 0.5, levels_per_octave: m, depth }
    }
}

fn decimation_factor(fine: f64, coarse: f64) -> Result<usize> {
    let r = coarse / fine;
    let n = r.round();
    if n < 1.0 || (r - n).abs() > 1e-9 * r {
        return Err(Error::InvalidParams(format!(
            "one-sided check spacing {coarse} must be a whole multiple of the grid spacing {fine}"
        )));
    }
    Ok(n as usize)
}

/// Every `factor`-th sample, aligned so that grid points of the coarse grid
/// are grid points of the fine one.
fn decimate(f: &GridFunction, grid: &GridSpec, factor: usize) -> Result<GridFunction> {
    if factor == 1 {
        return Ok(f.clone());
    }
    let values: Vec<f64> = f.values().iter().step_by(factor).copied().collect();
    if (values.len() - 1) * factor != f.len() - 1 {
        return Err(Error::InvalidParams(format!(
            "grid of {} samples cannot be decimated by {factor}",
            f.len()
        )));
    }
    debug_assert_eq!(f.origin(), grid.origin());
    Ok(GridFunction::new(f.spacing() * factor as f64, f.origin(), values)?.with_smooth(f.is_smooth()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub generated: crate::testlab::GeneratedFunction,
}

impl CorpusEntry {
    pub fn samples(&self) -> &GridFunction {
        &self.generated.samples
    }
}

/// An ordered set of sampled test functions on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub grid: GridSpec,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn from_specs(specs: Vec<(String, GeneratorSpec)>, grid: &GridSpec) -> Result<Self> {
        let entries = specs
            .into_iter()
            .map(|(id, spec)| Ok(CorpusEntry { id, generated: generate(&spec, grid)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *grid, entries })
    }

    pub fn default_for(seed: u64, grid: &GridSpec) -> Result<Self> {
        Self::from_specs(default_corpus(seed, grid), grid)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same functions decimated onto a coarser grid.
    fn decimated(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.coarsened(factor)?;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut generated = e.generated.clone();
                generated.samples = decimate(e.samples(), &self.grid, factor)?;
                Ok(CorpusEntry { id: e.id.clone(), generated })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, entries })
    }
}

/// One case of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub pass: bool,
}

impl Row {
    fn equivalence(case: String, lhs: f64, rhs: f64) -> Self {
        let finite = lhs.is_finite() && rhs.is_finite();
        let ratio = (lhs > RATIO_FLOOR && rhs > RATIO_FLOOR && finite).then(|| lhs / rhs);
        Row { case, lhs, rhs, ratio, pass: finite }
    }
}

/// `phi_1` check: the intrinsic norm over the windowed norm with the wide
/// window stays below the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedCheck {
    pub spacing: f64,
    pub rows: Vec<Row>,
    pub max_ratio: f64,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub theorem: TheoremId,
    pub params: SmoothnessParams,
    pub rows: Vec<Row>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub spread: f64,
    pub budget: f64,
    pub one_sided: Option<OneSidedCheck>,
    pub pass: bool,
}

impl EquivalenceReport {
    fn build(theorem: TheoremId, params: SmoothnessParams, rows: Vec<Row>, budget: f64, one_sided: Option<OneSidedCheck>) -> Self {
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        let (min_ratio, max_ratio) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        let spread = if ratios.is_empty() { 1.0 } else { max_ratio / min_ratio };
        let pass = spread <= budget && rows.iter().all(|r| r.pass) && one_sided.as_ref().is_none_or(|o| o.pass);
        Self { theorem, params, rows, min_ratio, max_ratio, spread, budget, one_sided, pass }
    }

    pub fn name(&self) -> String {
        match self.theorem {
            TheoremId::P21 | TheoremId::P22 | TheoremId::P23 => self.theorem.to_string(),
            t => format!("{t}_{}", self.params.label()),
        }
    }
}

/// Pass/fail cases of an inequality or identity suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub rows: Vec<Row>,
    pub failures: usize,
    pub pass: bool,
}

impl CheckReport {
    fn build(suite: &str, rows: Vec<Row>) -> Self {
        let failures = rows.iter().filter(|r| !r.pass).count();
        Self { suite: suite.to_string(), rows, failures, pass: failures == 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SuiteReport {
    Equivalence(EquivalenceReport),
    Check(CheckReport),
}

impl SuiteReport {
    pub fn name(&self) -> String {
        match self {
            SuiteReport::Equivalence(r) => r.name(),
            SuiteReport::Check(r) => r.suite.clone(),
        }
    }

    pub fn pass(&self) -> bool {
        match self {
            SuiteReport::Equivalence(r) => r.pass,
            SuiteReport::Check(r) => r.pass,
        }
    }

    pub fn rows(&self) -> &[Row] {
        match self {
            SuiteReport::Equivalence(r) => &r.rows,
            SuiteReport::Check(r) => &r.rows,
        }
    }
}

/// Named suites accepted by [`Harness::run_suite`].
pub const SUITES: [&str; 10] = ["identities", "malpha", "marchaud", "T31", "T32", "T33", "T34", "P21", "P22", "P23"];

type ModKey = (usize, u64, Order);
type WinKey = (usize, u64, Order, [u64; 2]);

/// Evaluates both sides of the equivalences, caching moduli across
/// parameter sets that share `(function, p, order)`.
pub struct Harness {
    config: VerifyConfig,
    corpus: Corpus,
    intrinsic: HashMap<ModKey, LocalModuli>,
    ball_sums: HashMap<(usize, Order), LocalBallSums>,
    lp_lu: HashMap<(usize, u64), f64>,
    /// `[lattice point] -> (||g||_p, moduli)` of the windowed products.
    windowed: HashMap<WinKey, Vec<(f64, Vec<f64>)>>,
    coarse: Option<Box<Harness>>,
}

impl Harness {
    pub fn new(config: VerifyConfig, corpus: Corpus) -> Result<Self> {
        config.validate()?;
        if corpus.grid != config.grid {
            return Err(Error::GridMismatch(format!(
                "corpus grid {:?} differs from the configured grid {:?}",
                corpus.grid, config.grid
            )));
        }
        Ok(Self {
            config,
            corpus,
            intrinsic: HashMap::new(),
            ball_sums: HashMap::new(),
            lp_lu: HashMap::new(),
            windowed: HashMap::new(),
            coarse: None,
        })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    fn require_corpus(&self) -> Result<()> {
        if self.corpus.is_empty() {
            Err(Error::EmptyCorpus)
        } else {
            Ok(())
        }
    }

    fn f(&self, fid: usize) -> &GridFunction {
        self.corpus.entries[fid].samples()
    }

    fn intrinsic_moduli(&mut self, fid: usize, p: Exponent, order: Order) -> Result<&LocalModuli> {
        let key = (fid, p.key(), order);
        if !self.intrinsic.contains_key(&key) {
            let c = &self.config;
            let m = LocalModuli::compute(self.f(fid), p, order, &c.ball, &c.lattice, &c.quadrature)?;
            self.intrinsic.insert(key, m);
        }
        Ok(&self.intrinsic[&key])
    }

    fn lp_lu(&mut self, fid: usize, p: Exponent) -> Result<f64> {
        let key = (fid, p.key());
        if let Some(v) = self.lp_lu.get(&key) {
            return Ok(*v);
        }
        let v = lp_lu_norm(self.f(fid), p, &self.config.ball, &self.config.lattice)?;
        self.lp_lu.insert(key, v);
        Ok(v)
    }

    fn windowed_moduli(&mut self, fid: usize, p: Exponent, order: Order, w: &BumpWindow) -> Result<&Vec<(f64, Vec<f64>)>> {
        let key = (fid, p.key(), order, [w.inner_radius.to_bits(), w.outer_radius.to_bits()]);
        if !self.windowed.contains_key(&key) {
            let tq = self.config.quadrature;
            let margin = order.multiplier() as f64 * tq.t_max;
            let f = self.f(fid);
            let rows = self
                .config
                .lattice
                .points()
                .par_iter()
                .map(|&a| {
                    let g = w.product(f, a, margin)?;
                    Ok((g.lp_norm(p), g.moduli(p, order, &tq)?))
                })
                .collect::<Result<Vec<_>>>()?;
            self.windowed.insert(key, rows);
        }
        Ok(&self.windowed[&key])
    }

    /// Intrinsic localized norm of the theorem (T31 to T34).
    fn intrinsic_norm(&mut self, id: TheoremId, sp: &SmoothnessParams, fid: usize) -> Result<f64> {
        let lu = self.lp_lu(fid, sp.p)?;
        let semi = match id {
            TheoremId::T31 | TheoremId::T32 => self.intrinsic_moduli(fid, sp.p, sp.order())?.sup_seminorm(sp.s, sp.q),
            TheoremId::T33 | TheoremId::T34 => {
                let order = if id == TheoremId::T33 { Order::First } else { Order::Second };
                if !self.ball_sums.contains_key(&(fid, order)) {
                    let c = &self.config;
                    let sums = LocalBallSums::compute(self.f(fid), order, &c.ball, &c.lattice, &c.quadrature)?;
                    self.ball_sums.insert((fid, order), sums);
                }
                self.ball_sums[&(fid, order)].sup_seminorm(sp.s, sp.p, sp.q)
            }
            _ => unreachable!("only theorems with an intrinsic side"),
        };
        Ok(semi + lu)
    }

    /// `max_a N((tau_a w) f)` with the base norm matching the theorem.
    fn windowed_norm(&mut self, id: TheoremId, sp: &SmoothnessParams, fid: usize, w: &BumpWindow) -> Result<f64> {
        let tq = self.config.quadrature;
        match id {
            TheoremId::T31 | TheoremId::T32 | TheoremId::P21 => {
                let rows = self.windowed_moduli(fid, sp.p, sp.order(), w)?;
                Ok(rows.iter().fold(0.0f64, |m, (lp, moduli)| m.max(lp + tq.besov_integral(moduli, sp.s, sp.q))))
            }
            TheoremId::T33 | TheoremId::T34 => {
                let order = if id == TheoremId::T33 { Order::First } else { Order::Second };
                let base = WholeSpaceNorm::lizorkin_triebel(*sp, tq, order)?;
                windowed_lu_norm(self.f(fid), w, &base, &self.config.lattice)
            }
            TheoremId::P22 => {
                let base = WholeSpaceNorm::SobolevBesov { params: *sp, quadrature: tq };
                windowed_lu_norm(self.f(fid), w, &base, &self.config.lattice)
            }
            TheoremId::P23 => windowed_lu_norm(self.f(fid), w, &WholeSpaceNorm::Lp { p: sp.p }, &self.config.lattice),
        }
    }

    /// `N(f) + N(f')` for the intrinsic Besov localization `N`.
    fn sobolev_intrinsic(&mut self, sp: &SmoothnessParams, fid: usize) -> Result<f64> {
        let base = self.intrinsic_norm(TheoremId::T31, sp, fid)?;
        let c = self.config;
        let df = self.f(fid).central_derivative()?;
        let local = LocalModuli::compute(&df, sp.p, Order::First, &c.ball, &c.lattice, &c.quadrature)?;
        Ok(base + local.sup_seminorm(sp.s, sp.q) + lp_lu_norm(&df, sp.p, &c.ball, &c.lattice)?)
    }

    fn coarse(&mut self) -> Result<Option<&mut Harness>> {
        let Some(spacing) = self.config.one_sided_spacing else {
            return Ok(None);
        };
        if self.coarse.is_none() {
            let factor = decimation_factor(self.config.grid.spacing, spacing)?;
            let corpus = self.corpus.decimated(factor)?;
            let tq = self.config.quadrature;
            let depth = ((tq.t_max / spacing).log2() + 1e-9).floor().min(tq.depth as f64).max(1.0) as u32;
            let config = VerifyConfig {
                grid: corpus.grid,
                quadrature: tq.with_depth(depth)?,
                one_sided_spacing: None,
                ..self.config
            };
            self.coarse = Some(Box::new(Harness::new(config, corpus)?));
        }
        Ok(self.coarse.as_deref_mut())
    }

    fn one_sided(&mut self, id: TheoremId, sp: &SmoothnessParams, budget: f64) -> Result<Option<OneSidedCheck>> {
        let Some(coarse) = self.coarse()? else {
            return Ok(None);
        };
        let w1 = make_window(WindowPreset::Phi1, &coarse.config.ball)?;
        let mut rows = Vec::new();
        for fid in 0..coarse.corpus.entries.len() {
            let lhs = coarse.intrinsic_norm(id, sp, fid)?;
            let rhs = coarse.windowed_norm(id, sp, fid, &w1)?;
            rows.push(Row::equivalence(coarse.corpus.entries[fid].id.clone(), lhs, rhs));
        }
        let max_ratio = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
        let pass = max_ratio <= budget && rows.iter().all(|r| r.pass);
        Ok(Some(OneSidedCheck { spacing: coarse.config.grid.spacing, rows, max_ratio, budget, pass }))
    }

    /// Both sides of one equivalence over the corpus.
    pub fn run_equivalence(&mut self, id: TheoremId, sp: &SmoothnessParams) -> Result<EquivalenceReport> {
        self.require_corpus()?;
        id.check_params(sp)?;
        let ball = self.config.ball;
        let phi0 = make_window(WindowPreset::Phi0, &ball)?;
        let fids: Vec<usize> = (0..self.corpus.entries.len())
            .filter(|&i| id != TheoremId::P22 || self.corpus.entries[i].generated.smooth_tag)
            .collect();
        if fids.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut rows = Vec::with_capacity(fids.len());
        for fid in fids {
            let (lhs, rhs) = match id {
                TheoremId::P21 => {
                    let wide = make_window(WindowPreset::Custom { inner: 0.0, outer: 0.5 * ball.radius }, &ball)?;
                    (self.windowed_norm(id, sp, fid, &phi0)?, self.windowed_norm(id, sp, fid, &wide)?)
                }
                TheoremId::P22 => (self.sobolev_intrinsic(sp, fid)?, self.windowed_norm(id, sp, fid, &phi0)?),
                TheoremId::P23 => (self.lp_lu(fid, sp.p)?, self.windowed_norm(id, sp, fid, &phi0)?),
                _ => (self.intrinsic_norm(id, sp, fid)?, self.windowed_norm(id, sp, fid, &phi0)?),
            };
            rows.push(Row::equivalence(self.corpus.entries[fid].id.clone(), lhs, rhs));
        }
        let budget = self.config.budgets.get(id);
        let one_sided = if id.is_intrinsic() { self.one_sided(id, sp, budget)? } else { None };
        Ok(EquivalenceReport::build(id, *sp, rows, budget, one_sided))
    }

    /// Runs a named suite; theorem suites run every default parameter set.
    pub fn run_suite(&mut self, name: &str) -> Result<Vec<SuiteReport>> {
        match name {
            "identities" => Ok(vec![SuiteReport::Check(identity_suite(self.config.seed)?)]),
            "malpha" => Ok(vec![SuiteReport::Check(malpha_suite(self.config.seed, &self.config.quadrature)?)]),
            "marchaud" => Ok(vec![SuiteReport::Check(self.marchaud_suite()?)]),
            other => {
                let id: TheoremId = other.parse()?;
                id.default_params()
                    .iter()
                    .map(|sp| self.run_equivalence(id, sp).map(SuiteReport::Equivalence))
                    .collect()
            }
        }
    }

    /// Every suite in a fixed order.
    pub fn run_all(&mut self) -> Result<Vec<SuiteReport>> {
        self.require_corpus()?;
        let mut out = Vec::new();
        for name in SUITES {
            out.extend(self.run_suite(name)?);
        }
        Ok(out)
    }

    /// Marchaud bound for each corpus function, `p in {1, 2, inf}`, positions
    /// `a in {-2, ..., 2}` and `t = 2^-1, ..., 2^-8`.
    pub fn marchaud_suite(&self) -> Result<CheckReport> {
        self.require_corpus()?;
        let tq = self.config.marchaud_quadrature();
        let lat = TranslationLattice::new(-2.0, 2.0, 1.0)?;
        let ts: Vec<f64> = (1..=8).map(|k| (-(k as f64)).exp2()).collect();
        let ps = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinite];
        let mut rows = Vec::new();
        for e in &self.corpus.entries {
            for p in ps {
                for r in marchaud_batch(e.samples(), p, &self.config.ball, &lat, &ts, &tq)? {
                    rows.push(Row {
                        case: format!("{} p={p} a={} t=2^{}", e.id, r.a, r.t.log2().round()),
                        lhs: r.lhs,
                        rhs: r.rhs,
                        ratio: (r.rhs > 0.0).then(|| r.lhs / r.rhs),
                        pass: r.pass,
                    });
                }
            }
        }
        Ok(CheckReport::build("marchaud", rows))
    }
}

/// Leibniz rules on 100 random triples each, telescoping for `k = 1..=6`.
pub fn identity_suite(seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1d);
    let random_fn = |rng: &mut ChaCha8Rng, n: usize| {
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let values = (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        GridFunction::new(1.0 / 64.0, -(n as f64) / 128.0, values)
    };
    let mut rows = Vec::new();
    for second in [false, true] {
        for i in 0..100 {
            let n = rng.random_range(64..=512);
            let f = random_fn(&mut rng, n)?;
            let g = random_fn(&mut rng, n)?;
            let steps = rng.random_range(1..=(n / 8) as i64) as isize * if rng.random_bool(0.5) { 1 } else { -1 };
            let h = GridOffset::new(steps);
            let residual = if second { check_leibniz2(&f, &g, h)? } else { check_leibniz1(&f, &g, h)? };
            let tol = 1e-11 * (1.0 + f.sup_norm() * g.sup_norm());
            let name = if second { "leibniz2" } else { "leibniz1" };
            rows.push(check_row(format!("{name} #{i} h={steps}"), residual, tol));
        }
    }
    for k in 1..=6u32 {
        for i in 0..10 {
            let f = random_fn(&mut rng, 512)?;
            let steps: isize = if i == 0 { 1 } else { rng.random_range(1..=3i64) as isize };
            let residual = check_telescoping(&f, GridOffset::new(steps), k)?;
            rows.push(check_row(format!("telescoping k={k} #{i} h={steps}"), residual, 1e-11 * (1.0 + f.sup_norm())));
        }
    }
    Ok(CheckReport::build("identities", rows))
}

fn check_row(case: String, lhs: f64, rhs: f64) -> Row {
    Row { case, lhs, rhs, ratio: Some(lhs / rhs), pass: lhs <= rhs }
}

/// A random nondecreasing (in `t`) sequence with plateaus, jumps and zero stretches.
pub fn random_monotone(rng: &mut impl Rng, tq: &TQuadrature) -> Result<MonotoneSequence> {
    let n = tq.len();
    let mut values = vec![0.0; n];
    let mut level = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) };
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    // Index n - 1 is the smallest scale.
    for j in (0..n).rev() {
        let step: f64 = match rng.random_range(0..4) {
            0 => 0.0,
            1 => rng.random_range(0.0..0.1),
            2 => rng.random_range(0.0..1.0),
            _ => rng.random_range(0.0..10.0) * rng.random_range(0.0..1.0f64).powi(4),
        };
        level += step;
        values[j] = scale * level;
    }
    MonotoneSequence::new(*tq, values)
}

/// 100 random monotone sequences for each `alpha in {-1, -1/2, 1/2, 1}`, `q in {1, 2, 4}`.
pub fn malpha_suite(seed: u64, tq: &TQuadrature) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa1);
    let mut rows = Vec::new();
    for alpha in [-1.0, -0.5, 0.5, 1.0] {
        for q in [1.0, 2.0, 4.0] {
            for i in 0..100 {
                let u = random_monotone(&mut rng, tq)?;
                let r = check_malpha(&u, alpha, q)?;
                rows.push(Row {
                    case: format!("alpha={alpha} q={q} #{i}"),
                    lhs: r.ratio,
                    rhs: r.bound,
                    ratio: Some(r.ratio / r.bound),
                    pass: r.pass,
                });
            }
        }
    }
    Ok(CheckReport::build("malpha", rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testlab::GeneratorKind;

    fn small_config() -> VerifyConfig {
        let ball = Region::unit();
        VerifyConfig {
            grid: GridSpec::new(1.0 / 128.0, 8.0).unwrap(),
            quadrature: TQuadrature::new(1.0, 4, 7).unwrap(),
            ball,
            lattice: TranslationLattice::new(-1.0, 1.0, 0.25).unwrap(),
            budgets: Budgets::default(),
            seed: 3,
            one_sided_spacing: Some(1.0 / 64.0),
        }
    }

    fn corpus(config: &VerifyConfig, specs: &[&str]) -> Corpus {
        let specs = specs
            .iter()
            .map(|s| (s.to_string(), GeneratorSpec::parse_inline(s).unwrap()))
            .collect();
        Corpus::from_specs(specs, &config.grid).unwrap()
    }

    #[test]
    fn theorem_ids_parse() {
        for id in TheoremId::ALL {
            assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
        }
        assert_eq!("t31".parse::<TheoremId>().unwrap(), TheoremId::T31);
        assert!("T35".parse::<TheoremId>().is_err());
    }

    #[test]
    fn constant_corpus_has_unit_spread() {
        let c = small_config();
        let mut h = Harness::new(c, corpus(&c, &["const:1"])).unwrap();
        let sp = TheoremId::T31.default_params()[1];
        let r = h.run_equivalence(TheoremId::T31, &sp).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.spread, 1.0);
        // Closed-interval Riemann sum: 2/dx + 1 points.
        assert!((r.rows[0].lhs - (257.0f64 / 128.0).sqrt()).abs() < 1e-12);
        assert!(r.pass);
        assert!(r.one_sided.as_ref().unwrap().pass);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let c = small_config();
        let mut h = Harness::new(c, Corpus { grid: c.grid, entries: vec![] }).unwrap();
        assert_eq!(h.run_all(), Err(Error::EmptyCorpus));
        let sp = TheoremId::T31.default_params()[0];
        assert_eq!(h.run_equivalence(TheoremId::T31, &sp).unwrap_err(), Error::EmptyCorpus);
    }

    #[test]
    fn cached_windowed_besov_matches_direct() {
        let c = small_config();
        let mut h = Harness::new(c, corpus(&c, &["weier:s=0.5,J=7", "bump"])).unwrap();
        let phi0 = make_window(WindowPreset::Phi0, &c.ball).unwrap();
        for sp in [TheoremId::T31.default_params()[0], TheoremId::T32.default_params()[1]] {
            let id = if sp.s < 1.0 { TheoremId::T31 } else { TheoremId::T32 };
            for fid in 0..2 {
                let cached = h.windowed_norm(id, &sp, fid, &phi0).unwrap();
                let base = WholeSpaceNorm::besov(sp, c.quadrature).unwrap();
                let direct = windowed_lu_norm(h.f(fid), &phi0, &base, &c.lattice).unwrap();
                assert!((cached - direct).abs() <= 1e-12 * direct);
            }
        }
    }

    #[test]
    fn intrinsic_matches_public_functions() {
        let c = small_config();
        let mut h = Harness::new(c, corpus(&c, &["sawtooth", "step"])).unwrap();
        let sp = TheoremId::T33.default_params()[0];
        for fid in 0..2 {
            let a = h.intrinsic_norm(TheoremId::T33, &sp, fid).unwrap();
            let b = crate::norms::tl_lu_intrinsic(h.f(fid), &sp, &c.quadrature, &c.ball, &c.lattice, Order::First).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn scaling_a_side_keeps_spread() {
        let c = small_config();
        let mut h = Harness::new(c, corpus(&c, &["affine", "sawtooth", "weier:s=0.5,J=7"])).unwrap();
        let sp = TheoremId::T31.default_params()[1];
        let r = h.run_equivalence(TheoremId::T31, &sp).unwrap();
        let doubled: Vec<Row> = r.rows.iter().map(|row| Row::equivalence(row.case.clone(), row.lhs, 2.0 * row.rhs)).collect();
        let r2 = EquivalenceReport::build(r.theorem, r.params, doubled, r.budget, None);
        for (a, b) in r.rows.iter().zip(&r2.rows) {
            assert!((a.ratio.unwrap() / b.ratio.unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((r.spread - r2.spread).abs() <= 1e-12 * r.spread);
    }

    #[test]
    fn p22_uses_smooth_functions_only() {
        let c = small_config();
        let mut h = Harness::new(c, corpus(&c, &["square", "step", "bump"])).unwrap();
        let r = h.run_equivalence(TheoremId::P22, &TheoremId::P22.default_params()[0]).unwrap();
        let ids: Vec<&str> = r.rows.iter().map(|r| r.case.as_str()).collect();
        assert_eq!(ids, ["square", "bump"]);
        let mut rough = Harness::new(c, corpus(&c, &["step"])).unwrap();
        assert_eq!(rough.run_equivalence(TheoremId::P22, &TheoremId::P22.default_params()[0]).unwrap_err(), Error::EmptyCorpus);
    }

    #[test]
    fn margin_violations_surface() {
        let mut c = small_config();
        c.lattice = TranslationLattice::new(-6.0, 6.0, 1.0).unwrap();
        let mut h = Harness::new(c, corpus(&c, &["const:1"])).unwrap();
        let sp = TheoremId::T31.default_params()[0];
        assert!(h.run_equivalence(TheoremId::T31, &sp).unwrap_err().is_domain_error());
    }

    #[test]
    fn identity_and_malpha_suites_pass() {
        let id = identity_suite(5).unwrap();
        assert_eq!(id.rows.len(), 260);
        assert!(id.pass, "{:?}", id.rows.iter().find(|r| !r.pass));
        let m = malpha_suite(5, &TQuadrature::default()).unwrap();
        assert_eq!(m.rows.len(), 1200);
        assert!(m.pass);
    }

    #[test]
    fn run_all_is_deterministic_and_complete() {
        let c = small_config();
        let specs: Vec<(String, GeneratorSpec)> = default_corpus(c.seed, &c.grid)
            .into_iter()
            .map(|(id, mut s)| {
                if s.kind == GeneratorKind::RandomFourier {
                    s.params.insert("kmax".into(), 64.0);
                }
                (id, s)
            })
            .collect();
        let run = || {
            let mut h = Harness::new(c, Corpus::from_specs(specs.clone(), &c.grid).unwrap()).unwrap();
            h.run_all().unwrap()
        };
        let a = run();
        assert_eq!(a.len(), 15);
        assert_eq!(a, run());
        let names: Vec<String> = a.iter().map(SuiteReport::name).collect();
        assert!(names.contains(&"T31_s0.5_pinf_qinf".to_string()));
    }
}
