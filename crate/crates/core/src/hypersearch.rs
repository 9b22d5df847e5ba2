//! Two-stage coarse-to-fine grid search over NNLM hyperparameters.
//!
//! Stage 1 lays a geometric grid (3 points per axis by default) over the
//! full ranges. Each later stage re-grids a box around the current winner
//! whose log-span is the previous span times the refinement factor, clipped
//! to the original ranges. Points already trained are not trained again.
//! Every point is scored by validation perplexity, `exp` of the best
//! validation cross-entropy; a diverged training scores `+inf`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::EncodedCorpus;
use crate::error::{Error, Result};
use crate::eval::csv_field;
use crate::nnlm::{train, NnlmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `points` values spaced geometrically from `lo` to `hi`, rounded for
    /// integer axes, without duplicates.
    fn grid(&self, points: usize, integer: bool) -> Vec<f64> {
        let raw: Vec<f64> = if points <= 1 || self.lo == self.hi {
            vec![(self.lo * self.hi).sqrt()]
        } else {
            let ratio = self.hi / self.lo;
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        self.hi
                    } else {
                        self.lo * ratio.powf(i as f64 / (points - 1) as f64)
                    }
                })
                .collect()
        };
        let mut out: Vec<f64> = Vec::with_capacity(raw.len());
        for x in raw {
            let x = if integer { x.round().clamp(self.lo.ceil(), self.hi.floor()) } else { x };
            if !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// A box around `center` whose log-span is `factor` times this range's,
    /// clipped to `bounds`.
    fn around(&self, center: f64, factor: f64, bounds: &Range) -> Range {
        let half = ((self.hi / self.lo).ln() * factor / 2.0).exp();
        Range {
            lo: (center / half).max(bounds.lo),
            hi: (center * half).min(bounds.hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub emb_dim: Range,
    pub hidden_dim: Range,
    pub learning_rate: Range,
    pub momentum: Range,
    pub batch_size: Range,
    pub points_per_axis: usize,
    pub refinement: f64,
    pub stages: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            emb_dim: Range::new(25.0, 200.0),
            hidden_dim: Range::new(100.0, 800.0),
            learning_rate: Range::new(0.05, 0.3),
            momentum: Range::new(0.8, 0.99),
            batch_size: Range::new(100.0, 400.0),
            points_per_axis: 3,
            refinement: 0.5,
            stages: 2,
        }
    }
}

const AXIS_NAMES: [&str; 5] = ["emb_dim", "hidden_dim", "learning_rate", "momentum", "batch_size"];
const INTEGER_AXES: [bool; 5] = [true, true, false, false, true];

impl SearchSpace {
    fn axes(&self) -> [Range; 5] {
        [self.emb_dim, self.hidden_dim, self.learning_rate, self.momentum, self.batch_size]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| {
            Err(Error::InvalidConfig {
                field,
                reason: reason.into(),
            })
        };
        for (r, name) in self.axes().iter().zip(AXIS_NAMES) {
            if !(r.lo > 0.0 && r.lo <= r.hi && r.hi.is_finite()) {
                return bad(name, "range must satisfy 0 < lo <= hi < inf");
            }
        }
        for (r, name) in self.axes().iter().zip(AXIS_NAMES).zip(INTEGER_AXES) {
            let ((r, name), integer) = (r, name);
            if integer && r.lo.ceil() > r.hi.floor() {
                return bad(name, "range contains no integer");
            }
        }
        if self.momentum.hi >= 1.0 {
            return bad("momentum", "upper bound must be below 1");
        }
        if self.points_per_axis == 0 {
            return bad("points_per_axis", "must be positive");
        }
        if !(self.refinement > 0.0 && self.refinement <= 1.0) {
            return bad("refinement", "must be in (0, 1]");
        }
        if self.stages == 0 {
            return bad("stages", "must be positive");
        }
        Ok(())
    }

    fn contains(&self, p: &SearchPoint) -> bool {
        self.axes()
            .iter()
            .zip(p.values())
            .all(|(r, x)| r.contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub emb_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
}

impl SearchPoint {
    fn values(&self) -> [f64; 5] {
        [
            self.emb_dim as f64,
            self.hidden_dim as f64,
            self.learning_rate,
            self.momentum,
            self.batch_size as f64,
        ]
    }

    fn key(&self) -> [u64; 5] {
        self.values().map(f64::to_bits)
    }

    pub fn apply(&self, base: &NnlmConfig) -> NnlmConfig {
        NnlmConfig {
            emb_dim: self.emb_dim,
            hidden_dim: self.hidden_dim,
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            batch_size: self.batch_size,
            ..base.clone()
        }
    }
}

fn grid_points(axes: &[Range; 5], points: usize) -> Vec<SearchPoint> {
    let grids: Vec<Vec<f64>> = axes
        .iter()
        .zip(INTEGER_AXES)
        .map(|(r, int)| r.grid(points, int))
        .collect();
    let mut out = Vec::new();
    for &e in &grids[0] {
        for &h in &grids[1] {
            for &lr in &grids[2] {
                for &m in &grids[3] {
                    for &b in &grids[4] {
                        out.push(SearchPoint {
                            emb_dim: e as usize,
                            hidden_dim: h as usize,
                            learning_rate: lr,
                            momentum: m,
                            batch_size: b as usize,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    pub index: usize,
    pub point: SearchPoint,
    /// `+inf` when training diverged.
    pub valid_ppl: f64,
    #[serde(skip)]
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: NnlmConfig,
    pub best_ppl: f64,
    pub trace: Vec<TraceRow>,
}

impl SearchResult {
    /// One row per trained point; wall time is left to [`Self::timing_csv`]
    /// so this file is reproducible.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("stage,index,");
        out.push_str(&AXIS_NAMES.join(","));
        out.push_str(",valid_ppl\n");
        for r in &self.trace {
            let p = r.point;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.stage, r.index, p.emb_dim, p.hidden_dim, p.learning_rate, p.momentum, p.batch_size, r.valid_ppl
            );
        }
        out
    }

    pub fn timing_csv(&self, label: &str) -> String {
        let mut out = String::from("label,stage,index,wall_secs\n");
        for r in &self.trace {
            let _ = writeln!(out, "{},{},{},{:.3}", csv_field(label), r.stage, r.index, r.wall_secs);
        }
        out
    }
}

/// Runs the search with an arbitrary objective returning validation
/// perplexity for a configuration. Divergence errors score `+inf`; any
/// other error aborts the search.
pub fn search_with<F>(space: &SearchSpace, base: &NnlmConfig, objective: F) -> Result<SearchResult>
where
    F: Fn(&NnlmConfig) -> Result<f64> + Sync,
{
    space.validate()?;
    let bounds = space.axes();
    let mut axes = bounds;
    let mut seen: HashSet<[u64; 5]> = HashSet::new();
    let mut trace: Vec<TraceRow> = Vec::new();
    let mut best: Option<usize> = None;

    for stage in 1..=space.stages {
        if let Some(b) = best {
            let center = trace[b].point.values();
            let mut next = axes;
            for i in 0..5 {
                next[i] = axes[i].around(center[i], space.refinement, &bounds[i]);
            }
            axes = next;
        }
        let fresh: Vec<SearchPoint> = grid_points(&axes, space.points_per_axis)
            .into_iter()
            .filter(|p| seen.insert(p.key()))
            .collect();
        debug_assert!(fresh.iter().all(|p| space.contains(p)));
        let rows = fresh
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let start = Instant::now();
                let ppl = match objective(&p.apply(base)) {
                    Ok(x) if x.is_finite() => x,
                    Ok(_) | Err(Error::TrainingDiverged { .. }) | Err(Error::Diverged) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                Ok(TraceRow {
                    stage,
                    index: i,
                    point: *p,
                    valid_ppl: ppl,
                    wall_secs: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for r in rows {
            log::debug!("stage {stage} point {}: ppl {}", r.index, r.valid_ppl);
            let better = match best {
                None => true,
                Some(b) => r.valid_ppl < trace[b].valid_ppl,
            };
            trace.push(r);
            if better {
                best = Some(trace.len() - 1);
            }
        }
    }
    let b = best.ok_or(Error::Empty("search grid"))?;
    if trace[b].valid_ppl.is_infinite() {
        return Err(Error::Diverged);
    }
    Ok(SearchResult {
        best: trace[b].point.apply(base),
        best_ppl: trace[b].valid_ppl,
        trace,
    })
}

/// Searches NNLM hyperparameters on one author's corpus. Every point trains
/// on the same train/validation split with initialization seed `seed`.
pub fn search(corpus: &EncodedCorpus, space: &SearchSpace, base: &NnlmConfig, seed: u64) -> Result<SearchResult> {
    let base = NnlmConfig {
        vocab_size: corpus.vocab_size(),
        init_seed: seed,
        ..base.clone()
    };
    search_with(space, &base, |cfg| {
        let (_, history) = train::<f64>(corpus, cfg)?;
        Ok(history.best_valid_cost().exp())
    })
}
