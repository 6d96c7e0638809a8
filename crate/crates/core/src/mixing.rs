//! Base and mixing inequalities for the substructure
//! `{ s(x, ξ^i) + M^i z^i ≥ 0, Σ z ≤ k }`, and exact separation.
//!
//! For a probe direction `μ` with subproblem values `h̄^j(μ)` sorted so that
//! `h_(0) ≥ h_(1) ≥ ⋯`, the threshold is `h_(k)`. A mixing cut for an index
//! list `J = (j_1, …, j_ℓ)` drawn from the top `k` positions in sorted order is
//!
//! ```text
//! μᵀx + Σ_i (h̄^{j_i} − h̄^{j_{i+1}}) z^{j_i} ≥ h̄^{j_1},   h̄^{j_{ℓ+1}} := threshold.
//! ```

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::formulation::{LinearRow, MipModel, RowFamily, Sense};
use crate::model::{dot, Instance};
use crate::quantile::QuantileTable;
use crate::solver::CutSource;

/// Default violation tolerance for separation.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Largest `k` accepted by [`enumerate_all_cuts`].
pub const MAX_ENUMERATION_K: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SortedBaseProfile {
    pub mu: Vec<f64>,
    /// `(i, p)` when `μ` is the coefficient vector of scenario row `(i, p)`.
    pub probe: Option<(usize, usize)>,
    /// `(scenario, h̄)` in non-increasing `h̄` order, ties by ascending index.
    pub h_sorted: Vec<(usize, f64)>,
    pub k: usize,
    pub threshold: f64,
}

impl SortedBaseProfile {
    pub fn new(mu: Vec<f64>, h: &[f64], k: usize, probe: Option<(usize, usize)>) -> Result<Self> {
        Ok(Self::counted(mu, h, k, probe)?.0)
    }

    /// Like [`SortedBaseProfile::new`], also returning the number of
    /// comparisons the sort performed.
    pub fn counted(
        mu: Vec<f64>,
        h: &[f64],
        k: usize,
        probe: Option<(usize, usize)>,
    ) -> Result<(Self, usize)> {
        if k >= h.len() {
            return Err(Error::InvalidInstance(format!(
                "k = {k} must be below N = {}",
                h.len()
            )));
        }
        let mut comparisons = 0usize;
        let mut h_sorted: Vec<(usize, f64)> = h.iter().copied().enumerate().collect();
        h_sorted.sort_by(|a, b| {
            comparisons += 1;
            b.1.total_cmp(&a.1)
        });
        let threshold = h_sorted[k].1;
        Ok((
            Self {
                mu,
                probe,
                h_sorted,
                k,
                threshold,
            },
            comparisons,
        ))
    }

    pub fn len(&self) -> usize {
        self.h_sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_sorted.is_empty()
    }

    /// Sorted position of scenario `j`.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.h_sorted.iter().position(|&(s, _)| s == j)
    }

    /// True when the top `k + 1` values are finite, so every cut has finite data.
    pub fn is_finite(&self) -> bool {
        self.h_sorted[..=self.k].iter().all(|(_, v)| v.is_finite())
    }

    fn cut_from_positions(&self, positions: &[usize]) -> MixingCut {
        let mut indices = Vec::with_capacity(positions.len());
        let mut coefficients = Vec::with_capacity(positions.len());
        for (n, &pos) in positions.iter().enumerate() {
            let (j, h) = self.h_sorted[pos];
            let next = positions
                .get(n + 1)
                .map_or(self.threshold, |&q| self.h_sorted[q].1);
            indices.push(j);
            coefficients.push(h - next);
        }
        let rhs = positions
            .first()
            .map_or(self.threshold, |&p| self.h_sorted[p].1);
        MixingCut {
            mu: self.mu.clone(),
            probe: self.probe,
            indices,
            coefficients,
            rhs,
            threshold: self.threshold,
        }
    }
}

/// `μᵀx + Σ coef·z^j ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingCut {
    pub mu: Vec<f64>,
    pub probe: Option<(usize, usize)>,
    /// `J`, scenario indices in non-increasing `h̄` order.
    pub indices: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub rhs: f64,
    pub threshold: f64,
}

impl MixingCut {
    pub fn lhs(&self, x: &[f64], z: &[f64]) -> f64 {
        dot(&self.mu, x)
            + self
                .indices
                .iter()
                .zip(&self.coefficients)
                .map(|(&j, c)| c * z[j])
                .sum::<f64>()
    }

    /// `rhs − lhs`; positive when the point is cut off.
    pub fn violation(&self, x: &[f64], z: &[f64]) -> f64 {
        self.rhs - self.lhs(x, z)
    }

    pub fn to_inequality(&self) -> Inequality {
        Inequality {
            x_coef: self.mu.clone(),
            z_terms: self
                .indices
                .iter()
                .copied()
                .zip(self.coefficients.iter().copied())
                .collect(),
            rhs: self.rhs,
        }
    }

    pub fn to_row(&self, model: &MipModel, label: String) -> LinearRow {
        self.to_inequality().to_row(model, label, RowFamily::Cut)
    }
}

/// A generic `x_coefᵀx + Σ c_j z^j ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub x_coef: Vec<f64>,
    pub z_terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Inequality {
    pub fn slack(&self, x: &[f64], z: &[f64]) -> f64 {
        dot(&self.x_coef, x) + self.z_terms.iter().map(|&(j, c)| c * z[j]).sum::<f64>() - self.rhs
    }

    pub fn to_row(&self, model: &MipModel, label: String, family: RowFamily) -> LinearRow {
        let idx = &model.index;
        let mut terms: Vec<(usize, f64)> = self
            .x_coef
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(l, &c)| (idx.x(l), c))
            .collect();
        terms.extend(
            self.z_terms
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|&(j, c)| (idx.z(j), c)),
        );
        LinearRow {
            terms,
            sense: Sense::Ge,
            rhs: self.rhs,
            label,
            family,
        }
    }
}

/// `μᵀx + (h̄^i − threshold) z^i ≥ h̄^i`.
pub fn base_inequality(profile: &SortedBaseProfile, i: usize) -> Result<MixingCut> {
    let position = profile
        .position(i)
        .ok_or_else(|| Error::InvalidInstance(format!("scenario {i} not in profile")))?;
    if position >= profile.k {
        return Err(Error::RedundantIndex {
            index: i,
            position,
            k: profile.k,
        });
    }
    Ok(profile.cut_from_positions(&[position]))
}

/// The quantile row `μ_p^iᵀx ≥ q_p^i` and the relaxed base inequality
/// `μ_p^iᵀx + (bᵀξ_p^i + d_p) + (−bᵀξ_p^i − d_p − q_p^i) z^i ≥ 0`.
pub fn strengthened_base_pair(
    i: usize,
    p: usize,
    qt: &QuantileTable,
    inst: &Instance,
) -> (Inequality, Inequality) {
    let row = inst.row(i, p);
    let q = qt.q(i, p);
    let quantile = Inequality {
        x_coef: row.coef.clone(),
        z_terms: Vec::new(),
        rhs: q,
    };
    let relaxed = Inequality {
        x_coef: row.coef.clone(),
        z_terms: vec![(i, -row.constant - q)],
        rhs: -row.constant,
    };
    (quantile, relaxed)
}

/// Work counters for one separation call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SeparationWork {
    pub comparisons: usize,
    pub scan_steps: usize,
}

impl SeparationWork {
    pub fn total(&self) -> usize {
        self.comparisons + self.scan_steps
    }
}

/// Most violated mixing cut at `(x*, z*)`, if its violation exceeds `tol`.
///
/// Scanning the top `k` positions in sorted order, an index joins `J` exactly
/// when its `z*` is below every `z*` already in `J`. This maximizes
/// `Σ (h̄^{j_i} − h̄^{j_{i+1}})(1 − z*^{j_i})`, and the violation equals
/// `threshold − μᵀx* + that sum`.
pub fn separate(
    profile: &SortedBaseProfile,
    x_star: &[f64],
    z_star: &[f64],
    tol: f64,
) -> Option<MixingCut> {
    separate_counted(profile, x_star, z_star, tol).0
}

pub fn separate_counted(
    profile: &SortedBaseProfile,
    x_star: &[f64],
    z_star: &[f64],
    tol: f64,
) -> (Option<MixingCut>, usize) {
    let mut positions = Vec::new();
    let mut running = f64::INFINITY;
    let mut steps = 0usize;
    for pos in 0..profile.k {
        steps += 1;
        let (j, h) = profile.h_sorted[pos];
        if h <= profile.threshold {
            break;
        }
        if z_star[j] < running {
            running = z_star[j];
            positions.push(pos);
        }
    }
    let cut = profile.cut_from_positions(&positions);
    let violated = cut.violation(x_star, z_star) > tol;
    (violated.then_some(cut), steps)
}

/// Sort `h` and separate in one pass, counting comparisons and scan steps.
pub fn separate_from_values(
    mu: Vec<f64>,
    h: &[f64],
    k: usize,
    x_star: &[f64],
    z_star: &[f64],
    tol: f64,
) -> Result<(Option<MixingCut>, SeparationWork)> {
    let (profile, comparisons) = SortedBaseProfile::counted(mu, h, k, None)?;
    let (cut, scan_steps) = separate_counted(&profile, x_star, z_star, tol);
    Ok((
        cut,
        SeparationWork {
            comparisons,
            scan_steps,
        },
    ))
}

/// Every mixing cut over subsets of the top `k` positions, including the
/// degenerate `μᵀx ≥ threshold` for the empty set.
pub fn enumerate_all_cuts(profile: &SortedBaseProfile) -> Result<Vec<MixingCut>> {
    let k = profile.k;
    if k > MAX_ENUMERATION_K {
        return Err(Error::TooManySubsets { k });
    }
    Ok((0u32..1 << k)
        .map(|mask| {
            let positions: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).collect();
            profile.cut_from_positions(&positions)
        })
        .collect())
}

/// Profiles for every recorded probe `(i, p)` of a quantile table whose top
/// `k + 1` values are finite.
pub fn probe_profiles(inst: &Instance, qt: &QuantileTable) -> Result<Vec<SortedBaseProfile>> {
    let mut out = Vec::new();
    for i in 0..inst.num_scenarios() {
        for p in 0..inst.num_rows() {
            if let Some(h) = qt.h_values(i, p) {
                let prof =
                    SortedBaseProfile::new(inst.row(i, p).coef.clone(), h, qt.k(), Some((i, p)))?;
                if prof.is_finite() {
                    out.push(prof);
                }
            }
        }
    }
    Ok(out)
}

/// Root cut source: separates every probe profile and deduplicates cuts by
/// `(probe, J)`.
#[derive(Debug, Clone)]
pub struct MixingSeparator {
    profiles: Vec<SortedBaseProfile>,
    pub tol: f64,
    seen: HashSet<(usize, Vec<usize>)>,
    pub cuts: Vec<MixingCut>,
}

impl MixingSeparator {
    pub fn new(profiles: Vec<SortedBaseProfile>) -> Self {
        Self {
            profiles,
            tol: DEFAULT_TOL,
            seen: HashSet::new(),
            cuts: Vec::new(),
        }
    }

    pub fn from_table(inst: &Instance, qt: &QuantileTable) -> Result<Self> {
        Ok(Self::new(probe_profiles(inst, qt)?))
    }

    pub fn num_profiles(&self) -> usize {
        self.profiles.len()
    }
}

impl CutSource for MixingSeparator {
    fn separate(&mut self, model: &MipModel, values: &[f64]) -> Vec<LinearRow> {
        let idx = &model.index;
        let x = &values[..idx.num_x];
        let z = &values[idx.z_range()];
        let mut rows = Vec::new();
        for (n, prof) in self.profiles.iter().enumerate() {
            if let Some(cut) = separate(prof, x, z, self.tol) {
                if self.seen.insert((n, cut.indices.clone())) {
                    let (i, p) = prof.probe.unwrap_or((n, 0));
                    let label = format!("mix_{i}_{p}_{}", self.cuts.len());
                    rows.push(cut.to_row(model, label));
                    self.cuts.push(cut);
                }
            }
        }
        rows
    }

    fn name(&self) -> &'static str {
        "mixing"
    }
}
