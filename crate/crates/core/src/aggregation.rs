//! Chronological time-period aggregation.
//!
//! A high-resolution trace of `N'` points is reduced to `N` contiguous
//! clusters by repeatedly merging the pair of *adjacent* clusters with the
//! smallest Ward dissimilarity
//!
//! ```text
//! D(I, J) = 2 * N_I * N_J / (N_I + N_J) * ||x̄_I - x̄_J||²
//! ```
//!
//! Distances are recomputed from the cluster centroids after every merge.
//! Ties are broken towards the pair with the smallest left index.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances are snapped to this grid before comparison so that ties are
/// resolved identically on every platform.
const TIE_GRID: f64 = 1e-12;

/// A uniformly sampled demand and renewable capacity-factor trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiResSeries {
    pub step_minutes: u32,
    pub demand: Vec<f64>,
    pub wind_cf: Vec<f64>,
    pub solar_cf: Vec<f64>,
    /// Hours from midnight of the first sample.
    #[serde(default)]
    pub start_offset_hours: f64,
}

impl HiResSeries {
    pub fn new(
        step_minutes: u32,
        demand: Vec<f64>,
        wind_cf: Vec<f64>,
        solar_cf: Vec<f64>,
    ) -> Result<Self> {
        let series = HiResSeries {
            step_minutes,
            demand,
            wind_cf,
            solar_cf,
            start_offset_hours: 0.0,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_minutes == 0 {
            return Err(Error::invalid("step_minutes must be positive"));
        }
        let n = self.demand.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for other in [&self.wind_cf, &self.solar_cf] {
            if other.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: other.len(),
                });
            }
        }
        if let Some((i, v)) = self
            .demand
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(format!("demand[{i}] = {v} must be finite and >= 0")));
        }
        for (name, cf) in [("wind_cf", &self.wind_cf), ("solar_cf", &self.solar_cf)] {
            if let Some((i, v)) = cf
                .iter()
                .enumerate()
                .find(|(_, v)| !(0.0..=1.0).contains(*v))
            {
                return Err(Error::invalid(format!("{name}[{i}] = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty()
    }

    pub fn step_hours(&self) -> f64 {
        f64::from(self.step_minutes) / 60.0
    }

    pub fn horizon_minutes(&self) -> u64 {
        u64::from(self.step_minutes) * self.len() as u64
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_minutes() as f64 / 60.0
    }

    /// Number of samples in one hour, if the step divides an hour.
    pub fn points_per_hour(&self) -> Option<usize> {
        (60 % self.step_minutes == 0).then(|| (60 / self.step_minutes) as usize)
    }

    /// Sub-series over `range`; the start offset is advanced accordingly.
    pub fn slice(&self, range: Range<usize>) -> Result<HiResSeries> {
        if range.end > self.len() || range.start >= range.end {
            return Err(Error::invalid(format!(
                "slice {range:?} outside series of length {}",
                self.len()
            )));
        }
        let offset = self.start_offset_hours + range.start as f64 * self.step_hours();
        Ok(HiResSeries {
            step_minutes: self.step_minutes,
            demand: self.demand[range.clone()].to_vec(),
            wind_cf: self.wind_cf[range.clone()].to_vec(),
            solar_cf: self.solar_cf[range].to_vec(),
            start_offset_hours: offset.rem_euclid(24.0),
        })
    }

    /// Demand minus available renewable production, in MW.
    pub fn net_demand(&self, capacity: RenewableCapacity) -> Vec<f64> {
        self.demand
            .iter()
            .zip(&self.wind_cf)
            .zip(&self.solar_cf)
            .map(|((d, w), s)| d - w * capacity.wind_mw - s * capacity.solar_mw)
            .collect()
    }
}

/// Installed wind and solar capacity used to turn capacity factors into MW.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RenewableCapacity {
    pub wind_mw: f64,
    pub solar_mw: f64,
}

/// Which time-dependent parameters drive the clustering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSelector {
    /// One feature: net demand (or plain demand when no capacities are known).
    #[default]
    NetDemandOnly,
    /// Three features: demand, wind and solar capacity factors.
    DemandWindSolar,
}

/// Row-major matrix of min-max normalised feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    constant_columns: Vec<bool>,
}

impl FeatureMatrix {
    /// Normalises each column of `columns` to `[0, 1]`. A constant column is
    /// mapped to zeros and flagged.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::invalid("at least one feature column is required"));
        }
        let rows = columns[0].len();
        if rows == 0 {
            return Err(Error::EmptyInput);
        }
        let mut values = vec![0.0; rows * cols];
        let mut constant_columns = vec![false; cols];
        for (c, column) in columns.iter().enumerate() {
            if column.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: column.len(),
                });
            }
            if column.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("feature column {c}")));
            }
            let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            if span <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
                constant_columns[c] = true;
                continue;
            }
            for (r, v) in column.iter().enumerate() {
                values[r * cols + c] = (v - lo) / span;
            }
        }
        Ok(FeatureMatrix {
            rows,
            cols,
            values,
            constant_columns,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn constant_columns(&self) -> &[bool] {
        &self.constant_columns
    }

    pub fn has_constant_column(&self) -> bool {
        self.constant_columns.iter().any(|c| *c)
    }
}

/// Builds the clustering features for `series`.
///
/// In net-demand mode the capacities, when given, convert capacity factors
/// into MW before subtracting them from demand; without capacities the
/// demand alone is used.
pub fn normalize_features(
    series: &HiResSeries,
    selector: FeatureSelector,
    capacity: Option<RenewableCapacity>,
) -> Result<FeatureMatrix> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    match selector {
        FeatureSelector::NetDemandOnly => {
            let column = match capacity {
                Some(cap) => series.net_demand(cap),
                None => series.demand.clone(),
            };
            FeatureMatrix::from_columns(&[column])
        }
        FeatureSelector::DemandWindSolar => FeatureMatrix::from_columns(&[
            series.demand.clone(),
            series.wind_cf.clone(),
            series.solar_cf.clone(),
        ]),
    }
}

/// Ward dissimilarity between two clusters given their sizes and centroids.
pub fn ward_distance(
    size_i: usize,
    size_j: usize,
    centroid_i: &[f64],
    centroid_j: &[f64],
) -> Result<f64> {
    if centroid_i.len() != centroid_j.len() {
        return Err(Error::DimensionMismatch {
            expected: centroid_i.len(),
            actual: centroid_j.len(),
        });
    }
    if size_i == 0 || size_j == 0 {
        return Err(Error::invalid("cluster sizes must be at least 1"));
    }
    let (ni, nj) = (size_i as f64, size_j as f64);
    let sq: f64 = centroid_i
        .iter()
        .zip(centroid_j)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(2.0 * ni * nj / (ni + nj) * sq)
}

/// One step of the agglomeration: the cluster starting at `left_start` was
/// merged with its right neighbour at Ward distance `distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub left_start: usize,
    pub distance: f64,
}

/// Ordered contiguous partition of a horizon into low-resolution periods.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    bounds: Vec<Range<usize>>,
    step_minutes: u32,
    centroids: Vec<Vec<f64>>,
    merges: Vec<MergeStep>,
}

impl TimeGrid {
    /// Grid from explicit half-open index ranges. Ranges must be non-empty,
    /// ordered and contiguous starting at 0.
    pub fn from_bounds(
        bounds: Vec<Range<usize>>,
        step_minutes: u32,
        features: Option<&FeatureMatrix>,
    ) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::EmptyInput);
        }
        if step_minutes == 0 {
            return Err(Error::invalid("step_minutes must be positive"));
        }
        let mut next = 0;
        for r in &bounds {
            if r.start != next || r.end <= r.start {
                return Err(Error::invalid(format!(
                    "grid ranges must be contiguous and non-empty, found {r:?} after {next}"
                )));
            }
            next = r.end;
        }
        if let Some(f) = features {
            if f.rows() != next {
                return Err(Error::DimensionMismatch {
                    expected: next,
                    actual: f.rows(),
                });
            }
        }
        let centroids = match features {
            Some(f) => bounds.iter().map(|r| centroid(f, r.clone())).collect(),
            None => Vec::new(),
        };
        Ok(TimeGrid {
            bounds,
            step_minutes,
            centroids,
            merges: Vec::new(),
        })
    }

    /// Uniform grid with `per_period` samples in each period.
    pub fn uniform(n_points: usize, per_period: usize, step_minutes: u32) -> Result<Self> {
        if per_period == 0 || n_points == 0 || n_points % per_period != 0 {
            return Err(Error::invalid(format!(
                "{n_points} points cannot be split evenly into periods of {per_period}"
            )));
        }
        let bounds = (0..n_points / per_period)
            .map(|k| k * per_period..(k + 1) * per_period)
            .collect();
        Self::from_bounds(bounds, step_minutes, None)
    }

    /// Conventional hourly grid over `n_points` samples.
    pub fn hourly(n_points: usize, step_minutes: u32) -> Result<Self> {
        if step_minutes == 0 || 60 % step_minutes != 0 {
            return Err(Error::invalid(format!(
                "a {step_minutes}-minute step does not divide an hour"
            )));
        }
        Self::uniform(n_points, (60 / step_minutes) as usize, step_minutes)
    }

    /// Appends `other`, shifting its indices past the end of `self`.
    pub fn concat(&self, other: &TimeGrid) -> Result<TimeGrid> {
        if self.step_minutes != other.step_minutes {
            return Err(Error::invalid("cannot concatenate grids with different steps"));
        }
        let offset = self.n_points();
        let mut bounds = self.bounds.clone();
        bounds.extend(other.bounds.iter().map(|r| r.start + offset..r.end + offset));
        let centroids = if self.centroids.is_empty() || other.centroids.is_empty() {
            Vec::new()
        } else {
            self.centroids.iter().chain(&other.centroids).cloned().collect()
        };
        Ok(TimeGrid {
            bounds,
            step_minutes: self.step_minutes,
            centroids,
            merges: Vec::new(),
        })
    }

    pub fn n_periods(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_points(&self) -> usize {
        self.bounds.last().map_or(0, |r| r.end)
    }

    pub fn step_minutes(&self) -> u32 {
        self.step_minutes
    }

    pub fn bounds(&self) -> &[Range<usize>] {
        &self.bounds
    }

    /// Member counts per period.
    pub fn sizes(&self) -> Vec<usize> {
        self.bounds.iter().map(|r| r.len()).collect()
    }

    /// Exact period lengths in minutes.
    pub fn duration_minutes(&self) -> Vec<u64> {
        self.bounds
            .iter()
            .map(|r| r.len() as u64 * u64::from(self.step_minutes))
            .collect()
    }

    /// Period durations `d_t` in hours.
    pub fn durations(&self) -> Vec<f64> {
        self.duration_minutes()
            .into_iter()
            .map(|m| m as f64 / 60.0)
            .collect()
    }

    pub fn horizon_minutes(&self) -> u64 {
        self.n_points() as u64 * u64::from(self.step_minutes)
    }

    /// Normalised centroids per period (empty when built without features).
    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    /// Merge history, in order, when the grid came from [`cluster_adjacent`].
    pub fn merges(&self) -> &[MergeStep] {
        &self.merges
    }

    /// Index of the period containing high-resolution sample `index`.
    pub fn period_of(&self, index: usize) -> Option<usize> {
        if index >= self.n_points() {
            return None;
        }
        Some(self.bounds.partition_point(|r| r.end <= index))
    }
}

fn centroid(features: &FeatureMatrix, range: Range<usize>) -> Vec<f64> {
    let mut sum = vec![0.0; features.cols()];
    let n = range.len() as f64;
    for i in range {
        for (s, v) in sum.iter_mut().zip(features.row(i)) {
            *s += v;
        }
    }
    sum.iter().map(|s| s / n).collect()
}

struct Cluster {
    start: usize,
    len: usize,
    sum: Vec<f64>,
}

impl Cluster {
    fn centroid(&self) -> Vec<f64> {
        let n = self.len as f64;
        self.sum.iter().map(|s| s / n).collect()
    }
}

/// Greedy adjacency-constrained Ward agglomeration down to `target_n`
/// clusters.
pub fn cluster_adjacent(
    features: &FeatureMatrix,
    target_n: usize,
    step_minutes: u32,
) -> Result<TimeGrid> {
    let n = features.rows();
    if target_n == 0 {
        return Err(Error::invalid("target number of periods must be at least 1"));
    }
    if target_n > n {
        return Err(Error::invalid(format!(
            "cannot form {target_n} periods from {n} samples"
        )));
    }
    let mut clusters: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            start: i,
            len: 1,
            sum: features.row(i).to_vec(),
        })
        .collect();
    let mut merges = Vec::with_capacity(n - target_n);

    while clusters.len() > target_n {
        let centroids: Vec<Vec<f64>> = clusters.iter().map(Cluster::centroid).collect();
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..clusters.len() - 1 {
            let d = ward_distance(
                clusters[k].len,
                clusters[k + 1].len,
                &centroids[k],
                &centroids[k + 1],
            )?;
            let key = (d / TIE_GRID).round() * TIE_GRID;
            if best.is_none_or(|(_, b, _)| key < b) {
                best = Some((k, key, d));
            }
        }
        let (k, _, distance) = best.expect("at least two clusters remain");
        merges.push(MergeStep {
            left_start: clusters[k].start,
            distance,
        });
        let right = clusters.remove(k + 1);
        let left = &mut clusters[k];
        left.len += right.len;
        for (s, r) in left.sum.iter_mut().zip(&right.sum) {
            *s += r;
        }
    }

    let bounds = clusters.iter().map(|c| c.start..c.start + c.len).collect();
    let centroids = clusters.iter().map(Cluster::centroid).collect();
    Ok(TimeGrid {
        bounds,
        step_minutes,
        centroids,
        merges,
    })
}

/// Low-resolution data for one scheduling period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub duration_h: f64,
    pub demand_mw: f64,
    pub wind_cf: f64,
    pub solar_cf: f64,
}

/// Averages the series over each period of `grid`.
pub fn reduce_series(series: &HiResSeries, grid: &TimeGrid) -> Result<Vec<PeriodRecord>> {
    if grid.n_points() != series.len() {
        return Err(Error::DimensionMismatch {
            expected: series.len(),
            actual: grid.n_points(),
        });
    }
    if grid.step_minutes() != series.step_minutes {
        return Err(Error::invalid(format!(
            "grid step {} min does not match series step {} min",
            grid.step_minutes(),
            series.step_minutes
        )));
    }
    let mean = |v: &[f64], r: &Range<usize>| v[r.clone()].iter().sum::<f64>() / r.len() as f64;
    Ok(grid
        .bounds()
        .iter()
        .zip(grid.durations())
        .map(|(r, duration_h)| PeriodRecord {
            duration_h,
            demand_mw: mean(&series.demand, r),
            wind_cf: mean(&series.wind_cf, r),
            solar_cf: mean(&series.solar_cf, r),
        })
        .collect())
}

/// Identity reduction: one period per high-resolution sample.
pub fn high_resolution_records(series: &HiResSeries) -> Vec<PeriodRecord> {
    let d = series.step_hours();
    (0..series.len())
        .map(|i| PeriodRecord {
            duration_h: d,
            demand_mw: series.demand[i],
            wind_cf: series.wind_cf[i],
            solar_cf: series.solar_cf[i],
        })
        .collect()
}
