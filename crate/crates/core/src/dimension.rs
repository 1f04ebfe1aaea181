//! Box-size schedules, log-log regression and the end-to-end estimator.

use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::boxcover::{trial_box_counts, TrialStatistics};
use crate::error::{Error, Result};
use crate::graph::{largest_component, Graph};
use crate::metric::{
    distinct_distances, DistanceMatrix, MetricGraph, MetricKind, DEFAULT_MATRIX_CAP,
};

pub const DEFAULT_MAX_POINTS: usize = 15;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

/// Minimum number of points for a regression.
const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    AllDistinct,
    LogSnapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSizeSchedule {
    pub kind: MetricKind,
    pub values: Vec<u64>,
    pub selection: SelectionMode,
}

/// Chooses box sizes between the smallest distance and the diameter.
///
/// With at most `max_points` distinct distances all are used. Otherwise
/// `max_points` log-spaced targets are snapped to the nearest distinct
/// distance (in log space) and deduplicated; the smallest distance and the
/// diameter are always kept.
pub fn build_schedule(dm: &DistanceMatrix, max_points: usize) -> Result<BoxSizeSchedule> {
    if max_points < MIN_POINTS {
        return Err(Error::InvalidArgument(format!(
            "max_points must be at least {MIN_POINTS}, got {max_points}"
        )));
    }
    let distinct = distinct_distances(dm);
    if distinct.len() < MIN_POINTS {
        return Err(Error::DegenerateScalingRange {
            found: distinct.len(),
        });
    }
    if distinct.len() <= max_points {
        return Ok(BoxSizeSchedule {
            kind: dm.kind(),
            values: distinct,
            selection: SelectionMode::AllDistinct,
        });
    }
    let lo = (distinct[0] as f64).ln();
    let hi = (*distinct.last().unwrap() as f64).ln();
    let mut values = Vec::with_capacity(max_points);
    for k in 0..max_points {
        let target = lo + (hi - lo) * k as f64 / (max_points - 1) as f64;
        let snapped = snap_log(&distinct, target);
        if values.last() != Some(&snapped) {
            values.push(snapped);
        }
    }
    values[0] = distinct[0];
    *values.last_mut().unwrap() = *distinct.last().unwrap();
    values.dedup();
    if values.len() < MIN_POINTS {
        return Err(Error::DegenerateScalingRange {
            found: values.len(),
        });
    }
    Ok(BoxSizeSchedule {
        kind: dm.kind(),
        values,
        selection: SelectionMode::LogSnapped,
    })
}

/// Nearest entry of the sorted `values` to `exp(log_target)`, measured in
/// log space. Ties go to the smaller value.
fn snap_log(values: &[u64], log_target: f64) -> u64 {
    let idx = values.partition_point(|&v| (v as f64).ln() < log_target);
    if idx == 0 {
        return values[0];
    }
    if idx == values.len() {
        return values[values.len() - 1];
    }
    let below = values[idx - 1];
    let above = values[idx];
    if log_target - (below as f64).ln() <= (above as f64).ln() - log_target {
        below
    } else {
        above
    }
}

/// Ordinary least squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
}

/// Fits a line by least squares. Needs at least 3 points with distinct x.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < MIN_POINTS {
        return Err(Error::TooFewPoints { found: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    // a constant series is fitted exactly by a flat line
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let slope_stderr = (ss_res / (nf - 2.0) / sxx).sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
    })
}

fn in_range(l: f64, fit_range: Option<(f64, f64)>) -> bool {
    fit_range.is_none_or(|(lo, hi)| lo <= l && l <= hi)
}

/// Log-log fit of mean box counts against box sizes, restricted to
/// `fit_range` (inclusive) when given. Returns the fit and the number of
/// points used.
pub fn fit_mean_series(
    box_sizes: &[f64],
    means: &[f64],
    fit_range: Option<(f64, f64)>,
) -> Result<(LinearFit, usize)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&l, &mean) in box_sizes.iter().zip(means) {
        if !in_range(l, fit_range) {
            continue;
        }
        if mean <= 0.0 {
            return Err(Error::NonPositiveMean {
                box_size: l,
                value: mean,
            });
        }
        xs.push(l.ln());
        ys.push(mean.ln());
    }
    let fit = fit_line(&xs, &ys)?;
    Ok((fit, xs.len()))
}

/// Box-count statistics across a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    pub kind: MetricKind,
    pub node_count: usize,
    pub edge_count: usize,
    pub points: Vec<TrialStatistics>,
    /// Raw counts, `[trial][point]`.
    pub trial_counts: Vec<Vec<u32>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    #[serde(rename = "l_B")]
    box_size: u64,
    #[serde(rename = "mean_NB")]
    mean: f64,
    #[serde(rename = "std_NB")]
    std: f64,
    #[serde(rename = "min_NB")]
    min: u32,
    #[serde(rename = "max_NB")]
    max: u32,
}

/// One parsed CSV row: `(l_B, mean_NB, std_NB, min_NB, max_NB)`.
pub type ScalingRow = (u64, f64, f64, u32, u32);

impl ScalingSeries {
    /// Runs the randomized coverings for every size in `schedule`.
    pub fn measure(
        dm: &DistanceMatrix,
        schedule: &BoxSizeSchedule,
        edge_count: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let trial_counts = trial_box_counts(dm, &schedule.values, trials, seed);
        let points = schedule
            .values
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                let column: Vec<u32> = trial_counts.iter().map(|row| row[k]).collect();
                TrialStatistics::from_counts(l, &column)
            })
            .collect();
        Ok(ScalingSeries {
            kind: dm.kind(),
            node_count: dm.node_count(),
            edge_count,
            points,
            trial_counts,
        })
    }

    pub fn box_sizes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.box_size as f64).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }

    /// Writes `l_B,mean_NB,std_NB,min_NB,max_NB` with full float precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(CsvRow {
                box_size: p.box_size,
                mean: p.mean,
                std: p.std,
                min: p.min,
                max: p.max,
            })
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses a CSV written by [`ScalingSeries::write_csv`].
pub fn read_scaling_csv<R: Read>(input: R) -> Result<Vec<ScalingRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(csv_error)?;
            Ok((row.box_size, row.mean, row.std, row.min, row.max))
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub method: MetricKind,
    /// Negated slope of the fit over mean box counts.
    pub dimension: f64,
    /// Population std of per-trial fitted dimensions.
    pub dimension_std: f64,
    /// Mean of per-trial fitted dimensions.
    pub trial_mean_dimension: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fits the scaling law to `series`, optionally restricted to box sizes in
/// `fit_range` (inclusive).
pub fn estimate_dimension(
    series: &ScalingSeries,
    fit_range: Option<(f64, f64)>,
) -> Result<DimensionEstimate> {
    let sizes = series.box_sizes();
    let (fit, points_used) = fit_mean_series(&sizes, &series.means(), fit_range)?;

    let selected: Vec<usize> = (0..sizes.len())
        .filter(|&k| in_range(sizes[k], fit_range))
        .collect();
    let xs: Vec<f64> = selected.iter().map(|&k| sizes[k].ln()).collect();
    let per_trial = series
        .trial_counts
        .iter()
        .map(|row| {
            let ys: Vec<f64> = selected.iter().map(|&k| f64::from(row[k]).ln()).collect();
            fit_line(&xs, &ys).map(|f| -f.slope)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (trial_mean_dimension, dimension_std) = mean_and_std(&per_trial);

    Ok(DimensionEstimate {
        method: series.kind,
        dimension: -fit.slope,
        dimension_std,
        trial_mean_dimension,
        slope_stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        points_used,
    })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub method: MetricKind,
    pub trials: usize,
    pub seed: u64,
    pub max_points: usize,
    pub fit_range: Option<(f64, f64)>,
    pub matrix_cap: u64,
}

impl AnalysisConfig {
    pub fn new(method: MetricKind) -> Self {
        AnalysisConfig {
            method,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            max_points: DEFAULT_MAX_POINTS,
            fit_range: None,
            matrix_cap: DEFAULT_MATRIX_CAP,
        }
    }
}

/// Everything produced by one run of the pipeline.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub discarded_nodes: usize,
    pub diameter: u64,
    pub schedule: BoxSizeSchedule,
    pub series: ScalingSeries,
    pub estimate: DimensionEstimate,
}

/// Largest component, distances, schedule, trials, regression.
pub fn analyze(g: &Graph, config: &AnalysisConfig) -> Result<Analysis> {
    let (component, discarded) = largest_component(g)?;
    if discarded > 0 {
        warn!(
            "input is disconnected; analyzing the largest component ({} nodes, {} discarded)",
            component.node_count(),
            discarded
        );
    }
    let mut analysis = analyze_connected(&component, config)?;
    analysis.discarded_nodes = discarded;
    Ok(analysis)
}

/// [`analyze`] for a graph already known to be connected.
pub fn analyze_connected(g: &Graph, config: &AnalysisConfig) -> Result<Analysis> {
    if g.edge_count() == 0 {
        return Err(Error::DegenerateScalingRange { found: 0 });
    }
    let dm = MetricGraph::new(g, config.method)?.all_pairs_capped(config.matrix_cap)?;
    let schedule = build_schedule(&dm, config.max_points)?;
    let series =
        ScalingSeries::measure(&dm, &schedule, g.edge_count(), config.trials, config.seed)?;
    let estimate = estimate_dimension(&series, config.fit_range)?;
    Ok(Analysis {
        discarded_nodes: 0,
        diameter: dm.diameter(),
        schedule,
        series,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::all_pairs;

    fn example() -> Graph {
        Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap()
    }

    fn synthetic(sizes: &[u64], f: impl Fn(f64) -> f64) -> ScalingSeries {
        let points = sizes
            .iter()
            .map(|&l| TrialStatistics {
                box_size: l,
                trials: 1,
                mean: f(l as f64),
                std: 0.0,
                min: 0,
                max: 0,
            })
            .collect();
        ScalingSeries {
            kind: MetricKind::Hop,
            node_count: 0,
            edge_count: 0,
            points,
            trial_counts: Vec::new(),
        }
    }

    #[test]
    fn exact_power_law() {
        let s = synthetic(&[1, 2, 4, 8], |l| 64.0 * l.powi(-2));
        let e = estimate_dimension(&s, None).unwrap();
        assert!((e.dimension - 2.0).abs() < 1e-9);
        assert!((e.r_squared - 1.0).abs() < 1e-12);
        assert!(e.slope_stderr < 1e-9);
        assert_eq!(e.points_used, 4);
    }

    #[test]
    fn constant_series_has_zero_dimension() {
        let s = synthetic(&[1, 2, 3, 5], |_| 5.0);
        let e = estimate_dimension(&s, None).unwrap();
        assert_eq!(e.dimension, 0.0);
        assert_eq!(e.r_squared, 1.0);
    }

    #[test]
    fn fit_range_and_errors() {
        let s = synthetic(&[1, 2, 4, 8, 16], |l| 100.0 / l);
        let e = estimate_dimension(&s, Some((2.0, 8.0))).unwrap();
        assert_eq!(e.points_used, 3);
        assert!((e.dimension - 1.0).abs() < 1e-12);
        assert!(matches!(
            estimate_dimension(&s, Some((2.0, 4.0))),
            Err(Error::TooFewPoints { found: 2 })
        ));
        let bad = synthetic(&[1, 2, 4], |l| if l > 3.0 { 0.0 } else { 1.0 });
        assert!(matches!(
            estimate_dimension(&bad, None),
            Err(Error::NonPositiveMean { .. })
        ));
    }

    #[test]
    fn example_schedule() {
        let dm = all_pairs(&example(), MetricKind::Repulsion).unwrap();
        let s = build_schedule(&dm, 15).unwrap();
        assert_eq!(s.values, vec![2, 4, 6, 10, 12, 16, 18]);
        assert_eq!(s.selection, SelectionMode::AllDistinct);
        let hop = all_pairs(&example(), MetricKind::Hop).unwrap();
        assert_eq!(build_schedule(&hop, 15).unwrap().values, vec![1, 2, 3, 4]);
    }

    #[test]
    fn log_snapped_schedule() {
        // path graph: hop distances are 1..=200
        let g = Graph::from_edges(201, (0..200).map(|i| (i, i + 1))).unwrap();
        let dm = all_pairs(&g, MetricKind::Hop).unwrap();
        let s = build_schedule(&dm, 12).unwrap();
        assert_eq!(s.selection, SelectionMode::LogSnapped);
        assert!(s.values.len() <= 12 && s.values.len() >= 3);
        assert_eq!(s.values[0], 1);
        assert_eq!(*s.values.last().unwrap(), 200);
        assert!(s.values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn snapping_uses_log_distance() {
        let values = [1, 10, 100];
        assert_eq!(snap_log(&values, 3.0f64.ln()), 1);
        assert_eq!(snap_log(&values, 4.0f64.ln()), 10);
        assert_eq!(snap_log(&values, 1000.0f64.ln()), 100);
        assert_eq!(snap_log(&values, 0.5f64.ln()), 1);
    }

    #[test]
    fn triangle_is_degenerate() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        for method in [MetricKind::Hop, MetricKind::Repulsion] {
            let r = analyze(&g, &AnalysisConfig::new(method));
            assert!(matches!(r, Err(Error::DegenerateScalingRange { found: 1 })));
        }
    }

    #[test]
    fn example_analysis_is_reproducible() {
        let mut cfg = AnalysisConfig::new(MetricKind::Repulsion);
        cfg.trials = 50;
        let a = analyze(&example(), &cfg).unwrap();
        let b = analyze(&example(), &cfg).unwrap();
        assert_eq!(a.series, b.series);
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.series.points[0].mean, 6.0);
        assert!((2.0..=3.0).contains(&a.series.points[3].mean));
        assert_eq!(a.estimate.points_used, 7);
    }

    #[test]
    fn csv_round_trip() {
        let mut cfg = AnalysisConfig::new(MetricKind::Hop);
        cfg.trials = 20;
        let a = analyze(&crate::netgen::karate_fixture(), &cfg).unwrap();
        let mut buf = Vec::new();
        a.series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("l_B,mean_NB,std_NB,min_NB,max_NB\n"));
        let rows = read_scaling_csv(buf.as_slice()).unwrap();
        let sizes: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
        let means: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let (fit, _) = fit_mean_series(&sizes, &means, None).unwrap();
        assert_eq!(-fit.slope, a.estimate.dimension);
    }
}
