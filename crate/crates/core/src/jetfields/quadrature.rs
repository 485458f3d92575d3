use rayon::prelude::*;

use super::chart::Chart;
use super::form::{ValueSpace, ValuedForm};
use crate::error::{Error, Result};

/// Uniform sample counts per axis of a periodic chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadratureGrid {
    counts: Vec<usize>,
}

impl QuadratureGrid {
    pub fn new(counts: &[usize]) -> Result<Self> {
        if counts.iter().any(|&c| c < 2) {
            return Err(Error::GridTooSmall { min: 2 });
        }
        Ok(Self {
            counts: counts.to_vec(),
        })
    }

    pub fn uniform(n: usize, count: usize) -> Result<Self> {
        Self::new(&vec![count; n])
    }

    /// `4 K + 1` points per axis: integrands cubic in fields of bandwidth
    /// `K` are then integrated exactly.
    pub fn for_bandwidth(n: usize, max_frequency: usize) -> Self {
        Self::uniform(n, 4 * max_frequency.max(1) + 1).expect("count is at least 5")
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point with row-major index `idx` (last axis fastest).
    pub fn point(&self, chart: &Chart, mut idx: usize) -> Vec<f64> {
        let (lower, extent) = chart.extent();
        let n = self.counts.len();
        let mut x = vec![0.0; n];
        for a in (0..n).rev() {
            let c = self.counts[a];
            x[a] = lower[a] + extent[a] * (idx % c) as f64 / c as f64;
            idx /= c;
        }
        x
    }

    pub fn points(&self, chart: &Chart) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(chart, i)).collect()
    }
}

/// Sum by a balanced binary tree over the slice in index order, so the
/// result does not depend on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn check_grid(chart: &Chart, grid: &QuadratureGrid) -> Result<()> {
    if !chart.is_periodic() {
        return Err(Error::NonPeriodicChart);
    }
    if grid.counts.len() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            found: grid.counts.len(),
        });
    }
    Ok(())
}

/// Samples a function at every grid point, in index order.
pub fn sample_grid<T, F>(chart: &Chart, grid: &QuadratureGrid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync,
{
    check_grid(chart, grid)?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| f(&grid.point(chart, i)))
        .collect()
}

/// Rectangle rule for a scalar top-degree form on a periodic chart.
pub fn integrate_top(alpha: &ValuedForm, grid: &QuadratureGrid) -> Result<f64> {
    let chart = alpha.chart();
    if alpha.degree() != chart.dim() {
        return Err(Error::WrongDegree {
            expected: chart.dim(),
            found: alpha.degree(),
        });
    }
    if alpha.space() != ValueSpace::Scalar {
        return Err(Error::SpaceMismatch(format!(
            "integrand must be scalar, found {:?}",
            alpha.space()
        )));
    }
    let vals = sample_grid(chart, grid, |x| Ok(alpha.values(x)?.value(0, 0)))?;
    Ok(pairwise_sum(&vals) / grid.len() as f64 * chart.volume())
}

/// Rectangle-rule integral of `|α|` for a scalar top form.
pub fn integrate_abs(alpha: &ValuedForm, grid: &QuadratureGrid) -> Result<f64> {
    let chart = alpha.chart();
    if alpha.degree() != chart.dim() || alpha.space() != ValueSpace::Scalar {
        return Err(Error::WrongDegree {
            expected: chart.dim(),
            found: alpha.degree(),
        });
    }
    let vals = sample_grid(chart, grid, |x| Ok(alpha.values(x)?.value(0, 0).abs()))?;
    Ok(pairwise_sum(&vals) / grid.len() as f64 * chart.volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_small_cases() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0, 4.0, 5.0]), 15.0);
    }

    #[test]
    fn grid_points_are_row_major() {
        let chart = Chart::periodic(&[1.0, 2.0]).unwrap();
        let g = QuadratureGrid::new(&[2, 4]).unwrap();
        assert_eq!(g.point(&chart, 0), vec![0.0, 0.0]);
        assert_eq!(g.point(&chart, 1), vec![0.0, 0.5]);
        assert_eq!(g.point(&chart, 5), vec![0.5, 0.5]);
    }

    #[test]
    fn grid_rejects_small_counts() {
        assert!(QuadratureGrid::new(&[1, 3]).is_err());
        assert_eq!(QuadratureGrid::for_bandwidth(3, 2).counts(), &[9, 9, 9]);
    }
}
