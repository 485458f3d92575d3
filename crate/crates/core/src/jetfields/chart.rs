use super::jet::MAX_DIM;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ChartKind {
    Periodic { periods: Vec<f64> },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

/// An axis-aligned coordinate chart: a torus of given periods or a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    kind: ChartKind,
}

impl Chart {
    pub fn periodic(periods: &[f64]) -> Result<Self> {
        check_dim(periods.len())?;
        if periods.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidChart("periods must be positive".into()));
        }
        Ok(Self {
            kind: ChartKind::Periodic {
                periods: periods.to_vec(),
            },
        })
    }

    pub fn unit_torus(n: usize) -> Self {
        Self::periodic(&vec![1.0; n]).expect("unit torus dimension within 1..=4")
    }

    pub fn boxed(lower: &[f64], upper: &[f64]) -> Result<Self> {
        check_dim(lower.len())?;
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(upper).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidChart("box extents must be positive".into()));
        }
        Ok(Self {
            kind: ChartKind::Box {
                lower: lower.to_vec(),
                upper: upper.to_vec(),
            },
        })
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ChartKind::Periodic { periods } => periods.len(),
            ChartKind::Box { lower, .. } => lower.len(),
        }
    }

    pub fn periods(&self) -> Option<&[f64]> {
        match &self.kind {
            ChartKind::Periodic { periods } => Some(periods),
            ChartKind::Box { .. } => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.periods().is_some()
    }

    /// Lower corner and extent of the fundamental domain.
    pub fn extent(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            ChartKind::Periodic { periods } => (vec![0.0; periods.len()], periods.clone()),
            ChartKind::Box { lower, upper } => (
                lower.clone(),
                upper.iter().zip(lower).map(|(u, l)| u - l).collect(),
            ),
        }
    }

    pub fn volume(&self) -> f64 {
        self.extent().1.iter().product()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidChart(format!(
            "dimension must be in 1..={MAX_DIM}, found {n}"
        )));
    }
    Ok(())
}
