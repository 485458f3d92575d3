//! Scalar 2-jets: value, gradient and symmetric Hessian at a point.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::chart::Chart;
use crate::error::{Error, Result};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 4;

/// A truncated Taylor jet of a scalar function at one point.
///
/// Which slots are meaningful is decided by the caller through the `order`
/// argument of every operation: `0` uses only the value, `1` adds the
/// gradient, `2` adds the Hessian. Slots above the active order are left
/// untouched and must not be read.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            ..Self::default()
        }
    }

    /// `self += c · other`.
    #[inline]
    pub fn add_scaled(&mut self, other: &Jet, c: f64, n: usize, order: u8) {
        self.value += c * other.value;
        if order >= 1 {
            for i in 0..n {
                self.grad[i] += c * other.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    self.hess[i][j] += c * other.hess[i][j];
                }
            }
        }
    }

    /// `self += c · a · b` with the product rule applied to every active slot.
    #[inline]
    pub fn add_product(&mut self, a: &Jet, b: &Jet, c: f64, n: usize, order: u8) {
        self.value += c * a.value * b.value;
        if order >= 1 {
            for i in 0..n {
                self.grad[i] += c * (a.value * b.grad[i] + a.grad[i] * b.value);
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    self.hess[i][j] += c
                        * (a.value * b.hess[i][j]
                            + b.value * a.hess[i][j]
                            + a.grad[i] * b.grad[j]
                            + a.grad[j] * b.grad[i]);
                }
            }
        }
    }

    pub fn product(a: &Jet, b: &Jet, n: usize, order: u8) -> Jet {
        let mut out = Jet::default();
        out.add_product(a, b, 1.0, n, order);
        out
    }

    pub fn scaled(&self, c: f64, n: usize, order: u8) -> Jet {
        let mut out = Jet::default();
        out.add_scaled(self, c, n, order);
        out
    }

    /// Jet of `∂_axis f` at order `order`, read from a jet of `f` that is
    /// valid at order `order + 1`.
    #[inline]
    pub fn partial(&self, axis: usize, n: usize, order: u8) -> Jet {
        debug_assert!(order <= 1);
        let mut out = Jet::constant(self.grad[axis]);
        if order >= 1 {
            for j in 0..n {
                out.grad[j] = self.hess[axis][j];
            }
        }
        out
    }

    /// Largest magnitude among the active slots.
    pub fn max_abs(&self, n: usize, order: u8) -> f64 {
        let mut m = self.value.abs();
        if order >= 1 {
            for i in 0..n {
                m = m.max(self.grad[i].abs());
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    m = m.max(self.hess[i][j].abs());
                }
            }
        }
        m
    }
}

type Rule = dyn Fn(&[f64], u8) -> Jet + Send + Sync;

/// An evaluation rule `x ↦ (f(x), ∂f(x), ∂²f(x))`.
#[derive(Clone)]
pub struct Jet2Scalar {
    rule: Arc<Rule>,
}

impl fmt::Debug for Jet2Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Jet2Scalar(..)")
    }
}

impl Jet2Scalar {
    /// Wraps an arbitrary rule. The rule must fill every slot up to the
    /// requested order and report a symmetric Hessian.
    pub fn from_fn<F>(rule: F) -> Self
    where
        F: Fn(&[f64], u8) -> Jet + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(rule),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(move |_, _| Jet::constant(c))
    }

    /// `f(x) = c0 + g·x`.
    pub fn affine(c0: f64, grad: &[f64]) -> Self {
        let mut g = [0.0; MAX_DIM];
        g[..grad.len()].copy_from_slice(grad);
        let n = grad.len();
        Self::from_fn(move |x, _| {
            let mut j = Jet::constant(c0);
            for i in 0..n {
                j.value += g[i] * x[i];
            }
            j.grad = g;
            j
        })
    }

    #[inline]
    pub fn eval(&self, x: &[f64], order: u8) -> Jet {
        (self.rule)(x, order)
    }
}

/// One term `a cos(2π k·x/L + φ)` of a trigonometric field.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

/// Trigonometric polynomial on a periodic chart with exact jets.
pub fn make_trig_field(chart: &Chart, terms: &[TrigTerm]) -> Result<Jet2Scalar> {
    let periods = chart.periods().ok_or(Error::NonPeriodicChart)?;
    let n = chart.dim();
    let mut compiled: Vec<([f64; MAX_DIM], f64, f64)> = Vec::with_capacity(terms.len());
    for t in terms {
        if t.freq.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.freq.len(),
            });
        }
        let mut w = [0.0; MAX_DIM];
        for i in 0..n {
            w[i] = 2.0 * PI * t.freq[i] as f64 / periods[i];
        }
        compiled.push((w, t.amplitude, t.phase));
    }
    Ok(Jet2Scalar::from_fn(move |x, order| {
        let mut j = Jet::default();
        for (w, a, phase) in &compiled {
            let mut arg = *phase;
            for i in 0..n {
                arg += w[i] * x[i];
            }
            let (s, c) = arg.sin_cos();
            j.value += a * c;
            if order >= 1 {
                for i in 0..n {
                    j.grad[i] -= a * w[i] * s;
                }
            }
            if order >= 2 {
                for i in 0..n {
                    for k in 0..n {
                        j.hess[i][k] -= a * w[i] * w[k] * c;
                    }
                }
            }
        }
        j
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_trig_field_is_zero() {
        let chart = Chart::unit_torus(3);
        let f = make_trig_field(&chart, &[]).unwrap();
        assert_eq!(f.eval(&[0.3, 0.1, 0.7], 2), Jet::default());
    }

    #[test]
    fn single_cosine_jet_at_origin() {
        let chart = Chart::unit_torus(3);
        let f = make_trig_field(
            &chart,
            &[TrigTerm {
                freq: vec![1, 0, 0],
                amplitude: 1.0,
                phase: 0.0,
            }],
        )
        .unwrap();
        let j = f.eval(&[0.0, 0.0, 0.0], 2);
        assert_eq!(j.value, 1.0);
        assert_eq!(&j.grad[..3], &[0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(j.hess[0][0], -4.0 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn trig_terms_add() {
        let chart = Chart::periodic(&[1.0, 2.0]).unwrap();
        let t1 = TrigTerm {
            freq: vec![1, -2],
            amplitude: 0.7,
            phase: 0.3,
        };
        let t2 = TrigTerm {
            freq: vec![0, 3],
            amplitude: -1.1,
            phase: 1.9,
        };
        let f1 = make_trig_field(&chart, std::slice::from_ref(&t1)).unwrap();
        let f2 = make_trig_field(&chart, std::slice::from_ref(&t2)).unwrap();
        let f = make_trig_field(&chart, &[t1, t2]).unwrap();
        let x = [0.37, 1.21];
        let mut sum = f1.eval(&x, 2);
        sum.add_scaled(&f2.eval(&x, 2), 1.0, 2, 2);
        let j = f.eval(&x, 2);
        assert!((j.value - sum.value).abs() < 1e-15);
        for i in 0..2 {
            assert!((j.grad[i] - sum.grad[i]).abs() < 1e-14);
            for k in 0..2 {
                assert!((j.hess[i][k] - sum.hess[i][k]).abs() < 1e-13);
                assert_eq!(j.hess[i][k], j.hess[k][i]);
            }
        }
    }

    #[test]
    fn trig_field_needs_periodic_chart() {
        let chart = Chart::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(
            make_trig_field(&chart, &[]).unwrap_err(),
            Error::NonPeriodicChart
        );
    }

    #[test]
    fn product_rule_matches_closed_form() {
        // f = x² y, g = sin x at (x, y) = (0.4, 1.3)
        let (x, y) = (0.4f64, 1.3f64);
        let mut f = Jet::constant(x * x * y);
        f.grad[0] = 2.0 * x * y;
        f.grad[1] = x * x;
        f.hess[0][0] = 2.0 * y;
        f.hess[0][1] = 2.0 * x;
        f.hess[1][0] = 2.0 * x;
        let mut g = Jet::constant(x.sin());
        g.grad[0] = x.cos();
        g.hess[0][0] = -x.sin();
        let p = Jet::product(&f, &g, 2, 2);
        // d²/dx² (x² y sin x) = 2y sin x + 4xy cos x − x² y sin x
        let expect = 2.0 * y * x.sin() + 4.0 * x * y * x.cos() - x * x * y * x.sin();
        assert_abs_diff_eq!(p.hess[0][0], expect, epsilon = 1e-14);
        // d²/dxdy = 2x sin x + x² cos x
        assert_abs_diff_eq!(
            p.hess[0][1],
            2.0 * x * x.sin() + x * x * x.cos(),
            epsilon = 1e-14
        );
    }
}
