//! Functions of time on `[0, T]` and the benchmark functions.

use crate::error::{domain, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Which endpoints carry a derivative singularity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EndpointBehaviour {
    pub left: bool,
    pub right: bool,
}

/// A real function on `[0, T]`.
pub trait TimeFunction: Sync {
    fn value(&self, t: f64) -> f64;

    /// Interior points where the function or one of its derivatives jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Endpoints where some derivative is unbounded.
    fn singular_ends(&self) -> EndpointBehaviour {
        EndpointBehaviour::default()
    }

    /// One-sided limit at `t`, from the right if `right`.
    fn one_sided(&self, t: f64, _right: bool) -> f64 {
        self.value(t)
    }

    /// Exact antiderivative vanishing at 0, when available.
    fn antiderivative(&self, _t: f64) -> Option<f64> {
        None
    }
}

/// A function with pointwise first and second derivatives.
pub trait Differentiable: TimeFunction {
    fn derivative(&self, t: f64) -> f64;
    fn second_derivative(&self, t: f64) -> f64;
}

/// Wraps a closure as a smooth [`TimeFunction`].
pub struct FnTime<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> TimeFunction for FnTime<F> {
    fn value(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// Identifiers of the benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    /// `sin(πt/4)`
    SinPi4,
    /// `t^{2/3}`
    Pow23,
    /// `t (T-t)^{2/3}`
    BubblePow23,
    /// `t³ - 10t²`
    CubicA,
    /// `t³ - 10t`
    CubicB,
}

impl TestKind {
    pub const ALL: [TestKind; 5] =
        [TestKind::SinPi4, TestKind::Pow23, TestKind::BubblePow23, TestKind::CubicA, TestKind::CubicB];

    pub fn id(self) -> &'static str {
        match self {
            TestKind::SinPi4 => "sin_pi4",
            TestKind::Pow23 => "t_23",
            TestKind::BubblePow23 => "t_Tt_23",
            TestKind::CubicA => "cubic_a",
            TestKind::CubicB => "cubic_b",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TestKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .map_or_else(|| domain(format!("unknown function id '{s}'")), Ok)
    }
}

/// A benchmark function on a given horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    pub horizon: f64,
}

impl TestFunction {
    pub fn new(kind: TestKind, horizon: f64) -> Self {
        TestFunction { kind, horizon }
    }
}

impl Differentiable for TestFunction {
    fn derivative(&self, t: f64) -> f64 {
        let tt = self.horizon;
        match self.kind {
            TestKind::SinPi4 => 0.25 * PI * (0.25 * PI * t).cos(),
            TestKind::Pow23 => (2.0 / 3.0) * t.powf(-1.0 / 3.0),
            TestKind::BubblePow23 => {
                let r = tt - t;
                r.powf(2.0 / 3.0) - (2.0 / 3.0) * t * r.powf(-1.0 / 3.0)
            }
            TestKind::CubicA => 3.0 * t * t - 20.0 * t,
            TestKind::CubicB => 3.0 * t * t - 10.0,
        }
    }

    fn second_derivative(&self, t: f64) -> f64 {
        let tt = self.horizon;
        match self.kind {
            TestKind::SinPi4 => -(0.25 * PI).powi(2) * (0.25 * PI * t).sin(),
            TestKind::Pow23 => -(2.0 / 9.0) * t.powf(-4.0 / 3.0),
            TestKind::BubblePow23 => {
                let r = tt - t;
                -(4.0 / 3.0) * r.powf(-1.0 / 3.0) - (2.0 / 9.0) * t * r.powf(-4.0 / 3.0)
            }
            TestKind::CubicA => 6.0 * t - 20.0,
            TestKind::CubicB => 6.0 * t,
        }
    }
}

impl TimeFunction for TestFunction {
    fn value(&self, t: f64) -> f64 {
        match self.kind {
            TestKind::SinPi4 => (0.25 * PI * t).sin(),
            TestKind::Pow23 => t.max(0.0).powf(2.0 / 3.0),
            TestKind::BubblePow23 => t * (self.horizon - t).max(0.0).powf(2.0 / 3.0),
            TestKind::CubicA => t * t * (t - 10.0),
            TestKind::CubicB => t * (t * t - 10.0),
        }
    }

    fn singular_ends(&self) -> EndpointBehaviour {
        match self.kind {
            TestKind::Pow23 => EndpointBehaviour { left: true, right: false },
            TestKind::BubblePow23 => EndpointBehaviour { left: false, right: true },
            _ => EndpointBehaviour::default(),
        }
    }

    fn antiderivative(&self, t: f64) -> Option<f64> {
        let tt = self.horizon;
        Some(match self.kind {
            TestKind::SinPi4 => (4.0 / PI) * (1.0 - (0.25 * PI * t).cos()),
            TestKind::Pow23 => 0.6 * t.powf(5.0 / 3.0),
            TestKind::BubblePow23 => {
                let prim = |r: f64| -0.6 * tt * r.powf(5.0 / 3.0) + 0.375 * r.powf(8.0 / 3.0);
                prim((tt - t).max(0.0)) - prim(tt)
            }
            TestKind::CubicA => t.powi(4) / 4.0 - 10.0 * t.powi(3) / 3.0,
            TestKind::CubicB => t.powi(4) / 4.0 - 5.0 * t * t,
        })
    }
}

/// Indicator of `(0, width]`, the first piecewise constant basis function
/// of any mesh whose cells divide `width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstCell {
    pub width: f64,
}

impl TimeFunction for FirstCell {
    fn value(&self, t: f64) -> f64 {
        if t <= self.width {
            1.0
        } else {
            0.0
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.width]
    }

    fn one_sided(&self, t: f64, right: bool) -> f64 {
        if t < self.width || (t == self.width && !right) {
            1.0
        } else {
            0.0
        }
    }

    fn antiderivative(&self, t: f64) -> Option<f64> {
        Some(t.min(self.width))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::NodeSet;

    #[test]
    fn ids_round_trip() {
        for k in TestKind::ALL {
            assert_eq!(k.id().parse::<TestKind>().unwrap(), k);
        }
        assert!("nope".parse::<TestKind>().is_err());
    }

    #[test]
    fn antiderivatives_match_quadrature() {
        for k in TestKind::ALL {
            let f = TestFunction::new(k, 2.0);
            for &(a, b) in &[(0.0, 0.3), (0.3, 1.1), (1.1, 2.0)] {
                let set = if a == 0.0 {
                    NodeSet::graded(a, b, true, 0.15, 24, 16)
                } else if b == 2.0 {
                    NodeSet::graded(a, b, false, 0.15, 24, 16)
                } else {
                    NodeSet::gauss(a, b, 16)
                };
                let q = set.integrate(|t| f.value(t));
                let e = f.antiderivative(b).unwrap() - f.antiderivative(a).unwrap();
                assert!((q - e).abs() < 1e-13, "{k} [{a},{b}] {q} {e}");
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for k in TestKind::ALL {
            let f = TestFunction::new(k, 2.0);
            for &t in &[0.4, 1.0, 1.6] {
                let h = 1e-5;
                let d = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
                assert!((d - f.derivative(t)).abs() < 1e-8, "{k}");
                let d2 = (f.derivative(t + h) - f.derivative(t - h)) / (2.0 * h);
                assert!((d2 - f.second_derivative(t)).abs() < 1e-7, "{k}");
            }
        }
    }
}
