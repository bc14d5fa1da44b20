use std::fmt;
use std::sync::Arc;

use crate::qcore::{DiagonalOperator, SpatialGrid};

type PotentialFn = dyn Fn(f64) -> DiagonalOperator + Send + Sync;

/// Relative step of the central finite difference used when no analytic
/// control derivative is supplied.
pub const FD_CONTROL_STEP: f64 = 1e-6;

/// Control-dependent potential `u -> V(x, u)` with an optional analytic `dV/du`.
#[derive(Clone)]
pub struct PotentialFunction {
    eval: Arc<PotentialFn>,
    derivative: Option<Arc<PotentialFn>>,
    initial_control: f64,
}

impl fmt::Debug for PotentialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFunction")
            .field("initial_control", &self.initial_control)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl PotentialFunction {
    pub fn new<F>(eval: F, initial_control: f64) -> Self
    where
        F: Fn(f64) -> DiagonalOperator + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            derivative: None,
            initial_control,
        }
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> DiagonalOperator + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn initial_control(&self) -> f64 {
        self.initial_control
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, u: f64) -> DiagonalOperator {
        (self.eval)(u)
    }

    /// `dV/du`: analytic if available, otherwise a central difference with
    /// step `1e-6 * max(1, |u|)`.
    pub fn derivative(&self, u: f64) -> DiagonalOperator {
        if let Some(d) = &self.derivative {
            return d(u);
        }
        let h = FD_CONTROL_STEP * u.abs().max(1.0);
        let plus = self.eval(u + h).into_values();
        let minus = self.eval(u - h).into_values();
        DiagonalOperator::new(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect())
            .expect("finite potential")
    }
}

/// Coefficients of `p2 (x-u)^2 + p4 (x-u)^4 + p6 (x-u)^6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnharmonicParams {
    pub p2: f64,
    pub p4: f64,
    pub p6: f64,
}

impl AnharmonicParams {
    /// Atom-chip trap constants for 700 atoms in micrometre/millisecond units.
    pub const ATOM_CHIP: AnharmonicParams = AnharmonicParams {
        p2: 65.8392,
        p4: 97.6349,
        p6: -15.3850,
    };

    pub fn value(&self, x: f64, u: f64) -> f64 {
        let s2 = (x - u) * (x - u);
        let s4 = s2 * s2;
        self.p2 * s2 + self.p4 * s4 + self.p6 * s2 * s4
    }

    pub fn control_derivative(&self, x: f64, u: f64) -> f64 {
        let s = x - u;
        let s2 = s * s;
        let s3 = s * s2;
        -(2.0 * self.p2 * s + 4.0 * self.p4 * s3 + 6.0 * self.p6 * s2 * s3)
    }

    /// Potential function on `grid` with the analytic control derivative.
    pub fn potential_function(self, grid: &SpatialGrid, initial_control: f64) -> PotentialFunction {
        let xs = grid.x().to_vec();
        let xd = xs.clone();
        PotentialFunction::new(
            move |u| DiagonalOperator::new(xs.iter().map(|&x| self.value(x, u)).collect()).expect("finite"),
            initial_control,
        )
        .with_derivative(move |u| {
            DiagonalOperator::new(xd.iter().map(|&x| self.control_derivative(x, u)).collect()).expect("finite")
        })
    }
}

pub fn anharmonic_potential(grid: &SpatialGrid, u: f64, p2: f64, p4: f64, p6: f64) -> DiagonalOperator {
    let p = AnharmonicParams { p2, p4, p6 };
    DiagonalOperator::new(grid.x().iter().map(|&x| p.value(x, u)).collect()).expect("finite parameters")
}

/// Analytic `dV/du` of [`anharmonic_potential`].
pub fn anharmonic_potential_derivative(grid: &SpatialGrid, u: f64, p2: f64, p4: f64, p6: f64) -> DiagonalOperator {
    let p = AnharmonicParams { p2, p4, p6 };
    DiagonalOperator::new(grid.x().iter().map(|&x| p.control_derivative(x, u)).collect())
        .expect("finite parameters")
}

/// Gaussian optical tweezer `-depth * exp(-2 (x-u)^2 / waist^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TweezerParams {
    pub depth: f64,
    pub waist: f64,
}

impl TweezerParams {
    pub fn value(&self, x: f64, u: f64) -> f64 {
        let s = (x - u) / self.waist;
        -self.depth * (-2.0 * s * s).exp()
    }

    pub fn control_derivative(&self, x: f64, u: f64) -> f64 {
        let s = (x - u) / self.waist;
        // d/du of -D exp(-2 s^2) with ds/du = -1/w
        -self.depth * (-2.0 * s * s).exp() * 4.0 * s / self.waist
    }

    pub fn potential_function(self, grid: &SpatialGrid, initial_control: f64) -> PotentialFunction {
        let xs = grid.x().to_vec();
        let xd = xs.clone();
        PotentialFunction::new(
            move |u| DiagonalOperator::new(xs.iter().map(|&x| self.value(x, u)).collect()).expect("finite"),
            initial_control,
        )
        .with_derivative(move |u| {
            DiagonalOperator::new(xd.iter().map(|&x| self.control_derivative(x, u)).collect()).expect("finite")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: AnharmonicParams = AnharmonicParams::ATOM_CHIP;

    #[test]
    fn origin_vanishes() {
        let g = SpatialGrid::new(-1.0, 1.0, 9).unwrap();
        let v = anharmonic_potential(&g, 0.0, P.p2, P.p4, P.p6);
        assert_eq!(v.values()[4], 0.0);
        let d = anharmonic_potential_derivative(&g, 0.0, P.p2, P.p4, P.p6);
        assert_eq!(d.values()[4], 0.0);
    }

    #[test]
    fn value_at_unit_distance() {
        let g = SpatialGrid::new(-1.0, 1.0, 9).unwrap();
        let v = anharmonic_potential(&g, 0.0, P.p2, P.p4, P.p6);
        assert!((v.values()[8] - 148.0891).abs() < 1e-10);
    }

    #[test]
    fn translation() {
        let p = AnharmonicParams { p2: 1.3, p4: 0.7, p6: 0.1 };
        for &(x, u) in &[(0.3, 0.1), (-1.2, 0.55), (2.0, -0.4)] {
            assert!((p.value(x, u) - p.value(x - u, 0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let u: f64 = rng.gen_range(-1.0..1.0);
            let h = 1e-6;
            let fd = (P.value(x, u + h) - P.value(x, u - h)) / (2.0 * h);
            let an = P.control_derivative(x, u);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
        }
    }

    #[test]
    fn derivative_sign_right_of_centre() {
        let p = AnharmonicParams { p2: 1.0, p4: 2.0, p6: 3.0 };
        for &x in &[0.1, 0.5, 1.7] {
            assert!(p.control_derivative(x, 0.0) < 0.0);
        }
    }

    #[test]
    fn fallback_derivative_is_finite_difference() {
        let g = SpatialGrid::new(-2.0, 2.0, 16).unwrap();
        let gc = g.clone();
        let numeric = PotentialFunction::new(move |u| anharmonic_potential(&gc, u, P.p2, P.p4, P.p6), 0.0);
        let analytic = P.potential_function(&g, 0.0);
        let a = analytic.derivative(0.3);
        let n = numeric.derivative(0.3);
        for (x, y) in a.values().iter().zip(n.values()) {
            assert!((x - y).abs() < 1e-5 * x.abs().max(1.0));
        }
    }

    #[test]
    fn tweezer_derivative() {
        let t = TweezerParams { depth: 150.0, waist: 0.5 };
        for &(x, u) in &[(0.2, 0.0), (-0.3, 0.1), (0.7, -0.2)] {
            let h = 1e-6;
            let fd = (t.value(x, u + h) - t.value(x, u - h)) / (2.0 * h);
            assert!((fd - t.control_derivative(x, u)).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }
}
