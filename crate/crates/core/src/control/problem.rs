use std::sync::Arc;

use num_complex::Complex64;

use super::field::ControlField;
use super::system::ControlSystem;
use crate::error::{Error, Result};
use crate::qcore::{weighted_dot, StateVector};

const NORM_TOLERANCE: f64 = 1e-8;

/// Parabolic penalty on excursions outside `[lower, upper]`, per field.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftBounds {
    sigma: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SoftBounds {
    pub fn new(sigma: f64, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("penalty weight must be positive, got {sigma}")));
        }
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("need one lower and one upper bound per field"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::invalid("lower bounds must lie below upper bounds"));
        }
        Ok(Self { sigma, lower, upper })
    }

    /// Same interval for `n_fields` fields.
    pub fn uniform(sigma: f64, lower: f64, upper: f64, n_fields: usize) -> Result<Self> {
        Self::new(sigma, vec![lower; n_fields], vec![upper; n_fields])
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Signed excursion outside the interval for field `k`; zero inside.
    fn excess(&self, k: usize, v: f64) -> f64 {
        if v > self.upper[k] {
            v - self.upper[k]
        } else if v < self.lower[k] {
            v - self.lower[k]
        } else {
            0.0
        }
    }
}

/// `(gamma/2) sum_i ((u_{i+1} - u_i)/dt)^2 dt`.
pub fn regularization_cost(u: &ControlField, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let (m, dt) = (u.n_fields(), u.dt());
    let v = u.values();
    let sum: f64 = (m..v.len()).map(|j| (v[j] - v[j - m]).powi(2)).sum();
    0.5 * gamma * sum / dt
}

/// `(sigma/2) sum_i penalty(u_i) dt`.
pub fn bounds_cost(u: &ControlField, bounds: &SoftBounds) -> f64 {
    let m = u.n_fields();
    let sum: f64 = u.values().iter().enumerate().map(|(j, &v)| bounds.excess(j % m, v).powi(2)).sum();
    0.5 * bounds.sigma * sum * u.dt()
}

/// Cost and fidelity at one control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fidelity: f64,
    pub cost: f64,
    pub cost_fidelity: f64,
    pub cost_regularization: f64,
    pub cost_bounds: f64,
}

#[derive(Debug, Clone)]
struct Trajectory {
    control: Vec<f64>,
    states: Vec<Vec<Complex64>>,
}

/// Transfer `psi0` into `target` by shaping the control of `system`.
///
/// The cost is `(1 - F)/2 + J_gamma + J_bounds`. Forward trajectories are
/// cached for the last evaluated control, so a gradient request after a
/// cost evaluation at the same control does not repeat the propagation.
#[derive(Debug, Clone)]
pub struct StateTransferProblem {
    system: Arc<dyn ControlSystem>,
    psi0: StateVector,
    target: StateVector,
    control: ControlField,
    gamma: f64,
    bounds: Option<SoftBounds>,
    propagation_steps: u64,
    cache: Option<Trajectory>,
}

impl StateTransferProblem {
    pub fn new(
        system: Arc<dyn ControlSystem>,
        psi0: StateVector,
        target: StateVector,
        control: ControlField,
    ) -> Result<Self> {
        let basis = system.basis();
        for (name, s) in [("initial", &psi0), ("target", &target)] {
            if s.basis() != basis {
                return Err(Error::invalid(format!("{name} state does not live in the system's basis")));
            }
            if (s.norm() - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::invalid(format!("{name} state has norm {}", s.norm())));
            }
        }
        if control.n_fields() != system.n_fields() {
            return Err(Error::invalid(format!(
                "control has {} fields, system expects {}",
                control.n_fields(),
                system.n_fields()
            )));
        }
        Ok(Self {
            system,
            psi0,
            target,
            control,
            gamma: 0.0,
            bounds: None,
            propagation_steps: 0,
            cache: None,
        })
    }

    pub fn with_regularization(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("regularization weight must be >= 0, got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_bounds(mut self, bounds: SoftBounds) -> Result<Self> {
        if bounds.lower.len() != self.control.n_fields() {
            return Err(Error::invalid("bounds and control differ in the number of fields"));
        }
        self.bounds = Some(bounds);
        Ok(self)
    }

    pub fn system(&self) -> &Arc<dyn ControlSystem> {
        &self.system
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.psi0
    }

    pub fn target_state(&self) -> &StateVector {
        &self.target
    }

    pub fn control(&self) -> &ControlField {
        &self.control
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn bounds(&self) -> Option<&SoftBounds> {
        self.bounds.as_ref()
    }

    /// Total number of single time steps taken so far, forward and backward.
    pub fn propagation_steps(&self) -> u64 {
        self.propagation_steps
    }

    pub fn set_control(&mut self, control: ControlField) -> Result<()> {
        if !control.same_shape(&self.control) {
            return Err(Error::invalid("new control has a different grid or number of fields"));
        }
        self.control = control;
        Ok(())
    }

    pub(crate) fn set_control_values(&mut self, values: &[f64]) -> Result<()> {
        self.control.set_values(values)
    }

    fn states(&mut self) -> Result<&[Vec<Complex64>]> {
        let fresh = match &self.cache {
            Some(t) => t.control != self.control.values(),
            None => true,
        };
        if fresh {
            let states = self.system.forward(self.psi0.amplitudes(), &self.control)?;
            self.propagation_steps += (self.control.n_steps() - 1) as u64;
            self.cache = Some(Trajectory {
                control: self.control.values().to_vec(),
                states,
            });
        }
        Ok(&self.cache.as_ref().expect("filled above").states)
    }

    fn terminal_overlap(&mut self) -> Result<Complex64> {
        let w = self.psi0.weight();
        let target = self.target.amplitudes().to_vec();
        let states = self.states()?;
        Ok(weighted_dot(&target, states.last().expect("at least two steps"), w))
    }

    /// Forward trajectory `psi(t_i)`.
    pub fn propagate_forward(&mut self) -> Result<Vec<StateVector>> {
        let basis = self.psi0.basis();
        let states = self.states()?;
        Ok(states.iter().map(|s| StateVector::from_parts(s.clone(), basis)).collect())
    }

    /// Costate trajectory `chi(t_i)`, ending in `i <psi_t|psi(T)> psi_t`.
    pub fn propagate_adjoint(&mut self) -> Result<Vec<StateVector>> {
        let basis = self.psi0.basis();
        let sens = self.sensitivity()?;
        // chi = -i lambda
        Ok(sens
            .costates
            .into_iter()
            .map(|l| StateVector::from_parts(l.into_iter().map(|z| Complex64::new(z.im, -z.re)).collect(), basis))
            .collect())
    }

    fn sensitivity(&mut self) -> Result<super::system::Sensitivity> {
        let o = self.terminal_overlap()?;
        // d((1 - |o|^2)/2) = Re <lambda, dpsi(T)> with lambda = -o psi_t
        let terminal: Vec<Complex64> = self.target.amplitudes().iter().map(|t| -o * t).collect();
        let control = self.control.clone();
        let system = Arc::clone(&self.system);
        let states = self.states()?;
        let sens = system.backward(states, &control, terminal)?;
        self.propagation_steps += (control.n_steps() - 1) as u64;
        Ok(sens)
    }

    pub fn fidelity(&mut self) -> Result<f64> {
        Ok(self.terminal_overlap()?.norm_sqr().min(1.0))
    }

    pub fn evaluate(&mut self) -> Result<Evaluation> {
        let fidelity = self.fidelity()?;
        let cost_fidelity = 0.5 * (1.0 - fidelity);
        let cost_regularization = regularization_cost(&self.control, self.gamma);
        let cost_bounds = self.bounds.as_ref().map_or(0.0, |b| bounds_cost(&self.control, b));
        Ok(Evaluation {
            fidelity,
            cost: cost_fidelity + cost_regularization + cost_bounds,
            cost_fidelity,
            cost_regularization,
            cost_bounds,
        })
    }

    pub fn cost(&mut self) -> Result<f64> {
        Ok(self.evaluate()?.cost)
    }

    /// L2 gradient per sample and field, time-major. Interior entries are
    /// `dJ/du_i / dt` of the discretized cost; both endpoints are zero.
    pub fn gradient_l2(&mut self) -> Result<Vec<f64>> {
        let sens = self.sensitivity()?;
        let (m, n, dt) = (self.control.n_fields(), self.control.n_steps(), self.control.dt());
        let v = self.control.values();
        let mut g: Vec<f64> = sens.control_derivative.iter().map(|d| d / dt).collect();
        for i in 1..n - 1 {
            for k in 0..m {
                let j = i * m + k;
                let udd = (v[j + m] - 2.0 * v[j] + v[j - m]) / (dt * dt);
                g[j] -= self.gamma * udd;
                if let Some(b) = &self.bounds {
                    g[j] += b.sigma * b.excess(k, v[j]);
                }
            }
        }
        g[..m].fill(0.0);
        g[(n - 1) * m..].fill(0.0);
        Ok(g)
    }
}

/// H1 representation of an L2 gradient: solves `-D2 g = f` per field with
/// `g = 0` at both ends. `f` is time-major with `n_fields` columns.
pub fn gradient_h1(l2: &[f64], n_fields: usize, dt: f64) -> Vec<f64> {
    let n = l2.len() / n_fields;
    let mut out = vec![0.0; l2.len()];
    if n < 3 {
        return out;
    }
    let inner = n - 2;
    // -D2 = (1/dt^2) tridiag(-1, 2, -1); Thomas algorithm
    let scale = dt * dt;
    let mut c = vec![0.0; inner];
    let mut d = vec![0.0; inner];
    for k in 0..n_fields {
        for i in 0..inner {
            let rhs = l2[(i + 1) * n_fields + k] * scale;
            let denom = if i == 0 { 2.0 } else { 2.0 + c[i - 1] };
            c[i] = -1.0 / denom;
            d[i] = if i == 0 { rhs / denom } else { (rhs + d[i - 1]) / denom };
        }
        let mut next = 0.0;
        for i in (0..inner).rev() {
            let x = d[i] - c[i] * next;
            out[(i + 1) * n_fields + k] = x;
            next = x;
        }
    }
    out
}

/// `sum_i a_i b_i dt`.
pub fn l2_inner(a: &[f64], b: &[f64], dt: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dt
}

/// `sum_i (a_{i+1} - a_i)(b_{i+1} - b_i) / dt` per field; for vectors
/// vanishing at both ends this equals `<-D2 a, b>_L2`.
pub fn h1_inner(a: &[f64], b: &[f64], n_fields: usize, dt: f64) -> f64 {
    let m = n_fields;
    (m..a.len()).map(|j| (a[j] - a[j - m]) * (b[j] - b[j - m])).sum::<f64>() / dt
}
