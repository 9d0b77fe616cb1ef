use crate::model::{DynamicsSpec, Monotonicity, Point, ProblemSpec};
use crate::{Error, Result};

/// Event location tolerance in time.
const EVENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianValue {
    pub value: f64,
    /// Maximising control, lowest index on ties.
    pub control: usize,
    /// Margin to the runner-up control (infinite with one control).
    pub gap: f64,
}

/// `H(t, x, p) = max_u k(t, x, u)·p − L(t, x, u)`.
pub fn hamiltonian(t: f64, x: Point, p: Point, dynamics: &DynamicsSpec) -> HamiltonianValue {
    let sys = dynamics.system.as_ref();
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut second = f64::NEG_INFINITY;
    for u in 0..sys.num_controls() {
        let k = sys.velocity(t, x, u);
        let v = k[0] * p[0] + k[1] * p[1] - sys.running_cost(t, x, u);
        if v > best.0 {
            second = best.0;
            best = (v, u);
        } else if v > second {
            second = v;
        }
    }
    HamiltonianValue { value: best.0, control: best.1, gap: best.0 - second }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowDirection {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `H` changed sign; the stop is the located root.
    Transversality,
    /// `H` already has the sign it keeps after the root, so the optimal stop
    /// is the starting time.
    Immediate,
    /// The state left the domain.
    Boundary,
    /// A forward flow reached the horizon, or a reverse flow reached `t = 0`.
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub x: Point,
    pub p: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub stop_time: f64,
    pub stop_reason: StopReason,
    /// `H` at the last sample.
    pub final_h: f64,
}

impl FlowTrajectory {
    pub fn end(&self) -> FlowSample {
        self.samples[self.samples.len() - 1]
    }
}

type State = [f64; 4];

struct Flow<'a> {
    dynamics: &'a DynamicsSpec,
    dt: f64,
    lo: Point,
    hi: Point,
    dim: usize,
    tie_tol: f64,
}

impl Flow<'_> {
    /// Right-hand side with the control frozen to `u`; errors if the argmax
    /// at this point is a different or tied control.
    fn rhs(&self, t: f64, s: &State, u: usize) -> Result<State> {
        let (x, p) = ([s[0], s[1]], [s[2], s[3]]);
        let h = hamiltonian(t, x, p, self.dynamics);
        if h.control != u || h.gap <= self.tie_tol {
            let layer = (t / self.dt).floor().max(0.0) as usize;
            return Err(Error::KinkCrossing { layer, time: t });
        }
        let sys = self.dynamics.system.as_ref();
        let k = sys.velocity(t, x, u);
        let jac = sys.velocity_jacobian(t, x, u);
        let gl = sys.cost_gradient(t, x, u);
        let mut out = [k[0], k[1], 0.0, 0.0];
        for j in 0..self.dim {
            // ṗ_j = −Σ_i p_i ∂k_i/∂x_j + ∂L/∂x_j
            out[2 + j] = -(p[0] * jac[0][j] + p[1] * jac[1][j]) + gl[j];
        }
        if self.dim == 1 {
            out[1] = 0.0;
        }
        Ok(out)
    }

    fn rk4(&self, t: f64, s: &State, step: f64, u: usize) -> Result<State> {
        let add = |a: &State, b: &State, c: f64| -> State { [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]] };
        let k1 = self.rhs(t, s, u)?;
        let k2 = self.rhs(t + 0.5 * step, &add(s, &k1, 0.5 * step), u)?;
        let k3 = self.rhs(t + 0.5 * step, &add(s, &k2, 0.5 * step), u)?;
        let k4 = self.rhs(t + step, &add(s, &k3, step), u)?;
        let mut out = *s;
        for i in 0..4 {
            out[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(out)
    }

    /// Positive once the state is outside the domain box.
    fn outside(&self, s: &State) -> f64 {
        let mut d = f64::NEG_INFINITY;
        for a in 0..self.dim {
            d = d.max(self.lo[a] - s[a]).max(s[a] - self.hi[a]);
        }
        d
    }

    fn h(&self, t: f64, s: &State) -> f64 {
        hamiltonian(t, [s[0], s[1]], [s[2], s[3]], self.dynamics).value
    }
}

/// Integrates `γ' = ∇_p H`, `p' = −∇_x H` with RK4 steps of `dt/4`.
///
/// Forward flows start at `t0` and stop at the first sign change of `H`
/// (located by bisection), at the domain boundary or at the horizon. Reverse
/// flows run from `t0` back to 0 without a transversality event. A change or
/// tie of the maximising control inside a step is a kink of `H` and aborts
/// with [`Error::KinkCrossing`].
pub fn hamiltonian_flow(
    x0: Point,
    p0: Point,
    spec: &ProblemSpec,
    direction: FlowDirection,
    t0: f64,
) -> Result<FlowTrajectory> {
    let dynamics = &spec.dynamics;
    let dt = spec.dt();
    let flow = Flow {
        dynamics,
        dt,
        lo: spec.grid.lower(),
        hi: spec.grid.upper(),
        dim: spec.grid.dim(),
        tie_tol: 1e-12 * (1.0 + p0[0].abs() + p0[1].abs() + dynamics.bounds.beta1),
    };
    let horizon = spec.horizon()?;
    // Sign of H before the root: +1 when H decreases along the flow.
    let before = match dynamics.monotonicity {
        Monotonicity::Increasing => 1.0,
        Monotonicity::Decreasing => -1.0,
        Monotonicity::None => {
            return Err(Error::Unsupported("Hamiltonian flow needs a running cost monotone in time".into()))
        }
    };
    let forward = direction == FlowDirection::Forward;
    let end_time = if forward { horizon } else { 0.0 };
    let step = if forward { dt / 4.0 } else { -dt / 4.0 };

    let mut t = t0;
    let mut s: State = [x0[0], x0[1], p0[0], p0[1]];
    let mut samples = vec![FlowSample { t, x: x0, p: p0 }];
    let h0 = flow.h(t, &s);
    if forward && before * h0 <= 0.0 {
        return Ok(FlowTrajectory { samples, stop_time: t0, stop_reason: StopReason::Immediate, final_h: h0 });
    }
    loop {
        let remaining = end_time - t;
        if remaining.abs() <= EVENT_TOL {
            let final_h = flow.h(t, &s);
            return Ok(FlowTrajectory { samples, stop_time: t, stop_reason: StopReason::Horizon, final_h });
        }
        let this = if remaining.abs() < step.abs() { remaining } else { step };
        let u = hamiltonian(t, [s[0], s[1]], [s[2], s[3]], dynamics).control;
        let next = flow.rk4(t, &s, this, u)?;
        let t_next = t + this;
        let h_event = forward && before * flow.h(t_next, &next) <= 0.0;
        let b_event = flow.outside(&next) > 0.0;
        if h_event || b_event {
            // Bisection on the fraction of the step for each pending event.
            let locate = |crossed: &dyn Fn(f64, &State) -> bool| -> Result<(f64, State)> {
                let (mut a, mut b) = (0.0f64, 1.0f64);
                let mut at = next;
                while (b - a) * this.abs() > EVENT_TOL {
                    let m = 0.5 * (a + b);
                    let sm = flow.rk4(t, &s, m * this, u)?;
                    if crossed(t + m * this, &sm) {
                        b = m;
                        at = sm;
                    } else {
                        a = m;
                    }
                }
                Ok((b, at))
            };
            let mut best: Option<(f64, State, StopReason)> = None;
            if h_event {
                let (f, st) = locate(&|tt, st| before * flow.h(tt, st) <= 0.0)?;
                best = Some((f, st, StopReason::Transversality));
            }
            if b_event {
                let (f, st) = locate(&|_, st| flow.outside(st) > 0.0)?;
                if best.is_none_or(|b| f < b.0) {
                    best = Some((f, st, StopReason::Boundary));
                }
            }
            let (f, st, reason) = best.expect("an event was flagged");
            let stop = t + f * this;
            samples.push(FlowSample { t: stop, x: [st[0], st[1]], p: [st[2], st[3]] });
            let final_h = flow.h(stop, &st);
            return Ok(FlowTrajectory { samples, stop_time: stop, stop_reason: reason, final_h });
        }
        t = t_next;
        s = next;
        samples.push(FlowSample { t, x: [s[0], s[1]], p: [s[2], s[3]] });
    }
}
