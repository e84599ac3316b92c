//! Pauli-correlation-encoding solver.
//!
//! `N` binary variables are read off as the signs of `N` Pauli expectation
//! values on an `n`-qubit ansatz state. Training minimizes the relaxed loss
//!
//! ```text
//! L = Σ_l C̃_l² − β Σ_i x̃_i²,   x̃_i = tanh(α ⟨Π_i⟩),   C̃_l = Σ_i x̃_i x̃_{i+l}
//! ```
//!
//! with gradients from the chain rule and the parameter-shift rule.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labs::{sidelobe_energy_of, BinarySequence};
use crate::pauli::{sample_set, PauliMode, PauliSet, PauliString};
use crate::sim::{adjoint_gradient, run_ansatz, AnsatzSpec, Axis, GateOp, Statevector};
use crate::tts::{EnergyLevels, SolveResult, TtsTracker};

/// Relaxed variables `tanh(α v)`, strictly inside `(-1, 1)` for finite `α v`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedVector(pub Vec<f64>);

impl RelaxedVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn relax(expectations: &[f64], alpha: f64) -> RelaxedVector {
    RelaxedVector(expectations.iter().map(|v| (alpha * v).tanh()).collect())
}

fn relaxed_autocorrelations(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (1..n).map(|lag| (0..n - lag).map(|i| x[i] * x[i + lag]).sum()).collect()
}

/// `Σ_l C̃_l² − β Σ_i x̃_i²` in `O(N²)`.
pub fn relaxed_loss(x: &[f64], beta: f64) -> f64 {
    let corr: f64 = relaxed_autocorrelations(x).iter().map(|c| c * c).sum();
    corr - beta * x.iter().map(|v| v * v).sum::<f64>()
}

/// `∂L/∂x̃_i = 2 Σ_l C̃_l (x̃_{i+l} + x̃_{i−l}) − 2β x̃_i`.
pub fn relaxed_loss_gradient(x: &[f64], beta: f64) -> Vec<f64> {
    let n = x.len();
    let corr = relaxed_autocorrelations(x);
    (0..n)
        .map(|i| {
            let mut g = -2.0 * beta * x[i];
            for lag in 1..n {
                let mut neighbours = 0.0;
                if i + lag < n {
                    neighbours += x[i + lag];
                }
                if i >= lag {
                    neighbours += x[i - lag];
                }
                g += 2.0 * corr[lag - 1] * neighbours;
            }
            g
        })
        .collect()
}

/// Sign decoding with `sign(0) = +1`.
pub fn decode(expectations: &[f64]) -> Result<BinarySequence> {
    BinarySequence::new(decode_spins(expectations))
}

fn decode_spins(expectations: &[f64]) -> Vec<i8> {
    expectations.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerConfig {
    Adam { step: f64, beta1: f64, beta2: f64, epsilon: f64 },
    GradientDescent { step: f64 },
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Adam { step: 0.05, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl OptimizerConfig {
    pub fn build(&self) -> Box<dyn Optimizer> {
        match *self {
            OptimizerConfig::Adam { step, beta1, beta2, epsilon } => {
                Box::new(Adam { step, beta1, beta2, epsilon, m: Vec::new(), v: Vec::new(), t: 0 })
            }
            OptimizerConfig::GradientDescent { step } => Box::new(GradientDescent { step }),
        }
    }
}

/// First-order update rule.
pub trait Optimizer: Send {
    /// Clears any moment state before a new trajectory.
    fn reset(&mut self, dim: usize);
    fn step(&mut self, params: &mut [f64], grad: &[f64]);
}

pub struct Adam {
    step: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Optimizer for Adam {
    fn reset(&mut self, dim: usize) {
        self.m = vec![0.0; dim];
        self.v = vec![0.0; dim];
        self.t = 0;
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        if self.m.len() != params.len() {
            self.reset(params.len());
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grad[k] * grad[k];
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            params[k] -= self.step * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

pub struct GradientDescent {
    step: f64,
}

impl Optimizer for GradientDescent {
    fn reset(&mut self, _dim: usize) {}

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        for (p, g) in params.iter_mut().zip(grad) {
            *p -= self.step * g;
        }
    }
}

/// Solver configuration. Every field is echoed into run records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PceConfig {
    pub qubits: usize,
    pub layers: usize,
    pub rotation_axes: Vec<Axis>,
    pub pauli_mode: PauliMode,
    pub alpha: f64,
    pub beta: f64,
    pub optimizer: OptimizerConfig,
    /// Gradient steps per restart; each restart evaluates the loss `iterations + 1` times.
    pub iterations: usize,
    pub max_restarts: usize,
    /// Restart early after this many steps without a loss improvement.
    pub patience: Option<usize>,
    /// Optional global cap on counted evaluations.
    pub max_evals: Option<u64>,
    /// `0` means exact expectations.
    pub shots: u64,
    /// Also charge the two shifted circuits per gate to the evaluation counter.
    pub count_shift_evals: bool,
    /// Ignored when `shots > 0`; sampled runs always execute shifted circuits.
    pub gradient: GradientMethod,
    pub seed: u64,
}

/// How the shift-rule derivative is computed in exact mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Simulates both shifted circuits for every gate.
    ParameterShift,
    /// Same derivative from one backward sweep.
    #[default]
    Adjoint,
}

impl Default for PceConfig {
    fn default() -> Self {
        Self::for_qubits(4)
    }
}

impl PceConfig {
    /// Defaults for `qubits`: `α = 1.5 n`, `β = 15`, 15 brickwork layers.
    pub fn for_qubits(qubits: usize) -> Self {
        Self {
            qubits,
            layers: 15,
            rotation_axes: vec![Axis::X, Axis::Y],
            pauli_mode: PauliMode::Anticommuting,
            alpha: 1.5 * qubits as f64,
            beta: 15.0,
            optimizer: OptimizerConfig::default(),
            iterations: 500,
            max_restarts: 1_000_000,
            patience: Some(DEFAULT_PATIENCE),
            max_evals: None,
            shots: 0,
            count_shift_evals: false,
            gradient: GradientMethod::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) {
            return Err(Error::invalid(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.rotation_axes.is_empty() && self.qubits > 0 {
            return Err(Error::invalid("at least one rotation axis is required"));
        }
        Ok(())
    }

    pub fn ansatz(&self) -> Result<AnsatzSpec> {
        AnsatzSpec::with_axes(self.qubits, self.layers, self.rotation_axes.clone())
    }
}

/// Steps without improvement before an early restart.
pub const DEFAULT_PATIENCE: usize = 30;

/// Forward pass with the pre-gate states kept for parameter shifts.
struct ForwardPass {
    prefixes: Vec<Statevector>,
    output: Statevector,
}

impl ForwardPass {
    fn run(spec: &AnsatzSpec, theta: &[f64]) -> Result<Self> {
        if theta.len() != spec.num_params() {
            return Err(Error::DimensionMismatch { expected: spec.num_params(), actual: theta.len() });
        }
        let mut prefixes = Vec::with_capacity(spec.gates().len());
        let mut state = Statevector::zero(spec.n)?;
        for gate in spec.gates() {
            prefixes.push(state.clone());
            apply(&mut state, &gate.op, theta[gate.param]);
        }
        Ok(Self { prefixes, output: state })
    }

    /// Calls `visit(param, sign, state)` for the `θ_k ± π/2` output of every gate.
    fn for_each_shift<F>(&self, spec: &AnsatzSpec, theta: &[f64], mut visit: F) -> Result<()>
    where
        F: FnMut(usize, f64, &Statevector) -> Result<()>,
    {
        let gates = spec.gates();
        let mut scratch = self.output.clone();
        for (g, gate) in gates.iter().enumerate() {
            for sign in [1.0, -1.0] {
                scratch.clone_from(&self.prefixes[g]);
                apply(&mut scratch, &gate.op, theta[gate.param] + sign * PI / 2.0);
                for later in &gates[g + 1..] {
                    apply(&mut scratch, &later.op, theta[later.param]);
                }
                visit(gate.param, sign, &scratch)?;
            }
        }
        Ok(())
    }
}

// qubits were validated when the ansatz was built
fn apply(state: &mut Statevector, op: &GateOp, theta: f64) {
    state.apply_gate(op, theta);
}

/// Everything needed to evaluate the loss at a parameter point.
pub struct LossContext<'a, R: Rng> {
    pub ansatz: &'a AnsatzSpec,
    pub paulis: &'a [PauliString],
    pub alpha: f64,
    pub beta: f64,
    pub shots: u64,
    pub rng: &'a mut R,
    evals: u64,
}

/// One scored loss evaluation.
#[derive(Clone, Debug)]
pub struct LossEvaluation {
    pub loss: f64,
    pub expectations: Vec<f64>,
}

impl<'a, R: Rng> LossContext<'a, R> {
    pub fn new(ansatz: &'a AnsatzSpec, paulis: &'a [PauliString], alpha: f64, beta: f64, shots: u64, rng: &'a mut R) -> Result<Self> {
        if let Some(bad) = paulis.iter().find(|p| p.num_qubits() != ansatz.n) {
            return Err(Error::DimensionMismatch { expected: ansatz.n, actual: bad.num_qubits() });
        }
        Ok(Self { ansatz, paulis, alpha, beta, shots, rng, evals: 0 })
    }

    /// Loss evaluations performed so far.
    pub fn evals(&self) -> u64 {
        self.evals
    }

    fn measure(&mut self, state: &Statevector) -> Result<Vec<f64>> {
        if self.shots == 0 {
            Ok(self.paulis.iter().map(|p| state.expectation_unchecked(p)).collect())
        } else {
            self.paulis.iter().map(|p| state.sampled_expectation(p, self.shots, self.rng)).collect()
        }
    }

    pub fn loss(&mut self, theta: &[f64]) -> Result<f64> {
        Ok(self.evaluate(theta)?.loss)
    }

    /// Loss plus the expectations it was built from; counts one evaluation.
    pub fn evaluate(&mut self, theta: &[f64]) -> Result<LossEvaluation> {
        let forward = ForwardPass::run(self.ansatz, theta)?;
        self.score(&forward.output)
    }

    fn score(&mut self, state: &Statevector) -> Result<LossEvaluation> {
        let expectations = self.measure(state)?;
        let x = relax(&expectations, self.alpha);
        self.evals += 1;
        Ok(LossEvaluation { loss: relaxed_loss(&x.0, self.beta), expectations })
    }

    /// Chain rule over the parameter-shift derivatives of every correlator.
    ///
    /// With `shots > 0` the shifted expectations are themselves sampled,
    /// which gives an unbiased but noisy gradient.
    pub fn loss_gradient(&mut self, theta: &[f64]) -> Result<Vec<f64>> {
        let forward = ForwardPass::run(self.ansatz, theta)?;
        let expectations = self.measure(&forward.output)?;
        self.gradient_at(&forward, theta, &expectations)
    }

    /// Exact-mode gradient from a single backward sweep; equal to
    /// [`Self::loss_gradient`] up to rounding.
    pub fn loss_gradient_adjoint(&mut self, theta: &[f64]) -> Result<Vec<f64>> {
        if self.shots > 0 {
            return Err(Error::invalid("adjoint gradients need exact expectations"));
        }
        let output = run_ansatz(self.ansatz, theta)?;
        let expectations = self.measure(&output)?;
        Ok(self.adjoint_at(&output, theta, &expectations))
    }

    fn adjoint_at(&self, output: &Statevector, theta: &[f64], expectations: &[f64]) -> Vec<f64> {
        let dl_dv = self.expectation_weights(expectations);
        let observable: Vec<(PauliString, f64)> = self.paulis.iter().copied().zip(dl_dv).collect();
        adjoint_gradient(self.ansatz, theta, output, &observable)
    }

    /// `∂L/∂⟨Π_i⟩ = ∂L/∂x̃_i · α sech²(α⟨Π_i⟩) = ∂L/∂x̃_i · α (1 − x̃_i²)`.
    fn expectation_weights(&self, expectations: &[f64]) -> Vec<f64> {
        let x = relax(expectations, self.alpha);
        let dl_dx = relaxed_loss_gradient(&x.0, self.beta);
        dl_dx.iter().zip(&x.0).map(|(g, xi)| g * self.alpha * (1.0 - xi * xi)).collect()
    }

    fn gradient_at(&mut self, forward: &ForwardPass, theta: &[f64], expectations: &[f64]) -> Result<Vec<f64>> {
        let dl_dv = self.expectation_weights(expectations);
        let mut grad = vec![0.0; theta.len()];
        let exact = self.shots == 0;
        let paulis = self.paulis;
        let shots = self.shots;
        let rng = &mut *self.rng;
        forward.for_each_shift(self.ansatz, theta, |param, sign, state| {
            let mut acc = 0.0;
            for (p, w) in paulis.iter().zip(&dl_dv) {
                let v = if exact { state.expectation_unchecked(p) } else { state.sampled_expectation(p, shots, rng)? };
                acc += w * v;
            }
            grad[param] += 0.5 * sign * acc;
            Ok(())
        })?;
        Ok(grad)
    }
}

/// Draws a uniform starting point in `[-π, π)`.
fn initial_params<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-PI..PI)).collect()
}

/// Runs the PCE solver on a length-`n` instance.
///
/// Each restart draws a fresh correlator set and starting point. After every
/// loss evaluation the current decoded sequence is scored, so the TTS
/// counters record the first evaluation at which each reference level was
/// reached. Without `levels` the solver runs its whole budget and reports
/// the best sequence seen.
pub fn solve(n: usize, config: &PceConfig, levels: Option<EnergyLevels>) -> Result<SolveResult> {
    config.validate()?;
    if n < crate::labs::MIN_LENGTH {
        return Err(Error::invalid(format!("instance size {n} is below 3")));
    }
    let ansatz = config.ansatz()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = config.optimizer.build();
    let mut tracker = TtsTracker::new(levels, config.max_evals);
    let shift_charge = if config.count_shift_evals { 2 * ansatz.gates().len() as u64 } else { 0 };
    let adjoint = config.shots == 0 && config.gradient == GradientMethod::Adjoint;
    let mut restarts = 0u64;

    'restarts: for _ in 0..config.max_restarts.max(1) {
        restarts += 1;
        let set: PauliSet = sample_set(config.pauli_mode, config.qubits, n, &mut rng)?;
        let mut theta = initial_params(ansatz.num_params(), &mut rng);
        optimizer.reset(theta.len());
        let mut ctx = LossContext::new(&ansatz, &set.members, config.alpha, config.beta, config.shots, &mut rng)?;
        let mut best_loss = f64::INFINITY;
        let mut stale = 0usize;

        for step in 0..=config.iterations {
            let forward = if adjoint { None } else { Some(ForwardPass::run(&ansatz, &theta)?) };
            let output = match &forward {
                Some(f) => f.output.clone(),
                None => run_ansatz(&ansatz, &theta)?,
            };
            let eval = ctx.score(&output)?;
            let spins = decode_spins(&eval.expectations);
            tracker.record(sidelobe_energy_of(&spins), &spins);
            if tracker.done() {
                break 'restarts;
            }
            if step == config.iterations {
                break;
            }
            if eval.loss < best_loss - 1e-9 * best_loss.abs().max(1.0) {
                best_loss = eval.loss;
                stale = 0;
            } else {
                stale += 1;
                if config.patience.is_some_and(|p| stale >= p) {
                    break;
                }
            }
            let grad = match &forward {
                Some(f) => ctx.gradient_at(f, &theta, &eval.expectations)?,
                None => ctx.adjoint_at(&output, &theta, &eval.expectations),
            };
            tracker.charge(shift_charge);
            optimizer.step(&mut theta, &grad);
        }
        if tracker.done() {
            break;
        }
    }
    tracker
        .finish(restarts, config.seed)
        .ok_or_else(|| Error::Runtime("solver finished without evaluating the loss".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labs::sidelobe_energy;
    use crate::pauli::sample_anticommuting_set;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn relax_examples() {
        assert_eq!(relax(&[0.0], 3.0).0, vec![0.0]);
        assert_abs_diff_eq!(relax(&[1.0], 6.0).0[0], 0.999_987_711_650_795_6, epsilon = 1e-15);
        let v = [0.3, -0.01, 0.7, -0.9];
        let x = relax(&v, 2.5);
        for (a, b) in v.iter().zip(&x.0) {
            assert_eq!(a.signum(), b.signum());
            assert!(b.abs() < 1.0);
        }
    }

    #[test]
    fn relaxed_loss_examples() {
        assert_eq!(relaxed_loss(&[1.0, 1.0, 1.0], 0.0), 5.0);
        assert_eq!(relaxed_loss(&[0.0; 7], 15.0), 0.0);
        assert_eq!(relaxed_loss(&[1.0, -1.0, 1.0], 15.0), -40.0);
    }

    /// The defining quadruple sum, written out literally.
    fn quadruple_sum_loss(x: &[f64], beta: f64) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for lag in 1..n {
            for i in 0..n - lag {
                for j in 0..n - lag {
                    total += x[i] * x[i + lag] * x[j] * x[j + lag];
                }
            }
        }
        total - beta * x.iter().map(|v| v * v).sum::<f64>()
    }

    #[test]
    fn factorized_loss_matches_quadruple_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(3..20);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let beta = rng.gen_range(0.0..20.0);
            assert_abs_diff_eq!(relaxed_loss(&x, beta), quadruple_sum_loss(&x, beta), epsilon = 1e-9);
        }
    }

    #[test]
    fn relaxed_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..11).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = relaxed_loss_gradient(&x, 3.0);
        let h = 1e-6;
        for i in 0..x.len() {
            let mut up = x.clone();
            up[i] += h;
            let mut down = x.clone();
            down[i] -= h;
            let fd = (relaxed_loss(&up, 3.0) - relaxed_loss(&down, 3.0)) / (2.0 * h);
            assert_abs_diff_eq!(g[i], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&[0.3, -0.2, 0.0]).unwrap().spins(), &[1, -1, 1]);
        let v = [0.4, -0.1, 0.25, -0.7];
        assert_eq!(decode(&relax(&v, 6.0).0).unwrap(), decode(&v).unwrap());
        let neg: Vec<f64> = v.iter().map(|a| -a).collect();
        assert_eq!(decode(&neg).unwrap(), decode(&v).unwrap().negated());
    }

    fn random_set(n_qubits: usize, size: usize, seed: u64) -> Vec<PauliString> {
        sample_anticommuting_set(n_qubits, size, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().members
    }

    #[test]
    fn zero_params_give_zero_loss_without_diagonal_members() {
        let ansatz = AnsatzSpec::brickwork(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let paulis: Vec<PauliString> =
            ["XII", "YZI", "IXZ", "ZYX", "XXI", "IIY"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(paulis.iter().all(|p| !p.is_diagonal()));
        let mut ctx = LossContext::new(&ansatz, &paulis, 4.5, 15.0, 0, &mut rng).unwrap();
        let theta = vec![0.0; ansatz.num_params()];
        assert_eq!(ctx.loss(&theta).unwrap(), 0.0);
        assert_eq!(ctx.loss(&theta).unwrap(), 0.0);
        assert_eq!(ctx.evals(), 2);
        // every term carries a factor x̃ = 0
        assert!(ctx.loss_gradient(&theta).unwrap().iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn binary_limit_matches_decoded_energy() {
        let ansatz = AnsatzSpec::brickwork(3, 3).unwrap();
        let paulis = random_set(3, 12, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let theta = initial_params(ansatz.num_params(), &mut rng);
            let mut inner = ChaCha8Rng::seed_from_u64(0);
            let mut ctx = LossContext::new(&ansatz, &paulis, 4.5, 15.0, 0, &mut inner).unwrap();
            let eval = ctx.evaluate(&theta).unwrap();
            let x = relax(&eval.expectations, 4.5);
            let signs: Vec<f64> = x.0.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
            let decoded = decode(&eval.expectations).unwrap();
            assert_eq!(relaxed_loss(&signs, 0.0), sidelobe_energy(&decoded) as f64);
        }
    }

    #[test]
    fn gradient_matches_shift_free_finite_differences() {
        let ansatz = AnsatzSpec::brickwork(3, 4).unwrap();
        let paulis = random_set(3, 10, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let theta = initial_params(ansatz.num_params(), &mut rng);
        let mut ctx = LossContext::new(&ansatz, &paulis, 4.5, 15.0, 0, &mut rng).unwrap();
        let grad = ctx.loss_gradient(&theta).unwrap();
        let h = 1e-5;
        for k in 0..theta.len() {
            let mut up = theta.clone();
            up[k] += h;
            let mut down = theta.clone();
            down[k] -= h;
            let fd = (ctx.loss(&up).unwrap() - ctx.loss(&down).unwrap()) / (2.0 * h);
            assert!((grad[k] - fd).abs() <= 1e-5 * fd.abs().max(1.0), "k={k}: {} vs {fd}", grad[k]);
        }
    }

    #[test]
    fn adjoint_sweep_matches_parameter_shift() {
        for (n_qubits, layers, size, seed) in [(2, 3, 5, 1u64), (3, 4, 10, 2), (4, 5, 13, 3)] {
            let ansatz = AnsatzSpec::brickwork(n_qubits, layers).unwrap();
            let paulis = random_set(n_qubits, size, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 10);
            let theta = initial_params(ansatz.num_params(), &mut rng);
            let mut ctx = LossContext::new(&ansatz, &paulis, 1.5 * n_qubits as f64, 15.0, 0, &mut rng).unwrap();
            let shift = ctx.loss_gradient(&theta).unwrap();
            let adjoint = ctx.loss_gradient_adjoint(&theta).unwrap();
            for (a, b) in shift.iter().zip(&adjoint) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gradient_methods_give_the_same_run() {
        let base = PceConfig { layers: 3, iterations: 40, max_restarts: 3, seed: 5, ..PceConfig::for_qubits(3) };
        let shift = PceConfig { gradient: GradientMethod::ParameterShift, ..base.clone() };
        let levels = Some(EnergyLevels::exact_only(3));
        let a = solve(9, &base, levels).unwrap();
        let b = solve(9, &shift, levels).unwrap();
        assert_eq!(a.total_evals, b.total_evals);
        assert_eq!(a.best_energy, b.best_energy);
    }

    #[test]
    fn adam_descends_monotonically_with_small_steps() {
        let config = PceConfig { qubits: 3, layers: 4, alpha: 4.5, ..PceConfig::for_qubits(3) };
        let ansatz = config.ansatz().unwrap();
        let paulis = random_set(3, 10, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut theta = initial_params(ansatz.num_params(), &mut rng);
        let mut ctx = LossContext::new(&ansatz, &paulis, 4.5, 15.0, 0, &mut rng).unwrap();
        let mut opt = OptimizerConfig::Adam { step: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }.build();
        opt.reset(theta.len());
        let mut previous = ctx.loss(&theta).unwrap();
        let mut violations = 0;
        for _ in 0..100 {
            let grad = ctx.loss_gradient(&theta).unwrap();
            opt.step(&mut theta, &grad);
            let current = ctx.loss(&theta).unwrap();
            if current > previous {
                violations += 1;
            }
            previous = current;
        }
        assert!(violations < 5, "{violations} increases");
    }

    #[test]
    fn solve_is_deterministic() {
        let config = PceConfig { layers: 4, iterations: 30, max_restarts: 2, seed: 77, ..PceConfig::for_qubits(3) };
        let levels = Some(EnergyLevels::exact_only(6));
        let a = solve(13, &config, levels).unwrap();
        let b = solve(13, &config, levels).unwrap();
        assert_eq!(a, b);
        assert!(a.total_evals <= 62);
    }

    #[test]
    fn zero_iteration_budget_scores_only_the_initial_state() {
        let config = PceConfig { iterations: 0, max_restarts: 1, seed: 3, ..PceConfig::for_qubits(4) };
        let r = solve(13, &config, Some(EnergyLevels::exact_only(6))).unwrap();
        assert_eq!(r.total_evals, 1);
        assert_eq!(r.restarts_used, 1);
    }

    #[test]
    fn shift_charging_counts_circuits() {
        let config = PceConfig {
            layers: 2,
            iterations: 3,
            max_restarts: 1,
            patience: None,
            count_shift_evals: true,
            ..PceConfig::for_qubits(3)
        };
        let gates = config.ansatz().unwrap().gates().len() as u64;
        let r = solve(11, &config, None).unwrap();
        assert_eq!(r.total_evals, 4 + 3 * 2 * gates);
    }

    #[test]
    fn sampled_mode_runs() {
        let config = PceConfig { layers: 2, iterations: 5, max_restarts: 1, shots: 200, ..PceConfig::for_qubits(3) };
        let r = solve(9, &config, None).unwrap();
        assert_eq!(r.total_evals, 6);
    }

    #[test]
    fn config_validation() {
        let bad = PceConfig { alpha: 1.0, ..PceConfig::default() };
        assert!(solve(13, &bad, None).is_err());
        let bad = PceConfig { beta: -1.0, ..PceConfig::default() };
        assert!(bad.validate().is_err());
        assert_eq!(PceConfig::for_qubits(4).alpha, 6.0);
    }

    proptest! {
        #[test]
        fn binary_loss_is_sidelobe_energy(bits in prop::collection::vec(prop::bool::ANY, 3..64)) {
            let spins: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
            let x: Vec<f64> = spins.iter().map(|&s| f64::from(s)).collect();
            let seq = BinarySequence::new(spins).unwrap();
            prop_assert_eq!(relaxed_loss(&x, 0.0), sidelobe_energy(&seq) as f64);
        }
    }
}
