//! Dense statevector simulation of the brickwork ansatz.
//!
//! Basis index bit `q` is the state of qubit `q`. Every parameterized gate is
//! `exp(-i θ G / 2)` with `G` one of `X`, `Y`, `Z` or `X⊗X`, so the
//! parameter-shift rule with shifts `±π/2` is exact.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SIM_QUBITS {
            return Err(Error::Refused(format!("qubit count {n} outside 1..={MAX_SIM_QUBITS}")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not a power of two >= 2")));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_SIM_QUBITS {
            return Err(Error::Refused(format!("qubit count {n} exceeds {MAX_SIM_QUBITS}")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("amplitudes have zero or non-finite norm"));
        }
        Ok(Self { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Debug dump as `[[re, im], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.amps.iter().map(|a| serde_json::json!([a.re, a.im])).collect(),
        )
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::IndexOutOfRange { index: q, len: self.n })
        } else {
            Ok(())
        }
    }

    /// Single-qubit rotation `exp(-i θ σ_axis / 2)`.
    pub fn apply_rotation(&mut self, axis: Axis, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(axis, qubit, theta);
        Ok(())
    }

    fn rotate(&mut self, axis: Axis, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = match axis {
            Axis::X => [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]],
            Axis::Y => [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]],
            Axis::Z => [[Complex64::new(c, -s), ZERO], [ZERO, Complex64::new(c, s)]],
        };
        self.apply_single(qubit, &m);
    }

    fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let bit = 1usize << qubit;
        for k in 0..self.amps.len() {
            if k & bit == 0 {
                let a0 = self.amps[k];
                let a1 = self.amps[k | bit];
                self.amps[k] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[k | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Mølmer–Sørensen gate `exp(-i θ X⊗X / 2)` on `(q1, q2)`.
    pub fn apply_ms(&mut self, q1: usize, q2: usize, theta: f64) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::invalid("MS gate needs two distinct qubits"));
        }
        self.ms(q1, q2, theta);
        Ok(())
    }

    fn ms(&mut self, q1: usize, q2: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let flip = (1usize << q1) | (1usize << q2);
        let low = 1usize << q1.min(q2);
        // each pair {k, k ^ flip} is visited once, from the member with the lower qubit clear
        for k in 0..self.amps.len() {
            if k & low == 0 {
                let j = k ^ flip;
                let a = self.amps[k];
                let b = self.amps[j];
                self.amps[k] = Complex64::new(c * a.re + s * b.im, c * a.im - s * b.re);
                self.amps[j] = Complex64::new(c * b.re + s * a.im, c * b.im - s * a.re);
            }
        }
    }

    pub(crate) fn apply_gate(&mut self, gate: &GateOp, theta: f64) {
        match *gate {
            GateOp::Rotation { axis, qubit } => self.rotate(axis, qubit, theta),
            GateOp::Ms { q1, q2 } => self.ms(q1, q2, theta),
        }
    }

    /// Exact `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: p.num_qubits() });
        }
        Ok(self.expectation_unchecked(p))
    }

    pub(crate) fn expectation_unchecked(&self, p: &PauliString) -> f64 {
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        // P|k⟩ = i^{#Y} (-1)^{|k & z|} |k ^ x⟩
        let mut acc = ZERO;
        if x == 0 {
            let mut re = 0.0;
            for (k, a) in self.amps.iter().enumerate() {
                let w = a.norm_sqr();
                re += if (k & z).count_ones() % 2 == 0 { w } else { -w };
            }
            acc.re = re;
        } else {
            for (k, a) in self.amps.iter().enumerate() {
                let term = self.amps[k ^ x].conj() * a;
                if (k & z).count_ones() % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
        }
        let phased = match p.y_count() % 4 {
            0 => acc,
            1 => acc * Complex64::i(),
            2 => -acc,
            _ => -acc * Complex64::i(),
        };
        debug_assert!(phased.im.abs() < 1e-10, "Pauli expectation has imaginary part {}", phased.im);
        phased.re
    }

    /// Empirical mean of `shots` simulated measurements of `P`.
    ///
    /// Rotates each support qubit into the `Z` basis (`H` for `X`, `H S†`
    /// for `Y`), samples computational-basis outcomes, and averages the
    /// parity of the support bits.
    pub fn sampled_expectation<R: Rng + ?Sized>(&self, p: &PauliString, shots: u64, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::invalid("shot count must be positive"));
        }
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: p.num_qubits() });
        }
        let mut rotated = self.clone();
        let h = [[Complex64::new(FRAC_1_SQRT_2, 0.0); 2], [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)]];
        let hs_dag = [
            [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, -FRAC_1_SQRT_2)],
            [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)],
        ];
        for q in 0..self.n {
            match (p.x_mask() >> q & 1, p.z_mask() >> q & 1) {
                (1, 0) => rotated.apply_single(q, &h),
                (1, 1) => rotated.apply_single(q, &hs_dag),
                _ => {}
            }
        }
        let support = (p.x_mask() | p.z_mask()) as usize;
        let mut even = 0.0;
        let mut odd = 0.0;
        for (k, a) in rotated.amps.iter().enumerate() {
            if (k & support).count_ones() % 2 == 0 {
                even += a.norm_sqr();
            } else {
                odd += a.norm_sqr();
            }
        }
        if odd == 0.0 {
            return Ok(1.0);
        }
        if even == 0.0 {
            return Ok(-1.0);
        }
        let weights: Vec<f64> = rotated.amps.iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::Runtime(e.to_string()))?;
        let mut total: i64 = 0;
        for _ in 0..shots {
            let k = dist.sample(rng);
            total += if (k & support).count_ones() % 2 == 0 { 1 } else { -1 };
        }
        Ok(total as f64 / shots as f64)
    }
}

/// A gate slot in the ansatz; its angle comes from the parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum GateOp {
    Rotation { axis: Axis, qubit: usize },
    Ms { q1: usize, q2: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    /// Index into the parameter vector.
    pub param: usize,
}

/// Parameter vector element type is plain `f64` radians.
pub type ParamVector = Vec<f64>;

/// Brickwork ansatz description.
///
/// Each layer applies one rotation per `(axis, qubit)` for the configured
/// axes, then a brick of MS gates: pairs `(0,1), (2,3), ...` on even layers
/// and `(1,2), (3,4), ...` on odd layers, plus the wraparound `(n-1, 0)`
/// when `n` is even. Every gate owns its own parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n: usize,
    pub layers: usize,
    pub rotation_axes: Vec<Axis>,
    #[serde(skip)]
    gates: Vec<Gate>,
    #[serde(skip)]
    num_params: usize,
}

impl AnsatzSpec {
    /// Default layout: `RX` and `RY` on every qubit, then the MS brick.
    pub fn brickwork(n: usize, layers: usize) -> Result<Self> {
        Self::with_axes(n, layers, vec![Axis::X, Axis::Y])
    }

    pub fn with_axes(n: usize, layers: usize, rotation_axes: Vec<Axis>) -> Result<Self> {
        if n == 0 || n > MAX_SIM_QUBITS {
            return Err(Error::Refused(format!("qubit count {n} outside 1..={MAX_SIM_QUBITS}")));
        }
        let mut spec = Self { n, layers, rotation_axes, gates: Vec::new(), num_params: 0 };
        spec.build();
        Ok(spec)
    }

    /// Rebuilds the gate list after deserialization.
    pub fn rebuilt(mut self) -> Result<Self> {
        if self.n == 0 || self.n > MAX_SIM_QUBITS {
            return Err(Error::Refused(format!("qubit count {} outside 1..={MAX_SIM_QUBITS}", self.n)));
        }
        self.build();
        Ok(self)
    }

    fn build(&mut self) {
        let n = self.n;
        let mut gates = Vec::new();
        for layer in 0..self.layers {
            for &axis in &self.rotation_axes {
                for qubit in 0..n {
                    gates.push(GateOp::Rotation { axis, qubit });
                }
            }
            for (q1, q2) in brick_pairs(n, layer) {
                gates.push(GateOp::Ms { q1, q2 });
            }
        }
        self.gates = gates.into_iter().enumerate().map(|(param, op)| Gate { op, param }).collect();
        self.num_params = self.gates.len();
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g.op, GateOp::Ms { .. })).count()
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(Error::DimensionMismatch { expected: self.num_params, actual: theta.len() });
        }
        Ok(())
    }
}

/// MS pairs of one brick layer.
pub fn brick_pairs(n: usize, layer: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    if layer % 2 == 0 {
        (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect()
    } else {
        let mut pairs: Vec<(usize, usize)> = (0..(n - 1) / 2).map(|k| (2 * k + 1, 2 * k + 2)).collect();
        if n % 2 == 0 && n > 2 {
            pairs.push((n - 1, 0));
        }
        pairs
    }
}

/// Output state of the ansatz from `|0...0⟩`.
pub fn run_ansatz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Statevector> {
    spec.check_params(theta)?;
    let mut state = Statevector::zero(spec.n)?;
    for gate in &spec.gates {
        state.apply_gate(&gate.op, theta[gate.param]);
    }
    Ok(state)
}

/// `⟨λ|G|φ⟩` for the generator `G` of `op`.
fn generator_overlap(lambda: &[Complex64], phi: &[Complex64], op: &GateOp) -> Complex64 {
    let mut acc = ZERO;
    match *op {
        GateOp::Rotation { axis, qubit } => {
            let bit = 1usize << qubit;
            for k in 0..phi.len() {
                let term = match axis {
                    Axis::X => phi[k ^ bit],
                    // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                    Axis::Y if k & bit == 0 => Complex64::new(phi[k | bit].im, -phi[k | bit].re),
                    Axis::Y => Complex64::new(-phi[k & !bit].im, phi[k & !bit].re),
                    Axis::Z if k & bit == 0 => phi[k],
                    Axis::Z => -phi[k],
                };
                acc += lambda[k].conj() * term;
            }
        }
        GateOp::Ms { q1, q2 } => {
            let flip = (1usize << q1) | (1usize << q2);
            for k in 0..phi.len() {
                acc += lambda[k].conj() * phi[k ^ flip];
            }
        }
    }
    acc
}

/// Adds `w P|ψ⟩` into `out`.
fn accumulate_pauli(out: &mut [Complex64], psi: &[Complex64], p: &PauliString, w: f64) {
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    let phase = match p.y_count() % 4 {
        0 => ONE,
        1 => Complex64::i(),
        2 => -ONE,
        _ => -Complex64::i(),
    } * w;
    for (k, a) in psi.iter().enumerate() {
        let term = phase * a;
        if (k & z).count_ones() % 2 == 0 {
            out[k ^ x] += term;
        } else {
            out[k ^ x] -= term;
        }
    }
}

/// Gradient of `Σ_i w_i ⟨Π_i⟩` at `theta` by one backward sweep.
///
/// For `V = exp(-i θ G / 2)` the shift-rule difference
/// `(⟨M⟩(θ + π/2) − ⟨M⟩(θ − π/2)) / 2` equals `Im ⟨λ|G|φ⟩`, where `φ` is
/// the state after the gate and `λ` is `M|ψ⟩` pulled back through the later
/// gates. `output` must be the ansatz output at `theta`.
pub(crate) fn adjoint_gradient(spec: &AnsatzSpec, theta: &[f64], output: &Statevector, observable: &[(PauliString, f64)]) -> Vec<f64> {
    let mut phi = output.clone();
    let mut lambda = Statevector { n: output.n, amps: vec![ZERO; output.amps.len()] };
    for (p, w) in observable {
        accumulate_pauli(&mut lambda.amps, &output.amps, p, *w);
    }
    let mut grad = vec![0.0; spec.num_params()];
    for gate in spec.gates.iter().rev() {
        let angle = theta[gate.param];
        grad[gate.param] += generator_overlap(&lambda.amps, &phi.amps, &gate.op).im;
        phi.apply_gate(&gate.op, -angle);
        lambda.apply_gate(&gate.op, -angle);
    }
    grad
}
