//! Dense-matrix oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn pauli_matrix(ch: char) -> Matrix {
    match ch {
        'I' => identity(2),
        'X' => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        'Y' => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        'Z' => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
        _ => panic!("not a Pauli letter: {ch}"),
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Full operator for a Pauli text where character `q` acts on qubit `q`;
/// qubit 0 is the least significant index bit, so it is the rightmost factor.
pub fn pauli_operator(text: &str) -> Matrix {
    text.chars().fold(identity(1), |acc, ch| kron(&pauli_matrix(ch), &acc))
}

/// `σ` on `qubit` of an `n`-qubit register.
pub fn single_site(n: usize, qubit: usize, ch: char) -> Matrix {
    let text: String = (0..n).map(|q| if q == qubit { ch } else { 'I' }).collect();
    pauli_operator(&text)
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `exp(-i θ G / 2) = cos(θ/2) I − i sin(θ/2) G` for an involutory `G`.
pub fn exp_generator(g: &Matrix, theta: f64) -> Matrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let id = identity(g.len());
    (0..g.len())
        .map(|i| (0..g.len()).map(|j| id[i][j] * co + g[i][j] * c(0.0, -s)).collect())
        .collect()
}

/// `⟨v|M|v⟩`.
pub fn expectation(m: &Matrix, v: &[Complex64]) -> Complex64 {
    let mv = apply(m, v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

/// Every non-identity Pauli text on `n` qubits.
pub fn all_pauli_texts(n: usize) -> Vec<String> {
    (1..4usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let ch = ['I', 'X', 'Y', 'Z'][code % 4];
                    code /= 4;
                    ch
                })
                .collect()
        })
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Median with the mean of the two middle values for even counts.
pub fn median_u64(values: &[u64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2] as f64
    } else {
        (v[m / 2 - 1] + v[m / 2]) as f64 / 2.0
    }
}
