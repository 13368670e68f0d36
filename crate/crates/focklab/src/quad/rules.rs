//! Gaussian quadrature rules generated by Golub-Welsch.
//!
//! Nodes and weights come from the symmetric tridiagonal Jacobi matrix of the
//! orthogonal-polynomial recurrence; eigenvalues are the nodes and the squared
//! first eigenvector components (scaled by the weight-function mass) are the
//! weights. Rules are cached per order since the eigensolve is the only
//! nontrivial cost.

use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// One-dimensional rule: integral of f(x) w(x) dx ~= sum w_i f(x_i).
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
    }
    for i in 0..n - 1 {
        j[(i, i + 1)] = offdiag[i];
        j[(i + 1, i)] = offdiag[i];
    }
    let eig = j.symmetric_eigen();
    let mut nodes: Vec<f64> = (0..n).map(|k| eig.eigenvalues[k]).collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Weights via the Christoffel function 1 / sum_j p_j(x)^2 with the
    // orthonormal recurrence. The eigenvector-based formula mu0 * v0^2 loses
    // all relative accuracy at extreme nodes (true weights ~e^{-x^2} sit far
    // below the eigensolver's absolute error floor), which matters because
    // the integrator divides the weight function back out per node.
    let p0 = 1.0 / mu0.sqrt();
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = 0.0f64;
            let mut p = p0;
            let mut sum = p * p;
            for jj in 1..n {
                let b_cur = offdiag[jj - 1];
                let b_prev = if jj >= 2 { offdiag[jj - 2] } else { 0.0 };
                let p_next = ((x - diag[jj - 1]) * p - b_prev * p_prev) / b_cur;
                p_prev = p;
                p = p_next;
                sum += p * p;
            }
            1.0 / sum
        })
        .collect();
    Rule { nodes, weights }
}

/// Gauss-Hermite for weight e^{-x^2} on the real line (physicists' form).
pub fn gauss_hermite(order: usize) -> &'static Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(order).or_insert_with(|| {
        assert!(order >= 1, "quadrature order must be positive");
        let diag = vec![0.0; order];
        let offdiag: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
        Box::leak(Box::new(golub_welsch(
            &diag,
            &offdiag,
            std::f64::consts::PI.sqrt(),
        )))
    })
}

/// Gauss-Legendre on [-1, 1] with weight 1.
pub fn gauss_legendre(order: usize) -> &'static Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(order).or_insert_with(|| {
        assert!(order >= 1, "quadrature order must be positive");
        let diag = vec![0.0; order];
        let offdiag: Vec<f64> = (1..order)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        Box::leak(Box::new(golub_welsch(&diag, &offdiag, 2.0)))
    })
}

/// Gauss-Legendre mapped to [a, b].
pub fn legendre_on(order: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Rule {
        nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: base.weights.iter().map(|&w| w * half).collect(),
    }
}
