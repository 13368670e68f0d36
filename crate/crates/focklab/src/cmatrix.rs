//! Small dense complex matrices (n <= 4) and their decompositions.
//!
//! The affine-symbol diagnostics need a complex SVD with tightly controlled
//! tolerances: unit singular values must be detected inside a 1e-10 band and
//! unitarity held to 1e-12. One-sided Jacobi delivers that accuracy at these
//! sizes without forming A*A (which would halve the precision of small
//! singular values).

use crate::error::{LabError, Result};
use crate::point::CPoint;
use num_complex::Complex64;

type C = Complex64;

/// Row-major square complex matrix, n <= 4.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C>,
}

/// Result of `svd`: `a = v * diag(sigma) * w` with `v`, `w` unitary and
/// `sigma` non-increasing and nonnegative.
#[derive(Clone, Debug)]
pub struct Svd {
    pub v: CMatrix,
    pub sigma: Vec<f64>,
    pub w: CMatrix,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > 4 || rows.iter().any(|r| r.len() != n) {
            return Err(LabError::Config("matrix must be square, n in 1..=4".into()));
        }
        Ok(CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diag(entries: &[C]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self[(i, k)];
                for j in 0..self.n {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }

    pub fn scale(&self, s: C) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix-vector product `A z`.
    pub fn apply(&self, z: &CPoint) -> CPoint {
        debug_assert_eq!(self.n, z.n());
        let coords = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self[(i, j)] * z.coords()[j])
                    .sum::<C>()
            })
            .collect();
        CPoint::new(coords).expect("dimension preserved")
    }

    /// Entrywise max-norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<C> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Deviation from unitarity, `max |A* A - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).sub(&CMatrix::identity(self.n)).max_abs()
    }

    /// One-sided Jacobi SVD. Columns of the working copy are orthogonalized by
    /// right rotations; the accumulated rotations give the right factor.
    pub fn svd(&self) -> Result<Svd> {
        let n = self.n;
        // prescale so column norms stay far from the subnormal range
        let prescale = self.max_abs();
        let mut g = if prescale > 0.0 {
            self.scale(C::new(1.0 / prescale, 0.0))
        } else {
            self.clone()
        };
        let mut j_acc = CMatrix::identity(n);

        let tol = 1e-14;
        // post-prescale floor: a column this small is rounding noise, not data
        let zero_tol = 1e-14f64;
        let max_sweeps = 60;
        let mut converged = false;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    // Gram entries of columns p, q
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = C::new(0.0, 0.0);
                    for i in 0..n {
                        alpha += g[(i, p)].norm_sqr();
                        beta += g[(i, q)].norm_sqr();
                        gamma += g[(i, p)].conj() * g[(i, q)];
                    }
                    if alpha <= zero_tol * zero_tol || beta <= zero_tol * zero_tol {
                        continue;
                    }
                    let gm = gamma.norm();
                    if gm == 0.0 || gm <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // zero the off-diagonal of the Hermitian 2x2 [[alpha, gamma], [conj, beta]]
                    let phase = gamma / gm;
                    let tau = (beta - alpha) / (2.0 * gm);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    // col_p' = c*col_p - s*conj(phase)*col_q
                    // col_q' = s*phase*col_p + c*col_q
                    for row in 0..n {
                        let gp = g[(row, p)];
                        let gq = g[(row, q)];
                        g[(row, p)] = gp * c - gq * phase.conj() * s;
                        g[(row, q)] = gp * phase * s + gq * c;
                    }
                    for row in 0..n {
                        let jp = j_acc[(row, p)];
                        let jq = j_acc[(row, q)];
                        j_acc[(row, p)] = jp * c - jq * phase.conj() * s;
                        j_acc[(row, q)] = jp * phase * s + jq * c;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LabError::ConvergenceFailure(
                "one-sided Jacobi SVD did not converge in 60 sweeps".into(),
            ));
        }

        // column norms are the singular values; sort descending
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

        let mut v = CMatrix::zeros(n);
        let mut w_adj = CMatrix::zeros(n); // adjoint of the right factor, columns = j_acc columns
        let mut sigma = Vec::with_capacity(n);
        let mut nnorm = Vec::with_capacity(n); // normalized norms, sorted order
        for (dst, &src) in order.iter().enumerate() {
            sigma.push(norms[src] * prescale);
            nnorm.push(norms[src]);
            for i in 0..n {
                w_adj[(i, dst)] = j_acc[(i, src)];
            }
            if norms[src] > zero_tol {
                for i in 0..n {
                    v[(i, dst)] = g[(i, src)] / norms[src];
                }
            }
        }
        // complete numerically-zero columns of v to a unitary basis: take the
        // axis vector most independent of the kept columns, then
        // re-orthogonalize once (a single Gram-Schmidt pass loses
        // orthogonality when the residual is small)
        for j in 0..n {
            if nnorm[j] > zero_tol {
                continue;
            }
            let orthogonalize = |col: &mut Vec<C>, v: &CMatrix| {
                for jj in 0..n {
                    if jj == j || (nnorm[jj] <= zero_tol && jj > j) {
                        continue;
                    }
                    let proj: C = (0..n).map(|i| v[(i, jj)].conj() * col[i]).sum();
                    for (i, c) in col.iter_mut().enumerate() {
                        *c -= proj * v[(i, jj)];
                    }
                }
            };
            let mut best: Option<(f64, Vec<C>)> = None;
            for k in 0..n {
                let mut col: Vec<C> = (0..n)
                    .map(|i| if i == k { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })
                    .collect();
                orthogonalize(&mut col, &v);
                let nrm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if best.as_ref().map_or(true, |(bn, _)| nrm > *bn) {
                    best = Some((nrm, col));
                }
            }
            let (_, mut col) = best.unwrap();
            orthogonalize(&mut col, &v);
            let nrm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                v[(i, j)] = col[i] / nrm;
            }
        }

        Ok(Svd {
            v,
            sigma,
            w: w_adj.adjoint(),
        })
    }

    /// Eigen-decomposition of a Hermitian matrix by two-sided complex Jacobi.
    /// Returns (eigenvalues, unitary whose columns are eigenvectors), with
    /// `self = Q * diag(lambda) * Q*`. Eigenvalues sorted descending.
    pub fn eigen_hermitian(&self) -> Result<(Vec<f64>, CMatrix)> {
        let n = self.n;
        let mut a = self.clone();
        let mut q = CMatrix::identity(n);
        let scale = self.max_abs().max(1e-300);
        let mut converged = false;
        for _ in 0..120 {
            let mut off = 0.0f64;
            for p in 0..n {
                for r in (p + 1)..n {
                    off = off.max(a[(p, r)].norm());
                }
            }
            if off <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for r in (p + 1)..n {
                    let apr = a[(p, r)];
                    let m = apr.norm();
                    if m <= 1e-18 * scale {
                        continue;
                    }
                    let phase = apr / m;
                    let app = a[(p, p)].re;
                    let arr = a[(r, r)].re;
                    let tau = (arr - app) / (2.0 * m);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    // columns: similar rotation on both sides
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let air = a[(i, r)];
                        a[(i, p)] = aip * c - air * phase.conj() * s;
                        a[(i, r)] = aip * phase * s + air * c;
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let arj = a[(r, j)];
                        a[(p, j)] = apj * c - arj * phase * s;
                        a[(r, j)] = apj * phase.conj() * s + arj * c;
                    }
                    for i in 0..n {
                        let qip = q[(i, p)];
                        let qir = q[(i, r)];
                        q[(i, p)] = qip * c - qir * phase.conj() * s;
                        q[(i, r)] = qip * phase * s + qir * c;
                    }
                }
            }
        }
        if !converged {
            return Err(LabError::ConvergenceFailure(
                "Hermitian Jacobi did not converge".into(),
            ));
        }
        let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        let mut qs = CMatrix::zeros(n);
        let mut vals = Vec::with_capacity(n);
        for (dst, &(val, src)) in pairs.iter().enumerate() {
            vals.push(val);
            for i in 0..n {
                qs[(i, dst)] = q[(i, src)];
            }
        }
        Ok((vals, qs))
    }

    /// Eigenvalues of a normal matrix (entrywise |A*A - AA*| <= tol required),
    /// via simultaneous diagonalization of its Hermitian and anti-Hermitian
    /// parts. Returns `None` if the matrix is not normal at tolerance `tol`.
    pub fn eigen_normal(&self, tol: f64) -> Option<Vec<C>> {
        let comm = self
            .adjoint()
            .mul(self)
            .sub(&self.mul(&self.adjoint()))
            .max_abs();
        let scale = self.max_abs().max(1.0);
        if comm > tol * scale * scale {
            return None;
        }
        let h = self.add_m(&self.adjoint()).scale(C::new(0.5, 0.0));
        let k = self
            .sub(&self.adjoint())
            .scale(C::new(0.0, -0.5));
        // generic Hermitian combination separates joint eigenspaces
        let t = 0.7316843;
        let m = h.add_m(&k.scale(C::new(t, 0.0)));
        let (_, qx) = m.eigen_hermitian().ok()?;
        // Rayleigh quotients of A in the joint eigenbasis
        let mut vals = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let col = qx.column(j);
            let p = CPoint::new(col).ok()?;
            let ap = self.apply(&p);
            vals.push(ap.inner(&p));
        }
        // verify the basis actually diagonalizes A
        let qadj = qx.adjoint();
        let d = qadj.mul(self).mul(&qx);
        let mut off = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off > 1e-8 * scale {
            return None;
        }
        Some(vals)
    }

    fn add_m(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.n + j]
    }
}

// JSON form: rows of [re, im] pairs, matching the CPoint convention.
impl serde::Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> serde::Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(de)?;
        let complex_rows: Vec<Vec<C>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(&complex_rows).map_err(serde::de::Error::custom)
    }
}

/// Deterministic "seeded" unitary: product of Givens-type rotations with fixed
/// angles derived from the seed. Exactly reproducible across platforms.
pub fn seeded_unitary(n: usize, seed: u64) -> CMatrix {
    let mut u = CMatrix::identity(n);
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for p in 0..n {
        for q in (p + 1)..n {
            let theta = next() * std::f64::consts::PI;
            let phi = next() * std::f64::consts::TAU - std::f64::consts::PI;
            let (c, s) = (theta.cos(), theta.sin());
            let ph = C::from_polar(1.0, phi);
            let mut r = CMatrix::identity(n);
            r[(p, p)] = C::new(c, 0.0);
            r[(p, q)] = ph * s;
            r[(q, p)] = -ph.conj() * s;
            r[(q, q)] = C::new(c, 0.0);
            u = u.mul(&r);
        }
    }
    // one more diagonal phase layer
    for i in 0..n {
        let phi = next() * std::f64::consts::TAU - std::f64::consts::PI;
        for row in 0..n {
            let v = u[(row, i)];
            u[(row, i)] = v * C::from_polar(1.0, phi);
        }
    }
    u
}
