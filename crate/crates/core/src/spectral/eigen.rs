//! Dense symmetric eigenvalue solvers.
//!
//! The search path uses Householder tridiagonalization followed by implicit
//! QL with Wilkinson-style shifts. Cyclic Jacobi is slower but converges to
//! near machine precision on every eigenvalue; verification uses it as an
//! independent second route.

use crate::error::{invalid, Result};

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix by evaluating `entry(i, j)` once per unordered pair
    /// `i <= j`, so the result is bit-exactly symmetric.
    pub fn from_upper(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = entry(i, j);
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        SymMatrix { n, data }
    }

    /// Checks exact symmetry and finiteness of a row-major buffer.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid(format!("expected {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            for j in 0..n {
                let x = data[i * n + j];
                if !x.is_finite() {
                    return Err(invalid(format!("entry ({i},{j}) is not finite")));
                }
                if j > i && x != data[j * n + i] {
                    return Err(invalid(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("matrix is not square"));
        }
        Self::from_row_major(n, rows.concat())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// Real eigenvalues sorted descending, `values[0] = λ1 >= ... >= λn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    scale: f64,
}

impl Spectrum {
    /// Wraps arbitrary values, sorting them descending. The tolerance scale
    /// is taken from the largest magnitude.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Spectrum { values, scale }
    }

    fn with_scale(values: Vec<f64>, scale: f64) -> Self {
        let mut s = Self::from_values(values);
        s.scale = s.scale.max(scale);
        s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖m‖∞` of the source matrix (at least the spectral radius).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn largest(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn smallest(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// λ2, counted with multiplicity.
    pub fn second_largest(&self) -> Option<f64> {
        self.values.get(1).copied()
    }

    /// λ_{n-1}, counted with multiplicity.
    pub fn second_smallest(&self) -> Option<f64> {
        let n = self.values.len();
        (n >= 2).then(|| self.values[n - 2])
    }

    /// Default threshold below which an eigenvalue counts as zero.
    pub fn zero_tolerance(&self) -> f64 {
        1e-9 * self.scale.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EigenMethod {
    #[default]
    TridiagonalQl,
    Jacobi,
}

/// Full spectrum of `m` via tridiagonal QL.
pub fn eigenvalues(m: &SymMatrix) -> Result<Spectrum> {
    eigenvalues_with(m, EigenMethod::TridiagonalQl)
}

pub fn eigenvalues_with(m: &SymMatrix, method: EigenMethod) -> Result<Spectrum> {
    if m.n == 0 {
        return Err(invalid("eigenvalues of an empty matrix"));
    }
    let values = match method {
        EigenMethod::TridiagonalQl => {
            let (mut d, mut e) = tridiagonalize(m);
            if tridiagonal_ql(&mut d, &mut e) {
                d
            } else {
                jacobi(m)
            }
        }
        EigenMethod::Jacobi => jacobi(m),
    };
    Ok(Spectrum::with_scale(values, m.inf_norm()))
}

/// Householder reduction to tridiagonal form. Returns the diagonal and the
/// subdiagonal (`e[i]` couples rows `i-1` and `i`; `e[0] = 0`).
fn tridiagonalize(m: &SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let at = |i: usize, j: usize| i * n + j;

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[at(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] /= scale;
                    h += a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[at(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[at(j, k)] * a[at(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[at(k, j)] * a[at(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[at(j, k)] -= f * e[k] + g * a[at(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[at(i, i)];
    }
    e[0] = 0.0;
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix. Overwrites `d` with the
/// eigenvalues (unsorted). Returns `false` if some eigenvalue failed to
/// converge.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    if n == 1 {
        return true;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
fn jacobi(m: &SymMatrix) -> Vec<f64> {
    let n = m.n;
    let mut a = m.data.clone();
    let total = m.frobenius_sq();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
