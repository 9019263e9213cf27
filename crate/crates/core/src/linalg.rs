//! Small dense complex linear algebra (LU with partial pivoting).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<C64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![C64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i * self.n + j] = v;
    }

    fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
    norm1: f64,
}

impl Lu {
    pub fn factor(m: &Dense) -> Result<Self> {
        let n = m.n;
        let mut lu = m.a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular("zero pivot".into()));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= f * t;
                }
            }
        }
        Ok(Self { n, lu, piv, norm1: m.norm1() })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// 1-norm condition number from the explicit inverse (fine for n <= 64).
    pub fn condition(&self) -> f64 {
        let n = self.n;
        let mut inv_norm: f64 = 0.0;
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|z| z.norm()).sum());
        }
        self.norm1 * inv_norm
    }
}

/// Scale every row of `[A | b]` by its largest entry, then solve.
/// Returns the solution and the condition number of the scaled matrix.
#[allow(clippy::needless_range_loop)]
pub fn solve_scaled(mut m: Dense, mut b: Vec<C64>) -> Result<(Vec<C64>, f64)> {
    let n = m.n;
    for i in 0..n {
        let mut s = b[i].norm();
        for j in 0..n {
            s = s.max(m.get(i, j).norm());
        }
        if s > 0.0 && s.is_finite() {
            for j in 0..n {
                let v = m.get(i, j) / s;
                m.set(i, j, v);
            }
            b[i] /= s;
        }
    }
    let lu = Lu::factor(&m)?;
    let cond = lu.condition();
    Ok((lu.solve(&b), cond))
}
