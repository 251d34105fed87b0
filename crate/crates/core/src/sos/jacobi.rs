//! Cyclic Jacobi eigendecomposition for symmetric `f64` matrices.
//!
//! Small dense matrices only (Gram bases at desk scale); robustness
//! matters more than peak speed here.

/// Symmetric matrix in flat row-major storage.
#[derive(Clone, Debug)]
pub struct SymMat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn eye(n: usize, scale: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = scale;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frob_dist(&self, other: &SymMat) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Eigenvalues and eigenvectors (columns of `v`) of a symmetric matrix.
pub fn eigh(m: &SymMat) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.a.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let max_sweeps = 30;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frob(&a, n)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- J^T A J on rows/cols p,q
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
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w = (0..n).map(|i| a[i * n + i]).collect();
    (w, v)
}

fn frob(a: &[f64], n: usize) -> f64 {
    let _ = n;
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Project onto `{ Q : Q >= floor * I }` by eigenvalue clipping.
pub fn psd_project(m: &SymMat, floor: f64) -> SymMat {
    let n = m.n;
    let (w, v) = eigh(m);
    let mut out = SymMat::zeros(n);
    for k in 0..n {
        let lam = w[k].max(floor);
        if lam == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[i * n + k];
            if vik == 0.0 {
                continue;
            }
            for j in i..n {
                out.a[i * n + j] += lam * vik * v[j * n + k];
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            out.a[j * n + i] = out.a[i * n + j];
        }
    }
    out
}

/// Smallest eigenvalue (for diagnostics and convergence checks).
pub fn min_eig(m: &SymMat) -> f64 {
    eigh(m).0.into_iter().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_diag() {
        let mut m = SymMat::zeros(3);
        m.set(0, 0, 3.0);
        m.set(1, 1, -1.0);
        m.set(2, 2, 0.5);
        let (mut w, _) = eigh(&m);
        w.sort_by(f64::total_cmp);
        assert!((w[0] + 1.0).abs() < 1e-12);
        assert!((w[1] - 0.5).abs() < 1e-12);
        assert!((w[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn project_clips_negative_part() {
        let mut m = SymMat::zeros(2);
        m.set(0, 0, 1.0);
        m.set(1, 1, 1.0);
        m.set(0, 1, 2.0);
        let p = psd_project(&m, 0.0);
        assert!(min_eig(&p) > -1e-12);
        // the positive eigenvalue 3 with eigenvector (1,1)/sqrt2 survives
        assert!((p.get(0, 0) - 1.5).abs() < 1e-10);
        assert!((p.get(0, 1) - 1.5).abs() < 1e-10);
    }
}
