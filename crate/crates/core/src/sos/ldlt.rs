//! Exact LDL^T factorization of symmetric rational matrices with symmetric
//! pivoting, used both as the final PSD gate of the SOS pipeline and as a
//! standalone check with a negativity witness.

use crate::{rint, Rat};
use num_traits::{Signed, Zero};

/// Unit-lower factor, pivots, and the symmetric permutation applied:
/// `P M P^T = L D L^T` with `P` mapping new index `k` to original
/// `perm[k]`.
#[derive(Clone, Debug)]
pub struct Ldlt {
    pub perm: Vec<usize>,
    pub lower: Vec<Vec<Rat>>,
    pub pivots: Vec<Rat>,
}

pub enum PsdOutcome {
    Psd(Ldlt),
    /// A vector `v` with `v^T M v < 0`.
    NotPsd(Vec<Rat>),
}

/// Factor a symmetric PSD matrix, or produce an exact negativity witness.
pub fn psd_check_exact(m: &[Vec<Rat>]) -> PsdOutcome {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut lower = vec![vec![Rat::zero(); n]; n];
    for (i, row) in lower.iter_mut().enumerate() {
        row[i] = rint(1);
    }
    let mut pivots: Vec<Rat> = Vec::with_capacity(n);

    for k in 0..n {
        // symmetric pivot: bring the largest remaining diagonal entry to k
        let p = (k..n)
            .max_by(|&i, &j| a[i][i].cmp(&a[j][j]))
            .unwrap();
        if p != k {
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            perm.swap(k, p);
            // swap the already-computed parts of L (columns 0..k of rows k,p)
            for col in 0..k {
                let tmp = lower[k][col].clone();
                lower[k][col] = lower[p][col].clone();
                lower[p][col] = tmp;
            }
        }
        let piv = a[k][k].clone();
        if piv.is_negative() {
            return PsdOutcome::NotPsd(witness(&lower, &perm, k, None, n));
        }
        if piv.is_zero() {
            // whole remaining diagonal is <= 0 here; PSD additionally needs
            // the entire row to vanish
            if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                return PsdOutcome::NotPsd(witness(&lower, &perm, k, Some((j, a[k][j].clone(), a[j][j].clone())), n));
            }
            pivots.push(Rat::zero());
            continue;
        }
        pivots.push(piv.clone());
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &piv;
            lower[i][k] = factor.clone();
            for j in k..n {
                let sub = &factor * &a[k][j];
                a[i][j] = &a[i][j] - &sub;
            }
        }
    }
    // pad pivots for skipped zero columns
    while pivots.len() < n {
        pivots.push(Rat::zero());
    }
    PsdOutcome::Psd(Ldlt {
        perm,
        lower,
        pivots,
    })
}

/// Build `v` with `v^T M v < 0` from the partial factorization: at stage
/// `k` we have `P M P^T = L (D ⊕ S) L^T` with `S` the Schur complement,
/// so a Schur-space direction `u` with `u^T S u < 0` pulls back through
/// `L^T w = u` and the permutation.
fn witness(
    lower: &[Vec<Rat>],
    perm: &[usize],
    k: usize,
    zero_diag: Option<(usize, Rat, Rat)>,
    n: usize,
) -> Vec<Rat> {
    let mut u = vec![Rat::zero(); n];
    match zero_diag {
        // S[k][k] < 0: take e_k.
        None => u[k] = rint(1),
        // S[k][k] = 0, S[k][j] != 0, and S[j][j] <= 0 (the pivot was the
        // maximal diagonal): u = e_k - sign(S[k][j]) e_j gives
        // u^T S u = -2|S[k][j]| + S[j][j] < 0.
        Some((j, akj, _ajj)) => {
            u[k] = rint(1);
            u[j] = -akj.signum();
        }
    }
    let w = solve_lt(lower, &u);
    let mut v = vec![Rat::zero(); n];
    for i in 0..n {
        v[perm[i]] = w[i].clone();
    }
    v
}

/// Solve `L^T w = u` exactly for unit lower triangular `L`.
pub fn solve_lt(lower: &[Vec<Rat>], u: &[Rat]) -> Vec<Rat> {
    let n = u.len();
    let mut w = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut v = u[i].clone();
        for r in i + 1..n {
            let sub = &lower[r][i] * &w[r];
            v = v - sub;
        }
        w[i] = v;
    }
    w
}

/// Quadratic form `v^T M v`.
pub fn quad_form(m: &[Vec<Rat>], v: &[Rat]) -> Rat {
    let n = v.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if v[j].is_zero() {
                continue;
            }
            acc += &v[i] * &m[i][j] * &v[j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rint(v)).collect())
            .collect()
    }

    #[test]
    fn identity_is_psd() {
        let id = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(matches!(psd_check_exact(&id), PsdOutcome::Psd(_)));
    }

    #[test]
    fn indefinite_with_witness() {
        let a = m(&[&[1, 2], &[2, 1]]);
        match psd_check_exact(&a) {
            PsdOutcome::NotPsd(v) => {
                assert!(quad_form(&a, &v) < Rat::zero(), "witness not negative");
            }
            PsdOutcome::Psd(_) => panic!("[[1,2],[2,1]] reported PSD"),
        }
    }

    #[test]
    fn rank_deficient_psd() {
        // Gram of (x+y)^2 in basis {x,y}
        let a = m(&[&[1, 1], &[1, 1]]);
        match psd_check_exact(&a) {
            PsdOutcome::Psd(f) => {
                assert_eq!(f.pivots, vec![rint(1), rint(0)]);
            }
            PsdOutcome::NotPsd(_) => panic!("PSD matrix rejected"),
        }
    }

    #[test]
    fn zero_diag_nonzero_row_rejected() {
        let a = m(&[&[0, 1], &[1, 0]]);
        match psd_check_exact(&a) {
            PsdOutcome::NotPsd(v) => assert!(quad_form(&a, &v) < Rat::zero()),
            PsdOutcome::Psd(_) => panic!("hyperbolic form reported PSD"),
        }
    }

    #[test]
    fn factorization_reconstructs() {
        let a = vec![
            vec![rint(4), rint(2), rint(0)],
            vec![rint(2), rint(5), rint(1)],
            vec![rint(0), rint(1), rat(9, 2)],
        ];
        match psd_check_exact(&a) {
            PsdOutcome::Psd(f) => {
                let n = 3;
                // rebuild P M P^T from L D L^T and compare
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = Rat::zero();
                        for k in 0..n {
                            acc += &f.lower[i][k] * &f.pivots[k] * &f.lower[j][k];
                        }
                        assert_eq!(acc, a[f.perm[i]][f.perm[j]]);
                    }
                }
            }
            PsdOutcome::NotPsd(_) => panic!("PSD matrix rejected"),
        }
    }
}
