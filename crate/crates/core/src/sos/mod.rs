//! Sum-of-squares detection and exactly verifiable decompositions.
//!
//! Pipeline: support-reduced Gram basis, floored alternating projections
//! between the PSD cone and the affine coefficient constraints (in `f64`),
//! rational rounding with exact re-projection onto the constraints, and an
//! exact LDL^T positive-semidefiniteness gate. A decomposition is only ever
//! returned after `verify_sos` holds by exact expansion, and "not a sum of
//! squares" is only ever returned with an exact witness.

pub mod jacobi;
pub mod ldlt;

use crate::monomial::Monomial;
use crate::{rint, Error, Int, Poly, Rat};
use jacobi::SymMat;
use ldlt::{psd_check_exact, Ldlt, PsdOutcome};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Weighted-square decomposition, optionally with the exact Gram matrix
/// that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SosDecomposition {
    /// `target = sum_i weight_i * poly_i^2` with every weight positive.
    pub squares: Vec<(Rat, Poly)>,
    pub gram: Option<GramCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramCertificate {
    pub basis: Vec<Monomial>,
    pub matrix: Vec<Vec<Rat>>,
}

impl SosDecomposition {
    pub fn zero() -> Self {
        SosDecomposition {
            squares: Vec::new(),
            gram: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.squares.is_empty()
    }

    /// `c * 1^2` for a positive constant.
    pub fn positive_constant(n: usize, c: Rat) -> Self {
        assert!(c.is_positive());
        SosDecomposition {
            squares: vec![(c, Poly::one(n))],
            gram: None,
        }
    }

    pub fn single_square(weight: Rat, p: Poly) -> Self {
        assert!(weight.is_positive());
        SosDecomposition {
            squares: vec![(weight, p)],
            gram: None,
        }
    }

    /// Exact expansion `sum w p^2`.
    pub fn expand(&self, n: usize) -> Poly {
        let mut acc = Poly::zero(n);
        for (w, p) in &self.squares {
            acc = acc.add(&p.mul(p).scale(w));
        }
        acc
    }

    pub fn add(&self, other: &SosDecomposition) -> SosDecomposition {
        let mut squares = self.squares.clone();
        squares.extend(other.squares.iter().cloned());
        SosDecomposition {
            squares,
            gram: None,
        }
    }

    pub fn scale(&self, c: &Rat) -> SosDecomposition {
        assert!(c.is_positive());
        SosDecomposition {
            squares: self
                .squares
                .iter()
                .map(|(w, p)| (w * c, p.clone()))
                .collect(),
            gram: None,
        }
    }

    /// Product of two decompositions: `(sum w p^2)(sum u q^2)`.
    pub fn product(&self, other: &SosDecomposition, n: usize) -> SosDecomposition {
        let mut squares = Vec::new();
        for (w, p) in &self.squares {
            for (u, q) in &other.squares {
                squares.push((w * u, p.mul(q)));
            }
        }
        let _ = n;
        SosDecomposition {
            squares,
            gram: None,
        }
    }

    pub fn max_square_degree(&self) -> u32 {
        self.squares
            .iter()
            .filter_map(|(_, p)| p.degree().map(|d| 2 * d))
            .max()
            .unwrap_or(0)
    }
}

/// `c * |X|^{2m}` as an explicit decomposition: a single square for even
/// `m`, else `sum_i (x_i s^{(m-1)/2})^2`.
pub fn sos_of_norm_power(n: usize, c: &Rat, m: u32) -> SosDecomposition {
    assert!(c.is_positive());
    let s: Poly = crate::poly::norm_sq(n);
    if m % 2 == 0 {
        SosDecomposition::single_square(c.clone(), s.pow(m / 2))
    } else {
        let half = s.pow((m - 1) / 2);
        let squares = (0..n)
            .map(|i| (c.clone(), Poly::var(n, i).mul(&half)))
            .collect();
        SosDecomposition {
            squares,
            gram: None,
        }
    }
}

/// True iff `sum w p^2` equals `f` exactly and all weights are
/// non-negative.
pub fn verify_sos(f: &Poly, d: &SosDecomposition) -> bool {
    if d.squares.iter().any(|(w, _)| w.is_negative()) {
        return false;
    }
    d.expand(f.nvars()) == *f
}

/// Candidate Gram basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBasis {
    pub monomials: Vec<Monomial>,
}

/// Degree/parity filter plus the classical iterated support reduction:
/// drop `m` whenever `2m` is neither in the support nor expressible as
/// `m1 + m2` with distinct basis members.
pub fn gram_basis(f: &Poly) -> Result<GramBasis, Error> {
    let deg = f.degree().unwrap_or(0);
    if deg % 2 == 1 {
        return Err(Error::stage("gram_basis", "odd total degree"));
    }
    let n = f.nvars();
    let half = deg / 2;
    let per_var: Vec<u32> = (0..n).map(|i| f.degree_in(i) / 2).collect();
    let supp: BTreeSet<Vec<u32>> = f.terms().map(|(m, _)| m.0.clone()).collect();

    // enumerate candidates under total and per-variable caps
    let mut cands: Vec<Vec<u32>> = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        if cur.iter().sum::<u32>() <= half {
            cands.push(cur.clone());
        }
        // odometer with per-variable caps
        let mut i = 0;
        loop {
            if i == n {
                let mut set: BTreeSet<Vec<u32>> = cands.into_iter().collect();
                support_reduce(&mut set, &supp);
                return Ok(GramBasis {
                    monomials: set.into_iter().map(Monomial).collect(),
                });
            }
            cur[i] += 1;
            if cur[i] <= per_var[i] && cur.iter().sum::<u32>() <= half {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn support_reduce(set: &mut BTreeSet<Vec<u32>>, supp: &BTreeSet<Vec<u32>>) {
    loop {
        let mut dropped = false;
        let snapshot: Vec<Vec<u32>> = set.iter().cloned().collect();
        for m in &snapshot {
            if !set.contains(m) {
                continue;
            }
            let dbl: Vec<u32> = m.iter().map(|e| 2 * e).collect();
            if supp.contains(&dbl) {
                continue;
            }
            let mut expressible = false;
            for m1 in set.iter() {
                if m1 == m {
                    continue;
                }
                if m1.iter().zip(&dbl).all(|(a, b)| a <= b) {
                    let m2: Vec<u32> = dbl.iter().zip(m1).map(|(b, a)| b - a).collect();
                    if set.contains(&m2) {
                        expressible = true;
                        break;
                    }
                }
            }
            if !expressible {
                set.remove(m);
                dropped = true;
            }
        }
        if !dropped {
            return;
        }
    }
}

/// Why a polynomial is certainly not a sum of squares.
#[derive(Clone, Debug, PartialEq)]
pub enum NotSosWitness {
    OddDegree,
    /// An exact point with a negative value.
    NegativePoint(Vec<Rat>, Rat),
    /// A support monomial no basis pair can produce.
    UnrepresentableSupport(Monomial),
    /// `x^{2m}` has a negative coefficient and only the diagonal entry
    /// `(m, m)` can produce it.
    ForcedNegativeDiagonal(Monomial),
}

#[derive(Clone, Debug)]
pub enum SosOutcome {
    Sos(SosDecomposition),
    NotSos(NotSosWitness),
    Inconclusive,
}

impl SosOutcome {
    pub fn decomposition(self) -> Option<SosDecomposition> {
        match self {
            SosOutcome::Sos(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SosConfig {
    /// Give up (Inconclusive) beyond this basis size.
    pub max_basis: usize,
    pub ap_iterations: usize,
    /// Eigenvalue floors tried in order, as fractions of the trace scale.
    pub floors: Vec<f64>,
    /// Rounding denominators, as bit counts for 2^k.
    pub denominator_bits: Vec<u32>,
}

impl Default for SosConfig {
    fn default() -> Self {
        SosConfig {
            max_basis: 220,
            ap_iterations: 30_000,
            floors: vec![1e-2, 1e-3, 1e-5, 1e-7, 1e-9, 0.0],
            denominator_bits: vec![8, 16, 24, 40, 64],
        }
    }
}

impl SosConfig {
    pub fn escalated(&self) -> Self {
        SosConfig {
            max_basis: self.max_basis * 2,
            ap_iterations: self.ap_iterations * 4,
            floors: vec![1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 0.0],
            denominator_bits: vec![8, 16, 24, 40, 64],
        }
    }
}

/// Three-valued SOS decision with exact outputs.
pub fn sos_decompose(f: &Poly, cfg: &SosConfig) -> SosOutcome {
    let n = f.nvars();
    if f.is_zero() {
        return SosOutcome::Sos(SosDecomposition::zero());
    }
    let deg = f.degree().unwrap();
    if deg % 2 == 1 {
        return SosOutcome::NotSos(NotSosWitness::OddDegree);
    }
    if deg == 0 {
        let c = f.constant_term();
        return if c.is_negative() {
            SosOutcome::NotSos(NotSosWitness::NegativePoint(vec![Rat::zero(); n], c))
        } else {
            SosOutcome::Sos(SosDecomposition::positive_constant(n, c))
        };
    }
    // quick exact sampling screen
    if let Some((pt, val)) = find_negative_point(f) {
        return SosOutcome::NotSos(NotSosWitness::NegativePoint(pt, val));
    }

    let basis = match gram_basis(f) {
        Ok(b) => b.monomials,
        Err(_) => return SosOutcome::NotSos(NotSosWitness::OddDegree),
    };
    // structural checks against the reduced basis
    let groups = build_groups(&basis);
    for (m, c) in f.terms() {
        match groups.get(&m.0) {
            None => return SosOutcome::NotSos(NotSosWitness::UnrepresentableSupport(m.clone())),
            Some(pairs) => {
                if pairs.len() == 1 && pairs[0].0 == pairs[0].1 && c.is_negative() {
                    return SosOutcome::NotSos(NotSosWitness::ForcedNegativeDiagonal(
                        Monomial(basis[pairs[0].0].0.clone()),
                    ));
                }
            }
        }
    }
    if basis.len() > cfg.max_basis {
        return SosOutcome::Inconclusive;
    }

    // variable-scaling preconditioner
    let exps = balance_exponents(f);
    let scale: Vec<Rat> = exps
        .iter()
        .map(|&e| pow2_rat(e))
        .collect();
    let f_scaled = f.scale_vars(&scale);
    let global_bits = f_scaled.max_coeff_abs_f64().log2().round() as i32;
    let global = pow2_rat(-global_bits);
    let f_norm = f_scaled.scale(&global);

    if let Some(dec) = gram_search(&f_norm, &basis, &groups, cfg) {
        // undo global scale and variable scaling
        let inv_global = pow2_rat(global_bits);
        let inv_scale: Vec<Rat> = exps.iter().map(|&e| pow2_rat(-e)).collect();
        let squares: Vec<(Rat, Poly)> = dec
            .squares
            .iter()
            .map(|(w, p)| (w * &inv_global, p.scale_vars(&inv_scale)))
            .collect();
        let gram = dec.gram.map(|g| unscale_gram(g, &exps, &inv_global));
        let out = SosDecomposition { squares, gram };
        debug_assert!(verify_sos(f, &out));
        if verify_sos(f, &out) {
            return SosOutcome::Sos(out);
        }
        return SosOutcome::Inconclusive;
    }
    SosOutcome::Inconclusive
}

fn pow2_rat(e: i32) -> Rat {
    if e >= 0 {
        Rat::from_integer(Int::from(2).pow(e as u32))
    } else {
        Rat::new(Int::one(), Int::from(2).pow((-e) as u32))
    }
}

fn unscale_gram(g: GramCertificate, exps: &[i32], inv_global: &Rat) -> GramCertificate {
    let d: Vec<Rat> = g
        .basis
        .iter()
        .map(|m| {
            let e: i32 = m
                .0
                .iter()
                .zip(exps)
                .map(|(&mi, &ei)| -(mi as i32) * ei)
                .sum();
            pow2_rat(e)
        })
        .collect();
    let nb = g.basis.len();
    let mut matrix = g.matrix;
    for i in 0..nb {
        for j in 0..nb {
            matrix[i][j] = &matrix[i][j] * &d[i] * &d[j] * inv_global;
        }
    }
    GramCertificate {
        basis: g.basis,
        matrix,
    }
}

type Groups = BTreeMap<Vec<u32>, Vec<(usize, usize)>>;

fn build_groups(basis: &[Monomial]) -> Groups {
    let mut groups: Groups = BTreeMap::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let m = basis[i].mul(&basis[j]);
            groups.entry(m.0).or_default().push((i, j));
        }
    }
    groups
}

/// Deterministic sample screen for a negative value; exact verdict.
fn find_negative_point(f: &Poly) -> Option<(Vec<Rat>, Rat)> {
    let n = f.nvars();
    let fd = f.to_f64_poly();
    let axis: Vec<Rat> = [-2i64, -1, 0, 1, 2]
        .iter()
        .map(|&v| rint(v))
        .chain([crate::rat(-1, 2), crate::rat(1, 2)])
        .collect();
    let mut candidates: Vec<Vec<Rat>> = Vec::new();
    // full grid for small n, axis probes otherwise
    if n <= 3 {
        let k = axis.len();
        let total = k.pow(n as u32);
        for mut idx in 0..total {
            let mut pt = Vec::with_capacity(n);
            for _ in 0..n {
                pt.push(axis[idx % k].clone());
                idx /= k;
            }
            candidates.push(pt);
        }
    } else {
        for i in 0..n {
            for v in &axis {
                let mut pt = vec![Rat::zero(); n];
                pt[i] = v.clone();
                candidates.push(pt);
            }
        }
    }
    // deterministic pseudo-random rationals in [-3,3]
    let mut state = 0x9e3779b97f4a7c15u64;
    for _ in 0..200 {
        let mut pt = Vec::with_capacity(n);
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let num = ((state >> 16) % 769) as i64 - 384;
            pt.push(crate::rat(num, 128));
        }
        candidates.push(pt);
    }
    for pt in candidates {
        let approx: Vec<f64> = pt.iter().map(|r| r.to_f64().unwrap()).collect();
        if fd.eval(&approx) < 1e-4 {
            let v = f.eval(&pt);
            if v.is_negative() {
                return Some((pt, v));
            }
        }
    }
    None
}

/// Numeric feasibility plus exact rounding; returns a verified
/// decomposition of `f` (already scaled) or `None`.
fn gram_search(
    f: &Poly,
    basis: &[Monomial],
    groups: &Groups,
    cfg: &SosConfig,
) -> Option<SosDecomposition> {
    let nb = basis.len();
    let target_exact: BTreeMap<Vec<u32>, Rat> = groups
        .keys()
        .map(|k| (k.clone(), f.coeff(&Monomial(k.clone()))))
        .collect();

    // Diagonal preconditioner: work on Q^ = D^-1 Q D^-1 where D is chosen
    // from the magnitude of each basis monomial's diagonal coefficient.
    // Mid-degree binomial blowups otherwise leave the feasible set's
    // margin microscopic relative to the matrix scale.
    let diag_mag: Vec<f64> = basis
        .iter()
        .map(|m| {
            let dbl: Vec<u32> = m.0.iter().map(|e| 2 * e).collect();
            target_exact
                .get(&dbl)
                .and_then(|c| c.to_f64())
                .map(f64::abs)
                .unwrap_or(0.0)
        })
        .collect();
    let median = {
        let mut v: Vec<f64> = diag_mag.iter().cloned().filter(|&x| x > 0.0).collect();
        let m = if v.is_empty() {
            1.0
        } else {
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        m.max(1e-6)
    };
    // rational powers of two so the inverse transform is exact
    let scale_bits: Vec<i32> = diag_mag
        .iter()
        .map(|&t| (t.max(median / 64.0).sqrt().log2().round() as i32).clamp(-24, 24))
        .collect();
    let d_f64: Vec<f64> = scale_bits.iter().map(|&b| (b as f64).exp2()).collect();
    let d_rat: Vec<Rat> = scale_bits.iter().map(|&b| pow2_rat(b)).collect();

    // constraint row for group k in Q^-space: sum mult_ij d_i d_j Q^_ij = c
    let group_list: Vec<(&Vec<u32>, &Vec<(usize, usize)>, f64, f64)> = groups
        .iter()
        .map(|(k, pairs)| {
            let mut norm_sq = 0.0;
            for &(i, j) in pairs.iter() {
                let mult = if i == j { 1.0 } else { 2.0 };
                let a = mult * d_f64[i] * d_f64[j];
                norm_sq += a * a / mult;
            }
            let t = target_exact[k].to_f64().unwrap_or(0.0);
            (k, pairs, t, norm_sq)
        })
        .collect();

    // orthogonal projection onto each constraint row in turn (rows touch
    // disjoint entries, so one pass is the exact affine projection)
    let affine = |q: &mut SymMat| {
        for (_, pairs, t, norm_sq) in &group_list {
            let mut s = 0.0;
            for &(i, j) in pairs.iter() {
                let mult = if i == j { 1.0 } else { 2.0 };
                s += q.get(i, j) * mult * d_f64[i] * d_f64[j];
            }
            let r = (t - s) / norm_sq;
            for &(i, j) in pairs.iter() {
                let v = q.get(i, j) + r * d_f64[i] * d_f64[j];
                q.set(i, j, v);
            }
        }
    };

    let trace_scale = {
        let mut q = SymMat::eye(nb, 0.5);
        affine(&mut q);
        (q.trace() / nb as f64).abs().max(1e-6)
    };

    let dbg = std::env::var("QMCERT_SOS_DEBUG").is_ok();
    let mut warm: Option<SymMat> = None;
    for &floor_frac in &cfg.floors {
        let floor = floor_frac * trace_scale;
        // Douglas-Rachford splitting on the two sets {Q >= floor*I} and
        // the affine coefficient slice: far faster than plain alternating
        // projections on thin feasible sets.
        let mut z = warm.take().unwrap_or_else(|| {
            let mut z0 = SymMat::eye(nb, 0.5);
            affine(&mut z0);
            z0
        });
        let mut best_gap = f64::INFINITY;
        let mut psd_side = z.clone();
        for it in 0..cfg.ap_iterations {
            let x = jacobi::psd_project(&z, floor);
            // reflect through the PSD side, project onto the affine slice
            let mut refl = SymMat::zeros(nb);
            for k in 0..nb * nb {
                refl.a[k] = 2.0 * x.a[k] - z.a[k];
            }
            affine(&mut refl);
            for k in 0..nb * nb {
                z.a[k] += refl.a[k] - x.a[k];
            }
            if it % 16 == 15 || it + 1 == cfg.ap_iterations {
                let mut candidate = x.clone();
                let before = candidate.clone();
                affine(&mut candidate);
                let gap = candidate.frob_dist(&before);
                if gap < best_gap {
                    best_gap = gap;
                    psd_side = before;
                }
                if gap < 1e-13 * (1.0 + trace_scale) {
                    break;
                }
            }
        }
        if dbg {
            eprintln!("[sos] floor {floor:.2e}: best gap {best_gap:.3e}");
        }
        warm = Some(z);
        if best_gap > 1e-5 * (1.0 + trace_scale) {
            continue;
        }
        // round the PSD-side iterate at escalating denominators; the exact
        // affine correction and LDL^T carry the actual soundness burden
        for &bits in &cfg.denominator_bits {
            let got =
                round_and_extract(&psd_side, &d_rat, basis, groups, &target_exact, bits, f);
            if dbg {
                eprintln!("[sos]   bits {bits}: {}", if got.is_some() { "ok" } else { "rejected" });
            }
            if let Some(dec) = got {
                return Some(dec);
            }
        }
    }
    None
}

fn round_and_extract(
    q: &SymMat,
    d_rat: &[Rat],
    basis: &[Monomial],
    groups: &Groups,
    target: &BTreeMap<Vec<u32>, Rat>,
    bits: u32,
    f: &Poly,
) -> Option<SosDecomposition> {
    let nb = basis.len();
    let den = Int::from(2).pow(bits);
    // undo the diagonal preconditioner exactly: Q = D Q^ D with D a
    // power-of-two diagonal
    let mut m = vec![vec![Rat::zero(); nb]; nb];
    for i in 0..nb {
        for j in i..nb {
            let v = q.get(i, j);
            let num = (v * 2f64.powi(bits as i32)).round();
            if !num.is_finite() {
                return None;
            }
            let r = Rat::new(Int::from(num as i128), den.clone()) * &d_rat[i] * &d_rat[j];
            m[i][j] = r.clone();
            m[j][i] = r;
        }
    }
    // exact projection back onto the coefficient constraints: every entry
    // belongs to exactly one group; the deficit is distributed with
    // weights matching the preconditioned metric so small-scale entries
    // are not bulldozed by large-scale rounding error.
    for (k, pairs) in groups {
        let mut s = Rat::zero();
        let mut wsum = Rat::zero();
        for &(i, j) in pairs {
            let mult = if i == j { rint(1) } else { rint(2) };
            let w = &d_rat[i] * &d_rat[i] * &d_rat[j] * &d_rat[j];
            s += &m[i][j] * &mult;
            wsum += &mult * &w;
        }
        let t = target.get(k).cloned().unwrap_or_else(Rat::zero);
        let theta = (t - s) / wsum;
        for &(i, j) in pairs {
            let w = &d_rat[i] * &d_rat[i] * &d_rat[j] * &d_rat[j];
            m[i][j] += &theta * &w;
            if i != j {
                let v = m[i][j].clone();
                m[j][i] = v;
            }
        }
    }
    match psd_check_exact(&m) {
        PsdOutcome::Psd(fact) => {
            let dec = extract_squares(&fact, basis, f.nvars());
            if verify_sos(f, &dec) {
                Some(SosDecomposition {
                    squares: dec.squares,
                    gram: Some(GramCertificate {
                        basis: basis.to_vec(),
                        matrix: m,
                    }),
                })
            } else {
                None
            }
        }
        PsdOutcome::NotPsd(_) => None,
    }
}

fn extract_squares(fact: &Ldlt, basis: &[Monomial], n: usize) -> SosDecomposition {
    let nb = basis.len();
    let mut squares = Vec::new();
    for k in 0..nb {
        if !fact.pivots[k].is_positive() {
            continue;
        }
        let mut p = Poly::zero(n);
        for i in k..nb {
            let c = if i == k {
                rint(1)
            } else {
                fact.lower[i][k].clone()
            };
            if c.is_zero() {
                continue;
            }
            p.add_term(Monomial(basis[fact.perm[i]].0.clone()), c);
        }
        squares.push((fact.pivots[k].clone(), p));
    }
    SosDecomposition {
        squares,
        gram: None,
    }
}

/// Spread-minimizing per-variable power-of-two scaling.
fn balance_exponents(f: &Poly) -> Vec<i32> {
    let n = f.nvars();
    let terms: Vec<(Vec<u32>, f64)> = f
        .terms()
        .filter_map(|(m, c)| c.to_f64().map(|v| (m.0.clone(), v.abs().log2())))
        .collect();
    let spread = |e: &[i32]| -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (m, base) in &terms {
            let v = base
                + m.iter()
                    .zip(e)
                    .map(|(&mi, &ei)| mi as f64 * ei as f64)
                    .sum::<f64>();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };
    let mut e = vec![0i32; n];
    let mut best = spread(&e);
    for _ in 0..60 {
        let mut improved = false;
        for i in 0..n {
            for d in [-1i32, 1] {
                if (e[i] + d).abs() > 10 {
                    continue;
                }
                let mut cand = e.clone();
                cand[i] += d;
                let s = spread(&cand);
                if s + 1e-9 < best {
                    best = s;
                    e = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::rat;

    fn v2() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn basis_examples() {
        let v = vec!["x".to_string()];
        let b = gram_basis(&parse("1 + x^2", &v).unwrap()).unwrap();
        assert_eq!(
            b.monomials,
            vec![Monomial(vec![0]), Monomial(vec![1])]
        );
        let b4 = gram_basis(&parse("x^4", &v).unwrap()).unwrap();
        assert_eq!(b4.monomials, vec![Monomial(vec![2])]);
    }

    #[test]
    fn motzkin_basis_pruned() {
        let f = parse("1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v2()).unwrap();
        let b = gram_basis(&f).unwrap();
        let got: Vec<Vec<u32>> = b.monomials.iter().map(|m| m.0.clone()).collect();
        let expect: Vec<Vec<u32>> = vec![vec![0, 0], vec![1, 1], vec![1, 2], vec![2, 1]];
        assert_eq!(got, expect);
    }

    #[test]
    fn motzkin_not_sos() {
        let f = parse("1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v2()).unwrap();
        match sos_decompose(&f, &SosConfig::default()) {
            SosOutcome::NotSos(NotSosWitness::ForcedNegativeDiagonal(m)) => {
                assert_eq!(m.0, vec![1, 1]);
            }
            other => panic!("expected forced-diagonal witness, got {other:?}"),
        }
    }

    #[test]
    fn simple_decompositions() {
        let f = parse("(x + y)^2", &v2()).unwrap();
        match sos_decompose(&f, &SosConfig::default()) {
            SosOutcome::Sos(d) => assert!(verify_sos(&f, &d)),
            other => panic!("expected SOS, got {other:?}"),
        }
        let v = vec!["x".to_string()];
        let g = parse("1 + x^2", &v).unwrap();
        match sos_decompose(&g, &SosConfig::default()) {
            SosOutcome::Sos(d) => assert!(verify_sos(&g, &d)),
            other => panic!("expected SOS, got {other:?}"),
        }
    }

    #[test]
    fn negative_point_detected() {
        let v = vec!["x".to_string()];
        let f = parse("x^2 - 1", &v).unwrap();
        match sos_decompose(&f, &SosConfig::default()) {
            SosOutcome::NotSos(NotSosWitness::NegativePoint(pt, val)) => {
                assert!(val.is_negative());
                assert!(f.eval(&pt).is_negative());
            }
            other => panic!("expected negative point, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_smuggled_weight() {
        let v = vec!["x".to_string()];
        let x = parse("x", &v).unwrap();
        let f = parse("x^2", &v).unwrap();
        let good = SosDecomposition::single_square(rint(1), x.clone());
        assert!(verify_sos(&f, &good));
        let wrong_target = parse("x^2 + 1", &v).unwrap();
        assert!(!verify_sos(&wrong_target, &good));
        let smuggled = SosDecomposition {
            squares: vec![(rint(-1), x.clone()), (rint(2), x)],
            gram: None,
        };
        assert!(!verify_sos(&f, &smuggled));
    }

    #[test]
    fn gram_certificate_checks_out() {
        let f = parse("2 + x^2 + y^2 + x^2*y^2", &v2()).unwrap();
        match sos_decompose(&f, &SosConfig::default()) {
            SosOutcome::Sos(d) => {
                assert!(verify_sos(&f, &d));
                let g = d.gram.expect("gram present");
                // basis^T Q basis == f
                let nb = g.basis.len();
                let mut acc = Poly::zero(2);
                for i in 0..nb {
                    for j in 0..nb {
                        if g.matrix[i][j].is_zero() {
                            continue;
                        }
                        let m = g.basis[i].mul(&g.basis[j]);
                        acc.add_term(m, g.matrix[i][j].clone());
                    }
                }
                assert_eq!(acc, f);
            }
            other => panic!("expected SOS, got {other:?}"),
        }
    }

    #[test]
    fn norm_power_helper() {
        let d = sos_of_norm_power(2, &rat(1, 3), 5);
        let expect = crate::poly::norm_sq::<Rat>(2).pow(5).scale(&rat(1, 3));
        assert!(verify_sos(&expect, &d));
        let e = sos_of_norm_power(2, &rint(2), 4);
        let expect2 = crate::poly::norm_sq::<Rat>(2).pow(4).scale(&rint(2));
        assert!(verify_sos(&expect2, &e));
    }
}
