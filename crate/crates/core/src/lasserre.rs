//! Reduction of a globally positive polynomial modulo one bounded
//! generator to an explicit sum of squares, through the perturbation
//! series `p_r = sum_{k<=r} sum_j x_j^{2k}/k!`.

use crate::bound::{
    euclid_enclosure_radius, global_sup_upper_bound, max_upper_bound, snap_up, BoundConfig,
    BoxRegion,
};
use crate::monomial::Monomial;
use crate::poly::norm_sq;
use crate::sos::{sos_decompose, verify_sos, SosConfig, SosDecomposition, SosOutcome};
use crate::{rat, rint, Error, Int, Poly, Rat};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `p_r = sum_{k=0}^{r} sum_{j=1}^{n} x_j^{2k} / k!` with exact
/// coefficients.
pub fn perturbation_series(r: u32, n: usize) -> Poly {
    assert!(n >= 1);
    let mut p = Poly::zero(n);
    let mut fact = Int::one();
    for k in 0..=r {
        if k > 0 {
            fact *= Int::from(k);
        }
        let c = Rat::new(Int::one(), fact.clone());
        for j in 0..n {
            p.add_term(Monomial::var_pow(n, j, 2 * k), c.clone());
        }
    }
    p
}

/// Structural SOS form of `w * p_r`: each term `x_j^{2k}/k!` is the square
/// of `x_j^k` with weight `w/k!`.
pub fn perturbation_series_sos(r: u32, n: usize, w: &Rat) -> SosDecomposition {
    assert!(w.is_positive());
    let mut squares = Vec::new();
    let mut fact = Int::one();
    for k in 0..=r {
        if k > 0 {
            fact *= Int::from(k);
        }
        let weight = w / Rat::from_integer(fact.clone());
        for j in 0..n {
            squares.push((weight.clone(), Poly::var(n, j).pow(k)));
        }
    }
    SosDecomposition {
        squares,
        gram: None,
    }
}

/// Rational upper bound on `e^x` for `x >= 0`: truncated series plus a
/// geometric remainder bound.
pub fn exp_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative());
    let k_min = (x.to_f64().unwrap_or(0.0).ceil() as u32).max(4);
    let kk = 2 * k_min + 8;
    let mut term = rint(1);
    let mut acc = rint(1);
    for k in 1..=kk {
        term = term * x / rint(k as i64);
        acc += &term;
    }
    // ratio of successive terms beyond kk is at most x/(kk+1) <= 1/2
    debug_assert!(x / rint(kk as i64 + 1) <= rat(1, 2));
    acc + term * rint(2)
}

/// Partial-sum bound: `sum_{k<=r} x^k / k!`, the sup of `p_r / n` over the
/// ball `|X|^2 <= x`.
pub fn exp_partial_upper(x: &Rat, r: u32) -> Rat {
    let mut term = rint(1);
    let mut acc = rint(1);
    for k in 1..=r {
        term = term * x / rint(k as i64);
        acc += &term;
    }
    acc
}

/// Lower estimate of the global minimum of `f`, with provenance.
#[derive(Clone, Debug)]
pub struct FStar {
    pub value: Rat,
    pub certified: bool,
}

/// Result of the series reduction.
#[derive(Clone, Debug)]
pub struct LasserreResult {
    /// The full multiplier `c_factor * epsilon * p_r`, expanded.
    pub multiplier: Poly,
    pub epsilon: Rat,
    pub r: u32,
    /// `1` or the norm-power transform factor.
    pub c_factor: Poly,
    /// Verified decomposition of `f - multiplier * g`.
    pub sos_witness: SosDecomposition,
    /// Structural decomposition of the multiplier itself.
    pub multiplier_sos: SosDecomposition,
    /// `epsilon <= f*/(2 M n E_r)` held for the reported epsilon.
    pub epsilon_within_formula: bool,
}

/// Iterative-deepening reduction: find `r` and `epsilon` such that
/// `f - epsilon p_r c g` is an exact sum of squares.
///
/// The formula value `epsilon = f*/(2 M n E)` is always tried first; the
/// candidate ladder then walks a window of larger values (each still gated
/// by the exact SOS check, which alone carries soundness).
pub fn alg_lasserre(
    f: &Poly,
    g: &Poly,
    cfg: &BoundConfig,
    sos_cfg: &SosConfig,
    r_max: u32,
    f_star: &FStar,
) -> Result<LasserreResult, Error> {
    let n = f.nvars();
    if let SosOutcome::Sos(w) = sos_decompose(f, sos_cfg) {
        return Ok(LasserreResult {
            multiplier: Poly::zero(n),
            epsilon: Rat::zero(),
            r: 0,
            c_factor: Poly::one(n),
            sos_witness: w,
            multiplier_sos: SosDecomposition::zero(),
            epsilon_within_formula: true,
        });
    }
    if !f_star.value.is_positive() {
        return Err(Error::stage(
            "lasserre",
            format!("global minimum estimate not positive: {}", f_star.value),
        ));
    }

    // c = 1 when S(g + 1) is bounded, else the norm-power transform factor.
    let g_plus_1 = g.add(&Poly::one(n));
    let c_factor = if euclid_enclosure_radius(&g_plus_1, cfg).is_some() {
        Poly::one(n)
    } else {
        let d = g.degree().unwrap_or(2).max(3) as i64;
        let mut pow: i64 = 1;
        for _ in 0..n {
            pow = pow.saturating_mul(d - 1);
            if pow > 1_000 {
                return Err(Error::stage(
                    "lasserre",
                    "transform exponent for unbounded S(g+1) too large",
                ));
            }
        }
        norm_sq(n).pow(pow as u32 / 2 + 1)
    };
    let cg = c_factor.mul(g);
    let cg_plus_1 = cg.add(&Poly::one(n));
    let r_eucl = euclid_enclosure_radius(&cg_plus_1, cfg)
        .ok_or_else(|| Error::stage("lasserre", "S(c g + 1) not proven bounded"))?;
    let r_sq = &r_eucl * &r_eucl;

    // M = sup(c g) + 1, certified globally or over the enclosing box.
    let m_val = match global_sup_upper_bound(&cg, cfg) {
        Some(s) => s + rint(1),
        None => {
            max_upper_bound(&cg, &BoxRegion::centered(n, &r_eucl), cfg).value + rint(1)
        }
    };
    let m_val = if m_val.is_positive() { m_val } else { rint(1) };

    let e_full = exp_upper(&r_sq);
    let denom_base = rint(2) * &m_val * rint(n as i64);

    for r in 0..=r_max {
        let p_r = perturbation_series(r, n);
        let pg = p_r.mul(&cg);
        // epsilon candidates: formula first, then a positivity-guided
        // window of larger values.
        let cap_full = &f_star.value / (&denom_base * &e_full);
        let cap_partial = &f_star.value / (&denom_base * exp_partial_upper(&r_sq, r));
        let mut cands: Vec<(Rat, bool)> = vec![(cap_full.clone(), true), (cap_partial.clone(), true)];
        let break_eps = positivity_break(f, &pg, &cap_partial);
        for beta in [rat(3, 4), rat(1, 2), rat(5, 16), rat(3, 16), rat(3, 32), rat(1, 32)] {
            cands.push((&break_eps * beta, false));
        }
        let mut seen: Vec<Rat> = Vec::new();
        for (raw, from_formula) in cands {
            if !raw.is_positive() {
                continue;
            }
            let eps = snap_down_pos(&raw.min(rat(1, 2)));
            if eps.is_zero() || seen.contains(&eps) {
                continue;
            }
            seen.push(eps.clone());
            let within = eps <= cap_partial;
            let candidate = f.sub(&pg.scale(&eps));
            if let SosOutcome::Sos(w) = sos_decompose(&candidate, sos_cfg) {
                let multiplier = p_r.mul(&c_factor).scale(&eps);
                let series_sos = perturbation_series_sos(r, n, &eps);
                let multiplier_sos = if c_factor == Poly::one(n) {
                    series_sos
                } else {
                    // c_factor = |X|^{2m} is itself a sum of squares
                    let m_pow = c_factor.degree().unwrap() / 2;
                    let csos = crate::sos::sos_of_norm_power(n, &rint(1), m_pow);
                    series_sos.product(&csos, n)
                };
                debug_assert!(verify_sos(&multiplier, &multiplier_sos));
                let _ = from_formula;
                return Ok(LasserreResult {
                    multiplier,
                    epsilon: eps,
                    r,
                    c_factor,
                    sos_witness: w,
                    multiplier_sos,
                    epsilon_within_formula: within,
                });
            }
        }
    }
    Err(Error::stage(
        "lasserre",
        format!("no sum-of-squares reduction found for r <= {r_max}"),
    ))
}

/// Largest epsilon (on a coarse dyadic grid) keeping `f - eps * pg`
/// positive on a sample set — an upper edge for the candidate window.
fn positivity_break(f: &Poly, pg: &Poly, at_least: &Rat) -> Rat {
    let n = f.nvars();
    let fd = f.to_f64_poly();
    let pgd = pg.to_f64_poly();
    let b = BoxRegion::centered(n, &rint(3));
    let pts: Vec<Vec<f64>> = sample_points(&b, 6);
    let mut eps = 1.0f64;
    for _ in 0..60 {
        let ok = pts.iter().all(|p| fd.eval(p) - eps * pgd.eval(p) > 0.0);
        if ok {
            break;
        }
        eps *= 0.5;
    }
    let cand = Rat::from_float(eps).unwrap_or_else(|| rint(1));
    let cand = snap_up(&cand, 40);
    if &cand < at_least {
        at_least.clone()
    } else {
        cand
    }
}

fn sample_points(b: &BoxRegion, per_axis: usize) -> Vec<Vec<f64>> {
    let n = b.nvars();
    let lo: Vec<f64> = b.0.iter().map(|iv| iv.lo.to_f64().unwrap()).collect();
    let hi: Vec<f64> = b.0.iter().map(|iv| iv.hi.to_f64().unwrap()).collect();
    let mut out = Vec::new();
    let total = per_axis.pow(n as u32).min(100_000);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        out.push(
            (0..n)
                .map(|i| lo[i] + (hi[i] - lo[i]) * (idx[i] as f64) / ((per_axis - 1) as f64))
                .collect(),
        );
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            idx[i] += 1;
            if idx[i] < per_axis {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    out
}

/// Largest multiple of `2^-40` at or below `v` (keeps epsilon under any cap
/// it was derived from).
fn snap_down_pos(v: &Rat) -> Rat {
    let bits = 40u32;
    let scale = Rat::from_integer(Int::from(2).pow(bits));
    let scaled = v * &scale;
    let fl = scaled.floor();
    let snapped = fl / scale;
    if snapped.is_positive() {
        snapped
    } else if v.is_positive() {
        // below the grid: keep the exact value rather than flushing to 0
        v.clone()
    } else {
        Rat::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn series_examples() {
        // r=0, n=2: the constant 2
        let p = perturbation_series(0, 2);
        assert_eq!(p, Poly::constant(2, rint(2)));
        // r=1, n=1: 1 + x^2
        let v = vec!["x".to_string()];
        assert_eq!(perturbation_series(1, 1), parse("1 + x^2", &v).unwrap());
        // r=2, n=2: 2 + x^2 + y^2 + x^4/2 + y^4/2
        let v2 = vec!["x".to_string(), "y".to_string()];
        assert_eq!(
            perturbation_series(2, 2),
            parse("2 + x^2 + y^2 + x^4/2 + y^4/2", &v2).unwrap()
        );
    }

    #[test]
    fn series_increment_is_monomial_squares() {
        // p_{r+1} - p_r = sum_j x_j^{2(r+1)}/(r+1)!: all coefficients
        // positive on even monomials.
        for r in 0..4u32 {
            let d = perturbation_series(r + 1, 2).sub(&perturbation_series(r, 2));
            for (m, c) in d.terms() {
                assert!(c.is_positive());
                assert!(m.0.iter().all(|e| e % 2 == 0));
            }
        }
    }

    #[test]
    fn exp_upper_sound() {
        // e^3 = 20.0855...
        let e3 = exp_upper(&rint(3));
        assert!(e3 >= rat(20085, 1000));
        assert!(e3 <= rat(21, 1));
        let e0 = exp_upper(&Rat::zero());
        assert!(e0 >= rint(1) && e0 <= rat(3, 2));
    }

    #[test]
    fn sos_input_short_circuits() {
        let v = vec!["x".to_string()];
        let f = parse("1 + x^2", &v).unwrap();
        let g = parse("1 - x^2", &v).unwrap();
        let out = alg_lasserre(
            &f,
            &g,
            &BoundConfig::default(),
            &SosConfig::default(),
            3,
            &FStar {
                value: rint(1),
                certified: true,
            },
        )
        .unwrap();
        assert!(out.multiplier.is_zero());
        assert_eq!(out.r, 0);
        assert!(verify_sos(&f, &out.sos_witness));
    }
}
