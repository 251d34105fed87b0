//! Structured expressions `base + sum_i w_i * H_i(g_i)` with
//! `H(t) = ((t - gamma)/denom)^e * t`.
//!
//! Multiplier verification needs tight enclosures of `f - sum H(g_i)`;
//! interval-evaluating the expanded polynomial is hopeless (the power
//! destroys correlation), while the composed form only needs an enclosure
//! of each small `g_i` plus the exact univariate range of `H` over it.

use crate::interval::{interval_eval, pow_rat, BoxRegion, Interval};
use crate::poly::{compose_univariate, Polynomial};
use crate::{rint, Poly, Rat};
use num_traits::Zero;

/// `H(t) = ((t - gamma)/denom)^exp * t`, the multiplier shape of the
/// Averkov construction (`exp` is the full exponent, usually `2N`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPower {
    pub gamma: Rat,
    pub denom: Rat,
    pub exp: u32,
}

impl HPower {
    pub fn value(&self, t: &Rat) -> Rat {
        let u = (t - &self.gamma) / &self.denom;
        pow_rat(&u, self.exp) * t
    }

    /// Stationary points of `H`: `t = gamma` and `t = gamma/(exp+1)`.
    fn critical_points(&self) -> [Rat; 2] {
        [
            self.gamma.clone(),
            &self.gamma / rint(self.exp as i64 + 1),
        ]
    }

    /// Exact range of `H` over a closed interval.
    pub fn range(&self, iv: &Interval) -> Interval {
        let mut lo = self.value(&iv.lo);
        let mut hi = lo.clone();
        for t in [iv.hi.clone()]
            .into_iter()
            .chain(self.critical_points().into_iter().filter(|t| iv.contains(t)))
        {
            let v = self.value(&t);
            if v < lo {
                lo = v.clone();
            }
            if v > hi {
                hi = v;
            }
        }
        Interval { lo, hi }
    }

    /// Exact maximum of `H` over `(-inf, ub]`; requires even `exp` so the
    /// left tail goes to `-inf`.
    pub fn max_below(&self, ub: &Rat) -> Rat {
        assert!(self.exp % 2 == 0, "max_below needs an even exponent");
        let mut best = self.value(ub);
        for t in self.critical_points() {
            if &t <= ub {
                let v = self.value(&t);
                if v > best {
                    best = v;
                }
            }
        }
        best
    }

    /// `H` as a univariate polynomial in `t`.
    pub fn as_univariate(&self) -> Poly {
        let t = Poly::var(1, 0);
        let u = t
            .sub(&Poly::constant(1, self.gamma.clone()))
            .scale(&(rint(1) / self.denom.clone()));
        u.pow(self.exp).mul(&t)
    }
}

/// `base + sum_i w_i H_i(g_i) + sum_j c_j prod_k q_{jk}^{e_{jk}}`,
/// evaluated without expansion.
///
/// Keeping multiplier terms and norm-power products factored is what makes
/// the verification bounds converge: interval-evaluating their expansions
/// loses all correlation between the huge cancelling terms.
#[derive(Clone, Debug)]
pub struct StructuredExpr {
    pub base: Poly,
    pub comps: Vec<(Rat, HPower, Poly)>,
    pub powers: Vec<(Rat, Vec<(Poly, u32)>)>,
}

impl StructuredExpr {
    pub fn plain(p: Poly) -> Self {
        StructuredExpr {
            base: p,
            comps: Vec::new(),
            powers: Vec::new(),
        }
    }

    pub fn with_h_term(mut self, weight: Rat, h: HPower, inner: Poly) -> Self {
        self.comps.push((weight, h, inner));
        self
    }

    pub fn with_power_term(mut self, weight: Rat, factors: Vec<(Poly, u32)>) -> Self {
        self.powers.push((weight, factors));
        self
    }

    pub fn nvars(&self) -> usize {
        self.base.nvars()
    }

    pub fn eval(&self, pt: &[Rat]) -> Rat {
        let mut acc = self.base.eval(pt);
        for (w, h, g) in &self.comps {
            acc += w * h.value(&g.eval(pt));
        }
        for (w, factors) in &self.powers {
            let mut term = w.clone();
            for (q, e) in factors {
                term *= pow_rat(&q.eval(pt), *e);
            }
            acc += term;
        }
        acc
    }

    pub fn interval(&self, b: &BoxRegion) -> Interval {
        let mut acc = interval_eval(&self.base, b);
        for (w, h, g) in &self.comps {
            let gi = interval_eval(g, b);
            acc = acc.add(&h.range(&gi).scale(w));
        }
        for (w, factors) in &self.powers {
            let mut term = Interval::point(w.clone());
            for (q, e) in factors {
                term = term.mul(&interval_eval(q, b).pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Exact polynomial expansion (for tail analysis and identities).
    pub fn expand(&self) -> Poly {
        let mut acc = self.base.clone();
        for (w, h, g) in &self.comps {
            let hp = h.as_univariate();
            acc = acc.add(&compose_univariate(&hp, g).scale(w));
        }
        for (w, factors) in &self.powers {
            let mut term = Poly::constant(self.base.nvars(), w.clone());
            for (q, e) in factors {
                term = term.mul(&q.pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Evaluation interface shared by plain polynomials and structured
/// expressions inside the branch-and-bound engine.
pub trait BoxEval {
    fn nvars(&self) -> usize;
    fn interval_over(&self, b: &BoxRegion) -> Interval;
    fn eval_at(&self, pt: &[Rat]) -> Rat;
}

impl BoxEval for Polynomial<Rat> {
    fn nvars(&self) -> usize {
        Polynomial::nvars(self)
    }
    fn interval_over(&self, b: &BoxRegion) -> Interval {
        interval_eval(self, b)
    }
    fn eval_at(&self, pt: &[Rat]) -> Rat {
        self.eval(pt)
    }
}

impl BoxEval for StructuredExpr {
    fn nvars(&self) -> usize {
        StructuredExpr::nvars(self)
    }
    fn interval_over(&self, b: &BoxRegion) -> Interval {
        self.interval(b)
    }
    fn eval_at(&self, pt: &[Rat]) -> Rat {
        self.eval(pt)
    }
}

impl BoxEval for &Polynomial<Rat> {
    fn nvars(&self) -> usize {
        Polynomial::nvars(self)
    }
    fn interval_over(&self, b: &BoxRegion) -> Interval {
        interval_eval(self, b)
    }
    fn eval_at(&self, pt: &[Rat]) -> Rat {
        self.eval(pt)
    }
}

pub fn is_zero_expr(e: &StructuredExpr) -> bool {
    e.base.is_zero()
        && e.comps.iter().all(|(w, _, _)| w.is_zero())
        && e.powers.iter().all(|(w, _)| w.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::rat;

    #[test]
    fn h_range_matches_expansion() {
        let h = HPower {
            gamma: rat(2, 3),
            denom: rat(5, 6),
            exp: 4,
        };
        let iv = Interval::new(rat(-3, 2), rat(1, 2));
        let r = h.range(&iv);
        // dense scan of the expansion stays inside the reported range
        let hp = h.as_univariate();
        for k in 0..=300 {
            let t = rat(-3, 2) + rat(k, 150);
            if t > rat(1, 2) {
                break;
            }
            let v = hp.eval(&[t]);
            assert!(r.lo <= v && v <= r.hi);
        }
        // endpoints of the range are attained (critical points are exact)
        assert_eq!(h.value(&rat(2, 3)), rat(0, 1));
    }

    #[test]
    fn structured_matches_expanded() {
        let v = vec!["x".to_string(), "y".to_string()];
        let f = parse("9 - x^3 - y^3 + 3*x*y - 5*x^2", &v).unwrap();
        let g = parse("1 - x^2 - y^2", &v).unwrap();
        let h = HPower {
            gamma: rat(2, 3),
            denom: rat(5, 6),
            exp: 2,
        };
        let e = StructuredExpr::plain(f.clone()).with_h_term(rat(-1, 1), h, g);
        let expanded = e.expand();
        for (a, b) in [(0i64, 0i64), (1, -1), (2, 3), (-1, 2)] {
            let pt = [rat(a, 2), rat(b, 2)];
            assert_eq!(e.eval(&pt), expanded.eval(&pt));
        }
    }
}
