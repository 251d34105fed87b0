//! Exact rational interval arithmetic and axis-aligned boxes.
//!
//! Endpoints are exact rationals, so every operation is sound without any
//! rounding-mode handling. Tightness comes from branch-and-bound
//! subdivision, not from clever forms.

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::{rint, Rat};
use num_traits::{Signed, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: Rat) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / rint(2)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Interval {
        if c.is_negative() {
            Interval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Interval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let a = &self.lo * &other.lo;
        let b = &self.lo * &other.hi;
        let c = &self.hi * &other.lo;
        let d = &self.hi * &other.hi;
        let mut lo = a.clone();
        let mut hi = a;
        for v in [b, c, d] {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        }
        Interval { lo, hi }
    }

    /// Exact range of `t^k` over the interval (handles even powers at zero).
    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(rint(1));
        }
        let pl = pow_rat(&self.lo, k);
        let ph = pow_rat(&self.hi, k);
        if k % 2 == 1 {
            Interval { lo: pl, hi: ph }
        } else if !self.lo.is_negative() {
            Interval { lo: pl, hi: ph }
        } else if !self.hi.is_positive() {
            Interval { lo: ph, hi: pl }
        } else {
            Interval {
                lo: Rat::zero(),
                hi: pl.max(ph),
            }
        }
    }
}

pub fn pow_rat(v: &Rat, k: u32) -> Rat {
    let mut acc = rint(1);
    let mut base = v.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Axis-aligned box: one interval per variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoxRegion(pub Vec<Interval>);

impl BoxRegion {
    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Cube `[-r, r]^n`.
    pub fn centered(n: usize, r: &Rat) -> Self {
        BoxRegion(vec![Interval::new(-r.clone(), r.clone()); n])
    }

    pub fn midpoint(&self) -> Vec<Rat> {
        self.0.iter().map(|iv| iv.midpoint()).collect()
    }

    /// Index of the widest coordinate, ties broken by lowest index.
    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        let mut w = self.0[0].width();
        for (i, iv) in self.0.iter().enumerate().skip(1) {
            let wi = iv.width();
            if wi > w {
                w = wi;
                best = i;
            }
        }
        best
    }

    pub fn max_width(&self) -> Rat {
        self.0
            .iter()
            .map(|iv| iv.width())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Bisect along `axis` at the midpoint.
    pub fn bisect(&self, axis: usize) -> (BoxRegion, BoxRegion) {
        let mid = self.0[axis].midpoint();
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[axis].hi = mid.clone();
        right.0[axis].lo = mid;
        (left, right)
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        self.0.iter().zip(p).all(|(iv, v)| iv.contains(v))
    }
}

/// Interval enclosure of a polynomial's range over a box. Sound, not tight:
/// each term is enclosed exactly, correlations between terms are ignored.
pub fn interval_eval(p: &Polynomial<Rat>, b: &BoxRegion) -> Interval {
    assert_eq!(p.nvars(), b.nvars(), "dimension mismatch in interval_eval");
    // Power tables per variable.
    let mut pows: Vec<Vec<Interval>> = Vec::with_capacity(b.nvars());
    for i in 0..b.nvars() {
        let d = p.degree_in(i);
        let mut tab = Vec::with_capacity(d as usize + 1);
        for k in 0..=d {
            tab.push(b.0[i].pow(k));
        }
        pows.push(tab);
    }
    let mut acc = Interval::point(Rat::zero());
    for (m, c) in p.terms() {
        let mut term = Interval::point(c.clone());
        for (i, &e) in monomial_exps(m).iter().enumerate() {
            if e > 0 {
                term = term.mul(&pows[i][e as usize]);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

fn monomial_exps(m: &Monomial) -> &[u32] {
    &m.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::rat;

    #[test]
    fn pow_even_at_zero() {
        let iv = Interval::new(rint(-1), rint(1));
        let sq = iv.pow(2);
        assert_eq!(sq.lo, rint(0));
        assert_eq!(sq.hi, rint(1));
    }

    #[test]
    fn eval_soundness_basics() {
        let v = vec!["x".to_string(), "y".to_string()];
        let p = parse("x^2", &v).unwrap();
        let b = BoxRegion(vec![
            Interval::new(rint(-1), rint(1)),
            Interval::new(rint(0), rint(0)),
        ]);
        let iv = interval_eval(&p, &b);
        assert!(iv.lo <= rint(0) && iv.hi >= rint(1));

        let q = parse("1 - x^2 - y^2", &v).unwrap();
        let origin = BoxRegion(vec![
            Interval::new(rint(0), rint(0)),
            Interval::new(rint(0), rint(0)),
        ]);
        let r = interval_eval(&q, &origin);
        assert_eq!(r, Interval::point(rint(1)));
    }

    #[test]
    fn eval_contains_sample_values() {
        // Lifted Motzkin over [-2,2]^2 must contain the value at (1,1).
        let v = vec!["x".to_string(), "y".to_string()];
        let f = parse("2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v).unwrap();
        let b = BoxRegion::centered(2, &rint(2));
        let iv = interval_eval(&f, &b);
        assert!(iv.lo <= rint(1));
        assert!(iv.hi >= rint(1));
    }

    #[test]
    fn midpoint_bisect() {
        let b = BoxRegion(vec![
            Interval::new(rint(0), rint(4)),
            Interval::new(rint(0), rint(1)),
        ]);
        assert_eq!(b.widest_axis(), 0);
        let (l, r) = b.bisect(0);
        assert_eq!(l.0[0].hi, rint(2));
        assert_eq!(r.0[0].lo, rint(2));
        assert_eq!(b.midpoint(), vec![rint(2), rat(1, 2)]);
    }
}
