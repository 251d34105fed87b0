//! Sparse multivariate polynomial arithmetic, generic over the scalar.

use crate::monomial::Monomial;
use crate::scalar::Coeff;
use crate::{Int, Rat};
use num_traits::sign::Signed;
use num_traits::{One, ToPrimitive};
use std::collections::BTreeMap;

/// Sparse polynomial: a finite map from monomials to nonzero coefficients.
///
/// Invariants: no zero coefficient is ever stored, every monomial has
/// exactly `n` exponents, and equality is term-map equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<T: Coeff> {
    n: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> Polynomial<T> {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: T) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    /// The variable `x_i` as a polynomial.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let mut p = Self::zero(n);
        p.terms.insert(Monomial::var_pow(n, i, 1), T::one());
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one(self.n))
    }

    /// Total degree, or `None` for the zero polynomial (the "-infinity"
    /// sentinel).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Largest exponent of `x_i` across all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        debug_assert_eq!(m.nvars(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        let mut out = Self::zero(self.n);
        for (m, a) in &self.terms {
            let v = a.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count mismatch in mul");
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &T) -> Self {
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            let v = c1.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(m1.mul(m), v);
            }
        }
        out
    }

    /// Exponentiation by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one(self.n);
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// Exact evaluation at a point.
    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.n, "point length mismatch in eval");
        // Power tables per variable, up to the degree actually used.
        let mut pows: Vec<Vec<T>> = Vec::with_capacity(self.n);
        for (i, x) in point.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut tab = Vec::with_capacity(d + 1);
            tab.push(T::one());
            for k in 1..=d {
                let prev = tab[k - 1].clone();
                tab.push(prev * x.clone());
            }
            pows.push(tab);
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    v = v * pows[i][e as usize].clone();
                }
            }
            acc = acc + v;
        }
        acc
    }

    /// Map coefficients into another scalar type.
    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// The top-degree form, zero polynomial for zero input.
    pub fn top_form(&self) -> Self {
        match self.degree() {
            None => Self::zero(self.n),
            Some(d) => self.homogeneous_part(d),
        }
    }

    /// Substitute each variable `x_i` by `scale[i] * x_i`. Exact.
    pub fn scale_vars(&self, scale: &[T]) -> Self {
        assert_eq!(scale.len(), self.n);
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v = v * scale[i].clone();
                }
            }
            out.add_term(m.clone(), v);
        }
        out
    }
}

/// `x_1^2 + ... + x_n^2`.
pub fn norm_sq<T: Coeff>(n: usize) -> Polynomial<T> {
    assert!(n >= 1, "norm_sq needs at least one variable");
    let mut p = Polynomial::zero(n);
    for i in 0..n {
        p.add_term(Monomial::var_pow(n, i, 2), T::one());
    }
    p
}

/// Compose a univariate polynomial `h` with an inner polynomial: `h(q)`.
pub fn compose_univariate<T: Coeff>(h: &Polynomial<T>, q: &Polynomial<T>) -> Polynomial<T> {
    assert_eq!(h.nvars(), 1, "outer polynomial must be univariate");
    // Horner over the dense coefficient list of h.
    let d = h.degree().unwrap_or(0) as usize;
    let mut coeffs = vec![T::zero(); d + 1];
    for (m, c) in h.terms() {
        coeffs[m.0[0] as usize] = c.clone();
    }
    let mut acc = Polynomial::constant(q.nvars(), coeffs[d].clone());
    for k in (0..d).rev() {
        acc = acc.mul(q);
        acc.add_term(Monomial::one(q.nvars()), coeffs[k].clone());
    }
    acc
}

/// Top-degree term of a nonzero univariate polynomial: `(degree, coefficient)`.
pub fn leading_coefficient_univariate<T: Coeff>(p: &Polynomial<T>) -> Result<(u32, T), crate::Error> {
    if p.nvars() != 1 {
        return Err(crate::Error::NotUnivariate);
    }
    match p.degree() {
        None => Err(crate::Error::ZeroPolynomial),
        Some(d) => Ok((d, p.coeff(&Monomial::var_pow(1, 0, d)))),
    }
}

impl Polynomial<Rat> {
    /// Exact univariate division with remainder.
    pub fn divrem_univariate(&self, divisor: &Self) -> Option<(Self, Self)> {
        if self.nvars() != 1 || divisor.nvars() != 1 || divisor.is_zero() {
            return None;
        }
        let (dd, dc) = leading_coefficient_univariate(divisor).ok()?;
        let mut rem = self.clone();
        let mut quo = Polynomial::zero(1);
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let rc = rem.coeff(&Monomial::var_pow(1, 0, rd));
            let factor = rc / dc.clone();
            let shift = Monomial::var_pow(1, 0, rd - dd);
            quo.add_term(shift.clone(), factor.clone());
            rem = rem.sub(&divisor.mul_term(&shift, &factor));
        }
        Some((quo, rem))
    }

    /// Monic univariate gcd by Euclid's algorithm.
    pub fn gcd_univariate(&self, other: &Self) -> Option<Self> {
        if self.nvars() != 1 || other.nvars() != 1 {
            return None;
        }
        let monic = |p: &Self| -> Self {
            match leading_coefficient_univariate(p) {
                Ok((_, lc)) => p.scale(&(Rat::from_integer(Int::one()) / lc)),
                Err(_) => p.clone(),
            }
        };
        let mut a = monic(self);
        let mut b = monic(other);
        while !b.is_zero() {
            let (_, r) = a.divrem_univariate(&b)?;
            a = b;
            b = monic(&r);
        }
        Some(a)
    }

    /// Recognize `self = scale * base^exp` for a univariate input with a
    /// squarefree base and `exp >= 2`, via `base = self / gcd(self, self')`.
    pub fn perfect_power_univariate(&self) -> Option<(Rat, Self, u32)> {
        if self.nvars() != 1 {
            return None;
        }
        let deg = self.degree()?;
        if deg < 2 || self.num_terms() <= 1 {
            return None;
        }
        let deriv = self.derivative_univariate();
        let g = self.gcd_univariate(&deriv)?;
        if g.degree()? == 0 {
            return None;
        }
        let (base, rem) = self.divrem_univariate(&g)?;
        if !rem.is_zero() {
            return None;
        }
        let base_deg = base.degree()?;
        if base_deg == 0 || deg % base_deg != 0 {
            return None;
        }
        let exp = deg / base_deg;
        if exp < 2 {
            return None;
        }
        // confirm by repeated exact division
        let mut cur = self.clone();
        for _ in 0..exp {
            let (q, r) = cur.divrem_univariate(&base)?;
            if !r.is_zero() {
                return None;
            }
            cur = q;
        }
        if cur.degree() != Some(0) {
            return None;
        }
        Some((cur.constant_term(), base, exp))
    }

    pub fn derivative_univariate(&self) -> Self {
        assert_eq!(self.nvars(), 1);
        let mut out = Polynomial::zero(1);
        for (m, c) in self.terms() {
            let e = m.0[0];
            if e > 0 {
                out.add_term(Monomial::var_pow(1, 0, e - 1), c * Rat::from_integer(Int::from(e)));
            }
        }
        out
    }

    /// Greatest coefficient magnitude, as f64 (for scaling heuristics).
    pub fn max_coeff_abs_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().map(f64::abs).unwrap_or(f64::MAX))
            .fold(0.0, f64::max)
    }

    pub fn to_f64_poly(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64().unwrap_or(0.0))
    }

    /// Render using the supplied variable names; output re-parses to the
    /// same polynomial. Terms print in descending graded-lex order.
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.n);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(rat_to_text(&mag));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[i].clone()),
                    _ => factors.push(format!("{}^{}", vars[i], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub fn rat_to_text(c: &Rat) -> String {
    if c.denom() == &Int::one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::{rat, rint, Poly};

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn product_expansion() {
        // (1-x)(1-y) = 1 - x - y + xy
        let v = xy();
        let a = parse("1 - x", &v).unwrap();
        let b = parse("1 - y", &v).unwrap();
        let expect = parse("1 - x - y + x*y", &v).unwrap();
        assert_eq!(a.mul(&b), expect);
    }

    #[test]
    fn pow_square() {
        let v = vec!["x".to_string()];
        let p = parse("x - 1", &v).unwrap();
        assert_eq!(p.pow(2), parse("x^2 - 2*x + 1", &v).unwrap());
    }

    #[test]
    fn univariate_combine_example() {
        // g1 + x^2 g2 = -1/2 x (x-1)(x-2)(3x-1) for the generators of the
        // degree-7 worked example.
        let v = vec!["x".to_string()];
        let g1 = parse("x*(x - 1/2)*(x - 1)^2*(x - 2)", &v).unwrap();
        let g2 = parse("0 - x*(x - 1)*(x - 2)", &v).unwrap();
        let x2 = parse("x^2", &v).unwrap();
        let combined = g1.add(&x2.mul(&g2));
        let expect = parse("0 - 1/2*x*(x - 1)*(x - 2)*(3*x - 1)", &v).unwrap();
        assert_eq!(combined, expect);
    }

    #[test]
    fn eval_exact() {
        let v = xy();
        let f = parse("2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v).unwrap();
        assert_eq!(f.eval(&[rint(1), rint(1)]), rint(1));
        let g = parse("1 - x^2 - y^2", &v).unwrap();
        assert_eq!(g.eval(&[rint(0), rint(0)]), rint(1));
    }

    #[test]
    fn eval_root_of_combined_generator() {
        let v = vec!["x".to_string()];
        let g = parse("0 - 1/2*x*(x - 1)*(x - 2)*(3*x - 1)", &v).unwrap();
        assert_eq!(g.eval(&[rat(1, 3)]), rint(0));
    }

    #[test]
    fn norm_sq_examples() {
        let p: Poly = norm_sq(2);
        assert_eq!(p, parse("x^2 + y^2", &xy()).unwrap());
        let q: Poly = norm_sq(3);
        let v3 = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        assert_eq!(q, parse("x^2 + y^2 + z^2", &v3).unwrap());
        let u: Poly = norm_sq(1);
        assert_eq!(u, parse("x^2", &vec!["x".to_string()]).unwrap());
    }

    #[test]
    fn compose_examples() {
        let v = xy();
        let t = vec!["t".to_string()];
        let h = parse("t^2", &t).unwrap();
        let q = parse("x + y", &v).unwrap();
        assert_eq!(
            compose_univariate(&h, &q),
            parse("x^2 + 2*x*y + y^2", &v).unwrap()
        );
        // identity composition
        let idh = parse("t", &t).unwrap();
        let any = parse("3*x^2*y - 7", &v).unwrap();
        assert_eq!(compose_univariate(&idh, &any), any);
    }

    #[test]
    fn compose_h_power_times_t() {
        // H = ((t - 2/3)/(2/3 + 1/6))^2 * t applied to q = 1 - x^2 - y^2,
        // cross-checked against direct expansion of ((q-2/3)*(6/5))^2 * q.
        let v = xy();
        let t = vec!["t".to_string()];
        let h = parse("((t - 2/3)*(6/5))^2 * t", &t).unwrap();
        let q = parse("1 - x^2 - y^2", &v).unwrap();
        let direct = parse("((1 - x^2 - y^2 - 2/3)*(6/5))^2 * (1 - x^2 - y^2)", &v).unwrap();
        assert_eq!(compose_univariate(&h, &q), direct);
    }

    #[test]
    fn leading_coefficient_examples() {
        let v = vec!["x".to_string()];
        let g1 = parse("x*(x - 1/2)*(x - 1)^2*(x - 2)", &v).unwrap();
        assert_eq!(leading_coefficient_univariate(&g1).unwrap(), (5, rint(1)));
        let g2 = parse("0 - x*(x - 1)*(x - 2)", &v).unwrap();
        assert_eq!(leading_coefficient_univariate(&g2).unwrap(), (3, rint(-1)));
        let c = parse("7", &v).unwrap();
        assert_eq!(leading_coefficient_univariate(&c).unwrap(), (0, rint(7)));
        let z = Poly::zero(1);
        assert!(leading_coefficient_univariate(&z).is_err());
        let multi = parse("x + y", &xy()).unwrap();
        assert!(leading_coefficient_univariate(&multi).is_err());
    }

    #[test]
    fn zero_degree_sentinel() {
        let z = Poly::zero(2);
        assert_eq!(z.degree(), None);
        let c = Poly::constant(2, rint(5));
        assert_eq!(c.degree(), Some(0));
    }

    #[test]
    fn print_parse_roundtrip() {
        let v = xy();
        let cases = [
            "2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2",
            "0 - x",
            "1/2*x*y - 7/3",
            "x^10 - y^10",
            "0",
        ];
        for c in cases {
            let p = parse(c, &v).unwrap();
            let s = p.to_text(&v);
            let back = parse(&s, &v).unwrap();
            assert_eq!(p, back, "roundtrip failed for {c}: printed {s}");
        }
    }
}
