//! Certified behaviour of a polynomial on the complement of a box or ball.
//!
//! Writing `p(R' u) = sum_d (R')^d h_d(u)` over shell boxes `u` with
//! `1 <= |u| <= 2` and scaling `R' = t R`, `t >= 1`, the descending carry
//! chain
//!
//! `T_D = R^D L_D,  T_d = R^d L_d + T_{d+1}`
//!
//! with `L_d` an interval lower bound of `h_d` over the shell box gives
//! `p(x) >= L_0 + T_1` for every `x = R' u`, `R' >= R`, provided every
//! partial sum `T_d` is non-negative. Every point with norm above `R` is
//! covered by some dyadic scaling of a shell box, so one pass over the
//! shells bounds the whole exterior.

use crate::interval::{interval_eval, pow_rat, BoxRegion, Interval};
use crate::{rint, Poly, Rat};
use num_traits::Zero;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShellNorm {
    /// `max_i |x_i|`: shells cover the complement of a cube.
    MaxAbs,
    /// Euclidean norm: shells cover the complement of a ball.
    Euclid,
}

/// Homogeneous components of `p`, indexed by total degree.
fn homogeneous_parts(p: &Poly) -> Vec<Poly> {
    let d = match p.degree() {
        None => return vec![Poly::zero(p.nvars())],
        Some(d) => d,
    };
    let mut parts = vec![Poly::zero(p.nvars()); d as usize + 1];
    for (m, c) in p.terms() {
        parts[m.degree() as usize].add_term(m.clone(), c.clone());
    }
    parts
}

/// Carry chain over one shell box. Returns a sound lower bound for
/// `p(R' u)`, all `u` in the box and all `R' >= radius`, or `None` if some
/// partial sum dips negative.
fn carry_lower_bound(parts: &[Poly], ubox: &BoxRegion, radius: &Rat) -> Option<Rat> {
    let top = parts.len() - 1;
    if top == 0 {
        return Some(interval_eval(&parts[0], ubox).lo);
    }
    let mut carry = Rat::zero();
    for d in (1..=top).rev() {
        let ld = if parts[d].is_zero() {
            Rat::zero()
        } else {
            interval_eval(&parts[d], ubox).lo
        };
        carry = pow_rat(radius, d as u32) * ld + carry;
        if carry.is_negative() {
            return None;
        }
    }
    let l0 = interval_eval(&parts[0], ubox).lo;
    Some(l0 + carry)
}

use num_traits::Signed;

/// Initial shell cover for the chosen norm.
fn shell_boxes(n: usize, norm: ShellNorm) -> Vec<BoxRegion> {
    match norm {
        ShellNorm::MaxAbs => {
            // 2n face boxes: coordinate i confined to [1,2] or [-2,-1].
            let full = Interval::new(rint(-2), rint(2));
            let mut out = Vec::with_capacity(2 * n);
            for i in 0..n {
                for sign in [1i64, -1] {
                    let mut b = BoxRegion(vec![full.clone(); n]);
                    b.0[i] = if sign > 0 {
                        Interval::new(rint(1), rint(2))
                    } else {
                        Interval::new(rint(-2), rint(-1))
                    };
                    out.push(b);
                }
            }
            out
        }
        ShellNorm::Euclid => vec![BoxRegion::centered(n, &rint(2))],
    }
}

/// For the Euclidean norm, a box can be discarded when it cannot meet the
/// annulus `1 <= |u|_2 <= 2`.
fn outside_euclid_shell(b: &BoxRegion) -> bool {
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for iv in &b.0 {
        let sq = iv.pow(2);
        lo += sq.lo;
        hi += sq.hi;
    }
    hi < rint(1) || lo > rint(4)
}

/// Bisection depth cap for shell boxes. Beyond this the endpoints carry
/// thousands of bits and a failing radius should just be abandoned for the
/// next rung of the ladder.
const SHELL_DEPTH_CAP: u32 = 16;

/// Sound lower bound for `p(x)` over `{ |x|_norm >= radius }`, or `None`
/// within the subdivision budget. Boxes whose carry bound falls below
/// `refine_below` are subdivided further (until the budget or depth cap
/// bites, in which case their loose bound stands); the chain's exactness
/// often cancels to a weak value on coarse boxes, so callers pass the
/// quality they actually need.
pub fn tail_lower_bound(
    p: &Poly,
    radius: &Rat,
    norm: ShellNorm,
    budget: usize,
    refine_below: Option<&Rat>,
) -> Option<Rat> {
    let parts = homogeneous_parts(p);
    let mut work: Vec<(BoxRegion, u32)> = shell_boxes(p.nvars(), norm)
        .into_iter()
        .map(|b| (b, 0))
        .collect();
    let mut bound: Option<Rat> = None;
    let mut spent = 0usize;
    while let Some((b, depth)) = work.pop() {
        if norm == ShellNorm::Euclid && outside_euclid_shell(&b) {
            continue;
        }
        match carry_lower_bound(&parts, &b, radius) {
            Some(v) => {
                let wants_refine = refine_below
                    .map(|t| &v < t && spent <= budget && depth < SHELL_DEPTH_CAP)
                    .unwrap_or(false);
                if wants_refine {
                    spent += 1;
                    let (l, r) = b.bisect(b.widest_axis());
                    work.push((l, depth + 1));
                    work.push((r, depth + 1));
                    continue;
                }
                bound = Some(match bound {
                    None => v,
                    Some(old) => old.min(v),
                });
            }
            None => {
                spent += 1;
                if spent > budget || depth >= SHELL_DEPTH_CAP {
                    return None;
                }
                let (l, r) = b.bisect(b.widest_axis());
                work.push((l, depth + 1));
                work.push((r, depth + 1));
            }
        }
    }
    bound
}

/// Variant that stops as soon as it is clear the final bound would be at or
/// below `threshold` — used when only `bound > threshold` matters.
pub fn tail_lower_bound_exceeds(
    p: &Poly,
    radius: &Rat,
    norm: ShellNorm,
    threshold: &Rat,
    budget: usize,
) -> bool {
    let parts = homogeneous_parts(p);
    let mut work: Vec<(BoxRegion, u32)> = shell_boxes(p.nvars(), norm)
        .into_iter()
        .map(|b| (b, 0))
        .collect();
    let mut spent = 0usize;
    while let Some((b, depth)) = work.pop() {
        if norm == ShellNorm::Euclid && outside_euclid_shell(&b) {
            continue;
        }
        let ok = match carry_lower_bound(&parts, &b, radius) {
            Some(v) => &v > threshold,
            None => false,
        };
        if !ok {
            spent += 1;
            if spent > budget || depth >= SHELL_DEPTH_CAP {
                return false;
            }
            let (l, r) = b.bisect(b.widest_axis());
            work.push((l, depth + 1));
            work.push((r, depth + 1));
        }
    }
    true
}

/// Sound upper bound for `p` on the exterior region, via the lower bound of
/// `-p`; boxes above `refine_above` get subdivided.
pub fn tail_upper_bound(
    p: &Poly,
    radius: &Rat,
    norm: ShellNorm,
    budget: usize,
    refine_above: Option<&Rat>,
) -> Option<Rat> {
    let neg_target = refine_above.map(|t| -t);
    tail_lower_bound(&p.neg(), radius, norm, budget, neg_target.as_ref()).map(|v| -v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn v3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn disk_complement_negative() {
        let v = vec!["x".to_string(), "y".to_string()];
        let g = parse("1 - x^2 - y^2", &v).unwrap();
        // -g = x^2 + y^2 - 1 >= R^2 - 1 > 0 outside radius 2
        let t = tail_lower_bound(&g.neg(), &rint(2), ShellNorm::MaxAbs, 100, Some(&Rat::zero())).unwrap();
        assert!(t > Rat::zero());
        // so g < 0 there
        let u = tail_upper_bound(&g, &rint(2), ShellNorm::MaxAbs, 100, Some(&Rat::zero())).unwrap();
        assert!(u < Rat::zero());
    }

    #[test]
    fn mixed_degree_generator() {
        // 10 - x^2 - y^4 - z^8 is negative outside a box even though its top
        // form vanishes on two coordinate planes; the carry chain picks up
        // the lower-degree axis terms.
        let g = parse("10 - x^2 - y^4 - z^8", &v3()).unwrap();
        let t = tail_lower_bound(&g.neg(), &rint(4), ShellNorm::MaxAbs, 2000, Some(&Rat::zero())).unwrap();
        assert!(t > Rat::zero(), "expected -g > 0 outside the box, got {t}");
    }

    #[test]
    fn unbounded_set_rejected() {
        let v = vec!["x".to_string()];
        let g = parse("x", &v).unwrap();
        assert!(tail_lower_bound(&g.neg(), &rint(8), ShellNorm::MaxAbs, 500, None).is_none());
    }

    #[test]
    fn euclid_shell_motzkin_generator() {
        // g+1 for the degree-6 generator with negative definite top form:
        // provably negative outside the Euclidean ball of radius 2.
        let v = vec!["x".to_string(), "y".to_string()];
        let gp1 = parse("2 - x^4*y^2 - x^2*y^4 + x^2*y^2 - y^6 - x^6", &v).unwrap();
        let t = tail_lower_bound(&gp1.neg(), &rint(2), ShellNorm::Euclid, 4000, Some(&Rat::zero())).unwrap();
        assert!(t > Rat::zero());
    }

    #[test]
    fn coercive_lower_bound() {
        let v = vec!["x".to_string()];
        let f = parse("x^2 + 1", &v).unwrap();
        let t = tail_lower_bound(&f, &rint(1), ShellNorm::MaxAbs, 100, Some(&rint(1))).unwrap();
        assert!(t >= rint(1));
    }
}
