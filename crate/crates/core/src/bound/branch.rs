//! Branch-and-bound over boxes with exact interval pruning.
//!
//! All searches share the same scheme: a priority queue of boxes keyed by
//! the objective's interval bound, an incumbent from exact evaluation at
//! feasible midpoints, bisection along the widest axis (ties to the lowest
//! index), and a subdivision budget. Bounds are combined by min/max only,
//! so results do not depend on processing order beyond the deterministic
//! queue.

use super::BoundConfig;
use crate::bound::structured::BoxEval;
use crate::interval::{interval_eval, BoxRegion};
use crate::{Poly, Rat};
use num_traits::Zero;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// One constraint in factored evaluation form:
/// `scale * base(x)^exp + shift >= 0`.
///
/// Expanded perfect powers like `(1 - x^2)^13` are hopeless to sign-prune
/// by termwise interval arithmetic near their roots (the binomial terms
/// cancel catastrophically); evaluating the detected root and powering the
/// interval afterwards is exact per box.
#[derive(Clone, Debug)]
pub struct ConstraintForm {
    pub scale: Rat,
    pub base: Poly,
    pub exp: u32,
    pub shift: Rat,
}

impl ConstraintForm {
    pub fn from_poly(p: &Poly) -> Self {
        if p.nvars() == 1 {
            if let Some((scale, base, exp)) = p.perfect_power_univariate() {
                return ConstraintForm {
                    scale,
                    base,
                    exp,
                    shift: Rat::zero(),
                };
            }
        }
        ConstraintForm {
            scale: Rat::from_integer(1.into()),
            base: p.clone(),
            exp: 1,
            shift: Rat::zero(),
        }
    }

    pub fn with_shift(mut self, t: &Rat) -> Self {
        self.shift += t;
        self
    }

    pub fn interval_over(&self, b: &BoxRegion) -> crate::interval::Interval {
        let mut iv = interval_eval(&self.base, b);
        if self.exp != 1 {
            iv = iv.pow(self.exp);
        }
        let mut iv = iv.scale(&self.scale);
        if !self.shift.is_zero() {
            iv.lo += &self.shift;
            iv.hi += &self.shift;
        }
        iv
    }

    pub fn eval_at(&self, pt: &[Rat]) -> Rat {
        let v = self.base.eval(pt);
        let v = if self.exp == 1 {
            v
        } else {
            crate::interval::pow_rat(&v, self.exp)
        };
        v * &self.scale + &self.shift
    }

    pub fn as_poly(&self) -> Poly {
        let n = self.base.nvars();
        let mut p = self.base.pow(self.exp).scale(&self.scale);
        p.add_term(crate::monomial::Monomial::one(n), self.shift.clone());
        p
    }
}

/// Constraint list `g_i(x) >= 0` carving a slice out of a box.
#[derive(Clone, Debug, Default)]
pub struct Slice {
    pub geq: Vec<ConstraintForm>,
}

impl Slice {
    pub fn none() -> Self {
        Slice { geq: Vec::new() }
    }

    pub fn of(geq: Vec<Poly>) -> Self {
        Slice {
            geq: geq.iter().map(ConstraintForm::from_poly).collect(),
        }
    }

    pub fn of_forms(geq: Vec<ConstraintForm>) -> Self {
        Slice { geq }
    }

    pub fn push(&mut self, form: ConstraintForm) {
        self.geq.push(form);
    }

    /// True when the box provably contains no feasible point.
    fn provably_infeasible(&self, b: &BoxRegion) -> bool {
        self.geq
            .iter()
            .any(|g| g.interval_over(b).hi < Rat::from_integer(0.into()))
    }

    fn feasible_point(&self, pt: &[Rat]) -> bool {
        self.geq
            .iter()
            .all(|g| g.eval_at(pt) >= Rat::from_integer(0.into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SliceBound {
    /// The feasible slice is proven empty.
    Empty,
    Bound { value: Rat, loose: bool },
}

impl SliceBound {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            SliceBound::Empty => None,
            SliceBound::Bound { value, .. } => Some(value),
        }
    }
}

#[derive(PartialEq, Eq)]
struct Item {
    key: Rat,
    seq: u64,
    boxr: BoxRegion,
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sound lower bound on `min { obj(x) : x in boxr, slice }`.
pub fn slice_min_lower(
    obj: &impl BoxEval,
    boxr: &BoxRegion,
    slice: &Slice,
    cfg: &BoundConfig,
) -> SliceBound {
    let mut heap: BinaryHeap<Reverse<Item>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut incumbent: Option<Rat> = None;

    let consider = |b: BoxRegion,
                        heap: &mut BinaryHeap<Reverse<Item>>,
                        incumbent: &mut Option<Rat>,
                        seq: &mut u64| {
        if slice.provably_infeasible(&b) {
            return;
        }
        let mid = b.midpoint();
        if slice.feasible_point(&mid) {
            let v = obj.eval_at(&mid);
            if incumbent.as_ref().map(|i| v < *i).unwrap_or(true) {
                *incumbent = Some(v);
            }
        }
        let lo = obj.interval_over(&b).lo;
        // Boxes that provably exceed the incumbent cannot contain the
        // minimizer.
        if let Some(inc) = incumbent.as_ref() {
            if &lo > inc {
                return;
            }
        }
        heap.push(Reverse(Item {
            key: lo,
            seq: *seq,
            boxr: b,
        }));
        *seq += 1;
    };

    consider(boxr.clone(), &mut heap, &mut incumbent, &mut seq);

    let mut spent = 0usize;
    while let Some(Reverse(item)) = heap.pop() {
        if let Some(inc) = incumbent.as_ref() {
            if inc - &item.key <= cfg.tolerance {
                return SliceBound::Bound {
                    value: item.key,
                    loose: false,
                };
            }
        }
        if spent >= cfg.max_subdivisions {
            return SliceBound::Bound {
                value: item.key,
                loose: true,
            };
        }
        spent += 1;
        let (l, r) = item.boxr.bisect(item.boxr.widest_axis());
        consider(l, &mut heap, &mut incumbent, &mut seq);
        consider(r, &mut heap, &mut incumbent, &mut seq);
    }

    match incumbent {
        // Every box was discarded as infeasible and no feasible point was
        // ever seen: the slice is empty.
        None => SliceBound::Empty,
        // Feasible points exist but all remaining boxes were dominated; the
        // incumbent itself is then within tolerance of the minimum only if
        // the last pops said so — report it as a sound bound.
        Some(inc) => SliceBound::Bound {
            value: inc,
            loose: false,
        },
    }
}

/// Sound upper bound on `max { obj(x) : x in boxr, slice }`.
pub fn slice_max_upper(
    obj: &Poly,
    boxr: &BoxRegion,
    slice: &Slice,
    cfg: &BoundConfig,
) -> SliceBound {
    match slice_min_lower(&obj.neg(), boxr, slice, cfg) {
        SliceBound::Empty => SliceBound::Empty,
        SliceBound::Bound { value, loose } => SliceBound::Bound {
            value: -value,
            loose,
        },
    }
}

/// Sound upper bound on `sup { min_i objs_i(x) : x in boxr, slice }` — the
/// combiner needed for the epsilon estimate, where the objective is the
/// pointwise minimum of the generators.
pub fn slice_sup_of_min(
    objs: &[ConstraintForm],
    boxr: &BoxRegion,
    slice: &Slice,
    cfg: &BoundConfig,
) -> SliceBound {
    assert!(!objs.is_empty());
    let mut heap: BinaryHeap<Item> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut incumbent: Option<Rat> = None;

    let consider = |b: BoxRegion,
                        heap: &mut BinaryHeap<Item>,
                        incumbent: &mut Option<Rat>,
                        seq: &mut u64| {
        if slice.provably_infeasible(&b) {
            return;
        }
        let mid = b.midpoint();
        if slice.feasible_point(&mid) {
            let v = objs
                .iter()
                .map(|p| p.eval_at(&mid))
                .min()
                .expect("nonempty objective list");
            if incumbent.as_ref().map(|i| v > *i).unwrap_or(true) {
                *incumbent = Some(v);
            }
        }
        let ub = objs
            .iter()
            .map(|p| p.interval_over(&b).hi)
            .min()
            .expect("nonempty objective list");
        if let Some(inc) = incumbent.as_ref() {
            if &ub < inc {
                return;
            }
        }
        heap.push(Item {
            key: ub,
            seq: *seq,
            boxr: b,
        });
        *seq += 1;
    };

    consider(boxr.clone(), &mut heap, &mut incumbent, &mut seq);

    let mut spent = 0usize;
    while let Some(item) = heap.pop() {
        if let Some(inc) = incumbent.as_ref() {
            if &item.key - inc <= cfg.tolerance {
                return SliceBound::Bound {
                    value: item.key,
                    loose: false,
                };
            }
        }
        if spent >= cfg.max_subdivisions {
            return SliceBound::Bound {
                value: item.key,
                loose: true,
            };
        }
        spent += 1;
        let (l, r) = item.boxr.bisect(item.boxr.widest_axis());
        consider(l, &mut heap, &mut incumbent, &mut seq);
        consider(r, &mut heap, &mut incumbent, &mut seq);
    }

    match incumbent {
        None => SliceBound::Empty,
        Some(inc) => SliceBound::Bound {
            value: inc,
            loose: false,
        },
    }
}

/// Certify `obj > 0` on the slice; `false` means "not proven".
pub fn prove_positive_on(
    obj: &impl BoxEval,
    boxr: &BoxRegion,
    slice: &Slice,
    cfg: &BoundConfig,
) -> bool {
    let mut work = vec![boxr.clone()];
    let mut spent = 0usize;
    while let Some(b) = work.pop() {
        if slice.provably_infeasible(&b) {
            continue;
        }
        let mid = b.midpoint();
        if slice.feasible_point(&mid) && obj.eval_at(&mid) <= Rat::from_integer(0.into()) {
            return false;
        }
        let iv = obj.interval_over(&b);
        if iv.lo > Rat::from_integer(0.into()) {
            continue;
        }
        spent += 1;
        if spent > cfg.max_subdivisions {
            return false;
        }
        let (l, r) = b.bisect(b.widest_axis());
        work.push(l);
        work.push(r);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::parse::parse;
    use crate::{rat, rint};

    fn cfg() -> BoundConfig {
        BoundConfig::default()
    }

    #[test]
    fn min_of_square_on_shifted_box() {
        let v = vec!["x".to_string()];
        let p = parse("x^2", &v).unwrap();
        let b = BoxRegion(vec![Interval::new(rint(1), rint(2))]);
        let r = slice_min_lower(&p, &b, &Slice::none(), &cfg());
        match r {
            SliceBound::Bound { value, loose } => {
                assert!(!loose);
                assert!(value <= rint(1) && value >= rint(1) - cfg().tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constrained_sup_simple() {
        // sup of x over {x <= 0} within [-2,3] is 0.
        let v = vec!["x".to_string()];
        let x = parse("x", &v).unwrap();
        let b = BoxRegion(vec![Interval::new(rint(-2), rint(3))]);
        let slice = Slice::of(vec![x.neg()]);
        let r = slice_sup_of_min(&[ConstraintForm::from_poly(&x)], &b, &slice, &cfg());
        match r {
            SliceBound::Bound { value, .. } => {
                assert!(value >= rint(0));
                assert!(value <= cfg().tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_slice_detected() {
        // constraint 1 <= 0 is everywhere false
        let v = vec!["x".to_string()];
        let one = parse("1", &v).unwrap();
        let x2 = parse("x^2", &v).unwrap();
        let b = BoxRegion(vec![Interval::new(rint(-1), rint(1))]);
        let r = slice_min_lower(&x2, &b, &Slice::of(vec![one.neg()]), &cfg());
        assert_eq!(r, SliceBound::Empty);
    }

    #[test]
    fn positivity_certificate() {
        let v = vec!["x".to_string()];
        let p = parse("x^2 + 1/4", &v).unwrap();
        let b = BoxRegion(vec![Interval::new(rint(-1), rint(1))]);
        assert!(prove_positive_on(&p, &b, &Slice::none(), &cfg()));
        let q = parse("0 - 1", &v).unwrap();
        assert!(!prove_positive_on(&q, &b, &Slice::none(), &cfg()));
    }

    #[test]
    fn max_upper_linear() {
        let v = vec!["x".to_string()];
        let p = parse("2*x - 1", &v).unwrap();
        let b = BoxRegion(vec![Interval::new(rat(1, 2), rint(4))]);
        match slice_max_upper(&p, &b, &Slice::none(), &cfg()) {
            SliceBound::Bound { value, .. } => {
                assert!(value >= rint(7));
                assert!(value <= rint(7) + cfg().tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
