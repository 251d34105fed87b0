//! Rigorous one-sided bounds on polynomial extrema over boxes, slices,
//! balls, and all of space, by exact-rational interval branch-and-bound.

pub mod branch;
pub mod structured;
pub mod tail;

pub use branch::{
    prove_positive_on, slice_max_upper, slice_min_lower, slice_sup_of_min, ConstraintForm, Slice,
    SliceBound,
};
pub use structured::{BoxEval, HPower, StructuredExpr};
pub use tail::{tail_lower_bound, tail_lower_bound_exceeds, tail_upper_bound, ShellNorm};

pub use crate::interval::BoxRegion;
use crate::{rat, rint, Poly, Rat};
use num_traits::{Signed, ToPrimitive, Zero};

/// Budgets and tolerances for every bound computation.
#[derive(Clone, Debug)]
pub struct BoundConfig {
    /// Target gap between inner and outer bounds.
    pub tolerance: Rat,
    /// Branch-and-bound subdivision budget per query.
    pub max_subdivisions: usize,
    /// Shell-subdivision budget and radius-doubling cap for exterior proofs.
    pub expansion_budget: usize,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            tolerance: rat(1, 16),
            max_subdivisions: 60_000,
            expansion_budget: 4_000,
        }
    }
}

impl BoundConfig {
    /// The retry policy: quarter the tolerance, double the budget.
    pub fn tightened(&self) -> Self {
        BoundConfig {
            tolerance: &self.tolerance / rint(4),
            max_subdivisions: self.max_subdivisions * 2,
            expansion_budget: self.expansion_budget * 2,
        }
    }

    pub fn with_tolerance(&self, t: Rat) -> Self {
        BoundConfig {
            tolerance: t,
            ..self.clone()
        }
    }
}

/// Where a bound or positivity claim is to hold.
#[derive(Clone, Debug)]
pub enum Region {
    Box(BoxRegion),
    /// `{ |x|^2 <= radius_sq }`.
    BallSq { nvars: usize, radius_sq: Rat },
    /// `{ x in box : g_i(x) >= 0 }`.
    SliceBox { boxr: BoxRegion, geq: Vec<Poly> },
    AllSpace,
}

impl Region {
    /// Compact regions reduce to a box plus constraint polynomials.
    pub fn as_box_and_slice(&self) -> Option<(BoxRegion, Slice)> {
        match self {
            Region::Box(b) => Some((b.clone(), Slice::none())),
            Region::BallSq { nvars, radius_sq } => {
                let r = sqrt_upper(radius_sq);
                let ball = Poly::constant(*nvars, radius_sq.clone())
                    .sub(&crate::poly::norm_sq(*nvars));
                Some((BoxRegion::centered(*nvars, &r), Slice::of(vec![ball])))
            }
            Region::SliceBox { boxr, geq } => Some((boxr.clone(), Slice::of(geq.clone()))),
            Region::AllSpace => None,
        }
    }
}

/// A one-sided bound, plus whether the budget sufficed to reach tolerance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub value: Rat,
    pub loose: bool,
}

/// `L <= min over the box`, within tolerance when the budget suffices.
pub fn min_lower_bound(p: &Poly, b: &BoxRegion, cfg: &BoundConfig) -> BoundResult {
    match slice_min_lower(p, b, &Slice::none(), cfg) {
        SliceBound::Bound { value, loose } => BoundResult { value, loose },
        SliceBound::Empty => unreachable!("box regions are never empty"),
    }
}

/// `U >= max over the box`.
pub fn max_upper_bound(p: &Poly, b: &BoxRegion, cfg: &BoundConfig) -> BoundResult {
    match slice_max_upper(p, b, &Slice::none(), cfg) {
        SliceBound::Bound { value, loose } => BoundResult { value, loose },
        SliceBound::Empty => unreachable!("box regions are never empty"),
    }
}

/// Upper bound on `sup { min_i objs_i : q <= 0 for all q in nonpos }` over
/// the box, or `Empty` when the constrained slice is proven empty.
pub fn constrained_sup(
    objs: &[Poly],
    nonpos: &[Poly],
    b: &BoxRegion,
    cfg: &BoundConfig,
) -> SliceBound {
    let slice = Slice::of(nonpos.iter().map(|q| q.neg()).collect());
    let forms: Vec<ConstraintForm> = objs.iter().map(ConstraintForm::from_poly).collect();
    slice_sup_of_min(&forms, b, &slice, cfg)
}

/// Lower bound on `inf` over a general compact region.
pub fn region_min_lower(p: &Poly, region: &Region, cfg: &BoundConfig) -> SliceBound {
    let (b, slice) = region
        .as_box_and_slice()
        .expect("region_min_lower needs a compact region");
    slice_min_lower(p, &b, &slice, cfg)
}

/// Upper bound on `sup` over a general compact region.
pub fn region_max_upper(p: &Poly, region: &Region, cfg: &BoundConfig) -> SliceBound {
    let (b, slice) = region
        .as_box_and_slice()
        .expect("region_max_upper needs a compact region");
    slice_max_upper(p, &b, &slice, cfg)
}

/// Radius ladder used by the exterior proofs: finer near 1, then doubling.
fn radius_ladder(cap: usize) -> Vec<Rat> {
    let mut out = vec![rint(1), rat(3, 2), rint(2), rint(3), rint(4), rint(6), rint(8)];
    let mut r = rint(16);
    for _ in 0..cap {
        out.push(r.clone());
        r = r * rint(2);
    }
    out
}

/// `R` such that `g(x) < 0` is proven for every `|x|_inf > R`; hence
/// `S(g)` lies in the cube of radius `R`. `None` when no ladder radius
/// admits a proof within budget.
pub fn enclosure_radius(g: &Poly, cfg: &BoundConfig) -> Option<Rat> {
    let neg = g.neg();
    radius_ladder(18)
        .into_iter()
        .find(|r| tail_lower_bound_exceeds(&neg, r, ShellNorm::MaxAbs, &Rat::zero(), cfg.expansion_budget))
}

/// Euclidean variant: `g(x) < 0` proven for `|x|_2 > R`.
pub fn euclid_enclosure_radius(g: &Poly, cfg: &BoundConfig) -> Option<Rat> {
    let neg = g.neg();
    radius_ladder(18)
        .into_iter()
        .find(|r| tail_lower_bound_exceeds(&neg, r, ShellNorm::Euclid, &Rat::zero(), cfg.expansion_budget))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalBound {
    Finite { value: Rat, loose: bool },
    UnboundedOrUnknown,
}

impl GlobalBound {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            GlobalBound::Finite { value, .. } => Some(value),
            GlobalBound::UnboundedOrUnknown => None,
        }
    }
}

/// Sound global lower bound via exterior carry analysis plus interior
/// branch-and-bound. The exterior step needs the top structure of `f` to
/// dominate on every shell box; when it cannot be established the result is
/// `UnboundedOrUnknown` and the caller may fall back to a heuristic box.
pub fn global_min_lower_bound(f: &Poly, cfg: &BoundConfig) -> GlobalBound {
    global_min_lower_structured(&StructuredExpr::plain(f.clone()), cfg)
}

/// Structured version used by multiplier verification: the exterior bound
/// works on the exact expansion, the interior on the composed form.
pub fn global_min_lower_structured(e: &StructuredExpr, cfg: &BoundConfig) -> GlobalBound {
    let expanded = e.expand();
    if expanded.is_zero() {
        return GlobalBound::Finite {
            value: Rat::zero(),
            loose: false,
        };
    }
    for r in radius_ladder(10) {
        // cheap feasibility probe first, then aim the refinement at the
        // interior bound so the exterior never dominates the result
        if tail_lower_bound(&expanded, &r, ShellNorm::MaxAbs, cfg.expansion_budget, None).is_none() {
            continue;
        }
        let inside = match slice_min_lower(e, &BoxRegion::centered(e.nvars(), &r), &Slice::none(), cfg)
        {
            SliceBound::Bound { value, loose } => BoundResult { value, loose },
            SliceBound::Empty => unreachable!(),
        };
        let outside = tail_lower_bound(
            &expanded,
            &r,
            ShellNorm::MaxAbs,
            cfg.expansion_budget,
            Some(&inside.value),
        )
        .expect("tail bound vanished on refinement");
        let value = inside.value.min(outside);
        return GlobalBound::Finite {
            value,
            loose: inside.loose,
        };
    }
    GlobalBound::UnboundedOrUnknown
}

/// Certified upper bound on `sup g` over all of space, or `None`.
pub fn global_sup_upper_bound(g: &Poly, cfg: &BoundConfig) -> Option<Rat> {
    for r in radius_ladder(10) {
        if tail_upper_bound(g, &r, ShellNorm::MaxAbs, cfg.expansion_budget, None).is_none() {
            continue;
        }
        let inside = max_upper_bound(g, &BoxRegion::centered(g.nvars(), &r), cfg);
        let outside = tail_upper_bound(
            g,
            &r,
            ShellNorm::MaxAbs,
            cfg.expansion_budget,
            Some(&inside.value),
        )
        .expect("tail bound vanished on refinement");
        return Some(inside.value.max(outside));
    }
    None
}

/// Certify `e > 0` on a region. `false` means "not proven".
pub fn prove_positive(e: &StructuredExpr, region: &Region, cfg: &BoundConfig) -> bool {
    match region {
        Region::AllSpace => {
            let expanded = e.expand();
            if expanded.is_zero() {
                return false;
            }
            for r in radius_ladder(10) {
                if tail_lower_bound_exceeds(
                    &expanded,
                    &r,
                    ShellNorm::MaxAbs,
                    &Rat::zero(),
                    cfg.expansion_budget,
                ) {
                    return prove_positive_on(
                        e,
                        &BoxRegion::centered(e.nvars(), &r),
                        &Slice::none(),
                        cfg,
                    );
                }
            }
            false
        }
        compact => {
            let (b, slice) = compact.as_box_and_slice().expect("compact region");
            prove_positive_on(e, &b, &slice, cfg)
        }
    }
}

/// Rational `r >= sqrt(x)`, reasonably tight (Newton from above).
pub fn sqrt_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Rat::zero();
    }
    let mut r = if x >= &rint(1) { x.clone() } else { rint(1) };
    for _ in 0..30 {
        let next = (&r + x / &r) / rint(2);
        // Limit denominator growth: round the iterate up to 2^-24 grid.
        let snapped = snap_up(&next, 24);
        if &snapped * &snapped < *x {
            break;
        }
        if snapped == r {
            break;
        }
        r = snapped;
    }
    debug_assert!(&r * &r >= *x);
    r
}

/// Smallest multiple of 2^-bits at or above v.
pub fn snap_up(v: &Rat, bits: u32) -> Rat {
    let scale = Rat::from_integer(crate::Int::from(2).pow(bits));
    let scaled = v * &scale;
    let c = scaled.ceil();
    c / scale
}

/// Sampling-based minimum estimate over a box: not certified, used only
/// where a downstream exact check gates the result. Returns the best point
/// and its exact value.
pub fn heuristic_min(f: &Poly, b: &BoxRegion, samples_per_axis: usize) -> (Vec<Rat>, Rat) {
    let n = f.nvars();
    let fd = f.to_f64_poly();
    let lo: Vec<f64> = b.0.iter().map(|iv| iv.lo.to_f64().unwrap()).collect();
    let hi: Vec<f64> = b.0.iter().map(|iv| iv.hi.to_f64().unwrap()).collect();
    let k = samples_per_axis.max(2);
    let mut best_pt = vec![0.0f64; n];
    let mut best = f64::INFINITY;
    let total = k.pow(n as u32).min(2_000_000);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let pt: Vec<f64> = (0..n)
            .map(|i| lo[i] + (hi[i] - lo[i]) * (idx[i] as f64) / ((k - 1) as f64))
            .collect();
        let v = fd.eval(&pt);
        if v < best {
            best = v;
            best_pt = pt;
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            idx[i] += 1;
            if idx[i] < k {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    // local refinement by coordinate descent with shrinking steps
    let mut step: Vec<f64> = (0..n).map(|i| (hi[i] - lo[i]) / (k as f64)).collect();
    for _ in 0..40 {
        let mut improved = false;
        for i in 0..n {
            for dir in [-1.0, 1.0] {
                let mut cand = best_pt.clone();
                cand[i] = (cand[i] + dir * step[i]).clamp(lo[i], hi[i]);
                let v = fd.eval(&cand);
                if v < best {
                    best = v;
                    best_pt = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in step.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    // snap to rationals inside the box and evaluate exactly
    let pt: Vec<Rat> = best_pt
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = Rat::from_float(v).unwrap_or_else(Rat::zero);
            let r = snap_up(&r, 20);
            if r < b.0[i].lo {
                b.0[i].lo.clone()
            } else if r > b.0[i].hi {
                b.0[i].hi.clone()
            } else {
                r
            }
        })
        .collect();
    let val = f.eval(&pt);
    (pt, val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn cfg() -> BoundConfig {
        BoundConfig::default()
    }

    fn v2() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn enclosure_unit_disk() {
        let g = parse("1 - x^2 - y^2", &v2()).unwrap();
        let r = enclosure_radius(&g, &cfg()).unwrap();
        assert!(r <= rint(2));
    }

    #[test]
    fn enclosure_unbounded() {
        let v = vec!["x".to_string()];
        let g = parse("x", &v).unwrap();
        assert_eq!(enclosure_radius(&g, &cfg()), None);
    }

    #[test]
    fn enclosure_disk_radius_8() {
        let g = parse("8 - x^2 - y^2", &v2()).unwrap();
        let r = enclosure_radius(&g, &cfg()).unwrap();
        assert!(r <= rint(4));
    }

    #[test]
    fn global_min_simple() {
        let v = vec!["x".to_string()];
        let f = parse("x^2 + 1", &v).unwrap();
        match global_min_lower_bound(&f, &cfg()) {
            GlobalBound::Finite { value, .. } => {
                assert!(value <= rint(1));
                assert!(value >= rint(1) - cfg().tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn global_min_unknown_for_semidefinite_top() {
        // top form x^4 y^2 + x^2 y^4 vanishes on the axes, so the exterior
        // carry analysis cannot certify a bound.
        let f = parse("2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v2()).unwrap();
        assert_eq!(global_min_lower_bound(&f, &cfg()), GlobalBound::UnboundedOrUnknown);
    }

    #[test]
    fn global_sup_examples() {
        let v3 = vec!["x".into(), "y".into(), "z".into()];
        let arch = parse("5 - x^2 - y^2 - z^2", &v3).unwrap();
        let s = global_sup_upper_bound(&arch, &cfg()).unwrap();
        assert!(s >= rint(5) && s <= rint(5) + cfg().tolerance);

        let vx = vec!["x".to_string()];
        let x = parse("x", &vx).unwrap();
        assert_eq!(global_sup_upper_bound(&x, &cfg()), None);
    }

    #[test]
    fn prove_positive_regions() {
        let v = vec!["x".to_string()];
        let p = parse("x^2 + 1/4", &v).unwrap();
        assert!(prove_positive(
            &StructuredExpr::plain(p),
            &Region::Box(BoxRegion::centered(1, &rint(1))),
            &cfg()
        ));
        let neg = parse("0 - 1", &v).unwrap();
        assert!(!prove_positive(
            &StructuredExpr::plain(neg),
            &Region::AllSpace,
            &cfg()
        ));
    }

    #[test]
    fn sqrt_upper_sound() {
        for (num, den) in [(2i64, 1i64), (3, 1), (1, 2), (49, 4), (14, 1)] {
            let x = rat(num, den);
            let r = sqrt_upper(&x);
            assert!(&r * &r >= x);
        }
    }

    #[test]
    fn heuristic_min_finds_motzkin_dip() {
        let f = parse("2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &v2()).unwrap();
        let b = BoxRegion::centered(2, &rint(2));
        let (_, val) = heuristic_min(&f, &b, 41);
        assert!(val <= rat(21, 20), "estimate too far above true minimum 1: {val}");
        assert!(val >= rint(1), "exact evaluation can never undercut the true minimum");
    }
}
