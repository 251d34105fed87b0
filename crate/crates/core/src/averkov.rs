//! Multiplier construction: given generators and a target positive on the
//! non-negative set, produce even-power multipliers
//! `sigma_i = ((g_i - gamma)/(gamma + epsilon))^{2N}` with exact-rational
//! parameter estimates, over a compact region or over all of space.

use crate::bound::{
    self, global_sup_upper_bound, prove_positive_on, slice_max_upper, slice_min_lower,
    slice_sup_of_min, tail_upper_bound, BoundConfig, ConstraintForm, GlobalBound, HPower, Region,
    ShellNorm, Slice, SliceBound, StructuredExpr,
};
use crate::interval::{pow_rat, BoxRegion};
use crate::poly::norm_sq;
use crate::sos::{sos_decompose, SosConfig, SosDecomposition, SosOutcome};
use crate::{rat, rint, Error, Poly, Rat};
use num_traits::{Signed, Zero};

/// Certified parameter bundle for the multiplier construction.
///
/// Invariant: `n_exponent` satisfies both exact power inequalities below
/// against the stored `gamma`, `epsilon`, `mu`, `big_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverkovParams {
    pub gamma: Rat,
    pub epsilon: Rat,
    pub mu: Rat,
    pub big_m: Rat,
    pub n_exponent: u32,
}

impl AverkovParams {
    pub fn admissible(&self, s: usize) -> bool {
        exponent_admissible(
            &self.gamma,
            &self.epsilon,
            &self.mu,
            &self.big_m,
            s,
            self.n_exponent,
        )
    }
}

/// Exact check of the two power inequalities at a given `N`:
/// `s * 2 gamma (gamma/(gamma+eps))^{2N} < mu` and
/// `2 eps ((gamma+2eps)/(gamma+eps))^{2N} > M + mu`.
pub fn exponent_admissible(gamma: &Rat, eps: &Rat, mu: &Rat, big_m: &Rat, s: usize, n: u32) -> bool {
    let ge = gamma + eps;
    let g2e = gamma + eps * rint(2);
    let p_g = pow_rat(gamma, 2 * n);
    let p_ge = pow_rat(&ge, 2 * n);
    let p_g2e = pow_rat(&g2e, 2 * n);
    let cond1 = rint(2) * gamma * rint(s as i64) * p_g < mu * &p_ge;
    let cond2 = rint(2) * eps * p_g2e > (big_m + mu) * &p_ge;
    cond1 && cond2
}

/// Least `N >= 1` satisfying both inequalities, by incremental exact
/// powering. `None` when the cap is reached.
pub fn smallest_exponent(
    gamma: &Rat,
    eps: &Rat,
    mu: &Rat,
    big_m: &Rat,
    s: usize,
    cap: u32,
) -> Option<u32> {
    if !mu.is_positive() {
        return None;
    }
    let sq = |v: &Rat| v * v;
    let a = sq(gamma);
    let b = sq(&(gamma + eps));
    let c = sq(&(gamma + eps * rint(2)));
    let mut pa = a.clone();
    let mut pb = b.clone();
    let mut pc = c.clone();
    for n in 1..=cap {
        let cond1 = rint(2) * gamma * rint(s as i64) * &pa < mu * &pb;
        let cond2 = rint(2) * eps * &pc > (big_m + mu) * &pb;
        if cond1 && cond2 {
            return Some(n);
        }
        pa *= &a;
        pb *= &b;
        pc *= &c;
    }
    None
}

/// `sigma = ((g - gamma)/denom)^{exp}`, an even power of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverkovMultiplier {
    pub gamma: Rat,
    pub denom: Rat,
    pub exp: u32,
}

impl AverkovMultiplier {
    pub fn from_params(p: &AverkovParams) -> Self {
        AverkovMultiplier {
            gamma: p.gamma.clone(),
            denom: &p.gamma + &p.epsilon,
            exp: 2 * p.n_exponent,
        }
    }

    /// `H(t) = sigma(t) * t`, the term subtracted from `f` per generator.
    pub fn h_power(&self) -> HPower {
        HPower {
            gamma: self.gamma.clone(),
            denom: self.denom.clone(),
            exp: self.exp,
        }
    }

    /// Expanded multiplier polynomial.
    pub fn expand(&self, g: &Poly) -> Poly {
        let shifted = g.sub(&Poly::constant(g.nvars(), self.gamma.clone()));
        let scaled = shifted.scale(&(rint(1) / self.denom.clone()));
        scaled.pow(self.exp)
    }

    /// Structural SOS form: one square of `((g - gamma)^{exp/2})` with
    /// weight `denom^{-exp}`.
    pub fn to_sos(&self, g: &Poly) -> SosDecomposition {
        assert!(self.exp % 2 == 0, "multiplier exponent must be even");
        let shifted = g.sub(&Poly::constant(g.nvars(), self.gamma.clone()));
        let half = shifted.pow(self.exp / 2);
        let weight = rint(1) / pow_rat(&self.denom, self.exp);
        SosDecomposition::single_square(weight, half)
    }
}

#[derive(Clone, Debug)]
pub enum ParamsOutcome {
    /// The slice `{f <= 0}` inside the region is empty: no multiplier is
    /// needed.
    Skip,
    Params(AverkovParams),
}

/// Slack rule pinned by the design: strict bounds from sound non-strict
/// ones via `gamma := bound * 9/8 + 1/8` and `eps := bound * 7/16`.
fn gamma_from_bound(half_max: &Rat) -> Rat {
    let g = half_max * rat(9, 8) + rat(1, 8);
    if g.is_positive() {
        g
    } else {
        rat(1, 8)
    }
}

fn epsilon_from_bound(abs_sup: &Rat) -> Rat {
    abs_sup * rat(7, 16)
}

/// Estimate `(gamma, epsilon, mu, M, N)` for generators over a compact
/// region, entirely from certified one-sided bounds.
pub fn compute_params(
    gens: &[Poly],
    f: &Poly,
    region: &Region,
    cfg: &BoundConfig,
    n_cap: u32,
) -> Result<ParamsOutcome, Error> {
    let (boxr, slice) = region
        .as_box_and_slice()
        .ok_or_else(|| Error::stage("averkov", "compact region required"))?;
    // gamma from sup of each generator
    let mut ub_g: Option<Rat> = None;
    for g in gens {
        match slice_max_upper(g, &boxr, &slice, cfg) {
            SliceBound::Empty => return Ok(ParamsOutcome::Skip),
            SliceBound::Bound { value, .. } => {
                ub_g = Some(match ub_g {
                    None => value,
                    Some(old) => old.max(value),
                });
            }
        }
    }
    let ub_g = ub_g.expect("nonempty generator list");
    let gamma = gamma_from_bound(&(&ub_g / rint(2)));

    // epsilon from the sup of min_i g_i over the slice {f <= 0}
    let mut t_slice = slice.clone();
    t_slice.push(ConstraintForm::from_poly(&f.neg()));
    let gen_forms: Vec<ConstraintForm> = gens.iter().map(ConstraintForm::from_poly).collect();
    let sup_min = slice_sup_of_min(&gen_forms, &boxr, &t_slice, cfg);
    let ub_m = match sup_min {
        SliceBound::Empty => return Ok(ParamsOutcome::Skip),
        SliceBound::Bound { value, .. } => value,
    };
    if !ub_m.is_negative() {
        return Err(Error::stage(
            "averkov",
            format!("no admissible epsilon: sup of min generators over {{f<=0}} bounded only by {ub_m}"),
        ));
    }
    let epsilon = epsilon_from_bound(&ub_m.abs());

    // mu over the widened slice {g_i >= -2 eps}
    let mut mu_slice = slice.clone();
    let two_eps = &epsilon * rint(2);
    for g in gens {
        mu_slice.push(ConstraintForm::from_poly(g).with_shift(&two_eps));
    }
    let mu = match slice_min_lower(f, &boxr, &mu_slice, cfg) {
        SliceBound::Empty => rint(1),
        SliceBound::Bound { value, .. } => {
            if !value.is_positive() {
                return Err(Error::stage(
                    "averkov",
                    format!("mu bound not positive: {value}"),
                ));
            }
            value
        }
    };

    // M = -min f over the region
    let big_m = match slice_min_lower(f, &boxr, &slice, cfg) {
        SliceBound::Empty => return Ok(ParamsOutcome::Skip),
        SliceBound::Bound { value, .. } => -value,
    };

    let n_exponent = smallest_exponent(&gamma, &epsilon, &mu, &big_m, gens.len(), n_cap)
        .ok_or_else(|| Error::stage("averkov", "no admissible exponent under cap"))?;
    Ok(ParamsOutcome::Params(AverkovParams {
        gamma,
        epsilon,
        mu,
        big_m,
        n_exponent,
    }))
}

/// Multiplier list for a compact region: `None` means every multiplier is
/// zero (the skip path). On success the construction is re-verified:
/// `f - sum H(g_i) > 0` on the region.
pub fn alg_averkov(
    gens: &[Poly],
    f: &Poly,
    region: &Region,
    cfg: &BoundConfig,
    n_cap: u32,
) -> Result<Option<AverkovMultiplier>, Error> {
    let (boxr, slice) = region
        .as_box_and_slice()
        .ok_or_else(|| Error::stage("averkov", "compact region required"))?;
    // skip when the region is empty or f is already positive on it
    match slice_min_lower(f, &boxr, &slice, cfg) {
        SliceBound::Empty => return Ok(None),
        SliceBound::Bound { value, .. } => {
            if value.is_positive() {
                return Ok(None);
            }
        }
    }
    let params = match compute_params(gens, f, region, cfg, n_cap)? {
        ParamsOutcome::Skip => {
            // slice {f <= 0} empty certifies positivity of f on the region
            return Ok(None);
        }
        ParamsOutcome::Params(p) => p,
    };
    // verification with a bounded retry ladder: bump the exponent, then
    // tighten the bound config once.
    let mut attempts: Vec<(AverkovMultiplier, BoundConfig)> = Vec::new();
    let base = AverkovMultiplier::from_params(&params);
    attempts.push((base.clone(), cfg.clone()));
    let bumped = AverkovMultiplier {
        exp: base.exp + 4,
        ..base.clone()
    };
    attempts.push((bumped.clone(), cfg.clone()));
    attempts.push((bumped, cfg.tightened()));
    for (mult, c) in attempts {
        let mut expr = StructuredExpr::plain(f.clone());
        for g in gens {
            expr = expr.with_h_term(rint(-1), mult.h_power(), g.clone());
        }
        if prove_positive_on(&expr, &boxr, &slice, &c) {
            return Ok(Some(mult));
        }
    }
    Err(Error::stage(
        "averkov",
        "constructed multipliers failed the positivity re-check",
    ))
}

/// Certified global minimum with an optional SOS floor witness
/// (`f - lambda` is SOS, so `f >= lambda` everywhere).
#[derive(Clone, Debug)]
pub enum GlobalMin {
    Certified {
        value: Rat,
        floor: Option<(Rat, SosDecomposition)>,
    },
    Unknown,
}

impl GlobalMin {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            GlobalMin::Certified { value, .. } => Some(value),
            GlobalMin::Unknown => None,
        }
    }
}

/// Global lower bound: coercivity route first, then the SOS-floor route
/// (`f - lambda` a verified sum of squares).
pub fn certified_global_min(f: &Poly, cfg: &BoundConfig, sos_cfg: &SosConfig) -> GlobalMin {
    certified_global_min_expr(&StructuredExpr::plain(f.clone()), f, cfg, sos_cfg)
}

/// Structured variant: branch-and-bound runs on the factored expression,
/// the SOS floor on the expansion.
pub fn certified_global_min_expr(
    e: &StructuredExpr,
    f_poly: &Poly,
    cfg: &BoundConfig,
    sos_cfg: &SosConfig,
) -> GlobalMin {
    if let GlobalBound::Finite { value, .. } = bound::global_min_lower_structured(e, cfg) {
        return GlobalMin::Certified { value, floor: None };
    }
    // SOS floor, guided by a sampled estimate
    let probe_box = BoxRegion::centered(f_poly.nvars(), &rint(4));
    let (_, est) = bound::heuristic_min(f_poly, &probe_box, 17);
    if est.is_positive() {
        for frac in [rat(1, 2), rat(1, 4), rat(1, 16)] {
            let lambda = &est * &frac;
            let shifted = f_poly.sub(&Poly::constant(f_poly.nvars(), lambda.clone()));
            if let SosOutcome::Sos(dec) = sos_decompose(&shifted, sos_cfg) {
                return GlobalMin::Certified {
                    value: lambda.clone(),
                    floor: Some((lambda, dec)),
                };
            }
            // Reznick-style escalation: (f - lambda) |X|^2 SOS also
            // certifies the floor.
            let lifted = shifted.mul(&norm_sq(f_poly.nvars()));
            if let SosOutcome::Sos(_) = sos_decompose(&lifted, sos_cfg) {
                return GlobalMin::Certified {
                    value: lambda,
                    floor: None,
                };
            }
        }
    }
    GlobalMin::Unknown
}

/// `g~ = |X|^{2 floor((d-1)^n / 2) + 2} * g`, coercing a bounded-support
/// generator to decay at infinity. Archimedean-shaped inputs pass through
/// unchanged; degree <= 2 inputs are first lifted by `(1 + |X|^2)`.
pub fn coercive_transform(g: &Poly, cfg: &BoundConfig) -> Result<Poly, Error> {
    if bound::enclosure_radius(g, cfg).is_none() {
        return Err(Error::stage(
            "coercive_transform",
            "non-negative set not proven bounded",
        ));
    }
    if is_archimedean_shaped(g) {
        return Ok(g.clone());
    }
    let n = g.nvars() as u32;
    let mut lifted = g.clone();
    if lifted.degree().unwrap_or(0) <= 2 {
        let one_plus = Poly::one(g.nvars()).add(&norm_sq(g.nvars()));
        lifted = one_plus.mul(&lifted);
    }
    let d = lifted.degree().unwrap() as i64;
    // (d-1)^n can explode; refuse clearly rather than building an
    // astronomically sized polynomial.
    let mut pow: i64 = 1;
    for _ in 0..n {
        pow = pow.saturating_mul(d - 1);
        if pow > 1_000 {
            return Err(Error::stage(
                "coercive_transform",
                format!("transform exponent (d-1)^n too large: d={d}, n={n}"),
            ));
        }
    }
    let half = (pow / 2) as u32 + 1;
    Ok(norm_sq(g.nvars()).pow(half).mul(&lifted))
}

/// Cheap sufficient test: literally `N - |X|^2`, or a top form that is a
/// negative multiple of an even power of `|X|^2`. Univariate inputs always
/// take the transform (the worked univariate cases expect it, and the
/// exponent is tiny there).
fn is_archimedean_shaped(g: &Poly) -> bool {
    if g.nvars() == 1 {
        return false;
    }
    let top = g.top_form();
    let d = match top.degree() {
        Some(d) if d % 2 == 0 && d > 0 => d,
        _ => return false,
    };
    let n = g.nvars();
    let lead = top.coeff(&crate::monomial::Monomial::var_pow(n, 0, d));
    if !lead.is_negative() {
        return false;
    }
    let model: Poly = norm_sq(n).pow(d / 2).scale(&lead);
    model == top
}

/// Extended construction outcome over all of space.
#[derive(Clone, Debug)]
pub struct ExtAverkov {
    /// `None`: `f` was proven positive globally, no multiplier needed.
    pub sigma: Option<AverkovMultiplier>,
    /// The polynomial the multiplier applies to (`g` or its transform).
    pub g_used: Poly,
    /// Certified global minimum of `f` (the `M` source) when computed.
    pub f_floor: GlobalMin,
}

/// Algorithm over `B = R^n` for one generator with bounded non-negative
/// set and a target with a certified global lower bound.
pub fn alg_ext_averkov(
    g: &Poly,
    f_expr: &StructuredExpr,
    cfg: &BoundConfig,
    sos_cfg: &SosConfig,
    n_cap: u32,
) -> Result<ExtAverkov, Error> {
    let n = f_expr.nvars();
    let f = &f_expr.expand();
    let f_floor = certified_global_min_expr(f_expr, f, cfg, sos_cfg);
    if let GlobalMin::Certified { value, .. } = &f_floor {
        if value.is_positive() {
            return Ok(ExtAverkov {
                sigma: None,
                g_used: g.clone(),
                f_floor,
            });
        }
    }
    let big_m = match &f_floor {
        GlobalMin::Certified { value, .. } => -value.clone(),
        GlobalMin::Unknown => {
            return Err(Error::stage(
                "ext_averkov",
                "target has no certified global lower bound",
            ))
        }
    };
    // choose g or its coercive transform, with a certified global sup
    let (g_used, sup_g) = match global_sup_upper_bound(g, cfg) {
        Some(s) => (g.clone(), s),
        None => {
            let gt = coercive_transform(g, cfg)?;
            let s = global_sup_upper_bound(&gt, cfg).ok_or_else(|| {
                Error::stage("ext_averkov", "no certified sup for the transformed generator")
            })?;
            (gt, s)
        }
    };
    let gamma = gamma_from_bound(&(&sup_g / rint(2)));

    // epsilon: certified upper bound of g_used over T = {f <= 0}
    let mut ub_t: Option<Rat> = None;
    for r in [rint(2), rint(4), rint(8), rint(16), rint(64)] {
        if let Some(tail) = tail_upper_bound(&g_used, &r, ShellNorm::MaxAbs, cfg.expansion_budget, Some(&Rat::zero())) {
            let boxr = BoxRegion::centered(n, &r);
            let slice = Slice::of(vec![f.neg()]);
            let inner =
                slice_sup_of_min(&[ConstraintForm::from_poly(&g_used)], &boxr, &slice, cfg);
            let candidate = match inner {
                SliceBound::Empty => tail,
                SliceBound::Bound { value, .. } => value.max(tail),
            };
            ub_t = Some(candidate);
            break;
        }
    }
    let ub_t = ub_t.ok_or_else(|| Error::stage("ext_averkov", "no tail bound for the generator"))?;
    if !ub_t.is_negative() {
        return Err(Error::stage(
            "ext_averkov",
            format!("sup of generator over {{f<=0}} only bounded by {ub_t}"),
        ));
    }
    let epsilon = epsilon_from_bound(&ub_t.abs());

    // mu: min f over {g_used >= -2 eps}, a bounded set by construction
    let widened = g_used.add(&Poly::constant(n, &epsilon * rint(2)));
    let r_mu = bound::enclosure_radius(&widened, cfg).ok_or_else(|| {
        Error::stage("ext_averkov", "widened generator slice not proven bounded")
    })?;
    let widened_form = ConstraintForm::from_poly(&g_used).with_shift(&(&epsilon * rint(2)));
    let mu = match slice_min_lower(
        f_expr,
        &BoxRegion::centered(n, &r_mu),
        &Slice::of_forms(vec![widened_form]),
        cfg,
    ) {
        SliceBound::Empty => rint(1),
        SliceBound::Bound { value, .. } => {
            if !value.is_positive() {
                return Err(Error::stage(
                    "ext_averkov",
                    format!("mu bound not positive: {value}"),
                ));
            }
            value
        }
    };

    let n_exp = smallest_exponent(&gamma, &epsilon, &mu, &big_m, 1, n_cap)
        .ok_or_else(|| Error::stage("ext_averkov", "no admissible exponent under cap"))?;
    let base = AverkovMultiplier {
        gamma,
        denom: Rat::zero(), // filled below
        exp: 2 * n_exp,
    };
    let base = AverkovMultiplier {
        denom: &base.gamma + &epsilon,
        ..base
    };

    let mut attempts = vec![
        (base.clone(), cfg.clone()),
        (
            AverkovMultiplier {
                exp: base.exp + 4,
                ..base.clone()
            },
            cfg.clone(),
        ),
        (
            AverkovMultiplier {
                exp: base.exp + 4,
                ..base.clone()
            },
            cfg.tightened(),
        ),
    ];
    for (mult, c) in attempts.drain(..) {
        let expr = f_expr
            .clone()
            .with_h_term(rint(-1), mult.h_power(), g_used.clone());
        if let GlobalBound::Finite { value, .. } = bound::global_min_lower_structured(&expr, &c) {
            if value.is_positive() {
                return Ok(ExtAverkov {
                    sigma: Some(mult),
                    g_used,
                    f_floor,
                });
            }
        }
    }
    Err(Error::stage(
        "ext_averkov",
        "constructed multiplier failed the global positivity re-check",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn cfg() -> BoundConfig {
        BoundConfig::default()
    }

    #[test]
    fn exponent_search_matches_direct_check() {
        let gamma = rint(36);
        let eps = rint(3);
        let mu = rat(45, 4);
        let big_m = rint(27);
        let n = smallest_exponent(&gamma, &eps, &mu, &big_m, 4, 500).unwrap();
        assert!(exponent_admissible(&gamma, &eps, &mu, &big_m, 4, n));
        if n > 1 {
            assert!(!exponent_admissible(&gamma, &eps, &mu, &big_m, 4, n - 1));
        }
    }

    #[test]
    fn skip_when_positive() {
        // f = 1 + x^2 over S(1 - x^2) = [-1, 1]: minimum 1 > 0, no
        // multiplier needed.
        let v = vec!["x".to_string()];
        let f = parse("1 + x^2", &v).unwrap();
        let g = parse("1 - x^2", &v).unwrap();
        let region = Region::SliceBox {
            boxr: BoxRegion::centered(1, &rint(2)),
            geq: vec![g.clone()],
        };
        let out = alg_averkov(&[g], &f, &region, &cfg(), 2_000).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn constant_positive_skips_via_empty_slice() {
        let v = vec!["x".to_string()];
        let f = parse("1", &v).unwrap();
        let g = parse("x", &v).unwrap();
        let region = Region::Box(BoxRegion::centered(1, &rint(3)));
        match compute_params(&[g], &f, &region, &cfg(), 2_000).unwrap() {
            ParamsOutcome::Skip => {}
            other => panic!("expected skip, got {other:?}"),
        }
    }

    #[test]
    fn coercive_transform_cases() {
        let v = vec!["x".to_string()];
        // 1 - x^2 has degree 2: lift to (1+x^2)(1-x^2) = 1 - x^4 of degree
        // 4, then multiply by x^{2*floor(3/2)+2} = x^4.
        let g = parse("1 - x^2", &v).unwrap();
        let gt = coercive_transform(&g, &cfg()).unwrap();
        let expect = parse("x^4*(1 - x^4)", &v).unwrap();
        assert_eq!(gt, expect);

        let v2 = vec!["x".to_string(), "y".to_string()];
        let arch = parse("5 - x^2 - y^2", &v2).unwrap();
        assert_eq!(coercive_transform(&arch, &cfg()).unwrap(), arch);
        let arch8 = parse("8 - x^2 - y^2", &v2).unwrap();
        assert_eq!(coercive_transform(&arch8, &cfg()).unwrap(), arch8);

        let unbounded = parse("x", &v).unwrap();
        assert!(coercive_transform(&unbounded, &cfg()).is_err());
    }

    #[test]
    fn ext_averkov_skips_globally_positive() {
        let v = vec!["x".to_string()];
        let f = parse("x^2 + 1", &v).unwrap();
        let g = parse("1 - x^2", &v).unwrap();
        let out = alg_ext_averkov(
            &g,
            &StructuredExpr::plain(f),
            &cfg(),
            &SosConfig::default(),
            2_000,
        )
        .unwrap();
        assert!(out.sigma.is_none());
    }

    #[test]
    fn global_sup_of_transformed_generator() {
        // x^4 (1 - x^4): certified sup must dominate the true maximum 1/4
        // at x^4 = 1/2.
        let v = vec!["x".to_string()];
        let gt = parse("x^4*(1 - x^4)", &v).unwrap();
        let s = global_sup_upper_bound(&gt, &cfg()).unwrap();
        assert!(s >= rat(1, 4));
        assert!(s <= rat(1, 2), "sup bound unexpectedly loose: {s}");
    }

    #[test]
    fn multiplier_expansion_is_even_power() {
        let v = vec!["x".to_string()];
        let g = parse("1 - x^2", &v).unwrap();
        let m = AverkovMultiplier {
            gamma: rat(1, 2),
            denom: rat(3, 4),
            exp: 4,
        };
        let sos = m.to_sos(&g);
        assert!(crate::sos::verify_sos(&m.expand(&g), &sos));
    }
}
