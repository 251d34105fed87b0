//! End-to-end certificate computation and exact verification for
//! membership of strictly positive polynomials in finitely generated
//! quadratic modules.
//!
//! The pipeline: pick (or build) a generator combination `g` with bounded
//! non-negative set, subtract multiplier terms over `S(g)`, force a global
//! lower bound with a norm-power term `delta * g`, finish globally with the
//! extended construction and, in the multivariate case, the perturbation
//! series — then assemble `f = sigma_0 + sum sigma_i g_i (+
//! sigma_{s+1}(N - |X|^2))` and check it by exact expansion.

use crate::averkov::{
    alg_averkov, alg_ext_averkov, certified_global_min_expr, GlobalMin,
};
use crate::bound::{
    self, enclosure_radius, prove_positive_on, slice_max_upper, sqrt_upper, BoundConfig,
    BoxRegion, ConstraintForm, Region, Slice, SliceBound, StructuredExpr,
};
use crate::lasserre::{alg_lasserre, FStar, LasserreResult};
use crate::poly::{leading_coefficient_univariate, norm_sq};
use crate::sos::{
    sos_decompose, sos_of_norm_power, SosConfig, SosDecomposition, SosOutcome,
};
use crate::{rat, rint, Error, Poly, Rat};
use num_traits::{Signed, Zero};

/// Ordered generators `g_1..g_s`, plus the optional adjoined Archimedean
/// polynomial `N - |X|^2`.
#[derive(Clone, Debug)]
pub struct QuadraticModule {
    pub nvars: usize,
    pub generators: Vec<Poly>,
}

impl QuadraticModule {
    pub fn new(nvars: usize, generators: Vec<Poly>) -> Self {
        assert!(!generators.is_empty(), "at least one generator required");
        for g in &generators {
            assert_eq!(g.nvars(), nvars);
        }
        QuadraticModule { nvars, generators }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub bound: BoundConfig,
    pub sos: SosConfig,
    /// Hint for the adjoined Archimedean constant.
    pub archimedean_n_hint: Option<Rat>,
    /// Iterative-deepening cap for the series reduction.
    pub r_max: u32,
    /// Cap for the exact exponent search.
    pub n_search_cap: u32,
    /// Skip generator selection and adjoin `N - |X|^2` immediately.
    pub force_adjoin_archimedean: bool,
    pub univariate_combine_enabled: bool,
    /// Box radius for heuristics that need a search region.
    pub search_box_radius: Rat,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            bound: BoundConfig::default(),
            sos: SosConfig::default(),
            archimedean_n_hint: None,
            r_max: 12,
            n_search_cap: 4_000,
            force_adjoin_archimedean: false,
            univariate_combine_enabled: true,
            search_box_radius: rint(4),
        }
    }
}

/// Which pipeline stage produced a multiplier addend, and for which slot.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub stage: &'static str,
    /// `0..s` = generator index; `s` = adjoined Archimedean slot.
    pub slot: usize,
    pub addend: Poly,
}

/// The artifact's primary output: multipliers `sigma_0..sigma_{s+1}` with
/// `f = sigma_0 + sum_i sigma_i g_i + sigma_{s+1} (N - |X|^2)` exactly.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub nvars: usize,
    pub sigma: Vec<SosDecomposition>,
    pub archimedean_n: Option<Rat>,
    pub trace: Vec<TraceStep>,
}

impl Certificate {
    pub fn generator_count(&self) -> usize {
        self.sigma.len() - 2
    }

    /// Largest degree appearing among `sigma_0` and the products
    /// `sigma_i * g_i`.
    pub fn total_degree(&self, q: &QuadraticModule) -> u32 {
        let mut d = self.sigma[0].max_square_degree();
        for (i, g) in q.generators.iter().enumerate() {
            let sd = self.sigma[i + 1].max_square_degree();
            if !self.sigma[i + 1].is_zero() {
                d = d.max(sd + g.degree().unwrap_or(0));
            }
        }
        let s = q.generators.len();
        if !self.sigma[s + 1].is_zero() {
            d = d.max(self.sigma[s + 1].max_square_degree() + 2);
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

/// Exact certificate check: every multiplier must be structurally SOS
/// (non-negative weights, consistent Gram when present) and the module
/// identity must expand to zero.
pub fn verify_certificate(q: &QuadraticModule, f: &Poly, cert: &Certificate) -> Verdict {
    let s = q.generators.len();
    if cert.sigma.len() != s + 2 {
        return Verdict::Invalid(format!(
            "expected {} multipliers, found {}",
            s + 2,
            cert.sigma.len()
        ));
    }
    if cert.nvars != q.nvars {
        return Verdict::Invalid("variable count mismatch".into());
    }
    for (i, d) in cert.sigma.iter().enumerate() {
        if let Some((w, _)) = d.squares.iter().find(|(w, _)| w.is_negative()) {
            return Verdict::Invalid(format!("sigma_{i} has a negative square weight {w}"));
        }
        if let Some(gram) = &d.gram {
            match crate::sos::ldlt::psd_check_exact(&gram.matrix) {
                crate::sos::ldlt::PsdOutcome::Psd(_) => {}
                crate::sos::ldlt::PsdOutcome::NotPsd(_) => {
                    return Verdict::Invalid(format!("sigma_{i} Gram matrix is not PSD"));
                }
            }
            let mut acc = Poly::zero(cert.nvars);
            for (bi, mi) in gram.basis.iter().enumerate() {
                for (bj, mj) in gram.basis.iter().enumerate() {
                    let c = gram.matrix[bi][bj].clone();
                    if !c.is_zero() {
                        acc.add_term(mi.mul(mj), c);
                    }
                }
            }
            if acc != d.expand(cert.nvars) {
                return Verdict::Invalid(format!("sigma_{i} Gram does not match its squares"));
            }
        }
    }
    if !cert.sigma[s + 1].is_zero() && cert.archimedean_n.is_none() {
        return Verdict::Invalid("nonzero Archimedean multiplier without a constant".into());
    }
    let mut acc = cert.sigma[0].expand(q.nvars);
    for (i, g) in q.generators.iter().enumerate() {
        acc = acc.add(&cert.sigma[i + 1].expand(q.nvars).mul(g));
    }
    if let Some(n_const) = &cert.archimedean_n {
        let arch = Poly::constant(q.nvars, n_const.clone()).sub(&norm_sq(q.nvars));
        acc = acc.add(&cert.sigma[s + 1].expand(q.nvars).mul(&arch));
    }
    if &acc != f {
        return Verdict::Invalid("certificate identity does not expand to f".into());
    }
    Verdict::Valid
}

/// First generator with a certified bounded non-negative set.
pub fn find_bounded_generator(q: &QuadraticModule, cfg: &BoundConfig) -> Option<usize> {
    q.generators
        .iter()
        .position(|g| enclosure_radius(g, cfg).is_some())
}

/// Univariate pairing of two odd-degree generators with opposite leading
/// signs into one generator with bounded non-negative set.
#[derive(Clone, Debug)]
pub struct UnivariateCombine {
    pub i: usize,
    pub j: usize,
    pub c_i: Poly,
    pub c_j: Poly,
    pub shift: i64,
    pub g: Poly,
}

pub fn univariate_combine(
    q: &QuadraticModule,
    cfg: &BoundConfig,
) -> Result<UnivariateCombine, Error> {
    assert_eq!(q.nvars, 1);
    let lead: Vec<Option<(u32, Rat)>> = q
        .generators
        .iter()
        .map(|g| leading_coefficient_univariate(g).ok())
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..q.generators.len() {
        for b in 0..q.generators.len() {
            if a == b {
                continue;
            }
            let (Some((da, ca)), Some((db, cb))) = (&lead[a], &lead[b]) else {
                continue;
            };
            if da % 2 == 1 && db % 2 == 1 && da >= db && ca.is_positive() != cb.is_positive() {
                pairs.push((a, b));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::stage(
            "univariate_combine",
            "no pair of odd-degree generators with opposite leading signs",
        ));
    }
    for (i, j) in pairs {
        let (di, lci) = lead[i].clone().unwrap();
        let (dj, lcj) = lead[j].clone().unwrap();
        for shift in shift_candidates(25) {
            let a = Poly::constant(1, rint(shift));
            let x_minus_a = Poly::var(1, 0).sub(&a);
            let (c_i, c_j) = if di > dj {
                (
                    Poly::constant(1, rint(1) / lci.abs()),
                    x_minus_a.pow(di - dj).scale(&(rint(1) / lcj.abs())),
                )
            } else {
                (
                    Poly::var(1, 0).pow(2).scale(&(rint(1) / lci.abs())),
                    x_minus_a.pow(2).scale(&(rint(1) / lcj.abs())),
                )
            };
            let g = c_i.mul(&q.generators[i]).add(&c_j.mul(&q.generators[j]));
            let Ok((dg, lcg)) = leading_coefficient_univariate(&g) else {
                continue;
            };
            if dg % 2 == 0 && lcg.is_negative() && enclosure_radius(&g, cfg).is_some() {
                return Ok(UnivariateCombine {
                    i,
                    j,
                    c_i,
                    c_j,
                    shift,
                    g,
                });
            }
        }
    }
    Err(Error::stage(
        "univariate_combine",
        "no shift produced an even-degree combination with negative leading coefficient",
    ))
}

fn shift_candidates(cap: i64) -> impl Iterator<Item = i64> {
    (0..=cap).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] })
}

/// The norm-power term forcing a global lower bound: `delta = c |X|^{2m}`
/// with `f - delta * g` still positive on `S(g)` (check a) and with a
/// certified finite global lower bound (check b).
#[derive(Clone, Debug)]
pub struct DeltaChoice {
    pub c: Rat,
    /// `delta = c * (|X|^2)^m_pow`.
    pub m_pow: u32,
    pub delta: Poly,
    pub f_hat: Poly,
    /// Factored form of `f_hat` for the bound engine.
    pub f_hat_expr: StructuredExpr,
}

/// Search `m_pow` upward from 1 (capped by the worst-case exponent
/// formula) and `c` over a two-sided power ladder, preferring choices that
/// make `f - delta g` globally positive, then choices minimizing the
/// certified `-min`.
pub fn lower_bound_delta(
    f_expr: &StructuredExpr,
    g: &Poly,
    g_region: &Region,
    opts: &CertifyOptions,
) -> Result<DeltaChoice, Error> {
    let n = f_expr.nvars();
    let cfg = &opts.bound;
    let f = f_expr.expand();
    let deg_f = f.degree().unwrap_or(0) as i64;
    let deg_g = g.degree().unwrap_or(0) as i64;
    let mut loja: i64 = 1;
    for _ in 0..n {
        loja = loja.saturating_mul((deg_g - 1).max(1));
    }
    let m_formula = deg_f + loja - deg_g;
    let m_cap = ((m_formula / 2 + 1).max(1) as u32).min(12);
    let (boxr, slice) = g_region
        .as_box_and_slice()
        .ok_or_else(|| Error::stage("delta", "compact generator region required"))?;

    let s_poly: Poly = norm_sq(n);
    let g_form = ConstraintForm::from_poly(g);
    // delta * g = c * |X|^{2 m} * g, kept factored for the bound engine
    let hat_expr = |c: &Rat, m_pow: u32| -> StructuredExpr {
        f_expr.clone().with_power_term(
            -(c * &g_form.scale),
            vec![(s_poly.clone(), m_pow), (g_form.base.clone(), g_form.exp)],
        )
    };
    for m_pow in 1..=m_cap {
        let base = s_poly.pow(m_pow).mul(g);
        let passes_a = |c: &Rat| -> bool {
            prove_positive_on(&hat_expr(c, m_pow), &boxr, &slice, cfg)
        };
        // c ladder: up from 1 while (a) holds, else down to tiny
        let mut passing: Vec<Rat> = Vec::new();
        if passes_a(&rint(1)) {
            passing.push(rint(1));
            let mut c = rint(2);
            while c <= rint(256) && passes_a(&c) {
                passing.push(c.clone());
                c = c * rint(2);
            }
        } else {
            let mut c = rat(1, 2);
            while c >= rat(1, 1_048_576) {
                if passes_a(&c) {
                    passing.push(c.clone());
                    break;
                }
                c = c / rint(2);
            }
        }
        // prefer large c: deeper subtraction keeps the global dip shallow
        let mut best: Option<(Rat, Rat)> = None;
        for c in passing.iter().rev() {
            let expr = hat_expr(c, m_pow);
            let f_hat = f.sub(&base.scale(c));
            match certified_global_min_expr(&expr, &f_hat, cfg, &opts.sos) {
                GlobalMin::Certified { value, .. } => {
                    if value.is_positive() {
                        return Ok(DeltaChoice {
                            c: c.clone(),
                            m_pow,
                            delta: s_poly.pow(m_pow).scale(c),
                            f_hat,
                            f_hat_expr: expr,
                        });
                    }
                    let better = match &best {
                        None => true,
                        Some((_, old)) => &value > old,
                    };
                    if better {
                        best = Some((c.clone(), value));
                    }
                }
                GlobalMin::Unknown => {}
            }
        }
        if let Some((c, _)) = best {
            return Ok(DeltaChoice {
                c: c.clone(),
                m_pow,
                delta: s_poly.pow(m_pow).scale(&c),
                f_hat: f.sub(&base.scale(&c)),
                f_hat_expr: hat_expr(&c, m_pow),
            });
        }
    }
    Err(Error::stage(
        "delta",
        "no norm-power term passed both the slice positivity and lower-bound checks",
    ))
}

/// True iff `f_tilde` already has a certified finite global lower bound,
/// so the delta step can be skipped.
pub fn skip_lower_bound_check(f_tilde: &Poly, opts: &CertifyOptions) -> bool {
    skip_lower_bound_check_expr(&StructuredExpr::plain(f_tilde.clone()), f_tilde, opts)
}

fn skip_lower_bound_check_expr(
    e: &StructuredExpr,
    f_tilde: &Poly,
    opts: &CertifyOptions,
) -> bool {
    matches!(
        certified_global_min_expr(e, f_tilde, &opts.bound, &opts.sos),
        GlobalMin::Certified { .. }
    )
}

/// How the bounded-support polynomial `g` was obtained.
#[derive(Clone, Debug)]
enum Selected {
    Generator(usize),
    Combined(UnivariateCombine),
    Adjoined(Rat),
}

/// Alg. 4: compute a verified certificate for `f` strictly positive on
/// `S(G)`.
pub fn certify(q: &QuadraticModule, f: &Poly, opts: &CertifyOptions) -> Result<Certificate, Error> {
    let n = q.nvars;
    let s = q.generators.len();
    let cfg = &opts.bound;
    assert_eq!(f.nvars(), n);

    // (i) generator selection
    let (selected, g, g_region) = select_generator(q, f, opts)?;
    let dbg = std::env::var("QMCERT_PIPE_DEBUG").is_ok();
    if dbg {
        eprintln!("[pipe] selected {:?}", match &selected {
            Selected::Generator(i) => format!("generator {i}"),
            Selected::Combined(u) => format!("combined ({},{}) shift {}", u.i, u.j, u.shift),
            Selected::Adjoined(nv) => format!("adjoined N={nv}"),
        });
    }

    // (ii) multipliers over B = S(g)
    let averkov = alg_averkov(&q.generators, f, &g_region, cfg, opts.n_search_cap)
        .map_err(|e| stage_context("averkov", e))?;
    if dbg {
        eprintln!("[pipe] averkov: {:?}", averkov.as_ref().map(|m| (m.exp, format!("{}", m.gamma))));
    }
    let mut f_tilde = f.clone();
    let mut f_tilde_expr = StructuredExpr::plain(f.clone());
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut slot_polys: Vec<Poly> = vec![Poly::zero(n); s + 1];
    let mut slot_sos: Vec<SosDecomposition> = vec![SosDecomposition::zero(); s + 1];
    if let Some(mult) = &averkov {
        for (i, gi) in q.generators.iter().enumerate() {
            let sigma = mult.expand(gi);
            f_tilde = f_tilde.sub(&sigma.mul(gi));
            f_tilde_expr = f_tilde_expr.with_h_term(rint(-1), mult.h_power(), gi.clone());
            slot_polys[i] = slot_polys[i].add(&sigma);
            slot_sos[i] = slot_sos[i].add(&mult.to_sos(gi));
            trace.push(TraceStep {
                stage: "averkov",
                slot: i,
                addend: sigma,
            });
        }
    }

    // (iii) norm-power term for a global lower bound
    let delta = if skip_lower_bound_check_expr(&f_tilde_expr, &f_tilde, opts) {
        None
    } else {
        Some(
            lower_bound_delta(&f_tilde_expr, &g, &g_region, opts)
                .map_err(|e| stage_context("delta", e))?,
        )
    };
    let (f_hat, f_hat_expr) = match &delta {
        None => (f_tilde.clone(), f_tilde_expr.clone()),
        Some(d) => (d.f_hat.clone(), d.f_hat_expr.clone()),
    };
    if dbg {
        eprintln!(
            "[pipe] delta: {:?}, f_hat degree {:?}",
            delta.as_ref().map(|d| (format!("{}", d.c), d.m_pow)),
            f_hat.degree()
        );
    }

    // (iv) extended construction over all of space
    let ext = alg_ext_averkov(&g, &f_hat_expr, cfg, &opts.sos, opts.n_search_cap)
        .map_err(|e| stage_context("ext_averkov", e))?;
    if dbg {
        eprintln!(
            "[pipe] ext: sigma {:?}, floor {:?}",
            ext.sigma.as_ref().map(|m| m.exp),
            ext.f_floor.value().map(|v| format!("{v}"))
        );
    }
    let p_poly = match &ext.sigma {
        None => Poly::zero(n),
        Some(m) => m.expand(&ext.g_used),
    };
    // the multiplier applies to g_used = g or a norm-power multiple of g
    let (p_on_g, p_on_g_sos): (Poly, SosDecomposition) = match &ext.sigma {
        None => (Poly::zero(n), SosDecomposition::zero()),
        Some(m) => {
            if ext.g_used == g {
                (p_poly.clone(), m.to_sos(&ext.g_used))
            } else {
                // g_used = |X|^{2k} g: fold the norm factor into the
                // multiplier so it still applies to g itself
                let k2 = ext.g_used.degree().unwrap() - g.degree().unwrap();
                let norm_sos = sos_of_norm_power(n, &rint(1), k2 / 2);
                let folded = p_poly.mul(&s_power(n, k2 / 2));
                (folded, m.to_sos(&ext.g_used).product(&norm_sos, n))
            }
        }
    };

    // (v) fold the g-multipliers back and close with sigma_0
    let mut g_multiplier = p_on_g;
    let mut g_multiplier_sos = p_on_g_sos;
    if let Some(d) = &delta {
        g_multiplier = g_multiplier.add(&d.delta);
        g_multiplier_sos = g_multiplier_sos.add(&sos_of_norm_power(n, &d.c, d.m_pow));
    }

    // exact remainder once the extended multiplier is applied to g
    let mut sigma0: Option<SosDecomposition> = None;
    let remainder_after_p = match &ext.sigma {
        None => f_hat.clone(),
        Some(_) => f_hat.sub(&g_multiplier_minus_delta(&g_multiplier, &delta).mul(&g)),
    };

    let q_result: Option<LasserreResult> = if n == 1 {
        None
    } else {
        let f_star = match &ext.f_floor {
            GlobalMin::Certified { value, .. } if value.is_positive() => FStar {
                value: value.clone(),
                certified: true,
            },
            _ => {
                // the extended step verified positivity of the remainder;
                // estimate its floor by sampling (exactness is downstream)
                let probe = BoxRegion::centered(n, &opts.search_box_radius);
                let (_, est) = bound::heuristic_min(&remainder_after_p, &probe, 17);
                FStar {
                    value: est,
                    certified: false,
                }
            }
        };
        if let SosOutcome::Sos(w) = sos_decompose(&remainder_after_p, &opts.sos) {
            sigma0 = Some(w);
            None
        } else {
            let out = alg_lasserre(
                &remainder_after_p,
                &g,
                cfg,
                &opts.sos,
                opts.r_max,
                &f_star,
            )
            .map_err(|e| stage_context("lasserre", e))?;
            Some(out)
        }
    };
    if let Some(lr) = &q_result {
        g_multiplier = g_multiplier.add(&lr.multiplier);
        g_multiplier_sos = g_multiplier_sos.add(&lr.multiplier_sos);
        sigma0 = Some(lr.sos_witness.clone());
    }

    // distribute the accumulated g-multiplier onto the original slots
    match &selected {
        Selected::Generator(idx) => {
            slot_polys[*idx] = slot_polys[*idx].add(&g_multiplier);
            slot_sos[*idx] = slot_sos[*idx].add(&g_multiplier_sos);
            trace.push(TraceStep {
                stage: "g-multiplier",
                slot: *idx,
                addend: g_multiplier.clone(),
            });
        }
        Selected::Combined(uc) => {
            let pi = g_multiplier.mul(&uc.c_i);
            let pj = g_multiplier.mul(&uc.c_j);
            slot_polys[uc.i] = slot_polys[uc.i].add(&pi);
            slot_polys[uc.j] = slot_polys[uc.j].add(&pj);
            let ci_sos = combine_coefficient_sos(&uc.c_i);
            let cj_sos = combine_coefficient_sos(&uc.c_j);
            slot_sos[uc.i] = slot_sos[uc.i].add(&g_multiplier_sos.product(&ci_sos, n));
            slot_sos[uc.j] = slot_sos[uc.j].add(&g_multiplier_sos.product(&cj_sos, n));
            trace.push(TraceStep {
                stage: "g-multiplier",
                slot: uc.i,
                addend: pi,
            });
            trace.push(TraceStep {
                stage: "g-multiplier",
                slot: uc.j,
                addend: pj,
            });
        }
        Selected::Adjoined(_) => {
            slot_polys[s] = slot_polys[s].add(&g_multiplier);
            slot_sos[s] = slot_sos[s].add(&g_multiplier_sos);
            trace.push(TraceStep {
                stage: "g-multiplier",
                slot: s,
                addend: g_multiplier.clone(),
            });
        }
    }

    // sigma_0 = exact remainder
    let mut expected0 = f.clone();
    for (i, gi) in q.generators.iter().enumerate() {
        expected0 = expected0.sub(&slot_polys[i].mul(gi));
    }
    let arch_n = match &selected {
        Selected::Adjoined(nv) => Some(nv.clone()),
        _ => None,
    };
    if let Some(nv) = &arch_n {
        let arch = Poly::constant(n, nv.clone()).sub(&norm_sq(n));
        expected0 = expected0.sub(&slot_polys[s].mul(&arch));
    }
    if dbg {
        eprintln!(
            "[pipe] sigma0 target degree {:?}, terms {}",
            expected0.degree(),
            expected0.num_terms()
        );
    }
    let sigma0 = match sigma0 {
        Some(w) if w.expand(n) == expected0 => w,
        _ => {
            // decompose the remainder directly, reusing any floor witness
            match decompose_remainder(&expected0, &ext.f_floor, opts) {
                Some(w) => w,
                None => {
                    return Err(Error::stage(
                        "sigma0",
                        "final remainder resists exact SOS decomposition",
                    ))
                }
            }
        }
    };

    let mut sigma = Vec::with_capacity(s + 2);
    sigma.push(sigma0);
    for i in 0..s {
        sigma.push(slot_sos[i].clone());
    }
    sigma.push(slot_sos[s].clone());
    let cert = Certificate {
        nvars: n,
        sigma,
        archimedean_n: arch_n,
        trace,
    };
    match verify_certificate(q, f, &cert) {
        Verdict::Valid => Ok(cert),
        Verdict::Invalid(reason) => Err(Error::stage("assemble", reason)),
    }
}

fn s_power(n: usize, k: u32) -> Poly {
    norm_sq(n).pow(k)
}

fn g_multiplier_minus_delta(g_multiplier: &Poly, delta: &Option<DeltaChoice>) -> Poly {
    match delta {
        None => g_multiplier.clone(),
        Some(d) => g_multiplier.sub(&d.delta),
    }
}

/// SOS form of the pairing coefficients from the univariate combination:
/// positive constants, `x^2/|lc|`, or `(x-a)^{2t}/|lc|`.
fn combine_coefficient_sos(c: &Poly) -> SosDecomposition {
    // c is of the form w * p^{2t} with w > 0 by construction; recover a
    // square root structurally.
    let d = c.degree().unwrap_or(0);
    if d == 0 {
        return SosDecomposition::positive_constant(1, c.constant_term());
    }
    // even-degree monic-power shape: w * (x - a)^d with d even
    let (deg, lc) = leading_coefficient_univariate(c).expect("univariate coefficient");
    assert!(deg % 2 == 0 && lc.is_positive());
    // recover the root shift from the subleading coefficient
    let sub = c.coeff(&crate::monomial::Monomial::var_pow(1, 0, deg - 1));
    let a = -(sub / (&lc * rint(deg as i64)));
    let base = Poly::var(1, 0).sub(&Poly::constant(1, a));
    let expect = base.pow(deg).scale(&lc);
    assert_eq!(&expect, c, "pairing coefficient is not a shifted power");
    SosDecomposition::single_square(lc, base.pow(deg / 2))
}

fn decompose_remainder(
    target: &Poly,
    floor: &GlobalMin,
    opts: &CertifyOptions,
) -> Option<SosDecomposition> {
    if target.is_zero() {
        return Some(SosDecomposition::zero());
    }
    if let GlobalMin::Certified {
        floor: Some((lambda, dec)),
        ..
    } = floor
    {
        // target = (target - lambda) + lambda when the witness matches
        let shifted = target.sub(&Poly::constant(target.nvars(), lambda.clone()));
        if dec.expand(target.nvars()) == shifted && lambda.is_positive() {
            return Some(
                dec.add(&SosDecomposition::positive_constant(
                    target.nvars(),
                    lambda.clone(),
                )),
            );
        }
    }
    match sos_decompose(target, &opts.sos) {
        SosOutcome::Sos(w) => Some(w),
        SosOutcome::Inconclusive => {
            match sos_decompose(target, &opts.sos.escalated()) {
                SosOutcome::Sos(w) => Some(w),
                _ => None,
            }
        }
        SosOutcome::NotSos(_) => None,
    }
}

fn stage_context(stage: &str, e: Error) -> Error {
    match e {
        Error::Stage {
            stage: inner,
            detail,
        } => Error::Stage {
            stage: format!("{stage}/{inner}"),
            detail,
        },
        other => Error::Stage {
            stage: stage.to_string(),
            detail: other.to_string(),
        },
    }
}

fn select_generator(
    q: &QuadraticModule,
    f: &Poly,
    opts: &CertifyOptions,
) -> Result<(Selected, Poly, Region), Error> {
    let n = q.nvars;
    let cfg = &opts.bound;
    if !opts.force_adjoin_archimedean {
        if let Some(idx) = find_bounded_generator(q, cfg) {
            let g = q.generators[idx].clone();
            let r = enclosure_radius(&g, cfg).expect("bounded generator");
            let region = Region::SliceBox {
                boxr: BoxRegion::centered(n, &r),
                geq: vec![g.clone()],
            };
            return Ok((Selected::Generator(idx), g, region));
        }
        if n == 1 && opts.univariate_combine_enabled {
            if let Ok(uc) = univariate_combine(q, cfg) {
                let r = enclosure_radius(&uc.g, cfg).expect("combined generator bounded");
                let region = Region::SliceBox {
                    boxr: BoxRegion::centered(1, &r),
                    geq: vec![uc.g.clone()],
                };
                let g = uc.g.clone();
                return Ok((Selected::Combined(uc), g, region));
            }
            if n == 1 {
                return Err(Error::stage(
                    "select",
                    "univariate module has neither a bounded generator nor an admissible pair",
                ));
            }
        }
    }
    // adjoin N - |X|^2
    let n_const = match &opts.archimedean_n_hint {
        Some(v) => v.clone(),
        None => pick_archimedean_constant(q, f, opts),
    };
    let g = Poly::constant(n, n_const.clone()).sub(&norm_sq(n));
    let region = Region::BallSq {
        nvars: n,
        radius_sq: n_const.clone(),
    };
    Ok((Selected::Adjoined(n_const), g, region))
}

/// Candidate scan for the adjoined constant: small balls on which `f` is
/// already certifiably positive are strongly preferred (they let the
/// compact stage skip); otherwise fall back to a ball enclosing the
/// feasible set seen through the search box.
fn pick_archimedean_constant(q: &QuadraticModule, f: &Poly, opts: &CertifyOptions) -> Rat {
    let n = q.nvars;
    let cfg = &opts.bound;
    // enclosure-based fallback: (1 + sup |x_i| over S(G) within the box)^2 * n
    let boxr = BoxRegion::centered(n, &opts.search_box_radius);
    let slice = Slice::of(q.generators.clone());
    let mut sup_abs: Rat = rint(1);
    for i in 0..n {
        let xi = Poly::var(n, i);
        for p in [xi.clone(), xi.neg()] {
            if let SliceBound::Bound { value, .. } = slice_max_upper(&p, &boxr, &slice, cfg) {
                if value > sup_abs {
                    sup_abs = value;
                }
            }
        }
    }
    let fallback = (rint(1) + &sup_abs) * (rint(1) + &sup_abs) * rint(n as i64);
    let mut candidates: Vec<Rat> = vec![rint(1), rint(2), rint(4), rint(8)];
    candidates.push(fallback.clone());
    candidates.sort();
    candidates.dedup();
    for cand in &candidates {
        let ball = Region::BallSq {
            nvars: n,
            radius_sq: cand.clone(),
        };
        if let SliceBound::Bound { value, .. } = bound::region_min_lower(f, &ball, cfg) {
            if value.is_positive() {
                return cand.clone();
            }
        }
    }
    fallback
}

/// Constructive Archimedean criterion: a certificate of `R^2 - |X|^2` in
/// `qm(g)` for a generator with bounded non-negative set.
pub fn archimedean_certificate(
    g: &Poly,
    opts: &CertifyOptions,
) -> Result<(Rat, Certificate), Error> {
    let n = g.nvars();
    let r_inf = enclosure_radius(g, &opts.bound)
        .ok_or_else(|| Error::stage("archimedean", "S(g) not proven bounded"))?;
    // S(g) sits in the cube of radius r_inf, hence in the ball of squared
    // radius n r_inf^2; pad by 1 so the target is positive on S(g).
    let radius_sq = rint(n as i64) * &r_inf * &r_inf + rint(1);
    let radius = sqrt_upper(&radius_sq);
    let f = Poly::constant(n, &radius * &radius).sub(&norm_sq(n));
    let q = QuadraticModule::new(n, vec![g.clone()]);
    let cert = certify(&q, &f, opts)?;
    Ok((radius, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn opts() -> CertifyOptions {
        CertifyOptions::default()
    }

    #[test]
    fn bounded_generator_selection() {
        let v = vec!["x".to_string(), "y".to_string()];
        let g = parse("1 - x^2 - y^2", &v).unwrap();
        let q = QuadraticModule::new(2, vec![g]);
        assert_eq!(find_bounded_generator(&q, &opts().bound), Some(0));

        let vx = vec!["x".to_string()];
        let q2 = QuadraticModule::new(
            1,
            vec![parse("x", &vx).unwrap(), parse("1 - x", &vx).unwrap()],
        );
        assert_eq!(find_bounded_generator(&q2, &opts().bound), None);
    }

    #[test]
    fn univariate_combine_worked_example() {
        let v = vec!["x".to_string()];
        let g1 = parse("x*(x - 1/2)*(x - 1)^2*(x - 2)", &v).unwrap();
        let g2 = parse("0 - x*(x - 1)*(x - 2)", &v).unwrap();
        let q = QuadraticModule::new(1, vec![g1, g2]);
        assert_eq!(find_bounded_generator(&q, &opts().bound), None);
        let uc = univariate_combine(&q, &opts().bound).unwrap();
        assert_eq!((uc.i, uc.j, uc.shift), (0, 1, 0));
        let expect = parse("0 - 1/2*x*(x - 1)*(x - 2)*(3*x - 1)", &v).unwrap();
        assert_eq!(uc.g, expect);
    }

    #[test]
    fn combine_rejects_even_degrees_only() {
        let v = vec!["x".to_string()];
        let q = QuadraticModule::new(
            1,
            vec![parse("x^2", &v).unwrap(), parse("1 - x^2", &v).unwrap()],
        );
        assert!(univariate_combine(&q, &opts().bound).is_err());
        // but the bounded generator 1 - x^2 covers selection anyway
        assert_eq!(find_bounded_generator(&q, &opts().bound), Some(1));
    }

    #[test]
    fn trivial_certificate_for_constant() {
        let v = vec!["x".to_string()];
        let g = parse("1 - x^2", &v).unwrap();
        let q = QuadraticModule::new(1, vec![g]);
        let f = parse("1", &v).unwrap();
        let cert = certify(&q, &f, &opts()).unwrap();
        assert_eq!(verify_certificate(&q, &f, &cert), Verdict::Valid);
        assert!(cert.sigma[2].is_zero(), "no Archimedean multiplier expected");
    }
}
