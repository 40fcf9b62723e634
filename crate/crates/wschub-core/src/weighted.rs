//! Weight-dependent Schubert calculus on wGr(d,n).
//!
//! A weight system (w_1..w_n; a) rescales the torus: w_λ := a + Σ_{i∈λ} w_i
//! is always ≥ a ≥ 1, so the rationals w_id/w_λ that pepper every formula
//! never divide by zero.  The weighted classes are computed by two genuinely
//! independent routes —
//!
//! * substitution: push the ordinary table through y_i ↦ Yw_i − (w_i/w_μ) Yw_μ
//!   at each vertex μ;
//! * Pieri: solve the weighted divisor recursion top-down by exact division,
//!   never touching the ordinary table;
//!
//! — and the structure constants by two more (the closed Kostka/wu formula
//! versus pointwise products expanded in the weighted basis).  Exact equality
//! of the routes is the correctness argument, so nothing here is allowed to
//! share code across routes beyond the base polynomial arithmetic.

use crate::combinat::{distinguished_elements, IndexSet};
use crate::gkm::{
    expand_in_basis_factored, pointwise_multiply, Flavor, MomentGraph, RestrictionVector,
};
use crate::poly::{
    exact_divide, expand_in_forms, rewrite_in_basis, substitute_linear, yw_ctx, Ctx, LinearForm,
    Mono, Poly, Rat, VarContext,
};
use crate::schubert::{build_ordinary_basis, ordinary_constants, u_expand, OrdinaryBasis, UExpansion};
use crate::{Error, Result};
use itertools::Itertools;
use num::{BigInt, One, Signed, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

fn ru(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Weights (w_1..w_n) ∈ Z_{≥0}^n together with a ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    w: Vec<u64>,
    a: u64,
}

impl WeightSystem {
    pub fn new(w: Vec<u64>, a: u64) -> Result<WeightSystem> {
        if a == 0 {
            return Err(Error::Domain("the Seifert parameter a must be >= 1".into()));
        }
        let n = w.len() as u32;
        if n < 2 || n > crate::combinat::MAX_N {
            return Err(Error::Domain(format!(
                "need 2 <= n <= {}, got {} weights",
                crate::combinat::MAX_N,
                n
            )));
        }
        Ok(WeightSystem { w, a })
    }

    pub fn n(&self) -> u32 {
        self.w.len() as u32
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn weights(&self) -> &[u64] {
        &self.w
    }

    /// w_i, 1-based.
    pub fn w_i(&self, i: u8) -> u64 {
        self.w[(i - 1) as usize]
    }

    pub fn w_i_rat(&self, i: u8) -> Rat {
        ru(self.w_i(i))
    }

    pub fn a_rat(&self) -> Rat {
        ru(self.a)
    }

    /// b_i = w_i + a (the projective-space weights of Example-style checks).
    pub fn b_i(&self, i: u8) -> u64 {
        self.w_i(i) + self.a
    }

    /// w_λ = a + Σ_{i∈λ} w_i ≥ a ≥ 1.
    pub fn w_of(&self, s: &IndexSet) -> u64 {
        assert_eq!(s.n(), self.n());
        self.a + s.elems().iter().map(|&i| self.w_i(i)).sum::<u64>()
    }

    pub fn w_of_rat(&self, s: &IndexSet) -> Rat {
        ru(self.w_of(s))
    }

    /// w_id for the Grassmannian of d-planes: a + w_{n−d+1} + ⋯ + w_n.
    pub fn w_id(&self, d: u32) -> u64 {
        let n = self.n();
        assert!(d > 0 && d < n);
        self.a + self.w[(n - d) as usize..].iter().sum::<u64>()
    }

    pub fn w_id_rat(&self, d: u32) -> Rat {
        ru(self.w_id(d))
    }

    /// All weights zero: every w_λ = a and the weighted theory degenerates to
    /// the ordinary one (independently of a).
    pub fn is_trivial(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    /// Non-decreasing weights — the positivity hypothesis.
    pub fn is_sorted(&self) -> bool {
        self.w.windows(2).all(|p| p[0] <= p[1])
    }

    /// The sorted weight system together with the permutation p such that
    /// sorted.w[k] = self.w[p[k]].  No relabeling of index sets is performed
    /// here — callers opt in explicitly.
    pub fn sorted_weights(&self) -> (WeightSystem, Vec<usize>) {
        let mut perm: Vec<usize> = (0..self.w.len()).collect();
        perm.sort_by_key(|&i| (self.w[i], i));
        let w = perm.iter().map(|&i| self.w[i]).collect();
        (WeightSystem { w, a: self.a }, perm)
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w=({}), a={}", self.w.iter().join(","), self.a)
    }
}

fn lin_poly(ctx: &Ctx, coeffs: Vec<Rat>) -> Poly {
    let terms = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (Mono::var(i), c))
        .collect();
    Poly::from_terms(ctx, terms)
}

/// wS̃_div|_μ = y^w_id − (w_id/w_μ) y^w_μ; zero at μ = id.  The same linear
/// expression reappears as the Pieri self-coefficient and as the Kostka
/// factor f_μ.
pub fn weighted_divisor_restriction(ctx: &Ctx, mu: &IndexSet, ws: &WeightSystem) -> Poly {
    let (id, _) = distinguished_elements(mu.n(), mu.d()).expect("valid IndexSet parameters");
    let ratio = ws.w_id_rat(mu.d()) / ws.w_of_rat(mu);
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    for &i in id.elems() {
        coeffs[(i - 1) as usize] += Rat::one();
    }
    for &i in mu.elems() {
        coeffs[(i - 1) as usize] -= &ratio;
    }
    lin_poly(ctx, coeffs)
}

/// wS̃_λ|_λ = ∏_{(k,l)∈inv(λ)} (y^w_{(k,l)λ} − (w_{(k,l)λ}/w_λ) y^w_λ).
pub fn weighted_diagonal_restriction(ctx: &Ctx, lam: &IndexSet, ws: &WeightSystem) -> Poly {
    weighted_diagonal_factors(ctx, lam, ws)
        .iter()
        .fold(Poly::one(ctx), |p, f| p.mul(&f.as_poly()))
}

/// The same diagonal as its list of linear factors, one per inversion.
pub fn weighted_diagonal_factors(
    ctx: &Ctx,
    lam: &IndexSet,
    ws: &WeightSystem,
) -> Vec<LinearForm> {
    let wl = ws.w_of_rat(lam);
    lam.inversions()
        .iter()
        .map(|&inv| {
            let klam = lam.apply_inversion(inv).unwrap();
            let ratio = ws.w_of_rat(&klam) / &wl;
            let mut coeffs = vec![Rat::zero(); ctx.arity()];
            for &i in klam.elems() {
                coeffs[(i - 1) as usize] += Rat::one();
            }
            for &i in lam.elems() {
                coeffs[(i - 1) as usize] -= &ratio;
            }
            LinearForm::new(ctx, coeffs).expect("diagonal factors are nonzero")
        })
        .collect()
}

/// The change of variables at vertex μ: y_i ↦ Yw_i − (w_i/w_μ) Yw_μ,
/// obtained by eliminating z ≡ −(a/w_μ) y^w_μ on the cone.
pub fn substitution_images(ctx: &Ctx, mu: &IndexSet, ws: &WeightSystem) -> Vec<LinearForm> {
    let n = ws.n() as usize;
    assert_eq!(ctx.arity(), n);
    let wm = ws.w_of_rat(mu);
    (0..n)
        .map(|i0| {
            let ratio = ws.w_i_rat(i0 as u8 + 1) / &wm;
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[i0] += Rat::one();
            for &m in mu.elems() {
                coeffs[(m - 1) as usize] -= &ratio;
            }
            LinearForm::new(ctx, coeffs).expect("vertex substitution images are nonzero")
        })
        .collect()
}

/// Reduce an affine-cone representative (in Q[y_1..y_n, z]) to its canonical
/// Yw-form at vertex μ: the y_i map as in [`substitution_images`] and
/// z ↦ −(a/w_μ) y^w_μ, so y_μ + z ↦ 0 as it must.
pub fn canonicalize_affine_at(p: &Poly, mu: &IndexSet, ws: &WeightSystem) -> Poly {
    assert_eq!(p.nvars() as u32, ws.n() + 1, "expected an affine-cone polynomial");
    let ctx = yw_ctx(ws.n());
    let mut images = substitution_images(&ctx, mu, ws);
    let ratio = ws.a_rat() / ws.w_of_rat(mu);
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    for &m in mu.elems() {
        coeffs[(m - 1) as usize] = -ratio.clone();
    }
    images.push(LinearForm::new(&ctx, coeffs).unwrap());
    substitute_linear(p, &ctx, &images)
}

/// wS̃_λ|_μ from the ordinary table: substitute at μ.
pub fn weighted_restriction_by_substitution(
    ordinary: &OrdinaryBasis,
    lam: usize,
    mu: usize,
    ws: &WeightSystem,
) -> Poly {
    let graph = ordinary.graph();
    let ctx = yw_ctx(graph.n());
    let images = substitution_images(&ctx, graph.vertex(mu), ws);
    substitute_linear(ordinary.restriction(lam, mu), &ctx, &images)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Substitution,
    Pieri,
}

pub struct WeightedBasis {
    graph: Arc<MomentGraph>,
    ws: WeightSystem,
    classes: Vec<RestrictionVector>,
    diag_factors: Vec<Vec<LinearForm>>,
}

impl WeightedBasis {
    /// Assemble a basis from externally supplied classes (e.g. a corrupted
    /// fixture or a deserialized table).  Shape and flavor are validated; the
    /// mathematical content is not — that is what the check suites are for.
    pub fn from_classes(
        graph: &Arc<MomentGraph>,
        ws: &WeightSystem,
        classes: Vec<RestrictionVector>,
    ) -> Result<WeightedBasis> {
        if classes.len() != graph.vertex_count() {
            return Err(Error::ContextMismatch);
        }
        let flavor = Flavor::Weighted(ws.clone());
        for c in &classes {
            if c.flavor() != &flavor || c.graph().n() != graph.n() || c.graph().d() != graph.d() {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(WeightedBasis {
            graph: graph.clone(),
            ws: ws.clone(),
            classes,
            diag_factors: all_diag_factors(graph, ws),
        })
    }

    pub fn graph(&self) -> &Arc<MomentGraph> {
        &self.graph
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.ws
    }

    pub fn classes(&self) -> &[RestrictionVector] {
        &self.classes
    }

    pub fn class(&self, v: usize) -> &RestrictionVector {
        &self.classes[v]
    }

    pub fn restriction(&self, lam: usize, mu: usize) -> &Poly {
        self.classes[lam].value(mu)
    }

    pub fn diag_factors(&self) -> &[Vec<LinearForm>] {
        &self.diag_factors
    }
}

fn all_diag_factors(graph: &MomentGraph, ws: &WeightSystem) -> Vec<Vec<LinearForm>> {
    let ctx = yw_ctx(graph.n());
    (0..graph.vertex_count())
        .map(|l| weighted_diagonal_factors(&ctx, graph.vertex(l), ws))
        .collect()
}

pub fn build_weighted_basis(
    graph: &Arc<MomentGraph>,
    ws: &WeightSystem,
    route: Route,
) -> Result<WeightedBasis> {
    if ws.n() != graph.n() {
        return Err(Error::ContextMismatch);
    }
    match route {
        Route::Substitution => {
            let ordinary = build_ordinary_basis(graph)?;
            build_weighted_from_ordinary(&ordinary, ws)
        }
        Route::Pieri => build_weighted_by_pieri(graph, ws),
    }
}

/// The substitution route, reusing an already-built ordinary table.
pub fn build_weighted_from_ordinary(
    ordinary: &OrdinaryBasis,
    ws: &WeightSystem,
) -> Result<WeightedBasis> {
    let graph = ordinary.graph();
    let ctx = yw_ctx(graph.n());
    let nv = graph.vertex_count();
    let images: Vec<Vec<LinearForm>> = (0..nv)
        .map(|m| substitution_images(&ctx, graph.vertex(m), ws))
        .collect();
    let classes = (0..nv)
        .into_par_iter()
        .map(|l| {
            let values: Vec<Poly> = (0..nv)
                .map(|m| substitute_linear(ordinary.restriction(l, m), &ctx, &images[m]))
                .collect();
            RestrictionVector::new(graph, Flavor::Weighted(ws.clone()), values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedBasis {
        graph: graph.clone(),
        ws: ws.clone(),
        classes,
        diag_factors: all_diag_factors(graph, ws),
    })
}

/// (w_id/w_λ) y^w_λ − (w_id/w_ν) y^w_ν, the divisor-difference form of the
/// weighted Pieri recursion (equal to wS̃_div|_ν − wS̃_div|_λ).
pub fn pieri_difference_form(
    ctx: &Ctx,
    lam: &IndexSet,
    nu: &IndexSet,
    ws: &WeightSystem,
) -> LinearForm {
    assert_ne!(lam, nu);
    let w_id = ws.w_id_rat(lam.d());
    let rl = &w_id / ws.w_of_rat(lam);
    let rn = &w_id / ws.w_of_rat(nu);
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    for &i in lam.elems() {
        coeffs[(i - 1) as usize] += &rl;
    }
    for &i in nu.elems() {
        coeffs[(i - 1) as usize] -= &rn;
    }
    LinearForm::new(ctx, coeffs).expect("divisor differences of distinct vertices are nonzero")
}

fn build_weighted_by_pieri(graph: &Arc<MomentGraph>, ws: &WeightSystem) -> Result<WeightedBasis> {
    let ctx = yw_ctx(graph.n());
    let w_id = ws.w_id_rat(graph.d());
    let nv = graph.vertex_count();
    let mut table: Vec<Vec<Poly>> = vec![Vec::new(); nv];
    let mut order: Vec<usize> = graph.order_len_lex().to_vec();
    order.reverse();
    for &li in &order {
        let lam = graph.vertex(li);
        let ratio_l = &w_id / ws.w_of_rat(lam);
        let covers = graph.covering(li);
        let row = (0..nv)
            .into_par_iter()
            .map(|nu| {
                if nu == li {
                    return Ok(weighted_diagonal_restriction(&ctx, lam, ws));
                }
                let mut sum = Poly::zero(&ctx);
                for &c in covers {
                    sum = sum.add(&table[c][nu]);
                }
                if sum.is_zero() {
                    return Ok(Poly::zero(&ctx));
                }
                let sum = sum.scale(&ratio_l);
                let form = pieri_difference_form(&ctx, lam, graph.vertex(nu), ws);
                exact_divide(&sum, &form).ok_or_else(|| {
                    Error::InexactDivision(format!(
                        "weighted restriction of {lam} at {}",
                        graph.vertex(nu)
                    ))
                })
            })
            .collect::<Result<Vec<Poly>>>()?;
        table[li] = row;
    }
    let classes = table
        .into_iter()
        .map(|values| RestrictionVector::new(graph, Flavor::Weighted(ws.clone()), values))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedBasis {
        graph: graph.clone(),
        ws: ws.clone(),
        classes,
        diag_factors: all_diag_factors(graph, ws),
    })
}

/// wS̃_div · wS̃_λ = coeff_self · wS̃_λ + Σ_{λ'→λ} (w_id/w_λ) wS̃_{λ'}.
pub struct PieriRule {
    pub coeff_self: Poly,
    pub covers: Vec<(IndexSet, Rat)>,
}

pub fn weighted_pieri(lam: &IndexSet, ws: &WeightSystem) -> PieriRule {
    let ctx = yw_ctx(ws.n());
    let ratio = ws.w_id_rat(lam.d()) / ws.w_of_rat(lam);
    PieriRule {
        coeff_self: weighted_divisor_restriction(&ctx, lam, ws),
        covers: lam
            .covering_elements()
            .into_iter()
            .map(|c| (c, ratio.clone()))
            .collect(),
    }
}

/// Memoized chain enumeration and Kostka values for one weight system.
#[derive(Default)]
pub struct KostkaMemo {
    chains: FxHashMap<(usize, usize), Arc<Vec<Vec<usize>>>>,
    values: FxHashMap<(u32, usize, usize), Poly>,
}

impl KostkaMemo {
    pub fn new() -> Self {
        Self::default()
    }
}

/// All saturated chains ν = ν⁰ → ν¹ → ⋯ → νˡ = η (each step one cover down),
/// as vertex-index paths including both endpoints.
fn chains_between(
    graph: &MomentGraph,
    nu: usize,
    eta: usize,
    memo: &mut KostkaMemo,
) -> Arc<Vec<Vec<usize>>> {
    if let Some(c) = memo.chains.get(&(nu, eta)) {
        return c.clone();
    }
    let mut out = Vec::new();
    if nu == eta {
        out.push(vec![nu]);
    } else if graph.geq(nu, eta) {
        for &down in graph.covered(nu) {
            if graph.geq(down, eta) {
                for tail in chains_between(graph, down, eta, memo).iter() {
                    let mut c = Vec::with_capacity(tail.len() + 1);
                    c.push(nu);
                    c.extend_from_slice(tail);
                    out.push(c);
                }
            }
        }
    }
    let arc = Arc::new(out);
    memo.chains.insert((nu, eta), arc.clone());
    arc
}

fn compositions_product(fs: &[Poly], idx: usize, budget: u32, acc: &Poly, out: &mut Poly) {
    if idx + 1 == fs.len() {
        let mut t = acc.clone();
        for _ in 0..budget {
            t = t.mul(&fs[idx]);
        }
        *out = out.add(&t);
        return;
    }
    let mut cur = acc.clone();
    for j in 0..=budget {
        if j > 0 {
            cur = cur.mul(&fs[idx]);
            if cur.is_zero() {
                return;
            }
        }
        compositions_product(fs, idx + 1, budget - j, &cur, out);
    }
}

/// The weighted Kostka coefficient K_{1^r η}^ν: zero unless ν ≥ η and
/// r ≥ l := l(ν)−l(η); otherwise
///
/// ```text
///   Σ_{chains ν=ν⁰→⋯→νˡ=η} Σ_{j_0+⋯+j_l = r−l}
///       (w_ν/w_id) · ∏_q (w_id/w_{ν^q}) · ∏_q f_{ν^q}^{j_q},
/// ```
///
/// with f_κ = y^w_id − (w_id/w_κ) y^w_κ.
pub fn kostka(
    r: u32,
    eta: &IndexSet,
    nu: &IndexSet,
    ws: &WeightSystem,
    graph: &MomentGraph,
    memo: &mut KostkaMemo,
) -> Poly {
    let ctx = yw_ctx(graph.n());
    let nu_i = graph.vertex_index(nu).expect("nu not a vertex");
    let eta_i = graph.vertex_index(eta).expect("eta not a vertex");
    kostka_by_index(r, eta_i, nu_i, ws, graph, memo, &ctx)
}

fn kostka_by_index(
    r: u32,
    eta_i: usize,
    nu_i: usize,
    ws: &WeightSystem,
    graph: &MomentGraph,
    memo: &mut KostkaMemo,
    ctx: &Ctx,
) -> Poly {
    if !graph.geq(nu_i, eta_i) {
        return Poly::zero(ctx);
    }
    let l = graph.length(nu_i) - graph.length(eta_i);
    if r < l {
        return Poly::zero(ctx);
    }
    if let Some(v) = memo.values.get(&(r, eta_i, nu_i)) {
        return v.clone();
    }
    let chains = chains_between(graph, nu_i, eta_i, memo);
    let w_id = ws.w_id_rat(graph.d());
    let prefactor = ws.w_of_rat(graph.vertex(nu_i)) / &w_id;
    let mut acc = Poly::zero(ctx);
    for chain in chains.iter() {
        let mut cst = prefactor.clone();
        for &q in chain {
            cst *= &w_id / ws.w_of_rat(graph.vertex(q));
        }
        let fs: Vec<Poly> = chain
            .iter()
            .map(|&q| weighted_divisor_restriction(ctx, graph.vertex(q), ws))
            .collect();
        let mut chain_sum = Poly::zero(ctx);
        compositions_product(&fs, 0, r - l, &Poly::one(ctx), &mut chain_sum);
        acc = acc.add(&chain_sum.scale(&cst));
    }
    memo.values.insert((r, eta_i, nu_i), acc.clone());
    acc
}

/// w(α) = w_i − w_j for α = (i,j); negative for unsorted weights is fine.
pub fn w_alpha(alpha: (u8, u8), ws: &WeightSystem) -> Result<Rat> {
    let (i, j) = alpha;
    if !(j >= 1 && i > j && (i as u32) <= ws.n()) {
        return Err(Error::Domain(format!("need n >= i > j >= 1, got ({i},{j})")));
    }
    Ok(Rat::from_integer(BigInt::from(ws.w_i(i)) - BigInt::from(ws.w_i(j))))
}

/// wu_α = (y^w_i − y^w_j) − (w(α)/w_id) y^w_id.
pub fn wu_form(ctx: &Ctx, alpha: (u8, u8), ws: &WeightSystem, d: u32) -> Result<LinearForm> {
    let wa = w_alpha(alpha, ws)?;
    let (i, j) = alpha;
    let (id, _) = distinguished_elements(ws.n(), d)?;
    let ratio = wa / ws.w_id_rat(d);
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    coeffs[(i - 1) as usize] += Rat::one();
    coeffs[(j - 1) as usize] -= Rat::one();
    for &m in id.elems() {
        coeffs[(m - 1) as usize] -= &ratio;
    }
    LinearForm::new(ctx, coeffs)
}

/// wu_I^(r): sum over r-subsets S ⊆ I of ∏_{α∈S} (w(α)/w_id) ∏_{α∉S} wu_α.
/// In particular wu_I^(0) = ∏ wu_α and wu_I^(|I|) = ∏ w(α)/w_id.
pub fn wu_i_r(
    ctx: &Ctx,
    alphas: &[(u8, u8)],
    r: u32,
    ws: &WeightSystem,
    d: u32,
) -> Result<Poly> {
    if (r as usize) > alphas.len() {
        return Err(Error::Domain(format!(
            "r = {r} out of range for |I| = {}",
            alphas.len()
        )));
    }
    let w_id = ws.w_id_rat(d);
    let ratios: Vec<Rat> = alphas
        .iter()
        .map(|&a| Ok(w_alpha(a, ws)? / &w_id))
        .collect::<Result<_>>()?;
    let forms: Vec<Poly> = alphas
        .iter()
        .map(|&a| Ok(wu_form(ctx, a, ws, d)?.as_poly()))
        .collect::<Result<_>>()?;
    let mut acc = Poly::zero(ctx);
    for subset in (0..alphas.len()).combinations(r as usize) {
        let mut c = Rat::one();
        let mut term = Poly::one(ctx);
        for (k, form) in forms.iter().enumerate() {
            if subset.contains(&k) {
                c *= &ratios[k];
            } else {
                term = term.mul(form);
            }
        }
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&term.scale(&c));
    }
    Ok(acc)
}

/// The wu-coordinate system: forms wu_1..wu_{n−1} completed by y^w_id.
/// Linear independence is verified at construction.
pub struct WuContext {
    ctx: Ctx,
    forms: Vec<(String, LinearForm)>,
    complement: Vec<(String, LinearForm)>,
}

impl WuContext {
    pub fn new(ws: &WeightSystem, d: u32) -> Result<WuContext> {
        let n = ws.n();
        let ctx = yw_ctx(n);
        let forms: Vec<(String, LinearForm)> = (1..n as u8)
            .map(|i| Ok((format!("wu{i}"), wu_form(&ctx, (i + 1, i), ws, d)?)))
            .collect::<Result<_>>()?;
        let (id, _) = distinguished_elements(n, d)?;
        let mut coeffs = vec![Rat::zero(); ctx.arity()];
        for &m in id.elems() {
            coeffs[(m - 1) as usize] = Rat::one();
        }
        let complement = vec![("Ywid".to_string(), LinearForm::new(&ctx, coeffs)?)];
        let mut all = forms.clone();
        all.extend(complement.iter().cloned());
        rewrite_in_basis(&Poly::one(&ctx), &all)?; // surfaces SingularBasis
        Ok(WuContext { ctx, forms, complement })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn forms(&self) -> &[(String, LinearForm)] {
        &self.forms
    }

    /// Rewrite in wu-coordinates, rejecting any y^w_id-dependence.
    pub fn expand(&self, p: &Poly) -> Result<Poly> {
        expand_in_forms(p, &self.forms, &self.complement)
    }
}

pub struct PositivityCertificate {
    pub coeffs: BTreeMap<Vec<u32>, Rat>,
    pub nonneg: bool,
}

/// Expand a Yw-polynomial in wu-monomials; `nonneg` records whether all
/// coefficients are ≥ 0.  Structure constants always land in the subring;
/// arbitrary inputs may fail with `NotInSubring`.
pub fn positivity_certificate(p: &Poly, wu: &WuContext) -> Result<PositivityCertificate> {
    let e = wu.expand(p)?;
    let nvars = wu.forms.len();
    let coeffs: BTreeMap<Vec<u32>, Rat> = e
        .terms()
        .iter()
        .map(|(m, c)| (m.exps(nvars), c.clone()))
        .collect();
    let nonneg = coeffs.values().all(|c| !c.is_negative());
    Ok(PositivityCertificate { coeffs, nonneg })
}

/// The u-expansions of the ordinary constants of one pair (λ,μ): the
/// weight-independent input to the structure-constant formula.
pub struct PairExpansion {
    pub lam: usize,
    pub mu: usize,
    /// (η, u-expansion of c̃_{λμ}^η, the same data as a polynomial in the
    /// variables u_1..u_{n−1}), nonzero constants only.
    pub per_eta: Vec<(usize, UExpansion, Poly)>,
}

fn u_var_ctx(n: u32) -> Ctx {
    VarContext::new((1..n).map(|i| format!("u{i}")).collect()).unwrap()
}

pub fn pair_expansion(ordinary: &OrdinaryBasis, lam: usize, mu: usize) -> Result<PairExpansion> {
    let uctx = u_var_ctx(ordinary.graph().n());
    let constants = ordinary_constants(ordinary, lam, mu)?;
    let mut per_eta = Vec::new();
    for (eta, c) in constants.iter().enumerate() {
        if !c.is_zero() {
            let ue = u_expand(c)?;
            let terms = ue
                .entries()
                .iter()
                .map(|(exps, coeff)| (Mono::from_exps(exps), coeff.clone()))
                .collect();
            per_eta.push((eta, ue, Poly::from_terms(&uctx, terms)));
        }
    }
    Ok(PairExpansion { lam, mu, per_eta })
}

/// Per-weight-system caches shared across pairs.
#[derive(Default)]
pub struct FormulaCaches {
    pub kostka: KostkaMemo,
    gen_images: Option<(Ctx, Vec<LinearForm>)>,
}

impl FormulaCaches {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Closed combinatorial formula: for each ν,
/// wc̃_{λμ}^ν = Σ_{ν≥η≥λ,μ} Σ_I Σ_{r=0}^{|I|} c(λ,μ,η;I) · K_{1^r η}^ν · wu_I^(r),
/// where the c(λ,μ,η;I) are the canonical simple-pair u-expansions of the
/// ordinary constants.  Returns the full vector indexed by ν.
///
/// The inner Σ_I Σ_r is not evaluated subset-by-subset: substituting
/// u_i ↦ wu_i + (w(α_i)/w_id)·Q into c̃_{λμ}^η turns each u_I into
/// ∏_{α∈I}(wu_α + (w(α)/w_id)Q), whose Q^r coefficient is by definition
/// wu_I^(r).  One linear substitution per η therefore yields every
/// G_{η,r} := Σ_I c(λ,μ,η;I)·wu_I^(r) at once.
pub fn weighted_constants_from_expansion(
    pe: &PairExpansion,
    ws: &WeightSystem,
    graph: &MomentGraph,
    caches: &mut FormulaCaches,
) -> Result<Vec<Poly>> {
    let ctx = yw_ctx(graph.n());
    let d = graph.d();
    let n = graph.n();
    let nv = graph.vertex_count();
    if caches.gen_images.is_none() {
        let mut names = ctx.names().to_vec();
        names.push("Q".into());
        let ext = VarContext::new(names)?;
        let w_id = ws.w_id_rat(d);
        let images = (1..n as u8)
            .map(|i| {
                let base = wu_form(&ctx, (i + 1, i), ws, d)?;
                let mut coeffs = base.coeffs().to_vec();
                coeffs.push(w_alpha((i + 1, i), ws)? / &w_id);
                LinearForm::new(&ext, coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        caches.gen_images = Some((ext, images));
    }
    let (ext, images) = caches.gen_images.as_ref().unwrap();
    let q_slot = ext.arity() - 1;
    let mut g_eta: Vec<(usize, Vec<Poly>)> = Vec::with_capacity(pe.per_eta.len());
    for (eta, _, cu) in &pe.per_eta {
        let p = (graph.length(pe.lam) + graph.length(pe.mu) - graph.length(*eta)) as usize;
        let gq = substitute_linear(cu, ext, images);
        let mut buckets: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); p + 1];
        for (m, c) in gq.terms() {
            let r = m.exp(q_slot) as usize;
            debug_assert!(r <= p);
            let exps: Vec<u32> = (0..q_slot).map(|i| m.exp(i)).collect();
            buckets[r].push((Mono::from_exps(&exps), c.clone()));
        }
        let g: Vec<Poly> =
            buckets.into_iter().map(|t| Poly::from_terms(&ctx, t)).collect();
        g_eta.push((*eta, g));
    }
    let mut out = vec![Poly::zero(&ctx); nv];
    for (nu, slot) in out.iter_mut().enumerate() {
        for (eta, g) in &g_eta {
            if !graph.geq(nu, *eta) {
                continue;
            }
            for (r, gr) in g.iter().enumerate() {
                if gr.is_zero() {
                    continue;
                }
                let k = kostka_by_index(r as u32, *eta, nu, ws, graph, &mut caches.kostka, &ctx);
                if !k.is_zero() {
                    *slot = slot.add(&k.mul(gr));
                }
            }
        }
    }
    Ok(out)
}

pub fn weighted_constants_formula(
    ordinary: &OrdinaryBasis,
    lam: usize,
    mu: usize,
    ws: &WeightSystem,
) -> Result<Vec<Poly>> {
    let pe = pair_expansion(ordinary, lam, mu)?;
    let mut caches = FormulaCaches::new();
    weighted_constants_from_expansion(&pe, ws, ordinary.graph(), &mut caches)
}

/// The independent route: pointwise product expanded in the weighted basis.
pub fn weighted_constants_gkm(
    basis: &WeightedBasis,
    lam: usize,
    mu: usize,
) -> Result<Vec<Poly>> {
    let prod = pointwise_multiply(basis.class(lam), basis.class(mu))?;
    expand_in_basis_factored(&prod, basis.classes(), &basis.diag_factors)
}

/// Full table wc̃_{λμ}^ν for all λ, μ, ν.
pub struct ConstantsTable {
    entries: Vec<Vec<Vec<Poly>>>,
}

impl ConstantsTable {
    pub fn get(&self, lam: usize, mu: usize, nu: usize) -> &Poly {
        &self.entries[lam][mu][nu]
    }

    /// Assemble from precomputed rows in pair-major order (λ·nv + μ).
    pub fn from_rows(nv: usize, mut rows: Vec<Vec<Poly>>) -> ConstantsTable {
        assert_eq!(rows.len(), nv * nv);
        let mut entries = Vec::with_capacity(nv);
        for _ in 0..nv {
            entries.push(rows.drain(..nv).collect());
        }
        ConstantsTable { entries }
    }
}

pub fn constants_table_gkm(basis: &WeightedBasis) -> Result<ConstantsTable> {
    let nv = basis.graph().vertex_count();
    let entries = (0..nv)
        .into_par_iter()
        .map(|l| (0..nv).map(|m| weighted_constants_gkm(basis, l, m)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(ConstantsTable { entries })
}

/// Left minus right of the divisor recursion on structure constants:
///
/// ```text
/// (wS̃_div|_ν − wS̃_div|_λ) wc̃_{λμ}^ν
///     = Σ_{λ'→λ} (w_id/w_λ) wc̃_{λ'μ}^ν − Σ_{ν→ν'} (w_id/w_{ν'}) wc̃_{λμ}^{ν'}
/// ```
///
/// Identically zero on a correct table.
pub fn recursive_identity_residual(
    table: &ConstantsTable,
    graph: &MomentGraph,
    ws: &WeightSystem,
    lam: usize,
    mu: usize,
    nu: usize,
) -> Poly {
    let ctx = yw_ctx(graph.n());
    let w_id = ws.w_id_rat(graph.d());
    let lhs = if lam == nu {
        Poly::zero(&ctx)
    } else {
        pieri_difference_form(&ctx, graph.vertex(lam), graph.vertex(nu), ws)
            .as_poly()
            .mul(table.get(lam, mu, nu))
    };
    let mut rhs = Poly::zero(&ctx);
    let ratio_l = &w_id / ws.w_of_rat(graph.vertex(lam));
    for &lp in graph.covering(lam) {
        rhs = rhs.add(&table.get(lp, mu, nu).scale(&ratio_l));
    }
    for &np in graph.covered(nu) {
        let ratio_n = &w_id / ws.w_of_rat(graph.vertex(np));
        rhs = rhs.sub(&table.get(lam, mu, np).scale(&ratio_n));
    }
    lhs.sub(&rhs)
}

/// Non-equivariant structure constants wc_{λμ}^ν, by two routes that must
/// agree: the chain-sum formula (applied when l(λ)+l(μ) = l(ν), zero
/// otherwise) and the wu → 0 limit of the equivariant constants.
pub fn nonequivariant_constants(
    ordinary: &OrdinaryBasis,
    lam: usize,
    mu: usize,
    ws: &WeightSystem,
) -> Result<Vec<Rat>> {
    let graph = ordinary.graph();
    let pe = pair_expansion(ordinary, lam, mu)?;
    let mut caches = FormulaCaches::new();
    let wc = weighted_constants_from_expansion(&pe, ws, graph, &mut caches)?;
    nonequivariant_from_table(ordinary, lam, mu, ws, &wc, &mut caches.kostka)
}

/// Same as [`nonequivariant_constants`] but against a precomputed equivariant
/// table row, so table-wide verification does not redo the expensive route.
pub fn nonequivariant_from_table(
    ordinary: &OrdinaryBasis,
    lam: usize,
    mu: usize,
    ws: &WeightSystem,
    equivariant: &[Poly],
    memo: &mut KostkaMemo,
) -> Result<Vec<Rat>> {
    let graph = ordinary.graph();
    let nv = graph.vertex_count();

    // route 1: chains, with the ordinary constants evaluated at y_i := w_i
    // (only the differences u_i = w_{i+1}−w_i matter)
    let wvals: Vec<Rat> = (1..=graph.n() as u8).map(|i| ws.w_i_rat(i)).collect();
    let target = graph.length(lam) + graph.length(mu);
    let mut by_chains = vec![Rat::zero(); nv];
    let const_eval: Vec<(usize, Rat)> = {
        let cs = ordinary_constants(ordinary, lam, mu)?;
        cs.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(eta, c)| (eta, c.eval(&wvals)))
            .collect()
    };
    for (nu, slot) in by_chains.iter_mut().enumerate() {
        if graph.length(nu) != target {
            continue;
        }
        for (eta, val) in &const_eval {
            if val.is_zero() || !graph.geq(nu, *eta) {
                continue;
            }
            for chain in chains_between(graph, nu, *eta, memo).iter() {
                let mut denom = Rat::one();
                for &q in &chain[1..] {
                    denom *= ws.w_of_rat(graph.vertex(q));
                }
                *slot += val / denom;
            }
        }
    }

    // route 2: constant term of the equivariant constants (all wu_i := 0)
    assert_eq!(equivariant.len(), nv);
    for (nu, p) in equivariant.iter().enumerate() {
        if p.constant_term() != by_chains[nu] {
            return Err(Error::RouteMismatch(format!(
                "non-equivariant constant at {} disagrees between the chain formula and the wu->0 limit",
                graph.vertex(nu)
            )));
        }
    }
    Ok(by_chains)
}

/// Vertexwise residual of the translation formula
/// y_i·1 = (y^w_i − (w_i/w_id) y^w_id)·1 + (w_i/w_id)·wS̃_div; always zero.
pub fn translation_residual(graph: &MomentGraph, ws: &WeightSystem, i: u8) -> Vec<Poly> {
    let ctx = yw_ctx(graph.n());
    let (id, _) = distinguished_elements(graph.n(), graph.d()).unwrap();
    let ratio_id = ws.w_i_rat(i) / ws.w_id_rat(graph.d());
    // the constant part: y^w_i − (w_i/w_id) y^w_id
    let mut const_coeffs = vec![Rat::zero(); ctx.arity()];
    const_coeffs[(i - 1) as usize] += Rat::one();
    for &m in id.elems() {
        const_coeffs[(m - 1) as usize] -= &ratio_id;
    }
    let const_part = lin_poly(&ctx, const_coeffs);
    (0..graph.vertex_count())
        .map(|v| {
            let mu = graph.vertex(v);
            // y_i reduced at mu
            let ratio_mu = ws.w_i_rat(i) / ws.w_of_rat(mu);
            let mut coeffs = vec![Rat::zero(); ctx.arity()];
            coeffs[(i - 1) as usize] += Rat::one();
            for &m in mu.elems() {
                coeffs[(m - 1) as usize] -= &ratio_mu;
            }
            let reduced = lin_poly(&ctx, coeffs);
            let rhs = const_part
                .add(&weighted_divisor_restriction(&ctx, mu, ws).scale(&ratio_id));
            reduced.sub(&rhs)
        })
        .collect()
}

/// The weighted projective space wGr(1,n) against its Stanley–Reisner model
/// H = Q[z_1..z_n]/(z_1⋯z_n), z_i = y_i + z, b_i = w_i + a:
/// wS̃_{k} = z_{k+1}⋯z_n with z_i|_{m} = Yw_i − (b_i/b_m) Yw_m.
pub struct StanleyReisnerReport {
    pub n: u32,
    pub top_is_one: bool,
    pub monomial_ok: bool,
    pub pieri_ok: bool,
    pub mismatches: Vec<String>,
}

impl StanleyReisnerReport {
    pub fn ok(&self) -> bool {
        self.top_is_one && self.monomial_ok && self.pieri_ok && self.mismatches.is_empty()
    }
}

pub fn stanley_reisner_check(ws: &WeightSystem) -> Result<StanleyReisnerReport> {
    let n = ws.n();
    let graph = MomentGraph::new(n, 1)?;
    let basis = build_weighted_basis(&graph, ws, Route::Substitution)?;
    let ctx = yw_ctx(n);
    let mut mismatches = Vec::new();

    // z_i restricted at the vertex {m}
    let z_at = |i: u8, m: u8| -> Poly {
        if i == m {
            return Poly::zero(&ctx);
        }
        let ratio = ru(ws.b_i(i)) / ru(ws.b_i(m));
        let mut coeffs = vec![Rat::zero(); ctx.arity()];
        coeffs[(i - 1) as usize] += Rat::one();
        coeffs[(m - 1) as usize] -= &ratio;
        lin_poly(&ctx, coeffs)
    };

    let vidx = |k: u8| graph.vertex_index(&IndexSet::new(n, vec![k]).unwrap()).unwrap();
    let top_is_one = (1..=n as u8).all(|m| {
        basis.restriction(vidx(n as u8), vidx(m)) == &Poly::one(&ctx)
    });

    let mut monomial_ok = true;
    for k in 1..=n as u8 {
        for m in 1..=n as u8 {
            let mut expect = Poly::one(&ctx);
            for i in (k + 1)..=n as u8 {
                expect = expect.mul(&z_at(i, m));
            }
            let got = basis.restriction(vidx(k), vidx(m));
            if got != &expect {
                monomial_ok = false;
                mismatches.push(format!(
                    "wS~_{k} at {{{m}}}: basis gives {got}, monomial model gives {expect}"
                ));
            }
        }
    }

    // the Pieri product wS~_{n-1} · wS~_k expands with self-coefficient
    // z_n − (b_n/b_k) z_k (a constant vector) and b_n/b_k at the cover {k−1}
    let mut pieri_ok = true;
    for k in 1..=n as u8 {
        let coeffs = weighted_constants_gkm(&basis, vidx(n as u8 - 1), vidx(k))?;
        let bnk = ru(ws.b_i(n as u8)) / ru(ws.b_i(k));
        for m in 1..=n as u8 {
            let expect = if m == k {
                // Yw_n − (b_n/b_k) Yw_k, which z_n − (b_n/b_k) z_k restricts
                // to at every vertex
                let mut cs = vec![Rat::zero(); ctx.arity()];
                cs[n as usize - 1] += Rat::one();
                cs[(k - 1) as usize] -= &bnk;
                lin_poly(&ctx, cs)
            } else if m + 1 == k {
                Poly::constant(&ctx, bnk.clone())
            } else {
                Poly::zero(&ctx)
            };
            if coeffs[vidx(m)] != expect {
                pieri_ok = false;
                mismatches.push(format!(
                    "Pieri wS~_{}·wS~_{k}: coefficient at {{{m}}} is {}, expected {expect}",
                    n - 1,
                    coeffs[vidx(m)]
                ));
            }
        }
    }

    Ok(StanleyReisnerReport { n, top_is_one, monomial_ok, pieri_ok, mismatches })
}

/// The rational Kawasaki factor arithmetic for wP(b_1..b_n):
/// l_k = lcm over k-subsets of ∏b_i / gcd(b_i), and the pullback multiples
/// m_1 = 1, m_k = l_k/(b_{n−k+2}⋯b_n).  Torsion analysis is out of scope;
/// this is the rational bookkeeping only.
pub struct KawasakiFactors {
    pub l: Vec<BigInt>,
    pub multiples: Vec<Rat>,
}

pub fn kawasaki_factors(b: &[u64]) -> Result<KawasakiFactors> {
    if b.is_empty() || b.contains(&0) {
        return Err(Error::Domain("need positive integers b_i".into()));
    }
    let n = b.len();
    let big: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
    let mut l = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = BigInt::one();
        for subset in (0..n).combinations(k) {
            let mut prod = BigInt::one();
            let mut g = BigInt::zero();
            for &i in &subset {
                prod *= &big[i];
                g = num::integer::gcd(g, big[i].clone());
            }
            acc = num::integer::lcm(acc, prod / g);
        }
        l.push(acc);
    }
    let mut multiples = Vec::with_capacity(n);
    multiples.push(Rat::one());
    for k in 2..=n {
        let mut denom = BigInt::one();
        for i in (n - k + 2)..=n {
            denom *= &big[i - 1];
        }
        multiples.push(Rat::new(l[k - 1].clone(), denom));
    }
    Ok(KawasakiFactors { l, multiples })
}
