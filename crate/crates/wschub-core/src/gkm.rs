//! The moment graph of the torus action and GKM-style restriction vectors.
//!
//! A cohomology class is a tuple of polynomials indexed by the fixed points
//! (d-subsets), constrained edge-by-edge: vertices λ, μ are joined iff
//! |λ∩μ| = d−1, and the difference of values along an edge must be divisible
//! by the edge's linear form.  Three flavors share this skeleton:
//!
//! * `Ordinary`   — values in Q[y_1..y_n], edge form y_λ − y_μ;
//! * `Weighted`   — values in Q[Yw_1..Yw_n], edge form w_μ y^w_λ − w_λ y^w_μ;
//! * `AffineCone` — the cone picture, where the edge condition is congruence
//!   modulo the ideal (y_λ+z, y_μ+z).  Values are *stored* as canonical
//!   representatives in the Yw-variables (z eliminated via z ↦ −(a/w_μ) y^w_μ
//!   at vertex μ), which makes this flavor coincide with `Weighted` on disk;
//!   [`check_affine_cone_pair`] keeps the original two-form membership test
//!   available for cross-validation.

use crate::combinat::{self, IndexSet};
use crate::poly::{
    div_exact, exact_divide, exact_divide_all, k_ctx, same_ctx, substitute_linear, y_ctx, yw_ctx,
    Ctx, LinearForm, Poly, Rat,
};
use crate::weighted::WeightSystem;
use crate::{Error, Result};
use num::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::sync::Arc;

#[derive(Debug)]
pub struct MomentGraph {
    n: u32,
    d: u32,
    vertices: Vec<IndexSet>,
    index: FxHashMap<IndexSet, usize>,
    edges: Vec<(usize, usize)>,
    lengths: Vec<u32>,
    covering: Vec<Vec<usize>>,
    covered: Vec<Vec<usize>>,
    order_len_lex: Vec<usize>,
    geq: Vec<Vec<bool>>,
    id_idx: usize,
    div_idx: usize,
}

impl MomentGraph {
    pub fn new(n: u32, d: u32) -> Result<Arc<MomentGraph>> {
        Self::with_cap(n, d, combinat::DEFAULT_VERTEX_CAP)
    }

    pub fn with_cap(n: u32, d: u32, cap: u64) -> Result<Arc<MomentGraph>> {
        let vertices = combinat::enumerate_index_sets_capped(n, d, cap)?;
        let index: FxHashMap<IndexSet, usize> =
            vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let lengths: Vec<u32> = vertices.iter().map(IndexSet::length).collect();
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                let shared = vertices[i]
                    .elems()
                    .iter()
                    .filter(|e| vertices[j].contains(**e))
                    .count() as u32;
                if shared == d - 1 {
                    edges.push((i, j));
                }
            }
        }
        let covering: Vec<Vec<usize>> = vertices
            .iter()
            .map(|s| s.covering_elements().iter().map(|t| index[t]).collect())
            .collect();
        let covered: Vec<Vec<usize>> = vertices
            .iter()
            .map(|s| s.covered_elements().iter().map(|t| index[t]).collect())
            .collect();
        let mut order_len_lex: Vec<usize> = (0..vertices.len()).collect();
        order_len_lex.sort_by(|&a, &b| combinat::length_lex(&vertices[a], &vertices[b]));
        let geq: Vec<Vec<bool>> = vertices
            .iter()
            .map(|a| vertices.iter().map(|b| combinat::bruhat_leq(b, a)).collect())
            .collect();
        let (id, div) = combinat::distinguished_elements(n, d)?;
        let (id_idx, div_idx) = (index[&id], index[&div]);
        Ok(Arc::new(MomentGraph {
            n,
            d,
            vertices,
            index,
            edges,
            lengths,
            covering,
            covered,
            order_len_lex,
            geq,
            id_idx,
            div_idx,
        }))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn vertices(&self) -> &[IndexSet] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &IndexSet {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, s: &IndexSet) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn length(&self, v: usize) -> u32 {
        self.lengths[v]
    }

    pub fn max_length(&self) -> u32 {
        self.d * (self.n - self.d)
    }

    /// Indices of the λ' with λ' → λ (one step up in Bruhat order).
    pub fn covering(&self, v: usize) -> &[usize] {
        &self.covering[v]
    }

    /// Indices of the ν' with ν → ν' (one step down).
    pub fn covered(&self, v: usize) -> &[usize] {
        &self.covered[v]
    }

    /// Vertex indices sorted by (length, lex) — a linear extension of the
    /// Bruhat order starting at id, fixed for determinism.
    pub fn order_len_lex(&self) -> &[usize] {
        &self.order_len_lex
    }

    /// vertex a >= vertex b in Bruhat order.
    pub fn geq(&self, a: usize, b: usize) -> bool {
        self.geq[a][b]
    }

    pub fn id_index(&self) -> usize {
        self.id_idx
    }

    pub fn div_index(&self) -> usize {
        self.div_idx
    }
}

/// Which coefficient ring a restriction vector lives in.
#[derive(Clone, Debug, PartialEq)]
pub enum Flavor {
    Ordinary,
    AffineCone(WeightSystem),
    Weighted(WeightSystem),
}

impl Flavor {
    pub fn ctx(&self, n: u32) -> Ctx {
        match self {
            Flavor::Ordinary => y_ctx(n),
            Flavor::AffineCone(_) | Flavor::Weighted(_) => yw_ctx(n),
        }
    }

    pub fn weights(&self) -> Option<&WeightSystem> {
        match self {
            Flavor::Ordinary => None,
            Flavor::AffineCone(ws) | Flavor::Weighted(ws) => Some(ws),
        }
    }
}

/// y_λ − y_μ (coefficient +1 on λ, −1 on μ, shared members cancelling).
/// Also valid in the affine-cone context, where the extra z slot stays 0.
pub fn y_difference_form(ctx: &Ctx, lam: &IndexSet, mu: &IndexSet) -> LinearForm {
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    for &i in lam.elems() {
        coeffs[(i - 1) as usize] += Rat::one();
    }
    for &i in mu.elems() {
        coeffs[(i - 1) as usize] -= Rat::one();
    }
    LinearForm::new(ctx, coeffs).expect("distinct index sets give a nonzero form")
}

/// w_μ y^w_λ − w_λ y^w_μ in the Yw-variables.
pub fn weighted_edge_form(
    ctx: &Ctx,
    lam: &IndexSet,
    mu: &IndexSet,
    ws: &WeightSystem,
) -> LinearForm {
    let wl = ws.w_of_rat(lam);
    let wm = ws.w_of_rat(mu);
    let mut coeffs = vec![Rat::zero(); ctx.arity()];
    for &i in lam.elems() {
        coeffs[(i - 1) as usize] += &wm;
    }
    for &i in mu.elems() {
        coeffs[(i - 1) as usize] -= &wl;
    }
    LinearForm::new(ctx, coeffs).expect("weighted edge forms are nonzero (w >= a >= 1)")
}

pub enum EdgeForm {
    Single(LinearForm),
    IdealPair(LinearForm, LinearForm),
}

pub fn gkm_edge_form(
    graph: &MomentGraph,
    i: usize,
    j: usize,
    flavor: &Flavor,
) -> Result<EdgeForm> {
    let (li, lj) = (graph.vertex(i), graph.vertex(j));
    let shared = li.elems().iter().filter(|e| lj.contains(**e)).count() as u32;
    if i == j || shared != graph.d() - 1 {
        return Err(Error::Domain(format!("{li}-{lj} is not an edge")));
    }
    match flavor {
        Flavor::Ordinary => Ok(EdgeForm::Single(y_difference_form(&y_ctx(graph.n()), li, lj))),
        Flavor::Weighted(ws) => Ok(EdgeForm::Single(weighted_edge_form(
            &yw_ctx(graph.n()),
            li,
            lj,
            ws,
        ))),
        Flavor::AffineCone(_) => {
            let kc = k_ctx(graph.n());
            let z = kc.arity() - 1;
            let make = |s: &IndexSet| {
                let mut coeffs = vec![Rat::zero(); kc.arity()];
                for &e in s.elems() {
                    coeffs[(e - 1) as usize] = Rat::one();
                }
                coeffs[z] = Rat::one();
                LinearForm::new(&kc, coeffs).unwrap()
            };
            Ok(EdgeForm::IdealPair(make(li), make(lj)))
        }
    }
}

/// A class in the GKM model: one polynomial per vertex.
#[derive(Clone, Debug)]
pub struct RestrictionVector {
    graph: Arc<MomentGraph>,
    flavor: Flavor,
    values: Vec<Poly>,
}

impl PartialEq for RestrictionVector {
    fn eq(&self, other: &Self) -> bool {
        (self.graph.n, self.graph.d) == (other.graph.n, other.graph.d)
            && self.flavor == other.flavor
            && self.values == other.values
    }
}

impl RestrictionVector {
    pub fn new(graph: &Arc<MomentGraph>, flavor: Flavor, values: Vec<Poly>) -> Result<Self> {
        if values.len() != graph.vertex_count() {
            return Err(Error::ContextMismatch);
        }
        let ctx = flavor.ctx(graph.n());
        if values.iter().any(|p| !same_ctx(p.ctx(), &ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(RestrictionVector { graph: graph.clone(), flavor, values })
    }

    pub fn constant(graph: &Arc<MomentGraph>, flavor: Flavor, c: Rat) -> Self {
        let ctx = flavor.ctx(graph.n());
        let values = vec![Poly::constant(&ctx, c); graph.vertex_count()];
        RestrictionVector { graph: graph.clone(), flavor, values }
    }

    pub fn graph(&self) -> &Arc<MomentGraph> {
        &self.graph
    }

    pub fn flavor(&self) -> &Flavor {
        &self.flavor
    }

    pub fn values(&self) -> &[Poly] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &Poly {
        &self.values[v]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Poly::is_zero)
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!((self.graph.n, self.graph.d), (other.graph.n, other.graph.d));
        assert_eq!(self.flavor, other.flavor, "flavor mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        RestrictionVector { graph: self.graph.clone(), flavor: self.flavor.clone(), values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect();
        RestrictionVector { graph: self.graph.clone(), flavor: self.flavor.clone(), values }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let values = self.values.iter().map(|p| p.scale(s)).collect();
        RestrictionVector { graph: self.graph.clone(), flavor: self.flavor.clone(), values }
    }

    /// Multiply every value by a fixed polynomial (a scalar from H*(BT)).
    pub fn mul_poly(&self, p: &Poly) -> Self {
        let values = self.values.iter().map(|v| v.mul(p)).collect();
        RestrictionVector { graph: self.graph.clone(), flavor: self.flavor.clone(), values }
    }
}

/// Cup product in the GKM model: vertexwise multiplication.
pub fn pointwise_multiply(
    a: &RestrictionVector,
    b: &RestrictionVector,
) -> Result<RestrictionVector> {
    if (a.graph.n, a.graph.d) != (b.graph.n, b.graph.d) || a.flavor != b.flavor {
        return Err(Error::ContextMismatch);
    }
    let values: Vec<Poly> = a
        .values
        .par_iter()
        .zip(b.values.par_iter())
        .map(|(x, y)| x.mul(y))
        .collect();
    Ok(RestrictionVector { graph: a.graph.clone(), flavor: a.flavor.clone(), values })
}

/// All edges whose divisibility condition fails, exhaustively (diagnostics
/// want the full list, so no fail-fast).  AffineCone vectors hold canonical
/// Yw representatives and are checked with the weighted form.
pub fn check_gkm(v: &RestrictionVector) -> Vec<(usize, usize)> {
    let graph = v.graph();
    let ctx = v.flavor().ctx(graph.n());
    let mut bad: Vec<(usize, usize)> = graph
        .edges()
        .par_iter()
        .filter_map(|&(i, j)| {
            let form = match v.flavor() {
                Flavor::Ordinary => y_difference_form(&ctx, graph.vertex(i), graph.vertex(j)),
                Flavor::Weighted(ws) | Flavor::AffineCone(ws) => {
                    weighted_edge_form(&ctx, graph.vertex(i), graph.vertex(j), ws)
                }
            };
            let diff = v.value(i).sub(v.value(j));
            if exact_divide(&diff, &form).is_none() {
                Some((i, j))
            } else {
                None
            }
        })
        .collect();
    bad.sort_unstable();
    bad
}

/// The unreduced affine-cone membership test: f_λ ≡ f_μ mod (y_λ+z, y_μ+z)
/// in Q[y_1..y_n, z].  Eliminating z via z := −y_λ is an isomorphism onto
/// Q[y_1..y_n] under which the ideal becomes (y_λ − y_μ).
pub fn check_affine_cone_pair(
    f_lam: &Poly,
    f_mu: &Poly,
    lam: &IndexSet,
    mu: &IndexSet,
) -> bool {
    assert_eq!(lam.n(), mu.n());
    assert_ne!(lam, mu);
    let n = lam.n();
    let kc = k_ctx(n);
    assert!(same_ctx(f_lam.ctx(), &kc) && same_ctx(f_mu.ctx(), &kc));
    let yc = y_ctx(n);
    let mut images: Vec<LinearForm> = (0..n as usize)
        .map(|i| LinearForm::from_pairs(&yc, &[(i, Rat::one())]).unwrap())
        .collect();
    let mut z_coeffs = vec![Rat::zero(); n as usize];
    for &e in lam.elems() {
        z_coeffs[(e - 1) as usize] = -Rat::one();
    }
    images.push(LinearForm::new(&yc, z_coeffs).unwrap());
    let diff = substitute_linear(f_lam, &yc, &images)
        .sub(&substitute_linear(f_mu, &yc, &images));
    diff.is_zero() || exact_divide(&diff, &y_difference_form(&yc, lam, mu)).is_some()
}

/// Expand `v` in an upper-triangular Schubert basis (one class per vertex,
/// `basis[i]` labeled by `graph.vertex(i)`).  Iterates the (length, lex)
/// order; each step divides the running residual at λ by the diagonal value
/// basis[λ]|_λ, which must divide exactly.  Any failure means the input is
/// not in the span — with exact arithmetic that is an upstream bug, not noise.
pub fn expand_in_schubert_basis(
    v: &RestrictionVector,
    basis: &[RestrictionVector],
) -> Result<Vec<Poly>> {
    let graph = v.graph();
    assert_eq!(basis.len(), graph.vertex_count(), "need one basis class per vertex");
    for b in basis {
        assert_eq!(b.flavor(), v.flavor(), "flavor mismatch");
    }
    let ctx = v.flavor().ctx(graph.n());
    let nv = graph.vertex_count();
    let mut coeffs = vec![Poly::zero(&ctx); nv];
    let mut residual: Vec<Poly> = v.values.clone();
    for &vi in graph.order_len_lex() {
        if residual[vi].is_zero() {
            continue;
        }
        let diag = basis[vi].value(vi);
        if diag.is_zero() {
            return Err(Error::SingularBasis);
        }
        let c = div_exact(&residual[vi], diag).ok_or_else(|| {
            Error::InexactDivision(format!(
                "expanding at vertex {}",
                graph.vertex(vi)
            ))
        })?;
        for u in 0..nv {
            let bu = basis[vi].value(u);
            if !bu.is_zero() {
                residual[u] = residual[u].sub(&c.mul(bu));
            }
        }
        coeffs[vi] = c;
    }
    if residual.iter().any(|p| !p.is_zero()) {
        return Err(Error::NonzeroResidual);
    }
    Ok(coeffs)
}

/// Same expansion, but with each diagonal given as its known factorization
/// into linear forms; sequential division by linear factors is far cheaper
/// than long division by their expanded product.  `diag_factors[i]` must
/// multiply out to `basis[i]|_i` — both Schubert constructions produce the
/// diagonals in exactly this factored shape.
pub fn expand_in_basis_factored(
    v: &RestrictionVector,
    basis: &[RestrictionVector],
    diag_factors: &[Vec<LinearForm>],
) -> Result<Vec<Poly>> {
    let graph = v.graph();
    assert_eq!(basis.len(), graph.vertex_count(), "need one basis class per vertex");
    assert_eq!(diag_factors.len(), basis.len());
    for b in basis {
        assert_eq!(b.flavor(), v.flavor(), "flavor mismatch");
    }
    let ctx = v.flavor().ctx(graph.n());
    let nv = graph.vertex_count();
    let mut coeffs = vec![Poly::zero(&ctx); nv];
    let mut residual: Vec<Poly> = v.values.clone();
    for &vi in graph.order_len_lex() {
        if residual[vi].is_zero() {
            continue;
        }
        let c = exact_divide_all(&residual[vi], &diag_factors[vi]).ok_or_else(|| {
            Error::InexactDivision(format!("expanding at vertex {}", graph.vertex(vi)))
        })?;
        for u in 0..nv {
            let bu = basis[vi].value(u);
            if !bu.is_zero() {
                residual[u] = residual[u].sub(&c.mul(bu));
            }
        }
        coeffs[vi] = c;
    }
    if residual.iter().any(|p| !p.is_zero()) {
        return Err(Error::NonzeroResidual);
    }
    Ok(coeffs)
}
