//! Ordinary equivariant Schubert calculus on Gr(d,n).
//!
//! The basis is built from two formulas only: the diagonal product over
//! inversions, and the divisor rule.  Restricting the divisor product
//! S̃_div·S̃_λ at a vertex ν turns the Pieri rule into a descending recursion
//!
//! ```text
//!     (y_λ − y_ν) · S̃_λ|_ν  =  Σ_{λ'→λ} S̃_{λ'}|_ν        (ν ≠ λ)
//! ```
//!
//! solved top-down by exact division.  Each division either succeeds exactly
//! or exposes a bug — there is no approximation to hide behind.

use crate::combinat::{distinguished_elements, IndexSet};
use crate::gkm::{
    expand_in_basis_factored, pointwise_multiply, y_difference_form, Flavor, MomentGraph,
    RestrictionVector,
};
use crate::poly::{exact_divide, expand_in_forms, y_ctx, Ctx, LinearForm, Poly, Rat};
use crate::{Error, Result};
use num::{One, Signed};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// S̃_λ|_λ = ∏_{(k,l)∈inv(λ)} (y_{(k,l)λ} − y_λ); each factor collapses to
/// y_l − y_k.  Degree l(λ); the empty product at id is 1.
pub fn diagonal_restriction(ctx: &Ctx, lam: &IndexSet) -> Poly {
    diagonal_factors(ctx, lam)
        .iter()
        .fold(Poly::one(ctx), |p, f| p.mul(&f.as_poly()))
}

/// The same diagonal as its list of linear factors, one per inversion.
pub fn diagonal_factors(ctx: &Ctx, lam: &IndexSet) -> Vec<LinearForm> {
    lam.inversions()
        .iter()
        .map(|inv| {
            LinearForm::from_pairs(
                ctx,
                &[((inv.l - 1) as usize, Rat::one()), ((inv.k - 1) as usize, -Rat::one())],
            )
            .unwrap()
        })
        .collect()
}

/// S̃_div|_μ = y_id − y_μ (zero at μ = id).
pub fn divisor_restriction(ctx: &Ctx, mu: &IndexSet) -> Poly {
    let (id, _) = distinguished_elements(mu.n(), mu.d()).expect("valid IndexSet parameters");
    if *mu == id {
        Poly::zero(ctx)
    } else {
        y_difference_form(ctx, &id, mu).as_poly()
    }
}

/// The full restriction table, one class per vertex.
pub struct OrdinaryBasis {
    graph: Arc<MomentGraph>,
    classes: Vec<RestrictionVector>,
    diag_factors: Vec<Vec<LinearForm>>,
}

impl OrdinaryBasis {
    pub fn graph(&self) -> &Arc<MomentGraph> {
        &self.graph
    }

    pub fn diag_factors(&self) -> &[Vec<LinearForm>] {
        &self.diag_factors
    }

    pub fn classes(&self) -> &[RestrictionVector] {
        &self.classes
    }

    pub fn class(&self, v: usize) -> &RestrictionVector {
        &self.classes[v]
    }

    /// S̃_λ|_μ by vertex indices.
    pub fn restriction(&self, lam: usize, mu: usize) -> &Poly {
        self.classes[lam].value(mu)
    }
}

pub fn build_ordinary_basis(graph: &Arc<MomentGraph>) -> Result<OrdinaryBasis> {
    let ctx = y_ctx(graph.n());
    let nv = graph.vertex_count();
    let mut table: Vec<Vec<Poly>> = vec![Vec::new(); nv];
    let mut order: Vec<usize> = graph.order_len_lex().to_vec();
    order.reverse(); // descending length: covers are always already filled
    for &li in &order {
        let lam = graph.vertex(li);
        let covers = graph.covering(li);
        let row = (0..nv)
            .into_par_iter()
            .map(|nu| {
                if nu == li {
                    return Ok(diagonal_restriction(&ctx, lam));
                }
                let mut sum = Poly::zero(&ctx);
                for &c in covers {
                    sum = sum.add(&table[c][nu]);
                }
                if sum.is_zero() {
                    return Ok(Poly::zero(&ctx));
                }
                let form = y_difference_form(&ctx, lam, graph.vertex(nu));
                exact_divide(&sum, &form).ok_or_else(|| {
                    Error::InexactDivision(format!(
                        "restricting the class of {lam} at {}",
                        graph.vertex(nu)
                    ))
                })
            })
            .collect::<Result<Vec<Poly>>>()?;
        table[li] = row;
    }
    let classes = table
        .into_iter()
        .map(|values| RestrictionVector::new(graph, Flavor::Ordinary, values))
        .collect::<Result<Vec<_>>>()?;
    let diag_factors = (0..nv).map(|l| diagonal_factors(&ctx, graph.vertex(l))).collect();
    Ok(OrdinaryBasis { graph: graph.clone(), classes, diag_factors })
}

/// c̃_{λμ}^ν for all ν (upper-triangular expansion of the pointwise product);
/// returned indexed by vertex, zeros included.
pub fn ordinary_constants(basis: &OrdinaryBasis, lam: usize, mu: usize) -> Result<Vec<Poly>> {
    let prod = pointwise_multiply(basis.class(lam), basis.class(mu))?;
    expand_in_basis_factored(&prod, &basis.classes, &basis.diag_factors)
}

/// A structure constant expanded in the simple forms u_i = y_{i+1} − y_i.
/// Keys are exponent vectors over (u_1, …, u_{n−1}); the multiset I of pairs
/// (i+1, i) repeats each pair to its exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct UExpansion {
    n: u32,
    entries: BTreeMap<Vec<u32>, Rat>,
}

impl UExpansion {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.entries
    }

    /// All coefficients non-negative integers (the positivity statement for
    /// the ordinary constants).
    pub fn is_integral_nonneg(&self) -> bool {
        self.entries
            .values()
            .all(|c| !c.is_negative() && c.denom().is_one())
    }

    /// The multiset I behind an exponent vector: (i+1, i) taken e_i times.
    pub fn multiset(exps: &[u32]) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for (i0, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                out.push((i0 as u8 + 2, i0 as u8 + 1));
            }
        }
        out
    }
}

/// The change-of-basis data for u-coordinates: forms u_1..u_{n−1} plus the
/// complement variable y_1 (a full linear basis of degree-1 forms).
pub fn u_basis_forms(n: u32) -> (Vec<(String, LinearForm)>, Vec<(String, LinearForm)>) {
    let ctx = y_ctx(n);
    let forms = (1..n as usize)
        .map(|i| {
            let lf = LinearForm::from_pairs(
                &ctx,
                &[(i, Rat::one()), (i - 1, -Rat::one())],
            )
            .unwrap();
            (format!("u{i}"), lf)
        })
        .collect();
    let comp = vec![(
        "y1".to_string(),
        LinearForm::from_pairs(&ctx, &[(0, Rat::one())]).unwrap(),
    )];
    (forms, comp)
}

/// Rewrite a structure constant in u-coordinates.  `NotInSubring` (leftover
/// y_1-dependence) means the input was not a structure constant.
pub fn u_expand(c: &Poly) -> Result<UExpansion> {
    let n = c.nvars() as u32;
    let (forms, comp) = u_basis_forms(n);
    let expanded = expand_in_forms(c, &forms, &comp)?;
    let entries = expanded
        .terms()
        .iter()
        .map(|(m, coeff)| (m.exps(n as usize - 1), coeff.clone()))
        .collect();
    Ok(UExpansion { n, entries })
}

/// Assemble Σ_I c_I · u_I back into y-variables (the inverse of [`u_expand`],
/// used as a round-trip oracle).
pub fn u_assemble(e: &UExpansion) -> Poly {
    let ctx = y_ctx(e.n);
    let (forms, _) = u_basis_forms(e.n);
    let mut out = Poly::zero(&ctx);
    for (exps, coeff) in &e.entries {
        let mut term = Poly::constant(&ctx, coeff.clone());
        for (i0, &p) in exps.iter().enumerate() {
            term = term.mul(&forms[i0].1.as_poly().pow(p));
        }
        out = out.add(&term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;
    use crate::gkm::check_gkm;

    fn ix(n: u32, elems: &[u8]) -> IndexSet {
        IndexSet::new(n, elems.to_vec()).unwrap()
    }

    fn pv(ctx: &Ctx, name: &str) -> Poly {
        Poly::var(ctx, ctx.index_of(name).unwrap())
    }

    #[test]
    fn diagonal_examples() {
        let ctx = y_ctx(4);
        assert_eq!(diagonal_restriction(&ctx, &ix(4, &[3, 4])), Poly::one(&ctx));
        // div = {2,4}: single inversion (2,3)
        assert_eq!(
            diagonal_restriction(&ctx, &ix(4, &[2, 4])),
            pv(&ctx, "y3").sub(&pv(&ctx, "y2"))
        );
        // {1,3}: inversions (1,2),(1,4),(3,4)
        let expect = pv(&ctx, "y2")
            .sub(&pv(&ctx, "y1"))
            .mul(&pv(&ctx, "y4").sub(&pv(&ctx, "y1")))
            .mul(&pv(&ctx, "y4").sub(&pv(&ctx, "y3")));
        assert_eq!(diagonal_restriction(&ctx, &ix(4, &[1, 3])), expect);
    }

    #[test]
    fn divisor_examples() {
        let ctx = y_ctx(4);
        assert!(divisor_restriction(&ctx, &ix(4, &[3, 4])).is_zero());
        assert_eq!(
            divisor_restriction(&ctx, &ix(4, &[2, 4])),
            diagonal_restriction(&ctx, &ix(4, &[2, 4]))
        );
        // mu = {1,2}: y3+y4-y1-y2
        let expect = pv(&ctx, "y3")
            .add(&pv(&ctx, "y4"))
            .sub(&pv(&ctx, "y1"))
            .sub(&pv(&ctx, "y2"));
        assert_eq!(divisor_restriction(&ctx, &ix(4, &[1, 2])), expect);
    }

    fn gr24() -> (Arc<MomentGraph>, OrdinaryBasis) {
        let g = MomentGraph::new(4, 2).unwrap();
        let b = build_ordinary_basis(&g).unwrap();
        (g, b)
    }

    #[test]
    fn divisor_class_matches_closed_form_everywhere() {
        let (g, b) = gr24();
        let ctx = y_ctx(4);
        let di = g.div_index();
        for v in 0..g.vertex_count() {
            assert_eq!(
                b.restriction(di, v),
                &divisor_restriction(&ctx, g.vertex(v)),
                "at {}",
                g.vertex(v)
            );
        }
    }

    #[test]
    fn id_class_is_the_constant_one() {
        let (g, b) = gr24();
        let ctx = y_ctx(4);
        for v in 0..g.vertex_count() {
            assert_eq!(b.restriction(g.id_index(), v), &Poly::one(&ctx));
        }
    }

    #[test]
    fn basis_is_upper_triangular_homogeneous_and_gkm() {
        for (n, d) in [(4, 2), (5, 2), (6, 3)] {
            let g = MomentGraph::new(n, d).unwrap();
            let b = build_ordinary_basis(&g).unwrap();
            for li in 0..g.vertex_count() {
                assert!(check_gkm(b.class(li)).is_empty(), "GKM fails for {}", g.vertex(li));
                for mu in 0..g.vertex_count() {
                    let p = b.restriction(li, mu);
                    if !g.geq(mu, li) {
                        assert!(p.is_zero(), "triangularity at {} {}", g.vertex(li), g.vertex(mu));
                    }
                    if !p.is_zero() {
                        assert_eq!(p.homogeneous_degree(), Some(g.length(li)));
                    }
                }
                assert_eq!(
                    b.restriction(li, li),
                    &diagonal_restriction(&y_ctx(n), g.vertex(li))
                );
            }
        }
    }

    #[test]
    fn pieri_self_consistency() {
        // expanding S~_div * S~_lambda returns y_id - y_lambda at lambda and
        // 1 at each cover, nothing else
        let (g, b) = gr24();
        let ctx = y_ctx(4);
        for li in 0..g.vertex_count() {
            let coeffs = ordinary_constants(&b, g.div_index(), li).unwrap();
            for v in 0..g.vertex_count() {
                let expect = if v == li {
                    divisor_restriction(&ctx, g.vertex(li))
                } else if g.covering(li).contains(&v) {
                    Poly::one(&ctx)
                } else {
                    Poly::zero(&ctx)
                };
                assert_eq!(coeffs[v], expect, "div * {} at {}", g.vertex(li), g.vertex(v));
            }
        }
    }

    #[test]
    fn squared_divisor_neighbor_example() {
        // S~_23 S~_23 = (y4-y2)(y4-y3) S~_23 + (y4-y3) S~_13 + S~_12
        let (g, b) = gr24();
        let ctx = y_ctx(4);
        let i23 = g.vertex_index(&ix(4, &[2, 3])).unwrap();
        let coeffs = ordinary_constants(&b, i23, i23).unwrap();
        let y = |k: &str| pv(&ctx, k);
        for v in 0..g.vertex_count() {
            let expect = match g.vertex(v).key().as_str() {
                "2,3" => y("y4").sub(&y("y2")).mul(&y("y4").sub(&y("y3"))),
                "1,3" => y("y4").sub(&y("y3")),
                "1,2" => Poly::one(&ctx),
                _ => Poly::zero(&ctx),
            };
            assert_eq!(coeffs[v], expect, "at {}", g.vertex(v));
        }
    }

    #[test]
    fn complementary_product_example() {
        // S~_23 S~_14 = (y4-y1) S~_13
        let (g, b) = gr24();
        let ctx = y_ctx(4);
        let i23 = g.vertex_index(&ix(4, &[2, 3])).unwrap();
        let i14 = g.vertex_index(&ix(4, &[1, 4])).unwrap();
        let coeffs = ordinary_constants(&b, i23, i14).unwrap();
        for v in 0..g.vertex_count() {
            let expect = if g.vertex(v).key() == "1,3" {
                pv(&ctx, "y4").sub(&pv(&ctx, "y1"))
            } else {
                Poly::zero(&ctx)
            };
            assert_eq!(coeffs[v], expect, "at {}", g.vertex(v));
        }
    }

    #[test]
    fn identity_constants() {
        let (g, b) = gr24();
        for mu in 0..g.vertex_count() {
            let coeffs = ordinary_constants(&b, g.id_index(), mu).unwrap();
            for v in 0..g.vertex_count() {
                if v == mu {
                    assert_eq!(coeffs[v], Poly::one(&y_ctx(4)));
                } else {
                    assert!(coeffs[v].is_zero());
                }
            }
        }
    }

    #[test]
    fn constants_vanishing_and_degree() {
        let (g, b) = gr24();
        for li in 0..g.vertex_count() {
            for mi in 0..g.vertex_count() {
                let coeffs = ordinary_constants(&b, li, mi).unwrap();
                for v in 0..g.vertex_count() {
                    if !g.geq(v, li) || !g.geq(v, mi) {
                        assert!(coeffs[v].is_zero());
                    }
                    if !coeffs[v].is_zero() {
                        assert_eq!(
                            coeffs[v].homogeneous_degree(),
                            Some(g.length(li) + g.length(mi) - g.length(v))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn constants_commute() {
        let (g, b) = gr24();
        for li in 0..g.vertex_count() {
            for mi in (li + 1)..g.vertex_count() {
                assert_eq!(
                    ordinary_constants(&b, li, mi).unwrap(),
                    ordinary_constants(&b, mi, li).unwrap()
                );
            }
        }
    }

    #[test]
    fn u_expand_examples() {
        let ctx = y_ctx(4);
        let y = |k: &str| pv(&ctx, k);
        // y4-y3 = u3
        let e = u_expand(&y("y4").sub(&y("y3"))).unwrap();
        assert_eq!(e.entries().len(), 1);
        assert_eq!(e.entries()[&vec![0, 0, 1]], rat_int(1));
        assert_eq!(UExpansion::multiset(&[0, 0, 1]), vec![(4, 3)]);
        // (y4-y2)(y4-y3) = (u2+u3)u3 = u2 u3 + u3^2
        let e = u_expand(&y("y4").sub(&y("y2")).mul(&y("y4").sub(&y("y3")))).unwrap();
        assert_eq!(e.entries().len(), 2);
        assert_eq!(e.entries()[&vec![0, 1, 1]], rat_int(1));
        assert_eq!(e.entries()[&vec![0, 0, 2]], rat_int(1));
        // constants: I = empty
        let e = u_expand(&Poly::one(&ctx)).unwrap();
        assert_eq!(e.entries()[&vec![0, 0, 0]], rat_int(1));
        // y1 alone is not in the u-subring
        match u_expand(&y("y1")) {
            Err(Error::NotInSubring) => {}
            other => panic!("expected NotInSubring, got {other:?}"),
        }
    }

    #[test]
    fn u_expand_round_trips_constants() {
        let (g, b) = gr24();
        for li in 0..g.vertex_count() {
            for mi in li..g.vertex_count() {
                for (v, c) in ordinary_constants(&b, li, mi).unwrap().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let e = u_expand(c).unwrap();
                    assert_eq!(&u_assemble(&e), c, "at {}", g.vertex(v));
                    // every multiset has size l(lam)+l(mu)-l(nu)
                    let want = g.length(li) + g.length(mi) - g.length(v);
                    for exps in e.entries().keys() {
                        assert_eq!(exps.iter().sum::<u32>(), want);
                    }
                }
            }
        }
    }

    #[test]
    fn graham_positivity_on_gr24() {
        let (g, b) = gr24();
        for li in 0..g.vertex_count() {
            for mi in li..g.vertex_count() {
                for c in ordinary_constants(&b, li, mi).unwrap() {
                    if !c.is_zero() {
                        assert!(u_expand(&c).unwrap().is_integral_nonneg());
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_on_gr24() {
        let (g, b) = gr24();
        let nv = g.vertex_count();
        // fix a probe triple and check sum_eta c_{lam mu}^eta c_{eta nu}^kappa
        // = sum_eta c_{mu nu}^eta c_{lam eta}^kappa for all kappa
        let tables: Vec<Vec<Vec<Poly>>> = (0..nv)
            .map(|l| (0..nv).map(|m| ordinary_constants(&b, l, m).unwrap()).collect())
            .collect();
        let ctx = y_ctx(4);
        for l in 0..nv {
            for m in 0..nv {
                for n_ in 0..nv {
                    for k in 0..nv {
                        let mut lhs = Poly::zero(&ctx);
                        let mut rhs = Poly::zero(&ctx);
                        for e in 0..nv {
                            lhs = lhs.add(&tables[l][m][e].mul(&tables[e][n_][k]));
                            rhs = rhs.add(&tables[m][n_][e].mul(&tables[l][e][k]));
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
