//! Exact multivariate polynomial arithmetic over arbitrary-precision
//! rationals, in named variable contexts.
//!
//! Design notes.
//!
//! * Coefficients are `BigRational`; weights enter denominators (w_id/w_lambda
//!   and friends compound along Bruhat chains), so fixed-width arithmetic is
//!   unsound and floats are out of the question.
//! * A monomial packs its exponent vector into a single `u128`: the total
//!   degree in the top byte, then one byte per variable with earlier variables
//!   more significant.  Plain integer comparison is then graded-lex, and
//!   monomial products are carry-free `u128` additions.  This caps the arity
//!   at 15 variables and the total degree at 127 — comfortably above anything
//!   a moment graph with n <= 12 produces, and asserted hard.
//! * Terms are kept sorted in descending graded-lex order (leading term
//!   first); that order is also the canonical JSON serialization order.
//! * Division by a linear form goes through an invertible change of variables
//!   sending the form to a fresh variable (the result does not depend on the
//!   pivot chosen).  Division by a general polynomial is single-divisor long
//!   division; one polynomial is trivially a Groebner basis of its principal
//!   ideal, so a zero remainder is equivalent to membership.

use crate::{Error, Result};
use num::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde_json::json;
use std::fmt;
use std::sync::Arc;

pub type Rat = num::BigRational;

/// Shorthand for an integer rational.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

/// Shorthand for num/den (den must be nonzero).
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let (n, d) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: num::BigInt = n
        .trim()
        .parse()
        .map_err(|e| Error::Domain(format!("bad rational {s:?}: {e}")))?;
    let d: num::BigInt = d
        .trim()
        .parse()
        .map_err(|e| Error::Domain(format!("bad rational {s:?}: {e}")))?;
    if d.is_zero() {
        return Err(Error::Domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// An ordered list of distinct variable names, shared behind an `Arc`.
#[derive(Debug, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
}

pub type Ctx = Arc<VarContext>;

impl VarContext {
    pub fn new(names: Vec<String>) -> Result<Ctx> {
        if names.is_empty() {
            return Err(Error::Domain("empty variable context".into()));
        }
        if names.len() > Mono::MAX_VARS {
            return Err(Error::Domain(format!(
                "at most {} variables supported, got {}",
                Mono::MAX_VARS,
                names.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Domain(format!("duplicate variable name {a:?}")));
            }
        }
        Ok(Arc::new(VarContext { names }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Contexts compare by name lists (pointer equality is just a fast path).
pub fn same_ctx(a: &Ctx, b: &Ctx) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// Q[y_1..y_n], the ordinary equivariant coefficient ring.
pub fn y_ctx(n: u32) -> Ctx {
    VarContext::new((1..=n).map(|i| format!("y{i}")).collect()).unwrap()
}

/// Q[Yw_1..Yw_n], coordinates on the weighted torus (Yw_i stands for y^w_i).
pub fn yw_ctx(n: u32) -> Ctx {
    VarContext::new((1..=n).map(|i| format!("Yw{i}")).collect()).unwrap()
}

/// Q[y_1..y_n, z], the affine-cone coefficient ring.
pub fn k_ctx(n: u32) -> Ctx {
    let mut names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    names.push("z".into());
    VarContext::new(names).unwrap()
}

/// Packed exponent vector.  Total degree lives in the top byte, variable i in
/// byte 14-i, so `u128` comparison is graded-lex with earlier variables more
/// significant.  All bytes stay <= 127, which keeps addition carry-free.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono(u128);

impl Mono {
    pub const MAX_VARS: usize = 15;
    pub const MAX_DEG: u32 = 127;
    const HIGH: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;

    pub fn one() -> Mono {
        Mono(0)
    }

    pub fn var(i: usize) -> Mono {
        assert!(i < Self::MAX_VARS);
        Mono((1u128 << (8 * (14 - i))) | (1u128 << 120))
    }

    pub fn from_exps(exps: &[u32]) -> Mono {
        assert!(exps.len() <= Self::MAX_VARS, "too many variables");
        let total: u32 = exps.iter().sum();
        assert!(total <= Self::MAX_DEG, "monomial degree overflow");
        let mut bits = (total as u128) << 120;
        for (i, &e) in exps.iter().enumerate() {
            bits |= (e as u128) << (8 * (14 - i));
        }
        Mono(bits)
    }

    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (8 * (14 - i))) & 0xFF) as u32
    }

    pub fn total_deg(self) -> u32 {
        (self.0 >> 120) as u32
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    pub fn mul(self, other: Mono) -> Mono {
        let r = Mono(self.0 + other.0);
        assert!(r.total_deg() <= Self::MAX_DEG, "monomial degree overflow");
        r
    }

    /// Componentwise difference if `other` divides `self`.
    pub fn try_div(self, other: Mono) -> Option<Mono> {
        // SWAR: with all bytes <= 127, byte i of (self|HIGH)-other keeps its
        // high bit set exactly when self_i >= other_i.
        let d = (self.0 | Self::HIGH).wrapping_sub(other.0);
        if d & Self::HIGH == Self::HIGH {
            Some(Mono(self.0 - other.0))
        } else {
            None
        }
    }
}

/// A polynomial: context plus coefficient terms in descending graded-lex
/// order, zero coefficients never stored.
#[derive(Clone)]
pub struct Poly {
    ctx: Ctx,
    terms: Vec<(Mono, Rat)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ctx: &Ctx) -> Poly {
        Poly { ctx: ctx.clone(), terms: Vec::new() }
    }

    pub fn constant(ctx: &Ctx, c: Rat) -> Poly {
        if c.is_zero() {
            Poly::zero(ctx)
        } else {
            Poly { ctx: ctx.clone(), terms: vec![(Mono::one(), c)] }
        }
    }

    pub fn one(ctx: &Ctx) -> Poly {
        Poly::constant(ctx, Rat::one())
    }

    pub fn var(ctx: &Ctx, i: usize) -> Poly {
        assert!(i < ctx.arity());
        Poly { ctx: ctx.clone(), terms: vec![(Mono::var(i), Rat::one())] }
    }

    pub fn from_terms(ctx: &Ctx, terms: Vec<(Mono, Rat)>) -> Poly {
        Poly::normalize(ctx.clone(), terms)
    }

    fn normalize(ctx: Ctx, mut terms: Vec<(Mono, Rat)>) -> Poly {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !c.is_zero() {
                out.push((m, c));
            }
        }
        Poly { ctx, terms: out }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.ctx.arity()
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.total_deg())
    }

    /// `Some(d)` iff nonzero and every term has total degree d.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.degree()?;
        self.terms.iter().all(|(m, _)| m.total_deg() == d).then_some(d)
    }

    pub fn leading(&self) -> Option<(Mono, &Rat)> {
        self.terms.first().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Mono) -> Rat {
        self.terms
            .iter()
            .find(|(tm, _)| *tm == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(Mono::one())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert!(same_ctx(&self.ctx, &other.ctx), "context mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match mb.cmp(ma) {
                std::cmp::Ordering::Less => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*mb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().cloned());
        Poly { ctx: self.ctx.clone(), terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        if s.is_zero() {
            return Poly::zero(&self.ctx);
        }
        Poly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert!(same_ctx(&self.ctx, &other.ctx), "context mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        // clear denominators first and accumulate over Z: rational adds cost a
        // gcd per partial product, integer adds cost none, and one reduction
        // per *output* term at the end is all the arithmetic actually needs.
        // At desk scale the scaled numerators fit i64 and partial products
        // fit i128, so the common case never touches a heap integer; any
        // overflow falls back to bignum arithmetic.
        if let Some(p) = self.mul_i64(other) {
            return p;
        }
        let da = lcm_denoms(&self.terms);
        let db = lcm_denoms(&other.terms);
        let scale = |terms: &[(Mono, Rat)], d: &num::BigInt| -> Vec<(Mono, num::BigInt)> {
            terms
                .iter()
                .map(|(m, c)| (*m, c.numer() * (d / c.denom())))
                .collect()
        };
        let a = scale(&self.terms, &da);
        let b = scale(&other.terms, &db);
        let den = da * db;
        let mut acc: FxHashMap<Mono, num::BigInt> = FxHashMap::default();
        acc.reserve(a.len() + b.len());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let m = ma.mul(*mb);
                *acc.entry(m).or_insert_with(num::BigInt::zero) += ca * cb;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|(m, n)| (m, Rat::new(n, den.clone())))
            .collect();
        Poly::normalize(self.ctx.clone(), terms)
    }

    fn mul_i64(&self, other: &Poly) -> Option<Poly> {
        fn scaled(terms: &[(Mono, Rat)]) -> Option<(Vec<(Mono, i64)>, u64)> {
            let mut l: u64 = 1;
            for (_, c) in terms {
                let d = c.denom().to_u64()?;
                l = l.checked_mul(d / num::integer::gcd(l, d))?;
            }
            let v = terms
                .iter()
                .map(|(m, c)| {
                    let f = (l / c.denom().to_u64().unwrap()) as i64;
                    c.numer().to_i64()?.checked_mul(f).map(|x| (*m, x))
                })
                .collect::<Option<Vec<_>>>()?;
            Some((v, l))
        }
        let (a, da) = scaled(&self.terms)?;
        let (b, db) = scaled(&other.terms)?;
        let den = num::BigInt::from(da.checked_mul(db)?);
        let mut acc: FxHashMap<Mono, i128> = FxHashMap::default();
        acc.reserve(a.len() + b.len());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let e = acc.entry(ma.mul(*mb)).or_insert(0);
                *e = e.checked_add(*ca as i128 * *cb as i128)?;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, n)| *n != 0)
            .map(|(m, n)| (m, Rat::new(num::BigInt::from(n), den.clone())))
            .collect();
        Some(Poly::normalize(self.ctx.clone(), terms))
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::one(&self.ctx);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn eval(&self, vals: &[Rat]) -> Rat {
        assert_eq!(vals.len(), self.nvars());
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in vals.iter().enumerate() {
                for _ in 0..m.exp(i) {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Same exponent data in a different (same-arity) context; used for the
    /// trivial-weight degeneration where y_i is literally renamed Yw_i.
    pub fn rename_ctx(&self, new_ctx: &Ctx) -> Poly {
        assert_eq!(new_ctx.arity(), self.nvars());
        Poly { ctx: new_ctx.clone(), terms: self.terms.clone() }
    }

    /// Canonical JSON: {"vars": [...], "terms": [{"c": "num/den", "e": [...]}]}
    /// with terms in descending graded-lex order and reduced rationals.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({"c": rat_to_string(c), "e": m.exps(self.nvars())}))
            .collect();
        json!({"vars": self.ctx.names(), "terms": terms})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Poly> {
        let vars = v
            .get("vars")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Domain("polynomial JSON needs \"vars\"".into()))?;
        let names: Option<Vec<String>> =
            vars.iter().map(|x| x.as_str().map(String::from)).collect();
        let ctx = VarContext::new(
            names.ok_or_else(|| Error::Domain("non-string variable name".into()))?,
        )?;
        let terms_json = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Domain("polynomial JSON needs \"terms\"".into()))?;
        let mut terms = Vec::with_capacity(terms_json.len());
        for t in terms_json {
            let c = t
                .get("c")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Domain("term needs string \"c\"".into()))?;
            let e = t
                .get("e")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Domain("term needs array \"e\"".into()))?;
            if e.len() != ctx.arity() {
                return Err(Error::Domain("exponent arity mismatch".into()));
            }
            let exps: Option<Vec<u32>> = e.iter().map(|x| x.as_u64().map(|v| v as u32)).collect();
            let exps = exps.ok_or_else(|| Error::Domain("bad exponent".into()))?;
            terms.push((Mono::from_exps(&exps), rat_from_str(c)?));
        }
        Ok(Poly::normalize(ctx, terms))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let mono = mono_string(*m, &self.ctx);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn mono_string(m: Mono, ctx: &Ctx) -> String {
    let mut parts = Vec::new();
    for (i, name) in ctx.names().iter().enumerate() {
        match m.exp(i) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

/// A homogeneous degree-1 form: one rational coefficient per context variable,
/// zero constant term, at least one coefficient nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    ctx: Ctx,
    coeffs: Vec<Rat>,
}

impl LinearForm {
    pub fn new(ctx: &Ctx, coeffs: Vec<Rat>) -> Result<LinearForm> {
        if coeffs.len() != ctx.arity() {
            return Err(Error::ContextMismatch);
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::Domain("zero linear form".into()));
        }
        Ok(LinearForm { ctx: ctx.clone(), coeffs })
    }

    pub fn from_pairs(ctx: &Ctx, pairs: &[(usize, Rat)]) -> Result<LinearForm> {
        let mut coeffs = vec![Rat::zero(); ctx.arity()];
        for (i, c) in pairs {
            coeffs[*i] += c;
        }
        LinearForm::new(ctx, coeffs)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> Poly {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Mono::var(i), c.clone()))
            .collect();
        Poly::from_terms(&self.ctx, terms)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

/// Ring homomorphism determined by variable images: every variable of `p`
/// maps to a linear form in the target context.
pub fn substitute_linear(p: &Poly, target: &Ctx, images: &[LinearForm]) -> Poly {
    assert_eq!(images.len(), p.nvars(), "every variable of p must be mapped");
    for lf in images {
        assert!(same_ctx(lf.ctx(), target), "image in wrong context");
    }
    let image_polys: Vec<Poly> = images.iter().map(|lf| lf.as_poly()).collect();
    let mut powers: Vec<Vec<Poly>> =
        (0..images.len()).map(|_| vec![Poly::one(target)]).collect();
    let mut acc: FxHashMap<Mono, Rat> = FxHashMap::default();
    for (m, c) in &p.terms {
        let mut t: Option<Poly> = None;
        for (i, tower) in powers.iter_mut().enumerate() {
            let e = m.exp(i) as usize;
            if e == 0 {
                continue;
            }
            while tower.len() <= e {
                let next = tower.last().unwrap().mul(&image_polys[i]);
                tower.push(next);
            }
            t = Some(match t {
                None => tower[e].clone(),
                Some(q) => q.mul(&tower[e]),
            });
        }
        match t {
            None => *acc.entry(Mono::one()).or_insert_with(Rat::zero) += c,
            Some(q) => {
                for (qm, qc) in &q.terms {
                    *acc.entry(*qm).or_insert_with(Rat::zero) += qc * c;
                }
            }
        }
    }
    Poly::normalize(target.clone(), acc.into_iter().collect())
}

fn lcm_denoms(terms: &[(Mono, Rat)]) -> num::BigInt {
    let mut l = num::BigInt::one();
    for (_, c) in terms {
        l = num::integer::lcm(l, c.denom().clone());
    }
    l
}

/// Divide by a product of linear forms, one factor at a time.  Soundness is
/// inherited from [`exact_divide`]: p is divisible by f·g iff it is divisible
/// by f and the quotient by g.
pub fn exact_divide_all(p: &Poly, forms: &[LinearForm]) -> Option<Poly> {
    let mut q = p.clone();
    for f in forms {
        q = exact_divide(&q, f)?;
    }
    Some(q)
}

/// Exact division by a linear form; `None` means not divisible (a value, not
/// an error — it is precisely how the GKM condition fails).
pub fn exact_divide(p: &Poly, lf: &LinearForm) -> Option<Poly> {
    let pivot = lf
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("linear forms are nonzero by construction");
    exact_divide_with_pivot(p, lf, pivot)
}

/// Synthetic division in the pivot variable.  Writing x = x_pivot and
/// lf = c·(x − α) with α a form in the remaining variables, bucket
/// p = Σ_j p_j x^j and run q_{j−1} = p_j + α·q_j downward from the top;
/// p is divisible iff the remainder p_0 + α·q_0 vanishes, and the quotient
/// is Σ_j (q_j/c) x^j.  The result is independent of the pivot (tested).
pub fn exact_divide_with_pivot(p: &Poly, lf: &LinearForm, pivot: usize) -> Option<Poly> {
    assert!(same_ctx(p.ctx(), lf.ctx()), "context mismatch");
    let ck = &lf.coeffs()[pivot];
    assert!(!ck.is_zero(), "pivot coefficient must be nonzero");
    if p.is_zero() {
        return Some(Poly::zero(p.ctx()));
    }
    let alpha = Poly::normalize(
        p.ctx.clone(),
        lf.coeffs()
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != pivot && !c.is_zero())
            .map(|(i, c)| (Mono::var(i), -(c / ck)))
            .collect(),
    );
    let dmax = p.terms.iter().map(|(m, _)| m.exp(pivot)).max().unwrap() as usize;
    let mut buckets: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); dmax + 1];
    let v = Mono::var(pivot);
    for (m, c) in &p.terms {
        let j = m.exp(pivot) as usize;
        let mut stripped = *m;
        for _ in 0..j {
            stripped = stripped.try_div(v).unwrap();
        }
        buckets[j].push((stripped, c.clone()));
    }
    let p_j: Vec<Poly> =
        buckets.into_iter().map(|t| Poly::normalize(p.ctx.clone(), t)).collect();
    let mut q_j = vec![Poly::zero(p.ctx()); dmax];
    let mut carry = Poly::zero(p.ctx());
    for j in (1..=dmax).rev() {
        let q = p_j[j].add(&carry);
        carry = q.mul(&alpha);
        q_j[j - 1] = q;
    }
    if !p_j[0].add(&carry).is_zero() {
        return None;
    }
    let inv = Rat::one() / ck;
    let mut out = Vec::new();
    let mut xpow = Mono::one();
    for q in q_j {
        for (m, c) in &q.terms {
            out.push((m.mul(xpow), c * &inv));
        }
        xpow = xpow.mul(v);
    }
    Some(Poly::normalize(p.ctx.clone(), out))
}

/// Exact division by an arbitrary nonzero polynomial (used for the diagonal
/// products in Schubert-basis expansion); `None` iff not exactly divisible.
pub fn div_exact(p: &Poly, d: &Poly) -> Option<Poly> {
    assert!(same_ctx(p.ctx(), d.ctx()), "context mismatch");
    assert!(!d.is_zero(), "division by zero polynomial");
    if p.is_zero() {
        return Some(Poly::zero(p.ctx()));
    }
    let (dm, dc) = {
        let (m, c) = d.leading().unwrap();
        (m, c.clone())
    };
    let mut q_terms: Vec<(Mono, Rat)> = Vec::new();
    let mut r = p.clone();
    while let Some((rm, rc)) = r.leading().map(|(m, c)| (m, c.clone())) {
        // once a leading term is not divisible, nothing smaller can cancel it
        let m = rm.try_div(dm)?;
        let c = &rc / &dc;
        let t = Poly { ctx: p.ctx.clone(), terms: vec![(m, c.clone())] };
        r = r.sub(&t.mul(d));
        q_terms.push((m, c));
    }
    Some(Poly::normalize(p.ctx.clone(), q_terms))
}

/// Rewrite `p` in the coordinates given by a full linear basis of degree-1
/// forms (name, form).  Errors with `SingularBasis` if the forms do not span.
pub fn rewrite_in_basis(p: &Poly, basis: &[(String, LinearForm)]) -> Result<Poly> {
    let n = p.nvars();
    if basis.len() != n {
        return Err(Error::SingularBasis);
    }
    for (_, lf) in basis {
        if !same_ctx(lf.ctx(), p.ctx()) {
            return Err(Error::ContextMismatch);
        }
    }
    let rows: Vec<Vec<Rat>> = basis.iter().map(|(_, lf)| lf.coeffs().to_vec()).collect();
    let inv = invert_matrix(&rows).ok_or(Error::SingularBasis)?;
    let new_ctx = VarContext::new(basis.iter().map(|(s, _)| s.clone()).collect())?;
    // v = M x  =>  x_i = sum_r inv[i][r] v_r
    let images: Vec<LinearForm> = (0..n)
        .map(|i| {
            LinearForm::new(&new_ctx, inv[i].clone())
                .expect("rows of an inverse matrix are nonzero")
        })
        .collect();
    Ok(substitute_linear(p, &new_ctx, &images))
}

/// Rewrite `p` in `forms ∪ complement` coordinates and project onto the
/// `forms` subring; `NotInSubring` if any complement coordinate survives.
pub fn expand_in_forms(
    p: &Poly,
    forms: &[(String, LinearForm)],
    complement: &[(String, LinearForm)],
) -> Result<Poly> {
    let mut basis: Vec<(String, LinearForm)> = forms.to_vec();
    basis.extend(complement.iter().cloned());
    let full = rewrite_in_basis(p, &basis)?;
    let k = forms.len();
    for (m, _) in full.terms() {
        for j in k..basis.len() {
            if m.exp(j) > 0 {
                return Err(Error::NotInSubring);
            }
        }
    }
    let sub_ctx = VarContext::new(forms.iter().map(|(s, _)| s.clone()).collect())?;
    let terms = full
        .terms()
        .iter()
        .map(|(m, c)| {
            let exps: Vec<u32> = (0..k).map(|j| m.exp(j)).collect();
            (Mono::from_exps(&exps), c.clone())
        })
        .collect();
    Ok(Poly::normalize(sub_ctx, terms))
}

fn invert_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for row in m {
        if row.len() != n {
            return None;
        }
        a.push(row.clone());
    }
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pval = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &pval;
            inv[col][j] = &inv[col][j] / &pval;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let s = &f * &a[col][j];
                    a[r][j] = &a[r][j] - &s;
                    let s = &f * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &s;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_var(ctx: &Ctx, name: &str) -> Poly {
        Poly::var(ctx, ctx.index_of(name).unwrap())
    }

    #[test]
    fn difference_of_squares() {
        let ctx = y_ctx(2);
        let (y1, y2) = (p_var(&ctx, "y1"), p_var(&ctx, "y2"));
        let prod = y1.add(&y2).mul(&y1.sub(&y2));
        let expect = y1.mul(&y1).sub(&y2.mul(&y2));
        assert_eq!(prod, expect);
    }

    #[test]
    fn additive_identity_and_scaling() {
        let ctx = y_ctx(2);
        let p = p_var(&ctx, "y1").add(&Poly::constant(&ctx, rat(3, 2)));
        assert_eq!(p.add(&Poly::zero(&ctx)), p);
        let two_y1 = p_var(&ctx, "y1").scale(&rat_int(2));
        assert_eq!(two_y1.scale(&rat(1, 2)), p_var(&ctx, "y1"));
    }

    #[test]
    fn terms_sorted_graded_lex_descending() {
        let ctx = y_ctx(2);
        let (y1, y2) = (p_var(&ctx, "y1"), p_var(&ctx, "y2"));
        // y2^2 + y1 + 1: degree 2 first, then degree 1, then constant
        let p = y2.pow(2).add(&y1).add(&Poly::one(&ctx));
        let degs: Vec<u32> = p.terms().iter().map(|(m, _)| m.total_deg()).collect();
        assert_eq!(degs, vec![2, 1, 0]);
        // same degree: y1*y2 > y2^2 (earlier variable more significant)
        let q = y2.pow(2).add(&y1.mul(&y2));
        assert_eq!(q.terms()[0].0, Mono::from_exps(&[1, 1]));
    }

    #[test]
    fn mono_try_div() {
        let a = Mono::from_exps(&[2, 1, 0]);
        let b = Mono::from_exps(&[1, 1, 0]);
        assert_eq!(a.try_div(b), Some(Mono::from_exps(&[1, 0, 0])));
        assert_eq!(b.try_div(a), None);
        let c = Mono::from_exps(&[0, 0, 1]);
        assert_eq!(a.try_div(c), None);
    }

    #[test]
    fn exact_divide_factored_case() {
        let ctx = y_ctx(2);
        let (y1, y2) = (p_var(&ctx, "y1"), p_var(&ctx, "y2"));
        let p = y1.mul(&y1).sub(&y2.mul(&y2));
        let lf = LinearForm::from_pairs(&ctx, &[(0, rat_int(1)), (1, rat_int(-1))]).unwrap();
        assert_eq!(exact_divide(&p, &lf).unwrap(), y1.add(&y2));
    }

    #[test]
    fn exact_divide_rejects_non_multiple() {
        let ctx = y_ctx(2);
        let p = p_var(&ctx, "y1").add(&p_var(&ctx, "y2"));
        let lf = LinearForm::from_pairs(&ctx, &[(0, rat_int(1)), (1, rat_int(-1))]).unwrap();
        assert!(exact_divide(&p, &lf).is_none());
    }

    #[test]
    fn exact_divide_zero() {
        let ctx = y_ctx(3);
        let lf = LinearForm::from_pairs(&ctx, &[(2, rat(5, 3))]).unwrap();
        assert_eq!(exact_divide(&Poly::zero(&ctx), &lf).unwrap(), Poly::zero(&ctx));
    }

    #[test]
    fn exact_divide_pivot_independent() {
        let ctx = y_ctx(3);
        let lf = LinearForm::new(
            &ctx,
            vec![rat_int(2), rat(-1, 3), rat_int(5)],
        )
        .unwrap();
        let q = p_var(&ctx, "y1")
            .mul(&p_var(&ctx, "y3"))
            .add(&p_var(&ctx, "y2").pow(2))
            .add(&Poly::constant(&ctx, rat(7, 2)));
        let p = q.mul(&lf.as_poly());
        for pivot in 0..3 {
            assert_eq!(exact_divide_with_pivot(&p, &lf, pivot).unwrap(), q);
        }
    }

    #[test]
    fn div_exact_by_product_of_forms() {
        let ctx = y_ctx(3);
        let (y1, y2, y3) = (p_var(&ctx, "y1"), p_var(&ctx, "y2"), p_var(&ctx, "y3"));
        let d = y2.sub(&y1).mul(&y3.sub(&y1));
        let q = y3.pow(2).add(&y1.mul(&y2)).add(&Poly::constant(&ctx, rat_int(4)));
        assert_eq!(div_exact(&q.mul(&d), &d).unwrap(), q);
        assert!(div_exact(&q.mul(&d).add(&y1), &d).is_none());
    }

    #[test]
    fn substitution_single_variable() {
        let src = VarContext::new(vec!["y1".into()]).unwrap();
        let tgt = VarContext::new(vec!["Yw1".into(), "zp".into()]).unwrap();
        let img = LinearForm::from_pairs(&tgt, &[(0, rat_int(1)), (1, rat(2, 5))]).unwrap();
        let got = substitute_linear(&Poly::var(&src, 0), &tgt, &[img.clone()]);
        assert_eq!(got, img.as_poly());
    }

    #[test]
    fn substitution_identity_map() {
        let ctx = y_ctx(3);
        let ids: Vec<LinearForm> = (0..3)
            .map(|i| LinearForm::from_pairs(&ctx, &[(i, rat_int(1))]).unwrap())
            .collect();
        let p = p_var(&ctx, "y1")
            .mul(&p_var(&ctx, "y2"))
            .add(&p_var(&ctx, "y3").pow(3))
            .scale(&rat(-2, 7));
        assert_eq!(substitute_linear(&p, &ctx, &ids), p);
    }

    #[test]
    fn substitution_is_multiplicative() {
        let ctx = y_ctx(2);
        let tgt = y_ctx(3);
        let imgs = vec![
            LinearForm::new(&tgt, vec![rat_int(1), rat_int(1), rat_int(0)]).unwrap(),
            LinearForm::new(&tgt, vec![rat_int(0), rat(1, 2), rat_int(-3)]).unwrap(),
        ];
        let p = p_var(&ctx, "y1").pow(2).add(&p_var(&ctx, "y2"));
        let q = p_var(&ctx, "y1").sub(&p_var(&ctx, "y2").pow(2));
        let lhs = substitute_linear(&p.mul(&q), &tgt, &imgs);
        let rhs = substitute_linear(&p, &tgt, &imgs).mul(&substitute_linear(&q, &tgt, &imgs));
        assert_eq!(lhs, rhs);
    }

    fn u_basis(n: u32) -> (Vec<(String, LinearForm)>, Vec<(String, LinearForm)>) {
        // u_i = y_{i+1} - y_i, complement y_1
        let ctx = y_ctx(n);
        let forms = (1..n)
            .map(|i| {
                let lf = LinearForm::from_pairs(
                    &ctx,
                    &[(i as usize, rat_int(1)), (i as usize - 1, rat_int(-1))],
                )
                .unwrap();
                (format!("u{i}"), lf)
            })
            .collect();
        let comp = vec![(
            "y1".to_string(),
            LinearForm::from_pairs(&ctx, &[(0, rat_int(1))]).unwrap(),
        )];
        (forms, comp)
    }

    #[test]
    fn expand_the_form_itself() {
        let ctx = y_ctx(2);
        let (forms, comp) = u_basis(2);
        let p = p_var(&ctx, "y2").sub(&p_var(&ctx, "y1"));
        let got = expand_in_forms(&p, &forms, &comp).unwrap();
        assert_eq!(got.ctx().names(), ["u1"]);
        assert_eq!(got.terms().len(), 1);
        assert_eq!(got.terms()[0], (Mono::var(0), rat_int(1)));
    }

    #[test]
    fn expand_detects_complement_dependence() {
        let (forms, comp) = u_basis(2);
        let ctx = y_ctx(2);
        match expand_in_forms(&p_var(&ctx, "y1"), &forms, &comp) {
            Err(Error::NotInSubring) => {}
            other => panic!("expected NotInSubring, got {other:?}"),
        }
    }

    #[test]
    fn expand_product_in_u_coordinates() {
        // (y4-y2)(y4-y3) = (u2+u3)u3 = u2*u3 + u3^2
        let ctx = y_ctx(4);
        let (forms, comp) = u_basis(4);
        let p = p_var(&ctx, "y4")
            .sub(&p_var(&ctx, "y2"))
            .mul(&p_var(&ctx, "y4").sub(&p_var(&ctx, "y3")));
        let got = expand_in_forms(&p, &forms, &comp).unwrap();
        let uctx = got.ctx().clone();
        let (u2, u3) = (Poly::var(&uctx, 1), Poly::var(&uctx, 2));
        assert_eq!(got, u2.mul(&u3).add(&u3.pow(2)));
    }

    #[test]
    fn rewrite_roundtrip() {
        let ctx = y_ctx(3);
        let (forms, comp) = u_basis(3);
        let mut basis = forms.clone();
        basis.extend(comp);
        let p = p_var(&ctx, "y1")
            .mul(&p_var(&ctx, "y3"))
            .add(&p_var(&ctx, "y2").pow(2).scale(&rat(5, 3)));
        let rewritten = rewrite_in_basis(&p, &basis).unwrap();
        // substitute the definitions back in
        let images: Vec<LinearForm> = basis.iter().map(|(_, lf)| lf.clone()).collect();
        assert_eq!(substitute_linear(&rewritten, &ctx, &images), p);
    }

    #[test]
    fn singular_basis_rejected() {
        let ctx = y_ctx(2);
        let lf = LinearForm::from_pairs(&ctx, &[(0, rat_int(1)), (1, rat_int(1))]).unwrap();
        let basis = vec![("a".to_string(), lf.clone()), ("b".to_string(), lf)];
        match rewrite_in_basis(&Poly::one(&ctx), &basis) {
            Err(Error::SingularBasis) => {}
            other => panic!("expected SingularBasis, got {other:?}"),
        }
    }

    #[test]
    fn json_roundtrip_and_shape() {
        let ctx = y_ctx(2);
        let p = p_var(&ctx, "y1")
            .pow(2)
            .sub(&p_var(&ctx, "y2").scale(&rat(3, 2)))
            .add(&Poly::one(&ctx));
        let j = p.to_json();
        assert_eq!(j["vars"], serde_json::json!(["y1", "y2"]));
        assert_eq!(j["terms"][0]["e"], serde_json::json!([2, 0]));
        assert_eq!(j["terms"][1]["c"], serde_json::json!("-3/2"));
        assert_eq!(j["terms"][2]["c"], serde_json::json!("1/1"));
        assert_eq!(Poly::from_json(&j).unwrap(), p);
    }

    #[test]
    fn display_readable() {
        let ctx = y_ctx(2);
        let p = p_var(&ctx, "y1")
            .pow(2)
            .sub(&p_var(&ctx, "y1").mul(&p_var(&ctx, "y2")).scale(&rat(1, 2)))
            .sub(&Poly::one(&ctx));
        assert_eq!(p.to_string(), "y1^2 - 1/2*y1*y2 - 1");
        assert_eq!(Poly::zero(&ctx).to_string(), "0");
    }

    #[test]
    fn eval_matches_hand_value() {
        let ctx = y_ctx(2);
        let p = p_var(&ctx, "y1").pow(2).add(&p_var(&ctx, "y2").scale(&rat(1, 3)));
        // at y1=2, y2=3: 4 + 1 = 5
        assert_eq!(p.eval(&[rat_int(2), rat_int(3)]), rat_int(5));
    }

    #[test]
    fn context_validation() {
        assert!(VarContext::new(vec![]).is_err());
        assert!(VarContext::new(vec!["a".into(), "a".into()]).is_err());
        assert!(VarContext::new((0..16).map(|i| format!("v{i}")).collect()).is_err());
    }
}
