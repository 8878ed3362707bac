//! Raw syntax: types, terms, contexts and substitutions.
//!
//! Variables are positional: equality, ordering and hashing ignore the
//! surface identifier, which is kept only for printing. Two contexts are
//! equal exactly when they agree entry by entry up to renaming.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{CheckError, Result};
use crate::limits::{UconeSite, UniSite};

/// A context variable: surface name plus declaration position.
#[derive(Clone, Debug)]
pub struct VarName {
    pub ident: Arc<str>,
    pub pos: usize,
}

impl VarName {
    pub fn new(ident: impl Into<Arc<str>>, pos: usize) -> Self {
        VarName { ident: ident.into(), pos }
    }
}

impl PartialEq for VarName {
    fn eq(&self, other: &Self) -> bool {
        self.pos == other.pos
    }
}
impl Eq for VarName {}
impl PartialOrd for VarName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VarName {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.pos.cmp(&other.pos)
    }
}
impl Hash for VarName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.pos.hash(state);
    }
}

impl std::fmt::Display for VarName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.ident)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Obj,
    Arr(Box<Arrow>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub base: Ty,
    pub src: Tm,
    pub tgt: Tm,
}

impl Ty {
    pub fn arrow(base: Ty, src: Tm, tgt: Tm) -> Ty {
        Ty::Arr(Box::new(Arrow { base, src, tgt }))
    }

    pub fn as_arrow(&self) -> Option<&Arrow> {
        match self {
            Ty::Obj => None,
            Ty::Arr(a) => Some(a),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Ty::Obj => 0,
            Ty::Arr(a) => a.base.dim() + 1,
        }
    }

    /// The m-fold base of an arrow tower.
    pub fn base_at(&self, m: usize) -> Result<&Ty> {
        let mut cur = self;
        for _ in 0..m {
            cur = match cur {
                Ty::Arr(a) => &a.base,
                Ty::Obj => {
                    return Err(CheckError::DimensionZero { what: "type".into() });
                }
            };
        }
        Ok(cur)
    }
}

/// An operation or coherence head: the pasting context it is introduced
/// over, together with its boundary type there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schema {
    pub ps: Ctx,
    pub ty: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tm {
    Var(VarName),
    /// Operation applied to a substitution into its pasting context.
    Op(Arc<Schema>, Sub),
    /// Coherence applied to a substitution into its pasting context.
    Coh(Arc<Schema>, Sub),
    /// Universal-cone cell: the site, the cone variable it realizes, and a
    /// substitution into the site's diagram.
    UCone(Arc<UconeSite>, VarName, Sub),
    /// Universal-property cell: the site, the whisk-source variable it
    /// realizes, and a substitution into the site's tracked source context.
    Uni(Arc<UniSite>, VarName, Sub),
    Inv(Box<Tm>),
    Eta(Box<Tm>),
    Eps(Box<Tm>),
}

impl Tm {
    pub fn var(v: &VarName) -> Tm {
        Tm::Var(v.clone())
    }

    pub fn as_var(&self) -> Option<&VarName> {
        match self {
            Tm::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Ctx {
    entries: Vec<(VarName, Ty)>,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn from_entries(entries: Vec<(VarName, Ty)>) -> Ctx {
        Ctx { entries }
    }

    /// Append an entry, assigning the next position.
    pub fn push(&mut self, ident: impl Into<Arc<str>>, ty: Ty) -> VarName {
        let v = VarName::new(ident, self.entries.len());
        self.entries.push((v.clone(), ty));
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VarName, Ty)> {
        self.entries.iter()
    }

    pub fn var(&self, pos: usize) -> Result<&VarName> {
        self.entries
            .get(pos)
            .map(|(v, _)| v)
            .ok_or(CheckError::UnboundVariable { pos, len: self.entries.len() })
    }

    pub fn ty(&self, pos: usize) -> Result<&Ty> {
        self.entries
            .get(pos)
            .map(|(_, t)| t)
            .ok_or(CheckError::UnboundVariable { pos, len: self.entries.len() })
    }

    pub fn entry(&self, pos: usize) -> Result<&(VarName, Ty)> {
        self.entries
            .get(pos)
            .ok_or(CheckError::UnboundVariable { pos, len: self.entries.len() })
    }

    pub fn prefix(&self, n: usize) -> Ctx {
        Ctx { entries: self.entries[..n].to_vec() }
    }

    /// The maximal entry dimension; 0 for the empty context.
    pub fn dim(&self) -> usize {
        self.entries.iter().map(|(_, t)| t.dim()).max().unwrap_or(0)
    }

    pub fn lookup_ident(&self, ident: &str) -> Option<usize> {
        self.entries.iter().position(|(v, _)| &*v.ident == ident)
    }

    pub fn contains_ident(&self, ident: &str) -> bool {
        self.lookup_ident(ident).is_some()
    }

    /// `base`, `base'`, `base''`, ... until unused.
    pub fn fresh_ident(&self, base: &str) -> String {
        let mut candidate = base.to_string();
        while self.contains_ident(&candidate) {
            candidate.push('\'');
        }
        candidate
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        self.entries.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn identity_sub(&self) -> Sub {
        Sub {
            terms: self.entries.iter().map(|(v, _)| Tm::Var(v.clone())).collect(),
            target: self.clone(),
        }
    }

    /// Keep exactly the entries at `keep` (ascending old positions),
    /// remapping variable references inside the kept types.
    pub fn restrict(&self, keep: &[usize]) -> Result<Ctx> {
        let mut map = vec![None; self.entries.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let remap = |v: &VarName| -> Result<VarName> {
            match map.get(v.pos).copied().flatten() {
                Some(new) => Ok(VarName { ident: v.ident.clone(), pos: new }),
                None => Err(CheckError::Internal(format!(
                    "restriction drops `{}` which is still referenced",
                    v.ident
                ))),
            }
        };
        let mut out = Vec::with_capacity(keep.len());
        for &old in keep {
            let (v, t) = &self.entries[old];
            out.push((remap(v)?, remap_ty(t, &remap)?));
        }
        Ok(Ctx { entries: out })
    }

    /// Rename every entry to `v0`, `v1`, ... keeping the structure.
    pub fn canonical_renamed(&self) -> Ctx {
        let remap = |v: &VarName| -> Result<VarName> {
            Ok(VarName::new(format!("v{}", v.pos), v.pos))
        };
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, (_, t))| {
                (VarName::new(format!("v{i}"), i), remap_ty(t, &remap).expect("total remap"))
            })
            .collect();
        Ctx { entries }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sub {
    pub terms: Vec<Tm>,
    pub target: Ctx,
}

impl Sub {
    pub fn new(terms: Vec<Tm>, target: Ctx) -> Sub {
        Sub { terms, target }
    }

    pub fn identity(ctx: &Ctx) -> Sub {
        ctx.identity_sub()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.len() == self.target.len()
            && self
                .terms
                .iter()
                .enumerate()
                .all(|(i, t)| matches!(t, Tm::Var(v) if v.pos == i))
    }

    pub fn get(&self, pos: usize) -> Result<&Tm> {
        self.terms
            .get(pos)
            .ok_or(CheckError::UnboundVariable { pos, len: self.terms.len() })
    }

    /// `self ∘ inner`: apply `inner` to every term of `self`.
    pub fn compose(&self, inner: &Sub) -> Result<Sub> {
        let terms = self
            .terms
            .iter()
            .map(|t| subst_tm(t, inner))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sub { terms, target: self.target.clone() })
    }

    /// The first `n` entries, targeting the corresponding context prefix.
    pub fn prefix(&self, n: usize) -> Sub {
        Sub {
            terms: self.terms[..n].to_vec(),
            target: self.target.prefix(n),
        }
    }
}

// ---------------------------------------------------------------------------
// free variables

pub fn fv_ty(ty: &Ty) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    collect_fv_ty(ty, &mut out);
    out
}

pub fn fv_tm(tm: &Tm) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    collect_fv_tm(tm, &mut out);
    out
}

pub fn fv_sub(sub: &Sub) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    for t in &sub.terms {
        collect_fv_tm(t, &mut out);
    }
    out
}

/// `FV(t : A) = FV(t) ∪ FV(A)`.
pub fn fv_tm_ty(tm: &Tm, ty: &Ty) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    collect_fv_tm(tm, &mut out);
    collect_fv_ty(ty, &mut out);
    out
}

fn collect_fv_ty(ty: &Ty, out: &mut BTreeSet<VarName>) {
    match ty {
        Ty::Obj => {}
        Ty::Arr(a) => {
            collect_fv_ty(&a.base, out);
            collect_fv_tm(&a.src, out);
            collect_fv_tm(&a.tgt, out);
        }
    }
}

fn collect_fv_tm(tm: &Tm, out: &mut BTreeSet<VarName>) {
    match tm {
        Tm::Var(v) => {
            out.insert(v.clone());
        }
        Tm::Op(_, sub) | Tm::Coh(_, sub) | Tm::UCone(_, _, sub) | Tm::Uni(_, _, sub) => {
            for t in &sub.terms {
                collect_fv_tm(t, out);
            }
        }
        Tm::Inv(u) | Tm::Eta(u) | Tm::Eps(u) => collect_fv_tm(u, out),
    }
}

// ---------------------------------------------------------------------------
// substitution

pub fn subst_ty(ty: &Ty, sub: &Sub) -> Result<Ty> {
    match ty {
        Ty::Obj => Ok(Ty::Obj),
        Ty::Arr(a) => Ok(Ty::arrow(
            subst_ty(&a.base, sub)?,
            subst_tm(&a.src, sub)?,
            subst_tm(&a.tgt, sub)?,
        )),
    }
}

pub fn subst_tm(tm: &Tm, sub: &Sub) -> Result<Tm> {
    match tm {
        Tm::Var(v) => sub.get(v.pos).cloned(),
        Tm::Op(sch, inner) => Ok(Tm::Op(sch.clone(), inner.compose(sub)?)),
        Tm::Coh(sch, inner) => Ok(Tm::Coh(sch.clone(), inner.compose(sub)?)),
        Tm::UCone(site, x, inner) => Ok(Tm::UCone(site.clone(), x.clone(), inner.compose(sub)?)),
        Tm::Uni(site, x, inner) => Ok(Tm::Uni(site.clone(), x.clone(), inner.compose(sub)?)),
        Tm::Inv(u) => Ok(Tm::Inv(Box::new(subst_tm(u, sub)?))),
        Tm::Eta(u) => Ok(Tm::Eta(Box::new(subst_tm(u, sub)?))),
        Tm::Eps(u) => Ok(Tm::Eps(Box::new(subst_tm(u, sub)?))),
    }
}

// ---------------------------------------------------------------------------
// positional remapping (boundaries, transports, renamings)

pub fn remap_ty(ty: &Ty, f: &impl Fn(&VarName) -> Result<VarName>) -> Result<Ty> {
    match ty {
        Ty::Obj => Ok(Ty::Obj),
        Ty::Arr(a) => Ok(Ty::arrow(
            remap_ty(&a.base, f)?,
            remap_tm(&a.src, f)?,
            remap_tm(&a.tgt, f)?,
        )),
    }
}

pub fn remap_tm(tm: &Tm, f: &impl Fn(&VarName) -> Result<VarName>) -> Result<Tm> {
    match tm {
        Tm::Var(v) => Ok(Tm::Var(f(v)?)),
        Tm::Op(sch, sub) => Ok(Tm::Op(sch.clone(), remap_sub(sub, f)?)),
        Tm::Coh(sch, sub) => Ok(Tm::Coh(sch.clone(), remap_sub(sub, f)?)),
        Tm::UCone(site, x, sub) => Ok(Tm::UCone(site.clone(), x.clone(), remap_sub(sub, f)?)),
        Tm::Uni(site, x, sub) => Ok(Tm::Uni(site.clone(), x.clone(), remap_sub(sub, f)?)),
        Tm::Inv(u) => Ok(Tm::Inv(Box::new(remap_tm(u, f)?))),
        Tm::Eta(u) => Ok(Tm::Eta(Box::new(remap_tm(u, f)?))),
        Tm::Eps(u) => Ok(Tm::Eps(Box::new(remap_tm(u, f)?))),
    }
}

fn remap_sub(sub: &Sub, f: &impl Fn(&VarName) -> Result<VarName>) -> Result<Sub> {
    let terms = sub
        .terms
        .iter()
        .map(|t| remap_tm(t, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sub { terms, target: sub.target.clone() })
}

/// Rename the variables of a term to the identifiers of `ctx` (positions
/// must already be valid there).
pub fn rename_to_ctx(tm: &Tm, ctx: &Ctx) -> Result<Tm> {
    remap_tm(tm, &|v| Ok(ctx.var(v.pos)?.clone()))
}

// ---------------------------------------------------------------------------
// dimension, typing, boundaries

pub fn dim_tm(tm: &Tm, ctx: &Ctx) -> Result<usize> {
    match tm {
        Tm::Var(v) => Ok(ctx.ty(v.pos)?.dim()),
        Tm::Op(sch, _) | Tm::Coh(sch, _) => Ok(sch.ty.dim()),
        Tm::UCone(site, x, _) => Ok(site.cone.kctx.ty(x.pos)?.dim()),
        Tm::Uni(site, x, _) => Ok(site.whisk.source.ty(x.pos)?.dim()),
        Tm::Inv(u) => dim_tm(u, ctx),
        Tm::Eta(u) | Tm::Eps(u) => Ok(dim_tm(u, ctx)? + 1),
    }
}

/// The type of a term, read off the structure it carries. Does not
/// re-verify side conditions; the kernel does that.
pub fn ty_of(tm: &Tm, ctx: &Ctx) -> Result<Ty> {
    match tm {
        Tm::Var(v) => ctx.ty(v.pos).cloned(),
        Tm::Op(sch, sub) | Tm::Coh(sch, sub) => subst_ty(&sch.ty, sub),
        Tm::UCone(site, x, sub) => {
            let kappa = crate::limits::kappa_prefix(site, x.pos)?;
            let x_ty = site.cone.kctx.ty(x.pos)?;
            subst_ty(&subst_ty(x_ty, &kappa)?, sub)
        }
        Tm::Uni(site, x, sub) => {
            let theta = crate::limits::theta_prefix(site, x.pos)?;
            let x_ty = site.whisk.source.ty(x.pos)?;
            subst_ty(&subst_ty(x_ty, &theta)?, sub)
        }
        Tm::Inv(u) => {
            let uty = ty_of(u, ctx)?;
            let a = uty.as_arrow().ok_or_else(|| CheckError::NotAnArrow {
                found: crate::print::ty(&uty),
            })?;
            Ok(Ty::arrow(a.base.clone(), a.tgt.clone(), a.src.clone()))
        }
        Tm::Eta(u) => {
            let (lhs, rhs, endpoint_ty) = eta_endpoints(u, ctx)?;
            Ok(Ty::arrow(endpoint_ty, lhs, rhs))
        }
        Tm::Eps(u) => {
            let (lhs, rhs, endpoint_ty) = eps_endpoints(u, ctx)?;
            Ok(Ty::arrow(endpoint_ty, lhs, rhs))
        }
    }
}

/// `eta(u) : 1_s -> u * inv(u)` for `u : s -> t`.
pub fn eta_endpoints(u: &Tm, ctx: &Ctx) -> Result<(Tm, Tm, Ty)> {
    let uty = ty_of(u, ctx)?;
    let a = uty
        .as_arrow()
        .ok_or_else(|| CheckError::NotAnArrow { found: crate::print::ty(&uty) })?;
    let d = uty.dim();
    let unit = crate::catalog::iterated_identity(a.src.clone(), 1, ctx)?;
    let round = crate::catalog::comp_term(u.clone(), Tm::Inv(Box::new(u.clone())), d, d - 1, ctx)?;
    let endpoint_ty = Ty::arrow(a.base.clone(), a.src.clone(), a.src.clone());
    Ok((unit, round, endpoint_ty))
}

/// `eps(u) : inv(u) * u -> 1_t` for `u : s -> t`.
pub fn eps_endpoints(u: &Tm, ctx: &Ctx) -> Result<(Tm, Tm, Ty)> {
    let uty = ty_of(u, ctx)?;
    let a = uty
        .as_arrow()
        .ok_or_else(|| CheckError::NotAnArrow { found: crate::print::ty(&uty) })?;
    let d = uty.dim();
    let round = crate::catalog::comp_term(Tm::Inv(Box::new(u.clone())), u.clone(), d, d - 1, ctx)?;
    let unit = crate::catalog::iterated_identity(a.tgt.clone(), 1, ctx)?;
    let endpoint_ty = Ty::arrow(a.base.clone(), a.tgt.clone(), a.tgt.clone());
    Ok((round, unit, endpoint_ty))
}

/// Source and target read off the term's type.
pub fn src_tgt(tm: &Tm, ctx: &Ctx) -> Result<(Tm, Tm)> {
    let ty = ty_of(tm, ctx)?;
    match ty {
        Ty::Obj => Err(CheckError::DimensionZero { what: crate::print::tm(tm) }),
        Ty::Arr(a) => Ok((a.src, a.tgt)),
    }
}

pub fn src_of(tm: &Tm, ctx: &Ctx) -> Result<Tm> {
    Ok(src_tgt(tm, ctx)?.0)
}

pub fn tgt_of(tm: &Tm, ctx: &Ctx) -> Result<Tm> {
    Ok(src_tgt(tm, ctx)?.1)
}

/// Iterated source `σ^m`, read from the type tower. `m = 0` is the term.
pub fn src_iter(tm: &Tm, m: usize, ctx: &Ctx) -> Result<Tm> {
    if m == 0 {
        return Ok(tm.clone());
    }
    let ty = ty_of(tm, ctx)?;
    let level = ty.base_at(m - 1).map_err(|_| CheckError::DimensionZero {
        what: crate::print::tm(tm),
    })?;
    match level {
        Ty::Arr(a) => Ok(a.src.clone()),
        Ty::Obj => Err(CheckError::DimensionZero { what: crate::print::tm(tm) }),
    }
}

/// Iterated target `τ^m`.
pub fn tgt_iter(tm: &Tm, m: usize, ctx: &Ctx) -> Result<Tm> {
    if m == 0 {
        return Ok(tm.clone());
    }
    let ty = ty_of(tm, ctx)?;
    let level = ty.base_at(m - 1).map_err(|_| CheckError::DimensionZero {
        what: crate::print::tm(tm),
    })?;
    match level {
        Ty::Arr(a) => Ok(a.tgt.clone()),
        Ty::Obj => Err(CheckError::DimensionZero { what: crate::print::tm(tm) }),
    }
}

/// The `m`-fold boundary variable of a globular variable.
pub fn boundary_var(ctx: &Ctx, v: &VarName, m: usize, side: crate::error::BoundarySide) -> Result<VarName> {
    if m == 0 {
        return Ok(v.clone());
    }
    let ty = ctx.ty(v.pos)?;
    let level = ty.base_at(m - 1)?;
    let a = level.as_arrow().ok_or(CheckError::DimensionZero { what: v.ident.to_string() })?;
    let t = match side {
        crate::error::BoundarySide::Source => &a.src,
        crate::error::BoundarySide::Target => &a.tgt,
    };
    t.as_var().cloned().ok_or_else(|| CheckError::NotGlobular {
        offending: crate::print::tm(t),
    })
}

// ---------------------------------------------------------------------------
// predicates

/// Built purely from variables, operations and coherences.
pub fn is_categorical_tm(tm: &Tm) -> bool {
    match tm {
        Tm::Var(_) => true,
        Tm::Op(_, sub) | Tm::Coh(_, sub) => sub.terms.iter().all(is_categorical_tm),
        Tm::UCone(..) | Tm::Uni(..) | Tm::Inv(_) | Tm::Eta(_) | Tm::Eps(_) => false,
    }
}

pub fn is_categorical_ty(ty: &Ty) -> bool {
    match ty {
        Ty::Obj => true,
        Ty::Arr(a) => {
            is_categorical_ty(&a.base) && is_categorical_tm(&a.src) && is_categorical_tm(&a.tgt)
        }
    }
}

/// Every term occurring in the type is a variable.
pub fn is_globular_ty(ty: &Ty) -> bool {
    match ty {
        Ty::Obj => true,
        Ty::Arr(a) => {
            is_globular_ty(&a.base) && a.src.as_var().is_some() && a.tgt.as_var().is_some()
        }
    }
}

pub fn is_globular_ctx(ctx: &Ctx) -> bool {
    ctx.iter().all(|(_, t)| is_globular_ty(t))
}

/// First non-variable term inside a type, for error reporting.
pub fn non_globular_witness(ctx: &Ctx) -> Option<Tm> {
    for (_, t) in ctx.iter() {
        let mut cur = t;
        while let Ty::Arr(a) = cur {
            if a.src.as_var().is_none() {
                return Some(a.src.clone());
            }
            if a.tgt.as_var().is_none() {
                return Some(a.tgt.clone());
            }
            cur = &a.base;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> Ctx {
        let mut c = Ctx::new();
        let x = c.push("x", Ty::Obj);
        let y = c.push("y", Ty::Obj);
        c.push("f", Ty::arrow(Ty::Obj, Tm::Var(x), Tm::Var(y)));
        c
    }

    #[test]
    fn dim_of_obj_is_zero() {
        assert_eq!(Ty::Obj.dim(), 0);
    }

    #[test]
    fn dim_of_arrow_adds_one() {
        let c = g1();
        assert_eq!(c.ty(2).unwrap().dim(), 1);
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn fv_of_obj_is_empty() {
        assert!(fv_ty(&Ty::Obj).is_empty());
    }

    #[test]
    fn fv_of_var_is_singleton() {
        let c = g1();
        let f = c.var(2).unwrap();
        assert_eq!(fv_tm(&Tm::var(f)).len(), 1);
    }

    #[test]
    fn subst_var_picks_entry() {
        let c = g1();
        let id = c.identity_sub();
        let f = Tm::var(c.var(2).unwrap());
        assert_eq!(subst_tm(&f, &id).unwrap(), f);
    }

    #[test]
    fn subst_obj_is_obj() {
        let c = g1();
        assert_eq!(subst_ty(&Ty::Obj, &c.identity_sub()).unwrap(), Ty::Obj);
    }

    #[test]
    fn src_tgt_read_off_type() {
        let c = g1();
        let f = Tm::var(c.var(2).unwrap());
        let (s, t) = src_tgt(&f, &c).unwrap();
        assert_eq!(s, Tm::var(c.var(0).unwrap()));
        assert_eq!(t, Tm::var(c.var(1).unwrap()));
    }

    #[test]
    fn src_of_object_fails() {
        let c = g1();
        let x = Tm::var(c.var(0).unwrap());
        assert!(matches!(src_of(&x, &c), Err(CheckError::DimensionZero { .. })));
    }

    #[test]
    fn positional_equality_ignores_names() {
        let mut c2 = Ctx::new();
        let a = c2.push("a", Ty::Obj);
        let b = c2.push("b", Ty::Obj);
        c2.push("h", Ty::arrow(Ty::Obj, Tm::Var(a), Tm::Var(b)));
        assert_eq!(g1(), c2);
    }

    #[test]
    fn restriction_remaps_positions() {
        let c = g1();
        let r = c.restrict(&[0, 1, 2]).unwrap();
        assert_eq!(r, c);
        let r2 = c.restrict(&[1]).unwrap();
        assert_eq!(r2.len(), 1);
        assert_eq!(r2.ty(0).unwrap(), &Ty::Obj);
    }

    #[test]
    fn globular_predicate() {
        let c = g1();
        assert!(is_globular_ctx(&c));
    }
}
