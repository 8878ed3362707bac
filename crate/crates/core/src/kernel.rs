//! The typing judgments: context validity, type validity, term typing
//! with the free-variable side conditions, substitution typing.
//!
//! Checking is re-verification: operation and coherence heads carry their
//! pasting context and boundary type, so no search is ever performed.

use std::collections::BTreeSet;

use crate::derivation::Derivation;
use crate::error::{BoundarySide, CheckError, Result};
use crate::limits::Marks;
use crate::pasting;
use crate::print;
use crate::syntax::{
    fv_tm, fv_tm_ty, fv_ty, subst_ty, Ctx, Sub, Tm, Ty, VarName,
};

#[derive(Debug, Clone)]
pub struct TypingResult {
    pub inferred: Option<Ty>,
    pub derivation: Derivation,
}

impl TypingResult {
    fn checked(derivation: Derivation) -> Self {
        TypingResult { inferred: None, derivation }
    }

    pub fn ty(&self) -> &Ty {
        self.inferred.as_ref().expect("term judgment carries a type")
    }
}

pub fn check_ctx(ctx: &Ctx, marks: &Marks) -> Result<TypingResult> {
    let mut der = Derivation::leaf(print::judg_ctx(&Ctx::new()), "EC");
    let mut seen = BTreeSet::new();
    for i in 0..ctx.len() {
        let (v, ty) = ctx.entry(i)?;
        if !seen.insert(v.ident.clone()) {
            return Err(CheckError::DuplicateIdent { ident: v.ident.to_string() });
        }
        if fv_ty(ty).iter().any(|w| w.pos >= i) {
            return Err(CheckError::IllScoped { ident: v.ident.to_string() });
        }
        let prefix = ctx.prefix(i);
        let ty_der = check_ty(&prefix, ty, marks)?;
        der = Derivation::node(
            print::judg_ctx(&ctx.prefix(i + 1)),
            "CE",
            vec![der, ty_der.derivation],
        );
    }
    Ok(TypingResult::checked(der))
}

pub fn check_ty(ctx: &Ctx, ty: &Ty, marks: &Marks) -> Result<TypingResult> {
    let result = match ty {
        Ty::Obj => TypingResult::checked(Derivation::leaf(print::judg_ty(ctx, ty), "ObI")),
        Ty::Arr(arr) => {
            check_ty(ctx, &arr.base, marks)?;
            let src = infer_tm(ctx, &arr.src, marks)?;
            if src.ty() != &arr.base {
                return Err(CheckError::TypeMismatch {
                    term: print::tm(&arr.src),
                    expected: print::ty(&arr.base),
                    found: print::ty(src.ty()),
                });
            }
            let tgt = infer_tm(ctx, &arr.tgt, marks)?;
            if tgt.ty() != &arr.base {
                return Err(CheckError::TypeMismatch {
                    term: print::tm(&arr.tgt),
                    expected: print::ty(&arr.base),
                    found: print::ty(tgt.ty()),
                });
            }
            TypingResult::checked(Derivation::node(
                print::judg_ty(ctx, ty),
                "ArrI",
                vec![src.derivation, tgt.derivation],
            ))
        }
    };
    dim_lemma_ty(ctx, ty)?;
    Ok(result)
}

pub fn infer_tm(ctx: &Ctx, tm: &Tm, marks: &Marks) -> Result<TypingResult> {
    let result = match tm {
        Tm::Var(v) => {
            let ty = ctx.ty(v.pos)?.clone();
            TypingResult {
                derivation: Derivation::leaf(print::judg_tm(ctx, tm, &ty), "VAR"),
                inferred: Some(ty),
            }
        }
        Tm::Op(sch, sub) => {
            let arr = sch.ty.as_arrow().ok_or_else(|| CheckError::NotAnArrow {
                found: print::ty(&sch.ty),
            })?;
            check_ctx(&sch.ps, marks)?;
            let ps_der = pasting::check_ps(&sch.ps)?;
            if sch.ps.dim() == 0 {
                return Err(CheckError::OpOverZeroDimPs);
            }
            let ty_der = check_ty(&sch.ps, &sch.ty, marks)?;
            let src_bound = pasting::top_boundary_vars(&sch.ps, BoundarySide::Source)?;
            let tgt_bound = pasting::top_boundary_vars(&sch.ps, BoundarySide::Target)?;
            require_fv_eq(&src_bound, &fv_tm_ty(&arr.src, &arr.base), BoundarySide::Source)?;
            require_fv_eq(&tgt_bound, &fv_tm_ty(&arr.tgt, &arr.base), BoundarySide::Target)?;
            let sub_der = check_sub(ctx, sub, &sch.ps, marks)?;
            let ty = subst_ty(&sch.ty, sub)?;
            TypingResult {
                derivation: Derivation::node(
                    print::judg_tm(ctx, tm, &ty),
                    "OP",
                    vec![ps_der.derivation(), ty_der.derivation, sub_der.derivation],
                ),
                inferred: Some(ty),
            }
        }
        Tm::Coh(sch, sub) => {
            let arr = sch.ty.as_arrow().ok_or_else(|| CheckError::NotAnArrow {
                found: print::ty(&sch.ty),
            })?;
            check_ctx(&sch.ps, marks)?;
            let ps_der = pasting::check_ps(&sch.ps)?;
            let ty_der = check_ty(&sch.ps, &sch.ty, marks)?;
            let all = sch.ps.free_vars();
            require_fv_eq(&all, &fv_tm_ty(&arr.src, &arr.base), BoundarySide::Source)?;
            require_fv_eq(&all, &fv_tm_ty(&arr.tgt, &arr.base), BoundarySide::Target)?;
            let sub_der = check_sub(ctx, sub, &sch.ps, marks)?;
            let ty = subst_ty(&sch.ty, sub)?;
            TypingResult {
                derivation: Derivation::node(
                    print::judg_tm(ctx, tm, &ty),
                    "COH",
                    vec![ps_der.derivation(), ty_der.derivation, sub_der.derivation],
                ),
                inferred: Some(ty),
            }
        }
        Tm::UCone(site, x, sub) => {
            let (ty, der) = crate::limits::recheck_ucone(ctx, site, x, sub, marks)?;
            TypingResult { inferred: Some(ty), derivation: der }
        }
        Tm::Uni(site, x, sub) => {
            let (ty, der) = crate::limits::recheck_uni(ctx, site, x, sub, marks)?;
            TypingResult { inferred: Some(ty), derivation: der }
        }
        Tm::Inv(u) => {
            let (ty, der) = invertible_arg(ctx, u, marks)?;
            let arr = ty.as_arrow().expect("marked terms are cells");
            let inv_ty = Ty::arrow(arr.base.clone(), arr.tgt.clone(), arr.src.clone());
            TypingResult {
                derivation: Derivation::node(print::judg_tm(ctx, tm, &inv_ty), "INV", vec![der]),
                inferred: Some(inv_ty),
            }
        }
        Tm::Eta(u) => {
            let (_, der) = invertible_arg(ctx, u, marks)?;
            let (lhs, rhs, endpoint_ty) = crate::syntax::eta_endpoints(u, ctx)?;
            let ty = Ty::arrow(endpoint_ty, lhs, rhs);
            TypingResult {
                derivation: Derivation::node(print::judg_tm(ctx, tm, &ty), "ETA", vec![der]),
                inferred: Some(ty),
            }
        }
        Tm::Eps(u) => {
            let (_, der) = invertible_arg(ctx, u, marks)?;
            let (lhs, rhs, endpoint_ty) = crate::syntax::eps_endpoints(u, ctx)?;
            let ty = Ty::arrow(endpoint_ty, lhs, rhs);
            TypingResult {
                derivation: Derivation::node(print::judg_tm(ctx, tm, &ty), "EPS", vec![der]),
                inferred: Some(ty),
            }
        }
    };
    dim_lemma_tm(ctx, tm, result.ty())?;
    Ok(result)
}

fn invertible_arg(ctx: &Ctx, u: &Tm, marks: &Marks) -> Result<(Ty, Derivation)> {
    if !marks.contains(u) {
        return Err(CheckError::NotMarkedInvertible { term: print::tm(u) });
    }
    let res = infer_tm(ctx, u, marks)?;
    let ty = res.ty().clone();
    if ty.as_arrow().is_none() {
        return Err(CheckError::NotAnArrow { found: print::ty(&ty) });
    }
    Ok((ty, res.derivation))
}

pub fn check_sub(dom: &Ctx, sub: &Sub, cod: &Ctx, marks: &Marks) -> Result<TypingResult> {
    if sub.terms.len() != cod.len() {
        return Err(CheckError::SubLengthMismatch {
            expected: cod.len(),
            found: sub.terms.len(),
        });
    }
    let mut der = Derivation::leaf(
        print::judg_sub(dom, &Sub::new(vec![], Ctx::new()), &Ctx::new()),
        "ES",
    );
    for i in 0..cod.len() {
        let expected = subst_ty(cod.ty(i)?, sub)?;
        let entry = infer_tm(dom, &sub.terms[i], marks)?;
        if entry.ty() != &expected {
            return Err(CheckError::SubEntryMismatch {
                index: i + 1,
                found_term: print::tm(&sub.terms[i]),
                expected: print::ty(&expected),
                found: print::ty(entry.ty()),
            });
        }
        der = Derivation::node(
            print::judg_sub(dom, &sub.prefix(i + 1), &cod.prefix(i + 1)),
            "SE",
            vec![der, entry.derivation],
        );
    }
    Ok(TypingResult::checked(der))
}

fn require_fv_eq(
    bound: &BTreeSet<VarName>,
    given: &BTreeSet<VarName>,
    side: BoundarySide,
) -> Result<()> {
    if bound == given {
        return Ok(());
    }
    let missing = bound.difference(given).map(|v| v.ident.to_string()).collect();
    let extra = given.difference(bound).map(|v| v.ident.to_string()).collect();
    Err(CheckError::SideConditionViolated { side, missing, extra })
}

/// In a valid type every free variable is declared strictly below the
/// type's dimension. This holds for the base fragment only: limit cells
/// collect the free variables of their whole substitution.
fn dim_lemma_ty(ctx: &Ctx, ty: &Ty) -> Result<()> {
    if !crate::syntax::is_categorical_ty(ty) {
        return Ok(());
    }
    let d = ty.dim();
    for v in fv_ty(ty) {
        if ctx.ty(v.pos)?.dim() >= d {
            return Err(CheckError::Internal(format!(
                "dimension lemma: `{}` has dimension {} inside a {d}-dimensional type",
                v.ident,
                ctx.ty(v.pos)?.dim()
            )));
        }
    }
    Ok(())
}

/// In a valid term every free variable sits at or below the term's
/// dimension; again a fact about the base fragment.
fn dim_lemma_tm(ctx: &Ctx, tm: &Tm, ty: &Ty) -> Result<()> {
    if !crate::syntax::is_categorical_tm(tm) {
        return Ok(());
    }
    let d = ty.dim();
    for v in fv_tm(tm) {
        if ctx.ty(v.pos)?.dim() > d {
            return Err(CheckError::Internal(format!(
                "dimension lemma: `{}` exceeds the dimension of `{}`",
                v.ident,
                print::tm(tm)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn marks() -> Marks {
        Marks::new()
    }

    fn g1() -> Ctx {
        let mut c = Ctx::new();
        let x = c.push("x", Ty::Obj);
        let y = c.push("y", Ty::Obj);
        c.push("f", Ty::arrow(Ty::Obj, Tm::Var(x), Tm::Var(y)));
        c
    }

    #[test]
    fn empty_context_checks() {
        let r = check_ctx(&Ctx::new(), &marks()).unwrap();
        assert_eq!(r.derivation.rule, "EC");
    }

    #[test]
    fn interval_checks() {
        check_ctx(&g1(), &marks()).unwrap();
    }

    #[test]
    fn unbound_reference_is_rejected() {
        let mut c = Ctx::new();
        let fake_x = VarName::new("x", 0);
        let fake_y = VarName::new("y", 1);
        c.push("f", Ty::arrow(Ty::Obj, Tm::Var(fake_x), Tm::Var(fake_y)));
        assert!(matches!(
            check_ctx(&c, &marks()),
            Err(CheckError::IllScoped { .. })
        ));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut c = Ctx::new();
        c.push("x", Ty::Obj);
        c.push("x", Ty::Obj);
        assert!(matches!(
            check_ctx(&c, &marks()),
            Err(CheckError::DuplicateIdent { .. })
        ));
    }

    #[test]
    fn arrow_types_check_and_mismatch() {
        let c = g1();
        let x = Tm::var(c.var(0).unwrap());
        let y = Tm::var(c.var(1).unwrap());
        let f = Tm::var(c.var(2).unwrap());
        check_ty(&c, &Ty::arrow(Ty::Obj, x.clone(), y.clone()), &marks()).unwrap();
        let fty = Ty::arrow(Ty::Obj, x.clone(), y.clone());
        check_ty(&c, &Ty::arrow(fty, f.clone(), f.clone()), &marks()).unwrap();
        assert!(matches!(
            check_ty(&c, &Ty::arrow(Ty::Obj, x, f), &marks()),
            Err(CheckError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn vertical_composite_infers() {
        let scheme = catalog::comp_scheme(2, 1).unwrap();
        let a = Tm::var(scheme.var(4).unwrap());
        let b = Tm::var(scheme.var(6).unwrap());
        let comp = catalog::comp_term(a, b, 2, 1, &scheme).unwrap();
        let res = infer_tm(&scheme, &comp, &marks()).unwrap();
        assert_eq!(print::ty(res.ty()), "f -> h");
    }

    #[test]
    fn unit_coherence_infers_for_any_cell() {
        let c = g1();
        let f = Tm::var(c.var(2).unwrap());
        let one = catalog::iterated_identity(f, 1, &c).unwrap();
        let res = infer_tm(&c, &one, &marks()).unwrap();
        assert_eq!(print::ty(res.ty()), "f -> f");
    }

    #[test]
    fn op_with_shrunk_target_boundary_is_rejected() {
        // over the vertical scheme, declare the target to be g instead of h
        let scheme = catalog::comp_scheme(2, 1).unwrap();
        let f = scheme.var(2).unwrap().clone();
        let g = scheme.var(3).unwrap().clone();
        let base = scheme.ty(2).unwrap().clone();
        let bad = Tm::Op(
            std::sync::Arc::new(crate::syntax::Schema {
                ps: scheme.clone(),
                ty: Ty::arrow(base, Tm::Var(f), Tm::Var(g)),
            }),
            Sub::identity(&scheme),
        );
        match infer_tm(&scheme, &bad, &marks()) {
            Err(CheckError::SideConditionViolated { side: BoundarySide::Target, missing, extra }) => {
                assert_eq!(missing, vec!["h".to_string()]);
                assert_eq!(extra, vec!["g".to_string()]);
            }
            other => panic!("expected a target side-condition violation, got {other:?}"),
        }
    }

    #[test]
    fn op_over_a_point_is_rejected() {
        let point = catalog::globe(0);
        let x = point.var(0).unwrap().clone();
        let bad = Tm::Op(
            std::sync::Arc::new(crate::syntax::Schema {
                ps: point.clone(),
                ty: Ty::arrow(Ty::Obj, Tm::Var(x.clone()), Tm::Var(x)),
            }),
            Sub::identity(&point),
        );
        assert!(matches!(
            infer_tm(&point, &bad, &marks()),
            Err(CheckError::OpOverZeroDimPs)
        ));
    }

    #[test]
    fn empty_substitution_checks() {
        let c = g1();
        let r = check_sub(&c, &Sub::new(vec![], Ctx::new()), &Ctx::new(), &marks()).unwrap();
        assert_eq!(r.derivation.rule, "ES");
    }

    #[test]
    fn identity_substitution_checks() {
        let c = g1();
        check_sub(&c, &Sub::identity(&c), &c, &marks()).unwrap();
    }

    #[test]
    fn swapped_endpoints_fail_at_the_third_entry() {
        let c = g1();
        let x = Tm::var(c.var(0).unwrap());
        let f = Tm::var(c.var(2).unwrap());
        let sub = Sub::new(vec![x.clone(), x, f], c.clone());
        match check_sub(&c, &sub, &c, &marks()) {
            Err(CheckError::SubEntryMismatch { index: 3, .. }) => {}
            other => panic!("expected mismatch at entry 3, got {other:?}"),
        }
    }

    #[test]
    fn inv_requires_a_mark() {
        let c = g1();
        let f = Tm::var(c.var(2).unwrap());
        let bad = Tm::Inv(Box::new(f));
        assert!(matches!(
            infer_tm(&c, &bad, &marks()),
            Err(CheckError::NotMarkedInvertible { .. })
        ));
    }
}
