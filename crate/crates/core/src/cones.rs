//! Cones over a diagram as contexts: the linearity relation, the boundary
//! side conditions, recognition, and synthesis over globular diagrams.

use crate::derivation::Derivation;
use crate::error::{BoundarySide, CheckError, DeltaClause, Result};
use crate::kernel;
use crate::limits::Marks;
use crate::print;
use crate::syntax::{
    boundary_var, fv_tm, fv_tm_ty, fv_ty, is_categorical_tm, is_categorical_ty, is_globular_ctx,
    non_globular_witness, Ctx, Tm, Ty, VarName,
};
use crate::{catalog, syntax};

/// A recognized cone: the underlying context is literally the diagram,
/// an apex of type Ob, and one projection per diagram variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeShape {
    pub kctx: Ctx,
    pub diagram: Ctx,
    pub apex: VarName,
}

impl ConeShape {
    pub fn projection_count(&self) -> usize {
        self.diagram.len()
    }

    /// The projection variable for the i-th diagram variable.
    pub fn proj_var(&self, i: usize) -> Result<&VarName> {
        self.kctx.var(self.diagram.len() + 1 + i)
    }

    pub fn proj_ty(&self, i: usize) -> Result<&Ty> {
        self.kctx.ty(self.diagram.len() + 1 + i)
    }
}

/// `x ∝ t`: the variable reaches the term through exactly one argument
/// slot at every operation node. False when dimensions differ or the term
/// is not categorical.
pub fn is_linear(x: &VarName, t: &Tm, ctx: &Ctx) -> bool {
    let dx = match ctx.ty(x.pos) {
        Ok(ty) => ty.dim(),
        Err(_) => return false,
    };
    let dt = match syntax::dim_tm(t, ctx) {
        Ok(d) => d,
        Err(_) => return false,
    };
    if dx != dt || !fv_tm(t).contains(x) {
        return false;
    }
    linear_rec(x, t, ctx)
}

fn linear_rec(x: &VarName, t: &Tm, ctx: &Ctx) -> bool {
    match t {
        Tm::Var(y) => x == y,
        Tm::Op(_, sub) | Tm::Coh(_, sub) => {
            let hits = sub.terms.iter().filter(|arg| is_linear(x, arg, ctx)).count();
            hits == 1
        }
        _ => false,
    }
}

/// One endpoint condition of the cone and transfor rules: the endpoint is
/// categorical, linear in the subject variable (unless the apex-barred
/// variant is used), and its free variables are exactly the base set plus
/// the projections associated to the subject's boundary.
#[allow(clippy::too_many_arguments)]
pub fn check_delta_cond(
    ctx: &Ctx,
    endpoint: &Tm,
    endpoint_base: &Ty,
    var: &VarName,
    var_ty: &Ty,
    barred_apex: Option<&VarName>,
    projections: &[VarName],
    side: BoundarySide,
) -> Result<()> {
    let violation = |clause, missing: Vec<String>, extra: Vec<String>| {
        Err(CheckError::DeltaCondViolated {
            which: side,
            subject: print::tm(endpoint),
            clause,
            missing,
            extra,
        })
    };
    if !is_categorical_tm(endpoint) || !is_categorical_ty(endpoint_base) {
        return violation(DeltaClause::Categorical, vec![], vec![]);
    }
    if barred_apex.is_none() && !is_linear(var, endpoint, ctx) {
        return violation(DeltaClause::Linearity, vec![], vec![]);
    }

    let mut required = match barred_apex {
        Some(c) => std::iter::once(c.clone()).collect(),
        None => fv_tm_ty(&Tm::var(var), var_ty),
    };
    let candidates = match var_ty.as_arrow() {
        None => Default::default(),
        Some(arr) => {
            let boundary = match side {
                BoundarySide::Source => &arr.src,
                BoundarySide::Target => &arr.tgt,
            };
            fv_tm_ty(boundary, &arr.base)
        }
    };
    for p in projections {
        let p_ty = ctx.ty(p.pos)?;
        let Some(arr) = p_ty.as_arrow() else { continue };
        let associated = candidates
            .iter()
            .any(|y| is_linear(y, &arr.src, ctx) || is_linear(y, &arr.tgt, ctx));
        if associated {
            required.append(&mut fv_tm_ty(&Tm::var(p), p_ty));
        }
    }

    let actual = fv_tm_ty(endpoint, endpoint_base);
    if actual != required {
        let missing = required.difference(&actual).map(|v| v.ident.to_string()).collect();
        let extra = actual.difference(&required).map(|v| v.ident.to_string()).collect();
        return violation(DeltaClause::FreeVars, missing, extra);
    }
    Ok(())
}

/// Recognize `k` as a cone over `diagram`, replaying one extension step
/// per diagram variable.
pub fn check_cone(k: &Ctx, diagram: &Ctx, marks: &Marks) -> Result<(ConeShape, Derivation)> {
    let n = diagram.len();
    if k.len() != 2 * n + 1 {
        return Err(CheckError::ConeShapeMismatch {
            reason: format!(
                "expected {} entries (diagram, apex, one projection per variable), found {}",
                2 * n + 1,
                k.len()
            ),
        });
    }
    for i in 0..n {
        if k.ty(i)? != diagram.ty(i)? {
            return Err(CheckError::ConeShapeMismatch {
                reason: format!(
                    "entry {} does not repeat the diagram: found `{}`, expected `{}`",
                    i + 1,
                    print::ty(k.ty(i)?),
                    print::ty(diagram.ty(i)?)
                ),
            });
        }
    }
    let apex = k.var(n)?.clone();
    if k.ty(n)? != &Ty::Obj {
        return Err(CheckError::ConeShapeMismatch {
            reason: format!("apex `{}` must be of type Ob", apex.ident),
        });
    }
    kernel::check_ctx(k, marks)?;

    let mut der = Derivation::leaf(
        format!("(({} : Ob)) cone ((); {})", apex.ident, apex.ident),
        "EK",
    );
    for i in 0..n {
        let pos = n + 1 + i;
        let (pv, pty) = k.entry(pos)?;
        let Some(arr) = pty.as_arrow() else {
            return Err(CheckError::ConeShapeMismatch {
                reason: format!("projection `{}` must have an arrow type", pv.ident),
            });
        };
        let visible = |w: usize| w <= i || w == n || (w > n && w < pos);
        if let Some(bad) = fv_ty(pty).iter().find(|v| !visible(v.pos)) {
            return Err(CheckError::ConeShapeMismatch {
                reason: format!(
                    "projection `{}` mentions `{}` which is not visible at its extension step",
                    pv.ident,
                    bad.ident
                ),
            });
        }
        let x = k.var(i)?;
        let x_ty = k.ty(i)?;
        let projections: Vec<VarName> =
            (0..i).map(|j| k.var(n + 1 + j).cloned()).collect::<Result<_>>()?;
        check_delta_cond(k, &arr.src, &arr.base, x, x_ty, Some(&apex), &projections, BoundarySide::Target)?;
        check_delta_cond(k, &arr.tgt, &arr.base, x, x_ty, None, &projections, BoundarySide::Source)?;

        let keep: Vec<usize> = (0..=i).chain(std::iter::once(n)).chain(n + 1..=pos).collect();
        let stage = k.restrict(&keep)?;
        der = Derivation::node(
            format!(
                "{} cone ({}; {})",
                print::ctx(&stage),
                print::ctx(&diagram.prefix(i + 1)),
                apex.ident
            ),
            "KE",
            vec![der],
        );
    }
    Ok((
        ConeShape { kctx: k.clone(), diagram: diagram.clone(), apex },
        der,
    ))
}

/// Build the cone over a globular diagram, projection types following the
/// unit-padded telescope, and re-verify it with the recognizer.
pub fn synth_cone_globular(diagram: &Ctx, marks: &Marks) -> Result<(ConeShape, Derivation)> {
    if !is_globular_ctx(diagram) {
        let offending = non_globular_witness(diagram)
            .map(|t| print::tm(&t))
            .unwrap_or_else(|| "<unknown>".into());
        return Err(CheckError::NotGlobular { offending });
    }
    kernel::check_ctx(diagram, marks)?;

    let n = diagram.len();
    let mut k = diagram.clone();
    let apex_ident = k.fresh_ident("c");
    let apex = k.push(apex_ident, Ty::Obj);
    let mut proj_of: Vec<VarName> = Vec::with_capacity(n);

    for i in 0..n {
        let x = k.var(i)?.clone();
        let d = k.ty(i)?.dim();
        let ty = if d == 0 {
            Ty::arrow(Ty::Obj, Tm::var(&apex), Tm::var(&x))
        } else {
            let mut approx = Tm::var(&x);
            for m in (1..=d).rev() {
                let sv = boundary_var(&k, &x, m, BoundarySide::Source)?;
                let pv = proj_of[sv.pos].clone();
                let unit = catalog::iterated_identity(Tm::Var(pv), m - 1, &k)?;
                approx = catalog::comp_term(unit, approx, d, d - m, &k)?;
            }
            let tv = boundary_var(&k, &x, 1, BoundarySide::Target)?;
            let pt = proj_of[tv.pos].clone();
            let base = k.ty(pt.pos)?.clone();
            Ty::arrow(base, Tm::Var(pt), approx)
        };
        let ident = k.fresh_ident(&format!("p_{}", x.ident));
        let p = k.push(ident, ty);
        proj_of.push(p.clone());
        assert_projection_laws(&k, diagram, &apex, &proj_of, i)?;
    }

    check_cone(&k, diagram, marks)
}

/// The free variables of a synthesized projection are exactly the union
/// over the projections whose type-target is linear in a variable of the
/// subject's boundary; the apex always occurs; the subject is the unique
/// diagram variable linear in the projection's target.
fn assert_projection_laws(
    k: &Ctx,
    diagram: &Ctx,
    apex: &VarName,
    proj_of: &[VarName],
    i: usize,
) -> Result<()> {
    let n = diagram.len();
    let x = k.var(i)?;
    let x_ty = k.ty(i)?;
    let p = &proj_of[i];
    let p_ty = k.ty(p.pos)?;
    let actual = fv_tm_ty(&Tm::var(p), p_ty);

    let candidates = fv_tm_ty(&Tm::var(x), x_ty);
    let mut expected = std::collections::BTreeSet::new();
    for q in proj_of {
        let arr = k.ty(q.pos)?.as_arrow().expect("projections are cells");
        if candidates.iter().any(|y| is_linear(y, &arr.tgt, k)) {
            expected.append(&mut fv_tm_ty(&Tm::var(q), k.ty(q.pos)?));
        }
    }
    if actual != expected || !actual.contains(apex) {
        return Err(CheckError::Internal(format!(
            "projection law broken for `{}`",
            p.ident
        )));
    }

    let tgt = &p_ty.as_arrow().expect("projections are cells").tgt;
    let witnesses: Vec<_> = (0..n)
        .filter_map(|j| k.var(j).ok())
        .filter(|y| is_linear(y, tgt, k))
        .collect();
    if witnesses.len() != 1 || witnesses[0] != x {
        return Err(CheckError::Internal(format!(
            "linear witness for `{}` is not unique",
            p.ident
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn variable_is_linear_in_itself() {
        let c = g1();
        let x = c.var(0).unwrap();
        assert!(is_linear(x, &Tm::var(x), &c));
    }

    #[test]
    fn self_composition_breaks_linearity() {
        let mut c = Ctx::new();
        let x = c.push("x", Ty::Obj);
        let f = c.push("f", Ty::arrow(Ty::Obj, Tm::Var(x.clone()), Tm::Var(x)));
        let ff = catalog::comp_term(Tm::Var(f.clone()), Tm::Var(f.clone()), 1, 0, &c).unwrap();
        assert!(!is_linear(&f, &ff, &c));
    }

    #[test]
    fn whisker_is_linear_in_the_cell() {
        // 1_(p_x) *^2_0 α over the synthesized two-globe cone
        let two_globe = catalog::globe(2);
        let (shape, _) = synth_cone_globular(&two_globe, &marks()).unwrap();
        let k = &shape.kctx;
        let alpha = k.var(4).unwrap().clone();
        let p_alpha_ty = shape.proj_ty(4).unwrap();
        let tgt = &p_alpha_ty.as_arrow().unwrap().tgt;
        assert!(is_linear(&alpha, tgt, k));
    }

    #[test]
    fn apex_alone_is_a_cone_over_the_empty_diagram() {
        let mut k = Ctx::new();
        k.push("c", Ty::Obj);
        let (shape, der) = check_cone(&k, &Ctx::new(), &marks()).unwrap();
        assert_eq!(shape.projection_count(), 0);
        assert_eq!(der.rule, "EK");
    }

    #[test]
    fn cone_over_arrow_prints_like_the_display() {
        let (shape, _) = synth_cone_globular(&g1(), &marks()).unwrap();
        assert_eq!(
            print::ctx(&shape.kctx),
            "(x : Ob, y : Ob, f : x -> y, c : Ob, p_x : c -> x, p_y : c -> y, p_f : p_y -> (p_x *^1_0 f))"
        );
    }

    #[test]
    fn cone_over_two_globe_prints_like_the_display() {
        let (shape, _) = synth_cone_globular(&catalog::globe(2), &marks()).unwrap();
        assert_eq!(
            print::ctx(&shape.kctx),
            "(x : Ob, y : Ob, f : x -> y, g : x -> y, α : f -> g, c : Ob, \
             p_x : c -> x, p_y : c -> y, p_f : p_y -> (p_x *^1_0 f), p_g : p_y -> (p_x *^1_0 g), \
             p_α : p_g -> (p_f *^2_1 (1_(p_x) *^2_0 α)))"
        );
    }

    #[test]
    fn synthesized_cones_recognize_for_small_globes() {
        for d in 0..=3 {
            let g = catalog::globe(d);
            let (shape, _) = synth_cone_globular(&g, &marks()).unwrap();
            check_cone(&shape.kctx, &g, &marks()).unwrap();
        }
    }

    #[test]
    fn flipping_a_projection_breaks_recognition() {
        let (shape, _) = synth_cone_globular(&g1(), &marks()).unwrap();
        let k = &shape.kctx;
        // swap source and target of p_f
        let mut flipped = k.prefix(6);
        let arr = k.ty(6).unwrap().as_arrow().unwrap().clone();
        flipped.push("p_f", Ty::arrow(arr.base, arr.tgt, arr.src));
        assert!(matches!(
            check_cone(&flipped, &g1(), &marks()),
            Err(CheckError::DeltaCondViolated { .. })
        ));
    }

    #[test]
    fn non_globular_diagrams_are_not_synthesized() {
        let mut c = g1();
        let x = c.var(0).unwrap().clone();
        let f = c.var(2).unwrap().clone();
        let one = catalog::iterated_identity(Tm::Var(x), 1, &c).unwrap();
        let fv = Tm::Var(f);
        let comp = catalog::comp_term(one, fv, 1, 0, &c).unwrap();
        c.push("t", Ty::arrow(Ty::Obj, comp.clone(), comp));
        assert!(matches!(
            synth_cone_globular(&c, &marks()),
            Err(CheckError::NotGlobular { .. })
        ));
    }

    #[test]
    fn projection_count_mismatch_is_a_shape_error() {
        let (shape, _) = synth_cone_globular(&g1(), &marks()).unwrap();
        let truncated = shape.kctx.prefix(6);
        assert!(matches!(
            check_cone(&truncated, &g1(), &marks()),
            Err(CheckError::ConeShapeMismatch { .. })
        ));
    }
}
