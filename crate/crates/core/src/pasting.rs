//! Recognition of pasting contexts and their k-sources and k-targets.

use crate::derivation::Derivation;
use crate::error::{BoundarySide, CheckError, Result};
use crate::print;
use crate::syntax::{Ctx, Tm, Ty, VarName};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsRule {
    Pss,
    Pse,
    Psd,
    Ps,
}

impl std::fmt::Display for PsRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsRule::Pss => write!(f, "PSS"),
            PsRule::Pse => write!(f, "PSE"),
            PsRule::Psd => write!(f, "PSD"),
            PsRule::Ps => write!(f, "PS"),
        }
    }
}

/// One step of the replay; `focus` is the focused variable after the step
/// (absent for the closing step).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsStep {
    pub rule: PsRule,
    pub focus: Option<(VarName, Ty)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsDerivation {
    pub context: Ctx,
    pub trace: Vec<PsStep>,
}

impl PsDerivation {
    pub fn rule_word(&self) -> String {
        self.trace.iter().map(|s| format!("({})", s.rule)).collect()
    }

    pub fn derivation(&self) -> Derivation {
        let mut der = None;
        for step in &self.trace {
            let judgment = match &step.focus {
                Some((v, a)) => print::judg_ps_focus(&self.context, &v.ident, a),
                None => print::judg_ps(&self.context),
            };
            let premises = der.take().map(|d| vec![d]).unwrap_or_default();
            der = Some(Derivation::node(judgment, step.rule.to_string(), premises));
        }
        der.unwrap_or_else(|| Derivation::leaf(print::judg_ps(&self.context), "PS"))
    }
}

/// Deterministic left-to-right replay of the pasting rules. The first
/// entry opens with (PSS); every following pair (y : A, f : x -> y) forces
/// (PSD) steps until the focus has type A, then one (PSE); the trace closes
/// with (PSD)* and (PS).
pub fn check_ps(ctx: &Ctx) -> Result<PsDerivation> {
    if ctx.is_empty() {
        return Err(CheckError::NotPs { position: 0, reason: "the empty context is not a pasting context".into() });
    }
    let (first, first_ty) = ctx.entry(0)?;
    if first_ty != &Ty::Obj {
        return Err(CheckError::NotPs { position: 0, reason: "first entry must be of type Ob".into() });
    }
    let mut trace = vec![PsStep { rule: PsRule::Pss, focus: Some((first.clone(), Ty::Obj)) }];
    let mut focus = first.clone();
    let mut focus_ty = Ty::Obj;

    let mut i = 1;
    while i < ctx.len() {
        if i + 1 >= ctx.len() {
            return Err(CheckError::NotPs {
                position: i,
                reason: "pasting contexts extend by (target, cell) pairs; a lone entry remains".into(),
            });
        }
        let (y, a) = ctx.entry(i)?;
        let (cell, cell_ty) = ctx.entry(i + 1)?;
        while focus_ty.dim() > a.dim() {
            descend(ctx, &mut focus, &mut focus_ty, &mut trace, i)?;
        }
        if &focus_ty != a {
            return Err(CheckError::NotPs {
                position: i,
                reason: format!(
                    "entry `{}` has type `{}` but the focus `{}` has type `{}`",
                    y.ident,
                    print::ty(a),
                    focus.ident,
                    print::ty(&focus_ty)
                ),
            });
        }
        let expected = Ty::arrow(a.clone(), Tm::var(&focus), Tm::var(y));
        if cell_ty != &expected {
            return Err(CheckError::NotPs {
                position: i + 1,
                reason: format!(
                    "cell `{}` has type `{}`, expected `{}`",
                    cell.ident,
                    print::ty(cell_ty),
                    print::ty(&expected)
                ),
            });
        }
        focus = cell.clone();
        focus_ty = cell_ty.clone();
        trace.push(PsStep { rule: PsRule::Pse, focus: Some((focus.clone(), focus_ty.clone())) });
        i += 2;
    }

    while focus_ty.dim() > 0 {
        descend(ctx, &mut focus, &mut focus_ty, &mut trace, ctx.len())?;
    }
    trace.push(PsStep { rule: PsRule::Ps, focus: None });
    Ok(PsDerivation { context: ctx.clone(), trace })
}

fn descend(
    ctx: &Ctx,
    focus: &mut VarName,
    focus_ty: &mut Ty,
    trace: &mut Vec<PsStep>,
    position: usize,
) -> Result<()> {
    let arr = focus_ty.as_arrow().ok_or(CheckError::NotPs {
        position,
        reason: "cannot lower a 0-dimensional focus".into(),
    })?;
    let tgt = arr.tgt.as_var().ok_or_else(|| CheckError::NotPs {
        position,
        reason: format!("focus target `{}` is not a variable", print::tm(&arr.tgt)),
    })?;
    let new_ty = ctx.ty(tgt.pos)?.clone();
    *focus = ctx.var(tgt.pos)?.clone();
    *focus_ty = new_ty;
    trace.push(PsStep { rule: PsRule::Psd, focus: Some((focus.clone(), focus_ty.clone())) });
    Ok(())
}

/// The k-source (minus) or k-target (plus) of a pasting context.
pub fn boundary(ctx: &Ctx, k: usize, side: BoundarySide) -> Result<Ctx> {
    check_ps(ctx)?;
    let keep = boundary_positions(ctx, ctx.len(), k, side)?;
    ctx.restrict(&keep)
}

fn boundary_positions(ctx: &Ctx, n: usize, k: usize, side: BoundarySide) -> Result<Vec<usize>> {
    if n == 1 {
        return Ok(vec![0]);
    }
    let d = ctx.ty(n - 2)?.dim();
    let mut inner = boundary_positions(ctx, n - 2, k, side)?;
    match side {
        BoundarySide::Source => {
            if k > d {
                inner.push(n - 2);
                inner.push(n - 1);
            }
        }
        BoundarySide::Target => {
            if k == d {
                inner.pop();
                inner.push(n - 2);
            } else if k > d {
                inner.push(n - 2);
                inner.push(n - 1);
            }
        }
    }
    Ok(inner)
}

/// The variables of the k-boundary, in the numbering of `ctx` itself.
pub fn boundary_vars(
    ctx: &Ctx,
    k: usize,
    side: BoundarySide,
) -> Result<std::collections::BTreeSet<VarName>> {
    check_ps(ctx)?;
    let keep = boundary_positions(ctx, ctx.len(), k, side)?;
    keep.into_iter().map(|p| ctx.var(p).cloned()).collect()
}

/// The variables of `∂-Γ` / `∂+Γ` in the numbering of `ctx`.
pub fn top_boundary_vars(
    ctx: &Ctx,
    side: BoundarySide,
) -> Result<std::collections::BTreeSet<VarName>> {
    if ctx.dim() == 0 {
        return Err(CheckError::BoundaryDimZero);
    }
    boundary_vars(ctx, ctx.dim() - 1, side)
}

/// `∂-Γ`, the source at level dim(Γ) - 1.
pub fn boundary_src(ctx: &Ctx) -> Result<Ctx> {
    if ctx.dim() == 0 {
        return Err(CheckError::BoundaryDimZero);
    }
    boundary(ctx, ctx.dim() - 1, BoundarySide::Source)
}

/// `∂+Γ`, the target at level dim(Γ) - 1.
pub fn boundary_tgt(ctx: &Ctx) -> Result<Ctx> {
    if ctx.dim() == 0 {
        return Err(CheckError::BoundaryDimZero);
    }
    boundary(ctx, ctx.dim() - 1, BoundarySide::Target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn singleton_is_ps() {
        let mut c = Ctx::new();
        c.push("x", Ty::Obj);
        let d = check_ps(&c).unwrap();
        assert_eq!(d.rule_word(), "(PSS)(PS)");
    }

    #[test]
    fn two_objects_are_not_ps() {
        let mut c = Ctx::new();
        c.push("x", Ty::Obj);
        c.push("y", Ty::Obj);
        assert!(matches!(check_ps(&c), Err(CheckError::NotPs { .. })));
    }

    #[test]
    fn vertical_composition_context_has_the_five_step_trace() {
        let c = catalog::comp_scheme(2, 1).unwrap();
        let d = check_ps(&c).unwrap();
        // (PSS)(PSE)(PSE)(PSD)(PSE) and then the closing descent
        assert_eq!(d.rule_word(), "(PSS)(PSE)(PSE)(PSD)(PSE)(PSD)(PSD)(PS)");
    }

    #[test]
    fn globe_traces_are_pse_chains() {
        let c = catalog::globe(3);
        let d = check_ps(&c).unwrap();
        assert_eq!(d.rule_word(), "(PSS)(PSE)(PSE)(PSE)(PSD)(PSD)(PSD)(PS)");
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn boundary_of_interval_at_zero_is_a_point() {
        let c = catalog::globe(1);
        let b = boundary(&c, 0, BoundarySide::Source).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.ty(0).unwrap(), &Ty::Obj);
        let b = boundary(&c, 0, BoundarySide::Target).unwrap();
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn boundaries_of_vertical_composition() {
        let c = catalog::comp_scheme(2, 1).unwrap();
        let src = boundary_src(&c).unwrap();
        let tgt = boundary_tgt(&c).unwrap();
        assert_eq!(src, catalog::globe(1));
        assert_eq!(tgt, catalog::globe(1));
        // the target keeps the last parallel 1-cell
        assert_eq!(&*tgt.var(2).unwrap().ident, "h");
    }

    #[test]
    fn boundary_of_dimension_zero_fails() {
        let c = catalog::globe(0);
        assert!(matches!(boundary_src(&c), Err(CheckError::BoundaryDimZero)));
    }

    #[test]
    fn first_entry_must_be_an_object() {
        let mut c = Ctx::new();
        let x = c.push("x", Ty::Obj);
        let y = c.push("y", Ty::Obj);
        c.push("f", Ty::arrow(Ty::Obj, Tm::Var(x), Tm::Var(y)));
        // reorder: start from the arrow
        let broken = c.restrict(&[0, 1, 2]).unwrap();
        assert!(check_ps(&broken).is_ok());
        let mut c2 = Ctx::new();
        c2.push("f", Ty::arrow(Ty::Obj, Tm::Var(VarName::new("x", 0)), Tm::Var(VarName::new("y", 1))));
        assert!(matches!(check_ps(&c2), Err(CheckError::NotPs { position: 0, .. })));
    }
}
