//! Transfor-shaped contexts: recognition of Gray-product contexts and of
//! conical transfors between cones, plus synthesis of the interval Gray
//! product over globular diagrams.
//!
//! A segmented context `M_1; ...; M_{2n+1}` is accepted in lockstep rows:
//! the opening extends the first column, each mediator pair extends a
//! duplicate column and a mediator column, and a row must complete across
//! all columns before the next one starts. The duplicate's type is the
//! original's transported along the column shift.

use crate::cones::{check_cone, check_delta_cond};
use crate::derivation::Derivation;
use crate::error::{BoundarySide, CheckError, Result};
use crate::kernel;
use crate::limits::Marks;
use crate::print;
use crate::syntax::{
    boundary_var, fv_ty, is_globular_ctx, non_globular_witness, remap_ty, Ctx, Tm, Ty, VarName,
};
use crate::catalog;

/// A context together with its segment lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SegCtx {
    pub ctx: Ctx,
    pub seg_lens: Vec<usize>,
}

impl SegCtx {
    pub fn new(ctx: Ctx, seg_lens: Vec<usize>) -> Result<SegCtx> {
        if seg_lens.iter().sum::<usize>() != ctx.len() {
            return Err(CheckError::Internal(
                "segment lengths do not cover the context".into(),
            ));
        }
        Ok(SegCtx { ctx, seg_lens })
    }

    pub fn unsegmented(ctx: Ctx) -> SegCtx {
        let len = ctx.len();
        SegCtx { ctx, seg_lens: vec![len] }
    }

    pub fn print(&self) -> String {
        print::ctx_seg(&self.ctx, &self.seg_lens)
    }
}

/// A recognized transfor shape; for conical transfors the flat context is
/// diagram, apex, then the columns, for Gray products just the columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransforShape {
    pub flat: Ctx,
    pub diagram_len: usize,
    pub has_apex: bool,
    pub level: usize,
    pub rows: usize,
}

impl TransforShape {
    pub fn columns(&self) -> usize {
        2 * self.level + 1
    }

    /// Flat position of the first row of column `j` (1-based).
    pub fn col_start(&self, j: usize) -> usize {
        let base = if self.has_apex { self.diagram_len + 1 } else { 0 };
        base + (j - 1) * self.rows
    }

    pub fn row_pos(&self, j: usize, r: usize) -> usize {
        self.col_start(j) + r
    }

    pub fn apex(&self) -> Option<VarName> {
        self.has_apex
            .then(|| self.flat.var(self.diagram_len).expect("apex slot").clone())
    }

    pub fn diagram(&self) -> Ctx {
        self.flat.prefix(self.diagram_len)
    }

    pub fn seg_lens(&self) -> Vec<usize> {
        let mut v = Vec::new();
        if self.has_apex {
            v.push(self.diagram_len);
            v.push(1);
        }
        v.extend(std::iter::repeat(self.rows).take(self.columns()));
        v
    }

    pub fn print(&self) -> String {
        print::ctx_seg(&self.flat, &self.seg_lens())
    }
}

fn check_column_lengths(lens: &[usize]) -> Result<usize> {
    let cols = lens.len();
    let first = lens[0];
    let last = lens[cols - 1];
    if first != last {
        return Err(CheckError::PrematureClose { first, last });
    }
    for j in 0..cols - 1 {
        if lens[j] != lens[j + 1] {
            return Err(CheckError::SegmentImbalance {
                left: j + 1,
                left_len: lens[j],
                right: j + 2,
                right_len: lens[j + 1],
            });
        }
    }
    Ok(first)
}

/// Shift references within a column range to the parallel range.
fn transport(ty: &Ty, flat: &Ctx, from_start: usize, to_start: usize, count: usize) -> Result<Ty> {
    remap_ty(ty, &|v| {
        let pos = if v.pos >= from_start && v.pos < from_start + count {
            v.pos - from_start + to_start
        } else {
            v.pos
        };
        Ok(VarName { ident: flat.var(pos)?.ident.clone(), pos })
    })
}

fn scope_check(flat: &Ctx, pos: usize, visible: impl Fn(usize) -> bool) -> Result<()> {
    let (v, ty) = flat.entry(pos)?;
    if let Some(bad) = fv_ty(ty).iter().find(|w| !visible(w.pos)) {
        let _ = bad;
        return Err(CheckError::SegmentScope { ident: v.ident.to_string() });
    }
    Ok(())
}

fn mediator_step(
    flat: &Ctx,
    shape: &TransforShape,
    i: usize,
    r: usize,
    visible_med: impl Fn(usize) -> bool,
) -> Result<()> {
    let rows = shape.rows;
    let odd = shape.col_start(2 * i - 1);
    let even = shape.col_start(2 * i);
    let med = shape.col_start(2 * i + 1);

    let x = flat.var(odd + r)?.clone();
    let x_ty = flat.ty(odd + r)?.clone();
    let dup = flat.var(even + r)?.clone();
    let dup_ty = flat.ty(even + r)?.clone();
    let expected = transport(&x_ty, flat, odd, even, rows)?;
    if dup_ty != expected {
        return Err(CheckError::DuplicateTypeMismatch {
            ident: dup.ident.to_string(),
            expected: print::ty(&expected),
            found: print::ty(&dup_ty),
        });
    }

    let m_pos = med + r;
    scope_check(flat, m_pos, visible_med)?;
    let m_ty = flat.ty(m_pos)?;
    let arr = m_ty.as_arrow().ok_or_else(|| CheckError::NotAnArrow {
        found: print::ty(m_ty),
    })?;
    let pi: Vec<VarName> = (0..r).map(|q| flat.var(med + q).cloned()).collect::<Result<_>>()?;
    check_delta_cond(flat, &arr.src, &arr.base, &x, &x_ty, None, &pi, BoundarySide::Target)?;
    check_delta_cond(flat, &arr.tgt, &arr.base, &dup, &dup_ty, None, &pi, BoundarySide::Source)?;
    Ok(())
}

fn stage_print(shape: &TransforShape, row_limit: &[usize]) -> String {
    let mut keep = Vec::new();
    let mut lens = Vec::new();
    if shape.has_apex {
        keep.extend(0..shape.diagram_len.min(row_limit[0]));
        lens.push(shape.diagram_len.min(row_limit[0]));
        keep.push(shape.diagram_len);
        lens.push(1);
    }
    for j in 1..=shape.columns() {
        let have = row_limit[if shape.has_apex { j } else { j - 1 }];
        let start = shape.col_start(j);
        keep.extend(start..start + have);
        lens.push(have);
    }
    match shape.flat.restrict(&keep) {
        Ok(stage) => print::ctx_seg(&stage, &lens),
        Err(_) => shape.print(),
    }
}

/// Recognize a Gray-product context from its segments.
pub fn check_gray(seg: &SegCtx, marks: &Marks) -> Result<(TransforShape, Derivation)> {
    let cols = seg.seg_lens.len();
    if cols < 3 || cols % 2 == 0 {
        return Err(CheckError::SegmentCount { min: 3, found: cols });
    }
    let level = (cols - 1) / 2;
    let rows = check_column_lengths(&seg.seg_lens)?;
    kernel::check_ctx(&seg.ctx, marks)?;

    let shape = TransforShape {
        flat: seg.ctx.clone(),
        diagram_len: 0,
        has_apex: false,
        level,
        rows,
    };

    let mut der = Derivation::leaf(
        format!("{} gray ()", print::ctx_seg(&Ctx::new(), &vec![0; cols])),
        "GrayEmpty",
    );
    for r in 0..rows {
        let visible = |w: usize| w < r;
        scope_check(&shape.flat, r, visible)?;
        let mut limits: Vec<usize> = vec![r; cols];
        limits[0] = r + 1;
        der = Derivation::node(
            format!(
                "{} pgray {}",
                stage_print(&shape, &limits),
                print::ctx(&shape.flat.prefix(r + 1))
            ),
            "GrayOpen",
            vec![der],
        );
        for i in 1..=level {
            let visible = |w: usize| {
                let col = w / rows + 1;
                let row = w % rows;
                (col <= 2 * i && row <= r) || (col == 2 * i + 1 && row < r)
            };
            mediator_step(&shape.flat, &shape, i, r, visible)?;
            for (j, l) in limits.iter_mut().enumerate() {
                if j < 2 * i + 1 {
                    *l = r + 1;
                }
            }
            der = Derivation::node(
                format!(
                    "{} pgray {}",
                    stage_print(&shape, &limits),
                    print::ctx(&shape.flat.prefix(r + 1))
                ),
                "GrayMed",
                vec![der],
            );
        }
    }
    der = Derivation::node(
        format!("{} gray {}", shape.print(), print::ctx(&shape.flat.prefix(rows))),
        "GrayClose",
        vec![der],
    );
    Ok((shape, der))
}

/// Recognize a conical transfor context: diagram, apex, then columns.
pub fn check_ctrf(seg: &SegCtx, marks: &Marks) -> Result<(TransforShape, Derivation)> {
    let cols = seg.seg_lens.len();
    if cols < 5 || cols % 2 == 0 {
        return Err(CheckError::SegmentCount { min: 5, found: cols });
    }
    let level = (cols - 3) / 2;
    if seg.seg_lens[1] != 1 {
        return Err(CheckError::ConeShapeMismatch {
            reason: "the apex segment must hold exactly one variable".into(),
        });
    }
    let mut column_lens = vec![seg.seg_lens[0]];
    column_lens.extend_from_slice(&seg.seg_lens[2..]);
    let rows = check_column_lengths(&column_lens)?;
    kernel::check_ctx(&seg.ctx, marks)?;

    let shape = TransforShape {
        flat: seg.ctx.clone(),
        diagram_len: rows,
        has_apex: true,
        level,
        rows,
    };
    let apex = shape.apex().expect("apex present");
    if shape.flat.ty(apex.pos)? != &Ty::Obj {
        return Err(CheckError::ConeShapeMismatch {
            reason: format!("apex `{}` must be of type Ob", apex.ident),
        });
    }

    // diagram, apex and the first column must form a cone; its recognizer
    // enforces exactly the per-row visibility the opening rule demands
    let diagram = shape.diagram();
    let kprefix = shape.flat.prefix(2 * rows + 1);
    let (_cone, cone_der) = check_cone(&kprefix, &diagram, marks)?;

    let mut der = Derivation::node(
        format!("(() | {} : Ob | ...) ctrf ((); {})", apex.ident, apex.ident),
        "CtrfEmpty",
        vec![],
    );
    let mut cone_premise = Some(cone_der);
    for r in 0..rows {
        // limits[0] covers the diagram, limits[j] column j
        let mut limits = vec![r; 1 + shape.columns()];
        limits[0] = r + 1;
        limits[1] = r + 1;
        let mut premises = vec![der];
        if let Some(cd) = cone_premise.take() {
            premises.push(cd);
        }
        der = Derivation::node(
            format!(
                "{} pctrf ({}; {})",
                stage_print(&shape, &limits),
                print::ctx(&diagram.prefix(r + 1)),
                apex.ident
            ),
            "CtrfOpen",
            premises,
        );
        for i in 1..=level {
            let visible = |w: usize| {
                if w < shape.diagram_len {
                    return w <= r;
                }
                if w == shape.diagram_len {
                    return true;
                }
                let off = w - (shape.diagram_len + 1);
                let col = off / rows + 1;
                let row = off % rows;
                (col <= 2 * i && row <= r) || (col == 2 * i + 1 && row < r)
            };
            mediator_step(&shape.flat, &shape, i, r, visible)?;
            for (j, l) in limits.iter_mut().enumerate() {
                if (1..=2 * i + 1).contains(&j) {
                    *l = r + 1;
                }
            }
            der = Derivation::node(
                format!(
                    "{} pctrf ({}; {})",
                    stage_print(&shape, &limits),
                    print::ctx(&diagram.prefix(r + 1)),
                    apex.ident
                ),
                "CtrfMed",
                vec![der],
            );
        }
    }
    der = Derivation::node(
        format!(
            "{} ctrf ({}; {})",
            shape.print(),
            print::ctx(&diagram),
            apex.ident
        ),
        "CtrfClose",
        vec![der],
    );
    Ok((shape, der))
}

/// Build the Gray product of a globular diagram with the interval:
/// the diagram, a primed duplicate, and one mediator per variable.
pub fn synth_gray_1globe(diagram: &Ctx, marks: &Marks) -> Result<(TransforShape, Derivation)> {
    if !is_globular_ctx(diagram) {
        let offending = non_globular_witness(diagram)
            .map(|t| print::tm(&t))
            .unwrap_or_else(|| "<unknown>".into());
        return Err(CheckError::NotGlobular { offending });
    }
    kernel::check_ctx(diagram, marks)?;
    let n = diagram.len();
    let mut flat = diagram.clone();
    for i in 0..n {
        let (v, ty) = diagram.entry(i)?;
        // the duplicate's type references earlier duplicates, which are
        // already pushed, so the column shift is total here
        let shifted = transport(ty, &flat, 0, n, i)?;
        let ident = flat.fresh_ident(&format!("{}'", v.ident));
        flat.push(ident, shifted);
    }

    let mut proj_of: Vec<VarName> = Vec::with_capacity(n);
    for i in 0..n {
        let x = flat.var(i)?.clone();
        let dup = flat.var(n + i)?.clone();
        let d = flat.ty(i)?.dim();
        let ty = if d == 0 {
            Ty::arrow(Ty::Obj, Tm::var(&x), Tm::var(&dup))
        } else {
            let mut lhs = Tm::var(&x);
            for k in (1..=d).rev() {
                let tv = boundary_var(&flat, &x, k, BoundarySide::Target)?;
                let unit =
                    catalog::iterated_identity(Tm::Var(proj_of[tv.pos].clone()), k - 1, &flat)?;
                lhs = catalog::comp_term(lhs, unit, d, d - k, &flat)?;
            }
            let mut rhs = Tm::var(&dup);
            for k in (1..=d).rev() {
                let sv = boundary_var(&flat, &x, k, BoundarySide::Source)?;
                let unit =
                    catalog::iterated_identity(Tm::Var(proj_of[sv.pos].clone()), k - 1, &flat)?;
                rhs = catalog::comp_term(unit, rhs, d, d - k, &flat)?;
            }
            let base = crate::syntax::ty_of(&lhs, &flat)?;
            Ty::arrow(base, lhs, rhs)
        };
        let ident = flat.fresh_ident(&format!("p_{}", x.ident));
        let p = flat.push(ident, ty);
        proj_of.push(p);
    }

    let seg = SegCtx::new(flat, vec![n, n, n])?;
    check_gray(&seg, marks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marks() -> Marks {
        Marks::new()
    }

    #[test]
    fn empty_gray_product() {
        let seg = SegCtx::new(Ctx::new(), vec![0, 0, 0]).unwrap();
        let (shape, _) = check_gray(&seg, &marks()).unwrap();
        assert_eq!(shape.rows, 0);
        assert_eq!(shape.level, 1);
    }

    #[test]
    fn even_segment_count_is_rejected() {
        let seg = SegCtx::new(Ctx::new(), vec![0, 0]).unwrap();
        assert!(matches!(
            check_gray(&seg, &marks()),
            Err(CheckError::SegmentCount { .. })
        ));
    }

    #[test]
    fn interval_gray_product_over_the_two_globe() {
        let g2 = catalog::globe(2);
        let (shape, _) = synth_gray_1globe(&g2, &marks()).unwrap();
        assert_eq!(
            shape.print(),
            "(x : Ob, y : Ob, f : x -> y, g : x -> y, α : f -> g | \
             x' : Ob, y' : Ob, f' : x' -> y', g' : x' -> y', α' : f' -> g' | \
             p_x : x -> x', p_y : y -> y', \
             p_f : (f *^1_0 p_y) -> (p_x *^1_0 f'), \
             p_g : (g *^1_0 p_y) -> (p_x *^1_0 g'), \
             p_α : ((α *^2_0 1_(p_y)) *^2_1 p_g) -> (p_f *^2_1 (1_(p_x) *^2_0 α')))"
        );
    }

    #[test]
    fn synthesis_recognizes_for_small_globes() {
        for d in 0..=3 {
            let g = catalog::globe(d);
            synth_gray_1globe(&g, &marks()).unwrap();
        }
    }

    #[test]
    fn premature_close_is_reported() {
        let g1 = catalog::globe(1);
        let (shape, _) = synth_gray_1globe(&g1, &marks()).unwrap();
        // drop the last mediator: |M_1| = 3, |M_3| = 2
        let trunc = shape.flat.prefix(shape.flat.len() - 1);
        let seg = SegCtx::new(trunc, vec![3, 3, 2]).unwrap();
        assert!(matches!(
            check_gray(&seg, &marks()),
            Err(CheckError::PrematureClose { first: 3, last: 2 })
        ));
    }

    #[test]
    fn duplicate_with_wrong_type_is_rejected() {
        // f' repeats f's type verbatim instead of the column-shifted one
        let mut flat = Ctx::new();
        let x = flat.push("x", Ty::Obj);
        let y = flat.push("y", Ty::Obj);
        flat.push("f", Ty::arrow(Ty::Obj, Tm::Var(x.clone()), Tm::Var(y.clone())));
        let x2 = flat.push("x'", Ty::Obj);
        let y2 = flat.push("y'", Ty::Obj);
        flat.push("f'", Ty::arrow(Ty::Obj, Tm::Var(x.clone()), Tm::Var(y.clone())));
        flat.push("p_x", Ty::arrow(Ty::Obj, Tm::Var(x.clone()), Tm::Var(x2.clone())));
        flat.push("p_y", Ty::arrow(Ty::Obj, Tm::Var(y.clone()), Tm::Var(y2.clone())));
        let f = flat.var(2).unwrap().clone();
        let lhs = catalog::comp_term(Tm::Var(f), Tm::var(flat.var(7).unwrap()), 1, 0, &flat).unwrap();
        let base = crate::syntax::ty_of(&lhs, &flat).unwrap();
        flat.push("p_f", Ty::arrow(base, lhs.clone(), lhs));
        let seg = SegCtx::new(flat, vec![3, 3, 3]).unwrap();
        assert!(matches!(
            check_gray(&seg, &marks()),
            Err(CheckError::DuplicateTypeMismatch { .. })
        ));
    }

    #[test]
    fn trivial_conical_two_transfor() {
        let mut ctx = Ctx::new();
        ctx.push("c", Ty::Obj);
        let seg = SegCtx::new(ctx, vec![0, 1, 0, 0, 0]).unwrap();
        let (shape, _) = check_ctrf(&seg, &marks()).unwrap();
        assert_eq!(shape.level, 1);
        assert_eq!(shape.rows, 0);
        assert!(shape.has_apex);
    }

    #[test]
    fn ctrf_close_guard() {
        let mut ctx = Ctx::new();
        let x = ctx.push("x", Ty::Obj);
        ctx.push("c", Ty::Obj);
        let c = ctx.var(1).unwrap().clone();
        ctx.push("p_x", Ty::arrow(Ty::Obj, Tm::Var(c), Tm::Var(x)));
        // M_2 and M_3 left empty while M_1 has one row
        let seg = SegCtx::new(ctx, vec![1, 1, 1, 0, 0]).unwrap();
        assert!(matches!(
            check_ctrf(&seg, &marks()),
            Err(CheckError::PrematureClose { first: 1, last: 0 })
        ));
    }
}
