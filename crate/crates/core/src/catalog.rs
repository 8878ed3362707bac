//! Builders for the standard contexts and terms: globes, binary
//! composition schemes, iterated units, hom-globes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{BoundarySide, CheckError, Result};
use crate::print;
use crate::syntax::{dim_tm, src_iter, tgt_iter, ty_of, Ctx, Schema, Sub, Tm, Ty, VarName};

const LETTERS: [&[&str]; 4] = [
    &["x", "y", "z", "w", "v", "u"],
    &["f", "g", "h", "k", "l", "m"],
    &["α", "β", "γ", "δ", "ε", "ζ"],
    &["A", "B", "C", "D", "E", "F"],
];

/// Deterministic per-dimension letter sequence for generated contexts.
pub fn dim_letter(dim: usize, idx: usize) -> String {
    match LETTERS.get(dim) {
        Some(table) if idx < table.len() => table[idx].to_string(),
        _ => format!("c{dim}_{}", idx + 1),
    }
}

struct Namer {
    counts: Vec<usize>,
}

impl Namer {
    fn new() -> Self {
        Namer { counts: vec![] }
    }

    fn next(&mut self, dim: usize) -> String {
        if self.counts.len() <= dim {
            self.counts.resize(dim + 1, 0);
        }
        let idx = self.counts[dim];
        self.counts[dim] += 1;
        dim_letter(dim, idx)
    }
}

thread_local! {
    static GLOBES: RefCell<HashMap<usize, Ctx>> = RefCell::new(HashMap::new());
    static SCHEMES: RefCell<HashMap<(usize, usize), Arc<Schema>>> = RefCell::new(HashMap::new());
    static UNITS: RefCell<HashMap<(usize, usize), Arc<Schema>>> = RefCell::new(HashMap::new());
}

/// The d-dimensional globe as a pasting context: 2d+1 entries, one
/// parallel pair per level and a top cell.
pub fn globe(d: usize) -> Ctx {
    GLOBES.with(|cache| {
        if let Some(c) = cache.borrow().get(&d) {
            return c.clone();
        }
        let c = build_globe(d);
        cache.borrow_mut().insert(d, c.clone());
        c
    })
}

fn build_globe(d: usize) -> Ctx {
    let mut ctx = Ctx::new();
    let mut namer = Namer::new();
    let mut level_ty = Ty::Obj;
    for k in 0..d {
        let s = ctx.push(namer.next(k), level_ty.clone());
        let t = ctx.push(namer.next(k), level_ty.clone());
        level_ty = Ty::arrow(level_ty, Tm::Var(s), Tm::Var(t));
    }
    ctx.push(namer.next(d), level_ty);
    ctx
}

/// The top cell of `globe(d)`.
pub fn globe_top(d: usize) -> VarName {
    globe(d).var(2 * d).expect("globe top").clone()
}

/// The composition scheme with two d-cells glued along an n-boundary,
/// derived by (PSS)(PSE)^d(PSD)^{d-n}(PSE)^{d-n}.
pub fn comp_scheme(d: usize, n: usize) -> Result<Ctx> {
    if d <= n {
        return Err(CheckError::Internal(format!(
            "composition scheme needs d > n, got d = {d}, n = {n}"
        )));
    }
    let mut ctx = Ctx::new();
    let mut namer = Namer::new();
    let mut level_ty = Ty::Obj;
    for k in 0..d {
        let s = ctx.push(namer.next(k), level_ty.clone());
        let t = ctx.push(namer.next(k), level_ty.clone());
        level_ty = Ty::arrow(level_ty, Tm::Var(s), Tm::Var(t));
    }
    let top = ctx.push(namer.next(d), level_ty);

    // descend to the level-n focus, then extend with a fresh tower
    let mut focus = top;
    let mut focus_ty = ctx.ty(focus.pos)?.clone();
    for _ in 0..(d - n) {
        let arr = focus_ty.as_arrow().expect("descent stays above dimension 0");
        let tgt = arr.tgt.as_var().expect("globe targets are variables").clone();
        focus_ty = ctx.ty(tgt.pos)?.clone();
        focus = tgt;
    }
    for step in 0..(d - n) {
        let lvl = n + step;
        let w = ctx.push(namer.next(lvl), focus_ty.clone());
        let cell_ty = Ty::arrow(focus_ty.clone(), Tm::var(&focus), Tm::Var(w.clone()));
        let cell = ctx.push(namer.next(lvl + 1), cell_ty.clone());
        focus = cell;
        focus_ty = cell_ty;
    }
    Ok(ctx)
}

/// The operation head for `*^d_n`, with its boundary type over the scheme.
pub fn comp_schema(d: usize, n: usize) -> Result<Arc<Schema>> {
    if let Some(hit) = SCHEMES.with(|c| c.borrow().get(&(d, n)).cloned()) {
        return Ok(hit);
    }
    let ps = comp_scheme(d, n)?;
    let top = ps.var(2 * d)?.clone();
    let last = ps.var(ps.len() - 1)?.clone();
    let ty = if d == n + 1 {
        let base = ps.ty(2 * n)?.clone();
        let src = ps.var(2 * n)?.clone();
        let tgt = ps.var(2 * d + 1)?.clone();
        Ty::arrow(base, Tm::Var(src), Tm::Var(tgt))
    } else {
        let top_arr = ps.ty(top.pos)?.as_arrow().expect("top is a cell").clone();
        let last_arr = ps.ty(last.pos)?.as_arrow().expect("appended top is a cell").clone();
        let s = comp_term(top_arr.src.clone(), last_arr.src.clone(), d - 1, n, &ps)?;
        let t = comp_term(top_arr.tgt.clone(), last_arr.tgt.clone(), d - 1, n, &ps)?;
        let base = ty_of(&s, &ps)?;
        Ty::arrow(base, s, t)
    };
    let schema = Arc::new(Schema { ps, ty });
    SCHEMES.with(|c| c.borrow_mut().insert((d, n), schema.clone()));
    Ok(schema)
}

/// Binary composite `u *^d_n v`; both arguments must be d-cells whose
/// boundaries agree at codimension d-n.
pub fn comp_term(u: Tm, v: Tm, d: usize, n: usize, ctx: &Ctx) -> Result<Tm> {
    let du = dim_tm(&u, ctx)?;
    let dv = dim_tm(&v, ctx)?;
    if du != d || dv != d || d <= n {
        return Err(CheckError::NotComposable {
            upper: print::tm(&u),
            lower: print::tm(&v),
            codim: d.saturating_sub(n),
        });
    }
    let cod = tgt_iter(&u, d - n, ctx)?;
    let dom = src_iter(&v, d - n, ctx)?;
    if cod != dom {
        return Err(CheckError::NotComposable {
            upper: print::tm(&u),
            lower: print::tm(&v),
            codim: d - n,
        });
    }
    let schema = comp_schema(d, n)?;
    let mut terms = Vec::with_capacity(schema.ps.len());
    for k in 0..d {
        terms.push(src_iter(&u, d - k, ctx)?);
        terms.push(tgt_iter(&u, d - k, ctx)?);
    }
    terms.push(u);
    for j in 1..=(d - n) {
        terms.push(tgt_iter(&v, d - (n + j - 1), ctx)?);
        terms.push(src_iter(&v, d - (n + j), ctx)?);
    }
    let target = schema.ps.clone();
    Ok(Tm::Op(schema, Sub::new(terms, target)))
}

/// The coherence head for the n-fold unit on a d-cell.
pub fn unit_schema(d: usize, k: usize) -> Result<Arc<Schema>> {
    if k == 0 {
        return Err(CheckError::Internal("unit iterate must be at least 1".into()));
    }
    if let Some(hit) = UNITS.with(|c| c.borrow().get(&(d, k)).cloned()) {
        return Ok(hit);
    }
    let ps = globe(d);
    let top = Tm::Var(globe_top(d));
    let inner = iterated_identity(top, k - 1, &ps)?;
    let base = ty_of(&inner, &ps)?;
    let ty = Ty::arrow(base, inner.clone(), inner);
    let schema = Arc::new(Schema { ps, ty });
    UNITS.with(|c| c.borrow_mut().insert((d, k), schema.clone()));
    Ok(schema)
}

/// `1^n_t`; the 0-fold unit is the term itself.
pub fn iterated_identity(t: Tm, n: usize, ctx: &Ctx) -> Result<Tm> {
    if n == 0 {
        return Ok(t);
    }
    let d = dim_tm(&t, ctx)?;
    let schema = unit_schema(d, n)?;
    let sub = globe_sub(&t, ctx)?;
    Ok(Tm::Coh(schema, sub))
}

/// The context morphism classifying a d-cell: its full boundary tower
/// followed by the cell, targeting `globe(d)`.
pub fn globe_sub(t: &Tm, ctx: &Ctx) -> Result<Sub> {
    let d = dim_tm(t, ctx)?;
    let mut terms = Vec::with_capacity(2 * d + 1);
    for k in 0..d {
        terms.push(src_iter(t, d - k, ctx)?);
        terms.push(tgt_iter(t, d - k, ctx)?);
    }
    terms.push(t.clone());
    Ok(Sub::new(terms, globe(d)))
}

/// Extend `ambient` with an n-globe of cells from `from` to `to` (both
/// 0-cells of `ambient`): parallel pairs below the top, then a single top
/// cell, which is returned.
pub fn hom_globe(ambient: &Ctx, from: &VarName, to: &VarName, n: usize) -> Result<(Ctx, VarName)> {
    if n == 0 {
        return Err(CheckError::Internal("hom globe needs level >= 1".into()));
    }
    for v in [from, to] {
        if ambient.ty(v.pos)? != &Ty::Obj {
            return Err(CheckError::TypeMismatch {
                term: v.ident.to_string(),
                expected: "Ob".into(),
                found: print::ty(ambient.ty(v.pos)?),
            });
        }
    }
    let mut ctx = ambient.clone();
    let mut level_ty = Ty::arrow(Ty::Obj, Tm::var(from), Tm::var(to));
    for k in 1..n {
        let s_name = ctx.fresh_ident(&dim_letter(k, 0));
        let s = ctx.push(s_name, level_ty.clone());
        let t_name = ctx.fresh_ident(&dim_letter(k, 1));
        let t = ctx.push(t_name, level_ty.clone());
        level_ty = Ty::arrow(level_ty, Tm::Var(s), Tm::Var(t));
    }
    let top_name = ctx.fresh_ident(&dim_letter(n, 0));
    let top = ctx.push(top_name, level_ty);
    Ok((ctx, top))
}

/// Does this head denote a binary composition, and at which (d, n)?
pub fn recognize_comp(schema: &Schema) -> Option<(usize, usize)> {
    let d = schema.ty.dim();
    let len = schema.ps.len();
    if d == 0 || len < 2 * d + 1 + 2 {
        return None;
    }
    let appended = len - (2 * d + 1);
    if appended % 2 != 0 || appended / 2 > d {
        return None;
    }
    let n = d - appended / 2;
    match comp_schema(d, n) {
        Ok(canon) => (*canon == *schema).then_some((d, n)),
        Err(_) => None,
    }
}

/// Does this head denote an iterated unit, and how many times iterated?
pub fn recognize_identity(schema: &Schema) -> Option<usize> {
    let len = schema.ps.len();
    if len % 2 == 0 {
        return None;
    }
    let g = (len - 1) / 2;
    if schema.ps != globe(g) {
        return None;
    }
    let k = schema.ty.dim().checked_sub(g)?;
    if k == 0 {
        return None;
    }
    match unit_schema(g, k) {
        Ok(canon) => (*canon == *schema).then_some(k),
        Err(_) => None,
    }
}

/// Boundary variable of a globular context variable (σ^m / τ^m as a
/// variable of the same context).
pub fn boundary_var_of(ctx: &Ctx, v: &VarName, m: usize, side: BoundarySide) -> Result<VarName> {
    crate::syntax::boundary_var(ctx, v, m, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pasting::check_ps;

    #[test]
    fn globe_zero_is_a_point() {
        let c = globe(0);
        assert_eq!(c.len(), 1);
        assert_eq!(print::ctx(&c), "(x : Ob)");
    }

    #[test]
    fn globe_one_unfolds_once() {
        assert_eq!(print::ctx(&globe(1)), "(x : Ob, y : Ob, f : x -> y)");
    }

    #[test]
    fn globes_are_pasting_contexts() {
        for d in 0..=4 {
            let c = globe(d);
            assert_eq!(c.len(), 2 * d + 1);
            assert_eq!(c.dim(), d);
            check_ps(&c).unwrap();
        }
    }

    #[test]
    fn vertical_composition_scheme_prints_like_the_display() {
        let c = comp_scheme(2, 1).unwrap();
        assert_eq!(
            print::ctx(&c),
            "(x : Ob, y : Ob, f : x -> y, g : x -> y, α : f -> g, h : x -> y, β : g -> h)"
        );
    }

    #[test]
    fn schemes_are_pasting_contexts() {
        for d in 1..=4 {
            for n in 0..d {
                let c = comp_scheme(d, n).unwrap();
                check_ps(&c).unwrap();
                assert_eq!(c.len(), 2 * d + 1 + 2 * (d - n));
            }
        }
    }

    #[test]
    fn scheme_requires_d_above_n() {
        assert!(comp_scheme(1, 1).is_err());
    }

    #[test]
    fn one_dimensional_composite() {
        let c = globe(1);
        // not composable: f with itself unless endpoints line up
        let f = Tm::var(c.var(2).unwrap());
        assert!(matches!(
            comp_term(f.clone(), f, 1, 0, &c),
            Err(CheckError::NotComposable { .. })
        ));
    }

    #[test]
    fn composite_over_the_scheme_itself() {
        let c = comp_scheme(1, 0).unwrap();
        let f = Tm::var(c.var(2).unwrap());
        let g = Tm::var(c.var(4).unwrap());
        let t = comp_term(f, g, 1, 0, &c).unwrap();
        assert_eq!(print::tm(&t), "(f *^1_0 g)");
        let ty = ty_of(&t, &c).unwrap();
        assert_eq!(print::ty(&ty), "x -> z");
    }

    #[test]
    fn zero_fold_unit_is_the_term() {
        let c = globe(0);
        let x = Tm::var(c.var(0).unwrap());
        assert_eq!(iterated_identity(x.clone(), 0, &c).unwrap(), x);
    }

    #[test]
    fn unit_prints_and_types() {
        let c = globe(0);
        let x = Tm::var(c.var(0).unwrap());
        let one = iterated_identity(x, 1, &c).unwrap();
        assert_eq!(print::tm(&one), "1_(x)");
        assert_eq!(print::ty(&ty_of(&one, &c).unwrap()), "x -> x");
        let two = iterated_identity(Tm::var(c.var(0).unwrap()), 2, &c).unwrap();
        assert_eq!(print::tm(&two), "1^2_(x)");
        assert_eq!(print::ty(&ty_of(&two, &c).unwrap()), "1_(x) -> 1_(x)");
    }

    #[test]
    fn hom_globe_shapes() {
        let mut amb = Ctx::new();
        let c = amb.push("c", Ty::Obj);
        let c2 = amb.push("c'", Ty::Obj);
        let (g1, top1) = hom_globe(&amb, &c2, &c, 1).unwrap();
        assert_eq!(g1.len(), 3);
        assert_eq!(print::ty(g1.ty(top1.pos).unwrap()), "c' -> c");
        let (g2, top2) = hom_globe(&amb, &c2, &c, 2).unwrap();
        assert_eq!(g2.len(), 5);
        assert_eq!(print::ty(g2.ty(top2.pos).unwrap()), "f -> g");
        let (g3, _) = hom_globe(&amb, &c2, &c, 3).unwrap();
        assert_eq!(g3.len(), 7);
        assert_eq!(g3.ty(6).unwrap().dim(), 3);
    }

    #[test]
    fn recognizers_round_trip() {
        for d in 1..=3 {
            for n in 0..d {
                let sch = comp_schema(d, n).unwrap();
                assert_eq!(recognize_comp(&sch), Some((d, n)));
                assert_eq!(recognize_identity(&sch), None);
            }
        }
        for d in 0..=2 {
            for k in 1..=2 {
                let sch = unit_schema(d, k).unwrap();
                assert_eq!(recognize_identity(&sch), Some(k));
                assert_eq!(recognize_comp(&sch), None);
            }
        }
    }
}
