//! Universal cones, the extension judgment, postcomposition with a cone,
//! the universal-property term constructors, and coinductive invertibility.
//!
//! The tracked context morphism is canonical: the diagram maps to itself,
//! every cone variable to its `ucone` cell, and past the cone the whisk
//! source is covered variable by variable, a fresh copy for everything
//! before the focus and a `uni` cell for the focus and everything after.
//! Nodes carry their full site, so checking them is re-verification.

use std::collections::HashSet;
use std::sync::Arc;

use crate::cones::{check_cone, ConeShape};
use crate::derivation::Derivation;
use crate::error::{CheckError, Result};
use crate::kernel;
use crate::print;
use crate::syntax::{fv_ty, subst_tm, subst_ty, src_iter, tgt_iter, ty_of, Ctx, Sub, Tm, Ty, VarName};
use crate::transfors::{check_ctrf, SegCtx, TransforShape};
use crate::{catalog, syntax};

/// Terms marked invertible within one checking session.
#[derive(Debug, Clone, Default)]
pub struct Marks {
    set: HashSet<Tm>,
}

impl Marks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, t: &Tm) -> bool {
        self.set.contains(t)
    }

    pub fn insert(&mut self, t: Tm) {
        self.set.insert(t);
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// The data a universal-cone cell is introduced over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UconeSite {
    pub diagram: Ctx,
    pub cone: ConeShape,
}

/// The data a universal-property cell is introduced over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniSite {
    pub diagram: Ctx,
    pub cone: ConeShape,
    pub transfor: TransforShape,
    pub whisk: WhiskData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WhiskMode {
    Pstar,
    Whisk,
}

/// A recognized postcomposition judgment: the source context, the
/// morphism into the transfor, and the focus cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WhiskData {
    pub source: Ctx,
    pub terms: Sub,
    pub cone: ConeShape,
    pub alpha: VarName,
    pub mode: WhiskMode,
}

/// A tracked morphism out of a source context into a growing prefix of a
/// cone (or whisk-source) context.
#[derive(Clone, Debug)]
pub struct UniMorphism {
    pub source: Ctx,
    pub terms: Sub,
    pub site: Arc<UconeSite>,
}

// ---------------------------------------------------------------------------
// canonical tracked morphisms

/// `⟨id_Γ, lim, up_1, ..⟩` cut off before cone position `upto`.
pub fn kappa_prefix(site: &Arc<UconeSite>, upto: usize) -> Result<Sub> {
    let n = site.diagram.len();
    if upto > site.cone.kctx.len() {
        return Err(CheckError::Internal("cone prefix out of range".into()));
    }
    let mut terms = Vec::with_capacity(upto);
    for i in 0..upto.min(n) {
        terms.push(Tm::Var(site.diagram.var(i)?.clone()));
    }
    for pos in n..upto {
        terms.push(Tm::UCone(
            site.clone(),
            site.cone.kctx.var(pos)?.clone(),
            Sub::identity(&site.diagram),
        ));
    }
    Ok(Sub::new(terms, site.cone.kctx.prefix(upto)))
}

/// Replay the tracked morphism for `site` through the whisk source up to
/// (excluding) position `upto`; returns the source context and entries.
fn canonical_track(site: &Arc<UniSite>, upto: usize) -> Result<(Ctx, Vec<Tm>)> {
    let w = &site.whisk.source;
    let klen = site.cone.kctx.len();
    if upto < klen || upto > w.len() {
        return Err(CheckError::Internal(format!(
            "tracked prefix must cover the cone: {upto} not in {klen}..={}",
            w.len()
        )));
    }
    let ucone_site = Arc::new(UconeSite { diagram: site.diagram.clone(), cone: site.cone.clone() });
    let mut omega = site.diagram.clone();
    let mut terms = kappa_prefix(&ucone_site, klen)?.terms;
    for pos in klen..upto {
        let wvar = w.var(pos)?;
        if pos < site.whisk.alpha.pos {
            let theta = Sub::new(terms.clone(), w.prefix(pos));
            let copy_ty = subst_ty(w.ty(pos)?, &theta)?;
            let ident = omega.fresh_ident(&wvar.ident);
            let v = omega.push(ident, copy_ty);
            terms.push(Tm::Var(v));
        } else {
            terms.push(Tm::Uni(site.clone(), wvar.clone(), Sub::identity(&omega)));
        }
    }
    Ok((omega, terms))
}

/// The canonical tracked morphism before whisk-source position `upto`.
pub fn theta_prefix(site: &Arc<UniSite>, upto: usize) -> Result<Sub> {
    let (_, terms) = canonical_track(site, upto)?;
    Ok(Sub::new(terms, site.whisk.source.prefix(upto)))
}

/// The canonical source context once the whole whisk source is covered.
pub fn final_source(site: &Arc<UniSite>) -> Result<Ctx> {
    Ok(canonical_track(site, site.whisk.source.len())?.0)
}

// ---------------------------------------------------------------------------
// kernel re-verification of limit cells

pub fn recheck_ucone(
    ambient: &Ctx,
    site: &Arc<UconeSite>,
    x: &VarName,
    sub: &Sub,
    marks: &Marks,
) -> Result<(Ty, Derivation)> {
    if site.cone.diagram != site.diagram {
        return Err(CheckError::ConeShapeMismatch {
            reason: "cell site carries a cone over a different diagram".into(),
        });
    }
    let (_, cone_der) = check_cone(&site.cone.kctx, &site.diagram, marks)?;
    let n = site.diagram.len();
    if x.pos < n || x.pos >= site.cone.kctx.len() {
        return Err(CheckError::ConeShapeMismatch {
            reason: format!("`{}` is not an apex or projection of the cone", x.ident),
        });
    }
    let sub_der = kernel::check_sub(ambient, sub, &site.diagram, marks)?;
    let kappa = kappa_prefix(site, x.pos)?;
    let ty = subst_ty(&subst_ty(site.cone.kctx.ty(x.pos)?, &kappa)?, sub)?;
    let tm = Tm::UCone(site.clone(), x.clone(), sub.clone());
    let der = Derivation::node(
        print::judg_tm(ambient, &tm, &ty),
        "UCONE",
        vec![cone_der, sub_der.derivation],
    );
    Ok((ty, der))
}

pub fn recheck_uni(
    ambient: &Ctx,
    site: &Arc<UniSite>,
    x: &VarName,
    sub: &Sub,
    marks: &Marks,
) -> Result<(Ty, Derivation)> {
    let (_, cone_der) = check_cone(&site.cone.kctx, &site.diagram, marks)?;
    let seg = SegCtx::new(site.transfor.flat.clone(), site.transfor.seg_lens())?;
    let (_, ctrf_der) = check_ctrf(&seg, marks)?;
    let (_, whisk_der) = check_whisk(
        &site.whisk.source,
        &site.cone,
        &site.whisk.alpha,
        &site.whisk.terms,
        &site.transfor,
        marks,
    )?;
    if x.pos < site.cone.kctx.len() || x.pos >= site.whisk.source.len() {
        return Err(CheckError::WrongZone {
            rule: "UNI".into(),
            var: x.ident.to_string(),
            zone: "cone".into(),
        });
    }
    if x.pos < site.whisk.alpha.pos {
        return Err(CheckError::WrongZone {
            rule: "UNI".into(),
            var: x.ident.to_string(),
            zone: "pre-focus".into(),
        });
    }
    let (omega, _) = canonical_track(site, site.whisk.source.len())?;
    let sub_der = kernel::check_sub(ambient, sub, &omega, marks)?;
    let theta = theta_prefix(site, x.pos)?;
    let ty = subst_ty(&subst_ty(site.whisk.source.ty(x.pos)?, &theta)?, sub)?;
    let tm = Tm::Uni(site.clone(), x.clone(), sub.clone());
    let der = Derivation::node(
        print::judg_tm(ambient, &tm, &ty),
        "UNI",
        vec![cone_der, ctrf_der, whisk_der, sub_der.derivation],
    );
    Ok((ty, der))
}

// ---------------------------------------------------------------------------
// the extension judgment

/// `Δ ⊢_Γ x : A` holds exactly when Δ is Γ, x : A, Δ'.
pub fn check_extension(delta: &Ctx, gamma: &Ctx, x: &VarName) -> Result<Derivation> {
    if delta.len() <= gamma.len() {
        return Err(CheckError::ExtensionMismatch {
            reason: "the extension has no entry after the base".into(),
        });
    }
    for i in 0..gamma.len() {
        if delta.ty(i)? != gamma.ty(i)? {
            return Err(CheckError::ExtensionMismatch {
                reason: format!(
                    "entry {} differs from the base: `{}` vs `{}`",
                    i + 1,
                    print::ty(delta.ty(i)?),
                    print::ty(gamma.ty(i)?)
                ),
            });
        }
    }
    if x.pos != gamma.len() {
        return Err(CheckError::ExtensionMismatch {
            reason: format!("`{}` is not the entry right after the base", x.ident),
        });
    }
    let x_ty = delta.ty(x.pos)?;
    let mut der = Derivation::leaf(
        format!(
            "{} |-[{}] {} : {}",
            print::ctx(&delta.prefix(gamma.len() + 1)),
            print::ctx(gamma),
            x.ident,
            print::ty(x_ty)
        ),
        "ExtBase",
    );
    for i in gamma.len() + 1..=delta.len() {
        if i == delta.len() {
            break;
        }
        der = Derivation::node(
            format!(
                "{} |-[{}] {} : {}",
                print::ctx(&delta.prefix(i + 1)),
                print::ctx(gamma),
                x.ident,
                print::ty(x_ty)
            ),
            "ExtStep",
            vec![der],
        );
    }
    Ok(der)
}

// ---------------------------------------------------------------------------
// universal cone

/// One universal-cone cell over a substitution into the diagram; the
/// canonical tracked morphism must already cover everything before it.
pub fn ucone_term(
    site: &Arc<UconeSite>,
    x: &VarName,
    sub: Sub,
    tracked_upto: usize,
) -> Result<Tm> {
    if x.pos < site.diagram.len() || x.pos >= site.cone.kctx.len() {
        return Err(CheckError::ConeShapeMismatch {
            reason: format!("`{}` is not an apex or projection of the cone", x.ident),
        });
    }
    if x.pos > tracked_upto {
        return Err(CheckError::UntrackedDependency { var: x.ident.to_string() });
    }
    Ok(Tm::UCone(site.clone(), x.clone(), sub))
}

/// Iterate the universal-cone constructor over the apex and every
/// projection, ending in the full tracked morphism into the cone.
pub fn build_ucone(cone: &ConeShape, marks: &Marks) -> Result<(UniMorphism, Derivation)> {
    let diagram = cone.diagram.clone();
    check_cone(&cone.kctx, &diagram, marks)?;
    let site = Arc::new(UconeSite { diagram: diagram.clone(), cone: cone.clone() });
    let mut terms = diagram.identity_sub().terms;
    let mut der = Derivation::leaf(
        format!(
            "{} |-uni {} : {}",
            print::ctx(&diagram),
            print::sub(&Sub::new(terms.clone(), diagram.clone())),
            print::ctx(&diagram)
        ),
        "UniId",
    );
    for pos in diagram.len()..cone.kctx.len() {
        let x = cone.kctx.var(pos)?.clone();
        let tm = ucone_term(&site, &x, Sub::identity(&diagram), pos)?;
        terms.push(tm);
        der = Derivation::node(
            format!(
                "{} |-uni {} : {}",
                print::ctx(&diagram),
                print::sub(&Sub::new(terms.clone(), cone.kctx.prefix(pos + 1))),
                print::ctx(&cone.kctx.prefix(pos + 1))
            ),
            "UniCone",
            vec![der],
        );
    }
    let kappa = Sub::new(terms, cone.kctx.clone());
    kernel::check_sub(&diagram, &kappa, &cone.kctx, marks)?;
    Ok((UniMorphism { source: diagram, terms: kappa, site }, der))
}

// ---------------------------------------------------------------------------
// postcomposition with a cone

/// Incremental construction of the whisk source: the cone, a fresh apex,
/// the boundary of the hom-globe, a fresh block, the focus, a fresh block.
pub struct WhiskBuilder {
    cone: ConeShape,
    shape: TransforShape,
    w: Ctx,
    new_apex: VarName,
    alpha_ty: Ty,
    alpha_ident: String,
    low_composites: Vec<Tm>,
    q_block: Vec<VarName>,
}

impl WhiskBuilder {
    pub fn start(cone: &ConeShape, shape: &TransforShape) -> Result<WhiskBuilder> {
        if !shape.has_apex {
            return Err(CheckError::WhiskShape {
                reason: "postcomposition needs a conical transfor".into(),
            });
        }
        if shape.diagram() != cone.diagram {
            return Err(CheckError::WhiskShape {
                reason: "the transfor and the cone live over different diagrams".into(),
            });
        }
        let mut w = cone.kctx.clone();
        let apex_ident = w.fresh_ident(&format!("{}'", cone.apex.ident));
        let new_apex = w.push(apex_ident, Ty::Obj);
        let (with_globe, top) = catalog::hom_globe(&w, &new_apex, &cone.apex, shape.level)?;
        let alpha_ty = with_globe.ty(top.pos)?.clone();
        let alpha_ident = top.ident.to_string();
        let w = with_globe.prefix(with_globe.len() - 1);
        Ok(WhiskBuilder {
            cone: cone.clone(),
            shape: shape.clone(),
            w,
            new_apex,
            alpha_ty,
            alpha_ident,
            low_composites: vec![],
            q_block: vec![],
        })
    }

    /// The context the low-column composites are parsed over.
    pub fn pre_alpha_ctx(&self) -> &Ctx {
        &self.w
    }

    /// Number of composite terms expected below the focus columns.
    pub fn low_count(&self) -> usize {
        self.shape.rows * (2 * self.shape.level).saturating_sub(2)
    }

    /// Number of composite terms expected for the focus column.
    pub fn top_count(&self) -> usize {
        self.shape.rows
    }

    fn partial_w_sub(&self, extra: &[Tm]) -> Sub {
        let mut terms = Vec::new();
        for i in 0..self.shape.diagram_len {
            terms.push(Tm::Var(self.cone.kctx.var(i).expect("diagram prefix").clone()));
        }
        terms.push(Tm::var(&self.new_apex));
        terms.extend_from_slice(&self.low_composites);
        terms.extend_from_slice(extra);
        let upto = terms.len();
        Sub::new(terms, self.shape.flat.prefix(upto))
    }

    /// Install the composites for the columns before the fresh block, then
    /// append the fresh block and the focus cell.
    pub fn push_mid(&mut self, low: Vec<Tm>) -> Result<VarName> {
        if low.len() != self.low_count() {
            return Err(CheckError::WhiskShape {
                reason: format!(
                    "expected {} composite terms below the focus, got {}",
                    self.low_count(),
                    low.len()
                ),
            });
        }
        self.low_composites = low;
        let n = self.shape.level;
        let rows = self.shape.rows;
        // fresh block for column 2n-1
        for r in 0..rows {
            let slot = self.shape.row_pos(2 * n - 1, r);
            let w_sub = self.partial_w_sub(&self.q_block.iter().map(Tm::var).collect::<Vec<_>>());
            let ty = subst_ty(self.shape.flat.ty(slot)?, &w_sub)?;
            let ident = self
                .w
                .fresh_ident(&self.shape.flat.var(slot)?.ident);
            let v = self.w.push(ident, ty);
            self.q_block.push(v);
        }
        let alpha = self.w.push(self.w.fresh_ident(&self.alpha_ident), self.alpha_ty.clone());
        Ok(alpha)
    }

    /// The context the focus-column composites are parsed over.
    pub fn post_alpha_ctx(&self) -> &Ctx {
        &self.w
    }

    /// Install the focus-column composites, append the trailing fresh
    /// block, assemble the morphism and re-verify everything.
    pub fn finish(mut self, alpha: VarName, top: Vec<Tm>, marks: &Marks) -> Result<(WhiskData, Derivation)> {
        if top.len() != self.top_count() {
            return Err(CheckError::WhiskShape {
                reason: format!(
                    "expected {} composite terms for the focus column, got {}",
                    self.top_count(),
                    top.len()
                ),
            });
        }
        let n = self.shape.level;
        let rows = self.shape.rows;
        let mut terms = Vec::with_capacity(self.shape.flat.len());
        for i in 0..self.shape.diagram_len {
            terms.push(Tm::Var(self.cone.kctx.var(i)?.clone()));
        }
        terms.push(Tm::var(&self.new_apex));
        terms.extend(self.low_composites.iter().cloned());
        terms.extend(self.q_block.iter().map(Tm::var));
        terms.extend(top.iter().cloned());
        // trailing fresh block for column 2n+1
        for r in 0..rows {
            let slot = self.shape.row_pos(2 * n + 1, r);
            let w_sub = Sub::new(terms.clone(), self.shape.flat.prefix(terms.len()));
            let ty = subst_ty(self.shape.flat.ty(slot)?, &w_sub)?;
            let ident = self.w.fresh_ident(&self.shape.flat.var(slot)?.ident);
            let v = self.w.push(ident, ty);
            terms.push(Tm::Var(v));
        }
        let w_sub = Sub::new(terms, self.shape.flat.clone());
        check_whisk(&self.w, &self.cone, &alpha, &w_sub, &self.shape, marks)
    }
}

/// Recognize a postcomposition judgment: the source begins with the cone,
/// a fresh apex and the hom-globe; fresh columns map to the appended
/// variables in order, composite columns satisfy the boundary equations.
pub fn check_whisk(
    w_ctx: &Ctx,
    cone: &ConeShape,
    alpha: &VarName,
    w: &Sub,
    m: &TransforShape,
    marks: &Marks,
) -> Result<(WhiskData, Derivation)> {
    if !m.has_apex {
        return Err(CheckError::WhiskShape {
            reason: "postcomposition needs a conical transfor".into(),
        });
    }
    if m.diagram() != cone.diagram {
        return Err(CheckError::WhiskShape {
            reason: "the transfor and the cone live over different diagrams".into(),
        });
    }
    let n = m.level;
    let rows = m.rows;
    let klen = cone.kctx.len();
    let expected_len = klen + 2 * n + 2 * rows;
    if w_ctx.len() != expected_len {
        return Err(CheckError::WhiskShape {
            reason: format!("source has {} entries, expected {expected_len}", w_ctx.len()),
        });
    }
    kernel::check_ctx(w_ctx, marks)?;
    for i in 0..klen {
        if w_ctx.ty(i)? != cone.kctx.ty(i)? {
            return Err(CheckError::WhiskShape {
                reason: format!("source entry {} does not repeat the cone", i + 1),
            });
        }
    }
    let new_apex = w_ctx.var(klen)?.clone();
    if w_ctx.ty(klen)? != &Ty::Obj {
        return Err(CheckError::WhiskShape {
            reason: format!("`{}` must be a fresh apex of type Ob", new_apex.ident),
        });
    }
    // the hom-globe boundary sits right after the apex, the top at `alpha`
    let (expected_globe, expected_top) =
        catalog::hom_globe(&w_ctx.prefix(klen + 1), &new_apex, &cone.apex, n)?;
    for pos in klen + 1..klen + 2 * n - 1 {
        if w_ctx.ty(pos)? != expected_globe.ty(pos)? {
            return Err(CheckError::WhiskShape {
                reason: format!(
                    "entry `{}` does not continue the hom-globe: found `{}`, expected `{}`",
                    w_ctx.var(pos)?.ident,
                    print::ty(w_ctx.ty(pos)?),
                    print::ty(expected_globe.ty(pos)?)
                ),
            });
        }
    }
    let alpha_expected_pos = klen + 2 * n - 1 + rows;
    if alpha.pos != alpha_expected_pos {
        return Err(CheckError::WhiskShape {
            reason: format!(
                "focus `{}` must sit right before the trailing fresh block",
                alpha.ident
            ),
        });
    }
    if w_ctx.ty(alpha.pos)? != expected_globe.ty(expected_top.pos)? {
        return Err(CheckError::WhiskShape {
            reason: format!("focus `{}` does not close the hom-globe", alpha.ident),
        });
    }
    if w_ctx.ty(alpha.pos)?.dim() != n {
        return Err(CheckError::FocusDimMismatch {
            alpha_dim: w_ctx.ty(alpha.pos)?.dim(),
            level: n,
        });
    }

    if w.terms.len() != m.flat.len() || w.target != m.flat {
        return Err(CheckError::WhiskShape {
            reason: "the morphism does not target the transfor context".into(),
        });
    }
    let mut der = Derivation::leaf(
        format!(
            "{} |-pstar[{}; {}] {} : {}",
            print::ctx(w_ctx),
            print::ctx(&cone.kctx),
            alpha.ident,
            print::sub(&w.prefix(m.diagram_len + 1)),
            print::ctx(&m.flat.prefix(m.diagram_len + 1))
        ),
        "PStarBase",
    );
    for (i, t) in w.terms.iter().take(m.diagram_len).enumerate() {
        if t.as_var().map(|v| v.pos) != Some(i) {
            return Err(CheckError::WhiskShape {
                reason: format!("the diagram must map identically at entry {}", i + 1),
            });
        }
    }
    if w.terms[m.diagram_len] != Tm::var(&new_apex) {
        return Err(CheckError::WhiskShape {
            reason: "the transfor apex must map to the fresh apex".into(),
        });
    }

    let mut next_q = klen + 2 * n - 1;
    let mut next_r = alpha.pos + 1;
    for j in 1..=2 * n + 1 {
        for r in 0..rows {
            let slot = m.row_pos(j, r);
            let entry = &w.terms[slot];
            let expected_ty = subst_ty(m.flat.ty(slot)?, w)?;
            let fresh_col = j == 2 * n - 1 || j == 2 * n + 1;
            if fresh_col {
                let expected_pos = if j == 2 * n - 1 { next_q } else { next_r };
                match entry.as_var() {
                    Some(v) if v.pos == expected_pos => {}
                    _ => {
                        return Err(CheckError::WhiskShape {
                            reason: format!(
                                "column {j}, row {}: expected the fresh variable `{}`",
                                r + 1,
                                w_ctx.var(expected_pos)?.ident
                            ),
                        });
                    }
                }
                if w_ctx.ty(expected_pos)? != &expected_ty {
                    return Err(CheckError::WhiskShape {
                        reason: format!(
                            "fresh variable `{}` has type `{}`, expected `{}`",
                            w_ctx.var(expected_pos)?.ident,
                            print::ty(w_ctx.ty(expected_pos)?),
                            print::ty(&expected_ty)
                        ),
                    });
                }
                if j == 2 * n - 1 {
                    next_q += 1;
                } else {
                    next_r += 1;
                }
                der = Derivation::node(
                    format!(
                        "{} |-pstar[...] {} : {}",
                        print::ctx(w_ctx),
                        print::sub(&w.prefix(slot + 1)),
                        print::ctx(&m.flat.prefix(slot + 1))
                    ),
                    "PStarFresh",
                    vec![der],
                );
            } else {
                let inferred = kernel::infer_tm(w_ctx, entry, marks)?;
                if inferred.ty() != &expected_ty {
                    return Err(CheckError::TypeMismatch {
                        term: print::tm(entry),
                        expected: print::ty(&expected_ty),
                        found: print::ty(inferred.ty()),
                    });
                }
                star_condition(w_ctx, cone, alpha, m, j, r, entry, &expected_ty)?;
                der = Derivation::node(
                    format!(
                        "{} |-pstar[...] {} : {}",
                        print::ctx(w_ctx),
                        print::sub(&w.prefix(slot + 1)),
                        print::ctx(&m.flat.prefix(slot + 1))
                    ),
                    "PStarTerm",
                    vec![der],
                );
            }
        }
    }

    // the focus must sit in its final position
    if alpha.pos + 1 < w_ctx.len() {
        let after = w_ctx.ty(alpha.pos + 1)?;
        if !fv_ty(after).contains(alpha) {
            return Err(CheckError::WhiskShape {
                reason: format!("`{}` can still move right", alpha.ident),
            });
        }
    }
    der = Derivation::node(
        format!(
            "{} |-whisk[{}; {}] {} : {}",
            print::ctx(w_ctx),
            print::ctx(&cone.kctx),
            alpha.ident,
            print::sub(w),
            print::ctx(&m.flat)
        ),
        "Whisk",
        vec![der],
    );
    let data = WhiskData {
        source: w_ctx.clone(),
        terms: w.clone(),
        cone: cone.clone(),
        alpha: alpha.clone(),
        mode: WhiskMode::Whisk,
    };
    Ok((data, der))
}

/// The column's composite must use exactly the matching boundary cell of
/// the focus and the matching projection of the cone.
#[allow(clippy::too_many_arguments)]
fn star_condition(
    w_ctx: &Ctx,
    cone: &ConeShape,
    alpha: &VarName,
    m: &TransforShape,
    j: usize,
    r: usize,
    u: &Tm,
    u_ty: &Ty,
) -> Result<()> {
    let n = m.level;
    let k = (j + 1) / 2;
    let e = n - k;
    let alpha_tm = Tm::var(alpha);
    let delta = if j % 2 == 1 {
        src_iter(&alpha_tm, e, w_ctx)?
    } else {
        tgt_iter(&alpha_tm, e, w_ctx)?
    };
    let delta_ty = ty_of(&delta, w_ctx)?;
    let mut required = syntax::fv_tm_ty(&delta, &delta_ty);
    let p = cone.proj_var(r)?;
    required.append(&mut syntax::fv_tm_ty(&Tm::var(p), cone.kctx.ty(p.pos)?));
    let actual = syntax::fv_tm_ty(u, u_ty);
    if actual != required {
        let missing = required.difference(&actual).map(|v| v.ident.to_string()).collect();
        let extra = actual.difference(&required).map(|v| v.ident.to_string()).collect();
        return Err(CheckError::StarViolated { column: j, row: r + 1, missing, extra });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the universal property

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JRule {
    J1,
    J2,
    J3,
    J4,
}

impl std::fmt::Display for JRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JRule::J1 => write!(f, "J1"),
            JRule::J2 => write!(f, "J2"),
            JRule::J3 => write!(f, "J3"),
            JRule::J4 => write!(f, "J4"),
        }
    }
}

/// Outcome of a universal-property step: either the tracked morphism grew
/// or a term was emitted (marked invertible for J2).
#[derive(Clone, Debug)]
pub enum JOutcome {
    Extended,
    Term { tm: Tm, ty: Ty, marked: bool },
}

/// A universal-property run: the tracked morphism out of a growing source
/// context into a growing prefix of the whisk source.
#[derive(Clone, Debug)]
pub struct UniSession {
    pub site: Arc<UniSite>,
    pub omega: Ctx,
    theta_terms: Vec<Tm>,
    pub covered: usize,
}

impl UniSession {
    /// Start from a fully tracked universal cone and a recognized
    /// postcomposition of the same cone.
    pub fn start(
        ucone: &UniMorphism,
        transfor: &TransforShape,
        whisk: &WhiskData,
    ) -> Result<UniSession> {
        if whisk.cone != ucone.site.cone {
            return Err(CheckError::WhiskShape {
                reason: "the postcomposition is over a different cone".into(),
            });
        }
        let site = Arc::new(UniSite {
            diagram: ucone.site.diagram.clone(),
            cone: ucone.site.cone.clone(),
            transfor: transfor.clone(),
            whisk: whisk.clone(),
        });
        Ok(UniSession {
            omega: ucone.source.clone(),
            theta_terms: ucone.terms.terms.clone(),
            covered: ucone.site.cone.kctx.len(),
            site,
        })
    }

    pub fn theta(&self) -> Sub {
        Sub::new(self.theta_terms.clone(), self.site.whisk.source.prefix(self.covered))
    }

    pub fn done(&self) -> bool {
        self.covered == self.site.whisk.source.len()
    }

    pub fn next_var(&self) -> Result<VarName> {
        self.site
            .whisk
            .source
            .var(self.covered)
            .cloned()
            .map_err(|_| CheckError::NothingToCover)
    }

    fn zone(&self, pos: usize) -> std::cmp::Ordering {
        pos.cmp(&self.site.whisk.alpha.pos)
    }

    /// Apply one universal-property rule at the next uncovered variable.
    pub fn apply(
        &mut self,
        rule: JRule,
        cut: Option<(&Ctx, &Sub)>,
        marks: &mut Marks,
    ) -> Result<(JOutcome, Derivation)> {
        use std::cmp::Ordering::*;
        let next = self.next_var()?;
        let w = &self.site.whisk.source;
        let next_ty = w.ty(next.pos)?.clone();
        let ext_der = check_extension(&w.prefix(next.pos + 1), &w.prefix(self.covered), &next)?;
        let alpha_dim = w.ty(self.site.whisk.alpha.pos)?.dim();
        if alpha_dim != self.site.transfor.level {
            return Err(CheckError::FocusDimMismatch {
                alpha_dim,
                level: self.site.transfor.level,
            });
        }
        let zone_name = |o: std::cmp::Ordering| match o {
            Less => "pre-focus",
            Equal => "focus",
            Greater => "post-focus",
        };
        let zone = self.zone(next.pos);
        let wrong = |rule: JRule| CheckError::WrongZone {
            rule: rule.to_string(),
            var: next.ident.to_string(),
            zone: zone_name(zone).into(),
        };
        match rule {
            JRule::J3 => {
                if zone != Less {
                    return Err(wrong(rule));
                }
                let copy_ty = subst_ty(&next_ty, &self.theta())?;
                let ident = self.omega.fresh_ident(&next.ident);
                let v = self.omega.push(ident, copy_ty);
                self.theta_terms.push(Tm::Var(v));
                self.covered += 1;
                kernel::check_sub(&self.omega, &self.theta(), &w.prefix(self.covered), marks)?;
                let der = Derivation::node(
                    format!(
                        "{} |-uni {} : {}",
                        print::ctx(&self.omega),
                        print::sub(&self.theta()),
                        print::ctx(&w.prefix(self.covered))
                    ),
                    "J3",
                    vec![ext_der],
                );
                Ok((JOutcome::Extended, der))
            }
            JRule::J4 => {
                if zone == Less {
                    return Err(wrong(rule));
                }
                let tm = Tm::Uni(self.site.clone(), next.clone(), Sub::identity(&self.omega));
                self.theta_terms.push(tm);
                self.covered += 1;
                kernel::check_sub(&self.omega, &self.theta(), &w.prefix(self.covered), marks)?;
                let der = Derivation::node(
                    format!(
                        "{} |-uni {} : {}",
                        print::ctx(&self.omega),
                        print::sub(&self.theta()),
                        print::ctx(&w.prefix(self.covered))
                    ),
                    "J4",
                    vec![ext_der],
                );
                Ok((JOutcome::Extended, der))
            }
            JRule::J1 => {
                if zone != Equal {
                    return Err(wrong(rule));
                }
                let omega = self.omega.clone();
                let id = Sub::identity(&omega);
                let (phi, om) = cut.unwrap_or((&omega, &id));
                kernel::check_sub(phi, om, &self.omega, marks)?;
                let tm = Tm::Uni(self.site.clone(), next.clone(), om.clone());
                let res = kernel::infer_tm(phi, &tm, marks)?;
                let ty = res.ty().clone();
                let der = Derivation::node(
                    print::judg_tm(phi, &tm, &ty),
                    "J1",
                    vec![ext_der, res.derivation],
                );
                Ok((JOutcome::Term { tm, ty, marked: false }, der))
            }
            JRule::J2 => {
                if zone != Greater {
                    return Err(wrong(rule));
                }
                let tm = Tm::Uni(self.site.clone(), next.clone(), Sub::identity(&self.omega));
                let res = kernel::infer_tm(&self.omega, &tm, marks)?;
                let ty = res.ty().clone();
                marks.insert(tm.clone());
                let der = Derivation::node(
                    format!("{} |= {} : {}", print::ctx(&self.omega), print::tm(&tm), print::ty(&ty)),
                    "J2",
                    vec![ext_der, res.derivation],
                );
                Ok((JOutcome::Term { tm, ty, marked: true }, der))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// coinductive invertibility

fn cut_argument(
    gamma_ctx: &Ctx,
    u: &Tm,
    cut: Option<(&Ctx, &Sub)>,
    marks: &mut Marks,
) -> Result<(Ctx, Tm)> {
    if !marks.contains(u) {
        return Err(CheckError::NotMarkedInvertible { term: print::tm(u) });
    }
    match cut {
        None => Ok((gamma_ctx.clone(), u.clone())),
        Some((delta, gamma)) => {
            kernel::check_sub(delta, gamma, gamma_ctx, marks)?;
            let arg = subst_tm(u, gamma)?;
            // invertibility is stable under substitution
            marks.insert(arg.clone());
            Ok((delta.clone(), arg))
        }
    }
}

/// `inv(u[γ]) : t[γ] -> s[γ]`, itself marked invertible.
pub fn invert(
    gamma_ctx: &Ctx,
    u: &Tm,
    cut: Option<(&Ctx, &Sub)>,
    marks: &mut Marks,
) -> Result<(Tm, Ty)> {
    let (delta, arg) = cut_argument(gamma_ctx, u, cut, marks)?;
    let tm = Tm::Inv(Box::new(arg));
    let res = kernel::infer_tm(&delta, &tm, marks)?;
    marks.insert(tm.clone());
    Ok((tm, res.ty().clone()))
}

/// `eta(u[γ]) : 1_(s[γ]) -> u[γ] * inv(u[γ])`, marked invertible.
pub fn eta(
    gamma_ctx: &Ctx,
    u: &Tm,
    cut: Option<(&Ctx, &Sub)>,
    marks: &mut Marks,
) -> Result<(Tm, Ty)> {
    let (delta, arg) = cut_argument(gamma_ctx, u, cut, marks)?;
    let tm = Tm::Eta(Box::new(arg));
    let res = kernel::infer_tm(&delta, &tm, marks)?;
    marks.insert(tm.clone());
    Ok((tm, res.ty().clone()))
}

/// `eps(u[γ]) : inv(u[γ]) * u[γ] -> 1_(t[γ])`, marked invertible.
pub fn eps(
    gamma_ctx: &Ctx,
    u: &Tm,
    cut: Option<(&Ctx, &Sub)>,
    marks: &mut Marks,
) -> Result<(Tm, Ty)> {
    let (delta, arg) = cut_argument(gamma_ctx, u, cut, marks)?;
    let tm = Tm::Eps(Box::new(arg));
    let res = kernel::infer_tm(&delta, &tm, marks)?;
    marks.insert(tm.clone());
    Ok((tm, res.ty().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::synth_cone_globular;

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
    fn extension_accepts_a_suffix() {
        let mut delta = g1();
        let c = delta.push("c", Ty::Obj);
        check_extension(&delta, &g1(), &c).unwrap();
        let mut longer = delta.clone();
        longer.push("d", Ty::Obj);
        check_extension(&longer, &g1(), &c).unwrap();
    }

    #[test]
    fn extension_rejects_wrong_position() {
        let mut delta = g1();
        delta.push("c", Ty::Obj);
        let d = delta.push("d", Ty::Obj);
        assert!(matches!(
            check_extension(&delta, &g1(), &d),
            Err(CheckError::ExtensionMismatch { .. })
        ));
    }

    #[test]
    fn universal_cone_over_an_arrow() {
        let m = marks();
        let (cone, _) = synth_cone_globular(&g1(), &m).unwrap();
        let (um, _) = build_ucone(&cone, &m).unwrap();
        assert_eq!(print::sub(&um.terms), "<x, y, f, lim, up_x, up_y, up_f>");
        // kernel agreement on the projection cell
        let up_f = &um.terms.terms[6];
        let res = kernel::infer_tm(&g1(), up_f, &m).unwrap();
        assert_eq!(print::ty(res.ty()), "up_y -> (up_x *^1_0 f)");
    }

    #[test]
    fn ucone_requires_tracked_dependencies() {
        let m = marks();
        let (cone, _) = synth_cone_globular(&g1(), &m).unwrap();
        let site = Arc::new(UconeSite { diagram: g1(), cone: cone.clone() });
        let p_f = cone.kctx.var(6).unwrap().clone();
        assert!(matches!(
            ucone_term(&site, &p_f, Sub::identity(&g1()), 5),
            Err(CheckError::UntrackedDependency { .. })
        ));
    }
}
