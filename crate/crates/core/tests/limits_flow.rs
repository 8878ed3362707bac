//! End-to-end runs of the universal-property machinery at the library
//! level: the empty diagram as a terminal object, the interval diagram,
//! and a modification of cones over it.

use cattlim_core::catalog;
use cattlim_core::cones::synth_cone_globular;
use cattlim_core::error::CheckError;
use cattlim_core::kernel;
use cattlim_core::limits::{
    build_ucone, check_whisk, eps, eta, invert, JOutcome, JRule, Marks, UniSession, WhiskBuilder,
};
use cattlim_core::print;
use cattlim_core::syntax::{subst_tm, Ctx, Sub, Tm, Ty};
use cattlim_core::transfors::{check_ctrf, SegCtx};

fn interval() -> Ctx {
    let mut c = Ctx::new();
    let x = c.push("x", Ty::Obj);
    let y = c.push("y", Ty::Obj);
    c.push("f", Ty::arrow(Ty::Obj, Tm::Var(x), Tm::Var(y)));
    c
}

/// The chain of three composable 1-cells as a pasting context.
fn chain3() -> Ctx {
    let mut c = Ctx::new();
    let a = c.push("a", Ty::Obj);
    let b = c.push("b", Ty::Obj);
    c.push("u", Ty::arrow(Ty::Obj, Tm::Var(a), Tm::Var(b.clone())));
    let d = c.push("d", Ty::Obj);
    c.push("v", Ty::arrow(Ty::Obj, Tm::Var(b), Tm::Var(d.clone())));
    let e = c.push("e", Ty::Obj);
    c.push("w", Ty::arrow(Ty::Obj, Tm::Var(d), Tm::Var(e)));
    c
}

/// Reassociation coherence `u * (v * w) -> (u * v) * w` instantiated at
/// three composable 1-cells.
fn assoc_rl(ctx: &Ctx, u: Tm, v: Tm, w: Tm) -> Tm {
    use cattlim_core::syntax::{src_of, tgt_of, ty_of, Schema};
    let ps = chain3();
    let pu = Tm::var(ps.var(2).unwrap());
    let pv = Tm::var(ps.var(4).unwrap());
    let pw = Tm::var(ps.var(6).unwrap());
    let vw = catalog::comp_term(pv.clone(), pw.clone(), 1, 0, &ps).unwrap();
    let lhs = catalog::comp_term(pu.clone(), vw, 1, 0, &ps).unwrap();
    let uv = catalog::comp_term(pu, pv, 1, 0, &ps).unwrap();
    let rhs = catalog::comp_term(uv, pw, 1, 0, &ps).unwrap();
    let base = ty_of(&lhs, &ps).unwrap();
    let schema = std::sync::Arc::new(Schema { ps: ps.clone(), ty: Ty::arrow(base, lhs, rhs) });
    let sub = Sub::new(
        vec![
            src_of(&u, ctx).unwrap(),
            tgt_of(&u, ctx).unwrap(),
            u,
            tgt_of(&v, ctx).unwrap(),
            v,
            tgt_of(&w, ctx).unwrap(),
            w,
        ],
        ps,
    );
    Tm::Coh(schema, sub)
}

/// The trivial conical transfor over the empty diagram at the given level.
fn empty_ctrf(level: usize, marks: &Marks) -> cattlim_core::transfors::TransforShape {
    let mut ctx = Ctx::new();
    ctx.push("c", Ty::Obj);
    let mut lens = vec![0, 1];
    lens.extend(std::iter::repeat(0).take(2 * level + 1));
    let seg = SegCtx::new(ctx, lens).unwrap();
    check_ctrf(&seg, marks).unwrap().0
}

#[test]
fn terminal_object_run() {
    let mut marks = Marks::new();
    let empty = Ctx::new();
    let (cone, _) = synth_cone_globular(&empty, &marks).unwrap();
    assert_eq!(print::ctx(&cone.kctx), "(c : Ob)");

    let (um, _) = build_ucone(&cone, &marks).unwrap();
    assert_eq!(print::sub(&um.terms), "<lim>");

    let transfor = empty_ctrf(1, &marks);
    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    let (whisk, _) = builder.finish(alpha, vec![], &marks).unwrap();
    assert_eq!(print::ctx(&whisk.source), "(c : Ob, c' : Ob, f : c' -> c)");
    assert_eq!(print::sub(&whisk.terms), "<c'>");

    let mut session = UniSession::start(&um, &transfor, &whisk).unwrap();
    let (o1, _) = session.apply(JRule::J3, None, &mut marks).unwrap();
    assert!(matches!(o1, JOutcome::Extended));
    // the universal-property term for the focus
    let (o2, _) = session.apply(JRule::J1, None, &mut marks).unwrap();
    let JOutcome::Term { tm, ty, marked } = o2 else { panic!("J1 emits a term") };
    assert_eq!(print::tm(&tm), "uni_f");
    assert_eq!(print::ty(&ty), "c' -> lim");
    assert!(!marked);
    let (o3, _) = session.apply(JRule::J4, None, &mut marks).unwrap();
    assert!(matches!(o3, JOutcome::Extended));
    assert!(session.done());

    assert_eq!(print::sub(&session.theta()), "<lim, c', uni_f>");
    assert_eq!(print::ctx(&session.omega), "(c' : Ob)");
    // the tracked morphism re-checks in the kernel
    kernel::check_sub(&session.omega, &session.theta(), &whisk.source, &marks).unwrap();
}

#[test]
fn empty_diagram_three_transfor_run() {
    let mut marks = Marks::new();
    let empty = Ctx::new();
    let (cone, _) = synth_cone_globular(&empty, &marks).unwrap();
    let (um, _) = build_ucone(&cone, &marks).unwrap();

    let transfor = empty_ctrf(2, &marks);
    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    let (whisk, _) = builder.finish(alpha, vec![], &marks).unwrap();
    assert_eq!(
        print::ctx(&whisk.source),
        "(c : Ob, c' : Ob, f : c' -> c, g : c' -> c, α : f -> g)"
    );

    let mut session = UniSession::start(&um, &transfor, &whisk).unwrap();
    for _ in 0..3 {
        session.apply(JRule::J3, None, &mut marks).unwrap();
    }
    session.apply(JRule::J4, None, &mut marks).unwrap();
    assert!(session.done());
    assert_eq!(print::sub(&session.theta()), "<lim, c', f, g, uni_α>");
    assert_eq!(
        print::ctx(&session.omega),
        "(c' : Ob, f : c' -> lim, g : c' -> lim)"
    );
    kernel::check_sub(&session.omega, &session.theta(), &whisk.source, &marks).unwrap();
}

#[test]
fn interval_modification_whisk_and_run() {
    let mut marks = Marks::new();
    let g1 = interval();
    let (cone, _) = synth_cone_globular(&g1, &marks).unwrap();
    let (um, _) = build_ucone(&cone, &marks).unwrap();

    // conical 2-transfor over the interval: cone column, duplicate column,
    // mediator column
    let transfor = interval_modification(&marks);

    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    // the focus column composes the 1-cell with each projection
    let w = builder.post_alpha_ctx().clone();
    let p_x = w.var(4).unwrap().clone();
    let p_y = w.var(5).unwrap().clone();
    let p_f = w.var(6).unwrap().clone();
    let f_cell = Tm::var(&alpha);
    let u_x = catalog::comp_term(f_cell.clone(), Tm::Var(p_x.clone()), 1, 0, &w).unwrap();
    let u_y = catalog::comp_term(f_cell.clone(), Tm::Var(p_y.clone()), 1, 0, &w).unwrap();
    let whisker = catalog::iterated_identity(f_cell.clone(), 1, &w).unwrap();
    let whiskered = catalog::comp_term(whisker, Tm::Var(p_f.clone()), 2, 0, &w).unwrap();
    // reassociate so the target agrees with the instantiated row type
    let f_diag = Tm::var(w.var(2).unwrap());
    let reassoc = assoc_rl(&w, f_cell.clone(), Tm::Var(p_x.clone()), f_diag);
    let u_f = catalog::comp_term(whiskered, reassoc, 2, 1, &w).unwrap();
    let (whisk, _) = builder.finish(alpha, vec![u_x, u_y, u_f], &marks).unwrap();

    let mut session = UniSession::start(&um, &transfor, &whisk).unwrap();
    // fresh apex and the duplicate-cone block lie before the focus
    for _ in 0..4 {
        session.apply(JRule::J3, None, &mut marks).unwrap();
    }
    let (o, _) = session.apply(JRule::J1, None, &mut marks).unwrap();
    let JOutcome::Term { tm, ty, .. } = o else { panic!() };
    assert_eq!(print::tm(&tm), "uni_f'");
    assert_eq!(print::ty(&ty), "c' -> lim");
    session.apply(JRule::J4, None, &mut marks).unwrap();
    // the mediator rows after the focus produce invertible cells
    for _ in 0..3 {
        let (o, _) = session.apply(JRule::J2, None, &mut marks).unwrap();
        let JOutcome::Term { tm, marked, .. } = o else { panic!() };
        assert!(marked);
        assert!(marks.contains(&tm));
        session.apply(JRule::J4, None, &mut marks).unwrap();
    }
    assert!(session.done());
    kernel::check_sub(&session.omega, &session.theta(), &whisk.source, &marks).unwrap();
}

/// Build the conical 2-transfor over the interval by hand: the cone, its
/// duplicate, and one mediator per diagram variable.
fn interval_modification(marks: &Marks) -> cattlim_core::transfors::TransforShape {
    let g1 = interval();
    let (cone, _) = synth_cone_globular(&g1, marks).unwrap();
    let mut flat = cone.kctx.clone();
    let c = cone.apex.clone();
    let x = flat.var(0).unwrap().clone();
    let y = flat.var(1).unwrap().clone();
    let f = flat.var(2).unwrap().clone();
    // duplicate cone column
    let px2 = flat.push("p_x'", Ty::arrow(Ty::Obj, Tm::var(&c), Tm::var(&x)));
    let py2 = flat.push("p_y'", Ty::arrow(Ty::Obj, Tm::var(&c), Tm::var(&y)));
    let pf2_tgt = catalog::comp_term(Tm::Var(px2.clone()), Tm::var(&f), 1, 0, &flat).unwrap();
    let base = Ty::arrow(Ty::Obj, Tm::var(&c), Tm::var(&y));
    let pf2 = flat.push("p_f'", Ty::arrow(base, Tm::Var(py2.clone()), pf2_tgt));
    // mediator column
    let p_x = cone.proj_var(0).unwrap().clone();
    let p_y = cone.proj_var(1).unwrap().clone();
    let p_f = cone.proj_var(2).unwrap().clone();
    let m_x_ty = Ty::arrow(
        flat.ty(p_x.pos).unwrap().clone(),
        Tm::Var(p_x.clone()),
        Tm::Var(px2.clone()),
    );
    let m_x = flat.push("m_x", m_x_ty);
    let m_y_ty = Ty::arrow(
        flat.ty(p_y.pos).unwrap().clone(),
        Tm::Var(p_y.clone()),
        Tm::Var(py2.clone()),
    );
    let m_y = flat.push("m_y", m_y_ty);
    // m_f : p_f *^2_1 (m_x *^2_0 1_(f))  ->  m_y *^2_1 p_f'
    let unit_f = catalog::iterated_identity(Tm::var(&f), 1, &flat).unwrap();
    let whisk = catalog::comp_term(Tm::Var(m_x.clone()), unit_f, 2, 0, &flat).unwrap();
    let lhs = catalog::comp_term(Tm::Var(p_f.clone()), whisk, 2, 1, &flat).unwrap();
    let rhs = catalog::comp_term(Tm::Var(m_y.clone()), Tm::Var(pf2.clone()), 2, 1, &flat).unwrap();
    let m_base = cattlim_core::syntax::ty_of(&lhs, &flat).unwrap();
    flat.push("m_f", Ty::arrow(m_base, lhs, rhs));

    let seg = SegCtx::new(flat, vec![3, 1, 3, 3, 3]).unwrap();
    let (shape, _) = check_ctrf(&seg, marks).unwrap();
    shape
}

#[test]
fn inverses_and_unit_witnesses() {
    let mut marks = Marks::new();
    let empty = Ctx::new();
    let (cone, _) = synth_cone_globular(&empty, &marks).unwrap();
    let (um, _) = build_ucone(&cone, &marks).unwrap();
    let transfor = empty_ctrf(1, &marks);
    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    let (whisk, _) = builder.finish(alpha, vec![], &marks).unwrap();

    // produce a marked term: over the empty diagram the 2-transfor has no
    // post-focus rows, so mark through a second session over a diagram
    // with one object
    let mut point = Ctx::new();
    point.push("x", Ty::Obj);
    let (pcone, _) = synth_cone_globular(&point, &marks).unwrap();
    let (pum, _) = build_ucone(&pcone, &marks).unwrap();
    let ptransfor = point_modification(&marks);
    let mut pb = WhiskBuilder::start(&pcone, &ptransfor).unwrap();
    let palpha = pb.push_mid(vec![]).unwrap();
    let wctx = pb.post_alpha_ctx().clone();
    let p_x = wctx.var(2).unwrap().clone();
    let u_x = catalog::comp_term(Tm::var(&palpha), Tm::Var(p_x), 1, 0, &wctx).unwrap();
    let (pwhisk, _) = pb.finish(palpha, vec![u_x], &marks).unwrap();
    let mut ps = UniSession::start(&pum, &ptransfor, &pwhisk).unwrap();
    ps.apply(JRule::J3, None, &mut marks).unwrap(); // c'
    ps.apply(JRule::J3, None, &mut marks).unwrap(); // duplicate projection
    ps.apply(JRule::J4, None, &mut marks).unwrap(); // focus
    let (o, _) = ps.apply(JRule::J2, None, &mut marks).unwrap();
    let JOutcome::Term { tm: u, ty: uty, marked } = o else { panic!() };
    assert!(marked);
    let arr = uty.as_arrow().unwrap().clone();

    // inv reverses the arrow
    let (inv_u, inv_ty) = invert(&ps.omega, &u, None, &mut marks).unwrap();
    let inv_arr = inv_ty.as_arrow().unwrap();
    assert_eq!(inv_arr.src, arr.tgt);
    assert_eq!(inv_arr.tgt, arr.src);

    // eta and eps are themselves marked, so they can be inverted again
    let (eta_u, _) = eta(&ps.omega, &u, None, &mut marks).unwrap();
    let (inv_eta, _) = invert(&ps.omega, &eta_u, None, &mut marks).unwrap();
    kernel::infer_tm(&ps.omega, &inv_eta, &marks).unwrap();
    let (eps_u, _) = eps(&ps.omega, &u, None, &mut marks).unwrap();
    kernel::infer_tm(&ps.omega, &eps_u, &marks).unwrap();

    // substitution commutes with inv
    let id = Sub::identity(&ps.omega);
    let (inv_cut, _) = invert(&ps.omega, &u, Some((&ps.omega, &id)), &mut marks).unwrap();
    assert_eq!(inv_cut, subst_tm(&inv_u, &id).unwrap());

    // unmarked terms are rejected
    let bare = Tm::var(&whisk.alpha);
    assert!(matches!(
        invert(&whisk.source, &bare, None, &mut marks),
        Err(CheckError::NotMarkedInvertible { .. })
    ));
    let _ = um;
}

/// Conical 2-transfor over a single object.
fn point_modification(marks: &Marks) -> cattlim_core::transfors::TransforShape {
    let mut point = Ctx::new();
    point.push("x", Ty::Obj);
    let (cone, _) = synth_cone_globular(&point, marks).unwrap();
    let mut flat = cone.kctx.clone();
    let c = cone.apex.clone();
    let x = flat.var(0).unwrap().clone();
    let p_x = cone.proj_var(0).unwrap().clone();
    let px2 = flat.push("p_x'", Ty::arrow(Ty::Obj, Tm::var(&c), Tm::var(&x)));
    let m_ty = Ty::arrow(
        flat.ty(p_x.pos).unwrap().clone(),
        Tm::Var(p_x.clone()),
        Tm::Var(px2.clone()),
    );
    flat.push("m_x", m_ty);
    let seg = SegCtx::new(flat, vec![1, 1, 1, 1, 1]).unwrap();
    check_ctrf(&seg, marks).unwrap().0
}

#[test]
fn star_violation_is_detected() {
    let marks = Marks::new();
    let mut point = Ctx::new();
    point.push("x", Ty::Obj);
    let (cone, _) = synth_cone_globular(&point, &marks).unwrap();
    let transfor = point_modification(&marks);
    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    let w = builder.post_alpha_ctx().clone();
    // the fresh duplicate-projection variable has the right type but the
    // wrong free variables: it drops both the focus and the projection
    let q = w.var(4).unwrap().clone();
    assert_eq!(print::ty(w.ty(4).unwrap()), "c' -> x");
    match builder.finish(alpha, vec![Tm::Var(q)], &marks) {
        Err(CheckError::StarViolated { column: 2, row: 1, missing, .. }) => {
            assert!(missing.contains(&"f".to_string()));
            assert!(missing.contains(&"p_x".to_string()));
        }
        other => panic!("expected a postcomposition violation, got {other:?}"),
    }
}

#[test]
fn wrong_zone_rules_are_rejected() {
    let mut marks = Marks::new();
    let empty = Ctx::new();
    let (cone, _) = synth_cone_globular(&empty, &marks).unwrap();
    let (um, _) = build_ucone(&cone, &marks).unwrap();
    let transfor = empty_ctrf(1, &marks);
    let mut builder = WhiskBuilder::start(&cone, &transfor).unwrap();
    let alpha = builder.push_mid(vec![]).unwrap();
    let (whisk, _) = builder.finish(alpha, vec![], &marks).unwrap();
    let mut session = UniSession::start(&um, &transfor, &whisk).unwrap();
    // next variable is the fresh apex: a pre-focus variable
    assert!(matches!(
        session.clone().apply(JRule::J4, None, &mut marks),
        Err(CheckError::WrongZone { .. })
    ));
    assert!(matches!(
        session.clone().apply(JRule::J1, None, &mut marks),
        Err(CheckError::WrongZone { .. })
    ));
    session.apply(JRule::J3, None, &mut marks).unwrap();
    // next is the focus: J3 and J2 do not apply
    assert!(matches!(
        session.clone().apply(JRule::J3, None, &mut marks),
        Err(CheckError::WrongZone { .. })
    ));
    assert!(matches!(
        session.clone().apply(JRule::J2, None, &mut marks),
        Err(CheckError::WrongZone { .. })
    ));
}
