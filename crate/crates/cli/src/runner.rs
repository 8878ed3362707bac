//! Declaration pipeline: elaborate surface declarations in order through
//! the kernel and the judgment modules, producing a deterministic report.

use std::collections::HashMap;

use cattlim_core::catalog;
use cattlim_core::cones::{check_cone, synth_cone_globular, ConeShape};
use cattlim_core::derivation::Derivation;
use cattlim_core::error::CheckError;
use cattlim_core::kernel;
use cattlim_core::limits::{
    build_ucone, JOutcome, JRule, Marks, UniMorphism, UniSession, WhiskBuilder, WhiskData,
};
use cattlim_core::print::{self, SchemaNames};
use cattlim_core::syntax::{Ctx, Schema, Sub, Tm, Ty};
use cattlim_core::transfors::{check_ctrf, check_gray, synth_gray_1globe, SegCtx, TransforShape};

use crate::ast::*;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("unknown name `{0}`")]
    Unknown(String),
    #[error("`{0}` is not a {1}")]
    WrongKind(String, &'static str),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("`{head}` expects {expected} arguments, got {got}")]
    Arity { head: String, expected: usize, got: usize },
    #[error("asserted type `{given}`, found `{actual}`")]
    AssertMismatch { given: String, actual: String },
    #[error("expected this declaration to be rejected, but it checked")]
    ExpectedFailure,
    #[error("endpoints have different types: `{src}` vs `{tgt}`")]
    ArrowBase { src: String, tgt: String },
    #[error("universal-property runs must keep using the same postcomposition site")]
    WhiskChanged,
}

#[derive(Clone)]
pub enum Entity {
    Ctx(SegCtx),
    Head { schema: std::sync::Arc<Schema>, is_coh: bool },
    Term { ctx: Ctx, tm: Tm, ty: Ty },
    Cone(ConeShape),
    Transfor(TransforShape),
    Whisk { data: WhiskData, transfor: TransforShape },
    Limit { morphism: UniMorphism, session: Option<UniSession> },
}

#[derive(Clone, Default)]
pub struct Development {
    entities: HashMap<String, Entity>,
    order: Vec<String>,
    pub names: SchemaNames,
    pub marks: Marks,
}

impl Development {
    fn get(&self, name: &str) -> Result<&Entity, RunError> {
        self.entities.get(name).ok_or_else(|| RunError::Unknown(name.into()))
    }

    fn bind(&mut self, name: &str, entity: Entity) {
        if !self.entities.contains_key(name) {
            self.order.push(name.to_string());
        }
        self.entities.insert(name.to_string(), entity);
    }

    fn flat_ctx(&self, name: &str) -> Result<Ctx, RunError> {
        match self.get(name)? {
            Entity::Ctx(seg) => Ok(seg.ctx.clone()),
            Entity::Cone(shape) => Ok(shape.kctx.clone()),
            Entity::Transfor(shape) => Ok(shape.flat.clone()),
            _ => Err(RunError::WrongKind(name.into(), "context")),
        }
    }

    fn entity_ctx(entity: &Entity) -> Option<&Ctx> {
        match entity {
            Entity::Ctx(seg) => Some(&seg.ctx),
            Entity::Cone(shape) => Some(&shape.kctx),
            Entity::Transfor(shape) => Some(&shape.flat),
            Entity::Whisk { data, .. } => Some(&data.source),
            _ => None,
        }
    }

    /// Latest-declaration-first resolution of a bare name: terms first,
    /// then variables of declared context-like entities.
    fn resolve_subject(&self, name: &str) -> Result<(Ctx, Tm, Ty), RunError> {
        if let Some(Entity::Term { ctx, tm, ty }) = self.entities.get(name) {
            return Ok((ctx.clone(), tm.clone(), ty.clone()));
        }
        for bound in self.order.iter().rev() {
            let entity = &self.entities[bound];
            if let Some(ctx) = Self::entity_ctx(entity) {
                if let Some(pos) = ctx.lookup_ident(name) {
                    let v = ctx.var(pos)?.clone();
                    let ty = ctx.ty(pos)?.clone();
                    return Ok((ctx.clone(), Tm::Var(v), ty));
                }
            }
        }
        Err(RunError::Unknown(name.into()))
    }
}

pub fn elab_term(ast: &TermAst, ctx: &Ctx, dev: &Development) -> Result<Tm, RunError> {
    match ast {
        TermAst::Name(name) => match ctx.lookup_ident(name) {
            Some(pos) => Ok(Tm::Var(ctx.var(pos)?.clone())),
            None => Err(RunError::UnknownVar(name.clone())),
        },
        TermAst::Comp(u, d, n, v) => {
            let u = elab_term(u, ctx, dev)?;
            let v = elab_term(v, ctx, dev)?;
            Ok(catalog::comp_term(u, v, *d, *n, ctx)?)
        }
        TermAst::Unit(k, t) => {
            let t = elab_term(t, ctx, dev)?;
            Ok(catalog::iterated_identity(t, *k, ctx)?)
        }
        TermAst::App(head, args) => {
            let Entity::Head { schema, is_coh } = dev.get(head)? else {
                return Err(RunError::WrongKind(head.clone(), "declared operation or coherence"));
            };
            if args.len() != schema.ps.len() {
                return Err(RunError::Arity {
                    head: head.clone(),
                    expected: schema.ps.len(),
                    got: args.len(),
                });
            }
            let terms = args
                .iter()
                .map(|a| elab_term(a, ctx, dev))
                .collect::<Result<Vec<_>, _>>()?;
            let sub = Sub::new(terms, schema.ps.clone());
            Ok(if *is_coh { Tm::Coh(schema.clone(), sub) } else { Tm::Op(schema.clone(), sub) })
        }
    }
}

pub fn elab_type(ast: &TypeAst, ctx: &Ctx, dev: &Development) -> Result<Ty, RunError> {
    match ast {
        TypeAst::Obj => Ok(Ty::Obj),
        TypeAst::Arrow(s, t) => {
            let s = elab_term(s, ctx, dev)?;
            let t = elab_term(t, ctx, dev)?;
            let sty = kernel::infer_tm(ctx, &s, &dev.marks)?.ty().clone();
            let tty = kernel::infer_tm(ctx, &t, &dev.marks)?.ty().clone();
            if sty != tty {
                return Err(RunError::ArrowBase {
                    src: print::ty(&sty),
                    tgt: print::ty(&tty),
                });
            }
            Ok(Ty::arrow(sty, s, t))
        }
    }
}

pub fn elab_ctx(ast: &CtxAst, dev: &Development) -> Result<SegCtx, RunError> {
    let mut ctx = Ctx::new();
    let mut lens = Vec::with_capacity(ast.segments.len());
    for seg in &ast.segments {
        lens.push(seg.len());
        for (name, ty_ast) in seg {
            let ty = elab_type(ty_ast, &ctx, dev)?;
            ctx.push(name.clone(), ty);
        }
    }
    Ok(SegCtx::new(ctx, lens)?)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub print_elaborated: bool,
    pub strict_asserts: bool,
    pub timings: bool,
}

#[derive(Debug, Default, serde::Serialize)]
pub struct Report {
    #[serde(skip)]
    pub lines: Vec<String>,
    pub ok: usize,
    pub failed: usize,
    pub derivations: Vec<DerivEntry>,
}

#[derive(Debug, serde::Serialize)]
pub struct DerivEntry {
    pub name: String,
    pub derivation: Derivation,
}

impl Report {
    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out.push_str(&format!("summary: {} ok, {} failed\n", self.ok, self.failed));
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            1
        } else {
            0
        }
    }
}

/// Process a parsed file; timings go to stderr when enabled so the report
/// bytes stay deterministic.
pub fn run(decls: &[Decl], opts: RunOptions) -> (Development, Report) {
    let mut dev = Development::default();
    let mut report = Report::default();
    for decl in decls {
        let started = std::time::Instant::now();
        let outcome = process_decl(&mut dev, decl, opts, &mut report);
        if opts.timings {
            eprintln!(
                "timing {} {}: {:?}",
                decl.kind_word(),
                decl.name,
                started.elapsed()
            );
        }
        match outcome {
            Ok(line) => {
                report.ok += 1;
                report.lines.push(line);
            }
            Err(err) => {
                report.failed += 1;
                report
                    .lines
                    .push(format!("FAIL {} {}: {err}", decl.kind_word(), decl.name));
                if opts.strict_asserts && matches!(decl.kind, DeclKind::Assert { .. } | DeclKind::AssertFail(_)) {
                    break;
                }
            }
        }
    }
    (dev, report)
}

fn process_decl(
    dev: &mut Development,
    decl: &Decl,
    opts: RunOptions,
    report: &mut Report,
) -> Result<String, RunError> {
    let name = &decl.name;
    let word = decl.kind_word();
    match &decl.kind {
        DeclKind::Ctx { ctx } => {
            let seg = elab_ctx(ctx, dev)?;
            let res = kernel::check_ctx(&seg.ctx, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: res.derivation });
            let line = if opts.print_elaborated {
                format!("ok ctx {name} = {}", seg.print())
            } else {
                format!("ok ctx {name}")
            };
            dev.bind(name, Entity::Ctx(seg));
            Ok(line)
        }
        DeclKind::Head { is_coh, ps, ty } => {
            let seg = elab_ctx(&CtxAst { segments: vec![ps.clone()] }, dev)?;
            let ps_ctx = seg.ctx;
            let ty = elab_type(ty, &ps_ctx, dev)?;
            let schema = std::sync::Arc::new(Schema { ps: ps_ctx.clone(), ty });
            let probe = if *is_coh {
                Tm::Coh(schema.clone(), Sub::identity(&ps_ctx))
            } else {
                Tm::Op(schema.clone(), Sub::identity(&ps_ctx))
            };
            let res = kernel::infer_tm(&ps_ctx, &probe, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: res.derivation });
            dev.names.insert((*schema).clone(), name.clone());
            let line = if opts.print_elaborated {
                format!("ok {word} {name} {} : {}", print::ctx(&schema.ps), print::ty(&schema.ty))
            } else {
                format!("ok {word} {name}")
            };
            dev.bind(name, Entity::Head { schema, is_coh: *is_coh });
            Ok(line)
        }
        DeclKind::Let { ctx, term } => {
            let flat = dev.flat_ctx(ctx)?;
            let tm = elab_term(term, &flat, dev)?;
            let res = kernel::infer_tm(&flat, &tm, &dev.marks)?;
            let ty = res.ty().clone();
            report.derivations.push(DerivEntry { name: name.clone(), derivation: res.derivation });
            let line = format!("ok let {name} = {} : {}", print::tm(&tm), print::ty(&ty));
            dev.bind(name, Entity::Term { ctx: flat, tm, ty });
            Ok(line)
        }
        DeclKind::Cone { of } => {
            let diagram = dev.flat_ctx(of)?;
            let (shape, der) = synth_cone_globular(&diagram, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = format!("ok cone {name} of {of} = {}", print::ctx(&shape.kctx));
            dev.bind(name, Entity::Cone(shape));
            Ok(line)
        }
        DeclKind::Gray { of } => {
            let diagram = dev.flat_ctx(of)?;
            let (shape, der) = synth_gray_1globe(&diagram, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = format!("ok gray {name} of {of} = {}", shape.print());
            dev.bind(name, Entity::Transfor(shape));
            Ok(line)
        }
        DeclKind::Limit { of } => {
            let diagram = dev.flat_ctx(of)?;
            let (shape, _) = synth_cone_globular(&diagram, &dev.marks)?;
            let (morphism, der) = build_ucone(&shape, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = format!(
                "ok limit {name} of {of} = {} : {}",
                print::sub(&morphism.terms),
                print::ctx(&shape.kctx)
            );
            dev.bind(name, Entity::Limit { morphism, session: None });
            Ok(line)
        }
        DeclKind::Whisk { cone, transfor, composites } => {
            let Entity::Cone(cone_shape) = dev.get(cone)? else {
                return Err(RunError::WrongKind(cone.clone(), "cone"));
            };
            let cone_shape = cone_shape.clone();
            let shape = match dev.get(transfor)? {
                Entity::Transfor(shape) if shape.has_apex => shape.clone(),
                Entity::Transfor(_) => {
                    return Err(RunError::WrongKind(transfor.clone(), "conical transfor"));
                }
                Entity::Ctx(seg) => check_ctrf(seg, &dev.marks)?.0,
                _ => return Err(RunError::WrongKind(transfor.clone(), "conical transfor")),
            };
            let mut builder = WhiskBuilder::start(&cone_shape, &shape)?;
            let low_count = builder.low_count();
            let top_count = builder.top_count();
            if composites.len() != low_count + top_count {
                return Err(RunError::Arity {
                    head: name.clone(),
                    expected: low_count + top_count,
                    got: composites.len(),
                });
            }
            let low = composites[..low_count]
                .iter()
                .map(|a| elab_term(a, builder.pre_alpha_ctx(), dev))
                .collect::<Result<Vec<_>, _>>()?;
            let alpha = builder.push_mid(low)?;
            let top = composites[low_count..]
                .iter()
                .map(|a| elab_term(a, builder.post_alpha_ctx(), dev))
                .collect::<Result<Vec<_>, _>>()?;
            let (data, der) = builder.finish(alpha, top, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let mut line = format!(
                "ok whisk {name} = {} : {}",
                print::sub(&data.terms),
                data.source.var(data.alpha.pos)?.ident
            );
            if opts.print_elaborated {
                line = format!("{line}; W = {}", print::ctx(&data.source));
            }
            dev.bind(name, Entity::Whisk { data, transfor: shape });
            Ok(line)
        }
        DeclKind::Apply { rule, session, whisk, cut, bind } => {
            let Entity::Whisk { data, transfor } = dev.get(whisk)?.clone() else {
                return Err(RunError::WrongKind(whisk.clone(), "whisk"));
            };
            let Entity::Limit { morphism, session: live } = dev.get(session)?.clone() else {
                return Err(RunError::WrongKind(session.clone(), "limit"));
            };
            let mut live = match live {
                Some(s) => {
                    if s.site.whisk != data {
                        return Err(RunError::WhiskChanged);
                    }
                    s
                }
                None => UniSession::start(&morphism, &transfor, &data)?,
            };
            let jrule = match rule {
                JName::J1 => JRule::J1,
                JName::J2 => JRule::J2,
                JName::J3 => JRule::J3,
                JName::J4 => JRule::J4,
            };
            let cut_data = match cut {
                None => None,
                Some((ctx_name, terms)) => {
                    let phi = dev.flat_ctx(ctx_name)?;
                    let elab = terms
                        .iter()
                        .map(|a| elab_term(a, &phi, dev))
                        .collect::<Result<Vec<_>, _>>()?;
                    Some((phi, Sub::new(elab, live.omega.clone())))
                }
            };
            let (outcome, der) = live.apply(
                jrule,
                cut_data.as_ref().map(|(c, s)| (c, s)),
                &mut dev.marks,
            )?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = match &outcome {
                JOutcome::Extended => {
                    format!("ok apply {rule} {session} = {}", print::sub(&live.theta()))
                }
                JOutcome::Term { tm, ty, marked } => {
                    let mark = if *marked { " (invertible)" } else { "" };
                    if let Some(bound) = bind {
                        let phi = cut_data
                            .as_ref()
                            .map(|(c, _)| c.clone())
                            .unwrap_or_else(|| live.omega.clone());
                        dev.bind(
                            bound,
                            Entity::Term { ctx: phi, tm: tm.clone(), ty: ty.clone() },
                        );
                    }
                    format!("ok apply {rule} {session} = {} : {}{mark}", print::tm(tm), print::ty(ty))
                }
            };
            dev.bind(session, Entity::Limit { morphism, session: Some(live) });
            Ok(line)
        }
        DeclKind::Assert { ty } => {
            let (ctx, tm, actual) = dev.resolve_subject(name)?;
            let expected = elab_type(ty, &ctx, dev)?;
            if actual != expected {
                return Err(RunError::AssertMismatch {
                    given: print::ty(&expected),
                    actual: print::ty(&actual),
                });
            }
            Ok(format!("ok assert {} : {}", print::tm(&tm), print::ty(&actual)))
        }
        DeclKind::AssertCone { over } => {
            let k = dev.flat_ctx(name)?;
            let diagram = dev.flat_ctx(over)?;
            let (shape, der) = check_cone(&k, &diagram, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            dev.bind(name, Entity::Cone(shape));
            Ok(format!("ok assert_cone {name} over {over}"))
        }
        DeclKind::AssertGray => {
            let Entity::Ctx(seg) = dev.get(name)?.clone() else {
                return Err(RunError::WrongKind(name.clone(), "segmented context"));
            };
            let (shape, der) = check_gray(&seg, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = format!("ok assert_gray {name} (level {})", shape.level);
            dev.bind(name, Entity::Transfor(shape));
            Ok(line)
        }
        DeclKind::AssertCtrf => {
            let Entity::Ctx(seg) = dev.get(name)?.clone() else {
                return Err(RunError::WrongKind(name.clone(), "segmented context"));
            };
            let (shape, der) = check_ctrf(&seg, &dev.marks)?;
            report.derivations.push(DerivEntry { name: name.clone(), derivation: der });
            let line = format!("ok assert_ctrf {name} (level {})", shape.level);
            dev.bind(name, Entity::Transfor(shape));
            Ok(line)
        }
        DeclKind::AssertFail(inner) => {
            let mut probe = dev.clone();
            let mut scratch = Report::default();
            match process_decl(&mut probe, inner, RunOptions::default(), &mut scratch) {
                Ok(_) => Err(RunError::ExpectedFailure),
                Err(err) => Ok(format!(
                    "ok assert_fail {} {}: rejected: {err}",
                    inner.kind_word(),
                    inner.name
                )),
            }
        }
    }
}
