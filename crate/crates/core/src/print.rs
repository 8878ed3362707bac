//! Canonical printer.
//!
//! One deterministic surface form per object, used byte-for-byte in golden
//! tests:
//!   - binary composites print as `(u *^d_n v)`, fully parenthesized;
//!   - iterated units print as `1_(t)` and `1^n_(t)` for n >= 2;
//!   - universal-cone cells print as `lim` / `u<proj>`, universal-property
//!     cells as `uni_<var>`, each with `[t1, ..., tn]` unless the carried
//!     substitution is the identity;
//!   - arrow types print as `s -> t` with the base left implicit.

use std::collections::HashMap;

use crate::catalog;
use crate::syntax::{Ctx, Schema, Sub, Tm, Ty};

/// Display names for user-declared operation and coherence heads.
#[derive(Debug, Clone, Default)]
pub struct SchemaNames {
    map: HashMap<Schema, String>,
}

impl SchemaNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, schema: Schema, name: impl Into<String>) {
        self.map.insert(schema, name.into());
    }

    pub fn lookup(&self, schema: &Schema) -> Option<&str> {
        self.map.get(schema).map(|s| s.as_str())
    }
}

pub fn tm(t: &Tm) -> String {
    fmt_tm(t, None)
}

pub fn tm_named(t: &Tm, names: &SchemaNames) -> String {
    fmt_tm(t, Some(names))
}

pub fn ty(a: &Ty) -> String {
    fmt_ty(a, None)
}

pub fn ty_named(a: &Ty, names: &SchemaNames) -> String {
    fmt_ty(a, Some(names))
}

pub fn ctx(c: &Ctx) -> String {
    ctx_seg(c, &[c.len()])
}

/// Context split into segments of the given lengths, `|`-separated.
pub fn ctx_seg(c: &Ctx, seg_lens: &[usize]) -> String {
    let mut parts = Vec::with_capacity(seg_lens.len());
    let mut pos = 0;
    for &len in seg_lens {
        let entries = (pos..pos + len)
            .map(|i| {
                let (v, t) = c.entry(i).expect("segment lengths cover the context");
                format!("{} : {}", v.ident, fmt_ty(t, None))
            })
            .collect::<Vec<_>>()
            .join(", ");
        parts.push(entries);
        pos += len;
    }
    format!("({})", parts.join(" | "))
}

pub fn sub(s: &Sub) -> String {
    sub_opt(s, None)
}

pub fn sub_named(s: &Sub, names: &SchemaNames) -> String {
    sub_opt(s, Some(names))
}

fn sub_opt(s: &Sub, names: Option<&SchemaNames>) -> String {
    let inner = s
        .terms
        .iter()
        .map(|t| fmt_tm(t, names))
        .collect::<Vec<_>>()
        .join(", ");
    format!("<{inner}>")
}

fn fmt_ty(a: &Ty, names: Option<&SchemaNames>) -> String {
    match a {
        Ty::Obj => "Ob".into(),
        Ty::Arr(arr) => format!("{} -> {}", fmt_tm(&arr.src, names), fmt_tm(&arr.tgt, names)),
    }
}

fn fmt_tm(t: &Tm, names: Option<&SchemaNames>) -> String {
    match t {
        Tm::Var(v) => v.ident.to_string(),
        Tm::Op(sch, sub) => {
            if let Some((d, n)) = catalog::recognize_comp(sch) {
                let u = fmt_tm(&sub.terms[2 * d], names);
                let v = fmt_tm(sub.terms.last().expect("comp sub nonempty"), names);
                return format!("({u} *^{d}_{n} {v})");
            }
            if let Some(name) = names.and_then(|n| n.lookup(sch)) {
                return format!("{name}{}", args(sub, names));
            }
            format!("op{{{} : {}}}{}", ctx(&sch.ps), fmt_ty(&sch.ty, names), args(sub, names))
        }
        Tm::Coh(sch, sub) => {
            if let Some(k) = catalog::recognize_identity(sch) {
                let g = sch.ps.dim();
                let cell = fmt_tm(&sub.terms[2 * g], names);
                return if k == 1 {
                    format!("1_({cell})")
                } else {
                    format!("1^{k}_({cell})")
                };
            }
            if let Some(name) = names.and_then(|n| n.lookup(sch)) {
                return format!("{name}{}", args(sub, names));
            }
            format!("coh{{{} : {}}}{}", ctx(&sch.ps), fmt_ty(&sch.ty, names), args(sub, names))
        }
        Tm::UCone(site, x, sub) => {
            let head = if x.pos == site.diagram.len() {
                "lim".to_string()
            } else {
                format!("u{}", x.ident)
            };
            if sub.is_identity() {
                head
            } else {
                format!("{head}{}", args(sub, names))
            }
        }
        Tm::Uni(_, x, sub) => {
            let head = format!("uni_{}", x.ident);
            if sub.is_identity() {
                head
            } else {
                format!("{head}{}", args(sub, names))
            }
        }
        Tm::Inv(u) => format!("inv({})", fmt_tm(u, names)),
        Tm::Eta(u) => format!("eta({})", fmt_tm(u, names)),
        Tm::Eps(u) => format!("eps({})", fmt_tm(u, names)),
    }
}

fn args(sub: &Sub, names: Option<&SchemaNames>) -> String {
    let inner = sub
        .terms
        .iter()
        .map(|t| fmt_tm(t, names))
        .collect::<Vec<_>>()
        .join(", ");
    format!("[{inner}]")
}

// judgment strings used by derivations

pub fn judg_ctx(c: &Ctx) -> String {
    format!("{} |-", ctx(c))
}

pub fn judg_ty(c: &Ctx, a: &Ty) -> String {
    format!("{} |- {}", ctx(c), ty(a))
}

pub fn judg_tm(c: &Ctx, t: &Tm, a: &Ty) -> String {
    format!("{} |- {} : {}", ctx(c), tm(t), ty(a))
}

pub fn judg_sub(dom: &Ctx, s: &Sub, cod: &Ctx) -> String {
    format!("{} |- {} : {}", ctx(dom), sub(s), ctx(cod))
}

pub fn judg_ps(c: &Ctx) -> String {
    format!("{} |-ps", ctx(c))
}

pub fn judg_ps_focus(c: &Ctx, v: &str, a: &Ty) -> String {
    format!("{} |-ps {} : {}", ctx(c), v, ty(a))
}
