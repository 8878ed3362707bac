//! Surface abstract syntax, before name resolution.

use crate::lexer::Pos;

#[derive(Debug, Clone, PartialEq)]
pub enum TermAst {
    Name(String),
    /// `(u *^d_n v)`
    Comp(Box<TermAst>, usize, usize, Box<TermAst>),
    /// `1_(t)` and `1^n_(t)`
    Unit(usize, Box<TermAst>),
    /// `head[t1, ..., tn]`
    App(String, Vec<TermAst>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeAst {
    Obj,
    Arrow(TermAst, TermAst),
}

pub type EntryAst = (String, TypeAst);

#[derive(Debug, Clone, PartialEq)]
pub struct CtxAst {
    pub segments: Vec<Vec<EntryAst>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JName {
    J1,
    J2,
    J3,
    J4,
}

impl std::fmt::Display for JName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JName::J1 => write!(f, "J1"),
            JName::J2 => write!(f, "J2"),
            JName::J3 => write!(f, "J3"),
            JName::J4 => write!(f, "J4"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclKind {
    /// `ctx NAME = ( ... | ... )`
    Ctx { ctx: CtxAst },
    /// `coh NAME (ps) : ty` / `op NAME (ps) : ty`
    Head { is_coh: bool, ps: Vec<EntryAst>, ty: TypeAst },
    /// `let NAME in CTX = term`
    Let { ctx: String, term: TermAst },
    /// `cone NAME of CTX`
    Cone { of: String },
    /// `gray NAME of CTX`
    Gray { of: String },
    /// `limit NAME of CTX`
    Limit { of: String },
    /// `whisk NAME over CONE : TRANSFOR with (t, ...)`
    Whisk { cone: String, transfor: String, composites: Vec<TermAst> },
    /// `apply J site(SESSION, WHISK) [in CTX with <t, ...>] [as NAME]`
    Apply {
        rule: JName,
        session: String,
        whisk: String,
        cut: Option<(String, Vec<TermAst>)>,
        bind: Option<String>,
    },
    /// `assert NAME : ty`
    Assert { ty: TypeAst },
    /// `assert_cone NAME over CTX`
    AssertCone { over: String },
    /// `assert_gray NAME`
    AssertGray,
    /// `assert_ctrf NAME`
    AssertCtrf,
    /// `assert_fail DECL`
    AssertFail(Box<Decl>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub name: String,
    pub kind: DeclKind,
    pub pos: Pos,
}

impl Decl {
    pub fn kind_word(&self) -> &'static str {
        match &self.kind {
            DeclKind::Ctx { .. } => "ctx",
            DeclKind::Head { is_coh: true, .. } => "coh",
            DeclKind::Head { is_coh: false, .. } => "op",
            DeclKind::Let { .. } => "let",
            DeclKind::Cone { .. } => "cone",
            DeclKind::Gray { .. } => "gray",
            DeclKind::Limit { .. } => "limit",
            DeclKind::Whisk { .. } => "whisk",
            DeclKind::Apply { .. } => "apply",
            DeclKind::Assert { .. } => "assert",
            DeclKind::AssertCone { .. } => "assert_cone",
            DeclKind::AssertGray => "assert_gray",
            DeclKind::AssertCtrf => "assert_ctrf",
            DeclKind::AssertFail(_) => "assert_fail",
        }
    }
}
