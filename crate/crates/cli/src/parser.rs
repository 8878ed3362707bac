//! Recursive-descent parser for the surface language.

use crate::ast::*;
use crate::lexer::{lex, ParseError, Pos, Tok, Token};

pub struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_file(src: &str) -> PResult<Vec<Decl>> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let mut decls = Vec::new();
    while !p.eof() {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

pub fn parse_term(src: &str) -> PResult<TermAst> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> PResult<TypeAst> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_ctx(src: &str) -> PResult<CtxAst> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let c = p.ctx_literal()?;
    p.expect_eof()?;
    Ok(c)
}

impl Parser {
    fn eof(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn pos(&self) -> Pos {
        self.toks
            .get(self.at)
            .or_else(|| self.toks.last())
            .map(|t| t.pos)
            .unwrap_or(Pos { line: 1, col: 1 })
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn next(&mut self) -> PResult<Tok> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.tok.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        let got = self.next()?;
        if got == tok {
            Ok(())
        } else {
            self.at -= 1;
            self.err(format!("expected {tok}, found {got}"))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.eof() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => {
                self.at -= 1;
                self.err(format!("expected an identifier, found {other}"))
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        let got = self.ident()?;
        if got == kw {
            Ok(())
        } else {
            self.at -= 1;
            self.err(format!("expected `{kw}`, found `{got}`"))
        }
    }

    fn num(&mut self) -> PResult<usize> {
        match self.next()? {
            Tok::Num(n) => Ok(n),
            other => {
                self.at -= 1;
                self.err(format!("expected a number, found {other}"))
            }
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        let word = self.ident()?;
        let decl = match word.as_str() {
            "ctx" => {
                let name = self.ident()?;
                self.expect(Tok::Equals)?;
                let ctx = self.ctx_literal()?;
                Decl { name, kind: DeclKind::Ctx { ctx }, pos }
            }
            "coh" | "op" => {
                let is_coh = word == "coh";
                let name = self.ident()?;
                self.expect(Tok::LParen)?;
                let ps = self.entries()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                Decl { name, kind: DeclKind::Head { is_coh, ps, ty }, pos }
            }
            "let" => {
                let name = self.ident()?;
                self.keyword("in")?;
                let ctx = self.ident()?;
                self.expect(Tok::Equals)?;
                let term = self.term()?;
                Decl { name, kind: DeclKind::Let { ctx, term }, pos }
            }
            "cone" | "gray" | "limit" => {
                let name = self.ident()?;
                self.keyword("of")?;
                let of = self.ident()?;
                let kind = match word.as_str() {
                    "cone" => DeclKind::Cone { of },
                    "gray" => DeclKind::Gray { of },
                    _ => DeclKind::Limit { of },
                };
                Decl { name, kind, pos }
            }
            "whisk" => {
                let name = self.ident()?;
                self.keyword("over")?;
                let cone = self.ident()?;
                self.expect(Tok::Colon)?;
                let transfor = self.ident()?;
                let mut composites = Vec::new();
                if matches!(self.peek(), Some(Tok::Ident(s)) if s == "with") {
                    self.keyword("with")?;
                    self.expect(Tok::LParen)?;
                    composites = self.term_list(Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                }
                Decl { name, kind: DeclKind::Whisk { cone, transfor, composites }, pos }
            }
            "apply" => {
                let rule = match self.ident()?.as_str() {
                    "J1" => JName::J1,
                    "J2" => JName::J2,
                    "J3" => JName::J3,
                    "J4" => JName::J4,
                    other => {
                        self.at -= 1;
                        return self.err(format!("unknown rule `{other}`"));
                    }
                };
                self.keyword("site")?;
                self.expect(Tok::LParen)?;
                let session = self.ident()?;
                self.expect(Tok::Comma)?;
                let whisk = self.ident()?;
                self.expect(Tok::RParen)?;
                let mut cut = None;
                if matches!(self.peek(), Some(Tok::Ident(s)) if s == "in") {
                    self.keyword("in")?;
                    let cut_ctx = self.ident()?;
                    self.keyword("with")?;
                    self.expect(Tok::LAngle)?;
                    let terms = self.term_list(Tok::RAngle)?;
                    self.expect(Tok::RAngle)?;
                    cut = Some((cut_ctx, terms));
                }
                let mut bind = None;
                if matches!(self.peek(), Some(Tok::Ident(s)) if s == "as") {
                    self.keyword("as")?;
                    bind = Some(self.ident()?);
                }
                let name = bind.clone().unwrap_or_else(|| format!("{rule}@{}:{}", pos.line, pos.col));
                Decl { name, kind: DeclKind::Apply { rule, session, whisk, cut, bind }, pos }
            }
            "assert" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                Decl { name, kind: DeclKind::Assert { ty }, pos }
            }
            "assert_cone" => {
                let name = self.ident()?;
                self.keyword("over")?;
                let over = self.ident()?;
                Decl { name, kind: DeclKind::AssertCone { over }, pos }
            }
            "assert_gray" => {
                let name = self.ident()?;
                Decl { name, kind: DeclKind::AssertGray, pos }
            }
            "assert_ctrf" => {
                let name = self.ident()?;
                Decl { name, kind: DeclKind::AssertCtrf, pos }
            }
            "assert_fail" => {
                let inner = self.decl()?;
                Decl {
                    name: format!("!{}", inner.name),
                    kind: DeclKind::AssertFail(Box::new(inner)),
                    pos,
                }
            }
            other => {
                self.at -= 1;
                return self.err(format!("unknown declaration `{other}`"));
            }
        };
        Ok(decl)
    }

    fn ctx_literal(&mut self) -> PResult<CtxAst> {
        self.expect(Tok::LParen)?;
        let mut segments = vec![self.entries()?];
        while matches!(self.peek(), Some(Tok::Pipe)) {
            self.expect(Tok::Pipe)?;
            segments.push(self.entries()?);
        }
        self.expect(Tok::RParen)?;
        Ok(CtxAst { segments })
    }

    fn entries(&mut self) -> PResult<Vec<EntryAst>> {
        let mut out = Vec::new();
        if !matches!(self.peek(), Some(Tok::Ident(_))) {
            return Ok(out);
        }
        loop {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            out.push((name, ty));
            if matches!(self.peek(), Some(Tok::Comma)) {
                self.expect(Tok::Comma)?;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn ty(&mut self) -> PResult<TypeAst> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "Ob") {
            self.keyword("Ob")?;
            return Ok(TypeAst::Obj);
        }
        let src = self.term()?;
        self.expect(Tok::Arrow)?;
        let tgt = self.term()?;
        Ok(TypeAst::Arrow(src, tgt))
    }

    fn term_list(&mut self, closer: Tok) -> PResult<Vec<TermAst>> {
        let mut out = Vec::new();
        if self.peek() == Some(&closer) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if matches!(self.peek(), Some(Tok::Comma)) {
                self.expect(Tok::Comma)?;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> PResult<TermAst> {
        let head = self.atom()?;
        if matches!(self.peek(), Some(Tok::StarHat)) {
            self.expect(Tok::StarHat)?;
            let d = self.num()?;
            self.expect(Tok::Underscore)?;
            let n = self.num()?;
            let rhs = self.atom()?;
            return Ok(TermAst::Comp(Box::new(head), d, n, Box::new(rhs)));
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<TermAst> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Num(1)) => {
                self.expect(Tok::Num(1))?;
                let iterate = if matches!(self.peek(), Some(Tok::Caret)) {
                    self.expect(Tok::Caret)?;
                    self.num()?
                } else {
                    1
                };
                self.expect(Tok::Underscore)?;
                self.expect(Tok::LParen)?;
                let arg = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(TermAst::Unit(iterate, Box::new(arg)))
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                if matches!(self.peek(), Some(Tok::LBracket)) {
                    self.expect(Tok::LBracket)?;
                    let args = self.term_list(Tok::RBracket)?;
                    self.expect(Tok::RBracket)?;
                    Ok(TermAst::App(name, args))
                } else {
                    Ok(TermAst::Name(name))
                }
            }
            _ => self.err("expected a term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_three_entry_context() {
        let decls = parse_file("ctx G1 = (x : Ob, y : Ob, f : x -> y)").unwrap();
        assert_eq!(decls.len(), 1);
        match &decls[0].kind {
            DeclKind::Ctx { ctx } => {
                assert_eq!(ctx.segments.len(), 1);
                assert_eq!(ctx.segments[0].len(), 3);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parses_segments_with_empty_groups() {
        let decls = parse_file("ctx M = ( | c : Ob | | | )").unwrap();
        match &decls[0].kind {
            DeclKind::Ctx { ctx } => {
                assert_eq!(ctx.segments.len(), 5);
                assert_eq!(ctx.segments[1].len(), 1);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parses_an_identity_coherence() {
        let decls = parse_file("coh id1 (x : Ob) : x -> x").unwrap();
        match &decls[0].kind {
            DeclKind::Head { is_coh: true, ps, ty } => {
                assert_eq!(ps.len(), 1);
                assert!(matches!(ty, TypeAst::Arrow(..)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parses_composites_and_units() {
        let t = parse_term("(α *^2_1 (1_(p_x) *^2_0 β))").unwrap();
        match t {
            TermAst::Comp(_, 2, 1, rhs) => match *rhs {
                TermAst::Comp(lhs, 2, 0, _) => {
                    assert!(matches!(*lhs, TermAst::Unit(1, _)));
                }
                _ => panic!(),
            },
            _ => panic!(),
        }
    }

    #[test]
    fn malformed_arrow_reports_position() {
        let err = parse_file("ctx B = (f : x - y)").unwrap_err();
        assert_eq!(err.pos.line, 1);
        assert_eq!(err.pos.col, 16);
    }

    #[test]
    fn parses_apply_forms() {
        let decls =
            parse_file("apply J3 site(L, W)\napply J1 site(L, W) in K with <x, y> as um").unwrap();
        assert_eq!(decls.len(), 2);
        match &decls[1].kind {
            DeclKind::Apply { rule: JName::J1, cut: Some((c, ts)), bind: Some(b), .. } => {
                assert_eq!(c, "K");
                assert_eq!(ts.len(), 2);
                assert_eq!(b, "um");
            }
            _ => panic!(),
        }
    }
}
