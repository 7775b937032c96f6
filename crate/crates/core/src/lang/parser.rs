//! Recursive-descent parsers for the CoIn model language, the CI-LTL
//! formula language, and the textual never-claim block.
//!
//! Accepted model grammar:
//!
//! ```text
//! model      := (automaton | composite)+ system
//! automaton  := "automaton" IDENT "(" INT ")" "{"
//!                 "state" IDENT ("," IDENT)* ";"
//!                 "init" IDENT ";"
//!                 "trans" translist? ";" "}"
//! translist  := trans ("," trans)*
//! trans      := IDENT "->" IDENT label
//! label      := "(" endpoint "," IDENT "," endpoint ")"
//! endpoint   := INT | "-"
//! composite  := "composite" IDENT "{" IDENT ("," IDENT)* ";" filter? "}"
//! filter     := ("restrictL" | "onlyL") label ("," label)* ";"
//! system     := "system" IDENT ";"
//! ```

use crate::lang::ast::{
    self, CompositeDecl, FilterKind, PrimitiveDecl, RawEndpoint, RawLabel, SourceModel, TransDecl,
};
use crate::lang::lexer::{tokenize, Loc, Token, TokenKind};
use crate::lang::ParseError;
use crate::ltl::formula::{AtomKind, CiLtlFormula};

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text).map_err(|e| ParseError::Lex { message: e.message, loc: e.loc })?;
        Ok(Cursor { tokens, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn loc(&self) -> Loc {
        self.peek().loc
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<Token, ParseError> {
        if &self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&kind.to_string()))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Loc), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(_) => {
                let t = self.advance();
                match t.kind {
                    TokenKind::Ident(s) => Ok((s, t.loc)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Loc, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if s == kw => Ok(self.advance().loc),
            _ => Err(self.unexpected(&format!("'{kw}'"))),
        }
    }

    fn expect_int(&mut self) -> Result<(u32, Loc), ParseError> {
        match self.peek().kind {
            TokenKind::Int(n) => {
                let loc = self.advance().loc;
                Ok((n, loc))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            message: format!("expected {expected}, found {}", self.peek().kind),
            loc: self.loc(),
        }
    }
}

/// Parses and validates a complete CoIn model.
pub fn parse_model(text: &str) -> Result<SourceModel, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut automata = Vec::new();
    let mut composites = Vec::new();

    loop {
        match &cur.peek().kind {
            TokenKind::Ident(s) if s == "automaton" => automata.push(parse_automaton(&mut cur)?),
            TokenKind::Ident(s) if s == "composite" => composites.push(parse_composite(&mut cur)?),
            TokenKind::Ident(s) if s == "system" => break,
            TokenKind::Eof => {
                return Err(ParseError::Syntax {
                    message: "missing system declaration".to_string(),
                    loc: cur.loc(),
                })
            }
            _ => return Err(cur.unexpected("'automaton', 'composite' or 'system'")),
        }
    }
    if automata.is_empty() && composites.is_empty() {
        return Err(cur.unexpected("at least one automaton or composite declaration"));
    }

    let system_loc = cur.expect_keyword("system")?;
    let (system, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::Semi)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of input after system declaration"));
    }

    let model = SourceModel { automata, composites, system, system_loc };
    ast::validate(&model)?;
    Ok(model)
}

fn parse_automaton(cur: &mut Cursor) -> Result<PrimitiveDecl, ParseError> {
    let loc = cur.expect_keyword("automaton")?;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::LParen)?;
    let (component_id, _) = cur.expect_int()?;
    cur.expect(&TokenKind::RParen)?;
    cur.expect(&TokenKind::LBrace)?;

    cur.expect_keyword("state")?;
    let mut states = vec![cur.expect_ident()?.0];
    while matches!(cur.peek().kind, TokenKind::Comma) {
        cur.advance();
        states.push(cur.expect_ident()?.0);
    }
    cur.expect(&TokenKind::Semi)?;

    cur.expect_keyword("init")?;
    let (init, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::Semi)?;

    cur.expect_keyword("trans")?;
    let mut trans = Vec::new();
    if !matches!(cur.peek().kind, TokenKind::Semi) {
        loop {
            trans.push(parse_trans(cur)?);
            if matches!(cur.peek().kind, TokenKind::Comma) {
                cur.advance();
            } else {
                break;
            }
        }
    }
    cur.expect(&TokenKind::Semi)?;
    cur.expect(&TokenKind::RBrace)?;

    Ok(PrimitiveDecl { name, component_id, states, init, trans, loc })
}

fn parse_trans(cur: &mut Cursor) -> Result<TransDecl, ParseError> {
    let (from, loc) = cur.expect_ident()?;
    cur.expect(&TokenKind::Arrow)?;
    let (to, _) = cur.expect_ident()?;
    let label = parse_label(cur)?;
    Ok(TransDecl { from, to, label, loc })
}

fn parse_label(cur: &mut Cursor) -> Result<RawLabel, ParseError> {
    cur.expect(&TokenKind::LParen)?;
    let sender = parse_endpoint(cur)?;
    cur.expect(&TokenKind::Comma)?;
    let (action, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::Comma)?;
    let receiver = parse_endpoint(cur)?;
    cur.expect(&TokenKind::RParen)?;
    Ok(RawLabel { sender, action, receiver })
}

fn parse_endpoint(cur: &mut Cursor) -> Result<RawEndpoint, ParseError> {
    match cur.peek().kind {
        TokenKind::Dash => {
            cur.advance();
            Ok(RawEndpoint::Open)
        }
        TokenKind::Int(n) => {
            cur.advance();
            Ok(RawEndpoint::Id(n))
        }
        _ => Err(cur.unexpected("a component id or '-'")),
    }
}

fn parse_composite(cur: &mut Cursor) -> Result<CompositeDecl, ParseError> {
    let loc = cur.expect_keyword("composite")?;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::LBrace)?;

    let mut children = vec![cur.expect_ident()?.0];
    while matches!(cur.peek().kind, TokenKind::Comma) {
        cur.advance();
        children.push(cur.expect_ident()?.0);
    }
    cur.expect(&TokenKind::Semi)?;

    let filter = match &cur.peek().kind {
        TokenKind::Ident(s) if s == "restrictL" || s == "onlyL" => {
            let kind = if s == "restrictL" { FilterKind::RestrictL } else { FilterKind::OnlyL };
            cur.advance();
            let mut labels = vec![parse_label(cur)?];
            while matches!(cur.peek().kind, TokenKind::Comma) {
                cur.advance();
                labels.push(parse_label(cur)?);
            }
            cur.expect(&TokenKind::Semi)?;
            Some((kind, labels))
        }
        _ => None,
    };
    cur.expect(&TokenKind::RBrace)?;

    Ok(CompositeDecl { name, children, filter, loc })
}

/// Parses a CI-LTL formula.
///
/// Precedence, loosest first: `->` (right-assoc), `||`, `&&`, `U`/`R`
/// (left-assoc), then the prefix operators `!`, `X`, `F`, `G`.
pub fn parse_formula(text: &str) -> Result<CiLtlFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = parse_implies(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of formula"));
    }
    Ok(f)
}

fn parse_implies(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    let lhs = parse_or(cur)?;
    if matches!(cur.peek().kind, TokenKind::Arrow) {
        cur.advance();
        let rhs = parse_implies(cur)?;
        Ok(CiLtlFormula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_or(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    let mut lhs = parse_and(cur)?;
    while matches!(cur.peek().kind, TokenKind::OrOr) {
        cur.advance();
        let rhs = parse_and(cur)?;
        lhs = CiLtlFormula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    let mut lhs = parse_until(cur)?;
    while matches!(cur.peek().kind, TokenKind::AndAnd) {
        cur.advance();
        let rhs = parse_until(cur)?;
        lhs = CiLtlFormula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_until(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    let mut lhs = parse_unary(cur)?;
    loop {
        let op = match &cur.peek().kind {
            TokenKind::Ident(s) if s == "U" => 'U',
            TokenKind::Ident(s) if s == "R" => 'R',
            _ => break,
        };
        cur.advance();
        let rhs = parse_unary(cur)?;
        lhs = if op == 'U' {
            CiLtlFormula::until(lhs, rhs)
        } else {
            CiLtlFormula::release(lhs, rhs)
        };
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    match &cur.peek().kind {
        TokenKind::Bang => {
            cur.advance();
            Ok(CiLtlFormula::not(parse_unary(cur)?))
        }
        TokenKind::Ident(s) if s == "X" => {
            cur.advance();
            Ok(CiLtlFormula::next(parse_unary(cur)?))
        }
        TokenKind::Ident(s) if s == "F" => {
            cur.advance();
            Ok(CiLtlFormula::finally(parse_unary(cur)?))
        }
        TokenKind::Ident(s) if s == "G" => {
            cur.advance();
            Ok(CiLtlFormula::globally(parse_unary(cur)?))
        }
        _ => parse_primary(cur),
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<CiLtlFormula, ParseError> {
    match &cur.peek().kind {
        TokenKind::LParen => {
            let open_loc = cur.loc();
            cur.advance();
            let f = parse_implies(cur)?;
            if !matches!(cur.peek().kind, TokenKind::RParen) {
                return Err(ParseError::Syntax {
                    message: format!("unbalanced parenthesis opened at {open_loc}"),
                    loc: cur.loc(),
                });
            }
            cur.advance();
            Ok(f)
        }
        TokenKind::Ident(s) if s == "true" => {
            cur.advance();
            Ok(CiLtlFormula::True)
        }
        TokenKind::Ident(s) if s == "false" => {
            cur.advance();
            Ok(CiLtlFormula::False)
        }
        TokenKind::Ident(s) if s == "act" || s == "en" => {
            let kind = if s == "act" { AtomKind::Act } else { AtomKind::En };
            let loc = cur.loc();
            cur.advance();
            let label = parse_label(cur).map_err(|e| ParseError::Syntax {
                message: format!("malformed label atom: {e}"),
                loc,
            })?;
            if label.sender == RawEndpoint::Open && label.receiver == RawEndpoint::Open {
                return Err(ParseError::Syntax {
                    message: format!("malformed label atom: {label} has two open endpoints"),
                    loc,
                });
            }
            Ok(CiLtlFormula::Atom(crate::ltl::formula::RawAtom { kind, label }))
        }
        _ => Err(cur.unexpected("a formula")),
    }
}

/// A parsed never-claim block, still over raw (uninterned) labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RawClaim {
    pub states: Vec<String>,
    pub init: String,
    pub accepting: Vec<String>,
    /// `(from, to, guard)` with the guard in disjunctive normal form:
    /// a disjunction of conjunctions of possibly negated atoms.
    pub edges: Vec<(String, String, RawGuard)>,
}

/// Disjunctive normal form guard. The empty disjunction is `false`;
/// a disjunct with no literals is `true`.
pub type RawGuard = Vec<Vec<RawGuardLit>>;

#[derive(Clone, Debug, PartialEq)]
pub struct RawGuardLit {
    pub positive: bool,
    pub kind: AtomKind,
    pub label: RawLabel,
}

/// Parses a never-claim block:
///
/// ```text
/// never { state s0, s1; init s0; accept s1;
///         trans s0 -> s0 [true], s0 -> s1 [act(1,b,1) && !en(2,c,1)]; }
/// ```
///
/// Tokens before the `never` keyword are skipped, so a claim appended to a
/// model file parses directly.
pub fn parse_claim(text: &str) -> Result<RawClaim, ParseError> {
    let mut cur = Cursor::new(text)?;
    // Skip leading model text, if any.
    while !cur.at_eof() {
        if matches!(&cur.peek().kind, TokenKind::Ident(s) if s == "never") {
            break;
        }
        cur.advance();
    }
    if cur.at_eof() {
        return Err(ParseError::Syntax {
            message: "no never-claim block found".to_string(),
            loc: cur.loc(),
        });
    }
    cur.expect_keyword("never")?;
    cur.expect(&TokenKind::LBrace)?;

    cur.expect_keyword("state")?;
    let mut states = vec![cur.expect_ident()?.0];
    while matches!(cur.peek().kind, TokenKind::Comma) {
        cur.advance();
        states.push(cur.expect_ident()?.0);
    }
    cur.expect(&TokenKind::Semi)?;

    cur.expect_keyword("init")?;
    let (init, _) = cur.expect_ident()?;
    cur.expect(&TokenKind::Semi)?;

    cur.expect_keyword("accept")?;
    let mut accepting = Vec::new();
    if !matches!(cur.peek().kind, TokenKind::Semi) {
        accepting.push(cur.expect_ident()?.0);
        while matches!(cur.peek().kind, TokenKind::Comma) {
            cur.advance();
            accepting.push(cur.expect_ident()?.0);
        }
    }
    cur.expect(&TokenKind::Semi)?;

    cur.expect_keyword("trans")?;
    let mut edges = Vec::new();
    if !matches!(cur.peek().kind, TokenKind::Semi) {
        loop {
            let (from, _) = cur.expect_ident()?;
            cur.expect(&TokenKind::Arrow)?;
            let (to, _) = cur.expect_ident()?;
            cur.expect(&TokenKind::LBracket)?;
            let guard = parse_guard(&mut cur)?;
            cur.expect(&TokenKind::RBracket)?;
            edges.push((from, to, guard));
            if matches!(cur.peek().kind, TokenKind::Comma) {
                cur.advance();
            } else {
                break;
            }
        }
    }
    cur.expect(&TokenKind::Semi)?;
    cur.expect(&TokenKind::RBrace)?;

    let claim = RawClaim { states, init, accepting, edges };
    validate_claim(&claim, cur.loc())?;
    Ok(claim)
}

fn validate_claim(claim: &RawClaim, loc: Loc) -> Result<(), ParseError> {
    let known = |name: &str| claim.states.iter().any(|s| s == name);
    let invalid = |message: String| ParseError::Invalid { message, loc };
    if !known(&claim.init) {
        return Err(invalid(format!("claim init state '{}' is not declared", claim.init)));
    }
    for a in &claim.accepting {
        if !known(a) {
            return Err(invalid(format!("claim accepting state '{a}' is not declared")));
        }
    }
    for (from, to, _) in &claim.edges {
        for s in [from, to] {
            if !known(s) {
                return Err(invalid(format!("claim edge uses undeclared state '{s}'")));
            }
        }
    }
    Ok(())
}

fn parse_guard(cur: &mut Cursor) -> Result<RawGuard, ParseError> {
    match &cur.peek().kind {
        TokenKind::Ident(s) if s == "true" => {
            cur.advance();
            return Ok(vec![vec![]]);
        }
        TokenKind::Ident(s) if s == "false" => {
            cur.advance();
            return Ok(vec![]);
        }
        _ => {}
    }
    let mut disjuncts = vec![parse_guard_conj(cur)?];
    while matches!(cur.peek().kind, TokenKind::OrOr) {
        cur.advance();
        disjuncts.push(parse_guard_conj(cur)?);
    }
    Ok(disjuncts)
}

fn parse_guard_conj(cur: &mut Cursor) -> Result<Vec<RawGuardLit>, ParseError> {
    let mut lits = vec![parse_guard_lit(cur)?];
    while matches!(cur.peek().kind, TokenKind::AndAnd) {
        cur.advance();
        lits.push(parse_guard_lit(cur)?);
    }
    Ok(lits)
}

fn parse_guard_lit(cur: &mut Cursor) -> Result<RawGuardLit, ParseError> {
    let positive = if matches!(cur.peek().kind, TokenKind::Bang) {
        cur.advance();
        false
    } else {
        true
    };
    let kind = match &cur.peek().kind {
        TokenKind::Ident(s) if s == "act" => AtomKind::Act,
        TokenKind::Ident(s) if s == "en" => AtomKind::En,
        _ => return Err(cur.unexpected("'act' or 'en'")),
    };
    cur.advance();
    let label = parse_label(cur)?;
    Ok(RawGuardLit { positive, kind, label })
}
