use crate::formula::{AnnotatedFormula, Atom, BasicFormula, FormulaError, StrategyId, StrategyKind};
use crate::interval::{Interval, IntervalError};
use crate::rational::Rational;
use crate::strategies::{StrategyError, StrategyRegistry};

use super::lexer::{tokenize, Tok, Token};
use super::{
    Constraint, ParseError, Position, SourceAnnotated, SourceAtom, SourceClause, SourceFormula, SourceProgram,
    SourceTerm,
};

/// Shorthands accepted after `&`.
const CONJUNCTIVE_ALIASES: [(&str, &str); 2] = [("ig", "igc"), ("in", "inc")];

pub(crate) struct Parser<'r> {
    toks: Vec<Token>,
    at: usize,
    registry: &'r StrategyRegistry,
}

type PResult<T> = Result<T, ParseError>;

impl<'r> Parser<'r> {
    pub fn new(src: &str, registry: &'r StrategyRegistry) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, at: 0, registry })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn here(&self) -> Position {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax { pos: self.here(), expected: expected.to_string(), found: self.peek().to_string() }
    }

    pub fn expect(&mut self, tok: Tok, expected: &str) -> PResult<Position> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.error(expected))
        }
    }

    /// A lowercase- or digit-initial word.
    pub fn word(&mut self, expected: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(expected)),
        }
    }

    /// An uppercase-initial word (used for rule names in proof text).
    pub fn upper_word(&mut self, expected: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(expected)),
        }
    }

    pub fn program(&mut self) -> PResult<SourceProgram> {
        let mut clauses = Vec::new();
        while !self.at_eof() {
            clauses.push(self.clause()?);
        }
        Ok(SourceProgram { clauses })
    }

    fn clause(&mut self) -> PResult<SourceClause> {
        let head = self.formula()?;
        self.expect(Tok::Colon, "`:` after the clause head")?;
        let head_annotation = self.interval()?;
        let mut body = Vec::new();
        let mut constraints = Vec::new();
        if self.eat(&Tok::Arrow) && !matches!(self.peek(), Tok::Dot) {
            loop {
                if let (Tok::Var(v), Tok::Neq) = (self.peek().clone(), self.peek_at(1)) {
                    self.bump();
                    self.bump();
                    let other = self.term()?;
                    constraints.push(Constraint { var: v, other });
                } else {
                    let formula = self.formula()?;
                    self.expect(Tok::Colon, "`:` after a body formula")?;
                    let annotation = self.interval()?;
                    body.push(SourceAnnotated { formula, annotation });
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "`.` at the end of the clause")?;
        Ok(SourceClause { head, head_annotation, body, constraints })
    }

    fn resolve_connective(&self, kind: StrategyKind, name: &str, pos: Position) -> PResult<StrategyId> {
        let name = match kind {
            StrategyKind::Conjunctive => {
                CONJUNCTIVE_ALIASES.iter().find(|(a, _)| *a == name).map(|(_, full)| *full).unwrap_or(name)
            }
            StrategyKind::Disjunctive => name,
        };
        match self.registry.lookup(name) {
            Ok(s) if s.kind() == kind => Ok(s.id().clone()),
            Ok(s) => Err(ParseError::ConnectiveKind {
                pos,
                name: name.to_string(),
                connective: kind.connective(),
                actual: s.kind(),
            }),
            Err(StrategyError::Unknown(_)) | Err(_) => {
                Err(ParseError::UnknownStrategy { pos, name: name.to_string() })
            }
        }
    }

    pub fn formula(&mut self) -> PResult<SourceFormula> {
        let start = self.here();
        let mut units = vec![self.unit()?];
        let mut connective: Option<StrategyId> = None;
        while let Tok::Conn(kind, name) = self.peek().clone() {
            let pos = self.bump().pos;
            let id = self.resolve_connective(kind, &name, pos)?;
            match &connective {
                Some(prev) if *prev != id => return Err(ParseError::MixedConnective { pos }),
                _ => connective = Some(id),
            }
            units.push(self.unit()?);
        }
        let formula = match connective {
            None => units.pop().expect("one unit"),
            Some(strategy) => {
                let mut atoms = Vec::new();
                for u in units {
                    if let Some(inner) = &u.strategy {
                        if *inner != strategy {
                            return Err(ParseError::MixedConnective { pos: start });
                        }
                    }
                    atoms.extend(u.atoms);
                }
                SourceFormula { strategy: Some(strategy), atoms }
            }
        };
        for (i, a) in formula.atoms.iter().enumerate() {
            if formula.atoms[..i].contains(a) {
                let dup = Atom::new(a.predicate.clone(), a.args.iter().map(|t| t.to_string()));
                return Err(ParseError::Formula { pos: start, source: FormulaError::DuplicateAtom(dup) });
            }
        }
        Ok(formula)
    }

    fn unit(&mut self) -> PResult<SourceFormula> {
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)` closing the formula")?;
            Ok(f)
        } else {
            let atom = self.atom()?;
            Ok(SourceFormula { strategy: None, atoms: vec![atom] })
        }
    }

    fn atom(&mut self) -> PResult<SourceAtom> {
        let predicate = match self.peek().clone() {
            Tok::Word(w) if w.starts_with(|c: char| c.is_ascii_lowercase()) => {
                self.bump();
                w
            }
            _ => return Err(self.error("an atom")),
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)` closing the argument list")?;
        }
        Ok(SourceAtom { predicate, args })
    }

    fn term(&mut self) -> PResult<SourceTerm> {
        match self.peek().clone() {
            Tok::Word(w) if !w.contains('.') => {
                self.bump();
                Ok(SourceTerm::Constant(w))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(SourceTerm::Variable(v))
            }
            _ => Err(self.error("a constant or variable")),
        }
    }

    fn rational(&mut self) -> PResult<(Rational, Position)> {
        let pos = self.here();
        let mut text = self.word("a rational number")?;
        if self.eat(&Tok::Slash) {
            text.push('/');
            text.push_str(&self.word("a denominator")?);
        }
        let value = text.parse::<Rational>().map_err(|e| ParseError::Syntax {
            pos,
            expected: "a rational number".into(),
            found: format!("`{text}` ({e})"),
        })?;
        Ok((value, pos))
    }

    pub fn interval(&mut self) -> PResult<Interval> {
        let open = self.expect(Tok::LBracket, "`[` opening an annotation")?;
        let (lo, lo_pos) = self.rational()?;
        self.expect(Tok::Comma, "`,` between annotation bounds")?;
        let (hi, hi_pos) = self.rational()?;
        self.expect(Tok::RBracket, "`]` closing the annotation")?;
        let lo_in_range = lo.is_probability();
        Interval::new(lo, hi).map_err(|e| {
            let pos = match e {
                IntervalError::OutOfRange(_) if !lo_in_range => lo_pos,
                IntervalError::OutOfRange(_) => hi_pos,
                IntervalError::Inverted { .. } => open,
            };
            ParseError::AnnotationRange { pos, detail: e.to_string() }
        })
    }

    /// A ground formula, canonicalized.
    pub fn ground_formula(&mut self) -> PResult<BasicFormula> {
        let pos = self.here();
        let f = self.formula()?;
        let vars: Vec<String> = f.variables().map(str::to_string).collect();
        if !vars.is_empty() {
            return Err(ParseError::NonGroundQuery(vars));
        }
        to_basic(&f).map_err(|source| ParseError::Formula { pos, source })
    }
}

pub(crate) fn to_basic(f: &SourceFormula) -> Result<BasicFormula, FormulaError> {
    let atoms = f
        .atoms
        .iter()
        .map(|a| Atom::new(a.predicate.clone(), a.args.iter().map(|t| t.to_string())))
        .collect();
    BasicFormula::canonicalize(f.strategy.clone(), atoms)
}

pub fn parse_program(src: &str, registry: &StrategyRegistry) -> Result<SourceProgram, ParseError> {
    Parser::new(src, registry)?.program()
}

/// Parses `formula : [lo,hi]` with an optional trailing `.`.
pub fn parse_query(src: &str, registry: &StrategyRegistry) -> Result<AnnotatedFormula, ParseError> {
    let mut p = Parser::new(src, registry)?;
    let formula = p.ground_formula()?;
    p.expect(Tok::Colon, "`:` after the query formula")?;
    let annotation = p.interval()?;
    p.eat(&Tok::Dot);
    if !p.at_eof() {
        return Err(p.error("end of query"));
    }
    Ok(AnnotatedFormula::new(formula, annotation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> StrategyRegistry {
        StrategyRegistry::builtin()
    }

    #[test]
    fn parses_a_fact() {
        let p = parse_program("seen(pic1,id1,john) : [0.5, 0.7].", &reg()).unwrap();
        assert_eq!(p.clauses.len(), 1);
        let c = &p.clauses[0];
        assert!(c.body.is_empty());
        assert_eq!(c.head_annotation, Interval::ratio((1, 2), (7, 10)));
        assert_eq!(c.head.to_string(), "seen(pic1,id1,john)");
    }

    #[test]
    fn parses_compound_head() {
        let p = parse_program("(a &igc b) : [0.3, 0.4].", &reg()).unwrap();
        let h = &p.clauses[0].head;
        assert_eq!(h.atoms.len(), 2);
        assert_eq!(h.strategy, Some(StrategyId::conjunctive("igc")));
    }

    #[test]
    fn rejects_inverted_annotation() {
        assert!(matches!(parse_program("p : [0.7, 0.2].", &reg()), Err(ParseError::AnnotationRange { .. })));
        assert!(matches!(parse_program("p : [0, 3/2].", &reg()), Err(ParseError::AnnotationRange { .. })));
    }

    #[test]
    fn strategy_errors() {
        assert!(matches!(parse_program("(a &foo b) : [0,1].", &reg()), Err(ParseError::UnknownStrategy { .. })));
        assert!(matches!(parse_program("(a &igd b) : [0,1].", &reg()), Err(ParseError::ConnectiveKind { .. })));
        assert!(matches!(
            parse_program("(a &igc b |igd c) : [0,1].", &reg()),
            Err(ParseError::MixedConnective { .. })
        ));
        assert!(matches!(
            parse_program("((a &inc b) &igc c) : [0,1].", &reg()),
            Err(ParseError::MixedConnective { .. })
        ));
        assert!(matches!(
            parse_program("(a &inc a) : [0,1].", &reg()),
            Err(ParseError::Formula { source: FormulaError::DuplicateAtom(_), .. })
        ));
    }

    #[test]
    fn nested_same_strategy_flattens_and_aliases_resolve() {
        let p = parse_program("((a &ig b) &igc c) : [0,1].", &reg()).unwrap();
        assert_eq!(p.clauses[0].head.atoms.len(), 3);
        let q = parse_program("(a &in b) : [0,1].", &reg()).unwrap();
        assert_eq!(q.clauses[0].head.strategy, Some(StrategyId::conjunctive("inc")));
    }

    #[test]
    fn rules_with_constraints() {
        let src = "suspect1(X) : [1, 1] <- seen(Pic,Id1,X) : [0.5, 1], seen(Pic,Id2,ed) : [0.5, 1], Id1 != Id2.";
        let p = parse_program(src, &reg()).unwrap();
        let c = &p.clauses[0];
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.constraints, vec![Constraint { var: "Id1".into(), other: SourceTerm::Variable("Id2".into()) }]);
        assert_eq!(c.variables(), ["X", "Pic", "Id1", "Id2"]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_program("p : [0,1]\nq : [0,1].", &reg()) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, Position { line: 2, col: 1 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn queries() {
        let q = parse_query("suspect1(john) : [1,1]", &reg()).unwrap();
        assert_eq!(q.formula.width(), 1);
        let q = parse_query("(p &inc q) : [0, 1]", &reg()).unwrap();
        assert_eq!(q.formula.width(), 2);
        assert!(matches!(parse_query("p(X) : [0,1]", &reg()), Err(ParseError::NonGroundQuery(_))));
        assert!(parse_query("p : [0,1] q", &reg()).is_err());
    }
}
