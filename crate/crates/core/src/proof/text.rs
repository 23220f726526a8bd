//! One step per line:
//!
//! ```text
//! <index>. <formula> : [<lo>,<hi>]  <Rule>(<premises>)[ clause=<id> | strat=<name>]
//! ```

use crate::formula::{AnnotatedFormula, ClauseId};
use crate::strategies::StrategyRegistry;
use crate::syntax::{ParseError, Parser, Tok};

use super::{Derivation, ProofStep, RuleData, RuleTag};

fn number(p: &mut Parser<'_>, what: &str) -> Result<usize, ParseError> {
    let pos = p.here();
    let w = p.word(what)?;
    w.parse().map_err(|_| ParseError::Syntax { pos, expected: what.into(), found: format!("`{w}`") })
}

/// Reads a derivation in the format produced by its `Display` impl.
pub fn parse_derivation(src: &str, registry: &StrategyRegistry) -> Result<Derivation, ParseError> {
    let mut p = Parser::new(src, registry)?;
    let mut steps = Vec::new();
    while !p.at_eof() {
        let index = number(&mut p, "a step number")?;
        p.expect(Tok::Dot, "`.` after the step number")?;
        let formula = p.ground_formula()?;
        p.expect(Tok::Colon, "`:` after the formula")?;
        let annotation = p.interval()?;
        let rule_pos = p.here();
        let name = p.upper_word("a rule name")?;
        let rule = RuleTag::from_name(&name).ok_or_else(|| ParseError::Syntax {
            pos: rule_pos,
            expected: "a rule name".into(),
            found: format!("`{name}`"),
        })?;
        p.expect(Tok::LParen, "`(` opening the premise list")?;
        let mut premises = Vec::new();
        if !p.eat(&Tok::RParen) {
            loop {
                premises.push(number(&mut p, "a premise number")?);
                if p.eat(&Tok::RParen) {
                    break;
                }
                p.expect(Tok::Comma, "`,` or `)` in the premise list")?;
            }
        }
        let data = match p.peek() {
            Tok::Word(w) if w == "clause" => {
                p.word("clause")?;
                p.expect(Tok::Eq, "`=` after clause")?;
                RuleData::Clause(ClauseId(number(&mut p, "a clause number")?))
            }
            Tok::Word(w) if w == "strat" => {
                p.word("strat")?;
                p.expect(Tok::Eq, "`=` after strat")?;
                let pos = p.here();
                let name = p.word("a strategy name")?;
                let s = registry.lookup(&name).map_err(|_| ParseError::UnknownStrategy { pos, name })?;
                RuleData::Strategy(s.id().clone())
            }
            _ => RuleData::None,
        };
        steps.push(ProofStep { index, conclusion: AnnotatedFormula::new(formula, annotation), rule, premises, data });
    }
    Ok(Derivation { steps })
}
