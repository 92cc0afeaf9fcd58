use super::lexer::{lex, Spanned, Tok};
use super::{ParseError, ParseErrorKind, SourceSpan};
use crate::syntax::{
    new_sort_condition_violations, Formula, IndividualVar, RelationVar, SortId, Vocabulary,
};

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    voc: &'a Vocabulary,
    ind_scope: Vec<IndividualVar>,
    rel_scope: Vec<RelationVar>,
}

impl<'a> Parser<'a> {
    fn peek(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos.min(self.toks.len() - 1)].span
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), kind, message)
    }

    fn syntax_err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(self.err(ParseErrorKind::Syntax, message))
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        if self.peek(0) == &tok {
            Ok(self.bump())
        } else {
            self.syntax_err(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek(0).describe()
            ))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.peek(0).clone() {
            Tok::Ident(name) => {
                let s = self.bump();
                Ok((name, s.span))
            }
            other => self.syntax_err(format!("expected a name, found {}", other.describe())),
        }
    }

    fn expect_number(&mut self) -> Result<u32, ParseError> {
        match *self.peek(0) {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            ref other => self.syntax_err(format!("expected a sort, found {}", other.describe())),
        }
    }

    fn resolve_bare_ind(&self, name: &str) -> Option<IndividualVar> {
        self.ind_scope.iter().rev().find(|v| v.name == name).cloned()
    }

    fn resolve_bare_rel(&self, name: &str) -> Option<RelationVar> {
        self.rel_scope.iter().rev().find(|v| v.name == name).cloned()
    }

    // formula := imp ( "<->" imp )?     non-associative
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.peek(0) == &Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            if self.peek(0) == &Tok::Iff {
                return self.syntax_err("`<->` is non-associative; add parentheses");
            }
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    // imp := or ( "->" imp )?           right-associative
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek(0) == &Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek(0) == &Tok::Pipe {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek(0) == &Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.peek(0) == &Tok::Tilde {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let Tok::Ident(name) = self.peek(0) {
            match name.as_str() {
                // `E x:0. ...` — keyword followed by a name starts a binder;
                // followed by anything else, `E`/`A` are ordinary names.
                "E" | "A" if matches!(self.peek(1), Tok::Ident(_)) => {
                    return self.individual_quantifier();
                }
                "E2" | "A2" if matches!(self.peek(1), Tok::Ident(_)) => {
                    return self.relation_quantifier();
                }
                // `Es (X:(1), ...) . ...` — lookahead distinguishes a block
                // (`(X:(` ...) from an atom `Es(x:0)` (`(x:0` ...).
                "Es" | "As"
                    if self.peek(1) == &Tok::LParen
                        && matches!(self.peek(2), Tok::Ident(_))
                        && self.peek(3) == &Tok::Colon
                        && self.peek(4) == &Tok::LParen =>
                {
                    return self.block_quantifier();
                }
                _ => {}
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.peek(0) == &Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if matches!(self.peek(0), Tok::Ident(_)) {
            return self.atom_or_equation();
        }
        self.syntax_err(format!("expected a formula, found {}", self.peek(0).describe()))
    }

    fn individual_binder(&mut self) -> Result<IndividualVar, ParseError> {
        let (name, _) = self.expect_ident()?;
        self.expect(Tok::Colon)?;
        let sort = self.expect_number()?;
        Ok(IndividualVar::new(name, sort))
    }

    fn relation_binder(&mut self) -> Result<RelationVar, ParseError> {
        let (name, span) = self.expect_ident()?;
        if self.voc.contains(&name) {
            return Err(ParseError::new(
                span,
                ParseErrorKind::Syntax,
                format!("relation variable `{}` shadows a predicate symbol", name),
            ));
        }
        self.expect(Tok::Colon)?;
        self.expect(Tok::LParen)?;
        let mut sorts = vec![SortId(self.expect_number()?)];
        while self.peek(0) == &Tok::Comma {
            self.bump();
            sorts.push(SortId(self.expect_number()?));
        }
        self.expect(Tok::RParen)?;
        Ok(RelationVar::new(name, sorts))
    }

    fn individual_quantifier(&mut self) -> Result<Formula, ParseError> {
        let (kw, _) = self.expect_ident()?;
        let var = self.individual_binder()?;
        self.expect(Tok::Dot)?;
        self.ind_scope.push(var.clone());
        let body = self.formula();
        self.ind_scope.pop();
        let body = body?;
        Ok(match kw.as_str() {
            "E" => Formula::exists(var, body),
            _ => Formula::forall(var, body),
        })
    }

    fn relation_quantifier(&mut self) -> Result<Formula, ParseError> {
        let (kw, _) = self.expect_ident()?;
        let var = self.relation_binder()?;
        self.expect(Tok::Dot)?;
        self.rel_scope.push(var.clone());
        let body = self.formula();
        self.rel_scope.pop();
        let body = body?;
        Ok(match kw.as_str() {
            "E2" => Formula::exists_rel(var, body),
            _ => Formula::forall_rel(var, body),
        })
    }

    fn block_quantifier(&mut self) -> Result<Formula, ParseError> {
        let (kw, kw_span) = self.expect_ident()?;
        self.expect(Tok::LParen)?;
        let mut block = vec![self.relation_binder()?];
        while self.peek(0) == &Tok::Comma {
            self.bump();
            block.push(self.relation_binder()?);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        for (i, v) in block.iter().enumerate() {
            if block[..i].iter().any(|w| w.name == v.name) {
                return Err(ParseError::new(
                    kw_span,
                    ParseErrorKind::Syntax,
                    format!("block declares `{}` twice", v.name),
                ));
            }
        }
        let n = block.len();
        self.rel_scope.extend(block.iter().cloned());
        let body = self.formula();
        self.rel_scope.truncate(self.rel_scope.len() - n);
        let body = body?;
        let violations = new_sort_condition_violations(self.voc, &block, &body);
        if let Some(v) = violations.first() {
            return Err(ParseError::new(kw_span, ParseErrorKind::NewSort, v.to_string()));
        }
        Ok(match kw.as_str() {
            "Es" => Formula::exists_new(block, body),
            _ => Formula::forall_new(block, body),
        })
    }

    /// A term is an individual variable occurrence: bare (resolved against
    /// the enclosing binders) or written with its sort.
    fn term(&mut self) -> Result<IndividualVar, ParseError> {
        let (name, span) = self.expect_ident()?;
        if self.peek(0) == &Tok::Colon {
            self.bump();
            let sort = self.expect_number()?;
            return Ok(IndividualVar::new(name, sort));
        }
        self.resolve_bare_ind(&name).ok_or_else(|| {
            ParseError::new(
                span,
                ParseErrorKind::Syntax,
                format!("unbound variable `{}`; write free variables with a sort, e.g. `{}:0`", name, name),
            )
        })
    }

    fn args(&mut self) -> Result<Vec<IndividualVar>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek(0) != &Tok::RParen {
            args.push(self.term()?);
            while self.peek(0) == &Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn checked_var_atom(
        &self,
        var: RelationVar,
        args: Vec<IndividualVar>,
        span: SourceSpan,
    ) -> Result<Formula, ParseError> {
        let got: Vec<SortId> = args.iter().map(|a| a.sort).collect();
        if got != var.sorts {
            return Err(ParseError::new(
                span,
                ParseErrorKind::Sort,
                format!(
                    "arguments of `{}` have sorts ({}), expected ({})",
                    var.name,
                    got.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                    var.sorts.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                ),
            ));
        }
        Ok(Formula::rel(var, args))
    }

    fn atom_or_equation(&mut self) -> Result<Formula, ParseError> {
        let (name, span) = self.expect_ident()?;
        match self.peek(0) {
            Tok::Colon if self.peek(1) == &Tok::LParen => {
                // Annotated relation variable head: `X:(0,1)(x, y)`.
                self.bump();
                self.bump();
                let mut sorts = vec![SortId(self.expect_number()?)];
                while self.peek(0) == &Tok::Comma {
                    self.bump();
                    sorts.push(SortId(self.expect_number()?));
                }
                self.expect(Tok::RParen)?;
                let var = RelationVar::new(name, sorts);
                let args = self.args()?;
                self.checked_var_atom(var, args, span)
            }
            Tok::Colon => {
                // Annotated individual variable: must open an equation.
                self.bump();
                let sort = self.expect_number()?;
                let lhs = IndividualVar::new(name, sort);
                self.expect(Tok::Equals)?;
                let rhs = self.term()?;
                Ok(Formula::eq(lhs, rhs))
            }
            Tok::LParen => {
                if let Some(var) = self.resolve_bare_rel(&name) {
                    let args = self.args()?;
                    return self.checked_var_atom(var, args, span);
                }
                if let Some(sorts) = self.voc.sorts_of(&name) {
                    let expected = sorts.to_vec();
                    let args = self.args()?;
                    let got: Vec<SortId> = args.iter().map(|a| a.sort).collect();
                    if got != expected {
                        return Err(ParseError::new(
                            span,
                            ParseErrorKind::Sort,
                            format!(
                                "arguments of `{}` have sorts ({}), declared ({})",
                                name,
                                got.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                                expected.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                            ),
                        ));
                    }
                    return Ok(Formula::pred(name, args));
                }
                Err(ParseError::new(
                    span,
                    ParseErrorKind::Syntax,
                    format!(
                        "`{}` is neither a bound relation variable nor a predicate symbol",
                        name
                    ),
                ))
            }
            Tok::Equals => {
                let lhs = self.resolve_bare_ind(&name).ok_or_else(|| {
                    ParseError::new(
                        span,
                        ParseErrorKind::Syntax,
                        format!(
                            "unbound variable `{}`; write free variables with a sort, e.g. `{}:0`",
                            name, name
                        ),
                    )
                })?;
                self.bump();
                let rhs = self.term()?;
                Ok(Formula::eq(lhs, rhs))
            }
            other => self.syntax_err(format!(
                "expected `(`, `:` or `=` after `{}`, found {}",
                name,
                other.describe()
            )),
        }
    }
}

/// Parses one formula. The result is well-formed over `voc`; sort errors at
/// atoms and New Sort Condition breaches are reported as parse errors with
/// the offending span.
pub fn parse_formula(text: &str, voc: &Vocabulary) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        voc,
        ind_scope: Vec::new(),
        rel_scope: Vec::new(),
    };
    let phi = p.formula()?;
    if p.peek(0) != &Tok::Eof {
        return p.syntax_err(format!("unexpected {} after formula", p.peek(0).describe()));
    }
    debug_assert!(crate::syntax::well_formed(voc, &phi).is_ok());
    Ok(phi)
}

/// Parses `x:0` into an individual variable.
pub fn parse_individual_var_str(text: &str) -> Result<IndividualVar, ParseError> {
    let toks = lex(text)?;
    let voc = Vocabulary::new();
    let mut p = Parser {
        toks,
        pos: 0,
        voc: &voc,
        ind_scope: Vec::new(),
        rel_scope: Vec::new(),
    };
    let v = p.individual_binder()?;
    p.expect(Tok::Eof)?;
    Ok(v)
}

/// Parses `X:(0,1)` into a relation variable.
pub fn parse_relation_var_str(text: &str) -> Result<RelationVar, ParseError> {
    let toks = lex(text)?;
    let voc = Vocabulary::new();
    let mut p = Parser {
        toks,
        pos: 0,
        voc: &voc,
        ind_scope: Vec::new(),
        rel_scope: Vec::new(),
    };
    let v = p.relation_binder()?;
    p.expect(Tok::Eof)?;
    Ok(v)
}

// Rendering. Levels order the grammar from loosest to tightest binding;
// a node is parenthesized when it appears in a context demanding a tighter
// level. Quantifiers take level 0 because their bodies extend maximally:
// anywhere but the top of a formula (or another body) they need parentheses.
const LVL_QUANT: u8 = 0;
const LVL_IFF: u8 = 1;
const LVL_IMPLIES: u8 = 2;
const LVL_OR: u8 = 3;
const LVL_AND: u8 = 4;
const LVL_NOT: u8 = 5;

struct Renderer {
    ind_scope: Vec<IndividualVar>,
    rel_scope: Vec<RelationVar>,
    out: String,
}

impl Renderer {
    fn ind_occurrence(&mut self, v: &IndividualVar) {
        let innermost = self.ind_scope.iter().rev().find(|b| b.name == v.name);
        if innermost == Some(v) {
            self.out.push_str(&v.name);
        } else {
            self.out.push_str(&format!("{}:{}", v.name, v.sort));
        }
    }

    fn rel_occurrence(&mut self, v: &RelationVar) {
        let innermost = self.rel_scope.iter().rev().find(|b| b.name == v.name);
        if innermost == Some(v) {
            self.out.push_str(&v.name);
        } else {
            self.out.push_str(&v.to_string());
        }
    }

    fn args(&mut self, args: &[IndividualVar]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.ind_occurrence(a);
        }
        self.out.push(')');
    }

    fn open(&mut self, level: u8, ctx: u8) -> bool {
        if level < ctx {
            self.out.push('(');
            true
        } else {
            false
        }
    }

    fn close(&mut self, wrapped: bool) {
        if wrapped {
            self.out.push(')');
        }
    }

    fn formula(&mut self, phi: &Formula, ctx: u8) {
        if let Some((a, b)) = phi.as_iff() {
            let wrapped = self.open(LVL_IFF, ctx);
            self.formula(a, LVL_IMPLIES);
            self.out.push_str(" <-> ");
            self.formula(b, LVL_IMPLIES);
            self.close(wrapped);
            return;
        }
        if let Some((a, b)) = phi.as_and() {
            let wrapped = self.open(LVL_AND, ctx);
            self.formula(a, LVL_AND);
            self.out.push_str(" & ");
            self.formula(b, LVL_NOT);
            self.close(wrapped);
            return;
        }
        if let Some((x, body)) = phi.as_forall_ind() {
            self.quantifier_ind("A", x, body, ctx);
            return;
        }
        if let Some((x, body)) = phi.as_forall_rel() {
            self.quantifier_rel("A2", x, body, ctx);
            return;
        }
        if let Some((block, body)) = phi.as_forall_new() {
            self.quantifier_block("As", block, body, ctx);
            return;
        }
        if let Some((a, b)) = phi.as_implies() {
            let wrapped = self.open(LVL_IMPLIES, ctx);
            self.formula(a, LVL_OR);
            self.out.push_str(" -> ");
            self.formula(b, LVL_IMPLIES);
            self.close(wrapped);
            return;
        }
        match phi {
            Formula::Equation(a, b) => {
                self.ind_occurrence(a);
                self.out.push_str(" = ");
                self.ind_occurrence(b);
            }
            Formula::PredAtom { pred, args } => {
                self.out.push_str(pred);
                self.args(args);
            }
            Formula::VarAtom { var, args } => {
                self.rel_occurrence(var);
                self.args(args);
            }
            Formula::Not(p) => {
                let wrapped = self.open(LVL_NOT, ctx);
                self.out.push('~');
                self.formula(p, LVL_NOT);
                self.close(wrapped);
            }
            Formula::Or(a, b) => {
                let wrapped = self.open(LVL_OR, ctx);
                self.formula(a, LVL_OR);
                self.out.push_str(" | ");
                self.formula(b, LVL_AND);
                self.close(wrapped);
            }
            Formula::ExistsInd(x, body) => self.quantifier_ind("E", x, body, ctx),
            Formula::ExistsRel(x, body) => self.quantifier_rel("E2", x, body, ctx),
            Formula::ExistsNewSorts(block, body) => self.quantifier_block("Es", block, body, ctx),
        }
    }

    fn quantifier_ind(&mut self, kw: &str, x: &IndividualVar, body: &Formula, ctx: u8) {
        let wrapped = self.open(LVL_QUANT, ctx);
        self.out.push_str(kw);
        self.out.push(' ');
        self.out.push_str(&format!("{}:{}", x.name, x.sort));
        self.out.push_str(". ");
        self.ind_scope.push(x.clone());
        self.formula(body, LVL_QUANT);
        self.ind_scope.pop();
        self.close(wrapped);
    }

    fn quantifier_rel(&mut self, kw: &str, x: &RelationVar, body: &Formula, ctx: u8) {
        let wrapped = self.open(LVL_QUANT, ctx);
        self.out.push_str(kw);
        self.out.push(' ');
        self.out.push_str(&x.to_string());
        self.out.push_str(". ");
        self.rel_scope.push(x.clone());
        self.formula(body, LVL_QUANT);
        self.rel_scope.pop();
        self.close(wrapped);
    }

    fn quantifier_block(&mut self, kw: &str, block: &[RelationVar], body: &Formula, ctx: u8) {
        let wrapped = self.open(LVL_QUANT, ctx);
        self.out.push_str(kw);
        self.out.push_str(" (");
        for (i, v) in block.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.out.push_str(&v.to_string());
        }
        self.out.push_str("). ");
        self.rel_scope.extend(block.iter().cloned());
        self.formula(body, LVL_QUANT);
        self.rel_scope.truncate(self.rel_scope.len() - block.len());
        self.close(wrapped);
    }
}

/// Deterministic rendering; `parse_formula(render_formula(phi), voc)`
/// reproduces `phi` exactly.
pub fn render_formula(phi: &Formula) -> String {
    let mut r = Renderer {
        ind_scope: Vec::new(),
        rel_scope: Vec::new(),
        out: String::new(),
    };
    r.formula(phi, LVL_QUANT);
    r.out
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::free_sorts;

    fn voc_pq() -> Vocabulary {
        Vocabulary::from_pairs([("P", vec![SortId(0)]), ("Q", vec![SortId(0)])]).unwrap()
    }

    #[test]
    fn parses_forall_equation() {
        let voc = Vocabulary::new();
        let phi = parse_formula("A x:0. x = x", &voc).unwrap();
        let x = IndividualVar::new("x", 0u32);
        assert_eq!(phi, Formula::forall(x.clone(), Formula::eq(x.clone(), x)));
    }

    #[test]
    fn parses_new_sort_block() {
        let voc = Vocabulary::new();
        let phi = parse_formula("Es (A:(1,1,1), Z:(1)). E u:1. Z(u)", &voc).unwrap();
        match &phi {
            Formula::ExistsNewSorts(block, _) => {
                assert_eq!(block.len(), 2);
                assert_eq!(block[0].name, "A");
                assert_eq!(block[0].sorts, vec![SortId(1); 3]);
                assert_eq!(block[1].name, "Z");
            }
            other => panic!("expected a block, got {:?}", other),
        }
    }

    #[test]
    fn undeclared_head_is_a_syntax_error() {
        let voc = Vocabulary::new();
        let err = parse_formula("E x:0. X(x)", &voc).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.span.start >= 7, "span should point at the head");
    }

    #[test]
    fn new_sort_breach_is_reported_with_its_kind() {
        let voc = Vocabulary::from_pairs([("P", vec![SortId(5)])]).unwrap();
        let err = parse_formula("Es (X:(5)). X(y:5) | P(y:5)", &voc).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NewSort);
    }

    #[test]
    fn atom_sort_mismatch_is_a_sort_error() {
        let voc = voc_pq();
        let err = parse_formula("P(y:1)", &voc).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Sort);
    }

    #[test]
    fn cross_sort_equation_parses() {
        let voc = Vocabulary::new();
        let phi = parse_formula("x:0 = u:1", &voc).unwrap();
        assert_eq!(
            free_sorts(&phi),
            [SortId(0), SortId(1)].into_iter().collect()
        );
    }

    #[test]
    fn sugar_expands() {
        let voc = voc_pq();
        let a = parse_formula("P(x:0) & Q(x:0)", &voc).unwrap();
        let p = Formula::pred("P", vec![IndividualVar::new("x", 0u32)]);
        let q = Formula::pred("Q", vec![IndividualVar::new("x", 0u32)]);
        assert_eq!(a, Formula::and(p.clone(), q.clone()));
        let i = parse_formula("P(x:0) -> Q(x:0)", &voc).unwrap();
        assert_eq!(i, Formula::implies(p.clone(), q.clone()));
        let e = parse_formula("P(x:0) <-> Q(x:0)", &voc).unwrap();
        assert_eq!(e, Formula::iff(p, q));
    }

    #[test]
    fn quantifier_bodies_extend_right() {
        let voc = voc_pq();
        let phi = parse_formula("E x:0. P(x) & Q(x)", &voc).unwrap();
        let x = IndividualVar::new("x", 0u32);
        let expected = Formula::exists(
            x.clone(),
            Formula::and(
                Formula::pred("P", vec![x.clone()]),
                Formula::pred("Q", vec![x]),
            ),
        );
        assert_eq!(phi, expected);
    }

    #[test]
    fn connective_precedence_and_associativity() {
        let voc = voc_pq();
        let x = IndividualVar::new("x", 0u32);
        let p = Formula::pred("P", vec![x.clone()]);
        let q = Formula::pred("Q", vec![x.clone()]);
        // & over |, both left-associative.
        let phi = parse_formula("P(x:0) | Q(x:0) & P(x:0) | Q(x:0)", &voc).unwrap();
        let expected = Formula::or(
            Formula::or(p.clone(), Formula::and(q.clone(), p.clone())),
            q.clone(),
        );
        assert_eq!(phi, expected);
        // -> right-associative.
        let phi = parse_formula("P(x:0) -> Q(x:0) -> P(x:0)", &voc).unwrap();
        assert_eq!(
            phi,
            Formula::implies(p.clone(), Formula::implies(q.clone(), p.clone()))
        );
        // Chained <-> is rejected.
        assert!(parse_formula("P(x:0) <-> Q(x:0) <-> P(x:0)", &voc).is_err());
    }

    #[test]
    fn shadowing_resolves_to_innermost_binder() {
        let voc = Vocabulary::new();
        let phi = parse_formula("E x:0. E x:1. x = x", &voc).unwrap();
        let outer = IndividualVar::new("x", 0u32);
        let inner = IndividualVar::new("x", 1u32);
        let expected = Formula::exists(
            outer,
            Formula::exists(inner.clone(), Formula::eq(inner.clone(), inner)),
        );
        assert_eq!(phi, expected);
    }

    #[test]
    fn renderer_annotates_shadowed_occurrences() {
        let voc = Vocabulary::new();
        let outer = IndividualVar::new("x", 0u32);
        let inner = IndividualVar::new("x", 1u32);
        // E x:0. E x:1. x:0 = x — the outer occurrence needs its sort.
        let phi = Formula::exists(
            outer.clone(),
            Formula::exists(inner.clone(), Formula::eq(outer.clone(), inner.clone())),
        );
        let text = render_formula(&phi);
        assert_eq!(parse_formula(&text, &voc).unwrap(), phi);
        assert!(text.contains("x:0 = x"), "got {}", text);
    }

    #[test]
    fn renderer_round_trips_spec_shapes() {
        let voc = voc_pq();
        for text in [
            "~(P(x:0) | Q(y:0))",
            "A x:0. x = x",
            "Es (B:(1,1,1), Z:(1)). E u:1. Z(u)",
            "E x:0. (P(x) -> Q(x)) & P(x)",
            "E2 X:(0). A y:0. (X(y) <-> y = y)",
            "~x:0 = y:1",
        ] {
            let phi = parse_formula(text, &voc).unwrap();
            let rendered = render_formula(&phi);
            let reparsed = parse_formula(&rendered, &voc).unwrap();
            assert_eq!(reparsed, phi, "render of `{}` was `{}`", text, rendered);
        }
    }

    #[test]
    fn keywords_work_as_variable_names_in_atoms() {
        let voc = Vocabulary::from_pairs([("Es", vec![SortId(0)])]).unwrap();
        // `Es` here is an atom head, not a block: no `name:(` after `(`.
        let phi = parse_formula("Es(x:0)", &voc).unwrap();
        assert_eq!(
            phi,
            Formula::pred("Es", vec![IndividualVar::new("x", 0u32)])
        );
        // And `A` as a bound variable name.
        let phi = parse_formula("E A:0. A = A", &voc).unwrap();
        let a = IndividualVar::new("A", 0u32);
        assert_eq!(phi, Formula::exists(a.clone(), Formula::eq(a.clone(), a)));
    }

    #[test]
    fn errors_carry_spans_inside_the_text() {
        let voc = Vocabulary::new();
        let text = "A x:0. x = %";
        let err = parse_formula(text, &voc).unwrap_err();
        assert!(err.span.start < text.len() && err.span.end <= text.len());
        assert_eq!(err.kind, ParseErrorKind::Lex);
    }
}
