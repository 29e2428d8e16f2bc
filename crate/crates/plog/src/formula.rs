//! Modal formula syntax for the language with operators `[n]` / `<n>` for
//! every natural `n`, plus parsing, printing, and the formula-level
//! constructions used by the decision procedures (closure sets, monotonicity
//! guards, closed substitution).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("modal signature {sig} exceeds n = {n}")]
    SignatureTooLarge { sig: u32, n: u32 },
    #[error("no substitution image for variable '{0}'")]
    MissingVariable(String),
    #[error("substitution image for '{0}' is not closed")]
    NonClosedImage(String),
    #[error("formula is not closed (contains variable '{0}')")]
    NotClosed(String),
    #[error("formula is not a worm")]
    NotAWorm,
}

/// A modal formula. `Bot` is not a primitive: ⊥ is represented as `Not(Top)`
/// and the token `F` is parsing sugar for it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(u32, Box<Formula>),
    Dia(u32, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Top
    }

    pub fn bot() -> Self {
        Formula::not(Formula::Top)
    }

    pub fn var(name: &str) -> Self {
        Formula::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(std::boxed::Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(std::boxed::Box::new(a), std::boxed::Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(std::boxed::Box::new(a), std::boxed::Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(std::boxed::Box::new(a), std::boxed::Box::new(b))
    }

    pub fn boxed(index: u32, f: Formula) -> Self {
        Formula::Box(index, std::boxed::Box::new(f))
    }

    pub fn dia(index: u32, f: Formula) -> Self {
        Formula::Dia(index, std::boxed::Box::new(f))
    }

    /// Conjunction of a list; the empty conjunction is ⊤.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; the empty disjunction is ⊥.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::bot(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// 1 + the maximum modality index occurring; 0 if none occurs.
    pub fn modal_signature(&self) -> u32 {
        match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Not(a) => a.modal_signature(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modal_signature().max(b.modal_signature())
            }
            Formula::Box(k, a) | Formula::Dia(k, a) => (k + 1).max(a.modal_signature()),
        }
    }

    /// Number of `Box`/`Dia` nodes.
    pub fn modal_count(&self) -> u64 {
        match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Not(a) => a.modal_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modal_count() + b.modal_count()
            }
            Formula::Box(_, a) | Formula::Dia(_, a) => 1 + a.modal_count(),
        }
    }

    /// Maximum nesting depth of modal operators.
    pub fn modal_depth(&self) -> u32 {
        match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            Formula::Box(_, a) | Formula::Dia(_, a) => 1 + a.modal_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn ast_size(&self) -> u64 {
        match self {
            Formula::Top | Formula::Var(_) => 1,
            Formula::Not(a) => 1 + a.ast_size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.ast_size() + b.ast_size()
            }
            Formula::Box(_, a) | Formula::Dia(_, a) => 1 + a.ast_size(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.first_variable().is_none()
    }

    fn first_variable(&self) -> Option<&str> {
        match self {
            Formula::Top => None,
            Formula::Var(p) => Some(p),
            Formula::Not(a) | Formula::Box(_, a) | Formula::Dia(_, a) => a.first_variable(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.first_variable().or_else(|| b.first_variable())
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Var(p) => {
                out.insert(p.clone());
            }
            Formula::Not(a) | Formula::Box(_, a) | Formula::Dia(_, a) => a.collect_variables(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Rewrites every `<m>ψ` as `~[m]~ψ`; idempotent and truth-preserving.
    pub fn box_normalize(&self) -> Formula {
        match self {
            Formula::Top | Formula::Var(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.box_normalize()),
            Formula::And(a, b) => Formula::and(a.box_normalize(), b.box_normalize()),
            Formula::Or(a, b) => Formula::or(a.box_normalize(), b.box_normalize()),
            Formula::Imp(a, b) => Formula::imp(a.box_normalize(), b.box_normalize()),
            Formula::Box(k, a) => Formula::boxed(*k, a.box_normalize()),
            Formula::Dia(k, a) => {
                Formula::not(Formula::boxed(*k, Formula::not(a.box_normalize())))
            }
        }
    }

    /// Shifts every modality index by `delta`.
    pub fn shift_indices(&self, delta: u32) -> Formula {
        match self {
            Formula::Top | Formula::Var(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.shift_indices(delta)),
            Formula::And(a, b) => Formula::and(a.shift_indices(delta), b.shift_indices(delta)),
            Formula::Or(a, b) => Formula::or(a.shift_indices(delta), b.shift_indices(delta)),
            Formula::Imp(a, b) => Formula::imp(a.shift_indices(delta), b.shift_indices(delta)),
            Formula::Box(k, a) => Formula::boxed(k + delta, a.shift_indices(delta)),
            Formula::Dia(k, a) => Formula::dia(k + delta, a.shift_indices(delta)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({})", self)
    }
}

// Precedence levels: 0 = implication (right-assoc), 1 = or, 2 = and, 3 = unary.
fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
    let level = match f {
        Formula::Imp(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    };
    let parens = level < min_level;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Top => write!(out, "T")?,
        Formula::Var(p) => write!(out, "{}", p)?,
        Formula::Not(a) => {
            write!(out, "~")?;
            write_formula(a, out, 3)?;
        }
        Formula::Box(k, a) => {
            write!(out, "[{}]", k)?;
            write_formula(a, out, 3)?;
        }
        Formula::Dia(k, a) => {
            write!(out, "<{}>", k)?;
            write_formula(a, out, 3)?;
        }
        Formula::And(a, b) => {
            write_formula(a, out, 2)?;
            write!(out, " & ")?;
            write_formula(b, out, 3)?;
        }
        Formula::Or(a, b) => {
            write_formula(a, out, 1)?;
            write!(out, " | ")?;
            write_formula(b, out, 2)?;
        }
        Formula::Imp(a, b) => {
            write_formula(a, out, 1)?;
            write!(out, " -> ")?;
            write_formula(b, out, 0)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

/// Parses the grammar
/// `formula := impl; impl := or ('->' impl)?; or := and ('|' and)*;
/// and := unary ('&' unary)*; unary := '~' unary | '[' nat ']' unary |
/// '<' nat '>' unary | atom; atom := 'T' | 'F' | ident | '(' formula ')'`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = FParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Canonical text; `parse_formula(render_formula(f)) = f`.
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

struct FParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> FParser<'a> {
    fn err(&self, msg: &str) -> FormulaError {
        FormulaError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_arrow(&mut self) -> bool {
        self.skip_ws();
        if self.bytes[self.pos..].starts_with(b"->") {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u32, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a modality index"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("modality index out of range"))
    }

    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.eat_arrow() {
            let rhs = self.implication()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.conjunction()?;
        while self.eat(b'|') {
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while self.eat(b'&') {
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(b'[') => {
                self.pos += 1;
                let k = self.nat()?;
                if !self.eat(b']') {
                    return Err(self.err("expected ']'"));
                }
                Ok(Formula::boxed(k, self.unary()?))
            }
            Some(b'<') => {
                self.pos += 1;
                let k = self.nat()?;
                if !self.eat(b'>') {
                    return Err(self.err("expected '>'"));
                }
                Ok(Formula::dia(k, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.implication()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                self.pos += 1;
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                if name == "w" {
                    self.pos = start;
                    return Err(self.err("'w' is reserved and cannot be a variable"));
                }
                Ok(Formula::Var(name.to_string()))
            }
            _ => Err(self.err("expected an atom")),
        }
    }
}

/// A worm `<i1><i2>…<ik>T`; the empty sequence is ⊤.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Worm(pub Vec<u32>);

impl Worm {
    pub fn top() -> Self {
        Worm(Vec::new())
    }

    pub fn to_formula(&self) -> Formula {
        self.0
            .iter()
            .rev()
            .fold(Formula::Top, |acc, &i| Formula::dia(i, acc))
    }

    /// Interprets a diamond chain over ⊤ as a worm.
    pub fn try_from_formula(f: &Formula) -> Result<Worm, FormulaError> {
        let mut indices = Vec::new();
        let mut cur = f;
        loop {
            match cur {
                Formula::Top => return Ok(Worm(indices)),
                Formula::Dia(k, inner) => {
                    indices.push(*k);
                    cur = inner;
                }
                _ => return Err(FormulaError::NotAWorm),
            }
        }
    }

    /// Shifts every index by `delta`.
    pub fn shift(&self, delta: u32) -> Worm {
        Worm(self.0.iter().map(|i| i + delta).collect())
    }
}

impl fmt::Display for Worm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// The set of subformulas of `f`, including `f` itself.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    match f {
        Formula::Top | Formula::Var(_) => {}
        Formula::Not(a) | Formula::Box(_, a) | Formula::Dia(_, a) => collect_subformulas(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_subformulas(a, out);
            collect_subformulas(b, out);
        }
    }
}

/// The closure set Σ: the least set containing all subformulas of the
/// box-normalized `f`, closed under single negation of non-negated members,
/// and containing `[k']ψ` for every `k' < n` whenever some `[k]ψ` is a member.
pub fn closure_sigma(f: &Formula, n: u32) -> Result<BTreeSet<Formula>, FormulaError> {
    let sig = f.modal_signature();
    if n < sig {
        return Err(FormulaError::SignatureTooLarge { sig, n });
    }
    let mut sigma = subformulas(&f.box_normalize());
    loop {
        let mut fresh: Vec<Formula> = Vec::new();
        for g in &sigma {
            if !matches!(g, Formula::Not(_)) {
                let neg = Formula::not(g.clone());
                if !sigma.contains(&neg) {
                    fresh.push(neg);
                }
            }
            if let Formula::Box(_, body) = g {
                for k in 0..n {
                    let other = Formula::boxed(k, (**body).clone());
                    if !sigma.contains(&other) {
                        fresh.push(other);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(sigma);
        }
        sigma.extend(fresh);
    }
}

/// The distinct box subformulas of the box-normalized `f`, in structural order.
fn box_subformulas(f: &Formula) -> Vec<(u32, Formula)> {
    subformulas(&f.box_normalize())
        .into_iter()
        .filter_map(|g| match g {
            Formula::Box(m, body) => Some((m, *body)),
            _ => None,
        })
        .collect()
}

/// The monotonicity guard `M(f)`: the conjunction of `[m]ψ -> [k]ψ` over all
/// box subformulas `[m]ψ` of the box-normalized `f` and all `k` with
/// `m < k < n`. The empty conjunction is ⊤.
pub fn m_guard(f: &Formula, n: u32) -> Result<Formula, FormulaError> {
    let sig = f.modal_signature();
    if n < sig {
        return Err(FormulaError::SignatureTooLarge { sig, n });
    }
    let mut conjuncts = Vec::new();
    for (m, body) in box_subformulas(f) {
        for k in m + 1..n {
            conjuncts.push(Formula::imp(
                Formula::boxed(m, body.clone()),
                Formula::boxed(k, body.clone()),
            ));
        }
    }
    Ok(Formula::conj(conjuncts))
}

/// `M⁺(f) = M(f) ∧ ⋀_{m<n} [m]M(f)`.
pub fn m_plus(f: &Formula, n: u32) -> Result<Formula, FormulaError> {
    let m = m_guard(f, n)?;
    let mut acc = m.clone();
    for k in 0..n {
        acc = Formula::and(acc, Formula::boxed(k, m.clone()));
    }
    Ok(acc)
}

/// Homomorphic substitution of closed formulas for variables.
pub fn substitute_closed(
    f: &Formula,
    subst: &BTreeMap<String, Formula>,
) -> Result<Formula, FormulaError> {
    match f {
        Formula::Top => Ok(Formula::Top),
        Formula::Var(p) => {
            let image = subst
                .get(p)
                .ok_or_else(|| FormulaError::MissingVariable(p.clone()))?;
            if !image.is_closed() {
                return Err(FormulaError::NonClosedImage(p.clone()));
            }
            Ok(image.clone())
        }
        Formula::Not(a) => Ok(Formula::not(substitute_closed(a, subst)?)),
        Formula::And(a, b) => Ok(Formula::and(
            substitute_closed(a, subst)?,
            substitute_closed(b, subst)?,
        )),
        Formula::Or(a, b) => Ok(Formula::or(
            substitute_closed(a, subst)?,
            substitute_closed(b, subst)?,
        )),
        Formula::Imp(a, b) => Ok(Formula::imp(
            substitute_closed(a, subst)?,
            substitute_closed(b, subst)?,
        )),
        Formula::Box(k, a) => Ok(Formula::boxed(*k, substitute_closed(a, subst)?)),
        Formula::Dia(k, a) => Ok(Formula::dia(*k, substitute_closed(a, subst)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            p("[0](p -> q)"),
            Formula::boxed(0, Formula::imp(Formula::var("p"), Formula::var("q")))
        );
        assert_eq!(
            p("<1>T & ~F"),
            Formula::and(
                Formula::dia(1, Formula::Top),
                Formula::not(Formula::bot())
            )
        );
        assert_eq!(
            p("[0]p -> [1]p"),
            Formula::imp(
                Formula::boxed(0, Formula::var("p")),
                Formula::boxed(1, Formula::var("p"))
            )
        );
    }

    #[test]
    fn parse_precedence() {
        // unary > & > | > ->, with -> right-associative
        assert_eq!(p("p & q & r"), p("(p & q) & r"));
        assert_eq!(p("p | q & r"), p("p | (q & r)"));
        assert_eq!(p("p -> q -> r"), p("p -> (q -> r)"));
        assert_eq!(p("~[0]p & q"), p("(~[0]p) & q"));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_formula("w").is_err());
        assert!(parse_formula("[0").is_err());
        assert!(parse_formula("p &").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(matches!(
            parse_formula("(p -> "),
            Err(FormulaError::Syntax { .. })
        ));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_formula(&Formula::boxed(0, Formula::bot())), "[0]~T");
        assert_eq!(render_formula(&Formula::dia(1, Formula::Top)), "<1>T");
        assert_eq!(
            render_formula(&Formula::and(
                Formula::and(Formula::var("p"), Formula::var("q")),
                Formula::var("r")
            )),
            "p & q & r"
        );
        // non-default associativity keeps parentheses
        assert_eq!(render_formula(&p("p & (q & r)")), "p & (q & r)");
        assert_eq!(render_formula(&p("(p -> q) -> r")), "(p -> q) -> r");
    }

    #[test]
    fn render_parse_round_trip() {
        for s in [
            "T",
            "~T",
            "[0]~T",
            "<1>T & [0]~<1>T",
            "[0](p -> q) -> [1]p | ~q & r",
            "<0><1>T",
            "~(p | q)",
        ] {
            let f = p(s);
            assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f);
        }
    }

    #[test]
    fn box_normalize_examples() {
        assert_eq!(p("<0>p").box_normalize(), p("~[0]~p"));
        assert_eq!(p("[1]p").box_normalize(), p("[1]p"));
        assert_eq!(p("~<2>T").box_normalize(), p("~~[2]~T"));
        let f = p("<0>(p & <1>q)");
        assert_eq!(f.box_normalize().box_normalize(), f.box_normalize());
    }

    #[test]
    fn subformula_examples() {
        assert_eq!(
            subformulas(&p("[0]p")),
            [p("[0]p"), p("p")].into_iter().collect()
        );
        assert_eq!(
            subformulas(&p("p -> q")),
            [p("p -> q"), p("p"), p("q")].into_iter().collect()
        );
        assert_eq!(subformulas(&p("T")), [p("T")].into_iter().collect());
    }

    #[test]
    fn closure_examples() {
        let sigma = closure_sigma(&p("[0]p"), 2).unwrap();
        let expected: BTreeSet<Formula> =
            [p("[0]p"), p("p"), p("~[0]p"), p("~p"), p("[1]p"), p("~[1]p")]
                .into_iter()
                .collect();
        assert_eq!(sigma, expected);

        assert_eq!(
            closure_sigma(&p("p"), 1).unwrap(),
            [p("p"), p("~p")].into_iter().collect()
        );
        assert_eq!(
            closure_sigma(&p("T"), 1).unwrap(),
            [p("T"), p("~T")].into_iter().collect()
        );
        assert!(closure_sigma(&p("[1]p"), 1).is_err());
    }

    #[test]
    fn m_guard_examples() {
        assert_eq!(m_guard(&p("[0]p"), 2).unwrap(), p("[0]p -> [1]p"));
        assert_eq!(m_guard(&p("p"), 3).unwrap(), p("T"));
        assert_eq!(m_guard(&p("<0>p"), 2).unwrap(), p("[0]~p -> [1]~p"));
    }

    #[test]
    fn m_plus_examples() {
        assert_eq!(
            m_plus(&p("[0]p"), 2).unwrap(),
            p("([0]p -> [1]p) & [0]([0]p -> [1]p) & [1]([0]p -> [1]p)")
        );
        assert_eq!(m_plus(&p("p"), 1).unwrap(), p("T & [0]T"));
        assert_eq!(m_plus(&p("T"), 2).unwrap(), p("T & [0]T & [1]T"));
    }

    #[test]
    fn substitution_examples() {
        let mut s = BTreeMap::new();
        s.insert("p".to_string(), p("[0]F"));
        assert_eq!(substitute_closed(&p("p"), &s).unwrap(), p("[0]~T"));
        assert_eq!(
            substitute_closed(&p("[0]p"), &s).unwrap(),
            p("[0][0]~T")
        );
        let mut s2 = BTreeMap::new();
        s2.insert("p".to_string(), p("<1>T"));
        assert_eq!(
            substitute_closed(&p("p -> p"), &s2).unwrap(),
            p("<1>T -> <1>T")
        );
        assert!(matches!(
            substitute_closed(&p("q"), &s),
            Err(FormulaError::MissingVariable(_))
        ));
        let mut bad = BTreeMap::new();
        bad.insert("p".to_string(), p("q"));
        assert!(matches!(
            substitute_closed(&p("p"), &bad),
            Err(FormulaError::NonClosedImage(_))
        ));
    }

    #[test]
    fn signature_and_count() {
        let f = p("[0]<1>T");
        assert_eq!(f.modal_signature(), 2);
        assert_eq!(f.modal_count(), 2);
        assert_eq!(p("p").modal_signature(), 0);
        assert_eq!(p("p").modal_count(), 0);
        let g = p("[0]p & [0]q");
        assert_eq!(g.modal_signature(), 1);
        assert_eq!(g.modal_count(), 2);
    }

    #[test]
    fn worm_round_trip() {
        let w = Worm(vec![1, 0, 1]);
        assert_eq!(w.to_formula(), p("<1><0><1>T"));
        assert_eq!(Worm::try_from_formula(&p("<1><0><1>T")).unwrap(), w);
        assert_eq!(Worm::try_from_formula(&p("T")).unwrap(), Worm::top());
        assert!(Worm::try_from_formula(&p("[0]T")).is_err());
    }
}
