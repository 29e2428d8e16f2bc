//! Ordinal notations below ε₀ in Cantor normal form.
//!
//! An ordinal is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents (themselves ordinals) and coefficients ≥ 1; the
//! empty sum is 0. Values are immutable and all operations are pure.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// An ordinal below ε₀ in Cantor normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal {
    // invariant: exponents strictly decreasing, coefficients ≥ 1
    terms: Vec<(Ordinal, BigUint)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    pub fn omega() -> Self {
        Ordinal {
            terms: vec![(Ordinal::nat(1), BigUint::one())],
        }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(Ordinal::zero(), BigUint::from(n))],
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The CNF terms, leading term first.
    pub fn terms(&self) -> &[(Ordinal, BigUint)] {
        &self.terms
    }

    /// Ordinal addition (non-commutative): trailing terms of `self` below the
    /// leading exponent of `rhs` are absorbed.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some((lead_exp, lead_coeff)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, BigUint)> = self
            .terms
            .iter()
            .filter(|(e, _)| e > lead_exp)
            .cloned()
            .collect();
        // merge equal leading exponent, if present
        let merged = self
            .terms
            .iter()
            .find(|(e, _)| e == lead_exp)
            .map(|(_, c)| c + lead_coeff)
            .unwrap_or_else(|| lead_coeff.clone());
        terms.push((lead_exp.clone(), merged));
        terms.extend(rhs.terms[1..].iter().cloned());
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// ω^self.
    pub fn omega_pow(&self) -> Ordinal {
        Ordinal {
            terms: vec![(self.clone(), BigUint::one())],
        }
    }

    /// The exponent of the last CNF term; log 0 := 0.
    pub fn log(&self) -> Ordinal {
        self.terms
            .last()
            .map(|(e, _)| e.clone())
            .unwrap_or_else(Ordinal::zero)
    }

    /// Splits off one copy of the final ω-power: `self = rest + w^gamma`.
    /// Returns `None` for 0.
    pub fn split_last_power(&self) -> Option<(Ordinal, Ordinal)> {
        let (gamma, coeff) = self.terms.last()?.clone();
        let mut terms = self.terms.clone();
        if coeff.is_one() {
            terms.pop();
        } else {
            terms.last_mut().unwrap().1 = coeff - BigUint::one();
        }
        Some((Ordinal { terms }, gamma))
    }

    fn prefix_with_exponents_at_least(&self, bound: &Ordinal) -> Ordinal {
        Ordinal {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e >= bound)
                .cloned()
                .collect(),
        }
    }

    /// The least `v ≥ lo` with `log v ≥ nu`.
    pub fn least_with_log_at_least(lo: &Ordinal, nu: &Ordinal) -> Ordinal {
        if &lo.log() >= nu {
            lo.clone()
        } else {
            lo.prefix_with_exponents_at_least(nu).add(&nu.omega_pow())
        }
    }

    /// The least `v ≥ lo` with `log v = beta` exactly (log 0 = 0).
    pub fn least_with_log_exact(lo: &Ordinal, beta: &Ordinal) -> Ordinal {
        if &lo.log() == beta {
            lo.clone()
        } else {
            lo.prefix_with_exponents_at_least(beta)
                .add(&beta.omega_pow())
        }
    }

    pub fn parse(text: &str) -> Result<Ordinal, OrdinalParseError> {
        let mut p = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let ord = p.ord()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(ord)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((ea, ca), (eb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            match ea.cmp(eb).then_with(|| ca.cmp(cb)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exp, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if exp.is_zero() {
                write!(f, "{}", coeff)?;
                continue;
            }
            if exp == &Ordinal::nat(1) {
                write!(f, "w")?;
            } else if exp == &Ordinal::omega() {
                write!(f, "w^w")?;
            } else if exp.terms.len() == 1 && exp.terms[0].0.is_zero() {
                write!(f, "w^{}", exp.terms[0].1)?;
            } else {
                write!(f, "w^({})", exp)?;
            }
            if !coeff.is_one() {
                write!(f, "*{}", coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({})", self)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> OrdinalParseError {
        OrdinalParseError::Syntax {
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

    fn nat(&mut self) -> Result<BigUint, OrdinalParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn ord(&mut self) -> Result<Ordinal, OrdinalParseError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    // term := nat | 'w' ('^' expfactor)? ('*' nat)?
    fn term(&mut self) -> Result<Ordinal, OrdinalParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    self.expfactor()?
                } else {
                    Ordinal::nat(1)
                };
                let coeff = if self.eat(b'*') {
                    self.nat()?
                } else {
                    BigUint::one()
                };
                if coeff.is_zero() {
                    Ok(Ordinal::zero())
                } else {
                    Ok(Ordinal {
                        terms: vec![(exp, coeff)],
                    })
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                if n.is_zero() {
                    Ok(Ordinal::zero())
                } else {
                    Ok(Ordinal {
                        terms: vec![(Ordinal::zero(), n)],
                    })
                }
            }
            _ => Err(self.err("expected 'w', a natural number, or '0'")),
        }
    }

    // expfactor := 'w' | nat | '(' ord ')'
    fn expfactor(&mut self) -> Result<Ordinal, OrdinalParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.ord()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                // exponent is a plain natural
                Ok(if n.is_zero() {
                    Ordinal::zero()
                } else {
                    Ordinal {
                        terms: vec![(Ordinal::zero(), n)],
                    }
                })
            }
            _ => Err(self.err("expected exponent")),
        }
    }
}
