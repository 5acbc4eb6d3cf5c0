use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// A GF(2) variable: an initial key bit or a gadget measurement outcome.
/// Gadget indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    A0(usize),
    B0(usize),
    Ra(usize),
    Rb(usize),
}

impl Symbol {
    /// Gadget index for outcome symbols.
    pub fn outcome_index(self) -> Option<usize> {
        match self {
            Symbol::Ra(i) | Symbol::Rb(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::A0(q) => write!(f, "a0[{q}]"),
            Symbol::B0(q) => write!(f, "b0[{q}]"),
            Symbol::Ra(i) => write!(f, "ra({i})"),
            Symbol::Rb(i) => write!(f, "rb({i})"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("malformed key symbol `{s}`"));
        let inner = |open: char, close: char| -> Result<usize> {
            let body = s.get(2..).ok_or_else(bad)?;
            body.strip_prefix(open)
                .and_then(|b| b.strip_suffix(close))
                .and_then(|n| n.parse().ok())
                .ok_or_else(bad)
        };
        match s.get(..2) {
            Some("a0") => inner('[', ']').map(Symbol::A0),
            Some("b0") => inner('[', ']').map(Symbol::B0),
            Some("ra") => inner('(', ')').map(Symbol::Ra),
            Some("rb") => inner('(', ')').map(Symbol::Rb),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Affine GF(2) form: `constant ⊕ (⊕ terms)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyPolynomial {
    #[serde(rename = "const")]
    pub constant: u8,
    pub terms: BTreeSet<Symbol>,
}

impl KeyPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self {
            constant: 1,
            terms: BTreeSet::new(),
        }
    }

    pub fn symbol(s: Symbol) -> Self {
        Self {
            constant: 0,
            terms: BTreeSet::from([s]),
        }
    }

    pub fn from_terms(constant: u8, terms: impl IntoIterator<Item = Symbol>) -> Self {
        let mut p = Self {
            constant: constant & 1,
            terms: BTreeSet::new(),
        };
        for t in terms {
            p.toggle(t);
        }
        p
    }

    fn toggle(&mut self, s: Symbol) {
        if !self.terms.remove(&s) {
            self.terms.insert(s);
        }
    }

    pub fn xor(&self, other: &KeyPolynomial) -> KeyPolynomial {
        KeyPolynomial {
            constant: self.constant ^ other.constant,
            terms: self.terms.symmetric_difference(&other.terms).copied().collect(),
        }
    }

    pub fn xor_symbol(&self, s: Symbol) -> KeyPolynomial {
        let mut p = self.clone();
        p.toggle(s);
        p
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// XOR gates needed to evaluate this polynomial.
    pub fn xor_count(&self) -> usize {
        (self.terms.len() + usize::from(self.constant)).saturating_sub(1)
    }

    /// Largest gadget index referenced, if any.
    pub fn max_outcome_index(&self) -> Option<usize> {
        self.terms.iter().filter_map(|s| s.outcome_index()).max()
    }

    pub fn evaluate(&self, bindings: &Bindings) -> Result<u8> {
        self.terms.iter().try_fold(self.constant, |acc, s| Ok(acc ^ bindings.get(*s)?))
    }
}

impl fmt::Display for KeyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms.iter().map(Symbol::to_string).collect();
        if self.constant == 1 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// Concrete values for key symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    values: BTreeMap<Symbol, u8>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `a0[q]`, `b0[q]` from an initial key.
    pub fn from_initial(a: &[u8], b: &[u8]) -> Self {
        let mut out = Self::new();
        for (q, (&x, &z)) in a.iter().zip(b).enumerate() {
            out.set(Symbol::A0(q), x);
            out.set(Symbol::B0(q), z);
        }
        out
    }

    pub fn set(&mut self, s: Symbol, bit: u8) {
        self.values.insert(s, bit & 1);
    }

    pub fn bind_outcome(&mut self, index: usize, r_a: u8, r_b: u8) {
        self.set(Symbol::Ra(index), r_a);
        self.set(Symbol::Rb(index), r_b);
    }

    pub fn get(&self, s: Symbol) -> Result<u8> {
        self.values
            .get(&s)
            .copied()
            .ok_or_else(|| Error::UnboundSymbol(s.to_string()))
    }
}

pub fn evaluate_key_polynomial(p: &KeyPolynomial, bindings: &Bindings) -> Result<u8> {
    p.evaluate(bindings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_roundtrip() {
        for s in [Symbol::A0(0), Symbol::B0(12), Symbol::Ra(1), Symbol::Rb(3)] {
            assert_eq!(s.to_string().parse::<Symbol>().unwrap(), s);
        }
        for bad in ["a0(1)", "rb[1]", "x", "ra()", "c0[1]"] {
            assert!(bad.parse::<Symbol>().is_err(), "{bad}");
        }
    }

    #[test]
    fn xor_cancels_duplicates() {
        let p = KeyPolynomial::symbol(Symbol::A0(0)).xor_symbol(Symbol::Rb(1));
        let q = p.xor(&KeyPolynomial::symbol(Symbol::A0(0)));
        assert_eq!(q, KeyPolynomial::symbol(Symbol::Rb(1)));
        assert_eq!(p.xor(&p), KeyPolynomial::zero());
    }

    #[test]
    fn json_schema() {
        let p = KeyPolynomial::from_terms(1, [Symbol::A0(0), Symbol::Rb(1)]);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"const":1,"terms":["a0[0]","rb(1)"]}"#);
        assert_eq!(serde_json::from_str::<KeyPolynomial>(&j).unwrap(), p);
    }

    #[test]
    fn evaluation() {
        let mut b = Bindings::from_initial(&[1], &[0]);
        b.bind_outcome(1, 1, 1);
        let p = KeyPolynomial::from_terms(0, [Symbol::A0(0), Symbol::Rb(1), Symbol::B0(0)]);
        assert_eq!(p.evaluate(&b).unwrap(), 0);
        assert_eq!(KeyPolynomial::zero().evaluate(&Bindings::new()).unwrap(), 0);
        let err = KeyPolynomial::symbol(Symbol::Ra(2)).evaluate(&b).unwrap_err();
        assert!(err.to_string().contains("ra(2)"));
    }

    #[test]
    fn xor_counts() {
        assert_eq!(KeyPolynomial::zero().xor_count(), 0);
        assert_eq!(KeyPolynomial::symbol(Symbol::A0(0)).xor_count(), 0);
        assert_eq!(KeyPolynomial::from_terms(1, [Symbol::A0(0)]).xor_count(), 1);
        assert_eq!(KeyPolynomial::from_terms(0, (1..=4).map(Symbol::Ra)).xor_count(), 3);
    }
}
