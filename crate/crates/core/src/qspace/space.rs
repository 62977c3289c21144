use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{Rational, ValueExpr};

use super::{Enumeration, FormalVector};

/// Index of a symbol within its [`Space`]; declaration order is column order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub(crate) u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub value: ValueExpr,
}

/// A finite set of named real generators, formally independent over Q.
///
/// Symbol values are only used for magnitude comparisons; nothing here checks
/// that the declared reals really are Q-linearly independent, which is
/// undecidable in general.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

pub const ONE: &str = "one";

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Default for Space {
    fn default() -> Self {
        Self::new()
    }
}

impl Space {
    /// A space holding only `one`.
    pub fn new() -> Self {
        let one = Symbol {
            name: ONE.to_owned(),
            value: ValueExpr::Lit(Rational::one()),
        };
        Self {
            by_name: HashMap::from([(ONE.to_owned(), SymbolId(0))]),
            symbols: vec![one],
        }
    }

    /// Builds a space from `(name, value)` pairs. `one` is implicit; declaring
    /// it again is allowed only with value 1.
    pub fn with_symbols<'a>(symbols: impl IntoIterator<Item = (&'a str, ValueExpr)>) -> Result<Self> {
        let mut space = Self::new();
        for (name, value) in symbols {
            if name == ONE {
                if value.as_rational() != Some(&Rational::one()) {
                    return Err(Error::BadOne);
                }
                continue;
            }
            space.add_symbol(name, value)?;
        }
        Ok(space)
    }

    pub fn add_symbol(&mut self, name: &str, value: ValueExpr) -> Result<SymbolId> {
        if !valid_name(name) {
            return Err(Error::InvalidExpr {
                input: name.to_owned(),
                reason: "symbol names must be identifiers".into(),
            });
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateSymbol(name.to_owned()));
        }
        let id = SymbolId(u32::try_from(self.symbols.len()).expect("fewer than 2^32 symbols"));
        self.symbols.push(Symbol {
            name: name.to_owned(),
            value,
        });
        self.by_name.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn one(&self) -> SymbolId {
        SymbolId(0)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn value(&self, id: SymbolId) -> &ValueExpr {
        &self.symbols[id.index()].value
    }

    pub fn id(&self, name: &str) -> Result<SymbolId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(name.to_owned()))
    }

    pub fn unit(&self, name: &str) -> Result<FormalVector> {
        Ok(FormalVector::unit(self.id(name)?))
    }

    pub fn vector(&self, terms: &[(&str, Rational)]) -> Result<FormalVector> {
        terms.iter().try_fold(FormalVector::zero(), |acc, (name, coeff)| {
            Ok(acc + FormalVector::unit(self.id(name)?).scale(coeff))
        })
    }

    /// Parses a `name -> "p/q"` map.
    pub fn parse_vector<'a>(&self, terms: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<FormalVector> {
        terms.into_iter().try_fold(FormalVector::zero(), |acc, (name, coeff)| {
            let coeff: Rational = coeff.parse()?;
            Ok(acc + FormalVector::unit(self.id(name)?).scale(&coeff))
        })
    }

    /// Unit vectors of every symbol in declaration order.
    pub fn units(&self) -> Enumeration {
        (0..self.symbols.len())
            .map(|i| FormalVector::unit(SymbolId(i as u32)))
            .collect()
    }

    pub fn named(&self, v: &FormalVector) -> BTreeMap<String, Rational> {
        v.iter()
            .map(|(id, c)| (self.name(id).to_owned(), c.clone()))
            .collect()
    }

    /// Human-readable `3*one - 1/2*sqrt2`; `0` for θ.
    pub fn display(&self, v: &FormalVector) -> String {
        if v.is_zero() {
            return "0".to_owned();
        }
        let mut out = String::new();
        for (i, (id, c)) in v.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            match (i, sign) {
                (0, "-") => out.push('-'),
                (0, _) => {}
                _ => {
                    out.push(' ');
                    out.push_str(sign);
                    out.push(' ');
                }
            }
            if mag != Rational::one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(self.name(id));
        }
        out
    }

    /// The value of `v` when it is a rational multiple of `one`.
    pub fn rational_value(&self, v: &FormalVector) -> Option<Rational> {
        if v.is_zero() {
            return Some(Rational::zero());
        }
        let one = self.one();
        (v.support_len() == 1).then(|| v.coeff(one)).flatten().cloned()
    }
}
