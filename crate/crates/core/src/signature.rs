//! Weighted relational signatures.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub weight: u32,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize, weight: u32) -> Self {
        Symbol { name: name.into(), arity, weight }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: arity {} weight {}", self.name, self.arity, self.weight)
    }
}

/// A finite list of weighted symbols, optionally in open mode.
///
/// In open mode every arity `k >= 1` is available as the implicit symbol
/// `R<k>` with weight 1, so the predimension is the one where each present
/// tuple costs one unit regardless of arity. Structures only ever store
/// symbols that carry at least one tuple, so the weighted sum stays finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
    open_mode: bool,
}

/// Name of the implicit open-mode symbol of the given arity.
pub fn open_symbol_name(arity: usize) -> String {
    format!("R{arity}")
}

fn open_symbol_arity(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('R')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>, open_mode: bool) -> Result<Self> {
        let mut symbols = symbols;
        symbols.sort_by(|a, b| a.name.cmp(&b.name));
        for w in symbols.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::InvalidSignature(format!("duplicate symbol `{}`", w[0].name)));
            }
        }
        for s in &symbols {
            if s.arity == 0 {
                return Err(Error::InvalidSignature(format!("symbol `{}` has arity 0", s.name)));
            }
            if s.weight == 0 {
                return Err(Error::InvalidSignature(format!("symbol `{}` has weight 0", s.name)));
            }
            if open_mode {
                if let Some(k) = open_symbol_arity(&s.name) {
                    if k != s.arity || s.weight != 1 {
                        return Err(Error::InvalidSignature(format!(
                            "`{}` is reserved in open mode for arity {k} weight 1",
                            s.name
                        )));
                    }
                }
            }
        }
        Ok(Signature { symbols, open_mode })
    }

    pub fn closed(symbols: Vec<Symbol>) -> Result<Self> {
        Self::new(symbols, false)
    }

    /// The open-mode signature with no declared symbols.
    pub fn open() -> Self {
        Signature { symbols: Vec::new(), open_mode: true }
    }

    /// `L_n`: a single `n`-ary symbol `R` of weight 1.
    pub fn uniform(arity: usize) -> Self {
        Self::closed(vec![Symbol::new("R", arity, 1)]).expect("arity must be positive")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_open(&self) -> bool {
        self.open_mode
    }

    /// Resolve a symbol by name, materializing implicit open-mode symbols.
    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        if let Ok(i) = self.symbols.binary_search_by(|s| s.name.as_str().cmp(name)) {
            return Some(self.symbols[i].clone());
        }
        if self.open_mode {
            return open_symbol_arity(name).map(|k| Symbol::new(name, k, 1));
        }
        None
    }

    /// The first (by name) weight-1 symbol of the given arity, or the implicit
    /// open-mode one.
    pub fn unit_symbol_of_arity(&self, arity: usize) -> Option<Symbol> {
        self.symbols
            .iter()
            .find(|s| s.arity == arity && s.weight == 1)
            .cloned()
            .or_else(|| self.open_mode.then(|| Symbol::new(open_symbol_name(arity), arity, 1)))
    }

    /// A copy of this signature with `symbol` declared.
    pub fn with_symbol(&self, symbol: Symbol) -> Result<Self> {
        match self.symbol(&symbol.name) {
            Some(existing) if existing == symbol => Ok(self.clone()),
            Some(existing) => Err(Error::InvalidSignature(format!(
                "symbol `{}` already declared as `{existing}`",
                symbol.name
            ))),
            None => {
                let mut symbols = self.symbols.clone();
                symbols.push(symbol);
                Self::new(symbols, self.open_mode)
            }
        }
    }

    /// Restriction to the named symbols (always closed).
    pub fn restrict(&self, names: &[String]) -> Result<Self> {
        let mut out = Vec::new();
        for n in names {
            let s = self
                .symbol(n)
                .ok_or_else(|| Error::UnknownName { kind: "symbol", name: n.clone() })?;
            out.push(s);
        }
        out.dedup();
        Self::closed(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_mode_materializes_symbols() {
        let sig = Signature::open();
        assert_eq!(sig.symbol("R5"), Some(Symbol::new("R5", 5, 1)));
        assert_eq!(sig.symbol("R05"), None);
        assert_eq!(sig.symbol("S"), None);
        assert_eq!(Signature::uniform(3).symbol("R3"), None);
    }

    #[test]
    fn rejects_bad_symbols() {
        assert!(Signature::closed(vec![Symbol::new("R", 0, 1)]).is_err());
        assert!(Signature::closed(vec![Symbol::new("R", 2, 0)]).is_err());
        assert!(Signature::closed(vec![Symbol::new("R", 2, 1), Symbol::new("R", 3, 1)]).is_err());
        assert!(Signature::new(vec![Symbol::new("R3", 4, 1)], true).is_err());
        assert!(Signature::new(vec![Symbol::new("R3", 3, 1)], true).is_ok());
    }

    #[test]
    fn unit_symbol_lookup() {
        let sig = Signature::closed(vec![Symbol::new("T", 3, 2), Symbol::new("U", 3, 1)]).unwrap();
        assert_eq!(sig.unit_symbol_of_arity(3).unwrap().name, "U");
        assert!(sig.unit_symbol_of_arity(4).is_none());
        let widened = sig.with_symbol(Symbol::new("R4", 4, 1)).unwrap();
        assert_eq!(widened.unit_symbol_of_arity(4).unwrap().name, "R4");
    }
}
