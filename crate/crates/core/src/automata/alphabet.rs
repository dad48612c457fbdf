use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// An ordered list of distinct symbol names. Symbol `i` is one-hot encoded
/// as the `i`-th unit vector.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidDfa("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidDfa(format!("symbol `{s}` is empty or contains whitespace")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidDfa(format!("symbol `{s}` appears twice")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// The `2n` symbols `(1 .. (n )1 .. )n`.
    pub fn dyck(n: usize) -> Self {
        assert!(n >= 1, "Dyck alphabet needs n >= 1");
        let symbols = (1..=n)
            .map(|i| format!("({i}"))
            .chain((1..=n).map(|i| format!("){i}")));
        Alphabet::new(symbols).expect("Dyck symbols are distinct")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.index
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn check(&self, word: &[usize]) -> Result<()> {
        match word.iter().find(|&&x| x >= self.len()) {
            Some(x) => Err(Error::UnknownSymbol(format!("#{x}"))),
            None => Ok(()),
        }
    }

    /// Parses whitespace-separated symbol tokens. When every symbol is a
    /// single character, an unknown token is also tried character by
    /// character, so `aab` reads as `a a b`.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let single_chars = self.symbols.iter().all(|s| s.chars().count() == 1);
        let mut word = Vec::new();
        for tok in text.split_whitespace() {
            match self.index.get(tok) {
                Some(&i) => word.push(i),
                None if single_chars => {
                    for c in tok.chars() {
                        word.push(self.index_of(c.encode_utf8(&mut [0; 4]))?);
                    }
                }
                None => return Err(Error::UnknownSymbol(tok.to_string())),
            }
        }
        Ok(word)
    }

    /// Space-separated symbol names.
    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&i| self.symbols[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.symbols).finish()
    }
}
