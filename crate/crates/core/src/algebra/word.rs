use std::cmp::Ordering;
use std::fmt;

/// A monomial of the free algebra: a sequence of 1-based generator indices.
/// The empty word is the unit 1.
///
/// Ordering is length-lexicographic, which fixes the order of every term
/// table and therefore of all printed and serialized output.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Word {
        Word(letters)
    }

    pub fn unit() -> Word {
        Word(Vec::new())
    }

    pub fn letter(i: u32) -> Word {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Largest letter, 0 for the unit.
    pub fn max_letter(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Letter counts, i.e. the exponent vector of the abelianized monomial.
    pub fn exponents(&self, n: usize) -> Vec<u32> {
        let mut e = vec![0u32; n];
        for &l in &self.0 {
            e[l as usize - 1] += 1;
        }
        e
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl From<Vec<u32>> for Word {
    fn from(v: Vec<u32>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Prints the word with adjacent equal letters collapsed into powers,
/// e.g. `z1^2*z2`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if j - i > 1 {
                write!(f, "z{}^{}", l, j - i)?;
            } else {
                write!(f, "z{l}")?;
            }
            i = j;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_lex_order() {
        let a = Word::new(vec![2]);
        let b = Word::new(vec![1, 1]);
        let c = Word::new(vec![1, 2]);
        assert!(Word::unit() < a);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn power_printing() {
        assert_eq!(Word::new(vec![1, 1, 2, 1]).to_string(), "z1^2*z2*z1");
        assert_eq!(Word::unit().to_string(), "1");
    }

    #[test]
    fn exponents_count_letters() {
        assert_eq!(Word::new(vec![1, 2, 1]).exponents(3), vec![2, 1, 0]);
    }
}
