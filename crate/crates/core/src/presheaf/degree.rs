use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported arity of the index category `Δ^a`.
pub const MAX_ARITY: usize = 3;

/// A multidegree `([d_0], ..., [d_{a-1}])` in `Δ^a`, `1 <= a <= 3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multidegree {
    arity: u8,
    degrees: [u8; MAX_ARITY],
}

impl Multidegree {
    pub fn new(degrees: &[usize]) -> Result<Self> {
        if degrees.is_empty() || degrees.len() > MAX_ARITY {
            return Err(Error::ArityMismatch { expected: MAX_ARITY, found: degrees.len() });
        }
        let mut d = [0u8; MAX_ARITY];
        for (slot, &v) in d.iter_mut().zip(degrees) {
            *slot = u8::try_from(v).map_err(|_| Error::InvalidSpec(format!("degree {v} too large")))?;
        }
        Ok(Multidegree { arity: degrees.len() as u8, degrees: d })
    }

    /// Zero multidegree of the given arity.
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity));
        Multidegree { arity: arity as u8, degrees: [0; MAX_ARITY] }
    }

    /// Same degree `n` in every direction.
    pub fn uniform(arity: usize, n: usize) -> Self {
        let mut d = Self::zero(arity);
        for j in 0..arity {
            d.degrees[j] = n as u8;
        }
        d
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn get(&self, dir: usize) -> usize {
        debug_assert!(dir < self.arity());
        self.degrees[dir] as usize
    }

    pub fn as_vec(&self) -> Vec<usize> {
        (0..self.arity()).map(|j| self.get(j)).collect()
    }

    pub fn total(&self) -> usize {
        (0..self.arity()).map(|j| self.get(j)).sum()
    }

    pub fn with(&self, dir: usize, value: usize) -> Self {
        let mut d = *self;
        d.degrees[dir] = value as u8;
        d
    }

    pub fn lowered(&self, dir: usize) -> Self {
        self.with(dir, self.get(dir) - 1)
    }

    pub fn raised(&self, dir: usize) -> Self {
        self.with(dir, self.get(dir) + 1)
    }

    /// Componentwise order.
    pub fn le(&self, other: &Multidegree) -> bool {
        self.arity == other.arity && (0..self.arity()).all(|j| self.get(j) <= other.get(j))
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Multidegree) -> Multidegree {
        debug_assert_eq!(self.arity, other.arity);
        let mut d = *self;
        for j in 0..self.arity() {
            d.degrees[j] = self.degrees[j].min(other.degrees[j]);
        }
        d
    }

    /// All multidegrees `<= self` in lexicographic order.
    pub fn below(&self) -> Vec<Multidegree> {
        let mut out = vec![Multidegree::zero(self.arity())];
        for j in 0..self.arity() {
            out = out
                .into_iter()
                .flat_map(|d| (0..=self.get(j)).map(move |v| d.with(j, v)))
                .collect();
        }
        out.sort();
        out
    }

    /// Parses `"3"`, `"3,3"` or `"3,3,3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> =
            s.trim().trim_start_matches('(').trim_end_matches(')').split(',').map(|p| p.trim().parse()).collect();
        let parts = parts.map_err(|_| Error::Format(format!("bad multidegree '{s}'")))?;
        Multidegree::new(&parts)
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.as_vec().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_enumerates_box() {
        let t = Multidegree::new(&[1, 2]).unwrap();
        let all = t.below();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|d| d.le(&t)));
        assert_eq!(all[0], Multidegree::zero(2));
    }

    #[test]
    fn parse_round_trip() {
        let d = Multidegree::parse("3,1,2").unwrap();
        assert_eq!(d.to_string(), "(3,1,2)");
        assert_eq!(Multidegree::parse(&d.to_string()).unwrap(), d);
        assert!(Multidegree::parse("1,2,3,4").is_err());
    }
}
