use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::InstanceError;

/// A finite quantale given by operation tables. Elements are `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuantale {
    name: String,
    literals: Vec<String>,
    leq: Vec<bool>,
    tensor: Vec<u8>,
    join: Vec<u8>,
    unit: u8,
    bottom: u8,
}

impl FiniteQuantale {
    /// Build a quantale from its order, tensor table and unit, checking every
    /// axiom exhaustively. Joins are computed from the order.
    pub fn new(
        name: impl Into<String>,
        literals: Vec<String>,
        leq: Vec<bool>,
        tensor: Vec<u8>,
        unit: u8,
    ) -> Result<Self, InstanceError> {
        let n = literals.len();
        let bad = |msg: String| Err(InstanceError::QuantaleAxiom(msg));
        if n == 0 || n > u8::MAX as usize {
            return bad(format!("carrier size {n} is out of range"));
        }
        if leq.len() != n * n || tensor.len() != n * n {
            return bad("operation tables have the wrong size".into());
        }
        if unit as usize >= n || tensor.iter().any(|t| *t as usize >= n) {
            return bad("table entry outside the carrier".into());
        }
        let le = |a: usize, b: usize| leq[a * n + b];
        let lit = |a: usize| literals[a].as_str();
        for a in 0..n {
            if !le(a, a) {
                return bad(format!("order is not reflexive at {}", lit(a)));
            }
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return bad(format!("order is not antisymmetric at {}, {}", lit(a), lit(b)));
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return bad(format!(
                            "order is not transitive at {}, {}, {}",
                            lit(a),
                            lit(b),
                            lit(c)
                        ));
                    }
                }
            }
        }
        let bottom = match (0..n).find(|b| (0..n).all(|a| le(*b, a))) {
            Some(b) => b,
            None => return bad("order has no least element".into()),
        };
        let mut join = alloc::vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                let upper: Vec<usize> = (0..n).filter(|c| le(a, *c) && le(b, *c)).collect();
                match upper.iter().find(|c| upper.iter().all(|d| le(**c, *d))) {
                    Some(c) => join[a * n + b] = *c as u8,
                    None => return bad(format!("{} and {} have no join", lit(a), lit(b))),
                }
            }
        }
        let t = |a: usize, b: usize| tensor[a * n + b] as usize;
        let j = |a: usize, b: usize| join[a * n + b] as usize;
        let u = unit as usize;
        for a in 0..n {
            if t(u, a) != a || t(a, u) != a {
                return bad(format!("{} is not a unit for {}", lit(u), lit(a)));
            }
            if t(a, bottom) != bottom || t(bottom, a) != bottom {
                return bad(format!("tensor with {} does not preserve the empty join", lit(a)));
            }
            for b in 0..n {
                for c in 0..n {
                    if t(t(a, b), c) != t(a, t(b, c)) {
                        return bad(format!(
                            "tensor is not associative at {}, {}, {}",
                            lit(a),
                            lit(b),
                            lit(c)
                        ));
                    }
                    if t(a, j(b, c)) != j(t(a, b), t(a, c)) || t(j(b, c), a) != j(t(b, a), t(c, a)) {
                        return bad(format!(
                            "tensor does not distribute over the join at {}, {}, {}",
                            lit(a),
                            lit(b),
                            lit(c)
                        ));
                    }
                    if le(b, c) && (!le(t(a, b), t(a, c)) || !le(t(b, a), t(c, a))) {
                        return bad(format!(
                            "tensor is not monotone at {}, {}, {}",
                            lit(a),
                            lit(b),
                            lit(c)
                        ));
                    }
                }
            }
        }
        Ok(FiniteQuantale {
            name: name.into(),
            literals,
            leq,
            tensor,
            join,
            unit,
            bottom: bottom as u8,
        })
    }

    /// `({0, 1}, and, or)` with unit 1.
    pub fn boolean() -> Self {
        FiniteQuantale::new(
            "bool",
            alloc::vec!["0".to_string(), "1".to_string()],
            alloc::vec![true, true, false, true],
            alloc::vec![0, 0, 0, 1],
            1,
        )
        .expect("boolean quantale")
    }

    /// Distances `0..=cap` with truncated addition, ordered by reverse
    /// numeric order so that joins are minima and `cap` is the least element.
    pub fn tropical(cap: u8) -> Result<Self, InstanceError> {
        if cap == 0 {
            return Err(InstanceError::QuantaleAxiom("tropical cap must be at least 1".into()));
        }
        let n = cap as usize + 1;
        let literals = (0..n).map(|i| i.to_string()).collect();
        let mut leq = alloc::vec![false; n * n];
        let mut tensor = alloc::vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = a >= b;
                tensor[a * n + b] = (a + b).min(cap as usize) as u8;
            }
        }
        FiniteQuantale::new(format!("tropical({cap})"), literals, leq, tensor, 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.literals.len()
    }

    pub fn unit(&self) -> u8 {
        self.unit
    }

    pub fn bottom(&self) -> u8 {
        self.bottom
    }

    #[inline]
    pub fn leq(&self, a: u8, b: u8) -> bool {
        self.leq[a as usize * self.size() + b as usize]
    }

    #[inline]
    pub fn tensor(&self, a: u8, b: u8) -> u8 {
        self.tensor[a as usize * self.size() + b as usize]
    }

    #[inline]
    pub fn join(&self, a: u8, b: u8) -> u8 {
        self.join[a as usize * self.size() + b as usize]
    }

    pub fn literal(&self, a: u8) -> &str {
        &self.literals[a as usize]
    }

    pub fn parse_literal(&self, s: &str) -> Option<u8> {
        self.literals.iter().position(|l| l == s).map(|i| i as u8)
    }

    /// Product of matrices `m` (`r x s`) and `n` (`s x t`), row-major.
    pub fn mat_mul(&self, m: &[u8], n: &[u8], r: usize, s: usize, t: usize) -> Vec<u8> {
        let mut out = alloc::vec![self.bottom; r * t];
        for x in 0..r {
            for y in 0..s {
                let a = m[x * s + y];
                if a == self.bottom {
                    continue;
                }
                for z in 0..t {
                    let v = self.tensor(a, n[y * t + z]);
                    out[x * t + z] = self.join(out[x * t + z], v);
                }
            }
        }
        out
    }

    /// Identity matrix: the unit on the diagonal, bottom elsewhere.
    pub fn identity_matrix(&self, n: usize) -> Vec<u8> {
        let mut out = alloc::vec![self.bottom; n * n];
        for x in 0..n {
            out[x * n + x] = self.unit;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_quantales_pass_their_axioms() {
        let b = FiniteQuantale::boolean();
        assert_eq!(b.bottom(), 0);
        assert_eq!(b.join(0, 1), 1);
        for cap in 1..=3 {
            let t = FiniteQuantale::tropical(cap).unwrap();
            assert_eq!(t.bottom(), cap);
            assert_eq!(t.join(1, 2.min(cap)), 1);
            assert_eq!(t.tensor(1, 1), 2.min(cap));
        }
    }

    #[test]
    fn rejects_non_unital_tensor() {
        // Max on the chain 0 < 1 < 2 with unit 0, except that 0 * 1 = 2.
        let lits = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        let mut leq = alloc::vec![false; 9];
        for a in 0..3 {
            for b in 0..3 {
                leq[a * 3 + b] = a <= b;
            }
        }
        let mut tensor = alloc::vec![0u8; 9];
        for a in 0..3 {
            for b in 0..3 {
                tensor[a * 3 + b] = a.max(b) as u8;
            }
        }
        tensor[1] = 2;
        let err = FiniteQuantale::new("broken", lits, leq, tensor, 0).unwrap_err();
        assert!(matches!(err, InstanceError::QuantaleAxiom(_)), "{err}");
    }

    #[test]
    fn boolean_product_is_relational_composition() {
        let b = FiniteQuantale::boolean();
        let m = [1, 0, 1, 1];
        let n = [0, 1, 0, 0];
        assert_eq!(b.mat_mul(&m, &n, 2, 2, 2), alloc::vec![0, 1, 0, 1]);
    }
}
