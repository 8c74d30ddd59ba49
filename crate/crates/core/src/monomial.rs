//! Exponent vectors and monomial orders.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self | other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Whether only the variables flagged in `allowed` occur.
    pub fn supported_in(&self, allowed: &[bool]) -> bool {
        self.0.iter().zip(allowed).all(|(e, ok)| *e == 0 || *ok)
    }

    /// Pads with zero exponents or rearranges into a ring with `nvars`
    /// variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Monomial {
        let mut e = vec![0; nvars];
        for (i, &x) in self.0.iter().enumerate().filter(|(_, &x)| x > 0) {
            e[map[i]] += x;
        }
        Monomial(e)
    }

    /// All monomials in `nvars` variables of total degree exactly `d`, in
    /// descending grevlex order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out.sort_by(|a, b| MonomialOrder::GrevLex.cmp(b, a));
        out
    }

    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        (0..=d)
            .flat_map(|k| Monomial::of_degree(nvars, k))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonomialOrder {
    #[default]
    GrevLex,
    Lex,
    /// Variables `0..split` form the first block and dominate; each block is
    /// compared by grevlex.
    Block(usize),
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::GrevLex => grevlex(&a.0, &b.0),
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Block(k) => {
                let k = k.min(a.0.len());
                grevlex(&a.0[..k], &b.0[..k]).then_with(|| grevlex(&a.0[k..], &b.0[k..]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_monomials(n: usize, d: u32) -> Vec<Monomial> {
        Monomial::up_to_degree(n, d)
    }

    #[test]
    fn orders_are_total_and_refine_divisibility() {
        let ms = all_monomials(3, 6);
        for order in [
            MonomialOrder::GrevLex,
            MonomialOrder::Lex,
            MonomialOrder::Block(1),
        ] {
            for a in &ms {
                for b in &ms {
                    let c = order.cmp(a, b);
                    assert_eq!(c == Ordering::Equal, a == b);
                    assert_eq!(c.reverse(), order.cmp(b, a));
                    if a.divides(b) && a != b {
                        assert_eq!(c, Ordering::Less, "{order:?} {a:?} {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn orders_are_transitive_on_small_sample() {
        let ms = all_monomials(2, 4);
        for order in [
            MonomialOrder::GrevLex,
            MonomialOrder::Lex,
            MonomialOrder::Block(1),
        ] {
            for a in &ms {
                for b in &ms {
                    for c in &ms {
                        if order.cmp(a, b) == Ordering::Less && order.cmp(b, c) == Ordering::Less {
                            assert_eq!(order.cmp(a, c), Ordering::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let xy = Monomial::from_exponents(vec![1, 1, 0]);
        let xz = Monomial::from_exponents(vec![1, 0, 1]);
        let y2 = Monomial::from_exponents(vec![0, 2, 0]);
        assert_eq!(MonomialOrder::GrevLex.cmp(&xy, &xz), Ordering::Greater);
        assert_eq!(MonomialOrder::GrevLex.cmp(&y2, &xz), Ordering::Greater);
    }

    #[test]
    fn degree_enumeration_counts() {
        assert_eq!(Monomial::of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::up_to_degree(2, 3).len(), 10);
        assert_eq!(Monomial::of_degree(2, 2)[0].exponents(), &[2, 0]);
    }
}
