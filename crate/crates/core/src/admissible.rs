//! Admissibility conditions and family sizes, in exact integer arithmetic.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;
use crate::graph::AbstractGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissibleError {
    #[error("({v},{k},{q}) is not Steiner-admissible")]
    NotAdmissible { v: u32, k: u32, q: u64 },
}

/// [v]_q = 1 + q + .. + q^(v-1).
pub fn q_bracket(v: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let mut sum = BigUint::zero();
    let mut pow = BigUint::one();
    for _ in 0..v {
        sum += &pow;
        pow *= &q;
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketGcd {
    /// [gcd(m, n)]_q.
    pub value: BigUint,
    /// gcd([m]_q, [n]_q) computed directly.
    pub direct: BigUint,
}

impl BracketGcd {
    pub fn holds(&self) -> bool {
        self.value == self.direct
    }
}

pub fn q_bracket_gcd(m: u32, n: u32, q: u64) -> BracketGcd {
    BracketGcd { value: q_bracket(m.gcd(&n), q), direct: q_bracket(m, q).gcd(&q_bracket(n, q)) }
}

/// One named condition and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub conditions: Vec<Condition>,
}

impl Admissibility {
    fn from(conditions: Vec<Condition>) -> Self {
        Admissibility { admissible: conditions.iter().all(|c| c.holds), conditions }
    }
}

fn cond(name: &str, holds: bool, detail: String) -> Condition {
    Condition { name: name.to_string(), holds, detail }
}

/// k with [k]_q = order, if any.
pub fn bracket_index(order: u64, q: u64) -> Option<u32> {
    let target = BigUint::from(order);
    (1..64).map(|k| (k, q_bracket(k, q))).take_while(|(_, b)| *b <= target).find(|(_, b)| *b == target).map(|(k, _)| k)
}

/// Necessary conditions for a 2-(v, Γ, λ)_q design from the order, size and
/// degree gcd of Γ.
pub fn admissible_counts(v: u32, q: u64, lambda: u64, order: u64, size: u64, degree_gcd: u64) -> Admissibility {
    let k = bracket_index(order, q);
    let pairs = BigUint::from(lambda) * q * q_bracket(v, q) * q_bracket(v - 1, q) / 2u32;
    let per_point = BigUint::from(lambda) * q * q_bracket(v - 1, q);
    let size_ok = size > 0 && (&pairs % size).is_zero();
    let degree_ok = degree_gcd > 0 && (&per_point % degree_gcd).is_zero();
    Admissibility::from(vec![
        cond(
            "order",
            k.is_some_and(|k| k >= 2 && k <= v),
            match k {
                Some(k) => format!("{order} = [{k}]_{q}"),
                None => format!("{order} is not a q-bracket for q = {q}"),
            },
        ),
        cond("size", size_ok, format!("{size} | {pairs}")),
        cond("degrees", degree_ok, format!("{degree_gcd} | {per_point}")),
    ])
}

pub fn admissible_general(v: u32, q: u64, lambda: u64, graph: &AbstractGraph) -> Admissibility {
    let g = graph.degrees().iter().fold(0u64, |acc, &d| acc.gcd(&(d as u64)));
    admissible_counts(v, q, lambda, graph.order() as u64, graph.size() as u64, g)
}

/// Independent of q: v = 1 or k (mod k(k-1)).
pub fn steiner_admissible(v: u32, k: u32, _q: u64) -> Admissibility {
    if k < 2 {
        return Admissibility::from(vec![cond("steiner", false, format!("k = {k} < 2"))]);
    }
    let m = k * (k - 1);
    let r = v % m;
    Admissibility::from(vec![cond(
        "steiner",
        2 <= k && k < v && (r == 1 % m || r == k % m),
        format!("{v} = {r} (mod {m})"),
    )])
}

/// Congruences for 2-(v, C_k, 1)_q designs.
pub fn cycle_admissible(v: u32, k: u32, q: u64) -> Admissibility {
    let (holds, detail) = if q % 2 == 0 {
        (v % k <= 1, format!("q even: v = {} (mod {k})", v % k))
    } else if k % 2 == 0 {
        // sharper than v = 1 (mod k): with v = tk + 1 the size count needs t even
        (v % (2 * k) == 1, format!("q odd, k even: v = {} (mod {})", v % (2 * k), 2 * k))
    } else {
        let r = v % (2 * k);
        (r == 1 || r == k, format!("q odd, k odd: v = {r} (mod {})", 2 * k))
    };
    Admissibility::from(vec![cond("cycle", k >= 2 && holds, detail)])
}

/// Congruences for 2-(v, P_k, 1)_q designs.
pub fn path_admissible(v: u32, k: u32, q: u64) -> Admissibility {
    let (holds, detail) = if k < 2 {
        (false, format!("k = {k} < 2"))
    } else if q % 2 == 0 {
        (false, "q even".to_string())
    } else if k % 2 == 0 {
        (v % (k - 1) <= 1, format!("q odd, k even: v = {} (mod {})", v % (k - 1), k - 1))
    } else {
        let m = 2 * (k - 1);
        (v % m <= 1, format!("q odd, k odd: v = {} (mod {m})", v % m))
    };
    Admissibility::from(vec![cond("path", holds, detail)])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySizes {
    pub family_size: BigUint,
    pub initial_size: Option<BigUint>,
}

/// |F| for a (v, r, k, 1)_q difference family, r = v mod k(k-1), and the
/// number of initial blocks when Frobenius multipliers can act.
///
/// For v = 1 (mod k(k-1)) multipliers of order v are available when v is a
/// prime, q is not 1 mod v and v divides |F|. For v = k (mod k(k-1)) the
/// multiplier group has order k, usable when gcd(k, v/k) = 1 and k divides
/// |F|.
pub fn steiner_family_sizes(v: u32, k: u32, q: u64) -> Result<FamilySizes, AdmissibleError> {
    if !steiner_admissible(v, k, q).admissible {
        return Err(AdmissibleError::NotAdmissible { v, k, q });
    }
    let qb = BigUint::from(q);
    let one = BigUint::one();
    let den = (qb.pow(k) - &one) * (qb.pow(k - 1) - &one);
    let m = k * (k - 1);
    let (family_size, multiplier_order) = if v % m == 1 % m {
        let f = (&qb - &one) * (qb.pow(v - 1) - &one) / &den;
        let usable = is_prime(v as u64) && q % v as u64 != 1;
        (f, usable.then_some(v))
    } else {
        let f = qb.pow(k - 1) * (&qb - &one) * (qb.pow(v - k) - &one) / &den;
        let usable = k.gcd(&(v / k)) == 1;
        (f, usable.then_some(k))
    };
    let initial_size = multiplier_order
        .filter(|&d| (&family_size % d).is_zero())
        .map(|d| &family_size / d);
    Ok(FamilySizes { family_size, initial_size })
}

/// One (order, sizes) row of the table of admissible connected graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphRow {
    pub order: u64,
    pub sizes: Vec<u64>,
    /// Sizes compatible with a regular graph.
    pub regular: Vec<u64>,
}

/// Admissible (order, size) pairs of connected graphs Γ with 2 < k < v for a
/// 2-(v, Γ, λ)_q design.
pub fn admissible_graph_table(v: u32, q: u64, lambda: u64) -> Vec<GraphRow> {
    let pairs = (BigUint::from(lambda) * q * q_bracket(v, q) * q_bracket(v - 1, q) / 2u32).to_u64().unwrap_or(0);
    let r = (BigUint::from(lambda) * q * q_bracket(v - 1, q)).to_u64().unwrap_or(0);
    let mut rows = Vec::new();
    for k in 3..v {
        let n = q_bracket(k, q).to_u64().expect("small order");
        let max = n * (n - 1) / 2;
        let mut sizes = Vec::new();
        let mut regular = Vec::new();
        for s in n - 1..=max {
            if pairs % s != 0 {
                continue;
            }
            // K_n is the only graph of that size; otherwise a connected graph
            // with degree gcd 1 exists.
            if s == max && r % (n - 1) != 0 {
                continue;
            }
            sizes.push(s);
            if (2 * s) % n == 0 && r % (2 * s / n) == 0 {
                regular.push(s);
            }
        }
        rows.push(GraphRow { order: n, sizes, regular });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets() {
        assert_eq!(q_bracket(13, 2), BigUint::from(8191u32));
        assert_eq!(q_bracket(1, 7), BigUint::one());
        assert_eq!(q_bracket(0, 7), BigUint::zero());
        assert_eq!(q_bracket(5, 3), BigUint::from(121u32));
        assert_eq!(q_bracket_gcd(4, 6, 2).value, BigUint::from(3u32));
        assert!(q_bracket_gcd(13, 12, 2).holds());
        assert_eq!(q_bracket_gcd(13, 12, 2).value, BigUint::one());
    }

    #[test]
    fn congruences() {
        assert!(steiner_admissible(13, 3, 2).admissible);
        assert!(!steiner_admissible(8, 3, 2).admissible);
        assert!(!steiner_admissible(16, 6, 2).admissible);
        assert!(steiner_admissible(31, 6, 2).admissible);
        assert!(steiner_admissible(36, 6, 2).admissible);
        assert!(cycle_admissible(7, 3, 2).admissible);
        assert!((3..12).all(|v| (2..v).all(|k| !path_admissible(v, k, 2).admissible)));
        assert!(path_admissible(5, 3, 3).admissible);
    }

    #[test]
    fn sizes() {
        let s = steiner_family_sizes(13, 3, 2).unwrap();
        assert_eq!(s.family_size, BigUint::from(195u32));
        assert_eq!(s.initial_size, Some(BigUint::from(15u32)));
        let s = steiner_family_sizes(7, 3, 2).unwrap();
        assert_eq!(s.family_size, BigUint::from(3u32));
        assert_eq!(s.initial_size, None);
        assert!(steiner_family_sizes(8, 3, 2).is_err());
    }
}
