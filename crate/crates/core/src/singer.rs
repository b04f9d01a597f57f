//! Points of PG(F_q^v) as residues modulo [v]_q.
//!
//! The map f sends g^i to i mod [v]_q; a residue x stands for the projective
//! point of g^x.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_prime, FieldContext, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingerError {
    #[error("a line needs two distinct points")]
    EqualPoints,
    #[error("{n} does not divide {v}")]
    NotDivisible { v: u32, n: u32 },
    #[error("generators span a subspace of dimension {dim}, not a hyperplane")]
    NotHyperplane { dim: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    pub points: Vec<u32>,
    /// Projective dimension.
    pub dim: u32,
    pub generators: Vec<u32>,
}

impl Subspace {
    pub fn contains(&self, x: u32) -> bool {
        self.points.binary_search(&x).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubspaceCheck {
    Subspace(Subspace),
    /// The size is not [d+1]_q for any d.
    BadCardinality(usize),
    /// The line through `a` and `b` leaves the set at `outside`.
    NotClosed { a: u32, b: u32, outside: u32 },
}

impl SubspaceCheck {
    pub fn is_subspace(&self) -> bool {
        matches!(self, SubspaceCheck::Subspace(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spread {
    pub classes: Vec<Subspace>,
}

/// [v]_q as a machine integer.
pub fn bracket(v: u32, q: u32) -> u64 {
    (0..v).map(|i| (q as u64).pow(i)).sum()
}

/// True iff v is prime and q is not 1 mod v.
pub fn frobenius_semiregular_on_nonidentity(v: u32, q: u32) -> bool {
    is_prime(v as u64) && q % v != 1 % v
}

#[derive(Debug, Clone)]
pub struct SingerContext {
    field: Arc<FieldContext>,
    v_q: u32,
    scalars: Vec<u32>,
}

impl SingerContext {
    pub fn new(field: Arc<FieldContext>) -> Self {
        let v_q = field.order() / (field.q() - 1);
        let scalars = field.scalar_exponents();
        SingerContext { field, v_q, scalars }
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }
    pub fn field_arc(&self) -> Arc<FieldContext> {
        self.field.clone()
    }
    pub fn v_q(&self) -> u32 {
        self.v_q
    }
    pub fn q(&self) -> u32 {
        self.field.q()
    }
    pub fn v(&self) -> u32 {
        self.field.v()
    }

    /// f(a), or `None` for zero.
    pub fn point(&self, a: &FieldElement) -> Option<u32> {
        a.exponent().map(|i| i % self.v_q)
    }

    pub fn lift(&self, x: u32) -> FieldElement {
        self.field.element(x as u64)
    }

    /// Points on the line through a and b other than b, as f(g^a + c g^b).
    fn line_points(&self, a: u32, b: u32) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(a % self.v_q).chain(self.scalars.iter().map(move |&s| {
            self.field
                .add_exp(a, b + s)
                .expect("distinct points are independent")
                % self.v_q
        }))
    }

    pub fn line_through(&self, a: u32, b: u32) -> Result<Subspace, SingerError> {
        let (a, b) = (a % self.v_q, b % self.v_q);
        if a == b {
            return Err(SingerError::EqualPoints);
        }
        let mut points: Vec<u32> = self.line_points(a, b).collect();
        points.push(b);
        points.sort_unstable();
        Ok(Subspace { points, dim: 1, generators: vec![a, b] })
    }

    pub fn span(&self, gens: &[u32]) -> Subspace {
        let mut points: Vec<u32> = Vec::new();
        let mut member: HashSet<u32> = HashSet::new();
        let mut used = Vec::new();
        for &x in gens {
            let x = x % self.v_q;
            if member.contains(&x) {
                continue;
            }
            used.push(x);
            let mut fresh = vec![x];
            for &s in &points {
                for &c in &self.scalars {
                    let y = self
                        .field
                        .add_exp(s, x + c)
                        .expect("independent points")
                        % self.v_q;
                    fresh.push(y);
                }
            }
            for y in fresh {
                if member.insert(y) {
                    points.push(y);
                }
            }
        }
        points.sort_unstable();
        let dim = used.len().saturating_sub(1) as u32;
        Subspace { points, dim, generators: used }
    }

    /// First pair of members whose line leaves the sorted set, if any.
    pub fn line_violation(&self, sorted: &[u32]) -> Option<(u32, u32, u32)> {
        for (i, &a) in sorted.iter().enumerate() {
            for &b in &sorted[i + 1..] {
                for y in self.line_points(a, b) {
                    if sorted.binary_search(&y).is_err() {
                        return Some((a, b, y));
                    }
                }
            }
        }
        None
    }

    /// Projective dimension d with |set| = [d+1]_q, if any.
    pub fn dimension_for_size(&self, size: usize) -> Option<u32> {
        (1..=self.v()).find(|&k| bracket(k, self.q()) == size as u64).map(|k| k - 1)
    }

    pub fn is_subspace(&self, points: &[u32]) -> SubspaceCheck {
        let mut sorted: Vec<u32> = points.iter().map(|x| x % self.v_q).collect();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() || self.dimension_for_size(sorted.len()).is_none() {
            return SubspaceCheck::BadCardinality(points.len());
        }
        if let Some((a, b, outside)) = self.line_violation(&sorted) {
            return SubspaceCheck::NotClosed { a, b, outside };
        }
        let mut gens = vec![sorted[0]];
        let mut cur = self.span(&gens);
        for &x in &sorted {
            if !cur.contains(x) {
                gens.push(x);
                cur = self.span(&gens);
            }
        }
        debug_assert_eq!(cur.points, sorted);
        SubspaceCheck::Subspace(cur)
    }

    /// Generator of the subgroup [m Z_mn]_q of order [n]_q, where v = mn.
    pub fn spread_step(&self, n: u32) -> Result<u32, SingerError> {
        let v = self.v();
        if n == 0 || v % n != 0 {
            return Err(SingerError::NotDivisible { v, n });
        }
        Ok((self.v_q as u64 / bracket(n, self.q())) as u32)
    }

    pub fn desarguesian_spread(&self, n: u32) -> Result<Spread, SingerError> {
        let step = self.spread_step(n)?;
        let size = self.v_q / step;
        let classes = (0..step)
            .map(|t| {
                let pts: Vec<u32> = (0..size).map(|i| t + i * step).collect();
                match self.is_subspace(&pts) {
                    SubspaceCheck::Subspace(s) => s,
                    other => panic!("spread class {t} is not a subspace: {other:?}"),
                }
            })
            .collect();
        Ok(Spread { classes })
    }

    pub fn frobenius_orbit(&self, x: u32) -> Vec<u32> {
        let n = self.v_q as u64;
        let mut orbit = vec![x % self.v_q];
        let mut y = (x as u64 * self.q() as u64) % n;
        while y as u32 != orbit[0] {
            orbit.push(y as u32);
            y = y * self.q() as u64 % n;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbits of x -> qx meeting `domain`, ordered by least element.
    pub fn frobenius_orbits(&self, domain: &[u32]) -> Vec<Vec<u32>> {
        let mut seen = HashSet::new();
        let mut sorted = domain.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for x in sorted {
            if seen.contains(&x) {
                continue;
            }
            let orbit = self.frobenius_orbit(x);
            seen.extend(orbit.iter().copied());
            out.push(orbit);
        }
        out
    }

    /// Points x with Tr(g^x) = 0.
    pub fn trace_hyperplane(&self) -> Vec<u32> {
        let q = self.q() as u64;
        let order = self.field.order() as u64;
        (0..self.v_q)
            .filter(|&x| {
                let mut acc: Option<u32> = None;
                let mut e = x as u64;
                for _ in 0..self.v() {
                    acc = match acc {
                        None => Some(e as u32),
                        Some(a) => self.field.add_exp(a, e as u32),
                    };
                    e = e * q % order;
                }
                acc.is_none()
            })
            .collect()
    }

    pub fn singer_difference_set(&self, hyperplane_gens: &[u32]) -> Result<Vec<u32>, SingerError> {
        let s = self.span(hyperplane_gens);
        let dim = s.generators.len() as i32 - 1;
        if dim != self.v() as i32 - 2 {
            return Err(SingerError::NotHyperplane { dim });
        }
        Ok(s.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;

    fn ctx(p: u32, v: u32, c: &[u32]) -> SingerContext {
        SingerContext::new(Arc::new(FieldDescriptor::prime(p, v, c).unwrap().build().unwrap()))
    }

    #[test]
    fn plane_spans() {
        let s = ctx(2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(s.v_q(), 127);
        let pi = s.span(&[0, 2, 5]);
        assert_eq!(pi.points, vec![0, 2, 5, 14, 54, 65, 95]);
        assert_eq!(pi.dim, 2);
        assert!(s.is_subspace(&pi.points).is_subspace());
        assert_eq!(s.span(&[9]).points, vec![9]);

        let t = ctx(3, 5, &[1, 2, 0, 0, 0, 1]);
        let plane = t.span(&[0, 1, 3]);
        assert_eq!(plane.points.len(), 13);
        for x in [69, 86, 93, 77, 5, 47, 75, 28, 15, 49] {
            assert!(plane.contains(x), "{x}");
        }
    }

    #[test]
    fn non_subspaces() {
        let s = ctx(2, 5, &[1, 0, 1, 0, 0, 1]);
        assert!(!s.is_subspace(&[0, 1, 2]).is_subspace());
        assert_eq!(s.is_subspace(&[3, 8]), SubspaceCheck::BadCardinality(2));
        assert!(!s.line_through(1, 29).unwrap().contains(3));
        assert_eq!(s.line_through(4, 4), Err(SingerError::EqualPoints));
        let t = ctx(3, 5, &[1, 2, 0, 0, 0, 1]);
        assert_eq!(t.line_through(0, 7).unwrap().points.len(), 4);
    }

    #[test]
    fn spreads() {
        let s = ctx(2, 6, &[1, 1, 0, 0, 0, 0, 1]);
        let sp = s.desarguesian_spread(3).unwrap();
        assert_eq!(sp.classes.len(), 9);
        assert_eq!(sp.classes[0].points, (0..7).map(|i| 9 * i).collect::<Vec<_>>());
        assert_eq!(s.desarguesian_spread(6).unwrap().classes.len(), 1);
        assert_eq!(s.desarguesian_spread(4), Err(SingerError::NotDivisible { v: 6, n: 4 }));
        let f = ctx(2, 4, &[1, 1, 0, 0, 1]);
        let sp = f.desarguesian_spread(2).unwrap();
        let mut all: Vec<u32> = sp.classes.iter().flat_map(|c| c.points.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..15).collect::<Vec<_>>());
        assert!(sp.classes.iter().all(|c| c.points.len() == 3));
    }

    #[test]
    fn frobenius() {
        let s = ctx(2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]);
        let orbits = s.frobenius_orbits(&(1..127).collect::<Vec<_>>());
        assert_eq!(orbits.len(), 18);
        assert!(orbits.iter().all(|o| o.len() == 7));
        assert_eq!(s.frobenius_orbit(0), vec![0]);
        assert!(frobenius_semiregular_on_nonidentity(7, 2));
        assert!(!frobenius_semiregular_on_nonidentity(6, 2));
        assert!(frobenius_semiregular_on_nonidentity(5, 3));
        let t = ctx(2, 13, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1]);
        let orbits = t.frobenius_orbits(&(1..8191).collect::<Vec<_>>());
        assert_eq!(orbits.len(), 630);
    }

    #[test]
    fn trace_hyperplanes() {
        let s = ctx(2, 4, &[1, 1, 0, 0, 1]);
        let h = s.trace_hyperplane();
        assert_eq!(h.len(), 7);
        let d = s.singer_difference_set(&h).unwrap();
        assert_eq!(d, h);
        let v2 = ctx(3, 2, &[2, 1, 1]);
        assert_eq!(v2.trace_hyperplane().len(), 1);
        assert!(matches!(s.singer_difference_set(&[0, 1]), Err(SingerError::NotHyperplane { dim: 1 })));
    }
}
