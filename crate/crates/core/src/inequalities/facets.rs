//! Facet enumeration for projections of the local polytope, by the double
//! description method.
//!
//! The vertices are the distinct agreement patterns of the deterministic ±1
//! assignments. Homogenizing each vertex p to the row (1, p) turns every
//! valid inequality a·p ≤ b into a point of the polar cone
//! { y : ⟨(1, p), y⟩ ≤ 0 } with y = (−b, a); the facets of the projection
//! are exactly the extreme rays of that cone. The cone is pointed and
//! full-dimensional here (the projection always has full dimension), so the
//! classic pointed-cone double description applies: seed with d+1 linearly
//! independent constraint rows, whose cone is simplicial with rays −G⁻¹,
//! then insert the remaining rows one at a time, combining adjacent rays
//! across each new hyperplane.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::exact::{independent_rows, invert, primitive, rat_int, Rat};
use crate::error::{Error, Result};

/// Facet enumeration is limited to four observables; feasibility alone
/// scales further.
pub const MAX_FACET_VARS: usize = 4;

/// A linear inequality Σ coeffs[k] · p(pairs[k]) ≤ rhs over agreement
/// probabilities, with integer coefficients in primitive form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleInequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
    pub pairs: Vec<(usize, usize)>,
}

impl BooleInequality {
    pub fn satisfied_by(&self, targets: &[f64]) -> bool {
        let lhs: f64 = self
            .coeffs
            .iter()
            .zip(targets)
            .map(|(c, t)| *c as f64 * t)
            .sum();
        lhs <= self.rhs as f64
    }

    pub fn satisfied_exact(&self, targets: &[Rat]) -> bool {
        let lhs: Rat = self
            .coeffs
            .iter()
            .zip(targets)
            .map(|(c, t)| rat_int(*c) * t)
            .sum();
        lhs <= rat_int(self.rhs)
    }
}

impl fmt::Display for BooleInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // All-nonpositive coefficients read better in >= form.
        let flip = self.coeffs.iter().all(|&c| c <= 0) && self.coeffs.iter().any(|&c| c < 0);
        let (coeffs, rhs, rel): (Vec<i64>, i64, &str) = if flip {
            (self.coeffs.iter().map(|c| -c).collect(), -self.rhs, ">=")
        } else {
            (self.coeffs.clone(), self.rhs, "<=")
        };
        let mut first = true;
        for (c, (i, j)) in coeffs.iter().zip(&self.pairs) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                " - "
            } else if first {
                ""
            } else {
                " + "
            };
            let mag = c.abs();
            write!(f, "{sign}")?;
            if mag != 1 {
                write!(f, "{mag}·")?;
            }
            write!(f, "p({i},{j})")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " {rel} {rhs}")
    }
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    /// Bit k set when this ray is tight on the k-th vertex row.
    tight: u32,
}

fn normalize(mut coords: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in &coords {
        g = g.gcd(&c.abs());
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for c in &mut coords {
            *c /= &g;
        }
    }
    coords
}

fn dot(row: &[i64], coords: &[BigInt]) -> BigInt {
    row.iter()
        .zip(coords)
        .map(|(r, c)| c * BigInt::from(*r))
        .sum()
}

fn to_i64(v: &BigInt) -> Result<i64> {
    i64::try_from(v.clone())
        .map_err(|_| Error::InvalidConstraint("facet coefficients overflow i64".into()))
}

/// Enumerate the complete facet list of the projection of the assignment
/// polytope onto the given agreement coordinates.
pub fn enumerate_boole_facets(
    n_vars: usize,
    pairs: &[(usize, usize)],
) -> Result<Vec<BooleInequality>> {
    if n_vars == 0 {
        return Err(Error::InvalidConstraint("need at least one observable".into()));
    }
    if n_vars > MAX_FACET_VARS {
        return Err(Error::TooManyVariables {
            n_vars,
            max: MAX_FACET_VARS,
        });
    }
    if pairs.is_empty() {
        return Err(Error::InvalidConstraint("need at least one pair".into()));
    }
    let mut seen_pairs = HashSet::new();
    for &(i, j) in pairs {
        if i >= n_vars || j >= n_vars || i == j {
            return Err(Error::InvalidConstraint(format!(
                "pair ({i}, {j}) invalid for {n_vars} observables"
            )));
        }
        if !seen_pairs.insert((i.min(j), i.max(j))) {
            return Err(Error::InvalidConstraint(format!(
                "duplicate pair ({i}, {j})"
            )));
        }
    }

    // Distinct projected vertices, homogenized to rows (1, p) ∈ Z^{d+1}.
    let d = pairs.len();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut seen = HashSet::new();
    for bits in 0u16..(1 << n_vars) {
        let sign = |v: usize| -> i8 {
            if bits >> v & 1 == 1 {
                1
            } else {
                -1
            }
        };
        let mut row = Vec::with_capacity(d + 1);
        row.push(1i64);
        row.extend(
            pairs
                .iter()
                .map(|&(i, j)| if sign(i) == sign(j) { 1i64 } else { 0 }),
        );
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    }

    // Seed with d+1 independent rows; their simplicial cone has rays −G⁻¹.
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| rat_int(v)).collect())
        .collect();
    let seed = independent_rows(&rat_rows, d + 1).ok_or_else(|| {
        Error::InvalidConstraint("projection is not full-dimensional".into())
    })?;
    let g: Vec<Vec<Rat>> = seed.iter().map(|&i| rat_rows[i].clone()).collect();
    let g_inv = invert(&g).expect("selected rows are independent");
    let mut rays: Vec<Ray> = (0..d + 1)
        .map(|k| {
            let column: Vec<Rat> = (0..d + 1).map(|r| -g_inv[r][k].clone()).collect();
            let coords = normalize(primitive(&column));
            // Tight on every seed row except the k-th (product −1 there).
            let mut tight = 0u32;
            for (pos, &row_idx) in seed.iter().enumerate() {
                if pos != k {
                    tight |= 1 << row_idx;
                }
            }
            Ray { coords, tight }
        })
        .collect();

    // Insert the remaining constraint rows.
    for (q, row) in rows.iter().enumerate() {
        if seed.contains(&q) {
            continue;
        }
        let products: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (ray, prod) in rays.iter().zip(&products) {
            if prod.is_negative() {
                next.push(ray.clone());
            } else if prod.is_zero() {
                let mut kept = ray.clone();
                kept.tight |= 1 << q;
                next.push(kept);
            }
        }
        for (a, pa) in rays.iter().zip(&products) {
            if !pa.is_positive() {
                continue;
            }
            for (b, pb) in rays.iter().zip(&products) {
                if !pb.is_negative() {
                    continue;
                }
                // Combinatorial adjacency: no third ray is tight everywhere
                // both of these are.
                let z = a.tight & b.tight;
                let adjacent = !rays.iter().any(|other| {
                    !std::ptr::eq(other, a)
                        && !std::ptr::eq(other, b)
                        && other.tight & z == z
                });
                if !adjacent {
                    continue;
                }
                let coords: Vec<BigInt> = a
                    .coords
                    .iter()
                    .zip(&b.coords)
                    .map(|(ca, cb)| pa * cb - pb * ca)
                    .collect();
                next.push(Ray {
                    coords: normalize(coords),
                    tight: z | 1 << q,
                });
            }
        }
        rays = next;
    }

    // Rays y = (−b, a) become facets a·p ≤ b.
    let mut facets = Vec::with_capacity(rays.len());
    for ray in &rays {
        let rhs = to_i64(&-&ray.coords[0])?;
        let coeffs = ray.coords[1..]
            .iter()
            .map(to_i64)
            .collect::<Result<Vec<i64>>>()?;
        facets.push(BooleInequality {
            coeffs,
            rhs,
            pairs: pairs.to_vec(),
        });
    }
    facets.sort_by(|x, y| (&x.coeffs, x.rhs).cmp(&(&y.coeffs, y.rhs)));
    facets.dedup();
    Ok(facets)
}
