//! Influential coalitions via the rounding test on q' chi.
//!
//! Under strictly obedient voting candidate R wins a profile when the mass
//! of voters recommended R exceeds 1/2. Attracting a coalition C turns its
//! rows into ones; C is influential iff this flips some column's majority.

use crate::error::{Error, Result};

use super::configuration::NewsConfiguration;

/// Coalitions are bitmasks over rows (bit i = type k = i - K).
pub type Coalition = u32;

/// Largest type count accepted by exhaustive enumeration.
pub const MAX_TYPES: usize = 15;
/// Column masses this close to 1/2 are treated as ties.
pub const HALF_TIE_TOL: f64 = 1e-12;

fn majority(mass: f64, column: usize) -> Result<bool> {
    if (mass - 0.5).abs() <= HALF_TIE_TOL {
        return Err(Error::HalfTie { column, mass });
    }
    Ok(mass > 0.5)
}

fn check_dims(chi: &NewsConfiguration, q: &[f64]) -> Result<()> {
    if q.len() != chi.n_rows() {
        return Err(Error::Dimension(format!("{} populations for {} rows", q.len(), chi.n_rows())));
    }
    if chi.n_rows() > MAX_TYPES {
        return Err(Error::SizeGuard {
            types: chi.n_rows(),
            limit: MAX_TYPES,
        });
    }
    Ok(())
}

/// R-vote mass of each column when the rows in `c` vote R regardless.
fn masses(chi: &NewsConfiguration, q: &[f64], c: Coalition) -> Vec<f64> {
    chi.columns()
        .iter()
        .map(|&col| {
            let votes = col | c;
            (0..chi.n_rows()).filter(|&i| (votes >> i) & 1 == 1).map(|i| q[i]).sum()
        })
        .collect()
}

/// round(q' chi_C) != round(q' chi).
pub fn is_influential(chi: &NewsConfiguration, q: &[f64], c: Coalition) -> Result<bool> {
    check_dims(chi, q)?;
    let base = masses(chi, q, 0);
    let with = masses(chi, q, c);
    let mut flips = false;
    for (m, (b, w)) in base.iter().zip(&with).enumerate() {
        if majority(*b, m)? != majority(*w, m)? {
            flips = true;
        }
    }
    Ok(flips)
}

/// Influence of every coalition, indexed by bitmask.
pub fn influence_table(chi: &NewsConfiguration, q: &[f64]) -> Result<Vec<bool>> {
    check_dims(chi, q)?;
    let n = chi.n_rows();
    let base: Vec<bool> = masses(chi, q, 0)
        .into_iter()
        .enumerate()
        .map(|(m, x)| majority(x, m))
        .collect::<Result<_>>()?;
    (0..1u32 << n)
        .map(|c| {
            let with = masses(chi, q, c);
            let mut flips = false;
            for (m, w) in with.into_iter().enumerate() {
                if majority(w, m)? != base[m] {
                    flips = true;
                }
            }
            Ok(flips)
        })
        .collect()
}

/// Inclusion-minimal influential coalitions in increasing bitmask order.
pub fn minimal_from_table(table: &[bool]) -> Vec<Coalition> {
    (1..table.len() as u32)
        .filter(|&c| {
            table[c as usize] && (0..32).filter(|i| (c >> i) & 1 == 1).all(|i| !table[(c & !(1 << i)) as usize])
        })
        .collect()
}

pub fn enumerate_influential(chi: &NewsConfiguration, q: &[f64]) -> Result<Vec<Coalition>> {
    Ok(minimal_from_table(&influence_table(chi, q)?))
}

/// Types in a coalition, ascending.
pub fn members(c: Coalition, k_max: usize) -> Vec<i32> {
    (0..2 * k_max + 1)
        .filter(|i| (c >> i) & 1 == 1)
        .map(|i| i as i32 - k_max as i32)
        .collect()
}

pub fn coalition_of(types: &[i32], k_max: usize) -> Coalition {
    types.iter().fold(0, |acc, &k| acc | 1 << (k + k_max as i32))
}

/// Majority coalitions: population strictly above 1/2.
pub fn is_majority(c: Coalition, q: &[f64]) -> bool {
    (0..q.len()).filter(|i| (c >> i) & 1 == 1).map(|i| q[i]).sum::<f64>() > 0.5
}
