//! Seeded random characters with prescribed structure.
//!
//! Every generator draws a nonnegative combination of "units" (vectors of
//! irreducible multiplicities that already have the wanted property) until a
//! random count is reached or no unit fits in the remaining dimension budget.
//! The result is returned as a multiplicity vector in table order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::character::{Character, CharacterTable};

struct Unit {
    mult: Vec<u64>,
    dim: u64,
}

fn unit(table: &CharacterTable, entries: &[(usize, u64)]) -> Unit {
    let degrees = table.degrees();
    let mut mult = vec![0; table.len()];
    let mut dim = 0;
    for &(i, m) in entries {
        mult[i] += m;
        dim += m * degrees[i];
    }
    Unit { mult, dim }
}

fn sample(units: &[Unit], len: usize, rng: &mut ChaCha8Rng, budget: u64) -> Vec<u64> {
    let mut out = vec![0; len];
    let draws = rng.gen_range(0..=budget);
    let mut left = budget;
    for _ in 0..draws {
        let fitting: Vec<&Unit> = units.iter().filter(|u| u.dim <= left).collect();
        if fitting.is_empty() {
            break;
        }
        let u = fitting[rng.gen_range(0..fitting.len())];
        for (o, m) in out.iter_mut().zip(&u.mult) {
            *o += m;
        }
        left -= u.dim;
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn irreducible_units(table: &CharacterTable) -> Vec<Unit> {
    (0..table.len()).map(|i| unit(table, &[(i, 1)])).collect()
}

fn symplectic_units(table: &CharacterTable) -> Vec<Unit> {
    (0..table.len())
        .filter_map(|i| match table.indicator(i) {
            -1 => Some(unit(table, &[(i, 1)])),
            1 => Some(unit(table, &[(i, 2)])),
            _ => {
                let d = table.dual_index(i);
                (i < d).then(|| unit(table, &[(i, 1), (d, 1)]))
            }
        })
        .collect()
}

fn orbit_units(table: &CharacterTable) -> Vec<Unit> {
    table
        .galois_orbits()
        .iter()
        .map(|o| unit(table, &o.iter().map(|&i| (i, 1)).collect::<Vec<_>>()))
        .collect()
}

/// Orbit sums, doubled when the orbit sum alone carries no alternating form.
fn rational_symplectic_units(table: &CharacterTable) -> Vec<Unit> {
    table
        .galois_orbits()
        .iter()
        .map(|o| {
            // an orbit sum is real, so indicator-0 members come with their duals
            let needs_double = o.iter().any(|&i| table.indicator(i) == 1);
            let m = if needs_double { 2 } else { 1 };
            unit(table, &o.iter().map(|&i| (i, m)).collect::<Vec<_>>())
        })
        .collect()
}

/// Any character with `|chi| <= budget`.
pub fn gen_character_mults(table: &CharacterTable, seed: u64, budget: u64) -> Vec<u64> {
    sample(&irreducible_units(table), table.len(), &mut rng(seed), budget)
}

/// A symplectic character with `|chi| <= budget`.
pub fn gen_symplectic_mults(table: &CharacterTable, seed: u64, budget: u64) -> Vec<u64> {
    sample(&symplectic_units(table), table.len(), &mut rng(seed), budget)
}

/// A character with rational characteristic polynomials (a sum of full
/// Galois orbits) with `|chi| <= budget`.
pub fn gen_rational_mults(table: &CharacterTable, seed: u64, budget: u64) -> Vec<u64> {
    sample(&orbit_units(table), table.len(), &mut rng(seed), budget)
}

/// A character that is both symplectic and rational, with `|chi| <= budget`.
pub fn gen_rational_symplectic_mults(table: &CharacterTable, seed: u64, budget: u64) -> Vec<u64> {
    sample(&rational_symplectic_units(table), table.len(), &mut rng(seed), budget)
}

fn build(table: &CharacterTable, mult: &[u64]) -> Character {
    Character::from_multiplicities(table, mult).expect("generated vector has table length")
}

pub fn gen_character(table: &CharacterTable, seed: u64, budget: u64) -> Character {
    build(table, &gen_character_mults(table, seed, budget))
}

pub fn gen_symplectic(table: &CharacterTable, seed: u64, budget: u64) -> Character {
    build(table, &gen_symplectic_mults(table, seed, budget))
}

pub fn gen_rational(table: &CharacterTable, seed: u64, budget: u64) -> Character {
    build(table, &gen_rational_mults(table, seed, budget))
}

pub fn gen_rational_symplectic(table: &CharacterTable, seed: u64, budget: u64) -> Character {
    build(table, &gen_rational_symplectic_mults(table, seed, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{character_table, is_rational_charpoly, is_symplectic};
    use crate::group::{build_group, GroupSpec};
    use std::collections::BTreeSet;

    fn table(spec: GroupSpec) -> CharacterTable {
        character_table(&build_group(&spec).unwrap()).unwrap()
    }

    #[test]
    fn c2_sample_space() {
        let t = table(GroupSpec::Cyclic { n: 2 });
        let seen: BTreeSet<Vec<u64>> = (0..200).map(|s| gen_character_mults(&t, s, 2)).collect();
        let expected: BTreeSet<Vec<u64>> =
            [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2]].iter().map(|v| v.to_vec()).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn generators_meet_their_predicates() {
        let q8 = table(GroupSpec::Quaternion8);
        let h3 = table(GroupSpec::Heisenberg { p: 3 });
        let c4 = table(GroupSpec::Cyclic { n: 4 });
        for s in 0..40 {
            assert!(is_symplectic(&gen_symplectic(&q8, s, 8), &q8).unwrap());
            assert!(is_symplectic(&gen_symplectic(&c4, s, 8), &c4).unwrap());
            assert!(is_rational_charpoly(&gen_rational(&h3, s, 27)));
            let rs = gen_rational_symplectic(&h3, s, 27);
            assert!(is_rational_charpoly(&rs) && is_symplectic(&rs, &h3).unwrap());
            let rs = gen_rational_symplectic(&c4, s, 12);
            assert!(is_rational_charpoly(&rs) && is_symplectic(&rs, &c4).unwrap());
            assert!(gen_character(&h3, s, 10).dim() <= 10);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let t = table(GroupSpec::Dihedral { n: 4 });
        assert_eq!(gen_character_mults(&t, 7, 9), gen_character_mults(&t, 7, 9));
    }
}
