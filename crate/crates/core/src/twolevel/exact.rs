//! Exact two-level minimization: multi-output prime implicant generation
//! (tagged Quine-McCluskey merging) followed by branch-and-bound weighted
//! covering, minimizing total input literals with cube count as tie-break.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::truthtab::{RowValue, TruthSource};

use super::{mask, Cover, Cube, MinimizeStats, Provenance};

const EXACT_GUARD_BITS: u32 = 12;

/// Minimize `source` exactly: the returned cover has the minimum total
/// input-literal count over all sum-of-products covers of the multi-output
/// function, with don't-care rows free. Deterministic; ties are broken by
/// fewer cubes, then by the first solution found in canonical search order.
pub fn minimize_exact(source: &impl TruthSource) -> Result<(Cover, MinimizeStats)> {
    let n = source.num_inputs();
    let m = source.num_outputs();
    if n > EXACT_GUARD_BITS {
        return Err(Error::Capacity(format!(
            "{n} input bits exceed the {EXACT_GUARD_BITS}-bit exactness guard; use heuristic mode"
        )));
    }
    if m == 0 || m > 32 {
        return Err(Error::Parameter(format!("output count {m} out of range 1..=32")));
    }

    // Tag of a row: outputs for which the row is ON or DC.
    let rows = 1u64 << n;
    let full_tag = mask(m) as u32;
    let mut tags = vec![0u32; rows as usize];
    let mut on_elements: Vec<(u32, u64)> = Vec::new();
    for row in 0..rows {
        match source.row(row) {
            RowValue::DontCare => tags[row as usize] = full_tag,
            RowValue::Specified(out) => {
                let out = (out as u32) & full_tag;
                tags[row as usize] = out;
                for o in 0..m {
                    if out >> o & 1 == 1 {
                        on_elements.push((o, row));
                    }
                }
            }
        }
    }

    if on_elements.is_empty() {
        let cover = Cover::empty(n, m, Provenance::Exact);
        return Ok((cover, MinimizeStats { literals: 0, cubes: 0, iterations: 0, exact: true }));
    }

    let mut primes = multi_output_primes(n, &tags);
    // Canonical candidate order so that branch-and-bound tie-breaks are
    // reproducible.
    primes.sort_by_key(|p| Cube::new(n, m, p.care, p.value, p.tag).key());

    let problem = CoverProblem::build(n, &primes, &on_elements);
    let (chosen, nodes) = problem.solve();

    let cubes: Vec<Cube> = chosen
        .iter()
        .map(|&idx| {
            let p = &primes[idx];
            Cube::new(n, m, p.care, p.value, p.tag)
        })
        .collect();
    let cover = Cover::new(n, m, cubes, Provenance::Exact)?;
    let stats = MinimizeStats {
        literals: cover.literal_count(),
        cubes: cover.cube_count(),
        iterations: nodes,
        exact: true,
    };
    Ok((cover, stats))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Prime {
    pub care: u64,
    pub value: u64,
    /// Maximal output set: every row of the cube is ON or DC for each output
    /// in the tag.
    pub tag: u32,
}

/// Generate all multi-output prime implicants of the tagged function.
///
/// Cubes carry their maximal output tag. Two same-size cubes differing in
/// one fixed bit merge into the cube with that bit freed and the
/// intersection tag; a cube is checked off when a merge preserves its whole
/// tag. Unchecked cubes are exactly the multi-output primes.
pub(crate) fn multi_output_primes(n: u32, tags: &[u32]) -> Vec<Prime> {
    let full_care = mask(n);
    let mut current: HashMap<(u64, u64), (u32, bool)> = tags
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t != 0)
        .map(|(row, &t)| ((full_care, row as u64), (t, false)))
        .collect();
    let mut primes = Vec::new();

    while !current.is_empty() {
        let mut next: HashMap<(u64, u64), (u32, bool)> = HashMap::new();
        let keys: Vec<(u64, u64)> = current.keys().copied().collect();
        for &(care, value) in &keys {
            let tag = current[&(care, value)].0;
            for p in 0..n {
                let bit = 1u64 << p;
                if care & bit == 0 || value & bit != 0 {
                    continue;
                }
                let buddy_tag = match current.get(&(care, value | bit)) {
                    Some(&(t, _)) => t,
                    None => continue,
                };
                let merged = tag & buddy_tag;
                if merged == 0 {
                    continue;
                }
                if merged == tag {
                    current.get_mut(&(care, value)).unwrap().1 = true;
                }
                if merged == buddy_tag {
                    current.get_mut(&(care, value | bit)).unwrap().1 = true;
                }
                next.entry((care & !bit, value)).or_insert((merged, false));
            }
        }
        for ((care, value), (tag, checked)) in current {
            if !checked {
                primes.push(Prime { care, value, tag });
            }
        }
        current = next;
    }
    primes
}

type Words = Vec<u64>;

fn words_for(bits: usize) -> usize {
    (bits + 63) / 64
}

fn set_bit(w: &mut Words, i: usize) {
    w[i / 64] |= 1 << (i % 64);
}

fn get_bit(w: &Words, i: usize) -> bool {
    w[i / 64] >> (i % 64) & 1 == 1
}

fn is_subset(a: &Words, b: &Words) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x & !y == 0)
}

fn popcount(w: &Words) -> u32 {
    w.iter().map(|x| x.count_ones()).sum()
}

/// Weighted set-cover instance: elements are `(output, ON-minterm)` pairs,
/// candidates are primes, weights are input-literal counts.
struct CoverProblem {
    n_elems: usize,
    n_cands: usize,
    /// Per candidate: covered elements.
    cand_elems: Vec<Words>,
    /// Per element: covering candidates.
    elem_cands: Vec<Words>,
    weights: Vec<u32>,
    /// Original prime index of each candidate (primes covering no ON element
    /// are dropped before the search).
    prime_index: Vec<usize>,
}

struct SearchState {
    /// Elements not yet covered.
    uncovered: Words,
    /// Candidates still usable.
    available: Words,
    chosen: Vec<usize>,
    cost: u64,
}

struct Search<'a> {
    problem: &'a CoverProblem,
    best: Option<(u64, usize, Vec<usize>)>,
    nodes: u64,
}

impl CoverProblem {
    fn build(n: u32, primes: &[Prime], on_elements: &[(u32, u64)]) -> CoverProblem {
        let n_elems = on_elements.len();
        let mut cand_elems = Vec::new();
        let mut weights = Vec::new();
        let mut prime_index = Vec::new();
        for (p, prime) in primes.iter().enumerate() {
            let mut bits = vec![0u64; words_for(n_elems)];
            let mut any = false;
            for (i, &(o, row)) in on_elements.iter().enumerate() {
                if prime.tag >> o & 1 == 1 && (row ^ prime.value) & prime.care == 0 {
                    set_bit(&mut bits, i);
                    any = true;
                }
            }
            if any {
                cand_elems.push(bits);
                weights.push((prime.care & mask(n)).count_ones());
                prime_index.push(p);
            }
        }
        let n_cands = cand_elems.len();
        let mut elem_cands = vec![vec![0u64; words_for(n_cands)]; n_elems];
        for (c, bits) in cand_elems.iter().enumerate() {
            for (e, elem_bits) in elem_cands.iter_mut().enumerate() {
                if get_bit(bits, e) {
                    set_bit(elem_bits, c);
                }
            }
        }
        CoverProblem { n_elems, n_cands, cand_elems, elem_cands, weights, prime_index }
    }

    fn solve(&self) -> (Vec<usize>, u64) {
        let mut search = Search { problem: self, best: None, nodes: 0 };
        let state = SearchState {
            uncovered: {
                let mut w = vec![0u64; words_for(self.n_elems)];
                for i in 0..self.n_elems {
                    set_bit(&mut w, i);
                }
                w
            },
            available: {
                let mut w = vec![0u64; words_for(self.n_cands)];
                for i in 0..self.n_cands {
                    set_bit(&mut w, i);
                }
                w
            },
            chosen: Vec::new(),
            cost: 0,
        };
        search.explore(state);
        let (_, _, chosen) = search.best.expect("every ON element has a covering prime");
        (chosen.iter().map(|&c| self.prime_index[c]).collect(), search.nodes)
    }
}

impl Search<'_> {
    fn explore(&mut self, mut state: SearchState) {
        self.nodes += 1;
        if !self.reduce(&mut state) {
            return;
        }
        if popcount(&state.uncovered) == 0 {
            let candidate = (state.cost, state.chosen.len(), {
                let mut c = state.chosen.clone();
                c.sort_unstable();
                c
            });
            let better = match &self.best {
                None => true,
                Some((cost, cubes, _)) => {
                    (candidate.0, candidate.1) < (*cost, *cubes)
                }
            };
            if better {
                self.best = Some(candidate);
            }
            return;
        }

        // Branch on the uncovered element with the fewest usable candidates.
        let mut branch_elem = None;
        let mut branch_count = usize::MAX;
        for e in 0..self.problem.n_elems {
            if !get_bit(&state.uncovered, e) {
                continue;
            }
            let count = self.problem.elem_cands[e]
                .iter()
                .zip(&state.available)
                .map(|(&x, &y)| (x & y).count_ones() as usize)
                .sum();
            if count < branch_count {
                branch_count = count;
                branch_elem = Some(e);
            }
        }
        let elem = match branch_elem {
            Some(e) => e,
            None => return,
        };
        let mut options: Vec<usize> = (0..self.problem.n_cands)
            .filter(|&c| {
                get_bit(&state.available, c) && get_bit(&self.problem.cand_elems[c], elem)
            })
            .collect();
        options.sort_by_key(|&c| (self.problem.weights[c], c));
        for c in options {
            let mut next = SearchState {
                uncovered: state.uncovered.clone(),
                available: state.available.clone(),
                chosen: state.chosen.clone(),
                cost: state.cost,
            };
            self.take(&mut next, c);
            self.explore(next);
        }
    }

    /// Take candidate `c` into the partial solution.
    fn take(&self, state: &mut SearchState, c: usize) {
        state.chosen.push(c);
        state.cost += u64::from(self.problem.weights[c]);
        for (u, &covered) in state.uncovered.iter_mut().zip(&self.problem.cand_elems[c]) {
            *u &= !covered;
        }
        state.available[c / 64] &= !(1 << (c % 64));
    }

    /// Apply essential-candidate and dominance reductions until fixpoint.
    /// Returns false when the branch cannot beat the current best.
    fn reduce(&self, state: &mut SearchState) -> bool {
        loop {
            if let Some((best_cost, best_cubes, _)) = &self.best {
                // Lexicographic objective (literals, cubes): prune when the
                // bound cannot beat the incumbent; equal solutions keep the
                // first found in canonical search order.
                let (lb_w, lb_c) = self.lower_bound(state);
                if (state.cost + lb_w, state.chosen.len() + lb_c) >= (*best_cost, *best_cubes) {
                    return false;
                }
            }

            let mut changed = false;

            // Essential candidates: an uncovered element with one usable
            // candidate forces that candidate.
            let mut forced = Vec::new();
            for e in 0..self.problem.n_elems {
                if !get_bit(&state.uncovered, e) {
                    continue;
                }
                let mut only = None;
                let mut count = 0;
                for (w, (&ec, &av)) in
                    self.problem.elem_cands[e].iter().zip(&state.available).enumerate()
                {
                    let mut bits = ec & av;
                    while bits != 0 {
                        let c = w * 64 + bits.trailing_zeros() as usize;
                        count += 1;
                        only = Some(c);
                        bits &= bits - 1;
                        if count > 1 {
                            break;
                        }
                    }
                    if count > 1 {
                        break;
                    }
                }
                match count {
                    0 => return false,
                    1 => forced.push(only.unwrap()),
                    _ => {}
                }
            }
            forced.sort_unstable();
            forced.dedup();
            for c in forced {
                if get_bit(&state.available, c) {
                    self.take(state, c);
                    changed = true;
                }
            }

            if popcount(&state.uncovered) == 0 {
                return true;
            }

            if !changed {
                changed |= self.column_dominance(state);
            }
            if !changed {
                return true;
            }
        }
    }

    /// Drop candidates whose uncovered coverage is contained in a no-heavier
    /// candidate's coverage.
    fn column_dominance(&self, state: &mut SearchState) -> bool {
        let active: Vec<usize> = (0..self.problem.n_cands)
            .filter(|&c| get_bit(&state.available, c))
            .collect();
        if active.len() > 2048 {
            return false;
        }
        let masked: Vec<Words> = active
            .iter()
            .map(|&c| {
                self.problem.cand_elems[c]
                    .iter()
                    .zip(&state.uncovered)
                    .map(|(&x, &y)| x & y)
                    .collect()
            })
            .collect();
        let mut removed = false;
        for (i, &ci) in active.iter().enumerate() {
            if !get_bit(&state.available, ci) {
                continue;
            }
            if popcount(&masked[i]) == 0 {
                state.available[ci / 64] &= !(1 << (ci % 64));
                removed = true;
                continue;
            }
            for (j, &cj) in active.iter().enumerate() {
                if i == j || !get_bit(&state.available, cj) {
                    continue;
                }
                let dominates = is_subset(&masked[i], &masked[j])
                    && (self.problem.weights[cj] < self.problem.weights[ci]
                        || (self.problem.weights[cj] == self.problem.weights[ci] && cj < ci));
                if dominates {
                    state.available[ci / 64] &= !(1 << (ci % 64));
                    removed = true;
                    break;
                }
            }
        }
        removed
    }

    /// Admissible lower bound: a greedy independent set of uncovered
    /// elements; no candidate covers two independent elements, so each needs
    /// its own candidate of at least the element's cheapest weight.
    fn lower_bound(&self, state: &SearchState) -> (u64, usize) {
        let mut blocked = vec![0u64; words_for(self.problem.n_cands)];
        let mut lb_weight = 0u64;
        let mut lb_cubes = 0usize;
        for e in 0..self.problem.n_elems {
            if !get_bit(&state.uncovered, e) {
                continue;
            }
            let cands = &self.problem.elem_cands[e];
            let independent = cands
                .iter()
                .zip(&blocked)
                .all(|(&x, &b)| x & b == 0);
            if !independent {
                continue;
            }
            let mut min_w = u32::MAX;
            for (w, (&ec, &av)) in cands.iter().zip(&state.available).enumerate() {
                let mut bits = ec & av;
                while bits != 0 {
                    let c = w * 64 + bits.trailing_zeros() as usize;
                    min_w = min_w.min(self.problem.weights[c]);
                    bits &= bits - 1;
                }
            }
            if min_w == u32::MAX {
                continue;
            }
            lb_weight += u64::from(min_w);
            lb_cubes += 1;
            for (b, &x) in blocked.iter_mut().zip(cands) {
                *b |= x;
            }
        }
        (lb_weight, lb_cubes)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::table_from_str;
    use super::super::{verify_cover, Cover, Provenance};
    use super::*;
    use crate::truthtab::DenseTable;

    #[test]
    fn and_gate_minimizes_to_one_cube() {
        let table = table_from_str(2, 1, &["0", "0", "0", "1"]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(stats.literals, 2);
        assert_eq!(stats.cubes, 1);
        assert!(stats.exact);
        assert_eq!(cover.cubes()[0].to_string(), "11 1");
        assert!(verify_cover(&cover, &table).unwrap().ok);
    }

    #[test]
    fn all_dc_table_gives_empty_cover() {
        let table = table_from_str(3, 2, &["d"; 8]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(cover.cube_count(), 0);
        assert_eq!(stats.literals, 0);
    }

    #[test]
    fn xor_needs_two_cubes() {
        let table = table_from_str(2, 1, &["0", "1", "1", "0"]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(stats.cubes, 2);
        assert_eq!(stats.literals, 4);
        assert!(verify_cover(&cover, &table).unwrap().ok);
    }

    #[test]
    fn dc_allows_single_literal() {
        // f = 1 on rows 10,11 and DC on 01: the cube "1-" suffices.
        let table = table_from_str(2, 1, &["0", "d", "1", "1"]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(stats.literals, 1);
        assert_eq!(cover.cubes()[0].to_string(), "1- 1");
    }

    #[test]
    fn guard_rejects_large_tables() {
        let rows = vec![RowValue::Specified(0); 1 << 13];
        let table = DenseTable::new(13, 1, rows).unwrap();
        assert!(matches!(
            minimize_exact(&table),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn shared_cube_serves_two_outputs() {
        // Both outputs are the AND function; one cube with both outputs set
        // is optimal at 2 literals.
        let table = table_from_str(2, 2, &["00", "00", "00", "11"]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(stats.cubes, 1);
        assert_eq!(stats.literals, 2);
        assert_eq!(cover.cubes()[0].output_mask(), 0b11);
    }

    #[test]
    fn deterministic_across_runs() {
        let table = table_from_str(3, 2, &["00", "01", "10", "d", "11", "00", "d", "01"]);
        let (c1, s1) = minimize_exact(&table).unwrap();
        let (c2, s2) = minimize_exact(&table).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn exact_beats_canonical_on_redundant_function() {
        let table = table_from_str(3, 1, &["1", "1", "1", "1", "0", "0", "0", "0"]);
        let (cover, stats) = minimize_exact(&table).unwrap();
        assert_eq!(stats.literals, 1);
        assert_eq!(cover.cubes()[0].to_string(), "0-- 1");
    }
}
