//! Heuristic two-level minimization: an expand / irredundant / reduce loop
//! over the canonical minterm cover, blocking against the enumerated OFF-set
//! of each output.

use crate::error::{Error, Result};
use crate::truthtab::{RowValue, TruthSource};

use super::{for_each_cube_row, mask, Cover, Cube, FunctionSets, MinimizeStats, Provenance};

const HEURISTIC_GUARD_BITS: u32 = 20;

/// Working cube: packed input part plus output participation.
#[derive(Debug, Clone, Copy)]
struct WorkCube {
    care: u64,
    value: u64,
    outputs: u32,
}

/// Minimize `source` heuristically. The result is a verified-coverable SOP
/// whose literal count never exceeds the canonical minterm cover's; the loop
/// runs EXPAND -> IRREDUNDANT -> REDUCE until no improvement or `max_iters`.
/// Deterministic for a given input.
pub fn minimize_heuristic(
    source: &impl TruthSource,
    max_iters: u64,
) -> Result<(Cover, MinimizeStats)> {
    let n = source.num_inputs();
    let m = source.num_outputs();
    if n > HEURISTIC_GUARD_BITS {
        return Err(Error::Capacity(format!(
            "{n} input bits exceed the {HEURISTIC_GUARD_BITS}-bit heuristic guard"
        )));
    }
    if m == 0 || m > 32 {
        return Err(Error::Parameter(format!("output count {m} out of range 1..=32")));
    }

    let sets = FunctionSets::build(source);

    // Canonical minterm cover of the ON rows.
    let full_care = mask(n);
    let out_mask = mask(m) as u32;
    let mut cubes: Vec<WorkCube> = Vec::new();
    for row in 0..(1u64 << n) {
        if let RowValue::Specified(out) = source.row(row) {
            let out = (out as u32) & out_mask;
            if out != 0 {
                cubes.push(WorkCube { care: full_care, value: row, outputs: out });
            }
        }
    }
    if cubes.is_empty() {
        let cover = Cover::empty(n, m, Provenance::Heuristic);
        return Ok((cover, MinimizeStats { literals: 0, cubes: 0, iterations: 0, exact: false }));
    }

    let mut best = cubes.clone();
    let mut best_literals = literal_total(&cubes, n);
    let mut iterations = 0u64;

    while iterations < max_iters {
        iterations += 1;
        expand(&mut cubes, &sets);
        irredundant(&mut cubes, &sets);
        let literals = literal_total(&cubes, n);
        if literals < best_literals {
            best_literals = literals;
            best = cubes.clone();
        } else {
            break;
        }
        reduce(&mut cubes, &sets);
    }

    let cover = Cover::new(
        n,
        m,
        best.iter().map(|c| Cube::new(n, m, c.care, c.value, c.outputs)).collect(),
        Provenance::Heuristic,
    )?;
    let stats = MinimizeStats {
        literals: cover.literal_count(),
        cubes: cover.cube_count(),
        iterations,
        exact: false,
    };
    Ok((cover, stats))
}

fn literal_total(cubes: &[WorkCube], n: u32) -> u64 {
    cubes.iter().map(|c| u64::from((c.care & mask(n)).count_ones())).sum()
}

/// Fixed processing order: widest cubes (fewest literals, most minterms)
/// first, then a total key for deterministic tie-breaks.
fn sort_for_pass(cubes: &mut [WorkCube], n: u32) {
    cubes.sort_by_key(|c| ((c.care & mask(n)).count_ones(), c.value, c.care, c.outputs));
}

/// EXPAND: raise input positions in ascending bit index wherever the raised
/// cube still avoids the OFF-set of every driven output, then raise outputs,
/// then drop cubes the expanded cube covers.
fn expand(cubes: &mut Vec<WorkCube>, sets: &FunctionSets) {
    sort_for_pass(cubes, sets.n);
    let mut alive: Vec<bool> = vec![true; cubes.len()];
    for i in 0..cubes.len() {
        if !alive[i] {
            continue;
        }
        let mut cube = cubes[i];
        for p in 0..sets.n {
            let bit = 1u64 << p;
            if cube.care & bit == 0 {
                continue;
            }
            let care = cube.care & !bit;
            let value = cube.value & !bit;
            let blocked = (0..sets.m)
                .filter(|&o| cube.outputs >> o & 1 == 1)
                .any(|o| sets.cube_hits_off(care, value, o));
            if !blocked {
                cube.care = care;
                cube.value = value;
            }
        }
        for o in 0..sets.m {
            if cube.outputs >> o & 1 == 0 && !sets.cube_hits_off(cube.care, cube.value, o) {
                cube.outputs |= 1 << o;
            }
        }
        cubes[i] = cube;
        for (j, other) in cubes.iter().enumerate() {
            if j != i
                && alive[j]
                && cube.care & !other.care == 0
                && (cube.value ^ other.value) & cube.care == 0
                && other.outputs & !cube.outputs == 0
            {
                alive[j] = false;
            }
        }
    }
    let mut kept = Vec::with_capacity(cubes.len());
    for (i, cube) in cubes.iter().enumerate() {
        if alive[i] {
            kept.push(*cube);
        }
    }
    *cubes = kept;
}

/// Per-(output, row) cover multiplicities for the ON elements.
struct CoverCounts {
    counts: Vec<Vec<u16>>,
}

impl CoverCounts {
    fn build(cubes: &[WorkCube], sets: &FunctionSets) -> CoverCounts {
        let rows = 1usize << sets.n;
        let mut counts = vec![vec![0u16; rows]; sets.m as usize];
        for cube in cubes {
            for o in 0..sets.m {
                if cube.outputs >> o & 1 == 1 {
                    for &row in &sets.on[o as usize] {
                        if (row ^ cube.value) & cube.care == 0 {
                            counts[o as usize][row as usize] =
                                counts[o as usize][row as usize].saturating_add(1);
                        }
                    }
                }
            }
        }
        CoverCounts { counts }
    }

    fn remove(&mut self, cube: &WorkCube, sets: &FunctionSets) {
        for o in 0..sets.m {
            if cube.outputs >> o & 1 == 1 {
                for &row in &sets.on[o as usize] {
                    if (row ^ cube.value) & cube.care == 0 {
                        self.counts[o as usize][row as usize] -= 1;
                    }
                }
            }
        }
    }
}

/// IRREDUNDANT: greedily drop cubes whose every ON element is covered at
/// least twice, narrowest cubes first.
fn irredundant(cubes: &mut Vec<WorkCube>, sets: &FunctionSets) {
    sort_for_pass(cubes, sets.n);
    let mut counts = CoverCounts::build(cubes, sets);
    let mut kept: Vec<WorkCube> = Vec::with_capacity(cubes.len());
    // Visit narrowest (most literals) first so wide cubes absorb them.
    for i in (0..cubes.len()).rev() {
        let cube = cubes[i];
        let mut removable = true;
        'outer: for o in 0..sets.m {
            if cube.outputs >> o & 1 == 0 {
                continue;
            }
            for &row in &sets.on[o as usize] {
                if (row ^ cube.value) & cube.care == 0
                    && counts.counts[o as usize][row as usize] < 2
                {
                    removable = false;
                    break 'outer;
                }
            }
        }
        if removable {
            counts.remove(&cube, sets);
        } else {
            kept.push(cube);
        }
    }
    kept.reverse();
    *cubes = kept;
}

/// REDUCE: shrink each cube to the supercube of the ON elements only it
/// covers, freeing room for the next EXPAND; cubes with no unique element
/// are dropped.
fn reduce(cubes: &mut Vec<WorkCube>, sets: &FunctionSets) {
    sort_for_pass(cubes, sets.n);
    let mut counts = CoverCounts::build(cubes, sets);
    let mut kept: Vec<WorkCube> = Vec::with_capacity(cubes.len());
    for i in 0..cubes.len() {
        let cube = cubes[i];
        let mut first: Option<u64> = None;
        let mut diff = 0u64;
        for o in 0..sets.m {
            if cube.outputs >> o & 1 == 0 {
                continue;
            }
            for &row in &sets.on[o as usize] {
                if (row ^ cube.value) & cube.care == 0
                    && counts.counts[o as usize][row as usize] == 1
                {
                    match first {
                        None => first = Some(row),
                        Some(f) => diff |= f ^ row,
                    }
                }
            }
        }
        match first {
            None => counts.remove(&cube, sets),
            Some(f) => {
                let care = mask(sets.n) & !diff;
                let reduced = WorkCube { care, value: f & care, outputs: cube.outputs };
                if reduced.care != cube.care {
                    counts.remove(&cube, sets);
                    // Re-add the reduced cube's contribution.
                    for o in 0..sets.m {
                        if reduced.outputs >> o & 1 == 1 {
                            for &row in &sets.on[o as usize] {
                                if (row ^ reduced.value) & reduced.care == 0 {
                                    counts.counts[o as usize][row as usize] += 1;
                                }
                            }
                        }
                    }
                }
                kept.push(reduced);
            }
        }
    }
    *cubes = kept;
}
