//! Topological entropy lower bounds and estimates.
//!
//! Lower bounds come from covering ("horseshoe") matrices: if a family of
//! subcontinua with pairwise disjoint interiors satisfies `M[i][j] = 1` when
//! the `m`-step image of member `i` contains member `j`, then the entropy of
//! the map is at least `log(spectral radius of M) / m`. Certified bounds use
//! exact integer matrix powers: both the minimal row sum and the maximal
//! diagonal entry of `M^n` grow supermultiplicatively, so
//! `ln(S) / (n * m)` is a valid lower bound for every computed power.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::num::{ln_bigint, Q};
use crate::plmap::PlMap;
use crate::subset::Subcontinuum;

use super::{markov_partition_of, CoveringMatrix};

/// A certified entropy lower bound `ln(witness_value) / witness_steps`,
/// with the float value precomputed for reporting.
#[derive(Clone, Debug)]
pub struct EntropyBound {
    pub nats: f64,
    /// Exact witness: entropy >= ln(witness_value) / witness_steps.
    pub witness_value: BigUint,
    pub witness_steps: u64,
    pub dim: usize,
}

impl EntropyBound {
    pub fn zero(dim: usize) -> EntropyBound {
        EntropyBound {
            nats: 0.0,
            witness_value: BigUint::one(),
            witness_steps: 1,
            dim,
        }
    }

    /// Exact test `ln(witness)/steps >= ln(num)/den`, i.e.
    /// `witness^den >= num^steps`, in integer arithmetic. Strict version.
    pub fn exceeds_strictly(&self, num: u64, den: u32) -> bool {
        let lhs = self.witness_value.pow(den);
        let rhs = BigUint::from(num).pow(
            u32::try_from(self.witness_steps).expect("step counts stay small"),
        );
        lhs > rhs
    }

    pub fn describe(&self) -> String {
        let mut s = String::from("ln(");
        s.push_str(&self.witness_value.to_string());
        s.push_str(")/");
        s.push_str(&self.witness_steps.to_string());
        s.push_str(" = ");
        super::push_f64(&mut s, self.nats);
        s
    }
}

/// Best growth bound from integer powers of a count matrix, doubling the
/// exponent `doublings` times. `map_steps` is how many applications of the
/// map one matrix step represents.
pub fn growth_bound(counts: &[Vec<u64>], map_steps: u32, doublings: u32) -> EntropyBound {
    let n = counts.len();
    if n == 0 {
        return EntropyBound::zero(0);
    }
    let mut mat: Vec<Vec<BigUint>> = counts
        .iter()
        .map(|row| row.iter().map(|&v| BigUint::from(v)).collect())
        .collect();
    let mut steps: u64 = 1;
    let mut best = EntropyBound::zero(n);
    let mut consider = |m: &Vec<Vec<BigUint>>, steps: u64, best: &mut EntropyBound| {
        let total_steps = steps * map_steps as u64;
        for witness in [min_row_sum(m), max_diag(m)] {
            if witness > BigUint::one() {
                let nats = ln_bigint(&witness.clone().into()) / total_steps as f64;
                if nats > best.nats {
                    *best = EntropyBound {
                        nats,
                        witness_value: witness,
                        witness_steps: total_steps,
                        dim: n,
                    };
                }
            }
        }
    };
    consider(&mat, steps, &mut best);
    for _ in 0..doublings {
        mat = mat_mul(&mat, &mat);
        steps *= 2;
        consider(&mat, steps, &mut best);
        if entries_too_big(&mat) {
            break;
        }
    }
    best
}

fn entries_too_big(m: &[Vec<BigUint>]) -> bool {
    m.iter()
        .flat_map(|r| r.iter())
        .any(|v| v.bits() > 4096)
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let p = b[0].len();
    let mut out = vec![vec![BigUint::zero(); p]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..p {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

fn min_row_sum(m: &[Vec<BigUint>]) -> BigUint {
    m.iter()
        .map(|row| row.iter().fold(BigUint::zero(), |a, b| a + b))
        .min()
        .unwrap_or_else(BigUint::zero)
}

fn max_diag(m: &[Vec<BigUint>]) -> BigUint {
    (0..m.len())
        .map(|i| m[i][i].clone())
        .max()
        .unwrap_or_else(BigUint::zero)
}

/// Entropy lower bound from the covering matrix of `m` over the given
/// interior-disjoint family, using `map_steps` map applications per matrix
/// step.
pub fn entropy_covering_bound(
    m: &PlMap,
    cells: &[Subcontinuum],
    map_steps: u32,
    doublings: u32,
) -> EntropyBound {
    let mat = CoveringMatrix::build(m, cells, map_steps);
    let counts: Vec<Vec<u64>> = mat
        .entries
        .iter()
        .map(|r| r.iter().map(|&v| u64::from(v)).collect())
        .collect();
    growth_bound(&counts, map_steps, doublings)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NonMarkov;

/// Entropy lower bound via the saturated Markov partition of the map.
pub fn entropy_markov_lower_bound(
    m: &PlMap,
    markov_depth: u32,
    doublings: u32,
) -> Result<EntropyBound, NonMarkov> {
    let mp = markov_partition_of(m, markov_depth);
    if !mp.markov {
        return Err(NonMarkov);
    }
    Ok(entropy_covering_bound(m, &mp.cells, 1, doublings))
}

/// Greedy `(n, eps)`-separated cardinality estimate on a deterministic grid.
///
/// Reports the best growth slope `(ln s(k, eps) - ln s(0, eps)) / k` over
/// `k = 1, 2, 4, ..., n_max`, which converges to `(1/n) ln s(n, eps)` for
/// expanding maps while correctly reporting zero for maps whose separated
/// sets do not grow. A documented heuristic, not a certificate; distances
/// are evaluated in floating point.
pub fn entropy_separated_estimate(m: &PlMap, eps: &Q, n_max: u32, grid_denom: u32) -> f64 {
    let g = m.domain();
    let eps_f = crate::num::to_f64(eps);
    // Float vertex distance table.
    let nv = g.vertex_count() as usize;
    let mut vdist = vec![vec![0.0f64; nv]; nv];
    for a in 0..nv {
        for b in 0..nv {
            vdist[a][b] = crate::num::to_f64(g.vdist(
                crate::graph::VertexId(a as u32),
                crate::graph::VertexId(b as u32),
            ));
        }
    }
    let lens: Vec<f64> = g.edges().iter().map(|e| crate::num::to_f64(&e.length)).collect();
    let ends: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (e.from.0 as usize, e.to.0 as usize))
        .collect();
    let dist = |p: (u32, f64), q: (u32, f64)| -> f64 {
        let (e1, t1) = p;
        let (e2, t2) = q;
        let (l1, l2) = (lens[e1 as usize], lens[e2 as usize]);
        let (f1, o1) = ends[e1 as usize];
        let (f2, o2) = ends[e2 as usize];
        let mut best = f64::INFINITY;
        for (d1, v1) in [(t1 * l1, f1), ((1.0 - t1) * l1, o1)] {
            for (d2, v2) in [(t2 * l2, f2), ((1.0 - t2) * l2, o2)] {
                let c = d1 + vdist[v1][v2] + d2;
                if c < best {
                    best = c;
                }
            }
        }
        if e1 == e2 {
            let c = (t1 - t2).abs() * l1;
            if c < best {
                best = c;
            }
        }
        best
    };

    // Deterministic grid and exact orbits, then float comparisons.
    let mut orbits: Vec<Vec<(u32, f64)>> = Vec::new();
    for e in g.edge_ids() {
        for k in 0..=grid_denom {
            let t = Q::new(k.into(), grid_denom.into());
            let mut p = crate::graph::PointRef::new(e, t);
            let mut orbit = Vec::with_capacity(n_max as usize + 1);
            for _ in 0..=n_max {
                orbit.push((p.edge.0, crate::num::to_f64(&p.t)));
                p = m.evaluate(&p);
            }
            orbits.push(orbit);
        }
    }
    let greedy = |steps: usize| -> usize {
        let mut kept: Vec<usize> = Vec::new();
        'cand: for c in 0..orbits.len() {
            for &k in kept.iter().rev() {
                let mut separated = false;
                for i in 0..=steps {
                    if dist(orbits[c][i], orbits[k][i]) >= eps_f {
                        separated = true;
                        break;
                    }
                }
                if !separated {
                    continue 'cand;
                }
            }
            kept.push(c);
        }
        kept.len().max(1)
    };
    let base = libm::log(greedy(0) as f64);
    let mut best = 0.0f64;
    let mut k = 1u32;
    while k <= n_max {
        let slope = (libm::log(greedy(k as usize) as f64) - base) / k as f64;
        if slope > best {
            best = slope;
        }
        if k == n_max {
            break;
        }
        k = (k * 2).min(n_max);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qr;
    use crate::plmap::tests::{tent, unit};
    use crate::plmap::PlMap;

    #[test]
    fn full_shift_matrices() {
        // M = [[1,1],[1,1]] -> log 2; 3x3 all-ones -> log 3.
        let m2 = vec![vec![1u64, 1], vec![1, 1]];
        let b = growth_bound(&m2, 1, 6);
        assert!((b.nats - libm::log(2.0)).abs() < 1e-9);
        assert!(b.exceeds_strictly(3, 2)); // log 2 > log(3)/2
        assert!(!b.exceeds_strictly(2, 1)); // not strictly above log 2
        let m3 = vec![vec![1u64; 3]; 3];
        let b = growth_bound(&m3, 1, 6);
        assert!((b.nats - libm::log(3.0)).abs() < 1e-9);
        assert!(b.exceeds_strictly(3, 2)); // log 3 > log(3)/2
    }

    #[test]
    fn tent_markov_bound_is_log_two() {
        let g = unit();
        let t = tent(&g);
        let b = entropy_markov_lower_bound(&t, 8, 6).unwrap();
        assert!((b.nats - libm::log(2.0)).abs() < 1e-9);
    }

    #[test]
    fn refinement_does_not_lose_entropy() {
        let g = unit();
        let t = tent(&g);
        // Partition into 4 cells refines the Markov one; bound stays log 2.
        let cells = super::super::resolution_cells(&g, &qr(1, 3));
        let b = entropy_covering_bound(&t, &cells, 1, 6);
        assert!(b.nats >= libm::log(2.0) - 1e-9);
        let coarse = entropy_markov_lower_bound(&t, 8, 6).unwrap();
        assert!(coarse.nats <= b.nats + 1e-9);
    }

    #[test]
    fn identity_estimate_is_zero() {
        let g = unit();
        let id = PlMap::identity(g.clone());
        let est = entropy_separated_estimate(&id, &qr(1, 100), 8, 256);
        assert_eq!(est, 0.0);
    }

    #[test]
    fn tent_estimate_near_log_two() {
        let g = unit();
        let t = tent(&g);
        let est = entropy_separated_estimate(&t, &qr(1, 100), 16, 1 << 14);
        assert!(
            (est - libm::log(2.0)).abs() < 0.1,
            "estimate {} vs ln 2",
            est
        );
    }
}
