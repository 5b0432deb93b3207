//! Discretization of the belief simplex.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BeliefAtom, Hyperplane, PayoffSpec, Prior, Side};

/// Resolution controls for [`BeliefGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Lattice denominator: beliefs with coordinates in `{0, 1/R, …, 1}`.
    pub lattice: usize,
    /// Extra denominator applied on the simplex edges only (0 disables).
    pub edge: usize,
}

impl GridOptions {
    pub fn default_lattice(n: usize) -> usize {
        match n {
            0 | 1 => 1,
            2 => 400,
            3 => 60,
            4 => 20,
            5 => 10,
            _ => 6,
        }
    }

    pub fn for_dim(n: usize) -> Self {
        Self {
            lattice: Self::default_lattice(n),
            edge: 0,
        }
    }

    /// Defaults for a payoff. Smooth payoffs get a fine edge refinement
    /// because pairwise pooling optima sit on simplex edges.
    pub fn for_payoff(w: &PayoffSpec) -> Self {
        let n = w.belief_dim();
        let mut opts = Self::for_dim(n);
        if w.is_linear() {
            opts.edge = 2000;
        }
        opts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefGrid {
    atoms: Vec<BeliefAtom>,
    resolution: f64,
}

fn key(belief: &[f64], side: Side) -> (Vec<i64>, Side) {
    (belief.iter().map(|x| (x * 1e11).round() as i64).collect(), side)
}

struct Builder<'a> {
    atoms: Vec<BeliefAtom>,
    seen: HashSet<(Vec<i64>, Side)>,
    hyperplanes: &'a [Hyperplane],
}

impl Builder<'_> {
    fn push_one(&mut self, belief: &[f64], side: Side) {
        if self.seen.insert(key(belief, side)) {
            self.atoms.push(BeliefAtom::raw(belief.to_vec(), side));
        }
    }

    /// Adds the belief, split into both one-sided atoms if it lies on a
    /// breakpoint hyperplane.
    fn push(&mut self, belief: Vec<f64>) {
        if self.hyperplanes.iter().any(|h| h.contains(&belief)) {
            self.push_one(&belief, Side::Lower);
            self.push_one(&belief, Side::Upper);
        } else {
            self.push_one(&belief, Side::Exact);
        }
    }
}

fn compositions(n: usize, total: usize, prefix: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if prefix.len() + 1 == n {
        let used: usize = prefix.iter().sum();
        prefix.push(total - used);
        out(prefix);
        prefix.pop();
        return;
    }
    let used: usize = prefix.iter().sum();
    for k in 0..=(total - used) {
        prefix.push(k);
        compositions(n, total, prefix, out);
        prefix.pop();
    }
}

/// Points where `n − 1` of the given hyperplanes (at least one breakpoint)
/// meet inside the simplex.
fn arrangement_vertices(n: usize, hyperplanes: &[Hyperplane]) -> Vec<Vec<f64>> {
    if n < 2 || hyperplanes.is_empty() {
        return vec![];
    }
    let mut pool: Vec<Hyperplane> = hyperplanes.to_vec();
    for k in 0..n {
        let mut normal = vec![0.0; n];
        normal[k] = 1.0;
        pool.push(Hyperplane { normal, offset: 0.0 });
    }
    let h = hyperplanes.len();
    let choose = n - 1;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..choose).collect();
    let mut budget: usize = 400_000;
    loop {
        if idx[0] < h {
            let a = DMatrix::from_fn(n, n, |r, c| if r < choose { pool[idx[r]].normal[c] } else { 1.0 });
            let b = DVector::from_fn(n, |r, _| if r < choose { pool[idx[r]].offset } else { 1.0 });
            if let Some(x) = a.clone().lu().solve(&b) {
                let resid = (&a * &x - &b).amax();
                if resid < 1e-9 && x.iter().all(|v| *v >= -1e-10 && v.is_finite()) {
                    let mut v: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
                    let s: f64 = v.iter().sum();
                    v.iter_mut().for_each(|x| *x /= s);
                    if !out
                        .iter()
                        .any(|o: &Vec<f64>| o.iter().zip(&v).all(|(p, q)| (p - q).abs() < 1e-12))
                    {
                        out.push(v);
                    }
                }
            }
        }
        budget -= 1;
        if budget == 0 || !next_combination(&mut idx, pool.len()) {
            return out;
        }
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl BeliefGrid {
    pub fn new(prior: &Prior, hyperplanes: &[Hyperplane], opts: GridOptions) -> Self {
        let n = prior.len();
        let lattice = opts.lattice.max(1);
        let mut b = Builder {
            atoms: Vec::new(),
            seen: HashSet::new(),
            hyperplanes,
        };
        let mut points: Vec<Vec<f64>> = Vec::new();
        compositions(n, lattice, &mut Vec::with_capacity(n), &mut |c| {
            points.push(c.iter().map(|&k| k as f64 / lattice as f64).collect());
        });
        for p in points {
            b.push(p);
        }
        if opts.edge > 1 && n >= 2 {
            let r = opts.edge;
            for i in 0..n {
                for j in i + 1..n {
                    for t in 1..r {
                        let mut v = vec![0.0; n];
                        v[i] = t as f64 / r as f64;
                        v[j] = 1.0 - v[i];
                        b.push(v);
                    }
                }
            }
        }
        for v in arrangement_vertices(n, hyperplanes) {
            b.push(v);
        }
        b.push(prior.probs().to_vec());
        let resolution = 1.0 / lattice.max(opts.edge) as f64;
        Self {
            atoms: b.atoms,
            resolution,
        }
    }

    pub fn for_payoff(w: &PayoffSpec, prior: &Prior) -> Self {
        Self::new(prior, &w.hyperplanes(), GridOptions::for_payoff(w))
    }

    pub fn with_options(w: &PayoffSpec, prior: &Prior, opts: GridOptions) -> Self {
        Self::new(prior, &w.hyperplanes(), opts)
    }

    /// A grid from explicit atoms; the simplex vertices and the prior are
    /// added if missing.
    pub fn from_atoms(atoms: Vec<BeliefAtom>, prior: &Prior) -> Result<Self> {
        let n = prior.len();
        let mut b = Builder {
            atoms: Vec::new(),
            seen: HashSet::new(),
            hyperplanes: &[],
        };
        for a in atoms {
            if a.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.dim(),
                    context: "grid atom dimension",
                });
            }
            b.push_one(&a.belief, a.side);
        }
        for k in 0..n {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            b.push_one(&v, Side::Exact);
        }
        b.push_one(prior.probs(), Side::Exact);
        Ok(Self {
            atoms: b.atoms,
            resolution: 0.0,
        })
    }

    pub fn atoms(&self) -> &[BeliefAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.atoms.first().map_or(0, BeliefAtom::dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn lattice_sizes() {
        let g = BeliefGrid::new(&Prior::uniform(3), &[], GridOptions { lattice: 10, edge: 0 });
        assert_eq!(g.len(), 67);
        let g = BeliefGrid::new(&Prior::uniform(2), &[], GridOptions { lattice: 400, edge: 0 });
        assert_eq!(g.len(), 401);
    }

    #[test]
    fn example_grid_has_breakpoint_sides() {
        let w = presets::example1_payoff();
        let g = BeliefGrid::for_payoff(&w, &Prior::uniform(2));
        for cut in [1.0 / 3.0, 2.0 / 3.0] {
            for side in [Side::Lower, Side::Upper] {
                assert!(g
                    .atoms()
                    .iter()
                    .any(|a| a.side == side && (a.belief[1] - cut).abs() < 1e-12));
            }
        }
        assert!(g.atoms().iter().any(|a| a.belief == vec![1.0, 0.0]));
        assert!(g.atoms().iter().any(|a| a.belief == vec![0.5, 0.5]));
    }

    #[test]
    fn arrangement_in_three_types() {
        // Two lines through the simplex crossing at the barycenter.
        let hs = vec![
            Hyperplane {
                normal: vec![1.0, -1.0, 0.0],
                offset: 0.0,
            },
            Hyperplane {
                normal: vec![0.0, 1.0, -1.0],
                offset: 0.0,
            },
        ];
        let v = arrangement_vertices(3, &hs);
        assert!(v.iter().any(|p| p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12)));
        // the crossing plus two facet hits per line, one shared vertex each
        assert_eq!(v.len(), 5);
    }
}
