//! Grouping of modes by shared leading 1D factors.
//!
//! Level-1 nodes carry the η1 factor, level-2 nodes (3D only) the η2
//! factor, leaves are the modes themselves carrying the last factor. Every
//! node's children are contiguous, so the contractions run as
//! triangular loops without masked lanes.

use std::collections::BTreeMap;

use super::IndexSet;
use crate::bases::{Factor1D, QuadratureRule};

#[derive(Debug, Clone, PartialEq)]
pub struct FactorTree {
    pub dim: usize,
    pub q: Vec<usize>,
    pub n1: usize,
    pub f1: Vec<Factor1D>,
    /// n1 × Q1 values and η1 derivatives
    pub v1: Vec<f64>,
    pub d1: Vec<f64>,
    /// children of level-1 node a: `c1[a]..c1[a+1]` (level-2 in 3D, leaves in 2D)
    pub c1: Vec<usize>,
    pub n2: usize,
    pub f2: Vec<Factor1D>,
    /// n2 × Q2 (3D only)
    pub v2: Vec<f64>,
    pub d2: Vec<f64>,
    /// leaves of level-2 node b: `c2[b]..c2[b+1]` (3D only)
    pub c2: Vec<usize>,
    /// leaf -> mode index
    pub leaf_mode: Vec<usize>,
    pub fl: Vec<Factor1D>,
    /// n_modes × Q_last
    pub vl: Vec<f64>,
    pub dl: Vec<f64>,
}

fn table(fs: &[Factor1D], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut v = Vec::with_capacity(fs.len() * z.len());
    let mut d = Vec::with_capacity(fs.len() * z.len());
    for f in fs {
        for &zi in z {
            let (a, b) = f.eval(zi);
            v.push(a);
            d.push(b);
        }
    }
    (v, d)
}

fn offsets(parents: &[usize], n_parents: usize) -> Vec<usize> {
    let mut c = vec![0; n_parents + 1];
    for &p in parents {
        c[p + 1] += 1;
    }
    for i in 0..n_parents {
        c[i + 1] += c[i];
    }
    c
}

impl FactorTree {
    pub fn new(index: &IndexSet, rules: &[QuadratureRule]) -> Self {
        let dim = index.shape.dim();
        let q: Vec<usize> = rules.iter().map(|r| r.npoints()).collect();
        let factors: Vec<Vec<Factor1D>> = (0..index.len()).map(|m| index.factors(m)).collect();

        let mut k1: BTreeMap<Factor1D, usize> = BTreeMap::new();
        for fs in &factors {
            k1.entry(fs[0]).or_insert(0);
        }
        for (i, v) in k1.values_mut().enumerate() {
            *v = i;
        }
        let f1: Vec<Factor1D> = k1.keys().copied().collect();
        let n1 = f1.len();
        let (v1, d1) = table(&f1, &rules[0].points);

        let mut tree = FactorTree {
            dim,
            q: q.clone(),
            n1,
            f1,
            v1,
            d1,
            c1: vec![],
            n2: 0,
            f2: vec![],
            v2: vec![],
            d2: vec![],
            c2: vec![],
            leaf_mode: vec![],
            fl: vec![],
            vl: vec![],
            dl: vec![],
        };

        // leaves sorted by their parent key, then mode index
        let mut leaves: Vec<(usize, usize)>;
        if dim == 2 {
            leaves = factors.iter().enumerate().map(|(m, fs)| (k1[&fs[0]], m)).collect();
            leaves.sort();
            tree.c1 = offsets(&leaves.iter().map(|l| l.0).collect::<Vec<_>>(), n1);
        } else {
            let mut k2: BTreeMap<(Factor1D, Factor1D), usize> = BTreeMap::new();
            for fs in &factors {
                k2.entry((fs[0], fs[1])).or_insert(0);
            }
            for (i, v) in k2.values_mut().enumerate() {
                *v = i;
            }
            tree.n2 = k2.len();
            tree.f2 = k2.keys().map(|k| k.1).collect();
            let parents2: Vec<usize> = k2.keys().map(|k| k1[&k.0]).collect();
            tree.c1 = offsets(&parents2, n1);
            let (v2, d2) = table(&tree.f2, &rules[1].points);
            tree.v2 = v2;
            tree.d2 = d2;
            leaves = factors
                .iter()
                .enumerate()
                .map(|(m, fs)| (k2[&(fs[0], fs[1])], m))
                .collect();
            leaves.sort();
            tree.c2 = offsets(&leaves.iter().map(|l| l.0).collect::<Vec<_>>(), tree.n2);
        }
        tree.leaf_mode = leaves.iter().map(|l| l.1).collect();
        tree.fl = tree.leaf_mode.iter().map(|&m| factors[m][dim - 1]).collect();
        let (vl, dl) = table(&tree.fl, &rules[dim - 1].points);
        tree.vl = vl;
        tree.dl = dl;
        tree
    }

    pub fn n_modes(&self) -> usize {
        self.leaf_mode.len()
    }

    pub fn n_points(&self) -> usize {
        self.q.iter().product()
    }

    /// Multiply-add count (×2) of one tree sweep over one element.
    pub fn sweep_flops(&self) -> u64 {
        let np = self.n_modes() as u64;
        if self.dim == 2 {
            let (q1, q2) = (self.q[0] as u64, self.q[1] as u64);
            2 * (np * q2 + self.n1 as u64 * q1 * q2)
        } else {
            let (q1, q2, q3) = (self.q[0] as u64, self.q[1] as u64, self.q[2] as u64);
            2 * (np * q3 + self.n2 as u64 * q2 * q3 + self.n1 as u64 * q1 * q2 * q3)
        }
    }
}
