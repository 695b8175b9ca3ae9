//! Geometric admissibility: the angle-sum system and its positive
//! solvability, decided exactly, and the edge-length classes forced by the
//! pairing.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::convert::VertexSet;
use crate::diagram::Diagram;
use crate::unionfind::UnionFind;

/// One row per vertex: `sum_i rows[v][i] * angle[i] = 2pi`, where
/// `rows[v][i]` counts corners labelled `i` at vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AngleSystem {
    pub n: usize,
    pub rows: Vec<Vec<u32>>,
}

impl AngleSystem {
    pub fn from_vertexset(v: &VertexSet) -> AngleSystem {
        let n = v.n();
        let rows = v
            .vertices()
            .iter()
            .map(|vertex| {
                let mut row = vec![0u32; n];
                for c in vertex.cycle() {
                    row[c.corner.label] += 1;
                }
                row
            })
            .collect();
        AngleSystem { n, rows }
    }

    /// Column sums over all rows.
    pub fn column_totals(&self) -> Vec<u32> {
        let mut totals = vec![0; self.n];
        for row in &self.rows {
            for (t, c) in totals.iter_mut().zip(row) {
                *t += c;
            }
        }
        totals
    }

    /// Exact check that `x` is strictly positive and solves every row, with
    /// angles measured in units of `2pi`.
    pub fn verifies(&self, x: &[BigRational]) -> bool {
        x.len() == self.n
            && x.iter().all(Signed::is_positive)
            && self.rows.iter().all(|row| {
                let sum: BigRational = row
                    .iter()
                    .zip(x)
                    .map(|(&c, xi)| xi * BigRational::from_integer(BigInt::from(c)))
                    .sum();
                sum.is_one()
            })
    }
}

pub fn build_angle_system(v: &VertexSet) -> AngleSystem {
    AngleSystem::from_vertexset(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Angles in units of `2pi`, present iff feasible.
    pub witness: Option<Vec<BigRational>>,
}

impl FeasibilityVerdict {
    pub fn witness_strings(&self) -> Option<Vec<String>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|x| format!("{}/{}", x.numer(), x.denom())).collect())
    }
}

/// Decides whether the system has a strictly positive solution by
/// maximising the smallest angle with an exact simplex.
pub fn check_positive_solution(sys: &AngleSystem) -> FeasibilityVerdict {
    match simplex::max_min_angle(sys) {
        simplex::Outcome::Infeasible => FeasibilityVerdict {
            feasible: false,
            witness: None,
        },
        simplex::Outcome::Optimal { min_angle, x } => {
            if min_angle.is_positive() {
                FeasibilityVerdict {
                    feasible: true,
                    witness: Some(x),
                }
            } else {
                FeasibilityVerdict {
                    feasible: false,
                    witness: None,
                }
            }
        }
    }
}

/// Partition of edge labels into classes of forced-equal length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeClassPartition {
    pub classes: Vec<Vec<usize>>,
}

impl EdgeClassPartition {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// Class sizes, descending.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.classes.iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

impl fmt::Display for EdgeClassPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in self.classes.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let labels: Vec<String> = class.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", labels.join(","))?;
        }
        Ok(())
    }
}

pub fn edge_classes(d: &Diagram) -> EdgeClassPartition {
    let mut uf = UnionFind::new(d.n());
    for p in d.pairs() {
        uf.union(p.a.label, p.b.label);
    }
    EdgeClassPartition { classes: uf.classes() }
}

mod simplex {
    //! Dense two-phase simplex over `BigRational` with Bland's rule.
    //!
    //! Variables: `y_0..y_{n-1} >= 0` and `t >= 0` with `x_i = y_i + t`.
    //! Each row reads `sum_i c_i y_i + deg * t = 1`. Phase one finds a
    //! basic feasible point, phase two maximises `t`.

    use super::*;

    pub enum Outcome {
        Infeasible,
        Optimal {
            min_angle: BigRational,
            x: Vec<BigRational>,
        },
    }

    struct Tableau {
        rows: Vec<Vec<BigRational>>,
        rhs: Vec<BigRational>,
        basis: Vec<usize>,
    }

    impl Tableau {
        fn pivot(&mut self, r: usize, col: usize) {
            let inv = self.rows[r][col].recip();
            for v in self.rows[r].iter_mut() {
                *v *= &inv;
            }
            self.rhs[r] *= &inv;
            let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
            for k in 0..self.rows.len() {
                if k == r || self.rows[k][col].is_zero() {
                    continue;
                }
                let factor = self.rows[k][col].clone();
                for (v, p) in self.rows[k].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &factor * p;
                    }
                }
                self.rhs[k] -= &factor * &pivot_rhs;
            }
            self.basis[r] = col;
        }

        /// Maximises `cost . z` over columns with `allowed[col]`, Bland's
        /// rule. Returns `false` if unbounded.
        fn maximise(&mut self, cost: &[BigRational], allowed: &[bool]) -> bool {
            loop {
                let entering = (0..cost.len()).find(|&col| {
                    if !allowed[col] || self.basis.contains(&col) {
                        return false;
                    }
                    let mut reduced = cost[col].clone();
                    for (r, &b) in self.basis.iter().enumerate() {
                        if !cost[b].is_zero() && !self.rows[r][col].is_zero() {
                            reduced -= &cost[b] * &self.rows[r][col];
                        }
                    }
                    reduced.is_positive()
                });
                let Some(col) = entering else {
                    return true;
                };
                let mut leave: Option<(usize, BigRational)> = None;
                for r in 0..self.rows.len() {
                    let a = &self.rows[r][col];
                    if !a.is_positive() {
                        continue;
                    }
                    let ratio = &self.rhs[r] / a;
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
                let Some((r, _)) = leave else {
                    return false;
                };
                self.pivot(r, col);
            }
        }

        fn value(&self, col: usize) -> BigRational {
            self.basis
                .iter()
                .position(|&b| b == col)
                .map_or_else(BigRational::zero, |r| self.rhs[r].clone())
        }
    }

    pub fn max_min_angle(sys: &AngleSystem) -> Outcome {
        let n = sys.n;
        let m = sys.rows.len();
        let t_col = n;
        let art = |r: usize| n + 1 + r;
        let width = n + 1 + m;
        let int = |v: u32| BigRational::from_integer(BigInt::from(v));
        if m == 0 {
            return Outcome::Optimal {
                min_angle: BigRational::one(),
                x: vec![BigRational::one(); n],
            };
        }

        let rows = sys
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let mut line = vec![BigRational::zero(); width];
                for (i, &c) in row.iter().enumerate() {
                    line[i] = int(c);
                }
                line[t_col] = int(row.iter().sum());
                line[art(r)] = BigRational::one();
                line
            })
            .collect();
        let mut tab = Tableau {
            rows,
            rhs: vec![BigRational::one(); m],
            basis: (0..m).map(art).collect(),
        };

        let mut cost = vec![BigRational::zero(); width];
        for r in 0..m {
            cost[art(r)] = -BigRational::one();
        }
        let all = vec![true; width];
        tab.maximise(&cost, &all);
        if (0..m).any(|r| tab.value(art(r)).is_positive()) {
            return Outcome::Infeasible;
        }

        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] > n {
                match (0..=n).find(|&col| !tab.rows[r][col].is_zero()) {
                    Some(col) => tab.pivot(r, col),
                    None => {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        let mut cost = vec![BigRational::zero(); width];
        cost[t_col] = BigRational::one();
        let allowed: Vec<bool> = (0..width).map(|col| col <= n).collect();
        let bounded = tab.maximise(&cost, &allowed);
        assert!(bounded, "t <= 1/deg on every non-empty row");
        let t = tab.value(t_col);
        let x = (0..n).map(|i| tab.value(i) + &t).collect();
        Outcome::Optimal { min_angle: t, x }
    }
}
