//! Tilings in which all `n` edges of the prototile can have different lengths.
//!
//! For two tiles this happens exactly when every pair joins the `i`-th edge
//! of tile 1 to the `i`-th edge of tile 2, with no two cyclically adjacent
//! pairs twisted. The twisted labels form a [`TwistedIndexSet`].

use std::collections::BTreeSet;
use std::fmt;

use crate::convert::diagram_to_vertexset;
use crate::diagram::{Diagram, Mode};
use crate::error::{Error, Result};
use crate::geomfilter::edge_classes;
use crate::report::ValidityReport;
use crate::topology::{classify_surface, Surface, SurfaceClass};

/// Labels `k_1 < ... < k_tau` in `Z_n` with no two cyclically adjacent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwistedIndexSet {
    n: usize,
    indices: Vec<usize>,
}

impl TwistedIndexSet {
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.iter().any(|&k| k >= n) {
            return Err(Error::Range(format!("twisted index out of range for n = {n}")));
        }
        if indices.len() >= 2 {
            let adjacent =
                indices.windows(2).any(|w| w[1] - w[0] < 2) || indices[0] + n - indices[indices.len() - 1] < 2;
            if adjacent {
                return Err(Error::Param(format!(
                    "twisted indices {indices:?} are adjacent in Z_{n}"
                )));
            }
        }
        Ok(TwistedIndexSet { n, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn tau(&self) -> usize {
        self.indices.len()
    }

    /// Gaps `k_{p+1} - k_p` with the last one wrapping around.
    pub fn gaps(&self) -> Vec<usize> {
        let k = &self.indices;
        (0..k.len())
            .map(|p| {
                if p + 1 < k.len() {
                    k[p + 1] - k[p]
                } else {
                    k[0] + self.n - k[p]
                }
            })
            .collect()
    }

    /// The two-tile diagram pairing equal labels, twisted at these indices.
    pub fn diagram(&self) -> Diagram {
        let tuples: Vec<_> = (0..self.n)
            .map(|i| {
                let sign = if self.indices.binary_search(&i).is_ok() { -1 } else { 1 };
                (i, 1, i, 2, sign)
            })
            .collect();
        Diagram::from_tuples(self.n, 2, &tuples).expect("label-preserving matching is valid")
    }

    /// Least image under rotations and reflections of the labels.
    fn dihedral_min(&self) -> Vec<usize> {
        let n = self.n;
        let mut best: Option<Vec<usize>> = None;
        for c in 0..n {
            for reflect in [false, true] {
                let mut image: Vec<usize> = self
                    .indices
                    .iter()
                    .map(|&k| if reflect { (2 * n + c - k - 1) % n } else { (c + k) % n })
                    .collect();
                image.sort_unstable();
                if best.as_ref().is_none_or(|b| image < *b) {
                    best = Some(image);
                }
            }
        }
        best.unwrap_or_default()
    }
}

impl fmt::Display for TwistedIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Checks whether every edge label is its own length class, and when it is,
/// the consequences that must then hold.
pub fn check_distinct_necessary(d: &Diagram) -> ValidityReport {
    let mut report = ValidityReport::new();
    let classes = edge_classes(d).count();
    if classes < d.n() {
        report.push("all-distinct", format!("{classes} edge classes < n = {}", d.n()));
        return report;
    }
    if !d.f().is_multiple_of(2) {
        report.push("f-even", format!("f = {} is odd", d.f()));
    }
    for p in d.pairs() {
        if p.a.label != p.b.label || p.a.tile == p.b.tile {
            report.push(
                "label-preserving",
                format!("pair {p} does not join equal labels of two tiles"),
            );
        }
    }
    let vs = diagram_to_vertexset(d);
    for (i, deg) in vs.degrees().into_iter().enumerate() {
        if deg == 3 {
            report.push("no-degree-3", format!("vertex {i} has degree 3"));
        }
    }
    report
}

/// Surface predicted for the family member with `tau` twisted pairs.
pub fn expected_surface(n: usize, tau: usize) -> Surface {
    let (n, t) = (n as i64, tau as i64);
    match tau {
        0 if n % 2 == 1 => Surface::from_chi(3 - n, true),
        0 => Surface::from_chi(4 - n, true),
        _ => Surface::from_chi(t - n + 2, false),
    }
    .expect("family surfaces exist")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub twisted: TwistedIndexSet,
    pub diagram: Diagram,
    pub surface: SurfaceClass,
}

/// Every two-tile tiling with all edge lengths distinct, one per
/// equivalence class, ordered by number of twisted pairs.
pub fn two_tile_distinct_family(n: usize) -> Result<Vec<FamilyMember>> {
    if n < 7 {
        return Err(Error::Param(format!("n = {n} must be at least 7")));
    }
    let mut sets = BTreeSet::new();
    for tau in 0..=n / 2 {
        choose_nonadjacent(n, tau, 0, &mut Vec::new(), &mut sets);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for indices in sets {
        let twisted = TwistedIndexSet::new(n, indices)?;
        let diagram = twisted.diagram().canonical_form(Mode::General);
        if !seen.insert(diagram.keys()) {
            continue;
        }
        let surface = classify_surface(&diagram)?;
        out.push(FamilyMember {
            twisted,
            diagram,
            surface,
        });
    }
    out.sort_by(|a, b| (a.twisted.tau(), &a.twisted).cmp(&(b.twisted.tau(), &b.twisted)));
    Ok(out)
}

/// Dihedral representatives of the `tau`-subsets of `Z_n` without adjacent members.
fn choose_nonadjacent(n: usize, tau: usize, from: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
    if cur.len() == tau {
        if let Ok(set) = TwistedIndexSet::new(n, cur.clone()) {
            out.insert(set.dihedral_min());
        }
        return;
    }
    for k in from..n {
        if cur.last().is_some_and(|&last| k < last + 2) {
            continue;
        }
        cur.push(k);
        choose_nonadjacent(n, tau, k + 1, cur, out);
        cur.pop();
    }
}

/// Surfaces tiled by two congruent `n`-gons with all edge lengths distinct.
pub fn admissible_surfaces(n: usize) -> Result<Vec<Surface>> {
    if n < 7 {
        return Err(Error::Param(format!("n = {n} must be at least 7")));
    }
    let mut out: Vec<Surface> = (0..=n / 2).map(|tau| expected_surface(n, tau)).collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::check_pair_conditions;
    use crate::diagram::tests_support::*;
    use crate::topology::validate_params;

    fn names(surfaces: &[Surface]) -> Vec<String> {
        surfaces.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn index_sets_reject_adjacency() {
        assert!(TwistedIndexSet::new(7, vec![0, 6]).is_err());
        assert!(TwistedIndexSet::new(7, vec![1, 2]).is_err());
        assert!(TwistedIndexSet::new(7, vec![7]).is_err());
        assert!(TwistedIndexSet::new(7, vec![3]).is_ok());
        assert_eq!(TwistedIndexSet::new(7, vec![4, 0, 2]).unwrap().gaps(), vec![2, 2, 3]);
    }

    #[test]
    fn necessary_condition_checks() {
        assert!(check_distinct_necessary(&torus_pair(2)).violates("all-distinct"));
        assert!(!check_distinct_necessary(&cross_cap()).passed());
        let zero = TwistedIndexSet::new(7, vec![]).unwrap().diagram();
        assert!(check_distinct_necessary(&zero).passed());
        assert!(diagram_to_vertexset(&zero).min_degree() >= 4);
    }

    #[test]
    fn small_family_surfaces() {
        let fam = two_tile_distinct_family(7).unwrap();
        let zero: Vec<_> = fam.iter().filter(|m| m.twisted.tau() == 0).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].surface.name.to_string(), "3T2");
        let three = fam.iter().find(|m| m.twisted.indices() == [0, 2, 4]).unwrap();
        assert_eq!(three.surface.name.to_string(), "4P2");
        let one = fam.iter().find(|m| m.twisted.tau() == 1).unwrap();
        assert_eq!(one.surface.name.to_string(), "6P2");
    }

    #[test]
    fn family_invariants() {
        for n in 7..=12 {
            let fam = two_tile_distinct_family(n).unwrap();
            let mut surfaces = BTreeSet::new();
            for m in &fam {
                let d = &m.diagram;
                assert_eq!(edge_classes(d).count(), n);
                assert!(check_pair_conditions(d).passed());
                assert!(check_distinct_necessary(d).passed());
                assert_eq!(m.surface.name, expected_surface(n, m.twisted.tau()));
                let vs = diagram_to_vertexset(d);
                assert!(vs.min_degree() >= 4);
                let mut degrees = vs.degrees();
                degrees.sort_unstable();
                let mut predicted: Vec<usize> = if m.twisted.tau() == 0 {
                    if n % 2 == 1 {
                        vec![2 * n]
                    } else {
                        vec![n, n]
                    }
                } else {
                    m.twisted.gaps().iter().map(|g| 2 * g).collect()
                };
                predicted.sort_unstable();
                assert_eq!(degrees, predicted, "n = {n}, twisted = {}", m.twisted);
                let bounds = validate_params(n, 2, m.surface.chi).unwrap();
                assert!(!bounds.distinct_lengths_impossible);
                surfaces.insert(m.surface.name);
            }
            let admissible: BTreeSet<Surface> = admissible_surfaces(n).unwrap().into_iter().collect();
            assert_eq!(surfaces, admissible, "n = {n}");
        }
    }

    #[test]
    fn admissible_lists() {
        assert_eq!(names(&admissible_surfaces(7).unwrap()), ["4P2", "5P2", "6P2", "3T2"]);
        assert_eq!(
            names(&admissible_surfaces(8).unwrap()),
            ["4P2", "5P2", "6P2", "7P2", "3T2"]
        );
        assert_eq!(
            names(&admissible_surfaces(9).unwrap()),
            ["5P2", "6P2", "7P2", "8P2", "4T2"]
        );
    }
}
