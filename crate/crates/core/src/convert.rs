//! Conversion between diagrams and vertex sets, and the validity conditions
//! on each side.
//!
//! A signed corner `(i_p)_s` records the corner together with the direction
//! in which the vertex is traversed. Following the gluing rules gives a
//! permutation on the `2nf` signed corners; its cycles, taken up to the mirror
//! map `(i_p)_s -> (i_p)_{-s}`, are the vertices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{CornerRef, Diagram, EdgePair, EdgeRef, Sign};
use crate::error::{Error, Result};
use crate::report::ValidityReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedCorner {
    pub corner: CornerRef,
    pub sign: Sign,
}

impl SignedCorner {
    pub fn new(label: usize, tile: usize, sign: Sign) -> Self {
        SignedCorner {
            corner: CornerRef::new(label, tile),
            sign,
        }
    }

    pub fn mirror(self) -> Self {
        SignedCorner {
            corner: self.corner,
            sign: -self.sign,
        }
    }

    pub(crate) fn index(self, n: usize) -> usize {
        2 * self.corner.index(n) + (self.sign == Sign::Minus) as usize
    }

    pub(crate) fn from_index(index: usize, n: usize) -> Self {
        SignedCorner {
            corner: CornerRef::from_index(index / 2, n),
            sign: if index & 1 == 0 { Sign::Plus } else { Sign::Minus },
        }
    }
}

impl fmt::Display for SignedCorner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}){}", self.corner, self.sign.symbol())
    }
}

/// Successor of signed corner `sc` (dense index) given a partner lookup,
/// or `None` when the edge it depends on is not yet paired.
#[inline]
pub(crate) fn next_index(n: usize, sc: usize, partner: impl Fn(usize) -> Option<(usize, Sign)>) -> Option<usize> {
    let corner = sc / 2;
    let (tile_base, label) = (corner - corner % n, corner % n);
    let plus = sc & 1 == 0;
    let incoming = if plus { tile_base + (label + n - 1) % n } else { corner };
    let (j, sigma) = partner(incoming)?;
    let stays_plus = plus == (sigma == Sign::Plus);
    Some(if stays_plus {
        2 * j
    } else {
        let jt = j - j % n;
        2 * (jt + (j % n + 1) % n) + 1
    })
}

/// The corner following `c` around its vertex.
pub fn next_corner(d: &Diagram, c: SignedCorner) -> SignedCorner {
    let n = d.n();
    let next = next_index(n, c.index(n), |e| Some(d.partner_index(e))).expect("perfect matching");
    SignedCorner::from_index(next, n)
}

/// A vertex: a cyclic sequence of signed corners, stored as the least
/// representative among its rotations and the rotations of its mirror
/// (reversed, all signs flipped).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    cycle: Vec<SignedCorner>,
}

impl Vertex {
    pub fn new(cycle: Vec<SignedCorner>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Inconsistent("empty vertex".into()));
        }
        let mirrored: Vec<SignedCorner> = cycle.iter().rev().map(|c| c.mirror()).collect();
        let best = [cycle, mirrored]
            .into_iter()
            .flat_map(|c| {
                (0..c.len()).map(move |r| {
                    let mut rot = c.clone();
                    rot.rotate_left(r);
                    rot
                })
            })
            .min()
            .expect("non-empty");
        Ok(Vertex { cycle: best })
    }

    pub fn cycle(&self) -> &[SignedCorner] {
        &self.cycle
    }

    pub fn degree(&self) -> usize {
        self.cycle.len()
    }

    /// Consecutive pairs around the vertex in both traversal directions.
    fn oriented_adjacencies(&self) -> impl Iterator<Item = (SignedCorner, SignedCorner)> + '_ {
        let k = self.cycle.len();
        (0..k).flat_map(move |i| {
            let (x, y) = (self.cycle[i], self.cycle[(i + 1) % k]);
            [(x, y), (y.mirror(), x.mirror())]
        })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycle {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A partition of all corners into vertices, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    f: usize,
    vertices: Vec<Vertex>,
}

impl VertexSet {
    /// Canonicalises each cycle and checks that the corners (ignoring signs)
    /// partition `Z_n x {1..f}`.
    pub fn new(n: usize, f: usize, cycles: Vec<Vec<SignedCorner>>) -> Result<Self> {
        let mut seen = vec![false; n * f];
        for c in cycles.iter().flatten() {
            if !c.corner.in_range(n, f) {
                return Err(Error::Range(format!("corner {} outside Z_{n} x 1..={f}", c.corner)));
            }
            if std::mem::replace(&mut seen[c.corner.index(n)], true) {
                return Err(Error::Inconsistent(format!("corner {} occurs twice", c.corner)));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Inconsistent(format!(
                "corner {} missing",
                CornerRef::from_index(i, n)
            )));
        }
        let mut vertices = cycles.into_iter().map(Vertex::new).collect::<Result<Vec<_>>>()?;
        vertices.sort();
        Ok(VertexSet { n, f, vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.vertices.iter().map(Vertex::degree).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.vertices.iter().map(Vertex::degree).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&VertexSetJson::from(self)).expect("vertex set serialises")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(VertexSetJson::from(self)).expect("vertex set serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: VertexSetJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("vertex set JSON: {e}")))?;
        let cycles = raw
            .vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&[label, tile, s]| {
                        let sign = Sign::from_value(s).ok_or_else(|| {
                            Error::Parse(format!("corner [{label}, {tile}, {s}]: sign is not +1 or -1"))
                        })?;
                        if label < 0 || tile < 1 {
                            return Err(Error::Range(format!("corner [{label}, {tile}, {s}]")));
                        }
                        Ok(SignedCorner::new(label as usize, tile as usize, sign))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        VertexSet::new(raw.n, raw.f, cycles)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexSetJson {
    n: usize,
    f: usize,
    vertices: Vec<Vec<[i64; 3]>>,
}

impl From<&VertexSet> for VertexSetJson {
    fn from(v: &VertexSet) -> Self {
        VertexSetJson {
            n: v.n,
            f: v.f,
            vertices: v
                .vertices
                .iter()
                .map(|x| {
                    x.cycle
                        .iter()
                        .map(|c| [c.corner.label as i64, c.corner.tile as i64, c.sign.value() as i64])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Cycles of the successor permutation as dense signed-corner indices, one
/// cycle per mirror pair (the one through the smaller starting index).
pub(crate) fn vertex_cycles(d: &Diagram) -> Vec<Vec<usize>> {
    let n = d.n();
    let total = 2 * n * d.f();
    let mut visited = vec![false; total];
    let mut cycles = Vec::new();
    for start in 0..total {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            cycle.push(cur);
            cur = next_index(n, cur, |e| Some(d.partner_index(e))).expect("perfect matching");
            if cur == start {
                break;
            }
        }
        // the mirror cycle is the same vertex traversed the other way
        let mirror_start = start ^ 1;
        debug_assert!(!visited[mirror_start], "cycle through {start} contains its own mirror");
        let mut cur = mirror_start;
        while !visited[cur] {
            visited[cur] = true;
            cur = next_index(n, cur, |e| Some(d.partner_index(e))).expect("perfect matching");
        }
        cycles.push(cycle);
    }
    cycles
}

pub fn diagram_to_vertexset(d: &Diagram) -> VertexSet {
    let n = d.n();
    let cycles = vertex_cycles(d)
        .into_iter()
        .map(|c| c.into_iter().map(|i| SignedCorner::from_index(i, n)).collect())
        .collect();
    VertexSet::new(n, d.f(), cycles).expect("cycles of a matching partition the corners")
}

/// The edge pair implied by two consecutive corners `x y` of a vertex.
fn implied_pair(x: SignedCorner, y: SignedCorner, n: usize) -> Result<EdgePair> {
    let (i, p) = (x.corner.label, x.corner.tile);
    let (j, q) = (y.corner.label, y.corner.tile);
    let dec = |k: usize| (k + n - 1) % n;
    let (a, b, sign) = match (x.sign, y.sign) {
        (Sign::Plus, Sign::Plus) => (EdgeRef::new(dec(i), p), EdgeRef::new(j, q), Sign::Plus),
        (Sign::Minus, Sign::Plus) => (EdgeRef::new(i, p), EdgeRef::new(j, q), Sign::Minus),
        (Sign::Plus, Sign::Minus) => (EdgeRef::new(dec(i), p), EdgeRef::new(dec(j), q), Sign::Minus),
        (Sign::Minus, Sign::Minus) => (EdgeRef::new(i, p), EdgeRef::new(dec(j), q), Sign::Plus),
    };
    EdgePair::new(a, b, sign)
        .map_err(|_| Error::Inconsistent(format!("adjacent corners {x}{y} fold edge {a} onto itself")))
}

pub fn vertexset_to_diagram(v: &VertexSet) -> Result<Diagram> {
    let n = v.n;
    let mut implied: BTreeMap<EdgeRef, EdgePair> = BTreeMap::new();
    for vertex in &v.vertices {
        let k = vertex.cycle.len();
        for idx in 0..k {
            let pair = implied_pair(vertex.cycle[idx], vertex.cycle[(idx + 1) % k], n)?;
            for e in [pair.a, pair.b] {
                if let Some(prev) = implied.insert(e, pair) {
                    if prev != pair {
                        return Err(Error::Inconsistent(format!(
                            "edge {e} is implied in both {prev} and {pair}"
                        )));
                    }
                }
            }
        }
    }
    let pairs: HashSet<EdgePair> = implied.into_values().collect();
    let mut pairs: Vec<EdgePair> = pairs.into_iter().collect();
    pairs.sort();
    Diagram::new(n, v.f, pairs).map_err(|e| Error::Inconsistent(e.to_string()))
}

/// The four conditions characterising genuine vertex sets.
pub fn check_vertexset(v: &VertexSet) -> ValidityReport {
    let n = v.n;
    let mut report = ValidityReport::new();
    let adjacent: HashSet<(SignedCorner, SignedCorner)> =
        v.vertices.iter().flat_map(Vertex::oriented_adjacencies).collect();
    let dec = |k: usize| (k + n - 1) % n;
    let inc = |k: usize| (k + 1) % n;

    for vertex in &v.vertices {
        if vertex.degree() < 3 {
            report.push(
                "degree-at-least-3",
                format!("vertex {vertex} has degree {}", vertex.degree()),
            );
        }
    }
    let mut adj: Vec<_> = adjacent.iter().copied().collect();
    adj.sort();
    for (x, y) in adj {
        if x.sign != Sign::Plus {
            continue;
        }
        let (i, p) = (x.corner.label, x.corner.tile);
        let (j, q) = (y.corner.label, y.corner.tile);
        match y.sign {
            Sign::Plus => {
                if q == p && j == dec(i) {
                    report.push("no-fold", format!("{x}{y} are adjacent"));
                }
                let want = (
                    SignedCorner::new(inc(j), q, Sign::Plus),
                    SignedCorner::new(dec(i), p, Sign::Plus),
                );
                if !adjacent.contains(&want) {
                    report.push(
                        "closure-opposing",
                        format!("{x}{y} present but {}{} missing", want.0, want.1),
                    );
                }
            }
            Sign::Minus => {
                let want = (
                    SignedCorner::new(dec(j), q, Sign::Minus),
                    SignedCorner::new(dec(i), p, Sign::Plus),
                );
                if !adjacent.contains(&want) {
                    report.push(
                        "closure-twisted",
                        format!("{x}{y} present but {}{} missing", want.0, want.1),
                    );
                }
            }
        }
    }
    report
}

/// The three edge-pair conditions excluding vertices of degree one or two.
pub fn check_pair_conditions(d: &Diagram) -> ValidityReport {
    let n = d.n();
    let mut report = ValidityReport::new();
    let inc = |k: usize| (k + 1) % n;
    let dec = |k: usize| (k + n - 1) % n;
    let has = |a: EdgeRef, b: EdgeRef, s: Sign| a != b && d.partner(a) == (b, s);
    for pair in d.pairs() {
        for (a, b) in [(pair.a, pair.b), (pair.b, pair.a)] {
            let (i, p) = (a.label, a.tile);
            let (j, q) = (b.label, b.tile);
            match pair.sign {
                Sign::Plus => {
                    if q == p && j == inc(i) {
                        report.push("degree-one", format!("pair {pair}"));
                    }
                    let other = (EdgeRef::new(inc(i), p), EdgeRef::new(dec(j), q));
                    if has(other.0, other.1, Sign::Plus) {
                        report.push(
                            "degree-two-opposing",
                            format!("pairs {pair} and ({} {})+", other.0, other.1),
                        );
                    }
                }
                Sign::Minus => {
                    let other = (EdgeRef::new(inc(i), p), EdgeRef::new(inc(j), q));
                    if has(other.0, other.1, Sign::Minus) {
                        report.push(
                            "degree-two-twisted",
                            format!("pairs {pair} and ({} {})-", other.0, other.1),
                        );
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests_support::*;
    use Sign::{Minus as M, Plus as P};

    fn sc(label: usize, tile: usize, sign: Sign) -> SignedCorner {
        SignedCorner::new(label, tile, sign)
    }

    fn vertex(cs: &[(usize, usize, Sign)]) -> Vertex {
        Vertex::new(cs.iter().map(|&(l, t, s)| sc(l, t, s)).collect()).unwrap()
    }

    fn plus_vertex(cs: &[(usize, usize)]) -> Vertex {
        Vertex::new(cs.iter().map(|&(l, t)| sc(l, t, P)).collect()).unwrap()
    }

    #[test]
    fn cross_cap_first_step_and_cycle() {
        let d = cross_cap();
        assert_eq!(next_corner(&d, sc(0, 1, P)), sc(5, 2, M));
        let mut cur = sc(0, 1, P);
        let mut seen = vec![cur];
        loop {
            cur = next_corner(&d, cur);
            if cur == seen[0] {
                break;
            }
            seen.push(cur);
        }
        assert_eq!(
            seen,
            vec![sc(0, 1, P), sc(5, 2, M), sc(6, 1, M), sc(4, 2, P), sc(4, 1, P)]
        );
    }

    #[test]
    fn cross_cap_vertex_set() {
        let v = diagram_to_vertexset(&cross_cap());
        let mut expected = vec![
            vertex(&[(0, 1, P), (5, 2, M), (6, 1, M), (4, 2, P), (4, 1, P)]),
            vertex(&[(0, 2, P), (2, 2, P), (2, 1, M)]),
            vertex(&[(1, 1, P), (3, 1, P), (1, 2, M)]),
            vertex(&[(3, 2, P), (6, 2, P), (5, 1, P)]),
        ];
        expected.sort();
        assert_eq!(v.vertices(), expected.as_slice());
    }

    #[test]
    fn torus_pair_vertex_sets() {
        let v = diagram_to_vertexset(&torus_pair(2));
        let mut expected = vec![
            plus_vertex(&[(0, 1), (4, 1), (3, 2), (0, 2), (4, 2), (3, 1)]),
            plus_vertex(&[(1, 1), (2, 1), (1, 2), (2, 2)]),
            plus_vertex(&[(5, 1), (6, 1), (5, 2), (6, 2)]),
        ];
        expected.sort();
        assert_eq!(v.vertices(), expected.as_slice());
    }

    #[test]
    fn split_pair_vertex_counts() {
        assert_eq!(diagram_to_vertexset(&split_pair(2)).len(), 3);
        let single = diagram_to_vertexset(&split_pair(1));
        assert_eq!(single.degrees(), vec![14]);
    }

    #[test]
    fn single_vertex_recovers_its_pairs() {
        let v = vertex(&[(0, 1, P), (5, 2, M), (6, 1, M), (4, 2, P), (4, 1, P)]);
        let got: HashSet<EdgePair> = (0..5)
            .map(|i| implied_pair(v.cycle()[i], v.cycle()[(i + 1) % 5], 7).unwrap())
            .collect();
        let e = |l, t| EdgeRef::new(l, t);
        let want: HashSet<EdgePair> = [
            EdgePair::new(e(6, 1), e(4, 2), M).unwrap(),
            EdgePair::new(e(5, 1), e(5, 2), P).unwrap(),
            EdgePair::new(e(4, 1), e(3, 2), P).unwrap(),
            EdgePair::new(e(0, 1), e(3, 1), P).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn cross_cap_round_trip() {
        let d = cross_cap();
        let v = diagram_to_vertexset(&d);
        assert_eq!(vertexset_to_diagram(&v).unwrap(), d);
        assert_eq!(VertexSet::from_json(&v.to_json()).unwrap(), v);
    }

    #[test]
    fn cross_cap_passes_both_checks() {
        let d = cross_cap();
        assert!(check_pair_conditions(&d).passed());
        let v = diagram_to_vertexset(&d);
        assert!(check_vertexset(&v).passed(), "{}", check_vertexset(&v));
        let mut deg = v.degrees();
        deg.sort();
        assert_eq!(deg, vec![3, 3, 3, 5]);
    }

    #[test]
    fn short_cycle_fails_degree_condition() {
        let v = VertexSet::new(
            4,
            1,
            vec![vec![sc(0, 1, P), sc(1, 1, P)], vec![sc(2, 1, P), sc(3, 1, P)]],
        )
        .unwrap();
        let report = check_vertexset(&v);
        assert!(report.violates("degree-at-least-3"));
    }

    #[test]
    fn toggled_sign_breaks_closure() {
        let d = cross_cap();
        let v = diagram_to_vertexset(&d);
        let mut cycles: Vec<Vec<SignedCorner>> = v.vertices().iter().map(|x| x.cycle().to_vec()).collect();
        cycles[0].rotate_left(1);
        cycles[0][0] = cycles[0][0].mirror();
        let mutated = VertexSet::new(7, 2, cycles).unwrap();
        let report = check_vertexset(&mutated);
        assert!(
            report.violates("closure-opposing") || report.violates("closure-twisted"),
            "{report}"
        );
        assert!(vertexset_to_diagram(&mutated).is_err());
    }

    #[test]
    fn degree_one_pair_is_reported() {
        let d = Diagram::from_tuples(
            7,
            2,
            &[
                (0, 1, 1, 1, 1),
                (2, 1, 2, 2, 1),
                (3, 1, 3, 2, 1),
                (4, 1, 4, 2, 1),
                (5, 1, 5, 2, 1),
                (6, 1, 6, 2, 1),
                (0, 2, 1, 2, -1),
            ],
        )
        .unwrap();
        let report = check_pair_conditions(&d);
        assert!(report.violates("degree-one"), "{report}");
        assert!(diagram_to_vertexset(&d).min_degree() < 3);
    }

    #[test]
    fn corner_partition_is_enforced() {
        let err = VertexSet::new(4, 1, vec![vec![sc(0, 1, P), sc(1, 1, P), sc(2, 1, P)]]).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
        let err = VertexSet::new(3, 1, vec![vec![sc(0, 1, P), sc(0, 1, M), sc(1, 1, P), sc(2, 1, P)]]).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
    }
}
