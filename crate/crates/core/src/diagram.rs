//! Signed multiple planar diagrams: perfect matchings on the edges of `f`
//! labelled `n`-gons, the relabelling group acting on them, and canonical
//! forms.
//!
//! Edge `label` of a tile joins corner `label` to corner `label + 1`
//! (indices mod `n`). Labels are 0-based, tiles are 1-based.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gluing sign of an edge pair: `Plus` is opposing, `Minus` is twisted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Sign {
    Minus = -1,
    Plus = 1,
}

impl Sign {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

macro_rules! tile_position {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub struct $name {
            pub label: usize,
            pub tile: usize,
        }

        impl $name {
            pub fn new(label: usize, tile: usize) -> Self {
                $name { label, tile }
            }

            /// Dense index `(tile - 1) * n + label`.
            pub fn index(self, n: usize) -> usize {
                (self.tile - 1) * n + self.label
            }

            pub fn from_index(index: usize, n: usize) -> Self {
                $name { label: index % n, tile: index / n + 1 }
            }

            pub fn in_range(self, n: usize, f: usize) -> bool {
                self.label < n && self.tile >= 1 && self.tile <= f
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                (self.tile, self.label).cmp(&(other.tile, other.label))
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}_{}", self.label, self.tile)
            }
        }
    };
}

tile_position!(
    /// Edge `label` of tile `tile`.
    EdgeRef
);
tile_position!(
    /// Corner `label` of tile `tile`.
    CornerRef
);

/// An unordered signed edge pair, stored with the smaller edge first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePair {
    pub a: EdgeRef,
    pub b: EdgeRef,
    pub sign: Sign,
}

impl EdgePair {
    pub fn new(a: EdgeRef, b: EdgeRef, sign: Sign) -> Result<Self> {
        match a.cmp(&b) {
            Ordering::Less => Ok(EdgePair { a, b, sign }),
            Ordering::Greater => Ok(EdgePair { a: b, b: a, sign }),
            Ordering::Equal => Err(Error::NotMatching(format!("edge {a} paired with itself"))),
        }
    }

    /// The other edge of the pair, if `e` belongs to it.
    pub fn other(&self, e: EdgeRef) -> Option<EdgeRef> {
        if e == self.a {
            Some(self.b)
        } else if e == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}){}", self.a, self.b, self.sign.symbol())
    }
}

/// Packs a normalised pair into an integer whose order is the pair order
/// `(tile_a, label_a, tile_b, label_b, sign)`.
#[inline]
pub(crate) fn pair_key(a: usize, b: usize, sign: Sign) -> u32 {
    debug_assert!(a < b);
    ((a as u32) << 17) | ((b as u32) << 1) | (sign == Sign::Plus) as u32
}

#[inline]
pub(crate) fn unpack_key(key: u32) -> (usize, usize, Sign) {
    let sign = if key & 1 == 1 { Sign::Plus } else { Sign::Minus };
    ((key >> 17) as usize, ((key >> 1) & 0xffff) as usize, sign)
}

/// A signed perfect matching on `Z_n x {1..f}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    n: usize,
    f: usize,
    pairs: Vec<EdgePair>,
    partner: Vec<(usize, Sign)>,
}

impl Diagram {
    pub fn new(n: usize, f: usize, pairs: Vec<EdgePair>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Param(format!("n = {n} must be at least 3")));
        }
        if f < 1 {
            return Err(Error::Param("f must be at least 1".into()));
        }
        if n.checked_mul(f).is_none_or(|e| e >= 1 << 15) {
            return Err(Error::Param(format!("n*f = {n}*{f} is too large")));
        }
        let total = n * f;
        let mut partner: Vec<Option<(usize, Sign)>> = vec![None; total];
        for p in &pairs {
            for e in [p.a, p.b] {
                if !e.in_range(n, f) {
                    return Err(Error::Range(format!(
                        "pair {p}: edge {e} outside labels 0..{n} / tiles 1..={f}"
                    )));
                }
            }
            if p.a >= p.b {
                return Err(Error::NotMatching(format!("pair {p} is not normalised")));
            }
            let (ia, ib) = (p.a.index(n), p.b.index(n));
            for (e, i) in [(p.a, ia), (p.b, ib)] {
                if partner[i].is_some() {
                    return Err(Error::NotMatching(format!("edge {e} occurs twice (again in pair {p})")));
                }
            }
            partner[ia] = Some((ib, p.sign));
            partner[ib] = Some((ia, p.sign));
        }
        if let Some(i) = partner.iter().position(Option::is_none) {
            return Err(Error::NotMatching(format!(
                "edge {} is unpaired",
                EdgeRef::from_index(i, n)
            )));
        }
        let mut pairs = pairs;
        pairs.sort();
        Ok(Diagram {
            n,
            f,
            pairs,
            partner: partner.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Builds a diagram from `(label_a, tile_a, label_b, tile_b, sign)` tuples.
    pub fn from_tuples(n: usize, f: usize, tuples: &[(usize, usize, usize, usize, i8)]) -> Result<Self> {
        let pairs = tuples
            .iter()
            .map(|&(la, ta, lb, tb, s)| {
                let sign =
                    Sign::from_value(s as i64).ok_or_else(|| Error::Parse(format!("sign {s} is not +1 or -1")))?;
                EdgePair::new(EdgeRef::new(la, ta), EdgeRef::new(lb, tb), sign)
            })
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(n, f, pairs)
    }

    /// Builds an orientable-mode diagram: tiles `1..=split` agree with the
    /// surface orientation, the rest disagree, and signs follow from that.
    pub fn with_split(n: usize, f: usize, split: usize, pairs: &[(usize, usize, usize, usize)]) -> Result<Self> {
        let tuples: Vec<_> = pairs
            .iter()
            .map(|&(la, ta, lb, tb)| (la, ta, lb, tb, split_sign(split, ta, tb).value()))
            .collect();
        Diagram::from_tuples(n, f, &tuples)
    }

    pub(crate) fn from_keys(n: usize, f: usize, keys: &[u32]) -> Self {
        let pairs = keys
            .iter()
            .map(|&k| {
                let (a, b, sign) = unpack_key(k);
                EdgePair {
                    a: EdgeRef::from_index(a, n),
                    b: EdgeRef::from_index(b, n),
                    sign,
                }
            })
            .collect();
        Diagram::new(n, f, pairs).expect("keys describe a perfect matching")
    }

    pub(crate) fn keys(&self) -> Vec<u32> {
        self.pairs
            .iter()
            .map(|p| pair_key(p.a.index(self.n), p.b.index(self.n), p.sign))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    /// Pairs in sorted order.
    pub fn pairs(&self) -> &[EdgePair] {
        &self.pairs
    }

    pub fn partner(&self, e: EdgeRef) -> (EdgeRef, Sign) {
        let (j, s) = self.partner[e.index(self.n)];
        (EdgeRef::from_index(j, self.n), s)
    }

    pub(crate) fn partner_index(&self, e: usize) -> (usize, Sign) {
        self.partner[e]
    }

    pub fn apply_symmetry(&self, g: &SymmetryElement) -> Result<Diagram> {
        g.validate(self.n, self.f)?;
        let pairs = self
            .pairs
            .iter()
            .map(|p| EdgePair::new(g.map_edge(p.a, self.n), g.map_edge(p.b, self.n), p.sign))
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(self.n, self.f, pairs)
    }

    /// Least image of the diagram under the relabelling group of `mode`.
    pub fn canonical_form(&self, mode: Mode) -> Diagram {
        let tables = GroupTables::new(self.n, self.f, mode);
        Diagram::from_keys(self.n, self.f, &tables.canonical_keys(&self.keys()))
    }

    pub fn is_canonical(&self, mode: Mode) -> bool {
        self.canonical_form(mode) == *self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DiagramJson::from(self)).expect("diagram serialises")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DiagramJson::from(self)).expect("diagram serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiagramJson = serde_json::from_str(text).map_err(|e| Error::Parse(format!("diagram JSON: {e}")))?;
        raw.try_into()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn split_sign(split: usize, ta: usize, tb: usize) -> Sign {
    if (ta <= split) == (tb <= split) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramJson {
    n: usize,
    f: usize,
    pairs: Vec<PairJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    a: [usize; 2],
    b: [usize; 2],
    sign: i64,
}

impl From<&Diagram> for DiagramJson {
    fn from(d: &Diagram) -> Self {
        DiagramJson {
            n: d.n,
            f: d.f,
            pairs: d
                .pairs
                .iter()
                .map(|p| PairJson {
                    a: [p.a.label, p.a.tile],
                    b: [p.b.label, p.b.tile],
                    sign: p.sign.value() as i64,
                })
                .collect(),
        }
    }
}

impl TryFrom<DiagramJson> for Diagram {
    type Error = Error;

    fn try_from(raw: DiagramJson) -> Result<Diagram> {
        let pairs = raw
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let sign = Sign::from_value(p.sign)
                    .ok_or_else(|| Error::Parse(format!("pair #{i}: sign {} is not +1 or -1", p.sign)))?;
                let a = EdgeRef::new(p.a[0], p.a[1]);
                let b = EdgeRef::new(p.b[0], p.b[1]);
                for e in [a, b] {
                    if !e.in_range(raw.n, raw.f) {
                        return Err(Error::Range(format!(
                            "pair #{i}: edge [{}, {}] outside labels 0..{} / tiles 1..={}",
                            e.label, e.tile, raw.n, raw.f
                        )));
                    }
                }
                EdgePair::new(a, b, sign).map_err(|e| Error::NotMatching(format!("pair #{i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(raw.n, raw.f, pairs)
    }
}

/// Which relabellings count as "the same tiling".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Any prototile relabelling and any tile permutation.
    General,
    /// Tiles `1..=split` agree with a fixed surface orientation; tile
    /// permutations must preserve the split, or exchange its two halves when
    /// `2 * split == f`.
    Orientable { split: usize },
}

impl Mode {
    pub fn orientable(f: usize, split: usize) -> Result<Mode> {
        if split > f || 2 * split < f {
            return Err(Error::Param(format!(
                "split s = {split} must satisfy f/2 <= s <= f (f = {f})"
            )));
        }
        Ok(Mode::Orientable { split })
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::Orientable { .. } => "orientable",
        }
    }

    pub fn split(self) -> Option<usize> {
        match self {
            Mode::General => None,
            Mode::Orientable { split } => Some(split),
        }
    }

    fn admits(self, f: usize, perm: &[usize]) -> bool {
        let Mode::Orientable { split } = self else {
            return true;
        };
        let keeps = perm.iter().enumerate().all(|(p, &q)| (p < split) == (q <= split));
        let swaps = 2 * split == f && perm.iter().enumerate().all(|(p, &q)| (p < split) == (q > f - split));
        keeps || swaps
    }
}

/// A relabelling: the prototile map `i -> shift ± i` combined with a tile
/// permutation. `tile_perm[p - 1]` is the image of tile `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryElement {
    pub reflect: bool,
    pub shift: usize,
    pub tile_perm: Vec<usize>,
}

impl SymmetryElement {
    pub fn identity(f: usize) -> Self {
        SymmetryElement {
            reflect: false,
            shift: 0,
            tile_perm: (1..=f).collect(),
        }
    }

    pub fn validate(&self, n: usize, f: usize) -> Result<()> {
        if self.shift >= n {
            return Err(Error::Param(format!("shift {} not in Z_{n}", self.shift)));
        }
        if self.tile_perm.len() != f {
            return Err(Error::Param(format!(
                "tile permutation has {} entries, expected {f}",
                self.tile_perm.len()
            )));
        }
        let mut seen = vec![false; f + 1];
        for &q in &self.tile_perm {
            if q == 0 || q > f || std::mem::replace(&mut seen[q], true) {
                return Err(Error::Param(format!(
                    "{:?} is not a permutation of 1..={f}",
                    self.tile_perm
                )));
            }
        }
        Ok(())
    }

    fn map_label(&self, i: usize, n: usize) -> usize {
        if self.reflect {
            (self.shift + n - i) % n
        } else {
            (self.shift + i) % n
        }
    }

    pub fn map_corner(&self, c: CornerRef, n: usize) -> CornerRef {
        CornerRef::new(self.map_label(c.label, n), self.tile_perm[c.tile - 1])
    }

    pub fn map_edge(&self, e: EdgeRef, n: usize) -> EdgeRef {
        let label = if self.reflect {
            (self.shift + 2 * n - e.label - 1) % n
        } else {
            (self.shift + e.label) % n
        };
        EdgeRef::new(label, self.tile_perm[e.tile - 1])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SymmetryElement, n: usize) -> SymmetryElement {
        let shift = if self.reflect {
            (self.shift + n - other.shift % n) % n
        } else {
            (self.shift + other.shift) % n
        };
        SymmetryElement {
            reflect: self.reflect != other.reflect,
            shift,
            tile_perm: other.tile_perm.iter().map(|&q| self.tile_perm[q - 1]).collect(),
        }
    }

    pub fn inverse(&self, n: usize) -> SymmetryElement {
        let mut tile_perm = vec![0; self.tile_perm.len()];
        for (p, &q) in self.tile_perm.iter().enumerate() {
            tile_perm[q - 1] = p + 1;
        }
        let shift = if self.reflect { self.shift } else { (n - self.shift) % n };
        SymmetryElement {
            reflect: self.reflect,
            shift,
            tile_perm,
        }
    }
}

/// Every element of the relabelling group for `(n, f, mode)`.
pub fn symmetry_group(n: usize, f: usize, mode: Mode) -> Vec<SymmetryElement> {
    let perms: Vec<Vec<usize>> = permutations(f).into_iter().filter(|p| mode.admits(f, p)).collect();
    let mut group = Vec::with_capacity(2 * n * perms.len());
    for perm in &perms {
        for reflect in [false, true] {
            for shift in 0..n {
                group.push(SymmetryElement {
                    reflect,
                    shift,
                    tile_perm: perm.clone(),
                });
            }
        }
    }
    group
}

/// All permutations of `1..=f` in lexicographic order.
fn permutations(f: usize) -> Vec<Vec<usize>> {
    fn extend(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for q in 0..used.len() {
            if !used[q] {
                used[q] = true;
                cur.push(q + 1);
                extend(cur, used, out);
                cur.pop();
                used[q] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(f), &mut vec![false; f], &mut out);
    out
}

/// The group as dense edge-index maps, for fast canonicalisation.
#[derive(Clone, Debug)]
pub(crate) struct GroupTables {
    maps: Vec<Vec<u16>>,
}

impl GroupTables {
    pub fn new(n: usize, f: usize, mode: Mode) -> Self {
        let maps = symmetry_group(n, f, mode)
            .iter()
            .map(|g| {
                (0..n * f)
                    .map(|e| g.map_edge(EdgeRef::from_index(e, n), n).index(n) as u16)
                    .collect()
            })
            .collect();
        GroupTables { maps }
    }

    #[inline]
    fn image_into(map: &[u16], keys: &[u32], out: &mut Vec<u32>) {
        out.clear();
        out.extend(keys.iter().map(|&k| {
            let (a, b, sign) = unpack_key(k);
            let (x, y) = (map[a] as usize, map[b] as usize);
            if x < y {
                pair_key(x, y, sign)
            } else {
                pair_key(y, x, sign)
            }
        }));
        out.sort_unstable();
    }

    /// Least sorted image of a key set over the whole group.
    pub fn canonical_keys(&self, keys: &[u32]) -> Vec<u32> {
        let mut best: Vec<u32> = keys.to_vec();
        best.sort_unstable();
        let mut scratch = Vec::with_capacity(keys.len());
        for map in &self.maps {
            Self::image_into(map, keys, &mut scratch);
            if scratch < best {
                std::mem::swap(&mut best, &mut scratch);
            }
        }
        best
    }

    /// `false` when some group element maps the sorted key set `keys` to a
    /// lexicographically smaller sorted set.
    pub fn is_minimal(&self, keys: &[u32], scratch: &mut Vec<u32>) -> bool {
        self.maps.iter().all(|map| {
            Self::image_into(map, keys, scratch);
            scratch.as_slice() >= keys
        })
    }
}
