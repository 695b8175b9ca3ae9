//! Isomorph-free exhaustive generation of tilings.
//!
//! The search pairs edges in a fixed order: the least unpaired edge is
//! always matched next, so the decided pairs form a prefix of the final
//! sorted pair list. A partial matching is abandoned as soon as
//!
//! * a vertex closes with fewer than three corners,
//! * more vertices close than the target surface allows, or the remaining
//!   corners cannot fill the vertices still missing,
//! * some relabelling maps the decided pairs to a smaller sorted set (the
//!   completed diagram could then not be the least of its orbit).
//!
//! Completed diagrams surviving the last test are exactly the canonical
//! forms, so every equivalence class is emitted once.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::convert::{check_pair_conditions, diagram_to_vertexset, next_index, VertexSet};
use crate::diagram::{pair_key, split_sign, unpack_key, Diagram, EdgePair, EdgeRef, GroupTables, Mode, Sign};
use crate::error::{Error, Result};
use crate::geomfilter::{build_angle_system, check_positive_solution, edge_classes};
use crate::topology::{classify_counts, classify_surface, connectivity, validate_params, Surface, SurfaceClass};

const UNPAIRED: u16 = u16::MAX;

/// Number of pairs decided before the search tree is split into parallel tasks.
const SPLIT_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Breakdown {
    #[default]
    EdgeLengths,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumSpec {
    pub n: usize,
    pub f: usize,
    pub mode: Mode,
    pub target: Option<Surface>,
    pub require_angle_feasible: bool,
    pub breakdown: Breakdown,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Maximum number of search nodes before giving up.
    pub node_budget: Option<u64>,
}

impl EnumSpec {
    pub fn new(n: usize, f: usize, mode: Mode) -> Self {
        EnumSpec {
            n,
            f,
            mode,
            target: None,
            require_angle_feasible: true,
            breakdown: Breakdown::EdgeLengths,
            threads: None,
            node_budget: None,
        }
    }

    pub fn target(mut self, surface: Surface) -> Self {
        self.target = Some(surface);
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.f < 1 {
            return Err(Error::Param(format!(
                "need n >= 3 and f >= 1, got n = {}, f = {}",
                self.n, self.f
            )));
        }
        if !(self.n * self.f).is_multiple_of(2) {
            return Err(Error::Param(format!(
                "n*f = {} is odd: no perfect matching",
                self.n * self.f
            )));
        }
        if self.n * self.f >= 1 << 15 {
            return Err(Error::Param("n*f too large".into()));
        }
        if let Mode::Orientable { split } = self.mode {
            Mode::orientable(self.f, split)?;
        }
        if let Some(surface) = self.target {
            let bounds = validate_params(self.n, self.f, surface.chi())?;
            if !bounds.admissible() {
                return Err(Error::Param(format!(
                    "no tiling of {surface} by {} {}-gons: {}",
                    self.f,
                    self.n,
                    bounds.report()
                )));
            }
            if !surface.orientable && matches!(self.mode, Mode::Orientable { .. }) {
                return Err(Error::Param(format!("orientable mode cannot produce {surface}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Param("threads must be positive".into()));
        }
        Ok(())
    }

    /// Vertex count fixed by the target surface.
    fn target_vertices(&self) -> Option<usize> {
        self.target.map(|s| {
            let v = s.chi() + (self.n * self.f / 2) as i64 - self.f as i64;
            v.max(0) as usize
        })
    }
}

/// One enumerated tiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingRecord {
    pub diagram: Diagram,
    pub vertices: VertexSet,
    pub surface: SurfaceClass,
    pub edge_classes: usize,
    pub angle_feasible: bool,
    pub mode: Mode,
}

impl TilingRecord {
    /// Derives every field from a (canonical) diagram.
    pub fn from_diagram(diagram: Diagram, mode: Mode) -> Result<Self> {
        let surface = classify_surface(&diagram)?;
        Ok(Self::derive(diagram, surface, mode))
    }

    fn derive(diagram: Diagram, surface: SurfaceClass, mode: Mode) -> Self {
        let vertices = diagram_to_vertexset(&diagram);
        let angle_feasible = check_positive_solution(&build_angle_system(&vertices)).feasible;
        let edge_classes = edge_classes(&diagram).count();
        TilingRecord {
            diagram,
            vertices,
            surface,
            edge_classes,
            angle_feasible,
            mode,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "diagram": self.diagram.to_json_value(),
            "vertices": self.vertices.to_json_value()["vertices"],
            "surface": self.surface.name.to_string(),
            "chi": self.surface.chi,
            "orientable": self.surface.orientable,
            "edge_classes": self.edge_classes,
            "angle_feasible": self.angle_feasible,
            "mode": self.mode.name(),
            "split": self.mode.split(),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}

/// A finished subtree of an interrupted search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubtreeCertificate {
    pub prefix: Vec<String>,
    pub records: usize,
}

/// What an interrupted search managed to finish.
#[derive(Clone, Debug)]
pub struct PartialResult {
    pub completed: Vec<SubtreeCertificate>,
    pub pending: usize,
    pub records: Vec<TilingRecord>,
}

struct Shared {
    spec: EnumSpec,
    tables: GroupTables,
    target_vertices: Option<usize>,
    nodes: AtomicU64,
    abort: AtomicBool,
}

enum Trace {
    Closed { key: usize, len: usize },
    Open { len: usize },
}

struct Frame {
    closed_vertices: usize,
    closed_degree: usize,
    closed_excess: usize,
}

struct Search<'a> {
    shared: &'a Shared,
    n: usize,
    edges: usize,
    partner: Vec<u16>,
    sign: Vec<Sign>,
    keys: Vec<u32>,
    frames: Vec<Frame>,
    closed_vertices: usize,
    closed_degree: usize,
    closed_excess: usize,
    scratch: Vec<u32>,
    local_nodes: u64,
    records: Vec<TilingRecord>,
}

impl<'a> Search<'a> {
    fn new(shared: &'a Shared) -> Self {
        let edges = shared.spec.n * shared.spec.f;
        Search {
            shared,
            n: shared.spec.n,
            edges,
            partner: vec![UNPAIRED; edges],
            sign: vec![Sign::Plus; edges],
            keys: Vec::with_capacity(edges / 2),
            frames: Vec::with_capacity(edges / 2),
            closed_vertices: 0,
            closed_degree: 0,
            closed_excess: 0,
            scratch: Vec::with_capacity(edges / 2),
            local_nodes: 0,
            records: Vec::new(),
        }
    }

    fn sign_options(&self, a: usize, b: usize) -> &'static [Sign] {
        match self.shared.spec.mode {
            Mode::General => &[Sign::Minus, Sign::Plus],
            Mode::Orientable { split } => match split_sign(split, a / self.n + 1, b / self.n + 1) {
                Sign::Plus => &[Sign::Plus],
                Sign::Minus => &[Sign::Minus],
            },
        }
    }

    /// Adds the pair and reports whether the partial matching survives
    /// every prune. The pair must be popped either way.
    fn push(&mut self, a: usize, b: usize, sign: Sign) -> bool {
        self.partner[a] = b as u16;
        self.partner[b] = a as u16;
        self.sign[a] = sign;
        self.sign[b] = sign;
        self.keys.push(pair_key(a, b, sign));

        let n = self.n;
        let mut found: [(usize, usize); 4] = [(usize::MAX, 0); 4];
        let mut nfound = 0;
        let mut longest_open = 0;
        let mut short = false;
        for e in [a, b] {
            let tile_base = e - e % n;
            let plus_start = 2 * (tile_base + (e % n + 1) % n);
            let minus_start = 2 * e + 1;
            for start in [plus_start, minus_start] {
                match self.trace(start) {
                    Trace::Closed { key, len } => {
                        short |= len < 3;
                        if !found[..nfound].iter().any(|&(k, _)| k == key) {
                            found[nfound] = (key, len);
                            nfound += 1;
                        }
                    }
                    Trace::Open { len } => longest_open = longest_open.max(len),
                }
            }
        }
        let frame = Frame {
            closed_vertices: nfound,
            closed_degree: found[..nfound].iter().map(|&(_, len)| len).sum(),
            closed_excess: found[..nfound].iter().map(|&(_, len)| len.saturating_sub(3)).sum(),
        };
        self.closed_vertices += frame.closed_vertices;
        self.closed_degree += frame.closed_degree;
        self.closed_excess += frame.closed_excess;
        self.frames.push(frame);

        if short {
            return false;
        }
        if let Some(v) = self.shared.target_vertices {
            let remaining = self.edges - self.closed_degree;
            if self.closed_vertices > v
                || (self.closed_vertices == v && remaining > 0)
                || remaining < 3 * (v - self.closed_vertices)
            {
                return false;
            }
            // Every vertex has degree at least 3, so the degrees above 3 add
            // up to exactly `edges - 3v`. An open chain of `len` corners lies
            // in a vertex of degree at least `len`.
            let slack = self.edges - 3 * v;
            if self.closed_excess + longest_open.saturating_sub(3) > slack {
                return false;
            }
        }
        self.shared.tables.is_minimal(&self.keys, &mut self.scratch)
    }

    fn pop(&mut self) {
        let key = self.keys.pop().expect("pop after push");
        let (a, b, _) = unpack_key(key);
        self.partner[a] = UNPAIRED;
        self.partner[b] = UNPAIRED;
        let frame = self.frames.pop().expect("frame per pair");
        self.closed_vertices -= frame.closed_vertices;
        self.closed_degree -= frame.closed_degree;
        self.closed_excess -= frame.closed_excess;
    }

    /// Follows the traversal from `start`. A closed cycle is identified by
    /// its least corner; an open chain is measured in both directions.
    fn trace(&self, start: usize) -> Trace {
        let lookup = |e: usize| {
            let p = self.partner[e];
            (p != UNPAIRED).then(|| (p as usize, self.sign[e]))
        };
        let mut cur = start;
        let mut least = start / 2;
        let mut len = 0;
        while let Some(next) = next_index(self.n, cur, lookup) {
            len += 1;
            if next == start {
                return Trace::Closed { key: least, len };
            }
            least = least.min(next / 2);
            cur = next;
        }
        // Walking backwards is walking forwards from the mirrored corner.
        cur = start ^ 1;
        while let Some(next) = next_index(self.n, cur, lookup) {
            len += 1;
            cur = next;
        }
        Trace::Open { len: len + 1 }
    }

    fn first_unpaired(&self) -> Option<usize> {
        self.partner.iter().position(|&p| p == UNPAIRED)
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(256) {
            let total = self.shared.nodes.fetch_add(256, Ordering::Relaxed) + 256;
            if let Some(budget) = self.shared.spec.node_budget {
                if total > budget {
                    self.shared.abort.store(true, Ordering::Relaxed);
                }
            }
        }
        !self.shared.abort.load(Ordering::Relaxed)
    }

    /// Depth-first search below the current node. Returns `false` if aborted.
    fn dfs(&mut self) -> bool {
        if !self.tick() {
            return false;
        }
        let Some(a) = self.first_unpaired() else {
            self.leaf();
            return true;
        };
        for b in a + 1..self.edges {
            if self.partner[b] != UNPAIRED {
                continue;
            }
            for &sign in self.sign_options(a, b) {
                let ok = self.push(a, b, sign) && self.dfs();
                let aborted = !ok && self.shared.abort.load(Ordering::Relaxed);
                self.pop();
                if aborted {
                    return false;
                }
            }
        }
        true
    }

    /// Collects the prefixes at `depth` pairs (or complete leaves earlier).
    fn frontier(&mut self, depth: usize, out: &mut Vec<Vec<u32>>) {
        if self.keys.len() == depth {
            out.push(self.keys.clone());
            return;
        }
        let Some(a) = self.first_unpaired() else {
            out.push(self.keys.clone());
            return;
        };
        for b in a + 1..self.edges {
            if self.partner[b] != UNPAIRED {
                continue;
            }
            for &sign in self.sign_options(a, b) {
                if self.push(a, b, sign) {
                    self.frontier(depth, out);
                }
                self.pop();
            }
        }
    }

    fn leaf(&mut self) {
        let spec = &self.shared.spec;
        let diagram = Diagram::from_keys(spec.n, spec.f, &self.keys);
        if !connectivity(&diagram) {
            return;
        }
        debug_assert_eq!(self.closed_vertices, crate::convert::vertex_cycles(&diagram).len());
        let Ok(surface) = classify_counts(&diagram, self.closed_vertices) else {
            return;
        };
        if spec.target.is_some_and(|t| t != surface.name) {
            return;
        }
        let record = TilingRecord::derive(diagram, surface, spec.mode);
        if spec.require_angle_feasible && !record.angle_feasible {
            return;
        }
        self.records.push(record);
    }
}

fn run_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Param(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn sort_records(records: &mut [TilingRecord]) {
    records.sort_by_cached_key(|r| r.diagram.keys());
}

fn describe_prefix(n: usize, keys: &[u32]) -> Vec<String> {
    keys.iter()
        .map(|&k| {
            let (a, b, sign) = unpack_key(k);
            EdgePair {
                a: EdgeRef::from_index(a, n),
                b: EdgeRef::from_index(b, n),
                sign,
            }
            .to_string()
        })
        .collect()
}

/// Every tiling matching `spec`, one per equivalence class, sorted by
/// canonical encoding.
pub fn enumerate(spec: &EnumSpec) -> Result<Vec<TilingRecord>> {
    spec.validate()?;
    let shared = Shared {
        spec: spec.clone(),
        tables: GroupTables::new(spec.n, spec.f, spec.mode),
        target_vertices: spec.target_vertices(),
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    };
    let mut prefixes = Vec::new();
    Search::new(&shared).frontier(SPLIT_DEPTH, &mut prefixes);

    let results: Vec<Option<Vec<TilingRecord>>> = run_pool(spec.threads, || {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut search = Search::new(&shared);
                for &k in prefix {
                    let (a, b, sign) = unpack_key(k);
                    let survived = search.push(a, b, sign);
                    debug_assert!(survived);
                }
                search.dfs().then_some(search.records)
            })
            .collect()
    })?;

    if results.iter().any(Option::is_none) {
        let mut completed = Vec::new();
        let mut records = Vec::new();
        for (prefix, result) in prefixes.iter().zip(results) {
            if let Some(rs) = result {
                completed.push(SubtreeCertificate {
                    prefix: describe_prefix(spec.n, prefix),
                    records: rs.len(),
                });
                records.extend(rs);
            }
        }
        sort_records(&mut records);
        let pending = prefixes.len() - completed.len();
        return Err(Error::BudgetExceeded(Box::new(PartialResult {
            completed,
            pending,
            records,
        })));
    }
    let mut records: Vec<TilingRecord> = results.into_iter().flatten().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Brute-force reference: every matching and sign assignment, filtered
/// and deduplicated by canonical form only at the end.
pub fn oracle_enumerate(spec: &EnumSpec) -> Result<Vec<TilingRecord>> {
    spec.validate()?;
    let edges = spec.n * spec.f;
    let limit = match spec.mode {
        Mode::General => 16,
        Mode::Orientable { .. } => 18,
    };
    if edges > limit {
        return Err(Error::Param(format!(
            "oracle limited to n*f <= {limit} in {} mode, got {edges}",
            spec.mode.name()
        )));
    }
    let tables = GroupTables::new(spec.n, spec.f, spec.mode);

    let matchings = all_matchings(edges);
    let canon: HashSet<Vec<u32>> = run_pool(spec.threads, || {
        matchings
            .par_iter()
            .fold(HashSet::new, |mut acc, m| {
                for signs in sign_assignments(spec, m) {
                    let tuples: Vec<(usize, usize, usize, usize, i8)> = m
                        .iter()
                        .zip(&signs)
                        .map(|(&(a, b), s)| {
                            let (ea, eb) = (EdgeRef::from_index(a, spec.n), EdgeRef::from_index(b, spec.n));
                            (ea.label, ea.tile, eb.label, eb.tile, s.value())
                        })
                        .collect();
                    let d = Diagram::from_tuples(spec.n, spec.f, &tuples).expect("matching");
                    if !check_pair_conditions(&d).passed() || !connectivity(&d) {
                        continue;
                    }
                    let surface = classify_surface(&d).expect("connected");
                    if spec.target.is_some_and(|t| t != surface.name) {
                        continue;
                    }
                    acc.insert(tables.canonical_keys(&d.keys()));
                }
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    })?;

    let mut records: Vec<TilingRecord> = canon
        .into_iter()
        .map(|keys| TilingRecord::from_diagram(Diagram::from_keys(spec.n, spec.f, &keys), spec.mode))
        .collect::<Result<Vec<_>>>()?;
    records.retain(|r| !spec.require_angle_feasible || r.angle_feasible);
    sort_records(&mut records);
    Ok(records)
}

/// All perfect matchings on `0..edges` as sorted pair lists.
fn all_matchings(edges: usize) -> Vec<Vec<(usize, usize)>> {
    fn extend(used: &mut [bool], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some(a) = used.iter().position(|u| !u) else {
            out.push(cur.clone());
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if !used[b] {
                used[b] = true;
                cur.push((a, b));
                extend(used, cur, out);
                cur.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }
    let mut out = Vec::new();
    if edges.is_multiple_of(2) {
        extend(&mut vec![false; edges], &mut Vec::new(), &mut out);
    }
    out
}

fn sign_assignments(spec: &EnumSpec, m: &[(usize, usize)]) -> Vec<Vec<Sign>> {
    match spec.mode {
        Mode::Orientable { split } => vec![m
            .iter()
            .map(|&(a, b)| split_sign(split, a / spec.n + 1, b / spec.n + 1))
            .collect()],
        Mode::General => (0u32..1 << m.len())
            .map(|mask| {
                (0..m.len())
                    .map(|i| if mask >> i & 1 == 1 { Sign::Plus } else { Sign::Minus })
                    .collect()
            })
            .collect(),
    }
}

/// Tiling counts broken down by number of edge-length classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    rows: BTreeMap<(Surface, usize, Mode), Vec<u64>>,
    breakdown: Breakdown,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, record: &TilingRecord) {
        let n = record.diagram.n();
        let counts = self
            .rows
            .entry((record.surface.name, n, record.mode))
            .or_insert_with(|| vec![0; n]);
        counts[record.edge_classes - 1] += 1;
    }

    /// Makes sure a row exists even when nothing was counted.
    pub fn ensure_row(&mut self, surface: Surface, n: usize, mode: Mode) {
        self.rows.entry((surface, n, mode)).or_insert_with(|| vec![0; n]);
    }

    pub fn merge(&mut self, other: CountTable) {
        for (key, counts) in other.rows {
            let row = self.rows.entry(key).or_insert_with(|| vec![0; counts.len()]);
            for (r, c) in row.iter_mut().zip(counts) {
                *r += c;
            }
        }
    }

    /// Counts indexed by edge-class count minus one.
    pub fn counts(&self, surface: Surface, n: usize, mode: Mode) -> Option<&[u64]> {
        self.rows.get(&(surface, n, mode)).map(Vec::as_slice)
    }

    pub fn total(&self, surface: Surface, n: usize, mode: Mode) -> Option<u64> {
        self.counts(surface, n, mode).map(|c| c.iter().sum())
    }

    /// CSV with columns from the most edge lengths down to one, as in the
    /// usual presentation of these tables.
    pub fn to_csv(&self) -> String {
        let width = self.rows.keys().map(|&(_, n, _)| n).max().unwrap_or(0);
        let mut out = String::from("surface,n,mode,split");
        for k in (1..=width).rev() {
            write!(out, ",len_{k}").unwrap();
        }
        out.push_str(",total\n");
        let mut keys: Vec<_> = self.rows.keys().copied().collect();
        keys.sort_by_key(|&(surface, n, mode)| (surface, n, mode.split().map(Reverse)));
        for key in keys {
            let (surface, n, mode) = key;
            let counts = &self.rows[&key];
            let split = mode.split().map(|s| s.to_string()).unwrap_or_default();
            write!(out, "{surface},{n},{},{split}", mode.name()).unwrap();
            for k in (1..=width).rev() {
                match (self.breakdown, counts.get(k - 1)) {
                    (Breakdown::EdgeLengths, Some(c)) => write!(out, ",{c}").unwrap(),
                    _ => out.push(','),
                }
            }
            writeln!(out, ",{}", counts.iter().sum::<u64>()).unwrap();
        }
        out
    }
}

pub fn count_table(spec: &EnumSpec) -> Result<CountTable> {
    let records = enumerate(spec)?;
    let mut table = CountTable {
        breakdown: spec.breakdown,
        ..CountTable::default()
    };
    if let Some(surface) = spec.target {
        table.ensure_row(surface, spec.n, spec.mode);
    }
    for r in &records {
        table.add(r);
    }
    Ok(table)
}
