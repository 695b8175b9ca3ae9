//! Surface classification: connectivity, Euler characteristic and
//! orientability of the glued surface, plus the admissible parameter range.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::convert::vertex_cycles;
use crate::diagram::{Diagram, Sign};
use crate::error::{Error, Result};
use crate::report::ValidityReport;
use crate::unionfind::{ParityUnionFind, UnionFind};

/// A closed surface named by genus: `gT2` (orientable) or `gP2`
/// (non-orientable, `g` cross-caps). The sphere is `S2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surface {
    pub orientable: bool,
    pub genus: u32,
}

impl Surface {
    pub fn from_chi(chi: i64, orientable: bool) -> Result<Surface> {
        let genus = if orientable {
            if chi > 2 || chi % 2 != 0 {
                return Err(Error::Param(format!("no orientable surface has chi = {chi}")));
            }
            (2 - chi) / 2
        } else {
            if chi > 1 {
                return Err(Error::Param(format!("no non-orientable surface has chi = {chi}")));
            }
            2 - chi
        };
        Ok(Surface {
            orientable,
            genus: genus as u32,
        })
    }

    pub fn chi(self) -> i64 {
        if self.orientable {
            2 - 2 * self.genus as i64
        } else {
            2 - self.genus as i64
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.orientable, self.genus) {
            (true, 0) => write!(f, "S2"),
            (true, g) => write!(f, "{g}T2"),
            (false, g) => write!(f, "{g}P2"),
        }
    }
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Surface> {
        if s == "S2" {
            return Ok(Surface {
                orientable: true,
                genus: 0,
            });
        }
        let bad = || Error::Parse(format!("surface name {s:?} is not of the form <g>T2 or <g>P2"));
        let (digits, kind) = s.split_at(s.len().checked_sub(2).ok_or_else(bad)?);
        let genus: u32 = digits.parse().map_err(|_| bad())?;
        if genus == 0 || digits.starts_with('0') || digits.starts_with('+') {
            return Err(bad());
        }
        match kind {
            "T2" => Ok(Surface {
                orientable: true,
                genus,
            }),
            "P2" => Ok(Surface {
                orientable: false,
                genus,
            }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Surface {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceClass {
    pub connected: bool,
    pub chi: i64,
    pub orientable: bool,
    pub vertices: usize,
    pub name: Surface,
}

/// Whether the tile graph (tiles joined by cross-tile pairs) is connected.
pub fn connectivity(d: &Diagram) -> bool {
    let mut uf = UnionFind::new(d.f());
    for p in d.pairs() {
        uf.union(p.a.tile - 1, p.b.tile - 1);
    }
    uf.count() == 1
}

/// Orientation of each tile relative to tile 1 (`true` = agrees), if the
/// signs admit a consistent choice.
pub fn orientation_classes(d: &Diagram) -> Option<Vec<bool>> {
    let mut uf = ParityUnionFind::new(d.f());
    for p in d.pairs() {
        if !uf.relate(p.a.tile - 1, p.b.tile - 1, p.sign == Sign::Minus) {
            return None;
        }
    }
    let base = uf.find(0).1;
    Some((0..d.f()).map(|t| uf.find(t).1 == base).collect())
}

pub fn is_orientable(d: &Diagram) -> bool {
    orientation_classes(d).is_some()
}

pub fn classify_surface(d: &Diagram) -> Result<SurfaceClass> {
    if !connectivity(d) {
        return Err(Error::Disconnected);
    }
    let v = vertex_cycles(d).len();
    classify_counts(d, v)
}

pub(crate) fn classify_counts(d: &Diagram, vertices: usize) -> Result<SurfaceClass> {
    let (n, f) = (d.n() as i64, d.f() as i64);
    let chi = vertices as i64 - n * f / 2 + f;
    let orientable = is_orientable(d);
    Ok(SurfaceClass {
        connected: true,
        chi,
        orientable,
        vertices,
        name: Surface::from_chi(chi, orientable)?,
    })
}

/// Which of the bounds on `(n, f, chi)` hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamBounds {
    pub n: usize,
    pub f: usize,
    pub chi: i64,
    /// `f > -2 chi / (n - 2)`
    pub f_above_lower: bool,
    /// `f <= -6 chi / (n - 6)`
    pub f_within_upper: bool,
    /// `n <= 3(2 - chi)` for odd `n`, `n <= 6(1 - chi)` for even `n`
    pub n_within_bound: bool,
    /// `f > -4 chi / (n - 4)`: some edge lengths are forced equal.
    pub distinct_lengths_impossible: bool,
}

impl ParamBounds {
    pub fn admissible(&self) -> bool {
        self.f_above_lower && self.f_within_upper && self.n_within_bound
    }

    pub fn report(&self) -> ValidityReport {
        let mut r = ValidityReport::new();
        if !self.f_above_lower {
            r.push(
                "f-lower",
                format!("f = {} <= -2chi/(n-2) = {}/{}", self.f, -2 * self.chi, self.n - 2),
            );
        }
        if !self.f_within_upper {
            r.push(
                "f-upper",
                format!("f = {} > -6chi/(n-6) = {}/{}", self.f, -6 * self.chi, self.n - 6),
            );
        }
        if !self.n_within_bound {
            let bound = if self.n % 2 == 1 {
                3 * (2 - self.chi)
            } else {
                6 * (1 - self.chi)
            };
            r.push("n-bound", format!("n = {} > {bound}", self.n));
        }
        r
    }
}

pub fn validate_params(n: usize, f: usize, chi: i64) -> Result<ParamBounds> {
    if n < 7 {
        return Err(Error::Param(format!("n = {n} must be at least 7")));
    }
    if chi >= 0 {
        return Err(Error::Param(format!("chi = {chi} must be negative")));
    }
    if f < 1 {
        return Err(Error::Param("f must be at least 1".into()));
    }
    let (ni, fi) = (n as i64, f as i64);
    let n_bound = if n % 2 == 1 { 3 * (2 - chi) } else { 6 * (1 - chi) };
    Ok(ParamBounds {
        n,
        f,
        chi,
        f_above_lower: fi * (ni - 2) > -2 * chi,
        f_within_upper: fi * (ni - 6) <= -6 * chi,
        n_within_bound: ni <= n_bound,
        distinct_lengths_impossible: fi * (ni - 4) > -4 * chi,
    })
}
