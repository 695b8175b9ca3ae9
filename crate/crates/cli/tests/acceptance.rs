//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any required criterion fails.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use surftile::convert::{
    check_pair_conditions, check_vertexset, diagram_to_vertexset, next_corner, vertexset_to_diagram, SignedCorner,
};
use surftile::distinctlen::{admissible_surfaces, two_tile_distinct_family};
use surftile::enumerate::{enumerate, oracle_enumerate, EnumSpec, TilingRecord};
use surftile::geomfilter::{build_angle_system, check_positive_solution, edge_classes};
use surftile::topology::{classify_surface, connectivity, validate_params};
use surftile::{Diagram, Mode, Sign, SymmetryElement, Vertex};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_surftile"))
}

fn run_cli(args: &[&str]) -> Result<(String, i32), String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    Ok((
        String::from_utf8_lossy(&out.stdout).into_owned(),
        out.status.code().unwrap_or(-1),
    ))
}

fn signed_vertex(corners: &[(usize, usize, i8)]) -> Vertex {
    Vertex::new(
        corners
            .iter()
            .map(|&(l, t, s)| SignedCorner::new(l, t, if s > 0 { Sign::Plus } else { Sign::Minus }))
            .collect(),
    )
    .unwrap()
}

/// A vertex written with orientation split `s`: corners of tiles `1..=s`
/// carry `+`, the rest `-`.
fn split_vertex(s: usize, corners: &[(usize, usize)]) -> Vertex {
    let signed: Vec<_> = corners
        .iter()
        .map(|&(l, t)| (l, t, if t <= s { 1 } else { -1 }))
        .collect();
    signed_vertex(&signed)
}

fn same_vertices(d: &Diagram, mut expected: Vec<Vertex>) -> bool {
    expected.sort();
    diagram_to_vertexset(d).vertices() == expected.as_slice()
}

fn cross_cap() -> Diagram {
    Diagram::from_tuples(
        7,
        2,
        &[
            (0, 1, 3, 1, 1),
            (6, 2, 2, 2, 1),
            (2, 1, 0, 2, -1),
            (4, 1, 3, 2, 1),
            (6, 1, 4, 2, -1),
            (1, 1, 1, 2, -1),
            (5, 1, 5, 2, 1),
        ],
    )
    .unwrap()
}

fn torus_pair(s: usize) -> Diagram {
    Diagram::with_split(
        7,
        2,
        s,
        &[
            (0, 1, 2, 1),
            (4, 1, 6, 1),
            (0, 2, 2, 2),
            (4, 2, 6, 2),
            (1, 1, 1, 2),
            (3, 1, 3, 2),
            (5, 1, 5, 2),
        ],
    )
    .unwrap()
}

/// The second worked pairing, with its repeated edge read as edge 4 of tile 1.
fn split_pair(s: usize) -> Diagram {
    Diagram::with_split(
        7,
        2,
        s,
        &[
            (0, 1, 2, 1),
            (1, 1, 4, 1),
            (0, 2, 3, 2),
            (1, 2, 5, 2),
            (3, 1, 2, 2),
            (5, 1, 4, 2),
            (6, 1, 6, 2),
        ],
    )
    .unwrap()
}

fn obstructed() -> Diagram {
    Diagram::with_split(
        7,
        2,
        2,
        &[
            (0, 1, 3, 1),
            (3, 2, 6, 2),
            (1, 1, 1, 2),
            (2, 1, 2, 2),
            (4, 1, 4, 2),
            (5, 1, 5, 2),
            (6, 1, 0, 2),
        ],
    )
    .unwrap()
}

fn surface_name(d: &Diagram) -> String {
    classify_surface(d).map(|s| s.name.to_string()).unwrap_or_default()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let d = cross_cap();
    let cross_cap_vertices = vec![
        signed_vertex(&[(0, 1, 1), (5, 2, -1), (6, 1, -1), (4, 2, 1), (4, 1, 1)]),
        signed_vertex(&[(0, 2, 1), (2, 2, 1), (2, 1, -1)]),
        signed_vertex(&[(1, 1, 1), (3, 1, 1), (1, 2, -1)]),
        signed_vertex(&[(3, 2, 1), (6, 2, 1), (5, 1, 1)]),
    ];
    ensure(same_vertices(&d, cross_cap_vertices), || {
        "cross_cap vertex set differs".into()
    })?;
    let s = classify_surface(&d).map_err(|e| e.to_string())?;
    ensure(s.chi == -1 && !s.orientable && s.name.to_string() == "3P2", || {
        format!("cross_cap classified as {s:?}")
    })?;

    let torus_pair_same = vec![
        split_vertex(2, &[(0, 1), (4, 1), (3, 2), (0, 2), (4, 2), (3, 1)]),
        split_vertex(2, &[(1, 1), (2, 1), (1, 2), (2, 2)]),
        split_vertex(2, &[(5, 1), (6, 1), (5, 2), (6, 2)]),
    ];
    ensure(same_vertices(&torus_pair(2), torus_pair_same), || {
        "first orientable example, s=2: vertex set differs".into()
    })?;
    let torus_pair_mixed = vec![
        split_vertex(1, &[(0, 1), (4, 1), (4, 2), (0, 2), (3, 2), (3, 1)]),
        split_vertex(1, &[(1, 1), (2, 1), (2, 2), (1, 2)]),
        split_vertex(1, &[(5, 1), (6, 1), (6, 2), (5, 2)]),
    ];
    ensure(same_vertices(&torus_pair(1), torus_pair_mixed), || {
        "first orientable example, s=1: vertex set differs".into()
    })?;
    for s in [1, 2] {
        ensure(surface_name(&torus_pair(s)) == "2T2", || {
            format!("first orientable example, s={s}: not 2T2")
        })?;
    }

    let counts = (
        diagram_to_vertexset(&split_pair(2)).len(),
        diagram_to_vertexset(&split_pair(1)).len(),
    );
    ensure(counts == (3, 1), || {
        format!("second orientable example vertex counts {counts:?}")
    })?;
    let names = (surface_name(&split_pair(2)), surface_name(&split_pair(1)));
    ensure(names == ("2T2".into(), "3T2".into()), || {
        format!("second orientable example surfaces {names:?}")
    })?;

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("worked examples exact ({elapsed:.2?})"))
}

fn criterion_2() -> Outcome {
    let verdict = check_positive_solution(&build_angle_system(&diagram_to_vertexset(&obstructed())));
    ensure(!verdict.feasible && verdict.witness.is_none(), || {
        "obstructed diagram reported feasible".into()
    })?;
    for s in [1, 2] {
        let sys = build_angle_system(&diagram_to_vertexset(&torus_pair(s)));
        let verdict = check_positive_solution(&sys);
        let w = verdict
            .witness
            .ok_or_else(|| format!("first orientable example s={s}: no witness"))?;
        ensure(sys.verifies(&w), || {
            format!("s={s}: witness does not satisfy the equations")
        })?;
        ensure(w.iter().all(|x| *x.numer() > 0.into()), || {
            format!("s={s}: witness not positive")
        })?;
    }
    let file = std::env::temp_dir().join(format!("surftile-obstructed-{}.json", std::process::id()));
    std::fs::write(&file, obstructed().to_json()).map_err(|e| e.to_string())?;
    let (out, code) = run_cli(&["check", "--in", file.to_str().unwrap(), "--angles"])?;
    let _ = std::fs::remove_file(&file);
    ensure(code == 1 && out.contains("infeasible"), || {
        format!("cli check --angles gave {code}: {out}")
    })?;
    Ok("obstructed diagram infeasible, worked example has an exact positive witness".into())
}

struct TableCase {
    surface: &'static str,
    n: usize,
    modes: &'static str,
    rows: &'static [&'static str],
    budget: Duration,
    stretch: bool,
}

const MIN: Duration = Duration::from_secs(60);

fn table_cases() -> Vec<TableCase> {
    vec![
        TableCase {
            surface: "3P2",
            n: 7,
            modes: "default",
            rows: &["3P2,7,general,,0,1,6,18,85,191,142,443"],
            budget: 10 * MIN,
            stretch: false,
        },
        TableCase {
            surface: "3P2",
            n: 8,
            modes: "default",
            rows: &["3P2,8,general,,0,0,1,6,18,71,158,104,358"],
            budget: 60 * MIN,
            stretch: false,
        },
        TableCase {
            surface: "2T2",
            n: 7,
            modes: "default",
            rows: &[
                "2T2,7,orientable,2,0,3,2,20,49,110,106,290",
                "2T2,7,orientable,1,0,0,8,20,98,115,104,345",
            ],
            budget: 10 * MIN,
            stretch: false,
        },
        TableCase {
            surface: "2T2",
            n: 8,
            modes: "default",
            rows: &[
                "2T2,8,orientable,2,0,2,6,32,26,105,215,208,594",
                "2T2,8,orientable,1,0,0,6,13,75,155,248,129,626",
            ],
            budget: 60 * MIN,
            stretch: false,
        },
        TableCase {
            surface: "3P2",
            n: 9,
            modes: "default",
            rows: &["3P2,9,general,,0,0,0,0,0,0,16,16,16,48"],
            budget: 60 * MIN,
            stretch: true,
        },
        TableCase {
            surface: "4P2",
            n: 7,
            modes: "default",
            rows: &["4P2,7,general,,1,22,152,725,3179,6947,5542,16568"],
            budget: 60 * MIN,
            stretch: true,
        },
    ]
}

fn run_table(case: &TableCase, threads: usize) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let (out, code) = run_cli(&[
        "table",
        "--n",
        &case.n.to_string(),
        "--f",
        "2",
        "--surface",
        case.surface,
        "--modes",
        case.modes,
        "--threads",
        &threads.to_string(),
    ])?;
    ensure(code == 0, || format!("table exited with {code}"))?;
    Ok((out, start.elapsed()))
}

/// Criterion 3, with the stretch rows reported separately.
fn criterion_3(reports: &mut Vec<String>) -> Outcome {
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for case in table_cases() {
        let label = format!("{} n={}", case.surface, case.n);
        let (csv, elapsed) = run_table(&case, 1)?;
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        let ok = rows == case.rows && elapsed <= case.budget;
        if case.stretch {
            let verdict = if ok { "matches" } else { "differs from" };
            reports.push(format!(
                "{label}: {} {verdict} {} ({elapsed:.1?})",
                rows.join(" | "),
                case.rows.join(" | ")
            ));
        } else if ok {
            summary.push(format!("{label} ({elapsed:.1?})"));
        } else {
            failures.push(format!("{label}: got {rows:?} in {elapsed:.1?}"));
        }
    }
    if failures.is_empty() {
        Ok(format!("table rows exact: {}", summary.join(", ")))
    } else {
        Err(failures.join("; "))
    }
}

fn by_surface(records: &[TilingRecord]) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in records {
        out.entry(r.surface.name.to_string()).or_default().push(r.to_json());
    }
    out
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for spec in [EnumSpec::new(7, 2, Mode::General), EnumSpec::new(8, 1, Mode::General)] {
        let fast = by_surface(&enumerate(&spec).map_err(|e| e.to_string())?);
        let slow = by_surface(&oracle_enumerate(&spec).map_err(|e| e.to_string())?);
        ensure(fast == slow, || {
            format!("n={} f={}: record sets differ", spec.n, spec.f)
        })?;
        let per: Vec<String> = fast.iter().map(|(s, r)| format!("{s}:{}", r.len())).collect();
        notes.push(format!("n={} f={} [{}]", spec.n, spec.f, per.join(" ")));
    }
    Ok(format!("identical record sets, {}", notes.join("; ")))
}

fn random_matching(rng: &mut StdRng) -> Diagram {
    let n = rng.gen_range(7..=10);
    let f = if n % 2 == 1 { 2 } else { rng.gen_range(1..=2) };
    let mut edges: Vec<usize> = (0..n * f).collect();
    edges.shuffle(rng);
    let tuples: Vec<_> = edges
        .chunks(2)
        .map(|c| {
            (
                c[0] % n,
                c[0] / n + 1,
                c[1] % n,
                c[1] / n + 1,
                if rng.gen_bool(0.5) { 1 } else { -1 },
            )
        })
        .collect();
    Diagram::from_tuples(n, f, &tuples).unwrap()
}

fn criterion_5() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = StdRng::seed_from_u64(20240607);
    let mut valid = 0;
    let mut feasible = 0;
    let mut tried = 0;
    while valid < CASES {
        let d = random_matching(&mut rng);
        tried += 1;
        let vs = diagram_to_vertexset(&d);

        let back = vertexset_to_diagram(&vs).map_err(|e| e.to_string())?;
        ensure(back == d, || format!("round trip changed {d}"))?;

        for tile in 1..=d.f() {
            for label in 0..d.n() {
                for sign in [Sign::Plus, Sign::Minus] {
                    let c = SignedCorner::new(label, tile, sign);
                    let back = next_corner(&d, next_corner(&d, c).mirror()).mirror();
                    ensure(back == c, || format!("mirror identity fails at {c} in {d}"))?;
                }
            }
        }

        let by_degree = vs.min_degree() >= 3;
        ensure(check_pair_conditions(&d).passed() == by_degree, || {
            format!("pair conditions disagree on {d}")
        })?;
        ensure(check_vertexset(&vs).passed() == by_degree, || {
            format!("vertex conditions disagree on {d}")
        })?;

        let sys = build_angle_system(&vs);
        ensure(sys.column_totals() == vec![d.f() as u32; d.n()], || {
            format!("column totals wrong for {d}")
        })?;

        if !by_degree || !connectivity(&d) {
            continue;
        }
        valid += 1;
        let base = classify_surface(&d).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let mut tile_perm: Vec<usize> = (1..=d.f()).collect();
            tile_perm.shuffle(&mut rng);
            let g = SymmetryElement {
                reflect: rng.gen_bool(0.5),
                shift: rng.gen_range(0..d.n()),
                tile_perm,
            };
            let s = classify_surface(&d.apply_symmetry(&g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure((s.chi, s.orientable) == (base.chi, base.orientable), || {
                format!("{g:?} changes {d}")
            })?;
        }
        let verdict = check_positive_solution(&sys);
        if let Some(w) = &verdict.witness {
            feasible += 1;
            ensure(sys.verifies(w), || format!("witness fails for {d}"))?;
        }
    }
    Ok(format!(
        "{valid} valid diagrams ({tried} sampled, {feasible} angle witnesses), all properties hold"
    ))
}

fn criterion_6() -> Outcome {
    for n in 7..=12 {
        let family = two_tile_distinct_family(n).map_err(|e| e.to_string())?;
        let mut seen = std::collections::BTreeSet::new();
        for m in &family {
            let d = &m.diagram;
            ensure(edge_classes(d).count() == n, || {
                format!("n={n}: {} has fewer classes", m.twisted)
            })?;
            ensure(diagram_to_vertexset(d).min_degree() >= 4, || {
                format!("n={n}: {} has a low degree", m.twisted)
            })?;
            let b = validate_params(n, 2, m.surface.chi).map_err(|e| e.to_string())?;
            ensure(!b.distinct_lengths_impossible, || {
                format!("n={n}: f > -4chi/(n-4) for {}", m.twisted)
            })?;
            seen.insert(m.surface.name);
        }
        let admissible: std::collections::BTreeSet<_> =
            admissible_surfaces(n).map_err(|e| e.to_string())?.into_iter().collect();
        ensure(seen == admissible, || {
            format!("n={n}: family {seen:?} vs list {admissible:?}")
        })?;
    }
    let seven: Vec<String> = admissible_surfaces(7)
        .map_err(|e| e.to_string())?
        .iter()
        .map(ToString::to_string)
        .collect();
    ensure(seven == ["4P2", "5P2", "6P2", "3T2"], || {
        format!("n=7 surfaces {seven:?}")
    })?;
    Ok("family and admissible lists agree for n=7..12; n=7 gives 4P2 5P2 6P2 3T2".into())
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for case in table_cases().into_iter().filter(|c| !c.stretch) {
        let (reference, _) = run_table(&case, 1)?;
        for threads in [2, 8] {
            let (out, _) = run_table(&case, threads)?;
            ensure(out == reference, || {
                format!("{} n={}: {threads} threads differ", case.surface, case.n)
            })?;
        }
        checked += 1;
    }
    Ok(format!("{checked} tables byte-identical with 1, 2 and 8 threads"))
}

fn main() {
    let mut reports = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 worked examples", criterion_1()),
        ("2 angle filter", criterion_2()),
        ("3 table reproduction", criterion_3(&mut reports)),
        ("4 oracle equivalence", criterion_4()),
        ("5 property suites", criterion_5()),
        ("6 distinct edge lengths", criterion_6()),
        ("7 determinism", criterion_7()),
    ];
    let mut text = String::new();
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(msg) => writeln!(text, "PASS criterion {name}: {msg}").unwrap(),
            Err(msg) => {
                failed += 1;
                writeln!(text, "FAIL criterion {name}: {msg}").unwrap();
            }
        }
    }
    for r in &reports {
        writeln!(text, "REPORT stretch {r}").unwrap();
    }
    print!("{text}");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
