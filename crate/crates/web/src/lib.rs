//! Browser bindings: classify and draw a pasted diagram, list the two-tile
//! tilings with all edge lengths distinct, and solve the angle equations.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use surftile::convert::{check_pair_conditions, diagram_to_vertexset, vertexset_to_diagram};
use surftile::distinctlen::two_tile_distinct_family;
use surftile::geomfilter::{build_angle_system, check_positive_solution, edge_classes};
use surftile::render::render_svg;
use surftile::topology::classify_surface;
use surftile::{Diagram, VertexSet};

fn parse(text: &str) -> Result<Diagram, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if value.get("vertices").is_some() {
        let vs = VertexSet::from_json(text).map_err(|e| e.to_string())?;
        vertexset_to_diagram(&vs).map_err(|e| e.to_string())
    } else {
        Diagram::from_json(text).map_err(|e| e.to_string())
    }
}

/// Surface, vertex set and SVG drawing of a diagram or vertex set given as JSON.
#[wasm_bindgen]
pub fn classify(text: &str) -> Result<String, String> {
    let d = parse(text)?;
    let report = check_pair_conditions(&d);
    let surface = classify_surface(&d).map_err(|e| e.to_string())?;
    Ok(json!({
        "surface": surface.name.to_string(),
        "chi": surface.chi,
        "orientable": surface.orientable,
        "edge_classes": edge_classes(&d).to_string(),
        "conditions": report.to_string(),
        "vertices": diagram_to_vertexset(&d).to_json_value()["vertices"],
        "svg": render_svg(&d),
    })
    .to_string())
}

/// Exact positive angles (in units of a full turn), or `null` if none exist.
#[wasm_bindgen]
pub fn angles(text: &str) -> Result<String, String> {
    let d = parse(text)?;
    let verdict = check_positive_solution(&build_angle_system(&diagram_to_vertexset(&d)));
    Ok(json!({
        "feasible": verdict.feasible,
        "witness": verdict.witness_strings(),
    })
    .to_string())
}

/// The two-tile tilings of `n`-gons with all edge lengths distinct.
#[wasm_bindgen]
pub fn distinct_family(n: u32) -> Result<String, String> {
    if n > 40 {
        return Err("n is limited to 40 in the browser".into());
    }
    let family = two_tile_distinct_family(n as usize).map_err(|e| e.to_string())?;
    let members: Vec<Value> = family
        .iter()
        .map(|m| {
            json!({
                "twisted": m.twisted.indices(),
                "surface": m.surface.name.to_string(),
                "chi": m.surface.chi,
                "diagram": m.diagram.to_json_value(),
                "svg": render_svg(&m.diagram),
            })
        })
        .collect();
    Ok(Value::Array(members).to_string())
}
