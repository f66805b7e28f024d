//! ASCII VTK unstructured-grid files.

use std::fmt::Write as _;
use std::path::Path;

use crate::dg::{S11, S12, S22, V1, V2};
use crate::driver::Simulation;
use crate::error::{Error, Result};
use crate::material::Sym2;
use crate::mesh::Mesh;
use crate::phase_field::max_principal_stress;

/// Scalar or vector data per vertex.
#[derive(Debug, Clone)]
pub struct PointField<'a> {
    pub name: &'a str,
    pub components: usize,
    pub values: &'a [f64],
}

/// Scalar or vector data per cell.
#[derive(Debug, Clone)]
pub struct CellField<'a> {
    pub name: &'a str,
    pub components: usize,
    pub values: &'a [f64],
}

fn data_array(out: &mut String, name: &str, components: usize, values: &[f64]) {
    let _ = writeln!(
        out,
        "        <DataArray type=\"Float64\" Name=\"{name}\" NumberOfComponents=\"{components}\" format=\"ascii\">"
    );
    for chunk in values.chunks(components.max(1) * 4) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "          {}", line.join(" "));
    }
    out.push_str("        </DataArray>\n");
}

pub fn format_vtu(mesh: &Mesh, points: &[PointField], cells: &[CellField]) -> Result<String> {
    let nv = mesh.num_vertices();
    let nc = mesh.num_cells();
    for f in points {
        if f.values.len() != nv * f.components {
            return Err(Error::Dimension {
                expected: nv * f.components,
                actual: f.values.len(),
            });
        }
    }
    for f in cells {
        if f.values.len() != nc * f.components {
            return Err(Error::Dimension {
                expected: nc * f.components,
                actual: f.values.len(),
            });
        }
    }
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    out.push_str("<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n");
    out.push_str("  <UnstructuredGrid>\n");
    let _ = writeln!(out, "    <Piece NumberOfPoints=\"{nv}\" NumberOfCells=\"{nc}\">");
    out.push_str("      <Points>\n");
    let coords: Vec<f64> = mesh.vertices().iter().flat_map(|p| [p[0], p[1], 0.0]).collect();
    data_array(&mut out, "Points", 3, &coords);
    out.push_str("      </Points>\n");
    out.push_str("      <Cells>\n");
    out.push_str("        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n");
    for c in mesh.cells() {
        let _ = writeln!(out, "          {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    out.push_str("        </DataArray>\n");
    out.push_str("        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n");
    let offsets: Vec<String> = (1..=nc).map(|i| (4 * i).to_string()).collect();
    for chunk in offsets.chunks(16) {
        let _ = writeln!(out, "          {}", chunk.join(" "));
    }
    out.push_str("        </DataArray>\n");
    out.push_str("        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n");
    // 9 = VTK_QUAD
    for chunk in vec!["9"; nc].chunks(32) {
        let _ = writeln!(out, "          {}", chunk.join(" "));
    }
    out.push_str("        </DataArray>\n");
    out.push_str("      </Cells>\n");
    out.push_str("      <PointData>\n");
    for f in points {
        data_array(&mut out, f.name, f.components, f.values);
    }
    out.push_str("      </PointData>\n");
    out.push_str("      <CellData>\n");
    for f in cells {
        data_array(&mut out, f.name, f.components, f.values);
    }
    out.push_str("      </CellData>\n");
    out.push_str("    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n");
    Ok(out)
}

pub fn write_vtu(mesh: &Mesh, points: &[PointField], cells: &[CellField], path: &Path) -> Result<()> {
    std::fs::write(path, format_vtu(mesh, points, cells)?)?;
    Ok(())
}

/// Phase field and infimum at the vertices; cell averages of speed, stress
/// trace, maximum principal stress and displacement.
pub fn write_snapshot(sim: &Simulation, path: &Path) -> Result<()> {
    let space = sim.space();
    let nb = space.reference().num_basis();
    let values = &sim.state().values;
    let nc = space.num_cells();
    let mut speed = Vec::with_capacity(nc);
    let mut trace = Vec::with_capacity(nc);
    let mut principal = Vec::with_capacity(nc);
    let mut displacement = Vec::with_capacity(3 * nc);
    for c in 0..nc {
        let (mut vol, mut sp, mut tr, mut pr, mut ux, mut uy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for q in 0..nb {
            let w = space.node_weight(c, q);
            let at = |f| values[space.index(c, f, q)];
            let s = Sym2::new(at(S11), at(S22), at(S12));
            let u = sim.displacement().at_node(space, c, q);
            vol += w;
            sp += w * at(V1).hypot(at(V2));
            tr += w * s.trace();
            pr += w * max_principal_stress(&s);
            ux += w * u[0];
            uy += w * u[1];
        }
        speed.push(sp / vol);
        trace.push(tr / vol);
        principal.push(pr / vol);
        displacement.extend([ux / vol, uy / vol, 0.0]);
    }
    let phase = sim.phase();
    write_vtu(
        sim.mesh(),
        &[
            PointField { name: "s", components: 1, values: &phase.s },
            PointField { name: "s_inf", components: 1, values: &phase.s_inf },
        ],
        &[
            CellField { name: "velocity_magnitude", components: 1, values: &speed },
            CellField { name: "stress_trace", components: 1, values: &trace },
            CellField { name: "max_principal_stress", components: 1, values: &principal },
            CellField { name: "displacement", components: 3, values: &displacement },
        ],
        path,
    )
}
