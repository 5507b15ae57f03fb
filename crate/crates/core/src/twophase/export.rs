//! CSV export of meshes and nodal solutions.
//!
//! * vertices: `vertex,x,y,outer,interface`
//! * cells: `cell,v0,v1,v2,phase`
//! * solution: `dof,x,y,u0[,u1...]`
//!
//! Floats use 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::mesh::InterfaceMesh;
use super::problem::TwoPhaseSolution;
use crate::error::Result;
use crate::textio::fmt17;

pub fn vertices_csv(mesh: &InterfaceMesh) -> String {
    let mut s = String::from("vertex,x,y,outer,interface\n");
    for (i, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{}",
            fmt17(p[0]),
            fmt17(p[1]),
            u8::from(mesh.on_outer[i]),
            u8::from(mesh.interface_param[i].is_some())
        );
    }
    s
}

pub fn cells_csv(mesh: &InterfaceMesh) -> String {
    let mut s = String::from("cell,v0,v1,v2,phase\n");
    for (k, t) in mesh.triangles.iter().enumerate() {
        let _ = writeln!(s, "{k},{},{},{},{}", t[0], t[1], t[2], mesh.phases[k].name());
    }
    s
}

pub fn solution_csv(sol: &TwoPhaseSolution) -> String {
    let mut s = String::from("dof,x,y");
    for c in 0..sol.components() {
        let _ = write!(s, ",u{c}");
    }
    s.push('\n');
    for d in 0..sol.space.ndof {
        let p = sol.space.dof_points[d];
        let _ = write!(s, "{d},{},{}", fmt17(p[0]), fmt17(p[1]));
        for c in 0..sol.components() {
            let _ = write!(s, ",{}", fmt17(sol.values[c][d]));
        }
        s.push('\n');
    }
    s
}

/// Write `vertices.csv`, `cells.csv` and, when given, `solution.csv` into `dir`.
pub fn write_csv(dir: &Path, mesh: &InterfaceMesh, sol: Option<&TwoPhaseSolution>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = vec![(dir.join("vertices.csv"), vertices_csv(mesh)), (dir.join("cells.csv"), cells_csv(mesh))];
    if let Some(sol) = sol {
        files.push((dir.join("solution.csv"), solution_csv(sol)));
    }
    let mut out = Vec::new();
    for (path, text) in files {
        std::fs::write(&path, text)?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::{Contour, PatchVorticity};
    use crate::twophase::{mesh_from_contour, solve_velocity_2d, OuterBoundary, SolveOptions};

    #[test]
    fn row_counts_match_the_mesh() {
        let m = mesh_from_contour(&Contour::circle(1.0, 4), 0.3, OuterBoundary::Ball { radius: 3.0 }).unwrap();
        let s = solve_velocity_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
        assert_eq!(vertices_csv(&m).lines().count(), m.vertices.len() + 1);
        assert_eq!(cells_csv(&m).lines().count(), m.triangles.len() + 1);
        let text = solution_csv(&s);
        assert!(text.starts_with("dof,x,y,u0,u1\n"));
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').skip(1).map(|t| t.parse().unwrap()).collect();
        assert_eq!(row[2], s.values[0][0]);
    }
}
