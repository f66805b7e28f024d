//! Mapped quadrilateral meshes.
//!
//! Meshes are generated from a logically Cartesian grid on a reference
//! rectangle whose vertices are pushed through a [`GeometryMap`]. Cells carry
//! bilinear (Q1) geometry on the mapped vertices. The result is stored as a
//! plain cell/face list so the discretizations never look at the grid
//! structure.
//!
//! Cell vertices are ordered counterclockwise, `[(0,0), (1,0), (1,1), (0,1)]`
//! in reference coordinates. Local sides are numbered
//! `0: bottom, 1: right, 2: top, 3: left`, each traversed counterclockwise.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

pub type Point = [f64; 2];

/// Boundary condition attached to a boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Prescribed traction; receives boundary pulses.
    Neumann,
    /// Prescribed (homogeneous) velocity.
    Dirichlet,
    /// Traction free. Same path as `Neumann` with zero data.
    Free,
    /// Zero normal velocity and zero tangential traction.
    Slip,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Neumann => "neumann",
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::Free => "free",
            BoundaryTag::Slip => "slip",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "neumann" => Some(BoundaryTag::Neumann),
            "dirichlet" => Some(BoundaryTag::Dirichlet),
            "free" => Some(BoundaryTag::Free),
            "slip" => Some(BoundaryTag::Slip),
            _ => None,
        }
    }
}

/// Side of the reference rectangle a boundary face lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryTags {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl BoundaryTags {
    pub fn uniform(tag: BoundaryTag) -> Self {
        Self {
            left: tag,
            right: tag,
            bottom: tag,
            top: tag,
        }
    }

    pub fn get(&self, side: Side) -> BoundaryTag {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Rectangle,
    CurvedBar,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Rectangle => "rectangle",
            GeometryKind::CurvedBar => "curved-bar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rectangle" => Some(GeometryKind::Rectangle),
            "curved-bar" => Some(GeometryKind::CurvedBar),
            _ => None,
        }
    }
}

/// Reference rectangle, base grid and the map into physical space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryMap {
    pub kind: GeometryKind,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    /// Cells per direction at level 0.
    pub base_cells: [usize; 2],
}

impl GeometryMap {
    pub fn rectangle(x_range: [f64; 2], y_range: [f64; 2], base_cells: [usize; 2]) -> Self {
        Self {
            kind: GeometryKind::Rectangle,
            x_range,
            y_range,
            base_cells,
        }
    }

    /// Curved bar on `(-0.5, 0.5) x (-1/32, 1/32)` with a 16 x 1 base grid,
    /// so level `m - 4` has mesh size `2^-m`.
    pub fn curved_bar() -> Self {
        Self {
            kind: GeometryKind::CurvedBar,
            x_range: [-0.5, 0.5],
            y_range: [-0.03125, 0.03125],
            base_cells: [16, 1],
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        match self.kind {
            GeometryKind::Rectangle => p,
            GeometryKind::CurvedBar => {
                let [x1, x2] = p;
                let (s, c) = (0.5 * x1 * PI).sin_cos();
                [x1 + x2 * s, c + x2 * c]
            }
        }
    }

    /// `D phi` at a reference point, column `j` is `d phi / d x_j`.
    pub fn jacobian(&self, p: Point) -> [[f64; 2]; 2] {
        match self.kind {
            GeometryKind::Rectangle => [[1.0, 0.0], [0.0, 1.0]],
            GeometryKind::CurvedBar => {
                let [x1, x2] = p;
                let (s, c) = (0.5 * x1 * PI).sin_cos();
                let k = 0.5 * PI;
                [[1.0 + x2 * k * c, s], [-k * s * (1.0 + x2), c]]
            }
        }
    }

    /// Area of the mapped domain by tensor Gauss quadrature of `|det D phi|`.
    pub fn mapped_area(&self, intervals: usize, points: usize) -> f64 {
        let rule = GaussRule::new(points);
        let [x0, x1] = self.x_range;
        let [y0, y1] = self.y_range;
        let hx = (x1 - x0) / intervals as f64;
        let hy = (y1 - y0) / intervals as f64;
        let mut area = 0.0;
        for i in 0..intervals {
            for j in 0..intervals {
                for (px, wx) in rule.points.iter().zip(&rule.weights) {
                    for (py, wy) in rule.points.iter().zip(&rule.weights) {
                        let p = [x0 + (i as f64 + px) * hx, y0 + (j as f64 + py) * hy];
                        let jac = self.jacobian(p);
                        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                        area += wx * wy * hx * hy * det.abs();
                    }
                }
            }
        }
        area
    }

    pub fn default_tags(&self) -> BoundaryTags {
        BoundaryTags {
            left: BoundaryTag::Neumann,
            right: BoundaryTag::Neumann,
            bottom: BoundaryTag::Free,
            top: BoundaryTag::Free,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_range[1] > self.x_range[0]) || !(self.y_range[1] > self.y_range[0]) {
            return Err(Error::Mesh(format!(
                "reference rectangle {:?} x {:?} has non-positive extent",
                self.x_range, self.y_range
            )));
        }
        if self.base_cells[0] == 0 || self.base_cells[1] == 0 {
            return Err(Error::Mesh("base grid needs at least one cell per direction".into()));
        }
        Ok(())
    }
}

/// What lies across a face from its owning cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceNeighbor {
    Interior { cell: usize, side: usize },
    Boundary { side: Side, tag: BoundaryTag },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Owning cell; the normal points out of it.
    pub cell: usize,
    /// Local side index of the face in the owning cell.
    pub side: usize,
    pub neighbor: FaceNeighbor,
    /// Endpoints in the owning cell's counterclockwise order.
    pub vertices: [usize; 2],
    pub normal: Point,
    pub length: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        matches!(self.neighbor, FaceNeighbor::Boundary { .. })
    }
}

/// A quadrature point in a cell or on a face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    /// Reference coordinates in the unit square (cells) or the edge parameter in `[0, 1]` (faces).
    pub reference: Point,
    pub physical: Point,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    map: GeometryMap,
    tags: BoundaryTags,
    level: usize,
    nx: usize,
    ny: usize,
    vertices: Vec<Point>,
    cells: Vec<[usize; 4]>,
    faces: Vec<Face>,
    cell_faces: Vec<[usize; 4]>,
}

/// Bilinear shape functions on the unit square, counterclockwise vertex order.
pub fn q1_shape(p: Point) -> [f64; 4] {
    let [x, y] = p;
    [(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y]
}

/// Reference gradients of [`q1_shape`].
pub fn q1_gradients(p: Point) -> [[f64; 2]; 4] {
    let [x, y] = p;
    [
        [-(1.0 - y), -(1.0 - x)],
        [1.0 - y, -x],
        [y, x],
        [-y, 1.0 - x],
    ]
}

/// Maps the edge parameter of local side `side` to unit-square coordinates.
pub fn side_point(side: usize, s: f64) -> Point {
    match side {
        0 => [s, 0.0],
        1 => [1.0, s],
        2 => [1.0 - s, 1.0],
        3 => [0.0, 1.0 - s],
        _ => panic!("quadrilateral has four sides, got {side}"),
    }
}

pub fn build_mesh(map: &GeometryMap, level: usize) -> Result<Mesh> {
    Mesh::build(map, level, map.default_tags())
}

pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    Mesh::build(&mesh.map, mesh.level + 1, mesh.tags)
}

impl Mesh {
    pub fn build(map: &GeometryMap, level: usize, tags: BoundaryTags) -> Result<Self> {
        map.validate()?;
        let scale = 1usize
            .checked_shl(level as u32)
            .ok_or_else(|| Error::Mesh(format!("refinement level {level} too large")))?;
        let nx = map.base_cells[0] * scale;
        let ny = map.base_cells[1] * scale;
        let [x0, x1] = map.x_range;
        let [y0, y1] = map.y_range;

        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let r = [
                    x0 + (x1 - x0) * i as f64 / nx as f64,
                    y0 + (y1 - y0) * j as f64 / ny as f64,
                ];
                vertices.push(map.apply(r));
            }
        }

        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
            }
        }

        let cid = |i: usize, j: usize| j * nx + i;
        let mut faces = Vec::with_capacity(2 * nx * ny + nx + ny);
        let mut cell_faces = vec![[usize::MAX; 4]; nx * ny];
        let mut push_face = |faces: &mut Vec<Face>, cell: usize, side: usize, neighbor: FaceNeighbor| {
            let c = cells[cell];
            let vertices_of_face = [c[side], c[(side + 1) % 4]];
            let a = vertices[vertices_of_face[0]];
            let b = vertices[vertices_of_face[1]];
            let d = [b[0] - a[0], b[1] - a[1]];
            let length = d[0].hypot(d[1]);
            let index = faces.len();
            faces.push(Face {
                cell,
                side,
                neighbor,
                vertices: vertices_of_face,
                normal: [d[1] / length, -d[0] / length],
                length,
            });
            cell_faces[cell][side] = index;
            if let FaceNeighbor::Interior { cell: other, side: other_side } = neighbor {
                cell_faces[other][other_side] = index;
            }
        };

        for j in 0..ny {
            for i in 0..nx {
                let c = cid(i, j);
                // bottom
                if j == 0 {
                    let n = FaceNeighbor::Boundary { side: Side::Bottom, tag: tags.bottom };
                    push_face(&mut faces, c, 0, n);
                }
                // left
                if i == 0 {
                    let n = FaceNeighbor::Boundary { side: Side::Left, tag: tags.left };
                    push_face(&mut faces, c, 3, n);
                }
                // right
                let n = if i + 1 == nx {
                    FaceNeighbor::Boundary { side: Side::Right, tag: tags.right }
                } else {
                    FaceNeighbor::Interior { cell: cid(i + 1, j), side: 3 }
                };
                push_face(&mut faces, c, 1, n);
                // top
                let n = if j + 1 == ny {
                    FaceNeighbor::Boundary { side: Side::Top, tag: tags.top }
                } else {
                    FaceNeighbor::Interior { cell: cid(i, j + 1), side: 0 }
                };
                push_face(&mut faces, c, 2, n);
            }
        }

        let mesh = Self {
            map: *map,
            tags,
            level,
            nx,
            ny,
            vertices,
            cells,
            faces,
            cell_faces,
        };
        for c in 0..mesh.num_cells() {
            for corner in [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] {
                // det J of a bilinear map is affine in each coordinate
                let det = mesh.jacobian_det(c, corner);
                if !(det > 0.0) {
                    return Err(Error::Mesh(format!(
                        "cell {c} has non-positive Jacobian determinant {det:e}"
                    )));
                }
            }
        }
        Ok(mesh)
    }

    pub fn with_boundary_tags(&self, tags: BoundaryTags) -> Result<Self> {
        Self::build(&self.map, self.level, tags)
    }

    pub fn map(&self) -> &GeometryMap {
        &self.map
    }

    pub fn tags(&self) -> BoundaryTags {
        self.tags
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn grid_dims(&self) -> [usize; 2] {
        [self.nx, self.ny]
    }

    /// Reference-grid spacing in the first direction.
    pub fn mesh_size(&self) -> f64 {
        (self.map.x_range[1] - self.map.x_range[0]) / self.nx as f64
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn cell_faces(&self, cell: usize) -> [usize; 4] {
        self.cell_faces[cell]
    }

    /// Outward normal of `cell` on its local side `side`.
    pub fn outward_normal(&self, cell: usize, side: usize) -> Point {
        let f = &self.faces[self.cell_faces[cell][side]];
        if f.cell == cell {
            f.normal
        } else {
            [-f.normal[0], -f.normal[1]]
        }
    }

    /// Cell and side on the other side of local side `side` of `cell`.
    pub fn neighbor(&self, cell: usize, side: usize) -> FaceNeighbor {
        let f = &self.faces[self.cell_faces[cell][side]];
        if f.cell == cell {
            f.neighbor
        } else {
            FaceNeighbor::Interior { cell: f.cell, side: f.side }
        }
    }

    pub fn map_point(&self, cell: usize, p: Point) -> Point {
        let n = q1_shape(p);
        let c = &self.cells[cell];
        let mut x = [0.0; 2];
        for a in 0..4 {
            let v = self.vertices[c[a]];
            x[0] += n[a] * v[0];
            x[1] += n[a] * v[1];
        }
        x
    }

    /// Jacobian of the bilinear cell map, `J[i][j] = d x_i / d xi_j`.
    pub fn jacobian(&self, cell: usize, p: Point) -> [[f64; 2]; 2] {
        let g = q1_gradients(p);
        let c = &self.cells[cell];
        let mut j = [[0.0; 2]; 2];
        for a in 0..4 {
            let v = self.vertices[c[a]];
            for r in 0..2 {
                for s in 0..2 {
                    j[r][s] += v[r] * g[a][s];
                }
            }
        }
        j
    }

    pub fn jacobian_det(&self, cell: usize, p: Point) -> f64 {
        let j = self.jacobian(cell, p);
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    pub fn cell_quadrature(&self, cell: usize, points: usize) -> Result<Vec<QuadPoint>> {
        if cell >= self.num_cells() {
            return Err(Error::Index { index: cell, len: self.num_cells() });
        }
        let rule = GaussRule::new(points);
        let mut out = Vec::with_capacity(points * points);
        for (py, wy) in rule.points.iter().zip(&rule.weights) {
            for (px, wx) in rule.points.iter().zip(&rule.weights) {
                let r = [*px, *py];
                out.push(QuadPoint {
                    reference: r,
                    physical: self.map_point(cell, r),
                    weight: wx * wy * self.jacobian_det(cell, r),
                });
            }
        }
        Ok(out)
    }

    pub fn face_quadrature(&self, face: usize, points: usize) -> Result<Vec<QuadPoint>> {
        let f = self
            .faces
            .get(face)
            .ok_or(Error::Index { index: face, len: self.faces.len() })?;
        let rule = GaussRule::new(points);
        let a = self.vertices[f.vertices[0]];
        let b = self.vertices[f.vertices[1]];
        Ok(rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &w)| QuadPoint {
                reference: [s, 0.0],
                physical: [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])],
                weight: w * f.length,
            })
            .collect())
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        // det J is bilinear, the 2-point rule is exact
        self.cell_quadrature(cell, 2)
            .map(|q| q.iter().map(|p| p.weight).sum())
            .unwrap_or(0.0)
    }

    pub fn area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    pub fn cell_centroid(&self, cell: usize) -> Point {
        self.map_point(cell, [0.5, 0.5])
    }

    /// Reference-rectangle coordinates of vertex `v`.
    pub fn reference_vertex(&self, v: usize) -> Point {
        let i = v % (self.nx + 1);
        let j = v / (self.nx + 1);
        let [x0, x1] = self.map.x_range;
        let [y0, y1] = self.map.y_range;
        [
            x0 + (x1 - x0) * i as f64 / self.nx as f64,
            y0 + (y1 - y0) * j as f64 / self.ny as f64,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Mesh {
        Mesh::build(
            &GeometryMap::rectangle([0.0, 1.0], [0.0, 1.0], [n, n]),
            0,
            BoundaryTags::uniform(BoundaryTag::Free),
        )
        .unwrap()
    }

    #[test]
    fn curved_bar_cell_counts() {
        let m8 = build_mesh(&GeometryMap::curved_bar(), 4).unwrap();
        assert_eq!(m8.num_cells(), 4096);
        assert_eq!(m8.num_vertices(), 4369);
        assert!((m8.mesh_size() - 2f64.powi(-8)).abs() < 1e-15);
        let m9 = build_mesh(&GeometryMap::curved_bar(), 5).unwrap();
        assert_eq!(m9.num_cells(), 16384);
        assert_eq!(m9.num_vertices(), 16929);
    }

    #[test]
    fn single_cell_has_four_boundary_faces() {
        let m = unit_square(1);
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.faces().iter().filter(|f| f.is_boundary()).count(), 4);
        assert_eq!(m.faces().iter().filter(|f| !f.is_boundary()).count(), 0);
    }

    #[test]
    fn refining_single_cell() {
        let m = refine_uniform(&unit_square(1)).unwrap();
        assert_eq!(m.num_cells(), 4);
        assert_eq!(m.num_vertices(), 9);
        let m = build_mesh(&GeometryMap::curved_bar(), 4).unwrap();
        assert_eq!(refine_uniform(&m).unwrap().num_cells(), 16384);
    }

    #[test]
    fn refine_twice_matches_direct_build() {
        let map = GeometryMap::curved_bar();
        let coarse = build_mesh(&map, 0).unwrap();
        let twice = refine_uniform(&refine_uniform(&coarse).unwrap()).unwrap();
        let direct = build_mesh(&map, 2).unwrap();
        assert_eq!(twice.num_vertices(), direct.num_vertices());
        for (a, b) in twice.vertices().iter().zip(direct.vertices()) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn face_sharing_and_normals() {
        let m = build_mesh(&GeometryMap::curved_bar(), 1).unwrap();
        let mut uses = vec![0usize; m.faces().len()];
        for c in 0..m.num_cells() {
            for f in m.cell_faces(c) {
                uses[f] += 1;
            }
        }
        for (f, face) in m.faces().iter().enumerate() {
            let expected = if face.is_boundary() { 1 } else { 2 };
            assert_eq!(uses[f], expected);
            assert!((face.normal[0].hypot(face.normal[1]) - 1.0).abs() < 1e-14);
            if let FaceNeighbor::Interior { cell, side } = face.neighbor {
                let other = m.outward_normal(cell, side);
                assert!((other[0] + face.normal[0]).abs() < 1e-14);
                assert!((other[1] + face.normal[1]).abs() < 1e-14);
            }
            // normal points away from the owning cell's centroid
            let c = m.cell_centroid(face.cell);
            let a = m.vertices()[face.vertices[0]];
            let d = [a[0] - c[0], a[1] - c[1]];
            assert!(d[0] * face.normal[0] + d[1] * face.normal[1] > 0.0);
        }
    }

    #[test]
    fn refinement_preserves_boundary_tags() {
        let tags = BoundaryTags {
            left: BoundaryTag::Neumann,
            right: BoundaryTag::Dirichlet,
            bottom: BoundaryTag::Slip,
            top: BoundaryTag::Free,
        };
        let coarse = Mesh::build(&GeometryMap::curved_bar(), 0, tags).unwrap();
        let fine = refine_uniform(&coarse).unwrap();
        for face in fine.faces() {
            if let FaceNeighbor::Boundary { side, tag } = face.neighbor {
                assert_eq!(tag, tags.get(side));
            }
        }
        let count = |m: &Mesh, s: Side| {
            m.faces()
                .iter()
                .filter(|f| matches!(f.neighbor, FaceNeighbor::Boundary { side, .. } if side == s))
                .count()
        };
        assert_eq!(count(&fine, Side::Left), 2 * count(&coarse, Side::Left));
    }

    #[test]
    fn quadrature_weights_and_moments() {
        let m = unit_square(1);
        let q = m.cell_quadrature(0, 2).unwrap();
        assert!((q.iter().map(|p| p.weight).sum::<f64>() - 1.0).abs() < 1e-15);
        let x2: f64 = q.iter().map(|p| p.weight * p.physical[0].powi(2)).sum();
        assert!((x2 - 1.0 / 3.0).abs() < 1e-14);
        let bar = build_mesh(&GeometryMap::curved_bar(), 0).unwrap();
        for (i, f) in bar.faces().iter().enumerate() {
            let w: f64 = bar.face_quadrature(i, 3).unwrap().iter().map(|p| p.weight).sum();
            assert!((w - f.length).abs() < 1e-14);
        }
        assert!(m.cell_quadrature(5, 2).is_err());
        assert!(m.face_quadrature(99, 2).is_err());
    }

    #[test]
    fn rejects_degenerate_input() {
        let bad = GeometryMap::rectangle([0.0, 0.0], [0.0, 1.0], [1, 1]);
        assert!(build_mesh(&bad, 0).is_err());
        // folding the curved bar: a huge thickness flips the Jacobian
        let mut folded = GeometryMap::curved_bar();
        folded.y_range = [-3.0, 3.0];
        assert!(build_mesh(&folded, 0).is_err());
    }

    #[test]
    fn curved_bar_map_matches_formula() {
        let map = GeometryMap::curved_bar();
        let (x1, x2) = (0.3, 0.02);
        let p = map.apply([x1, x2]);
        let a = 0.5 * x1 * PI;
        assert_eq!(p, [x1 + x2 * a.sin(), a.cos() + x2 * a.cos()]);
        // Jacobian against central differences
        let h = 1e-6;
        let j = map.jacobian([x1, x2]);
        for col in 0..2 {
            let mut lo = [x1, x2];
            let mut hi = [x1, x2];
            lo[col] -= h;
            hi[col] += h;
            let (pl, ph) = (map.apply(lo), map.apply(hi));
            for row in 0..2 {
                assert!(((ph[row] - pl[row]) / (2.0 * h) - j[row][col]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn polygonal_area_converges_to_mapped_area() {
        // Q1 cells cut the curved boundary with chords, so the discrete area
        // approaches the exact one at second order.
        let map = GeometryMap::curved_bar();
        let exact = map.mapped_area(64, 6);
        let errors: Vec<f64> = (2..5)
            .map(|level| (build_mesh(&map, level).unwrap().area() - exact).abs() / exact)
            .collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "area order {order}");
        }
        assert!(errors[2] < 1e-5);
    }
}
