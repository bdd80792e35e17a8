//! Triangulations of the unit square with full edge topology and boundary tags.
//!
//! Edges carry a global orientation fixed by vertex index order: the stored
//! tangent points from the lower-indexed to the higher-indexed endpoint and
//! the global normal is that tangent rotated by -90°. Adjacent elements then
//! agree on the edge frame without any per-pair sign negotiation.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Index pair of an edge, lower vertex index first.
pub type EdgeVertices = [usize; 2];

/// A conforming triangulation with oriented edges.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    /// Vertex index triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Edge endpoint pairs, lower index first.
    pub edges: Vec<EdgeVertices>,
    /// Per triangle: local edge i is opposite local vertex i. Each entry is
    /// (global edge index, sign), sign = +1 when the triangle's outward
    /// normal on that edge equals the global edge normal.
    pub triangle_edges: Vec<[(usize, f64); 3]>,
    /// Per edge: adjacent triangle seen with sign +1, then with sign -1.
    /// Interior edges have both; boundary edges exactly one.
    pub edge_triangles: Vec<[Option<usize>; 2]>,
    /// Indices of edges on the domain boundary.
    pub boundary_edges: Vec<usize>,
}

impl Mesh {
    /// Assembles edge topology from vertices and counterclockwise triangles.
    pub fn from_raw(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        for (t, tri) in triangles.iter().enumerate() {
            let area = signed_area(&vertices, *tri);
            if !(area > 0.0) {
                return Err(Error::DegenerateOrFlippedTriangle { tri: t, area });
            }
        }

        let mut edge_index: BTreeMap<EdgeVertices, usize> = BTreeMap::new();
        let mut edges: Vec<EdgeVertices> = Vec::new();
        for tri in &triangles {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = [a.min(b), a.max(b)];
                edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
            }
        }

        let mut triangle_edges = vec![[(usize::MAX, 0.0); 3]; triangles.len()];
        let mut edge_triangles: Vec<[Option<usize>; 2]> = vec![[None, None]; edges.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let e = edge_index[&[a.min(b), a.max(b)]];
                // Traversal a -> b is counterclockwise around the triangle, so
                // the outward normal equals the global normal exactly when the
                // traversal runs from the lower to the higher vertex index.
                let sign = if a < b { 1.0 } else { -1.0 };
                triangle_edges[t][i] = (e, sign);
                let slot = if sign > 0.0 { 0 } else { 1 };
                edge_triangles[e][slot] = Some(t);
            }
        }

        let boundary_edges: Vec<usize> = edge_triangles
            .iter()
            .enumerate()
            .filter(|(_, adj)| adj[0].is_none() || adj[1].is_none())
            .map(|(e, _)| e)
            .collect();

        Ok(Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_triangles,
            boundary_edges,
        })
    }

    /// Uniform n x n grid of squares, each split by the diagonal from its
    /// lower-left to its upper-right corner.
    pub fn structured(n: usize) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::InvalidMeshSize);
        }
        let h = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(Vec2::new(i as f64 * h, j as f64 * h));
            }
        }
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let ll = idx(i, j);
                let lr = idx(i + 1, j);
                let ur = idx(i + 1, j + 1);
                let ul = idx(i, j + 1);
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        Mesh::from_raw(vertices, triangles)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * signed_area_doubled(self.triangle_vertices(t))
    }

    pub fn edge_endpoints(&self, e: usize) -> [Vec2; 2] {
        let [a, b] = self.edges[e];
        [self.vertices[a], self.vertices[b]]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [p, q] = self.edge_endpoints(e);
        (q - p).norm()
    }

    /// Unit tangent from the lower to the higher vertex index.
    pub fn edge_tangent(&self, e: usize) -> Vec2 {
        let [p, q] = self.edge_endpoints(e);
        let d = q - p;
        d.scale(1.0 / d.norm())
    }

    /// Global unit normal, the tangent rotated by -90°.
    pub fn edge_normal(&self, e: usize) -> Vec2 {
        self.edge_tangent(e).rotated_cw()
    }

    pub fn edge_midpoint(&self, e: usize) -> Vec2 {
        let [p, q] = self.edge_endpoints(e);
        (p + q).scale(0.5)
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        let [a, b] = self.edge_triangles[e];
        a.is_none() || b.is_none()
    }

    /// Maximum triangle diameter (longest edge over all triangles).
    pub fn mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for te in &self.triangle_edges {
            for &(e, _) in te {
                h = h.max(self.edge_length(e));
            }
        }
        h
    }

    /// Plain-text dump with VERTICES / TRIANGLES / EDGES / TAGS sections.
    pub fn dump(&self, tags: Option<&BoundaryTags>) -> String {
        let mut out = String::new();
        writeln!(out, "VERTICES {}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(out, "{} {}", v.x, v.y).unwrap();
        }
        writeln!(out, "TRIANGLES {}", self.triangles.len()).unwrap();
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        writeln!(out, "EDGES {}", self.edges.len()).unwrap();
        for e in &self.edges {
            writeln!(out, "{} {}", e[0], e[1]).unwrap();
        }
        if let Some(tags) = tags {
            writeln!(out, "TAGS {}", self.boundary_edges.len()).unwrap();
            for &e in &self.boundary_edges {
                let p = if tags.is_gamma_p(e) { "p" } else { "f" };
                let d = if tags.is_gamma_d(e) { "d" } else { "t" };
                writeln!(out, "{} {} {}", e, p, d).unwrap();
            }
        }
        out
    }
}

fn signed_area(vertices: &[Vec2], tri: [usize; 3]) -> f64 {
    0.5 * signed_area_doubled([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]])
}

fn signed_area_doubled([a, b, c]: [Vec2; 3]) -> f64 {
    (b - a).cross(c - a)
}

/// One side of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "bottom" => Some(Side::Bottom),
            "right" => Some(Side::Right),
            "top" => Some(Side::Top),
            "left" => Some(Side::Left),
            _ => None,
        }
    }
}

/// Which sides carry the flux (no-flow) and traction conditions. Sides not
/// listed fall to the pressure part and the displacement (clamped) part.
#[derive(Clone, Debug, Default)]
pub struct BoundarySpec {
    pub gamma_f_sides: Vec<Side>,
    pub gamma_t_sides: Vec<Side>,
}

/// Per-edge membership in the two boundary partitions.
#[derive(Clone, Debug)]
pub struct BoundaryTags {
    /// Indexed by edge; None for interior edges.
    tags: Vec<Option<EdgeTag>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct EdgeTag {
    /// true: pressure part Γ_p, false: flux part Γ_f.
    pressure: bool,
    /// true: clamped part Γ_d, false: traction part Γ_t.
    clamped: bool,
}

impl BoundaryTags {
    /// Tags every boundary edge by the side of the unit square it lies on.
    pub fn build(mesh: &Mesh, spec: &BoundarySpec) -> Result<BoundaryTags> {
        let mut tags = vec![None; mesh.num_edges()];
        let mut n_p = 0usize;
        let mut n_d = 0usize;
        for &e in &mesh.boundary_edges {
            let side = classify_side(mesh.edge_endpoints(e))
                .ok_or(Error::UntaggedBoundaryEdge { edge: e })?;
            let tag = EdgeTag {
                pressure: !spec.gamma_f_sides.contains(&side),
                clamped: !spec.gamma_t_sides.contains(&side),
            };
            n_p += tag.pressure as usize;
            n_d += tag.clamped as usize;
            tags[e] = Some(tag);
        }
        if n_p == 0 {
            return Err(Error::EmptyBoundaryPart { part: "gamma_p" });
        }
        if n_d == 0 {
            return Err(Error::EmptyBoundaryPart { part: "gamma_d" });
        }
        Ok(BoundaryTags { tags })
    }

    pub fn is_gamma_p(&self, edge: usize) -> bool {
        matches!(self.tags[edge], Some(EdgeTag { pressure: true, .. }))
    }

    pub fn is_gamma_f(&self, edge: usize) -> bool {
        matches!(
            self.tags[edge],
            Some(EdgeTag {
                pressure: false,
                ..
            })
        )
    }

    pub fn is_gamma_d(&self, edge: usize) -> bool {
        matches!(self.tags[edge], Some(EdgeTag { clamped: true, .. }))
    }

    pub fn is_gamma_t(&self, edge: usize) -> bool {
        matches!(self.tags[edge], Some(EdgeTag { clamped: false, .. }))
    }
}

fn classify_side([p, q]: [Vec2; 2]) -> Option<Side> {
    const TOL: f64 = 1e-12;
    let on = |a: f64, b: f64, v: f64| (a - v).abs() <= TOL && (b - v).abs() <= TOL;
    if on(p.y, q.y, 0.0) {
        Some(Side::Bottom)
    } else if on(p.x, q.x, 1.0) {
        Some(Side::Right)
    } else if on(p.y, q.y, 1.0) {
        Some(Side::Top)
    } else if on(p.x, q.x, 0.0) {
        Some(Side::Left)
    } else {
        None
    }
}
