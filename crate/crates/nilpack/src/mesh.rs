//! Triangle meshes of geodesic spheres, prism cells and ball
//! arrangements, with Wavefront OBJ export.
//!
//! Vertices are ambient model coordinates, so the output can be dropped
//! into any OBJ viewer directly. All meshes are closed and consistently
//! oriented.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{self, Write};

use crate::error::NilError;
use crate::geodesics::{sphere_exists, sphere_point};
use crate::nil::{NilIsometry, NilPoint};
use crate::packing::touching_isometries;
use crate::tilings::PrismTiling;

/// Indexed triangle mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counterclockwise seen from outside.
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    fn push_vertex(&mut self, p: NilPoint) -> u32 {
        let index = self.vertices.len() as u32;
        self.vertices.push([p.a, p.b, p.c]);
        index
    }

    /// Appends another mesh, shifting its face indices past the
    /// vertices already present.
    pub fn append(&mut self, other: &TriangleMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.faces
            .extend(other.faces.iter().map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]));
    }

    /// The image of the mesh under an isometry, face by face.
    pub fn transformed(&self, g: NilIsometry) -> TriangleMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let p = g.apply(NilPoint::new(v[0], v[1], v[2]));
                [p.a, p.b, p.c]
            })
            .collect();
        TriangleMesh { vertices, faces: self.faces.clone() }
    }
}

/// Triangulates the geodesic sphere of the given radius about the
/// origin with `n_theta` latitude steps and `n_phi` longitude steps.
///
/// The two fibre poles are welded single vertices, so the mesh is
/// watertight: (n_theta - 1) * n_phi + 2 vertices and
/// 2 * n_phi * (n_theta - 1) triangles.
pub fn sphere_mesh(radius: f64, n_theta: u32, n_phi: u32) -> Result<TriangleMesh, NilError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(NilError::domain(format!("sphere mesh needs a positive radius; got {radius}")));
    }
    if !sphere_exists(radius) {
        return Err(NilError::SphereRadius { radius });
    }
    if n_theta < 2 || n_phi < 3 {
        return Err(NilError::domain(format!(
            "sphere mesh needs n_theta >= 2 and n_phi >= 3; got {n_theta} and {n_phi}"
        )));
    }

    let mut mesh = TriangleMesh::default();
    let south = mesh.push_vertex(sphere_point(radius, -FRAC_PI_2, 0.0)?);
    let mut rings: Vec<Vec<u32>> = Vec::with_capacity((n_theta - 1) as usize);
    for i in 1..n_theta {
        let theta = -FRAC_PI_2 + PI * f64::from(i) / f64::from(n_theta);
        let ring = (0..n_phi)
            .map(|j| {
                let phi = TAU * f64::from(j) / f64::from(n_phi);
                sphere_point(radius, theta, phi).map(|p| mesh.push_vertex(p))
            })
            .collect::<Result<Vec<u32>, NilError>>()?;
        rings.push(ring);
    }
    let north = mesh.push_vertex(sphere_point(radius, FRAC_PI_2, 0.0)?);

    let next = |j: u32| (j + 1) % n_phi;
    let first = &rings[0];
    for j in 0..n_phi {
        mesh.faces.push([south, first[next(j) as usize], first[j as usize]]);
    }
    for pair in rings.windows(2) {
        let (lower, upper) = (&pair[0], &pair[1]);
        for j in 0..n_phi {
            let (a, b) = (lower[j as usize], lower[next(j) as usize]);
            let (c, d) = (upper[next(j) as usize], upper[j as usize]);
            mesh.faces.push([a, b, c]);
            mesh.faces.push([a, c, d]);
        }
    }
    let last = rings.last().expect("n_theta >= 2 leaves at least one ring");
    for j in 0..n_phi {
        mesh.faces.push([north, last[j as usize], last[next(j) as usize]]);
    }
    Ok(mesh)
}

/// Triangulates one closed cell of the tiling: the base polygon and its
/// screw image fanned from their centres, sides split into triangles.
pub fn prism_mesh(tiling: &PrismTiling) -> TriangleMesh {
    let p = tiling.p() as usize;
    let mut mesh = TriangleMesh::default();
    let bottom: Vec<u32> = tiling.base_vertices().iter().map(|&v| mesh.push_vertex(v)).collect();
    let top: Vec<u32> = tiling.top_vertices().iter().map(|&v| mesh.push_vertex(v)).collect();
    let bottom_centre = mesh.push_vertex(NilPoint::ORIGIN);
    let top_centre = mesh.push_vertex(tiling.tau().apply(NilPoint::ORIGIN));

    for j in 0..p {
        let k = (j + 1) % p;
        mesh.faces.push([bottom_centre, bottom[k], bottom[j]]);
        mesh.faces.push([top_centre, top[j], top[k]]);
        mesh.faces.push([bottom[j], bottom[k], top[k]]);
        mesh.faces.push([bottom[j], top[k], top[j]]);
    }
    mesh
}

/// The ball arrangement around one cell: the ball at the origin, the
/// balls of the touching shell (images of the central one under the
/// group elements found by the kissing search) and the cell itself.
pub fn arrangement_mesh(
    tiling: &PrismTiling,
    radius: f64,
    n_theta: u32,
    n_phi: u32,
) -> Result<TriangleMesh, NilError> {
    let ball = sphere_mesh(radius, n_theta, n_phi)?;
    let mut mesh = ball.clone();
    for g in touching_isometries(tiling, radius)? {
        mesh.append(&ball.transformed(g));
    }
    mesh.append(&prism_mesh(tiling));
    Ok(mesh)
}

/// Writes the mesh as minimal Wavefront OBJ: one `v` record per vertex
/// and one `f` record per triangle, indices one-based.
pub fn write_obj<W: Write>(mesh: &TriangleMesh, out: &mut W) -> io::Result<()> {
    for v in &mesh.vertices {
        writeln!(out, "v {:.9} {:.9} {:.9}", v[0], v[1], v[2])?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}
