//! Polygon meshes of `Σ` and of `Σ ∪ Σ*`, with OBJ and PLY writers and a CSV
//! of per-vertex attributes.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::ExtensionMap;
use crate::grid::GridParams;
use crate::harmonic::margin_at;
use crate::lift::{lift_path, Vec3};
use crate::map_spec::Weierstrass;
use crate::reflection::reflect_with_point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Interior,
    Exterior,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Exterior => "exterior",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshVertex {
    pub position: Vec3,
    pub region: Region,
    /// Parameter in the extended plane.
    pub z: Complex64,
    pub margin_t: Option<f64>,
    pub dilatation: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MeshOutput {
    pub vertices: Vec<MeshVertex>,
    /// Zero-based indices, triangles and quads.
    pub faces: Vec<Vec<usize>>,
    /// Vertices dropped for being degenerate or at ∞.
    pub dropped: usize,
    pub seam_gap: Option<f64>,
}

/// Grid topology: center, then ring by ring; `None` for dropped vertices.
struct Patch {
    vertices: Vec<Option<MeshVertex>>,
    reversed: bool,
}

fn grid_faces(grid: &GridParams, reversed: bool) -> Vec<Vec<usize>> {
    let m = grid.n_angular;
    let at = |ring: usize, j: usize| 1 + ring * m + j % m;
    let mut faces = Vec::with_capacity(grid.n_radial * m);
    for j in 0..m {
        faces.push(vec![0, at(0, j), at(0, j + 1)]);
    }
    for ring in 0..grid.n_radial - 1 {
        for j in 0..m {
            faces.push(vec![
                at(ring, j),
                at(ring, j + 1),
                at(ring + 1, j + 1),
                at(ring + 1, j),
            ]);
        }
    }
    if reversed {
        for f in &mut faces {
            f.reverse();
        }
    }
    faces
}

impl MeshOutput {
    fn append(&mut self, grid: &GridParams, patch: Patch) {
        let mut index = Vec::with_capacity(patch.vertices.len());
        for v in patch.vertices {
            match v {
                Some(v) => {
                    index.push(Some(self.vertices.len()));
                    self.vertices.push(v);
                }
                None => {
                    index.push(None);
                    self.dropped += 1;
                }
            }
        }
        for f in grid_faces(grid, patch.reversed) {
            if let Some(face) = f.iter().map(|&i| index[i]).collect::<Option<Vec<_>>>() {
                self.faces.push(face);
            }
        }
    }

    pub fn write_obj<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(
            out,
            "# vertices {} faces {} dropped {}",
            self.vertices.len(),
            self.faces.len(),
            self.dropped
        )?;
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v.position.x, v.position.y, v.position.z)?;
        }
        for f in &self.faces {
            write!(out, "f")?;
            for i in f {
                write!(out, " {}", i + 1)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_ply<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(out, "ply\nformat ascii 1.0")?;
        writeln!(out, "comment dropped {}", self.dropped)?;
        writeln!(out, "element vertex {}", self.vertices.len())?;
        writeln!(
            out,
            "property double x\nproperty double y\nproperty double z\nproperty uchar region"
        )?;
        writeln!(out, "element face {}", self.faces.len())?;
        writeln!(out, "property list uchar int vertex_indices\nend_header")?;
        for v in &self.vertices {
            let region = match v.region {
                Region::Interior => 0,
                Region::Exterior => 1,
            };
            writeln!(
                out,
                "{} {} {} {}",
                v.position.x, v.position.y, v.position.z, region
            )?;
        }
        for f in &self.faces {
            write!(out, "{}", f.len())?;
            for i in f {
                write!(out, " {i}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// One row per written vertex, in OBJ order.
    pub fn write_attributes_csv<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(out, "index,region,re,im,x,y,z,margin_t,dilatation")?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                i + 1,
                v.region.as_str(),
                v.z.re,
                v.z.im,
                v.position.x,
                v.position.y,
                v.position.z,
                opt(v.margin_t),
                opt(v.dilatation)
            )?;
        }
        Ok(())
    }
}

fn droppable(e: &Error) -> bool {
    matches!(e, Error::Degenerate { .. } | Error::Singular { .. })
}

/// Lifts of the grid points, integrated outward along each ray.
fn lift_grid<W: Weierstrass + ?Sized>(spec: &W, grid: &GridParams) -> Result<Vec<Option<Vec3>>> {
    let radii = grid.radii();
    let angles = grid.angles();
    let center = match crate::lift::lift_point(spec, Complex64::new(0.0, 0.0)) {
        Ok(p) => Some(p),
        Err(e) if droppable(&e) => None,
        Err(e) => return Err(e),
    };
    let rays = angles
        .par_iter()
        .map(|&theta| {
            let mut path = vec![Complex64::new(0.0, 0.0)];
            path.extend(radii.iter().map(|&r| Complex64::from_polar(r, theta)));
            match lift_path(spec, &path) {
                Ok(p) => Ok(p.into_iter().skip(1).map(Some).collect::<Vec<_>>()),
                // fall back to pointwise lifts so a single bad point only drops itself
                Err(e) if droppable(&e) => Ok(path[1..]
                    .iter()
                    .map(|&z| crate::lift::lift_point(spec, z).ok())
                    .collect()),
                Err(e) => Err(e),
            }
        })
        .collect::<Vec<Result<Vec<Option<Vec3>>>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![center];
    for k in 0..grid.n_radial {
        for ray in &rays {
            out.push(ray[k]);
        }
    }
    Ok(out)
}

/// Image of the polar grid under the lift.
pub fn surface_mesh<W: Weierstrass + ?Sized>(spec: &W, grid: &GridParams) -> Result<MeshOutput> {
    grid.validate()?;
    let zs = grid.points();
    let lifts = lift_grid(spec, grid)?;
    let vertices = zs
        .par_iter()
        .zip(&lifts)
        .map(|(&z, p)| {
            let Some(position) = *p else { return Ok(None) };
            match margin_at(spec, z) {
                Ok(m) => Ok(Some(MeshVertex {
                    position,
                    region: Region::Interior,
                    z,
                    margin_t: Some(m.margin_t),
                    dilatation: None,
                })),
                Err(e) if droppable(&e) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut mesh = MeshOutput::default();
    mesh.append(
        grid,
        Patch {
            vertices,
            reversed: false,
        },
    );
    Ok(mesh)
}

/// `Σ` together with its reflection `Σ*`; the exterior grid is the interior
/// grid mirrored by `ζ ↦ 1/ζ̄`, with the center going to ∞.
pub fn extension_mesh<W: Weierstrass + ?Sized>(spec: &W, grid: &GridParams) -> Result<MeshOutput> {
    let mut mesh = surface_mesh(spec, grid)?;
    let ext = ExtensionMap::new(spec);
    let zs = grid.points();
    let lifts = lift_grid(spec, grid)?;
    let exterior = zs
        .par_iter()
        .zip(&lifts)
        .map(|(&zeta, p)| {
            let Some(w) = *p else { return Ok(None) };
            let refl = match reflect_with_point(spec, zeta, w) {
                Ok(r) => r,
                Err(e) if droppable(&e) => return Ok(None),
                Err(e) => return Err(e),
            };
            let Some(position) = refl.w_star.finite() else {
                return Ok(None);
            };
            let z = 1.0 / zeta.conj();
            let dilatation = match ext.dilatation_at(z) {
                Ok(d) => Some(d.ratio),
                Err(e) if droppable(&e) => None,
                Err(e) => return Err(e),
            };
            Ok(Some(MeshVertex {
                position,
                region: Region::Exterior,
                z,
                margin_t: margin_at(spec, zeta).ok().map(|m| m.margin_t),
                dilatation,
            }))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    mesh.append(
        grid,
        Patch {
            vertices: exterior,
            reversed: true,
        },
    );
    mesh.seam_gap = Some(ext.boundary_gap(1.0 - grid.r_max)?);
    Ok(mesh)
}
