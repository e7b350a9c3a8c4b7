use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use awlift_core::extension::{beltrami_classical, classical_aw, exterior_samples, qc_report};
use awlift_core::harmonic::{condition_report, convexity_profile, PROFILE_STEP};
use awlift_core::hyperbolic::random_geodesics;
use awlift_core::mesh::{extension_mesh, surface_mesh};
use awlift_core::reflection::critical_point_find;
use awlift_core::{
    Complex64, Error, ExtensionMap, GridParams, MapSpec, Point3, Result, Weierstrass,
};
use serde::Serialize;

use crate::{CommonArgs, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEHARI_ONLY: u8 = 2;
pub const EXIT_FAILED: u8 = 3;

const QC_SLACK: f64 = 0.02;
const CONVEXITY_FLOOR: f64 = -1e-7;
const CLASSICAL_TOL: f64 = 1e-7;
const PROFILE_SAMPLES: usize = 101;

impl CommonArgs {
    fn grid(&self) -> Result<GridParams> {
        GridParams::new(
            self.n_radial,
            self.n_angular,
            self.r_max,
            self.exterior_r_max,
        )
    }

    fn spec(&self) -> Result<MapSpec> {
        MapSpec::load(&self.map)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Prints the summary and writes it to `--out` when given.
fn emit<T: Serialize>(summary: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    if let Some(path) = out {
        let mut f = create(path)?;
        writeln!(f, "{text}")?;
        f.flush()?;
    }
    println!("{text}");
    Ok(())
}

pub fn check(args: &CommonArgs) -> Result<u8> {
    let spec = args.spec()?;
    let report = condition_report(&spec, &args.grid()?)?;
    if let Some(path) = &args.report {
        let mut f = create(path)?;
        report.write_csv(&mut f)?;
        f.flush()?;
    }
    emit(&report, args.out.as_ref())?;
    Ok(if report.aw_ok {
        EXIT_OK
    } else if report.nehari_ok {
        EXIT_NEHARI_ONLY
    } else {
        EXIT_FAILED
    })
}

#[derive(Serialize)]
struct MeshSummary {
    out: PathBuf,
    attributes: PathBuf,
    vertices: usize,
    faces: usize,
    dropped: usize,
    seam_gap: Option<f64>,
}

pub fn mesh(args: &CommonArgs, extended: bool) -> Result<u8> {
    let out = args
        .out
        .clone()
        .ok_or_else(|| Error::Domain("--out is required for mesh output".into()))?;
    let spec = args.spec()?;
    let grid = args.grid()?;
    let mesh = if extended {
        extension_mesh(&spec, &grid)?
    } else {
        surface_mesh(&spec, &grid)?
    };
    let mut f = create(&out)?;
    match args.format {
        Format::Obj => mesh.write_obj(&mut f)?,
        Format::Ply => mesh.write_ply(&mut f)?,
    }
    f.flush()?;
    let attributes = out.with_extension("csv");
    let mut f = create(&attributes)?;
    mesh.write_attributes_csv(&mut f)?;
    f.flush()?;
    if mesh.dropped > 0 {
        log::warn!(
            "{} vertices dropped (degenerate or at infinity)",
            mesh.dropped
        );
    }
    let summary = MeshSummary {
        out,
        attributes,
        vertices: mesh.vertices.len(),
        faces: mesh.faces.len(),
        dropped: mesh.dropped,
        seam_gap: mesh.seam_gap,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}

pub fn qc(args: &CommonArgs) -> Result<u8> {
    let spec = args.spec()?;
    let report = qc_report(&spec, &args.grid()?, args.samples.unwrap_or(500), args.seed)?;
    if let Some(path) = &args.report {
        let mut f = create(path)?;
        writeln!(f, "re,im,s_max,s_min,ratio")?;
        for s in &report.ratios {
            writeln!(
                f,
                "{},{},{},{},{}",
                s.z.re, s.z.im, s.singular_values.0, s.singular_values.1, s.ratio
            )?;
        }
        f.flush()?;
    }
    emit(&report, args.out.as_ref())?;
    Ok(if report.within_bound(QC_SLACK) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[derive(Serialize)]
struct CriticalPoint {
    status: &'static str,
    z: Option<Complex64>,
    detail: Option<String>,
}

#[derive(Serialize)]
struct ConvexitySummary {
    geodesics: usize,
    samples_per_geodesic: usize,
    step: f64,
    min_second_difference: f64,
    argmin_geodesic: usize,
    argmin_s: f64,
    critical_point: CriticalPoint,
}

pub fn convexity(args: &CommonArgs) -> Result<u8> {
    let spec = args.spec()?;
    let geodesics = random_geodesics(args.samples.unwrap_or(20), args.seed);
    let profiles = geodesics
        .iter()
        .map(|g| convexity_profile(&spec, g, PROFILE_SAMPLES, PROFILE_STEP))
        .collect::<Result<Vec<_>>>()?;
    // second difference k is centered on sample k + 1
    let s_of = |k: usize| (k as f64 + 1.0 - 0.5 * (PROFILE_SAMPLES - 1) as f64) * PROFILE_STEP;
    let (mut min, mut argmin) = (f64::INFINITY, (0, 0));
    for (i, p) in profiles.iter().enumerate() {
        for (k, &d) in p.iter().enumerate() {
            if d < min {
                min = d;
                argmin = (i, k);
            }
        }
    }
    if let Some(path) = &args.report {
        let mut f = create(path)?;
        writeln!(f, "geodesic,theta0,theta1,s,second_difference")?;
        for (i, (g, p)) in geodesics.iter().zip(&profiles).enumerate() {
            let (a, b) = g.endpoints();
            for (k, d) in p.iter().enumerate() {
                writeln!(f, "{i},{a},{b},{},{d}", s_of(k))?;
            }
        }
        f.flush()?;
    }
    let critical_point = match critical_point_find(&spec) {
        Ok(Some(z)) => CriticalPoint {
            status: "found",
            z: Some(z),
            detail: None,
        },
        Ok(None) => CriticalPoint {
            status: "none",
            z: None,
            detail: None,
        },
        Err(Error::InvariantViolation(msg)) => CriticalPoint {
            status: "multiple",
            z: None,
            detail: Some(msg),
        },
        Err(e) => return Err(e),
    };
    let summary = ConvexitySummary {
        geodesics: geodesics.len(),
        samples_per_geodesic: PROFILE_SAMPLES,
        step: PROFILE_STEP,
        min_second_difference: min,
        argmin_geodesic: argmin.0,
        argmin_s: s_of(argmin.1),
        critical_point,
    };
    emit(&summary, args.out.as_ref())?;
    Ok(if min >= CONVEXITY_FLOOR {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[derive(Serialize)]
struct ClassicalSummary {
    samples: usize,
    max_deviation: f64,
    argmax_z: Option<Complex64>,
    max_abs_mu: f64,
}

fn deviation(pipeline: &Point3, classical: Option<Complex64>) -> f64 {
    match (pipeline, classical) {
        (Point3::Infinity, None) => 0.0,
        (Point3::Finite(p), Some(c)) => (Complex64::new(p.x, p.y) - c).norm().hypot(p.z),
        _ => f64::INFINITY,
    }
}

pub fn compare_classical(args: &CommonArgs) -> Result<u8> {
    let spec = args.spec()?;
    if !spec.is_analytic() {
        return Err(Error::Spec(
            "compare-classical needs an analytic map (g and q absent)".into(),
        ));
    }
    let grid = args.grid()?;
    let ext = ExtensionMap::new(&spec);
    let zs = exterior_samples(args.samples.unwrap_or(200), grid.exterior_r_max, args.seed);
    let mut rows = Vec::with_capacity(zs.len());
    for &z in &zs {
        let pipeline = ext.extend_eval(z)?;
        let classical = classical_aw(&spec, z)?;
        let mu = beltrami_classical(&spec, 1.0 / z.conj())?.norm();
        rows.push((z, pipeline, classical, deviation(&pipeline, classical), mu));
    }
    if let Some(path) = &args.report {
        let mut f = create(path)?;
        writeln!(
            f,
            "re,im,pipeline_x,pipeline_y,pipeline_z,classical_re,classical_im,deviation,abs_mu"
        )?;
        for (z, p, c, d, mu) in &rows {
            let (px, py, pz) = p
                .finite()
                .map_or((f64::INFINITY, f64::INFINITY, f64::INFINITY), |v| {
                    (v.x, v.y, v.z)
                });
            let (cr, ci) = c.map_or((f64::INFINITY, f64::INFINITY), |c| (c.re, c.im));
            writeln!(f, "{},{},{px},{py},{pz},{cr},{ci},{d},{mu}", z.re, z.im)?;
        }
        f.flush()?;
    }
    let worst = rows.iter().max_by(|a, b| a.3.total_cmp(&b.3));
    let summary = ClassicalSummary {
        samples: rows.len(),
        max_deviation: worst.map_or(0.0, |r| r.3),
        argmax_z: worst.map(|r| r.0),
        max_abs_mu: rows.iter().map(|r| r.4).fold(0.0, f64::max),
    };
    emit(&summary, args.out.as_ref())?;
    Ok(if summary.max_deviation < CLASSICAL_TOL {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
