use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solver::TransportPlan;

pub const VIEWPORT: f64 = 800.0;
const MARGIN: f64 = 0.05 * VIEWPORT;
const RADIUS: f64 = 3.0;

/// Plan drawn over its point clouds: one segment per support entry, width
/// `4 * f_ij * m / S` (4 for a source sending everything), sources red and
/// targets blue.
pub fn plan_svg(inst: &Instance, plan: &TransportPlan) -> Result<String> {
    let g = inst.geometry().ok_or(Error::MissingGeometry)?;
    if g.sources.dim() != 2 {
        return Err(Error::UnsupportedDimension(g.sources.dim()));
    }
    if (plan.m(), plan.n()) != (inst.m(), inst.n()) {
        return Err(Error::DimensionMismatch(format!(
            "plan is {}x{}, instance is {}x{}",
            plan.m(),
            plan.n(),
            inst.m(),
            inst.n()
        )));
    }
    let all = g.sources.points().iter().chain(g.targets.points());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let usable = VIEWPORT - 2.0 * MARGIN;
    let k = if span > 0.0 { usable / span } else { 1.0 };
    // Center the box; y grows upwards as in the plane.
    let off = [
        MARGIN + 0.5 * (usable - k * (hi[0] - lo[0])),
        MARGIN + 0.5 * (usable - k * (hi[1] - lo[1])),
    ];
    let place = |p: &[f64]| {
        (
            off[0] + k * (p[0] - lo[0]),
            VIEWPORT - off[1] - k * (p[1] - lo[1]),
        )
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{v}" height="{v}" viewBox="0 0 {v} {v}">"#,
        v = VIEWPORT
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<g stroke="black" stroke-opacity="0.6" stroke-linecap="round">"#
    )
    .unwrap();
    let per_source = plan.source_mass() as f64;
    for f in plan.flows() {
        let (x1, y1) = place(&g.sources.points()[f.i]);
        let (x2, y2) = place(&g.targets.points()[f.j]);
        let w = 4.0 * f.units as f64 / per_source;
        writeln!(
            s,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke-width="{w:.4}"/>"#
        )
        .unwrap();
    }
    s.push_str("</g>\n");
    for (color, cloud) in [("blue", &g.targets), ("red", &g.sources)] {
        writeln!(s, r#"<g fill="{color}">"#).unwrap();
        for p in cloud.points() {
            let (x, y) = place(p);
            writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{RADIUS}"/>"#).unwrap();
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(inst: &Instance, plan: &TransportPlan, path: &Path) -> Result<()> {
    let s = plan_svg(inst, plan)?;
    fs::write(path, s)?;
    Ok(())
}
