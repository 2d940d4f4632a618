//! Pipelines behind the subcommands. Each writes its files into the output
//! directory and returns the report lines.

use crate::config::RunConfig;
use noidkit::contours::{knoid_contour, noid2k_contour, noid2k_retranslate, BoundaryData, Contour};
use noidkit::diagnostics::maximum_principle;
use noidkit::io::{graph_mesh, patch_mesh, MeshFormat, SurfaceMesh, Table};
use noidkit::ladder::{knoid_barrier_checks, knoid_ladder, noid2k_containment, noid2k_ladder, LadderReport};
use noidkit::patch::{interior_samples, mean_curvature, FnPatch, Patch};
use noidkit::plateau::{solve_knoid, solve_noid2k};
use noidkit::reference::{
    graph_mean_curvature, helicoid_patch, scherk_conservation_residual, scherk_height,
    scherk_jet, slice_patch, umbrella_patch, vertical_plane, ScherkParams,
};
use noidkit::sister::{gauss_bonnet_loop_check, mirror_curve, twist_along_vertical, LoopVerdict};
use noidkit::solver::{DiscreteGraph, SolveReport};
use noidkit::{Error, ModelPoint, Result};
use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

/// Ordered `key = value` lines; audit keys carry `pass` or `fail`.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<(String, String)>,
}

impl Report {
    pub fn value(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn audit(&mut self, name: impl Into<String>, pass: bool) {
        self.lines.push((format!("audit.{}", name.into()), if pass { "pass" } else { "fail" }.into()));
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().filter(|(k, _)| k.starts_with("audit.")).all(|(_, v)| v == "pass")
    }

    pub fn to_text(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn f(x: f64) -> String {
    noidkit::io::format_float(x)
}

fn obj(mesh: &SurfaceMesh, dir: &Path, name: &str) -> Result<()> {
    mesh.write(&dir.join(format!("{name}.obj")), MeshFormat::Obj)
}

fn tag(x: f64) -> String {
    let s = format!("{x}");
    s.replace('.', "p").replace('-', "m")
}

pub fn scherk(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let space = cfg.space()?;
    let params = ScherkParams::new(space)?;
    let model = space.model();
    let n = cfg.scherk_samples;
    let mut angles: Vec<f64> = (0..n).map(|i| cfg.scherk_max_angle * i as f64 / (n - 1) as f64).collect();
    if cfg.scherk_max_angle >= FRAC_PI_4 && !angles.iter().any(|&s| (s - FRAC_PI_4).abs() < 1e-15) {
        angles.push(FRAC_PI_4);
        angles.sort_by(f64::total_cmp);
    }
    let mut table = Table::new(["s", "u", "conservation_residual"]);
    let mut max_res: f64 = 0.0;
    let mut max_mce: f64 = 0.0;
    for &s in &angles {
        let u = scherk_height(&params, s)?;
        let res = scherk_conservation_residual(&params, s)?;
        max_res = max_res.max(res.abs());
        if s > 0.0 {
            let (x, y) = (s.cos(), s.sin());
            let jet = scherk_jet(&params, x, y)?;
            max_mce = max_mce.max(graph_mean_curvature(&model, x, y, &jet)?.abs());
        }
        table.push(vec![s, u, res])?;
    }
    table.write(&dir.join("scherk.csv"))?;
    let top = cfg.scherk_max_angle;
    let surface = FnPatch {
        u: [0.5, 2.0],
        v: [0.0, top],
        f: |rho: f64, s: f64| {
            let u = scherk_height(&params, s).unwrap_or(f64::NAN);
            params.placement.apply(&ModelPoint::new(rho * s.cos(), rho * s.sin(), u))
        },
    };
    obj(&patch_mesh(&surface, cfg.patch_grid, cfg.patch_grid)?, dir, "scherk")?;
    let mut r = Report::default();
    r.value("pipeline", "scherk");
    r.value("rows", angles.len());
    if cfg.scherk_max_angle >= FRAC_PI_4 {
        r.value("u_at_quarter_pi", f(scherk_height(&params, FRAC_PI_4)?));
    }
    r.value("max_conservation_residual", f(max_res));
    r.value("max_mean_curvature", f(max_mce));
    r.audit("conservation", max_res < 1e-10);
    r.audit("minimal_graph_equation", max_mce < 1e-6);
    Ok(r)
}

fn solve_row(t: f64, rep: &SolveReport, graph: &DiscreteGraph, slack: f64) -> Vec<f64> {
    let (mp, _, _) = maximum_principle(graph, slack);
    vec![
        t,
        rep.area,
        rep.gradient_norm,
        rep.newton_iterations as f64,
        rep.pcg_iterations as f64,
        rep.converged as u8 as f64,
        rep.interior_range.0,
        rep.interior_range.1,
        rep.data_range.0,
        rep.data_range.1,
        mp as u8 as f64,
        graph.mesh.len() as f64,
    ]
}

fn solve_table() -> Table {
    Table::new([
        "truncation",
        "area",
        "gradient_norm",
        "newton_iterations",
        "pcg_iterations",
        "converged",
        "interior_min",
        "interior_max",
        "data_min",
        "data_max",
        "maximum_principle",
        "nodes",
    ])
}

fn ladder_outputs(ladder: &LadderReport, dir: &Path, r: &mut Report) -> Result<()> {
    let mut t = Table::new(["from", "to", "sup_difference"]);
    for (i, d) in ladder.sup_differences.iter().enumerate() {
        t.push(vec![ladder.truncations[i], ladder.truncations[i + 1], *d])?;
    }
    t.write(&dir.join("ladder.csv"))?;
    r.value("ladder.compact_nodes", ladder.nodes[0].len());
    r.value("ladder.min_increment", f(ladder.min_increment));
    r.audit("ladder_monotone", ladder.monotone);
    r.audit("ladder_sup_differences_decrease", ladder.cauchy_decreasing);
    Ok(())
}

/// Twist, mirror curve and loop audit at every vertical of a solved piece.
fn mirror_outputs(cfg: &RunConfig, graph: &DiscreteGraph, data: &BoundaryData, dir: &Path, r: &mut Report) -> Result<()> {
    let h = cfg.h_mean;
    for jump in &data.jumps {
        let label = &data.labels[jump.vertex];
        let key = format!("vertical.{label}");
        let tw = match twist_along_vertical(graph, data, jump.vertex, cfg.fan_radius, cfg.fan_samples) {
            Ok(tw) => tw,
            Err(e) => {
                r.value(format!("{key}.error"), e);
                r.audit(format!("{key}.twist_increasing"), false);
                continue;
            }
        };
        let mc = mirror_curve(cfg.kappa, h, &tw)?;
        let mut t = Table::new(["t", "x", "y", "tangent_angle", "curvature", "alpha", "alpha_prime"]);
        for i in 0..mc.curve.len() {
            let p = mc.curve.points[i];
            let a = tw.rate_at(mc.curve.params[i]);
            let alpha = interpolate(&tw.params, &tw.alpha, mc.curve.params[i]);
            t.push(vec![mc.curve.params[i], p.x, p.y, mc.angle[i], mc.curve.curvature[i], alpha, a])?;
        }
        t.write(&dir.join(format!("mirror_{label}.csv")))?;
        let check = gauss_bonnet_loop_check(&mc);
        r.value(format!("{key}.length"), f(tw.length()));
        r.value(format!("{key}.total_twist"), f(tw.total()));
        r.value(format!("{key}.interior_angle"), f(data.polygon.interior_angles[jump.vertex]));
        r.value(format!("{key}.min_twist_rate"), f(tw.min_rate()));
        r.value(format!("{key}.max_mirror_curvature"), f(mc.max_curvature()));
        r.value(format!("{key}.loops"), check.loops.len());
        r.value(format!("{key}.verdict"), format!("{:?}", check.verdict));
        r.audit(format!("{key}.twist_increasing"), tw.is_increasing());
        r.audit(format!("{key}.curvature_below_2H"), mc.max_curvature() < 2.0 * h);
        r.audit(format!("{key}.embedded"), check.verdict == LoopVerdict::EmbeddedConsistent);
    }
    Ok(())
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    ys[i - 1] + w.clamp(0.0, 1.0) * (ys[i] - ys[i - 1])
}

fn contour_file(c: &Contour, dir: &Path, name: &str) -> Result<()> {
    fs::write(dir.join(format!("{name}.contour")), c.to_text())?;
    Ok(())
}

pub fn knoid(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    r.value("pipeline", "knoid");
    let mut worst_gap: f64 = 0.0;
    for &t in &cfg.truncations {
        let c = knoid_contour(&cfg.knoid_spec(t)?)?;
        contour_file(&c.contour, dir, &format!("knoid_r{}", tag(t)))?;
        worst_gap = worst_gap.max((c.gap - c.gap_formula).abs());
    }
    r.value("contour.max_gap_error", f(worst_gap));
    r.audit("contour_gap", worst_gap < 1e-6);
    let spec = cfg.knoid_spec(cfg.top())?;
    let (solves, ladder) = knoid_ladder(&spec, &cfg.truncations, cfg.level, &cfg.solver, cfg.compact_radius)?;
    let mut table = solve_table();
    let mut converged = true;
    let mut max_principle = true;
    for s in &solves {
        let t = s.contour.spec.r;
        obj(&graph_mesh(&s.graph), dir, &format!("knoid_r{}", tag(t)))?;
        table.push(solve_row(t, &s.report, &s.graph, cfg.slack))?;
        converged &= s.report.converged;
        max_principle &= maximum_principle(&s.graph, cfg.slack).0;
    }
    table.write(&dir.join("solve_reports.csv"))?;
    r.audit("solves_converged", converged);
    r.audit("maximum_principle", max_principle);
    ladder_outputs(&ladder, dir, &mut r)?;
    match knoid_barrier_checks(&spec, &solves, cfg.compact_radius, cfg.slack) {
        Ok(checks) => {
            let worst = checks.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min);
            r.value("barrier.worst_margin", f(worst));
            r.audit("barrier", checks.iter().all(|c| c.holds));
        }
        Err(e) if e.is_validation() => r.value("barrier", format!("not available: {e}")),
        Err(e) => return Err(e),
    }
    let top = solves.last().expect("nonempty ladder");
    mirror_outputs(cfg, &top.graph, &top.data, dir, &mut r)?;
    Ok(r)
}

pub fn noid2k(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    r.value("pipeline", "noid2k");
    let spec = cfg.noid2k_spec(cfg.top())?;
    r.value("delta", f(spec.delta()));
    r.value("symmetric", spec.is_symmetric());
    let mut worst_gap: f64 = 0.0;
    for &t in &cfg.truncations {
        let c = noid2k_contour(&cfg.noid2k_spec(t)?)?;
        contour_file(&c.contour, dir, &format!("noid2k_n{}", tag(t)))?;
        worst_gap = worst_gap.max((c.gap - c.gap_formula).abs());
    }
    r.value("contour.max_gap_error", f(worst_gap));
    r.audit("contour_gap", worst_gap < 1e-6);
    let (solves, ladder) = noid2k_ladder(&spec, &cfg.truncations, cfg.level, &cfg.solver, cfg.compact_radius, cfg.clearance)?;
    let mut table = solve_table();
    let mut converged = true;
    let mut max_principle = true;
    for s in &solves {
        let t = s.contour.spec.n;
        obj(&graph_mesh(&s.graph), dir, &format!("noid2k_n{}", tag(t)))?;
        table.push(solve_row(t, &s.report, &s.graph, cfg.slack))?;
        converged &= s.report.converged;
        max_principle &= maximum_principle(&s.graph, cfg.slack).0;
    }
    ladder_outputs(&ladder, dir, &mut r)?;
    let moved = noid2k_retranslate(&spec)?;
    r.value("retranslation.c4", f(moved.c4));
    r.value("retranslation.c5", f(moved.c5));
    let fin = solve_noid2k(&spec, moved.c4, moved.c5, &cfg.truncations, cfg.level, &cfg.solver)?;
    contour_file(&fin.contour.contour, dir, "noid2k_final")?;
    obj(&graph_mesh(&fin.graph), dir, "noid2k_final")?;
    table.push(solve_row(spec.n, &fin.report, &fin.graph, cfg.slack))?;
    table.write(&dir.join("solve_reports.csv"))?;
    converged &= fin.report.converged;
    max_principle &= maximum_principle(&fin.graph, cfg.slack).0;
    r.audit("solves_converged", converged);
    r.audit("maximum_principle", max_principle);
    let cont = noid2k_containment(&fin.contour, &fin.data, &fin.graph);
    r.value("containment.upper_margin", f(cont.upper_margin));
    r.value("containment.lower_margin", f(cont.lower_margin));
    r.value("containment.halfspace_margin", f(cont.halfspace_margin));
    r.audit("containment", cont.holds(cfg.slack));
    mirror_outputs(cfg, &fin.graph, &fin.data, dir, &mut r)?;
    Ok(r)
}

pub fn sister(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    r.value("pipeline", "sister");
    let spec = cfg.knoid_spec(cfg.top())?;
    let s = solve_knoid(&spec, &cfg.truncations, cfg.level, &cfg.solver)?;
    obj(&graph_mesh(&s.graph), dir, "piece")?;
    r.audit("solve_converged", s.report.converged);
    for jump in &s.data.jumps {
        let label = &s.data.labels[jump.vertex];
        let fan = noidkit::sister::fan_profile(&s.graph, &s.data, jump.vertex, cfg.fan_radius, cfg.fan_samples)?;
        let mut t = Table::new(["fan_angle", "height"]);
        for (a, h) in fan.angles.iter().zip(&fan.heights) {
            t.push(vec![*a, *h])?;
        }
        t.write(&dir.join(format!("fan_{label}.csv")))?;
        r.audit(format!("vertical.{label}.fan_monotone"), fan.is_monotone());
    }
    mirror_outputs(cfg, &s.graph, &s.data, dir, &mut r)?;
    Ok(r)
}

/// Fast self-checks of the reference surfaces, contours and mesh export in
/// the configured space.
pub fn verify(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let space = cfg.space()?;
    let model = space.model();
    let mut r = Report::default();
    r.value("pipeline", "verify");
    let o = space.base().origin();
    let axis = ModelPoint::new(o.x + 0.1, o.y, 0.3);
    let worst = |name: &str, patch: &dyn Patch, r: &mut Report| -> Result<()> {
        let mut m: f64 = 0.0;
        for (u, v) in interior_samples(patch, 10, 0.05) {
            m = m.max(mean_curvature(&space, patch, u, v)?.abs());
        }
        r.value(format!("minimality.{name}"), f(m));
        r.audit(format!("minimality.{name}"), m < 1e-5);
        Ok(())
    };
    worst("umbrella", &umbrella_patch(&space, axis, 0.5)?, &mut r)?;
    worst("slice", &slice_patch(&space, axis, 0.4, [-0.5, 0.5], [-0.5, 0.5])?, &mut r)?;
    worst("vertical_plane", &vertical_plane(&space, o, 0.4, [-0.5, 0.5], [-1.0, 1.0])?, &mut r)?;
    for (name, pitch) in [("helicoid_0", 0.0), ("helicoid_tau", space.tau()), ("helicoid_1", 1.0), ("helicoid_large", 1e3)] {
        worst(name, &helicoid_patch(&space, axis, 0.0, pitch, 0.5, 1.0)?, &mut r)?;
    }
    if space.kappa_e() < 0.0 {
        let params = ScherkParams::new(space)?;
        let mut res: f64 = 0.0;
        let mut eq: f64 = 0.0;
        for i in 1..=200 {
            let s = 1.5 * i as f64 / 200.0;
            res = res.max(scherk_conservation_residual(&params, s)?.abs());
            let jet = scherk_jet(&params, s.cos(), s.sin())?;
            eq = eq.max(graph_mean_curvature(&model, s.cos(), s.sin(), &jet)?.abs());
        }
        r.value("scherk.conservation", f(res));
        r.audit("scherk.conservation", res < 1e-10);
        r.value("scherk.mean_curvature", f(eq));
        r.audit("scherk.mean_curvature", eq < 1e-6);
        if space.kappa == -1.0 && space.h_mean == 0.0 {
            let u = scherk_height(&params, FRAC_PI_4)?;
            let exact = (1.0 + 2f64.sqrt()).ln();
            r.value("scherk.u_at_quarter_pi", f(u));
            r.audit("scherk.closed_form", (u - exact).abs() < 1e-6);
        }
    }
    let kn = knoid_contour(&cfg.knoid_spec(cfg.top())?)?;
    r.audit("knoid_contour_gap", (kn.gap - kn.gap_formula).abs() < 1e-6);
    if let Ok(spec) = cfg.noid2k_spec(cfg.top()) {
        if spec.validate().is_ok() {
            let c = noid2k_contour(&spec)?;
            r.audit("noid2k_contour_gap", (c.gap - c.gap_formula).abs() < 1e-6);
        }
    }
    let heli = helicoid_patch(&space, axis, 0.0, 1.0, 0.5, 1.0)?;
    let mesh = patch_mesh(&heli, cfg.patch_grid, cfg.patch_grid)?;
    let path = dir.join("helicoid.obj");
    mesh.write(&path, MeshFormat::Obj)?;
    let back = SurfaceMesh::read(&path)?;
    r.audit("mesh_round_trip", back == mesh);
    Ok(r)
}

pub fn write_report(report: &Report, dir: &Path) -> Result<()> {
    fs::write(dir.join("report.txt"), report.to_text()).map_err(Error::from)
}
