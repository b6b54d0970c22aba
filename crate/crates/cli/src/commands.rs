use gearmap::analysis::{
    beta_gamma_integrals, conformal_module, gear_pipeline, gearlike_region, lambda_from_prevertices,
    module_gamma_sweep, region_grid, sweep_argmax, ProbeVerdict, RegionRow,
};
use gearmap::gear_geometry::{
    extract_pregear, normalize_to_gear, tooth_curvature, GearNormalization, PregearDescription,
};
use gearmap::geometry::{symmetrize_prevertices, CircleIntersection, ExtPoint, GeneralizedCircle};
use gearmap::mapping::{solve_goodman, solve_schwarzian_ivp, ArcTag, MapSolution};
use gearmap::schwarzian::{
    build_general, build_symmetric, degenerate_endpoint, lambda_bounds, nehari_bounds, Endpoint,
    Side,
};
use gearmap::{GearError, GearParams, PreverticesPair, SolverConfig, SymmetricParams};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::output::{
    carrier, complex, csv_string, document, ext_point, fmt, intersection, json_string, mobius, num,
};
use crate::svg::{Frame, Svg};
use crate::{
    choose_format, CliError, Format, MapArgs, ModuleArgs, ParamsArgs, RegionArgs, SolverArgs,
    SweepArgs,
};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn solver_config(a: &SolverArgs) -> Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(e) = a.eps {
        cfg.eps = e;
    }
    if let Some(t) = a.tol {
        cfg.abs_tol = t;
        cfg.rel_tol = t;
    }
    if let Some(r) = a.rays {
        cfg.rays = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn failure_document(command: &str, e: &GearError) -> Value {
    let kind = format!("{e:?}");
    let kind = kind.split([' ', '(', '{']).next().unwrap_or("").to_string();
    let mut body = Map::new();
    body.insert("error".into(), json!({ "kind": kind, "message": e.to_string() }));
    document(command, body)
}

enum MapInput {
    Symmetric(SymmetricParams),
    Goodman(PreverticesPair),
    General(PreverticesPair, f64),
}

fn map_input(a: &MapArgs) -> Result<MapInput, CliError> {
    match (a.t, a.t1, a.t2, a.lambda) {
        (Some(t), None, None, Some(l)) => Ok(MapInput::Symmetric(SymmetricParams::new(t, l)?)),
        (Some(_), None, None, None) => Err(usage("--t requires --lambda")),
        (None, Some(t1), Some(t2), l) => {
            let p = PreverticesPair::new(t1, t2)?;
            Ok(match l {
                Some(l) if l.is_finite() => MapInput::General(p, l),
                Some(l) => return Err(usage(format!("--lambda must be finite, got {l}"))),
                None => MapInput::Goodman(p),
            })
        }
        _ => Err(usage("give either --t with --lambda, or --t1 with --t2 (and optionally --lambda)")),
    }
}

/// Which endpoint each degenerate map realizes, found at run time.
fn endpoint_association(t: f64) -> Result<Value, GearError> {
    let entry = |side: Side| -> Result<Value, GearError> {
        let (ep, lam) = degenerate_endpoint(t, side)?;
        Ok(json!({
            "pole": num(side.pole()),
            "endpoint": match ep { Endpoint::Lower => "lambda_minus", Endpoint::Upper => "lambda_plus" },
            "lambda": num(lam),
            "tangency_on": match side { Side::Minus => "A-circle", Side::Plus => "B-circle" },
        }))
    };
    Ok(json!({
        "DegenerateMinus": entry(Side::Minus)?,
        "DegeneratePlus": entry(Side::Plus)?,
    }))
}

fn symmetric_conventions(t: f64) -> Value {
    let alt = FRAC_PI_2 - t;
    json!({
        "adopted": "t2 = pi - t",
        "t2_adopted": num(PI - t),
        "alternative": "t2 = pi/2 - t",
        "t2_alternative": num(alt),
        "alternative_defines_a_partition": alt > t,
    })
}

fn tag_key(tag: ArcTag) -> &'static str {
    match tag {
        ArcTag::BArc => "b_arc",
        ArcTag::ToothUpper => "tooth_upper",
        ArcTag::AArc => "a_arc",
        ArcTag::ToothLower => "tooth_lower",
    }
}

struct MapRun {
    input: MapInput,
    m: MapSolution,
    d: PregearDescription,
    gear: Result<GearNormalization, GearError>,
    curvature: (f64, f64),
}

fn run_map(a: &MapArgs) -> Result<MapRun, CliError> {
    let input = map_input(a)?;
    let cfg = solver_config(&a.solver)?;
    let m = match &input {
        MapInput::Symmetric(s) => solve_schwarzian_ivp(&build_symmetric(*s)?, &cfg)?,
        MapInput::Goodman(p) => solve_goodman(p, &cfg)?,
        MapInput::General(p, l) => solve_schwarzian_ivp(&build_general(*p, *l), &cfg)?,
    };
    let d = extract_pregear(&m)?;
    let gear = normalize_to_gear(&d, &m);
    let curvature = tooth_curvature(&m)?;
    Ok(MapRun {
        input,
        m,
        d,
        gear,
        curvature,
    })
}

pub fn map(a: &MapArgs) -> Result<String, CliError> {
    let format = choose_format(a.output.format, &[Format::Json, Format::Svg])?;
    let run = run_map(a)?;
    match format {
        Format::Svg => Ok(map_svg(&run)),
        _ => Ok(json_string(&map_json(&run)?)),
    }
}

fn map_json(run: &MapRun) -> Result<Value, CliError> {
    let (m, d) = (&run.m, &run.d);
    let mut body = Map::new();
    let mut diagnostics = Map::new();
    let (input, reference) = match &run.input {
        MapInput::Symmetric(s) => {
            let (lm, lp) = lambda_bounds(s.t())?;
            let (nl, nu) = nehari_bounds(s.t())?;
            diagnostics.insert("conventions".into(), symmetric_conventions(s.t()));
            diagnostics.insert("endpoint_association".into(), endpoint_association(s.t())?);
            (
                json!({ "mode": "symmetric", "t": num(s.t()), "lambda": num(s.lambda()) }),
                json!({
                    "lambda_bounds": [num(lm), num(lp)],
                    "nehari_bounds": [num(nl), num(nu)],
                    "inside_bounds": lm < s.lambda() && s.lambda() < lp,
                }),
            )
        }
        MapInput::Goodman(p) => {
            let g = beta_gamma_integrals(p)?;
            let lam = lambda_from_prevertices(p)?;
            let (q, t) = symmetrize_prevertices(p.t1(), p.t2())?;
            diagnostics.insert("conventions".into(), symmetric_conventions(t));
            diagnostics.insert("endpoint_association".into(), endpoint_association(t)?);
            (
                json!({ "mode": "gear", "t1": num(p.t1()), "t2": num(p.t2()) }),
                json!({
                    "integrals": { "beta": num(g.beta), "gamma": num(g.gamma) },
                    "lambda": num(lam),
                    "q": num(q),
                    "t": num(t),
                }),
            )
        }
        MapInput::General(p, l) => (
            json!({ "mode": "general", "t1": num(p.t1()), "t2": num(p.t2()), "lambda": num(*l) }),
            Value::Null,
        ),
    };
    body.insert("input".into(), input);
    body.insert("classification".into(), Value::String(d.classification.name().into()));
    body.insert(
        "prevertices".into(),
        json!({ "t1": num(m.prevertices.0), "t2": num(m.prevertices.1) }),
    );
    body.insert("vertices".into(), Value::Array(d.vertices.iter().map(|&v| complex(v)).collect()));
    body.insert(
        "interior_angles".into(),
        Value::Array(d.interior_angles.iter().map(|&a| num(a)).collect()),
    );
    let mut carriers = Map::new();
    for e in &d.edges {
        let mut c = carrier(&e.carrier);
        c["fit_residual"] = num(e.residual);
        carriers.insert(tag_key(e.tag).into(), c);
    }
    body.insert("carriers".into(), Value::Object(carriers));
    body.insert("tooth_intersection".into(), intersection(&d.tooth_intersection));
    let (bm, bp) = match d.tooth_points() {
        Some((a, b)) => (ext_point(a), ext_point(b)),
        None => (Value::Null, Value::Null),
    };
    body.insert("b_minus".into(), bm);
    body.insert("b_plus".into(), bp);
    body.insert("tangency_gap".into(), d.tangency_gap.map_or(Value::Null, num));
    body.insert("symmetry_defect".into(), num(d.symmetry_defect));
    body.insert(
        "tooth_curvature".into(),
        json!({ "upper": num(run.curvature.0), "lower": num(run.curvature.1) }),
    );
    match &run.gear {
        Ok(n) => {
            body.insert(
                "gear".into(),
                json!({
                    "beta": num(n.params.beta),
                    "gamma": num(n.params.gamma),
                    "transform": mobius(&n.transform),
                    "interior_point": complex(n.interior_point),
                    "exterior_point": ext_point(n.exterior_point),
                    "tooth_curvature": num(n.tooth_curvature),
                    "center_offset": num(n.center_offset),
                }),
            );
        }
        Err(e) => {
            body.insert("gear".into(), Value::Null);
            diagnostics.insert("gear_error".into(), Value::String(e.to_string()));
        }
    }
    body.insert("reference".into(), reference);
    let dg = &m.diagnostics;
    diagnostics.insert("max_wronskian_drift".into(), dg.max_wronskian_drift.map_or(Value::Null, num));
    diagnostics.insert("u0_winding".into(), dg.u0_winding.map_or(Value::Null, |w| json!(w)));
    diagnostics.insert("not_univalent_evidence".into(), json!(dg.not_univalent_evidence));
    diagnostics.insert("accepted_steps".into(), json!(dg.accepted_steps));
    diagnostics.insert("rejected_steps".into(), json!(dg.rejected_steps));
    diagnostics.insert("rays".into(), json!(dg.rays));
    diagnostics.insert("eps".into(), num(m.eps));
    diagnostics.insert("notes".into(), json!(d.notes));
    let mut ordered = Map::new();
    for key in ["conventions", "endpoint_association"] {
        if let Some(v) = diagnostics.remove(key) {
            ordered.insert(key.into(), v);
        }
    }
    ordered.extend(diagnostics);
    body.insert("diagnostics".into(), Value::Object(ordered));
    body.insert(
        "boundary".into(),
        Value::Array(
            m.boundary
                .iter()
                .map(|r| json!({ "theta": num(r.theta), "re": num(r.limit.re), "im": num(r.limit.im) }))
                .collect(),
        ),
    );
    Ok(document("map", body))
}

fn pt(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn map_svg(run: &MapRun) -> String {
    let d = &run.d;
    let poly: Vec<(f64, f64)> = run.m.boundary_polygon().into_iter().map(pt).collect();
    let marks: Vec<Complex64> = match d.tooth_intersection {
        CircleIntersection::TwoPoints(a, b) => [a, b].iter().filter_map(|p| p.finite()).collect(),
        CircleIntersection::Tangent(ExtPoint::Finite(p)) => vec![p],
        _ => Vec::new(),
    };
    let mut fit = poly.clone();
    fit.extend(marks.iter().map(|&z| pt(z)));
    let mut s = Svg::new(Frame::equal(&fit, 800.0));
    let dashed = r##"fill="none" stroke="#777777" stroke-width="1" stroke-dasharray="6 4""##;
    for e in &d.edges {
        match e.carrier {
            GeneralizedCircle::Circle { center, radius } => s.circle(pt(center), radius, dashed),
            GeneralizedCircle::Line { point, direction } => s.full_line(pt(point), pt(direction), dashed),
        }
    }
    s.polygon(&poly, r##"fill="#d9d9d9" stroke="black" stroke-width="1.5""##);
    for &v in &d.vertices {
        s.dot(pt(v), 3.5, r#"fill="black""#);
    }
    for &b in &marks {
        s.cross(pt(b), 5.0, r##"fill="none" stroke="#c00000" stroke-width="1.5""##);
    }
    let label = match &run.input {
        MapInput::Symmetric(p) => format!("t = {:.6}, lambda = {:.6}", p.t(), p.lambda()),
        MapInput::Goodman(p) => format!("t1 = {:.6}, t2 = {:.6}", p.t1(), p.t2()),
        MapInput::General(p, l) => format!("t1 = {:.6}, t2 = {:.6}, lambda = {:.6}", p.t1(), p.t2(), l),
    };
    let (x0, y0) = (fit.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), fit.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max));
    s.text((x0, y0), (0.0, 0.0), "start", &format!("{}: {label}", d.classification.name()));
    s.finish()
}

fn check_grid(n: usize, min: usize) -> Result<(), CliError> {
    if n < min {
        return Err(usage(format!("--grid must be at least {min}, got {n}")));
    }
    Ok(())
}

fn verdict_name(v: &ProbeVerdict) -> String {
    match (v.classification, &v.error) {
        (Some(c), _) => c.name().to_string(),
        (None, _) if v.not_univalent_evidence => "NotUnivalentEvidence".into(),
        (None, _) => "Failed".into(),
    }
}

const PROBE_COLUMNS: [&str; 5] = [
    "probe_mid",
    "probe_minus_out",
    "probe_minus_in",
    "probe_plus_in",
    "probe_plus_out",
];

pub fn region(a: &RegionArgs) -> Result<String, CliError> {
    let format = choose_format(a.output.format, &[Format::Csv, Format::Svg, Format::Json])?;
    check_grid(a.grid, 10)?;
    let cfg = solver_config(&a.solver)?;
    let sample = gearlike_region(&region_grid(a.grid), a.probes.then_some(&cfg))?;
    match format {
        Format::Csv => {
            let mut header = vec!["t", "lambda_minus", "lambda_plus", "nehari_lo", "nehari_hi"];
            if a.probes {
                header.extend(PROBE_COLUMNS);
            }
            let rows: Vec<Vec<String>> = sample
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        fmt(r.t),
                        fmt(r.lambda_minus),
                        fmt(r.lambda_plus),
                        fmt(r.nehari_lower),
                        fmt(r.nehari_upper),
                    ];
                    row.extend(r.probes.iter().map(verdict_name));
                    row
                })
                .collect();
            Ok(csv_string(&header, &rows))
        }
        Format::Json => {
            let rows: Vec<Value> = sample
                .rows
                .iter()
                .map(|r| {
                    let probes: Vec<Value> = r
                        .probes
                        .iter()
                        .zip(PROBE_COLUMNS)
                        .map(|(p, name)| {
                            json!({
                                "probe": name,
                                "lambda": num(p.lambda),
                                "verdict": verdict_name(p),
                                "not_univalent_evidence": p.not_univalent_evidence,
                                "error": p.error,
                            })
                        })
                        .collect();
                    json!({
                        "t": num(r.t),
                        "lambda_minus": num(r.lambda_minus),
                        "lambda_plus": num(r.lambda_plus),
                        "nehari_lo": num(r.nehari_lower),
                        "nehari_hi": num(r.nehari_upper),
                        "probes": probes,
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("grid".into(), json!(a.grid));
            body.insert("rows".into(), Value::Array(rows));
            Ok(json_string(&document("region", body)))
        }
        Format::Svg => Ok(region_svg(&sample.rows)),
    }
}

/// Vertical extent of the region figure.
const REGION_Y: (f64, f64) = (-2.5, 1.5);

fn region_svg(rows: &[RegionRow]) -> String {
    let frame = Frame::chart((0.0, FRAC_PI_2), REGION_Y, 800.0, 600.0, 50.0);
    let mut s = Svg::new(frame);
    let (ul, ut) = frame.px(0.0, REGION_Y.1);
    let (lr, lb) = frame.px(FRAC_PI_2, REGION_Y.0);
    s.raw(&format!(
        r#"<defs><clipPath id="plot"><rect x="{ul:.6}" y="{ut:.6}" width="{:.6}" height="{:.6}"/></clipPath></defs>"#,
        lr - ul,
        lb - ut
    ));
    s.raw(r#"<g clip-path="url(#plot)">"#);
    let lower: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.lambda_minus)).collect();
    let upper: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.lambda_plus)).collect();
    let mut band = upper.clone();
    band.extend(lower.iter().rev());
    s.polygon(&band, r##"fill="#bfbfbf" stroke="none""##);
    s.polyline(&upper, r#"fill="none" stroke="black" stroke-width="2""#);
    s.polyline(&lower, r#"fill="none" stroke="black" stroke-width="2""#);
    let dashed = r#"fill="none" stroke="black" stroke-width="1.2" stroke-dasharray="6 4""#;
    s.polyline(&rows.iter().map(|r| (r.t, r.nehari_upper)).collect::<Vec<_>>(), dashed);
    s.polyline(&rows.iter().map(|r| (r.t, r.nehari_lower)).collect::<Vec<_>>(), dashed);
    s.raw("</g>");
    axes(&mut s, (0.0, FRAC_PI_2), REGION_Y, &[0.0, 0.25 * FRAC_PI_2, 0.5 * FRAC_PI_2, 0.75 * FRAC_PI_2, FRAC_PI_2], &[-2.0, -1.0, 0.0, 1.0], "t", "lambda");
    s.finish()
}

fn axes(s: &mut Svg, x: (f64, f64), y: (f64, f64), xt: &[f64], yt: &[f64], xl: &str, yl: &str) {
    let axis = r#"fill="none" stroke="black" stroke-width="1""#;
    s.segment((x.0, y.0), (x.1, y.0), axis);
    s.segment((x.0, y.0), (x.0, y.1), axis);
    for &v in xt {
        s.text((v, y.0), (0.0, 18.0), "middle", &format!("{v:.3}"));
    }
    for &v in yt {
        s.text((x.0, v), (-6.0, 4.0), "end", &format!("{v:.1}"));
    }
    s.text((0.5 * (x.0 + x.1), y.0), (0.0, 36.0), "middle", xl);
    s.text((x.0, y.1), (-6.0, -8.0), "end", yl);
}

pub fn params(a: &ParamsArgs) -> Result<String, CliError> {
    choose_format(a.output.format, &[Format::Json])?;
    let g = GearParams::new(a.beta, a.gamma)?;
    let p = gear_pipeline(g)?;
    let (lm, lp) = lambda_bounds(p.t)?;
    let back = beta_gamma_integrals(&PreverticesPair::new(p.t1, p.t2)?)?;
    let mut notes = Vec::new();
    if PI - a.gamma < 0.1 {
        notes.push(format!("gamma near pi: t2 is {} from pi", fmt(PI - p.t2)));
    }
    if a.beta - 1.0 < 0.05 {
        notes.push(format!("beta near 1: t2 - t1 = {}", fmt(p.t2 - p.t1)));
    }
    let mut body = Map::new();
    body.insert("input".into(), json!({ "beta": num(a.beta), "gamma": num(a.gamma) }));
    body.insert("t1".into(), num(p.t1));
    body.insert("t2".into(), num(p.t2));
    body.insert("q".into(), num(p.q));
    body.insert("t".into(), num(p.t));
    body.insert("lambda".into(), num(p.lambda));
    body.insert("M".into(), num(p.module));
    body.insert(
        "diagnostics".into(),
        json!({
            "conventions": symmetric_conventions(p.t),
            "lambda_bounds": [num(lm), num(lp)],
            "inside_bounds": lm < p.lambda && p.lambda < lp,
            "residual": { "beta": num(back.beta - a.beta), "gamma": num(back.gamma - a.gamma) },
            "pi_minus_t2": num(PI - p.t2),
            "t2_minus_t1": num(p.t2 - p.t1),
            "notes": notes,
        }),
    );
    Ok(json_string(&document("params", body)))
}

pub fn module(a: &ModuleArgs) -> Result<String, CliError> {
    let format = choose_format(a.output.format, &[Format::Csv, Format::Json])?;
    let ts = match a.t {
        Some(t) => vec![t],
        None => {
            check_grid(a.grid, 1)?;
            region_grid(a.grid)
        }
    };
    let values = ts
        .iter()
        .map(|&t| conformal_module(t))
        .collect::<Result<Vec<_>, _>>()?;
    match format {
        Format::Json => {
            let rows: Vec<Value> = values
                .iter()
                .map(|v| json!({ "t": num(v.t), "M": num(v.m), "method": "agm" }))
                .collect();
            let mut body = Map::new();
            body.insert("rows".into(), Value::Array(rows));
            Ok(json_string(&document("module", body)))
        }
        _ => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|v| vec![fmt(v.t), fmt(v.m), "agm".into()])
                .collect();
            Ok(csv_string(&["t", "M", "method"], &rows))
        }
    }
}

pub fn sweep(a: &SweepArgs) -> Result<String, CliError> {
    let format = choose_format(a.output.format, &[Format::Csv, Format::Json, Format::Svg])?;
    check_grid(a.grid, 3)?;
    GearParams::new(a.beta, FRAC_PI_2)?;
    let grid: Vec<f64> = (1..=a.grid).map(|i| PI * i as f64 / (a.grid + 1) as f64).collect();
    let curve = module_gamma_sweep(a.beta, &grid)?;
    let k = sweep_argmax(&curve).unwrap_or(0);
    let interior = k > 0 && k + 1 < curve.len();
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = curve
                .iter()
                .enumerate()
                .map(|(i, &(g, m))| vec![fmt(g), fmt(m), u8::from(i == k).to_string()])
                .collect();
            Ok(csv_string(&["gamma", "M", "argmax"], &rows))
        }
        Format::Json => {
            let mut body = Map::new();
            body.insert("beta".into(), num(a.beta));
            body.insert(
                "curve".into(),
                Value::Array(curve.iter().map(|&(g, m)| json!({ "gamma": num(g), "M": num(m) })).collect()),
            );
            body.insert(
                "argmax".into(),
                json!({ "index": k, "gamma": num(curve[k].0), "M": num(curve[k].1), "interior": interior }),
            );
            Ok(json_string(&document("sweep", body)))
        }
        Format::Svg => {
            let top = curve.iter().map(|c| c.1).fold(0.0, f64::max);
            let frame = Frame::chart((0.0, PI), (0.0, top), 800.0, 500.0, 50.0);
            let mut s = Svg::new(frame);
            s.polyline(&curve, r#"fill="none" stroke="black" stroke-width="2""#);
            s.segment(
                (curve[k].0, 0.0),
                (curve[k].0, curve[k].1),
                r#"fill="none" stroke="black" stroke-width="1" stroke-dasharray="6 4""#,
            );
            s.dot(curve[k], 4.0, r#"fill="black""#);
            let yt: Vec<f64> = (0..=4).map(|i| top * i as f64 / 4.0).collect();
            axes(&mut s, (0.0, PI), (0.0, top), &[0.0, 0.25 * PI, 0.5 * PI, 0.75 * PI, PI], &yt, "gamma", "M");
            Ok(s.finish())
        }
    }
}
