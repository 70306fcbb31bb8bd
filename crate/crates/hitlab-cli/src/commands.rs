use crate::args::{Cli, Command, Format, NogoCase, SpecSource, Suite, TilingSource};
use crate::config::RunConfig;
use crate::CliError;
use hitlab::geometry::{length_contribution, length_expectation, length_variance, polygon_angle_sum, vertex_angle, vertex_area};
use hitlab::hit::{make_l_shift, make_left_right, make_star, verify_all, HitSpec, VerifyOptions};
use hitlab::network::{assemble, assemble_with, random_holonomies, rt_fit, rt_table, two_point_correlator};
use hitlab::nogo::{
    check_evenbly_code, check_evenbly_state, count_mm_balanced_bipartitions, geometric_measure_pairing, ghz, max_product_overlap,
    min_two_uniform_deviation, opposite_bell_pairs, perfect_tensor, random_in_subspace, su2_invariant_basis, GeneratorSpec, OptimizeOptions,
    SingletPairing, Symmetry,
};
use hitlab::par::{self, Exec};
use hitlab::report::{headline_constants, render_constants, run_acceptance};
use hitlab::su2kit::{embed, spin_half, total_spin_generators};
use hitlab::tiling::{build_tiling, greedy_wedge, minimal_cut, to_svg, BoundaryRegion, IsometryRuleSet, TilingGraph};
use hitlab::{CMatrix, HitError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

/// A fully computed artifact, written only once everything succeeded.
enum Artifact {
    Json(Value),
    Text(String),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    if let Some(n) = cfg.threads {
        par::init_threads(n);
    }
    let mut extra: Vec<(std::path::PathBuf, String)> = Vec::new();
    let mut breach = None;
    let artifact = match cli.command {
        Command::Tiling { p, q, layers, svg } => {
            let g = build_tiling(p, q, layers)?;
            if let Some(path) = svg {
                extra.push((path, to_svg(&g, None)));
            }
            if cfg.format == Some(Format::Svg) {
                Artifact::Text(to_svg(&g, None))
            } else {
                Artifact::Json(serde_json::to_value(&g)?)
            }
        }
        Command::Verify { spec, holonomy } => {
            let spec = load_spec(&spec)?;
            let opts = VerifyOptions {
                holonomy_seed: holonomy.then_some(cfg.seed),
            };
            let mut rep = verify_all(&spec, opts)?;
            for c in rep.checks.iter_mut() {
                c.pass = c.residual <= cfg.tol;
            }
            if cfg.format == Some(Format::Text) {
                let mut s = String::new();
                for c in &rep.checks {
                    s.push_str(&format!("{:<28} {} {:.3e}\n", c.name, if c.pass { "pass" } else { "FAIL" }, c.residual));
                }
                Artifact::Text(s)
            } else {
                Artifact::Json(json!({ "pass": rep.pass(), "tol": cfg.tol, "checks": rep.checks }))
            }
        }
        Command::Entropy { tiling, spec, regions } => {
            let g = load_tiling(&tiling)?;
            let st = assemble(&g, &load_spec(&spec)?)?;
            let regions = parse_regions(&g, &regions)?;
            let points = rt_table(&st, &regions, Exec::default())?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["start", "len", "entropy_bits", "graph_length", "cut_edges"])?;
                    for p in &points {
                        let edges: Vec<String> = p.cut_edges.iter().map(|e| e.to_string()).collect();
                        w.write_record([p.start.to_string(), p.len.to_string(), p.entropy.to_string(), p.graph_length.to_string(), edges.join(" ")])?;
                    }
                    Artifact::Text(String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?).expect("csv is utf-8"))
                }
                _ => {
                    let fit = rt_fit(&st, &regions).ok().map(|f| json!({ "slope": f.slope, "max_residual": f.max_residual }));
                    Artifact::Json(json!({ "points": points, "fit": fit }))
                }
            }
        }
        Command::Corr {
            tiling,
            spec,
            obs,
            site,
            holonomies,
        } => {
            let g = load_tiling(&tiling)?;
            let spec = load_spec(&spec)?;
            let hol = holonomies.then(|| random_holonomies(&g, cfg.seed));
            let st = assemble_with(&g, &spec, hol.as_ref())?;
            let o = observable(&obs, spec.k)?;
            let n = g.n_boundary();
            if site >= n {
                return Err(HitError::Region(format!("site {site} out of range 0..{n}")).into());
            }
            let rows = (0..n)
                .map(|x| Ok((x, two_point_correlator(&st, &o, site, &o, x)?)))
                .collect::<Result<Vec<_>, HitError>>()?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["site1", "site2", "re", "im"])?;
                    for (x, c) in &rows {
                        w.write_record([site.to_string(), x.to_string(), c.re.to_string(), c.im.to_string()])?;
                    }
                    Artifact::Text(String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?).expect("csv is utf-8"))
                }
                _ => Artifact::Json(json!({
                    "observable": obs,
                    "site": site,
                    "holonomy_seed": holonomies.then_some(cfg.seed),
                    "correlators": rows.iter().map(|(x, c)| json!({ "site2": x, "re": c.re, "im": c.im })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Length { tiling, spec, region } => {
            let spec = load_spec(&spec)?;
            match region {
                None => Artifact::Json(serde_json::to_value(length_contribution(&spec, 0)?)?),
                Some(r) => {
                    let g = load_tiling(&tiling)?;
                    let region = parse_region(&g, &r)?;
                    let st = assemble(&g, &spec)?;
                    let cut = minimal_cut(&g, &region)?.cut;
                    let strip = greedy_wedge(&g, &region, IsometryRuleSet::default()).strip;
                    let rep = length_expectation(&st, &cut)?;
                    let variance = length_variance(&st, &cut, &strip)?;
                    Artifact::Json(json!({
                        "region": { "start": region.start, "len": region.len },
                        "cut_edges": cut.edges,
                        "graph_length": rep.graph_length,
                        "c_A": rep.c_a,
                        "per_j": rep.per_j,
                        "expectation": rep.expectation,
                        "variance": variance,
                        "strip_vertices": strip,
                    }))
                }
            }
        }
        Command::Area { spec } => {
            let spec = load_spec(&spec)?;
            let d = hitlab::geometry::decompose_vertex(&spec)?;
            let a = vertex_area(&spec)?;
            let coeffs: Vec<Value> = d
                .basis
                .iter()
                .zip(&d.coeffs)
                .map(|(b, c)| json!({ "labels": b.labels.iter().map(|l| l.j()).collect::<Vec<_>>(), "norm": b.norm, "re": c.re, "im": c.im }))
                .collect();
            Artifact::Json(json!({
                "a_norm": d.a_norm,
                "coeffs": coeffs,
                "eigenvalues": a.terms,
                "vertex_area": a.expectation,
                "flag": a.flag,
            }))
        }
        Command::Angle { spec, legs, pattern } => {
            let spec = load_spec(&spec)?;
            if legs.len() != 2 {
                return Err(CliError::Usage("--legs takes exactly two leg indices".into()));
            }
            let a = vertex_angle(&spec, legs[0], legs[1])?;
            let poly = match pattern {
                Some(p) => {
                    let (sum, deficit) = polygon_angle_sum(a.alpha, &p)?;
                    Some(json!({ "pattern": p, "angle_sum": sum, "deficit": deficit }))
                }
                None => None,
            };
            Artifact::Json(json!({ "cos_theta": a.cos_theta, "theta": a.theta, "alpha": a.alpha, "polygon": poly }))
        }
        Command::Nogo {
            case,
            n,
            symmetry,
            starts,
            samples,
            m,
            d,
        } => Artifact::Json(nogo(case, n, &symmetry, starts, samples, m, d, cfg.seed)?),
        Command::Report { suite } => match suite {
            Suite::Constants => {
                let rows = headline_constants()?;
                if let Some(r) = rows.iter().find(|r| !r.pass) {
                    breach = Some(format!("{} = {} misses {} by more than {:e}", r.quantity, r.computed, r.expected, r.tol));
                }
                if cfg.format == Some(Format::Json) {
                    Artifact::Json(serde_json::to_value(&rows)?)
                } else {
                    Artifact::Text(render_constants(&rows))
                }
            }
            Suite::Acceptance => {
                let res = run_acceptance();
                let failed: Vec<usize> = res.iter().filter(|r| !r.pass).map(|r| r.id).collect();
                if !failed.is_empty() {
                    breach = Some(format!("criteria {failed:?} failed"));
                }
                if cfg.format == Some(Format::Json) {
                    // runtimes vary between runs and stay out of the JSON
                    let rows: Vec<Value> = res
                        .iter()
                        .map(|r| json!({ "id": r.id, "name": r.name, "pass": r.pass, "residual": r.residual, "detail": r.detail }))
                        .collect();
                    Artifact::Json(Value::Array(rows))
                } else {
                    Artifact::Text(res.iter().map(|r| r.line() + "\n").collect())
                }
            }
        },
    };
    for (path, body) in &extra {
        write_file(path, body)?;
    }
    emit(&cfg, artifact)?;
    match breach {
        Some(b) => Err(CliError::Breach(b)),
        None => Ok(()),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body)?;
    Ok(())
}

fn emit(cfg: &RunConfig, a: Artifact) -> Result<(), CliError> {
    let body = match a {
        Artifact::Json(v) => serde_json::to_string_pretty(&v)? + "\n",
        Artifact::Text(s) => s,
    };
    match &cfg.output {
        Some(p) => write_file(p, &body),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn load_spec(src: &SpecSource) -> Result<HitSpec, CliError> {
    match (&src.spec, &src.preset) {
        (Some(p), _) => Ok(HitSpec::from_json(&std::fs::read_to_string(p)?)?),
        (None, Some(s)) => preset(s),
        (None, None) => Err(CliError::Usage("give --spec FILE or --preset".into())),
    }
}

fn preset(s: &str) -> Result<HitSpec, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad number {x:?} in preset {s:?}")));
    let spec = match parts.as_slice() {
        ["star", q, k] => make_star(num(q)?, num(k)?)?,
        ["left-right", q] => make_left_right(num(q)?)?,
        ["l-shift", q, ls] => make_l_shift(num(q)?, &ls.split(',').map(num).collect::<Result<Vec<_>, _>>()?)?,
        _ => return Err(CliError::Usage(format!("unknown preset {s:?}; use star:Q:K, left-right:Q or l-shift:Q:L1,L2"))),
    };
    Ok(spec)
}

fn load_tiling(src: &TilingSource) -> Result<TilingGraph, CliError> {
    match (&src.tiling, src.p, src.q) {
        (Some(path), _, _) => Ok(TilingGraph::from_json(&std::fs::read_to_string(path)?)?),
        (None, Some(p), Some(q)) => Ok(build_tiling(p, q, src.layers.unwrap_or(1))?),
        _ => Err(CliError::Usage("give --tiling FILE or -p P -q Q [-l LAYERS]".into())),
    }
}

fn parse_region(g: &TilingGraph, s: &str) -> Result<BoundaryRegion, CliError> {
    let (a, b) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("region {s:?} must be start:len")))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad region {s:?}")));
    Ok(BoundaryRegion::new(g, parse(a)?, parse(b)?)?)
}

fn parse_regions(g: &TilingGraph, s: &str) -> Result<Vec<BoundaryRegion>, CliError> {
    if s == "all-contiguous" {
        return Ok(BoundaryRegion::all_contiguous(g));
    }
    s.split(',').map(|r| parse_region(g, r)).collect()
}

fn observable(name: &str, k: usize) -> Result<CMatrix, CliError> {
    let gens = total_spin_generators(k);
    Ok(match name {
        "jz" => gens.jz.clone(),
        "jx" => gens.jx.clone(),
        "casimir" => gens.casimir(),
        "z0" => embed(&(&spin_half()[2] * hitlab::C64::new(2.0, 0.0)), 0, k),
        _ => return Err(CliError::Usage(format!("unknown observable {name:?}; use jz, jx, casimir or z0"))),
    })
}

#[derive(Serialize)]
struct EvenblyStudy {
    n: usize,
    samples: usize,
    seed: u64,
    both: usize,
    isometry_condition: usize,
    su2_invariant: usize,
    min_isometry_residual: f64,
    max_invariance_residual: f64,
    perfect_tensor_control: hitlab::nogo::EvenblyReport,
}

#[allow(clippy::too_many_arguments)]
fn nogo(case: NogoCase, n: usize, symmetry: &str, starts: usize, samples: usize, m: usize, d: usize, seed: u64) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match case {
        NogoCase::TwoUniform => {
            let dims = vec![2; n];
            let sym = match symmetry {
                "su2" => Symmetry::su2_qubits(n),
                "u1" => Symmetry::U1(GeneratorSpec::total_spin(&dims, 2)),
                _ => return Err(CliError::Usage(format!("unknown symmetry {symmetry:?}; use su2 or u1"))),
            };
            let opts = OptimizeOptions {
                starts,
                seed,
                ..Default::default()
            };
            serde_json::to_value(min_two_uniform_deviation(&dims, &sym, &opts)?)?
        }
        NogoCase::Evenbly => {
            let basis = su2_invariant_basis(&vec![2; n])?;
            if basis.ncols() == 0 {
                return Err(HitError::Spec(format!("no SU(2)-invariant states on {n} qubits")).into());
            }
            let mut study = EvenblyStudy {
                n,
                samples,
                seed,
                both: 0,
                isometry_condition: 0,
                su2_invariant: 0,
                min_isometry_residual: f64::INFINITY,
                max_invariance_residual: 0.0,
                perfect_tensor_control: check_evenbly_code(&perfect_tensor(), 0)?,
            };
            for _ in 0..samples {
                let r = check_evenbly_state(&random_in_subspace(&basis, &mut rng), n, 0)?;
                study.both += usize::from(r.both);
                study.isometry_condition += usize::from(r.isometry_condition);
                study.su2_invariant += usize::from(r.su2_invariant);
                study.min_isometry_residual = study.min_isometry_residual.min(r.isometry_residual);
                study.max_invariance_residual = study.max_invariance_residual.max(r.invariance_residual);
            }
            serde_json::to_value(study)?
        }
        NogoCase::Bipartitions => {
            if n == 0 || 2 * n > 12 {
                return Err(CliError::Usage("bipartitions needs 1 <= n <= 6 pairs".into()));
            }
            let dims = vec![2; 2 * n];
            let bell = count_mm_balanced_bipartitions(&opposite_bell_pairs(n), &dims)?;
            let g = count_mm_balanced_bipartitions(&ghz(2 * n), &dims)?;
            let basis = su2_invariant_basis(&dims)?;
            let mut max_count = 0;
            let mut violations = 0;
            for _ in 0..samples {
                let c = count_mm_balanced_bipartitions(&random_in_subspace(&basis, &mut rng), &dims)?;
                max_count = max_count.max(c.count);
                violations += usize::from(c.count > c.bound);
            }
            json!({
                "parties": 2 * n,
                "bound": bell.bound,
                "total_bipartitions": bell.total,
                "bell_pairs": bell,
                "ghz_count": g.count,
                "samples": samples,
                "seed": seed,
                "max_sampled_count": max_count,
                "violations": violations,
            })
        }
        NogoCase::Geomeasure => {
            let sp = SingletPairing::new(2 * m.max(1), d, (0..m).map(|i| (2 * i, 2 * i + 1)).collect())?;
            let e = geometric_measure_pairing(&sp);
            let (psi, dims) = sp.to_state()?;
            let ov = max_product_overlap(&psi, &dims, starts.clamp(1, 64), seed)?;
            json!({ "m": m, "d": d, "geometric_measure": e, "max_product_overlap": ov, "residual": (1.0 - ov - e).abs(), "seed": seed })
        }
    })
}
