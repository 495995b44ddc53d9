use std::time::Instant;

use p2sheaf::chern::{self, Branch};
use p2sheaf::cones::{self, ConjectureReport};
use p2sheaf::exceptional::{self, ControlBranch, ExceptionalSlope};
use p2sheaf::gaeta::{self, ResolutionShape};
use p2sheaf::gradecoh::interp::{default_route, minimal_k};
use p2sheaf::gradecoh::{self, InterpolationReport, Stratum};
use p2sheaf::rational::{fmt_rational, parse_rational};
use p2sheaf::{ChernCharacter, LogChern, Rational};
use rayon::prelude::*;
use serde_json::{json, to_value, Value};

use crate::output::{CliError, Line};
use crate::{BranchArg, CharArgs, RunConfig, Verify};

type Out = Result<Vec<Line>, CliError>;

fn val<T: serde::Serialize>(x: &T) -> Value {
    to_value(x).expect("report types serialize to JSON")
}

fn rat(s: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(s)?)
}

fn read_ch(a: &CharArgs) -> Result<ChernCharacter, CliError> {
    let (x, y, z) = (rat(&a.a)?, rat(&a.b)?, rat(&a.c)?);
    Ok(if a.ch { ChernCharacter::new(x, y, z) } else { LogChern::new(x, y, z).ch() })
}

fn read_log(a: &CharArgs) -> Result<LogChern, CliError> {
    Ok(read_ch(a)?.to_log()?)
}

pub fn char(a: &CharArgs) -> Out {
    let c = read_ch(a)?;
    let log = c.to_log().ok();
    let chi = c.euler();
    let above = log.as_ref().map(exceptional::is_above_dlp);
    let sd = c.serre_dual();
    let mut text = String::new();
    if let Some(l) = &log {
        text.push_str(&format!("log (r, mu, Delta) = {l}\n"));
    }
    text.push_str(&format!("ch (r, c1, ch2)    = {c}\n"));
    text.push_str(&format!("chi = {}\n", fmt_rational(&chi)));
    match above {
        Some(true) => text.push_str("DLP: above\n"),
        Some(false) => text.push_str("DLP: on or below\n"),
        None => text.push_str("DLP: undefined for rank <= 0\n"),
    }
    text.push_str(&format!("Serre dual: ch {sd}"));
    if let Ok(l) = sd.to_log() {
        text.push_str(&format!(", log {l}"));
    }
    let json = json!({
        "command": "char",
        "log": log.as_ref().map(val),
        "ch": val(&c),
        "chi": fmt_rational(&chi),
        "above_dlp": above,
        "serre_dual": val(&sd),
    });
    Ok(vec![Line::new(json, text)])
}

fn describe(e: &ExceptionalSlope) -> String {
    format!(
        "E_{{{}}}: rank {}, Delta {}, address {}",
        fmt_rational(&e.slope),
        e.rank,
        fmt_rational(&e.discriminant),
        e.dyadic_address
    )
}

pub fn exceptional(cfg: &RunConfig, slope: Option<&str>, max_rank: Option<u64>, lo: &str, hi: &str) -> Out {
    match (slope, max_rank) {
        (Some(s), None) => {
            let mu = rat(s)?;
            match exceptional::exceptional_with_slope(&mu, cfg.depth_cap) {
                Some(e) => Ok(vec![Line::new(json!({"command": "exceptional", "exceptional": val(&e)}), describe(&e))]),
                None => Err(CliError::Unsupported(format!(
                    "{} is not an exceptional slope within depth {}",
                    fmt_rational(&mu),
                    cfg.depth_cap
                ))),
            }
        }
        (None, Some(m)) => {
            let (lo, hi) = (rat(lo)?, rat(hi)?);
            if lo > hi {
                return Err(CliError::Usage("--lo exceeds --hi".into()));
            }
            Ok(exceptional::enumerate_exceptionals(m, &lo, &hi)
                .iter()
                .map(|e| Line::new(json!({"command": "exceptional", "exceptional": val(e)}), describe(e)))
                .collect())
        }
        _ => Err(CliError::Usage("give either a slope or --max-rank".into())),
    }
}

pub fn controlling(cfg: &RunConfig, a: &CharArgs, branch: BranchArg) -> Out {
    let xi = read_log(a)?;
    let b = match branch {
        BranchArg::Primary => ControlBranch::Primary,
        BranchArg::Secondary => ControlBranch::Secondary,
    };
    let c = exceptional::controlling_with_cap(&xi, b, cfg.depth_cap)?;
    let (g, f) = exceptional::endpoints(&c);
    let side = match b {
        ControlBranch::Primary => Branch::Larger,
        ControlBranch::Secondary => Branch::Smaller,
    };
    let orth = chern::orthogonal_slope_at_half(&xi, side)?;
    let text = format!(
        "orthogonal slope at Delta = 1/2: {orth}\ncontrolling: {}\nalpha = {}, beta = {}\nendpoints: mu_G = {g}, mu_F = {f}{}",
        describe(&c.exceptional),
        fmt_rational(&c.alpha.slope),
        fmt_rational(&c.beta.slope),
        if c.boundary { "\n(on an interval endpoint)" } else { "" }
    );
    let json = json!({
        "command": "controlling",
        "xi": val(&xi),
        "orthogonal_slope": val(&orth),
        "controlling": val(&c),
        "mu_g": val(&g),
        "mu_f": val(&f),
    });
    Ok(vec![Line::new(json, text)])
}

pub fn gaeta(a: &CharArgs) -> Out {
    let xi = read_log(a)?;
    let res = gaeta::gaeta_resolution(&xi)?;
    let tri = gaeta::gaeta_case(&xi)?;
    let model = gaeta::decompose_betti(&xi);
    let term = |t: &gaeta::TriangleTerm| match &t.exceptional {
        Some(e) => format!("E_{{{}}}^{}", fmt_rational(&e.slope), t.exponent),
        None => format!("virtual {}", t.character),
    };
    let mut text = format!(
        "xi = {xi}\nresolution: {res}\ncase: {}\ncontrolling slope: {}\ntriangle: F = {}, W = {}",
        tri.case,
        fmt_rational(&tri.controlling.gamma),
        term(&tri.f),
        term(&tri.w)
    );
    match &model {
        Ok(m) => {
            let p = &m.parts;
            text.push_str(&format!(
                "\nexponents (n1,n2,l1,l2,j1,j2) = ({},{},{},{},{},{})\nF block: {}\nW block: {}",
                p.n1, p.n2, p.l1, p.l2, p.j1, p.j2, m.block_b, m.block_a_shape
            ));
        }
        Err(e) => text.push_str(&format!("\ndecomposition unavailable: {e}")),
    }
    let json = json!({
        "command": "gaeta",
        "xi": val(&xi),
        "resolution": res.to_string(),
        "shape": val(&res),
        "case": tri.case.to_string(),
        "controlling_slope": fmt_rational(&tri.controlling.gamma),
        "triangle": val(&tri),
        "decomposition": model.as_ref().ok().map(val),
    });
    Ok(vec![Line::new(json, text)])
}

pub fn cones(n: u64) -> Out {
    let eff = cones::eff_primary_edge(n)?;
    let mut text = format!("n = {n}\neff: {}", eff.class);
    let mut json = json!({"command": "cones", "n": n, "eff": eff.class.to_string(), "eff_edge": val(&eff)});
    match cones::mov_primary_edge(n) {
        Ok((mov, shape)) => {
            let (beta, p) = cones::dual_curve_certificate(n)?;
            text.push_str(&format!(
                "\nmov: {mov}\ninterpolating bundle: {shape}\ndual curve: beta = {beta}, pairing {}",
                fmt_rational(&p)
            ));
            json["family"] = val(&cones::family(n)?);
            json["mov"] = mov.to_string().into();
            json["interpolating_shape"] = shape.to_string().into();
            json["dual_curve"] = val(&beta);
            json["pairing"] = fmt_rational(&p).into();
            let ok = p == Rational::from_integer(0.into()) && eff.class.h <= mov.h;
            return Ok(vec![Line::check(json, text, ok)]);
        }
        Err(e) => text.push_str(&format!("\nmov: not computed ({e})")),
    }
    Ok(vec![Line::new(json, text)])
}

pub fn table(n: u64) -> Out {
    let rows = cones::sbld_table(n)?;
    let report = cones::table_consistency(n)?;
    let mut lines: Vec<Line> = rows
        .iter()
        .map(|r| {
            let id = match &r.map_pattern {
                Some(p) => format!("{} {}", r.betti_id, p),
                None => r.betti_id.clone(),
            };
            let names: Vec<&str> = r.destabilizers.iter().map(|d| d.name.as_str()).collect();
            let bundle = r.interpolating_shape.as_ref().map_or("-".to_string(), |s| s.to_string());
            let text = format!(
                "{id:<14} {:<32} base {:<8} destabilized by {:<24} bundle {bundle}{}",
                r.betti.to_string(),
                r.base_locus,
                names.join(", "),
                if r.wall_boundary { "" } else { "  (dashed)" }
            );
            Line::new(json!({"command": "table", "n": n, "row": val(r)}), text)
        })
        .collect();
    let text = if report.ok() {
        format!("consistency: ok ({} rows)", report.rows)
    } else {
        format!("consistency: FAIL\n  {}", report.violations.join("\n  "))
    };
    let ok = report.ok();
    lines.push(Line::check(json!({"command": "table", "n": n, "consistency": val(&report)}), text, ok));
    Ok(lines)
}

/// Runs `f` over `params` in parallel and keeps the input order.
fn fan_out<P: Sync, F>(params: &[P], f: F) -> Out
where
    F: Fn(&P) -> Out + Sync + Send,
{
    let parts: Vec<Out> = params.par_iter().map(f).collect();
    let mut lines = Vec::new();
    for p in parts {
        lines.extend(p?);
    }
    Ok(lines)
}

fn timed<T>(cfg: &RunConfig, f: impl FnOnce() -> Result<T, CliError>) -> Result<(T, Option<f64>), CliError> {
    let t = Instant::now();
    let x = f()?;
    Ok((x, cfg.timing.then(|| t.elapsed().as_secs_f64() * 1e3)))
}

fn finish(mut line: Line, ms: Option<f64>) -> Line {
    if let Some(ms) = ms {
        line.set_timing(ms);
    }
    line
}

fn interp_line(cfg: &RunConfig, check: &str, param: (&str, u64), kmin: Option<u64>, reports: &[InterpolationReport]) -> Line {
    let last = reports.last().expect("at least one k is tried");
    let ok = kmin.is_some();
    let groups: Vec<String> = last
        .trials
        .iter()
        .find(|t| t.vanishes())
        .or(last.trials.first())
        .map(|t| t.groups.iter().map(|g| format!("{}: h = ({}, {}, {})", g.sheaf, g.report.h0, g.report.h1, g.report.h2)).collect())
        .unwrap_or_default();
    let verdict = match kmin {
        Some(k) => format!("pass at k = {k}"),
        None => format!("FAIL up to k = {}", last.k),
    };
    let text = format!(
        "{check} {}={} n={} route={:?} seed={}: {verdict}, chi audit {}\n  {}",
        param.0,
        param.1,
        last.n,
        last.route,
        cfg.seed,
        if last.chi_audit { "ok" } else { "FAILED" },
        groups.join("\n  ")
    );
    let json = json!({
        "check": check,
        param.0: param.1,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "minimal_k": kmin,
        "report": val(last),
    });
    Line::check(json, text, ok)
}

pub fn verify(cfg: &RunConfig, v: &Verify) -> Out {
    let f = cfg.field()?;
    if cfg.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    match v {
        Verify::InterpTri { r, k, kmax } => {
            for &x in r {
                if x < 3 {
                    return Err(CliError::Unsupported(format!("triangular check needs r >= 3, got {x}")));
                }
                // points are separated by forms of degree up to n
                cfg.guard_degree((x * (x + 1) / 2) as i64)?;
            }
            fan_out(r, |&r| {
                let ((kmin, reports), ms) = timed(cfg, || {
                    let run = |k| gradecoh::verify_interpolation_triangular(r, k, cfg.seed, cfg.trials, f);
                    Ok(match k {
                        Some(k) => {
                            let rep = run(*k)?;
                            (rep.passed.then_some(*k), vec![rep])
                        }
                        None => minimal_k(*kmax, run)?,
                    })
                })?;
                Ok(vec![finish(interp_line(cfg, "interp-tri", ("r", r), kmin, &reports), ms)])
            })
        }
        Verify::InterpTan { s, k, kmax, route } => {
            for &x in s {
                if x < 2 {
                    return Err(CliError::Unsupported(format!("tangential check needs s >= 2, got {x}")));
                }
                cfg.guard_degree(2 * x as i64 + 2)?;
            }
            fan_out(s, |&s| {
                let rt = route.map(Into::into).unwrap_or_else(|| default_route(s));
                let ((kmin, reports), ms) = timed(cfg, || {
                    let run = |k| gradecoh::verify_interpolation_tangential(s, k, cfg.seed, cfg.trials, rt, f);
                    Ok(match k {
                        Some(k) => {
                            let rep = run(*k)?;
                            (rep.passed.then_some(*k), vec![rep])
                        }
                        None => minimal_k(*kmax, run)?,
                    })
                })?;
                Ok(vec![finish(interp_line(cfg, "interp-tan", ("s", s), kmin, &reports), ms)])
            })
        }
        Verify::Qk { s, k } => {
            let mut params = Vec::new();
            for &x in s {
                cfg.guard_degree(2 * x as i64 + 1)?;
                let ks: Vec<u64> = match k {
                    Some(k) => vec![*k],
                    None => (1..=x).collect(),
                };
                for kk in ks {
                    for i in 0..cfg.trials {
                        params.push((x, kk, cfg.seed.wrapping_add(i)));
                    }
                }
            }
            fan_out(&params, |&(s, k, seed)| {
                let (rep, ms) = timed(cfg, || Ok(gradecoh::qk_section_count(s, k, seed, f)?))?;
                let ok = rep.sections == k;
                let text = format!("qk s={s} k={k} seed={seed}: h0 = {} (expected {k}) {}", rep.sections, if ok { "pass" } else { "FAIL" });
                let json = json!({"check": "qk", "s": s, "k": k, "seed": seed, "sections": rep.sections, "report": val(&rep.report)});
                Ok(vec![finish(Line::check(json, text, ok), ms)])
            })
        }
        Verify::ZeroLocus { s } => {
            let mut params = Vec::new();
            for &x in s {
                if x < 1 {
                    return Err(CliError::Unsupported("zero locus needs s >= 1".into()));
                }
                cfg.guard_degree(2 * (2 * x as i64 - 1) + 3)?;
                for i in 0..cfg.trials {
                    params.push((x, cfg.seed.wrapping_add(i)));
                }
            }
            fan_out(&params, |&(s, seed)| {
                let (rep, ms) = timed(cfg, || Ok(gradecoh::tangent_section_zero_locus(s, seed, f)?))?;
                let si = s as i64;
                let expected = ResolutionShape::new(vec![(-(4 * si - 1), 1), (-(2 * si + 1), 1)], vec![(-2 * si, 3)]);
                let got = ResolutionShape::from_betti(&rep.betti);
                let length = (4 * si * si - 2 * si + 1) as u64;
                let ok = got == expected && rep.length == length;
                let text = format!(
                    "zero-locus s={s} seed={seed}: {got}, length {} (expected {expected}, length {length}) {}",
                    rep.length,
                    if ok { "pass" } else { "FAIL" }
                );
                let json = json!({
                    "check": "zero-locus", "s": s, "seed": seed,
                    "betti": got.to_string(), "expected": expected.to_string(),
                    "length": rep.length, "generators": rep.generators,
                });
                Ok(vec![finish(Line::check(json, text, ok), ms)])
            })
        }
        Verify::Betti { n, stratum } => {
            cfg.guard_degree(*n as i64 + 3)?;
            let strata: Vec<Stratum> = match stratum {
                Some(s) => vec![s.parse()?],
                None => gradecoh::table_strata(*n)?.into_iter().map(|x| x.1).collect(),
            };
            let mut lines = Vec::new();
            for st in strata {
                let (rep, ms) = timed(cfg, || Ok(gradecoh::betti_trials(*n, st, cfg.seed, cfg.trials, f)?))?;
                let mut text = format!(
                    "betti n={n} stratum={st}: {}/{} diagrams equal {} = {}",
                    rep.matches, rep.trials, rep.betti_id, rep.expected
                );
                for (seed, d) in &rep.mismatches {
                    text.push_str(&format!("\n  seed {seed}: {d}"));
                }
                let json = json!({
                    "check": "betti", "n": n, "stratum": st.to_string(), "seed": cfg.seed,
                    "trials": rep.trials, "matches": rep.matches, "betti_id": rep.betti_id,
                    "expected": rep.expected.to_string(),
                    "mismatches": rep.mismatches.iter().map(|(s, d)| json!([s, d.to_string()])).collect::<Vec<_>>(),
                });
                lines.push(finish(Line::check(json, text, rep.passed()), ms));
            }
            Ok(lines)
        }
        Verify::Conjecture { max_rank, d_lo, d_hi } => {
            if d_lo >= d_hi {
                return Err(CliError::Usage("--d-lo must be below --d-hi".into()));
            }
            let (reports, ms) = timed(cfg, || Ok(cones::conjecture_check(*max_rank, *d_lo..*d_hi)?))?;
            let mut lines: Vec<Line> = reports.iter().map(conjecture_line).collect();
            let passed = reports.iter().filter(|r| r.decomposition_found).count();
            let text = format!("conjecture max_rank={max_rank} d in [{d_lo}, {d_hi}): {passed}/{} instances decompose", reports.len());
            let json = json!({"check": "conjecture-summary", "max_rank": max_rank, "instances": reports.len(), "decomposed": passed});
            lines.push(finish(Line::check(json, text, passed == reports.len()), ms));
            Ok(lines)
        }
    }
}

fn conjecture_line(r: &ConjectureReport) -> Line {
    let head = format!(
        "conjecture rank={} gamma={} d={} n={}",
        r.gamma.rank,
        fmt_rational(&r.gamma.slope),
        r.d,
        r.n
    );
    let text = match (&r.witness, r.m) {
        (Some(w), Some(m)) => format!("{head}: pass, m = {m}, {} = [{}] + [{}]", w.total, w.block_b, w.block_a),
        _ => {
            let d: Vec<String> = r.deficits.iter().map(|(p, t, x)| format!("short {x} at position {p} twist {t}")).collect();
            format!("{head}: FAIL{}{}", if r.controlling_matches { "" } else { " (controlling slope differs)" }, if d.is_empty() { String::new() } else { format!(", {}", d.join(", ")) })
        }
    };
    let mut json = val(r);
    json["check"] = "conjecture".into();
    Line::check(json, text, r.decomposition_found)
}
