use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use eigenroots::analysis::{
    cauchy_equation, cauchy_residual, gauss_lucas_chain, growth_report, interlace_real,
    is_strictly_increasing, min_cauchy_modulus_margin, radius_bound_rhs, normalized_by_half_b, scaled_cloud,
    Interlacing,
};
use eigenroots::eigensolver::{
    eigenpolynomial_cached, eigenpolynomial_range, EigenCache, Eigenpair,
};
use eigenroots::operator::{classify as classify_operator, exponent_d, Operator};
use eigenroots::rootfinder::{largest_modulus, roots as find_roots, RootCloud};
use rayon::prelude::*;
use rug::Rational;
use serde_json::json;

use crate::output::{
    f64_field, float, out_path, push_cloud, write_atomic, Table, ROOT_HEADER, SCALED_HEADER,
};
use crate::{Common, WithExponent};

const MARGIN_SAMPLES: usize = 32;
const HULL_TOL: f64 = 1e-6;

fn load(c: &Common) -> Result<(Operator, String)> {
    c.validate()?;
    let t =
        Operator::load(&c.operator).with_context(|| format!("loading {}", c.operator.display()))?;
    let stem = c
        .operator
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "operator".into());
    Ok((t, stem))
}

fn cache(c: &Common) -> Option<EigenCache> {
    c.cache_dir().map(EigenCache::new)
}

fn pair(t: &Operator, n: usize, cache: Option<&EigenCache>) -> Result<Eigenpair> {
    Ok(eigenpolynomial_cached(t, n, cache)?)
}

fn exponent(t: &Operator, w: &WithExponent) -> Result<Rational> {
    match w.exponent()? {
        Some(d) => Ok(d),
        None => exponent_d(t).context("no --d given and the operator has no scaling exponent"),
    }
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn classify(c: &Common) -> Result<ExitCode> {
    let (t, stem) = load(c)?;
    let cl = classify_operator(&t)?;
    let opt = |q: &Option<Rational>| q.as_ref().map(Rational::to_string);
    let set = cl
        .attainment
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let j0 = cl.j0.map_or("none".to_string(), |j| j.to_string());
    if cl.degenerate {
        println!(
            "degenerate, j0={j0}, d={}, b={}, A={{{set}}}",
            opt(&cl.d).unwrap_or_else(|| "none".into()),
            opt(&cl.b).unwrap_or_else(|| "none".into()),
        );
    } else {
        println!("exactly-solvable, non-degenerate, j0={j0}");
    }
    let b_eq_d = cl.b_equals_d();
    println!(
        "k={}, b=d: {}",
        cl.k,
        b_eq_d.map_or("n/a".to_string(), |f| f.to_string())
    );
    let report = json!({
        "operator": stem,
        "digest": t.digest(),
        "k": cl.k,
        "exactly_solvable": cl.exactly_solvable,
        "degenerate": cl.degenerate,
        "j0": cl.j0,
        "d": opt(&cl.d),
        "b": opt(&cl.b),
        "attainment": cl.attainment,
        "b_equals_d": b_eq_d,
    });
    let path = out_path(&c.out, &stem, "classify.json");
    write_atomic(
        &path,
        format!("{}\n", serde_json::to_string_pretty(&report)?).as_bytes(),
    )?;
    announce(&path);
    Ok(ExitCode::SUCCESS)
}

pub fn eigen(c: &Common) -> Result<ExitCode> {
    let (t, stem) = load(c)?;
    classify_operator(&t)?;
    let grid = c.grid()?;
    let cache = cache(c);
    let results = eigenpolynomial_range(&t, &grid, cache.as_ref());
    let mut dump = Vec::with_capacity(grid.len());
    let mut warnings = 0;
    for (n, r) in grid.iter().zip(results) {
        match r {
            Ok(e) => {
                println!("n={n}: lambda={}", e.lambda);
                dump.push(json!({
                    "n": n,
                    "lambda": e.lambda.to_string(),
                    "coeffs": e.p.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
                }));
            }
            Err(err) => {
                warnings += 1;
                eprintln!("warning: n={n}: {err}");
                dump.push(json!({ "n": n, "error": err.to_string() }));
            }
        }
    }
    let path = out_path(&c.out, &stem, "eigen.json");
    write_atomic(
        &path,
        format!("{}\n", serde_json::to_string_pretty(&dump)?).as_bytes(),
    )?;
    announce(&path);
    if warnings > 0 {
        eprintln!("{warnings} warning(s)");
    }
    Ok(ExitCode::SUCCESS)
}

fn clouds(
    t: &Operator,
    grid: &[usize],
    cache: Option<&EigenCache>,
    cloud_of: impl Fn(&Eigenpair) -> Result<RootCloud> + Sync,
) -> Result<Vec<RootCloud>> {
    grid.par_iter()
        .map(|&n| cloud_of(&pair(t, n, cache)?))
        .collect()
}

pub fn roots(c: &Common) -> Result<ExitCode> {
    let (t, stem) = load(c)?;
    let grid = c.grid()?;
    let cache = cache(c);
    let all = clouds(&t, &grid, cache.as_ref(), |e| {
        find_roots(&e.p, c.precision_bits).with_context(|| format!("roots of degree {}", e.n))
    })?;
    let mut table = Table::new(&ROOT_HEADER)?;
    for (n, cloud) in grid.iter().zip(&all) {
        push_cloud(&mut table, *n, cloud, false)?;
        println!("n={n}: r_n={}", largest_modulus(cloud).modulus);
    }
    let path = out_path(&c.out, &stem, "roots.csv");
    table.save(&path)?;
    announce(&path);
    Ok(ExitCode::SUCCESS)
}

pub fn growth(c: &Common) -> Result<ExitCode> {
    let (t, stem) = load(c)?;
    let grid = c.grid()?;
    let cache = cache(c);
    let report = growth_report(&t, &grid, c.prefactor, c.precision_bits, cache.as_ref())?;
    let mut table = Table::new(&["n", "r_n", "exponent_n"])?;
    for row in &report.rows {
        let exp = row.exponent_n.map(f64_field).unwrap_or_default();
        println!(
            "n={} r_n={} exponent_n={}",
            row.n,
            row.r_n,
            if exp.is_empty() { "-" } else { &exp }
        );
        table.row([row.n.to_string(), f64_field(row.r_n), exp])?;
    }
    let fit_c = report.fitted_c.map(f64_field).unwrap_or_default();
    let fit_gamma = report.fitted_gamma.map(f64_field).unwrap_or_default();
    if report.fitted_gamma.is_some() {
        println!("fit: r_n ≈ {fit_c}·n^{fit_gamma}");
    }
    table.row(["fit".to_string(), fit_c, fit_gamma])?;
    let path = out_path(&c.out, &stem, "growth.csv");
    table.save(&path)?;
    announce(&path);
    Ok(ExitCode::SUCCESS)
}

pub fn scaled(w: &WithExponent) -> Result<ExitCode> {
    let c = &w.common;
    let (t, stem) = load(c)?;
    let d = exponent(&t, w)?;
    let grid = c.grid()?;
    let cache = cache(c);
    let all = clouds(&t, &grid, cache.as_ref(), |e| {
        scaled_cloud(e, &d, c.precision_bits)
            .with_context(|| format!("scaled roots of degree {}", e.n))
    })?;
    let mut table = Table::new(&SCALED_HEADER)?;
    for (n, cloud) in grid.iter().zip(&all) {
        push_cloud(&mut table, *n, cloud, true)?;
        println!("n={n}: max |z| of q_n = {}", largest_modulus(cloud).modulus);
    }
    let path = out_path(&c.out, &stem, "scaled.csv");
    table.save(&path)?;
    announce(&path);
    Ok(ExitCode::SUCCESS)
}

pub fn cauchy(w: &WithExponent) -> Result<ExitCode> {
    let c = &w.common;
    let (t, stem) = load(c)?;
    let d = exponent(&t, w)?;
    let grid = c.grid()?;
    let cache = cache(c);
    println!("{}", cauchy_equation(&t)?);
    let reports = grid
        .par_iter()
        .map(|&n| {
            let e = pair(&t, n, cache.as_ref())?;
            cauchy_residual(&t, &e, &d, c.samples, c.radius_factor, c.precision_bits)
                .with_context(|| format!("residuals at degree {n}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["n", "sample_re", "sample_im", "residual"])?;
    for rep in &reports {
        for (z, r) in rep.sample_points.iter().zip(&rep.residuals) {
            table.row([rep.n.to_string(), float(&z.re), float(&z.im), f64_field(*r)])?;
        }
        println!(
            "n={}: median residual {:e}, skipped {}",
            rep.n,
            rep.median,
            rep.skipped.len()
        );
    }
    let path = out_path(&c.out, &stem, "residuals.csv");
    table.save(&path)?;
    announce(&path);
    Ok(ExitCode::SUCCESS)
}

struct Check {
    name: &'static str,
    n: Option<usize>,
    value: String,
    threshold: String,
    pass: bool,
}

fn per_degree_checks(t: &Operator, e: &Eigenpair, r: f64, prec: u32) -> Vec<Check> {
    let k = t.order();
    let n = Some(e.n);
    let failed = |name, err: String| Check {
        name,
        n,
        value: format!("error: {err}"),
        threshold: String::new(),
        pass: false,
    };
    let mut out = Vec::new();
    out.push(match min_cauchy_modulus_margin(e, k, r, MARGIN_SAMPLES, prec) {
        Ok(m) => Check {
            name: "cauchy_margin",
            n,
            value: f64_field(m),
            threshold: ">= -1e-9".into(),
            pass: m >= -1e-9,
        },
        Err(err) => failed("cauchy_margin", err.to_string()),
    });
    out.push(match radius_bound_rhs(t, e.n, r) {
        Ok(v) => Check {
            name: "radius_bound",
            n,
            value: f64_field(v),
            threshold: ">= 1-1e-9".into(),
            pass: v >= 1.0 - 1e-9,
        },
        Err(err) => failed("radius_bound", err.to_string()),
    });
    out.push(match gauss_lucas_chain(e, k, HULL_TOL, prec) {
        Ok(chain) => {
            let bad: Vec<String> = chain
                .iter()
                .filter(|c| !c.1)
                .map(|c| c.0.to_string())
                .collect();
            Check {
                name: "gauss_lucas",
                n,
                value: if bad.is_empty() {
                    "all orders".into()
                } else {
                    format!("fails at j={}", bad.join(" "))
                },
                threshold: format!("tol {HULL_TOL:e}*r_n"),
                pass: bad.is_empty(),
            }
        }
        Err(err) => failed("gauss_lucas", err.to_string()),
    });
    out
}

pub fn checks(c: &Common) -> Result<ExitCode> {
    let (t, stem) = load(c)?;
    exponent_d(&t)?;
    let grid = c.grid()?;
    let cache = cache(c);
    let per_n = grid
        .par_iter()
        .map(|&n| {
            let e = pair(&t, n, cache.as_ref())?;
            let cloud = find_roots(&e.p, c.precision_bits)
                .with_context(|| format!("roots of degree {n}"))?;
            let r = largest_modulus(&cloud).modulus;
            Ok(((n, r), per_degree_checks(&t, &e, r, c.precision_bits)))
        })
        .collect::<Result<Vec<_>>>()?;
    let radii: Vec<(usize, f64)> = per_n.iter().map(|x| x.0).collect();
    let mut all: Vec<Check> = per_n.into_iter().flat_map(|x| x.1).collect();
    if radii.len() >= 2 {
        let r: Vec<f64> = radii.iter().map(|x| x.1).collect();
        let pass = is_strictly_increasing(&r);
        all.push(Check {
            name: "r_n_increasing",
            n: None,
            value: pass.to_string(),
            threshold: "strict".into(),
            pass,
        });
        match normalized_by_half_b(&t, &radii) {
            Ok(v) => {
                let pass = is_strictly_increasing(&v);
                all.push(Check {
                    name: "r_n_over_n_half_b_increasing",
                    n: None,
                    value: pass.to_string(),
                    threshold: "strict".into(),
                    pass,
                });
            }
            Err(err) => all.push(Check {
                name: "r_n_over_n_half_b_increasing",
                n: None,
                value: format!("error: {err}"),
                threshold: String::new(),
                pass: false,
            }),
        }
    }
    let mut table = Table::new(&["check", "n", "value", "threshold", "pass"])?;
    let mut failures = 0;
    for ch in &all {
        let n = ch.n.map(|n| n.to_string()).unwrap_or_default();
        println!(
            "{} {:<30} n={:<5} {} ({})",
            if ch.pass { "PASS" } else { "FAIL" },
            ch.name,
            if n.is_empty() { "all" } else { &n },
            ch.value,
            ch.threshold
        );
        failures += usize::from(!ch.pass);
        table.row([
            ch.name.to_string(),
            n,
            ch.value.clone(),
            ch.threshold.clone(),
            ch.pass.to_string(),
        ])?;
    }
    let path = out_path(&c.out, &stem, "checks.csv");
    table.save(&path)?;
    announce(&path);
    println!("{} passed, {failures} failed", all.len() - failures);
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn interlace(w: &WithExponent) -> Result<ExitCode> {
    let c = &w.common;
    let (t, stem) = load(c)?;
    let d = exponent(&t, w)?;
    let grid = c.grid()?;
    if grid.len() < 2 || grid.windows(2).any(|p| p[1] != p[0] + 1) {
        bail!("interlacing compares consecutive degrees; give at least two, e.g. --n-grid 19,20");
    }
    let cache = cache(c);
    let all = clouds(&t, &grid, cache.as_ref(), |e| {
        scaled_cloud(e, &d, c.precision_bits)
            .with_context(|| format!("scaled roots of degree {}", e.n))
    })?;
    let mut table = Table::new(&["n", "n_next", "interlace"])?;
    let mut failed = false;
    for (i, pair) in all.windows(2).enumerate() {
        let flag = interlace_real(&pair[1], &pair[0], c.imag_tol)
            .with_context(|| format!("degrees {} and {}", grid[i], grid[i + 1]))?;
        failed |= flag == Interlacing::NotInterlaced;
        println!("n={},{} interlace: {flag}", grid[i], grid[i + 1]);
        table.row([
            grid[i].to_string(),
            grid[i + 1].to_string(),
            flag.to_string(),
        ])?;
    }
    let path = out_path(&c.out, &stem, "interlace.csv");
    table.save(&path)?;
    announce(&path);
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
