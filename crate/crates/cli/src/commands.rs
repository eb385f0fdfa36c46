use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use num_bigint::BigInt;
use serde_json::{json, Value};

use cellform::catalog::{to_json, Catalog, CatalogEntry, CatalogMap};
use cellform::configurations::{enumerate_convergent, Configuration};
use cellform::congruences::{statement, CongruenceCase, VerifyParams};
use cellform::ctengine::{backend, leading_coefficients_with, DEFAULT_BACKEND};
use cellform::ffhyper::{identity_matrix, GreeneEvaluator};
use cellform::modforms::source_table;
use cellform::recfit::{check_self_duality_symmetry, fit, guess};
use cellform::sequences::{a_sigma8, apery_a, apery_b};

use crate::output::{csv_line, emit, RunManifest};
use crate::{Cli, Command, Format};

/// What a command produced: its text, the failures to report, and the
/// parameters recorded in the manifest.
struct Produced {
    name: &'static str,
    parameters: Value,
    output: String,
    failures: Vec<Value>,
}

pub fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let start = Instant::now();
    let produced = match &cli.command {
        Command::Enumerate { n } => enumerate(cli, *n)?,
        Command::Coeffs { sigma, terms, backend } => coeffs(cli, sigma, *terms, backend)?,
        Command::Verify { statement, pmax, p, n, l, m, r } => verify(cli, statement, *pmax, p, n, l, m, r)?,
        Command::Modform { pmax } => modform(cli, *pmax)?,
        Command::Hyper { p, pmax } => hyper(cli, *p, *pmax)?,
        Command::Fit { sigma, terms, order, degree, max_order, max_degree, predict } => {
            fit_command(cli, sigma, *terms, *order, *degree, *max_order, *max_degree, *predict)?
        }
    };
    let manifest =
        RunManifest::new(produced.name, produced.parameters, &produced.output, start.elapsed(), produced.failures.len());
    emit(cli.out.as_deref(), &produced.output, &manifest)?;
    if produced.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{}", json!({ "failures": produced.failures }));
        Ok(ExitCode::from(1))
    }
}

fn catalog(cli: &Cli) -> Catalog {
    match &cli.cache_dir {
        Some(dir) => Catalog::in_dir(dir),
        None => Catalog::in_dir(Catalog::default_dir()),
    }
}

fn enumerate(cli: &Cli, n: usize) -> anyhow::Result<Produced> {
    let e = enumerate_convergent(n)?;
    let cat = catalog(cli);
    cat.insert_configurations(&e.configurations)?;
    let mut map = CatalogMap::new();
    for c in &e.configurations {
        map.insert(c.key(), CatalogEntry::for_configuration(c)?);
    }
    let output = match cli.format {
        Format::Json => to_json(&map)?,
        Format::Csv => {
            let mut s = csv_line(&["configuration", "dual", "self_dual"]);
            for entry in map.values() {
                let self_dual = (entry.dual == entry.configuration).to_string();
                s.push_str(&csv_line(&[entry.configuration.as_str(), entry.dual.as_str(), self_dual.as_str()]));
            }
            s
        }
    };
    Ok(Produced {
        name: "enumerate",
        parameters: json!({ "n": n, "count": e.count(), "count_dual_identified": e.count_dual_identified }),
        output,
        failures: Vec::new(),
    })
}

fn parse_configuration(sigma: &str) -> anyhow::Result<Configuration> {
    let c: Configuration = sigma.parse().with_context(|| format!("parsing --sigma {sigma:?}"))?;
    if !c.is_convergent() {
        bail!("{sigma} is not a convergent configuration");
    }
    Ok(c)
}

fn term_strings(terms: &[BigInt]) -> Vec<String> {
    terms.iter().map(ToString::to_string).collect()
}

fn coeffs(cli: &Cli, sigma: &str, n_max: u32, backend_name: &str) -> anyhow::Result<Produced> {
    let c = parse_configuration(sigma)?;
    let engine = backend(backend_name)?;
    let cat = catalog(cli);
    let record = leading_coefficients_with(&c, n_max, Some(&cat), engine.as_ref())?;
    let output = match cli.format {
        Format::Json => {
            serde_json::to_string(&json!({
                "configuration": record.config.key(),
                "terms": term_strings(&record.terms),
                "engine_version": record.provenance,
            }))? + "\n"
        }
        Format::Csv => {
            let mut s = csv_line(&["n", "value"]);
            for (n, t) in record.terms.iter().enumerate() {
                s.push_str(&csv_line(&[n.to_string(), t.to_string()]));
            }
            s
        }
    };
    Ok(Produced {
        name: "coeffs",
        parameters: json!({ "sigma": sigma, "terms": n_max, "backend": backend_name }),
        output,
        failures: Vec::new(),
    })
}

fn case_csv_header() -> String {
    csv_line(&["id", "config", "l", "p", "m", "r", "check", "lhs", "rhs", "modulus", "pass"])
}

fn case_csv(c: &CongruenceCase) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    csv_line(&[
        c.id.clone(),
        opt(c.params.config.clone()),
        opt(c.params.l.map(|x| x.to_string())),
        c.params.p.to_string(),
        opt(c.params.m.map(|x| x.to_string())),
        opt(c.params.r.map(|x| x.to_string())),
        opt(c.params.check.clone()),
        c.lhs.clone(),
        c.rhs.clone(),
        c.modulus.clone(),
        c.pass.to_string(),
    ])
}

#[allow(clippy::too_many_arguments)]
fn verify(
    cli: &Cli,
    id: &str,
    pmax: u64,
    p: &Option<Vec<u64>>,
    n: &Option<Vec<usize>>,
    l: &Option<Vec<u32>>,
    m: &Option<Vec<u64>>,
    r: &Option<Vec<u32>>,
) -> anyhow::Result<Produced> {
    let s = statement(id)?;
    let defaults = VerifyParams::default();
    let params = VerifyParams {
        p_max: pmax,
        primes: p.clone(),
        l: l.clone().unwrap_or(defaults.l),
        m: m.clone().unwrap_or(defaults.m),
        r: r.clone().unwrap_or(defaults.r),
        n_points: n.clone().unwrap_or(defaults.n_points),
        catalog: Some(catalog(cli)),
    };
    let report = s.run(&params)?;
    let output = match cli.format {
        Format::Json => report.to_json_lines()?,
        Format::Csv => std::iter::once(case_csv_header()).chain(report.cases.iter().map(case_csv)).collect(),
    };
    let failures = report.failures().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
    Ok(Produced {
        name: "verify",
        parameters: json!({
            "statement": s.id(), "pmax": pmax, "p": p, "n": params.n_points,
            "l": params.l, "m": params.m, "r": params.r,
        }),
        output,
        failures,
    })
}

fn modform(cli: &Cli, pmax: u64) -> anyhow::Result<Produced> {
    let rows = source_table(pmax)?;
    let mut output = String::new();
    let mut failures = Vec::new();
    if cli.format == Format::Csv {
        output.push_str(&csv_line(&["form", "p", "source", "value", "agree"]));
    }
    for row in &rows {
        let values: serde_json::Map<String, Value> =
            row.values.iter().map(|(name, v)| (name.to_string(), Value::String(v.to_string()))).collect();
        let line = json!({ "form": row.form.label(), "p": row.p, "values": values, "agree": row.agree() });
        if !row.agree() {
            failures.push(line.clone());
        }
        match cli.format {
            Format::Json => output.push_str(&(serde_json::to_string(&line)? + "\n")),
            Format::Csv => {
                for (name, v) in &row.values {
                    output.push_str(&csv_line(&[
                        row.form.label().to_string(),
                        row.p.to_string(),
                        name.to_string(),
                        v.to_string(),
                        row.agree().to_string(),
                    ]));
                }
            }
        }
    }
    Ok(Produced { name: "modform", parameters: json!({ "pmax": pmax }), output, failures })
}

fn hyper(cli: &Cli, p: Option<u64>, pmax: u64) -> anyhow::Result<Produced> {
    let primes = match p {
        Some(p) => vec![p],
        None => cellform::arith::primes_between(3, pmax),
    };
    let mut output = String::new();
    let mut failures = Vec::new();
    if cli.format == Format::Csv {
        output.push_str(&csv_line(&[
            "p", "lambda", "f21", "koike", "special_value", "transformation", "truncated", "truncated_literal",
        ]));
    }
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    for p in primes {
        let eval = GreeneEvaluator::new(p)?;
        for row in identity_matrix(p)? {
            let value = eval.evaluate(1, row.lambda)?;
            let line = json!({
                "p": row.p, "lambda": row.lambda, "f21": value.to_string(),
                "koike": row.koike, "special_value": row.special_value, "transformation": row.transformation,
                "truncated": row.truncated, "truncated_literal": row.truncated_literal,
            });
            if !row.all_pass() {
                failures.push(line.clone());
            }
            match cli.format {
                Format::Json => output.push_str(&(serde_json::to_string(&line)? + "\n")),
                Format::Csv => output.push_str(&csv_line(&[
                    row.p.to_string(),
                    row.lambda.to_string(),
                    value.to_string(),
                    flag(row.koike),
                    flag(row.special_value),
                    flag(row.transformation),
                    flag(row.truncated),
                    flag(row.truncated_literal),
                ])),
            }
        }
    }
    Ok(Produced { name: "hyper", parameters: json!({ "p": p, "pmax": pmax }), output, failures })
}

/// Closed forms for the configurations that have one; `None` means use the engine.
fn closed_form(c: &Configuration) -> anyhow::Result<Option<(&'static str, fn(u64) -> BigInt)>> {
    let known: [(&str, &str, fn(u64) -> BigInt); 4] = [
        ("1,3,5,2,4", "apery_a", |n| apery_a(n).into()),
        ("1,5,3,6,2,4", "apery_b", |n| apery_b(n).into()),
        ("1,3,7,5,2,6,4", "apery_a_squared", |n| BigInt::from(apery_a(n)).pow(2)),
        ("8,3,6,1,4,7,2,5", "a_sigma8", |n| a_sigma8(n).into()),
    ];
    for (sigma, name, f) in known {
        if sigma.parse::<Configuration>()? == *c {
            return Ok(Some((name, f)));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn fit_command(
    cli: &Cli,
    sigma: &str,
    terms: u32,
    order: Option<usize>,
    degree: Option<usize>,
    max_order: usize,
    max_degree: usize,
    predict: usize,
) -> anyhow::Result<Produced> {
    let c = parse_configuration(sigma)?;
    let total = terms + predict as u32;
    let (source, all) = match closed_form(&c)? {
        Some((name, f)) => (name.to_string(), (0..=total as u64).map(f).collect::<Vec<_>>()),
        None => {
            let engine = backend(DEFAULT_BACKEND)?;
            let record = leading_coefficients_with(&c, total, Some(&catalog(cli)), engine.as_ref())?;
            (DEFAULT_BACKEND.to_string(), record.terms)
        }
    };
    let seq = &all[..=terms as usize];
    let rec = match (order, degree) {
        (Some(r), Some(d)) => fit(seq, r, d)?,
        _ => guess(seq, max_order, max_degree)?,
    };
    let parameters = json!({
        "sigma": sigma, "terms": terms, "order": order, "degree": degree,
        "max_order": max_order, "max_degree": max_degree, "predict": predict, "source": source,
    });
    let Some(rec) = rec else {
        let failure = json!({ "reason": "no recurrence of the requested shape" });
        let output = serde_json::to_string(&json!({ "configuration": c.key(), "recurrence": null }))? + "\n";
        return Ok(Produced { name: "fit", parameters, output, failures: vec![failure] });
    };
    let extended = rec.extend(seq, predict)?;
    let predictions_match = extended[seq.len()..] == all[seq.len()..];
    let self_dual = (rec.order == 4).then(|| check_self_duality_symmetry(&rec)).transpose()?;
    let coefficients: Vec<Vec<String>> =
        rec.coefficients.iter().map(|p| p.iter().map(ToString::to_string).collect()).collect();
    let mut failures = Vec::new();
    if !predictions_match {
        failures.push(json!({ "reason": "predicted terms differ from computed terms" }));
    }
    let output = match cli.format {
        Format::Json => {
            serde_json::to_string(&json!({
                "configuration": c.key(),
                "source": source,
                "order": rec.order,
                "degree": rec.degree,
                "coefficients": coefficients,
                "self_dual_symmetry": self_dual,
                "predicted": term_strings(&extended[seq.len()..]),
                "predictions_match": predictions_match,
            }))? + "\n"
        }
        Format::Csv => {
            let mut s = csv_line(&["j", "k", "coefficient"]);
            for (j, p) in coefficients.iter().enumerate() {
                for (k, v) in p.iter().enumerate() {
                    s.push_str(&csv_line(&[j.to_string(), k.to_string(), v.clone()]));
                }
            }
            s
        }
    };
    Ok(Produced { name: "fit", parameters, output, failures })
}
