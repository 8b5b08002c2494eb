use crate::report::{self, Counted, Report};
use crate::{ConstructArgs, Failure, Outcome, Seed};
use dropout_design::constructions::{construct as build_geometric, Family};
use dropout_design::design::*;
use dropout_design::field::Field;
use dropout_design::filter::*;
use dropout_design::geometry::{known_cap_size, Space};
use dropout_design::oa::*;
use dropout_design::optimality::{run_experiment, Regime, Scenario};
use std::path::{Path, PathBuf};

const OPTIMUM: i128 = 1_259_712;

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_design(path: &Path) -> Result<DropoutDesign, Failure> {
    read_ddesign(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Writes `text` to `out`, or to stdout when no file is given.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::domain(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_for(out: Option<&Path>) -> Report {
    Report { to_stderr: out.is_none() }
}

fn parse_type(s: &str) -> Result<TypeVector, Failure> {
    TypeVector::parse(s).map_err(|e| Failure::usage(format!("--type: {e}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Failure::usage(format!("{what}: {x:?} is not a number"))))
        .collect()
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("--family {family} needs {flag}")))
}

/// Verifies at each type and reports; false when any type fails.
fn verify_and_report(design: &DropoutDesign, types: &[TypeVector], report: &Report) -> Result<Vec<u64>, Failure> {
    let mut lambdas = Vec::new();
    for t in types {
        match verify_type(design, t)? {
            Verification::Verified(p) => {
                let tops = p.top_lambdas();
                report.line(format!("type {t}: verified, lambda={} on {} window(s)", tops[0], tops.len()));
                if tops.iter().any(|&l| l != tops[0]) {
                    report.line(format!("  per-window lambda: {tops:?}"));
                }
                if p.is_degenerate() {
                    report.line("  warning: lambda = 0, regular only vacuously");
                }
                lambdas.push(tops[0]);
            }
            Verification::Failed(c) => {
                report.line(format!("type {t}: FAILED, {}", report::counterexample(&c)));
                return Err(Failure::domain(format!("design is not regular at type {t}")));
            }
        }
    }
    Ok(lambdas)
}

pub fn construct(args: &ConstructArgs) -> Outcome {
    let report = report_for(args.out.as_deref());
    let family = args.family.replace('_', "-");
    let (design, predicted, types) = match family.as_str() {
        "oa" => construct_oa(args, &report)?,
        "product" => {
            if args.parts.len() < 2 {
                return Err(Failure::usage("--family product needs at least two --part files"));
            }
            let parts = args.parts.iter().map(|p| read_design(p)).collect::<Result<Vec<_>, _>>()?;
            let design = direct_product(&parts)?;
            let types = args.ty.as_deref().map(parse_type).transpose()?.into_iter().collect();
            report.line(format!("family product of {} designs", parts.len()));
            (design, None, types)
        }
        name => {
            let family: Family = match name {
                "spread" => Family::PgSpread,
                other => other.parse().map_err(|_| Failure::usage(format!("unknown family {other:?}")))?,
            };
            let q = need(args.q, "--q", name)?;
            let d = need(args.d, "--d", name)?;
            let t = match family {
                Family::AgHyperplane | Family::PgSpread => need(args.t, "--t", name)?,
                _ => args.t.unwrap_or(0),
            };
            let geo = build_geometric(family, d, q, t)?;
            report.line(format!("family {} d={d} q={q}{}", geo.family, if t > 0 { format!(" t={t}") } else { String::new() }));
            let types = match &args.ty {
                Some(s) => vec![parse_type(s)?],
                None => geo.types.clone(),
            };
            let p = &geo.predicted;
            let predicted = (p.v.to_string(), p.k.clone(), p.lambda, p.n, p.b);
            (geo.design, Some(predicted), types)
        }
    };
    let counted = Counted::of(&design);
    if let Some((v, k, lambda, n, b)) = &predicted {
        report.line(report::params_line("predicted", v, k, Some(lambda.to_string()), *n, *b));
    }
    report.line(report::params_line("counted", &counted.v(), &counted.k, None, counted.n, counted.b));
    emit(args.out.as_deref(), &write_ddesign(&design))?;
    if let Some(out) = &args.out {
        report.line(format!("wrote {}", out.display()));
    }
    let lambdas = verify_and_report(&design, &types, &report)?;
    if let Some((v, k, lambda, n, b)) = predicted {
        let matches = v == counted.v() && k == counted.k && n == counted.n && b == counted.b && lambdas.iter().all(|&l| l == lambda);
        if !matches {
            return Err(Failure::domain("counted parameters differ from the prediction"));
        }
    }
    Ok(())
}

type Built = (DropoutDesign, Option<(String, Vec<usize>, u64, usize, usize)>, Vec<TypeVector>);

fn construct_oa(args: &ConstructArgs, report: &Report) -> Result<Built, Failure> {
    let q = need(args.q, "--q", "oa")?;
    let partition = args.partition.as_deref().map(|s| parse_list(s, "--partition")).transpose()?;
    let ty = args.ty.as_deref().map(parse_type).transpose()?;
    let g = match &args.generator {
        Some(rows) => {
            let field = Field::new(q)?;
            let m = GeneratorMatrix::parse_rows(&field, rows)?;
            let partition = partition.ok_or_else(|| Failure::usage("--generator needs --partition"))?;
            let ty = ty.unwrap_or_else(|| TypeVector::ones(partition.len()));
            report.line(format!("family oa q={q} generator {rows}"));
            GeneratorMatrix::new(field, m, partition, ty)?
        }
        None => {
            let source: GeneratorSource = match &args.source {
                Some(s) => s.parse().map_err(|e: dropout_design::Error| Failure::usage(e.to_string()))?,
                None => match (partition.as_ref().map(Vec::len), &ty) {
                    (_, Some(t)) if t.as_slice() == [2, 1] => GeneratorSource::LineSplit,
                    (Some(3), _) => GeneratorSource::Cap,
                    _ => GeneratorSource::PgPoints,
                },
            };
            let partition = match (source, partition) {
                (GeneratorSource::TwoLines, p) => p.unwrap_or(vec![q as usize; 2]),
                (_, Some(p)) => p,
                (_, None) => return Err(Failure::usage("--family oa needs --partition")),
            };
            let total: usize = partition.iter().sum();
            let d = match (args.d, source) {
                (Some(d), _) => d,
                (None, GeneratorSource::PgPoints) => (1..)
                    .find(|&d| Space::projective(d, q).map_or(true, |s| s.num_points() >= total))
                    .expect("some dimension has enough points"),
                (None, GeneratorSource::Cap) => match known_cap_size(2, q) {
                    Some(k) if k >= total => 2,
                    _ => 3,
                },
                (None, _) => 2,
            };
            let g = generator_from_geometry(source, d, q, &partition)?;
            report.line(format!("family oa q={q} source {source:?} d={d} partition {partition:?}"));
            match ty {
                Some(t) if &t != g.declared_type() => with_type(&g, t)?,
                _ => g,
            }
        }
    };
    let ty = g.declared_type().clone();
    let supplement = ty.as_slice().iter().any(|&d| d >= 2);
    let built = design_from_generator(&g, supplement)?;
    report.line(format!(
        "generator rows {} index rho={} supplement copies {}",
        g.matrix().rows(),
        built.rho,
        built.supplement_copies
    ));
    let q = q as usize;
    let sizes: Vec<usize> = g.partition().iter().map(|&k| k * q).collect();
    let v = if sizes.iter().all(|&s| s == sizes[0]) { sizes[0].to_string() } else { format!("({})", sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(",")) };
    let mut k: Vec<usize> = g.partition().to_vec();
    if built.supplement_copies > 0 {
        // a supplement sub-block is one symbol group
        k.push(q);
    }
    k.sort_unstable();
    k.dedup();
    let b = built.oa.rows.len() + built.supplement_copies * g.partition().iter().product::<usize>();
    let predicted = (v, k, built.rho, g.partition().len(), b);
    Ok((built.design, Some(predicted), vec![ty]))
}

pub fn verify(file: &Path, ty: &str, shifted: bool, budget: Option<u128>) -> Outcome {
    let design = read_design(file)?;
    let ty = parse_type(ty)?;
    let mut opts = VerifyOptions::default();
    if shifted {
        opts.mode = VerifyMode::Shifted;
    }
    if let Some(b) = budget {
        opts.budget = b;
    }
    let c = Counted::of(&design);
    println!("{}", report::params_line("design", &c.v(), &c.k, None, c.n, c.b));
    match dropout_design::design::verify(&design, &ty, opts)? {
        Verification::Verified(p) => {
            println!("{}", report::profile(&p));
            let tops = p.top_lambdas();
            println!("verified at type {ty}: lambda={tops:?}");
            if p.is_degenerate() {
                println!("warning: lambda = 0 in some window, regular only vacuously");
            }
            let id = concurrence_identity(&design, &p);
            if !id.holds() {
                return Err(Failure::domain(format!("counting identity fails: {id:?}")));
            }
            Ok(())
        }
        Verification::Failed(c) => {
            println!("not regular: {}", report::counterexample(&c));
            Err(Failure::domain(format!("design is not regular at type {ty}")))
        }
    }
}

pub fn complement(file: &Path, out: Option<&Path>) -> Outcome {
    let c = dropout_design::design::complement(&read_design(file)?)?;
    emit(out, &write_ddesign(&c))
}

fn parse_points(s: &str) -> Result<Vec<(usize, u32)>, Failure> {
    s.split(',')
        .map(|item| {
            let bad = || Failure::usage(format!("--points: expected layer:point, got {item:?}"));
            let (l, p) = item.trim().split_once(':').ok_or_else(bad)?;
            let l: usize = l.parse().map_err(|_| bad())?;
            let p: u32 = p.parse().map_err(|_| bad())?;
            if l == 0 {
                return Err(Failure::usage("--points: layers are counted from 1"));
            }
            Ok((l - 1, p))
        })
        .collect()
}

pub fn delete(file: &Path, points: &str, out: Option<&Path>) -> Outcome {
    let design = read_design(file)?;
    let removed = parse_points(points)?;
    let del = delete_points(&design, &removed)?;
    let report = report_for(out);
    for (i, kept) in del.kept.iter().enumerate() {
        let labels: Vec<String> = kept.iter().map(u32::to_string).collect();
        report.line(format!("layer {} keeps {}", i + 1, labels.join(",")));
    }
    emit(out, &write_ddesign(&del.design))
}

pub fn extend(file: &Path, n: usize, ty: Option<&str>, out: Option<&Path>) -> Outcome {
    let design = read_design(file)?;
    let ty = match ty {
        Some(s) => parse_type(s)?,
        None => TypeVector::ones(design.layers()),
    };
    emit(out, &write_ddesign(&dropout_design::design::extend(&design, &ty, n)?))
}

pub fn restrict(file: &Path, layers: &str, out: Option<&Path>) -> Outcome {
    let design = read_design(file)?;
    let layers = parse_list(layers, "--layers")?;
    if layers.contains(&0) {
        return Err(Failure::usage("--layers: layers are counted from 1"));
    }
    let zero_based: Vec<usize> = layers.iter().map(|l| l - 1).collect();
    emit(out, &write_ddesign(&dropout_design::design::restrict(&design, &zero_based)?))
}

pub fn product(files: &[PathBuf], out: Option<&Path>) -> Outcome {
    let parts = files.iter().map(|p| read_design(p)).collect::<Result<Vec<_>, _>>()?;
    emit(out, &write_ddesign(&direct_product(&parts)?))
}

pub fn export_masks(file: &Path, out: Option<&Path>) -> Outcome {
    emit(out, &write_dmask(&read_design(file)?))
}

fn parse_bases(s: &str) -> Result<Vec<Vec<u32>>, Failure> {
    s.split(';')
        .map(|b| parse_list(b, "--base").map(|xs| xs.into_iter().map(|x| x as u32).collect()))
        .collect()
}

pub fn filter_gen(v: u32, k: Option<usize>, base: Option<&str>, scramble_seed: Option<Seed>, out: Option<&Path>) -> Outcome {
    let report = report_for(out);
    let blocks: Vec<Vec<u32>> = match base {
        Some(s) => {
            let bases = parse_bases(s)?;
            if let Some(x) = bases.iter().flatten().find(|&&x| x >= v) {
                return Err(Failure::usage(format!("--base: {x} is outside Z_{v}")));
            }
            bases.iter().flat_map(|b| develop(b, v)).collect()
        }
        None => {
            let k = k.ok_or_else(|| Failure::usage("filter-gen needs --k or --base"))?;
            let mut found = None;
            for bases in 1..=4u64 {
                let families = search_difference_families(v, k, bases * k as u64)?;
                if let Some(f) = families.into_iter().next() {
                    found = Some(f);
                    break;
                }
            }
            let family = found.ok_or_else(|| Failure::domain(format!("no family with k={k} over Z_{v} from up to 4 base blocks")))?;
            family.blocks
        }
    };
    let params = verify_difference_family(v, &blocks).map_err(|e| Failure::domain(format!("not a balanced family: {e}")))?;
    if k.is_some_and(|k| k != params.k) {
        return Err(Failure::usage(format!("--k {} disagrees with base blocks of size {}", k.unwrap(), params.k)));
    }
    let mut matrices = filter_matrices(v, &blocks)?;
    report.line(format!("family v={v} k={} r={} lambda={} matrices={}", params.k, params.r, params.lambda, matrices.len()));
    if let Some(seed) = scramble_seed {
        let seed = seed.resolve();
        matrices = scramble(&matrices, seed).0;
        report.line(format!("scramble seed {seed}"));
    }
    emit(out, &write_dfilter(&matrices))
}

pub fn filter_verify(file: &Path) -> Outcome {
    let matrices = read_dfilter(&read_text(file)?).map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    match verify_filter_family(&matrices) {
        Ok(p) => {
            println!("balanced: v={} matrices={} k={} r={} lambda={}", matrices[0].size(), matrices.len(), p.k, p.r, p.lambda);
            Ok(())
        }
        Err(e) => Err(Failure::domain(format!("not balanced: {e}"))),
    }
}

pub fn experiment(samples: usize, seed: Seed, out: Option<&Path>) -> Outcome {
    if samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    let seed = seed.resolve();
    let report = report_for(out);
    let exp = run_experiment(samples, seed, &Scenario::default())?;
    report.line(format!("seed {seed}, {samples} samples per regime"));
    let both = exp.summaries.iter().find(|s| s.regime == Regime::Both).expect("all regimes summarised");
    let hits = exp.samples.iter().filter(|s| s.regime == Regime::Both && s.determinant == OPTIMUM).count();
    report.line(format!("regime 4 max {} (optimum {OPTIMUM}, reached {hits} times)", both.max));
    emit(out, &exp.to_csv())
}
