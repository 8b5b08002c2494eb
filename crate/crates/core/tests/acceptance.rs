//! End-to-end checks of the headline results, one line per check.
//!
//! Runs without the test harness so every line is printed even on success;
//! the process exits non-zero if any check fails.

mod common;

use common::*;
use dropout_design::combin::binomial;
use dropout_design::design::*;
use dropout_design::error::Error;
use dropout_design::field::Field;
use dropout_design::filter::*;
use dropout_design::geometry::{find_spread, gaussian_coefficient, GeometryKind, Space};
use dropout_design::oa::*;
use dropout_design::optimality::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const EXPERIMENT_LIMIT: Duration = Duration::from_secs(60);
const CATALOG_LIMIT: Duration = Duration::from_secs(300);
const OPTIMUM: i128 = 1_259_712;
const EXPERIMENT_SEED: u64 = 20_240_601;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verified(design: &DropoutDesign, t: &TypeVector) -> Result<ConcurrenceProfile, String> {
    match verify_type(design, t).map_err(|e| e.to_string())? {
        Verification::Verified(p) => Ok(p),
        Verification::Failed(c) => Err(format!("not regular at {t}: {c:?}")),
    }
}

fn golden_designs() -> Result<String, String> {
    let mut times = Vec::new();
    for name in ["two_layer_udd.ddesign", "extended_udd.ddesign", "three_layer.ddesign"] {
        let d = fixture(name);
        let start = Instant::now();
        let p = verified(&d, &ty(&[1, 1]))?;
        let took = start.elapsed();
        ensure(p.top_lambdas().iter().all(|&l| l == 1), || format!("{name}: λ = {:?}", p.top_lambdas()))?;
        ensure(took < GOLDEN_LIMIT, || format!("{name}: took {took:?}"))?;
        times.push(format!("{name} {:.1}ms", took.as_secs_f64() * 1e3));
    }
    let two = fixture("two_layer_udd.ddesign");
    let extended = extend(&two, &ty(&[1, 1]), 3).map_err(|e| e.to_string())?;
    ensure(extended.same_multiset(&fixture("extended_udd.ddesign")), || "extension differs from the printed one".into())?;
    let first_two = restrict(&fixture("three_layer.ddesign"), &[0, 1]).map_err(|e| e.to_string())?;
    ensure(first_two == two, || "first two layers differ from the two-layer design".into())?;
    Ok(format!("λ=1 at (1,1); {}", times.join(", ")))
}

/// The relabelled array as printed: (first part | second part).
const RELABELLED_ROWS: [([u32; 2], u32); 9] = [
    ([0, 3], 0),
    ([1, 5], 2),
    ([2, 4], 1),
    ([1, 3], 1),
    ([2, 5], 0),
    ([0, 4], 2),
    ([2, 3], 2),
    ([0, 5], 1),
    ([1, 4], 0),
];

fn oa_reproduction() -> Result<String, String> {
    let field = Field::new(3).unwrap();
    let m = GeneratorMatrix::parse_rows(&field, "1,0,1;1,2,2").map_err(|e| e.to_string())?;
    let g = GeneratorMatrix::new(field, m, vec![2, 1], ty(&[1, 1])).map_err(|e| e.to_string())?;
    let oa = expand(&g).map_err(|e| e.to_string())?;
    ensure(oa.verified && oa.index == 1, || format!("array check: verified={} index={}", oa.verified, oa.index))?;
    let (sizes, blocks) = relabel(&oa);
    ensure(sizes == [6, 3], || format!("sizes {sizes:?}"))?;
    for (row, (block, (first, second))) in blocks.iter().zip(RELABELLED_ROWS).enumerate() {
        ensure(block.sub(0) == first && block.sub(1) == [second], || format!("row {row}: {block}"))?;
    }
    let built = design_from_generator(&g, false).map_err(|e| e.to_string())?;
    let p = match built.verification {
        Some(Verification::Verified(p)) => p,
        other => return Err(format!("design not verified: {other:?}")),
    };
    ensure(p.top_lambdas() == [1] && built.design.num_blocks() == 9, || format!("λ {:?}", p.top_lambdas()))?;
    Ok("9 rows match in message order; type (1,1), λ=1, b=9".into())
}

/// The deleted design as printed, in the original labels.
const DELETED_R1: [[&[u32]; 3]; 9] = [
    [&[3], &[0], &[0, 3]],
    [&[4], &[1, 5], &[0, 5]],
    [&[5], &[2, 4], &[0, 4]],
    [&[1, 3], &[1, 4], &[2, 3]],
    [&[1, 4], &[2], &[2, 5]],
    [&[1, 5], &[0, 5], &[2, 4]],
    [&[2, 3], &[2, 5], &[1, 3]],
    [&[2, 4], &[0, 4], &[1, 5]],
    [&[2, 5], &[1], &[1, 4]],
];

fn deletion_dichotomy() -> Result<String, String> {
    let d = fixture("three_layer.ddesign");
    let del = delete_points(&d, &[(0, 0), (1, 3)]).map_err(|e| e.to_string())?;
    for (row, expected) in DELETED_R1.iter().enumerate() {
        let block = &del.design.blocks()[row];
        for (layer, want) in expected.iter().enumerate() {
            let original: Vec<u32> = block.sub(layer).iter().map(|&p| del.kept[layer][p as usize]).collect();
            ensure(original == *want, || format!("row {row} layer {}: {original:?}", layer + 1))?;
        }
    }
    let p = verified(&del.design, &ty(&[1, 1]))?;
    match delete_points(&d, &[(1, 0), (1, 3)]) {
        Err(Error::SubBlockSwallowed { block: 0, layer: 2 }) => {}
        other => return Err(format!("second deletion gave {other:?}")),
    }
    Ok(format!("first deletion matches and verifies (λ={:?}); second rejected at block 0, layer 2", p.top_lambdas()))
}

fn determinant_experiment() -> Result<String, String> {
    let m: Vec<Vec<i64>> = (0..7).map(|i| (0..7).map(|j| 3 + if i == j { 6 } else { 0 }).collect()).collect();
    let det = determinant(&m).map_err(|e| e.to_string())?;
    ensure(det == OPTIMUM, || format!("det(6I+3J) = {det}"))?;
    let start = Instant::now();
    let exp = run_experiment(500, EXPERIMENT_SEED, &Scenario::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(took < EXPERIMENT_LIMIT, || format!("experiment took {took:?}"))?;
    let both: Vec<&Sample> = exp.samples.iter().filter(|s| s.regime == Regime::Both).collect();
    ensure(both.len() == 500, || format!("{} margin-fixed samples", both.len()))?;
    for s in &both {
        ensure(s.determinant <= OPTIMUM, || format!("sample {} has det {}", s.index, s.determinant))?;
        let at_optimum = s.determinant == OPTIMUM;
        ensure(at_optimum == (s.rl == Some((9, 3))), || {
            format!("sample {}: det {} but pairwise check {:?}", s.index, s.determinant, s.rl)
        })?;
    }
    let fano = fano_incidence(3);
    let fano_det = determinant(&fano.information()).map_err(|e| e.to_string())?;
    ensure(fano_det == OPTIMUM, || format!("tripled Fano det {fano_det}"))?;
    let hits = both.iter().filter(|s| s.determinant == OPTIMUM).count();
    let max = exp.summaries[3].max;
    Ok(format!("det(6I+3J)={OPTIMUM}; 2000 samples in {:.2}s; margin-fixed max {max}, {hits} at optimum", took.as_secs_f64()))
}

fn construction_catalog() -> Result<String, String> {
    let start = Instant::now();
    let catalog = catalog();
    for entry in &catalog {
        let (v, ks, lambda, n, b) = entry.predicted.clone().expect("catalog entries carry predictions");
        let d = &entry.design;
        ensure(d.sizes().iter().all(|&s| s == v), || format!("{}: sizes {:?}, predicted v={v}", entry.name, d.sizes()))?;
        ensure(d.layers() == n, || format!("{}: {} layers, predicted {n}", entry.name, d.layers()))?;
        ensure(d.num_blocks() == b, || format!("{}: {} blocks, predicted {b}", entry.name, d.num_blocks()))?;
        let mut counted: Vec<usize> = (0..n).flat_map(|i| d.sub_block_sizes(i)).collect();
        counted.sort_unstable();
        counted.dedup();
        ensure(counted == ks, || format!("{}: sub-block sizes {counted:?}, predicted {ks:?}", entry.name))?;
        for t in &entry.types {
            let p = verified(d, t).map_err(|e| format!("{}: {e}", entry.name))?;
            ensure(p.top_lambdas().iter().all(|&l| l == lambda), || {
                format!("{} at {t}: λ {:?}, predicted {lambda}", entry.name, p.top_lambdas())
            })?;
        }
    }
    let took = start.elapsed();
    ensure(took < CATALOG_LIMIT, || format!("catalog took {took:?}"))?;
    Ok(format!("{} designs match their closed forms in {:.2}s", catalog.len(), took.as_secs_f64()))
}

fn complement_property() -> Result<String, String> {
    let mut checked = 0;
    let mut improper = 0;
    for entry in catalog() {
        let d = &entry.design;
        if !d.is_proper() {
            ensure(matches!(complement(d), Err(Error::NotProper { .. })), || format!("{}: complement accepted", entry.name))?;
            improper += 1;
            continue;
        }
        let c = complement(d).map_err(|e| e.to_string())?;
        for t in &entry.types {
            verified(&c, t).map_err(|e| format!("complement of {}: {e}", entry.name))?;
        }
        let back = complement(&c).map_err(|e| e.to_string())?;
        ensure(back.same_multiset(d), || format!("{}: double complement differs", entry.name))?;
        checked += 1;
    }
    Ok(format!("{checked} proper designs: complements regular, involution holds; {improper} improper rejected"))
}

fn counting_identity() -> Result<String, String> {
    let mut windows = 0;
    let mut corpus = regular_fixtures();
    corpus.extend(catalog());
    for entry in &corpus {
        for t in &entry.types {
            let p = verified(&entry.design, t).map_err(|e| format!("{}: {e}", entry.name))?;
            let id = concurrence_identity(&entry.design, &p);
            ensure(id.holds(), || format!("{} at {t}: {id:?}", entry.name))?;
            // recompute the general form independently of the library
            for w in &p.windows {
                let d = w.ty.as_slice();
                let lhs = d.iter().enumerate().fold(w.top() as u128, |a, (j, &dj)| {
                    a * binomial(entry.design.sizes()[w.start + j] as u64, dj as u64)
                });
                let rhs: u128 = entry
                    .design
                    .blocks()
                    .iter()
                    .map(|b| {
                        d.iter()
                            .enumerate()
                            .map(|(j, &dj)| binomial(b.sub(w.start + j).len() as u64, dj as u64))
                            .product::<u128>()
                    })
                    .sum();
                ensure(lhs == rhs, || format!("{} window {}: {lhs} != {rhs}", entry.name, w.start + 1))?;
                windows += 1;
            }
        }
    }
    Ok(format!("{windows} windows over {} designs, exact", corpus.len()))
}

fn filter_suite() -> Result<String, String> {
    let printed = read_dfilter(&fixture_text("cyclic_first.dfilter")).map_err(|e| e.to_string())?;
    let h1 = cyclic_matrix(&[0, 1, 3], 7).map_err(|e| e.to_string())?;
    ensure(printed.len() == 1 && printed[0] == h1, || format!("generated\n{h1}"))?;
    let blocks = develop(&[0, 1, 3], 7);
    let family_params = verify_difference_family(7, &blocks).map_err(|e| e.to_string())?;
    let family = filter_matrices(7, &blocks).map_err(|e| e.to_string())?;
    let params = verify_filter_family(&family).map_err(|e| e.to_string())?;
    ensure(params == family_params && params.k == 3 && params.r == 3, || format!("{params:?} vs {family_params:?}"))?;
    for seed in 0..100 {
        let (scrambled, _) = scramble(&family, seed);
        let p = verify_filter_family(&scrambled).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(p == params, || format!("seed {seed}: {p:?}"))?;
    }
    Ok(format!("H1 bit-exact; k={}, r={}, λ={}; 100 scrambles preserve them", params.k, params.r, params.lambda))
}

fn geometry_counts() -> Result<String, String> {
    let mut families = 0;
    for kind in [GeometryKind::Projective, GeometryKind::Affine] {
        for q in [2u32, 3, 4] {
            for d in 1..=4usize {
                let space = Space::new(kind, d, Field::new(q).unwrap()).map_err(|e| e.to_string())?;
                for t in 0..=d {
                    let expected = match kind {
                        GeometryKind::Projective => gaussian_coefficient(d as u32 + 1, t as u32 + 1, q as u64),
                        GeometryKind::Affine => (q as u128).pow((d - t) as u32) * gaussian_coefficient(d as u32, t as u32, q as u64),
                    };
                    let got = space.flats(t).map_err(|e| e.to_string())?.len() as u128;
                    ensure(got == expected, || format!("{kind:?}({d},{q}) {t}-flats: {got} != {expected}"))?;
                    families += 1;
                }
            }
        }
    }
    let pg32 = Space::projective(3, 2).unwrap();
    let spread = find_spread(&pg32, 1).map_err(|e| e.to_string())?;
    ensure(spread.members.len() == 5 && spread.is_partition_of(&pg32) && pg32.num_points() == 15, || {
        format!("{} spread lines", spread.members.len())
    })?;
    Ok(format!("{families} flat counts exact; PG(3,2) line spread has 5 members covering 15 points"))
}

fn format_round_trips() -> Result<String, String> {
    let mut count = 0;
    for name in DESIGN_FIXTURES {
        let text = fixture_text(name);
        let d = read_ddesign(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(write_ddesign(&d) == text, || format!("{name}: text changed on rewrite"))?;
        count += 1;
    }
    for entry in regular_fixtures().into_iter().chain(catalog()) {
        let d = &entry.design;
        ensure(read_ddesign(&write_ddesign(d)).as_ref() == Ok(d), || format!("{}: DDESIGN", entry.name))?;
        ensure(read_dmask(&write_dmask(d)).as_ref() == Ok(d), || format!("{}: DMASK", entry.name))?;
        count += 2;
    }
    let text = fixture_text("cyclic_first.dfilter");
    ensure(write_dfilter(&read_dfilter(&text).map_err(|e| e.to_string())?) == text, || "filter fixture".into())?;
    let family = filter_matrices(7, &develop(&[0, 1, 3], 7)).unwrap();
    let (scrambled, _) = scramble(&family, 5);
    for fam in [family, scrambled] {
        ensure(read_dfilter(&write_dfilter(&fam)).as_ref() == Ok(&fam), || "generated filter family".into())?;
    }
    count += 3;
    Ok(format!("{count} round trips exact"))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("golden designs verify at (1,1) with λ=1", golden_designs),
        ("orthogonal array reproduces the relabelled table", oa_reproduction),
        ("point deletion: admissible set verifies, swallowing set rejected", deletion_dichotomy),
        ("determinant experiment and the 6I+3J optimum", determinant_experiment),
        ("construction catalog matches closed forms", construction_catalog),
        ("complements of proper designs", complement_property),
        ("counting identity on every verified design", counting_identity),
        ("balanced filter family", filter_suite),
        ("flat counts and the PG(3,2) spread", geometry_counts),
        ("file format round trips", format_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("acceptance {:>2}/10 PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {:>2}/10 FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
