//! Fixture loading and the design corpus shared by the integration tests.
#![allow(dead_code)]

use dropout_design::constructions::{construct, Family};
use dropout_design::design::{read_ddesign, DropoutDesign, TypeVector};
use dropout_design::oa::{design_from_generator, generator_from_geometry, GeneratorSource};
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> DropoutDesign {
    read_ddesign(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const DESIGN_FIXTURES: [&str; 7] = [
    "two_layer_udd.ddesign",
    "extended_udd.ddesign",
    "three_layer.ddesign",
    "trivial_product.ddesign",
    "nontrivial_split.ddesign",
    "variable_sizes.ddesign",
    "variable_sizes_regular.ddesign",
];

pub fn ty(entries: &[usize]) -> TypeVector {
    TypeVector::new(entries.to_vec()).unwrap()
}

/// A design, the types it is claimed to have, and the predicted parameters
/// `(v, k-set, λ, n, b)` where a closed form exists.
pub struct CorpusEntry {
    pub name: String,
    pub design: DropoutDesign,
    pub types: Vec<TypeVector>,
    pub predicted: Option<(usize, Vec<usize>, u64, usize, usize)>,
}

/// Fixtures that are regular, with their types.
pub fn regular_fixtures() -> Vec<CorpusEntry> {
    let entries = [
        ("two_layer_udd.ddesign", vec![ty(&[1, 1])]),
        ("extended_udd.ddesign", vec![ty(&[1, 1])]),
        ("three_layer.ddesign", vec![ty(&[1, 1])]),
        ("trivial_product.ddesign", vec![ty(&[1, 1])]),
        ("nontrivial_split.ddesign", vec![ty(&[1, 1])]),
        ("variable_sizes_regular.ddesign", vec![ty(&[2, 2])]),
    ];
    entries
        .into_iter()
        .map(|(name, types)| CorpusEntry { name: name.into(), design: fixture(name), types, predicted: None })
        .collect()
}

/// The construction catalog: geometric families plus the two-line OA designs.
pub fn catalog() -> Vec<CorpusEntry> {
    let recipes = [
        (Family::AgHyperplane, 3, 2, 2),
        (Family::AgHyperplane, 3, 3, 2),
        (Family::PgPencilLines, 2, 2, 0),
        (Family::PgPencilLines, 2, 3, 0),
        (Family::PgPencilLines, 3, 2, 0),
        (Family::PgPencilLines, 3, 3, 0),
        (Family::PgPencilPlanes, 3, 2, 0),
        (Family::PgPencilPlanes, 3, 3, 0),
        (Family::PgSpread, 5, 2, 1),
        (Family::PgSpread, 5, 2, 2),
    ];
    let mut out: Vec<CorpusEntry> = recipes
        .into_iter()
        .map(|(family, d, q, t)| {
            let g = construct(family, d, q, t).unwrap();
            let p = g.predicted;
            CorpusEntry {
                name: format!("{family} d={d} q={q} t={t}"),
                design: g.design,
                types: g.types,
                predicted: Some((p.v, p.k, p.lambda, p.n, p.b)),
            }
        })
        .collect();
    for q in [2u32, 3] {
        let g = generator_from_geometry(GeneratorSource::TwoLines, 2, q, &[]).unwrap();
        let built = design_from_generator(&g, true).unwrap();
        let qq = q as usize;
        out.push(CorpusEntry {
            name: format!("two-line array q={q}"),
            design: built.design,
            types: vec![ty(&[2, 1]), ty(&[1, 2])],
            predicted: Some((qq * qq, vec![qq], 1, 2, qq.pow(3) + qq * qq)),
        });
    }
    out
}
