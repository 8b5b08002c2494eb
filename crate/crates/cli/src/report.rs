use dropout_design::design::{ConcurrenceProfile, CounterExample, DropoutDesign};
use std::collections::BTreeSet;
use std::fmt::Write;

/// Where the human-readable report goes: stdout, unless the artifact itself
/// is being written there.
pub struct Report {
    pub to_stderr: bool,
}

impl Report {
    pub fn line(&self, s: impl std::fmt::Display) {
        if self.to_stderr {
            eprintln!("{s}");
        } else {
            println!("{s}");
        }
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Layer sizes, distinct sub-block sizes, layer and block counts.
pub struct Counted {
    pub sizes: Vec<usize>,
    pub k: Vec<usize>,
    pub n: usize,
    pub b: usize,
}

impl Counted {
    pub fn of(design: &DropoutDesign) -> Self {
        let k: BTreeSet<usize> = (0..design.layers()).flat_map(|i| design.sub_block_sizes(i)).collect();
        Counted { sizes: design.sizes().to_vec(), k: k.into_iter().collect(), n: design.layers(), b: design.num_blocks() }
    }

    pub fn v(&self) -> String {
        if self.sizes.iter().all(|&s| s == self.sizes[0]) {
            self.sizes[0].to_string()
        } else {
            format!("({})", join(&self.sizes, ","))
        }
    }
}

pub fn params_line(label: &str, v: &str, k: &[usize], lambda: Option<String>, n: usize, b: usize) -> String {
    let lambda = lambda.map(|l| format!(" lambda={l}")).unwrap_or_default();
    format!("{label:<10} v={v} k={{{}}}{lambda} n={n} b={b}", join(k, ","))
}

fn selection(sel: &[Vec<u32>]) -> String {
    let parts = sel.iter().map(|s| if s.is_empty() { "-".to_string() } else { join(s, ",") });
    format!("{{{}}}", join(parts, " | "))
}

pub fn profile(p: &ConcurrenceProfile) -> String {
    let mut out = String::new();
    for w in &p.windows {
        let last = w.start + w.ty.len();
        let entries = join(
            w.entries.iter().map(|(g, l)| format!("({})={l}", join(g, ","))),
            " ",
        );
        let _ = writeln!(out, "window {} (layers {}-{}) type {}: {entries}", w.start + 1, w.start + 1, last, w.ty);
    }
    out.pop();
    out
}

pub fn counterexample(c: &CounterExample) -> String {
    format!(
        "window {} type {} sub-type ({}): {} lies in {} blocks but {} lies in {}",
        c.start + 1,
        c.ty,
        join(&c.g, ","),
        selection(&c.first.0),
        c.first.1,
        selection(&c.second.0),
        c.second.1
    )
}
