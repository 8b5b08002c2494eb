//! Exhaustive concurrence counting.
//!
//! For a window starting at layer `i` and a sub-type `g`, every selection of
//! `g_j` points from window layer `j` is enumerated in lexicographic order
//! (first layer most significant) and the blocks containing it are counted
//! directly. Counting uses one bitset per block and layer.

use super::{DropoutDesign, TypeVector};
use crate::combin::{binomial, subsets};
use crate::error::{Error, Result};

/// Elementary containment tests allowed for one verification run.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VerifyMode {
    /// The same type at every window.
    #[default]
    Verbatim,
    /// Window `i` uses the type rotated left by `i mod t`.
    Shifted,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    pub budget: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: VerifyMode::Verbatim, budget: DEFAULT_BUDGET }
    }
}

/// Concurrence numbers of one window, indexed by sub-type in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowProfile {
    /// 0-based first layer of the window.
    pub start: usize,
    pub ty: TypeVector,
    pub entries: Vec<(Vec<usize>, u64)>,
}

impl WindowProfile {
    pub fn lambda(&self, g: &[usize]) -> Option<u64> {
        self.entries.iter().find(|(h, _)| h == g).map(|(_, l)| *l)
    }

    /// The concurrence number at the full type.
    pub fn top(&self) -> u64 {
        self.lambda(self.ty.as_slice()).expect("full type is always profiled")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcurrenceProfile {
    pub windows: Vec<WindowProfile>,
}

impl ConcurrenceProfile {
    /// `λ^{(i)}` for every window.
    pub fn top_lambdas(&self) -> Vec<u64> {
        self.windows.iter().map(WindowProfile::top).collect()
    }

    /// Some window has λ = 0: regular only vacuously.
    pub fn is_degenerate(&self) -> bool {
        self.windows.iter().any(|w| w.top() == 0)
    }
}

/// Two selections in the same window and sub-type with different counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterExample {
    pub start: usize,
    pub ty: TypeVector,
    pub g: Vec<usize>,
    pub first: (Vec<Vec<u32>>, u64),
    pub second: (Vec<Vec<u32>>, u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Verified(ConcurrenceProfile),
    Failed(CounterExample),
}

impl Verification {
    pub fn profile(&self) -> Option<&ConcurrenceProfile> {
        match self {
            Verification::Verified(p) => Some(p),
            Verification::Failed(_) => None,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubTypeOutcome {
    Constant(u64),
    Varying {
        first: (Vec<Vec<u32>>, u64),
        second: (Vec<Vec<u32>>, u64),
    },
}

/// Per-block membership bitsets for every layer.
struct Membership {
    offsets: Vec<usize>,
    stride: usize,
    bits: Vec<u64>,
}

impl Membership {
    fn new(design: &DropoutDesign) -> Self {
        let mut offsets = Vec::with_capacity(design.layers());
        let mut stride = 0;
        for &v in design.sizes() {
            offsets.push(stride);
            stride += v.div_ceil(64);
        }
        let mut bits = vec![0u64; stride * design.num_blocks()];
        for (b, block) in design.blocks().iter().enumerate() {
            for (i, sub) in block.subs().iter().enumerate() {
                for &p in sub {
                    let w = b * stride + offsets[i] + p as usize / 64;
                    bits[w] |= 1 << (p % 64);
                }
            }
        }
        Membership { offsets, stride, bits }
    }

    #[inline]
    fn has(&self, block: usize, layer: usize, point: u32) -> bool {
        let w = block * self.stride + self.offsets[layer] + point as usize / 64;
        self.bits[w] >> (point % 64) & 1 == 1
    }

    fn count(&self, blocks: usize, selection: &[(usize, &[u32])]) -> u64 {
        (0..blocks)
            .filter(|&b| {
                selection
                    .iter()
                    .all(|(layer, pts)| pts.iter().all(|&p| self.has(b, *layer, p)))
            })
            .count() as u64
    }
}

/// Number of blocks containing `selection[j]` in layer `start + j` for every `j`.
pub fn count_containing(design: &DropoutDesign, start: usize, selection: &[Vec<u32>]) -> u64 {
    design
        .blocks()
        .iter()
        .filter(|b| {
            selection
                .iter()
                .enumerate()
                .all(|(j, pts)| pts.iter().all(|&p| b.contains(start + j, p)))
        })
        .count() as u64
}

fn window_cost(design: &DropoutDesign, start: usize, g: &[usize]) -> u128 {
    g.iter()
        .enumerate()
        .map(|(j, &gj)| binomial(design.sizes()[start + j] as u64, gj as u64))
        .fold(1u128, |a, x| a.saturating_mul(x))
}

fn subtype_with(
    design: &DropoutDesign,
    membership: &Membership,
    start: usize,
    g: &[usize],
) -> SubTypeOutcome {
    let choices: Vec<Vec<Vec<u32>>> = g
        .iter()
        .enumerate()
        .map(|(j, &gj)| subsets(design.sizes()[start + j], gj))
        .collect();
    let total: usize = choices.iter().map(Vec::len).product();
    let b = design.num_blocks();

    let decode = |mut idx: usize| -> Vec<usize> {
        let mut digits = vec![0usize; choices.len()];
        for j in (0..choices.len()).rev() {
            digits[j] = idx % choices[j].len();
            idx /= choices[j].len();
        }
        digits
    };
    let count_at = |idx: usize| -> u64 {
        let digits = decode(idx);
        let sel: Vec<(usize, &[u32])> = digits
            .iter()
            .enumerate()
            .filter(|(j, _)| g[*j] > 0)
            .map(|(j, &d)| (start + j, choices[j][d].as_slice()))
            .collect();
        membership.count(b, &sel)
    };
    let selection_at = |idx: usize| -> Vec<Vec<u32>> {
        decode(idx).iter().enumerate().map(|(j, &d)| choices[j][d].clone()).collect()
    };

    let reference = count_at(0);
    #[cfg(feature = "parallel")]
    let mismatch = {
        use rayon::prelude::*;
        (1..total).into_par_iter().position_first(|i| count_at(i) != reference).map(|p| p + 1)
    };
    #[cfg(not(feature = "parallel"))]
    let mismatch = (1..total).find(|&i| count_at(i) != reference);

    match mismatch {
        None => SubTypeOutcome::Constant(reference),
        Some(i) => SubTypeOutcome::Varying {
            first: (selection_at(0), reference),
            second: (selection_at(i), count_at(i)),
        },
    }
}

/// Counts for one window and sub-type, without a budget check.
pub fn subtype_concurrence(design: &DropoutDesign, start: usize, g: &[usize]) -> Result<SubTypeOutcome> {
    if g.is_empty() || start + g.len() > design.layers() {
        return Err(Error::invalid(format!(
            "window at layer {} of length {} exceeds {} layers",
            start + 1,
            g.len(),
            design.layers()
        )));
    }
    if g.iter().enumerate().any(|(j, &gj)| gj > design.sizes()[start + j]) {
        return Err(Error::invalid("sub-type asks for more points than a layer has"));
    }
    Ok(subtype_with(design, &Membership::new(design), start, g))
}

/// Verifies `design` at `ty` over every window `0..=n-t`.
pub fn verify(design: &DropoutDesign, ty: &TypeVector, opts: VerifyOptions) -> Result<Verification> {
    let t = ty.len();
    let n = design.layers();
    if t > n {
        return Err(Error::invalid(format!("type of length {t} on a design with {n} layers")));
    }
    let window_types: Vec<TypeVector> = (0..=n - t)
        .map(|i| match opts.mode {
            VerifyMode::Verbatim => ty.clone(),
            VerifyMode::Shifted => ty.rotate_left(i % t),
        })
        .collect();
    for (i, wt) in window_types.iter().enumerate() {
        for (j, &d) in wt.as_slice().iter().enumerate() {
            if d > design.sizes()[i + j] {
                return Err(Error::invalid(format!(
                    "type entry {d} exceeds the size of layer {}",
                    i + j + 1
                )));
            }
        }
    }

    let b = design.num_blocks() as u128;
    let mut needed: u128 = 0;
    for (i, wt) in window_types.iter().enumerate() {
        for g in wt.sub_types() {
            needed = needed.saturating_add(window_cost(design, i, &g).saturating_mul(b.max(1)));
        }
    }
    if needed > opts.budget {
        return Err(Error::BudgetExceeded { needed, budget: opts.budget });
    }

    let membership = Membership::new(design);
    let mut windows = Vec::with_capacity(window_types.len());
    for (i, wt) in window_types.into_iter().enumerate() {
        let mut entries = Vec::new();
        for g in wt.sub_types() {
            match subtype_with(design, &membership, i, &g) {
                SubTypeOutcome::Constant(l) => entries.push((g, l)),
                SubTypeOutcome::Varying { first, second } => {
                    return Ok(Verification::Failed(CounterExample { start: i, ty: wt, g, first, second }))
                }
            }
        }
        windows.push(WindowProfile { start: i, ty: wt, entries });
    }
    Ok(Verification::Verified(ConcurrenceProfile { windows }))
}

/// [`verify`] with default options.
pub fn verify_type(design: &DropoutDesign, ty: &TypeVector) -> Result<Verification> {
    verify(design, ty, VerifyOptions::default())
}

/// Checks every `u`-subset of `0..v` for `u = 1..=t`. Returns `λ_1..λ_t` when regular.
pub fn is_regular_twise(v: usize, blocks: &[Vec<u32>], t: usize) -> Result<Option<Vec<u64>>> {
    const BUDGET: u128 = 10_000_000;
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    if blocks.iter().flatten().any(|&p| p as usize >= v) {
        return Err(Error::invalid(format!("block point outside 0..{v}")));
    }
    let needed = binomial(v as u64, t as u64);
    if needed > BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: BUDGET });
    }
    let words = v.div_ceil(64).max(1);
    let sets: Vec<Vec<u64>> = blocks
        .iter()
        .map(|blk| {
            let mut w = vec![0u64; words];
            for &p in blk {
                w[p as usize / 64] |= 1 << (p % 64);
            }
            w
        })
        .collect();
    let mut lambdas = Vec::with_capacity(t);
    for u in 1..=t.min(v) {
        let mut constant: Option<u64> = None;
        for s in subsets(v, u) {
            let c = sets
                .iter()
                .filter(|w| s.iter().all(|&p| w[p as usize / 64] >> (p % 64) & 1 == 1))
                .count() as u64;
            match constant {
                None => constant = Some(c),
                Some(x) if x != c => return Ok(None),
                _ => {}
            }
        }
        lambdas.push(constant.unwrap_or(0));
    }
    // u-subsets with u > v do not exist; their condition holds vacuously
    lambdas.resize(t, 0);
    Ok(Some(lambdas))
}

/// Both sides of the counting identity for one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityWindow {
    pub start: usize,
    /// `λ · ∏ C(v_j, d_j)`.
    pub lhs: u128,
    /// `Σ_s ∏ C(|C_{s,j}|, d_j)`.
    pub rhs: u128,
    /// `b · ∏ C(k_j, d_j)` when sub-block sizes are constant per layer.
    pub constant_form: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub windows: Vec<IdentityWindow>,
    /// `(b·k_1·k_2, λ·v_1·v_2)` for two-layer designs at type `(1,1)`.
    pub two_layer: Option<(u128, u128)>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.windows
            .iter()
            .all(|w| w.lhs == w.rhs && w.constant_form.is_none_or(|c| c == w.lhs))
            && self.two_layer.is_none_or(|(a, b)| a == b)
    }
}

/// Evaluates the counting identity against a verified profile.
pub fn concurrence_identity(design: &DropoutDesign, profile: &ConcurrenceProfile) -> IdentityReport {
    let mut windows = Vec::new();
    for w in &profile.windows {
        let d = w.ty.as_slice();
        let lambda = w.top() as u128;
        let lhs = d
            .iter()
            .enumerate()
            .map(|(j, &dj)| binomial(design.sizes()[w.start + j] as u64, dj as u64))
            .fold(lambda, |a, x| a * x);
        let rhs: u128 = design
            .blocks()
            .iter()
            .map(|blk| {
                d.iter()
                    .enumerate()
                    .map(|(j, &dj)| binomial(blk.sub(w.start + j).len() as u64, dj as u64))
                    .product::<u128>()
            })
            .sum();
        let constant_form = constant_sizes(design, w.start, d.len()).map(|ks| {
            ks.iter()
                .zip(d)
                .map(|(&k, &dj)| binomial(k as u64, dj as u64))
                .fold(design.num_blocks() as u128, |a, x| a * x)
        });
        windows.push(IdentityWindow { start: w.start, lhs, rhs, constant_form });
    }
    let two_layer = match (design.layers(), profile.windows.first()) {
        (2, Some(w)) if w.ty.as_slice() == [1, 1] => constant_sizes(design, 0, 2).map(|ks| {
            let b = design.num_blocks() as u128;
            let s = design.sizes();
            (b * ks[0] as u128 * ks[1] as u128, w.top() as u128 * s[0] as u128 * s[1] as u128)
        }),
        _ => None,
    };
    IdentityReport { windows, two_layer }
}

fn constant_sizes(design: &DropoutDesign, start: usize, len: usize) -> Option<Vec<usize>> {
    let first = design.blocks().first()?;
    let ks: Vec<usize> = (start..start + len).map(|i| first.sub(i).len()).collect();
    design
        .blocks()
        .iter()
        .all(|b| (start..start + len).zip(&ks).all(|(i, &k)| b.sub(i).len() == k))
        .then_some(ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example5() -> DropoutDesign {
        DropoutDesign::from_lists(
            vec![6, 6],
            vec![
                vec![vec![0, 3], vec![0, 3]],
                vec![vec![0, 4], vec![1, 5]],
                vec![vec![0, 5], vec![2, 4]],
                vec![vec![1, 3], vec![1, 4]],
                vec![vec![1, 4], vec![2, 3]],
                vec![vec![1, 5], vec![0, 5]],
                vec![vec![2, 3], vec![2, 5]],
                vec![vec![2, 4], vec![0, 4]],
                vec![vec![2, 5], vec![1, 3]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_layer_example_is_regular() {
        let d = example5();
        let v = verify_type(&d, &TypeVector::ones(2)).unwrap();
        let p = v.profile().unwrap();
        assert_eq!(p.top_lambdas(), vec![1]);
        assert_eq!(p.windows[0].lambda(&[1, 0]), Some(3));
        assert_eq!(p.windows[0].lambda(&[0, 1]), Some(3));
        let id = concurrence_identity(&d, p);
        assert!(id.holds());
        assert_eq!(id.windows[0].lhs, 36);
        assert_eq!(id.two_layer, Some((36, 36)));
    }

    #[test]
    fn trivial_single_block() {
        let d = DropoutDesign::from_lists(vec![1, 1], vec![vec![vec![0], vec![0]]]).unwrap();
        let v = verify_type(&d, &TypeVector::ones(2)).unwrap();
        assert_eq!(v.profile().unwrap().top_lambdas(), vec![1]);
        let id = concurrence_identity(&d, v.profile().unwrap());
        assert_eq!((id.windows[0].lhs, id.windows[0].rhs), (1, 1));
    }

    #[test]
    fn counterexample_reports_differing_counts() {
        let d = DropoutDesign::from_lists(
            vec![3, 2],
            vec![vec![vec![0], vec![0]], vec![vec![0], vec![1]], vec![vec![1], vec![0]]],
        )
        .unwrap();
        match verify_type(&d, &TypeVector::ones(2)).unwrap() {
            Verification::Failed(ce) => {
                assert_eq!(ce.g, vec![0, 1]);
                assert_ne!(ce.first.1, ce.second.1);
                assert_eq!(count_containing(&d, 0, &ce.first.0), ce.first.1);
                assert_eq!(count_containing(&d, 0, &ce.second.0), ce.second.1);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = example5();
        let opts = VerifyOptions { budget: 10, ..Default::default() };
        assert!(matches!(
            verify(&d, &TypeVector::ones(2), opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn twise_examples() {
        let fano: Vec<Vec<u32>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
        assert_eq!(is_regular_twise(7, &fano, 2).unwrap(), Some(vec![3, 1]));
        assert_eq!(is_regular_twise(2, &[vec![0, 1], vec![0, 1]], 2).unwrap(), Some(vec![2, 2]));
        assert_eq!(is_regular_twise(3, &[vec![0, 1], vec![0, 2]], 1).unwrap(), None);
    }
}
