//! Random incidence matrices and exact determinants of their information
//! matrices.
//!
//! Four sampling regimes are compared: free placement of the ones, fixed
//! column sums, fixed row sums, and both margins fixed. A design whose
//! information matrix is `αI + βJ` maximizes the determinant among those
//! with the same margins.

use crate::error::{Error, Result};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    /// `ones` cells chosen uniformly.
    Free = 1,
    /// Every column has `column_sum` ones.
    Columns = 2,
    /// Every row has `row_sum` ones.
    Rows = 3,
    /// Both margins fixed.
    Both = 4,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Free, Regime::Columns, Regime::Rows, Regime::Both];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Regime> {
        Regime::ALL.into_iter().find(|r| r.number() == n)
    }
}

/// Shape and margins of the sampled matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub rows: usize,
    pub cols: usize,
    pub ones: usize,
    pub column_sum: usize,
    pub row_sum: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario { rows: 21, cols: 7, ones: 63, column_sum: 9, row_sum: 3 }
    }
}

impl Scenario {
    fn check(&self, regime: Regime) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentMargins(msg));
        let (n, v) = (self.rows, self.cols);
        if n == 0 || v == 0 {
            return bad("matrix must be non-empty".into());
        }
        if self.ones > n * v {
            return bad(format!("{} ones do not fit in {n}x{v}", self.ones));
        }
        let columns_ok = self.column_sum <= n && self.column_sum * v == self.ones;
        let rows_ok = self.row_sum <= v && self.row_sum * n == self.ones;
        match regime {
            Regime::Columns | Regime::Both if !columns_ok => {
                bad(format!("{v} columns of {} ones do not give {} ones", self.column_sum, self.ones))
            }
            Regime::Rows | Regime::Both if !rows_ok => {
                bad(format!("{n} rows of {} ones do not give {} ones", self.row_sum, self.ones))
            }
            _ => Ok(()),
        }
    }
}

/// A 0/1 design matrix: rows are runs (blocks), columns are treatments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged incidence matrix".into()));
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::invalid("incidence entries must be 0 or 1"));
        }
        Ok(IncidenceMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.data.chunks(self.cols).map(|r| r.iter().map(|&x| x as usize).sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j) as usize).sum()).collect()
    }

    /// `XᵀX`.
    pub fn information(&self) -> Vec<Vec<i64>> {
        let v = self.cols;
        let mut m = vec![vec![0i64; v]; v];
        for row in self.data.chunks(v) {
            for a in 0..v {
                if row[a] == 1 {
                    for b in 0..v {
                        m[a][b] += row[b] as i64;
                    }
                }
            }
        }
        m
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.cols) {
            for &x in row {
                f.write_char(if x == 1 { '1' } else { '0' })?;
            }
            f.write_char('\n')?;
        }
        Ok(())
    }
}

fn sample_distinct<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// Draws one matrix under `regime`. Deterministic for a given generator state.
pub fn generate_incidence<R: Rng>(regime: Regime, scenario: &Scenario, rng: &mut R) -> Result<IncidenceMatrix> {
    scenario.check(regime)?;
    let (n, v) = (scenario.rows, scenario.cols);
    let mut data = vec![0u8; n * v];
    match regime {
        Regime::Free => {
            for cell in sample_distinct(rng, n * v, scenario.ones) {
                data[cell] = 1;
            }
        }
        Regime::Columns => {
            for j in 0..v {
                for i in sample_distinct(rng, n, scenario.column_sum) {
                    data[i * v + j] = 1;
                }
            }
        }
        Regime::Rows => {
            for i in 0..n {
                for j in sample_distinct(rng, v, scenario.row_sum) {
                    data[i * v + j] = 1;
                }
            }
        }
        Regime::Both => data = deal_both_margins(scenario, rng),
    }
    Ok(IncidenceMatrix { rows: n, cols: v, data })
}

/// Fills rows one at a time, drawing columns with probability proportional
/// to their remaining quota; starts over when a row cannot be completed.
/// Not uniform over all matrices with these margins.
fn deal_both_margins<R: Rng>(s: &Scenario, rng: &mut R) -> Vec<u8> {
    let (n, v) = (s.rows, s.cols);
    'restart: loop {
        let mut data = vec![0u8; n * v];
        let mut left = vec![s.column_sum; v];
        for i in 0..n {
            let mut chosen: Vec<usize> = Vec::with_capacity(s.row_sum);
            for _ in 0..s.row_sum {
                let open: Vec<usize> = (0..v).filter(|&j| left[j] > 0 && !chosen.contains(&j)).collect();
                let Ok(&j) = open.choose_weighted(rng, |&j| left[j]) else {
                    continue 'restart;
                };
                chosen.push(j);
                left[j] -= 1;
            }
            for j in chosen {
                data[i * v + j] = 1;
            }
        }
        return data;
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> Result<i128> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = a[i][j]
                    .checked_mul(a[k][k])
                    .zip(a[i][k].checked_mul(a[k][j]))
                    .and_then(|(p, q)| p.checked_sub(q))
                    .ok_or(Error::Overflow)?;
                a[i][j] = x / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// `(α, β)` when the matrix is `αI + βJ`.
pub fn detect_alpha_beta(m: &[Vec<i64>]) -> Option<(i64, i64)> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return None;
    }
    let beta = if n > 1 { m[0][1] } else { 0 };
    let alpha = m[0][0] - beta;
    let fits = (0..n).all(|i| (0..n).all(|j| m[i][j] == if i == j { alpha + beta } else { beta }));
    fits.then_some((alpha, beta))
}

/// `(r, λ)` when every column lies in `r` rows and every pair of columns in `λ`.
pub fn rl_design_check(x: &IncidenceMatrix) -> Option<(u64, u64)> {
    let v = x.cols;
    let mut point = vec![0u64; v];
    let mut pair = vec![vec![0u64; v]; v];
    for i in 0..x.rows {
        let cols: Vec<usize> = (0..v).filter(|&j| x.get(i, j) == 1).collect();
        for (a, &p) in cols.iter().enumerate() {
            point[p] += 1;
            for &q in &cols[a + 1..] {
                pair[p][q] += 1;
            }
        }
    }
    let r = point.first().copied()?;
    if point.iter().any(|&c| c != r) {
        return None;
    }
    let lambda = if v > 1 { pair[0][1] } else { 0 };
    let balanced = (0..v).all(|p| (p + 1..v).all(|q| pair[p][q] == lambda));
    balanced.then_some((r, lambda))
}

/// The lines `{i, i+1, i+3} mod 7` of the Fano plane, each used `copies` times.
pub fn fano_incidence(copies: usize) -> IncidenceMatrix {
    let mut rows = Vec::with_capacity(7 * copies);
    for _ in 0..copies {
        for i in 0..7 {
            let mut row = vec![0u8; 7];
            for d in [0, 1, 3] {
                row[(i + d) % 7] = 1;
            }
            rows.push(row);
        }
    }
    IncidenceMatrix::from_rows(&rows).expect("square 0/1 rows")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub regime: Regime,
    pub index: u64,
    pub determinant: i128,
    pub alpha_beta: Option<(i64, i64)>,
    pub rl: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeSummary {
    pub regime: Regime,
    pub samples: usize,
    pub min: i128,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: i128,
    pub achieved_alpha_beta: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub seed: u64,
    pub scenario: Scenario,
    pub summaries: Vec<RegimeSummary>,
    pub samples: Vec<Sample>,
}

impl Experiment {
    /// `regime,samples,min,q1,median,q3,max,achieved_alpha_beta_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("regime,samples,min,q1,median,q3,max,achieved_alpha_beta_count\n");
        for s in &self.summaries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.regime.number(),
                s.samples,
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max,
                s.achieved_alpha_beta
            )
            .unwrap();
        }
        out
    }
}

/// Quantile of sorted data with linear interpolation between order statistics.
pub fn quantile(sorted: &[i128], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] as f64 + (sorted[hi] - sorted[lo]) as f64 * frac
}

fn sample_rng(seed: u64, regime: Regime, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((regime.number() as u64) << 40) | index);
    rng
}

fn draw(seed: u64, scenario: &Scenario, regime: Regime, index: u64) -> Result<Sample> {
    let x = generate_incidence(regime, scenario, &mut sample_rng(seed, regime, index))?;
    let info = x.information();
    Ok(Sample {
        regime,
        index,
        determinant: determinant(&info)?,
        alpha_beta: detect_alpha_beta(&info),
        rl: rl_design_check(&x),
    })
}

/// `samples` draws per regime. Every draw has its own generator stream, so
/// the outcome does not depend on how the work is scheduled.
pub fn run_experiment(samples: usize, seed: u64, scenario: &Scenario) -> Result<Experiment> {
    if samples == 0 {
        return Err(Error::invalid("at least one sample per regime"));
    }
    let jobs: Vec<(Regime, u64)> = Regime::ALL
        .into_iter()
        .flat_map(|r| (0..samples as u64).map(move |i| (r, i)))
        .collect();
    #[cfg(feature = "parallel")]
    let drawn: Vec<Sample> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|&(r, i)| draw(seed, scenario, r, i)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let drawn: Vec<Sample> = jobs.iter().map(|&(r, i)| draw(seed, scenario, r, i)).collect::<Result<_>>()?;

    let summaries = Regime::ALL
        .into_iter()
        .map(|regime| {
            let mut dets: Vec<i128> = drawn.iter().filter(|s| s.regime == regime).map(|s| s.determinant).collect();
            dets.sort_unstable();
            RegimeSummary {
                regime,
                samples: dets.len(),
                min: dets[0],
                q1: quantile(&dets, 0.25),
                median: quantile(&dets, 0.5),
                q3: quantile(&dets, 0.75),
                max: dets[dets.len() - 1],
                achieved_alpha_beta: drawn.iter().filter(|s| s.regime == regime && s.alpha_beta.is_some()).count(),
            }
        })
        .collect();
    Ok(Experiment { seed, scenario: *scenario, summaries, samples: drawn })
}
