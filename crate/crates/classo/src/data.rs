//! Instance generation and ingestion: seeded synthetic problems for the
//! three experiment scenarios, LIBSVM-format parsing, polynomial feature
//! expansion and a min-max scaler.
//!
//! All randomness flows through a ChaCha8 generator seeded from a `u64`,
//! with standard-normal variates from the `rand_distr` ziggurat sampler and
//! a fixed draw order (design matrix column-major, then support indices,
//! support values, noise, constraint data), so identical seeds reproduce
//! instances bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ShapeBuilder};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::transforms::reduce_matrices;

/// Constraint layout of a synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `e^T x = 0`.
    SumZero,
    /// Dense standard-normal `B` (s×n) and `d` (s).
    RandomB { s: usize },
    /// Generalized Lasso with `D = [I_n; D2]`, `D2` standard normal s×n,
    /// reduced to constrained form (dimension grows to `p = n + s`).
    GenLasso { s: usize },
}

/// Recipe for one synthetic instance.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Fraction of nonzeros in the ground-truth coefficient vector.
    pub sparsity: f64,
    /// Variance of the additive Gaussian noise on `b`.
    pub noise_var: f64,
    pub scenario: Scenario,
}

impl SyntheticSpec {
    /// Defaults: 1% support, noise variance 1e-3.
    pub fn new(m: usize, n: usize, seed: u64, scenario: Scenario) -> Self {
        Self {
            m,
            n,
            seed,
            sparsity: 0.01,
            noise_var: 1e-3,
            scenario,
        }
    }
}

/// Everything but the penalty weight: ready for
/// [`crate::problem::ProblemData::new`] once `lambda` is chosen.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub bmat: Array2<f64>,
    pub d: Array1<f64>,
    /// Ground-truth coefficients (in the reduced space for `GenLasso`).
    pub x_true: Array1<f64>,
}

/// Draws the instance described by `spec`. Deterministic in `spec.seed`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::InvalidParameter(
            "synthetic instances need m >= 1 and n >= 1".into(),
        ));
    }
    if spec.sparsity.is_nan() || spec.sparsity <= 0.0 || spec.sparsity > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "sparsity must lie in (0, 1], got {}",
            spec.sparsity
        )));
    }
    if spec.noise_var.is_nan() || spec.noise_var < 0.0 {
        return Err(Error::InvalidParameter("noise_var must be nonnegative".into()));
    }
    match spec.scenario {
        Scenario::RandomB { s } | Scenario::GenLasso { s } if s == 0 => {
            return Err(Error::InvalidParameter(
                "scenario needs at least one constraint row".into(),
            ));
        }
        _ => {}
    }

    let (m, n) = (spec.m, spec.n);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut a = Array2::zeros((m, n).f());
    for j in 0..n {
        for i in 0..m {
            a[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }

    let support_size = ((spec.sparsity * n as f64).ceil() as usize).clamp(1, n);
    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, n, support_size).into_vec();
    support.sort_unstable();
    let mut x_true = Array1::zeros(n);
    for &idx in &support {
        x_true[idx] = rng.sample::<f64, _>(StandardNormal);
    }

    let mut b = crate::linalg::mat_vec(&a.view(), &x_true.view());
    if spec.noise_var > 0.0 {
        let sd = spec.noise_var.sqrt();
        for t in b.iter_mut() {
            *t += sd * rng.sample::<f64, _>(StandardNormal);
        }
    }

    match spec.scenario {
        Scenario::SumZero => Ok(SyntheticInstance {
            a,
            b,
            bmat: Array2::ones((1, n)),
            d: Array1::zeros(1),
            x_true,
        }),
        Scenario::RandomB { s } => {
            let mut bmat = Array2::zeros((s, n).f());
            for j in 0..n {
                for i in 0..s {
                    bmat[(i, j)] = rng.sample::<f64, _>(StandardNormal);
                }
            }
            let d = Array1::from_shape_fn(s, |_| rng.sample::<f64, _>(StandardNormal));
            Ok(SyntheticInstance {
                a,
                b,
                bmat,
                d,
                x_true,
            })
        }
        Scenario::GenLasso { s } => {
            let mut dmat = Array2::zeros((n + s, n));
            for i in 0..n {
                dmat[(i, i)] = 1.0;
            }
            for j in 0..n {
                for i in 0..s {
                    dmat[(n + i, j)] = rng.sample::<f64, _>(StandardNormal);
                }
            }
            let mats = reduce_matrices(&a.view(), &dmat.view())?;
            let z_true = dmat.dot(&x_true);
            Ok(SyntheticInstance {
                a: mats.a_tilde,
                b,
                bmat: mats.u2t,
                d: Array1::zeros(s),
                x_true: z_true,
            })
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses LIBSVM regression text: one `label idx:val idx:val ...` sample per
/// line with strictly increasing 1-based indices. Blank lines and lines
/// starting with `#` are skipped. Returns a dense matrix with as many
/// columns as the largest index seen, zeros filled in.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<(Array2<f64>, Array1<f64>)> {
    let mut labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid label `{label_tok}`")))?;
        let mut entries = Vec::new();
        let mut prev_index = 0usize;
        for tok in tokens {
            let (idx_str, val_str) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx_str
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid index `{idx_str}`")))?;
            let val: f64 = val_str
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid value `{val_str}`")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "indices are 1-based; found index 0"));
            }
            if idx <= prev_index {
                return Err(parse_err(
                    line_no,
                    format!("indices must be strictly increasing; {idx} follows {prev_index}"),
                ));
            }
            prev_index = idx;
            max_index = max_index.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(entries);
    }

    if rows.is_empty() {
        return Err(parse_err(0, "no samples"));
    }

    let mut x = Array2::zeros((rows.len(), max_index));
    for (i, entries) in rows.iter().enumerate() {
        for &(j, val) in entries {
            x[(i, j)] = val;
        }
    }
    Ok((x, Array1::from_vec(labels)))
}

/// Reads a LIBSVM file from disk, transparently decompressing gzip input
/// (detected by the magic bytes, so both `.libsvm` and `.libsvm.gz` work).
pub fn load_libsvm<P: AsRef<Path>>(path: P) -> Result<(Array2<f64>, Array1<f64>)> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let gzipped = got == 2 && magic == [0x1f, 0x8b];
    use std::io::Seek;
    file.seek(std::io::SeekFrom::Start(0))?;
    if gzipped {
        parse_libsvm(BufReader::new(flate2::read::GzDecoder::new(file)))
    } else {
        parse_libsvm(BufReader::new(file))
    }
}

/// Writes `(x, y)` in LIBSVM text form (zero entries omitted); the inverse
/// of [`parse_libsvm`] for matrices whose trailing column is not all zero.
pub fn write_libsvm<W: Write>(
    x: &ArrayView2<'_, f64>,
    y: &ArrayView1<'_, f64>,
    mut out: W,
) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "write_libsvm labels",
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    for (row, label) in x.rows().into_iter().zip(y.iter()) {
        write!(out, "{label}")?;
        for (j, val) in row.iter().enumerate() {
            if *val != 0.0 {
                write!(out, " {}:{}", j + 1, val)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Overflow-checked binomial coefficient.
fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - k + 1 + i) as u128)? / (i + 1) as u128;
    }
    usize::try_from(r).ok()
}

/// Exponent vectors of all p-variate monomials with total degree at most
/// `k`, in graded lexicographic order (degree first, then first variable
/// heaviest).
fn monomial_exponents(p: usize, k: usize) -> Vec<Vec<u32>> {
    fn fixed_degree(p: usize, t: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if p == 1 {
            prefix.push(t);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=t).rev() {
            prefix.push(e);
            fixed_degree(p - 1, t - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for t in 0..=k as u32 {
        fixed_degree(p, t, &mut Vec::new(), &mut out);
    }
    out
}

/// Guards against expansions that cannot fit in memory.
const MAX_EXPANDED_ELEMENTS: usize = 200_000_000;

/// Expands `x` (m×p) into all monomials of total degree <= `degree`,
/// constant column included; output has `C(p + degree, degree)` columns in
/// graded lexicographic order.
pub fn poly_expand(x: &ArrayView2<'_, f64>, degree: usize) -> Result<Array2<f64>> {
    let (m, p) = x.dim();
    if degree < 1 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    if p < 1 {
        return Err(Error::InvalidParameter(
            "need at least one input feature".into(),
        ));
    }
    let cols = binomial(p + degree, degree).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "polynomial expansion of {p} features at degree {degree} overflows the column count"
        ))
    })?;
    if m.checked_mul(cols).is_none_or(|total| total > MAX_EXPANDED_ELEMENTS) {
        return Err(Error::InvalidParameter(format!(
            "polynomial expansion would hold {m} x {cols} entries; refusing"
        )));
    }

    let exponents = monomial_exponents(p, degree);
    debug_assert_eq!(exponents.len(), cols);

    let mut out = Array2::zeros((m, cols));
    // per-row power table pow[i][e] = x_i^e
    let mut powers = vec![0.0f64; p * (degree + 1)];
    for (row_idx, row) in x.rows().into_iter().enumerate() {
        for (i, xi) in row.iter().enumerate() {
            let base = i * (degree + 1);
            powers[base] = 1.0;
            for e in 1..=degree {
                powers[base + e] = powers[base + e - 1] * xi;
            }
        }
        for (col_idx, expo) in exponents.iter().enumerate() {
            let mut value = 1.0;
            for (i, &e) in expo.iter().enumerate() {
                if e > 0 {
                    value *= powers[i * (degree + 1) + e as usize];
                }
            }
            out[(row_idx, col_idx)] = value;
        }
    }
    Ok(out)
}

/// Affinely maps each column onto `[-1, 1]`; constant columns map to zero.
pub fn scale_columns(x: &ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut col in out.columns_mut() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in col.iter() {
            lo = lo.min(*t);
            hi = hi.max(*t);
        }
        if hi > lo {
            let mid = 0.5 * (hi + lo);
            let half = 0.5 * (hi - lo);
            col.mapv_inplace(|t| (t - mid) / half);
        } else {
            col.fill(0.0);
        }
    }
    out
}
