//! Sparse training data: libsvm text format, label normalization, and
//! seeded synthetic problem generation.
//!
//! Feature indices are 1-based on disk (libsvm convention) and 0-based in
//! memory. Labels are normalized to {-1, +1} at parse time.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One training example as ordered (index, value) pairs.
///
/// Indices are 0-based, strictly increasing, and no stored value is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a vector from (index, value) pairs. Zero-valued entries are
    /// dropped; indices must be strictly increasing.
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (idx, val) in entries {
            if let Some(&prev) = indices.last() {
                assert!(idx > prev, "sparse vector indices must be strictly increasing");
            }
            if val != 0.0 {
                indices.push(idx);
                values.push(val);
            }
        }
        Self { indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest 0-based index, if any entry exists.
    pub fn max_index(&self) -> Option<u32> {
        self.indices.last().copied()
    }

    /// Sum of squared entry values, accumulated in entry order.
    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Inner product against a dense vector covering every stored index.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (idx, val) in self.iter() {
            acc += val * dense[idx as usize];
        }
        acc
    }

    /// Inner product that treats indices beyond the dense vector's length
    /// as zero weights (scoring against a smaller model).
    pub fn dot_dense_truncated(&self, dense: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (idx, val) in self.iter() {
            if let Some(&d) = dense.get(idx as usize) {
                acc += val * d;
            }
        }
        acc
    }

    /// `dense += factor * self`, touching only the stored entries.
    pub fn add_scaled(&self, dense: &mut [f64], factor: f64) {
        for (idx, val) in self.iter() {
            dense[idx as usize] += factor * val;
        }
    }
}

/// An immutable training set: examples, labels in {-1, +1}, precomputed
/// squared norms, and the feature-space dimension.
///
/// Datasets never change after construction, so they can be shared
/// read-only across concurrent solver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<SparseVector>,
    labels: Vec<f64>,
    squared_norms: Vec<f64>,
    dimension: usize,
}

impl Dataset {
    /// Assembles a dataset, computing squared norms and the dimension
    /// (largest feature index observed).
    pub fn new(examples: Vec<SparseVector>, labels: Vec<f64>) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if examples.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} examples but {} labels",
                examples.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} is not -1 or +1"
            )));
        }
        let squared_norms = examples.iter().map(SparseVector::squared_norm).collect();
        let dimension = examples
            .iter()
            .filter_map(SparseVector::max_index)
            .max()
            .map_or(0, |m| m as usize + 1);
        Ok(Self {
            examples,
            labels,
            squared_norms,
            dimension,
        })
    }

    /// Number of examples.
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Feature-space dimension (largest observed index + 1).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn example(&self, i: usize) -> &SparseVector {
        &self.examples[i]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn squared_norm(&self, i: usize) -> f64 {
        self.squared_norms[i]
    }

    pub fn squared_norms(&self) -> &[f64] {
        &self.squared_norms
    }
}

/// Parses libsvm sparse text: one `<label> <idx>:<val> ...` line per
/// example, `#` starting a comment, blank lines ignored.
///
/// Raw labels are normalized to {-1, +1}: "+1"/"1" map to +1, "-1" and "0"
/// map to -1, and any other pair of two distinct numeric labels maps the
/// larger to +1 and the smaller to -1.
pub fn parse_libsvm(reader: impl BufRead) -> Result<Dataset> {
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut examples: Vec<SparseVector> = Vec::new();

    for (line_idx, line) in reader.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }

        let mut tokens = content.split_whitespace();
        let label_token = tokens.next().expect("non-empty line has a first token");
        let raw_label: f64 = label_token.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("non-numeric label {label_token:?}"),
        })?;
        if !raw_label.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite label {label_token:?}"),
            });
        }

        let mut indices: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut prev_index: u32 = 0;
        for token in tokens {
            let (idx_str, val_str) = token.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected index:value, got {token:?}"),
            })?;
            let index: u32 = idx_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad feature index {idx_str:?}"),
            })?;
            if index == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "feature indices are 1-based; got 0".to_string(),
                });
            }
            let value: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad feature value {val_str:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite feature value {val_str:?}"),
                });
            }
            if index <= prev_index {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "non-increasing indices: {index} follows {prev_index}"
                    ),
                });
            }
            prev_index = index;
            if value != 0.0 {
                indices.push(index - 1);
                values.push(value);
            }
        }
        raw_labels.push(raw_label);
        examples.push(SparseVector { indices, values });
    }

    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let labels = normalize_labels(&raw_labels)?;
    Dataset::new(examples, labels)
}

/// Maps raw numeric labels onto {-1, +1}; see [`parse_libsvm`].
fn normalize_labels(raw: &[f64]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = raw.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() > 2 {
        return Err(Error::UnsupportedProblem(format!(
            "{} distinct labels found; binary classification expects at most two",
            distinct.len()
        )));
    }

    let canonical = distinct.iter().all(|&v| v == -1.0 || v == 0.0 || v == 1.0);
    let mapped = if canonical {
        raw.iter().map(|&v| if v == 1.0 { 1.0 } else { -1.0 }).collect()
    } else if distinct.len() == 2 {
        let larger = distinct[1];
        raw.iter()
            .map(|&v| if v == larger { 1.0 } else { -1.0 })
            .collect()
    } else {
        // Single non-canonical label: it is trivially the largest value.
        vec![1.0; raw.len()]
    };
    Ok(mapped)
}

/// Loads a libsvm-format file from disk.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    parse_libsvm(BufReader::new(file))
}

/// Writes a dataset in libsvm format: labels as `+1`/`-1`, indices 1-based.
///
/// Values use Rust's shortest round-trip formatting, so parsing the output
/// reproduces the dataset bit for bit.
pub fn write_libsvm(data: &Dataset, mut writer: impl Write) -> std::io::Result<()> {
    for i in 0..data.len() {
        let label = if data.label(i) > 0.0 { "+1" } else { "-1" };
        write!(writer, "{label}")?;
        for (idx, val) in data.example(i).iter() {
            write!(writer, " {}:{}", idx + 1, val)?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Saves a dataset in libsvm format to disk.
pub fn save_libsvm(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    write_libsvm(data, &mut writer)?;
    writer.flush()?;
    Ok(())
}

/// Margin planted between the classes along the hidden direction, relative
/// to each example's pre-normalization magnitude.
const PLANTED_MARGIN: f64 = 1.0;

/// Generates a deterministic synthetic binary classification problem
/// shaped like the sparse text benchmarks: a hidden unit weight vector
/// supported on a small block of common "signal" features, examples with
/// approximately `density * dimension` non-zeros (a few signal entries plus
/// rare private filler features), unit-normalized values, and labels from
/// the sign of the hidden score with classes pushed apart along the hidden
/// direction. `noise` flips each label independently with that probability.
///
/// Both classes are guaranteed non-empty, and with `noise = 0` the data is
/// linearly separable. Identical seeds give bit-identical datasets.
pub fn generate_synthetic(
    seed: u64,
    n_examples: usize,
    dimension: usize,
    density: f64,
    noise: f64,
) -> Result<Dataset> {
    if n_examples < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_examples must be at least 2, got {n_examples}"
        )));
    }
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise must be a finite non-negative value, got {noise}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Class signal lives on a small leading feature block; the rest are
    // rarely-shared filler, so most examples barely interact.
    let signal_dims = ((0.04 * dimension as f64).ceil() as usize)
        .max(2)
        .min(dimension);
    let hidden = {
        let mut h = vec![0.0; dimension];
        loop {
            for v in h.iter_mut().take(signal_dims) {
                *v = rng.sample(StandardNormal);
            }
            let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in &mut h {
                    *v /= norm;
                }
                break;
            }
        }
        h
    };

    // Split the expected non-zero budget: most of it on the signal block,
    // the remainder spread thinly over the filler features.
    let target_nnz = density * dimension as f64;
    let signal_expected = (0.8 * target_nnz).min(signal_dims as f64);
    let signal_prob = signal_expected / signal_dims as f64;
    let filler_dims = dimension - signal_dims;
    let filler_prob = if filler_dims > 0 {
        ((target_nnz - signal_expected) / filler_dims as f64).min(1.0)
    } else {
        0.0
    };

    let flip_probability = noise.min(1.0);
    let mut examples = Vec::with_capacity(n_examples);
    let mut labels = Vec::with_capacity(n_examples);
    let mut scores = Vec::with_capacity(n_examples);
    for _ in 0..n_examples {
        let mut indices: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for idx in 0..dimension {
            let include = if idx < signal_dims { signal_prob } else { filler_prob };
            if rng.random::<f64>() < include {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    indices.push(idx as u32);
                    values.push(v);
                }
            }
        }
        if !indices.iter().any(|&i| (i as usize) < signal_dims) {
            // Every example carries class signal; without it the planted
            // margin (and separability at noise = 0) would be lost.
            let idx = rng.random_range(0..signal_dims);
            let v = loop {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    break v;
                }
            };
            let pos = indices.partition_point(|&i| i < idx as u32);
            if indices.get(pos) != Some(&(idx as u32)) {
                indices.insert(pos, idx as u32);
                values.insert(pos, v);
            }
        }

        // Push the example away from the hidden hyperplane along the hidden
        // direction, restricted to its own signal support so sparsity is
        // unchanged.
        let magnitude = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let raw_score: f64 = indices
            .iter()
            .zip(&values)
            .map(|(&i, &v)| v * hidden[i as usize])
            .sum();
        let side = if raw_score >= 0.0 { 1.0 } else { -1.0 };
        let support_norm_sq: f64 = indices
            .iter()
            .filter(|&&i| (i as usize) < signal_dims)
            .map(|&i| hidden[i as usize] * hidden[i as usize])
            .sum();
        if support_norm_sq > 0.0 {
            let scale = side * PLANTED_MARGIN * magnitude / support_norm_sq.sqrt();
            for (&i, v) in indices.iter().zip(values.iter_mut()) {
                if (i as usize) < signal_dims {
                    *v += scale * hidden[i as usize];
                }
            }
            let kept: Vec<(u32, f64)> = indices
                .iter()
                .zip(&values)
                .filter(|(_, &v)| v != 0.0)
                .map(|(&i, &v)| (i, v))
                .collect();
            indices = kept.iter().map(|&(i, _)| i).collect();
            values = kept.iter().map(|&(_, v)| v).collect();
        }

        // Unit-normalize, as the sparse benchmarks this mimics are shipped.
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut values {
            *v /= norm;
        }
        let example = SparseVector { indices, values };
        let score: f64 = example
            .iter()
            .map(|(idx, val)| val * hidden[idx as usize])
            .sum();
        let mut label = if score >= 0.0 { 1.0 } else { -1.0 };
        if noise > 0.0 && rng.random::<f64>() < flip_probability {
            label = -label;
        }
        examples.push(example);
        labels.push(label);
        scores.push(score);
    }

    // If every example landed in one class, move the example closest to the
    // hidden hyperplane across it (negate its features and label), which
    // preserves separability for noise = 0.
    if labels.iter().all(|&y| y == labels[0]) {
        let (flip_at, _) = scores
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
            .expect("n_examples >= 2");
        for v in &mut examples[flip_at].values {
            *v = -*v;
        }
        labels[flip_at] = -labels[flip_at];
    }

    Dataset::new(examples, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        parse_libsvm(text.as_bytes())
    }

    #[test]
    fn parses_basic_line() {
        let data = parse("+1 1:0.5 3:2.0\n-1 2:1.0\n").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.label(0), 1.0);
        assert_eq!(data.label(1), -1.0);
        let entries: Vec<_> = data.example(0).iter().collect();
        assert_eq!(entries, vec![(0, 0.5), (2, 2.0)]);
        assert_eq!(data.squared_norm(0), 4.25);
        assert_eq!(data.dimension(), 3);
    }

    #[test]
    fn zero_one_labels_map_to_signs() {
        let data = parse("0 2:1.0\n1 1:1.0\n").unwrap();
        assert_eq!(data.labels(), &[-1.0, 1.0]);
    }

    #[test]
    fn one_two_labels_map_larger_to_plus() {
        let data = parse("1 1:1.0\n2 1:2.0\n1 2:0.5\n").unwrap();
        assert_eq!(data.labels(), &[-1.0, 1.0, -1.0]);
    }

    #[test]
    fn non_increasing_indices_fail_with_line() {
        let err = parse("+1 3:1 2:1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("non-increasing indices"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_indices_are_rejected() {
        let err = parse("+1 2:1 2:1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_tokens_carry_line_numbers() {
        let err = parse("+1 1:0.5\nfoo 1:1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("label"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse("+1 1:0.5 x\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("index:value"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn comments_blank_lines_and_crlf_are_accepted() {
        let data = parse("# header\n\n+1 1:1.0 # trailing comment\r\n-1 2:2.0\r\n").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.example(1).iter().next(), Some((1, 2.0)));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse(""), Err(Error::EmptyDataset)));
        assert!(matches!(parse("# only comments\n"), Err(Error::EmptyDataset)));
    }

    #[test]
    fn three_distinct_labels_are_unsupported() {
        let err = parse("1 1:1\n2 1:1\n3 1:1\n").unwrap_err();
        assert!(matches!(err, Error::UnsupportedProblem(_)));
    }

    #[test]
    fn explicit_zero_values_are_dropped_but_checked_for_order() {
        let data = parse("+1 1:0 2:3.0\n-1 1:1.0\n").unwrap();
        assert_eq!(data.example(0).nnz(), 1);
        assert_eq!(data.example(0).iter().next(), Some((1, 3.0)));
        // An out-of-order zero entry is still a format violation.
        assert!(parse("+1 2:0 1:1\n").is_err());
    }

    #[test]
    fn label_only_lines_make_empty_examples() {
        let data = parse("+1\n-1 1:1.0\n").unwrap();
        assert_eq!(data.example(0).nnz(), 0);
        assert_eq!(data.squared_norm(0), 0.0);
    }

    #[test]
    fn squared_norms_match_entry_order_sum_exactly() {
        let data = generate_synthetic(11, 40, 15, 0.4, 0.2).unwrap();
        for i in 0..data.len() {
            let direct: f64 = data.example(i).iter().map(|(_, v)| v * v).sum();
            assert_eq!(data.squared_norm(i), direct);
        }
    }

    #[test]
    fn roundtrip_preserves_entries_labels_and_norms() {
        let data = generate_synthetic(7, 60, 25, 0.3, 0.25).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&data, &mut buf).unwrap();
        let reparsed = parse_libsvm(&buf[..]).unwrap();
        assert_eq!(data.len(), reparsed.len());
        for i in 0..data.len() {
            assert_eq!(data.example(i), reparsed.example(i));
            assert_eq!(data.label(i), reparsed.label(i));
            assert_eq!(data.squared_norm(i), reparsed.squared_norm(i));
        }
    }

    #[test]
    fn generator_is_deterministic_and_seed_sensitive() {
        let a = generate_synthetic(1, 100, 10, 1.0, 0.0).unwrap();
        let b = generate_synthetic(1, 100, 10, 1.0, 0.0).unwrap();
        let c = generate_synthetic(2, 100, 10, 1.0, 0.0).unwrap();
        let mut bytes_a = Vec::new();
        let mut bytes_b = Vec::new();
        let mut bytes_c = Vec::new();
        write_libsvm(&a, &mut bytes_a).unwrap();
        write_libsvm(&b, &mut bytes_b).unwrap();
        write_libsvm(&c, &mut bytes_c).unwrap();
        assert_eq!(bytes_a, bytes_b);
        assert_ne!(bytes_a, bytes_c);
    }

    #[test]
    fn generator_populates_both_classes() {
        for seed in 0..20 {
            let data = generate_synthetic(seed, 2, 3, 0.9, 0.0).unwrap();
            let pos = data.labels().iter().filter(|&&y| y > 0.0).count();
            assert!(pos >= 1 && pos < data.len(), "seed {seed}: one-class output");
        }
    }

    #[test]
    fn generator_rejects_degenerate_parameters() {
        assert!(generate_synthetic(1, 1, 5, 0.5, 0.0).is_err());
        assert!(generate_synthetic(1, 10, 0, 0.5, 0.0).is_err());
        assert!(generate_synthetic(1, 10, 5, 0.0, 0.0).is_err());
        assert!(generate_synthetic(1, 10, 5, 1.5, 0.0).is_err());
        assert!(generate_synthetic(1, 10, 5, 0.5, -0.1).is_err());
    }

    #[test]
    fn generator_density_controls_sparsity() {
        let data = generate_synthetic(5, 200, 100, 0.1, 0.0).unwrap();
        let avg_nnz: f64 =
            (0..data.len()).map(|i| data.example(i).nnz() as f64).sum::<f64>() / data.len() as f64;
        assert!((avg_nnz - 10.0).abs() < 3.0, "average nnz {avg_nnz}");
    }

    mod roundtrip_property {
        use super::*;
        use proptest::prelude::*;

        fn sparse_vector() -> impl Strategy<Value = SparseVector> {
            prop::collection::btree_map(1u32..200, -1e6f64..1e6, 0..12).prop_map(|m| {
                SparseVector::new(m.into_iter().map(|(i, v)| (i - 1, v)))
            })
        }

        proptest! {
            #[test]
            fn serialize_parse_is_identity(
                rows in prop::collection::vec((prop::bool::ANY, sparse_vector()), 1..20)
            ) {
                let labels = rows.iter().map(|(pos, _)| if *pos { 1.0 } else { -1.0 }).collect();
                let examples = rows.into_iter().map(|(_, x)| x).collect();
                let data = Dataset::new(examples, labels).unwrap();
                let mut buf = Vec::new();
                write_libsvm(&data, &mut buf).unwrap();
                let reparsed = parse_libsvm(&buf[..]).unwrap();
                prop_assert_eq!(data.labels(), reparsed.labels());
                for i in 0..data.len() {
                    prop_assert_eq!(data.example(i), reparsed.example(i));
                    prop_assert_eq!(data.squared_norm(i), reparsed.squared_norm(i));
                }
            }
        }
    }
}
