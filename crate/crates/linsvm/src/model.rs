//! Trained linear models: prediction and plain-text persistence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::{Dataset, SparseVector};
use crate::error::{Error, Result};

/// A trained linear classifier: dense weights plus the settings that
/// produced them. Prediction is `sign(<w, x>)` with `sign(0) = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub weights: Vec<f64>,
    pub solver: String,
    pub c: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Model {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Raw decision value `<w, x>`; feature indices beyond the trained
    /// dimension contribute zero.
    pub fn decision_value(&self, example: &SparseVector) -> f64 {
        example.dot_dense_truncated(&self.weights)
    }

    /// Predicted label in {-1, +1}; ties on a zero score go to +1.
    pub fn predict(&self, example: &SparseVector) -> f64 {
        if self.decision_value(example) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Fraction of examples whose predicted label matches the dataset's.
    pub fn accuracy(&self, data: &Dataset) -> f64 {
        let correct = (0..data.len())
            .filter(|&i| self.predict(data.example(i)) == data.label(i))
            .count();
        correct as f64 / data.len() as f64
    }

    /// Writes the model as plain text: header lines (solver, c, epsilon,
    /// seed, dimension), a `weights` marker, then one weight per line in
    /// index order. Every weight is written, however small, with shortest
    /// round-trip formatting, so reloading is bit-exact.
    pub fn write(&self, mut writer: impl Write) -> std::io::Result<()> {
        writeln!(writer, "solver {}", self.solver)?;
        writeln!(writer, "c {}", self.c)?;
        writeln!(writer, "epsilon {}", self.epsilon)?;
        writeln!(writer, "seed {}", self.seed)?;
        writeln!(writer, "dimension {}", self.dimension())?;
        writeln!(writer, "weights")?;
        for w in &self.weights {
            writeln!(writer, "{w}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path.as_ref())?;
        let mut writer = BufWriter::new(file);
        self.write(&mut writer)?;
        writer.flush()?;
        Ok(())
    }

    pub fn read(reader: impl BufRead, path: &Path) -> Result<Self> {
        let bad = |message: String| Error::ModelFormat {
            path: path.to_path_buf(),
            message,
        };
        let mut solver = None;
        let mut c = None;
        let mut epsilon = None;
        let mut seed = None;
        let mut dimension = None;
        let mut lines = reader.lines();
        loop {
            let line = lines
                .next()
                .ok_or_else(|| bad("missing weights section".into()))??;
            let line = line.trim();
            if line == "weights" {
                break;
            }
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("malformed header line {line:?}")))?;
            match key {
                "solver" => solver = Some(value.to_string()),
                "c" => c = Some(parse_field(value, "c", &bad)?),
                "epsilon" => epsilon = Some(parse_field(value, "epsilon", &bad)?),
                "seed" => seed = Some(parse_field(value, "seed", &bad)?),
                "dimension" => dimension = Some(parse_field(value, "dimension", &bad)?),
                other => return Err(bad(format!("unknown header key {other:?}"))),
            }
        }
        let dimension: usize = dimension.ok_or_else(|| bad("missing dimension".into()))?;
        let mut weights = Vec::with_capacity(dimension);
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            weights.push(parse_field(line, "weight", &bad)?);
        }
        if weights.len() != dimension {
            return Err(bad(format!(
                "expected {dimension} weights, found {}",
                weights.len()
            )));
        }
        Ok(Self {
            weights,
            solver: solver.ok_or_else(|| bad("missing solver".into()))?,
            c: c.ok_or_else(|| bad("missing c".into()))?,
            epsilon: epsilon.ok_or_else(|| bad("missing epsilon".into()))?,
            seed: seed.ok_or_else(|| bad("missing seed".into()))?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)?;
        Self::read(BufReader::new(file), path)
    }
}

fn parse_field<T: std::str::FromStr>(
    value: &str,
    field: &str,
    bad: &impl Fn(String) -> Error,
) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(format!("bad {field} value {value:?}")))
}
