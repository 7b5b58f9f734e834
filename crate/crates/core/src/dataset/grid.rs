//! Hyperparameter grid for an external fine-tuning run.
//!
//! The exported file is TOML with one `[[run]]` table per grid point:
//!
//! ```text
//! [[run]]
//! name = "run-01"
//! model_name = "biobert-base-cased"
//! epochs = 2
//! learning_rate = 2e-5
//! batch_size = 16
//! seed = 42
//! ```

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FineTuneConfig {
    pub epochs: u32,
    pub learning_rate: f64,
    pub batch_size: u32,
    pub seed: u64,
    pub model_name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxes {
    pub epochs: Vec<u32>,
    pub learning_rates: Vec<f64>,
    pub batch_sizes: Vec<u32>,
    pub seed: u64,
    pub model_name: String,
}

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes {
            epochs: vec![2, 3, 4],
            learning_rates: vec![2e-5, 3e-5, 5e-5],
            batch_sizes: vec![16, 32],
            seed: 42,
            model_name: "biobert-base-cased".into(),
        }
    }
}

/// Every combination, epochs varying slowest.
pub fn expand_grid(axes: &GridAxes) -> Result<Vec<FineTuneConfig>> {
    if axes.epochs.is_empty() {
        return Err(Error::EmptyAxis("epochs"));
    }
    if axes.learning_rates.is_empty() {
        return Err(Error::EmptyAxis("learning_rate"));
    }
    if axes.batch_sizes.is_empty() {
        return Err(Error::EmptyAxis("batch_size"));
    }
    let mut out = Vec::new();
    for &epochs in &axes.epochs {
        for &learning_rate in &axes.learning_rates {
            for &batch_size in &axes.batch_sizes {
                out.push(FineTuneConfig {
                    epochs,
                    learning_rate,
                    batch_size,
                    seed: axes.seed,
                    model_name: axes.model_name.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Writes the stanzas and returns how many were written.
pub fn export_finetune_grid<W: Write>(axes: &GridAxes, mut out: W) -> Result<usize> {
    let grid = expand_grid(axes)?;
    for (i, c) in grid.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "[[run]]")?;
        writeln!(out, "name = \"run-{:02}\"", i + 1)?;
        writeln!(out, "model_name = {:?}", c.model_name)?;
        writeln!(out, "epochs = {}", c.epochs)?;
        writeln!(out, "learning_rate = {:e}", c.learning_rate)?;
        writeln!(out, "batch_size = {}", c.batch_size)?;
        writeln!(out, "seed = {}", c.seed)?;
    }
    Ok(grid.len())
}
