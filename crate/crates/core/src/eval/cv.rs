use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use super::{accuracy, rmse, PredictionBatch};
use crate::data::{stratified_folds, Dataset};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, TrainedModel};
use crate::scalar::Scalar;
use crate::seed;

/// Train/test index sets for one (run, fold) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvCell {
    pub run: usize,
    pub fold: usize,
    /// Seed handed to the model trained in this cell.
    pub seed: u64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Run `r` partitions the data with `stratified_folds(data, folds, mix(mix(seed, RUN), r))`.
pub fn plan_cross_validation(data: &Dataset, runs: usize, folds: usize, seed: u64) -> Result<Vec<CvCell>> {
    if runs == 0 {
        return Err(Error::usage("runs must be at least 1"));
    }
    if folds < 2 {
        return Err(Error::usage("cross-validation needs at least 2 folds"));
    }
    let mut cells = Vec::with_capacity(runs * folds);
    for run in 0..runs {
        let run_key = seed::mix(seed::mix(seed, seed::RUN), run as u64);
        let parts = stratified_folds(data, folds, run_key)?;
        for (fold, test) in parts.iter().enumerate() {
            let mut in_test = vec![false; data.len()];
            test.iter().for_each(|&i| in_test[i] = true);
            cells.push(CvCell {
                run,
                fold,
                seed: seed::mix(seed::mix(run_key, seed::FOLD), fold as u64),
                train: (0..data.len()).filter(|&i| !in_test[i]).collect(),
                test: test.clone(),
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvEntry<T> {
    pub run: usize,
    pub fold: usize,
    pub rmse: T,
    pub accuracy: T,
    pub train_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport<T> {
    pub seed: u64,
    pub entries: Vec<CvEntry<T>>,
    pub mean_rmse: T,
    pub sd_rmse: T,
    pub mean_accuracy: T,
    pub sd_accuracy: T,
}

fn mean_sd<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> (T, T) {
    let n = values.clone().count();
    if n == 0 {
        return (T::nan(), T::nan());
    }
    let mean = values.clone().sum::<T>() / T::from_usize_lossy(n);
    if n == 1 {
        return (mean, T::zero());
    }
    let ss: T = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / T::from_usize_lossy(n - 1)).sqrt())
}

impl<T: Scalar> CvReport<T> {
    fn from_entries(seed: u64, entries: Vec<CvEntry<T>>) -> Self {
        let (mean_rmse, sd_rmse) = mean_sd(entries.iter().map(|e| e.rmse));
        let (mean_accuracy, sd_accuracy) = mean_sd(entries.iter().map(|e| e.accuracy));
        CvReport {
            seed,
            entries,
            mean_rmse,
            sd_rmse,
            mean_accuracy,
            sd_accuracy,
        }
    }

    /// `run,fold,rmse,accuracy,train_ms` rows and `# key=value` summary
    /// lines. With `timing` off, `train_ms` is written as 0 so the output
    /// depends only on the inputs.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("run,fold,rmse,accuracy,train_ms\n");
        for e in &self.entries {
            let ms = if timing { e.train_ms } else { 0.0 };
            let _ = writeln!(out, "{},{},{},{},{}", e.run, e.fold, e.rmse, e.accuracy, ms);
        }
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# mean_rmse={}", self.mean_rmse);
        let _ = writeln!(out, "# sd_rmse={}", self.sd_rmse);
        let _ = writeln!(out, "# mean_accuracy={}", self.mean_accuracy);
        let _ = writeln!(out, "# sd_accuracy={}", self.sd_accuracy);
        out
    }
}

/// Repeated stratified k-fold cross-validation. Encoding statistics come
/// from each training portion only.
pub fn cross_validate<T: Scalar>(
    data: &Dataset,
    spec: &ModelSpec,
    runs: usize,
    folds: usize,
    seed: u64,
) -> Result<CvReport<T>> {
    spec.validate()?;
    let cells = plan_cross_validation(data, runs, folds, seed)?;
    let entries = cells
        .par_iter()
        .map(|cell| {
            let train = data.subset(&cell.train)?;
            let start = Instant::now();
            let model: TrainedModel<T> = TrainedModel::fit(&train, &spec.with_seed(cell.seed))?;
            let train_ms = start.elapsed().as_secs_f64() * 1e3;
            let estimates = cell
                .test
                .iter()
                .map(|&i| model.predict(&data.rows()[i]))
                .collect::<Result<Vec<_>>>()?;
            let truth = cell.test.iter().map(|&i| data.labels()[i]).collect();
            let batch = PredictionBatch::new(estimates, truth, data.n_classes())?;
            Ok(CvEntry {
                run: cell.run,
                fold: cell.fold,
                rmse: rmse(&batch)?,
                accuracy: accuracy(&batch)?,
                train_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport::from_entries(seed, entries))
}
