//! Command-line front end for the `nested-dichotomies` crate.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nested_dichotomies::analysis::{
    expected_min_normal, growth, growth_restricted, rmse_distribution, CountMethod, GrowthQuery, OrderStatQuery,
    RemovalPolicy, RmseDistributionConfig, DEFAULT_ALPHA,
};
use nested_dichotomies::data::{load_instances, load_path, ClassSelector, Format};
use nested_dichotomies::eval::argmax;
use nested_dichotomies::seed::DEFAULT_SEED;
use nested_dichotomies::{
    cross_validate, load_model, save_model, EnsembleMethod, EnsembleSpec, Error, Model, ModelSpec, Result,
    SplitterSpec, Strategy,
};

#[derive(Debug, Parser)]
#[command(name = "nd", version, about = "Nested dichotomies with multiple subset evaluation")]
pub struct Cli {
    /// Maximum number of worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of distinct nested dichotomies for n classes
    Growth {
        /// Class subset selection strategy
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Number of classes
        #[arg(long)]
        n: usize,
    },
    /// Growth after removing the assumed worst splits at every node
    GrowthRestricted {
        /// Class subset selection strategy (random or balanced)
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Number of classes
        #[arg(long)]
        n: usize,
        /// Candidate splits evaluated per node
        #[arg(long)]
        lambda: usize,
        /// Shape of the removed splits (ignored when lambda is 1)
        #[arg(long, value_enum)]
        removal: Option<RemovalArg>,
        /// Counting method; enumeration is limited to 8 classes
        #[arg(long, value_enum, default_value = "recurrence")]
        method: MethodArg,
    },
    /// Expected minimum of lambda normal draws
    Expectmin {
        /// Mean of the single-draw distribution
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Standard deviation of the single-draw distribution
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        /// Number of draws
        #[arg(long)]
        lambda: usize,
        /// Plotting-position constant
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Distribution of root-split RMSE for 1..=lambda-max candidates
    RmseDist {
        #[command(flatten)]
        data: DataArgs,
        /// Class subset selection strategy
        #[arg(long, value_enum, default_value = "random")]
        strategy: StrategyArg,
        /// Trials per lambda
        #[arg(long)]
        trials: usize,
        /// Largest number of candidates per trial
        #[arg(long)]
        lambda_max: usize,
        /// Fraction of instances held out for test RMSE
        #[arg(long, default_value_t = 0.1)]
        holdout: f64,
        /// Plotting-position constant for the predicted means
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Random seed
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model and write it as JSON
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Output model file (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Write class probabilities for every instance of a dataset
    Predict {
        /// Model file written by `train`
        #[arg(long)]
        model: PathBuf,
        /// Instances to score (ARFF or CSV)
        #[arg(long)]
        data: PathBuf,
        /// Input format (default: from the file extension)
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated stratified cross-validation
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Repetitions with different fold assignments
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Folds per run
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Write 0 for train_ms so reports are reproducible byte for byte
        #[arg(long)]
        no_timing: bool,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file (ARFF or CSV)
    #[arg(long)]
    pub data: PathBuf,
    /// Input format (default: from the file extension)
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Class attribute name or 0-based index (default: last column)
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Class subset selection strategy
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Candidate splits evaluated per node
    #[arg(long)]
    pub lambda: usize,
    /// Nodes with fewer classes evaluate a single candidate
    #[arg(long, default_value_t = 1)]
    pub class_threshold: usize,
    /// Ensemble method
    #[arg(long, value_enum, default_value = "none")]
    pub ensemble: EnsembleArg,
    /// Ensemble size
    #[arg(long, default_value_t = 10)]
    pub size: usize,
    /// Random seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Random,
    Balanced,
    RandomPair,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RemovalArg {
    Isolate,
    Balanced,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Recurrence,
    Enumerate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Arff,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EnsembleArg {
    None,
    Bagging,
    Adaboost,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Random => Strategy::Random,
            StrategyArg::Balanced => Strategy::Balanced,
            StrategyArg::RandomPair => Strategy::RandomPair,
        }
    }
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Arff => Format::Arff,
            FormatArg::Csv => Format::Csv,
        }
    }
}

impl DataArgs {
    fn load(&self) -> Result<nested_dichotomies::Dataset> {
        let class = self.class.as_deref().map(ClassSelector::parse).unwrap_or_default();
        load_path(&self.data, self.format.map(Format::from), &class)
    }
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        let splitter = SplitterSpec::new(self.strategy.into(), self.lambda)
            .with_class_threshold(self.class_threshold)
            .with_seed(self.seed);
        let method = match self.ensemble {
            EnsembleArg::None => return ModelSpec::single(splitter),
            EnsembleArg::Bagging => EnsembleMethod::Bagging,
            EnsembleArg::Adaboost => EnsembleMethod::AdaBoost,
        };
        let mut e = EnsembleSpec::new(method, splitter);
        e.size = self.size;
        ModelSpec::Ensemble(e)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(Error::from)
}

/// Runs one parsed command, returning the text for stdout.
pub fn run(command: Command) -> Result<String> {
    match command {
        Command::Growth { strategy, n } => {
            if n == 0 {
                return Err(Error::Usage("n must be at least 1".into()));
            }
            Ok(format!("{}\n", growth(n, strategy.into())))
        }
        Command::GrowthRestricted {
            strategy,
            n,
            lambda,
            removal,
            method,
        } => {
            let removal_policy = match (lambda, removal) {
                (1, _) => RemovalPolicy::None,
                (_, Some(RemovalArg::Isolate)) => RemovalPolicy::IsolateSingleton,
                (_, Some(RemovalArg::Balanced)) => RemovalPolicy::BalancedRemoval,
                (_, None) => return Err(Error::Usage("--removal is required when lambda > 1".into())),
            };
            let q = GrowthQuery {
                n,
                strategy: strategy.into(),
                lambda,
                removal_policy,
                method: match method {
                    MethodArg::Recurrence => CountMethod::Recurrence,
                    MethodArg::Enumerate => CountMethod::Enumerate,
                },
            };
            Ok(format!("{}\n", growth_restricted(&q)?))
        }
        Command::Expectmin {
            mu,
            sigma,
            lambda,
            alpha,
        } => {
            let q = OrderStatQuery::new(mu, sigma, lambda).with_alpha(alpha);
            Ok(format!("{}\n", expected_min_normal(&q)?))
        }
        Command::RmseDist {
            data,
            strategy,
            trials,
            lambda_max,
            holdout,
            alpha,
            seed,
            out,
        } => {
            let dataset = data.load()?;
            let mut config = RmseDistributionConfig::new(strategy.into(), trials, lambda_max);
            config.holdout_fraction = holdout;
            config.alpha = alpha;
            config.seed = seed;
            let report = rmse_distribution::<f64>(&dataset, &config)?;
            write(&out, &report.to_csv())?;
            Ok(format!(
                "wrote {} samples to {} (seed {seed})\n",
                trials * lambda_max,
                out.display()
            ))
        }
        Command::Train { data, model, out } => {
            let dataset = data.load()?;
            let spec = model.spec();
            let trained = Model::fit(&dataset, &spec)?;
            save_model(&out, &trained, dataset.schema(), &spec)?;
            Ok(format!("wrote model to {} (seed {})\n", out.display(), spec.seed()))
        }
        Command::Predict {
            model,
            data,
            format,
            out,
        } => {
            let (trained, schema) = load_model::<f64>(&model)?;
            let format = format.map(Format::from).unwrap_or_else(|| Format::from_path(&data));
            let instances = load_instances(fs::File::open(&data)?, format, &schema)?;
            let mut csv = String::from("instance");
            for c in &schema.classes {
                csv.push(',');
                csv.push_str(c);
            }
            csv.push_str(",argmax\n");
            for (i, row) in instances.iter().enumerate() {
                let probs = trained.predict(row)?;
                csv.push_str(&i.to_string());
                for p in &probs {
                    csv.push(',');
                    csv.push_str(&p.to_string());
                }
                csv.push(',');
                csv.push_str(&schema.classes[argmax(&probs)]);
                csv.push('\n');
            }
            write(&out, &csv)?;
            Ok(format!("wrote {} predictions to {}\n", instances.len(), out.display()))
        }
        Command::Cv {
            data,
            model,
            runs,
            folds,
            no_timing,
            out,
        } => {
            let dataset = data.load()?;
            let spec = model.spec();
            let report = cross_validate::<f64>(&dataset, &spec, runs, folds, model.seed)?;
            write(&out, &report.to_csv(!no_timing))?;
            Ok(format!(
                "mean_rmse={} mean_accuracy={} (seed {})\n",
                report.mean_rmse, report.mean_accuracy, model.seed
            ))
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 2 for usage errors, 3 for data errors and 4 for broken
/// internal invariants.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Invariant(format!("cannot start thread pool: {e}")))
            .and_then(|pool| pool.install(|| run(cli.command))),
        None => run(cli.command),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("nd: {e}");
            e.exit_code()
        }
    }
}
