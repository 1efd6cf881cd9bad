//! Subcommand definitions and their execution.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use embias_core::audit::{
    aggregated_bias, comparability_probe, construct_direct_bias_counterexample,
    construct_weat_extremal, construct_weat_zero_bias, individual_bias, trustworthiness_probe,
    AttributeDraw, BiasWitness, Geometry, ProbeConfig, ScoreKind, DEFAULT_TOLERANCE,
};
use embias_core::directbias::{direct_bias_scores, DirectBiasConfig};
use embias_core::rng::keyed_rng;
use embias_core::subspace::{
    centered_samples, correlation_matrix, pair_directions, pca, DefiningSetFamily,
};
use embias_core::vector::{cosine, norm, normalized_mean};
use embias_core::weat::{
    attribute_difference_norm, evaluate, EffectSize, PValue, PermutationMode, PermutationTest,
    WeatInstance, EXACT_LIMIT,
};
use embias_core::{AttributeGroups, EmbeddingSpace, TargetSet};
use serde_json::{json, Map, Value};

use crate::embeddings::{load_embeddings, write_embeddings};
use crate::error::{CliError, CliResult};
use crate::parallel::monte_carlo_parallel;
use crate::report::{csv_num, csv_row, ensure_dir, matrix, num, nums, write_file, Report};
use crate::wordlists::{load_wordlists, SectionKind, WordlistConfig};

/// Compute and audit cosine-based embedding bias scores.
#[derive(Debug, Parser)]
#[command(name = "embias", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// WEAT scores, effect size and permutation p-value
    Weat(WeatArgs),
    /// Direct Bias of neutral words against a PCA bias direction or subspace
    Directbias(DirectBiasArgs),
    /// Cosine matrix of pair bias directions with the first principal component appended
    Correlate(CorrelateArgs),
    /// Norm of the difference of normalized attribute means, the range of s(t, A, B)
    Attrdiff(AttrDiffArgs),
    /// Probe a score for comparability and trustworthiness
    Audit(AuditArgs),
    /// Write a closed-form counterexample as replayable embedding and wordlist files
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Embedding file in word2vec text format
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Wordlist configuration file
    #[arg(long)]
    pub wordlists: PathBuf,
}

/// How to compute the permutation p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutations {
    /// Exact when at most 184,756 bipartitions, otherwise skipped.
    Auto,
    Exact,
    Skip,
    MonteCarlo(u64),
}

impl FromStr for Permutations {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "exact" => Ok(Self::Exact),
            "none" => Ok(Self::Skip),
            _ => match s.parse::<u64>() {
                Ok(0) => Err("Monte Carlo sample count must be positive".into()),
                Ok(n) => Ok(Self::MonteCarlo(n)),
                Err(_) => Err(format!(
                    "expected auto, exact, none or a sample count, got {s:?}"
                )),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct WeatArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Attribute group A
    #[arg(long)]
    pub group_a: String,
    /// Attribute group B
    #[arg(long)]
    pub group_b: String,
    /// Target set X
    #[arg(long)]
    pub targets_x: String,
    /// Target set Y
    #[arg(long)]
    pub targets_y: String,
    /// auto | exact | none | Monte Carlo sample count
    #[arg(long, default_value = "auto")]
    pub permutations: Permutations,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo worker threads (does not affect results)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Spread above which a target counts as individually biased
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Directory for report.json and scores.csv
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DirectBiasArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Defining pairs section
    #[arg(long)]
    pub pairs: String,
    /// Neutral target words
    #[arg(long)]
    pub neutral: String,
    /// Strictness exponent c ≥ 0
    #[arg(long, default_value_t = 1.0)]
    pub strictness: f64,
    /// Number of principal components spanning the bias subspace
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    /// Warn when the median absolute pairwise cosine of pair directions is below this
    #[arg(long, default_value_t = 0.3)]
    pub corr_threshold: f64,
    /// Attribute groups for the per-word bias predicate (repeat for each group)
    #[arg(long = "group")]
    pub groups: Vec<String>,
    /// Spread above which a word counts as individually biased
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Directory for report.json and scores.csv
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Defining pairs section
    #[arg(long)]
    pub pairs: String,
    /// Directory for correlation.csv and report.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttrDiffArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub group_a: String,
    #[arg(long)]
    pub group_b: String,
    /// Directory for report.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreArg {
    /// WEAT individual score s(t, A, B)
    WeatS,
    /// WEAT effect size d
    WeatD,
    /// Direct Bias
    Directbias,
}

impl From<ScoreArg> for ScoreKind {
    fn from(s: ScoreArg) -> Self {
        match s {
            ScoreArg::WeatS => Self::WeatIndividual,
            ScoreArg::WeatD => Self::WeatEffectSize,
            ScoreArg::Directbias => Self::DirectBias,
        }
    }
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub score: ScoreArg,
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Directory for report.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CounterexampleKind {
    /// Zero effect size for biased targets
    WeatZero,
    /// Effect size 2 for arbitrary attributes
    WeatExtremal,
    /// First principal component that misreports bias
    Directbias,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum)]
    pub kind: CounterexampleKind,
    /// Aspect ratio r > 1 of the defining pairs (directbias)
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Scale x > 0 of the defining pairs (directbias)
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// Embedding dimension (default 2, or 10 for weat-extremal)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Copies per target set (weat-extremal)
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Seed for the random attributes (weat-extremal)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

/// Writers for normal output and diagnostics.
pub struct Streams<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs a parsed command. `Ok` carries the exit status: 0, or 3 when the
/// report was produced but a score is undefined.
pub fn execute(cli: &Cli, io: &mut Streams<'_>) -> CliResult<i32> {
    match &cli.command {
        Command::Weat(a) => weat(a, io),
        Command::Directbias(a) => directbias(a, io),
        Command::Correlate(a) => correlate(a, io),
        Command::Attrdiff(a) => attrdiff(a, io),
        Command::Audit(a) => audit(a, io),
        Command::Counterexample(a) => counterexample(a, io),
    }
}

fn load(inputs: &Inputs) -> CliResult<(EmbeddingSpace, WordlistConfig)> {
    Ok((
        load_embeddings(&inputs.embeddings)?,
        load_wordlists(&inputs.wordlists)?,
    ))
}

fn lookup(
    space: &EmbeddingSpace,
    kind: SectionKind,
    name: &str,
    tokens: &[String],
) -> CliResult<Vec<Vec<f64>>> {
    space
        .lookup_all(tokens)
        .map_err(|e| CliError::Data(format!("[{kind}:{name}]: {e}")))
}

fn target_set(space: &EmbeddingSpace, lists: &WordlistConfig, name: &str) -> CliResult<TargetSet> {
    let tokens = lists.tokens(SectionKind::Targets, name)?;
    let vectors = lookup(space, SectionKind::Targets, name, tokens)?;
    Ok(TargetSet::with_labels(name, tokens.to_vec(), vectors)?)
}

fn group(space: &EmbeddingSpace, lists: &WordlistConfig, name: &str) -> CliResult<Vec<Vec<f64>>> {
    lookup(
        space,
        SectionKind::Group,
        name,
        lists.tokens(SectionKind::Group, name)?,
    )
}

fn pair_family(
    space: &EmbeddingSpace,
    lists: &WordlistConfig,
    name: &str,
) -> CliResult<(Vec<String>, DefiningSetFamily)> {
    let mut labels = Vec::new();
    let mut pairs = Vec::new();
    for (u, v) in lists.pairs(name)? {
        let both = lookup(
            space,
            SectionKind::Pairs,
            name,
            &[u.to_string(), v.to_string()],
        )?;
        labels.push(format!("{u}-{v}"));
        let mut it = both.into_iter();
        pairs.push((it.next().unwrap_or_default(), it.next().unwrap_or_default()));
    }
    Ok((labels, DefiningSetFamily::from_pairs(pairs)?))
}

fn check_tolerance(tol: f64) -> CliResult<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--tolerance must be positive, got {tol}"
        )))
    }
}

/// Prints the report, writes it (and any CSV files) under `out`, and
/// echoes warnings to the diagnostic stream.
fn emit(
    report: &Report,
    out: Option<&Path>,
    files: &[(&str, String)],
    stdout: Option<&str>,
    io: &mut Streams<'_>,
) -> CliResult<()> {
    let json = report.to_json();
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_file(&dir.join("report.json"), &json)?;
        for (name, contents) in files {
            write_file(&dir.join(name), contents)?;
        }
    }
    let text = stdout.unwrap_or(&json);
    io.out
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))?;
    for w in report.warnings() {
        let _ = writeln!(io.err, "warning: {w}");
    }
    Ok(())
}

fn p_value_json(p: &PValue) -> Value {
    let mut m = Map::new();
    m.insert("p".into(), num(p.p));
    m.insert("exceedances".into(), json!(p.exceedances));
    m.insert("evaluated".into(), json!(p.evaluated));
    match p.mode {
        PermutationMode::Exact => {
            m.insert("mode".into(), json!("exact"));
        }
        PermutationMode::MonteCarlo { samples, seed } => {
            m.insert("mode".into(), json!("monte-carlo"));
            m.insert("samples".into(), json!(samples));
            m.insert("seed".into(), json!(seed));
        }
    }
    m.insert(
        "convention".into(),
        json!("ordered equal-size bipartitions including the identity; strict exceedances only"),
    );
    Value::Object(m)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn weat(args: &WeatArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    check_tolerance(args.tolerance)?;
    let (space, lists) = load(&args.inputs)?;
    let a = group(&space, &lists, &args.group_a)?;
    let b = group(&space, &lists, &args.group_b)?;
    let x = target_set(&space, &lists, &args.targets_x)?;
    let y = target_set(&space, &lists, &args.targets_y)?;
    let groups = AttributeGroups::new(
        vec![args.group_a.clone(), args.group_b.clone()],
        vec![a.clone(), b.clone()],
    )?;
    let inst = WeatInstance::new(x, y, a, b)?;
    let test = PermutationTest::new(&inst)?;

    let mut report = Report::new("weat");
    report
        .argument("group_a", args.group_a.as_str())
        .argument("group_b", args.group_b.as_str())
        .argument("targets_x", args.targets_x.as_str())
        .argument("targets_y", args.targets_y.as_str())
        .argument("tolerance", num(args.tolerance));
    report
        .input("embeddings", &args.inputs.embeddings)?
        .input("wordlists", &args.inputs.wordlists)?;

    let count = test.bipartition_count();
    let p_value = match args.permutations {
        Permutations::Skip => None,
        Permutations::Auto if count > EXACT_LIMIT => {
            report.warn(format!(
                "{count} bipartitions exceed the exact limit {EXACT_LIMIT}; pass --permutations COUNT for a Monte Carlo p-value"
            ));
            None
        }
        Permutations::Auto | Permutations::Exact => {
            if count > EXACT_LIMIT {
                return Err(CliError::Usage(format!(
                    "exact enumeration of {count} bipartitions exceeds {EXACT_LIMIT}; pass --permutations COUNT"
                )));
            }
            Some(test.exact()?)
        }
        Permutations::MonteCarlo(n) => Some(monte_carlo_parallel(
            &test,
            n,
            args.seed,
            args.workers.unwrap_or_else(default_workers),
        )?),
    };
    report.argument(
        "permutations",
        match args.permutations {
            Permutations::Auto => json!("auto"),
            Permutations::Exact => json!("exact"),
            Permutations::Skip => json!("none"),
            Permutations::MonteCarlo(n) => json!(n),
        },
    );
    report.argument("seed", args.seed);

    let result = evaluate(&inst, None)?;
    let mut csv = csv_row([
        "set",
        "token",
        "s",
        "association_a",
        "association_b",
        "biased",
    ]);
    let mut target_rows = Map::new();
    let mut aggregated = Map::new();
    for (set, scores) in [(inst.x(), &result.x_scores), (inst.y(), &result.y_scores)] {
        let mut rows = Vec::new();
        for ((token, t), s) in set.labels().iter().zip(set.members()).zip(scores.iter()) {
            let ind = individual_bias(t, &groups, args.tolerance)?;
            csv.push_str(&csv_row([
                set.name().to_string(),
                token.clone(),
                csv_num(*s),
                csv_num(ind.associations[0]),
                csv_num(ind.associations[1]),
                ind.biased.to_string(),
            ]));
            rows.push(json!({
                "token": token,
                "s": num(*s),
                "association_a": num(ind.associations[0]),
                "association_b": num(ind.associations[1]),
                "biased": ind.biased,
            }));
        }
        let agg = aggregated_bias(set, &groups, args.tolerance)?;
        aggregated.insert(
            set.name().to_string(),
            json!({
                "biased": agg.is_biased(),
                "biased_tokens": agg.witnesses.iter().map(|w| w.label.clone()).collect::<Vec<_>>(),
            }),
        );
        // the two target sets may share a name; keep both
        let key = if target_rows.contains_key(set.name()) {
            format!("{} (Y)", set.name())
        } else {
            set.name().to_string()
        };
        target_rows.insert(key, Value::Array(rows));
    }

    let mut status = 0;
    let effect = match result.effect_size {
        EffectSize::Defined(d) => {
            report.result("effect_size_status", "defined");
            num(d)
        }
        EffectSize::Degenerate => {
            report.result("effect_size_status", "degenerate");
            report.warn("effect size undefined: every target has the same association difference (zero standard deviation)");
            status = 3;
            Value::Null
        }
    };
    if result.attribute_difference_norm <= 1e-12 {
        report.warn("normalized attribute means coincide: every association difference is 0");
        status = 3;
    }
    report
        .result("effect_size", effect)
        .result("test_statistic", num(result.test_statistic))
        .result(
            "attribute_difference_norm",
            num(result.attribute_difference_norm),
        )
        .result(
            "p_value",
            p_value.as_ref().map_or(Value::Null, p_value_json),
        )
        .result("targets", Value::Object(target_rows))
        .result("aggregated_bias", Value::Object(aggregated));
    emit(
        &report,
        args.out.as_deref(),
        &[("scores.csv", csv)],
        None,
        io,
    )?;
    if status == 3 {
        let _ = writeln!(io.err, "error: numeric degeneracy; see report warnings");
    }
    Ok(status)
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

/// Absolute cosines of every unordered pair of directions.
fn pairwise_abs_cosines(dirs: &[Vec<f64>]) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, u) in dirs.iter().enumerate() {
        for v in &dirs[i + 1..] {
            out.push(cosine(u, v)?.abs());
        }
    }
    Ok(out)
}

pub fn directbias(args: &DirectBiasArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    check_tolerance(args.tolerance)?;
    if !(args.strictness.is_finite() && args.strictness >= 0.0) {
        return Err(CliError::Usage(format!(
            "--strictness must be finite and ≥ 0, got {}",
            args.strictness
        )));
    }
    if args.components == 0 {
        return Err(CliError::Usage("--components must be at least 1".into()));
    }
    if args.groups.len() == 1 {
        return Err(CliError::Usage("--group needs at least two groups".into()));
    }
    let (space, lists) = load(&args.inputs)?;
    if args.components > space.dim() {
        return Err(CliError::Usage(format!(
            "--components {} exceeds the embedding dimension {}",
            args.components,
            space.dim()
        )));
    }
    let (pair_labels, family) = pair_family(&space, &lists, &args.pairs)?;
    let words = target_set(&space, &lists, &args.neutral)?;
    let subspace = pca(&centered_samples(&family), args.components)?;
    let cfg = if args.components == 1 {
        DirectBiasConfig::with_direction(args.strictness, subspace.first())?
    } else {
        DirectBiasConfig::with_subspace(args.strictness, subspace.clone())?
    };
    let (mean, per_word) = direct_bias_scores(&words, &cfg)?;

    let mut report = Report::new("directbias");
    report
        .argument("pairs", args.pairs.as_str())
        .argument("neutral", args.neutral.as_str())
        .argument("strictness", num(args.strictness))
        .argument("components", args.components)
        .argument("corr_threshold", num(args.corr_threshold))
        .argument("groups", args.groups.clone())
        .argument("tolerance", num(args.tolerance));
    report
        .input("embeddings", &args.inputs.embeddings)?
        .input("wordlists", &args.inputs.wordlists)?;
    if args.strictness == 0.0 {
        report.warn("strictness 0 scores every word not orthogonal to the bias axis as 1 (exact orthogonality scores 0)");
    }

    let groups = if args.groups.is_empty() {
        None
    } else {
        let vectors = args
            .groups
            .iter()
            .map(|g| group(&space, &lists, g))
            .collect::<CliResult<Vec<_>>>()?;
        Some(AttributeGroups::new(args.groups.clone(), vectors)?)
    };

    let mut header = vec!["token".to_string(), "direct_bias".to_string()];
    if let Some(g) = &groups {
        header.extend(g.names().iter().map(|n| format!("association_{n}")));
        header.push("biased".into());
    }
    let mut csv = csv_row(&header);
    let mut rows = Vec::new();
    for ((token, t), score) in words.labels().iter().zip(words.members()).zip(&per_word) {
        let mut row = Map::new();
        row.insert("token".into(), json!(token));
        row.insert("direct_bias".into(), num(*score));
        let mut cells = vec![token.clone(), csv_num(*score)];
        if let Some(g) = &groups {
            let ind = individual_bias(t, g, args.tolerance)?;
            let assoc: Map<String, Value> = g
                .names()
                .iter()
                .zip(&ind.associations)
                .map(|(n, v)| (n.clone(), num(*v)))
                .collect();
            cells.extend(ind.associations.iter().map(|v| csv_num(*v)));
            cells.push(ind.biased.to_string());
            row.insert("associations".into(), Value::Object(assoc));
            row.insert("biased".into(), json!(ind.biased));
            let reports_unbiased = *score <= args.tolerance;
            row.insert(
                "disagrees_with_predicate".into(),
                json!(reports_unbiased == ind.biased),
            );
        }
        csv.push_str(&csv_row(&cells));
        rows.push(Value::Object(row));
    }

    let dirs = pair_directions(&family)?;
    let pc1_alignment = dirs
        .iter()
        .map(|d| cosine(d, subspace.first()).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?;
    let pairwise = pairwise_abs_cosines(&dirs)?;
    let median_pairwise = median(pairwise);
    match median_pairwise {
        Some(m) if m < args.corr_threshold => {
            report.warn(format!(
                "median absolute cosine between pair directions is {} (below {}): the bias direction may not represent individual pairs",
                crate::report::round12(m),
                args.corr_threshold
            ));
        }
        None => {
            report.warn("only one defining pair: pair-direction agreement cannot be assessed");
        }
        _ => {}
    }
    let pair_rows: Vec<Value> = pair_labels
        .iter()
        .zip(&pc1_alignment)
        .map(|(l, c)| json!({"pair": l, "abs_cosine_with_pc1": num(*c)}))
        .collect();

    report
        .result("direct_bias", num(mean))
        .result("words", Value::Array(rows))
        .result("components", matrix(subspace.components()))
        .result(
            "explained_variance_ratios",
            nums(subspace.explained_variance_ratios()),
        )
        .result("sample_count", subspace.sample_count())
        .result(
            "pair_directions",
            json!({
                "median_abs_pairwise_cosine": median_pairwise.map_or(Value::Null, num),
                "pairs": pair_rows,
            }),
        );
    if let Some(g) = &groups {
        let agg = aggregated_bias(&words, g, args.tolerance)?;
        report.result(
            "aggregated_bias",
            json!({
                "biased": agg.is_biased(),
                "biased_tokens": agg.witnesses.iter().map(|w| w.label.clone()).collect::<Vec<_>>(),
            }),
        );
    }
    emit(
        &report,
        args.out.as_deref(),
        &[("scores.csv", csv)],
        None,
        io,
    )?;
    Ok(0)
}

pub fn correlate(args: &CorrelateArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    let (space, lists) = load(&args.inputs)?;
    let (labels, family) = pair_family(&space, &lists, &args.pairs)?;
    let dirs = pair_directions(&family)?;
    let subspace = pca(&centered_samples(&family), 1)?;
    let m = correlation_matrix(&dirs, Some(subspace.first()))?;
    let mut names = labels.clone();
    names.push("PC1".into());

    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    let mut csv = csv_row(&header);
    for (name, row) in names.iter().zip(&m) {
        let mut cells = vec![name.clone()];
        cells.extend(row.iter().map(|v| csv_num(*v)));
        csv.push_str(&csv_row(&cells));
    }

    let mut report = Report::new("correlate");
    report.argument("pairs", args.pairs.as_str());
    report
        .input("embeddings", &args.inputs.embeddings)?
        .input("wordlists", &args.inputs.wordlists)?;
    report
        .result("labels", names.clone())
        .result("matrix", matrix(&m))
        .result("pc1", nums(subspace.first()))
        .result(
            "pc1_explained_variance_ratio",
            num(subspace.explained_variance_ratios()[0]),
        )
        .result("measure", "cosine similarity of unit pair directions");
    emit(
        &report,
        args.out.as_deref(),
        &[("correlation.csv", csv.clone())],
        Some(&csv),
        io,
    )?;
    Ok(0)
}

pub fn attrdiff(args: &AttrDiffArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    let (space, lists) = load(&args.inputs)?;
    let a = group(&space, &lists, &args.group_a)?;
    let b = group(&space, &lists, &args.group_b)?;
    AttributeGroups::pair(a.clone(), b.clone())?;
    let value = attribute_difference_norm(&a, &b)?;
    let mut report = Report::new("attrdiff");
    report
        .argument("group_a", args.group_a.as_str())
        .argument("group_b", args.group_b.as_str());
    report
        .input("embeddings", &args.inputs.embeddings)?
        .input("wordlists", &args.inputs.wordlists)?;
    report
        .result("attribute_difference_norm", num(value))
        .result("normalized_mean_norm_a", num(norm(&normalized_mean(&a)?)))
        .result("normalized_mean_norm_b", num(norm(&normalized_mean(&b)?)))
        .result("group_size", a.len());
    let status = if value <= 1e-12 {
        report.warn("normalized attribute means coincide: s(t, A, B) is 0 for every target");
        3
    } else {
        0
    };
    emit(&report, args.out.as_deref(), &[], None, io)?;
    Ok(status)
}

/// JSON form of a witness, including every vector needed to replay it.
pub fn witness_json(w: &BiasWitness) -> CliResult<Value> {
    let geometry = match &w.geometry {
        Geometry::WeatTarget { t, a, b } => json!({
            "type": "weat-target", "t": nums(t), "a": matrix(a), "b": matrix(b),
        }),
        Geometry::WeatSets { x, y, a, b } => json!({
            "type": "weat-sets", "x": matrix(x), "y": matrix(y), "a": matrix(a), "b": matrix(b),
        }),
        Geometry::DirectBias {
            pairs,
            probes,
            strictness,
        } => json!({
            "type": "direct-bias",
            "pairs": pairs.iter().map(|(a, c)| json!([nums(a), nums(c)])).collect::<Vec<_>>(),
            "probes": matrix(probes),
            "strictness": num(*strictness),
        }),
        Geometry::Lemma { values, selection } => json!({
            "type": "lemma", "values": nums(values), "selection": selection,
        }),
    };
    Ok(json!({
        "kind": w.kind.as_str(),
        "description": w.description,
        "tolerance": num(w.tolerance),
        "scores": w.scores.iter().map(|s| json!({"name": s.name, "value": num(s.value)})).collect::<Vec<_>>(),
        "geometry": geometry,
        "rechecked": w.recheck()?,
    }))
}

fn witnesses_json(ws: &[BiasWitness]) -> CliResult<Value> {
    Ok(Value::Array(
        ws.iter().map(witness_json).collect::<CliResult<_>>()?,
    ))
}

pub fn audit(args: &AuditArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    let cfg = ProbeConfig::new(args.dim, args.trials, args.seed, args.tolerance)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let kind = ScoreKind::from(args.score);
    let comp = comparability_probe(kind, &cfg)?;
    let trust = trustworthiness_probe(kind, &cfg)?;

    let mut report = Report::new("audit");
    report
        .argument("score", kind.as_str())
        .argument("dim", args.dim)
        .argument("trials", args.trials)
        .argument("seed", args.seed)
        .argument("tolerance", num(args.tolerance));
    let trials: Vec<Value> = comp
        .trials
        .iter()
        .map(|e| {
            json!({
                "min": num(e.min),
                "max": num(e.max),
                "attribute_difference_norm": num(e.attribute_difference_norm),
                "evaluations": e.evaluations,
            })
        })
        .collect();
    let expected = kind
        .expected_extrema()
        .map_or(Value::Null, |(lo, hi)| json!([num(lo), num(hi)]));
    report.result(
        "comparability",
        json!({
            "comparable": comp.comparable,
            "attains_expected_extrema": comp.attains_expected,
            "expected_extrema": expected,
            "max_range": [num(comp.max_range.0), num(comp.max_range.1)],
            "min_range": [num(comp.min_range.0), num(comp.min_range.1)],
            "trials": trials,
            "witnesses": witnesses_json(&comp.witnesses)?,
        }),
    );
    report.result(
        "trustworthiness",
        json!({
            "checked": trust.checked,
            "undefined": trust.undefined,
            "violations": trust.violations,
            "trustworthy_on_probe": trust.violations == 0,
            "witnesses": witnesses_json(&trust.witnesses)?,
        }),
    );
    report.result(
        "note",
        "no violation found is evidence only; every witness is a rechecked certificate",
    );
    emit(&report, args.out.as_deref(), &[], None, io)?;
    Ok(0)
}

fn section(
    lists: &mut WordlistConfig,
    kind: SectionKind,
    name: &str,
    tokens: &[&str],
) -> CliResult<()> {
    lists
        .push(kind, name, tokens.iter().map(|t| t.to_string()).collect())
        .map_err(CliError::Data)
}

pub fn counterexample(args: &CounterexampleArgs, io: &mut Streams<'_>) -> CliResult<i32> {
    let dim = args.dim.unwrap_or(match args.kind {
        CounterexampleKind::WeatExtremal => 10,
        _ => 2,
    });
    if dim < 2 {
        return Err(CliError::Usage("--dim must be at least 2".into()));
    }
    let mut space = EmbeddingSpace::new(dim)?;
    let mut lists = WordlistConfig::new();
    let mut report = Report::new("counterexample");
    let witness;
    let replay: Vec<String>;
    match args.kind {
        CounterexampleKind::WeatZero => {
            report.argument("kind", "weat-zero").argument("dim", dim);
            let (inst, w) = construct_weat_zero_bias(dim)?;
            let names = ["t1", "t2", "t3", "t4", "a", "b"];
            let vectors = inst
                .x()
                .members()
                .iter()
                .chain(inst.y().members())
                .chain(inst.a())
                .chain(inst.b());
            for (n, v) in names.iter().zip(vectors) {
                space.insert(*n, v.clone())?;
            }
            section(&mut lists, SectionKind::Group, "a", &["a"])?;
            section(&mut lists, SectionKind::Group, "b", &["b"])?;
            section(&mut lists, SectionKind::Targets, "x", &["t1", "t2"])?;
            section(&mut lists, SectionKind::Targets, "y", &["t3", "t4"])?;
            witness = w;
            replay = "weat --group-a a --group-b b --targets-x x --targets-y y"
                .split(' ')
                .map(String::from)
                .collect();
        }
        CounterexampleKind::WeatExtremal => {
            if args.m == 0 {
                return Err(CliError::Usage("--m must be at least 1".into()));
            }
            report
                .argument("kind", "weat-extremal")
                .argument("dim", dim)
                .argument("m", args.m)
                .argument("seed", args.seed);
            let draw = AttributeDraw::random(&mut keyed_rng(args.seed, 0), dim);
            let inst = construct_weat_extremal(args.m, &draw.a, &draw.b)?;
            let mut group_tokens = (Vec::new(), Vec::new());
            for (k, (a, b)) in draw.a.iter().zip(&draw.b).enumerate() {
                group_tokens.0.push(format!("a{k}"));
                group_tokens.1.push(format!("b{k}"));
                space.insert(format!("a{k}"), a.clone())?;
                space.insert(format!("b{k}"), b.clone())?;
            }
            let mut xt = Vec::new();
            let mut yt = Vec::new();
            for (k, (x, y)) in inst
                .x()
                .members()
                .iter()
                .zip(inst.y().members())
                .enumerate()
            {
                xt.push(format!("x{k}"));
                yt.push(format!("y{k}"));
                space.insert(format!("x{k}"), x.clone())?;
                space.insert(format!("y{k}"), y.clone())?;
            }
            lists
                .push(SectionKind::Group, "a", group_tokens.0)
                .map_err(CliError::Data)?;
            lists
                .push(SectionKind::Group, "b", group_tokens.1)
                .map_err(CliError::Data)?;
            lists
                .push(SectionKind::Targets, "x", xt)
                .map_err(CliError::Data)?;
            lists
                .push(SectionKind::Targets, "y", yt)
                .map_err(CliError::Data)?;
            witness = BiasWitness::certify(
                embias_core::audit::WitnessKind::ComparabilityEvidence,
                "copies of â − b̂ against copies of b̂ − â reach effect size 2 for any attributes",
                Geometry::WeatSets {
                    x: inst.x().members().to_vec(),
                    y: inst.y().members().to_vec(),
                    a: draw.a.clone(),
                    b: draw.b.clone(),
                },
                DEFAULT_TOLERANCE,
            )?;
            replay = "weat --group-a a --group-b b --targets-x x --targets-y y"
                .split(' ')
                .map(String::from)
                .collect();
        }
        CounterexampleKind::Directbias => {
            report
                .argument("kind", "directbias")
                .argument("dim", dim)
                .argument("r", num(args.r))
                .argument("x", num(args.x));
            let ce = construct_direct_bias_counterexample(args.r, args.x, dim)?;
            for (k, (a, c)) in ce.pairs.iter().enumerate() {
                space.insert(format!("a{}", k + 1), a.clone())?;
                space.insert(format!("c{}", k + 1), c.clone())?;
            }
            space.insert("neutral", ce.neutral_probe.clone())?;
            space.insert("separating", ce.separating_probe.clone())?;
            section(
                &mut lists,
                SectionKind::Pairs,
                "defining",
                &["a1", "c1", "a2", "c2"],
            )?;
            section(&mut lists, SectionKind::Group, "a", &["a1", "a2"])?;
            section(&mut lists, SectionKind::Group, "c", &["c1", "c2"])?;
            section(&mut lists, SectionKind::Targets, "neutral", &["neutral"])?;
            section(
                &mut lists,
                SectionKind::Targets,
                "separating",
                &["separating"],
            )?;
            witness = ce.witness;
            replay = "directbias --pairs defining --neutral neutral --group a --group c"
                .split(' ')
                .map(String::from)
                .collect();
        }
    }
    ensure_dir(&args.out)?;
    let emb_path = args.out.join("embeddings.txt");
    let wl_path = args.out.join("wordlists.txt");
    write_embeddings(&space, &emb_path)?;
    write_file(&wl_path, &lists.to_text())?;
    report.result("witness", witness_json(&witness)?);
    report.result(
        "files",
        json!([
            "embeddings.txt",
            "wordlists.txt",
            "witness.json",
            "report.json"
        ]),
    );
    report.result("replay", replay);
    write_file(
        &args.out.join("witness.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&witness_json(&witness)?).expect("JSON values serialize")
        ),
    )?;
    emit(&report, Some(&args.out), &[], None, io)?;
    Ok(0)
}
