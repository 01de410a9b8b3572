use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(name = "connote", version, about = "Connotation lexicon, embeddings and stance experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output directory (default: $CONNOTE_OUT/<subcommand>, or runs/<subcommand>)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overwrite files in a non-empty output directory
    #[arg(long, global = true)]
    pub force: bool,
    /// TOML run configuration; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Random seed; overrides `seed` in the config
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compile the noun/adjective lexicon from source TSVs
    CompileLexicon(CompileLexicon),
    /// Class distribution of the fully labeled entries
    LexiconStats(LexiconIn),
    /// Annotator and lexicon agreement
    Agreement(Agreement),
    /// Connotation differences between synonym pairs
    Synonyms(Synonyms),
    /// Word-level 60/20/20 split of lexicon and verb frames
    Split(SplitArgs),
    /// Train a connotation encoder
    TrainConn(TrainConn),
    /// Score a connotation checkpoint (and optionally baselines)
    EvalConn(EvalConn),
    /// Write connotation embeddings for every word with definitions
    ExportEmbeddings(ExportEmbeddings),
    /// Nearest-neighbor label purity of connotation vs pretrained spaces
    KnnPurity(KnnPurity),
    /// Split a stance corpus by author and add generated neutrals
    GenNeutrals(GenNeutrals),
    /// Train a BiC stance model
    TrainStance(TrainStance),
    /// Evaluate a stance checkpoint or the bag-of-words baseline
    EvalStance(EvalStance),
    /// Paired approximate randomization test between two prediction files
    Significance(SignificanceArgs),
    /// Finite-difference check of every differentiable operation
    GradCheck(GradCheck),
    /// Re-run the command recorded in a manifest
    Replay(Replay),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CompileLexicon(_) => "compile-lexicon",
            Command::LexiconStats(_) => "lexicon-stats",
            Command::Agreement(_) => "agreement",
            Command::Synonyms(_) => "synonyms",
            Command::Split(_) => "split",
            Command::TrainConn(_) => "train-conn",
            Command::EvalConn(_) => "eval-conn",
            Command::ExportEmbeddings(_) => "export-embeddings",
            Command::KnnPurity(_) => "knn-purity",
            Command::GenNeutrals(_) => "gen-neutrals",
            Command::TrainStance(_) => "train-stance",
            Command::EvalStance(_) => "eval-stance",
            Command::Significance(_) => "significance",
            Command::GradCheck(_) => "grad-check",
            Command::Replay(_) => "replay",
        }
    }

    /// Commands whose outputs depend on a random seed.
    pub fn needs_seed(&self) -> bool {
        matches!(
            self,
            Command::Split(_)
                | Command::TrainConn(_)
                | Command::GenNeutrals(_)
                | Command::TrainStance(_)
                | Command::EvalStance(_)
                | Command::Significance(_)
                | Command::GradCheck(_)
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompileLexicon {
    /// Directory holding hgi.tsv, dal.tsv, cwn.tsv and nrc.tsv
    #[arg(long)]
    pub sources: PathBuf,
    /// Rule table overriding the built-in one
    #[arg(long)]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LexiconIn {
    #[arg(long)]
    pub lexicon: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Agreement {
    /// TSV: word, pos, aspect, comma-separated annotator labels in {-1,0,1}
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Synonyms {
    #[arg(long)]
    pub ppdb: PathBuf,
    #[arg(long)]
    pub synsets: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub verbs: Option<PathBuf>,
}

/// Files an encoder needs to build its inputs.
#[derive(Debug, Clone, Args)]
pub struct EncoderData {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub verbs: Option<PathBuf>,
    #[arg(long)]
    pub definitions: PathBuf,
    #[arg(long)]
    pub related: Option<PathBuf>,
    /// Pretrained word vectors (text format)
    #[arg(long)]
    pub embeddings: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    J,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[value(name = "CE")]
    Ce,
    #[value(name = "CE+R")]
    CeR,
}

#[derive(Debug, Clone, Args)]
pub struct TrainConn {
    #[command(flatten)]
    pub data: EncoderData,
    /// Word split from `split`; computed from the seed when absent
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitName {
    Train,
    Dev,
    Test,
}

#[derive(Debug, Clone, Args)]
pub struct EvalConn {
    #[command(flatten)]
    pub data: EncoderData,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long, value_enum, default_value = "test")]
    pub on: SplitName,
    /// Also score the majority-class and logistic-regression baselines
    #[arg(long)]
    pub baselines: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExportEmbeddings {
    #[command(flatten)]
    pub data: EncoderData,
    #[arg(long)]
    pub checkpoint: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct KnnPurity {
    /// Connotation embeddings keyed word|pos
    #[arg(long)]
    pub connotation: PathBuf,
    /// Pretrained word vectors
    #[arg(long)]
    pub pretrained: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    /// Also list the neighbors of these word|pos keys in both spaces
    #[arg(long = "query")]
    pub queries: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GenNeutrals {
    /// stance.jsonl with topic, text, pos_tags, label, author
    #[arg(long)]
    pub stance: PathBuf,
    /// Lexicon whose parts of speech back the fallback tagger
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub neutral_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttentionArg {
    None,
    W,
    C,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    #[value(name = "all-data", alias = "AllData")]
    AllData,
    #[value(name = "trunc-train", alias = "TruncTrain")]
    TruncTrain,
    #[value(name = "trunc-all", alias = "TruncAll")]
    TruncAll,
}

/// Where the attention embeddings of BiC+C come from.
#[derive(Debug, Clone, Args)]
pub struct ConnSource {
    /// Connotation embeddings keyed word|pos, as written by export-embeddings
    #[arg(long)]
    pub conn_embeddings: Option<PathBuf>,
    /// Connotation checkpoint; text words are encoded from --definitions
    #[arg(long)]
    pub conn_checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub definitions: Option<PathBuf>,
    #[arg(long)]
    pub related: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainStance {
    /// Directory written by gen-neutrals
    #[arg(long)]
    pub data: PathBuf,
    /// Pretrained word vectors
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, value_enum)]
    pub attention: Option<AttentionArg>,
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[command(flatten)]
    pub conn: ConnSource,
}

#[derive(Debug, Clone, Args)]
pub struct EvalStance {
    #[arg(long)]
    pub data: PathBuf,
    /// Stance checkpoint from train-stance
    #[arg(long, conflicts_with = "bowv", required_unless_present = "bowv")]
    pub checkpoint: Option<PathBuf>,
    /// Evaluate the bag-of-words baseline instead of a checkpoint
    #[arg(long)]
    pub bowv: bool,
    #[arg(long, required_unless_present = "bowv")]
    pub embeddings: Option<PathBuf>,
    /// Truncation scenario for the baseline (checkpoints use their own)
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    #[command(flatten)]
    pub conn: ConnSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigKind {
    /// predictions.jsonl from eval-stance; macro-F1 overall and per topic
    Stance,
    /// predictions.jsonl from eval-conn; macro-F1 per aspect
    Conn,
    /// one number per line; difference of means
    Scores,
}

#[derive(Debug, Clone, Args)]
pub struct SignificanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "stance")]
    pub kind: SigKind,
    #[arg(long)]
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GradCheck {
    #[arg(long)]
    pub instances: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Replay {
    pub manifest: PathBuf,
}
