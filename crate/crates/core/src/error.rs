use alloc::string::String;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("insufficient data: {examples} examples for {parties} parties")]
    InsufficientData { examples: usize, parties: usize },
    #[error("party too small for t subsets: {local_size} examples, {subsets} subsets")]
    PartyTooSmall { local_size: usize, subsets: usize },
    #[error("class {class} absent from dataset")]
    ClassAbsent { class: usize },
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("vote histogram has {got} entries, expected {expected}")]
    HistogramLength { expected: usize, got: usize },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("unlabeled example at index {index} in training set")]
    UnlabeledExample { index: usize },
    #[error("no queries answered")]
    NoQueriesAnswered,
    #[error("moment vectors have different lengths: {left} vs {right}")]
    MomentLength { left: usize, right: usize },
    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model decode failed: {0}")]
    ModelCodec(String),
    #[error("non-finite feature value at example {index}")]
    NonFiniteFeature { index: usize },
}
