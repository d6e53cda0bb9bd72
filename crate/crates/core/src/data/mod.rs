//! Loading, feature engineering, splitting and standardization of the credit
//! default table.

mod dataset;
mod features;
mod prepared;
pub mod schema;
mod split;
mod standardize;
pub mod synthetic;

pub use dataset::{load_credit_csv, read_credit_csv, RawDataset};
pub use features::{
    derive_utilization_features, select_feature_set, EncodedColumn, EncodedKind, FeatureFrame,
    FeatureSetKind, OneHotEncoder,
};
pub use prepared::{
    prepare, PreparedData, PreparedSplit, PreprocessingSidecar, SIDECAR_FILE, TEST_FILE,
    TRAIN_FILE, VALIDATION_FILE,
};
pub use split::{stratified_split, SplitFractions, SplitIndices};
pub use standardize::{fit_standardizer, ColumnScale, Standardizer};
