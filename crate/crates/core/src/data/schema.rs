//! Column layout of the "default of credit card clients" table.

use serde::{Deserialize, Serialize};

pub const ID_COLUMN: &str = "ID";
pub const LABEL_COLUMN: &str = "default payment next month";
pub const LIMIT_COLUMN: &str = "LIMIT_BAL";

/// Repayment status columns. The upstream file skips `PAY_1`.
pub const PAY_STATUS: [&str; 6] = ["PAY_0", "PAY_2", "PAY_3", "PAY_4", "PAY_5", "PAY_6"];
pub const BILL_AMOUNTS: [&str; 6] = [
    "BILL_AMT1",
    "BILL_AMT2",
    "BILL_AMT3",
    "BILL_AMT4",
    "BILL_AMT5",
    "BILL_AMT6",
];
pub const PAY_AMOUNTS: [&str; 6] = [
    "PAY_AMT1", "PAY_AMT2", "PAY_AMT3", "PAY_AMT4", "PAY_AMT5", "PAY_AMT6",
];
pub const UTILIZATION: [&str; 6] = ["UTIL1", "UTIL2", "UTIL3", "UTIL4", "UTIL5", "UTIL6"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Continuous,
}

/// Whether a column describes the borrower (static) or the April to
/// September 2005 account history (dynamic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    pub group: FeatureGroup,
}

impl ColumnSpec {
    fn new(name: &str, kind: ColumnKind, group: FeatureGroup) -> Self {
        Self {
            name: name.to_string(),
            kind,
            group,
        }
    }
}

/// Feature columns of the raw file in file order (ID and label excluded).
pub fn raw_feature_columns() -> Vec<ColumnSpec> {
    use ColumnKind::*;
    use FeatureGroup::*;

    let mut cols = vec![
        ColumnSpec::new(LIMIT_COLUMN, Continuous, Static),
        ColumnSpec::new("SEX", Categorical, Static),
        ColumnSpec::new("EDUCATION", Categorical, Static),
        ColumnSpec::new("MARRIAGE", Categorical, Static),
        ColumnSpec::new("AGE", Continuous, Static),
    ];
    // PAY_* are months of delay, kept as ordinal numbers.
    for name in PAY_STATUS.iter().chain(&BILL_AMOUNTS).chain(&PAY_AMOUNTS) {
        cols.push(ColumnSpec::new(name, Continuous, Dynamic));
    }
    cols
}

pub fn utilization_columns() -> Vec<ColumnSpec> {
    UTILIZATION
        .iter()
        .map(|name| ColumnSpec::new(name, ColumnKind::Continuous, FeatureGroup::Dynamic))
        .collect()
}

/// The full expected header, in file order.
pub fn expected_header() -> Vec<String> {
    std::iter::once(ID_COLUMN.to_string())
        .chain(raw_feature_columns().into_iter().map(|c| c.name))
        .chain(std::iter::once(LABEL_COLUMN.to_string()))
        .collect()
}

/// Header cells are compared case-insensitively with `.`/`_` treated as
/// spaces, so both the spreadsheet export and the common
/// `default.payment.next.month` spelling are accepted.
pub(crate) fn normalize_header(cell: &str) -> String {
    cell.trim()
        .chars()
        .map(|c| match c {
            '.' | '_' => ' ',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_has_25_columns() {
        let header = expected_header();
        assert_eq!(header.len(), 25);
        assert_eq!(header[0], "ID");
        assert_eq!(header[24], LABEL_COLUMN);
    }

    #[test]
    fn static_and_dynamic_counts() {
        let cols = raw_feature_columns();
        let stat = cols
            .iter()
            .filter(|c| c.group == FeatureGroup::Static)
            .count();
        assert_eq!(stat, 5);
        assert_eq!(cols.len() - stat + utilization_columns().len(), 24);
    }

    #[test]
    fn normalization_accepts_dotted_label() {
        assert_eq!(
            normalize_header("default.payment.next.month"),
            normalize_header(LABEL_COLUMN)
        );
        assert_eq!(normalize_header("PAY_0"), "pay 0");
    }
}
