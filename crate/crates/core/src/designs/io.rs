//! Plain-text matrix format.
//!
//! One matrix row per line, decimal entries (optionally negative) separated
//! by spaces or tabs. Blank lines and lines starting with `#` are skipped.
//! There is no header; the shape is implied by the content.

use super::{DesignError, DesignMatrix};

pub fn parse_matrix(text: &str) -> Result<DesignMatrix, DesignError> {
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let before = entries.len();
        for token in trimmed.split([' ', '\t']).filter(|t| !t.is_empty()) {
            let value: i32 = token.parse().map_err(|_| DesignError::Parse {
                line: line_no,
                message: format!("`{token}` is not an integer"),
            })?;
            entries.push(value);
        }
        let width = entries.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(DesignError::Parse {
                    line: line_no,
                    message: format!("row has {width} entries, expected {c}"),
                })
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or(DesignError::Parse {
        line: last_line.max(1),
        message: "no matrix rows found".into(),
    })?;
    DesignMatrix::new(rows, cols, entries)
}

/// Renders a matrix with right-aligned columns of uniform width.
pub fn format_matrix(m: &DesignMatrix) -> String {
    let width = m
        .entries()
        .iter()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::with_capacity(m.rows() * m.cols() * (width + 1));
    for row in m.iter_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_simple_square() {
        let m = parse_matrix("0 1\n1 0\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn parses_signed_entries_tabs_and_comments() {
        let m = parse_matrix("# weighing row\n0\t-1  1\n\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, -1, 1]]);
    }

    #[test]
    fn ragged_input_reports_line() {
        let err = parse_matrix("0 1\n0\n").unwrap_err();
        assert!(matches!(err, DesignError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn ragged_line_number_counts_skipped_lines() {
        let err = parse_matrix("# c\n0 1\n\n0 1 2\n").unwrap_err();
        assert!(matches!(err, DesignError::Parse { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn non_integer_token_rejected() {
        let err = parse_matrix("0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, DesignError::Parse { line: 2, .. }));
        assert!(parse_matrix("1.5\n").is_err());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("\n# nothing\n").is_err());
    }

    #[test]
    fn aligned_output() {
        let m = DesignMatrix::from_rows(&[vec![0, -1], vec![10, 1]]).unwrap();
        assert_eq!(format_matrix(&m), " 0 -1\n10  1\n");
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(
            rows in 1usize..8,
            cols in 1usize..8,
            seed in proptest::collection::vec(-30i32..30, 64),
        ) {
            let entries: Vec<i32> = (0..rows * cols).map(|i| seed[i % seed.len()]).collect();
            let m = DesignMatrix::new(rows, cols, entries).unwrap();
            prop_assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        }
    }
}
