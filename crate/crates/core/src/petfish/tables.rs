//! Feature weights for the pet-fish lexicon, kept as the printed text and
//! parsed at use.

use crate::error::{Error, Result};

pub const FEATURES: [&str; 7] = [
    "cared-for",
    "vicious",
    "fluffy",
    "scaly",
    "lives-sea",
    "lives-house",
    "lives-zoo",
];

pub const ANIMALS: [&str; 6] = ["Fish", "Goldfish", "Cat", "Dog", "Shark", "Lion"];

/// Noun weights: one row per feature, one column per animal.
pub const NOUN_WEIGHTS_SRC: &str = "\
feature     Fish Goldfish Cat  Dog  Shark Lion
cared-for   0.13 0.44     0.57 0.67 0.00  0.19
vicious     0.51 0.00     0.13 0.37 0.57  0.62
fluffy      0.00 0.00     0.57 0.37 0.00  0.44
scaly       0.63 0.62     0.00 0.00 0.57  0.00
lives-sea   0.51 0.00     0.00 0.00 0.57  0.00
lives-house 0.19 0.62     0.57 0.52 0.00  0.00
lives-zoo   0.19 0.19     0.00 0.00 0.11  0.62
";

/// `pet` adjective: row = output feature, column = input feature.
pub const PET_WEIGHTS_SRC: &str = "\
feature     cared-for vicious fluffy scaly lives-sea lives-house lives-zoo
cared-for   1 1 1 1 1 1 1
vicious     0 1 0 0 0 0 0
fluffy      0 0 1 0 0 0 0
scaly       0 0 0 1 0 0 0
lives-sea   0 0 0 0 0 0 0
lives-house 0 0 0 0 1 1 1
lives-zoo   0 0 0 0 0 0 0
";

/// Cells as written, `cells[row][col]`, after checking the header and row labels.
pub fn parse_table_tokens<'a>(
    src: &'a str,
    rows: &[&str],
    cols: &[&str],
) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = src.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty table".into()))?
        .split_whitespace()
        .skip(1)
        .collect();
    if header != cols {
        return Err(Error::InvalidArgument(format!("table header {header:?}")));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (want, line) in rows.iter().zip(lines.by_ref()) {
        let mut it = line.split_whitespace();
        let label = it.next().unwrap_or_default();
        if label != *want {
            return Err(Error::InvalidArgument(format!(
                "table row `{label}`, expected `{want}`"
            )));
        }
        let cells: Vec<&str> = it.collect();
        if cells.len() != cols.len() {
            return Err(Error::InvalidArgument(format!(
                "table row `{label}` has {} cells",
                cells.len()
            )));
        }
        out.push(cells);
    }
    if out.len() != rows.len() || lines.next().is_some() {
        return Err(Error::InvalidArgument("table row count".into()));
    }
    Ok(out)
}

fn parse_numeric(src: &str, rows: &[&str], cols: &[&str]) -> Result<Vec<Vec<f64>>> {
    parse_table_tokens(src, rows, cols)?
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("table cell `{t}`")))
                })
                .collect()
        })
        .collect()
}

/// `w[feature][animal]`, as printed (columns are unit only to two decimals).
pub fn noun_weights() -> [[f64; 6]; 7] {
    let parsed = parse_numeric(NOUN_WEIGHTS_SRC, &FEATURES, &ANIMALS).expect("embedded table");
    let mut out = [[0.0; 6]; 7];
    for (dst, src) in out.iter_mut().zip(parsed) {
        dst.copy_from_slice(&src);
    }
    out
}

/// `m[out_feature][in_feature]`.
pub fn pet_weights() -> [[f64; 7]; 7] {
    let parsed = parse_numeric(PET_WEIGHTS_SRC, &FEATURES, &FEATURES).expect("embedded table");
    let mut out = [[0.0; 7]; 7];
    for (dst, src) in out.iter_mut().zip(parsed) {
        dst.copy_from_slice(&src);
    }
    out
}

/// Column `animal` of the noun table, unnormalized.
pub fn animal_column(animal: usize) -> [f64; 7] {
    let w = noun_weights();
    std::array::from_fn(|f| w[f][animal])
}
