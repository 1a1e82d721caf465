//! File loading shared by every front end.
//!
//! Loaders parse JSON and check table shapes and index ranges, so that a
//! malformed file is reported with its line and column, or with the field and
//! entry at fault, before any algebra runs. Semigroup references inside action
//! and bimodule files are either inline tables, paths relative to the
//! referencing file, or `catalog:NAME`.

use std::path::{Path, PathBuf};

use fixedbitset::FixedBitSet;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::ActionTables;
use crate::bimodule::BiactionTables;
use crate::bits;
use crate::catalog;
use crate::semigroup::CayleyTable;
use crate::sheaf::SheafTables;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Field { path: PathBuf, field: String, message: String },
}

/// A semigroup given inline or by reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SemigroupRef {
    Path(String),
    Inline(CayleyTable),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFile {
    pub semigroup: SemigroupRef,
    #[serde(flatten)]
    pub tables: ActionTables,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleFile {
    pub s: SemigroupRef,
    pub t: SemigroupRef,
    #[serde(flatten)]
    pub tables: BiactionTables,
}

/// A sheaf over `lcc(S)`; action rows follow the canonical carrier order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafFile {
    pub semigroup: SemigroupRef,
    #[serde(flatten)]
    pub tables: SheafTables,
}

/// Relations `(A, B)` on generators `0..generators`, each side a list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub generators: usize,
    pub relations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl PresentationFile {
    pub fn relation_sets(&self) -> Vec<(FixedBitSet, FixedBitSet)> {
        let n = self.generators;
        self.relations
            .iter()
            .map(|(a, b)| (bits::bitset(n, a.iter().copied()), bits::bitset(n, b.iter().copied())))
            .collect()
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Parses a JSON document, reporting syntax and schema errors by position.
pub fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Syntax {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field_error(path: &Path, field: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Field { path: path.to_path_buf(), field: field.into(), message: message.into() }
}

/// Checks a `rows × cols` table of indices below `bound`.
pub fn check_table(path: &Path, field: &str, table: &[Vec<usize>], rows: usize, cols: usize, bound: usize) -> Result<(), LoadError> {
    if table.len() != rows {
        return Err(field_error(path, field, format!("expected {rows} rows, found {}", table.len())));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != cols {
            return Err(field_error(path, format!("{field}[{i}]"), format!("expected {cols} entries, found {}", row.len())));
        }
        if let Some(j) = row.iter().position(|&v| v >= bound) {
            return Err(field_error(path, format!("{field}[{i}][{j}]"), format!("{} is out of range (bound {bound})", row[j])));
        }
    }
    Ok(())
}

fn check_vector(path: &Path, field: &str, v: &[usize], len: usize, bound: usize) -> Result<(), LoadError> {
    if v.len() != len {
        return Err(field_error(path, field, format!("expected {len} entries, found {}", v.len())));
    }
    if let Some(j) = v.iter().position(|&a| a >= bound) {
        return Err(field_error(path, format!("{field}[{j}]"), format!("{} is out of range (bound {bound})", v[j])));
    }
    Ok(())
}

fn check_names(path: &Path, names: &Option<Vec<String>>, len: usize) -> Result<(), LoadError> {
    match names {
        Some(names) if names.len() != len => {
            Err(field_error(path, "names", format!("expected {len} names, found {}", names.len())))
        }
        _ => Ok(()),
    }
}

pub fn check_cayley(path: &Path, table: &CayleyTable) -> Result<(), LoadError> {
    if table.n == 0 {
        return Err(field_error(path, "n", "must be positive"));
    }
    check_table(path, "mult", &table.mult, table.n, table.n, table.n)?;
    check_names(path, &table.names, table.n)?;
    for (field, value) in [("zero", table.zero), ("identity", table.identity)] {
        if let Some(v) = value.filter(|&v| v >= table.n) {
            return Err(field_error(path, field, format!("{v} is out of range (n = {})", table.n)));
        }
    }
    Ok(())
}

pub fn load_table(path: &Path) -> Result<CayleyTable, LoadError> {
    let table: CayleyTable = parse(path, &read(path)?)?;
    check_cayley(path, &table)?;
    Ok(table)
}

/// Resolves a semigroup reference from a file at `base`.
pub fn resolve(base: &Path, field: &str, r: &SemigroupRef) -> Result<CayleyTable, LoadError> {
    match r {
        SemigroupRef::Inline(table) => {
            check_cayley(base, table).map_err(|e| match e {
                LoadError::Field { path, field: inner, message } => {
                    LoadError::Field { path, field: format!("{field}.{inner}"), message }
                }
                other => other,
            })?;
            Ok(table.clone())
        }
        SemigroupRef::Path(p) => {
            if let Some(name) = p.strip_prefix("catalog:") {
                return catalog::by_name(name).map_err(|e| field_error(base, field, e.to_string()));
            }
            let dir = base.parent().unwrap_or(Path::new("."));
            load_table(&dir.join(p))
        }
    }
}

/// An action file with its semigroup resolved.
pub fn load_action(path: &Path) -> Result<(CayleyTable, ActionTables), LoadError> {
    let file: ActionFile = parse(path, &read(path)?)?;
    let s = resolve(path, "semigroup", &file.semigroup)?;
    let t = &file.tables;
    check_table(path, "act", &t.act, s.n, t.x_size, t.x_size)?;
    check_vector(path, "support", &t.support, t.x_size, s.n)?;
    check_names(path, &t.names, t.x_size)?;
    Ok((s, file.tables))
}

/// A bimodule file with both semigroups resolved.
pub fn load_bimodule(path: &Path) -> Result<(CayleyTable, CayleyTable, BiactionTables), LoadError> {
    let file: BimoduleFile = parse(path, &read(path)?)?;
    let s = resolve(path, "s", &file.s)?;
    let t = resolve(path, "t", &file.t)?;
    let b = &file.tables;
    let xs = b.x_size;
    check_table(path, "lact", &b.lact, s.n, xs, xs)?;
    check_table(path, "ract", &b.ract, xs, t.n, xs)?;
    check_table(path, "inner_s", &b.inner_s, xs, xs, s.n)?;
    check_table(path, "inner_t", &b.inner_t, xs, xs, t.n)?;
    check_names(path, &b.names, xs)?;
    Ok((s, t, file.tables))
}

/// A sheaf file; the action table is checked once the carrier size is known.
pub fn load_sheaf(path: &Path) -> Result<(CayleyTable, SheafTables), LoadError> {
    let file: SheafFile = parse(path, &read(path)?)?;
    let s = resolve(path, "semigroup", &file.semigroup)?;
    let t = &file.tables;
    if t.leq.len() != t.x_size || t.leq.iter().any(|r| r.len() != t.x_size) {
        return Err(field_error(path, "leq", format!("expected a {0}×{0} table", t.x_size)));
    }
    check_names(path, &t.names, t.x_size)?;
    Ok((s, file.tables))
}

/// Checks the action rows of a sheaf file against the quantale size.
pub fn check_sheaf_action(path: &Path, tables: &SheafTables, q_size: usize) -> Result<(), LoadError> {
    check_table(path, "act", &tables.act, q_size, tables.x_size, tables.x_size)?;
    if let Some(support) = &tables.support {
        check_vector(path, "support", support, tables.x_size, q_size)?;
    }
    Ok(())
}

pub fn load_presentation(path: &Path) -> Result<PresentationFile, LoadError> {
    let file: PresentationFile = parse(path, &read(path)?)?;
    for (i, (a, b)) in file.relations.iter().enumerate() {
        if let Some(&g) = a.iter().chain(b).find(|&&g| g >= file.generators) {
            return Err(field_error(path, format!("relations[{i}]"), format!("generator {g} is out of range")));
        }
    }
    Ok(file)
}

/// Writes a value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LoadError> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    std::fs::write(path, text + "\n").map_err(|e| LoadError::Io { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn here() -> &'static Path {
        Path::new("input.json")
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse::<CayleyTable>(here(), "{\n  \"n\": 2,\n  \"mult\": [[0, 1], [1 0]]\n}").unwrap_err();
        assert!(matches!(err, LoadError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn field_errors_name_the_entry() {
        let table: CayleyTable = parse(here(), r#"{"n": 2, "mult": [[0, 1], [1, 2]]}"#).unwrap();
        let err = check_cayley(here(), &table).unwrap_err().to_string();
        assert!(err.contains("mult[1][1]"), "{err}");
        let table: CayleyTable = parse(here(), r#"{"n": 2, "mult": [[0, 1]]}"#).unwrap();
        assert!(check_cayley(here(), &table).unwrap_err().to_string().contains("expected 2 rows"));
    }

    #[test]
    fn bimodule_file_with_catalog_references() {
        let dir = std::env::temp_dir().join(format!("morita-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("b.json");
        let file = BimoduleFile {
            s: SemigroupRef::Path("catalog:I1".to_string()),
            t: SemigroupRef::Path("catalog:I2".to_string()),
            tables: catalog::atlas_tables(1, 2).unwrap(),
        };
        write_json(&path, &file).unwrap();
        let (s, t, tables) = load_bimodule(&path).unwrap();
        assert_eq!((s.n, t.n, tables.x_size), (2, 7, 3));
        let mut broken = file.clone();
        broken.tables.inner_t[2][1] = 7;
        write_json(&path, &broken).unwrap();
        let err = load_bimodule(&path).unwrap_err().to_string();
        assert!(err.contains("inner_t[2][1]"), "{err}");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
