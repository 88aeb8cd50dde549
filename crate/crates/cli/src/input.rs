//! Argument and file parsing.

use std::fs;
use std::io::Read;

use adjacency_core::matrix::MatrixDoc;
use adjacency_core::{Field, FieldDescriptor, Matrix};
use serde::de::DeserializeOwned;

use crate::CliError;

/// `p,k` or `p,k,c0,c1,...,ck` with the modulus listed low-degree-first.
pub fn parse_field(s: &str) -> Result<Field, CliError> {
    let parts = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--field {s:?}: {e}")))?;
    let desc = match parts[..] {
        [p, k] => FieldDescriptor::with_default_modulus(p, k)?,
        [p, k, ref modulus @ ..] => FieldDescriptor {
            p,
            k,
            modulus: modulus.to_vec(),
        },
        _ => {
            return Err(CliError::Usage(format!(
                "--field {s:?}: expected p,k[,modulus coefficients]"
            )))
        }
    };
    Ok(Field::new(desc)?)
}

/// `m,n`.
pub fn parse_shape(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("shape {s:?}: expected m,n with m, n >= 1"));
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if m == 0 || n == 0 {
        return Err(bad());
    }
    Ok((m, n))
}

/// Contents of a file, or of standard input for `-`.
pub fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {path}: {e}")))
    }
}

/// Parses a JSON document, reporting the line and column of any error.
pub fn parse_json<T: DeserializeOwned>(what: &str, text: &str) -> Result<T, CliError> {
    // serde_json's message already ends with "at line L column C"
    serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("{what}: {e}")))
}

/// A matrix given inline as `[[1,0],[0,1]]`, inline as a matrix document,
/// or as a path to a file holding either form.
pub fn parse_matrix(field: &Field, arg: &str) -> Result<Matrix, CliError> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        read_source(arg)?
    };
    if text.trim_start().starts_with('{') {
        let doc: MatrixDoc = parse_json("matrix", &text)?;
        return Ok(Matrix::from_doc(field, &doc)?);
    }
    let rows: Vec<Vec<u32>> = parse_json("matrix", &text)?;
    if rows.is_empty() || rows[0].is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Malformed(format!(
            "matrix {arg:?}: rows must be nonempty and of equal length"
        )));
    }
    Ok(Matrix::from_rows(field, &rows)?)
}
