//! JSON file formats.
//!
//! Pair: `{"n": 2, "T1": [[[re, im], ...], ...], "T2": ...}`.
//! Polynomial: `{"coeffs": [[[re, im], ...], ...]}` with `coeffs[j][k]` the
//! coefficient of `z1^j z2^k`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::vn::BivariatePolynomial;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairFile {
    pub n: usize,
    #[serde(rename = "T1")]
    pub t1: ComplexMatrix,
    #[serde(rename = "T2")]
    pub t2: ComplexMatrix,
}

impl PairFile {
    pub fn new(t1: ComplexMatrix, t2: ComplexMatrix) -> Self {
        Self { n: t1.rows(), t1, t2 }
    }

    fn check(self) -> Result<Self> {
        for (name, m) in [("T1", &self.t1), ("T2", &self.t2)] {
            if m.shape() != (self.n, self.n) {
                return Err(Error::Input(format!(
                    "{name} is {}x{} but n = {}",
                    m.rows(),
                    m.cols(),
                    self.n
                )));
            }
        }
        Ok(self)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_pair(text: &str) -> Result<PairFile> {
    let f: PairFile = serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid pair file: {e}")))?;
    f.check()
}

pub fn read_pair(path: &Path) -> Result<PairFile> {
    parse_pair(&read(path)?)
}

pub fn pair_to_json(t1: &ComplexMatrix, t2: &ComplexMatrix) -> String {
    let f = PairFile::new(t1.clone(), t2.clone());
    serde_json::to_string_pretty(&f).expect("serializable pair")
}

pub fn parse_polynomial(text: &str) -> Result<BivariatePolynomial> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid polynomial file: {e}")))
}

pub fn read_polynomial(path: &Path) -> Result<BivariatePolynomial> {
    parse_polynomial(&read(path)?)
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            if !contents.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_round_trip() {
        let t1 = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
        let t2 = ComplexMatrix::identity(2);
        let text = pair_to_json(&t1, &t2);
        let back = parse_pair(&text).unwrap();
        assert_eq!(back.n, 2);
        assert_eq!(back.t1, t1);
        assert_eq!(back.t2, t2);
    }

    #[test]
    fn pair_errors() {
        assert!(matches!(parse_pair("{"), Err(Error::Input(_))));
        let bad = r#"{"n": 2, "T1": [[[0,0]]], "T2": [[[0,0]]]}"#;
        assert!(matches!(parse_pair(bad), Err(Error::Input(_))));
        let ragged = r#"{"n": 2, "T1": [[[0,0],[0,0]],[[0,0]]], "T2": [[[0,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(parse_pair(ragged).is_err());
    }

    #[test]
    fn polynomial_parse() {
        let p = parse_polynomial(r#"{"coeffs": [[[1,0]], [[0,2]]]}"#).unwrap();
        assert_eq!(p.deg1(), 1);
        assert!(parse_polynomial(r#"{"coeffs": 3}"#).is_err());
    }
}
