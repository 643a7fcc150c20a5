//! Regenerates `tests/data/sharpening_witness.json`:
//!
//! ```text
//! cargo run -p andovar --example sharpening_witness
//! ```
//!
//! `T1 = T2 = [[0, 0.5], [0, 0]]` and `p = z1 - z2`. The variety of the pair
//! is the diagonal, where `p` vanishes, while `sup |p|` over the torus is 2.

use andovar::io::PairFile;
use andovar::variety::Variety;
use andovar::vn::{vn_report_with, BivariatePolynomial, VnOptions};
use andovar::{ComplexMatrix, ContractionPair};
use serde_json::json;

fn main() {
    let j = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
    let pair = ContractionPair::with_defaults(j.clone(), j.clone()).expect("valid pair");
    let poly = BivariatePolynomial::from_real(&[&[0.0, -1.0], &[1.0]]);
    let variety = Variety::for_pair(&pair).expect("variety");
    let report = vn_report_with(&pair, &variety, &poly, &VnOptions::default()).expect("report");
    let doc = json!({
        "pair": PairFile::new(j.clone(), j),
        "polynomial": poly,
        "lhs": report.lhs,
        "sup_variety": report.sup_variety,
        "sup_bidisc": report.sup_bidisc,
        "slack": report.slack,
        "ratio": report.sup_variety / report.sup_bidisc,
        "generator": "cargo run -p andovar --example sharpening_witness",
    });
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/sharpening_witness.json");
    std::fs::write(path, serde_json::to_string_pretty(&doc).expect("json") + "\n").expect("write witness");
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
}
