//! Versioned JSON documents with round-trip exact floating-point output.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::bandlimited::BandlimitedFunction;
use crate::error::{Error, Result};
use crate::params::SlepianParams;
use crate::pswf::ProlateBasis;

pub const SCHEMA_VERSION: u32 = 1;

/// Writes every `f64` with 17 significant digits (`{:.16e}`), which is enough
/// to recover the exact bit pattern on parsing.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Same formatting for free-standing numbers (CSV cells and the like).
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloatFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Serialization(e.to_string()))
}

fn check_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct BasisDocument {
    schema_version: u32,
    c: f64,
    #[serde(rename = "T")]
    t: f64,
    n_max: usize,
    quad_order: usize,
    lambdas: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FunctionDocument {
    schema_version: u32,
    c: f64,
    #[serde(rename = "T")]
    t: f64,
    coeffs: Vec<f64>,
}

pub fn basis_to_json(basis: &ProlateBasis) -> Result<String> {
    let p = basis.params();
    to_json_string(&BasisDocument {
        schema_version: SCHEMA_VERSION,
        c: p.c(),
        t: p.t(),
        n_max: basis.n_max(),
        quad_order: basis.quad_order(),
        lambdas: basis.lambdas().to_vec(),
        nodes: basis.nodes().to_vec(),
        weights: basis.weights().to_vec(),
        samples: (0..basis.len()).map(|n| basis.samples(n).to_vec()).collect(),
    })
}

pub fn basis_from_json(text: &str) -> Result<ProlateBasis> {
    let doc: BasisDocument =
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    check_version(doc.schema_version)?;
    ProlateBasis::from_parts(
        SlepianParams::new(doc.c, doc.t)?,
        doc.n_max,
        doc.quad_order,
        doc.nodes,
        doc.weights,
        doc.lambdas,
        doc.samples,
    )
}

pub fn function_to_json(f: &BandlimitedFunction) -> Result<String> {
    let p = f.params();
    to_json_string(&FunctionDocument {
        schema_version: SCHEMA_VERSION,
        c: p.c(),
        t: p.t(),
        coeffs: f.coeffs().to_vec(),
    })
}

pub fn function_from_json(text: &str) -> Result<BandlimitedFunction> {
    let doc: FunctionDocument =
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    check_version(doc.schema_version)?;
    BandlimitedFunction::new(SlepianParams::new(doc.c, doc.t)?, doc.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_bit_exactly() {
        let xs = vec![0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0];
        let text = to_json_string(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(xs, back);
    }

    #[test]
    fn basis_round_trip() {
        let b = ProlateBasis::new(SlepianParams::new(3.0, 2.0).unwrap(), 5).unwrap();
        let text = basis_to_json(&b).unwrap();
        let back = basis_from_json(&text).unwrap();
        assert_eq!(b, back);
        assert_eq!(text, basis_to_json(&back).unwrap());
    }

    #[test]
    fn function_round_trip_and_version_check() {
        let f = BandlimitedFunction::new(SlepianParams::new(4.0, 1.0).unwrap(), vec![0.5, -0.25, 1e-9])
            .unwrap();
        let text = function_to_json(&f).unwrap();
        assert!(text.contains("\"T\""));
        assert_eq!(function_from_json(&text).unwrap(), f);
        let bumped = text.replace("\"schema_version\":1", "\"schema_version\":2");
        assert!(matches!(
            function_from_json(&bumped),
            Err(Error::SchemaVersion { found: 2, .. })
        ));
    }
}
