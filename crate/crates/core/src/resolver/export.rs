use std::io::Write;

use super::EndpointObservation;
use crate::error::Result;

pub const OBSERVATION_COLUMNS: [&str; 11] = [
    "pmid",
    "sentence_id",
    "endpoint",
    "measure",
    "value",
    "unit",
    "ci_low",
    "ci_high",
    "time_point_value",
    "time_point_unit",
    "construction",
];

/// Writes a header line and one tab-separated row per observation. Missing
/// fields are empty.
pub fn write_observations<W: Write>(observations: &[EndpointObservation], mut out: W) -> Result<()> {
    writeln!(out, "{}", OBSERVATION_COLUMNS.join("\t"))?;
    let opt = |d: Option<crate::lexical::Decimal>| d.map(|d| d.to_string()).unwrap_or_default();
    for o in observations {
        let row = [
            o.provenance.pmid.clone(),
            o.provenance.sentence_id.clone(),
            o.base.to_string(),
            o.measure.to_string(),
            o.value.to_string(),
            o.unit.to_string(),
            opt(o.ci_low),
            opt(o.ci_high),
            opt(o.time_point.map(|t| t.value)),
            o.time_point.map(|t| t.unit.to_string()).unwrap_or_default(),
            o.construction.as_str().to_string(),
        ];
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}
