use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::algebra::AlgElem;
use crate::aluthge::orbit_profile;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Columns of the orbit CSV.
pub const ORBIT_CSV_HEADER: &str = "step,quasinormal_residual,distance_to_previous";

#[derive(Deserialize)]
#[serde(untagged)]
enum ElementInput {
    Element(AlgElem),
    Matrix(CMatrix),
}

/// Reads either an algebra element `{"block_dims", "blocks"}` or a single square
/// matrix `{"rows", "cols", "re", "im"}`, the latter as an element of a one-block algebra.
pub fn parse_element(text: &str) -> Result<AlgElem> {
    let input: ElementInput =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("cannot parse element: {e}")))?;
    match input {
        ElementInput::Element(a) => Ok(a),
        ElementInput::Matrix(m) => AlgElem::from_matrix(m),
    }
}

pub fn read_element(path: &Path) -> Result<AlgElem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_element(&text)
}

pub fn write_element(a: &AlgElem) -> String {
    serde_json::to_string_pretty(a).expect("element is serializable")
}

/// One row per orbit entry; step 0 is the input and its distance column is 0.
pub fn orbit_csv(orbit: &[AlgElem]) -> String {
    let mut out = String::from(ORBIT_CSV_HEADER);
    out.push('\n');
    for (step, (qn, dist)) in orbit_profile(orbit).into_iter().enumerate() {
        writeln!(out, "{step},{qn:e},{dist:e}").expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::{aluthge_orbit, Lambda};
    use crate::linalg::TolerancePolicy;

    #[test]
    fn accepts_both_input_forms() {
        let m = r#"{"rows":2,"cols":2,"re":[0.0,1.0,0.0,0.0],"im":[0.0,0.0,0.0,0.0]}"#;
        let a = parse_element(m).unwrap();
        assert_eq!(a.algebra().block_dims(), &[2]);
        let back = parse_element(&write_element(&a)).unwrap();
        assert_eq!(back, a);
        assert!(parse_element("{").is_err());
        assert!(parse_element(r#"{"rows":2,"cols":3,"re":[0,0,0,0,0,0],"im":[0,0,0,0,0,0]}"#).is_err());
    }

    #[test]
    fn nilpotent_orbit_vanishes_after_one_step() {
        let a = parse_element(r#"{"rows":2,"cols":2,"re":[0.0,1.0,0.0,0.0],"im":[0.0,0.0,0.0,0.0]}"#).unwrap();
        let orbit = aluthge_orbit(&a, Lambda::HALF, 3, &TolerancePolicy::default()).unwrap();
        let csv = orbit_csv(&orbit);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], ORBIT_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(orbit[1].is_zero(&TolerancePolicy::default()));
        assert_eq!(lines[3], "2,0e0,0e0");
    }
}
