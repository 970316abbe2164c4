use std::collections::BTreeSet;
use std::path::Path;

use lyubeznik::combinatorics::{complex_of_ideal, stanley_reisner_ideal, SimplicialComplex, SquareFreeIdeal, MAX_VARS};
use serde::Deserialize;

use crate::Failure;

/// One input file, as either of the two accepted schemas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Ideal(SquareFreeIdeal),
    Complex(SimplicialComplex),
}

impl Input {
    pub fn ideal(&self) -> SquareFreeIdeal {
        match self {
            Input::Ideal(i) => i.clone(),
            Input::Complex(c) => stanley_reisner_ideal(c),
        }
    }

    /// The complex of the input; `None` for the unit ideal, which has none.
    pub fn complex(&self) -> Option<SimplicialComplex> {
        match self {
            Input::Ideal(i) => complex_of_ideal(i).ok().filter(|c| !c.is_void()),
            Input::Complex(c) => Some(c.clone()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    n: u64,
    generators: Option<Vec<Vec<u64>>>,
    facets: Option<Vec<Vec<u64>>>,
}

pub fn read_input(path: &Path) -> Result<Input, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text).map_err(|f| f.context(&path.display().to_string()))
}

pub fn parse_input(text: &str) -> Result<Input, Failure> {
    let raw: RawInput = serde_json::from_str(text).map_err(|e| Failure::parse(e.to_string()))?;
    let (lists, kind) = match (raw.generators, raw.facets) {
        (Some(g), None) => (g, "generators"),
        (None, Some(f)) => (f, "facets"),
        (Some(_), Some(_)) => return Err(Failure::parse("give either `generators` or `facets`, not both")),
        (None, None) => return Err(Failure::parse("missing `generators` or `facets`")),
    };
    if raw.n > MAX_VARS as u64 {
        return Err(Failure::semantic(format!("n = {} exceeds the maximum of {MAX_VARS}", raw.n)));
    }
    let n = raw.n as usize;
    let mut sets = Vec::with_capacity(lists.len());
    for list in &lists {
        let mut seen = BTreeSet::new();
        for &v in list {
            if v == 0 || v > raw.n {
                return Err(Failure::semantic(format!("index {v} in {kind} is out of range 1..={n}")));
            }
            if !seen.insert(v) {
                return Err(Failure::semantic(format!("index {v} repeats within one of the {kind}")));
            }
        }
        sets.push(seen.into_iter().map(|v| v as usize).collect::<Vec<_>>());
    }
    let input = if kind == "generators" {
        let ideal = SquareFreeIdeal::from_one_based(n, &sets).map_err(Failure::from_core)?;
        if ideal.num_generators() < lists.len() {
            warn(&format!(
                "{} generators reduced to {} minimal ones",
                lists.len(),
                ideal.num_generators()
            ));
        }
        Input::Ideal(ideal)
    } else {
        let cx = SimplicialComplex::from_one_based(n, &sets).map_err(Failure::from_core)?;
        if cx.facets().len() < lists.len() {
            warn(&format!("{} facets reduced to {} maximal ones", lists.len(), cx.facets().len()));
        }
        Input::Complex(cx)
    };
    Ok(input)
}

pub fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_schemas() {
        let i = parse_input(r#"{"n":2,"generators":[[1,2]]}"#).unwrap();
        assert_eq!(i.ideal(), SquareFreeIdeal::from_one_based(2, &[vec![1, 2]]).unwrap());
        let c = parse_input(r#"{"n":5,"facets":[[1,2],[1,5],[3,4,5]]}"#).unwrap();
        let expected = SquareFreeIdeal::from_one_based(
            5,
            &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![2, 5]],
        )
        .unwrap();
        assert_eq!(c.ideal(), expected);
    }

    #[test]
    fn minimization() {
        let i = parse_input(r#"{"n":2,"generators":[[1],[1,2]]}"#).unwrap();
        assert_eq!(i.ideal().num_generators(), 1);
    }

    #[test]
    fn error_classes() {
        assert_eq!(parse_input("{").unwrap_err().code, 2);
        assert_eq!(parse_input(r#"{"n":2}"#).unwrap_err().code, 2);
        assert_eq!(parse_input(r#"{"n":2,"generators":[[1]],"facets":[]}"#).unwrap_err().code, 2);
        assert_eq!(parse_input(r#"{"n":2,"generators":[[3]]}"#).unwrap_err().code, 3);
        assert_eq!(parse_input(r#"{"n":2,"generators":[[0]]}"#).unwrap_err().code, 3);
        assert_eq!(parse_input(r#"{"n":2,"generators":[[1,1]]}"#).unwrap_err().code, 3);
        assert_eq!(parse_input(r#"{"n":25,"generators":[]}"#).unwrap_err().code, 3);
        assert_eq!(parse_input(r#"{"n":-1,"generators":[]}"#).unwrap_err().code, 2);
    }
}
