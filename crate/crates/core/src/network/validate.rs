use num_traits::{One, Zero};
use serde::Serialize;

use super::model::NetworkModel;
use crate::ratfun::{RationalFunction, TransferMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Pass/fail per well-posedness clause of a network model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub clauses: Vec<ClauseResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.clauses.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    fn push(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.clauses.push(ClauseResult { name: name.into(), passed, detail });
    }
}

fn failing_entries(m: &TransferMatrix, ok: impl Fn(&RationalFunction) -> bool) -> Vec<(usize, usize)> {
    m.support().into_iter().filter(|&(i, j)| !ok(m.get(i, j))).collect()
}

fn describe(entries: &[(usize, usize)], what: &str) -> Option<String> {
    if entries.is_empty() {
        return None;
    }
    let list: Vec<String> = entries.iter().map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
    Some(format!("{what}: {}", list.join(" ")))
}

/// Evaluates every clause; failures are reported, never raised.
pub fn validate_model(m: &NetworkModel) -> ValidationReport {
    let mut report = ValidationReport { clauses: Vec::new() };
    let l = m.node_count();

    let loops: Vec<String> = (0..l).filter(|&i| !m.g().get(i, i).is_zero()).map(|i| m.node_label(i).to_string()).collect();
    report.push(
        "hollow",
        loops.is_empty(),
        (!loops.is_empty()).then(|| format!("self-loops at {}", loops.join(", "))),
    );

    let inverse = m.g().identity_minus().and_then(|a| a.inverse());
    match &inverse {
        Ok(_) => report.push("well_posed", true, None),
        Err(e) => report.push("well_posed", false, Some(e.to_string())),
    }

    match inverse.and_then(|inv| inv.mul(m.r())) {
        Ok(t) => {
            let bad = failing_entries(&t, |f| f.is_proper() && f.is_stable());
            report.push("response_proper_stable", bad.is_empty(), describe(&bad, "improper or unstable entries of T_wr"));
        }
        Err(e) => report.push("response_proper_stable", false, Some(e.to_string())),
    }

    let noise = m.noise();
    if noise.is_monic() {
        let f = noise.f();
        let mut problems = Vec::new();
        let monic = (0..f.rows()).all(|i| {
            (0..f.cols()).all(|j| {
                let at_inf = f.get(i, j).at_infinity();
                match at_inf {
                    Some(v) => if i == j { v.is_one() } else { v.is_zero() },
                    None => false,
                }
            })
        });
        if !monic {
            problems.push("filter is not monic".to_string());
        }
        let bad = failing_entries(f, |e| e.is_proper() && e.is_stable());
        if let Some(d) = describe(&bad, "improper or unstable filter entries") {
            problems.push(d);
        }
        match f.inverse() {
            Ok(inv) => {
                let bad = failing_entries(&inv, |e| e.is_stable());
                if let Some(d) = describe(&bad, "unstable inverse entries") {
                    problems.push(d);
                }
            }
            Err(e) => problems.push(format!("filter not invertible: {e}")),
        }
        report.push("noise_filter", problems.is_empty(), (!problems.is_empty()).then(|| problems.join("; ")));
    } else {
        report.push("noise_filter", true, Some("generalized filter; monic conditions not required".into()));
    }

    report.push("lambda_positive_definite", noise.lambda().is_positive_definite(), None);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn d(c: i64, den: i64) -> RationalFunction {
        RationalFunction::delay(BigRational::new(c.into(), den.into()), 1)
    }

    #[test]
    fn self_loop_fails_hollow() {
        let mut g = TransferMatrix::zeros(2, 2);
        g.set(0, 0, d(1, 2));
        let r = validate_model(&NetworkModel::with_identity_inputs(g).unwrap());
        assert!(!r.clause("hollow").unwrap().passed);
        assert_eq!(r.failed(), vec!["hollow"]);
    }

    #[test]
    fn constant_unit_loop_is_ill_posed() {
        let one = RationalFunction::one();
        let g = TransferMatrix::new(2, 2, vec![RationalFunction::zero(), one.clone(), one, RationalFunction::zero()]).unwrap();
        let r = validate_model(&NetworkModel::with_identity_inputs(g).unwrap());
        assert!(!r.clause("well_posed").unwrap().passed);
        assert!(!r.all_passed());
    }

    #[test]
    fn unstable_loop_fails_response_clause() {
        // loop gain 2q⁻¹·1 places a pole at q = 2
        let g = TransferMatrix::new(2, 2, vec![RationalFunction::zero(), d(2, 1), RationalFunction::one(), RationalFunction::zero()]).unwrap();
        let r = validate_model(&NetworkModel::with_identity_inputs(g).unwrap());
        assert!(r.clause("well_posed").unwrap().passed);
        assert!(!r.clause("response_proper_stable").unwrap().passed);
    }
}
