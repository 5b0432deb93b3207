//! Problem files: JSON with a `kind` tag and the payload for that kind.

use std::path::Path;

use ipset_core::cohort::{CohortProblem, CohortSpec};
use ipset_core::model::StepPayoff;
use ipset_core::persuasion::ReceiverGame;
use ipset_core::{GridOptions, InformationStructure, PayoffSpec, Prior};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Default normalization tolerance for probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Sums closer to one than this are used as given.
const SILENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tabulated,
    Linear,
    Persuasion,
    Cohort,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Tabulated => "tabulated",
            Kind::Linear => "linear",
            Kind::Persuasion => "persuasion",
            Kind::Cohort => "cohort",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lattice: Option<usize>,
    pub edge: Option<usize>,
}

impl GridSpec {
    /// Fills unset fields from the payoff defaults.
    pub fn resolve(&self, w: &PayoffSpec) -> GridOptions {
        let d = GridOptions::for_payoff(w);
        GridOptions {
            lattice: self.lattice.unwrap_or(d.lattice).max(1),
            edge: self.edge.unwrap_or(d.edge),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoisy {
    prior: Vec<f64>,
    sigmas: Vec<f64>,
    payoff: StepPayoff,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: Kind,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    prior: Option<Vec<f64>>,
    #[serde(default)]
    payoff: Option<StepPayoff>,
    #[serde(default)]
    rho: Option<Vec<f64>>,
    #[serde(default)]
    game: Option<ReceiverGame>,
    #[serde(default)]
    cohort: Option<CohortSpec>,
    #[serde(default)]
    noisy_type: Option<RawNoisy>,
    #[serde(default)]
    grid: GridSpec,
    #[serde(default)]
    directions: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohortMember {
    pub label: String,
    pub problem: CohortProblem,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Tabulated {
        prior: Prior,
        payoff: PayoffSpec,
    },
    Linear {
        prior: Prior,
        rho: Vec<f64>,
    },
    Persuasion {
        prior: Prior,
        game: ReceiverGame,
    },
    /// One problem, or one per precision of a noisy-type family.
    Cohort {
        members: Vec<CohortMember>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: Option<String>,
    pub problem: Problem,
    pub grid: GridSpec,
    pub directions: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: f64,
    /// Renormalization notices.
    pub warnings: Vec<String>,
}

impl ProblemSpec {
    pub fn kind(&self) -> Kind {
        match self.problem {
            Problem::Tabulated { .. } => Kind::Tabulated,
            Problem::Linear { .. } => Kind::Linear,
            Problem::Persuasion { .. } => Kind::Persuasion,
            Problem::Cohort { .. } => Kind::Cohort,
        }
    }

    /// Prior and payoff for the single-problem kinds.
    pub fn payoff(&self) -> Option<(Prior, PayoffSpec)> {
        match &self.problem {
            Problem::Tabulated { prior, payoff } => Some((prior.clone(), payoff.clone())),
            Problem::Linear { prior, rho } => Some((prior.clone(), PayoffSpec::LinearReputation(rho.clone()))),
            Problem::Persuasion { prior, game } => Some((prior.clone(), PayoffSpec::PersuasionDerived(game.clone()))),
            Problem::Cohort { .. } => None,
        }
    }
}

pub fn parse_problem(path: &Path, tol_override: Option<f64>) -> CliResult<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text, tol_override)
}

pub fn parse_problem_str(text: &str, tol_override: Option<f64>) -> CliResult<ProblemSpec> {
    let raw: RawSpec = from_json(text)?;
    let tolerance = tol_override.or(raw.tolerance).unwrap_or(NORMALIZATION_TOL);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(CliError::schema("tolerance", "must be a positive number"));
    }
    let mut warnings = Vec::new();
    let mut norm = Normalizer {
        tol: tolerance,
        warnings: &mut warnings,
    };

    let unexpected = |field: &str, present: bool| -> CliResult<()> {
        if present {
            Err(CliError::schema(
                field,
                format!("not used by kind `{}`", raw.kind.as_str()),
            ))
        } else {
            Ok(())
        }
    };
    let problem = match raw.kind {
        Kind::Tabulated => {
            unexpected("rho", raw.rho.is_some())?;
            unexpected("game", raw.game.is_some())?;
            unexpected("cohort", raw.cohort.is_some() || raw.noisy_type.is_some())?;
            let prior = norm.prior("prior", required("prior", raw.prior)?)?;
            let payoff = required("payoff", raw.payoff)?;
            dims("payoff.score", payoff.num_types(), prior.len())?;
            Problem::Tabulated {
                prior,
                payoff: PayoffSpec::Tabulated(payoff),
            }
        }
        Kind::Linear => {
            unexpected("payoff", raw.payoff.is_some())?;
            unexpected("game", raw.game.is_some())?;
            unexpected("cohort", raw.cohort.is_some() || raw.noisy_type.is_some())?;
            let prior = norm.prior("prior", required("prior", raw.prior)?)?;
            let rho = required("rho", raw.rho)?;
            dims("rho", rho.len(), prior.len())?;
            if let Some(i) = rho.iter().position(|r| !r.is_finite()) {
                return Err(CliError::schema(format!("rho[{i}]"), "not a finite number"));
            }
            Problem::Linear { prior, rho }
        }
        Kind::Persuasion => {
            unexpected("payoff", raw.payoff.is_some())?;
            unexpected("rho", raw.rho.is_some())?;
            unexpected("cohort", raw.cohort.is_some() || raw.noisy_type.is_some())?;
            let prior = norm.prior("prior", required("prior", raw.prior)?)?;
            let game = required("game", raw.game)?;
            dims("game.u", game.num_types(), prior.len())?;
            Problem::Persuasion { prior, game }
        }
        Kind::Cohort => {
            unexpected("prior", raw.prior.is_some())?;
            unexpected("payoff", raw.payoff.is_some())?;
            unexpected("rho", raw.rho.is_some())?;
            unexpected("game", raw.game.is_some())?;
            let members = match (raw.cohort, raw.noisy_type) {
                (Some(spec), None) => vec![norm.cohort(spec)?],
                (None, Some(family)) => norm.noisy(family)?,
                (Some(_), Some(_)) => {
                    return Err(CliError::schema(
                        "cohort",
                        "give either `cohort` or `noisy_type`, not both",
                    ))
                }
                (None, None) => return Err(CliError::schema("cohort", "missing: give `cohort` or `noisy_type`")),
            };
            Problem::Cohort { members }
        }
    };
    if raw.directions == Some(0) {
        return Err(CliError::schema("directions", "must be positive"));
    }
    Ok(ProblemSpec {
        name: raw.name,
        problem,
        grid: raw.grid,
        directions: raw.directions,
        seed: raw.seed,
        tolerance,
        warnings,
    })
}

/// Rows of a likelihood matrix given on the command line as JSON.
pub fn parse_structure(text: &str, tol: f64, warnings: &mut Vec<String>) -> CliResult<InformationStructure> {
    let rows: Vec<Vec<f64>> = from_json(text)?;
    let mut norm = Normalizer { tol, warnings };
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, row)| norm.vector(&format!("pi[{i}]"), row))
        .collect::<CliResult<Vec<_>>>()?;
    InformationStructure::new(rows).map_err(|e| CliError::schema("pi", e.to_string()))
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Syntax | serde_json::error::Category::Eof => CliError::Parse {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            },
            _ => CliError::schema(path, inner.to_string()),
        }
    })?;
    Ok(value)
}

fn required<T>(field: &str, v: Option<T>) -> CliResult<T> {
    v.ok_or_else(|| CliError::schema(field, "missing"))
}

fn dims(field: &str, got: usize, expected: usize) -> CliResult<()> {
    if got == expected {
        Ok(())
    } else {
        Err(CliError::schema(
            field,
            format!("has {got} types, prior has {expected}"),
        ))
    }
}

struct Normalizer<'a> {
    tol: f64,
    warnings: &'a mut Vec<String>,
}

impl Normalizer<'_> {
    fn check_entries<'v>(&self, path: &str, entries: impl Iterator<Item = (String, &'v f64)>) -> CliResult<f64> {
        let mut sum = 0.0;
        for (at, &x) in entries {
            if !x.is_finite() {
                return Err(CliError::schema(format!("{path}{at}"), "not a finite number"));
            }
            if x < 0.0 {
                return Err(CliError::schema(
                    format!("{path}{at}"),
                    format!("negative probability {x}"),
                ));
            }
            sum += x;
        }
        if (sum - 1.0).abs() > self.tol {
            return Err(CliError::Normalization {
                path: path.to_string(),
                sum,
                tol: self.tol,
            });
        }
        Ok(sum)
    }

    fn rescale(&mut self, path: &str, sum: f64) -> bool {
        if (sum - 1.0).abs() > SILENT_TOL {
            self.warnings.push(format!("renormalized `{path}` (sum was {sum})"));
            true
        } else {
            false
        }
    }

    fn vector(&mut self, path: &str, mut v: Vec<f64>) -> CliResult<Vec<f64>> {
        let sum = self.check_entries(path, v.iter().enumerate().map(|(i, x)| (format!("[{i}]"), x)))?;
        if self.rescale(path, sum) {
            v.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(v)
    }

    fn prior(&mut self, path: &str, v: Vec<f64>) -> CliResult<Prior> {
        if v.is_empty() {
            return Err(CliError::schema(path, "needs at least one type"));
        }
        let v = self.vector(path, v)?;
        if let Some(i) = v.iter().position(|&p| p <= 0.0) {
            return Err(CliError::schema(format!("{path}[{i}]"), "prior must have full support"));
        }
        Prior::new(v).map_err(|e| CliError::schema(path, e.to_string()))
    }

    fn cohort(&mut self, mut spec: CohortSpec) -> CliResult<CohortMember> {
        let entries = spec.joint.iter().enumerate().flat_map(|(c, slab)| {
            slab.iter().enumerate().flat_map(move |(o, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(d, x)| (format!("[{c}][{o}][{d}]"), x))
            })
        });
        let sum = self.check_entries("cohort.joint", entries)?;
        if self.rescale("cohort.joint", sum) {
            spec.joint.iter_mut().flatten().flatten().for_each(|x| *x /= sum);
        }
        let problem = CohortProblem::new(spec).map_err(|e| CliError::schema("cohort", e.to_string()))?;
        Ok(CohortMember {
            label: "cohort".into(),
            problem,
        })
    }

    fn noisy(&mut self, family: RawNoisy) -> CliResult<Vec<CohortMember>> {
        let prior = self.prior("noisy_type.prior", family.prior)?;
        dims("noisy_type.payoff.score", family.payoff.num_types(), prior.len())?;
        if family.sigmas.is_empty() {
            return Err(CliError::schema("noisy_type.sigmas", "needs at least one precision"));
        }
        let payoff = PayoffSpec::Tabulated(family.payoff);
        family
            .sigmas
            .iter()
            .enumerate()
            .map(|(i, &sigma)| {
                let path = format!("noisy_type.sigmas[{i}]");
                if !(0.0..=1.0).contains(&sigma) {
                    return Err(CliError::schema(path, format!("precision {sigma} is outside [0, 1]")));
                }
                let problem = CohortProblem::noisy_type(&prior, sigma, payoff.clone())
                    .map_err(|e| CliError::schema(path, e.to_string()))?;
                Ok(CohortMember {
                    label: format!("sigma={sigma}"),
                    problem,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = r#"{
        "kind": "tabulated",
        "prior": [0.5, 0.5],
        "payoff": {"score": [0, 1], "cuts": [0.3333333333333333, 0.6666666666666666],
                   "values": [[0, 0], [0.5, 0.5], [1, 1]]}
    }"#;

    #[test]
    fn parses_tabulated() {
        let spec = parse_problem_str(EXAMPLE1, None).unwrap();
        assert_eq!(spec.kind(), Kind::Tabulated);
        assert!(spec.warnings.is_empty());
    }

    #[test]
    fn negative_prior_names_the_field() {
        let text = EXAMPLE1.replace("[0.5, 0.5]", "[1.5, -0.5]");
        match parse_problem_str(&text, None) {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "prior[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_drift_is_renormalized() {
        let text = EXAMPLE1.replace("[0.5, 0.5]", "[0.5, 0.4999999]");
        let spec = parse_problem_str(&text, None).unwrap();
        assert_eq!(spec.warnings.len(), 1);
        let (prior, _) = spec.payoff().unwrap();
        assert!((prior.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn large_drift_is_rejected() {
        let text = EXAMPLE1.replace("[0.5, 0.5]", "[0.5, 0.45]");
        assert!(matches!(
            parse_problem_str(&text, None),
            Err(CliError::Normalization { .. })
        ));
        // A looser tolerance accepts it.
        assert!(parse_problem_str(&text, Some(0.1)).is_ok());
    }

    #[test]
    fn bad_payoff_reports_path() {
        let text = EXAMPLE1.replace("[0.3333333333333333, 0.6666666666666666]", "[0.6, 0.3]");
        match parse_problem_str(&text, None) {
            Err(CliError::Schema { path, message }) => {
                assert_eq!(path, "payoff");
                assert!(message.contains("increasing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        assert!(matches!(
            parse_problem_str("{\"kind\": ", None),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = EXAMPLE1.replace("\"kind\"", "\"colour\": 1, \"kind\"");
        assert!(matches!(parse_problem_str(&text, None), Err(CliError::Schema { .. })));
    }

    #[test]
    fn structure_rows_are_checked() {
        let mut w = Vec::new();
        assert!(parse_structure("[[0.2, 0.8], [0.5, 0.5]]", 1e-6, &mut w).is_ok());
        assert!(matches!(
            parse_structure("[[0.2, 0.9]]", 1e-6, &mut w),
            Err(CliError::Normalization { .. })
        ));
    }
}
