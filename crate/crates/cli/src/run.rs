//! Command dispatch. Every command returns a [`ResultBundle`] that echoes the
//! parameters it was run with.

use ipset_core::cohort::{cohort_set_with, CohortProblem};
use ipset_core::ipset::{approximate_table, AtomTable, Membership, SupportSolution};
use ipset_core::model::structure_from_tau;
use ipset_core::persuasion::{
    cautious_value, comm_eq_profiles, reduce_to_actions, v_table, ActionReduction, CautiousSolution,
};
use ipset_core::reputation::{
    bipool_optimize_with, cp_check, markov_checks, rs_diagnostics, second_moment, BiPoolOptions, BiPoolSolution,
    CpVerdict, MarkovReport, RsReport, Sense,
};
use ipset_core::{
    posterior_distribution, reduce_support, unconditional_profile, BeliefDistribution, BeliefGrid, Direction,
    Execution, GridOptions, IPProfile, IPSetApprox, InformationStructure, PayoffSpec, Prior,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::{parse_structure, CohortMember, Kind, Problem, ProblemSpec};

pub const DEFAULT_DIRECTIONS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Membership { target: Vec<f64> },
    Boundary { direction: Vec<f64> },
    Set,
    Maxmin,
    Commeq,
    Bipool { target: usize, sense: Sense },
    CohortSet,
    Diagnose { direction: Option<Vec<f64>> },
    Reduce { pi: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Membership { .. } => "membership",
            Command::Boundary { .. } => "boundary",
            Command::Set => "set",
            Command::Maxmin => "maxmin",
            Command::Commeq => "commeq",
            Command::Bipool { .. } => "bipool",
            Command::CohortSet => "cohort-set",
            Command::Diagnose { .. } => "diagnose",
            Command::Reduce { .. } => "reduce",
        }
    }
}

/// Flag overrides; unset fields fall back to the problem file, then defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Flags {
    pub directions: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub seed: u64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Grid resolution per problem, in the order of `result`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<GridOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_type: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sense: Option<Sense>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<InformationStructure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub label: String,
    pub diameter: f64,
    /// Counter-clockwise hull of the inner vertices, two components only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
    pub approx: IPSetApprox,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseEntry {
    pub direction: Direction,
    pub value: f64,
    /// False when the optimum uses a one-sided breakpoint value.
    pub attained: bool,
    pub one_sided_atoms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<RsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cp: Option<CpVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandResult {
    Membership {
        target: IPProfile,
        outcome: Membership,
    },
    Boundary {
        support: SupportSolution,
    },
    Sets {
        sets: Vec<LabeledSet>,
    },
    Maxmin {
        solution: CautiousSolution,
    },
    Commeq {
        low: f64,
        high: f64,
    },
    Bipool {
        solution: BiPoolSolution,
        distribution: BeliefDistribution,
        /// The same bound from the grid LP in the signed coordinate direction.
        lp_value: f64,
    },
    Diagnose {
        entries: Vec<DiagnoseEntry>,
    },
    Reduce {
        original: BeliefDistribution,
        reduced: BeliefDistribution,
        structure: InformationStructure,
        profile_before: IPProfile,
        profile_after: IPProfile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        actions: Option<ActionReduction>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub command: String,
    pub spec: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: Kind,
    pub parameters: Parameters,
    pub result: CommandResult,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ResultBundle {
    /// Number of profile components, for output formats that need it.
    pub fn profile_dim(&self) -> usize {
        match &self.result {
            CommandResult::Membership { target, .. } => target.len(),
            CommandResult::Boundary { support } => support.profile.len(),
            CommandResult::Sets { sets } => sets.first().map_or(0, |s| s.approx.dim()),
            CommandResult::Maxmin { solution } => solution.profile.len(),
            CommandResult::Commeq { .. } => 0,
            CommandResult::Bipool { distribution, .. } => distribution.dim(),
            CommandResult::Diagnose { entries } => entries.first().map_or(0, |e| e.direction.dim()),
            CommandResult::Reduce { profile_after, .. } => profile_after.len(),
        }
    }
}

fn incompatible(command: &Command, kind: Kind, hint: &'static str) -> CliError {
    CliError::IncompatibleCommand {
        command: command.name(),
        kind: kind.as_str(),
        hint,
    }
}

/// Atom table and grid for a single problem. Persuasion problems use the
/// sender payoff set V, which pairs each belief with all its best responses.
struct Single {
    prior: Prior,
    payoff: PayoffSpec,
    grid: GridOptions,
    table: AtomTable,
}

fn grid_options(spec: &ProblemSpec, flags: &Flags, w: &PayoffSpec) -> GridOptions {
    let mut g = spec.grid.resolve(w);
    if let Some(r) = flags.grid {
        g.lattice = r.max(1);
    }
    g
}

fn single(spec: &ProblemSpec, flags: &Flags) -> CliResult<Single> {
    let (prior, payoff) = spec.payoff().expect("single-problem kind");
    let grid = grid_options(spec, flags, &payoff);
    let beliefs = BeliefGrid::with_options(&payoff, &prior, grid);
    let table = match &payoff {
        PayoffSpec::PersuasionDerived(g) => v_table(g, &prior, &beliefs)?,
        w => AtomTable::new(w, &prior, &beliefs)?,
    };
    Ok(Single {
        prior,
        payoff,
        grid,
        table,
    })
}

fn cohort_table(member: &CohortMember, spec: &ProblemSpec, flags: &Flags) -> CliResult<(GridOptions, AtomTable)> {
    let grid = grid_options(spec, flags, &member.problem.as_payoff());
    let table = member.problem.table(&member.problem.grid_with(grid))?;
    Ok((grid, table))
}

fn direction_prior(p: &CohortProblem) -> CliResult<Prior> {
    Ok(Prior::new(p.cohort_mass().to_vec())?)
}

fn checked_direction(v: &[f64], dim: usize) -> CliResult<Direction> {
    if v.len() != dim {
        return Err(CliError::Usage(format!(
            "direction has {} components, profiles have {dim}",
            v.len()
        )));
    }
    Direction::new(v.to_vec()).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(spec: &ProblemSpec, spec_path: &str, command: &Command, flags: &Flags) -> CliResult<ResultBundle> {
    let kind = spec.kind();
    let seed = flags.seed.or(spec.seed).unwrap_or(0);
    let k = flags.directions.or(spec.directions).unwrap_or(DEFAULT_DIRECTIONS);
    if k == 0 {
        return Err(CliError::Usage("--directions must be positive".into()));
    }
    let mut params = Parameters {
        seed,
        tolerance: spec.tolerance,
        directions: None,
        grids: vec![],
        target: None,
        direction: None,
        target_type: None,
        sense: None,
        pi: None,
    };
    let mut diagnostics = spec.warnings.clone();

    // Cohort files hold one problem, or a family for `cohort-set`.
    let lone_cohort = |spec: &ProblemSpec| -> CliResult<Option<CohortMember>> {
        match &spec.problem {
            Problem::Cohort { members } if members.len() == 1 => Ok(Some(members[0].clone())),
            Problem::Cohort { .. } => Err(incompatible(
                command,
                kind,
                "this file holds a family of problems; use cohort-set",
            )),
            _ => Ok(None),
        }
    };

    let result = match command {
        Command::Membership { target } | Command::Boundary { direction: target } => {
            let table = match lone_cohort(spec)? {
                Some(m) => {
                    let (g, t) = cohort_table(&m, spec, flags)?;
                    params.grids.push(g);
                    t
                }
                None => {
                    let s = single(spec, flags)?;
                    params.grids.push(s.grid);
                    s.table
                }
            };
            let dim = table.profile_dim();
            if let Command::Membership { .. } = command {
                if target.len() != dim {
                    return Err(CliError::Usage(format!(
                        "target has {} components, profiles have {dim}",
                        target.len()
                    )));
                }
                let target = IPProfile::new(target.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
                params.target = Some(target.values.clone());
                let outcome = table.membership(&target)?;
                CommandResult::Membership { target, outcome }
            } else {
                let d = checked_direction(target, dim)?;
                params.direction = Some(d.lambda().to_vec());
                let support = table.support(&d)?;
                if !support.attained {
                    diagnostics
                        .push("optimum uses a one-sided breakpoint value: the support value is a supremum".into());
                }
                CommandResult::Boundary { support }
            }
        }
        Command::Set => {
            if kind == Kind::Cohort {
                return Err(incompatible(command, kind, "use cohort-set"));
            }
            let s = single(spec, flags)?;
            params.grids.push(s.grid);
            params.directions = Some(k);
            let dirs = Direction::default_set(&s.prior, k, seed);
            let label = spec.name.clone().unwrap_or_else(|| "set".into());
            let approx = approximate_table(&s.table, &dirs, Execution::Parallel)?;
            CommandResult::Sets {
                sets: vec![labeled(label, approx)],
            }
        }
        Command::CohortSet => {
            let Problem::Cohort { members } = &spec.problem else {
                return Err(incompatible(command, kind, "use set"));
            };
            params.directions = Some(k);
            let mut sets = Vec::with_capacity(members.len());
            for m in members {
                let grid = grid_options(spec, flags, &m.problem.as_payoff());
                params.grids.push(grid);
                let dirs = Direction::default_set(&direction_prior(&m.problem)?, k, seed);
                let approx = cohort_set_with(&m.problem, &m.problem.grid_with(grid), &dirs, Execution::Parallel)?;
                sets.push(labeled(m.label.clone(), approx));
            }
            CommandResult::Sets { sets }
        }
        Command::Maxmin | Command::Commeq => {
            let Problem::Persuasion { prior, game } = &spec.problem else {
                return Err(incompatible(command, kind, "needs a receiver game (kind `persuasion`)"));
            };
            let w = PayoffSpec::PersuasionDerived(game.clone());
            let grid = grid_options(spec, flags, &w);
            params.grids.push(grid);
            let beliefs = BeliefGrid::with_options(&w, prior, grid);
            if let Command::Maxmin = command {
                CommandResult::Maxmin {
                    solution: cautious_value(game, prior, &beliefs)?,
                }
            } else {
                let (low, high) = comm_eq_profiles(game, prior, &beliefs)?;
                CommandResult::Commeq { low, high }
            }
        }
        Command::Bipool { target, sense } => {
            let Problem::Linear { prior, rho } = &spec.problem else {
                return Err(incompatible(command, kind, "needs a reputation vector (kind `linear`)"));
            };
            params.target_type = Some(*target);
            params.sense = Some(*sense);
            let opts = BiPoolOptions {
                seed,
                ..BiPoolOptions::default()
            };
            let solution = bipool_optimize_with(prior, rho, *target, *sense, opts)?;
            let distribution = solution.policy.distribution(prior)?;
            let s = single(spec, flags)?;
            params.grids.push(s.grid);
            let sign = match sense {
                Sense::Max => 1.0,
                Sense::Min => -1.0,
            };
            let lp_value = sign * s.table.support(&Direction::axis(prior.len(), *target, sign))?.value;
            if (lp_value - solution.value).abs() > 1e-4 {
                diagnostics.push(format!(
                    "grid LP bound {lp_value} differs from the bi-pooling value by more than 1e-4"
                ));
            }
            CommandResult::Bipool {
                solution,
                distribution,
                lp_value,
            }
        }
        Command::Diagnose { direction } => {
            let (table, dir_prior, rho) = match lone_cohort(spec)? {
                Some(m) => {
                    let (g, t) = cohort_table(&m, spec, flags)?;
                    params.grids.push(g);
                    (t, direction_prior(&m.problem)?, None)
                }
                None => {
                    let s = single(spec, flags)?;
                    params.grids.push(s.grid);
                    let rho = match &s.payoff {
                        PayoffSpec::LinearReputation(r) => Some(r.clone()),
                        _ => None,
                    };
                    (s.table, s.prior, rho)
                }
            };
            let dirs = match direction {
                Some(v) => {
                    let d = checked_direction(v, table.profile_dim())?;
                    params.direction = Some(d.lambda().to_vec());
                    vec![d]
                }
                None => {
                    params.directions = Some(k);
                    Direction::default_set(&dir_prior, k, seed)
                }
            };
            let entries = dirs
                .iter()
                .map(|d| diagnose(&table, d, rho.as_deref()))
                .collect::<CliResult<Vec<_>>>()?;
            let open = entries.iter().filter(|e| !e.attained).count();
            if open > 0 {
                diagnostics.push(format!(
                    "{open} of {} directions are suprema over one-sided breakpoint values",
                    entries.len()
                ));
            }
            CommandResult::Diagnose { entries }
        }
        Command::Reduce { pi } => {
            let Some((prior, w)) = spec.payoff() else {
                return Err(incompatible(
                    command,
                    kind,
                    "reduce works on single-population problems",
                ));
            };
            let pi = parse_structure(pi, spec.tolerance, &mut diagnostics)?;
            if pi.num_types() != prior.len() {
                return Err(CliError::Usage(format!(
                    "pi has {} rows, prior has {} types",
                    pi.num_types(),
                    prior.len()
                )));
            }
            let original = posterior_distribution(&prior, &pi)?;
            let reduced = reduce_support(&prior, &original, &w)?;
            let structure = structure_from_tau(&prior, &reduced)?;
            let profile_before = unconditional_profile(&w, &prior, &original)?;
            let profile_after = unconditional_profile(&w, &prior, &reduced)?;
            let actions = match &spec.problem {
                Problem::Persuasion { game, .. } => Some(reduce_to_actions(game, &prior, &pi)?),
                _ => None,
            };
            params.pi = Some(pi);
            CommandResult::Reduce {
                original,
                reduced,
                structure,
                profile_before,
                profile_after,
                actions,
            }
        }
    };
    Ok(ResultBundle {
        command: command.name().into(),
        spec: spec_path.into(),
        name: spec.name.clone(),
        kind,
        parameters: params,
        result,
        diagnostics,
        timing_ms: None,
    })
}

fn labeled(label: String, approx: IPSetApprox) -> LabeledSet {
    LabeledSet {
        label,
        diameter: approx.diameter(),
        polygon: approx.polygon().ok(),
        approx,
    }
}

fn diagnose(table: &AtomTable, d: &Direction, rho: Option<&[f64]>) -> CliResult<DiagnoseEntry> {
    let sol = table.support(d)?;
    let one_sided_atoms = sol
        .tau
        .atoms()
        .iter()
        .filter(|a| a.atom.side != ipset_core::Side::Exact)
        .count();
    let (structure, cp, markov) = match rho {
        Some(rho) => {
            let prior = table.prior();
            let c = second_moment(&sol.tau);
            (
                Some(rs_diagnostics(prior, rho, d, &sol.tau)?),
                Some(cp_check(&c, prior)?),
                Some(markov_checks(&c, prior, rho)?),
            )
        }
        None => (None, None, None),
    };
    Ok(DiagnoseEntry {
        direction: d.clone(),
        value: sol.value,
        attained: sol.attained,
        one_sided_atoms,
        structure,
        cp,
        markov,
    })
}
