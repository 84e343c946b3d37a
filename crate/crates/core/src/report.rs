//! JSON report shape shared by the CLI and the C interface.
//!
//! Every key is always present; sections a subcommand does not compute are
//! `null`. Field order is fixed so identical runs serialize identically.

use serde::Serialize;

use crate::criteria::{
    Boundedness, CompactnessReport, CriterionII, DilationReport, ETrace, FTrace, JSup, KSup, SplitRow,
};
use crate::funcspace::NormEstimate;
use crate::operator::IdentityReport;
use crate::oracle::DerivativeCheck;
use crate::scalar::Precision;
use crate::scenario::{Resolved, ScenarioFile};
use crate::testfns::{DeltaCheck, DeltaSolution};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyIdentities,
    VerifyDelta,
    CheckBounded,
    EssentialNorm,
    Compactness,
    Profile,
    /// Boundedness, then the tail quantities when not unbounded.
    Analyze,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::VerifyIdentities,
        Command::VerifyDelta,
        Command::CheckBounded,
        Command::EssentialNorm,
        Command::Compactness,
        Command::Profile,
        Command::Analyze,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyIdentities => "verify-identities",
            Command::VerifyDelta => "verify-delta",
            Command::CheckBounded => "check-bounded",
            Command::EssentialNorm => "essential-norm",
            Command::Compactness => "compactness",
            Command::Profile => "profile",
            Command::Analyze => "analyze",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Every check passed and every verdict is definite.
    Clean,
    /// A verdict is inconclusive or a check missed its tolerance.
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Clean => 0,
            Status::Inconclusive => 2,
        }
    }
}

/// Resolved configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub resolved: Resolved,
    pub paper_3term: bool,
    pub dilation_radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub derivative: f64,
    pub expansion: f64,
    pub first_derivative: f64,
    pub delta: f64,
}

/// Largest mismatch of one identity family, with the worst sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary<R> {
    pub samples: usize,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst: Option<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identities {
    pub precision: Precision,
    pub derivatives: IdentitySummary<DerivativeCheck>,
    pub expansion: IdentitySummary<IdentityReport>,
    pub first_derivative: IdentitySummary<IdentityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaBlock {
    /// Arithmetic used for the checks.
    pub precision: Precision,
    pub solution: DeltaSolution,
    pub checks: Vec<DeltaCheck>,
    pub max_mismatch: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub tolerance: f64,
    pub square: Vec<DeltaBlock>,
    /// Three-term combinations, reported without gating the exit status.
    pub three_term: Option<Vec<DeltaBlock>>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Essential {
    pub e_max: f64,
    pub f_max: f64,
    /// `min(e_max, f_max)`.
    pub upper: f64,
    pub op_norm_lower_bound: NormEstimate,
    /// `f_max / op_norm_lower_bound`.
    pub f_over_norm: Option<f64>,
    /// `e_max / f_max`.
    pub e_over_f: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Verdicts {
    pub bounded_ii: Option<Boundedness>,
    pub bounded_iii: Option<Boundedness>,
    pub bounded_agree: Option<bool>,
    pub split_check_pass: Option<bool>,
    pub compactness: Option<CompactnessReport>,
    pub dilation_decreasing: Option<bool>,
    pub identities_pass: Option<bool>,
    pub delta_pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: Command,
    pub scenario: ScenarioFile,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub identities: Option<Identities>,
    pub delta: Option<DeltaReport>,
    pub q_sups: Option<Vec<KSup>>,
    pub u_sups: Option<Vec<KSup>>,
    pub s_sups: Option<Vec<JSup>>,
    pub split_check: Option<Vec<SplitRow>>,
    pub e_trace: Option<Vec<ETrace>>,
    pub f_trace: Option<Vec<FTrace>>,
    pub essential: Option<Essential>,
    pub dilation: Option<DilationReport>,
    pub verdicts: Verdicts,
    pub status: Status,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub(crate) fn set_criterion_ii(&mut self, c: CriterionII) {
        self.verdicts.bounded_ii = Some(c.verdict);
        self.s_sups = Some(c.s_sups);
        self.u_sups = Some(c.u_sups);
    }
}
