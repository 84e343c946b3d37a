//! Executes one subcommand on one scenario.

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{band_width, compactness_verdict, Analysis, Boundedness, Compactness, TestFnProfile};
use crate::error::Result;
use crate::funcspace::{make_grid, AnalyticFn, DiskGrid, C64};
use crate::operator::OperatorSpec;
use crate::oracle::derivative_check;
use crate::report::{
    Command, DeltaBlock, DeltaReport, Essential, Identities, IdentitySummary, Report, RunConfig, Status, Tolerances,
    Verdicts, VERSION,
};
use crate::scalar::{Precision, Real, TwoFloat};
use crate::scenario::{Overrides, Resolved, Scenario, SuiteCase};
use crate::testfns::{basis_exponents, g_ia, index_set, verify_delta, DeltaSystem};

pub const DERIVATIVE_TOL: f64 = 1e-9;
pub const EXPANSION_TOL: f64 = 1e-9;
pub const FIRST_DERIVATIVE_TOL: f64 = 1e-12;
pub const DELTA_TOL: f64 = 1e-10;
pub const DILATION_RADII: [f64; 3] = [0.5, 0.9, 0.99];

/// Jet orders above which identity checks switch to double-double.
const EXTENDED_ORDER: u32 = 8;
const IDENTITY_POINTS: usize = 16;
const DELTA_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub overrides: Overrides,
    pub paper_3term: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    /// Radial profile for `profile`.
    pub csv: Option<String>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code()
    }
}

/// `n` points `r e^{i theta}` on a golden-angle spiral with `r <= rmax`.
pub fn spiral(n: usize, rmax: f64) -> Vec<C64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| C64::from_polar(rmax * ((i as f64 + 0.5) / n as f64).sqrt(), golden * i as f64))
        .collect()
}

pub fn run(cmd: Command, scenario: &Scenario, opts: &RunOptions) -> Result<RunOutput> {
    let resolved = scenario.resolve(&opts.overrides)?;
    let grid = make_grid(&resolved.grid)?;
    let mut report = Report {
        version: VERSION,
        command: cmd,
        scenario: scenario.file.clone(),
        config: RunConfig {
            resolved: resolved.clone(),
            paper_3term: opts.paper_3term,
            dilation_radii: DILATION_RADII.to_vec(),
        },
        tolerances: Tolerances {
            derivative: DERIVATIVE_TOL,
            expansion: EXPANSION_TOL,
            first_derivative: FIRST_DERIVATIVE_TOL,
            delta: DELTA_TOL,
        },
        identities: None,
        delta: None,
        q_sups: None,
        u_sups: None,
        s_sups: None,
        split_check: None,
        e_trace: None,
        f_trace: None,
        essential: None,
        dilation: None,
        verdicts: Verdicts::default(),
        status: Status::Clean,
    };
    let csv = match resolved.precision {
        Precision::Double => execute::<f64>(cmd, scenario, &resolved, &grid, opts, &mut report)?,
        Precision::Extended => execute::<TwoFloat>(cmd, scenario, &resolved, &grid, opts, &mut report)?,
    };
    report.status = status_of(&report.verdicts);
    Ok(RunOutput { report, csv })
}

/// Expected against measured verdicts for one bundled scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub expected_bounded: Boundedness,
    pub bounded_ii: Option<Boundedness>,
    pub bounded_iii: Option<Boundedness>,
    pub expected_compact: Option<Compactness>,
    pub compact: Option<Compactness>,
    pub f_over_norm: Option<f64>,
    pub e_over_f: Option<f64>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub rows: Vec<SuiteRow>,
    /// Spread `max / min` of `f_over_norm` over bounded, non-compact rows.
    pub f_over_norm_band: Option<f64>,
    /// Spread of `e_over_f` over the same rows.
    pub e_over_f_band: Option<f64>,
    pub band_limit: f64,
    pub pass: bool,
}

pub const BAND_LIMIT: f64 = 100.0;

/// `analyze` on every case, concurrently, in case order.
pub fn run_suite(cases: &[SuiteCase], opts: &RunOptions) -> Result<Vec<RunOutput>> {
    cases
        .par_iter()
        .map(|c| run(Command::Analyze, &c.scenario, opts))
        .collect()
}

pub fn summarize_suite(cases: &[SuiteCase], outputs: &[RunOutput]) -> SuiteSummary {
    let rows: Vec<SuiteRow> = cases
        .iter()
        .zip(outputs)
        .map(|(c, o)| {
            let v = &o.report.verdicts;
            let compact = v.compactness.as_ref().map(|c| c.verdict);
            let ess = o.report.essential.as_ref();
            let matches = v.bounded_ii == Some(c.bounded)
                && v.bounded_iii == Some(c.bounded)
                && (c.compact.is_none() || compact == c.compact)
                && o.report.status == Status::Clean;
            SuiteRow {
                name: c.scenario.name().to_string(),
                expected_bounded: c.bounded,
                bounded_ii: v.bounded_ii,
                bounded_iii: v.bounded_iii,
                expected_compact: c.compact,
                compact,
                f_over_norm: ess.and_then(|e| e.f_over_norm),
                e_over_f: ess.and_then(|e| e.e_over_f),
                matches,
            }
        })
        .collect();
    let banded: Vec<&SuiteRow> = rows
        .iter()
        .filter(|r| r.bounded_iii == Some(Boundedness::Bounded) && r.compact == Some(Compactness::NotCompact))
        .collect();
    let spread = |f: fn(&SuiteRow) -> Option<f64>| {
        let vals: Vec<f64> = banded.iter().filter_map(|r| f(r)).collect();
        band_width(&vals)
    };
    let f_over_norm_band = spread(|r| r.f_over_norm);
    let e_over_f_band = spread(|r| r.e_over_f);
    let within = |b: Option<f64>| b.is_some_and(|b| b <= BAND_LIMIT);
    SuiteSummary {
        pass: rows.iter().all(|r| r.matches) && within(f_over_norm_band) && within(e_over_f_band),
        rows,
        f_over_norm_band,
        e_over_f_band,
        band_limit: BAND_LIMIT,
    }
}

fn status_of(v: &Verdicts) -> Status {
    let definite_b = |b: Option<Boundedness>| b != Some(Boundedness::Inconclusive);
    let clean = v.identities_pass != Some(false)
        && v.delta_pass != Some(false)
        && definite_b(v.bounded_ii)
        && definite_b(v.bounded_iii)
        && v.bounded_agree != Some(false)
        && v.split_check_pass != Some(false)
        && v.compactness
            .as_ref()
            .is_none_or(|c| c.verdict != Compactness::Inconclusive);
    if clean {
        Status::Clean
    } else {
        Status::Inconclusive
    }
}

fn execute<T: Real>(
    cmd: Command,
    scenario: &Scenario,
    resolved: &Resolved,
    grid: &DiskGrid,
    opts: &RunOptions,
    report: &mut Report,
) -> Result<Option<String>> {
    let spec = &scenario.spec;
    match cmd {
        Command::VerifyIdentities => {
            let ids = if spec.m + 2 > EXTENDED_ORDER {
                identities::<TwoFloat>(spec, Precision::Extended)?
            } else {
                identities::<T>(spec, resolved.precision)?
            };
            report.verdicts.identities_pass =
                Some(ids.derivatives.pass && ids.expansion.pass && ids.first_derivative.pass);
            report.identities = Some(ids);
            let delta = delta_report::<T>(spec.m, opts.paper_3term, resolved.precision)?;
            report.verdicts.delta_pass = Some(delta.pass);
            report.delta = Some(delta);
            Ok(None)
        }
        Command::VerifyDelta => {
            let delta = delta_report::<T>(spec.m, opts.paper_3term, resolved.precision)?;
            report.verdicts.delta_pass = Some(delta.pass);
            report.delta = Some(delta);
            Ok(None)
        }
        Command::CheckBounded => {
            let a = Analysis::<T>::new(spec, grid, resolved.tail.clone())?;
            let profile = a.test_function_profile(&basis_exponents(spec.m))?;
            boundedness_sections(&a, &profile, report);
            Ok(None)
        }
        Command::EssentialNorm | Command::Compactness => {
            let a = Analysis::<T>::new(spec, grid, resolved.tail.clone())?;
            a.require_bounded()?;
            report.verdicts.bounded_iii = Some(a.boundedness_iii());
            report.q_sups = Some(a.criterion_iii());
            let profile = a.test_function_profile(&basis_exponents(spec.m))?;
            essential_sections(&a, &profile, resolved, cmd == Command::EssentialNorm, report)?;
            Ok(None)
        }
        Command::Analyze => {
            let a = Analysis::<T>::new(spec, grid, resolved.tail.clone())?;
            let profile = a.test_function_profile(&basis_exponents(spec.m))?;
            boundedness_sections(&a, &profile, report);
            if report.verdicts.bounded_iii != Some(Boundedness::Unbounded) {
                essential_sections(&a, &profile, resolved, true, report)?;
            }
            Ok(None)
        }
        Command::Profile => {
            let a = Analysis::<T>::new(spec, grid, resolved.tail.clone())?;
            report.q_sups = Some(a.criterion_iii());
            let mut csv = String::from("r,k,q_annulus_max\n");
            for (r, k, v) in a.radial_profile() {
                csv.push_str(&format!("{r},{k},{v}\n"));
            }
            Ok(Some(csv))
        }
    }
}

fn boundedness_sections<T: Real>(a: &Analysis<T>, profile: &TestFnProfile, report: &mut Report) {
    let iii = a.boundedness_iii();
    let ii = a.criterion_ii(profile);
    let split = a.third_split_check();
    report.verdicts.bounded_iii = Some(iii);
    report.verdicts.bounded_agree = Some(ii.verdict == iii);
    report.verdicts.split_check_pass = Some(split.iter().all(|r| r.pass));
    report.set_criterion_ii(ii);
    report.q_sups = Some(a.criterion_iii());
    report.split_check = Some(split);
}

fn essential_sections<T: Real>(
    a: &Analysis<T>,
    profile: &TestFnProfile,
    resolved: &Resolved,
    with_norms: bool,
    report: &mut Report,
) -> Result<()> {
    let (e, f) = a.essential_quantities(profile)?;
    if with_norms {
        let peak = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0f64, f64::max);
        let e_max = peak(&mut e.iter().map(|t| t.limsup));
        let f_max = peak(&mut f.iter().map(|t| t.limsup));
        let lower = a.prepared.op_norm_lower_bound(&resolved.sampler)?;
        let ratio = |x: f64, y: f64| (y > 0.0).then(|| x / y);
        report.essential = Some(Essential {
            e_max,
            f_max,
            upper: e_max.min(f_max),
            f_over_norm: ratio(f_max, lower.value),
            e_over_f: ratio(e_max, f_max),
            op_norm_lower_bound: lower,
        });
        let dil = a.dilation_residual(&resolved.sampler, &DILATION_RADII)?;
        report.verdicts.dilation_decreasing = Some(dil.decreasing);
        report.dilation = Some(dil);
    }
    report.verdicts.compactness = Some(compactness_verdict(&e, &f));
    report.e_trace = Some(e);
    report.f_trace = Some(f);
    Ok(())
}

fn summarize<R: Clone>(items: Vec<(f64, R)>, tol: f64) -> IdentitySummary<R> {
    let samples = items.len();
    let worst = items.iter().max_by(|a, b| a.0.total_cmp(&b.0)).cloned();
    let max_mismatch = worst.as_ref().map_or(0.0, |w| w.0);
    IdentitySummary {
        samples,
        max_mismatch,
        tolerance: tol,
        pass: max_mismatch <= tol,
        worst: worst.map(|w| w.1),
    }
}

/// Functions `f` fed through the identities: test functions, an atom and a
/// monomial of the highest order involved.
fn probe_functions(m: u32) -> Result<Vec<AnalyticFn>> {
    let mut fs = Vec::new();
    for (n, a) in spiral(3, 0.8).into_iter().enumerate() {
        for j in basis_exponents(m) {
            fs.push(AnalyticFn::test_fn(j, a)?);
        }
        fs.push(AnalyticFn::sigma(a * (n as f64 + 1.0) / 3.0)?);
    }
    fs.push(AnalyticFn::monomial(m as usize + 3));
    Ok(fs)
}

fn identities<T: Real>(spec: &OperatorSpec, precision: Precision) -> Result<Identities> {
    let points = spiral(IDENTITY_POINTS, 0.9);
    let probes = probe_functions(spec.m)?;
    let kmax = spec.m as usize + 2;

    let mut targets = vec![spec.u.clone(), spec.v.clone(), spec.phi.clone()];
    targets.extend(probes.iter().take(basis_exponents(spec.m).len() + 1).cloned());
    let jobs: Vec<(&AnalyticFn, C64)> = targets
        .iter()
        .flat_map(|f| points.iter().map(move |&z| (f, z)))
        .collect();
    let derivs = jobs
        .par_iter()
        .map(|&(f, z)| derivative_check(f, z, kmax).map(|c| (c.max_mismatch, c)))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(&AnalyticFn, C64)> = probes
        .iter()
        .flat_map(|f| points.iter().map(move |&z| (f, z)))
        .collect();
    let expansion = jobs
        .par_iter()
        .map(|&(f, z)| {
            spec.second_derivative_identity_check::<T>(f, z)
                .map(|r| (r.rel_mismatch, r))
        })
        .collect::<Result<Vec<_>>>()?;

    let first = probes
        .iter()
        .map(|f| spec.first_derivative_check::<T>(f).map(|r| (r.rel_mismatch, r)))
        .collect::<Result<Vec<_>>>()?;

    Ok(Identities {
        precision,
        derivatives: summarize(derivs, DERIVATIVE_TOL),
        expansion: summarize(expansion, EXPANSION_TOL),
        first_derivative: summarize(first, FIRST_DERIVATIVE_TOL),
    })
}

/// Checks run in double-double once the system's condition times the
/// double rounding unit exceeds the tolerance, since the combination then
/// cancels more digits than double carries.
fn delta_block<T: Real>(system: &DeltaSystem, i: u32, rows: &[u32], precision: Precision) -> Result<DeltaBlock> {
    let sol = system.solve(i)?;
    let promote = precision == Precision::Double && sol.condition * f64::EPSILON > DELTA_TOL;
    let checks = spiral(DELTA_POINTS, 0.9)
        .into_iter()
        .map(|a| {
            let g = g_ia(&sol, a)?;
            if promote {
                verify_delta::<TwoFloat>(&g, i, a, rows, DELTA_TOL)
            } else {
                verify_delta::<T>(&g, i, a, rows, DELTA_TOL)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let max_mismatch = checks.iter().fold(sol.residual, |m, c| m.max(c.max_mismatch));
    Ok(DeltaBlock {
        precision: if promote { Precision::Extended } else { precision },
        solution: (*sol).clone(),
        pass: max_mismatch <= DELTA_TOL,
        checks,
        max_mismatch,
    })
}

/// Square systems for every order of the index set; with `paper_3term` also
/// the three-term combinations checked against all six conditions.
pub fn delta_report<T: Real>(m: u32, paper_3term: bool, precision: Precision) -> Result<DeltaReport> {
    let rows = index_set(m);
    let system = DeltaSystem::new(m)?;
    let square = rows
        .iter()
        .map(|&i| delta_block::<T>(&system, i, &rows, precision))
        .collect::<Result<Vec<_>>>()?;
    let three_term = if paper_3term {
        Some(
            rows.iter()
                .map(|&i| delta_block::<T>(&DeltaSystem::three_term(m, i)?, i, &rows, precision))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(DeltaReport {
        tolerance: DELTA_TOL,
        pass: square.iter().all(|b| b.pass),
        square,
        three_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn scenario(src: &str) -> Scenario {
        parse_scenario(src).unwrap()
    }

    #[test]
    fn spiral_stays_inside() {
        let p = spiral(50, 0.9);
        assert_eq!(p.len(), 50);
        assert!(p.iter().all(|z| z.norm() <= 0.9));
    }

    #[test]
    fn verify_identities_is_clean() {
        let s = scenario(r#"{"u":"poly(1,0.5)","v":"sigma(0.3i)","phi":"dilate(0.7,sigma(0.2))","m":3,"alpha":2}"#);
        let out = run(Command::VerifyIdentities, &s, &RunOptions::default()).unwrap();
        let ids = out.report.identities.as_ref().unwrap();
        assert!(ids.derivatives.pass, "{:?}", ids.derivatives);
        assert!(ids.expansion.pass, "{:?}", ids.expansion.max_mismatch);
        assert!(ids.first_derivative.pass);
        assert!(out.report.delta.as_ref().unwrap().pass);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn three_term_reports_without_gating() {
        let s = scenario(r#"{"u":"z","v":"z","phi":"z","m":4,"alpha":2}"#);
        let opts = RunOptions {
            paper_3term: true,
            ..Default::default()
        };
        let out = run(Command::VerifyDelta, &s, &opts).unwrap();
        let d = out.report.delta.unwrap();
        assert!(d.pass);
        let three = d.three_term.unwrap();
        assert!(three.iter().any(|b| !b.pass));
        assert_eq!(out.report.status, Status::Clean);
    }

    #[test]
    fn profile_emits_csv() {
        let s = scenario(r#"{"u":"const(1)","v":"const(0)","phi":"z","m":1,"alpha":2}"#);
        let out = run(Command::Profile, &s, &RunOptions::default()).unwrap();
        let csv = out.csv.unwrap();
        assert!(csv.starts_with("r,k,q_annulus_max\n"));
        assert!(csv.lines().count() > 10);
    }
}
