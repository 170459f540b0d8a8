use std::fmt::Write as _;

use anyhow::{bail, Result};

use fbms::discretize::BoundaryCondition;
use fbms::geometry::{E_X, E_Y, E_Z};
use fbms::spectra::{
    certify_count, grid_study, index_below, mode_multiplicity, nonlocal_spectrum, steklov_spectrum,
    GridStudy, SpectralLine, SteklovOperator,
};
use fbms::verify::{
    check_conormal_support, check_fsn, check_ipp_corpus, check_pointwise_identities, check_q1xi,
    check_support_orthogonality, sample_points, IdentityReport,
};
use fbms::SurfaceModel;

use crate::args::{Common, IndexArgs, NonlocalArgs, Problem, SpectrumArgs, VerifyArgs};
use crate::report::{nums, Fields, IdentityEntry, Num, Report, ResultEntry};

/// A finished command: the report, whether every requested certification
/// held, and a human-readable table.
pub struct Outcome {
    pub report: Report,
    pub certified: bool,
    pub table: String,
}

fn surface(common: &Common) -> SurfaceModel {
    SurfaceModel::from_kind(common.surface.into())
}

fn finest(common: &Common) -> usize {
    *common.grids.last().expect("validated non-empty")
}

fn base_config(command: &str, common: &Common) -> Fields {
    let mut c = Fields::new();
    c.insert("command", command.into());
    c.insert("surface", format!("{}", fbms::SurfaceKind::from(common.surface)).into());
    c.insert("grids", common.grids.clone().into());
    c.insert("guard", common.guard.into());
    c.insert("seed", common.seed.into());
    c
}

fn line_entry(problem: &str, mode: u32, lines: &[&SpectralLine], certified: Option<bool>, per_grid: bool) -> ResultEntry {
    ResultEntry {
        problem: problem.into(),
        mode,
        eigenvalues: lines.iter().map(|l| Num(*l.per_grid.last().expect("non-empty"))).collect(),
        multiplicity: lines.iter().map(|l| l.multiplicity).collect(),
        extrapolated: lines.iter().map(|l| Num(l.extrapolated)).collect(),
        order: lines.iter().map(|l| l.order.map(Num)).collect(),
        certified,
        per_grid: per_grid.then(|| lines.iter().map(|l| nums(&l.per_grid)).collect()),
    }
}

fn study_entries(problem: &str, study: &GridStudy, certified: impl Fn(u32) -> Option<bool>, per_grid: bool) -> Vec<ResultEntry> {
    let mut modes: Vec<u32> = study.lines.iter().map(|l| l.mode).collect();
    modes.sort_unstable();
    modes.dedup();
    modes
        .into_iter()
        .map(|m| line_entry(problem, m, &study.mode_lines(m), certified(m), per_grid))
        .collect()
}

fn ascending_table(study: &GridStudy) -> String {
    let mut t = String::from("  extrapolated              mode  mult  order\n");
    for l in &study.lines {
        let order = l.order.map_or("-".to_string(), |p| format!("{p:.2}"));
        let _ = writeln!(t, "  {:>24.16e}  {:>4}  {:>4}  {order}", l.extrapolated, l.mode, l.multiplicity);
    }
    t
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome> {
    let common = &args.common;
    let surf = surface(common);
    let mut config = base_config("spectrum", common);
    config.insert("problem", args.problem.name().into());
    config.insert("modes", vec![*args.modes.start(), *args.modes.end()].into());
    config.insert("keep", args.keep.into());
    let mut report = Report::new(config);
    let problem = args.problem.name();
    match args.problem {
        Problem::Robin | Problem::Dirichlet => {
            let bc = if args.problem == Problem::Robin {
                BoundaryCondition::Robin
            } else {
                BoundaryCondition::Dirichlet
            };
            let study = grid_study(&surf, bc, args.modes.clone(), &common.grids, args.keep)?;
            let mut table = format!("{problem} spectrum on the {}, modes {:?}\n", surf.kind(), args.modes);
            table += &ascending_table(&study);
            if bc == BoundaryCondition::Robin {
                let idx = certify_count(&surf, study, 0.0, common.guard);
                let bad_modes: Vec<u32> = idx.in_band.iter().filter(|d| !d.matched).map(|d| d.mode).collect();
                report.results = study_entries(problem, &idx.study, |m| Some(!bad_modes.contains(&m)), false);
                report.summary.insert("negative_count", idx.count.into());
                report.summary.insert("below_minus_two", idx.study.count_below(-2.0, common.guard).count.into());
                report.summary.insert("nullity", idx.nullity.into());
                report.summary.insert("certified", idx.band_certified.into());
                let _ = writeln!(
                    table,
                    "negative: {} (nullity {}, certified {})",
                    idx.count, idx.nullity, idx.band_certified
                );
                Ok(Outcome {
                    report,
                    certified: idx.band_certified,
                    table,
                })
            } else {
                report.results = study_entries(problem, &study, |_| None, false);
                Ok(Outcome {
                    report,
                    certified: true,
                    table,
                })
            }
        }
        Problem::SteklovLaplacian | Problem::SteklovJacobi => {
            let op = if args.problem == Problem::SteklovLaplacian {
                SteklovOperator::Laplacian
            } else {
                SteklovOperator::Jacobi
            };
            let n = finest(common);
            let (spec, per_mode) = steklov_spectrum(&surf, op, args.modes.clone(), n)?;
            for sm in &per_mode {
                report.results.push(ResultEntry {
                    problem: problem.into(),
                    mode: sm.mode,
                    eigenvalues: nums(&sm.sigma),
                    multiplicity: vec![mode_multiplicity(sm.mode); sm.sigma.len()],
                    extrapolated: nums(&sm.sigma),
                    order: vec![None; sm.sigma.len()],
                    certified: None,
                    per_grid: None,
                });
            }
            let null: Vec<u32> = per_mode.iter().filter(|m| !m.null_trace.is_empty()).map(|m| m.mode).collect();
            report.summary.insert("null_trace_modes", null.into());
            let mut table = format!("{problem} spectrum on the {}, n = {n}\n", surf.kind());
            for (v, m) in spec.eigenvalues.iter().zip(&spec.modes) {
                let _ = writeln!(table, "  {v:>24.16e}  mode {m}");
            }
            Ok(Outcome {
                report,
                certified: true,
                table,
            })
        }
    }
}

pub fn convergence(args: &SpectrumArgs) -> Result<Outcome> {
    let common = &args.common;
    let bc = match args.problem {
        Problem::Robin => BoundaryCondition::Robin,
        Problem::Dirichlet => BoundaryCondition::Dirichlet,
        other => bail!(crate::ConfigError(format!(
            "convergence studies support robin and dirichlet, not {}",
            other.name()
        ))),
    };
    if common.grids.len() < 2 {
        bail!(crate::ConfigError("a convergence study needs at least two grids".into()));
    }
    let surf = surface(common);
    let mut config = base_config("convergence", common);
    config.insert("problem", args.problem.name().into());
    config.insert("modes", vec![*args.modes.start(), *args.modes.end()].into());
    config.insert("keep", args.keep.into());
    let study = grid_study(&surf, bc, args.modes.clone(), &common.grids, args.keep)?;
    let mut report = Report::new(config);
    report.results = study_entries(args.problem.name(), &study, |_| None, true);
    let mut table = format!("grids {:?}\n", common.grids);
    for l in &study.lines {
        let values: Vec<String> = l.per_grid.iter().map(|v| format!("{v:.12}")).collect();
        let order = l.order.map_or("-".to_string(), |p| format!("{p:.3}"));
        let _ = writeln!(
            table,
            "  mode {:>2} #{}: {}  ->  {:.14}  (order {order})",
            l.mode,
            l.index,
            values.join("  "),
            l.extrapolated
        );
    }
    Ok(Outcome {
        report,
        certified: true,
        table,
    })
}

pub fn index(args: &IndexArgs) -> Result<Outcome> {
    let common = &args.common;
    let surf = surface(common);
    let mut config = base_config("index", common);
    config.insert("max_mode", args.max_mode.into());
    config.insert("threshold", args.threshold.into());
    let idx = index_below(&surf, args.threshold, args.max_mode, &common.grids, common.guard)?;
    let mut report = Report::new(config);
    let bad_modes: Vec<u32> = idx.in_band.iter().filter(|d| !d.matched).map(|d| d.mode).collect();
    report.results = study_entries("robin", &idx.study, |m| Some(!bad_modes.contains(&m)), false);
    report.summary.insert("count", idx.count.into());
    report.summary.insert("nullity", idx.nullity.into());
    report.summary.insert("certified", idx.certified.into());
    report.summary.insert("band_certified", idx.band_certified.into());
    report.summary.insert("tail_certified", idx.tail_certified.into());
    let mut table = format!(
        "eigenvalues below {} on the {}: {} (certified {})\n",
        args.threshold,
        surf.kind(),
        idx.count,
        idx.certified
    );
    for l in &idx.below {
        let _ = writeln!(table, "  {:>24.16e}  mode {}  x{}", l.extrapolated, l.mode, l.multiplicity);
    }
    for d in &idx.in_band {
        let _ = writeln!(
            table,
            "  in band: {:.3e} mode {} x{} rotation match {} ({:.1e})",
            d.value, d.mode, d.multiplicity, d.matched, d.profile_error
        );
    }
    let _ = writeln!(table, "  nullity {}, tail certified {}", idx.nullity, idx.tail_certified);
    Ok(Outcome {
        report,
        certified: idx.certified,
        table,
    })
}

pub fn nonlocal(args: &NonlocalArgs) -> Result<Outcome> {
    let common = &args.common;
    let surf = surface(common);
    let n = finest(common);
    let mut config = base_config("nonlocal", common);
    config.insert("max_mode", args.max_mode.into());
    let spec = nonlocal_spectrum(&surf, args.max_mode, n)?;
    let mut report = Report::new(config);
    for pm in &spec.per_mode {
        report.results.push(ResultEntry {
            problem: "nonlocal".into(),
            mode: pm.mode,
            eigenvalues: nums(&pm.eigenvalues),
            multiplicity: vec![mode_multiplicity(pm.mode); pm.eigenvalues.len()],
            extrapolated: nums(&pm.eigenvalues),
            order: vec![None; pm.eigenvalues.len()],
            certified: None,
            per_grid: None,
        });
    }
    let tail = spec.tail_certified(common.guard);
    let lowest: Vec<f64> = spec.eigenvalues.iter().take(8).copied().collect();
    report.summary.insert("lowest", lowest.clone().into());
    report.summary.insert("tail_certified", tail.into());
    let mut table = format!("non-local spectrum on the {}, modes 0..={}, n = {n}\n", surf.kind(), args.max_mode);
    for (k, (v, m)) in spec.eigenvalues.iter().zip(&spec.modes).take(12).enumerate() {
        let _ = writeln!(table, "  μ{k:<2} {v:>24.16e}  mode {m}");
    }
    let _ = writeln!(table, "  tail certified {tail}");
    Ok(Outcome {
        report,
        certified: tail,
        table,
    })
}

fn push(entries: &mut Vec<IdentityEntry>, r: &IdentityReport, tol: f64, min_order: f64) {
    entries.push(IdentityEntry::new(r, tol, min_order));
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let common = &args.common;
    let surf = surface(common);
    let n = finest(common);
    let mut config = base_config("verify", common);
    config.insert("samples", args.samples.into());
    let mut report = Report::new(config);
    let mut ids = Vec::new();
    let vectors = [E_X, E_Y, E_Z];
    for v in &vectors {
        push(&mut ids, &check_fsn(&surf, v, n), 1e-6, 1.9);
    }
    let pts = sample_points(&surf, args.samples, common.seed);
    for v in &vectors {
        for r in check_pointwise_identities(&surf, &pts, v)? {
            push(&mut ids, &r, 1e-6, 0.0);
        }
    }
    let mut q1xi_negative = None;
    if surf.is_catenoid() {
        for v in &vectors {
            for (label, mut r) in check_ipp_corpus(&surf, v, n, common.seed) {
                r.name = format!("{} [w = {label}, v = {v:?}]", r.name);
                push(&mut ids, &r, 1e-4, 1.9);
            }
        }
        let q = check_q1xi(&surf, n)?;
        q1xi_negative = Some(q.left < -1e-2 && q.right < -1e-2);
        push(&mut ids, &q, 1e-6, 1.9);
        push(&mut ids, &check_conormal_support(&surf, &pts)?, 1e-6, 0.0);
        for v in &vectors {
            push(&mut ids, &check_support_orthogonality(&surf, v, n)?, 1e-8, 0.0);
        }
    }
    report.identities = ids;
    let passed = report.identities.iter().filter(|e| e.passed).count();
    let total = report.identities.len();
    report.summary.insert("passed", passed.into());
    report.summary.insert("total", total.into());
    if let Some(neg) = q1xi_negative {
        report.summary.insert("q1xi_negative", neg.into());
    }
    let mut table = format!("identity checks on the {}, n = {n}\n", surf.kind());
    for e in report.identities.iter().filter(|e| !e.passed) {
        let _ = writeln!(table, "  FAILED {} (residual {:.3e})", e.name, e.rel_residual.0);
    }
    let _ = writeln!(table, "  {passed} of {total} passed");
    let certified = passed == total && q1xi_negative.unwrap_or(true);
    Ok(Outcome {
        report,
        certified,
        table,
    })
}
