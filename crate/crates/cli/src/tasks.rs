//! Per-task runners: session setup, module construction, and the
//! single-purpose tasks. The verify-all harness lives in `verify`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::json;

use cherednik_core::clifford::PinStructure;
use cherednik_core::cohomology::{
    dirac_report, embedding_check, lie_report, LieKind, LieReport,
};
use cherednik_core::groups::{find_reflections, IrrepTable, ParamC, ReflectionGroup};
use cherednik_core::modules::{
    baby_verma, contravariant_form, is_unitary, simple_quotient, standard_module,
    CherednikParams, GradedModule,
};
use cherednik_core::scalars::parse_scalar;
use cherednik_core::vogan::{verify_kernel_decomposition, DeltaKind, PBWCtx};
use cherednik_core::{Error, SqrtConvention};

use crate::cache::catalog_cached;
use crate::config::{CParam, JobConfig, ModuleKind, ModuleSpec, Task};
use crate::report::{mults_json, CheckStatus, Report};

/// Process-level outcome; the exit code encodes the class of failure.
#[derive(Debug)]
pub enum RunError {
    /// exit 2
    InvalidConfig(String),
    /// exit 3
    CapExceeded(String),
    /// exit 1 (an engine invariant or theorem check failed loudly)
    CheckFailed(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidConfig(_) => 2,
            RunError::CapExceeded(_) => 3,
            RunError::CheckFailed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::InvalidConfig(m) | RunError::CapExceeded(m) | RunError::CheckFailed(m) => m,
        }
    }
}

pub fn core_err(e: Error) -> RunError {
    match e {
        Error::CapExceeded(m) => RunError::CapExceeded(m),
        Error::Parse(m) | Error::UnsupportedGroup(m) => RunError::InvalidConfig(m),
        other => RunError::CheckFailed(other.to_string()),
    }
}

pub struct Session {
    pub config: JobConfig,
    pub group: Arc<ReflectionGroup>,
    pub table: IrrepTable,
    pub params: CherednikParams,
    pub pin: PinStructure,
    pub cache_hit: bool,
}

pub fn build_session(config: JobConfig, cache_dir: Option<PathBuf>) -> Result<Session, RunError> {
    config
        .validate()
        .map_err(RunError::InvalidConfig)?;
    if let cherednik_core::groups::GroupSpec::Cyclic { m } = &config.group {
        if *m as usize > config.caps.group_order {
            return Err(RunError::CapExceeded("group order cap".into()));
        }
    }
    let (group, table, cache_hit) =
        catalog_cached(&config.group, cache_dir.as_deref()).map_err(core_err)?;
    if group.order() > config.caps.group_order {
        return Err(RunError::CapExceeded(format!(
            "group order {} exceeds cap {}",
            group.order(),
            config.caps.group_order
        )));
    }
    let refls = find_reflections(&group);
    let t = parse_scalar(&config.t).map_err(|e| RunError::InvalidConfig(e.to_string()))?;
    let c = match &config.c {
        CParam::Constant(s) => ParamC::constant(
            &refls,
            parse_scalar(s).map_err(|e| RunError::InvalidConfig(e.to_string()))?,
        ),
        CParam::PerClass(map) => {
            let parsed: Result<Vec<(String, cherednik_core::CycScalar)>, RunError> = map
                .iter()
                .map(|(k, v)| {
                    Ok((
                        k.clone(),
                        parse_scalar(v).map_err(|e| RunError::InvalidConfig(e.to_string()))?,
                    ))
                })
                .collect();
            ParamC::from_map(&refls, &parsed?)
                .map_err(|e| RunError::InvalidConfig(e.to_string()))?
        }
    };
    let params = CherednikParams::new(group.clone(), t, c);
    let pin = PinStructure::build(group.clone(), &refls, SqrtConvention::Standard)
        .map_err(core_err)?;
    Ok(Session {
        config,
        group,
        table,
        params,
        pin,
        cache_hit,
    })
}

pub fn base_report(s: &Session) -> Report {
    let c_map: BTreeMap<String, String> = s
        .params
        .c
        .labels()
        .iter()
        .map(|l| (l.to_string(), format!("{}", s.params.c.value(l))))
        .collect();
    Report::new(
        s.config.task.name(),
        &s.group.name,
        &format!("{}", s.params.t),
        c_map,
        s.config.degree_bound,
    )
}

pub fn build_module(s: &Session, spec: &ModuleSpec) -> Result<GradedModule, RunError> {
    let window = s.config.degree_bound;
    match spec.kind {
        ModuleKind::Standard => Ok(standard_module(&s.params, &s.table, &spec.sigma, window)
            .map_err(core_err)?
            .module),
        ModuleKind::Simple | ModuleKind::Ltriv => {
            let sigma = if spec.kind == ModuleKind::Ltriv {
                "triv"
            } else {
                &spec.sigma
            };
            let std = standard_module(&s.params, &s.table, sigma, window).map_err(core_err)?;
            Ok(simple_quotient(&std.module, &s.table)
                .map_err(core_err)?
                .module)
        }
        ModuleKind::BabyVerma => {
            if !s.params.t.is_zero() {
                return Err(RunError::InvalidConfig(
                    "baby Verma modules require t = 0".into(),
                ));
            }
            baby_verma(&s.params, &s.table, &spec.sigma).map_err(core_err)
        }
    }
}

fn lie_report_json(rep: &LieReport) -> serde_json::Value {
    let mut totals = serde_json::Map::new();
    let max_p = rep.entries.iter().map(|e| e.p).max().unwrap_or(0);
    for p in 0..=max_p {
        let t = rep.total_for_p(p);
        if !t.is_empty() {
            totals.insert(p.to_string(), mults_json(&t));
        }
    }
    json!({
        "entries": rep.entries.iter().map(|e| json!({
            "exterior_degree": e.p,
            "poly_degree": e.k,
            "mults": mults_json(&e.mults),
        })).collect::<Vec<_>>(),
        "totals_by_exterior_degree": serde_json::Value::Object(totals),
        "unstable_positions": rep.unstable.iter().map(|(p, k)| json!([p, k])).collect::<Vec<_>>(),
    })
}

pub fn run_group_info(s: &Session) -> Result<Report, RunError> {
    let mut report = base_report(s);
    let refls = find_reflections(&s.group);
    let refl_json: Vec<_> = refls
        .iter()
        .map(|r| {
            json!({
                "element": r.elem,
                "class": r.class_label,
                "eigenvalue": format!("{}", r.lambda),
            })
        })
        .collect();
    report.results = json!({
        "order": s.group.order(),
        "rank": s.group.rank(),
        "conjugacy_classes": s.group.classes().iter().map(|c| c.len()).collect::<Vec<_>>(),
        "reflections": refl_json,
        "reflections_generate": cherednik_core::groups::reflections_generate(&s.group, &refls),
        "irreps": s.table.irreps.iter().map(|i| json!({
            "label": i.label,
            "dim": i.dim,
            "character": i.character.iter().map(|v| format!("{}", v)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "catalog_cache_hit": s.cache_hit,
    });
    report.finalize_exit_code();
    Ok(report)
}

pub fn run_cohomology(s: &Session) -> Result<Report, RunError> {
    let spec = s.config.module.clone().unwrap();
    let m = build_module(s, &spec)?;
    let mut report = base_report(s);
    let alg = s.pin.alg.as_ref();
    let mut results = serde_json::Map::new();
    results.insert(
        "module".into(),
        json!({
            "kind": format!("{:?}", spec.kind),
            "sigma": spec.sigma,
            "complete": m.is_complete(),
            "block_dims": (0..=m.top()).map(|k| m.dim(k)).collect::<Vec<_>>(),
        }),
    );
    for (name, kind) in [
        ("hstar_cohomology", LieKind::CohomologyHStar),
        ("h_homology", LieKind::HomologyH),
        ("hstar_homology", LieKind::HomologyHStar),
        ("h_cohomology", LieKind::CohomologyH),
    ] {
        let rep = lie_report(&m, alg, &s.table, kind).map_err(core_err)?;
        results.insert(name.into(), lie_report_json(&rep));
    }
    report.results = serde_json::Value::Object(results);
    report.finalize_exit_code();
    Ok(report)
}

pub fn run_dirac(s: &Session) -> Result<Report, RunError> {
    let spec = s.config.module.clone().unwrap();
    let m = build_module(s, &spec)?;
    let mut report = base_report(s);
    let dirac = dirac_report(&m, &s.pin, &s.table).map_err(core_err)?;
    let emb = embedding_check(&m, &s.pin, &s.table).map_err(core_err)?;
    let in_window = |j: i64| match &s.config.r_window {
        crate::config::RWindow::Auto(_) => true,
        crate::config::RWindow::Range([lo, hi]) => j >= *lo && j <= *hi,
    };
    report.results = json!({
        "dirac": {
            "entries": dirac.entries.iter().filter(|e| in_window(e.j)).map(|e| json!({
                "r_index": e.j,
                "mults": mults_json(&e.mults),
            })).collect::<Vec<_>>(),
            "total": mults_json(&dirac.total),
            "skipped_r": dirac.skipped,
        },
        "embedding_gaps": emb.gaps.iter().map(|(l, (d, a, b))| json!({
            "genuine": l, "dirac": d, "hstar": a, "h": b,
        })).collect::<Vec<_>>(),
    });
    report.set_check(
        "embedding_inequality",
        if emb.holds {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        "",
    );
    for j in &dirac.skipped {
        report.flags.push(format!("r index {} outside the window", j));
    }
    report.finalize_exit_code();
    Ok(report)
}

pub fn run_hodge(s: &Session) -> Result<Report, RunError> {
    let spec = s.config.module.clone().unwrap();
    if spec.kind != ModuleKind::Standard {
        return Err(RunError::InvalidConfig(
            "the hodge task certifies standard modules".into(),
        ));
    }
    let window = s.config.degree_bound;
    let std = standard_module(&s.params, &s.table, &spec.sigma, window).map_err(core_err)?;
    let mut report = base_report(s);
    let form = match contravariant_form(&std) {
        Ok(f) => f,
        Err(e) => {
            report.set_check("hodge_package", CheckStatus::Inapplicable, e.to_string());
            report.finalize_exit_code();
            return Ok(report);
        }
    };
    let flags = is_unitary(&form, window).map_err(core_err)?;
    let unitary = flags.iter().all(|&b| b);
    report.results = json!({
        "unitary_through_degree": flags,
    });
    if !unitary {
        report.set_check(
            "hodge_package",
            CheckStatus::Inapplicable,
            "module is not unitary at these parameters",
        );
        report.finalize_exit_code();
        return Ok(report);
    }
    let hr = cherednik_core::cohomology::hodge_check(&std.module, &s.pin, &s.table, &form, true)
        .map_err(core_err)?;
    report.set_check(
        "hodge_package",
        if hr.all() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        format!("{:?}", hr),
    );
    report.finalize_exit_code();
    Ok(report)
}

pub fn run_vogan(s: &Session) -> Result<Report, RunError> {
    let n = s.config.degree_bound;
    if n > s.config.caps.pbw_degree {
        return Err(RunError::CapExceeded(format!(
            "requested filtration {} exceeds pbw cap {}",
            n, s.config.caps.pbw_degree
        )));
    }
    let ctx = PBWCtx::new(s.params.clone());
    let mut report = base_report(s);
    let mut certs = Vec::new();
    let mut all_ok = true;
    for kind in [DeltaKind::D, DeltaKind::Partial] {
        match verify_kernel_decomposition(&ctx, &s.pin, &s.table, n, kind) {
            Ok(cert) => {
                all_ok &= cert.directness;
                certs.push(serde_json::to_value(&cert).unwrap());
            }
            Err(Error::DecompositionFailed(m)) => {
                all_ok = false;
                certs.push(json!({"failed": m}));
            }
            Err(e) => return Err(core_err(e)),
        }
    }
    report.results = json!({ "certificates": certs });
    report.set_check(
        "vogan_decomposition",
        if all_ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        format!("filtration {}", n),
    );
    report.finalize_exit_code();
    Ok(report)
}

pub fn run_cells(s: &Session) -> Result<Report, RunError> {
    if !s.params.t.is_zero() {
        return Err(RunError::InvalidConfig("the cells task requires t = 0".into()));
    }
    let ctx = PBWCtx::new(s.params.clone());
    let mut report = base_report(s);
    let family = cherednik_core::cells::baby_family(&s.params, &s.table).map_err(core_err)?;
    let graph =
        cherednik_core::cells::decomposition_numbers(&family, &s.table).map_err(core_err)?;
    let cap = s.config.caps.pbw_degree.min(2);
    let b = cherednik_core::vogan::find_central_elements(&ctx, cap).map_err(core_err)?;
    let cells = cherednik_core::cells::cm_cells(&ctx, &family, &graph, &b).map_err(core_err)?;
    let closure =
        cherednik_core::cells::cell_closure_check(&family, &s.table, &s.pin, &cells)
            .map_err(core_err)?;
    let probe = cherednik_core::cells::restricted_center_probe(&ctx, &b).map_err(core_err)?;
    report.results = json!({
        "c": s.params.c.labels().iter().map(|l| format!("{}", s.params.c.value(l))).collect::<Vec<_>>(),
        "cells": cells.blocks,
        "provenance": format!("{:?}", cells.provenance).to_lowercase(),
        "central_element_degrees": b.weight_zero.iter().chain(b.others.iter()).map(|z| z.filtration()).collect::<Vec<_>>(),
        "linkage": graph.mults.iter().map(|((a, bb), m)| json!([a, bb, m])).collect::<Vec<_>>(),
        "restricted_center_probe": {"dim": probe.0, "full": probe.1},
        "head_dims": family.heads.iter().map(|h| h.total_dim()).collect::<Vec<_>>(),
    });
    report.set_check("cells_consistency", CheckStatus::Pass, "");
    report.set_check(
        "cell_closure",
        if closure.holds && closure.top_wedge_present {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        closure.details.join("; "),
    );
    report.finalize_exit_code();
    Ok(report)
}

pub fn run(config: JobConfig, cache_dir: Option<PathBuf>) -> Result<Report, RunError> {
    let start = std::time::Instant::now();
    let session = build_session(config, cache_dir)?;
    let mut report = match session.config.task {
        Task::GroupInfo => run_group_info(&session)?,
        Task::Cohomology => run_cohomology(&session)?,
        Task::Dirac => run_dirac(&session)?,
        Task::Hodge => run_hodge(&session)?,
        Task::Vogan => run_vogan(&session)?,
        Task::Cells => run_cells(&session)?,
        Task::VerifyAll => crate::verify::run_verify_all(&session)?,
    };
    if session.config.emit_timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}
