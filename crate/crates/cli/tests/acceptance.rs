//! Acceptance suite: one test per criterion, each driving the engine at the
//! stated scale with zero tolerance (all arithmetic is exact). Every test
//! prints one pass line; the structural bundle and the conjecture
//! observations run through the verify-all harness.

use cherednik_core::cells;
use cherednik_core::clifford::PinStructure;
use cherednik_core::cohomology::{dirac_report, hodge_check, lie_report, LieKind, MultVec};
use cherednik_core::groups::{
    catalog, find_reflections, tensor_with_det_h, GroupSpec, IrrepTable, ParamC,
};
use cherednik_core::modules::{
    contravariant_form, is_unitary, simple_quotient, standard_module, CherednikParams,
};
use cherednik_core::vogan::{
    casselman_osborne_check, find_central_elements, verify_kernel_decomposition, DeltaKind,
    PBWCtx,
};
use cherednik_core::{CycScalar, SqrtConvention};

use cherednik_dirac::config::{CParam, Caps, JobConfig, OutputKind, RWindow, Task};
use cherednik_dirac::report::CheckStatus;
use cherednik_dirac::tasks::build_session;
use cherednik_dirac::verify::run_verify_all;

const MATRIX: [GroupSpec; 5] = [
    GroupSpec::Cyclic { m: 2 },
    GroupSpec::Cyclic { m: 3 },
    GroupSpec::Cyclic { m: 4 },
    GroupSpec::Dihedral { m: 3 },
    GroupSpec::Dihedral { m: 4 },
];

fn params_for(
    spec: &GroupSpec,
    t: i64,
    c: (i64, i64),
) -> (CherednikParams, IrrepTable, PinStructure) {
    let (g, table) = catalog(spec).unwrap();
    let refls = find_reflections(&g);
    let pc = ParamC::constant(&refls, CycScalar::rational(c.0, c.1));
    let params = CherednikParams::new(g.clone(), CycScalar::from_int(t), pc);
    let pin = PinStructure::build(g, &refls, SqrtConvention::Standard).unwrap();
    (params, table, pin)
}

fn single(label: &str) -> MultVec {
    [(label.to_string(), 1usize)].into_iter().collect()
}

/// Criterion 1: for every group in the matrix and every lowest weight, at
/// t = 1, c = 1/5 on all classes, the h*-homology of the standard module is
/// the lowest weight in degree zero and nothing else.
#[test]
fn criterion_1_standard_module_cohomology() {
    for spec in MATRIX {
        let (params, table, pin) = params_for(&spec, 1, (1, 5));
        for irr_label in table.labels() {
            let std = standard_module(&params, &table, irr_label, 6).unwrap();
            let rep = lie_report(
                &std.module,
                pin.alg.as_ref(),
                &table,
                LieKind::HomologyHStar,
            )
            .unwrap();
            assert_eq!(
                rep.total_for_p(0),
                single(irr_label),
                "{:?} sigma = {}",
                spec,
                irr_label
            );
            for p in 1..=params.rank() {
                assert!(
                    rep.total_for_p(p).is_empty(),
                    "{:?} sigma = {} has cohomology in degree {}",
                    spec,
                    irr_label,
                    p
                );
            }
        }
    }
    println!("criterion 1 (standard module cohomology): PASS");
}

/// Criterion 2: the Dirac cohomology of every standard module in the same
/// matrix is the lowest weight twisted by the inverse genuine character.
#[test]
fn criterion_2_standard_module_dirac() {
    for spec in MATRIX {
        let (params, table, pin) = params_for(&spec, 1, (1, 5));
        let twist = tensor_with_det_h(&params.group, &table);
        for irr_label in table.labels() {
            let std = standard_module(&params, &table, irr_label, 6).unwrap();
            let dr = dirac_report(&std.module, &pin, &table).unwrap();
            // sigma (x) chi^{-1} carries the genuine label sigma (x) det_h
            let expected_label = twist
                .iter()
                .find(|(a, _)| a == irr_label)
                .map(|(_, b)| b.clone())
                .unwrap();
            assert_eq!(
                dr.total,
                single(&expected_label),
                "{:?} sigma = {}",
                spec,
                irr_label
            );
        }
    }
    println!("criterion 2 (standard module Dirac cohomology): PASS");
}

/// Criterion 3: the finite-dimensional simple quotient for the rank-one
/// Weyl group at c = 3/2. The expected dimension comes from the
/// independent lowering-recursion oracle
/// y x^k = (k t - c (1 - (-1)^k)) x^{k-1}.
#[test]
fn criterion_3_finite_dimensional_ltriv() {
    let (params, table, pin) = params_for(&GroupSpec::Cyclic { m: 2 }, 1, (3, 2));
    // oracle: first zero of the recursion
    let oracle_dim = {
        let t = CycScalar::one();
        let c = CycScalar::rational(3, 2);
        (1i64..100)
            .find(|&k| {
                let parity = if k % 2 == 0 { 0 } else { 2 };
                CycScalar::from_int(k)
                    .mul_ref(&t)
                    .sub_ref(&c.mul_ref(&CycScalar::from_int(parity)))
                    .is_zero()
            })
            .unwrap() as usize
    };
    assert_eq!(oracle_dim, 3);
    let std = standard_module(&params, &table, "triv", 8).unwrap();
    let l = simple_quotient(&std.module, &table).unwrap().module;
    assert!(l.is_complete());
    assert_eq!(l.total_dim(), oracle_dim);
    // H_i(h*, L(triv)) = wedge^i h for i = 0, 1
    let rep = lie_report(&l, pin.alg.as_ref(), &table, LieKind::HomologyHStar).unwrap();
    assert_eq!(rep.total_for_p(0), single("triv"));
    assert_eq!(rep.total_for_p(1), single("sign"));
    // H_D(L(triv)) = wedge h (x) chi^{-1}: exactly two one-dimensional
    // genuine classes
    let dr = dirac_report(&l, &pin, &table).unwrap();
    let expected: MultVec = [("triv".to_string(), 1), ("sign".to_string(), 1)]
        .into_iter()
        .collect();
    assert_eq!(dr.total, expected);
    println!("criterion 3 (finite-dimensional simple quotient): PASS");
}

/// The documented rational scan grid for the unitarity search.
const UNITARY_GRID: [(i64, i64); 6] = [(1, 10), (1, 8), (1, 6), (1, 5), (1, 4), (1, 3)];

/// Criterion 4: the Hodge package at c = 0 and at one nonzero certified
/// unitary parameter per group, through degree 8.
#[test]
fn criterion_4_hodge_package() {
    for spec in [GroupSpec::Cyclic { m: 2 }, GroupSpec::Dihedral { m: 3 }] {
        // find the nonzero unitary c by scanning the documented grid
        let mut unitary_c = None;
        'scan: for c in UNITARY_GRID {
            let (params, table, _) = params_for(&spec, 1, c);
            for sig in table.labels() {
                let std = standard_module(&params, &table, sig, 8).unwrap();
                let form = match contravariant_form(&std) {
                    Ok(f) => f,
                    Err(_) => continue 'scan,
                };
                if !is_unitary(&form, 8).unwrap().iter().all(|&b| b) {
                    continue 'scan;
                }
            }
            unitary_c = Some(c);
            break;
        }
        let unitary_c = unitary_c.expect("the scan grid contains a unitary parameter");
        for c in [(0, 1), unitary_c] {
            let (params, table, pin) = params_for(&spec, 1, c);
            for sig in table.labels() {
                let std = standard_module(&params, &table, sig, 8).unwrap();
                let form = contravariant_form(&std).unwrap();
                assert!(is_unitary(&form, 8).unwrap().iter().all(|&b| b));
                let hr = hodge_check(&std.module, &pin, &table, &form, true).unwrap();
                assert!(
                    hr.all(),
                    "{:?} sigma = {} c = {:?}: {:?}",
                    spec,
                    sig,
                    c,
                    hr
                );
            }
        }
    }
    println!("criterion 4 (Hodge package at unitary parameters): PASS");
}

/// Criterion 5: the kernel decomposition for the rank-one groups through
/// filtration 3, for both difference operators, with serialized witnesses.
#[test]
fn criterion_5_vogan_decomposition() {
    for spec in [GroupSpec::Cyclic { m: 2 }, GroupSpec::Cyclic { m: 3 }] {
        let (params, table, pin) = params_for(&spec, 1, (1, 5));
        let ctx = PBWCtx::new(params);
        for kind in [DeltaKind::D, DeltaKind::Partial] {
            for n in 0..=3usize {
                let cert = verify_kernel_decomposition(&ctx, &pin, &table, n, kind)
                    .unwrap_or_else(|e| {
                        panic!("{:?} filtration {} {:?}: {}", spec, n, kind, e)
                    });
                assert!(cert.directness, "{:?} n = {}", spec, n);
                assert_eq!(cert.witnesses.len(), cert.kernel_dim);
                // witnesses serialize into the documented JSON grammar
                let json = serde_json::to_string(&cert).unwrap();
                assert!(json.contains("witnesses"));
            }
        }
    }
    println!("criterion 5 (kernel decomposition certificates): PASS");
}

/// Criterion 6: central-character compatibility at t = 0 for the rank-one
/// Weyl group and the rank-two dihedral group, with central elements of
/// degree at most 2 found by the commutant solve, on every baby Verma and
/// every simple head.
#[test]
fn criterion_6_casselman_osborne() {
    for (spec, c) in [
        (GroupSpec::Cyclic { m: 2 }, (1i64, 2i64)),
        (GroupSpec::Dihedral { m: 3 }, (1, 5)),
    ] {
        let (params, table, pin) = params_for(&spec, 0, c);
        let ctx = PBWCtx::new(params.clone());
        let b = find_central_elements(&ctx, 2).unwrap();
        assert!(
            b.weight_zero.iter().any(|z| z.filtration() > 0),
            "{:?}: no nonscalar weight-zero central element of degree <= 2",
            spec
        );
        let family = cells::baby_family(&params, &table).unwrap();
        for m in family.vermas.iter().chain(family.heads.iter()) {
            let co = casselman_osborne_check(&ctx, &pin, &table, &b, m).unwrap();
            assert!(co.holds, "{:?}: {:?}", spec, co.details);
        }
    }
    println!("criterion 6 (central character compatibility): PASS");
}

/// Criterion 7: cells. Rank one: singletons at the three sampled nonzero
/// parameters and the coarsened linkage partition at c = 0; dihedral: the
/// cohomology of every head stays in its cell (after the determinant
/// twist) and the top-wedge constituent is always present, over a 5-point
/// grid.
#[test]
fn criterion_7_cells() {
    // rank one
    for c in [(1i64, 5i64), (1, 2), (1, 1)] {
        let (params, table, pin) = params_for(&GroupSpec::Cyclic { m: 2 }, 0, c);
        let ctx = PBWCtx::new(params.clone());
        let family = cells::baby_family(&params, &table).unwrap();
        let graph = cells::decomposition_numbers(&family, &table).unwrap();
        let b = find_central_elements(&ctx, 2).unwrap();
        let partition = cells::cm_cells(&ctx, &family, &graph, &b).unwrap();
        assert_eq!(partition.blocks.len(), 2, "c = {:?}", c);
        assert_eq!(partition.provenance, cells::Provenance::Both);
        let closure = cells::cell_closure_check(&family, &table, &pin, &partition).unwrap();
        assert!(closure.holds && closure.top_wedge_present);
    }
    // c = 0 coarsens, matching the linkage oracle
    {
        let (params, table, _) = params_for(&GroupSpec::Cyclic { m: 2 }, 0, (0, 1));
        let ctx = PBWCtx::new(params.clone());
        let family = cells::baby_family(&params, &table).unwrap();
        let graph = cells::decomposition_numbers(&family, &table).unwrap();
        let linkage = graph.components();
        assert_eq!(linkage.len(), 1);
        let b = find_central_elements(&ctx, 2).unwrap();
        let partition = cells::cm_cells(&ctx, &family, &graph, &b).unwrap();
        assert_eq!(partition.blocks, linkage);
    }
    // dihedral grid
    for c in [(1i64, 5i64), (1, 3), (1, 2), (2, 3), (1, 1)] {
        let (params, table, pin) = params_for(&GroupSpec::Dihedral { m: 3 }, 0, c);
        let ctx = PBWCtx::new(params.clone());
        let family = cells::baby_family(&params, &table).unwrap();
        let graph = cells::decomposition_numbers(&family, &table).unwrap();
        let b = find_central_elements(&ctx, 2).unwrap();
        let partition = cells::cm_cells(&ctx, &family, &graph, &b).unwrap();
        let closure = cells::cell_closure_check(&family, &table, &pin, &partition).unwrap();
        assert!(closure.holds, "c = {:?}: {:?}", c, closure.details);
        assert!(closure.top_wedge_present, "c = {:?}", c);
    }
    println!("criterion 7 (cell partitions and closure): PASS");
}

fn verify_all_report(spec: &GroupSpec, t: &str, c: &str) -> cherednik_dirac::report::Report {
    let config = JobConfig {
        schema: "jobconfig/1".to_string(),
        group: spec.clone(),
        t: t.to_string(),
        c: CParam::Constant(c.to_string()),
        task: Task::VerifyAll,
        module: None,
        degree_bound: 6,
        r_window: RWindow::Auto("auto".to_string()),
        output: OutputKind::Json,
        threads: 1,
        caps: Caps {
            pbw_degree: 3,
            group_order: 48,
        },
        emit_timing: false,
    };
    let session = build_session(config, Some(std::env::temp_dir().join("cherednik-accept-cache")))
        .unwrap();
    run_verify_all(&session).unwrap()
}

/// Criterion 8: the structural property suites, bundled into verify-all,
/// pass for every group of the matrix.
#[test]
fn criterion_8_structural_suites() {
    let structural = [
        "defining_relation",
        "euler_grading",
        "koszul_structure",
        "basis_change_invariance",
        "poincare_duality",
        "halfdirac_identification",
        "spinor_decomposition",
        "rescaling_invariance",
        "sign_convention_independence",
        "standard_cohomology",
        "dirac_standard",
        "embedding_inequality",
        "vogan_decomposition",
    ];
    for spec in MATRIX {
        let report = verify_all_report(&spec, "1", "1/5");
        for id in structural {
            let verdict = report
                .checks
                .get(id)
                .unwrap_or_else(|| panic!("{:?} missing check {}", spec, id));
            assert_eq!(
                verdict.status,
                CheckStatus::Pass,
                "{:?} check {}: {:?}",
                spec,
                id,
                verdict
            );
        }
        assert_eq!(report.exit_code, 0, "{:?}", spec);
    }
    println!("criterion 8 (structural suites through verify-all): PASS");
}

/// Criterion 9: the two open questions are computed and reported as
/// observations for every simple module in the matrix, never as pass/fail
/// gates.
#[test]
fn criterion_9_conjecture_monitoring() {
    for spec in [GroupSpec::Cyclic { m: 2 }, GroupSpec::Dihedral { m: 3 }] {
        let report = verify_all_report(&spec, "1", "1/5");
        let v = report.checks.get("conjecture_simple_modules").unwrap();
        assert!(
            matches!(
                v.status,
                CheckStatus::ObservedTrue | CheckStatus::ObservedFalse
            ),
            "{:?}",
            v
        );
        let report0 = verify_all_report(&spec, "0", "1/5");
        let v0 = report0.checks.get("conjecture_baby_heads").unwrap();
        assert!(
            matches!(
                v0.status,
                CheckStatus::ObservedTrue | CheckStatus::ObservedFalse
            ),
            "{:?}",
            v0
        );
        // at this scale both observations come out true
        assert_eq!(v.status, CheckStatus::ObservedTrue);
        assert_eq!(v0.status, CheckStatus::ObservedTrue);
    }
    println!("criterion 9 (conjecture monitoring): PASS");
}
