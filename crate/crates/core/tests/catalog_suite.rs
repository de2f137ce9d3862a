//! Cross-group integration checks: the full catalog, exterior-algebra
//! decompositions, baby Verma dimensions everywhere, chunk shapes, and the
//! error paths of the decomposition machinery.

use cherednik_core::clifford::{PinStructure, SpinorAlgebra};
use cherednik_core::cohomology::ur_split;
use cherednik_core::groups::{
    catalog, decompose_wmodule, find_reflections, GroupSpec, ParamC,
};
use cherednik_core::modules::{baby_verma, standard_module, CherednikParams};
use cherednik_core::{CycScalar, Error, ExactMatrix, SqrtConvention};

const CATALOG: [GroupSpec; 7] = [
    GroupSpec::Cyclic { m: 2 },
    GroupSpec::Cyclic { m: 3 },
    GroupSpec::Cyclic { m: 4 },
    GroupSpec::Dihedral { m: 3 },
    GroupSpec::Dihedral { m: 4 },
    GroupSpec::Symmetric { n: 3 },
    GroupSpec::Symmetric { n: 4 },
];

#[test]
fn exterior_algebra_decomposition_dihedral3() {
    let (g, table) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
    let alg = SpinorAlgebra::new(2);
    let action = |e: usize| alg.exterior_matrix(g.mat(e));
    let mults = decompose_wmodule(&g, &table, &action).unwrap();
    let expect: Vec<(String, usize)> = vec![
        ("triv".into(), 1),
        ("sign".into(), 1),
        ("refl".into(), 1),
    ];
    assert_eq!(mults, expect);
}

#[test]
fn non_representation_input_rejected() {
    let (g, table) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
    // a map that is not a homomorphism
    let bad = |e: usize| {
        if e == 0 {
            ExactMatrix::identity(1)
        } else {
            ExactMatrix::from_rows(vec![vec![CycScalar::from_int(3)]])
        }
    };
    assert!(matches!(
        decompose_wmodule(&g, &table, &bad),
        Err(Error::NonRepresentation(_))
    ));
}

#[test]
fn baby_verma_dimension_whole_catalog() {
    for spec in CATALOG {
        let (g, table) = catalog(&spec).unwrap();
        let refls = find_reflections(&g);
        let c = ParamC::constant(&refls, CycScalar::rational(1, 7));
        let params = CherednikParams::new(g.clone(), CycScalar::zero(), c);
        for irr in &table.irreps {
            let bv = baby_verma(&params, &table, &irr.label).unwrap();
            assert_eq!(
                bv.total_dim(),
                g.order() * irr.dim,
                "{:?} sigma = {}",
                spec,
                irr.label
            );
        }
    }
}

#[test]
fn pin_structures_whole_catalog() {
    for spec in CATALOG {
        let (g, _) = catalog(&spec).unwrap();
        let refls = find_reflections(&g);
        for conv in [SqrtConvention::Standard, SqrtConvention::Negated] {
            let pin = PinStructure::build(g.clone(), &refls, conv).unwrap();
            assert!(
                cherednik_core::clifford::spinor_decomposition_check(&pin),
                "{:?}",
                spec
            );
        }
    }
}

#[test]
fn chunk_lengths_bounded_by_rank() {
    let (g, table) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
    let refls = find_reflections(&g);
    let c = ParamC::constant(&refls, CycScalar::rational(1, 5));
    let params = CherednikParams::new(g, CycScalar::one(), c);
    let std = standard_module(&params, &table, "refl", 5).unwrap();
    let alg = SpinorAlgebra::new(2);
    for ur in ur_split(&std.module, &alg) {
        assert!(ur.blocks.len() <= params.rank() + 1);
        // blocks are consecutive in the wedge degree
        for pair in ur.blocks.windows(2) {
            assert_eq!(pair[1].1, pair[0].1 + 1);
            assert_eq!(pair[1].0, pair[0].0 + 1);
        }
    }
}
