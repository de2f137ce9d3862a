//! Property suites over randomized inputs: exact field arithmetic, kernel
//! and subspace identities, and the bulk invariants of the symbolic engine.

use proptest::prelude::*;

use cherednik_core::groups::{catalog, find_reflections, GroupSpec, ParamC};
use cherednik_core::modules::CherednikParams;
use cherednik_core::scalars::rat;
use cherednik_core::vogan::{delta, ASpace, DeltaKind, PBWCtx, TensorElem};
use cherednik_core::{CycScalar, ExactMatrix, Subspace};

fn arb_scalar() -> impl Strategy<Value = CycScalar> {
    // small cyclotomic combinations over a handful of conductors
    (
        prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 12]),
        -4i64..=4,
        -3i64..=3,
        1i64..=3,
    )
        .prop_map(|(n, k, p, q)| {
            CycScalar::root_of_unity(n, k)
                .scale(&rat(p, q))
                .add_ref(&CycScalar::rational(k, q))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// (a * b) * a^{-1} = b whenever a != 0, exactly.
    #[test]
    fn scalar_mul_inverse_roundtrip(a in arb_scalar(), b in arb_scalar()) {
        prop_assume!(!a.is_zero());
        let ab = a.mul_ref(&b);
        let back = ab.mul_ref(&a.inv().unwrap());
        prop_assert_eq!(back, b);
    }

    /// Field axioms on triples: distributivity and associativity.
    #[test]
    fn scalar_ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        let lhs = a.mul_ref(&b.add_ref(&c));
        let rhs = a.mul_ref(&b).add_ref(&a.mul_ref(&c));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
    }
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |entries| {
        ExactMatrix::from_fn(rows, cols, |r, c| CycScalar::from_int(entries[r * cols + c]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// M * kernel_basis(M) = 0 exactly and rank + nullity = cols.
    #[test]
    fn kernel_identity(m in arb_matrix(4, 5)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in kernel {
            prop_assert!(m.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    /// dim(A + B) + dim(A cap B) = dim A + dim B.
    #[test]
    fn subspace_dimension_formula(a in arb_matrix(3, 4), b in arb_matrix(2, 4)) {
        let sa = Subspace::from_vectors(4, &(0..a.rows()).map(|r| a.row(r)).collect::<Vec<_>>());
        let sb = Subspace::from_vectors(4, &(0..b.rows()).map(|r| b.row(r)).collect::<Vec<_>>());
        let sum = sa.sum(&sb).unwrap().dim();
        let cap = sa.intersect(&sb).unwrap().dim();
        prop_assert_eq!(sum + cap, sa.dim() + sb.dim());
    }

    /// Random vector families in the plane: the sum of spans has rank at
    /// most 2, matching the rank oracle on the stacked matrix.
    #[test]
    fn planar_spans_match_rank_oracle(m in arb_matrix(3, 2)) {
        let vecs: Vec<Vec<CycScalar>> = (0..3).map(|r| m.row(r)).collect();
        let span = Subspace::from_vectors(2, &vecs);
        prop_assert!(span.dim() <= 2);
        prop_assert_eq!(span.dim(), m.rank());
    }
}

/// The two difference operators are odd derivations and square to zero on
/// 100 random weight-zero elements.
#[test]
fn difference_operators_square_zero_bulk() {
    let (g, _) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
    let refls = find_reflections(&g);
    let c = ParamC::constant(&refls, CycScalar::rational(2, 7));
    let params = CherednikParams::new(g, CycScalar::one(), c);
    let ctx = PBWCtx::new(params.clone());
    let space = ASpace::new(&params, 2, 0);
    let mut state: u64 = 0xfeed_beef;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    for trial in 0..100 {
        let mut v = vec![CycScalar::zero(); space.dim()];
        for _ in 0..3 {
            let i = next() % space.dim();
            v[i] = CycScalar::from_int((next() % 5) as i64 - 2);
        }
        let a = space.elem_of(&v);
        for kind in [DeltaKind::D, DeltaKind::Partial] {
            let da = delta(&ctx, kind, &a);
            assert!(
                delta(&ctx, kind, &da).is_zero(),
                "delta^2 != 0 at trial {}",
                trial
            );
            assert!(da.filtration() <= a.filtration() + 1);
        }
        // odd derivation on a random product
        let mut u = vec![CycScalar::zero(); space.dim()];
        u[next() % space.dim()] = CycScalar::one();
        let b = space.elem_of(&u);
        let (ae, ao) = a.parity_parts();
        let eps_a = ae.sub(&ao);
        for kind in [DeltaKind::D, DeltaKind::Partial] {
            let lhs = delta(&ctx, kind, &a.mul(&ctx, &b));
            let rhs = delta(&ctx, kind, &a)
                .mul(&ctx, &b)
                .add(&eps_a.mul(&ctx, &delta(&ctx, kind, &b)));
            assert_eq!(lhs, rhs, "derivation rule fails at trial {}", trial);
        }
    }
    let _ = TensorElem::zero(1);
}
