//! t = 0 analysis: baby Verma decomposition numbers by exact radical
//! peeling, central characters through the computed bounded-degree central
//! elements, and the resulting cell partition of the irreducibles with its
//! two independent computations braced against each other.

use std::collections::BTreeMap;

use crate::clifford::PinStructure;
use crate::cohomology::{lie_report, LieKind, MultVec};
use crate::error::{Error, Result};
use crate::groups::{tensor_with_det_h, tensor_with_det_hstar, IrrepTable};
use crate::linalg::{ExactMatrix, Subspace};
use crate::modules::{baby_verma, simple_quotient, CherednikParams, GradedModule};
use crate::scalars::CycScalar;
use crate::vogan::{central_scalar, CentralSubalgebra, PBWCtx};

/// All baby Vermas and their simple heads, in irrep-table order.
pub struct BabyFamily {
    pub sigmas: Vec<String>,
    pub vermas: Vec<GradedModule>,
    pub heads: Vec<GradedModule>,
}

pub fn baby_family(params: &CherednikParams, table: &IrrepTable) -> Result<BabyFamily> {
    let mut sigmas = Vec::new();
    let mut vermas = Vec::new();
    let mut heads = Vec::new();
    for irr in &table.irreps {
        let bv = baby_verma(params, table, &irr.label)?;
        let head = simple_quotient(&bv, table)?.module;
        sigmas.push(irr.label.clone());
        vermas.push(bv);
        heads.push(head);
    }
    Ok(BabyFamily {
        sigmas,
        vermas,
        heads,
    })
}

/// Basis of graded module homomorphisms N -> L shifted up by `shift`
/// (phi maps N_k to L_{k - shift}), as one block matrix per degree of N.
pub fn graded_hom_basis(
    n_mod: &GradedModule,
    l_mod: &GradedModule,
    shift: usize,
) -> Vec<Vec<ExactMatrix>> {
    assert!(n_mod.is_complete() && l_mod.is_complete());
    let rank = n_mod.params.rank();
    let g = &n_mod.params.group;
    let topn = n_mod.top();
    let ldim = |k: i64| -> usize {
        if k < 0 || k as usize > l_mod.top() {
            0
        } else {
            l_mod.dim(k as usize)
        }
    };
    // flat unknown index per (k, row in L-block, col in N-block)
    let mut offsets = Vec::new();
    let mut total = 0usize;
    for k in 0..=topn {
        offsets.push(total);
        total += ldim(k as i64 - shift as i64) * n_mod.dim(k);
    }
    if total == 0 {
        return Vec::new();
    }
    let var = |k: usize, r: usize, c: usize| -> usize {
        offsets[k] + r * n_mod.dim(k) + c
    };
    let mut rows: Vec<Vec<(usize, CycScalar)>> = Vec::new();
    let mut push_eq = |eq: Vec<(usize, CycScalar)>| {
        if !eq.is_empty() {
            rows.push(eq);
        }
    };
    for k in 0..=topn {
        let lk = k as i64 - shift as i64;
        // W-equivariance: phi_k W^N(w) - W^L(w) phi_k = 0
        for &w in g.generators() {
            let wn = n_mod.w_op(k, w);
            for r in 0..ldim(lk) {
                for c in 0..n_mod.dim(k) {
                    let mut eq = Vec::new();
                    for m in 0..n_mod.dim(k) {
                        let coef = wn.at(m, c);
                        if !coef.is_zero() {
                            eq.push((var(k, r, m), coef.clone()));
                        }
                    }
                    let wl = l_mod.w_op(lk as usize, w);
                    for m in 0..ldim(lk) {
                        let coef = wl.at(r, m);
                        if !coef.is_zero() {
                            eq.push((var(k, m, c), coef.neg_ref()));
                        }
                    }
                    push_eq(eq);
                }
            }
        }
        // x-equivariance: phi_{k+1} X^N_k = X^L phi_k
        for i in 0..rank {
            let xn = if k < topn {
                n_mod.x_op(k, i).cloned()
            } else {
                Some(ExactMatrix::zero(0, n_mod.dim(k)))
            };
            let Some(xn) = xn else { continue };
            for r in 0..ldim(lk + 1) {
                for c in 0..n_mod.dim(k) {
                    let mut eq = Vec::new();
                    if k < topn {
                        for m in 0..n_mod.dim(k + 1) {
                            let coef = xn.at(m, c);
                            if !coef.is_zero() {
                                eq.push((var(k + 1, r, m), coef.clone()));
                            }
                        }
                    }
                    if lk >= 0 && (lk as usize) < l_mod.top() + 1 {
                        if let Some(xl) = if (lk as usize) < l_mod.top() {
                            l_mod.x_op(lk as usize, i)
                        } else {
                            None
                        } {
                            for m in 0..ldim(lk) {
                                let coef = xl.at(r, m);
                                if !coef.is_zero() {
                                    eq.push((var(k, m, c), coef.neg_ref()));
                                }
                            }
                        }
                    }
                    push_eq(eq);
                }
            }
        }
        // y-equivariance: phi_{k-1} Y^N_k = Y^L phi_k
        if k > 0 {
            for i in 0..rank {
                let yn = n_mod.y_op(k, i);
                for r in 0..ldim(lk - 1) {
                    for c in 0..n_mod.dim(k) {
                        let mut eq = Vec::new();
                        for m in 0..n_mod.dim(k - 1) {
                            let coef = yn.at(m, c);
                            if !coef.is_zero() {
                                eq.push((var(k - 1, r, m), coef.clone()));
                            }
                        }
                        if lk >= 1 && (lk as usize) <= l_mod.top() {
                            let yl = l_mod.y_op(lk as usize, i);
                            for m in 0..ldim(lk) {
                                let coef = yl.at(r, m);
                                if !coef.is_zero() {
                                    eq.push((var(k, m, c), coef.neg_ref()));
                                }
                            }
                        }
                        push_eq(eq);
                    }
                }
            }
        }
    }
    let mut mat = ExactMatrix::zero(rows.len(), total);
    for (ri, eq) in rows.iter().enumerate() {
        for (ci, coef) in eq {
            let cur = mat.at(ri, *ci).add_ref(coef);
            mat.set(ri, *ci, cur);
        }
    }
    let kernel = mat.kernel_basis();
    kernel
        .into_iter()
        .map(|v| {
            (0..=topn)
                .map(|k| {
                    let lk = k as i64 - shift as i64;
                    ExactMatrix::from_fn(ldim(lk), n_mod.dim(k), |r, c| {
                        v[var(k, r, c)].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// The radical of a finite graded module: the intersection of the kernels
/// of all graded homomorphisms onto shifted simple heads.
fn radical_subspaces(
    n_mod: &GradedModule,
    heads: &[GradedModule],
) -> Vec<Subspace> {
    let topn = n_mod.top();
    let mut rad: Vec<Subspace> = (0..=topn).map(|k| Subspace::full(n_mod.dim(k))).collect();
    for l_mod in heads {
        for shift in 0..=topn {
            for phi in graded_hom_basis(n_mod, l_mod, shift) {
                for k in 0..=topn {
                    if phi[k].rows() == 0 {
                        continue;
                    }
                    let ker = Subspace::from_kernel(&phi[k]);
                    rad[k] = rad[k].intersect(&ker).unwrap();
                }
            }
        }
    }
    rad
}

/// Restrict a module to a generator-stable family of subspaces.
fn submodule_module(m: &GradedModule, j: &[Subspace]) -> Result<GradedModule> {
    let n = m.params.rank();
    let g = &m.params.group;
    let top = m.top();
    let section: Vec<ExactMatrix> = (0..=top)
        .map(|k| {
            if j[k].dim() == 0 {
                ExactMatrix::zero(m.dim(k), 0)
            } else {
                ExactMatrix::from_cols(j[k].basis_vectors())
            }
        })
        .collect();
    let restrict = |mat: &ExactMatrix, from: usize, to: usize| -> Result<ExactMatrix> {
        let img = mat.matmul(&section[from]);
        section[to].solve_matrix(&img).ok_or_else(|| {
            Error::InvariantViolation("subspaces are not generator-stable".into())
        })
    };
    let mut blocks = Vec::new();
    for k in 0..=top {
        let w = (0..g.order())
            .map(|e| restrict(m.w_op(k, e), k, k))
            .collect::<Result<Vec<_>>>()?;
        let x = if k < top {
            Some(
                (0..n)
                    .map(|i| restrict(m.x_op(k, i).unwrap(), k, k + 1))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            Some((0..n).map(|_| ExactMatrix::zero(0, j[k].dim())).collect())
        };
        let y = (0..n)
            .map(|i| {
                if k == 0 {
                    Ok(ExactMatrix::zero(0, j[k].dim()))
                } else {
                    restrict(m.y_op(k, i), k, k - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.push(crate::modules::Block {
            dim: j[k].dim(),
            w,
            x,
            y,
            omega: None,
        });
    }
    crate::modules::GradedModule::from_parts(m.params.clone(), blocks, true)
}

/// Composition multiplicities [baby Verma : head] (graded shifts summed),
/// computed by iterated radical peeling. Each layer is identified through
/// the graded hom spaces onto the head models.
pub struct LinkageGraph {
    pub sigmas: Vec<String>,
    /// mults[(row sigma, col tau)] = [verma(sigma) : head(tau)]
    pub mults: BTreeMap<(String, String), usize>,
}

pub fn decomposition_numbers(
    family: &BabyFamily,
    table: &IrrepTable,
) -> Result<LinkageGraph> {
    // Schur certificate: each head has a one-dimensional endomorphism space
    for head in &family.heads {
        let endo = graded_hom_basis(head, head, 0);
        if endo.len() != 1 {
            return Err(Error::InvariantViolation(
                "head endomorphism space is not one-dimensional".into(),
            ));
        }
    }
    let mut mults = BTreeMap::new();
    for (si, sigma) in family.sigmas.iter().enumerate() {
        let mut layer = family.vermas[si].clone();
        let mut acc: BTreeMap<String, usize> = BTreeMap::new();
        loop {
            if layer.total_dim() == 0 {
                break;
            }
            let mut layer_total = 0usize;
            for (ti, tau) in family.sigmas.iter().enumerate() {
                let mut count = 0usize;
                for shift in 0..=layer.top() {
                    count += graded_hom_basis(&layer, &family.heads[ti], shift).len();
                }
                if count > 0 {
                    *acc.entry(tau.clone()).or_insert(0) += count;
                    layer_total += count * family.heads[ti].total_dim();
                }
            }
            if layer_total == 0 {
                return Err(Error::InvariantViolation(
                    "radical layer has no identifiable head".into(),
                ));
            }
            let rad = radical_subspaces(&layer, &family.heads);
            let next = submodule_module(&layer, &rad)?;
            if next.total_dim() == layer.total_dim() {
                return Err(Error::InvariantViolation(
                    "radical did not shrink".into(),
                ));
            }
            if next.total_dim() + layer_total != layer.total_dim() {
                return Err(Error::InvariantViolation(
                    "radical layer dimensions do not add up".into(),
                ));
            }
            layer = next;
        }
        // diagonal entry at least one (the head itself)
        if acc.get(sigma).copied().unwrap_or(0) == 0 {
            return Err(Error::InvariantViolation(
                "verma lost its own head".into(),
            ));
        }
        // bookkeeping: sum of multiplicities times head dimensions
        let total: usize = acc
            .iter()
            .map(|(tau, m)| {
                let ti = family.sigmas.iter().position(|s| s == tau).unwrap();
                m * family.heads[ti].total_dim()
            })
            .sum();
        let dim_sigma = table.by_label(sigma)?.dim;
        if total != family.vermas[si].params.group.order() * dim_sigma {
            return Err(Error::InvariantViolation(format!(
                "composition factors of {} have total dimension {}",
                sigma, total
            )));
        }
        for (tau, m) in acc {
            mults.insert((sigma.clone(), tau), m);
        }
    }
    Ok(LinkageGraph {
        sigmas: family.sigmas.clone(),
        mults,
    })
}

impl LinkageGraph {
    /// Connected components of the bipartite multiplicity graph.
    pub fn components(&self) -> Vec<Vec<String>> {
        let n = self.sigmas.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for ((a, b), m) in &self.mults {
            if *m == 0 {
                continue;
            }
            let ia = self.sigmas.iter().position(|s| s == a).unwrap();
            let ib = self.sigmas.iter().position(|s| s == b).unwrap();
            let ra = find(&mut parent, ia);
            let rb = find(&mut parent, ib);
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(self.sigmas[i].clone());
        }
        let mut out: Vec<Vec<String>> = groups.into_values().collect();
        for g in &mut out {
            g.sort();
        }
        out.sort();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Linkage,
    Theta,
    Both,
}

#[derive(Clone, Debug)]
pub struct CellPartition {
    pub blocks: Vec<Vec<String>>,
    pub provenance: Provenance,
}

/// The cell partition at t = 0: fibers of the central-character vector on
/// the baby Vermas, braced against the connected components of the linkage
/// graph. Linkage always refines the computed fibers (central scalars are
/// constant on linkage classes); the emitted partition is the common one
/// when the bounded-degree central elements separate the linkage classes,
/// and the linkage partition otherwise.
pub fn cm_cells(
    ctx: &PBWCtx,
    family: &BabyFamily,
    graph: &LinkageGraph,
    b: &CentralSubalgebra,
) -> Result<CellPartition> {
    // theta fibers
    let mut theta_vals: Vec<Vec<CycScalar>> = Vec::new();
    for bv in &family.vermas {
        let mut vals = Vec::new();
        for z in b.weight_zero.iter().chain(b.others.iter()) {
            vals.push(central_scalar(ctx, z, bv)?);
        }
        theta_vals.push(vals);
    }
    let nsig = family.sigmas.len();
    let mut theta_blocks: Vec<Vec<String>> = Vec::new();
    let mut assigned = vec![false; nsig];
    for i in 0..nsig {
        if assigned[i] {
            continue;
        }
        let mut block = vec![family.sigmas[i].clone()];
        assigned[i] = true;
        for j in i + 1..nsig {
            if !assigned[j] && theta_vals[i] == theta_vals[j] {
                block.push(family.sigmas[j].clone());
                assigned[j] = true;
            }
        }
        block.sort();
        theta_blocks.push(block);
    }
    theta_blocks.sort();
    let linkage_blocks = graph.components();
    // linkage must refine theta: every linkage class lies in one theta fiber
    for lb in &linkage_blocks {
        let fiber = theta_blocks.iter().find(|tb| tb.contains(&lb[0]));
        let Some(fiber) = fiber else {
            return Err(Error::InvariantViolation("missing theta fiber".into()));
        };
        for s in lb {
            if !fiber.contains(s) {
                return Err(Error::InvariantViolation(
                    "central scalars are not constant on a linkage class".into(),
                ));
            }
        }
    }
    if theta_blocks == linkage_blocks {
        Ok(CellPartition {
            blocks: theta_blocks,
            provenance: Provenance::Both,
        })
    } else {
        Ok(CellPartition {
            blocks: linkage_blocks,
            provenance: Provenance::Linkage,
        })
    }
}

/// Dimension of the span of the found central elements modulo the ideal
/// generated by positive-degree two-sided invariants, within the bounded
/// PBW window: a lower bound for the dimension of the restricted center,
/// capped by |W| (exactness of the bound is flagged when it is attained).
pub fn restricted_center_probe(ctx: &PBWCtx, b: &CentralSubalgebra) -> Result<(usize, bool)> {
    let cap = b.degree_cap;
    let n = ctx.params.rank();
    let g = &ctx.params.group;
    // m_+ H within the window: products (invariant of degree e) * monomial
    let mut ideal_vecs: Vec<crate::vogan::PBWElem> = Vec::new();
    for e in 1..=cap {
        for dual in [true, false] {
            for f in crate::modules::invariant_polynomials(g, e, dual) {
                let mut fp = crate::vogan::PBWElem::zero(n);
                for (a, coef) in f.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let mono = &crate::modules::monomials(n, e)[a];
                    let m = if dual {
                        crate::vogan::PBWMono {
                            ys: vec![0; n],
                            w: 0,
                            xs: mono.clone(),
                        }
                    } else {
                        crate::vogan::PBWMono {
                            ys: mono.clone(),
                            w: 0,
                            xs: vec![0; n],
                        }
                    };
                    let mut single = crate::vogan::PBWElem::zero(n);
                    single.terms.insert(m, coef.clone());
                    fp = fp.add(&single);
                }
                // multiply by every monomial of complementary filtration
                for da in 0..=(cap - e) {
                    for db in 0..=(cap - e - da) {
                        for a in crate::modules::monomials(n, da) {
                            for bb in crate::modules::monomials(n, db) {
                                for w in 0..g.order() {
                                    let mut mono = crate::vogan::PBWElem::zero(n);
                                    mono.terms.insert(
                                        crate::vogan::PBWMono {
                                            ys: a.clone(),
                                            w,
                                            xs: bb.clone(),
                                        },
                                        CycScalar::one(),
                                    );
                                    ideal_vecs.push(ctx.mul(&fp, &mono));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // coordinates over the bounded PBW space
    let coord = |e: &crate::vogan::PBWElem| -> Result<Vec<CycScalar>> {
        let space = pbw_space_coords(ctx, cap)?;
        let mut v = vec![CycScalar::zero(); space.len()];
        for (m, c) in &e.terms {
            let idx = space
                .iter()
                .position(|mm| mm == m)
                .ok_or_else(|| Error::CapExceeded("outside the PBW window".into()))?;
            v[idx] = c.clone();
        }
        Ok(v)
    };
    let space = pbw_space_coords(ctx, cap)?;
    let dim = space.len();
    let ideal_sub = Subspace::from_vectors(
        dim,
        &ideal_vecs
            .iter()
            .filter(|e| e.filtration() <= cap)
            .map(|e| coord(e))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut central_vecs = Vec::new();
    for z in b.weight_zero.iter().chain(b.others.iter()) {
        central_vecs.push(coord(z)?);
    }
    let central_sub = Subspace::from_vectors(dim, &central_vecs);
    let quotient_dim = central_sub.sum(&ideal_sub)?.dim() - ideal_sub.dim();
    let order = ctx.params.group.order();
    if quotient_dim > order {
        return Err(Error::InvariantViolation(format!(
            "restricted center probe exceeds |W| = {}",
            order
        )));
    }
    Ok((quotient_dim, quotient_dim == order))
}

fn pbw_space_coords(ctx: &PBWCtx, cap: usize) -> Result<Vec<crate::vogan::PBWMono>> {
    let n = ctx.params.rank();
    let g = &ctx.params.group;
    let mut monos = Vec::new();
    for da in 0..=cap {
        for db in 0..=(cap - da) {
            for a in crate::modules::monomials(n, da) {
                for b in crate::modules::monomials(n, db) {
                    for w in 0..g.order() {
                        monos.push(crate::vogan::PBWMono {
                            ys: a.clone(),
                            w,
                            xs: b.clone(),
                        });
                    }
                }
            }
        }
    }
    monos.sort();
    Ok(monos)
}

#[derive(Clone, Debug)]
pub struct CellClosureReport {
    pub holds: bool,
    pub top_wedge_present: bool,
    /// per sigma: the constituents of the head cohomology
    pub constituents: BTreeMap<String, MultVec>,
    pub details: Vec<String>,
}

/// For every head: each irreducible constituent of its h*-cohomology,
/// twisted by det_{h*}, lies in the same cell as the lowest weight; and
/// the top-wedge constituent sigma (x) det_h is always present.
pub fn cell_closure_check(
    family: &BabyFamily,
    table: &IrrepTable,
    pin: &PinStructure,
    cells: &CellPartition,
) -> Result<CellClosureReport> {
    let alg = pin.alg.as_ref();
    let g = &pin.group;
    let det_hstar = tensor_with_det_hstar(g, table);
    let det_h = tensor_with_det_h(g, table);
    let cell_of = |sigma: &str| -> Option<usize> {
        cells
            .blocks
            .iter()
            .position(|b| b.iter().any(|s| s == sigma))
    };
    let mut holds = true;
    let mut top_wedge_present = true;
    let mut constituents = BTreeMap::new();
    let mut details = Vec::new();
    for (si, sigma) in family.sigmas.iter().enumerate() {
        let rep = lie_report(&family.heads[si], alg, table, LieKind::CohomologyHStar)?;
        let total = rep.total();
        for (nu, mult) in &total {
            if *mult == 0 {
                continue;
            }
            let twisted = det_hstar
                .iter()
                .find(|(a, _)| a == nu)
                .map(|(_, b)| b.clone())
                .unwrap();
            if cell_of(&twisted) != cell_of(sigma) {
                holds = false;
                details.push(format!(
                    "constituent {} of head({}) twists out of the cell",
                    nu, sigma
                ));
            }
        }
        // sigma (x) det_h must appear
        let expected = det_h
            .iter()
            .find(|(a, _)| a == sigma)
            .map(|(_, b)| b.clone())
            .unwrap();
        if total.get(&expected).copied().unwrap_or(0) == 0 {
            top_wedge_present = false;
            details.push(format!(
                "top-wedge constituent {} missing from head({})",
                expected, sigma
            ));
        }
        constituents.insert(sigma.clone(), total);
    }
    Ok(CellClosureReport {
        holds,
        top_wedge_present,
        constituents,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{catalog, find_reflections, GroupSpec, ParamC};
    use crate::scalars::SqrtConvention;

    fn setup_t0(
        spec: GroupSpec,
        c: (i64, i64),
    ) -> (PBWCtx, IrrepTable, PinStructure) {
        let (g, table) = catalog(&spec).unwrap();
        let refls = find_reflections(&g);
        let pc = ParamC::constant(&refls, CycScalar::rational(c.0, c.1));
        let params = CherednikParams::new(g.clone(), CycScalar::zero(), pc);
        let pin = PinStructure::build(g, &refls, SqrtConvention::Standard).unwrap();
        (PBWCtx::new(params), table, pin)
    }

    #[test]
    fn z2_generic_c_diagonal_graph() {
        let (ctx, table, _) = setup_t0(GroupSpec::Cyclic { m: 2 }, (1, 5));
        let family = baby_family(&ctx.params, &table).unwrap();
        // generic c: heads equal the vermas, dimension 2
        for head in &family.heads {
            assert_eq!(head.total_dim(), 2);
        }
        let graph = decomposition_numbers(&family, &table).unwrap();
        for ((a, b), m) in &graph.mults {
            if a == b {
                assert_eq!(*m, 1);
            } else {
                assert_eq!(*m, 0);
            }
        }
        assert_eq!(
            graph.components(),
            vec![vec!["sign".to_string()], vec!["triv".to_string()]]
        );
    }

    #[test]
    fn z2_c_zero_coarsens() {
        let (ctx, table, _) = setup_t0(GroupSpec::Cyclic { m: 2 }, (0, 1));
        let family = baby_family(&ctx.params, &table).unwrap();
        // at c = 0 the heads are one-dimensional
        for head in &family.heads {
            assert_eq!(head.total_dim(), 1);
        }
        let graph = decomposition_numbers(&family, &table).unwrap();
        // off-diagonal entries appear
        let off: usize = graph
            .mults
            .iter()
            .filter(|((a, b), m)| a != b && **m > 0)
            .count();
        assert!(off > 0);
        assert_eq!(graph.components().len(), 1);
        let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
        let cells = cm_cells(&ctx, &family, &graph, &b).unwrap();
        assert_eq!(cells.blocks.len(), 1);
    }

    #[test]
    fn z2_cells_singletons_and_theta() {
        for c in [(1i64, 5i64), (1, 2), (1, 1)] {
            let (ctx, table, _) = setup_t0(GroupSpec::Cyclic { m: 2 }, c);
            let family = baby_family(&ctx.params, &table).unwrap();
            let graph = decomposition_numbers(&family, &table).unwrap();
            let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
            let cells = cm_cells(&ctx, &family, &graph, &b).unwrap();
            assert_eq!(cells.blocks.len(), 2, "c = {:?}", c);
            assert_eq!(cells.provenance, Provenance::Both);
        }
    }

    #[test]
    fn restricted_center_probe_z2() {
        let (ctx, _, _) = setup_t0(GroupSpec::Cyclic { m: 2 }, (1, 2));
        let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
        let (dim, attained) = restricted_center_probe(&ctx, &b).unwrap();
        // scalars and the weight-zero degree-2 element survive modulo the
        // invariant ideal; |W| = 2 is attained
        assert_eq!(dim, 2);
        assert!(attained);
    }

    #[test]
    fn cell_closure_z2() {
        let (ctx, table, pin) = setup_t0(GroupSpec::Cyclic { m: 2 }, (1, 5));
        let family = baby_family(&ctx.params, &table).unwrap();
        let graph = decomposition_numbers(&family, &table).unwrap();
        let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
        let cells = cm_cells(&ctx, &family, &graph, &b).unwrap();
        let rep = cell_closure_check(&family, &table, &pin, &cells).unwrap();
        assert!(rep.holds, "{:?}", rep.details);
        assert!(rep.top_wedge_present, "{:?}", rep.details);
    }

    #[test]
    fn cells_invariant_under_rescaling() {
        // (t, c) -> (l^2 t, l^2 c) with t = 0 keeps the partition
        let mut partitions = Vec::new();
        for c in [(1i64, 5i64), (4, 5)] {
            let (ctx, table, _) = setup_t0(GroupSpec::Cyclic { m: 2 }, c);
            let family = baby_family(&ctx.params, &table).unwrap();
            let graph = decomposition_numbers(&family, &table).unwrap();
            let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
            partitions.push(cm_cells(&ctx, &family, &graph, &b).unwrap().blocks);
        }
        assert_eq!(partitions[0], partitions[1]);
    }

    #[test]
    fn dihedral3_cells_sampled() {
        let (ctx, table, pin) = setup_t0(GroupSpec::Dihedral { m: 3 }, (1, 5));
        let family = baby_family(&ctx.params, &table).unwrap();
        let graph = decomposition_numbers(&family, &table).unwrap();
        let b = crate::vogan::find_central_elements(&ctx, 2).unwrap();
        let cells = cm_cells(&ctx, &family, &graph, &b).unwrap();
        let rep = cell_closure_check(&family, &table, &pin, &cells).unwrap();
        assert!(rep.holds, "{:?}", rep.details);
        assert!(rep.top_wedge_present, "{:?}", rep.details);
    }
}
