//! The Clifford algebra C(V) on V = h + h*, the spinor module S realized on
//! the exterior algebra of h, the pin double cover of W through the lifts
//! mu_s, and the genuine character chi.
//!
//! Elements of the double cover are never materialized as an abstract
//! group: a pin element is a pair (group element, operator on S), and an
//! abstract Clifford element is kept alongside for the symbolic engine.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::{IrrepTable, Reflection, ReflectionGroup};
use crate::linalg::ExactMatrix;
use crate::scalars::{CycScalar, SqrtConvention};

/// Basis bookkeeping for S = exterior algebra of h: subsets of {0..n-1}
/// ordered by (cardinality, lexicographic), so each wedge degree is a
/// contiguous index range.
#[derive(Clone, Debug)]
pub struct SpinorAlgebra {
    rank: usize,
    subsets: Vec<u32>,
    index_of: Vec<usize>, // mask -> basis index
    wedge: Vec<ExactMatrix>,
    contract: Vec<ExactMatrix>,
}

fn popcount(m: u32) -> usize {
    m.count_ones() as usize
}

impl SpinorAlgebra {
    pub fn new(rank: usize) -> Self {
        assert!(rank <= 8, "spinor space limited to small rank");
        let total = 1usize << rank;
        let mut subsets: Vec<u32> = (0..total as u32).collect();
        subsets.sort_by_key(|&m| (popcount(m), m));
        let mut index_of = vec![0usize; total];
        for (i, &m) in subsets.iter().enumerate() {
            index_of[m as usize] = i;
        }
        let mut alg = SpinorAlgebra {
            rank,
            subsets,
            index_of,
            wedge: Vec::new(),
            contract: Vec::new(),
        };
        for i in 0..rank {
            alg.wedge.push(alg.build_wedge(i));
            alg.contract.push(alg.build_contract(i));
        }
        alg.self_test();
        alg
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[u32] {
        &self.subsets
    }

    pub fn index(&self, mask: u32) -> usize {
        self.index_of[mask as usize]
    }

    /// Index range of the wedge-degree-l block.
    pub fn degree_range(&self, l: usize) -> std::ops::Range<usize> {
        let start = self
            .subsets
            .iter()
            .position(|&m| popcount(m) == l)
            .unwrap_or(self.subsets.len());
        let end = self
            .subsets
            .iter()
            .rposition(|&m| popcount(m) == l)
            .map(|p| p + 1)
            .unwrap_or(start);
        start..end
    }

    fn build_wedge(&self, i: usize) -> ExactMatrix {
        let n = self.dim();
        let mut m = ExactMatrix::zero(n, n);
        for (col, &mask) in self.subsets.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            // sign: (-1)^{#elements of mask smaller than i}
            let below = mask & ((1u32 << i) - 1);
            let sign = if popcount(below) % 2 == 0 { 1 } else { -1 };
            let row = self.index(mask | (1 << i));
            m.set(row, col, CycScalar::from_int(sign));
        }
        m
    }

    /// Action of x_i: the contraction, normalized so that
    /// x_i y_j + y_j x_i = -2 delta_ij.
    fn build_contract(&self, i: usize) -> ExactMatrix {
        let n = self.dim();
        let mut m = ExactMatrix::zero(n, n);
        for (col, &mask) in self.subsets.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            // position of i in the ascending list of mask (1-based)
            let below = mask & ((1u32 << i) - 1);
            let pos = popcount(below) + 1;
            let sign = if pos % 2 == 0 { 2 } else { -2 };
            let row = self.index(mask & !(1 << i));
            m.set(row, col, CycScalar::from_int(sign));
        }
        m
    }

    /// The sign placement in the contraction is pinned by the Clifford
    /// relations, enforced here rather than trusted.
    fn self_test(&self) {
        let n = self.dim();
        let zero = ExactMatrix::zero(n, n);
        for i in 0..self.rank {
            for j in 0..self.rank {
                let anti_yy = self.wedge[i]
                    .matmul(&self.wedge[j])
                    .add_mat(&self.wedge[j].matmul(&self.wedge[i]));
                assert_eq!(anti_yy, zero, "y relations fail at ({}, {})", i, j);
                let anti_xx = self.contract[i]
                    .matmul(&self.contract[j])
                    .add_mat(&self.contract[j].matmul(&self.contract[i]));
                assert_eq!(anti_xx, zero, "x relations fail at ({}, {})", i, j);
                let mixed = self.contract[i]
                    .matmul(&self.wedge[j])
                    .add_mat(&self.wedge[j].matmul(&self.contract[i]));
                let expect = if i == j {
                    ExactMatrix::identity(n).scale(&CycScalar::from_int(-2))
                } else {
                    zero.clone()
                };
                assert_eq!(mixed, expect, "mixed relations fail at ({}, {})", i, j);
            }
        }
    }

    /// The wedge operator of the basis vector y_i on the full spinor space.
    pub fn exterior_gen_wedge(&self, i: usize) -> &ExactMatrix {
        &self.wedge[i]
    }

    /// The contraction operator of the basis vector x_i.
    pub fn exterior_gen_contract(&self, i: usize) -> &ExactMatrix {
        &self.contract[i]
    }

    /// Operator of a vector of h (coordinates in the y basis).
    pub fn act_h(&self, coords: &[CycScalar]) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.dim(), self.dim());
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                m = m.add_mat(&self.wedge[i].scale(c));
            }
        }
        m
    }

    /// Operator of a vector of h* (coordinates in the x basis).
    pub fn act_hstar(&self, coords: &[CycScalar]) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.dim(), self.dim());
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                m = m.add_mat(&self.contract[i].scale(c));
            }
        }
        m
    }

    /// Exterior power matrix of an n x n matrix on h, in the subset basis.
    pub fn exterior_matrix(&self, a: &ExactMatrix) -> ExactMatrix {
        let n = self.dim();
        let mut out = ExactMatrix::zero(n, n);
        for (col, &jmask) in self.subsets.iter().enumerate() {
            let jset: Vec<usize> = (0..self.rank).filter(|&b| jmask & (1 << b) != 0).collect();
            for (row, &imask) in self.subsets.iter().enumerate() {
                if popcount(imask) != popcount(jmask) {
                    continue;
                }
                let iset: Vec<usize> =
                    (0..self.rank).filter(|&b| imask & (1 << b) != 0).collect();
                // minor det A[iset, jset]
                let k = iset.len();
                if k == 0 {
                    out.set(row, col, CycScalar::one());
                    continue;
                }
                let sub = ExactMatrix::from_fn(k, k, |r, c| a.at(iset[r], jset[c]).clone());
                out.set(row, col, sub.det());
            }
        }
        out
    }

    /// Restriction of an operator on S to the wedge-degree-l block, assuming
    /// block diagonality (checked).
    pub fn degree_block(&self, op: &ExactMatrix, l: usize) -> Result<ExactMatrix> {
        let range = self.degree_range(l);
        for (row, &_m) in self.subsets.iter().enumerate() {
            for col in range.clone() {
                if !range.contains(&row) && !op.at(row, col).is_zero() {
                    return Err(Error::InvariantViolation(
                        "operator does not preserve wedge degrees".into(),
                    ));
                }
            }
        }
        Ok(ExactMatrix::from_fn(
            range.len(),
            range.len(),
            |r, c| op.at(range.start + r, range.start + c).clone(),
        ))
    }
}

/// An element of C(V) as a linear combination of normal-ordered monomials
/// y_I x_J (both index sets ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordElem {
    rank: usize,
    terms: BTreeMap<(u32, u32), CycScalar>,
}

impl CliffordElem {
    pub fn zero(rank: usize) -> Self {
        CliffordElem {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        let mut e = Self::zero(rank);
        e.terms.insert((0, 0), CycScalar::one());
        e
    }

    pub fn scalar(rank: usize, c: CycScalar) -> Self {
        let mut e = Self::zero(rank);
        if !c.is_zero() {
            e.terms.insert((0, 0), c);
        }
        e
    }

    pub fn gen_y(rank: usize, i: usize) -> Self {
        let mut e = Self::zero(rank);
        e.terms.insert((1 << i, 0), CycScalar::one());
        e
    }

    pub fn gen_x(rank: usize, i: usize) -> Self {
        let mut e = Self::zero(rank);
        e.terms.insert((0, 1 << i), CycScalar::one());
        e
    }

    pub fn from_h(rank: usize, coords: &[CycScalar]) -> Self {
        let mut e = Self::zero(rank);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                e.add_term(1 << i, 0, c.clone());
            }
        }
        e
    }

    pub fn from_hstar(rank: usize, coords: &[CycScalar]) -> Self {
        let mut e = Self::zero(rank);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                e.add_term(0, 1 << i, c.clone());
            }
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), CycScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, i: u32, j: u32, c: CycScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(CycScalar::zero);
        *entry = entry.add_ref(&c);
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CycScalar::from_int(-1)))
    }

    pub fn scale(&self, s: &CycScalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.rank);
        }
        CliffordElem {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, c.mul_ref(s)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rank);
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let c = c1.mul_ref(c2);
                for ((i, j), coef) in mono_mul(self.rank, i1, j1, i2, j2) {
                    out.add_term(i, j, c.mul_ref(&coef));
                }
            }
        }
        out
    }

    /// Split into (even, odd) Clifford parity parts.
    pub fn parity_parts(&self) -> (Self, Self) {
        let mut even = Self::zero(self.rank);
        let mut odd = Self::zero(self.rank);
        for (&(i, j), c) in &self.terms {
            if (popcount(i) + popcount(j)) % 2 == 0 {
                even.add_term(i, j, c.clone());
            } else {
                odd.add_term(i, j, c.clone());
            }
        }
        (even, odd)
    }

    /// C*-weight of a monomial is #y - #x; None for mixed-weight elements.
    pub fn weight(&self) -> Option<i64> {
        let mut w = None;
        for &(i, j) in self.terms.keys() {
            let wij = popcount(i) as i64 - popcount(j) as i64;
            match w {
                None => w = Some(wij),
                Some(x) if x == wij => {}
                _ => return None,
            }
        }
        w.or(Some(0))
    }

    /// The spinor representation matrix of this element.
    pub fn spinor_matrix(&self, alg: &SpinorAlgebra) -> ExactMatrix {
        let n = alg.dim();
        let mut out = ExactMatrix::zero(n, n);
        for (&(i, j), c) in &self.terms {
            let mut m = ExactMatrix::identity(n);
            // product y_{i1}...y_{ik} x_{j1}...x_{jl}, ascending inside each
            for b in (0..self.rank).rev() {
                if j & (1 << b) != 0 {
                    m = alg.contract[b].matmul(&m);
                }
            }
            for b in (0..self.rank).rev() {
                if i & (1 << b) != 0 {
                    m = alg.wedge[b].matmul(&m);
                }
            }
            out = out.add_mat(&m.scale(c));
        }
        out
    }

    /// Multiplicative inverse for invertible elements of the pin family,
    /// found by repeated powering (every pin element has finite order).
    pub fn pin_inverse(&self) -> Result<Self> {
        let one = Self::one(self.rank);
        let mut p = self.clone();
        let mut prev = one.clone();
        for _ in 0..200 {
            if p == one {
                return Ok(prev);
            }
            prev = p.clone();
            p = p.mul(self);
        }
        Err(Error::NotInvertible)
    }
}

/// Normal ordering of the monomial product (y_I1 x_J1)(y_I2 x_J2).
fn mono_mul(rank: usize, i1: u32, j1: u32, i2: u32, j2: u32) -> Vec<((u32, u32), CycScalar)> {
    // First push x_{J1} through y_{I2}: a sum of terms (sign, Imid, Jmid).
    let mut middle: Vec<(i64, u32, u32)> = vec![(1, i2, 0)];
    // process the x's of J1 from the rightmost (closest to y_{I2}) leftwards;
    // each x_a must traverse all of y-part currently to its right.
    let xs: Vec<usize> = (0..rank).filter(|&b| j1 & (1 << b) != 0).collect();
    for &a in xs.iter().rev() {
        let mut next: Vec<(i64, u32, u32)> = Vec::new();
        for &(sgn, imask, jdone) in &middle {
            // move x_a through y_{imask}: (-1)^{|I|} y_I x_a  - 2 sum over
            // occurrences of a with alternating sign
            let k = popcount(imask) as i64;
            let pass_sign = if k % 2 == 0 { 1 } else { -1 };
            next.push((sgn * pass_sign, imask, jdone | (1 << a)));
            if imask & (1 << a) != 0 {
                // position of a in ascending list (1-based)
                let below = imask & ((1u32 << a) - 1);
                let pos = popcount(below) as i64 + 1;
                let term_sign = if pos % 2 == 1 { -1 } else { 1 }; // (-1)^{pos-1} * (-1)
                next.push((sgn * 2 * term_sign, imask & !(1 << a), jdone));
            }
        }
        middle = next;
    }
    // Now combine: y_{I1} * (y_Imid) * x_{Jdone} * x_{J2} with wedge signs.
    let mut out = Vec::new();
    for (sgn, imid, jmid) in middle {
        let Some((ifull, s1)) = wedge_masks(i1, imid) else {
            continue;
        };
        let Some((jfull, s2)) = wedge_masks(jmid, j2) else {
            continue;
        };
        out.push(((ifull, jfull), CycScalar::from_int(sgn * s1 * s2)));
    }
    out
}

/// Concatenate two ascending index sets with anticommutation signs;
/// None if they intersect.
fn wedge_masks(a: u32, b: u32) -> Option<(u32, i64)> {
    if a & b != 0 {
        return None;
    }
    // sign = (-1)^{#inversions}: for each bit of b, count bits of a above it
    let mut sign = 1i64;
    let mut bb = b;
    while bb != 0 {
        let bit = bb.trailing_zeros();
        let above = a >> (bit + 1);
        if popcount(above) % 2 == 1 {
            sign = -sign;
        }
        bb &= bb - 1;
    }
    Some((a | b, sign))
}

/// A lift of a group element into the pin cover: the underlying element, its
/// operator on S, and its abstract Clifford form.
#[derive(Clone, Debug)]
pub struct PinElement {
    pub elem: usize,
    pub op: ExactMatrix,
    pub cliff: CliffordElem,
}

impl PinElement {
    pub fn identity(alg: &SpinorAlgebra) -> Self {
        PinElement {
            elem: 0,
            op: ExactMatrix::identity(alg.dim()),
            cliff: CliffordElem::one(alg.rank()),
        }
    }

    pub fn negated(&self) -> Self {
        PinElement {
            elem: self.elem,
            op: self.op.neg_mat(),
            cliff: self.cliff.scale(&CycScalar::from_int(-1)),
        }
    }

    pub fn mul(&self, g: &ReflectionGroup, other: &Self) -> Self {
        PinElement {
            elem: g.mul(self.elem, other.elem),
            op: self.op.matmul(&other.op),
            cliff: self.cliff.mul(&other.cliff),
        }
    }
}

/// The lift mu_s of a reflection s, from its hyperplane data and the fixed
/// square-root convention.
pub fn mu_s(
    alg: &SpinorAlgebra,
    r: &Reflection,
    conv: SqrtConvention,
) -> Result<PinElement> {
    if r.lambda.is_one() {
        return Err(Error::InvariantViolation("lambda = 1 is not a reflection".into()));
    }
    let sqrt = r.lambda.sqrt_root_of_unity(conv)?;
    let sqrt_inv = sqrt.inv()?;
    let two_pairing = r.pairing.mul_ref(&CycScalar::from_int(2));
    let coef = sqrt.sub_ref(&sqrt_inv).div_ref(&two_pairing)?;
    let rank = alg.rank();
    let alpha = CliffordElem::from_hstar(rank, &r.alpha);
    let alpha_check = CliffordElem::from_h(rank, &r.alpha_check);
    let cliff = alpha
        .mul(&alpha_check)
        .scale(&coef)
        .add(&CliffordElem::scalar(rank, sqrt));
    let op = cliff.spinor_matrix(alg);
    Ok(PinElement {
        elem: r.elem,
        op,
        cliff,
    })
}

/// Product of mu lifts along a word of reflections (empty word = identity).
pub fn pin_lift(
    alg: &SpinorAlgebra,
    g: &ReflectionGroup,
    word: &[&Reflection],
    conv: SqrtConvention,
) -> Result<PinElement> {
    let mut acc = PinElement::identity(alg);
    for r in word {
        let m = mu_s(alg, r, conv)?;
        acc = acc.mul(g, &m);
    }
    Ok(acc)
}

/// The scalar by which a pin element acts on the degree-zero wedge; its
/// square is det_{h*} of the underlying element.
pub fn chi_value(alg: &SpinorAlgebra, p: &PinElement) -> CycScalar {
    // column of the empty subset
    let col = alg.index(0);
    p.op.at(col, col).clone()
}

/// A deterministic choice of one pin lift per group element, built by
/// breadth-first products of the mu_s generators. Carries everything the
/// genuine-character decompositions need.
#[derive(Clone, Debug)]
pub struct PinStructure {
    pub alg: Arc<SpinorAlgebra>,
    pub group: Arc<ReflectionGroup>,
    pub lifts: Vec<PinElement>,
    pub chi: Vec<CycScalar>,
    pub convention: SqrtConvention,
}

impl PinStructure {
    pub fn build(
        group: Arc<ReflectionGroup>,
        refls: &[Reflection],
        conv: SqrtConvention,
    ) -> Result<Self> {
        let alg = Arc::new(SpinorAlgebra::new(group.rank()));
        let mut lifts: Vec<Option<PinElement>> = vec![None; group.order()];
        lifts[0] = Some(PinElement::identity(&alg));
        let mus: Vec<PinElement> = refls
            .iter()
            .map(|r| mu_s(&alg, r, conv))
            .collect::<Result<_>>()?;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            let base = lifts[i].clone().unwrap();
            for m in &mus {
                let j = group.mul(m.elem, i);
                if lifts[j].is_none() {
                    lifts[j] = Some(m.mul(&group, &base));
                    queue.push_back(j);
                }
            }
        }
        let lifts: Vec<PinElement> = lifts
            .into_iter()
            .map(|l| l.ok_or_else(|| {
                Error::InvariantViolation("reflections do not generate the group".into())
            }))
            .collect::<Result<_>>()?;
        let chi: Vec<CycScalar> = lifts.iter().map(|p| chi_value(&alg, p)).collect();
        let s = PinStructure {
            alg,
            group,
            lifts,
            chi,
            convention: conv,
        };
        s.verify()?;
        Ok(s)
    }

    /// chi^2 = det_{h*} and degree-block preservation for every lift.
    fn verify(&self) -> Result<()> {
        for (i, p) in self.lifts.iter().enumerate() {
            if p.elem != i {
                return Err(Error::InvariantViolation("lift indexing broken".into()));
            }
            let chi2 = self.chi[i].mul_ref(&self.chi[i]);
            if chi2 != self.group.det_hstar(i) {
                return Err(Error::InvariantViolation(format!(
                    "chi^2 != det_hstar at element {}",
                    i
                )));
            }
            for l in 0..=self.group.rank() {
                self.alg.degree_block(&p.op, l)?;
            }
        }
        Ok(())
    }

    /// The operator of the lift of w restricted to wedge degree l.
    pub fn lift_on_degree(&self, w: usize, l: usize) -> ExactMatrix {
        self.alg
            .degree_block(&self.lifts[w].op, l)
            .expect("lifts preserve wedge degrees")
    }

    /// Genuine character value of sigma (x) chi at the chosen lift of w.
    pub fn genuine_char(&self, irr: &crate::groups::Irrep, w: usize) -> CycScalar {
        let cid = self.group.class_of(w);
        irr.character[cid].mul_ref(&self.chi[w])
    }

    /// Decompose a genuine representation, given per-element traces of the
    /// diagonal action at the chosen lifts. The decomposition runs over the
    /// genuine characters sigma (x) chi; completeness is certified by an
    /// exact trace-matching check.
    pub fn genuine_multiplicities(
        &self,
        table: &IrrepTable,
        traces: &dyn Fn(usize) -> CycScalar,
    ) -> Result<Vec<(String, usize)>> {
        let g = &self.group;
        let order = CycScalar::from_int(g.order() as i64);
        let tr: Vec<CycScalar> = (0..g.order()).map(traces).collect();
        let mut out = Vec::new();
        for irr in &table.irreps {
            let mut acc = CycScalar::zero();
            for w in 0..g.order() {
                acc = acc.add_ref(&tr[w].mul_ref(&self.genuine_char(irr, w).conj()));
            }
            let m = acc.div_ref(&order).unwrap();
            let mr = m.as_rational().ok_or_else(|| {
                Error::NonIntegerMultiplicity(format!(
                    "genuine mult of {} (x) chi is {}",
                    irr.label, m
                ))
            })?;
            if !mr.is_integer() || mr < crate::scalars::Rat::from(num::BigInt::from(0)) {
                return Err(Error::NonIntegerMultiplicity(format!(
                    "genuine mult of {} (x) chi is {}",
                    irr.label, mr
                )));
            }
            let m: usize = mr.numer().to_string().parse().unwrap();
            if m > 0 {
                out.push((irr.label.clone(), m));
            }
        }
        // completeness: the multiplicities must reproduce the traces exactly
        for w in 0..g.order() {
            let mut acc = CycScalar::zero();
            for (label, m) in &out {
                let irr = table.by_label(label)?;
                acc = acc.add_ref(
                    &self
                        .genuine_char(irr, w)
                        .mul_ref(&CycScalar::from_int(*m as i64)),
                );
            }
            if acc != tr[w] {
                return Err(Error::NonIntegerMultiplicity(
                    "genuine characters sigma (x) chi do not exhaust the space".into(),
                ));
            }
        }
        Ok(out)
    }
}

/// S is isomorphic to chi (x) exterior algebra of h as a module over the
/// double cover: exact character identity on all chosen lifts.
pub fn spinor_decomposition_check(pin: &PinStructure) -> bool {
    let g = &pin.group;
    for w in 0..g.order() {
        let lhs = pin.lifts[w].op.trace();
        let wedge_trace = pin.alg.exterior_matrix(g.mat(w)).trace();
        let rhs = pin.chi[w].mul_ref(&wedge_trace);
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{catalog, find_reflections, GroupSpec};

    fn z2_setup() -> (Arc<ReflectionGroup>, Vec<Reflection>, PinStructure) {
        let (g, _) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
        let refls = find_reflections(&g);
        let pin = PinStructure::build(g.clone(), &refls, SqrtConvention::Standard).unwrap();
        (g, refls, pin)
    }

    #[test]
    fn clifford_action_rank1() {
        let alg = SpinorAlgebra::new(1);
        // y wedge on the empty subset gives y
        let e0 = alg.index(0);
        let e1 = alg.index(1);
        assert!(alg.wedge[0].at(e1, e0).is_one());
        // x on the empty subset is zero
        assert!(alg.contract[0].col(e0).iter().all(|v| v.is_zero()));
        // x applied to y (wedge degree 1) gives -2 * empty
        assert_eq!(*alg.contract[0].at(e0, e1), CycScalar::from_int(-2));
    }

    #[test]
    fn mu_s_z2() {
        let (_, refls, pin) = z2_setup();
        let alg = &pin.alg;
        let mu = mu_s(alg, &refls[0], SqrtConvention::Standard).unwrap();
        // acts on wedge degree 0 by -i
        let minus_i = CycScalar::root_of_unity(4, 3);
        assert_eq!(chi_value(alg, &mu), minus_i);
        // chi^2 = det_hstar(s) = -1
        assert_eq!(minus_i.mul_ref(&minus_i), CycScalar::from_int(-1));
        // conjugation sends alpha_check to lambda alpha_check
        let v = CliffordElem::from_h(1, &refls[0].alpha_check);
        let conj = mu
            .cliff
            .mul(&v)
            .mul(&mu.cliff.pin_inverse().unwrap());
        let expect = v.scale(&refls[0].lambda);
        assert_eq!(conj, expect);
        // the two lifts differ by a global sign
        let neg = mu.negated();
        assert_eq!(chi_value(alg, &neg), minus_i.neg_ref());
    }

    #[test]
    fn mu_restriction_is_scaled_reflection() {
        // on each wedge degree, mu_s acts as lambda^{-1/2} times the matrix
        // of s on that degree
        for spec in [GroupSpec::Cyclic { m: 4 }, GroupSpec::Dihedral { m: 3 }] {
            let (g, _) = catalog(&spec).unwrap();
            let refls = find_reflections(&g);
            let alg = SpinorAlgebra::new(g.rank());
            for r in &refls {
                let mu = mu_s(&alg, r, SqrtConvention::Standard).unwrap();
                let sqrt_inv = r
                    .lambda
                    .sqrt_root_of_unity(SqrtConvention::Standard)
                    .unwrap()
                    .inv()
                    .unwrap();
                let wedge_full = alg.exterior_matrix(g.mat(r.elem));
                assert_eq!(mu.op, wedge_full.scale(&sqrt_inv));
            }
        }
    }

    #[test]
    fn pin_lift_words() {
        let (g, refls, pin) = z2_setup();
        // empty word -> identity
        let id = pin_lift(&pin.alg, &g, &[], SqrtConvention::Standard).unwrap();
        assert_eq!(id.elem, 0);
        assert!(id.op == ExactMatrix::identity(pin.alg.dim()));
        // word (s, s): lift of identity, mu_s^2 = -1 here (lambda = -1, order 4)
        let ss = pin_lift(&pin.alg, &g, &[&refls[0], &refls[0]], SqrtConvention::Standard)
            .unwrap();
        assert_eq!(ss.elem, 0);
        assert_eq!(ss.op, ExactMatrix::identity(pin.alg.dim()).neg_mat());
        let _ = pin;
    }

    #[test]
    fn two_reduced_words_agree_up_to_sign() {
        let (g, _) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        let refls = find_reflections(&g);
        let alg = SpinorAlgebra::new(2);
        // rotation = s0 s1 = s1 s2 for suitable reflection pairs; search two
        // distinct two-letter words with the same underlying element
        let mut found = false;
        'outer: for a in 0..refls.len() {
            for b in 0..refls.len() {
                for c in 0..refls.len() {
                    for d in 0..refls.len() {
                        if (a, b) >= (c, d) {
                            continue;
                        }
                        let e1 = g.mul(refls[a].elem, refls[b].elem);
                        let e2 = g.mul(refls[c].elem, refls[d].elem);
                        if e1 != e2 || e1 == 0 {
                            continue;
                        }
                        let w1 = pin_lift(&alg, &g, &[&refls[a], &refls[b]], SqrtConvention::Standard).unwrap();
                        let w2 = pin_lift(&alg, &g, &[&refls[c], &refls[d]], SqrtConvention::Standard).unwrap();
                        assert!(
                            w1.op == w2.op || w1.op == w2.op.neg_mat(),
                            "lifts differ by more than a sign"
                        );
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn chi_multiplicative_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let (g, _) = catalog(&GroupSpec::Dihedral { m: 4 }).unwrap();
        let refls = find_reflections(&g);
        let pin = PinStructure::build(g.clone(), &refls, SqrtConvention::Standard).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = rng.gen_range(0..g.order());
            let b = rng.gen_range(0..g.order());
            let prod = pin.lifts[a].mul(&g, &pin.lifts[b]);
            let chi_prod = chi_value(&pin.alg, &prod);
            assert_eq!(chi_prod, pin.chi[a].mul_ref(&pin.chi[b]));
        }
    }

    #[test]
    fn genuine_characters_z2() {
        let (g, refls, pin) = z2_setup();
        let (_, table) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
        let s_elem = refls[0].elem;
        let minus_i = CycScalar::root_of_unity(4, 3);
        let triv = table.by_label("triv").unwrap();
        let sign = table.by_label("sign").unwrap();
        assert_eq!(pin.genuine_char(triv, s_elem), minus_i);
        assert_eq!(pin.genuine_char(sign, s_elem), minus_i.neg_ref());
        assert_eq!(pin.genuine_char(triv, 0), CycScalar::one());
        let _ = g;
    }

    #[test]
    fn spinor_decomposition_all_catalog() {
        for spec in [
            GroupSpec::Cyclic { m: 2 },
            GroupSpec::Cyclic { m: 3 },
            GroupSpec::Dihedral { m: 3 },
        ] {
            let (g, _) = catalog(&spec).unwrap();
            let refls = find_reflections(&g);
            for conv in [SqrtConvention::Standard, SqrtConvention::Negated] {
                let pin = PinStructure::build(g.clone(), &refls, conv).unwrap();
                assert!(spinor_decomposition_check(&pin), "{:?}", spec);
            }
        }
    }

    #[test]
    fn flipped_contraction_breaks_relations() {
        // regression guard: moving the sign origin in the contraction
        // violates the mixed Clifford relation, so the load-time self test
        // must reject it.
        let alg = SpinorAlgebra::new(2);
        let flipped = alg.contract[0].neg_mat();
        let mixed = flipped
            .matmul(&alg.wedge[0])
            .add_mat(&alg.wedge[0].matmul(&flipped));
        let expect = ExactMatrix::identity(alg.dim()).scale(&CycScalar::from_int(-2));
        assert_ne!(mixed, expect);
    }

    #[test]
    fn spinor_matrix_matches_composition() {
        let alg = SpinorAlgebra::new(2);
        let a = CliffordElem::gen_x(2, 0).mul(&CliffordElem::gen_y(2, 1));
        let m = a.spinor_matrix(&alg);
        let expect = alg.contract[0].matmul(&alg.wedge[1]);
        assert_eq!(m, expect);
        // abstract multiplication agrees with matrix multiplication
        let b = CliffordElem::gen_y(2, 0).mul(&CliffordElem::gen_x(2, 1));
        assert_eq!(
            a.mul(&b).spinor_matrix(&alg),
            m.matmul(&b.spinor_matrix(&alg))
        );
    }
}
