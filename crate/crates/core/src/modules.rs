//! Graded block realizations of lowest-weight modules over the rational
//! Cherednik algebra: standard modules, their simple quotients, baby Verma
//! modules at t = 0, and contravariant Hermitian forms.
//!
//! A module is a family of finite-dimensional blocks indexed by degree,
//! with per-block W-action and degree-shifting x/y operator families. The
//! commutation relation
//!
//!   [y, x] = t <y, x> - sum_s c(s) <y, alpha_s><alpha_s^check, x> / <alpha_s^check, alpha_s> s
//!
//! holds blockwise and is checked, never assumed.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::{
    decompose_wmodule, find_reflections, IrrepTable, ParamC, Reflection, ReflectionGroup,
};
use crate::linalg::{ExactMatrix, Subspace, Vector};
use crate::scalars::{CycScalar, Sign};

#[derive(Clone, Debug)]
pub struct CherednikParams {
    pub group: Arc<ReflectionGroup>,
    pub reflections: Arc<Vec<Reflection>>,
    pub t: CycScalar,
    pub c: ParamC,
}

impl CherednikParams {
    pub fn new(group: Arc<ReflectionGroup>, t: CycScalar, c: ParamC) -> Self {
        let reflections = Arc::new(find_reflections(&group));
        CherednikParams {
            group,
            reflections,
            t,
            c,
        }
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// kappa_s(i, j) = <y_i, alpha_s> <alpha_s^check, x_j>, with alpha and
    /// alpha_check normalized so that <alpha_s^check, alpha_s> = 2 (the
    /// classical root/coroot normalization; the ratio is scale-free in the
    /// stored hyperplane data).
    pub fn kappa(&self, r: &Reflection, i: usize, j: usize) -> CycScalar {
        r.alpha[i]
            .mul_ref(&r.alpha_check[j])
            .mul_ref(&CycScalar::from_int(2))
            .div_ref(&r.pairing)
            .unwrap()
    }

    /// The group part of [y_i, x_j]: pairs (element, coefficient) with
    /// coefficient -c(s) kappa_s(i, j).
    pub fn commutator_group_part(&self, i: usize, j: usize) -> Vec<(usize, CycScalar)> {
        let mut out = Vec::new();
        for r in self.reflections.iter() {
            let coeff = self
                .c
                .value(&r.class_label)
                .mul_ref(&self.kappa(r, i, j))
                .neg_ref();
            if !coeff.is_zero() {
                out.push((r.elem, coeff));
            }
        }
        out
    }

    /// Group part of the Euler element: sum_s 4 c(s) / (1 - lambda_s^{-1}) s.
    /// The coefficient is forced by [Euler, x] = 2tx: with the root/coroot
    /// normalization in `kappa`, the x_j-commutator of the group part must
    /// cancel 2 sum_i x_i [y_i, x_j], and x_j - s(x_j) carries the
    /// eigenvalue of s on h*, which is lambda_s^{-1}. For real reflections
    /// lambda = -1 and the two conventions agree.
    pub fn euler_group_part(&self) -> Vec<(usize, CycScalar)> {
        let mut out = Vec::new();
        for r in self.reflections.iter() {
            let denom = CycScalar::one().sub_ref(&r.lambda.inv().unwrap());
            let coeff = self
                .c
                .value(&r.class_label)
                .mul_ref(&CycScalar::from_int(4))
                .div_ref(&denom)
                .unwrap();
            if !coeff.is_zero() {
                out.push((r.elem, coeff));
            }
        }
        out
    }

    /// (lambda^2 t, lambda^2 c); the two parameter points give the same
    /// algebra up to rescaling the generators.
    pub fn rescale(&self, lambda: &CycScalar) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::NotInvertible);
        }
        let l2 = lambda.mul_ref(lambda);
        Ok(CherednikParams {
            group: self.group.clone(),
            reflections: self.reflections.clone(),
            t: self.t.mul_ref(&l2),
            c: self.c.map(|v| v.mul_ref(&l2)),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub dim: usize,
    /// W-action per group element.
    pub w: Vec<ExactMatrix>,
    /// x_i: this block -> next block; None when the next block is outside
    /// the materialized window.
    pub x: Option<Vec<ExactMatrix>>,
    /// y_i: this block -> previous block (0-row matrices at degree 0).
    pub y: Vec<ExactMatrix>,
    /// Euler scalar on this block, when the Euler element acts by a scalar.
    pub omega: Option<CycScalar>,
}

#[derive(Clone, Debug)]
pub struct GradedModule {
    pub params: CherednikParams,
    blocks: Vec<Block>,
    /// True when the module is fully materialized (every block beyond the
    /// top is zero); false for a window into an infinite module.
    complete: bool,
}

impl GradedModule {
    /// Assemble a module from explicit blocks (used by submodule and
    /// quotient constructions); shapes are the caller's responsibility,
    /// invariants can be checked with `verify_relations`.
    pub fn from_parts(
        params: CherednikParams,
        blocks: Vec<Block>,
        complete: bool,
    ) -> Result<GradedModule> {
        if blocks.is_empty() {
            return Err(Error::BadWindow("empty block list".into()));
        }
        Ok(GradedModule {
            params,
            blocks,
            complete,
        })
    }

    pub fn top(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, k: usize) -> &Block {
        &self.blocks[k]
    }

    pub fn dim(&self, k: usize) -> usize {
        if k < self.blocks.len() {
            self.blocks[k].dim
        } else {
            0
        }
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn x_op(&self, k: usize, i: usize) -> Option<&ExactMatrix> {
        self.blocks.get(k).and_then(|b| b.x.as_ref()).map(|x| &x[i])
    }

    pub fn y_op(&self, k: usize, i: usize) -> &ExactMatrix {
        &self.blocks[k].y[i]
    }

    pub fn w_op(&self, k: usize, elem: usize) -> &ExactMatrix {
        &self.blocks[k].w[elem]
    }

    pub fn omega(&self, k: usize) -> Option<&CycScalar> {
        self.blocks[k].omega.as_ref()
    }

    /// The Euler element as a block map: 2 sum_i x_i y_i + n t - group part.
    pub fn euler_block_map(&self, k: usize) -> ExactMatrix {
        let n = self.params.rank();
        let d = self.dim(k);
        let mut m = ExactMatrix::identity(d)
            .scale(&self.params.t.mul_ref(&CycScalar::from_int(n as i64)));
        if k > 0 {
            for i in 0..n {
                let xy = self.blocks[k - 1].x.as_ref().unwrap()[i]
                    .matmul(&self.blocks[k].y[i])
                    .scale(&CycScalar::from_int(2));
                m = m.add_mat(&xy);
            }
        }
        for (elem, coeff) in self.params.euler_group_part() {
            m = m.sub_mat(&self.blocks[k].w[elem].scale(&coeff));
        }
        m
    }

    /// Verify every structural invariant blockwise: the defining relation,
    /// commutativity of the x's and of the y's, W-equivariance, the W-action
    /// being a representation, and the Euler grading.
    pub fn verify_relations(&self) -> Result<()> {
        let n = self.params.rank();
        let g = &self.params.group;
        let top = self.top();
        for k in 0..=top {
            let d = self.dim(k);
            // W-action is a representation
            for &a in g.generators() {
                for &b in g.generators() {
                    if self.blocks[k].w[a].matmul(&self.blocks[k].w[b])
                        != self.blocks[k].w[g.mul(a, b)]
                    {
                        return Err(Error::InvariantViolation(format!(
                            "W-action fails at degree {}",
                            k
                        )));
                    }
                }
            }
            // defining relation on block k (needs x out of block k)
            if let Some(xk) = &self.blocks[k].x {
                let next = k + 1;
                for i in 0..n {
                    for j in 0..n {
                        let up_down = if next <= top {
                            self.blocks[next].y[i].matmul(&xk[j])
                        } else {
                            ExactMatrix::zero(d, d)
                        };
                        let down_up = if k > 0 {
                            self.blocks[k - 1].x.as_ref().unwrap()[j]
                                .matmul(&self.blocks[k].y[i])
                        } else {
                            ExactMatrix::zero(d, d)
                        };
                        let lhs = up_down.sub_mat(&down_up);
                        let mut rhs = if i == j {
                            ExactMatrix::identity(d).scale(&self.params.t)
                        } else {
                            ExactMatrix::zero(d, d)
                        };
                        for (elem, coeff) in self.params.commutator_group_part(i, j) {
                            rhs = rhs.add_mat(&self.blocks[k].w[elem].scale(&coeff));
                        }
                        if lhs != rhs {
                            return Err(Error::InvariantViolation(format!(
                                "defining relation fails at degree {} (i={}, j={})",
                                k, i, j
                            )));
                        }
                    }
                }
                // x_i x_j = x_j x_i where the composite is materialized
                if k + 2 <= top || (self.complete && k + 1 <= top) {
                    if let Some(xn) = &self.blocks[k + 1].x {
                        for i in 0..n {
                            for j in 0..n {
                                if xn[i].matmul(&xk[j]) != xn[j].matmul(&xk[i]) {
                                    return Err(Error::InvariantViolation(format!(
                                        "x's do not commute at degree {}",
                                        k
                                    )));
                                }
                            }
                        }
                    }
                }
            }
            if k >= 2 {
                for i in 0..n {
                    for j in 0..n {
                        let a = self.blocks[k - 1].y[i].matmul(&self.blocks[k].y[j]);
                        let b = self.blocks[k - 1].y[j].matmul(&self.blocks[k].y[i]);
                        if a != b {
                            return Err(Error::InvariantViolation(format!(
                                "y's do not commute at degree {}",
                                k
                            )));
                        }
                    }
                }
            }
            // equivariance: w x_j w^{-1} = w(x_j), w y_j w^{-1} = w(y_j)
            for &wi in g.generators() {
                if let Some(xk) = &self.blocks[k].x {
                    if k + 1 <= top {
                        for j in 0..n {
                            let lhs = self.blocks[k + 1].w[wi].matmul(&xk[j]);
                            let mut rhs = ExactMatrix::zero(self.dim(k + 1), d);
                            for i in 0..n {
                                let coef = g.dual_mat(wi).at(i, j);
                                if !coef.is_zero() {
                                    rhs = rhs
                                        .add_mat(&xk[i].scale(coef).matmul(&self.blocks[k].w[wi]));
                                }
                            }
                            if lhs != rhs {
                                return Err(Error::InvariantViolation(format!(
                                    "x equivariance fails at degree {}",
                                    k
                                )));
                            }
                        }
                    }
                }
                if k > 0 {
                    for j in 0..n {
                        let lhs = self.blocks[k - 1].w[wi].matmul(&self.blocks[k].y[j]);
                        let mut rhs = ExactMatrix::zero(self.dim(k - 1), d);
                        for i in 0..n {
                            let coef = g.mat(wi).at(i, j);
                            if !coef.is_zero() {
                                rhs = rhs.add_mat(
                                    &self.blocks[k].y[i]
                                        .scale(coef)
                                        .matmul(&self.blocks[k].w[wi]),
                                );
                            }
                        }
                        if lhs != rhs {
                            return Err(Error::InvariantViolation(format!(
                                "y equivariance fails at degree {}",
                                k
                            )));
                        }
                    }
                }
            }
            // Euler grading
            if let Some(om) = &self.blocks[k].omega {
                let map = self.euler_block_map(k);
                if map != ExactMatrix::identity(d).scale(om) {
                    return Err(Error::InvariantViolation(format!(
                        "Euler element is not the stored scalar at degree {}",
                        k
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pad a complete module with zero blocks up to the given top degree.
    pub fn extended_to(&self, new_top: usize) -> Result<GradedModule> {
        if !self.complete {
            return Err(Error::BadWindow(
                "only complete modules can be zero-extended".into(),
            ));
        }
        let mut out = self.clone();
        let n = self.params.rank();
        let order = self.params.group.order();
        while out.blocks.len() <= new_top {
            let prev_dim = out.blocks.last().unwrap().dim;
            out.blocks.push(Block {
                dim: 0,
                w: (0..order).map(|_| ExactMatrix::zero(0, 0)).collect(),
                x: Some((0..n).map(|_| ExactMatrix::zero(0, 0)).collect()),
                y: (0..n).map(|_| ExactMatrix::zero(prev_dim, 0)).collect(),
                omega: Some(CycScalar::zero()),
            });
        }
        Ok(out)
    }

    /// Direct sum of two modules over the same parameters and window.
    pub fn direct_sum(&self, other: &GradedModule) -> Result<GradedModule> {
        if self.params.group.name != other.params.group.name
            || self.params.t != other.params.t
        {
            return Err(Error::DimensionMismatch(
                "direct sum requires identical parameters".into(),
            ));
        }
        let top = self.top().min(other.top());
        let g = &self.params.group;
        let mut blocks = Vec::new();
        for k in 0..=top {
            let (a, b) = (&self.blocks[k], &other.blocks[k]);
            let blockdiag = |m1: &ExactMatrix, m2: &ExactMatrix| -> ExactMatrix {
                let mut m = ExactMatrix::zero(m1.rows() + m2.rows(), m1.cols() + m2.cols());
                for r in 0..m1.rows() {
                    for c in 0..m1.cols() {
                        m.set(r, c, m1.at(r, c).clone());
                    }
                }
                for r in 0..m2.rows() {
                    for c in 0..m2.cols() {
                        m.set(m1.rows() + r, m1.cols() + c, m2.at(r, c).clone());
                    }
                }
                m
            };
            let x = match (&a.x, &b.x) {
                (Some(xa), Some(xb)) if k < top => Some(
                    (0..xa.len())
                        .map(|i| blockdiag(&xa[i], &xb[i]))
                        .collect::<Vec<_>>(),
                ),
                (Some(xa), Some(xb)) if self.complete && other.complete => Some(
                    (0..xa.len())
                        .map(|i| blockdiag(&xa[i], &xb[i]))
                        .collect::<Vec<_>>(),
                ),
                _ => None,
            };
            let omega = match (&a.omega, &b.omega) {
                (Some(oa), Some(ob)) if oa == ob => Some(oa.clone()),
                _ => None,
            };
            blocks.push(Block {
                dim: a.dim + b.dim,
                w: (0..g.order()).map(|e| blockdiag(&a.w[e], &b.w[e])).collect(),
                x,
                y: (0..self.params.rank())
                    .map(|i| blockdiag(&a.y[i], &b.y[i]))
                    .collect(),
                omega,
            });
        }
        Ok(GradedModule {
            params: self.params.clone(),
            blocks,
            complete: self.complete && other.complete && self.top() == other.top(),
        })
    }
}

// --- monomial bookkeeping for S^k(h*) ---

/// Multi-indices of total degree k in n variables, lexicographic.
pub fn monomials(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(k);
            out.push(v);
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            rec(n - 1, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k as u32, &mut Vec::new(), &mut out);
    out
}

type Poly = BTreeMap<Vec<u32>, CycScalar>;

fn poly_mul_linear(p: &Poly, linear: &[CycScalar]) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for (mono, c) in p {
        for (i, l) in linear.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let mut m2 = mono.clone();
            m2[i] += 1;
            let add = c.mul_ref(l);
            let e = out.entry(m2).or_insert_with(CycScalar::zero);
            *e = e.add_ref(&add);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Matrix of the W-action on S^k(h*) in the lexicographic monomial basis;
/// `dual = true` acts on polynomials in the x's, `false` on polynomials in
/// the y's.
pub fn poly_action(g: &ReflectionGroup, elem: usize, k: usize, dual: bool) -> ExactMatrix {
    let n = g.rank();
    let monos = monomials(n, k);
    let idx: BTreeMap<Vec<u32>, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mat = if dual { g.dual_mat(elem) } else { g.mat(elem) };
    let mut out = ExactMatrix::zero(monos.len(), monos.len());
    for (col, mono) in monos.iter().enumerate() {
        let mut p: Poly = BTreeMap::new();
        p.insert(vec![0; n], CycScalar::one());
        for (var, &e) in mono.iter().enumerate() {
            let linear: Vec<CycScalar> = (0..n).map(|i| mat.at(i, var).clone()).collect();
            for _ in 0..e {
                p = poly_mul_linear(&p, &linear);
            }
        }
        for (m2, c) in p {
            out.set(idx[&m2], col, c);
        }
    }
    out
}

/// A standard module together with the monomial bookkeeping needed by the
/// contravariant form.
pub struct StandardModule {
    pub module: GradedModule,
    pub sigma: String,
    pub sigma_dim: usize,
    /// per degree k >= 1, per basis index: (variable j, basis index in k-1)
    /// with basis vector = x_j * (that lower basis vector)
    factor: Vec<Vec<(usize, usize)>>,
}

/// The standard module with lowest block sigma, materialized on degrees
/// [0, window]. t is arbitrary (the same construction runs at t = 0).
pub fn standard_module(
    params: &CherednikParams,
    table: &IrrepTable,
    sigma: &str,
    window: usize,
) -> Result<StandardModule> {
    let irr = table.by_label(sigma)?;
    let n = params.rank();
    let g = &params.group;
    let d = irr.dim;
    // bases: block k has basis (monomial alpha, sigma index e), index = a*d + e
    let monos: Vec<Vec<Vec<u32>>> = (0..=window).map(|k| monomials(n, k)).collect();
    let mono_idx: Vec<BTreeMap<Vec<u32>, usize>> = monos
        .iter()
        .map(|ms| {
            ms.iter()
                .cloned()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect()
        })
        .collect();
    let dim = |k: usize| monos[k].len() * d;
    // W-action: poly action (x) sigma
    let mut w_acts: Vec<Vec<ExactMatrix>> = Vec::with_capacity(window + 1);
    for k in 0..=window {
        let mut per_elem = Vec::with_capacity(g.order());
        for e in 0..g.order() {
            per_elem.push(poly_action(g, e, k, true).kron(&irr.mats[e]));
        }
        w_acts.push(per_elem);
    }
    // x maps: monomial shift
    let mut x_maps: Vec<Vec<ExactMatrix>> = Vec::with_capacity(window);
    for k in 0..window {
        let mut per_i = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = ExactMatrix::zero(dim(k + 1), dim(k));
            for (a, mono) in monos[k].iter().enumerate() {
                let mut m2 = mono.clone();
                m2[i] += 1;
                let b = mono_idx[k + 1][&m2];
                for e in 0..d {
                    m.set(b * d + e, a * d + e, CycScalar::one());
                }
            }
            per_i.push(m);
        }
        x_maps.push(per_i);
    }
    // y maps by structural recursion on monomials
    let mut y_maps: Vec<Vec<ExactMatrix>> = Vec::with_capacity(window + 1);
    y_maps.push((0..n).map(|_| ExactMatrix::zero(0, dim(0))).collect());
    let mut factor: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for k in 1..=window {
        let mut fac = Vec::with_capacity(monos[k].len());
        for mono in monos[k].iter() {
            let j = mono.iter().position(|&e| e > 0).unwrap();
            let mut lower = mono.clone();
            lower[j] -= 1;
            fac.push((j, mono_idx[k - 1][&lower]));
        }
        let mut per_i = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = ExactMatrix::zero(dim(k - 1), dim(k));
            for (a, _mono) in monos[k].iter().enumerate() {
                let (j, lower_idx) = fac[a];
                for e in 0..d {
                    let src = a * d + e;
                    // v = x_j * u with u = basis (lower_idx, e) in block k-1
                    // y_i v = x_j (y_i u) + [y_i, x_j] u
                    let mut img = vec![CycScalar::zero(); dim(k - 1)];
                    if k >= 2 {
                        let yu = y_maps[k - 1][i].col(lower_idx * d + e);
                        let xyu = x_maps[k - 2][j].apply(&yu);
                        for (r, v) in xyu.iter().enumerate() {
                            img[r] = img[r].add_ref(v);
                        }
                    }
                    if i == j && !params.t.is_zero() {
                        img[lower_idx * d + e] =
                            img[lower_idx * d + e].add_ref(&params.t);
                    }
                    for (elem, coeff) in params.commutator_group_part(i, j) {
                        let su = w_acts[k - 1][elem].col(lower_idx * d + e);
                        for (r, v) in su.iter().enumerate() {
                            if !v.is_zero() {
                                img[r] = img[r].add_ref(&v.mul_ref(&coeff));
                            }
                        }
                    }
                    for (r, v) in img.into_iter().enumerate() {
                        if !v.is_zero() {
                            m.set(r, src, v);
                        }
                    }
                }
            }
            per_i.push(m);
        }
        y_maps.push(per_i);
        factor.push(fac);
    }
    // assemble blocks with Euler scalars
    let mut blocks = Vec::with_capacity(window + 1);
    for k in 0..=window {
        let x = if k < window {
            Some(x_maps[k].clone())
        } else {
            None
        };
        blocks.push(Block {
            dim: dim(k),
            w: w_acts[k].clone(),
            x,
            y: y_maps[k].clone(),
            omega: None,
        });
    }
    let mut module = GradedModule {
        params: params.clone(),
        blocks,
        complete: false,
    };
    // Euler scalars: computed from the block map, asserted scalar, and
    // checked to step by 2t per degree
    let mut prev: Option<CycScalar> = None;
    for k in 0..=window {
        let om = scalar_of(&module.euler_block_map(k)).ok_or_else(|| {
            Error::NotScalar(format!("Euler element not scalar on degree {}", k))
        })?;
        if let Some(p) = &prev {
            let expect = p.add_ref(&params.t.mul_ref(&CycScalar::from_int(2)));
            if om != expect {
                return Err(Error::InvariantViolation(
                    "Euler scalars do not step by 2t".into(),
                ));
            }
        }
        module.blocks[k].omega = Some(om.clone());
        prev = Some(om);
    }
    Ok(StandardModule {
        module,
        sigma: sigma.to_string(),
        sigma_dim: d,
        factor,
    })
}

fn scalar_of(m: &ExactMatrix) -> Option<CycScalar> {
    if m.rows() == 0 {
        return Some(CycScalar::zero());
    }
    let c = m.at(0, 0).clone();
    let expect = ExactMatrix::identity(m.rows()).scale(&c);
    if *m == expect {
        Some(c)
    } else {
        None
    }
}

/// The scalar by which the Euler element acts on the lowest block of the
/// standard module with lowest weight sigma.
pub fn euler_lowest(
    params: &CherednikParams,
    table: &IrrepTable,
    sigma: &str,
) -> Result<CycScalar> {
    let irr = table.by_label(sigma)?;
    let n = params.rank() as i64;
    let d = irr.dim;
    let mut m = ExactMatrix::identity(d).scale(&params.t.mul_ref(&CycScalar::from_int(n)));
    for (elem, coeff) in params.euler_group_part() {
        m = m.sub_mat(&irr.mats[elem].scale(&coeff));
    }
    scalar_of(&m).ok_or_else(|| Error::NotScalar("Euler element on the lowest block".into()))
}

// --- maximal proper graded submodule and simple quotients ---

/// The maximal proper graded submodule, one exact subspace per degree.
///
/// For complete modules this is the fixed-point iteration over generator
/// preimages. For windowed infinite modules it is computed degree-locally:
/// a vector of degree k lies in the maximal submodule iff every length-k
/// word in the lowering operators kills it, which needs no window beyond
/// degree k (the two computations agree on complete modules; tested).
pub fn maximal_submodule(m: &GradedModule) -> Vec<Subspace> {
    if m.is_complete() {
        maximal_submodule_fixed_point(m)
    } else {
        maximal_submodule_lowering(m)
    }
}

pub fn maximal_submodule_lowering(m: &GradedModule) -> Vec<Subspace> {
    let n = m.params.rank();
    let mut out = vec![Subspace::zero(m.dim(0))];
    // lowering-word matrices block k -> block 0, per monomial in the y's
    let mut prev: Vec<(Vec<u32>, ExactMatrix)> =
        vec![(vec![0; n], ExactMatrix::identity(m.dim(0)))];
    for k in 1..=m.top() {
        let mut cur: Vec<(Vec<u32>, ExactMatrix)> = Vec::new();
        for beta in monomials(n, k) {
            let j = beta.iter().position(|&e| e > 0).unwrap();
            let mut lower = beta.clone();
            lower[j] -= 1;
            let rest = &prev.iter().find(|(b, _)| *b == lower).unwrap().1;
            cur.push((beta, rest.matmul(m.y_op(k, j))));
        }
        let mut stacked = cur[0].1.clone();
        for (_, mat) in cur.iter().skip(1) {
            stacked = stacked.vstack(mat);
        }
        out.push(Subspace::from_kernel(&stacked));
        prev = cur;
    }
    out
}

pub fn maximal_submodule_fixed_point(m: &GradedModule) -> Vec<Subspace> {
    let n = m.params.rank();
    let g = &m.params.group;
    let top = m.top();
    let mut j: Vec<Subspace> = (0..=top)
        .map(|k| {
            if k == 0 {
                Subspace::zero(m.dim(0))
            } else {
                Subspace::full(m.dim(k))
            }
        })
        .collect();
    loop {
        let mut changed = false;
        for k in 1..=top {
            let mut cur = j[k].clone();
            for i in 0..n {
                cur = cur
                    .intersect(&preimage(&m.block(k).y[i], &j[k - 1]))
                    .unwrap();
            }
            if k < top {
                if let Some(x) = &m.block(k).x {
                    for i in 0..n {
                        cur = cur.intersect(&preimage(&x[i], &j[k + 1])).unwrap();
                    }
                }
            }
            for &w in g.generators() {
                cur = cur.intersect(&preimage(&m.block(k).w[w], &j[k])).unwrap();
            }
            if cur != j[k] {
                j[k] = cur;
                changed = true;
            }
        }
        if !changed {
            return j;
        }
    }
}

/// Preimage A^{-1}(S) as a subspace of the domain.
fn preimage(a: &ExactMatrix, s: &Subspace) -> Subspace {
    if s.dim() == s.ambient() {
        return Subspace::full(a.cols());
    }
    if s.dim() == 0 {
        return Subspace::from_kernel(a);
    }
    let basis = ExactMatrix::from_cols(s.basis_vectors());
    let stacked = a.hstack(&basis.neg_mat());
    let mut vecs = Vec::new();
    for k in stacked.kernel_basis() {
        vecs.push(k[..a.cols()].to_vec());
    }
    Subspace::from_vectors(a.cols(), &vecs)
}

/// Quotient of a module by a generator-stable family of subspaces.
pub fn quotient_module(m: &GradedModule, j: &[Subspace]) -> Result<GradedModule> {
    let n = m.params.rank();
    let g = &m.params.group;
    let top = m.top();
    // stability checks
    for k in 0..=top {
        for v in j[k].basis_vectors() {
            for i in 0..n {
                let yv = m.block(k).y[i].apply(&v);
                if k == 0 {
                    if !yv.is_empty() && yv.iter().any(|c| !c.is_zero()) {
                        return Err(Error::InvariantViolation("submodule not y-stable".into()));
                    }
                } else if !j[k - 1].contains(&yv) {
                    return Err(Error::InvariantViolation("submodule not y-stable".into()));
                }
            }
            if k < top {
                if let Some(x) = &m.block(k).x {
                    for i in 0..n {
                        if !j[k + 1].contains(&x[i].apply(&v)) {
                            return Err(Error::InvariantViolation(
                                "submodule not x-stable".into(),
                            ));
                        }
                    }
                }
            }
            for &w in g.generators() {
                if !j[k].contains(&m.block(k).w[w].apply(&v)) {
                    return Err(Error::InvariantViolation("submodule not W-stable".into()));
                }
            }
        }
    }
    // sections and projections per degree
    let mut sections: Vec<ExactMatrix> = Vec::new();
    let mut projections: Vec<ExactMatrix> = Vec::new();
    for k in 0..=top {
        let full = Subspace::full(m.dim(k));
        let comp = full.complement_of(&j[k])?;
        let q = comp.len();
        let mut cols: Vec<Vector> = j[k].basis_vectors();
        cols.extend(comp.iter().cloned());
        let section = if q == 0 {
            ExactMatrix::zero(m.dim(k), 0)
        } else {
            ExactMatrix::from_cols(comp.clone())
        };
        let proj = if m.dim(k) == 0 || q == 0 {
            ExactMatrix::zero(q, m.dim(k))
        } else {
            let basis = ExactMatrix::from_cols(cols);
            let inv = basis.inverse()?;
            ExactMatrix::from_fn(q, m.dim(k), |r, c| inv.at(j[k].dim() + r, c).clone())
        };
        sections.push(section);
        projections.push(proj);
    }
    let mut blocks = Vec::new();
    for k in 0..=top {
        let x = if k < top {
            m.block(k).x.as_ref().map(|xs| {
                (0..n)
                    .map(|i| projections[k + 1].matmul(&xs[i]).matmul(&sections[k]))
                    .collect::<Vec<_>>()
            })
        } else if m.is_complete() {
            Some(
                (0..n)
                    .map(|_| ExactMatrix::zero(0, projections[k].rows()))
                    .collect(),
            )
        } else {
            None
        };
        let y = (0..n)
            .map(|i| {
                if k == 0 {
                    ExactMatrix::zero(0, projections[0].rows())
                } else {
                    projections[k - 1]
                        .matmul(&m.block(k).y[i])
                        .matmul(&sections[k])
                }
            })
            .collect();
        let w = (0..g.order())
            .map(|e| projections[k].matmul(&m.block(k).w[e]).matmul(&sections[k]))
            .collect();
        blocks.push(Block {
            dim: projections[k].rows(),
            w,
            x,
            y,
            omega: None,
        });
    }
    let mut out = GradedModule {
        params: m.params.clone(),
        blocks,
        complete: m.is_complete(),
    };
    // a vanished block makes everything above vanish in a lowest-weight
    // quotient; trim and mark complete
    if let Some(first_zero) = (0..=out.top()).find(|&k| out.dim(k) == 0) {
        out.blocks.truncate(first_zero.max(1));
        let t = out.blocks.len() - 1;
        let n = out.params.rank();
        out.blocks[t].x = Some((0..n).map(|_| ExactMatrix::zero(0, out.dim(t))).collect());
        out.complete = true;
    }
    for k in 0..=out.top() {
        out.blocks[k].omega = scalar_of(&out.euler_block_map(k));
    }
    Ok(out)
}

pub struct SimpleQuotient {
    pub module: GradedModule,
    pub radical_dims: Vec<usize>,
    /// Degrees at which the result is exact. Both computation paths are
    /// degree-exact, so this is all materialized degrees.
    pub stabilized: Vec<bool>,
}

/// The unique simple quotient of a module generated by its W-irreducible
/// lowest block.
pub fn simple_quotient(m: &GradedModule, table: &IrrepTable) -> Result<SimpleQuotient> {
    // block 0 irreducible
    let mults = decompose_wmodule(&m.params.group, table, &|e| m.block(0).w[e].clone())?;
    if mults.len() != 1 || mults[0].1 != 1 {
        return Err(Error::InvariantViolation(
            "lowest block is not irreducible".into(),
        ));
    }
    // block 0 generates: each block is the span of x-images of the previous
    for k in 0..m.top() {
        if let Some(x) = &m.block(k).x {
            let mut vecs = Vec::new();
            for xi in x {
                for c in 0..xi.cols() {
                    vecs.push(xi.col(c));
                }
            }
            let span = Subspace::from_vectors(m.dim(k + 1), &vecs);
            if span.dim() != m.dim(k + 1) {
                return Err(Error::InvariantViolation(
                    "lowest block does not generate the module".into(),
                ));
            }
        }
    }
    let j = maximal_submodule(m);
    let module = quotient_module(m, &j)?;
    let radical_dims = j.iter().map(|s| s.dim()).collect();
    let stabilized = vec![true; module.top() + 1];
    Ok(SimpleQuotient {
        module,
        radical_dims,
        stabilized,
    })
}

// --- baby Verma modules at t = 0 ---

/// Basis of the W-invariant polynomials of degree k on the x side
/// (dual = true) or the y side (dual = false), as coordinate vectors in the
/// lexicographic monomial basis.
pub fn invariant_polynomials(
    g: &ReflectionGroup,
    k: usize,
    dual: bool,
) -> Vec<Vector> {
    let dim = monomials(g.rank(), k).len();
    let mut reynolds = ExactMatrix::zero(dim, dim);
    for e in 0..g.order() {
        reynolds = reynolds.add_mat(&poly_action(g, e, k, dual));
    }
    let inv_order = CycScalar::from_int(g.order() as i64).inv().unwrap();
    reynolds = reynolds.scale(&inv_order);
    Subspace::from_image(&reynolds).basis_vectors()
}

/// The baby Verma module at t = 0: the quotient of the standard-type
/// induction by the submodule generated by positive-degree W-invariant
/// polynomials acting on the lowest block. Finite-dimensional of dimension
/// |W| dim sigma, annihilated by the positive-degree invariants on both
/// sides (all checked).
pub fn baby_verma(
    params: &CherednikParams,
    table: &IrrepTable,
    sigma: &str,
) -> Result<GradedModule> {
    if !params.t.is_zero() {
        return Err(Error::InvariantViolation("baby Verma requires t = 0".into()));
    }
    let g = &params.group;
    let n = params.rank();
    let top = params.reflections.len() + 1;
    let std = standard_module(params, table, sigma, top)?;
    let m = &std.module;
    let d = std.sigma_dim;
    // ideal subspaces per degree
    let mut ideal: Vec<Subspace> = vec![Subspace::zero(m.dim(0))];
    for k in 1..=top {
        let mut vecs: Vec<Vector> = Vec::new();
        // x_i * (ideal at k-1)
        if let Some(x) = &m.block(k - 1).x {
            for i in 0..n {
                for v in ideal[k - 1].basis_vectors() {
                    vecs.push(x[i].apply(&v));
                }
            }
        }
        // invariants of degree k tensor the lowest block
        for f in invariant_polynomials(g, k, true) {
            for e in 0..d {
                let mut v = vec![CycScalar::zero(); m.dim(k)];
                for (a, coef) in f.iter().enumerate() {
                    v[a * d + e] = coef.clone();
                }
                vecs.push(v);
            }
        }
        ideal.push(Subspace::from_vectors(m.dim(k), &vecs));
    }
    let quotient = quotient_module(m, &ideal)?;
    if !quotient.is_complete() {
        return Err(Error::InvariantViolation(
            "baby Verma quotient did not close up within the window".into(),
        ));
    }
    let expected = g.order() * d;
    if quotient.total_dim() != expected {
        return Err(Error::InvariantViolation(format!(
            "baby Verma dimension {} != |W| dim sigma = {}",
            quotient.total_dim(),
            expected
        )));
    }
    annihilation_check(&quotient)?;
    Ok(quotient)
}

/// Positive-degree invariant polynomials (both sides) annihilate the module.
fn annihilation_check(m: &GradedModule) -> Result<()> {
    let g = &m.params.group;
    let n = m.params.rank();
    for deg in 1..=m.top() {
        // x-side invariants: raise by deg
        for f in invariant_polynomials(g, deg, true) {
            for k in 0..=m.top() {
                if k + deg > m.top() {
                    // target blocks are zero for a complete module
                    continue;
                }
                let mut op = ExactMatrix::zero(m.dim(k + deg), m.dim(k));
                for (a, coef) in f.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let mono = &monomials(n, deg)[a];
                    let mut path = ExactMatrix::identity(m.dim(k));
                    let mut cur = k;
                    for (var, &e) in mono.iter().enumerate() {
                        for _ in 0..e {
                            path = m
                                .x_op(cur, var)
                                .expect("complete module has all x maps")
                                .matmul(&path);
                            cur += 1;
                        }
                    }
                    op = op.add_mat(&path.scale(coef));
                }
                if !op.is_zero() {
                    return Err(Error::InvariantViolation(
                        "x-side invariant does not annihilate the baby Verma".into(),
                    ));
                }
            }
        }
        // y-side invariants: lower by deg
        for f in invariant_polynomials(g, deg, false) {
            for k in deg..=m.top() {
                let mut op = ExactMatrix::zero(m.dim(k - deg), m.dim(k));
                for (a, coef) in f.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let mono = &monomials(n, deg)[a];
                    let mut path = ExactMatrix::identity(m.dim(k));
                    let mut cur = k;
                    for (var, &e) in mono.iter().enumerate() {
                        for _ in 0..e {
                            path = m.y_op(cur, var).matmul(&path);
                            cur -= 1;
                        }
                    }
                    op = op.add_mat(&path.scale(coef));
                }
                if !op.is_zero() {
                    return Err(Error::InvariantViolation(
                        "y-side invariant does not annihilate the baby Verma".into(),
                    ));
                }
            }
        }
    }
    Ok(())
}

// --- contravariant Hermitian forms ---

#[derive(Clone, Debug)]
pub struct ContravariantForm {
    /// Gram matrix per degree, for the Hermitian form with x_i adjoint to
    /// y_i and W-invariance; F(u, v) = u^T G conj(v).
    pub grams: Vec<ExactMatrix>,
}

/// Build the contravariant form on a standard module from the averaged
/// positive W-invariant form on the lowest block. Requires parameters
/// compatible with the star structure: conj(t) = t and
/// conj(c(class of s^{-1})) = c(class of s).
pub fn contravariant_form(std: &StandardModule) -> Result<ContravariantForm> {
    let m = &std.module;
    let params = &m.params;
    if !params.t.is_real() {
        return Err(Error::ParamsNotStar("t is not real".into()));
    }
    for r in params.reflections.iter() {
        let inv_elem = params.group.inv(r.elem);
        let inv_label = &params
            .reflections
            .iter()
            .find(|q| q.elem == inv_elem)
            .expect("inverse of a reflection is a reflection")
            .class_label;
        if params.c.value(inv_label).conj() != *params.c.value(&r.class_label) {
            return Err(Error::ParamsNotStar(
                "c is not conjugation-compatible across inverse classes".into(),
            ));
        }
    }
    // averaged form on the lowest block
    let d0 = m.dim(0);
    let mut g0 = ExactMatrix::zero(d0, d0);
    for e in 0..params.group.order() {
        let w = &m.block(0).w[e];
        g0 = g0.add_mat(&w.transpose().matmul(&w.conj()));
    }
    g0 = g0.scale(&CycScalar::from_int(params.group.order() as i64).inv().unwrap());
    let mut grams = vec![g0];
    for k in 1..=m.top() {
        let dk = m.dim(k);
        let mut gk = ExactMatrix::zero(dk, dk);
        for a in 0..dk {
            let (j, lower) = std.factor[k][a / std.sigma_dim];
            let a_lower = lower * std.sigma_dim + a % std.sigma_dim;
            // F(x_j u, v) = F(u, y_j v)
            let row = grams[k - 1]
                .matmul(&m.block(k).y[j].conj());
            for b in 0..dk {
                gk.set(a, b, row.at(a_lower, b).clone());
            }
        }
        grams.push(gk);
    }
    let form = ContravariantForm { grams };
    verify_form(std, &form)?;
    Ok(form)
}

/// Contravariance, Hermitian symmetry and W-invariance, blockwise and exact.
fn verify_form(std: &StandardModule, form: &ContravariantForm) -> Result<()> {
    let m = &std.module;
    let n = m.params.rank();
    for k in 0..=m.top() {
        let gk = &form.grams[k];
        if *gk != gk.conj_transpose() {
            return Err(Error::ParamsNotStar(format!(
                "Gram matrix at degree {} is not Hermitian",
                k
            )));
        }
        for &w in m.params.group.generators() {
            let wk = &m.block(k).w[w];
            if wk.transpose().matmul(gk).matmul(&wk.conj()) != *gk {
                return Err(Error::ParamsNotStar(format!(
                    "form is not W-invariant at degree {}",
                    k
                )));
            }
        }
        if k > 0 {
            let gprev = &form.grams[k - 1];
            for i in 0..n {
                let x = &m.block(k - 1).x.as_ref().unwrap()[i];
                let y = &m.block(k).y[i];
                if x.transpose().matmul(gk) != gprev.matmul(&y.conj()) {
                    return Err(Error::ParamsNotStar(format!(
                        "contravariance fails at degree {} direction {}",
                        k, i
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Certified positive-definiteness per degree (leading principal minors).
pub fn is_unitary(form: &ContravariantForm, through: usize) -> Result<Vec<bool>> {
    let mut out = Vec::new();
    for k in 0..=through.min(form.grams.len() - 1) {
        let g = &form.grams[k];
        let mut ok = true;
        for sz in 1..=g.rows() {
            let minor = ExactMatrix::from_fn(sz, sz, |r, c| g.at(r, c).clone()).det();
            match minor.certified_sign()? {
                Sign::Positive => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        out.push(ok);
    }
    Ok(out)
}
