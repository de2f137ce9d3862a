//! Complex reflection groups acting on h, with reflection data, conjugacy
//! classes, explicit irreducible representations, and character-based
//! decomposition of W-modules.
//!
//! The catalog ships verified irrep matrices for cyclic groups, the
//! dihedral groups G(m,m,2), and the symmetric groups S_3 and S_4 in their
//! reflection representations. Everything is checked at construction time:
//! closure, invariance of the pairing, homomorphism property of each irrep,
//! and exact character orthogonality.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::scalars::CycScalar;

#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    pub name: String,
    rank: usize,
    elements: Vec<ExactMatrix>,
    dual: Vec<ExactMatrix>,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    generators: Vec<usize>,
}

impl ReflectionGroup {
    /// Closure of a set of invertible matrices under multiplication.
    pub fn generate(name: &str, gens: &[ExactMatrix], cap: usize) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::UnsupportedGroup("no generators".into()));
        }
        let rank = gens[0].rows();
        for g in gens {
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::DimensionMismatch("generators not square".into()));
            }
            if g.inverse().is_err() {
                return Err(Error::NotInvertible);
            }
        }
        let mut elements = vec![ExactMatrix::identity(rank)];
        let find = |els: &[ExactMatrix], m: &ExactMatrix| els.iter().position(|e| e == m);
        let mut frontier = vec![0usize];
        while let Some(i) = frontier.pop() {
            for g in gens {
                let prod = elements[i].matmul(g);
                if find(&elements, &prod).is_none() {
                    elements.push(prod);
                    frontier.push(elements.len() - 1);
                    if elements.len() > cap {
                        return Err(Error::CapExceeded(format!(
                            "group order exceeds cap {}",
                            cap
                        )));
                    }
                }
            }
        }
        let gen_indices: Vec<usize> = gens
            .iter()
            .map(|g| find(&elements, g).expect("generators are in the closure"))
            .collect();
        let n = elements.len();
        let mut mult = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = elements[i].matmul(&elements[j]);
                mult[i][j] = find(&elements, &prod).ok_or_else(|| {
                    Error::InvariantViolation("set not closed under products".into())
                })?;
            }
        }
        let mut inv = vec![0usize; n];
        for i in 0..n {
            inv[i] = (0..n)
                .find(|&j| mult[i][j] == 0)
                .ok_or(Error::NotInvertible)?;
        }
        // dual action on h*: (A^{-1})^T
        let dual: Vec<ExactMatrix> = (0..n).map(|i| elements[inv[i]].transpose()).collect();
        // conjugacy classes by orbit
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let cid = classes.len();
            let mut orbit = vec![i];
            class_of[i] = cid;
            let mut stack = vec![i];
            while let Some(x) = stack.pop() {
                for g in 0..n {
                    let y = mult[mult[g][x]][inv[g]];
                    if class_of[y] == usize::MAX {
                        class_of[y] = cid;
                        orbit.push(y);
                        stack.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            classes.push(orbit);
        }
        let g = ReflectionGroup {
            name: name.to_string(),
            rank,
            elements,
            dual,
            mult,
            inv,
            classes,
            class_of,
            generators: gen_indices,
        };
        g.check_pairing_invariance()?;
        Ok(g)
    }

    /// The W-invariant pairing <y_i, x_j> = delta_ij must be preserved:
    /// B_w^T A_w = Id for every element.
    fn check_pairing_invariance(&self) -> Result<()> {
        for i in 0..self.order() {
            let prod = self.dual[i].transpose().matmul(&self.elements[i]);
            if prod != ExactMatrix::identity(self.rank) {
                return Err(Error::InvariantViolation(
                    "pairing between h and h* is not W-invariant".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Action on h.
    pub fn mat(&self, i: usize) -> &ExactMatrix {
        &self.elements[i]
    }

    /// Action on h* (inverse transpose).
    pub fn dual_mat(&self, i: usize) -> &ExactMatrix {
        &self.dual[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mult[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn det_h(&self, i: usize) -> CycScalar {
        self.elements[i].det()
    }

    pub fn det_hstar(&self, i: usize) -> CycScalar {
        self.dual[i].det()
    }
}

/// A pseudo-reflection with its hyperplane data.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub elem: usize,
    /// alpha_s in h*, spanning im(Id - s) on h*.
    pub alpha: Vec<CycScalar>,
    /// alpha_s^check in h, spanning im(Id - s) on h.
    pub alpha_check: Vec<CycScalar>,
    /// nontrivial eigenvalue of s on h (= det_h(s) for a reflection)
    pub lambda: CycScalar,
    /// <alpha_check, alpha>
    pub pairing: CycScalar,
    pub class_label: String,
}

/// All pseudo-reflections of the group: elements with rank(Id - s) = 1 on h.
pub fn find_reflections(g: &ReflectionGroup) -> Vec<Reflection> {
    let n = g.rank();
    let id = ExactMatrix::identity(n);
    let mut out = Vec::new();
    let mut refl_class_ids: Vec<usize> = Vec::new();
    for i in 1..g.order() {
        let diff_h = id.sub_mat(g.mat(i));
        if diff_h.rank() != 1 {
            continue;
        }
        let alpha_check = normalize_span(&diff_h.image_basis()[0]);
        let diff_hstar = id.sub_mat(g.dual_mat(i));
        let alpha = normalize_span(&diff_hstar.image_basis()[0]);
        let lambda = g.det_h(i);
        // eigenvalue check the other way: s(alpha_check) = lambda * alpha_check
        let image = g.mat(i).apply(&alpha_check);
        let scaled: Vec<CycScalar> = alpha_check.iter().map(|v| v.mul_ref(&lambda)).collect();
        assert_eq!(image, scaled, "det and eigenvalue disagree on a reflection");
        let pairing = alpha_check
            .iter()
            .zip(alpha.iter())
            .fold(CycScalar::zero(), |acc, (b, a)| acc.add_ref(&b.mul_ref(a)));
        assert!(!pairing.is_zero(), "degenerate reflection pairing");
        let cid = g.class_of(i);
        if !refl_class_ids.contains(&cid) {
            refl_class_ids.push(cid);
        }
        let label_idx = refl_class_ids.iter().position(|&c| c == cid).unwrap();
        out.push(Reflection {
            elem: i,
            alpha,
            alpha_check,
            lambda,
            pairing,
            class_label: format!("s{}", label_idx),
        });
    }
    out
}

/// Fix the first nonzero coordinate to 1 (the defining relation is
/// invariant under independent rescaling of alpha and alpha_check).
fn normalize_span(v: &[CycScalar]) -> Vec<CycScalar> {
    let lead = v.iter().find(|x| !x.is_zero()).expect("zero span vector");
    let inv = lead.inv().unwrap();
    v.iter().map(|x| x.mul_ref(&inv)).collect()
}

/// W-invariant reflection parameter c: one exact value per reflection class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamC {
    values: Vec<(String, CycScalar)>,
}

impl ParamC {
    pub fn constant(refls: &[Reflection], value: CycScalar) -> Self {
        let mut labels: Vec<String> = refls.iter().map(|r| r.class_label.clone()).collect();
        labels.sort();
        labels.dedup();
        ParamC {
            values: labels.into_iter().map(|l| (l, value.clone())).collect(),
        }
    }

    pub fn from_map(refls: &[Reflection], map: &[(String, CycScalar)]) -> Result<Self> {
        let mut labels: Vec<String> = refls.iter().map(|r| r.class_label.clone()).collect();
        labels.sort();
        labels.dedup();
        let mut values = Vec::new();
        for l in labels {
            let v = map
                .iter()
                .find(|(k, _)| *k == l)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Parse(format!("missing c value for class {}", l)))?;
            values.push((l, v));
        }
        Ok(ParamC { values })
    }

    pub fn value(&self, label: &str) -> &CycScalar {
        &self
            .values
            .iter()
            .find(|(l, _)| l == label)
            .expect("unknown reflection class")
            .1
    }

    pub fn labels(&self) -> Vec<&str> {
        self.values.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn map(&self, f: impl Fn(&CycScalar) -> CycScalar) -> Self {
        ParamC {
            values: self
                .values
                .iter()
                .map(|(l, v)| (l.clone(), f(v)))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|(_, v)| v.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub mats: Vec<ExactMatrix>,
    /// character per conjugacy class
    pub character: Vec<CycScalar>,
}

#[derive(Clone, Debug)]
pub struct IrrepTable {
    pub irreps: Vec<Irrep>,
}

impl IrrepTable {
    /// Build from explicit matrices and verify all invariants exactly.
    pub fn new(g: &ReflectionGroup, raw: Vec<(String, Vec<ExactMatrix>)>) -> Result<Self> {
        let mut irreps = Vec::new();
        for (label, mats) in raw {
            if mats.len() != g.order() {
                return Err(Error::NonRepresentation(format!(
                    "irrep {} has {} matrices, expected {}",
                    label,
                    mats.len(),
                    g.order()
                )));
            }
            let dim = mats[0].rows();
            // full homomorphism check against the multiplication table
            for i in 0..g.order() {
                for j in 0..g.order() {
                    if mats[i].matmul(&mats[j]) != mats[g.mul(i, j)] {
                        return Err(Error::NonRepresentation(format!(
                            "irrep {} is not a homomorphism at ({}, {})",
                            label, i, j
                        )));
                    }
                }
            }
            let character = g.classes().iter().map(|cl| mats[cl[0]].trace()).collect();
            irreps.push(Irrep {
                label,
                dim,
                mats,
                character,
            });
        }
        let table = IrrepTable { irreps };
        table.verify(g)?;
        Ok(table)
    }

    /// Sum of squares and exact first orthogonality.
    pub fn verify(&self, g: &ReflectionGroup) -> Result<()> {
        let total: usize = self.irreps.iter().map(|i| i.dim * i.dim).sum();
        if total != g.order() {
            return Err(Error::InvariantViolation(format!(
                "sum of dim^2 = {} but |W| = {}",
                total,
                g.order()
            )));
        }
        let order = CycScalar::from_int(g.order() as i64);
        for (a, ia) in self.irreps.iter().enumerate() {
            for (b, ib) in self.irreps.iter().enumerate() {
                let mut acc = CycScalar::zero();
                for (cid, cl) in g.classes().iter().enumerate() {
                    let size = CycScalar::from_int(cl.len() as i64);
                    acc = acc.add_ref(
                        &size.mul_ref(&ia.character[cid].mul_ref(&ib.character[cid].conj())),
                    );
                }
                let expected = if a == b {
                    order.clone()
                } else {
                    CycScalar::zero()
                };
                if acc != expected {
                    return Err(Error::InvariantViolation(format!(
                        "character orthogonality fails for {} vs {}",
                        ia.label, ib.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn by_label(&self, label: &str) -> Result<&Irrep> {
        self.irreps
            .iter()
            .find(|i| i.label == label)
            .ok_or_else(|| Error::UnsupportedGroup(format!("unknown irrep {}", label)))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.irreps.iter().map(|i| i.label.as_str()).collect()
    }
}

/// Exact multiplicity vector of a W-module given the traces of one class
/// representative per class.
pub fn multiplicities_from_traces(
    g: &ReflectionGroup,
    table: &IrrepTable,
    traces: &[CycScalar],
) -> Result<Vec<(String, usize)>> {
    assert_eq!(traces.len(), g.classes().len());
    let order = CycScalar::from_int(g.order() as i64);
    let mut out = Vec::new();
    for irr in &table.irreps {
        let mut acc = CycScalar::zero();
        for (cid, cl) in g.classes().iter().enumerate() {
            let size = CycScalar::from_int(cl.len() as i64);
            acc = acc.add_ref(&size.mul_ref(&traces[cid].mul_ref(&irr.character[cid].conj())));
        }
        let m = acc.div_ref(&order).unwrap();
        let mr = m.as_rational().ok_or_else(|| {
            Error::NonIntegerMultiplicity(format!("mult of {} is {}", irr.label, m))
        })?;
        if !mr.is_integer() || mr < num::BigRational::from(num::BigInt::from(0)) {
            return Err(Error::NonIntegerMultiplicity(format!(
                "mult of {} is {}",
                irr.label, mr
            )));
        }
        let m: usize = mr
            .numer()
            .to_string()
            .parse()
            .map_err(|_| Error::NonIntegerMultiplicity("overflow".into()))?;
        if m > 0 {
            out.push((irr.label.clone(), m));
        }
    }
    Ok(out)
}

/// Decompose an explicit W-action (matrices per element) over Irr(W).
pub fn decompose_wmodule(
    g: &ReflectionGroup,
    table: &IrrepTable,
    action: &dyn Fn(usize) -> ExactMatrix,
) -> Result<Vec<(String, usize)>> {
    // representation check on generators
    for &a in g.generators() {
        for &b in g.generators() {
            if action(a).matmul(&action(b)) != action(g.mul(a, b)) {
                return Err(Error::NonRepresentation(
                    "action is not a homomorphism on generators".into(),
                ));
            }
        }
    }
    let traces: Vec<CycScalar> = g.classes().iter().map(|cl| action(cl[0]).trace()).collect();
    let mults = multiplicities_from_traces(g, table, &traces)?;
    let dim: usize = mults
        .iter()
        .map(|(l, m)| table.by_label(l).unwrap().dim * m)
        .sum();
    let actual = action(0).rows();
    if dim != actual {
        return Err(Error::NonIntegerMultiplicity(format!(
            "multiplicities sum to dimension {} but the space has dimension {}",
            dim, actual
        )));
    }
    Ok(mults)
}

/// What to construct from the catalog.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic { m: u32 },
    Dihedral { m: u32 },
    Symmetric { n: u32 },
    Matrix { generators: Vec<Vec<Vec<String>>> },
}

impl GroupSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad group spec {}", s)))?;
        let v: u32 = param
            .parse()
            .map_err(|_| Error::Parse(format!("bad group parameter {}", param)))?;
        match kind {
            "cyclic" => Ok(GroupSpec::Cyclic { m: v }),
            "dihedral" => Ok(GroupSpec::Dihedral { m: v }),
            "symmetric" => Ok(GroupSpec::Symmetric { n: v }),
            _ => Err(Error::UnsupportedGroup(kind.into())),
        }
    }

    pub fn canonical_name(&self) -> String {
        match self {
            GroupSpec::Cyclic { m } => format!("cyclic:{}", m),
            GroupSpec::Dihedral { m } => format!("dihedral:{}", m),
            GroupSpec::Symmetric { n } => format!("symmetric:{}", n),
            GroupSpec::Matrix { generators } => format!("matrix:{}gens", generators.len()),
        }
    }
}

pub const GROUP_ORDER_CAP: usize = 48;

/// Construct a catalog group together with its verified irrep table.
pub fn catalog(spec: &GroupSpec) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    match spec {
        GroupSpec::Cyclic { m } => cyclic_group(*m),
        GroupSpec::Dihedral { m } => dihedral_group(*m),
        GroupSpec::Symmetric { n } => symmetric_group(*n),
        GroupSpec::Matrix { generators } => matrix_group(generators),
    }
}

fn cyclic_group(m: u32) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    if m == 0 || m as usize > GROUP_ORDER_CAP {
        return Err(Error::UnsupportedGroup(format!("cyclic:{}", m)));
    }
    let z = CycScalar::root_of_unity(m, 1);
    let gen = ExactMatrix::from_rows(vec![vec![z.clone()]]);
    let g = Arc::new(ReflectionGroup::generate(
        &format!("cyclic:{}", m),
        &[gen],
        GROUP_ORDER_CAP,
    )?);
    // element i is [zeta^a] for some exponent a; read it off
    let expo: Vec<i64> = (0..g.order())
        .map(|i| {
            let v = g.mat(i).at(0, 0).clone();
            (0..m as i64)
                .find(|&a| v == z.pow(a).unwrap())
                .expect("cyclic element is a power of the generator")
        })
        .collect();
    let mut raw = Vec::new();
    for j in 0..m {
        let label = if j == 0 {
            "triv".to_string()
        } else if m == 2 {
            "sign".to_string()
        } else {
            format!("chi{}", j)
        };
        let mats: Vec<ExactMatrix> = (0..g.order())
            .map(|i| ExactMatrix::from_rows(vec![vec![z.pow(j as i64 * expo[i]).unwrap()]]))
            .collect();
        raw.push((label, mats));
    }
    let table = IrrepTable::new(&g, raw)?;
    Ok((g, table))
}

fn dihedral_group(m: u32) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    if m < 3 || 2 * m as usize > GROUP_ORDER_CAP {
        return Err(Error::UnsupportedGroup(format!("dihedral:{}", m)));
    }
    let z = CycScalar::root_of_unity(m, 1);
    let rot = |k: i64| -> ExactMatrix {
        ExactMatrix::from_rows(vec![
            vec![z.pow(k).unwrap(), CycScalar::zero()],
            vec![CycScalar::zero(), z.pow(-k).unwrap()],
        ])
    };
    let swap = ExactMatrix::from_rows(vec![
        vec![CycScalar::zero(), CycScalar::one()],
        vec![CycScalar::one(), CycScalar::zero()],
    ]);
    let g = Arc::new(ReflectionGroup::generate(
        &format!("dihedral:{}", m),
        &[rot(1), swap.clone()],
        GROUP_ORDER_CAP,
    )?);
    // classify each element as r^a or r^a * s
    struct Word {
        a: i64,
        s: bool,
    }
    let words: Vec<Word> = (0..g.order())
        .map(|i| {
            for a in 0..m as i64 {
                if *g.mat(i) == rot(a) {
                    return Word { a, s: false };
                }
                if *g.mat(i) == rot(a).matmul(&swap) {
                    return Word { a, s: true };
                }
            }
            unreachable!("dihedral element not of the form r^a s^b")
        })
        .collect();
    let mut raw: Vec<(String, Vec<ExactMatrix>)> = Vec::new();
    let one_dim = |er: i64, es: i64| -> Vec<ExactMatrix> {
        words
            .iter()
            .map(|w| {
                let mut v = CycScalar::from_int(er).pow(w.a).unwrap();
                if w.s {
                    v = v.mul_ref(&CycScalar::from_int(es));
                }
                ExactMatrix::from_rows(vec![vec![v]])
            })
            .collect()
    };
    raw.push(("triv".to_string(), one_dim(1, 1)));
    raw.push(("sign".to_string(), one_dim(1, -1)));
    if m % 2 == 0 {
        raw.push(("eps1".to_string(), one_dim(-1, 1)));
        raw.push(("eps2".to_string(), one_dim(-1, -1)));
    }
    let kmax = if m % 2 == 0 { m / 2 - 1 } else { (m - 1) / 2 };
    for k in 1..=kmax {
        let zk = CycScalar::root_of_unity(m, k as i64);
        let mats: Vec<ExactMatrix> = words
            .iter()
            .map(|w| {
                let d = ExactMatrix::from_rows(vec![
                    vec![zk.pow(w.a).unwrap(), CycScalar::zero()],
                    vec![CycScalar::zero(), zk.pow(-w.a).unwrap()],
                ]);
                if w.s {
                    d.matmul(&swap)
                } else {
                    d
                }
            })
            .collect();
        let label = if k == 1 {
            "refl".to_string()
        } else {
            format!("rho{}", k)
        };
        raw.push((label, mats));
    }
    let table = IrrepTable::new(&g, raw)?;
    Ok((g, table))
}

fn symmetric_group(n: u32) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    if !(n == 3 || n == 4) {
        return Err(Error::UnsupportedGroup(format!("symmetric:{}", n)));
    }
    let n = n as usize;
    let rank = n - 1;
    // permutation matrices on the sum-zero subspace with basis f_i = e_i - e_{i+1}
    let perm_to_mat = |p: &[usize]| -> ExactMatrix {
        // image of f_j is e_{p(j)} - e_{p(j+1)}; e_a - e_b = f_a + ... + f_{b-1}
        let mut m = ExactMatrix::zero(rank, rank);
        for j in 0..rank {
            let (a, b) = (p[j], p[j + 1]);
            let (lo, hi, sgn) = if a < b { (a, b, 1) } else { (b, a, -1) };
            for i in lo..hi {
                m.set(i, j, CycScalar::from_int(sgn));
            }
        }
        m
    };
    let mut gen_perms = Vec::new();
    for i in 0..rank {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, i + 1);
        gen_perms.push(p);
    }
    let gens: Vec<ExactMatrix> = gen_perms.iter().map(|p| perm_to_mat(p)).collect();
    let g = Arc::new(ReflectionGroup::generate(
        &format!("symmetric:{}", n),
        &gens,
        GROUP_ORDER_CAP,
    )?);
    // recover the permutation of each element by matching matrices
    let all_perms = permutations(n);
    let perm_of: Vec<Vec<usize>> = (0..g.order())
        .map(|i| {
            all_perms
                .iter()
                .find(|p| perm_to_mat(p) == *g.mat(i))
                .expect("element matches a permutation")
                .clone()
        })
        .collect();
    let sign_of = |p: &[usize]| -> i64 {
        let mut s = 1i64;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    };
    let mut raw: Vec<(String, Vec<ExactMatrix>)> = Vec::new();
    raw.push((
        "triv".to_string(),
        (0..g.order()).map(|_| ExactMatrix::identity(1)).collect(),
    ));
    raw.push((
        "sign".to_string(),
        perm_of
            .iter()
            .map(|p| ExactMatrix::from_rows(vec![vec![CycScalar::from_int(sign_of(p))]]))
            .collect(),
    ));
    raw.push((
        "std".to_string(),
        (0..g.order()).map(|i| g.mat(i).clone()).collect(),
    ));
    if n == 4 {
        raw.push((
            "stdsign".to_string(),
            perm_of
                .iter()
                .enumerate()
                .map(|(i, p)| g.mat(i).scale(&CycScalar::from_int(sign_of(p))))
                .collect(),
        ));
        // 2-dim irrep through the action on the three pair-partitions of {0,1,2,3}
        let partitions: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
        let part_index = |x: usize, y: usize| -> usize {
            partitions
                .iter()
                .position(|q| {
                    (q[0] == x && q[1] == y)
                        || (q[2] == x && q[3] == y)
                        || (q[0] == y && q[1] == x)
                        || (q[2] == y && q[3] == x)
                })
                .unwrap()
        };
        let s3_std = |q: &[usize; 3]| -> ExactMatrix {
            let mut m = ExactMatrix::zero(2, 2);
            for j in 0..2 {
                let (a, b) = (q[j], q[j + 1]);
                let (lo, hi, sgn) = if a < b { (a, b, 1) } else { (b, a, -1) };
                for i in lo..hi {
                    m.set(i, j, CycScalar::from_int(sgn));
                }
            }
            m
        };
        let two: Vec<ExactMatrix> = perm_of
            .iter()
            .map(|p| {
                let mut q = [0usize; 3];
                for (t, part) in partitions.iter().enumerate() {
                    q[t] = part_index(p[part[0]], p[part[1]]);
                }
                s3_std(&q)
            })
            .collect();
        raw.push(("two".to_string(), two));
    }
    let table = IrrepTable::new(&g, raw)?;
    Ok((g, table))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn matrix_group(gens: &[Vec<Vec<String>>]) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    let mut mats = Vec::new();
    for g in gens {
        let rows: Result<Vec<Vec<CycScalar>>> = g
            .iter()
            .map(|row| row.iter().map(|s| crate::scalars::parse_scalar(s)).collect())
            .collect();
        mats.push(ExactMatrix::from_rows(rows?));
    }
    let g = Arc::new(ReflectionGroup::generate("matrix", &mats, GROUP_ORDER_CAP)?);
    // Irrep tables are shipped only for catalog families; for raw matrix
    // groups the abelian case is supported (all irreps are characters,
    // found as joint eigenlines of the action on h and closed under
    // products).
    let abelian = (0..g.order()).all(|i| (0..g.order()).all(|j| g.mul(i, j) == g.mul(j, i)));
    if !abelian {
        return Err(Error::UnsupportedGroup(
            "irrep tables for non-abelian matrix groups are not in the catalog".into(),
        ));
    }
    let n = g.rank();
    let mut spaces: Vec<Vec<Vec<CycScalar>>> = vec![(0..n)
        .map(|i| {
            let mut v = vec![CycScalar::zero(); n];
            v[i] = CycScalar::one();
            v
        })
        .collect()];
    for gi in 0..g.order() {
        let ord = (1..=g.order())
            .find(|&k| {
                let mut p = gi;
                for _ in 1..k {
                    p = g.mul(p, gi);
                }
                p == 0
            })
            .unwrap() as i64;
        let mut next = Vec::new();
        for sp in &spaces {
            let basis = ExactMatrix::from_cols(sp.clone());
            let mut covered = 0usize;
            for a in 0..ord {
                let lam = CycScalar::root_of_unity(ord as u32, a);
                let gm = g.mat(gi).matmul(&basis).sub_mat(&basis.scale(&lam));
                let k = gm.kernel_basis();
                if !k.is_empty() {
                    let vecs: Vec<Vec<CycScalar>> = k.iter().map(|c| basis.apply(c)).collect();
                    covered += vecs.len();
                    next.push(vecs);
                }
            }
            if covered != sp.len() {
                return Err(Error::UnsupportedGroup(
                    "matrix group element is not diagonalizable over roots of unity".into(),
                ));
            }
        }
        spaces = next;
    }
    let mut seen: Vec<Vec<CycScalar>> = Vec::new();
    for sp in &spaces {
        let v = &sp[0];
        let pos = v.iter().position(|x| !x.is_zero()).unwrap();
        let vals: Vec<CycScalar> = (0..g.order())
            .map(|i| g.mat(i).apply(v)[pos].div_ref(&v[pos]).unwrap())
            .collect();
        if !seen.contains(&vals) {
            seen.push(vals);
        }
    }
    // close the found characters under products to get the full dual group
    let mut chars: Vec<Vec<CycScalar>> =
        vec![(0..g.order()).map(|_| CycScalar::one()).collect()];
    for c in seen {
        if !chars.contains(&c) {
            chars.push(c);
        }
    }
    loop {
        let mut added = false;
        let snapshot = chars.clone();
        for a in &snapshot {
            for b in &snapshot {
                let prod: Vec<CycScalar> =
                    (0..g.order()).map(|i| a[i].mul_ref(&b[i])).collect();
                if !chars.contains(&prod) {
                    chars.push(prod);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    if chars.len() != g.order() {
        return Err(Error::UnsupportedGroup(
            "could not assemble a full character table for the matrix group".into(),
        ));
    }
    chars.sort_by_key(|c| {
        c.iter()
            .map(|x| format!("{}", x))
            .collect::<Vec<_>>()
            .join(",")
    });
    let mut raw = Vec::new();
    for (j, c) in chars.iter().enumerate() {
        let label = if c.iter().all(|x| x.is_one()) {
            "triv".to_string()
        } else {
            format!("chi{}", j)
        };
        let mats: Vec<ExactMatrix> = c
            .iter()
            .map(|v| ExactMatrix::from_rows(vec![vec![v.clone()]]))
            .collect();
        raw.push((label, mats));
    }
    let table = IrrepTable::new(&g, raw)?;
    Ok((g, table))
}

/// The reflections generate the whole group (closure check).
pub fn reflections_generate(g: &ReflectionGroup, refls: &[Reflection]) -> bool {
    let mut reached = vec![false; g.order()];
    reached[0] = true;
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for r in refls {
            let j = g.mul(r.elem, i);
            if !reached[j] {
                reached[j] = true;
                frontier.push(j);
            }
        }
    }
    reached.iter().all(|&b| b)
}

/// Label permutation sigma -> sigma (x) det_{h*}, computed by characters.
pub fn tensor_with_det_hstar(g: &ReflectionGroup, table: &IrrepTable) -> Vec<(String, String)> {
    let dets: Vec<CycScalar> = g.classes().iter().map(|cl| g.det_hstar(cl[0])).collect();
    tensor_with_char(g, table, &dets)
}

/// Label permutation sigma -> sigma (x) det_h.
pub fn tensor_with_det_h(g: &ReflectionGroup, table: &IrrepTable) -> Vec<(String, String)> {
    let dets: Vec<CycScalar> = g.classes().iter().map(|cl| g.det_h(cl[0])).collect();
    tensor_with_char(g, table, &dets)
}

fn tensor_with_char(
    g: &ReflectionGroup,
    table: &IrrepTable,
    ch: &[CycScalar],
) -> Vec<(String, String)> {
    let _ = g;
    let mut out = Vec::new();
    for irr in &table.irreps {
        let twisted: Vec<CycScalar> = irr
            .character
            .iter()
            .zip(ch.iter())
            .map(|(a, b)| a.mul_ref(b))
            .collect();
        let target = table
            .irreps
            .iter()
            .find(|j| j.character == twisted)
            .expect("tensor with a linear character permutes Irr(W)");
        out.push((irr.label.clone(), target.label.clone()));
    }
    out
}

/// On-disk catalog schema: matrices row-major, scalars in the documented
/// "a/b*zN^k" grammar.
#[derive(Serialize, Deserialize)]
pub struct CatalogFile {
    pub schema: String,
    pub name: String,
    pub rank: usize,
    pub elements: Vec<Vec<Vec<String>>>,
    pub irreps: Vec<CatalogIrrep>,
}

#[derive(Serialize, Deserialize)]
pub struct CatalogIrrep {
    pub label: String,
    pub dim: usize,
    pub mats: Vec<Vec<Vec<String>>>,
}

pub fn to_catalog_file(g: &ReflectionGroup, table: &IrrepTable) -> CatalogFile {
    let ser_mat = |m: &ExactMatrix| -> Vec<Vec<String>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| format!("{}", m.at(r, c))).collect())
            .collect()
    };
    CatalogFile {
        schema: "catalog/1".to_string(),
        name: g.name.clone(),
        rank: g.rank(),
        elements: (0..g.order()).map(|i| ser_mat(g.mat(i))).collect(),
        irreps: table
            .irreps
            .iter()
            .map(|i| CatalogIrrep {
                label: i.label.clone(),
                dim: i.dim,
                mats: i.mats.iter().map(&ser_mat).collect(),
            })
            .collect(),
    }
}

/// Rebuild from a cached file; all invariants are re-verified rather than
/// trusted, so a stale or corrupted cache can only fail loudly.
pub fn from_catalog_file(file: &CatalogFile) -> Result<(Arc<ReflectionGroup>, IrrepTable)> {
    if file.schema != "catalog/1" {
        return Err(Error::Parse(format!("unknown catalog schema {}", file.schema)));
    }
    let de_mat = |rows: &Vec<Vec<String>>| -> Result<ExactMatrix> {
        let parsed: Result<Vec<Vec<CycScalar>>> = rows
            .iter()
            .map(|r| r.iter().map(|s| crate::scalars::parse_scalar(s)).collect())
            .collect();
        Ok(ExactMatrix::from_rows(parsed?))
    };
    let mats: Result<Vec<ExactMatrix>> = file.elements.iter().map(&de_mat).collect();
    let mats = mats?;
    let g = Arc::new(ReflectionGroup::generate(&file.name, &mats, GROUP_ORDER_CAP)?);
    if g.order() != file.elements.len() {
        return Err(Error::InvariantViolation(
            "cached catalog element list is not closed".into(),
        ));
    }
    let mut raw = Vec::new();
    for ir in &file.irreps {
        let ms: Result<Vec<ExactMatrix>> = ir.mats.iter().map(&de_mat).collect();
        let ms = ms?;
        // cached matrices are in cached element order; remap to the
        // regenerated element order
        let perm: Result<Vec<usize>> = (0..g.order())
            .map(|i| {
                mats.iter()
                    .position(|m| m == g.mat(i))
                    .ok_or_else(|| Error::InvariantViolation("cache element mismatch".into()))
            })
            .collect();
        let perm = perm?;
        let remapped: Vec<ExactMatrix> = perm.iter().map(|&p| ms[p].clone()).collect();
        raw.push((ir.label.clone(), remapped));
    }
    let table = IrrepTable::new(&g, raw)?;
    Ok((g, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_scalar;

    #[test]
    fn generate_small_groups() {
        // {[-1]} -> order 2
        let neg = ExactMatrix::from_rows(vec![vec![CycScalar::from_int(-1)]]);
        let g = ReflectionGroup::generate("z2", &[neg], 10).unwrap();
        assert_eq!(g.order(), 2);
        // {[zeta_3]} -> cyclic of order 3
        let z3 = ExactMatrix::from_rows(vec![vec![CycScalar::root_of_unity(3, 1)]]);
        let g3 = ReflectionGroup::generate("z3", &[z3], 10).unwrap();
        assert_eq!(g3.order(), 3);
        // dihedral pair for m = 3 -> order 6 with 3 reflections (brute force)
        let (d3, _) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        assert_eq!(d3.order(), 6);
        assert_eq!(find_reflections(&d3).len(), 3);
        // cap exceeded
        let big = ExactMatrix::from_rows(vec![vec![CycScalar::root_of_unity(7, 1)]]);
        assert!(matches!(
            ReflectionGroup::generate("z7", &[big], 5),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn reflection_data() {
        // cyclic Z/2: one reflection with lambda = -1
        let (g, _) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
        let refls = find_reflections(&g);
        assert_eq!(refls.len(), 1);
        assert_eq!(refls[0].lambda, CycScalar::from_int(-1));
        // cyclic Z/4: 3 reflections with lambda in {i, -1, -i}
        let (g4, _) = catalog(&GroupSpec::Cyclic { m: 4 }).unwrap();
        let refls4 = find_reflections(&g4);
        assert_eq!(refls4.len(), 3);
        let mut lams: Vec<CycScalar> = refls4.iter().map(|r| r.lambda.clone()).collect();
        let i = CycScalar::root_of_unity(4, 1);
        for expect in [i.clone(), CycScalar::from_int(-1), i.conj()] {
            let pos = lams.iter().position(|l| *l == expect);
            assert!(pos.is_some(), "missing eigenvalue {}", expect);
            lams.remove(pos.unwrap());
        }
        // dihedral 4: 4 reflections in 2 classes
        let (d4, _) = catalog(&GroupSpec::Dihedral { m: 4 }).unwrap();
        let refls_d4 = find_reflections(&d4);
        assert_eq!(refls_d4.len(), 4);
        let mut labels: Vec<String> = refls_d4.iter().map(|r| r.class_label.clone()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 2);
    }

    #[test]
    fn catalog_tables() {
        // cyclic 2 -> triv, sign
        let (_, t2) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
        assert_eq!(t2.labels(), vec!["triv", "sign"]);
        // dihedral 3 -> dims 1,1,2
        let (_, td3) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        let mut dims: Vec<usize> = td3.irreps.iter().map(|i| i.dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 2]);
        // symmetric 3 has the same character table as dihedral 3
        let (s3, ts3) = catalog(&GroupSpec::Symmetric { n: 3 }).unwrap();
        assert_eq!(s3.order(), 6);
        let (d3, _) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        let key = |g: &ReflectionGroup, t: &IrrepTable| {
            let mut rows: Vec<Vec<(usize, String)>> = t
                .irreps
                .iter()
                .map(|i| {
                    let mut vals: Vec<(usize, String)> = i
                        .character
                        .iter()
                        .enumerate()
                        .map(|(cid, v)| (g.classes()[cid].len(), format!("{}", v)))
                        .collect();
                    vals.sort();
                    vals
                })
                .collect();
            rows.sort();
            rows
        };
        assert_eq!(key(&s3, &ts3), key(&d3, &td3));
        // symmetric 4
        let (s4, ts4) = catalog(&GroupSpec::Symmetric { n: 4 }).unwrap();
        assert_eq!(s4.order(), 24);
        assert_eq!(ts4.irreps.len(), 5);
    }

    #[test]
    fn reflections_generate_catalog_groups() {
        for spec in [
            GroupSpec::Cyclic { m: 2 },
            GroupSpec::Cyclic { m: 3 },
            GroupSpec::Cyclic { m: 4 },
            GroupSpec::Dihedral { m: 3 },
            GroupSpec::Dihedral { m: 4 },
            GroupSpec::Symmetric { n: 3 },
            GroupSpec::Symmetric { n: 4 },
        ] {
            let (g, table) = catalog(&spec).unwrap();
            let refls = find_reflections(&g);
            assert!(reflections_generate(&g, &refls), "{:?}", spec);
            // decompose each irrep's own matrices: unit vector at itself
            for irr in &table.irreps {
                let mults =
                    decompose_wmodule(&g, &table, &|i| irr.mats[i].clone()).unwrap();
                assert_eq!(mults, vec![(irr.label.clone(), 1)]);
            }
        }
    }

    #[test]
    fn regular_representation_of_z2() {
        let (g, table) = catalog(&GroupSpec::Cyclic { m: 2 }).unwrap();
        // permutation action of W on itself
        let action = |i: usize| -> ExactMatrix {
            ExactMatrix::from_fn(2, 2, |r, c| {
                if g.mul(i, c) == r {
                    CycScalar::one()
                } else {
                    CycScalar::zero()
                }
            })
        };
        let mults = decompose_wmodule(&g, &table, &action).unwrap();
        assert_eq!(mults, vec![("triv".into(), 1), ("sign".into(), 1)]);
        // zero-dimensional space -> all multiplicities 0
        let zero_action = |_: usize| ExactMatrix::zero(0, 0);
        let mults0 = decompose_wmodule(&g, &table, &zero_action).unwrap();
        assert!(mults0.is_empty());
    }

    #[test]
    fn matrix_group_spec_abelian() {
        let spec = GroupSpec::Matrix {
            generators: vec![vec![vec!["z4".to_string()]]],
        };
        let (g, table) = catalog(&spec).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(table.irreps.len(), 4);
    }

    #[test]
    fn catalog_file_roundtrip() {
        let (g, table) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        let file = to_catalog_file(&g, &table);
        let json = serde_json::to_string(&file).unwrap();
        let parsed: CatalogFile = serde_json::from_str(&json).unwrap();
        let (g2, table2) = from_catalog_file(&parsed).unwrap();
        assert_eq!(g2.order(), g.order());
        assert_eq!(table2.labels(), table.labels());
    }

    #[test]
    fn det_twist_permutation() {
        let (g, table) = catalog(&GroupSpec::Dihedral { m: 3 }).unwrap();
        let tw = tensor_with_det_hstar(&g, &table);
        // det_{h*} = sign for a real reflection group: triv <-> sign, refl fixed
        assert!(tw.contains(&("triv".to_string(), "sign".to_string())));
        assert!(tw.contains(&("refl".to_string(), "refl".to_string())));
        let _ = parse_scalar("1/2").unwrap();
    }
}
