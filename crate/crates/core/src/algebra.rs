//! Structure constants and classification of finite-dimensional symmetry
//! algebras. Scalars live in the field of rational functions of the
//! parameters, so the same code handles symbolic and bound bases.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Expr, Monomial, RatFunc, Q};
use crate::linalg::{nullspace, rank, rref, solve, Matrix};
use crate::prolong::VectorField;

pub type Vector = Vec<RatFunc>;

fn zeros(n: usize) -> Vector {
    vec![RatFunc::zero(); n]
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = RatFunc::one();
    v
}

fn axpy(y: &mut Vector, a: &RatFunc, x: &Vector) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = yi.add(&a.mul(xi));
        }
    }
}

fn is_zero_vec(v: &Vector) -> bool {
    v.iter().all(RatFunc::is_zero)
}

/// Row-reduced basis of the span of `vs`.
fn span(vs: &[Vector], n: usize) -> Vec<Vector> {
    let mut m: Matrix<RatFunc> = vs.to_vec();
    rref(&mut m, n);
    m
}

fn contains(basis: &[Vector], v: &Vector, n: usize) -> bool {
    let mut m = basis.to_vec();
    m.push(v.clone());
    rank(&m, n) == basis.len()
}

fn same_space(a: &[Vector], b: &[Vector], n: usize) -> bool {
    a.len() == b.len() && b.iter().all(|v| contains(a, v, n))
}

/// Coordinates of `v` in the (independent) vectors `basis`.
fn coordinates(basis: &[Vector], v: &Vector, n: usize) -> Option<Vector> {
    let a: Matrix<RatFunc> = (0..n).map(|k| basis.iter().map(|b| b[k].clone()).collect()).collect();
    solve(&a, v, basis.len())
}

/// The tensor `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<Vec<Vector>>,
}

impl StructureConstants {
    /// Builds the tensor from the brackets `[e_i, e_j]` with `i < j`;
    /// the rest follows by antisymmetry.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vector)]) -> Result<Self> {
        let mut c = vec![vec![zeros(dim); dim]; dim];
        for (i, j, v) in brackets {
            if i >= j || *j >= dim || v.len() != dim {
                return Err(Error::InvalidField(format!("bad bracket entry ({i}, {j})")));
            }
            c[*i][*j] = v.clone();
            c[*j][*i] = v.iter().map(RatFunc::neg).collect();
        }
        Ok(StructureConstants { dim, c })
    }

    /// Same as `from_brackets` with rational entries.
    pub fn from_rational(dim: usize, brackets: &[(usize, usize, Vec<Q>)]) -> Result<Self> {
        let converted: Vec<(usize, usize, Vector)> = brackets
            .iter()
            .map(|(i, j, v)| (*i, *j, v.iter().cloned().map(RatFunc::constant).collect()))
            .collect();
        StructureConstants::from_brackets(dim, &converted)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &Vector {
        &self.c[i][j]
    }

    pub fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        let mut out = zeros(self.dim);
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if !vj.is_zero() && i != j {
                    axpy(&mut out, &ui.mul(vj), &self.c[i][j]);
                }
            }
        }
        out
    }

    /// Triples `i < j < k` where the Jacobi identity fails.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let mut s = self.bracket(&self.c[i][j], &ek);
                    let t = self.bracket(&self.c[j][k], &ei);
                    let u = self.bracket(&self.c[k][i], &ej);
                    axpy(&mut s, &RatFunc::one(), &t);
                    axpy(&mut s, &RatFunc::one(), &u);
                    if !is_zero_vec(&s) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad x` in the basis, `(ad x)[k][j]` = coefficient of `e_k` in `[x, e_j]`.
    pub fn ad(&self, x: &Vector) -> Matrix<RatFunc> {
        let n = self.dim;
        let cols: Vec<Vector> = (0..n).map(|j| self.bracket(x, &unit(n, j))).collect();
        (0..n).map(|k| (0..n).map(|j| cols[j][k].clone()).collect()).collect()
    }

    pub fn killing_form(&self) -> Matrix<RatFunc> {
        let n = self.dim;
        let ads: Vec<Matrix<RatFunc>> = (0..n).map(|i| self.ad(&unit(n, i))).collect();
        let mut k = vec![zeros(n); n];
        for i in 0..n {
            for j in i..n {
                let mut tr = RatFunc::zero();
                for a in 0..n {
                    for b in 0..n {
                        if !ads[i][a][b].is_zero() && !ads[j][b][a].is_zero() {
                            tr = tr.add(&ads[i][a][b].mul(&ads[j][b][a]));
                        }
                    }
                }
                k[i][j] = tr.clone();
                k[j][i] = tr;
            }
        }
        k
    }

    fn killing_value(&self, k: &Matrix<RatFunc>, x: &Vector, y: &Vector) -> RatFunc {
        let mut out = RatFunc::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !k[i][j].is_zero() {
                    out = out.add(&xi.mul(yj).mul(&k[i][j]));
                }
            }
        }
        out
    }

    /// The tensor in the basis `f_a = sum_i p[a][i] e_i`.
    pub fn change_basis(&self, p: &Matrix<Q>) -> Result<Self> {
        let n = self.dim;
        let rows: Vec<Vector> = p.iter().map(|r| r.iter().cloned().map(RatFunc::constant).collect()).collect();
        if rank(&rows, n) != n {
            return Err(Error::InvalidField("change of basis is singular".into()));
        }
        let mut brackets = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let v = self.bracket(&rows[a], &rows[b]);
                let w = coordinates(&rows, &v, n).expect("invertible change of basis");
                brackets.push((a, b, w));
            }
        }
        StructureConstants::from_brackets(n, &brackets)
    }

    /// The tensor of the subalgebra spanned by `basis`, if it closes.
    pub fn restrict(&self, basis: &[Vector]) -> Option<StructureConstants> {
        let m = basis.len();
        let mut brackets = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let v = self.bracket(&basis[a], &basis[b]);
                brackets.push((a, b, coordinates(basis, &v, self.dim)?));
            }
        }
        StructureConstants::from_brackets(m, &brackets).ok()
    }

    pub fn center(&self) -> Vec<Vector> {
        let n = self.dim;
        let mut rows: Matrix<RatFunc> = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.c[i][j][k].clone()).collect());
            }
        }
        span(&nullspace(&rows, n), n)
    }

    /// `[A, B]` for subspaces given by bases.
    pub fn bracket_span(&self, a: &[Vector], b: &[Vector]) -> Vec<Vector> {
        let mut vs = Vec::new();
        for x in a {
            for y in b {
                vs.push(self.bracket(x, y));
            }
        }
        span(&vs, self.dim)
    }

    pub fn whole(&self) -> Vec<Vector> {
        (0..self.dim).map(|i| unit(self.dim, i)).collect()
    }

    pub fn derived(&self) -> Vec<Vector> {
        let g = self.whole();
        self.bracket_span(&g, &g)
    }

    /// Dimensions of `g, [g,g], [[g,g],[g,g]], ...` until it stabilizes.
    pub fn derived_series(&self) -> Vec<usize> {
        let mut s = self.whole();
        let mut dims = vec![s.len()];
        loop {
            let next = self.bracket_span(&s, &s);
            if next.len() == s.len() {
                return dims;
            }
            dims.push(next.len());
            if next.is_empty() {
                return dims;
            }
            s = next;
        }
    }

    fn series_of(&self, s: &[Vector]) -> Vec<Vec<Vector>> {
        let mut out = vec![s.to_vec()];
        loop {
            let last = out.last().expect("nonempty");
            let next = self.bracket_span(last, last);
            if next.len() == last.len() {
                return out;
            }
            let done = next.is_empty();
            out.push(next);
            if done {
                return out;
            }
        }
    }

    fn is_ideal(&self, s: &[Vector]) -> bool {
        let g = self.whole();
        self.bracket_span(&g, s).iter().all(|v| contains(s, v, self.dim))
    }

    fn is_nilpotent(&self, s: &[Vector]) -> bool {
        let mut c = s.to_vec();
        for _ in 0..=self.dim {
            if c.is_empty() {
                return true;
            }
            let next = self.bracket_span(s, &c);
            if next.len() == c.len() {
                return false;
            }
            c = next;
        }
        c.is_empty()
    }

    /// `{x in within : K(x, s) = 0 for s in against}`.
    fn killing_orthogonal(&self, k: &Matrix<RatFunc>, within: &[Vector], against: &[Vector]) -> Vec<Vector> {
        let rows: Matrix<RatFunc> = against
            .iter()
            .map(|s| within.iter().map(|w| self.killing_value(k, w, s)).collect())
            .collect();
        let combos = if rows.is_empty() {
            (0..within.len()).map(|i| unit(within.len(), i)).collect()
        } else {
            nullspace(&rows, within.len())
        };
        let vs: Vec<Vector> = combos
            .iter()
            .map(|a| {
                let mut v = zeros(self.dim);
                for (ai, w) in a.iter().zip(within) {
                    axpy(&mut v, ai, w);
                }
                v
            })
            .collect();
        span(&vs, self.dim)
    }
}

/// Exact signature `(positive, negative, zero)` of a symmetric rational
/// matrix by congruence diagonalization.
pub fn signature(m: &Matrix<Q>) -> (usize, usize, usize) {
    let mut a = m.clone();
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j makes the diagonal entry 2 a_ij
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for &i in &active {
            if i == p || a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for k in 0..n {
                let v = &f * &a[p][k];
                a[i][k] -= v;
            }
            for k in 0..n {
                let v = &f * &a[k][p];
                a[k][i] -= v;
            }
        }
        active.retain(|&i| i != p);
    }
    (pos, neg, n - pos - neg)
}

/// Structural type of a classified algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    Abelian(usize),
    /// The two-dimensional algebra `[e1, e2] = e1`.
    NonAbelian2,
    /// Weyl-Heisenberg algebra of the given (odd) dimension.
    Heisenberg(usize),
    Sl2,
    Semidirect(Box<AlgebraKind>, Box<AlgebraKind>),
    Unclassified,
}

impl AlgebraKind {
    pub fn name(&self) -> String {
        match self {
            AlgebraKind::Abelian(1) => "A1".into(),
            AlgebraKind::Abelian(n) => format!("{n}A1"),
            AlgebraKind::NonAbelian2 => "A2".into(),
            AlgebraKind::Heisenberg(n) => format!("W{n}"),
            AlgebraKind::Sl2 => "sl(2,R)".into(),
            AlgebraKind::Semidirect(s, i) => format!("{} ⊕ₛ {}", s.name(), i.name()),
            AlgebraKind::Unclassified => "unclassified".into(),
        }
    }

    /// Mubarakzyanov label, where one is known for the structure.
    pub fn label(&self) -> Option<String> {
        match self {
            AlgebraKind::Abelian(1) => Some("A1".into()),
            AlgebraKind::Abelian(n) => Some(format!("{n}A1")),
            AlgebraKind::NonAbelian2 => Some("A2".into()),
            AlgebraKind::Heisenberg(3) => Some("A3,1".into()),
            AlgebraKind::Heisenberg(5) => Some("A5,4".into()),
            AlgebraKind::Heisenberg(_) => None,
            AlgebraKind::Sl2 => Some("A3,8".into()),
            AlgebraKind::Semidirect(s, i) => Some(format!("{} ⊕ₛ {}", s.label()?, i.label()?)),
            AlgebraKind::Unclassified => None,
        }
    }

    /// Other labels in circulation for the same structure.
    pub fn alternative_labels(&self) -> Vec<String> {
        match self {
            AlgebraKind::Heisenberg(3) => vec!["A3,3".into()],
            AlgebraKind::Semidirect(s, i) => {
                let mut out = s.alternative_labels();
                out.extend(i.alternative_labels());
                out
            }
            _ => Vec::new(),
        }
    }

    /// Human summary such as `W5 (Heisenberg-Weyl, dim 5)`.
    pub fn describe(&self, dim: usize) -> String {
        let what = match self {
            AlgebraKind::Abelian(_) => "abelian",
            AlgebraKind::NonAbelian2 => "non-abelian",
            AlgebraKind::Heisenberg(_) => "Heisenberg-Weyl",
            AlgebraKind::Sl2 => "simple",
            AlgebraKind::Semidirect(..) => "semidirect sum",
            AlgebraKind::Unclassified => "no match",
        };
        format!("{} ({what}, dim {dim})", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub bracket: Vec<String>,
}

/// Classification result with its witnesses. Basis vectors are given in
/// coordinates of the input basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub dimension: usize,
    pub center_dim: usize,
    pub derived_dim: usize,
    pub derived_series: Vec<usize>,
    pub name: String,
    pub mubarakzyanov_label: Option<String>,
    pub alternative_labels: Vec<String>,
    pub ideal_basis: Vec<Vec<String>>,
    pub complement_basis: Vec<Vec<String>>,
    pub structure_constants: Vec<BracketEntry>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub kind: AlgebraKind,
    #[serde(skip)]
    pub ideal: Vec<Vector>,
    #[serde(skip)]
    pub complement: Vec<Vector>,
}

fn render(v: &Vector) -> Vec<String> {
    v.iter().map(|c| Expr::from(c.clone()).to_string()).collect()
}

fn is_heisenberg(sc: &StructureConstants) -> bool {
    let n = sc.dim();
    let center = sc.center();
    n >= 3 && n % 2 == 1 && center.len() == 1 && same_space(&center, &sc.derived(), n)
}

/// Kind of a nilpotent algebra, when it is one we name.
fn nilpotent_kind(sc: &StructureConstants) -> AlgebraKind {
    if sc.derived().is_empty() {
        AlgebraKind::Abelian(sc.dim())
    } else if is_heisenberg(sc) {
        AlgebraKind::Heisenberg(sc.dim())
    } else {
        AlgebraKind::Unclassified
    }
}

fn constant_matrix(m: &Matrix<RatFunc>) -> Option<Matrix<Q>> {
    m.iter().map(|r| r.iter().map(RatFunc::as_constant).collect()).collect()
}

/// Corrects the complement `s` of the radical until it closes as a
/// subalgebra, working down the derived series of the radical.
fn levi_factor(sc: &StructureConstants, s: &[Vector], rad: &[Vector]) -> Option<(Vec<Vector>, StructureConstants)> {
    let n = sc.dim();
    let m = s.len();
    let mut joint = s.to_vec();
    joint.extend(rad.iter().cloned());
    let mut levi_brackets = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let coords = coordinates(&joint, &sc.bracket(&s[i], &s[j]), n)?;
            levi_brackets.push((i, j, coords[..m].to_vec()));
        }
    }
    let levi = StructureConstants::from_brackets(m, &levi_brackets).ok()?;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let error = |s: &[Vector]| -> Vec<Vector> {
        pairs
            .iter()
            .map(|&(i, j)| {
                let mut e = sc.bracket(&s[i], &s[j]);
                for (k, sk) in s.iter().enumerate() {
                    axpy(&mut e, &levi.c[i][j][k].neg(), sk);
                }
                e
            })
            .collect()
    };
    let series = sc.series_of(rad);
    let mut s = s.to_vec();
    for p in 0..series.len() {
        let errs = error(&s);
        if errs.iter().all(is_zero_vec) {
            return Some((s, levi));
        }
        let rp = &series[p];
        let next: &[Vector] = series.get(p + 1).map_or(&[], Vec::as_slice);
        let (q, q2) = (rp.len(), next.len());
        let unknowns = m * q + pairs.len() * q2;
        let mut rows: Matrix<RatFunc> = Vec::new();
        let mut rhs: Vector = Vec::new();
        for (pi, &(i, j)) in pairs.iter().enumerate() {
            let mut cols: Vec<Vector> = vec![zeros(n); unknowns];
            for (l, r) in rp.iter().enumerate() {
                axpy(&mut cols[j * q + l], &RatFunc::one(), &sc.bracket(&s[i], r));
                axpy(&mut cols[i * q + l], &RatFunc::one(), &sc.bracket(r, &s[j]));
                for a in 0..m {
                    axpy(&mut cols[a * q + l], &levi.c[i][j][a].neg(), r);
                }
            }
            for (l, r) in next.iter().enumerate() {
                cols[m * q + pi * q2 + l] = r.clone();
            }
            for k in 0..n {
                rows.push(cols.iter().map(|c| c[k].clone()).collect());
                rhs.push(errs[pi][k].neg());
            }
        }
        let sol = solve(&rows, &rhs, unknowns)?;
        for (i, si) in s.iter_mut().enumerate() {
            for (l, r) in rp.iter().enumerate() {
                axpy(si, &sol[i * q + l], r);
            }
        }
    }
    error(&s).iter().all(is_zero_vec).then_some((s, levi))
}

fn sl2_check(levi: &StructureConstants, notes: &mut Vec<String>) -> bool {
    if levi.dim() != 3 {
        return false;
    }
    match constant_matrix(&levi.killing_form()) {
        Some(k) => signature(&k) == (2, 1, 0),
        None => {
            notes.push("Killing form of the Levi factor is not numeric; bind the parameters".into());
            false
        }
    }
}

/// Classifies algebras of dimension at most six into the structures that
/// occur for these equations. Anything else is reported as unclassified
/// with its invariants.
pub fn classify(sc: &StructureConstants) -> Verdict {
    let n = sc.dim();
    let center = sc.center();
    let derived = sc.derived();
    let mut notes = Vec::new();
    let mut ideal = Vec::new();
    let mut complement = Vec::new();
    let kind = if n > 6 {
        notes.push("dimension above six is out of scope".into());
        AlgebraKind::Unclassified
    } else if derived.is_empty() {
        AlgebraKind::Abelian(n)
    } else if n == 2 {
        AlgebraKind::NonAbelian2
    } else {
        let g = sc.whole();
        let k = sc.killing_form();
        let rad = sc.killing_orthogonal(&k, &g, &derived);
        let nil = sc.killing_orthogonal(&k, &rad, &rad);
        let nil_ok = sc.is_ideal(&nil) && sc.is_nilpotent(&nil);
        if !nil_ok {
            notes.push("nilradical candidate is not a nilpotent ideal".into());
        }
        if rad.len() == n {
            if !nil_ok {
                AlgebraKind::Unclassified
            } else if nil.len() == n {
                nilpotent_kind(sc)
            } else if nil.len() + 1 == n {
                let inner = sc.restrict(&nil).map_or(AlgebraKind::Unclassified, |t| nilpotent_kind(&t));
                let c = (0..n).map(|i| unit(n, i)).find(|e| !contains(&nil, e, n)).expect("nil is proper");
                if inner == AlgebraKind::Unclassified {
                    AlgebraKind::Unclassified
                } else {
                    ideal = nil;
                    complement = vec![c];
                    AlgebraKind::Semidirect(Box::new(AlgebraKind::Abelian(1)), Box::new(inner))
                }
            } else {
                notes.push(format!("solvable with nilradical of codimension {}", n - nil.len()));
                AlgebraKind::Unclassified
            }
        } else {
            let mut s: Vec<Vector> = Vec::new();
            let mut acc = rad.clone();
            for i in 0..n {
                let e = unit(n, i);
                if !contains(&acc, &e, n) {
                    acc.push(e.clone());
                    s.push(e);
                }
            }
            match levi_factor(sc, &s, &rad) {
                Some((levi_basis, levi)) if sl2_check(&levi, &mut notes) => {
                    if rad.is_empty() {
                        AlgebraKind::Sl2
                    } else if !nil_ok || nil.len() != rad.len() {
                        notes.push("radical is not nilpotent".into());
                        AlgebraKind::Unclassified
                    } else {
                        let inner = sc.restrict(&rad).map_or(AlgebraKind::Unclassified, |t| nilpotent_kind(&t));
                        if inner == AlgebraKind::Unclassified {
                            AlgebraKind::Unclassified
                        } else {
                            ideal = rad;
                            complement = levi_basis;
                            AlgebraKind::Semidirect(Box::new(AlgebraKind::Sl2), Box::new(inner))
                        }
                    }
                }
                Some(_) => {
                    notes.push("Levi factor is not sl(2,R)".into());
                    AlgebraKind::Unclassified
                }
                None => {
                    notes.push("no Levi factor found".into());
                    AlgebraKind::Unclassified
                }
            }
        }
    };
    let mut structure_constants = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !is_zero_vec(&sc.c[i][j]) {
                structure_constants.push(BracketEntry { i: i + 1, j: j + 1, bracket: render(&sc.c[i][j]) });
            }
        }
    }
    Verdict {
        dimension: n,
        center_dim: center.len(),
        derived_dim: derived.len(),
        derived_series: sc.derived_series(),
        name: kind.name(),
        mubarakzyanov_label: kind.label(),
        alternative_labels: kind.alternative_labels(),
        ideal_basis: ideal.iter().map(render).collect(),
        complement_basis: complement.iter().map(render).collect(),
        structure_constants,
        notes,
        kind,
        ideal,
        complement,
    }
}

type Key = (usize, Monomial);

/// Coefficients of each component over monomials in the non-parameter atoms.
fn expand(f: &VectorField) -> Result<BTreeMap<Key, RatFunc>> {
    let mut out = BTreeMap::new();
    for (idx, (_, c)) in f.components().into_iter().enumerate() {
        let r = c.to_ratfunc()?;
        let den_ok = r
            .denominator()
            .iter()
            .all(|(p, _)| p.terms().all(|(m, _)| m.exp_arg().is_none() && m.factors().iter().all(|(a, _)| a.is_parameter_like())));
        if !den_ok {
            return Err(Error::InvalidField(format!("coefficient `{c}` has a non-constant denominator")));
        }
        for (key, coeff) in r.collect_by(|m| {
            let (par, rest) = m.partition(|a| a.is_parameter_like(), false);
            (rest, par)
        }) {
            out.insert((idx, key), coeff);
        }
    }
    Ok(out)
}

/// An ordered basis of vector fields with its structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraPresentation {
    pub basis: Vec<VectorField>,
    pub constants: StructureConstants,
}

impl LieAlgebraPresentation {
    /// The field `sum_i v_i e_i`.
    pub fn field_of(&self, v: &Vector) -> Result<VectorField> {
        let mut out = VectorField::zero(self.basis[0].vars().to_vec(), self.basis[0].dep());
        for (c, b) in v.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&b.scale(&Expr::from(c.clone())))?;
            }
        }
        Ok(out)
    }

    pub fn classify(&self) -> Verdict {
        classify(&self.constants)
    }
}

/// Computes `[e_i, e_j]` for all pairs and expresses each in the basis with
/// constant (parameter-dependent) coefficients.
pub fn structure_constants(basis: &[VectorField]) -> Result<LieAlgebraPresentation> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::InvalidField("empty basis".into()));
    }
    let expanded: Vec<BTreeMap<Key, RatFunc>> = basis.iter().map(expand).collect::<Result<_>>()?;
    let keys: Vec<Key> = expanded.iter().flat_map(|e| e.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let a: Matrix<RatFunc> = keys
        .iter()
        .map(|k| expanded.iter().map(|e| e.get(k).cloned().unwrap_or_else(RatFunc::zero)).collect())
        .collect();
    if rank(&a, n) != n {
        return Err(Error::InvalidField("basis is linearly dependent".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let brackets: Vec<(usize, usize, Vector)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let comm = basis[i].commutator(&basis[j])?;
            let e = expand(&comm)?;
            if e.keys().any(|k| keys.binary_search(k).is_err()) {
                return Err(Error::NotClosed(i + 1, j + 1));
            }
            let b: Vector = keys.iter().map(|k| e.get(k).cloned().unwrap_or_else(RatFunc::zero)).collect();
            let x = solve(&a, &b, n).ok_or(Error::NotClosed(i + 1, j + 1))?;
            Ok((i, j, x))
        })
        .collect::<Result<_>>()?;
    let constants = StructureConstants::from_brackets(n, &brackets)?;
    Ok(LieAlgebraPresentation { basis: basis.to_vec(), constants })
}

/// `[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]` for every triple of distinct fields,
/// with a flag for whether it vanishes.
pub fn jacobi_fields(fields: &[VectorField]) -> Result<Vec<((usize, usize, usize), bool)>> {
    let n = fields.len();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
        .collect();
    triples
        .par_iter()
        .map(|&(i, j, k)| {
            let (x, y, z) = (&fields[i], &fields[j], &fields[k]);
            let s = x.commutator(y)?.commutator(z)?;
            let t = y.commutator(z)?.commutator(x)?;
            let u = z.commutator(x)?.commutator(y)?;
            Ok(((i, j, k), s.add(&t)?.add(&u)?.is_zero()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::poly::q;
    use crate::kernel::{Dep, IndVar, Parser};
    use crate::prolong::SymmetryFixture;

    fn field(text: &str, vars: &[IndVar]) -> VectorField {
        VectorField::parse(text, vars, Dep::U, &Parser::new()).unwrap()
    }

    fn rational(entries: &[(usize, usize, &[i64])], n: usize) -> StructureConstants {
        let e: Vec<(usize, usize, Vec<Q>)> =
            entries.iter().map(|(i, j, v)| (*i, *j, v.iter().map(|&x| q(x)).collect())).collect();
        StructureConstants::from_rational(n, &e).unwrap()
    }

    #[test]
    fn two_dimensional_nonabelian() {
        let tx = [IndVar::T, IndVar::X];
        let p = structure_constants(&[field("xi_x=1", &tx), field("xi_x=x", &tx)]).unwrap();
        assert_eq!(p.constants.basis_bracket(0, 1), &vec![RatFunc::one(), RatFunc::zero()]);
        assert_eq!(p.classify().kind, AlgebraKind::NonAbelian2);
    }

    #[test]
    fn trivial_commutator() {
        let tx = [IndVar::T, IndVar::X];
        let p = structure_constants(&[field("xi_t=1", &tx), field("eta=u", &tx)]).unwrap();
        assert!(is_zero_vec(p.constants.basis_bracket(0, 1)));
        assert_eq!(p.classify().kind, AlgebraKind::Abelian(2));
    }

    #[test]
    fn not_closed_names_pair() {
        let tx = [IndVar::T, IndVar::X];
        let err = structure_constants(&[field("xi_x=1", &tx), field("xi_x=x^2", &tx)]).unwrap_err();
        assert_eq!(err, Error::NotClosed(1, 2));
    }

    #[test]
    fn heisenberg_and_sl2_from_tensors() {
        let w3 = rational(&[(0, 1, &[0, 0, 1])], 3);
        let v = classify(&w3);
        assert_eq!(v.kind, AlgebraKind::Heisenberg(3));
        assert_eq!(v.mubarakzyanov_label.as_deref(), Some("A3,1"));
        assert_eq!(v.alternative_labels, vec!["A3,3".to_string()]);
        // [h,e] = 2e, [h,f] = -2f, [e,f] = h
        let sl2 = rational(&[(0, 1, &[0, 2, 0]), (0, 2, &[0, 0, -2]), (1, 2, &[1, 0, 0])], 3);
        assert!(sl2.jacobi_violations().is_empty());
        let v = classify(&sl2);
        assert_eq!(v.kind, AlgebraKind::Sl2);
        assert_eq!(v.mubarakzyanov_label.as_deref(), Some("A3,8"));
        // so(3) has definite Killing form and is not named
        let so3 = rational(&[(0, 1, &[0, 0, 1]), (1, 2, &[1, 0, 0]), (0, 2, &[0, -1, 0])], 3);
        assert_eq!(classify(&so3).kind, AlgebraKind::Unclassified);
    }

    #[test]
    fn signature_handles_zero_diagonal() {
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(signature(&m), (1, 1, 0));
        let m = vec![vec![q(1), q(0)], vec![q(0), q(0)]];
        assert_eq!(signature(&m), (1, 0, 1));
    }

    #[test]
    fn heat_algebra_is_sl2_with_w3() {
        let tx = [IndVar::T, IndVar::X];
        let basis = [
            field("xi_t=1", &tx),
            field("xi_t=2*t; xi_x=x", &tx),
            field("xi_t=t^2; xi_x=t*x; eta=-1/4*x^2*u - 1/2*t*u", &tx),
            field("xi_x=1", &tx),
            field("xi_x=2*t; eta=-x*u", &tx),
            field("eta=u", &tx),
        ];
        let p = structure_constants(&basis).unwrap();
        assert!(p.constants.jacobi_violations().is_empty());
        let v = p.classify();
        assert_eq!(v.name, "sl(2,R) ⊕ₛ W3");
        for c in &v.complement {
            assert!(!p.field_of(c).unwrap().xi_of(IndVar::T).is_zero());
        }
        for c in &v.ideal {
            assert!(p.field_of(c).unwrap().xi_of(IndVar::T).is_zero());
        }
    }

    #[test]
    fn reference_fixture_algebra() {
        let fx = SymmetryFixture::reference();
        let all = fx.fields();
        let w5 = structure_constants(&all[1..]).unwrap();
        let v = w5.classify();
        assert_eq!(v.kind, AlgebraKind::Heisenberg(5));
        assert_eq!(v.center_dim, 1);
        let full = structure_constants(&all).unwrap();
        let v = full.classify();
        assert_eq!(v.name, "A1 ⊕ₛ W5");
        assert_eq!(v.complement, vec![unit(6, 0)]);
    }
}
