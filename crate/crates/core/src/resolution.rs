//! Free resolutions of ℤ over the braid-group ring, their specialisation to
//! integer chain complexes, and stabilisation chain maps.
//!
//! Boundaries over the group ring use row vectors: `∂(x e_Γ) = x ∂(e_Γ)`, so
//! the matrix of `∂_j` has one row per degree-`j` cell and
//! `A_{j+1} · A_j = 0`. Specialised integer complexes use column vectors:
//! `D_j` has shape `dims_{j−1} × dims_j` and `D_j · D_{j+1} = 0`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::{
    inversions, normal_form, reduced_word, reduced_word_left, BraidWord, GarsideForm, TupleSpace,
};
use crate::error::{Error, Result};
use crate::integer::Integer;
use crate::matrix::{CooMatrix, SparseMatrix};

/// Finite ℤ-linear combination of braids, keyed by normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElement {
    pub strands: usize,
    terms: BTreeMap<GarsideForm, Integer>,
}

impl GroupRingElement {
    pub fn zero(strands: usize) -> GroupRingElement {
        GroupRingElement {
            strands,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(strands: usize) -> GroupRingElement {
        Self::monomial(GarsideForm::identity(strands), Integer::ONE)
    }

    pub fn monomial(form: GarsideForm, coefficient: Integer) -> GroupRingElement {
        let mut e = Self::zero(form.strands);
        e.add_term(form, coefficient);
        e
    }

    pub fn from_word(w: &BraidWord) -> GroupRingElement {
        Self::monomial(normal_form(w), Integer::ONE)
    }

    pub fn add_term(&mut self, form: GarsideForm, coefficient: Integer) {
        let entry = self.terms.entry(form.clone()).or_default();
        *entry += &coefficient;
        if entry.is_zero() {
            self.terms.remove(&form);
        }
    }

    pub fn terms(&self) -> &BTreeMap<GarsideForm, Integer> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Integer) -> GroupRingElement {
        let mut out = Self::zero(self.strands);
        for (f, x) in &self.terms {
            out.add_term(f.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = Self::zero(self.strands);
        for (f, x) in &self.terms {
            for (g, y) in &other.terms {
                out.add_term(f.mul(g), x * y);
            }
        }
        out
    }

    /// Image under the trivial character `w ↦ 1`.
    pub fn augmentation(&self) -> Integer {
        self.terms
            .values()
            .fold(Integer::ZERO, |acc, c| &acc + c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    Salvetti,
    Fox,
}

/// Free complex over `ℤ[B_k]`, degrees `0..=d_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeComplex {
    pub kind: ComplexKind,
    pub strands: usize,
    pub d_max: usize,
    pub ranks: Vec<usize>,
    /// degree-`j` basis: sorted `j`-subsets of generator indices `1..k−1`
    pub basis_labels: Vec<Vec<Vec<usize>>>,
    /// `boundaries[j−1]` is the `rank_j × rank_{j−1}` matrix of `∂_j`
    pub boundaries: Vec<Vec<Vec<GroupRingElement>>>,
    /// highest degree in which the homology of this complex is exact
    pub trusted_top: usize,
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All `j`-subsets of `{1..=n}` in colexicographic order, so the subsets of
/// `{1..=n}` form a prefix of those of `{1..=n+1}`.
pub fn colex_subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(max: usize, j: usize, suffix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == 0 {
            let mut s = suffix.clone();
            s.reverse();
            out.push(s);
            return;
        }
        for top in j..=max {
            suffix.push(top);
            rec(top - 1, j - 1, suffix, out);
            suffix.pop();
        }
    }
    rec(n, j, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Elements of the parabolic subgroup `W_Γ ⊆ S_n`, generated by `s_i`, `i ∈ Γ`.
fn parabolic_elements(n: usize, gamma: &[usize]) -> Vec<Vec<usize>> {
    let start: Vec<usize> = (0..n).collect();
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    while let Some(p) = frontier.pop() {
        for &i in gamma {
            let mut q = p.clone();
            q.swap(i - 1, i);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen.into_iter().collect()
}

/// The type-A Salvetti complex on `k` strands, truncated at `d_max`.
pub fn salvetti_complex(k: usize, d_max: usize) -> Result<FreeComplex> {
    if d_max < 1 || d_max + 1 > k {
        return Err(Error::TruncationOutOfRange { d_max, strands: k });
    }
    Ok(build_salvetti(k, d_max))
}

/// Like `salvetti_complex` but clamps `d_max` to `k − 1` and allows `k ≤ 1`.
pub fn salvetti_truncated(k: usize, d_max: usize) -> FreeComplex {
    build_salvetti(k, d_max.min(k.saturating_sub(1)))
}

fn build_salvetti(k: usize, d: usize) -> FreeComplex {
    let strands = k.max(1);
    let gens = k.saturating_sub(1);
    let basis_labels: Vec<Vec<Vec<usize>>> = (0..=d).map(|j| colex_subsets(gens, j)).collect();
    let ranks: Vec<usize> = basis_labels.iter().map(Vec::len).collect();
    debug_assert!(ranks.iter().enumerate().all(|(j, &r)| r == binomial(gens, j)));

    let boundaries = (1..=d)
        .map(|j| {
            let lower_index: HashMap<&Vec<usize>, usize> = basis_labels[j - 1]
                .iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            basis_labels[j]
                .par_iter()
                .map(|gamma| {
                    let mut row = vec![GroupRingElement::zero(strands); ranks[j - 1]];
                    let elements = parabolic_elements(strands, gamma);
                    for (mu, &tau) in gamma.iter().enumerate() {
                        let face: Vec<usize> = gamma.iter().copied().filter(|&x| x != tau).collect();
                        let target = lower_index[&face];
                        for beta in &elements {
                            // minimal left coset representatives of W_face
                            if face.iter().any(|&i| beta[i - 1] > beta[i]) {
                                continue;
                            }
                            let lift = positive_lift(beta);
                            let len = inversions(beta);
                            let sign = if (len + mu + 1) % 2 == 0 { 1 } else { -1 };
                            row[target].add_term(lift, Integer::from(sign));
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();

    // a full complex resolves ℤ in every degree
    let trusted_top = if d + 1 >= k.max(1) { usize::MAX } else { d.saturating_sub(1) };
    FreeComplex {
        kind: ComplexKind::Salvetti,
        strands,
        d_max: d,
        ranks,
        basis_labels,
        boundaries,
        trusted_top,
    }
}

/// Positive simple braid over a permutation, checked against a second
/// reduced word.
fn positive_lift(p: &[usize]) -> GarsideForm {
    let n = p.len();
    let to_word = |w: Vec<usize>| {
        BraidWord::new(n, w.into_iter().map(|i| i as i32).collect()).expect("valid letters")
    };
    let a = normal_form(&to_word(reduced_word(p)));
    let b = normal_form(&to_word(reduced_word_left(p)));
    assert_eq!(a, b, "reduced words of {p:?} give different positive braids");
    a
}

/// Fox derivative `∂w/∂x_j` (1-based `j`).
pub fn fox_derivative(w: &BraidWord, j: usize) -> GroupRingElement {
    let n = w.strands();
    let mut out = GroupRingElement::zero(n);
    let letters = w.letters();
    for (pos, &l) in letters.iter().enumerate() {
        if l.unsigned_abs() as usize != j {
            continue;
        }
        if l > 0 {
            let prefix = BraidWord::new(n, letters[..pos].to_vec()).expect("subword");
            out.add_term(normal_form(&prefix), Integer::ONE);
        } else {
            let prefix = BraidWord::new(n, letters[..=pos].to_vec()).expect("subword");
            out.add_term(normal_form(&prefix), Integer::from(-1));
        }
    }
    out
}

/// Relators of the standard presentation, one per pair `i < j` of
/// generators, ordered like the 2-subsets of the Salvetti complex.
pub fn braid_relators(k: usize) -> Vec<BraidWord> {
    colex_subsets(k.saturating_sub(1), 2)
        .into_iter()
        .map(|pair| {
            let (i, j) = (pair[0] as i32, pair[1] as i32);
            let letters = if j == i + 1 {
                vec![i, j, i, -j, -i, -j]
            } else {
                vec![i, j, -i, -j]
            };
            BraidWord::new(k, letters).expect("valid relator")
        })
        .collect()
}

/// The presentation complex with Fox-derivative boundaries, degrees 0..2.
pub fn fox_complex(k: usize) -> Result<FreeComplex> {
    if k < 2 {
        return Err(Error::Invalid("the Fox complex needs k ≥ 2".into()));
    }
    let gens = k - 1;
    let relators = braid_relators(k);
    let d1: Vec<Vec<GroupRingElement>> = (1..=gens)
        .map(|j| {
            let x = GroupRingElement::from_word(&BraidWord::new(k, vec![j as i32]).unwrap());
            vec![x.add(&GroupRingElement::one(k).scale(&Integer::from(-1)))]
        })
        .collect();
    let d2: Vec<Vec<GroupRingElement>> = relators
        .iter()
        .map(|r| (1..=gens).map(|j| fox_derivative(r, j)).collect())
        .collect();
    let basis_labels = (0..=2).map(|j| colex_subsets(gens, j)).collect();
    Ok(FreeComplex {
        kind: ComplexKind::Fox,
        strands: k,
        d_max: 2,
        ranks: vec![1, gens, relators.len()],
        basis_labels,
        boundaries: vec![d1, d2],
        trusted_top: 1,
    })
}

impl FreeComplex {
    /// Checks `A_{j+1} · A_j = 0` over the group ring.
    pub fn check_boundary_square(&self) -> Result<()> {
        for j in 1..self.boundaries.len() {
            let upper = &self.boundaries[j];
            let lower = &self.boundaries[j - 1];
            for row in upper {
                for col in 0..self.ranks[j - 1] {
                    let mut acc = GroupRingElement::zero(self.strands);
                    for (mid, a) in row.iter().enumerate() {
                        if !a.is_zero() {
                            acc = acc.add(&a.mul(&lower[mid][col]));
                        }
                    }
                    if !acc.is_zero() {
                        return Err(Error::BoundarySquareNonzero { degree: j });
                    }
                }
            }
        }
        Ok(())
    }

    /// Every group-ring element appearing in a boundary.
    fn distinct_forms(&self) -> Vec<GarsideForm> {
        let mut forms = std::collections::BTreeSet::new();
        for m in &self.boundaries {
            for row in m {
                for e in row {
                    forms.extend(e.terms().keys().cloned());
                }
            }
        }
        forms.into_iter().collect()
    }
}

/// Coefficient modules a free complex can be specialised to.
#[derive(Clone, Copy, Debug)]
pub enum Coefficients<'a> {
    /// ℤ^r with the trivial action
    Trivial(usize),
    /// ℤ[c^k] with the Hurwitz action
    Hurwitz(&'a TupleSpace),
}

impl Coefficients<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Coefficients::Trivial(r) => *r,
            Coefficients::Hurwitz(s) => s.size(),
        }
    }

    fn strands(&self) -> Option<usize> {
        match self {
            Coefficients::Trivial(_) => None,
            Coefficients::Hurwitz(s) => Some(s.k()),
        }
    }
}

/// Integer chain complex; `D_j` maps `C_j → C_{j−1}` acting on columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerComplex {
    dims: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
    trusted_top: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexExport {
    pub dims: Vec<usize>,
    pub boundaries: Vec<CooMatrix>,
}

impl IntegerComplex {
    /// `boundaries[j−1] = D_j`; checks shapes and `D_j D_{j+1} = 0`.
    pub fn new(dims: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<IntegerComplex> {
        Self::with_trust(dims, boundaries, usize::MAX)
    }

    pub fn with_trust(
        dims: Vec<usize>,
        boundaries: Vec<SparseMatrix>,
        trusted_top: usize,
    ) -> Result<IntegerComplex> {
        if boundaries.len() + 1 != dims.len().max(1) {
            return Err(Error::Dimension(format!(
                "{} degrees need {} boundaries, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (j, d) in boundaries.iter().enumerate() {
            if d.rows() != dims[j] || d.cols() != dims[j + 1] {
                return Err(Error::Dimension(format!(
                    "D_{} is {}×{}, expected {}×{}",
                    j + 1,
                    d.rows(),
                    d.cols(),
                    dims[j],
                    dims[j + 1]
                )));
            }
        }
        for j in 1..boundaries.len() {
            if !boundaries[j - 1].mul(&boundaries[j])?.is_zero() {
                return Err(Error::BoundarySquareNonzero { degree: j });
            }
        }
        Ok(IntegerComplex {
            dims,
            boundaries,
            trusted_top,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims.get(j).copied().unwrap_or(0)
    }

    /// Top degree carrying chains.
    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    /// `D_j` for `1 ≤ j ≤ top`; `None` means the zero map.
    pub fn boundary(&self, j: usize) -> Option<&SparseMatrix> {
        if j == 0 {
            None
        } else {
            self.boundaries.get(j - 1)
        }
    }

    pub fn trusted_top(&self) -> usize {
        self.trusted_top
    }

    pub fn check_trusted(&self, degree: usize) -> Result<()> {
        if degree > self.trusted_top {
            Err(Error::UntrustedDegree {
                degree,
                d_max: self.top(),
            })
        } else {
            Ok(())
        }
    }

    pub fn export(&self) -> ComplexExport {
        ComplexExport {
            dims: self.dims.clone(),
            boundaries: self.boundaries.iter().map(SparseMatrix::to_coo).collect(),
        }
    }
}

/// Replaces each group-ring entry `Σ n_w w` by `Σ n_w ρ(rev w)` on the module.
///
/// Reading words backwards turns the row-vector complex of left modules into
/// one that can be tensored with a left module; `rev` is an anti-automorphism
/// fixing the generators, so `D₁` becomes `P − I`.
pub fn specialize(c: &FreeComplex, m: Coefficients<'_>) -> Result<IntegerComplex> {
    if let Some(k) = m.strands() {
        if k != c.strands && !(k == 0 && c.strands == 1) {
            return Err(Error::StrandMismatch {
                strands: c.strands,
                length: k,
            });
        }
    }
    let dim = m.dim();
    let actions: HashMap<GarsideForm, Vec<u32>> = match m {
        Coefficients::Trivial(_) => HashMap::new(),
        Coefficients::Hurwitz(space) => c
            .distinct_forms()
            .into_par_iter()
            .map(|f| {
                let w = f.to_word().reversed();
                let perm = space.word_permutation(&w);
                (f, perm)
            })
            .collect(),
    };
    let dims: Vec<usize> = c.ranks.iter().map(|r| r * dim).collect();
    let boundaries = c
        .boundaries
        .iter()
        .enumerate()
        .map(|(jm1, rows)| {
            let mut triplets = Vec::new();
            for (gamma, row) in rows.iter().enumerate() {
                for (face, entry) in row.iter().enumerate() {
                    for (form, n) in entry.terms() {
                        for t in 0..dim {
                            let image = match &m {
                                Coefficients::Trivial(_) => t,
                                Coefficients::Hurwitz(_) => actions[form][t] as usize,
                            };
                            triplets.push((face * dim + image, gamma * dim + t, n.clone()));
                        }
                    }
                }
            }
            SparseMatrix::from_triplets(dims[jm1], dims[jm1 + 1], triplets)
        })
        .collect();
    IntegerComplex::with_trust(dims, boundaries, c.trusted_top)
}

/// Degreewise maps `f_j: C_j → C'_j` (column convention).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub maps: Vec<SparseMatrix>,
}

impl ChainMap {
    pub fn identity(c: &IntegerComplex) -> ChainMap {
        ChainMap {
            maps: c.dims().iter().map(|&d| SparseMatrix::identity(d)).collect(),
        }
    }

    pub fn in_degree(&self, j: usize) -> Option<&SparseMatrix> {
        self.maps.get(j)
    }

    /// `f ∘ g`.
    pub fn compose(&self, g: &ChainMap) -> Result<ChainMap> {
        let n = self.maps.len().min(g.maps.len());
        Ok(ChainMap {
            maps: (0..n)
                .map(|j| self.maps[j].mul(&g.maps[j]))
                .collect::<Result<_>>()?,
        })
    }

    /// Checks squares `D'_j f_j = f_{j−1} D_j` wherever both sides are defined.
    pub fn verify(&self, source: &IntegerComplex, target: &IntegerComplex) -> Result<()> {
        for (j, f) in self.maps.iter().enumerate() {
            if f.cols() != source.dim(j) || f.rows() != target.dim(j) {
                return Err(Error::Dimension(format!("chain map shape in degree {j}")));
            }
        }
        for j in 1..self.maps.len() {
            let lhs = match target.boundary(j) {
                Some(d) => d.mul(&self.maps[j])?,
                None => SparseMatrix::zeros(target.dim(j - 1), source.dim(j)),
            };
            let rhs = match source.boundary(j) {
                Some(d) => self.maps[j - 1].mul(d)?,
                None => SparseMatrix::zeros(target.dim(j - 1), source.dim(j)),
            };
            if lhs != rhs {
                return Err(Error::NotAChainMap { degree: j });
            }
        }
        Ok(())
    }
}

/// The map `(Γ, t) ↦ (Γ, t·ĝ)` between specialisations of the Salvetti
/// complexes on `k` and `k+1` strands, verified against both boundaries.
pub fn stabilisation_chain_map(
    source: &IntegerComplex,
    target: &IntegerComplex,
    source_module: Coefficients<'_>,
    target_module: Coefficients<'_>,
    ghat: Option<usize>,
) -> Result<ChainMap> {
    let (ds, dt) = (source_module.dim(), target_module.dim());
    let degrees = source.dims().len().min(target.dims().len());
    let maps = (0..degrees)
        .map(|j| {
            let cells = source.dim(j) / ds.max(1);
            let triplets = (0..cells).flat_map(|cell| {
                (0..ds).map(move |t| {
                    let image = match (&source_module, &target_module) {
                        (Coefficients::Hurwitz(s), Coefficients::Hurwitz(_)) => s
                            .stabilize_index(t, ghat.expect("stabiliser needed"))
                            .expect("stabiliser in class"),
                        _ => t,
                    };
                    (cell * dt + image, cell * ds + t, Integer::ONE)
                })
            });
            SparseMatrix::from_triplets(target.dim(j), source.dim(j), triplets.collect::<Vec<_>>())
        })
        .collect();
    let f = ChainMap { maps };
    f.verify(source, target)?;
    Ok(f)
}
