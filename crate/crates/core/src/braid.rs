//! Braid words, the Hurwitz action on tuples, orbit enumeration, and a
//! left-greedy Garside normal form for the word problem.
//!
//! Letters are signed 1-based generator indices: `[1, -2]` is `σ₁σ₂⁻¹`. Words
//! act on the left, so the rightmost letter acts first.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ClassSet, FiniteGroup};

/// Default bound on the number of tuples materialised at once.
pub const DEFAULT_TUPLE_LIMIT: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<BraidWord> {
        if strands == 0 {
            return Err(Error::Invalid("a braid needs at least one strand".into()));
        }
        for &l in &letters {
            let i = l.unsigned_abs() as usize;
            if l == 0 || i >= strands {
                return Err(Error::GeneratorOutOfRange { index: i, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> BraidWord {
        BraidWord {
            strands: strands.max(1),
            letters: Vec::new(),
        }
    }

    /// The single letter `σ_i^{±1}` (1-based `i`).
    pub fn generator(strands: usize, i: usize, positive: bool) -> Result<BraidWord> {
        let l = i as i32;
        Self::new(strands, vec![if positive { l } else { -l }])
    }

    pub fn random<R: Rng>(strands: usize, len: usize, rng: &mut R) -> BraidWord {
        if strands < 2 {
            return Self::identity(strands);
        }
        let letters = (0..len)
            .map(|_| {
                let i = rng.gen_range(1..strands) as i32;
                if rng.gen_bool(0.5) {
                    i
                } else {
                    -i
                }
            })
            .collect();
        BraidWord { strands, letters }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// The word read backwards; an anti-automorphism of the braid group.
    pub fn reversed(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch {
                strands: self.strands,
                length: other.strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// Inserts `other` after the first `at` letters.
    pub fn splice(&self, at: usize, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters[..at].to_vec();
        letters.extend_from_slice(&other.letters);
        letters.extend_from_slice(&self.letters[at..]);
        BraidWord {
            strands: self.strands.max(other.strands),
            letters,
        }
    }

    /// Inclusion `B_k → B_{k+1}` fixing the new last strand.
    pub fn sigma_k(&self) -> BraidWord {
        BraidWord {
            strands: self.strands + 1,
            letters: self.letters.clone(),
        }
    }

    /// `B_ℓ → B_{k+ℓ}`, shifting every generator index up by `k`.
    pub fn v_k_l(&self, k: usize) -> BraidWord {
        BraidWord {
            strands: self.strands + k,
            letters: self
                .letters
                .iter()
                .map(|&l| l + l.signum() * k as i32)
                .collect(),
        }
    }

    /// Image in the symmetric group; `perm(ab) = perm(a) ∘ perm(b)`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            p.swap(i, i + 1);
        }
        p
    }

    /// Exponent sum (the abelianisation `B_k → ℤ`).
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "B{}[{}]", self.strands, parts.join(","))
    }
}

/// `(a, b) ↦ (a b a⁻¹, a)` for σ, `(a, b) ↦ (b, b⁻¹ a b)` for σ⁻¹.
#[inline]
pub fn hurwitz_move(g: &FiniteGroup, a: usize, b: usize, positive: bool) -> (usize, usize) {
    if positive {
        (g.conj(a, b), a)
    } else {
        (b, g.conj(g.inv(b), a))
    }
}

/// Applies `w` to the tuple `t` with entries in `c`.
pub fn hurwitz_act(c: &ClassSet, w: &BraidWord, t: &[usize]) -> Result<Vec<usize>> {
    if w.strands() != t.len() && !(t.is_empty() && w.strands() == 1 && w.is_empty()) {
        return Err(Error::StrandMismatch {
            strands: w.strands(),
            length: t.len(),
        });
    }
    if let Some(&bad) = t.iter().find(|&&x| !c.contains(x)) {
        return Err(Error::LeftClass { entry: bad });
    }
    let g = c.group();
    let mut out = t.to_vec();
    for &l in w.letters().iter().rev() {
        let i = l.unsigned_abs() as usize - 1;
        let (a, b) = hurwitz_move(g, out[i], out[i + 1], l > 0);
        if !c.contains(a) {
            return Err(Error::LeftClass { entry: a });
        }
        if !c.contains(b) {
            return Err(Error::LeftClass { entry: b });
        }
        out[i] = a;
        out[i + 1] = b;
    }
    Ok(out)
}

/// Left-to-right product `g₁ g₂ ⋯ g_k`.
pub fn total_product(g: &FiniteGroup, t: &[usize]) -> usize {
    t.iter().fold(g.identity(), |acc, &x| g.mul(acc, x))
}

pub fn stabilize_tuple(c: &ClassSet, t: &[usize], ghat: usize) -> Result<Vec<usize>> {
    if !c.contains(ghat) {
        return Err(Error::StabiliserNotInClass(ghat));
    }
    let mut out = t.to_vec();
    out.push(ghat);
    Ok(out)
}

/// Indexing of `c^k`: lexicographic with the first entry most significant,
/// digits being positions in the sorted class. Appending an entry in
/// position `q` sends index `x` to `x·|c| + q`.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    class: ClassSet,
    k: usize,
    size: usize,
    weights: Vec<usize>,
    // pair move on class positions, forward and inverse
    forward: Vec<(u32, u32)>,
    backward: Vec<(u32, u32)>,
}

impl TupleSpace {
    pub fn new(class: &ClassSet, k: usize, limit: u128) -> Result<TupleSpace> {
        let m = class.len() as u128;
        let needed = m.checked_pow(k as u32).unwrap_or(u128::MAX);
        if needed > limit {
            return Err(Error::ResourceBound {
                what: format!("|c|^{k} tuples"),
                needed,
                limit,
            });
        }
        let m = class.len();
        let size = needed as usize;
        let mut weights = vec![1usize; k];
        for j in (0..k.saturating_sub(1)).rev() {
            weights[j] = weights[j + 1] * m;
        }
        let g = class.group();
        let pos = |x: usize| class.position(x).expect("conjugation-closed class") as u32;
        let mut forward = Vec::with_capacity(m * m);
        let mut backward = Vec::with_capacity(m * m);
        for &a in class.elements() {
            for &b in class.elements() {
                let (x, y) = hurwitz_move(g, a, b, true);
                forward.push((pos(x), pos(y)));
                let (x, y) = hurwitz_move(g, a, b, false);
                backward.push((pos(x), pos(y)));
            }
        }
        Ok(TupleSpace {
            class: class.clone(),
            k,
            size,
            weights,
            forward,
            backward,
        })
    }

    pub fn class(&self) -> &ClassSet {
        &self.class
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, t: &[usize]) -> Result<usize> {
        if t.len() != self.k {
            return Err(Error::StrandMismatch {
                strands: self.k,
                length: t.len(),
            });
        }
        let mut idx = 0;
        for &x in t {
            let p = self.class.position(x).ok_or(Error::LeftClass { entry: x })?;
            idx = idx * self.class.len() + p;
        }
        Ok(idx)
    }

    pub fn decode(&self, idx: usize) -> Vec<usize> {
        self.digits(idx)
            .into_iter()
            .map(|p| self.class.elements()[p])
            .collect()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let m = self.class.len();
        let mut out = vec![0; self.k];
        for j in (0..self.k).rev() {
            out[j] = idx % m;
            idx /= m;
        }
        out
    }

    /// Image of tuple `idx` under `σ_{i+1}^{±1}` (0-based `i`).
    #[inline]
    pub fn apply_generator(&self, idx: usize, i: usize, positive: bool) -> usize {
        let m = self.class.len();
        let (wa, wb) = (self.weights[i], self.weights[i + 1]);
        let a = (idx / wa) % m;
        let b = (idx / wb) % m;
        let table = if positive { &self.forward } else { &self.backward };
        let (x, y) = table[a * m + b];
        idx - a * wa - b * wb + x as usize * wa + y as usize * wb
    }

    pub fn apply_word(&self, idx: usize, w: &BraidWord) -> usize {
        w.letters().iter().rev().fold(idx, |acc, &l| {
            self.apply_generator(acc, l.unsigned_abs() as usize - 1, l > 0)
        })
    }

    /// The permutation `t ↦ w·t` of tuple indices.
    pub fn word_permutation(&self, w: &BraidWord) -> Vec<u32> {
        (0..self.size)
            .map(|t| self.apply_word(t, w) as u32)
            .collect()
    }

    pub fn stabilize_index(&self, idx: usize, ghat: usize) -> Result<usize> {
        let q = self
            .class
            .position(ghat)
            .ok_or(Error::StabiliserNotInClass(ghat))?;
        Ok(idx * self.class.len() + q)
    }
}

/// Orbit partition of `c^k` under the braid group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbits {
    pub k: usize,
    /// orbit id of every tuple index; ids are numbered by least member
    pub labels: Vec<u32>,
    /// least tuple index of each orbit
    pub representatives: Vec<usize>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root so roots are least members
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else if rb < ra {
            self.parent[ra as usize] = rb;
        }
    }
}

pub fn orbits(c: &ClassSet, k: usize, limit: u128) -> Result<Orbits> {
    let space = TupleSpace::new(c, k, limit)?;
    Ok(orbits_in(&space))
}

pub fn orbits_in(space: &TupleSpace) -> Orbits {
    let n = space.size();
    let mut uf = UnionFind::new(n);
    for t in 0..n {
        for i in 0..space.k().saturating_sub(1) {
            uf.union(t as u32, space.apply_generator(t, i, true) as u32);
        }
    }
    let mut labels = vec![0u32; n];
    let mut representatives = Vec::new();
    let mut id_of_root = vec![u32::MAX; n];
    for t in 0..n {
        let r = uf.find(t as u32) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = representatives.len() as u32;
            representatives.push(t);
        }
        labels[t] = id_of_root[r];
    }
    Orbits {
        k: space.k(),
        labels,
        representatives,
    }
}

/// `Δ^infimum · A₁ ⋯ A_r` with each `A_j` a permutation standing for a positive
/// simple braid, left-weighted, no factor trivial or equal to `Δ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GarsideForm {
    pub strands: usize,
    pub infimum: i64,
    pub factors: Vec<Vec<usize>>,
}

fn right_descent(p: &[usize], i: usize) -> bool {
    p[i] > p[i + 1]
}

fn left_descent(p: &[usize], i: usize) -> bool {
    let pos_i = p.iter().position(|&x| x == i).unwrap();
    let pos_j = p.iter().position(|&x| x == i + 1).unwrap();
    pos_i > pos_j
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

fn longest(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Reduced word (1-based letters) of a permutation, peeling right descents.
pub fn reduced_word(p: &[usize]) -> Vec<usize> {
    let mut p = p.to_vec();
    let mut word = Vec::new();
    while let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| right_descent(&p, i)) {
        p.swap(i, i + 1);
        word.push(i + 1);
    }
    word.reverse();
    word
}

/// A second reduced word, peeling left descents.
pub fn reduced_word_left(p: &[usize]) -> Vec<usize> {
    let mut p = p.to_vec();
    let mut word = Vec::new();
    while let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| left_descent(&p, i)) {
        // s_i ∘ p
        for x in p.iter_mut() {
            if *x == i {
                *x = i + 1;
            } else if *x == i + 1 {
                *x = i;
            }
        }
        word.push(i + 1);
    }
    word
}

pub fn inversions(p: &[usize]) -> usize {
    let mut n = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                n += 1;
            }
        }
    }
    n
}

struct NormalFormBuilder {
    n: usize,
    infimum: i64,
    factors: Vec<Vec<usize>>,
    w0: Vec<usize>,
}

impl NormalFormBuilder {
    fn new(n: usize) -> Self {
        NormalFormBuilder {
            n,
            infimum: 0,
            factors: Vec::new(),
            w0: longest(n),
        }
    }

    fn push_simple(&mut self, p: Vec<usize>) {
        self.factors.push(p);
        self.normalise();
    }

    fn push_delta_inverse(&mut self) {
        let w0 = self.w0.clone();
        for f in self.factors.iter_mut() {
            *f = compose(&compose(&w0, f), &w0);
        }
        self.infimum -= 1;
    }

    fn push_letter(&mut self, l: i32) {
        let i = l.unsigned_abs() as usize - 1;
        let mut s = identity_perm(self.n);
        s.swap(i, i + 1);
        if l > 0 {
            self.push_simple(s);
        } else {
            self.push_delta_inverse();
            let x = compose(&self.w0, &s);
            self.push_simple(x);
        }
    }

    fn normalise(&mut self) {
        let n = self.n;
        if n < 2 {
            // B_1 is trivial
            self.factors.clear();
            self.infimum = 0;
            return;
        }
        loop {
            let mut changed = false;
            for j in 0..self.factors.len().saturating_sub(1) {
                loop {
                    let (a, b) = (&self.factors[j], &self.factors[j + 1]);
                    let Some(i) = (0..n - 1).find(|&i| left_descent(b, i) && !right_descent(a, i))
                    else {
                        break;
                    };
                    let mut s = identity_perm(n);
                    s.swap(i, i + 1);
                    let na = compose(a, &s);
                    let nb = compose(&s, b);
                    self.factors[j] = na;
                    self.factors[j + 1] = nb;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        while self.factors.first().is_some_and(|f| *f == self.w0) {
            self.factors.remove(0);
            self.infimum += 1;
        }
        let id = identity_perm(n);
        while self.factors.last().is_some_and(|f| *f == id) {
            self.factors.pop();
        }
    }

    fn finish(self) -> GarsideForm {
        GarsideForm {
            strands: self.n,
            infimum: self.infimum,
            factors: self.factors,
        }
    }
}

pub fn normal_form(w: &BraidWord) -> GarsideForm {
    let mut b = NormalFormBuilder::new(w.strands());
    for &l in w.letters() {
        b.push_letter(l);
    }
    b.finish()
}

impl GarsideForm {
    pub fn identity(strands: usize) -> GarsideForm {
        GarsideForm {
            strands,
            infimum: 0,
            factors: Vec::new(),
        }
    }

    /// The positive simple braid lifting permutation `p`.
    pub fn simple(p: &[usize]) -> GarsideForm {
        let mut b = NormalFormBuilder::new(p.len());
        b.push_simple(p.to_vec());
        b.finish()
    }

    pub fn is_identity(&self) -> bool {
        self.infimum == 0 && self.factors.is_empty()
    }

    /// A word representing this element.
    pub fn to_word(&self) -> BraidWord {
        let n = self.strands;
        let delta: Vec<i32> = reduced_word(&longest(n)).iter().map(|&i| i as i32).collect();
        let mut letters = Vec::new();
        if self.infimum >= 0 {
            for _ in 0..self.infimum {
                letters.extend_from_slice(&delta);
            }
        } else {
            for _ in 0..(-self.infimum) {
                letters.extend(delta.iter().rev().map(|l| -l));
            }
        }
        for f in &self.factors {
            letters.extend(reduced_word(f).iter().map(|&i| i as i32));
        }
        BraidWord {
            strands: n.max(1),
            letters,
        }
    }

    pub fn mul(&self, other: &GarsideForm) -> GarsideForm {
        let w = self.to_word().splice(self.to_word().len(), &other.to_word());
        normal_form(&w)
    }

    pub fn inverse(&self) -> GarsideForm {
        normal_form(&self.to_word().inverse())
    }

    pub fn permutation(&self) -> Vec<usize> {
        self.to_word().permutation()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn s3_transpositions() -> ClassSet {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let t = g.find_element("transposition").unwrap();
        ClassSet::conjugacy_closure(&g, &[t]).unwrap()
    }

    fn el(c: &ClassSet, name: &str) -> usize {
        c.group().find_element(name).unwrap()
    }

    #[test]
    fn hurwitz_examples() {
        let c = s3_transpositions();
        let (t12, t13, t23) = (el(&c, "(1 2)"), el(&c, "(1 3)"), el(&c, "(2 3)"));
        let s1 = BraidWord::new(2, vec![1]).unwrap();
        assert_eq!(hurwitz_act(&c, &s1, &[t12, t13]).unwrap(), vec![t23, t12]);
        let s1i = BraidWord::new(2, vec![-1]).unwrap();
        assert_eq!(hurwitz_act(&c, &s1i, &[t23, t12]).unwrap(), vec![t12, t13]);
        assert_eq!(
            hurwitz_act(&c, &BraidWord::identity(2), &[t12, t13]).unwrap(),
            vec![t12, t13]
        );
        assert!(hurwitz_act(&c, &s1, &[t12]).is_err());
        assert!(matches!(
            hurwitz_act(&c, &s1, &[t12, 0]),
            Err(Error::LeftClass { .. })
        ));
    }

    #[test]
    fn product_and_stabilisation() {
        let c = s3_transpositions();
        let g = c.group();
        let (t12, t13) = (el(&c, "(1 2)"), el(&c, "(1 3)"));
        assert_eq!(total_product(g, &[t12, t13]), g.mul(t12, t13));
        assert_eq!(total_product(g, &[]), 0);
        assert_eq!(total_product(g, &[t13]), t13);
        assert_eq!(stabilize_tuple(&c, &[t12], t13).unwrap(), vec![t12, t13]);
        assert_eq!(stabilize_tuple(&c, &[], t13).unwrap(), vec![t13]);
        assert!(stabilize_tuple(&c, &[t12], 0).is_err());
    }

    #[test]
    fn index_shifts() {
        let w = BraidWord::new(2, vec![1]).unwrap();
        assert_eq!(w.sigma_k(), BraidWord::new(3, vec![1]).unwrap());
        assert_eq!(w.v_k_l(3), BraidWord::new(5, vec![4]).unwrap());
        let w = BraidWord::new(3, vec![2, -1]).unwrap();
        assert_eq!(w.sigma_k(), BraidWord::new(4, vec![2, -1]).unwrap());
        assert_eq!(
            BraidWord::new(2, vec![1, 1]).unwrap().v_k_l(1),
            BraidWord::new(3, vec![2, 2]).unwrap()
        );
        assert!(BraidWord::identity(3).v_k_l(2).is_empty());
        assert!(BraidWord::new(3, vec![3]).is_err());
    }

    #[test]
    fn orbit_examples() {
        let c = s3_transpositions();
        let o = orbits(&c, 2, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(o.count(), 5);
        let mut sizes = o.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 1, 3, 3]);
        assert_eq!(orbits(&c, 1, DEFAULT_TUPLE_LIMIT).unwrap().count(), 3);
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let single = ClassSet::conjugacy_closure(&g, &[1]).unwrap();
        for k in 0..6 {
            assert_eq!(orbits(&single, k, DEFAULT_TUPLE_LIMIT).unwrap().count(), 1);
        }
        assert!(matches!(
            orbits(&c, 20, DEFAULT_TUPLE_LIMIT),
            Err(Error::ResourceBound { .. })
        ));
    }

    #[test]
    fn orbit_representatives_are_lex_least() {
        let c = s3_transpositions();
        let space = TupleSpace::new(&c, 3, DEFAULT_TUPLE_LIMIT).unwrap();
        let o = orbits_in(&space);
        for (id, &rep) in o.representatives.iter().enumerate() {
            let least = (0..space.size())
                .filter(|&t| o.labels[t] as usize == id)
                .map(|t| space.decode(t))
                .min()
                .unwrap();
            assert_eq!(space.decode(rep), least);
        }
    }

    #[test]
    fn tuple_space_matches_direct_action() {
        let c = s3_transpositions();
        let space = TupleSpace::new(&c, 4, DEFAULT_TUPLE_LIMIT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = BraidWord::random(4, 6, &mut rng);
            for t in 0..space.size() {
                let direct = hurwitz_act(&c, &w, &space.decode(t)).unwrap();
                assert_eq!(space.decode(space.apply_word(t, &w)), direct);
            }
        }
        let ghat = el(&c, "(1 3)");
        let t = space.decode(17);
        assert_eq!(
            TupleSpace::new(&c, 5, DEFAULT_TUPLE_LIMIT)
                .unwrap()
                .decode(space.stabilize_index(17, ghat).unwrap()),
            stabilize_tuple(&c, &t, ghat).unwrap()
        );
    }

    #[test]
    fn normal_form_examples() {
        let nf = |s: usize, l: Vec<i32>| normal_form(&BraidWord::new(s, l).unwrap());
        assert_eq!(nf(2, vec![1, -1]), GarsideForm::identity(2));
        assert_eq!(nf(3, vec![1, 2, 1]), nf(3, vec![2, 1, 2]));
        assert_ne!(nf(3, vec![1, 2]), nf(3, vec![2, 1]));
        assert_eq!(nf(3, vec![1, 2, 1]).infimum, 1);
        assert_eq!(nf(4, vec![1, 3]), nf(4, vec![3, 1]));
        assert_ne!(nf(3, vec![1, 1]), GarsideForm::identity(3));
        assert_eq!(nf(3, vec![-1, -2, -1]).infimum, -1);
        assert!(nf(3, vec![-1, -2, -1]).factors.is_empty());
    }

    #[test]
    fn matsumoto_words_agree() {
        for n in 1..=5 {
            let perms = {
                let g = FiniteGroup::symmetric(n).unwrap();
                let _ = g;
                all_perms(n)
            };
            for p in perms {
                let a = reduced_word(&p);
                let b = reduced_word_left(&p);
                assert_eq!(a.len(), inversions(&p));
                assert_eq!(b.len(), inversions(&p));
                let wa = BraidWord::new(n, a.iter().map(|&i| i as i32).collect()).unwrap();
                let wb = BraidWord::new(n, b.iter().map(|&i| i as i32).collect()).unwrap();
                assert_eq!(wa.permutation(), p);
                assert_eq!(normal_form(&wa), normal_form(&wb));
                assert_eq!(normal_form(&wa), GarsideForm::simple(&p));
            }
        }
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn word_strategy(strands: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
        prop::collection::vec((1..strands as i32, any::<bool>()), 0..max_len).prop_map(
            move |v| {
                BraidWord::new(
                    strands,
                    v.into_iter().map(|(i, s)| if s { i } else { -i }).collect(),
                )
                .unwrap()
            },
        )
    }

    fn relator(strands: usize, i: i32, j: i32) -> BraidWord {
        let letters = if (i - j).abs() == 1 {
            vec![i, j, i, -j, -i, -j]
        } else {
            vec![i, j, -i, -j]
        };
        BraidWord::new(strands, letters).unwrap()
    }

    proptest! {
        #[test]
        fn normal_form_ignores_relators(
            w in word_strategy(5, 12),
            at in 0usize..13,
            i in 1i32..5,
            j in 1i32..5,
            invert in any::<bool>(),
        ) {
            prop_assume!(i != j);
            let mut r = relator(5, i, j);
            if invert {
                r = r.inverse();
            }
            let at = at.min(w.len());
            prop_assert_eq!(normal_form(&w.splice(at, &r)), normal_form(&w));
            let cancel = BraidWord::new(5, vec![i, -i]).unwrap();
            prop_assert_eq!(normal_form(&w.splice(at, &cancel)), normal_form(&w));
        }

        #[test]
        fn normal_form_is_faithful_to_action(w in word_strategy(4, 14)) {
            let c = s3_transpositions();
            let space = TupleSpace::new(&c, 4, DEFAULT_TUPLE_LIMIT).unwrap();
            let back = normal_form(&w).to_word();
            prop_assert_eq!(normal_form(&back), normal_form(&w));
            prop_assert_eq!(back.permutation(), w.permutation());
            for t in 0..space.size() {
                prop_assert_eq!(space.apply_word(t, &back), space.apply_word(t, &w));
            }
        }

        #[test]
        fn normal_form_group_laws(a in word_strategy(4, 8), b in word_strategy(4, 8)) {
            let (fa, fb) = (normal_form(&a), normal_form(&b));
            prop_assert_eq!(fa.mul(&fb), normal_form(&a.concat(&b).unwrap()));
            prop_assert!(fa.mul(&fa.inverse()).is_identity());
            for pair in fa.factors.windows(2) {
                for i in 0..3 {
                    prop_assert!(!left_descent(&pair[1], i) || right_descent(&pair[0], i));
                }
            }
        }

        #[test]
        fn permutation_is_a_homomorphism(a in word_strategy(5, 10), b in word_strategy(5, 10)) {
            let ab = a.concat(&b).unwrap();
            prop_assert_eq!(ab.permutation(), compose(&a.permutation(), &b.permutation()));
        }
    }
}
