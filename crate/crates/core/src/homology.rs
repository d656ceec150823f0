//! Homology of integer chain complexes over ℤ, ℚ and 𝔽_p, induced maps, and
//! their classification.
//!
//! A complex is first shrunk by eliminating unit entries of its boundaries
//! (each elimination removes one cell in two adjacent degrees and is a chain
//! homotopy equivalence), then the small remainder is handled with dense
//! Smith normal forms. Both the inclusion `ι` of the reduced complex and the
//! projection `π` onto it are recorded so cycles and chain maps can be
//! transported.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer::Integer;
use crate::matrix::DenseMatrix;
use crate::resolution::{ChainMap, IntegerComplex};
use crate::snf::{integer_kernel, smith_normal_form, solve_integer, Snf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coefficient {
    Z,
    Q,
    Fp(u64),
}

impl Coefficient {
    pub fn is_field(&self) -> bool {
        !matches!(self, Coefficient::Z)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Z => write!(f, "Z"),
            Coefficient::Q => write!(f, "Q"),
            Coefficient::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Coefficient> {
        match s {
            "Z" => Ok(Coefficient::Z),
            "Q" => Ok(Coefficient::Q),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .or_else(|| s.strip_prefix('F'))
                    .and_then(|x| x.parse::<u64>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown coefficient ring {s:?}")))?;
                if !is_prime(p) || p > u32::MAX as u64 {
                    return Err(Error::Invalid(format!("{p} is not a supported prime")));
                }
                Ok(Coefficient::Fp(p))
            }
        }
    }
}

/// `ℤ^free ⊕ ⊕ ℤ/tᵢ`, or a vector space of dimension `free` over a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    #[serde(rename = "free")]
    pub free_rank: usize,
    pub torsion: Vec<Integer>,
}

impl HomologyGroup {
    pub fn zero() -> HomologyGroup {
        HomologyGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> HomologyGroup {
        HomologyGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Scalars the elimination runs over.
pub trait Ring: Sync {
    type E: Clone + fmt::Debug + PartialEq + Send + Sync;
    fn zero(&self) -> Self::E;
    fn from_integer(&self, x: &Integer) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn unit_inverse(&self, a: &Self::E) -> Option<Self::E>;
}

pub struct IntegerRing;

impl Ring for IntegerRing {
    type E = Integer;

    fn zero(&self) -> Integer {
        Integer::ZERO
    }

    fn from_integer(&self, x: &Integer) -> Integer {
        x.clone()
    }

    fn is_zero(&self, x: &Integer) -> bool {
        x.is_zero()
    }

    fn add(&self, a: &Integer, b: &Integer) -> Integer {
        a + b
    }

    fn mul(&self, a: &Integer, b: &Integer) -> Integer {
        a * b
    }

    fn neg(&self, a: &Integer) -> Integer {
        -a
    }

    fn unit_inverse(&self, a: &Integer) -> Option<Integer> {
        a.is_unit().then(|| a.clone())
    }
}

pub struct PrimeField {
    pub p: u64,
}

impl Ring for PrimeField {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn from_integer(&self, x: &Integer) -> u64 {
        x.rem_u64(self.p)
    }

    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }

    fn unit_inverse(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (mut base, mut exp, mut acc) = (*a, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        Some(acc)
    }
}

type SparseVec<E> = BTreeMap<usize, E>;

/// `v += c · w`; returns indices whose entry appeared or vanished.
fn axpy<R: Ring>(
    ring: &R,
    v: &mut SparseVec<R::E>,
    c: &R::E,
    w: &SparseVec<R::E>,
) -> (Vec<usize>, Vec<usize>) {
    let (mut born, mut died) = (Vec::new(), Vec::new());
    for (i, x) in w {
        let delta = ring.mul(c, x);
        match v.get_mut(i) {
            Some(y) => {
                *y = ring.add(y, &delta);
                if ring.is_zero(y) {
                    v.remove(i);
                    died.push(*i);
                }
            }
            None => {
                if !ring.is_zero(&delta) {
                    v.insert(*i, delta);
                    born.push(*i);
                }
            }
        }
    }
    (born, died)
}

#[derive(Clone, Debug)]
enum ProjOp<E> {
    /// `v_r −= γ_r · u⁻¹ · v_a` for each entry of γ, then drop `a`
    Redistribute {
        a: usize,
        gamma: Vec<(usize, E)>,
        uinv: E,
    },
    Drop(usize),
}

/// A complex after unit elimination, with transport data.
pub struct Reduction<R: Ring> {
    ring: R,
    dims: Vec<usize>,
    survivors: Vec<Vec<usize>>,
    /// reduced `D_j` as columns over the surviving cells (original labels)
    reduced: Vec<BTreeMap<usize, SparseVec<R::E>>>,
    iota: Vec<BTreeMap<usize, SparseVec<R::E>>>,
    log: Vec<Vec<ProjOp<R::E>>>,
}

struct Boundary<E> {
    cols: Vec<Option<SparseVec<E>>>,
    rows: Vec<BTreeSet<usize>>,
}

impl<R: Ring> Reduction<R> {
    pub fn new(ring: R, c: &IntegerComplex) -> Reduction<R> {
        let top = c.top();
        let dims: Vec<usize> = (0..=top).map(|j| c.dim(j)).collect();
        // bd[j] holds D_j for 1 ≤ j ≤ top; index 0 is a placeholder
        let mut bd: Vec<Boundary<R::E>> = (0..=top)
            .map(|j| {
                let mut rows = vec![BTreeSet::new(); if j == 0 { 0 } else { dims[j - 1] }];
                let cols = match c.boundary(j) {
                    Some(d) => (0..d.cols())
                        .map(|col| {
                            let mut v = SparseVec::new();
                            for (r, x) in d.column(col) {
                                let e = ring.from_integer(x);
                                if !ring.is_zero(&e) {
                                    rows[*r].insert(col);
                                    v.insert(*r, e);
                                }
                            }
                            Some(v)
                        })
                        .collect(),
                    None => (0..dims[j]).map(|_| Some(SparseVec::new())).collect(),
                };
                Boundary { cols, rows }
            })
            .collect();
        let mut alive: Vec<Vec<bool>> = dims.iter().map(|&d| vec![true; d]).collect();
        let mut iota: Vec<Vec<Option<SparseVec<R::E>>>> = dims
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|i| Some(SparseVec::from([(i, ring.from_integer(&Integer::ONE))])))
                    .collect()
            })
            .collect();
        let mut log: Vec<Vec<ProjOp<R::E>>> = vec![Vec::new(); top + 1];

        for j in (1..=top).rev() {
            let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
            for (b, col) in bd[j].cols.iter().enumerate() {
                if let Some(col) = col {
                    if !col.is_empty() {
                        heap.push(Reverse((col.len(), b)));
                    }
                }
            }
            while let Some(Reverse((len, b))) = heap.pop() {
                let Some(col) = bd[j].cols[b].as_ref() else { continue };
                if col.len() != len || col.is_empty() {
                    continue;
                }
                // cheapest unit pivot in this column
                let pivot = col
                    .iter()
                    .filter(|(_, x)| ring.unit_inverse(x).is_some())
                    .min_by_key(|(r, _)| (bd[j].rows[**r].len(), **r))
                    .map(|(r, x)| (*r, x.clone()));
                let Some((a, u)) = pivot else { continue };
                let uinv = ring.unit_inverse(&u).unwrap();
                let col_b = bd[j].cols[b].take().unwrap();
                for r in col_b.keys() {
                    bd[j].rows[*r].remove(&b);
                }
                let others: Vec<usize> = bd[j].rows[a].iter().copied().collect();
                let iota_b = iota[j][b].take().unwrap();
                for y in others {
                    let beta = bd[j].cols[y].as_ref().unwrap()[&a].clone();
                    let factor = ring.neg(&ring.mul(&beta, &uinv));
                    let col_y = bd[j].cols[y].as_mut().unwrap();
                    let (born, died) = axpy(&ring, col_y, &factor, &col_b);
                    let len = col_y.len();
                    for r in born {
                        bd[j].rows[r].insert(y);
                    }
                    for r in died {
                        bd[j].rows[r].remove(&y);
                    }
                    if len > 0 {
                        heap.push(Reverse((len, y)));
                    }
                    axpy(&ring, iota[j][y].as_mut().unwrap(), &factor, &iota_b);
                }
                debug_assert!(bd[j].rows[a].is_empty());
                alive[j][b] = false;
                alive[j - 1][a] = false;
                iota[j - 1][a] = None;
                if j < top {
                    let xs: Vec<usize> = std::mem::take(&mut bd[j + 1].rows[b]).into_iter().collect();
                    for x in xs {
                        bd[j + 1].cols[x].as_mut().unwrap().remove(&b);
                    }
                }
                if j > 1 {
                    if let Some(col_a) = bd[j - 1].cols[a].take() {
                        for r in col_a.keys() {
                            bd[j - 1].rows[*r].remove(&a);
                        }
                    }
                }
                let gamma: Vec<(usize, R::E)> =
                    col_b.into_iter().filter(|(r, _)| *r != a).collect();
                log[j - 1].push(ProjOp::Redistribute { a, gamma, uinv });
                log[j].push(ProjOp::Drop(b));
            }
        }

        let survivors: Vec<Vec<usize>> = alive
            .iter()
            .map(|v| (0..v.len()).filter(|&i| v[i]).collect())
            .collect();
        let reduced = (0..=top)
            .map(|j| {
                if j == 0 {
                    return BTreeMap::new();
                }
                survivors[j]
                    .iter()
                    .map(|&b| (b, bd[j].cols[b].clone().unwrap_or_default()))
                    .collect()
            })
            .collect();
        let iota = iota
            .into_iter()
            .enumerate()
            .map(|(j, v)| {
                survivors[j]
                    .iter()
                    .map(|&i| (i, v[i].clone().expect("survivor keeps ι")))
                    .collect()
            })
            .collect();
        Reduction {
            ring,
            dims,
            survivors,
            reduced,
            iota,
            log,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn survivors(&self, j: usize) -> &[usize] {
        self.survivors.get(j).map_or(&[], Vec::as_slice)
    }

    /// Reduced `D_j` as a dense matrix over the survivors, mapped to ℤ by `lift`.
    fn reduced_dense(&self, j: usize, lift: impl Fn(&R::E) -> Integer) -> DenseMatrix {
        let rows = self.survivors(j.wrapping_sub(1)).len();
        let cols = self.survivors(j).len();
        if j == 0 || j > self.top() {
            return DenseMatrix::zeros(if j == 0 { 0 } else { rows }, cols);
        }
        let row_pos: BTreeMap<usize, usize> = self.survivors[j - 1]
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i))
            .collect();
        let mut d = DenseMatrix::zeros(rows, cols);
        for (c, b) in self.survivors[j].iter().enumerate() {
            for (r, x) in &self.reduced[j][b] {
                d[(row_pos[r], c)] = lift(x);
            }
        }
        d
    }

    pub fn reduced_is_zero(&self) -> bool {
        self.reduced
            .iter()
            .all(|m| m.values().all(|c| c.is_empty()))
    }

    /// `ι_j` of a reduced chain given over survivor positions.
    pub fn include(&self, j: usize, coords: &[R::E]) -> SparseVec<R::E> {
        let mut out = SparseVec::new();
        for (pos, c) in coords.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            let cell = self.survivors[j][pos];
            axpy(&self.ring, &mut out, c, &self.iota[j][&cell]);
        }
        out
    }

    /// `π_j` of an original chain, as coordinates over the survivors.
    pub fn project(&self, j: usize, v: &SparseVec<R::E>) -> Vec<R::E> {
        let mut v = v.clone();
        if let Some(ops) = self.log.get(j) {
            for op in ops {
                match op {
                    ProjOp::Drop(b) => {
                        v.remove(b);
                    }
                    ProjOp::Redistribute { a, gamma, uinv } => {
                        if let Some(va) = v.remove(a) {
                            let factor = self.ring.neg(&self.ring.mul(uinv, &va));
                            for (r, g) in gamma {
                                let delta = self.ring.mul(&factor, g);
                                let e = v.entry(*r).or_insert_with(|| self.ring.zero());
                                *e = self.ring.add(e, &delta);
                                if self.ring.is_zero(e) {
                                    v.remove(r);
                                }
                            }
                        }
                    }
                }
            }
        }
        self.survivors(j)
            .iter()
            .map(|i| v.get(i).cloned().unwrap_or_else(|| self.ring.zero()))
            .collect()
    }
}

/// Integral homology of one degree together with coordinates for cycles.
#[derive(Clone, Debug)]
struct IntegralDegree {
    group: HomologyGroup,
    /// `V⁻¹` of the reduced `D_i` and its rank
    v_inv: DenseMatrix,
    rank: usize,
    /// `P` from the SNF of the boundaries in kernel coordinates
    p: DenseMatrix,
    /// rows of `P·w` that carry homology, with their orders (0 = free)
    kept: Vec<(usize, Integer)>,
    /// generating cycles in reduced coordinates, one per kept row
    generators: Vec<Vec<Integer>>,
}

impl IntegralDegree {
    fn compute(d_i: &DenseMatrix, d_next: &DenseMatrix) -> IntegralDegree {
        let n = d_i.cols();
        let snf_d: Snf = smith_normal_form(d_i);
        let r = snf_d.rank;
        let k = snf_d.v.select_cols(r..n);
        // zero columns carry no boundaries
        let nonzero: Vec<usize> = (0..d_next.cols())
            .filter(|&c| (0..d_next.rows()).any(|i| !d_next[(i, c)].is_zero()))
            .collect();
        let d_next = d_next.select_cols(nonzero);
        let x = snf_d.v_inv.mul(&d_next).select_rows(r..n);
        debug_assert!(snf_d.v_inv.mul(&d_next).select_rows(0..r).is_zero());
        let snf_x = smith_normal_form(&x);
        let mut kept = Vec::new();
        let mut torsion = Vec::new();
        let mut free = 0;
        for l in 0..(n - r) {
            if l < snf_x.rank {
                let t = snf_x.diagonal[l].clone();
                if !t.is_one() {
                    torsion.push(t.clone());
                    kept.push((l, t));
                }
            } else {
                free += 1;
                kept.push((l, Integer::ZERO));
            }
        }
        let generators = kept
            .iter()
            .map(|(l, _)| k.mul_vec(&snf_x.u_inv.column(*l)))
            .collect();
        IntegralDegree {
            group: HomologyGroup {
                free_rank: free,
                torsion,
            },
            v_inv: snf_d.v_inv,
            rank: r,
            p: snf_x.u,
            kept,
            generators,
        }
    }

    /// Homology coordinates of a cycle in reduced coordinates.
    fn coordinates(&self, cycle: &[Integer]) -> Vec<Integer> {
        let w: Vec<Integer> = self.v_inv.mul_vec(cycle).split_off(self.rank);
        let y = self.p.mul_vec(&w);
        self.kept
            .iter()
            .map(|(l, t)| {
                if t.is_zero() {
                    y[*l].clone()
                } else {
                    y[*l].div_rem_euclid(t).1
                }
            })
            .collect()
    }

    fn orders(&self) -> Vec<Integer> {
        self.kept.iter().map(|(_, t)| t.clone()).collect()
    }
}

/// Homology data of a complex over one coefficient ring, computed once and
/// reused for every degree and every induced map.
pub struct HomologyEngine {
    coefficient: Coefficient,
    trusted_top: usize,
    top: usize,
    integral: Option<(Reduction<IntegerRing>, Vec<IntegralDegree>)>,
    modular: Option<Reduction<PrimeField>>,
}

impl HomologyEngine {
    pub fn new(c: &IntegerComplex, coefficient: Coefficient) -> HomologyEngine {
        let (integral, modular) = match coefficient {
            Coefficient::Z | Coefficient::Q => {
                let red = Reduction::new(IntegerRing, c);
                let degrees = (0..=red.top().min(c.trusted_top()))
                    .map(|i| {
                        let d_i = red.reduced_dense(i, Integer::clone);
                        let d_i = if i == 0 {
                            DenseMatrix::zeros(0, red.survivors(0).len())
                        } else {
                            d_i
                        };
                        let d_next = red.reduced_dense(i + 1, Integer::clone);
                        let d_next = if i + 1 > red.top() {
                            DenseMatrix::zeros(red.survivors(i).len(), 0)
                        } else {
                            d_next
                        };
                        IntegralDegree::compute(&d_i, &d_next)
                    })
                    .collect();
                (Some((red, degrees)), None)
            }
            Coefficient::Fp(p) => {
                let red = Reduction::new(PrimeField { p }, c);
                assert!(red.reduced_is_zero(), "field elimination left a nonzero entry");
                (None, Some(red))
            }
        };
        HomologyEngine {
            coefficient,
            trusted_top: c.trusted_top(),
            top: c.top(),
            integral,
            modular,
        }
    }

    pub fn coefficient(&self) -> Coefficient {
        self.coefficient
    }

    fn check(&self, i: usize) -> Result<()> {
        if i > self.trusted_top {
            Err(Error::UntrustedDegree {
                degree: i,
                d_max: self.top,
            })
        } else {
            Ok(())
        }
    }

    pub fn group(&self, i: usize) -> Result<HomologyGroup> {
        self.check(i)?;
        if i > self.top {
            return Ok(HomologyGroup::zero());
        }
        Ok(
        match self.coefficient {
            Coefficient::Z => self.integral.as_ref().unwrap().1[i].group.clone(),
            Coefficient::Q => HomologyGroup::free(self.integral.as_ref().unwrap().1[i].group.free_rank),
            Coefficient::Fp(_) => HomologyGroup::free(self.modular.as_ref().unwrap().survivors(i).len()),
        })
    }
}

pub fn homology(c: &IntegerComplex, i: usize, coefficient: Coefficient) -> Result<HomologyGroup> {
    c.check_trusted(i)?;
    HomologyEngine::new(c, coefficient).group(i)
}

/// Homomorphism `⊕ ℤ/aⱼ → ⊕ ℤ/bₗ` (order 0 meaning ℤ); `matrix[l][j]` is the
/// `l`-th coordinate of the image of the `j`-th source generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianHom {
    pub source_orders: Vec<Integer>,
    pub target_orders: Vec<Integer>,
    pub matrix: Vec<Vec<Integer>>,
}

impl AbelianHom {
    pub fn new(
        source_orders: Vec<Integer>,
        target_orders: Vec<Integer>,
        matrix: Vec<Vec<Integer>>,
    ) -> Result<AbelianHom> {
        if matrix.len() != target_orders.len()
            || matrix.iter().any(|row| row.len() != source_orders.len())
        {
            return Err(Error::Dimension("homomorphism matrix shape".into()));
        }
        let hom = AbelianHom {
            source_orders,
            target_orders,
            matrix,
        };
        // a generator of order a must map to an element killed by a
        for (j, a) in hom.source_orders.iter().enumerate() {
            for (l, b) in hom.target_orders.iter().enumerate() {
                let image = &hom.matrix[l][j] * a;
                let ok = if b.is_zero() {
                    image.is_zero()
                } else {
                    image.is_divisible_by(b)
                };
                if !ok {
                    return Err(Error::Invalid("homomorphism is not well defined".into()));
                }
            }
        }
        Ok(hom.reduced())
    }

    fn reduced(mut self) -> AbelianHom {
        for (l, b) in self.target_orders.iter().enumerate() {
            if !b.is_zero() {
                for x in self.matrix[l].iter_mut() {
                    *x = x.div_rem_euclid(b).1;
                }
            }
        }
        self
    }

    fn m(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.target_orders.len(), self.source_orders.len());
        for (l, row) in self.matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                d[(l, j)] = x.clone();
            }
        }
        d
    }

    fn relations(orders: &[Integer]) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(orders.len(), orders.len());
        for (i, o) in orders.iter().enumerate() {
            d[(i, i)] = o.clone();
        }
        d
    }

    pub fn is_surjective(&self) -> bool {
        let n_b = self.target_orders.len();
        let snf = smith_normal_form(&self.m().hcat(&Self::relations(&self.target_orders)));
        snf.rank == n_b && snf.diagonal[..n_b].iter().all(Integer::is_one)
    }

    pub fn is_injective(&self) -> bool {
        let n_a = self.source_orders.len();
        let system = self.m().hcat(&Self::relations(&self.target_orders));
        let kernel = integer_kernel(&system);
        (0..kernel.cols()).all(|c| {
            (0..n_a).all(|j| {
                let x = &kernel[(j, c)];
                let a = &self.source_orders[j];
                if a.is_zero() {
                    x.is_zero()
                } else {
                    x.is_divisible_by(a)
                }
            })
        })
    }

    /// Whether some `r` with `r ∘ f = id` exists.
    pub fn is_split_injective(&self) -> bool {
        let (n_a, n_b) = (self.source_orders.len(), self.target_orders.len());
        let m = self.m();
        (0..n_a).all(|j| {
            // unknowns: n_l (l < n_B), s_l (l < n_B), t_j' (j' < n_A)
            let a = &self.source_orders[j];
            let vars = 2 * n_b + n_a;
            let mut sys = DenseMatrix::zeros(n_b + n_a, vars);
            let mut rhs = vec![Integer::ZERO; n_b + n_a];
            for l in 0..n_b {
                sys[(l, l)] = self.target_orders[l].clone();
                sys[(l, n_b + l)] = -a;
            }
            for jp in 0..n_a {
                for l in 0..n_b {
                    sys[(n_b + jp, l)] = m[(l, jp)].clone();
                }
                sys[(n_b + jp, 2 * n_b + jp)] = -a;
                rhs[n_b + jp] = if jp == j { Integer::ONE } else { Integer::ZERO };
            }
            solve_integer(&sys, &rhs).is_some()
        })
    }

    /// Rank over ℚ of the free-to-free block.
    fn rational_rank(&self) -> usize {
        let rows: Vec<usize> = (0..self.target_orders.len())
            .filter(|&l| self.target_orders[l].is_zero())
            .collect();
        let cols: Vec<usize> = (0..self.source_orders.len())
            .filter(|&j| self.source_orders[j].is_zero())
            .collect();
        smith_normal_form(&self.m().select_rows(rows).select_cols(cols)).rank
    }

    pub fn compose(&self, first: &AbelianHom) -> Result<AbelianHom> {
        if first.target_orders != self.source_orders {
            return Err(Error::Dimension("composition of mismatched homomorphisms".into()));
        }
        let prod = self.m().mul(&first.m());
        AbelianHom::new(first.source_orders.clone(), self.target_orders.clone(), prod.to_rows())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MapFlags {
    pub iso: bool,
    pub surj: bool,
    pub inj: bool,
    pub split: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedHomologyMap {
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    /// integral presentation, present for ℤ coefficients
    pub hom: Option<AbelianHom>,
    /// matrix over the field for ℚ / 𝔽_p: rank data only
    pub field_rank: Option<usize>,
    pub flags: MapFlags,
}

impl InducedHomologyMap {
    pub fn from_hom(hom: AbelianHom) -> InducedHomologyMap {
        let group = |orders: &[Integer]| HomologyGroup {
            free_rank: orders.iter().filter(|o| o.is_zero()).count(),
            torsion: orders.iter().filter(|o| !o.is_zero()).cloned().collect(),
        };
        let inj = hom.is_injective();
        let surj = hom.is_surjective();
        let split = inj && hom.is_split_injective();
        InducedHomologyMap {
            source: group(&hom.source_orders),
            target: group(&hom.target_orders),
            flags: MapFlags {
                iso: inj && surj,
                surj,
                inj,
                split,
            },
            hom: Some(hom),
            field_rank: None,
        }
    }

    fn from_field(source: usize, target: usize, rank: usize) -> InducedHomologyMap {
        let inj = rank == source;
        let surj = rank == target;
        InducedHomologyMap {
            source: HomologyGroup::free(source),
            target: HomologyGroup::free(target),
            hom: None,
            field_rank: Some(rank),
            flags: MapFlags {
                iso: inj && surj,
                surj,
                inj,
                split: inj,
            },
        }
    }
}

fn rank_mod_p(rows: Vec<Vec<u64>>, p: u64) -> usize {
    let field = PrimeField { p };
    let mut rows = rows;
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = field.unit_inverse(&rows[rank][c]).unwrap();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let factor = field.neg(&field.mul(&rows[r][c], &inv));
                for cc in 0..cols {
                    let delta = field.mul(&factor, &rows[rank][cc]);
                    rows[r][cc] = field.add(&rows[r][cc], &delta);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The map `H_i(f)` between the homologies held by two engines.
pub fn induced_map(
    f: &ChainMap,
    source: &HomologyEngine,
    target: &HomologyEngine,
    i: usize,
) -> Result<InducedHomologyMap> {
    source.check(i)?;
    target.check(i)?;
    if source.coefficient != target.coefficient {
        return Err(Error::Invalid("engines over different rings".into()));
    }
    let fi = f.in_degree(i);
    match source.coefficient {
        Coefficient::Z | Coefficient::Q => {
            let (sr, sd) = source.integral.as_ref().unwrap();
            let (tr, td) = target.integral.as_ref().unwrap();
            let empty = |n: usize| IntegralDegree::compute(&DenseMatrix::zeros(0, 0), &DenseMatrix::zeros(0, n));
            let s_deg = if i <= source.top { sd[i].clone() } else { empty(0) };
            let t_deg = if i <= target.top { td[i].clone() } else { empty(0) };
            let columns: Vec<Vec<Integer>> = s_deg
                .generators
                .iter()
                .map(|g| match fi {
                    Some(fi) if i <= target.top => {
                        let original = sr.include(i, g);
                        let image = fi.apply(&original);
                        let reduced = tr.project(i, &image);
                        t_deg.coordinates(&reduced)
                    }
                    _ => vec![Integer::ZERO; t_deg.kept.len()],
                })
                .collect();
            let matrix: Vec<Vec<Integer>> = (0..t_deg.kept.len())
                .map(|l| columns.iter().map(|c| c[l].clone()).collect())
                .collect();
            let hom = AbelianHom::new(s_deg.orders(), t_deg.orders(), matrix)?;
            if source.coefficient == Coefficient::Z {
                Ok(InducedHomologyMap::from_hom(hom))
            } else {
                let rank = hom.rational_rank();
                Ok(InducedHomologyMap::from_field(
                    s_deg.group.free_rank,
                    t_deg.group.free_rank,
                    rank,
                ))
            }
        }
        Coefficient::Fp(p) => {
            let sr = source.modular.as_ref().unwrap();
            let tr = target.modular.as_ref().unwrap();
            let (ns, nt) = (sr.survivors(i).len(), tr.survivors(i).len());
            let field = PrimeField { p };
            let mut cols = Vec::with_capacity(ns);
            for pos in 0..ns {
                let mut unit = vec![0u64; ns];
                unit[pos] = 1;
                let original = sr.include(i, &unit);
                let col = match fi {
                    Some(fi) if i <= target.top => {
                        let mut image: SparseVec<u64> = SparseVec::new();
                        for (c, x) in &original {
                            for (r, a) in fi.column(*c) {
                                let delta = field.mul(&field.from_integer(a), x);
                                let e = image.entry(*r).or_insert(0);
                                *e = field.add(e, &delta);
                            }
                        }
                        image.retain(|_, v| *v != 0);
                        tr.project(i, &image)
                    }
                    _ => vec![0; nt],
                };
                cols.push(col);
            }
            let rows: Vec<Vec<u64>> = (0..nt).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
            Ok(InducedHomologyMap::from_field(ns, nt, rank_mod_p(rows, p)))
        }
    }
}

/// `dim H_i(C; 𝔽_p) = free_i + #{t ∈ tors_i : p | t} + #{t ∈ tors_{i−1} : p | t}`.
pub fn universal_coefficient_dimension(
    integral: &[HomologyGroup],
    i: usize,
    p: u64,
) -> usize {
    let count = |g: &HomologyGroup| g.torsion.iter().filter(|t| t.rem_u64(p) == 0).count();
    integral[i].free_rank
        + count(&integral[i])
        + if i > 0 { count(&integral[i - 1]) } else { 0 }
}
