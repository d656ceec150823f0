//! Coefficient systems on the braid category: modules `F(k)` with a braid
//! group action and structure maps `I_k: F(k) → F(k+1)`, the difference
//! operator `Δ`, and the degree recursion.
//!
//! Matrices act on column vectors. `generators[k][j]` is the action of
//! `σ_{j+1} ∈ B_k`, so a word acts by the product of its letters' matrices
//! taken left to right.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::{BraidWord, TupleSpace, DEFAULT_TUPLE_LIMIT};
use crate::error::{Error, Result};
use crate::group::ClassSet;
use crate::integer::Integer;
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::snf::smith_normal_form;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffSystem {
    pub name: String,
    k_max: usize,
    ranks: Vec<usize>,
    generators: Vec<Vec<SparseMatrix>>,
    inverses: Vec<Vec<SparseMatrix>>,
    structure: Vec<SparseMatrix>,
}

fn kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let triplets = a.triplets().flat_map(|(ra, ca, x)| {
        b.triplets()
            .map(move |(rb, cb, y)| (ra * b.rows() + rb, ca * b.cols() + cb, x * y))
    });
    SparseMatrix::from_triplets(
        a.rows() * b.rows(),
        a.cols() * b.cols(),
        triplets.collect::<Vec<_>>(),
    )
}

fn block_diag(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let triplets = a
        .triplets()
        .map(|(r, c, x)| (r, c, x.clone()))
        .chain(
            b.triplets()
                .map(|(r, c, x)| (a.rows() + r, a.cols() + c, x.clone())),
        );
    SparseMatrix::from_triplets(
        a.rows() + b.rows(),
        a.cols() + b.cols(),
        triplets.collect::<Vec<_>>(),
    )
}

fn permutation_matrix(images: &[u32]) -> SparseMatrix {
    let n = images.len();
    SparseMatrix::from_triplets(
        n,
        n,
        images
            .iter()
            .enumerate()
            .map(|(t, &i)| (i as usize, t, Integer::ONE)),
    )
}

impl CoeffSystem {
    /// Validates shapes, invertibility and the braid relations.
    pub fn new(
        name: impl Into<String>,
        ranks: Vec<usize>,
        generators: Vec<Vec<SparseMatrix>>,
        inverses: Vec<Vec<SparseMatrix>>,
        structure: Vec<SparseMatrix>,
    ) -> Result<CoeffSystem> {
        let t = Self::from_parts_unchecked(name, ranks, generators, inverses, structure)?;
        t.validate()?;
        Ok(t)
    }

    /// Checks only shapes; used for mutation testing.
    pub fn from_parts_unchecked(
        name: impl Into<String>,
        ranks: Vec<usize>,
        generators: Vec<Vec<SparseMatrix>>,
        inverses: Vec<Vec<SparseMatrix>>,
        structure: Vec<SparseMatrix>,
    ) -> Result<CoeffSystem> {
        if ranks.is_empty() {
            return Err(Error::Invalid("a coefficient system needs F(0)".into()));
        }
        let k_max = ranks.len() - 1;
        if generators.len() != ranks.len()
            || inverses.len() != ranks.len()
            || structure.len() != k_max
        {
            return Err(Error::Dimension("coefficient system arity".into()));
        }
        for k in 0..=k_max {
            if generators[k].len() != k.saturating_sub(1) || inverses[k].len() != generators[k].len()
            {
                return Err(Error::Dimension(format!("B_{k} needs {} generators", k.saturating_sub(1))));
            }
            for m in generators[k].iter().chain(&inverses[k]) {
                if m.rows() != ranks[k] || m.cols() != ranks[k] {
                    return Err(Error::Dimension(format!("generator on F({k})")));
                }
            }
            if k < k_max && (structure[k].rows() != ranks[k + 1] || structure[k].cols() != ranks[k]) {
                return Err(Error::Dimension(format!("structure map I_{k}")));
            }
        }
        Ok(CoeffSystem {
            name: name.into(),
            k_max,
            ranks,
            generators,
            inverses,
            structure,
        })
    }

    fn validate(&self) -> Result<()> {
        for k in 0..=self.k_max {
            let id = SparseMatrix::identity(self.ranks[k]);
            let g = &self.generators[k];
            for (a, b) in g.iter().zip(&self.inverses[k]) {
                if a.mul(b)? != id || b.mul(a)? != id {
                    return Err(Error::Invalid(format!("generator on F({k}) is not inverted")));
                }
            }
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    let ok = if j == i + 1 {
                        g[i].mul(&g[j])?.mul(&g[i])? == g[j].mul(&g[i])?.mul(&g[j])?
                    } else {
                        g[i].mul(&g[j])? == g[j].mul(&g[i])?
                    };
                    if !ok {
                        return Err(Error::Invalid(format!(
                            "braid relation fails for σ{} σ{} on F({k})",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks[k]
    }

    pub fn generator(&self, k: usize, j: usize) -> &SparseMatrix {
        &self.generators[k][j]
    }

    pub fn structure_map(&self, k: usize) -> &SparseMatrix {
        &self.structure[k]
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// `T(w)` for a word on `k` strands.
    pub fn act(&self, k: usize, w: &BraidWord) -> Result<SparseMatrix> {
        if w.strands() > k.max(1) {
            return Err(Error::StrandMismatch {
                strands: w.strands(),
                length: k,
            });
        }
        let mut m = SparseMatrix::identity(self.ranks[k]);
        for &l in w.letters() {
            let j = l.unsigned_abs() as usize - 1;
            let g = if l > 0 {
                &self.generators[k][j]
            } else {
                &self.inverses[k][j]
            };
            m = m.mul(g)?;
        }
        Ok(m)
    }

    /// `I_k^ℓ = I_{k+ℓ−1} ∘ ⋯ ∘ I_k`.
    pub fn iterated_structure(&self, k: usize, l: usize) -> Result<SparseMatrix> {
        let mut m = SparseMatrix::identity(self.ranks[k]);
        for step in k..k + l {
            m = self.structure[step].mul(&m)?;
        }
        Ok(m)
    }

    /// Keeps only `F(0..=k_max)`.
    pub fn truncate(&self, k_max: usize) -> CoeffSystem {
        let k_max = k_max.min(self.k_max);
        CoeffSystem {
            name: self.name.clone(),
            k_max,
            ranks: self.ranks[..=k_max].to_vec(),
            generators: self.generators[..=k_max].to_vec(),
            inverses: self.inverses[..=k_max].to_vec(),
            structure: self.structure[..k_max].to_vec(),
        }
    }

    pub fn zero(k_max: usize) -> CoeffSystem {
        Self::constant(0, k_max)
    }

    /// `F(k) = ℤ^r`, trivial action, identity structure maps.
    pub fn constant(r: usize, k_max: usize) -> CoeffSystem {
        let id = SparseMatrix::identity(r);
        CoeffSystem {
            name: format!("constant({r})"),
            k_max,
            ranks: vec![r; k_max + 1],
            generators: (0..=k_max).map(|k| vec![id.clone(); k.saturating_sub(1)]).collect(),
            inverses: (0..=k_max).map(|k| vec![id.clone(); k.saturating_sub(1)]).collect(),
            structure: vec![id; k_max],
        }
    }

    pub fn direct_sum(&self, other: &CoeffSystem) -> CoeffSystem {
        let k_max = self.k_max.min(other.k_max);
        CoeffSystem {
            name: format!("({} ⊕ {})", self.name, other.name),
            k_max,
            ranks: (0..=k_max).map(|k| self.ranks[k] + other.ranks[k]).collect(),
            generators: (0..=k_max)
                .map(|k| {
                    (0..k.saturating_sub(1))
                        .map(|j| block_diag(&self.generators[k][j], &other.generators[k][j]))
                        .collect()
                })
                .collect(),
            inverses: (0..=k_max)
                .map(|k| {
                    (0..k.saturating_sub(1))
                        .map(|j| block_diag(&self.inverses[k][j], &other.inverses[k][j]))
                        .collect()
                })
                .collect(),
            structure: (0..k_max)
                .map(|k| block_diag(&self.structure[k], &other.structure[k]))
                .collect(),
        }
    }

    /// Objectwise tensor product with the diagonal action.
    pub fn tensor(&self, other: &CoeffSystem) -> CoeffSystem {
        let k_max = self.k_max.min(other.k_max);
        CoeffSystem {
            name: format!("({} ⊗ {})", self.name, other.name),
            k_max,
            ranks: (0..=k_max).map(|k| self.ranks[k] * other.ranks[k]).collect(),
            generators: (0..=k_max)
                .map(|k| {
                    (0..k.saturating_sub(1))
                        .map(|j| kron(&self.generators[k][j], &other.generators[k][j]))
                        .collect()
                })
                .collect(),
            inverses: (0..=k_max)
                .map(|k| {
                    (0..k.saturating_sub(1))
                        .map(|j| kron(&self.inverses[k][j], &other.inverses[k][j]))
                        .collect()
                })
                .collect(),
            structure: (0..k_max)
                .map(|k| kron(&self.structure[k], &other.structure[k]))
                .collect(),
        }
    }
}

/// `F(k) = ℤ[c^k]` with Hurwitz permutation matrices, `I_k` appending `ĝ`.
pub fn build_hurwitz_system(c: &ClassSet, ghat: usize, k_max: usize) -> Result<CoeffSystem> {
    if !c.contains(ghat) {
        return Err(Error::StabiliserNotInClass(ghat));
    }
    let spaces: Vec<TupleSpace> = (0..=k_max)
        .map(|k| TupleSpace::new(c, k, DEFAULT_TUPLE_LIMIT))
        .collect::<Result<_>>()?;
    let ranks = spaces.iter().map(TupleSpace::size).collect();
    let mut generators = Vec::new();
    let mut inverses = Vec::new();
    for (k, space) in spaces.iter().enumerate() {
        let (mut g, mut inv) = (Vec::new(), Vec::new());
        for j in 0..k.saturating_sub(1) {
            let fwd: Vec<u32> = (0..space.size())
                .map(|t| space.apply_generator(t, j, true) as u32)
                .collect();
            let bwd: Vec<u32> = (0..space.size())
                .map(|t| space.apply_generator(t, j, false) as u32)
                .collect();
            g.push(permutation_matrix(&fwd));
            inv.push(permutation_matrix(&bwd));
        }
        generators.push(g);
        inverses.push(inv);
    }
    let structure = (0..k_max)
        .map(|k| {
            let s = &spaces[k];
            let triplets: Vec<_> = (0..s.size())
                .map(|t| (s.stabilize_index(t, ghat).unwrap(), t, Integer::ONE))
                .collect();
            SparseMatrix::from_triplets(spaces[k + 1].size(), s.size(), triplets)
        })
        .collect();
    CoeffSystem::new(
        format!("hurwitz({}, |c|={})", c.group().name(), c.len()),
        ranks,
        generators,
        inverses,
        structure,
    )
}

/// First failing check of the extension criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionWitness {
    /// `"a"`: `I_k T(α) = T(σ_k α) I_k`; `"b"`: `T(v_k^ℓ β) I_k^ℓ = I_k^ℓ`
    pub diagram: String,
    pub k: usize,
    pub l: usize,
    pub word: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub passed: bool,
    pub checks: usize,
    pub witness: Option<ExtensionWitness>,
}

/// Words tried per cell: every single letter and its inverse, then seeded
/// random words.
fn sample_words(strands: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<BraidWord> {
    let mut words = vec![BraidWord::identity(strands)];
    for i in 1..strands {
        words.push(BraidWord::generator(strands, i, true).unwrap());
        words.push(BraidWord::generator(strands, i, false).unwrap());
    }
    if strands >= 2 {
        use rand::Rng;
        for _ in 0..samples {
            let len = rng.gen_range(1..=8);
            words.push(BraidWord::random(strands, len, rng));
        }
    }
    words
}

pub fn check_extension(t: &CoeffSystem, l_max: usize, samples: usize, seed: u64) -> ExtensionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let fail = |diagram: &str, k: usize, l: usize, w: &BraidWord, checks: usize| ExtensionReport {
        passed: false,
        checks,
        witness: Some(ExtensionWitness {
            diagram: diagram.to_string(),
            k,
            l,
            word: w.letters().to_vec(),
        }),
    };
    // (a) the structure maps are B_k-equivariant
    for k in 0..t.k_max() {
        let i_k = t.structure_map(k);
        for w in sample_words(k.max(1), samples, &mut rng) {
            checks += 1;
            let lhs = i_k.mul(&t.act(k, &w).unwrap()).unwrap();
            let rhs = t.act(k + 1, &w).unwrap().mul(i_k).unwrap();
            if lhs != rhs {
                return fail("a", k, 1, &w, checks);
            }
        }
    }
    // (b) braids on the new strands fix the image of I_k^ℓ
    for l in 1..=l_max {
        for k in 0..=t.k_max().saturating_sub(l) {
            if k + l > t.k_max() {
                continue;
            }
            let il = t.iterated_structure(k, l).unwrap();
            for beta in sample_words(l, samples, &mut rng) {
                let w = beta.v_k_l(k);
                checks += 1;
                let lhs = t.act(k + l, &w).unwrap().mul(&il).unwrap();
                if lhs != il {
                    return fail("b", k, l, &beta, checks);
                }
            }
        }
    }
    ExtensionReport {
        passed: true,
        checks,
        witness: None,
    }
}

/// Systematically broken variants of a system (which should have `k_max ≥ 3`
/// and a rank ≥ 2 module at `k = 2`), each violating the extension criterion.
pub fn extension_mutants(t: &CoeffSystem) -> Vec<(String, CoeffSystem)> {
    let mut out = Vec::new();
    let rebuild = |g: Vec<Vec<SparseMatrix>>, inv: Vec<Vec<SparseMatrix>>, s: Vec<SparseMatrix>| {
        CoeffSystem::from_parts_unchecked(t.name.clone(), t.ranks.clone(), g, inv, s)
            .expect("shapes preserved")
    };

    let mut g = t.generators.clone();
    let mut inv = t.inverses.clone();
    g[2][0] = t.generators[2][0].transpose();
    inv[2][0] = t.inverses[2][0].transpose();
    out.push(("transposed σ1 on F(2)".to_string(), rebuild(g, inv, t.structure.clone())));

    let mut g = t.generators.clone();
    let mut inv = t.inverses.clone();
    std::mem::swap(&mut g[2][0], &mut inv[2][0]);
    out.push(("inverted σ1 on F(2)".to_string(), rebuild(g, inv, t.structure.clone())));

    let mut s = t.structure.clone();
    let rows = s[2].rows();
    let last: Vec<_> = s[2].triplets().map(|(r, c, x)| ((r + 1) % rows, c, x.clone())).collect();
    s[2] = SparseMatrix::from_triplets(rows, s[2].cols(), last);
    out.push((
        "I_2 shifted by one basis vector".to_string(),
        rebuild(t.generators.clone(), t.inverses.clone(), s),
    ));

    let mut s = t.structure.clone();
    let flipped: Vec<_> = s[2]
        .triplets()
        .map(|(r, c, x)| (r, c, if c == 1 { -x } else { x.clone() }))
        .collect();
    s[2] = SparseMatrix::from_triplets(s[2].rows(), s[2].cols(), flipped);
    out.push((
        "sign flip on one column of I_2".to_string(),
        rebuild(t.generators.clone(), t.inverses.clone(), s),
    ));

    let mut g = t.generators.clone();
    let mut inv = t.inverses.clone();
    let n = t.ranks[3];
    let swap01 = SparseMatrix::from_triplets(
        n,
        n,
        (0..n).map(|i| {
            let j = match i {
                0 => 1,
                1 => 0,
                x => x,
            };
            (j, i, Integer::ONE)
        }),
    );
    g[3][1] = swap01.mul(&g[3][1]).unwrap();
    inv[3][1] = inv[3][1].mul(&swap01).unwrap();
    out.push(("σ2 on F(3) composed with a basis swap".to_string(), rebuild(g, inv, t.structure.clone())));
    out
}

/// How `Δ` split off the image of each structure map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    /// the canonical retraction commutes with the braid actions and the
    /// shifted structure maps
    Natural,
    ObjectwiseOnly,
}

/// Cokernel data for one structure map: `p` projects onto the cokernel,
/// `l` lifts back, `r` retracts onto `F(k)`.
struct Cokernel {
    p: SparseMatrix,
    l: SparseMatrix,
    r: SparseMatrix,
}

/// Columns with one ±1 entry each on distinct rows.
fn signed_inclusion(m: &SparseMatrix) -> Option<Vec<(usize, Integer)>> {
    let mut seen = vec![false; m.rows()];
    let mut out = Vec::with_capacity(m.cols());
    for c in 0..m.cols() {
        let col = m.column(c);
        if col.len() != 1 || !col[0].1.is_unit() || seen[col[0].0] {
            return None;
        }
        seen[col[0].0] = true;
        out.push(col[0].clone());
    }
    Some(out)
}

fn cokernel(m: &SparseMatrix, k: usize) -> Result<Cokernel> {
    let (rows, cols) = (m.rows(), m.cols());
    if let Some(images) = signed_inclusion(m) {
        let mut hit = vec![false; rows];
        for (r, _) in &images {
            hit[*r] = true;
        }
        let complement: Vec<usize> = (0..rows).filter(|&r| !hit[r]).collect();
        let p = SparseMatrix::from_triplets(
            complement.len(),
            rows,
            complement.iter().enumerate().map(|(i, &r)| (i, r, Integer::ONE)),
        );
        let l = p.transpose();
        let r = SparseMatrix::from_triplets(
            cols,
            rows,
            images.iter().enumerate().map(|(c, (row, s))| (c, *row, s.clone())),
        );
        return Ok(Cokernel { p, l, r });
    }
    let snf = smith_normal_form(&m.to_dense());
    if snf.rank < cols {
        return Err(Error::NotInjective { k });
    }
    if snf.diagonal.iter().any(|d| !d.is_one()) {
        return Err(Error::TorsionCokernel { k });
    }
    let p = SparseMatrix::from_dense(&snf.u.select_rows(cols..rows));
    let l = SparseMatrix::from_dense(&snf.u_inv.select_cols(cols..rows));
    // r = V · [I 0] · U
    let r = SparseMatrix::from_dense(&snf.v.mul(&snf.u.select_rows(0..cols)));
    Ok(Cokernel { p, l, r })
}

/// `(ΔT)(k) = coker(I_k)` for `k < k_max`, with the induced action of `B_k`
/// (through `B_k ⊆ B_{k+1}`) and structure maps induced by
/// `T(σ_{k+1}) ∘ I_{k+1}`.
pub fn delta(t: &CoeffSystem) -> Result<(CoeffSystem, SplitKind)> {
    if t.k_max == 0 {
        return Err(Error::RangeExhausted(format!("{} has no structure maps", t.name)));
    }
    let cokernels: Vec<Cokernel> = (0..t.k_max)
        .into_par_iter()
        .map(|k| cokernel(&t.structure[k], k))
        .collect::<Result<_>>()?;
    let new_max = t.k_max - 1;
    let mut generators = Vec::new();
    let mut inverses = Vec::new();
    for k in 0..=new_max {
        let ck = &cokernels[k];
        let induce = |a: &SparseMatrix| ck.p.mul(a).unwrap().mul(&ck.l).unwrap();
        generators.push(
            (0..k.saturating_sub(1))
                .map(|j| induce(&t.generators[k + 1][j]))
                .collect(),
        );
        inverses.push(
            (0..k.saturating_sub(1))
                .map(|j| induce(&t.inverses[k + 1][j]))
                .collect(),
        );
    }
    let shifted = |k: usize| -> SparseMatrix {
        // T(σ_{k+1}) I_{k+1}: F(k+1) → F(k+2)
        t.generators[k + 2][k].mul(&t.structure[k + 1]).unwrap()
    };
    let structure: Vec<SparseMatrix> = (0..new_max)
        .map(|k| {
            cokernels[k + 1]
                .p
                .mul(&shifted(k))
                .unwrap()
                .mul(&cokernels[k].l)
                .unwrap()
        })
        .collect();
    let ranks = cokernels.iter().map(|c| c.p.rows()).collect();

    let natural = (0..t.k_max).all(|k| {
        let r = &cokernels[k].r;
        let equivariant = (0..k.saturating_sub(1)).all(|j| {
            r.mul(&t.generators[k + 1][j]).unwrap() == t.generators[k][j].mul(r).unwrap()
        });
        let compatible = k + 1 >= t.k_max || {
            let lhs = cokernels[k + 1].r.mul(&shifted(k)).unwrap();
            let rhs = t.structure[k].mul(r).unwrap();
            lhs == rhs
        };
        equivariant && compatible
    });
    let system = CoeffSystem::new(
        format!("Δ{}", t.name),
        ranks,
        generators,
        inverses,
        structure,
    )?;
    Ok((
        system,
        if natural {
            SplitKind::Natural
        } else {
            SplitKind::ObjectwiseOnly
        },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeValue {
    Finite(i64),
    AboveCutoff(usize),
    /// `Δ^{stage}` needed a cokernel of a structure map that is not free
    NotSplit { stage: usize, k: usize },
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeValue::Finite(d) => write!(f, "{d}"),
            DegreeValue::AboveCutoff(c) => write!(f, ">{c}"),
            DegreeValue::NotSplit { stage, k } => {
                write!(f, "not split at Δ^{stage} (k={k}), degree undefined at this stage")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub system: String,
    pub degree: DegreeValue,
    /// `rank_trace[d][k] = rank (Δ^d T)(k)`
    pub rank_trace: Vec<Vec<usize>>,
    /// how each `Δ` step split, `split_kinds[d]` for `Δ^{d+1}`
    pub split_kinds: Vec<SplitKind>,
    /// degrees are relative to the modules `F(0..=max_k_consulted)`
    pub max_k_consulted: usize,
}

/// Iterates `Δ` until the zero system appears or `Δ^{cutoff+1}T ≠ 0`.
pub fn degree(t: &CoeffSystem, cutoff: usize) -> Result<DegreeReport> {
    let mut current = t.clone();
    let mut trace = vec![current.ranks.clone()];
    let mut kinds = Vec::new();
    for d in 0..=cutoff + 1 {
        if current.is_zero() {
            return Ok(DegreeReport {
                system: t.name.clone(),
                degree: DegreeValue::Finite(d as i64 - 1),
                rank_trace: trace,
                split_kinds: kinds,
                max_k_consulted: t.k_max,
            });
        }
        if d == cutoff + 1 {
            break;
        }
        if current.k_max == 0 {
            return Err(Error::RangeExhausted(format!(
                "Δ^{} of {} needs k_max ≥ {}",
                d + 1,
                t.name,
                cutoff + 1
            )));
        }
        let (next, kind) = match delta(&current) {
            Ok(x) => x,
            Err(Error::NotInjective { k } | Error::TorsionCokernel { k }) => {
                return Ok(DegreeReport {
                    system: t.name.clone(),
                    degree: DegreeValue::NotSplit { stage: d + 1, k },
                    rank_trace: trace,
                    split_kinds: kinds,
                    max_k_consulted: t.k_max,
                });
            }
            Err(e) => return Err(e),
        };
        kinds.push(kind);
        trace.push(next.ranks.clone());
        current = next;
    }
    Ok(DegreeReport {
        system: t.name.clone(),
        degree: DegreeValue::AboveCutoff(cutoff),
        rank_trace: trace,
        split_kinds: kinds,
        max_k_consulted: t.k_max,
    })
}

/// One summand `ℤ^rank` (plus torsion, which the Künneth construction
/// refuses) in the given degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSummand {
    pub degree: usize,
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedModule {
    pub summands: Vec<GradedSummand>,
}

impl GradedModule {
    /// Free module with `ranks[d]` generators in degree `d`.
    pub fn free(ranks: &[usize]) -> GradedModule {
        GradedModule {
            summands: ranks
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > 0)
                .map(|(d, &r)| GradedSummand {
                    degree: d,
                    rank: r,
                    torsion: Vec::new(),
                })
                .collect(),
        }
    }

    /// `H_*(S¹)`.
    pub fn circle() -> GradedModule {
        Self::free(&[1, 1])
    }

    /// Degrees of the basis elements, sorted by degree.
    fn basis_degrees(&self) -> Result<Vec<usize>> {
        if self.summands.iter().any(|s| !s.torsion.is_empty()) {
            return Err(Error::InvalidGraded("torsion summands are not supported".into()));
        }
        let mut by_degree: BTreeMap<usize, usize> = BTreeMap::new();
        for s in &self.summands {
            *by_degree.entry(s.degree).or_default() += s.rank;
        }
        Ok(by_degree
            .into_iter()
            .flat_map(|(d, r)| std::iter::repeat_n(d, r))
            .collect())
    }

    pub fn rank_in_degree(&self, d: usize) -> usize {
        self.summands
            .iter()
            .filter(|s| s.degree == d)
            .map(|s| s.rank)
            .sum()
    }
}

/// Degree-`i` part of `HY ⊗ HZ^{⊗k}` with the Koszul-signed swap action.
///
/// `cz` is an automorphism of `HZ` (square over its basis, degree
/// preserving, fixing the unit); `None` means the identity. Generator
/// `σ_j` sends `a ⊗ b` in slots `j, j+1` to `(−1)^{|a||b|} cZ(b) ⊗ a`.
pub fn build_kunneth_system(
    hy: &GradedModule,
    hz: &GradedModule,
    i: usize,
    k_max: usize,
    cz: Option<&DenseMatrix>,
) -> Result<CoeffSystem> {
    let y_deg = hy.basis_degrees()?;
    let z_deg = hz.basis_degrees()?;
    if hz.rank_in_degree(0) != 1 {
        return Err(Error::InvalidGraded(
            "HZ must have rank one in degree zero".into(),
        ));
    }
    let nz = z_deg.len();
    let cz = match cz {
        Some(m) => m.clone(),
        None => DenseMatrix::identity(nz),
    };
    if cz.rows() != nz || cz.cols() != nz {
        return Err(Error::InvalidGraded("cZ has the wrong size".into()));
    }
    for r in 0..nz {
        for c in 0..nz {
            if !cz[(r, c)].is_zero() && z_deg[r] != z_deg[c] {
                return Err(Error::InvalidGraded("cZ does not preserve degrees".into()));
            }
        }
    }
    if (0..nz).any(|r| cz[(r, 0)] != if r == 0 { Integer::ONE } else { Integer::ZERO }) {
        return Err(Error::InvalidGraded("cZ must fix the unit".into()));
    }
    let cz_snf = smith_normal_form(&cz);
    if cz_snf.rank < nz || cz_snf.diagonal.iter().any(|d| !d.is_one()) {
        return Err(Error::InvalidGraded("cZ is not invertible over the integers".into()));
    }
    // cZ^{-1} = V · U since U cZ V = I
    let cz_inv = cz_snf.v.mul(&cz_snf.u);

    // basis of F_i(k): (y, z_1..z_k) with total degree i, lexicographic
    let bases: Vec<Vec<Vec<usize>>> = (0..=k_max)
        .map(|k| {
            let mut out = Vec::new();
            let mut current = Vec::with_capacity(k + 1);
            fn rec(
                slots: usize,
                remaining: usize,
                y_deg: &[usize],
                z_deg: &[usize],
                current: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if current.len() == slots + 1 {
                    if remaining == 0 {
                        out.push(current.clone());
                    }
                    return;
                }
                let degs = if current.is_empty() { y_deg } else { z_deg };
                for (idx, &d) in degs.iter().enumerate() {
                    if d <= remaining {
                        current.push(idx);
                        rec(slots, remaining - d, y_deg, z_deg, current, out);
                        current.pop();
                    }
                }
            }
            rec(k, i, &y_deg, &z_deg, &mut current, &mut out);
            out
        })
        .collect();
    let index: Vec<BTreeMap<Vec<usize>, usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(n, t)| (t.clone(), n)).collect())
        .collect();

    let swap_matrix = |k: usize, j: usize, forward: bool| -> SparseMatrix {
        let n = bases[k].len();
        let mut triplets = Vec::new();
        for (col, t) in bases[k].iter().enumerate() {
            // z-slots j, j+1 live at tuple positions j+1, j+2
            let (a, b) = (t[j + 1], t[j + 2]);
            let sign = if (z_deg[a] * z_deg[b]) % 2 == 0 { 1 } else { -1 };
            if forward {
                // a ⊗ b ↦ ± cZ(b) ⊗ a
                for bp in 0..nz {
                    let coeff = &cz[(bp, b)];
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut img = t.clone();
                    img[j + 1] = bp;
                    img[j + 2] = a;
                    triplets.push((index[k][&img], col, coeff * &Integer::from(sign)));
                }
            } else {
                // a ⊗ b ↦ ± b ⊗ cZ⁻¹(a)
                for ap in 0..nz {
                    let coeff = &cz_inv[(ap, a)];
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut img = t.clone();
                    img[j + 1] = b;
                    img[j + 2] = ap;
                    triplets.push((index[k][&img], col, coeff * &Integer::from(sign)));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, triplets)
    };
    let generators = (0..=k_max)
        .map(|k| (0..k.saturating_sub(1)).map(|j| swap_matrix(k, j, true)).collect())
        .collect();
    let inverses = (0..=k_max)
        .map(|k| (0..k.saturating_sub(1)).map(|j| swap_matrix(k, j, false)).collect())
        .collect();
    let structure = (0..k_max)
        .map(|k| {
            let triplets: Vec<_> = bases[k]
                .iter()
                .enumerate()
                .map(|(col, t)| {
                    let mut img = t.clone();
                    img.push(0);
                    (index[k + 1][&img], col, Integer::ONE)
                })
                .collect();
            SparseMatrix::from_triplets(bases[k + 1].len(), bases[k].len(), triplets)
        })
        .collect();
    CoeffSystem::new(
        format!("kunneth(i={i})"),
        bases.iter().map(Vec::len).collect(),
        generators,
        inverses,
        structure,
    )
}

/// JSON description of a synthetic Künneth system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KunnethSpec {
    pub hy: GradedModule,
    pub hz: GradedModule,
    pub i: usize,
    pub k_max: usize,
    #[serde(default)]
    pub cz: Option<Vec<Vec<i64>>>,
}

impl KunnethSpec {
    pub fn build(&self) -> Result<CoeffSystem> {
        let cz = self.cz.as_ref().map(|rows| DenseMatrix::from_rows(rows));
        build_kunneth_system(&self.hy, &self.hz, self.i, self.k_max, cz.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use std::sync::Arc;

    fn binomial(n: usize, r: usize) -> usize {
        if r > n {
            return 0;
        }
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn s3_system(k_max: usize) -> CoeffSystem {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let t = g.find_element("transposition").unwrap();
        let c = ClassSet::conjugacy_closure(&g, &[t]).unwrap();
        build_hurwitz_system(&c, t, k_max).unwrap()
    }

    fn central_system(k_max: usize) -> CoeffSystem {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let c = ClassSet::conjugacy_closure(&g, &[1]).unwrap();
        build_hurwitz_system(&c, 1, k_max).unwrap()
    }

    #[test]
    fn hurwitz_system_shapes() {
        let t = central_system(5);
        assert_eq!(t.ranks(), &[1; 6]);
        for k in 0..5 {
            assert_eq!(t.structure_map(k), &SparseMatrix::identity(1));
        }
        let t = s3_system(4);
        assert_eq!(t.ranks(), &[1, 3, 9, 27, 81]);
        let g = t.generator(2, 0);
        assert_eq!(g.nnz(), 9);
        assert!((0..9).all(|c| g.column(c).len() == 1));
        let g0 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let c = ClassSet::conjugacy_closure(&g0, &[1]).unwrap();
        assert!(build_hurwitz_system(&c, 0, 3).is_err());
    }

    #[test]
    fn extension_criterion_on_hurwitz_systems() {
        assert!(check_extension(&central_system(5), 3, 20, 1).passed);
        let r = check_extension(&s3_system(5), 3, 20, 1);
        assert!(r.passed, "{r:?}");
        for (name, m) in extension_mutants(&s3_system(5)) {
            let r = check_extension(&m, 3, 20, 1);
            assert!(!r.passed, "{name} passed");
            assert!(r.witness.is_some());
        }
    }

    #[test]
    fn delta_examples() {
        let (d, _) = delta(&CoeffSystem::constant(1, 4)).unwrap();
        assert!(d.is_zero());
        let (d, kind) = delta(&s3_system(5)).unwrap();
        let expected: Vec<usize> = (0..5).map(|k| 2 * 3usize.pow(k as u32)).collect();
        assert_eq!(d.ranks(), &expected[..]);
        assert_eq!(kind, SplitKind::Natural);
        // F(k) = ℤ^k with the permutation action: Δ is constant ℤ
        let z1 = build_kunneth_system(&GradedModule::free(&[1]), &GradedModule::circle(), 1, 6, None)
            .unwrap();
        let (d, _) = delta(&z1).unwrap();
        assert_eq!(d.ranks(), &[1; 6]);
        assert_eq!(degree(&d, 3).unwrap().degree, DegreeValue::Finite(0));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree(&CoeffSystem::zero(3), 2).unwrap().degree, DegreeValue::Finite(-1));
        assert_eq!(degree(&central_system(5), 3).unwrap().degree, DegreeValue::Finite(0));
        let r = degree(&s3_system(6), 4).unwrap();
        assert!(r.split_kinds.iter().all(|&s| s == SplitKind::Natural));
        assert_eq!(r.degree, DegreeValue::AboveCutoff(4));
        let expected: Vec<usize> = (0..6).map(|k| 2 * 3usize.pow(k as u32)).collect();
        assert_eq!(r.rank_trace[1], expected);
    }

    #[test]
    fn kunneth_ranks_and_degrees() {
        let hy = GradedModule::free(&[1]);
        let hz = GradedModule::circle();
        for i in 0..=3 {
            let t = build_kunneth_system(&hy, &hz, i, 8, None).unwrap();
            let ranks: Vec<usize> = (0..=8).map(|k| binomial(k, i)).collect();
            assert_eq!(t.ranks(), &ranks[..]);
            assert!(check_extension(&t, 3, 10, 3).passed);
            let r = degree(&t, 5).unwrap();
            assert_eq!(r.degree, DegreeValue::Finite(i as i64));
            assert!(r.split_kinds.iter().all(|&s| s == SplitKind::Natural));
        }
        let t2 = build_kunneth_system(&hy, &hz, 2, 4, None).unwrap();
        // Koszul sign: σ₁ on z₁⊗z₁⊗1 is −1
        let basis_11 = (0..t2.rank(3))
            .find(|&c| t2.structure_map(2).column(0)[0].0 == c)
            .unwrap();
        assert_eq!(t2.generator(3, 0).get(basis_11, basis_11), Integer::from(-1));
    }

    #[test]
    fn non_split_structure_maps_stop_the_recursion() {
        let twice = SparseMatrix::from_triplets(1, 1, [(0, 0, Integer::from(2))]);
        let t = CoeffSystem::new(
            "doubling",
            vec![1, 1],
            vec![vec![], vec![]],
            vec![vec![], vec![]],
            vec![twice],
        )
        .unwrap();
        assert!(matches!(delta(&t), Err(Error::TorsionCokernel { k: 0 })));
        assert_eq!(
            degree(&t, 2).unwrap().degree,
            DegreeValue::NotSplit { stage: 1, k: 0 }
        );
        let zero = SparseMatrix::zeros(1, 1);
        let t = CoeffSystem::new("zero map", vec![1, 1], vec![vec![], vec![]], vec![vec![], vec![]], vec![zero])
            .unwrap();
        assert!(matches!(delta(&t), Err(Error::NotInjective { k: 0 })));
    }

    #[test]
    fn kunneth_rejections() {
        let hy = GradedModule::free(&[1]);
        assert!(build_kunneth_system(&hy, &GradedModule::free(&[2, 1]), 1, 3, None).is_err());
        let torsion = GradedModule {
            summands: vec![GradedSummand {
                degree: 0,
                rank: 1,
                torsion: vec![2],
            }],
        };
        assert!(build_kunneth_system(&hy, &torsion, 1, 3, None).is_err());
        let bad_cz = DenseMatrix::from_rows(&[vec![1, 0], vec![0, 2]]);
        assert!(build_kunneth_system(&hy, &GradedModule::circle(), 1, 3, Some(&bad_cz)).is_err());
        let neg = DenseMatrix::from_rows(&[vec![1, 0], vec![0, -1]]);
        let t = build_kunneth_system(&hy, &GradedModule::circle(), 1, 5, Some(&neg)).unwrap();
        assert!(check_extension(&t, 3, 10, 3).passed);
    }

    #[test]
    fn sums_and_products() {
        let a = central_system(4);
        let b = CoeffSystem::constant(2, 4);
        assert_eq!(a.direct_sum(&b).ranks(), &[3; 5]);
        assert_eq!(a.tensor(&b).ranks(), &[2; 5]);
        let s = s3_system(3);
        assert!(check_extension(&s.tensor(&b), 2, 5, 9).passed);
        assert!(check_extension(&s.direct_sum(&a.truncate(3)), 2, 5, 9).passed);
    }
}
