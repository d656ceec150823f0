//! Labelled partial injections between finite sets of strands, the discrete
//! monodromy action they induce on tuples of a pointed set, and its
//! linearisation to a coefficient system.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeffsys::CoeffSystem;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::integer::Integer;
use crate::matrix::SparseMatrix;

/// How labels multiply along a composed strand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelOrder {
    /// `label(i) = label_ψ(φ(i)) · label_φ(i)`
    #[default]
    OuterFirst,
    /// `label(i) = label_φ(i) · label_ψ(φ(i))`
    InnerFirst,
}

/// A morphism `m → n`: a partial injection `{0..m} ⇀ {0..n}` whose defined
/// strands carry labels in `Q`. Strands are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledInjection {
    m: usize,
    n: usize,
    /// `pairs[i] = Some((φ(i), label))`
    pairs: Vec<Option<(usize, usize)>>,
}

impl LabeledInjection {
    pub fn new(m: usize, n: usize, pairs: Vec<Option<(usize, usize)>>) -> Result<Self> {
        if pairs.len() != m {
            return Err(Error::Dimension(format!("{} pairs for m = {m}", pairs.len())));
        }
        let mut hit = vec![false; n];
        for &(j, _) in pairs.iter().flatten() {
            if j >= n || hit[j] {
                return Err(Error::Invalid("not an injection".into()));
            }
            hit[j] = true;
        }
        Ok(LabeledInjection { m, n, pairs })
    }

    pub fn identity(n: usize) -> Self {
        LabeledInjection {
            m: n,
            n,
            pairs: (0..n).map(|i| Some((i, 0))).collect(),
        }
    }

    /// Trivially labelled total bijection `i ↦ perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        Self::new(perm.len(), perm.len(), perm.iter().map(|&j| Some((j, 0))).collect())
    }

    /// `{0..k} ↪ {0..k+1}`, missing the last strand.
    pub fn inclusion(k: usize) -> Self {
        LabeledInjection {
            m: k,
            n: k + 1,
            pairs: (0..k).map(|i| Some((i, 0))).collect(),
        }
    }

    pub fn source(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[Option<(usize, usize)>] {
        &self.pairs
    }

    pub fn is_total(&self) -> bool {
        self.pairs.iter().all(Option::is_some)
    }

    /// `self ⊔ id₁`: a new identity-labelled last strand.
    pub fn append_strand(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.push(Some((self.n, 0)));
        LabeledInjection {
            m: self.m + 1,
            n: self.n + 1,
            pairs,
        }
    }

    /// Every labelled partial injection `m → n` with labels in `0..q`.
    pub fn enumerate(m: usize, n: usize, q: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(m);
        let mut used = vec![false; n];
        fn rec(
            m: usize,
            n: usize,
            q: usize,
            current: &mut Vec<Option<(usize, usize)>>,
            used: &mut [bool],
            out: &mut Vec<LabeledInjection>,
        ) {
            if current.len() == m {
                out.push(LabeledInjection {
                    m,
                    n,
                    pairs: current.clone(),
                });
                return;
            }
            current.push(None);
            rec(m, n, q, current, used, out);
            current.pop();
            for j in 0..n {
                if used[j] {
                    continue;
                }
                used[j] = true;
                for a in 0..q {
                    current.push(Some((j, a)));
                    rec(m, n, q, current, used, out);
                    current.pop();
                }
                used[j] = false;
            }
        }
        rec(m, n, q, &mut current, &mut used, &mut out);
        out
    }
}

/// `ψ ∘ φ` for `φ: m → ℓ`, `ψ: ℓ → n`.
pub fn compose(
    q: &FiniteGroup,
    psi: &LabeledInjection,
    phi: &LabeledInjection,
    order: LabelOrder,
) -> Result<LabeledInjection> {
    if phi.n != psi.m {
        return Err(Error::ObjectMismatch(format!(
            "φ ends at {} but ψ starts at {}",
            phi.n, psi.m
        )));
    }
    let pairs = phi
        .pairs
        .iter()
        .map(|p| {
            let (j, a) = (*p)?;
            let (l, b) = psi.pairs[j]?;
            let label = match order {
                LabelOrder::OuterFirst => q.mul(b, a),
                LabelOrder::InnerFirst => q.mul(a, b),
            };
            Some((l, label))
        })
        .collect();
    Ok(LabeledInjection {
        m: phi.m,
        n: psi.n,
        pairs,
    })
}

/// The discrete shadow of the monodromy: a finite group `Q` with a sign
/// character, acting on a pointed set `Z` (basepoint `0`) together with a
/// pointed involution `ρ`.
#[derive(Clone, Debug)]
pub struct MonodromyModel {
    q: Arc<FiniteGroup>,
    sign: Vec<i8>,
    /// `action[a][z]`
    action: Vec<Vec<usize>>,
    rho: Vec<usize>,
    order: LabelOrder,
}

impl MonodromyModel {
    /// Under `OuterFirst` the table must be a right action,
    /// `action[b][action[a][z]] = action[ab][z]`; under `InnerFirst`, a left
    /// action. The two agree for abelian `Q`.
    pub fn new(
        q: Arc<FiniteGroup>,
        sign: Vec<i8>,
        action: Vec<Vec<usize>>,
        rho: Vec<usize>,
        order: LabelOrder,
    ) -> Result<Self> {
        let n = q.order();
        let z = rho.len();
        if z == 0 {
            return Err(Error::InvalidModel("Z needs a basepoint".into()));
        }
        if sign.len() != n || sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidModel("sign must assign ±1 to each element".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if sign[q.mul(a, b)] != sign[a] * sign[b] {
                    return Err(Error::InvalidModel("sign is not a homomorphism".into()));
                }
            }
        }
        if action.len() != n || action.iter().any(|row| row.len() != z || row.iter().any(|&x| x >= z)) {
            return Err(Error::InvalidModel("action table has the wrong shape".into()));
        }
        if rho.iter().any(|&x| x >= z) || (0..z).any(|x| rho[rho[x]] != x) {
            return Err(Error::InvalidModel("ρ is not an involution".into()));
        }
        if rho[0] != 0 || action.iter().any(|row| row[0] != 0) {
            return Err(Error::InvalidModel("ρ and the action must fix the basepoint".into()));
        }
        if action[0].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(Error::InvalidModel("the identity must act trivially".into()));
        }
        for a in 0..n {
            for b in 0..n {
                let ab = q.mul(a, b);
                for x in 0..z {
                    let ok = match order {
                        LabelOrder::OuterFirst => action[b][action[a][x]] == action[ab][x],
                        LabelOrder::InnerFirst => action[a][action[b][x]] == action[ab][x],
                    };
                    if !ok {
                        return Err(Error::InvalidModel("the table is not a group action".into()));
                    }
                }
            }
        }
        Ok(MonodromyModel {
            q,
            sign,
            action,
            rho,
            order,
        })
    }

    /// Trivial `Q`, trivial action.
    pub fn trivial(z: usize, rho: Vec<usize>) -> Result<Self> {
        let q = Arc::new(FiniteGroup::cyclic(1)?);
        Self::new(q, vec![1], vec![(0..z).collect()], rho, LabelOrder::OuterFirst)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.q
    }

    pub fn z_size(&self) -> usize {
        self.rho.len()
    }

    pub fn label_order(&self) -> LabelOrder {
        self.order
    }

    /// ρ commutes with every group element; without this, `act` is not
    /// functorial once signs are involved.
    pub fn is_strictly_compatible(&self) -> bool {
        self.action
            .iter()
            .all(|row| (0..self.z_size()).all(|x| row[self.rho[x]] == self.rho[row[x]]))
    }

    pub fn compose(&self, psi: &LabeledInjection, phi: &LabeledInjection) -> Result<LabeledInjection> {
        compose(&self.q, psi, phi, self.order)
    }

    /// Pulls a state over the target of `mu` back to its source:
    /// `ḡ_i = ρ^{[sign α_i = −1]}(α_i · g_{μ(i)})`, and the basepoint on
    /// strands outside the domain.
    pub fn act(&self, mu: &LabeledInjection, state: &[usize]) -> Result<Vec<usize>> {
        if state.len() != mu.n {
            return Err(Error::Dimension(format!(
                "state of length {} for a morphism into {}",
                state.len(),
                mu.n
            )));
        }
        if let Some(&x) = state.iter().find(|&&x| x >= self.z_size()) {
            return Err(Error::InvalidModel(format!("state entry {x} outside Z")));
        }
        if mu.pairs.iter().flatten().any(|&(_, a)| a >= self.q.order()) {
            return Err(Error::InvalidModel("label outside Q".into()));
        }
        Ok(mu
            .pairs
            .iter()
            .map(|p| match *p {
                None => 0,
                Some((j, a)) => {
                    let moved = self.action[a][state[j]];
                    if self.sign[a] < 0 {
                        self.rho[moved]
                    } else {
                        moved
                    }
                }
            })
            .collect())
    }

    /// `F(k) = ℤ[Z^k]` restricted to the braid category: `σ_j` swaps entries
    /// `j, j+1` and `I_k` fills the new strand with the basepoint.
    pub fn linearize(&self, k_max: usize) -> Result<CoeffSystem> {
        let z = self.z_size();
        let size = |k: usize| -> Result<usize> {
            (0..k).try_fold(1usize, |acc, _| {
                acc.checked_mul(z)
                    .filter(|&s| s <= crate::braid::DEFAULT_TUPLE_LIMIT as usize)
                    .ok_or(Error::ResourceBound {
                        what: "tuple space".into(),
                        needed: u128::MAX,
                        limit: crate::braid::DEFAULT_TUPLE_LIMIT,
                    })
            })
        };
        let decode = |k: usize, mut idx: usize| -> Vec<usize> {
            let mut t = vec![0; k];
            for slot in t.iter_mut().rev() {
                *slot = idx % z;
                idx /= z;
            }
            t
        };
        let encode = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * z + x);
        let mut ranks = Vec::new();
        let mut generators = Vec::new();
        for k in 0..=k_max {
            let n = size(k)?;
            ranks.push(n);
            let mut gens = Vec::new();
            for j in 0..k.saturating_sub(1) {
                let mut perm: Vec<usize> = (0..k).collect();
                perm.swap(j, j + 1);
                let mu = LabeledInjection::permutation(&perm)?;
                let triplets: Vec<_> = (0..n)
                    .map(|idx| {
                        let image = self.act(&mu, &decode(k, idx)).unwrap();
                        (encode(&image), idx, Integer::ONE)
                    })
                    .collect();
                gens.push(SparseMatrix::from_triplets(n, n, triplets));
            }
            generators.push(gens);
        }
        let inverses = generators.clone();
        let structure = (0..k_max)
            .map(|k| {
                let mu = LabeledInjection::new(k + 1, k, (0..k).map(|i| Some((i, 0))).chain([None]).collect())
                    .unwrap();
                let triplets: Vec<_> = (0..ranks[k])
                    .map(|idx| {
                        let image = self.act(&mu, &decode(k, idx)).unwrap();
                        (encode(&image), idx, Integer::ONE)
                    })
                    .collect();
                SparseMatrix::from_triplets(ranks[k + 1], ranks[k], triplets)
            })
            .collect();
        CoeffSystem::new(
            format!("monodromy(|Q|={}, |Z|={z})", self.q.order()),
            ranks,
            generators,
            inverses,
            structure,
        )
    }
}

/// JSON form of a model. The group table must have the identity at `0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromySpec {
    pub q_table: Vec<Vec<usize>>,
    pub sign: Vec<i8>,
    pub action: Vec<Vec<usize>>,
    pub rho: Vec<usize>,
    #[serde(default)]
    pub label_order: LabelOrder,
}

impl MonodromySpec {
    pub fn build(&self) -> Result<MonodromyModel> {
        let identity_first = self.q_table.first().is_some_and(|row| {
            row.iter().enumerate().all(|(i, &x)| i == x)
        });
        if !identity_first {
            return Err(Error::InvalidModel("element 0 of the table must be the identity".into()));
        }
        let q = Arc::new(FiniteGroup::from_table(self.q_table.clone())?);
        MonodromyModel::new(q, self.sign.clone(), self.action.clone(), self.rho.clone(), self.label_order)
    }
}

/// Counts of objects and checks in a functoriality run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorialityReport {
    pub associativity_checks: usize,
    pub functoriality_checks: usize,
    pub failures: BTreeMap<String, usize>,
}

impl FunctorialityReport {
    pub fn passed(&self) -> bool {
        self.failures.values().all(|&n| n == 0)
    }
}

/// Exhaustive associativity and unitality on small objects, then seeded
/// random triples for `act(ψ ∘ φ) = act(φ) ∘ act(ψ)`.
pub fn check_functoriality(model: &MonodromyModel, max_object: usize, triples: usize, seed: u64) -> FunctorialityReport {
    use rand::{Rng, SeedableRng};
    let q = model.group().order();
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    let mut bump = |key: &str, bad: bool| {
        *failures.entry(key.to_string()).or_default() += bad as usize;
    };
    let mut associativity_checks = 0;
    if q <= 2 {
        for m in 0..=max_object.min(3) {
            for l in 0..=max_object.min(3) {
                let phis = LabeledInjection::enumerate(m, l, q);
                for phi in &phis {
                    bump("unit", model.compose(&LabeledInjection::identity(l), phi).unwrap() != *phi);
                    bump("unit", model.compose(phi, &LabeledInjection::identity(m)).unwrap() != *phi);
                }
                for n in 0..=max_object.min(3) {
                    let psis = LabeledInjection::enumerate(l, n, q);
                    for p in 0..=max_object.min(2) {
                        let chis = LabeledInjection::enumerate(n, p, q);
                        for phi in &phis {
                            for psi in &psis {
                                let psi_phi = model.compose(psi, phi).unwrap();
                                for chi in &chis {
                                    associativity_checks += 1;
                                    let left = model.compose(chi, &psi_phi).unwrap();
                                    let right = model.compose(&model.compose(chi, psi).unwrap(), phi).unwrap();
                                    bump("associativity", left != right);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let random_injection = |m: usize, n: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut targets: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            targets.swap(i, rng.gen_range(0..=i));
        }
        let pairs = (0..m)
            .map(|i| {
                (i < n && rng.gen_bool(0.8)).then(|| (targets[i], rng.gen_range(0..q)))
            })
            .collect();
        LabeledInjection::new(m, n, pairs).unwrap()
    };
    for _ in 0..triples {
        let (m, l, n) = (
            rng.gen_range(0..=max_object),
            rng.gen_range(0..=max_object),
            rng.gen_range(0..=max_object),
        );
        let phi = random_injection(m, l, &mut rng);
        let psi = random_injection(l, n, &mut rng);
        let state: Vec<usize> = (0..n).map(|_| rng.gen_range(0..model.z_size())).collect();
        let direct = model.act(&model.compose(&psi, &phi).unwrap(), &state).unwrap();
        let stepwise = model.act(&phi, &model.act(&psi, &state).unwrap()).unwrap();
        bump("functoriality", direct != stepwise);
    }
    FunctorialityReport {
        associativity_checks,
        functoriality_checks: triples,
        failures,
    }
}
