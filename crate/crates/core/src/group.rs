//! Finite groups given by Cayley tables, and the conjugation-closed subsets
//! ("class sets") that label Hurwitz tuples.
//!
//! Element `0` is always the identity. Products are `mul(g, h) = table[g][h]`;
//! for permutation groups this is composition with `h` applied first, so in
//! S₃ `(1 2)·(1 3) = (1 3 2)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the group order for subgroup enumeration.
pub const SUBGROUP_ORDER_BOUND: usize = 48;
/// Groups up to this order also enumerate subgroups generated by three elements.
const THREE_GENERATOR_BOUND: usize = 24;
const EXHAUSTIVE_ASSOCIATIVITY_BOUND: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table, re-indexing so that the
    /// identity becomes element `0`.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let labels = (0..table.len()).map(|i| i.to_string()).collect();
        Self::from_table_labelled("table".to_string(), table, labels)
    }

    fn from_table_labelled(
        name: String,
        table: Vec<Vec<usize>>,
        labels: Vec<String>,
    ) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTable("table is not square".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidTable("entry out of range".into()));
        }
        for row in &table {
            if !is_permutation(row) {
                return Err(Error::InvalidTable("a row is not a permutation".into()));
            }
        }
        for col in 0..n {
            let column: Vec<usize> = table.iter().map(|row| row[col]).collect();
            if !is_permutation(&column) {
                return Err(Error::InvalidTable("a column is not a permutation".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;

        // swap the identity into slot 0
        let relabel = |x: usize| {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut flat = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b]);
            }
        }
        let mut labels = labels;
        labels.swap(0, identity);

        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| flat[a * n + b] == 0).expect("latin square");
        }
        let group = FiniteGroup {
            name,
            order: n,
            table: flat,
            inverse,
            labels,
        };
        group.check_associative()?;
        Ok(group)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        let ok = |a: usize, b: usize, c: usize| {
            self.table[self.table[a * n + b] * n + c] == self.table[a * n + self.table[b * n + c]]
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_BOUND {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !ok(a, b, c) {
                            return Err(Error::InvalidTable(format!(
                                "not associative at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !ok(a, b, c) {
                    return Err(Error::InvalidTable(format!(
                        "not associative at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The cyclic group ℤ/n with element `i` standing for `i mod n`.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Invalid("cyclic group needs n ≥ 1".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_table_labelled(format!("Z/{n}"), table, labels)
    }

    /// The dihedral group of order 2n; element `a + n·b` is `r^a s^b`.
    pub fn dihedral(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Invalid("dihedral group needs n ≥ 1".into()));
        }
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let ((a, b), (c, d)) = (decode(x), decode(y));
                        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        rot + n * ((b + d) % 2)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..2 * n)
            .map(|x| {
                let (a, b) = decode(x);
                match (a, b) {
                    (0, 0) => "e".to_string(),
                    (a, 0) => format!("r{a}"),
                    (0, _) => "s".to_string(),
                    (a, _) => format!("r{a}s"),
                }
            })
            .collect();
        Self::from_table_labelled(format!("D{n}"), table, labels)
    }

    /// The symmetric group on `n ≤ 6` letters, elements in lexicographic order
    /// of their one-line notation (so the identity comes first).
    pub fn symmetric(n: usize) -> Result<FiniteGroup> {
        if n == 0 || n > 6 {
            return Err(Error::Invalid("symmetric group supported for 1 ≤ n ≤ 6".into()));
        }
        let perms = all_permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| {
                        let gh: Vec<usize> = (0..n).map(|x| g[h[x]]).collect();
                        index(&gh)
                    })
                    .collect()
            })
            .collect();
        let labels = perms.iter().map(|p| cycle_notation(p)).collect();
        Self::from_table_labelled(format!("S{n}"), table, labels)
    }

    /// The quaternion group Q₈ = {±1, ±i, ±j, ±k}.
    pub fn quaternion() -> Result<FiniteGroup> {
        // unit index u in {1,i,j,k} and a sign bit: element = u + 4·sign
        let unit_mul = |u: usize, v: usize| -> (usize, bool) {
            match (u, v) {
                (0, w) | (w, 0) => (w, false),
                (a, b) if a == b => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (w, neg) = unit_mul(x % 4, y % 4);
                        let sign = (x / 4 + y / 4 + neg as usize) % 2;
                        w + 4 * sign
                    })
                    .collect()
            })
            .collect();
        let labels = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_table_labelled("Q8".to_string(), table, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    fn check(&self, g: usize) -> Result<()> {
        if g < self.order {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                index: g,
                order: self.order,
            })
        }
    }

    /// Checked product `g·h`.
    pub fn try_mul(&self, g: usize, h: usize) -> Result<usize> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Product `g·h`; indices must be in range.
    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inverse[g])
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Looks up an element by its label or by a descriptive name
    /// (`transposition`, `rotation`, `reflection`, `generator`).
    pub fn find_element(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == name) {
            return Some(i);
        }
        let wanted = match name {
            "transposition" if self.name.starts_with('S') => "(1 2)",
            "rotation" | "generator" if self.name.starts_with('D') => "r1",
            "reflection" if self.name.starts_with('D') => "s",
            "generator" if self.name.starts_with('Z') => "1",
            _ => return None,
        };
        self.labels.iter().position(|l| l == wanted)
    }

    /// The subgroup generated by `generators`, as a sorted element list.
    pub fn subgroup_closure(&self, generators: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order).filter(|&x| member[x]).collect()
    }

    /// All subgroups reachable as closures of generating sets of size ≤ 2
    /// (≤ 3 for order ≤ 24), deduplicated and sorted.
    pub fn subgroups(&self, bound: usize) -> Result<Vec<Vec<usize>>> {
        if self.order > bound {
            return Err(Error::GroupTooLarge {
                order: self.order,
                bound,
            });
        }
        let n = self.order;
        let mut found = BTreeSet::new();
        for a in 0..n {
            for b in a..n {
                found.insert(self.subgroup_closure(&[a, b]));
                if n <= THREE_GENERATOR_BOUND {
                    for c in b..n {
                        found.insert(self.subgroup_closure(&[a, b, c]));
                    }
                }
            }
        }
        Ok(found.into_iter().collect())
    }

    /// Partition of the group into conjugacy classes, ordered by least element.
    pub fn conjugacy_classes(self: &Arc<Self>) -> Vec<ClassSet> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let class = ClassSet::conjugacy_closure(self, &[g]).expect("non-empty");
            for &x in class.elements() {
                seen[x] = true;
            }
            classes.push(class);
        }
        classes
    }
}

fn is_permutation(values: &[usize]) -> bool {
    let mut seen = vec![false; values.len()];
    for &v in values {
        if v >= values.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                extend(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = p[x];
        }
        parts.push(format!("({})", cycle.join(" ")));
    }
    if parts.is_empty() {
        "()".to_string()
    } else {
        parts.concat()
    }
}

/// A non-empty, conjugation-closed subset of a finite group.
#[derive(Clone, Debug)]
pub struct ClassSet {
    group: Arc<FiniteGroup>,
    elements: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl PartialEq for ClassSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Eq for ClassSet {}

impl ClassSet {
    /// Smallest conjugation-closed superset of `seeds`.
    pub fn conjugacy_closure(group: &Arc<FiniteGroup>, seeds: &[usize]) -> Result<ClassSet> {
        if seeds.is_empty() {
            return Err(Error::InvalidClass("empty seed set".into()));
        }
        let mut member = vec![false; group.order()];
        let mut stack = Vec::new();
        for &s in seeds {
            group.check(s)?;
            if !member[s] {
                member[s] = true;
                stack.push(s);
            }
        }
        while let Some(x) = stack.pop() {
            for g in 0..group.order() {
                let y = group.conj(g, x);
                if !member[y] {
                    member[y] = true;
                    stack.push(y);
                }
            }
        }
        let elements: Vec<usize> = (0..group.order()).filter(|&x| member[x]).collect();
        Ok(Self::new_unchecked(group.clone(), elements))
    }

    /// Validates that `elements` is non-empty and already conjugation-closed.
    pub fn from_elements(group: &Arc<FiniteGroup>, elements: &[usize]) -> Result<ClassSet> {
        let closure = Self::conjugacy_closure(group, elements)?;
        let mut given: Vec<usize> = elements.to_vec();
        given.sort_unstable();
        given.dedup();
        if given != closure.elements {
            return Err(Error::InvalidClass(format!(
                "{given:?} is not closed under conjugation (closure {:?})",
                closure.elements
            )));
        }
        Ok(closure)
    }

    fn new_unchecked(group: Arc<FiniteGroup>, elements: Vec<usize>) -> ClassSet {
        let mut position = vec![None; group.order()];
        for (i, &x) in elements.iter().enumerate() {
            position[x] = Some(i);
        }
        ClassSet {
            group,
            elements,
            position,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.position.get(g).is_some_and(|p| p.is_some())
    }

    /// Position of `g` inside the sorted element list.
    pub fn position(&self, g: usize) -> Option<usize> {
        self.position.get(g).copied().flatten()
    }

    /// Every element commutes with the whole group.
    pub fn is_central(&self) -> bool {
        let g = &self.group;
        self.elements
            .iter()
            .all(|&c| (0..g.order()).all(|x| g.mul(c, x) == g.mul(x, c)))
    }

    /// `H ∩ c` is empty or a single `H`-conjugacy class for every subgroup `H`.
    pub fn is_non_splitting(&self) -> Result<bool> {
        self.is_non_splitting_with_bound(SUBGROUP_ORDER_BOUND)
    }

    pub fn is_non_splitting_with_bound(&self, bound: usize) -> Result<bool> {
        let g = &self.group;
        for h in g.subgroups(bound)? {
            let meet: Vec<usize> = h.iter().copied().filter(|&x| self.contains(x)).collect();
            let Some(&first) = meet.first() else { continue };
            let mut orbit: BTreeSet<usize> = BTreeSet::new();
            for &y in &h {
                orbit.insert(g.conj(y, first));
            }
            if orbit.len() != meet.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_inversion_closed(&self) -> bool {
        self.elements.iter().all(|&c| self.contains(self.group.inv(c)))
    }

    pub fn generates(&self) -> bool {
        self.group.subgroup_closure(&self.elements).len() == self.group.order()
    }

    /// Serializable description: group name plus element list.
    pub fn describe(&self) -> ClassDescription {
        ClassDescription {
            group: self.group.name().to_string(),
            elements: self.elements.clone(),
            labels: self
                .elements
                .iter()
                .map(|&e| self.group.label(e).to_string())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDescription {
    pub group: String,
    pub elements: Vec<usize>,
    pub labels: Vec<String>,
}
