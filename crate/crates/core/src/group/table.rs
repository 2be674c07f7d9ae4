use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// A finite group materialized as an explicit multiplication table.
///
/// Elements are numbered in breadth-first order from the identity along the
/// generators, so element 0 is always the identity and every element carries
/// a word in the generators (`word`).
#[derive(Clone, Debug)]
pub struct GroupTable<E> {
    elements: Vec<E>,
    index: HashMap<E, usize>,
    mul: Vec<u32>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    // (parent, generator slot): element = parent * generator
    parent: Vec<Option<(usize, usize)>>,
}

impl<E: Clone + Eq + Hash> GroupTable<E> {
    /// Closes `gens` under `op`. `limit` caps the group size to guard against
    /// runaway closures.
    pub fn generate(
        identity: E,
        gens: &[E],
        op: impl Fn(&E, &E) -> E,
        limit: usize,
    ) -> Option<Self> {
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut parent = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let x = op(&elements[i], g);
                if !index.contains_key(&x) {
                    if elements.len() == limit {
                        return None;
                    }
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                    parent.push(Some((i, s)));
                }
            }
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let x = op(&elements[i], &elements[j]);
                mul[i * n + j] = *index.get(&x)? as u32;
            }
        }
        let inverse = (0..n)
            .map(|i| (0..n).find(|&j| mul[i * n + j] == 0))
            .collect::<Option<Vec<_>>>()?;
        let generators = gens.iter().map(|g| index[g]).collect();
        Some(GroupTable {
            elements,
            index,
            mul,
            inverse,
            generators,
            parent,
        })
    }

    pub fn index_of(&self, x: &E) -> Option<usize> {
        self.index.get(x).copied()
    }
}

impl<E> GroupTable<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.order() + j] as usize
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Table indices of the generators, in the order they were supplied.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Expression of element `i` as a product of generators: a list of
    /// generator slots to multiply on the right, starting from the identity.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while let Some((p, s)) = self.parent[i] {
            w.push(s);
            i = p;
        }
        w.reverse();
        w
    }

    /// `(parent, generator slot)` for every non-identity element, in table order.
    pub fn spanning_tree(&self) -> &[Option<(usize, usize)>] {
        &self.parent
    }

    pub fn power(&self, i: usize, mut e: u64) -> usize {
        let (mut base, mut acc) = (i, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&z| (0..self.order()).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Sorted list of elements of the subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    pub fn is_normal(&self, sub: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &h in sub {
            member[h] = true;
        }
        (0..self.order()).all(|g| {
            let gi = self.inverse(g);
            sub.iter().all(|&h| member[self.mul(self.mul(g, h), gi)])
        })
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let mut comms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(
                    self.mul(a, b),
                    self.mul(self.inverse(a), self.inverse(b)),
                );
                comms.push(c);
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.subgroup_generated(&comms)
    }

    /// All subgroups generated by at most two elements, deduplicated.
    pub fn two_generated_subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            for b in a..n {
                let s = self.subgroup_generated(&[a, b]);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort_by_key(|s| (s.len(), s.clone()));
        out
    }

    /// Checks that the stored table is associative, which together with the
    /// identity and inverses certifies a group.
    pub fn is_associative(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }
}
