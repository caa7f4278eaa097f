//! Finite groups as multiplication tables with the identity pinned at index 0.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use thiserror::Error;

use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table is empty or not square (row {row} has {len} entries, expected {n})")]
    Malformed { row: usize, len: usize, n: usize },
    #[error("not closed: {a}*{b} = {value} is out of range")]
    NotClosed { a: usize, b: usize, value: u64 },
    #[error("index 0 is not a two-sided identity (fails at element {0})")]
    NoIdentityAtZero(usize),
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("arity mismatch: term expects {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("map is not an embedding: {0}")]
    NotAnEmbedding(String),
}

/// Common operations for anything we evaluate words in.
pub trait GroupOps {
    type Elem: Clone + Eq + Hash;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Group {
    n: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    orders: Vec<u32>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group(order {})", self.n)
    }
}

impl Group {
    /// Validates a raw table. Checks run in the order shape, closure,
    /// identity, inverses, associativity; the first witness is reported.
    pub fn from_table(raw: &[Vec<u64>]) -> Result<Group, GroupError> {
        let n = raw.len();
        if n == 0 {
            return Err(GroupError::Malformed { row: 0, len: 0, n: 0 });
        }
        for (r, row) in raw.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Malformed { row: r, len: row.len(), n });
            }
        }
        let mut table = Vec::with_capacity(n * n);
        for (a, row) in raw.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v >= n as u64 {
                    return Err(GroupError::NotClosed { a, b, value: v });
                }
                table.push(v as u32);
            }
        }
        for g in 0..n {
            if table[g] as usize != g || table[g * n] as usize != g {
                return Err(GroupError::NoIdentityAtZero(g));
            }
        }
        let mut inverse = vec![0u32; n];
        for g in 0..n {
            let row = &table[g * n..(g + 1) * n];
            match (0..n).find(|&h| row[h] == 0 && table[h * n + g] == 0) {
                Some(h) => inverse[g] = h as u32,
                None => return Err(GroupError::NoInverse(g)),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(Self::assemble(n, table, inverse))
    }

    /// Builds a group from a table known to satisfy the axioms.
    pub(crate) fn from_table_unchecked(n: usize, table: Vec<u32>) -> Group {
        let mut inverse = vec![0u32; n];
        for g in 0..n {
            let row = &table[g * n..(g + 1) * n];
            inverse[g] = row.iter().position(|&x| x == 0).expect("group table") as u32;
        }
        Self::assemble(n, table, inverse)
    }

    fn assemble(n: usize, table: Vec<u32>, inverse: Vec<u32>) -> Group {
        let mut orders = vec![1u32; n];
        for g in 1..n {
            let mut x = g;
            let mut k = 1;
            while x != 0 {
                x = table[x * n + g] as usize;
                k += 1;
            }
            orders[g] = k;
        }
        Group { n, table, inverse, orders }
    }

    pub fn trivial() -> Group {
        Self::from_table_unchecked(1, vec![0])
    }

    pub fn cyclic(k: usize) -> Group {
        assert!(k >= 1);
        let table = (0..k * k).map(|i| ((i / k + i % k) % k) as u32).collect();
        Self::from_table_unchecked(k, table)
    }

    /// Direct product with element index `a * |b| + b`.
    pub fn direct_product(a: &Group, b: &Group) -> Group {
        let (na, nb) = (a.n, b.n);
        let n = na * nb;
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let p = a.mul((x / nb) as u32, (y / nb) as u32) as usize;
                let q = b.mul((x % nb) as u32, (y % nb) as u32) as usize;
                table.push((p * nb + q) as u32);
            }
        }
        Self::from_table_unchecked(n, table)
    }

    /// Tables the group generated by `gens`, numbering elements breadth-first
    /// from the identity with generators tried in list order.
    pub fn from_perms(gens: &[Perm]) -> (Group, Vec<Perm>) {
        let degree = gens.first().map_or(0, |g| g.degree());
        let id = Perm::identity(degree);
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Perm, u32> = HashMap::new();
        index.insert(id, 0);
        let mut right: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p = elems[i].then(g);
                let next = elems.len() as u32;
                let j = *index.entry(p.clone()).or_insert_with(|| {
                    elems.push(p);
                    next
                });
                right.push(j);
            }
            i += 1;
        }
        let table = table_from_cayley(elems.len(), gens.len(), &right);
        (Self::from_table_unchecked(elems.len(), table), elems)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn elem_order(&self, a: u32) -> u32 {
        self.orders[a as usize]
    }

    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn pow(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn commute(&self, a: u32, b: u32) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n as u32).all(|a| (a..self.n as u32).all(|b| self.commute(a, b)))
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.n as u32
    }

    fn check(&self, a: u32) -> Result<(), GroupError> {
        if (a as usize) < self.n {
            Ok(())
        } else {
            Err(GroupError::IndexOutOfRange(a as usize))
        }
    }

    /// Greedy generating set: scan indices upward, keep anything not yet generated.
    pub fn generators(&self) -> Vec<u32> {
        self.generators_of(&self.elements().collect::<Vec<_>>())
    }

    /// Greedy generating set of the subgroup spanned by `elems`, in list order.
    pub fn generators_of(&self, elems: &[u32]) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.n];
        span[0] = true;
        for &g in elems {
            if !span[g as usize] {
                gens.push(g);
                for x in self.closure(&gens) {
                    span[x as usize] = true;
                }
            }
        }
        gens
    }

    fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut out = vec![0u32];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Right regular representation: element g acts by x -> x*g.
    pub fn regular_perm(&self, g: u32) -> Perm {
        Perm::from_images_unchecked((0..self.n as u32).map(|x| self.mul(x, g)).collect())
    }

    /// Relabel elements by a bijection fixing 0: element i becomes `sigma[i]`.
    pub fn relabel(&self, sigma: &[u32]) -> Group {
        assert_eq!(sigma[0], 0);
        let n = self.n;
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[sigma[a] as usize * n + sigma[b] as usize] = sigma[self.table[a * n + b] as usize];
            }
        }
        Self::from_table_unchecked(n, table)
    }

    /// Re-tables a subgroup with its members numbered in sorted order.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> (Group, Embedding) {
        let m = &h.members;
        let pos: HashMap<u32, u32> = m.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let k = m.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in m {
            for &b in m {
                table.push(pos[&self.mul(a, b)]);
            }
        }
        (
            Self::from_table_unchecked(k, table),
            Embedding { map: m.clone(), target_order: self.n },
        )
    }
}

pub(crate) fn table_from_cayley(n: usize, k: usize, right: &[u32]) -> Vec<u32> {
    // Every element is a word in the generators; walk that word from each row.
    let mut parent = vec![(u32::MAX, 0usize); n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[0] = true;
    order.push(0u32);
    let mut i = 0;
    while i < order.len() {
        let x = order[i] as usize;
        for s in 0..k {
            let y = right[x * k + s] as usize;
            if !seen[y] {
                seen[y] = true;
                parent[y] = (x as u32, s);
                order.push(y as u32);
            }
        }
        i += 1;
    }
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        table[a * n] = a as u32;
        for &y in order.iter().skip(1) {
            let (p, s) = parent[y as usize];
            let v = table[a * n + p as usize] as usize;
            table[a * n + y as usize] = right[v * k + s];
        }
    }
    table
}

impl GroupOps for Group {
    type Elem = u32;
    fn identity(&self) -> u32 {
        0
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        Group::mul(self, *a, *b)
    }
    fn inv(&self, a: &u32) -> u32 {
        Group::inv(self, *a)
    }
}

/// Sorted member list, always containing 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<u32>,
}

impl Subgroup {
    pub fn new(g: &Group, members: &[u32]) -> Result<Subgroup, GroupError> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        for &x in &m {
            g.check(x)?;
        }
        let set: HashSet<u32> = m.iter().copied().collect();
        if !set.contains(&0) {
            return Err(GroupError::NotASubgroup);
        }
        for &a in &m {
            if !set.contains(&g.inv(a)) || m.iter().any(|&b| !set.contains(&g.mul(a, b))) {
                return Err(GroupError::NotASubgroup);
            }
        }
        Ok(Subgroup { members: m })
    }

    pub(crate) fn from_sorted(members: Vec<u32>) -> Subgroup {
        Subgroup { members }
    }

    pub fn trivial() -> Subgroup {
        Subgroup { members: vec![0] }
    }

    pub fn whole(g: &Group) -> Subgroup {
        Subgroup { members: g.elements().collect() }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup { members: self.members.iter().copied().filter(|&x| other.contains(x)).collect() }
    }
}

pub fn generated_subgroup(g: &Group, s: &[u32]) -> Result<Subgroup, GroupError> {
    for &x in s {
        g.check(x)?;
    }
    Ok(Subgroup { members: g.closure(s) })
}

/// Left cosets xK, each sorted, ordered by least element.
pub fn left_cosets(g: &Group, k: &Subgroup) -> Result<Vec<Vec<u32>>, GroupError> {
    Subgroup::new(g, k.members())?;
    let mut seen = vec![false; g.order()];
    let mut blocks = Vec::new();
    for x in g.elements() {
        if seen[x as usize] {
            continue;
        }
        let mut b: Vec<u32> = k.members.iter().map(|&h| g.mul(x, h)).collect();
        b.sort_unstable();
        for &y in &b {
            seen[y as usize] = true;
        }
        blocks.push(b);
    }
    Ok(blocks)
}

pub fn centralizer(g: &Group, a: &[u32]) -> Result<Subgroup, GroupError> {
    for &x in a {
        g.check(x)?;
    }
    Ok(Subgroup { members: g.elements().filter(|&x| a.iter().all(|&y| g.commute(x, y))).collect() })
}

pub fn center(g: &Group) -> Subgroup {
    centralizer(g, &g.elements().collect::<Vec<_>>()).expect("in range")
}

pub fn normalizer(g: &Group, a: &Subgroup) -> Result<Subgroup, GroupError> {
    Subgroup::new(g, a.members())?;
    Ok(Subgroup {
        members: g.elements().filter(|&x| a.members.iter().all(|&y| a.contains(g.conj(y, x)))).collect(),
    })
}

/// An injective homomorphism given by its index map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    pub map: Vec<u32>,
    pub target_order: usize,
}

impl Embedding {
    pub fn new(source: &Group, target: &Group, map: Vec<u32>) -> Result<Embedding, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::NotAnEmbedding(format!(
                "map has {} entries for a group of order {}",
                map.len(),
                source.order()
            )));
        }
        for &y in &map {
            target.check(y)?;
        }
        let distinct: HashSet<u32> = map.iter().copied().collect();
        if distinct.len() != map.len() {
            return Err(GroupError::NotAnEmbedding("not injective".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b) as usize] != target.mul(map[a as usize], map[b as usize]) {
                    return Err(GroupError::NotAnEmbedding(format!("product {a}*{b} not preserved")));
                }
            }
        }
        Ok(Embedding { map, target_order: target.order() })
    }

    pub fn identity(g: &Group) -> Embedding {
        Embedding { map: g.elements().collect(), target_order: g.order() }
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.map[x as usize]
    }

    pub fn source_order(&self) -> usize {
        self.map.len()
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding { map: self.map.iter().map(|&x| other.apply(x)).collect(), target_order: other.target_order }
    }

    pub fn image(&self) -> Subgroup {
        let mut m = self.map.clone();
        m.sort_unstable();
        Subgroup { members: m }
    }

    /// Preimage lookup table over the target.
    pub fn preimages(&self) -> Vec<Option<u32>> {
        let mut pre = vec![None; self.target_order];
        for (i, &y) in self.map.iter().enumerate() {
            pre[y as usize] = Some(i as u32);
        }
        pre
    }
}

/// Per-prefix data for extending generator images to a whole group.
struct Spanning {
    gens: Vec<u32>,
    // For each prefix length p (1-based), elements of <gens[..p]> in discovery
    // order with (parent, generator slot).
    layers: Vec<Vec<(u32, u32, usize)>>,
}

impl Spanning {
    fn new(k: &Group) -> Spanning {
        let gens = k.generators();
        let mut layers = Vec::new();
        for p in 1..=gens.len() {
            let mut seen = vec![false; k.order()];
            seen[0] = true;
            let mut out = vec![(0u32, u32::MAX, usize::MAX)];
            let mut i = 0;
            while i < out.len() {
                let x = out[i].0;
                for (s, &g) in gens[..p].iter().enumerate() {
                    let y = k.mul(x, g);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        out.push((y, x, s));
                    }
                }
                i += 1;
            }
            layers.push(out);
        }
        Spanning { gens, layers }
    }
}

/// All injective homomorphisms K -> G, ordered lexicographically by the
/// images of K's greedy generators.
pub fn enumerate_embeddings(k: &Group, g: &Group) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(k, g, &mut |e| {
        out.push(e.clone());
        true
    });
    out
}

/// Streams embeddings in the same order as [`enumerate_embeddings`]; the
/// callback returns false to stop early.
pub fn for_each_embedding(k: &Group, g: &Group, f: &mut dyn FnMut(&Embedding) -> bool) {
    if k.order() > g.order() || !g.order().is_multiple_of(k.order()) {
        return;
    }
    let sp = Spanning::new(k);
    let mut images = Vec::with_capacity(sp.gens.len());
    let mut map = vec![u32::MAX; k.order()];
    map[0] = 0;
    embed_rec(k, g, &sp, &mut images, &mut map, f);
}

fn embed_rec(
    k: &Group,
    g: &Group,
    sp: &Spanning,
    images: &mut Vec<u32>,
    map: &mut Vec<u32>,
    f: &mut dyn FnMut(&Embedding) -> bool,
) -> bool {
    let p = images.len();
    if p == sp.gens.len() {
        let e = Embedding { map: map.clone(), target_order: g.order() };
        return f(&e);
    }
    let want = k.elem_order(sp.gens[p]);
    for y in g.elements() {
        if g.elem_order(y) != want {
            continue;
        }
        images.push(y);
        if let Some(m) = extend_prefix(k, g, sp, images) {
            let saved = std::mem::replace(map, m);
            let go_on = embed_rec(k, g, sp, images, map, f);
            *map = saved;
            if !go_on {
                images.pop();
                return false;
            }
        }
        images.pop();
    }
    true
}

fn extend_prefix(k: &Group, g: &Group, sp: &Spanning, images: &[u32]) -> Option<Vec<u32>> {
    let p = images.len();
    let layer = &sp.layers[p - 1];
    let mut map = vec![u32::MAX; k.order()];
    map[0] = 0;
    for &(y, parent, s) in layer.iter().skip(1) {
        map[y as usize] = g.mul(map[parent as usize], images[s]);
    }
    // Homomorphism on the prefix subgroup: check every generator edge.
    let mut used = HashSet::with_capacity(layer.len());
    for &(x, _, _) in layer {
        if !used.insert(map[x as usize]) {
            return None;
        }
        for (s, &gen) in sp.gens[..p].iter().enumerate() {
            if map[k.mul(x, gen) as usize] != g.mul(map[x as usize], images[s]) {
                return None;
            }
        }
    }
    Some(map)
}

pub fn automorphisms(g: &Group) -> Vec<Embedding> {
    enumerate_embeddings(g, g)
}

/// Conjugation maps x -> h^-1 x h, deduplicated, in the order they appear
/// among all automorphisms.
pub fn inner_automorphisms(g: &Group) -> Vec<Embedding> {
    let inner: HashSet<Vec<u32>> =
        g.elements().map(|h| g.elements().map(|x| g.conj(x, h)).collect()).collect();
    automorphisms(g).into_iter().filter(|a| inner.contains(&a.map)).collect()
}

/// Keeps one embedding per orbit under post-composition with inner
/// automorphisms of the target (the lexicographically least image vector).
pub fn dedup_up_to_inner(g: &Group, embs: Vec<Embedding>) -> Vec<Embedding> {
    embs.into_iter()
        .filter(|e| {
            g.elements().all(|h| {
                let c: Vec<u32> = e.map.iter().map(|&x| g.conj(x, h)).collect();
                c >= e.map
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sym {
    Var(usize),
    Const(u32),
}

/// A word: letters with exponent +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupTerm {
    pub arity: usize,
    pub word: Vec<(Sym, bool)>,
}

/// `x0 c4^-1 ...`; the empty word prints as `e`.
impl std::fmt::Display for GroupTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for (i, (s, inv)) in self.word.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match s {
                Sym::Var(v) => write!(f, "x{v}")?,
                Sym::Const(c) => write!(f, "c{c}")?,
            }
            if *inv {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl GroupTerm {
    pub fn new(arity: usize, word: Vec<(Sym, bool)>) -> Result<GroupTerm, GroupError> {
        for (s, _) in &word {
            if let Sym::Var(i) = s {
                if *i >= arity {
                    return Err(GroupError::ArityMismatch { expected: arity, got: i + 1 });
                }
            }
        }
        Ok(GroupTerm { arity, word })
    }

    pub fn commutator(arity: usize, a: Sym, b: Sym) -> GroupTerm {
        GroupTerm { arity, word: vec![(a, false), (b, false), (a, true), (b, true)] }
    }

    /// Evaluates with `consts` resolving `Sym::Const` indices.
    pub fn eval_in<G: GroupOps>(&self, g: &G, args: &[G::Elem], consts: &[G::Elem]) -> G::Elem {
        let mut acc = g.identity();
        for (s, inverted) in &self.word {
            let x = match s {
                Sym::Var(i) => args[*i].clone(),
                Sym::Const(c) => consts[*c as usize].clone(),
            };
            let x = if *inverted { g.inv(&x) } else { x };
            acc = g.mul(&acc, &x);
        }
        acc
    }
}

/// Left-to-right fold through the table. `Const(c)` letters are element indices.
pub fn eval_term(g: &Group, term: &GroupTerm, args: &[u32]) -> Result<u32, GroupError> {
    if args.len() != term.arity {
        return Err(GroupError::ArityMismatch { expected: term.arity, got: args.len() });
    }
    let mut acc = 0u32;
    for (s, inverted) in &term.word {
        let x = match *s {
            Sym::Var(i) => args[i],
            Sym::Const(c) => {
                g.check(c)?;
                c
            }
        };
        g.check(x)?;
        acc = g.mul(acc, if *inverted { g.inv(x) } else { x });
    }
    Ok(acc)
}

/// All subgroups, ordered by size then member list.
pub fn subgroups(g: &Group) -> Vec<Subgroup> {
    let mut found: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    let triv = vec![0u32];
    found.insert(triv.clone());
    queue.push_back(triv);
    while let Some(h) = queue.pop_front() {
        for x in g.elements() {
            if h.binary_search(&x).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(x);
            let c = g.closure(&gens);
            if found.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    let mut all: Vec<Vec<u32>> = found.into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all.into_iter().map(Subgroup::from_sorted).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(t: &[&[u64]]) -> Vec<Vec<u64>> {
        t.iter().map(|r| r.to_vec()).collect()
    }

    pub(crate) fn s3() -> Group {
        // Elements as permutations of {0,1,2}, right action, listed so the
        // identity comes first.
        let els: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| els.iter().position(|q| *q == p).unwrap() as u64;
        let t: Vec<Vec<u64>> = els
            .iter()
            .map(|x| els.iter().map(|y| idx([y[x[0]], y[x[1]], y[x[2]]])).collect())
            .collect();
        Group::from_table(&t).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(Group::from_table(&raw(&[&[0]])).unwrap().order(), 1);
        let z2 = Group::from_table(&raw(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(Group::from_table(&raw(&[&[0, 1], &[1, 1]])), Err(GroupError::NoInverse(1)));
    }

    #[test]
    fn validate_error_taxonomy() {
        assert!(matches!(Group::from_table(&raw(&[&[0, 2], &[1, 0]])), Err(GroupError::NotClosed { a: 0, b: 1, .. })));
        assert_eq!(Group::from_table(&raw(&[&[1, 0], &[0, 1]])), Err(GroupError::NoIdentityAtZero(0)));
        // A loop of order 5 with identity and inverses that is not associative.
        let loop5 = raw(&[
            &[0, 1, 2, 3, 4],
            &[1, 0, 3, 4, 2],
            &[2, 4, 0, 1, 3],
            &[3, 2, 4, 0, 1],
            &[4, 3, 1, 2, 0],
        ]);
        assert!(matches!(Group::from_table(&loop5), Err(GroupError::NotAssociative { .. })));
    }

    #[test]
    fn generated_subgroup_examples() {
        let s3 = s3();
        let h = generated_subgroup(&s3, &[1]).unwrap();
        assert_eq!(h.order(), 2);
        assert_eq!(generated_subgroup(&s3, &[]).unwrap().members(), &[0]);
        let z6 = Group::cyclic(6);
        assert_eq!(generated_subgroup(&z6, &[2]).unwrap().members(), &[0, 2, 4]);
        assert_eq!(generated_subgroup(&z6, &[7]), Err(GroupError::IndexOutOfRange(7)));
    }

    #[test]
    fn coset_examples() {
        let z4 = Group::cyclic(4);
        let k = Subgroup::new(&z4, &[0, 2]).unwrap();
        assert_eq!(left_cosets(&z4, &k).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(left_cosets(&z4, &Subgroup::whole(&z4)).unwrap().len(), 1);
        assert_eq!(left_cosets(&z4, &Subgroup::trivial()).unwrap().len(), 4);
        assert_eq!(Subgroup::new(&z4, &[0, 1]), Err(GroupError::NotASubgroup));
    }

    #[test]
    fn centralizer_examples() {
        let s3 = s3();
        assert_eq!(center(&s3).members(), &[0]);
        let z6 = Group::cyclic(6);
        assert_eq!(center(&z6).order(), 6);
        // 4 is a 3-cycle in our listing.
        assert_eq!(s3.elem_order(4), 3);
        assert_eq!(centralizer(&s3, &[4]).unwrap().members(), &[0, 4, 5]);
        let t = generated_subgroup(&s3, &[1]).unwrap();
        assert_eq!(normalizer(&s3, &t).unwrap(), t);
        let c3 = generated_subgroup(&s3, &[4]).unwrap();
        assert_eq!(normalizer(&s3, &c3).unwrap().order(), 6);
    }

    #[test]
    fn embedding_examples() {
        let z2 = Group::cyclic(2);
        let z4 = Group::cyclic(4);
        let e = enumerate_embeddings(&z2, &z4);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].map, vec![0, 2]);
        assert!(enumerate_embeddings(&z2, &Group::cyclic(3)).is_empty());
        assert_eq!(enumerate_embeddings(&Group::trivial(), &s3()).len(), 1);
    }

    #[test]
    fn automorphism_examples() {
        let v4 = Group::direct_product(&Group::cyclic(2), &Group::cyclic(2));
        assert_eq!(automorphisms(&v4).len(), 6);
        assert_eq!(inner_automorphisms(&v4).len(), 1);
        assert_eq!(automorphisms(&Group::trivial()).len(), 1);
        let s3 = s3();
        assert_eq!(automorphisms(&s3).len(), 6);
        assert_eq!(inner_automorphisms(&s3).len(), 6);
    }

    #[test]
    fn term_examples() {
        let s3 = s3();
        let empty = GroupTerm::new(0, vec![]).unwrap();
        assert_eq!(eval_term(&s3, &empty, &[]).unwrap(), 0);
        let z6 = Group::cyclic(6);
        let comm = GroupTerm::commutator(2, Sym::Var(0), Sym::Var(1));
        assert_eq!(eval_term(&z6, &comm, &[2, 5]).unwrap(), 0);
        // c^-1 t c with t a transposition and c a 3-cycle.
        let conj = GroupTerm::new(2, vec![(Sym::Var(1), true), (Sym::Var(0), false), (Sym::Var(1), false)]).unwrap();
        let r = eval_term(&s3, &conj, &[1, 4]).unwrap();
        assert_ne!(r, 1);
        assert_eq!(s3.elem_order(r), 2);
        assert!(matches!(eval_term(&s3, &conj, &[1]), Err(GroupError::ArityMismatch { .. })));
        assert!(GroupTerm::new(1, vec![(Sym::Var(1), false)]).is_err());
    }

    #[test]
    fn from_perms_matches_cyclic() {
        let z5 = Group::cyclic(5);
        let (g, elems) = Group::from_perms(&[z5.regular_perm(1)]);
        assert_eq!(g.order(), 5);
        assert_eq!(elems.len(), 5);
        assert_eq!(g.rows(), z5.rows());
    }

    #[test]
    fn subgroup_lattice_counts() {
        assert_eq!(subgroups(&s3()).len(), 6);
        let v4 = Group::direct_product(&Group::cyclic(2), &Group::cyclic(2));
        assert_eq!(subgroups(&v4).len(), 5);
        assert_eq!(subgroups(&Group::cyclic(8)).len(), 4);
    }
}
