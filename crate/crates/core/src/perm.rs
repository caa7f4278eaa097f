//! Permutations acting from the right, stabilizer chains, and comparison of
//! marked permutation groups.
//!
//! Products compose left to right: `f.then(g)` maps `u` to `g(f(u))`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::group::GroupOps;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<u32>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.img)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { img: (0..n as u32).collect() }
    }

    pub fn from_images(img: Vec<u32>) -> Option<Perm> {
        let mut seen = vec![false; img.len()];
        for &x in &img {
            if x as usize >= img.len() || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm { img })
    }

    pub(crate) fn from_images_unchecked(img: Vec<u32>) -> Perm {
        debug_assert!(Perm::from_images(img.clone()).is_some());
        Perm { img }
    }

    pub fn images(&self) -> &[u32] {
        &self.img
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.img[x as usize]
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm { img: self.img.iter().map(|&x| other.img[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { img: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.img.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut out = Perm::identity(self.degree());
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    /// Disjoint cycles, each starting at its least point, sorted by that point;
    /// fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.img.len()];
        let mut out = Vec::new();
        for start in 0..self.img.len() {
            if seen[start] || self.img[start] as usize == start {
                continue;
            }
            let mut c = vec![start as u32];
            seen[start] = true;
            let mut x = self.img[start];
            while x as usize != start {
                seen[x as usize] = true;
                c.push(x);
                x = self.img[x as usize];
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for c in self.cycles() {
            let len = BigUint::from(c.len());
            let g = gcd(&acc, &len);
            acc = acc * len / g;
        }
        acc
    }

    /// Acts as `self` on the first block and `other` on a shifted second block.
    pub fn disjoint_sum(&self, other: &Perm) -> Perm {
        let n = self.img.len() as u32;
        let mut img = self.img.clone();
        img.extend(other.img.iter().map(|&x| x + n));
        Perm { img }
    }

    /// Restriction to `points` (which must be a union of orbits), relabeled
    /// by position in the list.
    pub fn restrict(&self, points: &[u32], position: &[u32]) -> Perm {
        Perm { img: points.iter().map(|&p| position[self.img[p as usize] as usize]).collect() }
    }
}

fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != BigUint::default() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Symmetric group context on `n` points, used to evaluate terms on perms.
pub struct PermOps(pub usize);

impl GroupOps for PermOps {
    type Elem = Perm;
    fn identity(&self) -> Perm {
        Perm::identity(self.0)
    }
    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.then(b)
    }
    fn inv(&self, a: &Perm) -> Perm {
        a.inverse()
    }
}

struct Level {
    point: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    slot: HashMap<u32, u32>,
    reps: Vec<Perm>,
    inv_reps: Vec<Perm>,
    // For orbit position o, Schreier generators with gens[..checked[o]] are done.
    checked: Vec<usize>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Level {
        let id = Perm::identity(degree);
        let mut slot = HashMap::new();
        slot.insert(point, 0);
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            slot,
            reps: vec![id.clone()],
            inv_reps: vec![id],
            checked: vec![0],
        }
    }

    fn add_gen(&mut self, h: Perm) {
        self.gens.push(h);
        let s = self.gens.len() - 1;
        // Old points only need the new generator; new points need all of them.
        let old = self.orbit.len();
        for o in 0..old {
            self.visit(o, s);
        }
        let mut o = old;
        while o < self.orbit.len() {
            for t in 0..self.gens.len() {
                self.visit(o, t);
            }
            o += 1;
        }
    }

    fn visit(&mut self, o: usize, s: usize) {
        let beta = self.orbit[o];
        let gamma = self.gens[s].apply(beta);
        if self.slot.contains_key(&gamma) {
            return;
        }
        let rep = self.reps[o].then(&self.gens[s]);
        self.slot.insert(gamma, self.orbit.len() as u32);
        self.orbit.push(gamma);
        self.inv_reps.push(rep.inverse());
        self.reps.push(rep);
        self.checked.push(0);
    }
}

/// A base and strong generating set built by the deterministic
/// Schreier–Sims algorithm.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> StabChain {
        let mut chain = StabChain { degree, levels: Vec::new() };
        let mut kept: Vec<&Perm> = Vec::new();
        for g in gens {
            assert_eq!(g.degree(), degree, "generator degree");
            if g.is_identity() || kept.contains(&g) {
                continue;
            }
            kept.push(g);
            if chain.levels.iter().all(|l| g.apply(l.point) == l.point) {
                let p = g.first_moved().expect("non-identity");
                chain.levels.push(Level::new(p, degree));
            }
        }
        for g in kept {
            for l in 0..chain.levels.len() {
                chain.levels[l].add_gen(g.clone());
                if g.apply(chain.levels[l].point) != chain.levels[l].point {
                    break;
                }
            }
        }
        chain.complete();
        chain
    }

    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g.apply(level.point);
            match level.slot.get(&beta) {
                None => return (g, l),
                Some(&o) => {
                    if o != 0 {
                        g = g.then(&level.inv_reps[o as usize]);
                    }
                }
            }
        }
        (g, self.levels.len())
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let l = i as usize;
            let mut o = 0;
            while o < self.levels[l].orbit.len() {
                while self.levels[l].checked[o] < self.levels[l].gens.len() {
                    let s = self.levels[l].checked[o];
                    self.levels[l].checked[o] += 1;
                    let level = &self.levels[l];
                    let gamma = level.gens[s].apply(level.orbit[o]);
                    let target = level.slot[&gamma] as usize;
                    let g = level.reps[o].then(&level.gens[s]).then(&level.inv_reps[target]);
                    if g.is_identity() {
                        continue;
                    }
                    let (h, j) = self.sift(g, l + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        if j == self.levels.len() {
                            let p = h.first_moved().expect("non-identity residue");
                            self.levels.push(Level::new(p, self.degree));
                        }
                        for m in l + 1..=j {
                            self.levels[m].add_gen(h.clone());
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
                o += 1;
            }
            i -= 1;
        }
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.sift(g.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn base_len(&self) -> usize {
        self.levels.len()
    }
}

/// Orbits of the generated group, each sorted, listed by least point.
pub fn orbits(degree: usize, gens: &[Perm]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orb = vec![start as u32];
        let mut i = 0;
        while i < orb.len() {
            for g in gens {
                let y = g.apply(orb[i]);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orb.push(y);
                }
            }
            i += 1;
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}

/// Canonical form of the action of an ordered generator list on one orbit:
/// the least breadth-first relabeling over all start points. Two transitive
/// actions are equivalent (with generators matched by position) iff their
/// forms are equal.
pub fn action_canon(gens: &[Perm], orbit: &[u32]) -> Vec<u32> {
    let m = orbit.len();
    let k = gens.len();
    let degree = gens.first().map_or(0, |g| g.degree());
    let mut best: Option<Vec<u32>> = None;
    let mut label = vec![u32::MAX; degree];
    let mut order: Vec<u32> = Vec::with_capacity(m);
    let mut form: Vec<u32> = Vec::with_capacity(m * k);
    for &start in orbit {
        for &p in &order {
            label[p as usize] = u32::MAX;
        }
        order.clear();
        form.clear();
        label[start as usize] = 0;
        order.push(start);
        let mut worse = false;
        let mut decided_better = best.is_none();
        let mut i = 0;
        'bfs: while i < order.len() {
            let x = order[i];
            for g in gens {
                let y = g.apply(x);
                if label[y as usize] == u32::MAX {
                    label[y as usize] = order.len() as u32;
                    order.push(y);
                }
                let v = label[y as usize];
                if !decided_better {
                    let b = best.as_ref().expect("best")[form.len()];
                    if v > b {
                        worse = true;
                        break 'bfs;
                    }
                    if v < b {
                        decided_better = true;
                    }
                }
                form.push(v);
            }
            i += 1;
        }
        if !worse && decided_better {
            best = Some(form.clone());
        }
    }
    for &p in &order {
        label[p as usize] = u32::MAX;
    }
    best.unwrap_or_default()
}

/// A permutation group with an ordered list of marked generators, reduced to
/// one representative per equivalence class of transitive constituent.
/// Dropping a constituent equivalent to a kept one does not change the
/// group, since equivalent actions have the same kernel.
pub struct MarkedGroup {
    gens: Vec<Perm>,
    canons: Vec<Vec<u32>>,
    chain: OnceLock<StabChain>,
}

impl MarkedGroup {
    pub fn new(gens: &[Perm]) -> MarkedGroup {
        let degree = gens.first().map_or(0, |g| g.degree());
        let orbs = orbits(degree, gens);
        let mut kept_points: Vec<u32> = Vec::new();
        let mut canons: Vec<Vec<u32>> = Vec::new();
        let mut index: HashMap<Vec<u32>, ()> = HashMap::new();
        for orb in orbs {
            if orb.len() == 1 {
                continue;
            }
            let c = action_canon(gens, &orb);
            if index.insert(c.clone(), ()).is_none() {
                canons.push(c);
                kept_points.extend_from_slice(&orb);
            }
        }
        let mut position = vec![u32::MAX; degree];
        for (i, &p) in kept_points.iter().enumerate() {
            position[p as usize] = i as u32;
        }
        let gens = gens.iter().map(|g| g.restrict(&kept_points, &position)).collect();
        canons.sort();
        MarkedGroup { gens, canons, chain: OnceLock::new() }
    }

    /// Builds from canonical constituent forms directly.
    pub fn from_forms(k: usize, forms: &[Vec<u32>]) -> MarkedGroup {
        let mut imgs: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut canons: Vec<Vec<u32>> = Vec::new();
        let mut offset = 0u32;
        let mut dedup: HashMap<&Vec<u32>, ()> = HashMap::new();
        for f in forms {
            if f.is_empty() || dedup.insert(f, ()).is_some() {
                continue;
            }
            let m = f.len() / k;
            for (s, img) in imgs.iter_mut().enumerate() {
                img.extend((0..m).map(|x| f[x * k + s] + offset));
            }
            offset += m as u32;
            canons.push(f.clone());
        }
        canons.sort();
        let gens = imgs.into_iter().map(Perm::from_images_unchecked).collect();
        MarkedGroup { gens, canons, chain: OnceLock::new() }
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn degree(&self) -> usize {
        self.gens.first().map_or(0, |g| g.degree())
    }

    pub fn constituent_forms(&self) -> &[Vec<u32>] {
        &self.canons
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::new(self.degree(), &self.gens))
    }

    pub fn order(&self) -> BigUint {
        if self.canons.is_empty() {
            return BigUint::one();
        }
        self.chain().order()
    }

    /// Whether `x[i] -> y[i]` extends to an isomorphism of the generated
    /// groups: the diagonal group has the same order as both sides.
    pub fn same_as(&self, other: &MarkedGroup) -> bool {
        assert_eq!(self.gens.len(), other.gens.len(), "marked generator counts");
        if self.canons == other.canons {
            return true;
        }
        let o = self.order();
        if o != other.order() {
            return false;
        }
        let diag: Vec<Perm> = self.gens.iter().zip(&other.gens).map(|(a, b)| a.disjoint_sum(b)).collect();
        MarkedGroup::new(&diag).order() == o
    }
}

/// A permutation group numbered breadth-first from the identity, generators
/// tried in list order, with lookup of arbitrary members by base image.
pub struct PermTable {
    pub group: crate::group::Group,
    base: Vec<u32>,
    index: HashMap<Vec<u32>, u32>,
}

impl PermTable {
    /// `None` when the group has more than `limit` elements.
    pub fn new(gens: &[Perm], chain: &StabChain, limit: usize) -> Option<PermTable> {
        let base = chain.base();
        let mut states = vec![base.clone()];
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        index.insert(base.clone(), 0);
        let mut right: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            for g in gens {
                let y: Vec<u32> = states[i].iter().map(|&b| g.apply(b)).collect();
                let next = states.len() as u32;
                let j = *index.entry(y.clone()).or_insert_with(|| {
                    states.push(y);
                    next
                });
                right.push(j);
            }
            if states.len() > limit {
                return None;
            }
            i += 1;
        }
        let n = states.len();
        let table = crate::group::table_from_cayley(n, gens.len(), &right);
        Some(PermTable { group: crate::group::Group::from_table_unchecked(n, table), base, index })
    }

    pub fn label(&self, p: &Perm) -> Option<u32> {
        let key: Vec<u32> = self.base.iter().map(|&b| p.apply(b)).collect();
        self.index.get(&key).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Perm {
        Perm::from_images(v.to_vec()).unwrap()
    }

    fn sym_gens(n: usize) -> Vec<Perm> {
        let mut cyc: Vec<u32> = (1..n as u32).collect();
        cyc.push(0);
        let mut tr: Vec<u32> = (0..n as u32).collect();
        tr.swap(0, 1);
        vec![p(&cyc), p(&tr)]
    }

    #[test]
    fn right_action_composition() {
        let f = p(&[1, 2, 0]);
        let g = p(&[1, 0, 2]);
        // (f then g)(0) = g(f(0)) = g(1) = 0
        assert_eq!(f.then(&g).apply(0), 0);
        assert!(f.then(&f.inverse()).is_identity());
        assert_eq!(f.order(), BigUint::from(3u32));
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..=8usize {
            let c = StabChain::new(n, &sym_gens(n));
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(c.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn alternating_and_cyclic() {
        // A5 from (0 1 2) and (0 1 2 3 4).
        let a = p(&[1, 2, 0, 3, 4]);
        let b = p(&[1, 2, 3, 4, 0]);
        let c = StabChain::new(5, &[a, b.clone()]);
        assert_eq!(c.order(), BigUint::from(60u32));
        assert!(c.contains(&b));
        assert!(!c.contains(&p(&[1, 0, 2, 3, 4])));
        let z5 = StabChain::new(5, &[b]);
        assert_eq!(z5.order(), BigUint::from(5u32));
    }

    #[test]
    fn canon_detects_equivalence() {
        // Same cyclic action labeled differently.
        let g1 = [p(&[1, 2, 0])];
        let g2 = [p(&[2, 0, 1])];
        let o = [0, 1, 2];
        assert_eq!(action_canon(&g1, &o), action_canon(&g2, &o));
        let h = [p(&[1, 0, 2, 3]), p(&[0, 1, 3, 2])];
        assert_ne!(action_canon(&h, &[0, 1]), action_canon(&h, &[2, 3]));
    }

    #[test]
    fn marked_comparison() {
        // <(0 1 2)> marked by its generator vs by its inverse: the map
        // g -> g^-1 is an isomorphism, so both mark the same abstract Z3.
        let x = MarkedGroup::new(&[p(&[1, 2, 0])]);
        let y = MarkedGroup::new(&[p(&[2, 0, 1])]);
        assert!(x.same_as(&y));
        // Z2 x Z2 marked (a, b) vs (a, a): not the same marked group.
        let a = p(&[1, 0, 2, 3]);
        let b = p(&[0, 1, 3, 2]);
        let u = MarkedGroup::new(&[a.clone(), b]);
        let v = MarkedGroup::new(&[a.clone(), a]);
        assert!(!u.same_as(&v));
    }

    #[test]
    fn diagonal_of_regular_reps() {
        // Cyclic group of order 6 as (0..5) vs as a product of a 2- and 3-cycle.
        let x = MarkedGroup::new(&[p(&[1, 2, 3, 4, 5, 0])]);
        let y = MarkedGroup::new(&[p(&[1, 0, 3, 4, 2])]);
        assert_eq!(x.order(), BigUint::from(6u32));
        assert!(x.same_as(&y));
        let z = MarkedGroup::new(&[p(&[1, 0, 2]), p(&[0, 2, 1])]);
        let w = MarkedGroup::new(&[p(&[1, 0, 2]), p(&[1, 0, 2])]);
        assert!(!z.same_as(&w));
    }

    proptest! {
        #[test]
        fn chain_order_matches_closure(seed in prop::collection::vec(0u32..1000, 1..4)) {
            let n = 6usize;
            let gens: Vec<Perm> = seed.iter().map(|&s| {
                let mut v: Vec<u32> = (0..n as u32).collect();
                let mut r = s as usize;
                for i in (1..n).rev() { v.swap(i, r % (i + 1)); r /= i + 1; r += s as usize; }
                p(&v)
            }).collect();
            let (g, _) = crate::group::Group::from_perms(&gens);
            let c = StabChain::new(n, &gens);
            prop_assert_eq!(c.order(), BigUint::from(g.order()));
            for x in &gens { prop_assert!(c.contains(x)); }
        }

        #[test]
        fn canon_invariant_under_relabeling(shift in 0u32..5) {
            let g = [p(&[1, 2, 3, 4, 0]), p(&[0, 4, 3, 2, 1])];
            let r: Vec<u32> = (0..5).map(|i| (i + shift) % 5).collect();
            let rp = p(&r);
            let conj: Vec<Perm> = g.iter().map(|x| rp.inverse().then(x).then(&rp)).collect();
            let o = [0, 1, 2, 3, 4];
            prop_assert_eq!(action_canon(&g, &o), action_canon(&conj, &o));
        }
    }
}
