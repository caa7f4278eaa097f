//! Amalgamation tries, their permutation actions on coset triples, and the
//! stable amalgam over all tries.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{centralizer, generated_subgroup, left_cosets, Embedding, Group, GroupError, Subgroup};
use crate::perm::{action_canon, orbits, MarkedGroup, Perm, PermTable, StabChain};

/// Largest group order that is re-tabled explicitly.
pub const TABLE_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub triples_per_try: usize,
    pub product_points: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { triples_per_try: 20_000, product_points: 2_000_000 }
    }
}

/// What a refused build would have cost.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub tries: BigUint,
    pub triples_per_try: usize,
    pub points: BigUint,
    /// ln ln of the (n*!)^(m*) bound on one try group.
    pub log_log_bound: f64,
    pub budget: Budget,
}

impl std::fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} tries x {} triples = {} points (budget {} per try, {} total); ln ln bound {:.3}",
            self.tries,
            self.triples_per_try,
            self.points,
            self.budget.triples_per_try,
            self.budget.product_points,
            self.log_log_bound
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmalgamError {
    #[error("I{side} is not a transversal of the base cosets")]
    NotATransversal { side: u8 },
    #[error("identity is not in I{side}")]
    IdentityNotRepresentative { side: u8 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(Box<BudgetReport>),
    #[error("element {elem} of side {side} lies in the base")]
    ElementInBase { side: u8, elem: u32 },
    #[error("group of order {0} is too large to table")]
    TooLargeForTable(BigUint),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// ln ln of (n*!)^(m*) with n* = n1 n2 / n0 and m* = n*^(n1+n2).
pub fn try_log_log_bound(n0: usize, n1: usize, n2: usize) -> f64 {
    let ns = (n1 * n2 / n0) as f64;
    if ns < 2.0 {
        return f64::NEG_INFINITY;
    }
    let ln_fact: f64 = (2..=(n1 * n2 / n0)).map(|k| (k as f64).ln()).sum();
    (n1 + n2) as f64 * ns.ln() + ln_fact.ln()
}

fn ln_big(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => x.bits() as f64 * std::f64::consts::LN_2,
    }
}

/// Whether a group of this order fits under the bound, compared on logarithms.
pub fn within_try_bound(order: &BigUint, n0: usize, n1: usize, n2: usize) -> bool {
    if order <= &BigUint::one() {
        return true;
    }
    let bound = try_log_log_bound(n0, n1, n2);
    ln_big(order).ln() <= bound + 1e-9
}

/// The three groups and two base embeddings shared by every try.
#[derive(Debug, Clone)]
pub struct Shape {
    pub g0: Group,
    pub g1: Group,
    pub g2: Group,
    pub emb1: Embedding,
    pub emb2: Embedding,
    cosets: [Vec<Vec<u32>>; 2],
}

impl Shape {
    pub fn new(g0: Group, g1: Group, g2: Group, emb1: Embedding, emb2: Embedding) -> Result<Arc<Shape>, AmalgamError> {
        let e1 = Embedding::new(&g0, &g1, emb1.map.clone())?;
        let e2 = Embedding::new(&g0, &g2, emb2.map.clone())?;
        let c1 = left_cosets(&g1, &e1.image())?;
        let c2 = left_cosets(&g2, &e2.image())?;
        Ok(Arc::new(Shape { g0, g1, g2, emb1: e1, emb2: e2, cosets: [c1, c2] }))
    }

    pub fn side(&self, side: u8) -> (&Group, &Embedding) {
        match side {
            1 => (&self.g1, &self.emb1),
            _ => (&self.g2, &self.emb2),
        }
    }

    pub fn cosets(&self, side: u8) -> &[Vec<u32>] {
        &self.cosets[side as usize - 1]
    }

    /// The same data with the two sides exchanged.
    pub fn swapped(&self) -> Arc<Shape> {
        Arc::new(Shape {
            g0: self.g0.clone(),
            g1: self.g2.clone(),
            g2: self.g1.clone(),
            emb1: self.emb2.clone(),
            emb2: self.emb1.clone(),
            cosets: [self.cosets[1].clone(), self.cosets[0].clone()],
        })
    }

    pub fn triples_per_try(&self) -> usize {
        self.g1.order() * self.g2.order() / self.g0.order()
    }

    /// Number of transversals on one side with the identity pinned.
    pub fn side_count(&self, side: u8) -> BigUint {
        self.cosets(side).iter().skip(1).fold(BigUint::one(), |acc, c| acc * BigUint::from(c.len()))
    }

    pub fn try_count(&self) -> BigUint {
        self.side_count(1) * self.side_count(2)
    }

    /// All transversals of one side, in lexicographic order of the choice
    /// vector (earlier cosets vary slowest), each sorted.
    pub fn side_transversals(&self, side: u8) -> Vec<Vec<u32>> {
        let cosets = &self.cosets(side)[1..];
        let mut out = Vec::new();
        let mut choice = vec![0usize; cosets.len()];
        loop {
            out.push(transversal_from_choice(cosets, &choice));
            let mut i = cosets.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < cosets[i].len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }

    /// The least-index representative of each coset.
    pub fn default_transversal(&self, side: u8) -> Vec<u32> {
        let mut t: Vec<u32> = self.cosets(side).iter().map(|c| c[0]).collect();
        t.sort_unstable();
        t
    }

    fn check_budget(&self, tries: BigUint, budget: Budget) -> Result<(), AmalgamError> {
        let per = self.triples_per_try();
        let points = &tries * BigUint::from(per);
        if per > budget.triples_per_try || points > BigUint::from(budget.product_points) {
            return Err(AmalgamError::BudgetExceeded(Box::new(BudgetReport {
                tries,
                triples_per_try: per,
                points,
                log_log_bound: try_log_log_bound(self.g0.order(), self.g1.order(), self.g2.order()),
                budget,
            })));
        }
        Ok(())
    }
}

fn transversal_from_choice(cosets: &[Vec<u32>], choice: &[usize]) -> Vec<u32> {
    let mut t: Vec<u32> = std::iter::once(0).chain(cosets.iter().zip(choice).map(|(c, &i)| c[i])).collect();
    t.sort_unstable();
    t
}

/// A choice of transversals (I1, I2) for a shape, with the coset
/// decompositions x = r * emb(g0) precomputed.
#[derive(Debug, Clone)]
pub struct AmalgamTry {
    pub shape: Arc<Shape>,
    pub i1: Vec<u32>,
    pub i2: Vec<u32>,
    dec: [Vec<(u32, u32)>; 2],
}

fn decompose(g: &Group, emb: &Embedding, reps: &[u32], n0: usize) -> Vec<(u32, u32)> {
    let mut dec = vec![(u32::MAX, u32::MAX); g.order()];
    for (p, &r) in reps.iter().enumerate() {
        for g0 in 0..n0 as u32 {
            dec[g.mul(r, emb.apply(g0)) as usize] = (p as u32, g0);
        }
    }
    dec
}

fn validate_transversal(shape: &Shape, side: u8, reps: &[u32]) -> Result<Vec<u32>, AmalgamError> {
    let mut t = reps.to_vec();
    t.sort_unstable();
    t.dedup();
    let (g, emb) = shape.side(side);
    if t.iter().any(|&x| x as usize >= g.order()) {
        return Err(AmalgamError::NotATransversal { side });
    }
    let mut hit = vec![false; shape.cosets(side).len()];
    let block_of: HashMap<u32, usize> =
        shape.cosets(side).iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&x| (x, i))).collect();
    for &x in &t {
        let b = block_of[&x];
        if hit[b] {
            return Err(AmalgamError::NotATransversal { side });
        }
        hit[b] = true;
    }
    if hit.iter().any(|h| !h) || t.len() != reps.len() {
        return Err(AmalgamError::NotATransversal { side });
    }
    if t.first() != Some(&0) {
        return Err(AmalgamError::IdentityNotRepresentative { side });
    }
    let _ = emb;
    Ok(t)
}

/// Validates (I1, I2); `None` picks least-index representatives.
pub fn make_try(shape: &Arc<Shape>, i1: Option<&[u32]>, i2: Option<&[u32]>) -> Result<AmalgamTry, AmalgamError> {
    let i1 = match i1 {
        Some(r) => validate_transversal(shape, 1, r)?,
        None => shape.default_transversal(1),
    };
    let i2 = match i2 {
        Some(r) => validate_transversal(shape, 2, r)?,
        None => shape.default_transversal(2),
    };
    Ok(AmalgamTry::new_unchecked(shape.clone(), i1, i2))
}

/// A triple (g0, g1, g2) with g1 ∈ I1 and g2 ∈ I2.
pub type Triple = (u32, u32, u32);

impl AmalgamTry {
    fn new_unchecked(shape: Arc<Shape>, i1: Vec<u32>, i2: Vec<u32>) -> AmalgamTry {
        let n0 = shape.g0.order();
        let d1 = decompose(&shape.g1, &shape.emb1, &i1, n0);
        let d2 = decompose(&shape.g2, &shape.emb2, &i2, n0);
        AmalgamTry { shape, i1, i2, dec: [d1, d2] }
    }

    pub fn degree(&self) -> usize {
        self.shape.g0.order() * self.i1.len() * self.i2.len()
    }

    /// Triples in lexicographic order.
    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::with_capacity(self.degree());
        for g0 in self.shape.g0.elements() {
            for &a in &self.i1 {
                for &b in &self.i2 {
                    out.push((g0, a, b));
                }
            }
        }
        out
    }

    fn index(&self, g0: u32, p1: u32, p2: u32) -> u32 {
        let (n1, n2) = (self.i1.len() as u32, self.i2.len() as u32);
        g0 * n1 * n2 + p1 * n2 + p2
    }

    pub fn triple_index(&self, u: Triple) -> Option<u32> {
        let p1 = self.i1.binary_search(&u.1).ok()? as u32;
        let p2 = self.i2.binary_search(&u.2).ok()? as u32;
        if u.0 as usize >= self.shape.g0.order() {
            return None;
        }
        Some(self.index(u.0, p1, p2))
    }

    /// The image of triple `u` under j_side(g); side 0 acts on the G0 slot.
    pub fn j_action(&self, side: u8, g: u32, u: Triple) -> Triple {
        let s = &self.shape;
        match side {
            0 => (s.g0.mul(u.0, g), u.1, u.2),
            1 => {
                let x = s.g1.mul(s.g1.mul(u.1, s.emb1.apply(u.0)), g);
                let (p, g0) = self.dec[0][x as usize];
                (g0, self.i1[p as usize], u.2)
            }
            _ => {
                let x = s.g2.mul(s.g2.mul(u.2, s.emb2.apply(u.0)), g);
                let (p, g0) = self.dec[1][x as usize];
                (g0, u.1, self.i2[p as usize])
            }
        }
    }

    /// j_side(g) as a permutation of triple indices.
    pub fn perm(&self, side: u8, g: u32) -> Perm {
        let s = &self.shape;
        let (n0, n1, n2) = (s.g0.order() as u32, self.i1.len() as u32, self.i2.len() as u32);
        let mut img = vec![0u32; self.degree()];
        match side {
            0 => {
                for g0 in 0..n0 {
                    let t = s.g0.mul(g0, g);
                    for q in 0..n1 * n2 {
                        img[(g0 * n1 * n2 + q) as usize] = t * n1 * n2 + q;
                    }
                }
            }
            1 => {
                for g0 in 0..n0 {
                    for p1 in 0..n1 {
                        let x = s.g1.mul(s.g1.mul(self.i1[p1 as usize], s.emb1.apply(g0)), g);
                        let (q1, h0) = self.dec[0][x as usize];
                        for p2 in 0..n2 {
                            img[self.index(g0, p1, p2) as usize] = self.index(h0, q1, p2);
                        }
                    }
                }
            }
            _ => {
                for g0 in 0..n0 {
                    for p2 in 0..n2 {
                        let x = s.g2.mul(s.g2.mul(self.i2[p2 as usize], s.emb2.apply(g0)), g);
                        let (q2, h0) = self.dec[1][x as usize];
                        for p1 in 0..n1 {
                            img[self.index(g0, p1, p2) as usize] = self.index(h0, p1, q2);
                        }
                    }
                }
            }
        }
        Perm::from_images_unchecked(img)
    }
}

/// Tries of a shape, in order: I1 outer, I2 inner.
pub fn enumerate_tries(shape: &Arc<Shape>) -> impl Iterator<Item = AmalgamTry> + '_ {
    let s1 = shape.side_transversals(1);
    let s2 = shape.side_transversals(2);
    s1.into_iter()
        .flat_map(move |a| s2.clone().into_iter().map(move |b| (a.clone(), b)))
        .map(move |(a, b)| AmalgamTry::new_unchecked(shape.clone(), a, b))
}

/// `count` tries drawn with replacement by a seeded generator.
pub fn sample_tries(shape: &Arc<Shape>, seed: u64, count: usize) -> Vec<AmalgamTry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |side: u8, rng: &mut ChaCha8Rng| -> Vec<u32> {
        let cosets = &shape.cosets(side)[1..];
        let choice: Vec<usize> = cosets.iter().map(|c| rng.gen_range(0..c.len())).collect();
        transversal_from_choice(cosets, &choice)
    };
    (0..count)
        .map(|_| {
            let a = pick(1, &mut rng);
            let b = pick(2, &mut rng);
            AmalgamTry::new_unchecked(shape.clone(), a, b)
        })
        .collect()
}

/// A group that has been re-tabled, with its two side embeddings.
#[derive(Debug, Clone)]
pub struct Tabled {
    pub group: Group,
    pub j1: Embedding,
    pub j2: Embedding,
}

/// The permutation group generated by one try's two actions.
pub struct GxGroup {
    pub perms1: Vec<Perm>,
    pub perms2: Vec<Perm>,
    pub order: BigUint,
    pub carrier: Option<Tabled>,
}

impl GxGroup {
    /// j1(G1) ∩ j2(G2) = j1(emb1(G0)) holds in this group.
    pub fn intersection_law(&self, shape: &Shape) -> bool {
        intersection_law(shape, &self.perms1, &self.perms2)
    }
}

fn intersection_law(shape: &Shape, p1: &[Perm], p2: &[Perm]) -> bool {
    let idx: HashMap<&Perm, u32> = p1.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
    let pre2 = shape.emb2.preimages();
    p2.iter().enumerate().all(|(g2, p)| match (idx.get(p), pre2[g2]) {
        (Some(&g1), Some(g0)) => g1 == shape.emb1.apply(g0),
        (None, None) => true,
        _ => false,
    })
}

/// Generates G_x, re-tabling it when small enough. Errors if the triple
/// space is over budget or the side maps fail to be embeddings.
pub fn build_gx(x: &AmalgamTry, budget: Budget) -> Result<GxGroup, AmalgamError> {
    x.shape.check_budget(BigUint::one(), budget)?;
    let perms1: Vec<Perm> = x.shape.g1.elements().map(|g| x.perm(1, g)).collect();
    let perms2: Vec<Perm> = x.shape.g2.elements().map(|g| x.perm(2, g)).collect();
    let gens: Vec<Perm> = perms1.iter().chain(&perms2).cloned().collect();
    let chain = StabChain::new(x.degree(), &gens);
    let order = chain.order();
    let carrier = match PermTable::new(&gens, &chain, TABLE_LIMIT) {
        Some(t) => {
            let m1 = perms1.iter().map(|p| t.label(p).expect("member")).collect();
            let m2 = perms2.iter().map(|p| t.label(p).expect("member")).collect();
            let j1 = Embedding::new(&x.shape.g1, &t.group, m1)?;
            let j2 = Embedding::new(&x.shape.g2, &t.group, m2)?;
            Some(Tabled { group: t.group, j1, j2 })
        }
        None => {
            // Homomorphism checked on the permutations directly.
            for (g, perms) in [(&x.shape.g1, &perms1), (&x.shape.g2, &perms2)] {
                for a in g.elements() {
                    for b in g.elements() {
                        if perms[a as usize].then(&perms[b as usize]) != perms[g.mul(a, b) as usize] {
                            return Err(GroupError::NotAnEmbedding(format!("j({a}*{b})")).into());
                        }
                    }
                }
            }
            None
        }
    };
    Ok(GxGroup { perms1, perms2, order, carrier })
}

/// Words over the greedy generators reaching each element.
fn words(g: &Group, gens: &[u32]) -> Vec<Vec<usize>> {
    let mut w: Vec<Option<Vec<usize>>> = vec![None; g.order()];
    w[0] = Some(Vec::new());
    let mut queue = vec![0u32];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        for (s, &h) in gens.iter().enumerate() {
            let y = g.mul(x, h);
            if w[y as usize].is_none() {
                let mut v = w[x as usize].clone().expect("reached");
                v.push(s);
                w[y as usize] = Some(v);
                queue.push(y);
            }
        }
        i += 1;
    }
    w.into_iter().map(|v| v.expect("generated")).collect()
}

fn eval_word(word: &[usize], gens: &[Perm], degree: usize) -> Perm {
    word.iter().fold(Perm::identity(degree), |acc, &s| acc.then(&gens[s]))
}

/// Which tries were used and how they map into the constituents of G3.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub tries: usize,
    /// Per try (enumeration order): index of its constituent form.
    pub constituent_of: Vec<u32>,
    /// Orders of the distinct per-try groups, one per constituent.
    pub try_orders: Vec<BigUint>,
    /// Every per-try group sits under the (n*!)^(m*) bound.
    pub within_bound: bool,
}

/// G3 = ⟨j1(G1) ∪ j2(G2)⟩ inside the product of all try groups.
pub struct StableAmalgam {
    pub shape: Arc<Shape>,
    gens1: Vec<u32>,
    words1: Vec<Vec<usize>>,
    gens2: Vec<u32>,
    words2: Vec<Vec<usize>>,
    marked: MarkedGroup,
    order: BigUint,
    table: Option<Tabled>,
    pub certificate: Certificate,
}

impl StableAmalgam {
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_usize(&self) -> Option<usize> {
        self.order.to_usize()
    }

    pub fn marked(&self) -> &MarkedGroup {
        &self.marked
    }

    pub fn tabled(&self) -> Option<&Tabled> {
        self.table.as_ref()
    }

    pub fn tabled_or_err(&self) -> Result<&Tabled, AmalgamError> {
        self.table.as_ref().ok_or_else(|| AmalgamError::TooLargeForTable(self.order.clone()))
    }

    pub fn degree(&self) -> usize {
        self.marked.degree()
    }

    pub fn image1(&self, g: u32) -> Perm {
        let k1 = self.gens1.len();
        eval_word(&self.words1[g as usize], &self.marked.gens()[..k1], self.degree())
    }

    pub fn image2(&self, g: u32) -> Perm {
        let k1 = self.gens1.len();
        eval_word(&self.words2[g as usize], &self.marked.gens()[k1..], self.degree())
    }

    /// The subgroup generated by the images of the listed elements, marked
    /// in list order.
    pub fn marked_images(&self, e1: &[u32], e2: &[u32]) -> MarkedGroup {
        let gens: Vec<Perm> = e1.iter().map(|&g| self.image1(g)).chain(e2.iter().map(|&g| self.image2(g))).collect();
        MarkedGroup::new(&gens)
    }

    /// mtable of G3 followed by the `j1:` and `j2:` lines.
    pub fn to_text(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut s = crate::io::format_mtable(&t.group);
        s.push_str(&crate::io::format_embedding("j1", &t.j1));
        s.push('\n');
        s.push_str(&crate::io::format_embedding("j2", &t.j2));
        s.push('\n');
        Some(s)
    }
}

/// The stable amalgam over every try of the shape.
pub fn stable_amalgam(shape: &Arc<Shape>, budget: Budget) -> Result<StableAmalgam, AmalgamError> {
    shape.check_budget(shape.try_count(), budget)?;
    let s1 = shape.side_transversals(1);
    let s2 = shape.side_transversals(2);
    amalgam_over(shape, &s1, &s2, budget)
}

/// The amalgam over the tries `side1 × side2` (transversals assumed valid).
pub fn amalgam_over(
    shape: &Arc<Shape>,
    side1: &[Vec<u32>],
    side2: &[Vec<u32>],
    budget: Budget,
) -> Result<StableAmalgam, AmalgamError> {
    shape.check_budget(BigUint::from(side1.len()) * BigUint::from(side2.len()), budget)?;
    let gens1 = shape.g1.generators();
    let gens2 = shape.g2.generators();
    let words1 = words(&shape.g1, &gens1);
    let words2 = words(&shape.g2, &gens2);
    let k = gens1.len() + gens2.len();

    let mut raw_index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut raw_of_try: Vec<u32> = Vec::with_capacity(side1.len() * side2.len());
    let mut raws: Vec<Vec<Perm>> = Vec::new();
    for a in side1 {
        for b in side2 {
            let x = AmalgamTry::new_unchecked(shape.clone(), a.clone(), b.clone());
            let perms: Vec<Perm> =
                gens1.iter().map(|&g| x.perm(1, g)).chain(gens2.iter().map(|&g| x.perm(2, g))).collect();
            let key: Vec<u32> = perms.iter().flat_map(|p| p.images().iter().copied()).collect();
            let next = raws.len() as u32;
            let id = *raw_index.entry(key).or_insert_with(|| {
                raws.push(perms);
                next
            });
            raw_of_try.push(id);
        }
    }

    // Canonical form of each distinct action; orbit by orbit.
    let mut forms: Vec<Vec<u32>> = Vec::new();
    let mut raw_forms: Vec<Vec<usize>> = Vec::with_capacity(raws.len());
    let mut form_index: HashMap<Vec<u32>, usize> = HashMap::new();
    for perms in &raws {
        let deg = perms.first().map_or(shape.triples_per_try(), |p| p.degree());
        let mut mine = Vec::new();
        for orb in orbits(deg, perms) {
            if orb.len() == 1 {
                continue;
            }
            let f = action_canon(perms, &orb);
            let next = forms.len();
            let id = *form_index.entry(f.clone()).or_insert_with(|| {
                forms.push(f);
                next
            });
            mine.push(id);
        }
        raw_forms.push(mine);
    }
    let marked = if k == 0 { MarkedGroup::new(&[]) } else { MarkedGroup::from_forms(k, &forms) };
    let mut sorted: Vec<&Vec<u32>> = forms.iter().collect();
    sorted.sort();
    let rank: HashMap<&Vec<u32>, u32> = sorted.iter().enumerate().map(|(i, f)| (*f, i as u32)).collect();
    let constituent_of: Vec<u32> = raw_of_try
        .iter()
        .map(|&r| raw_forms[r as usize].first().map_or(0, |&f| rank[&forms[f]]))
        .collect();

    let (n0, n1, n2) = (shape.g0.order(), shape.g1.order(), shape.g2.order());
    let mut try_orders = Vec::new();
    let mut within_bound = true;
    for f in &sorted {
        let m = MarkedGroup::from_forms(k, std::slice::from_ref(*f));
        let o = m.order();
        within_bound &= within_try_bound(&o, n0, n1, n2);
        try_orders.push(o);
    }
    // Tries whose triple space has several orbits: the product over orbits
    // is still bounded by the per-try bound, so check it too.
    for forms_of_raw in &raw_forms {
        if forms_of_raw.len() > 1 {
            let fs: Vec<Vec<u32>> = forms_of_raw.iter().map(|&i| forms[i].clone()).collect();
            within_bound &= within_try_bound(&MarkedGroup::from_forms(k, &fs).order(), n0, n1, n2);
        }
    }

    let order = marked.order();
    let mut sa = StableAmalgam {
        shape: shape.clone(),
        gens1,
        words1,
        gens2,
        words2,
        marked,
        order,
        table: None,
        certificate: Certificate { tries: raw_of_try.len(), constituent_of, try_orders, within_bound },
    };
    if sa.order <= BigUint::from(TABLE_LIMIT) {
        let all: Vec<Perm> =
            shape.g1.elements().map(|g| sa.image1(g)).chain(shape.g2.elements().map(|g| sa.image2(g))).collect();
        let chain = sa.marked.chain();
        let t = PermTable::new(&all, chain, TABLE_LIMIT).expect("order checked");
        let m1: Vec<u32> = all[..n1].iter().map(|p| t.label(p).expect("member")).collect();
        let m2: Vec<u32> = all[n1..].iter().map(|p| t.label(p).expect("member")).collect();
        let j1 = Embedding::new(&shape.g1, &t.group, m1)?;
        let j2 = Embedding::new(&shape.g2, &t.group, m2)?;
        sa.table = Some(Tabled { group: t.group, j1, j2 });
    }
    Ok(sa)
}

/// Convenience: the shape from groups and embeddings, then its amalgam.
pub fn stable_amalgam_of(
    g0: &Group,
    g1: &Group,
    g2: &Group,
    emb1: &Embedding,
    emb2: &Embedding,
    budget: Budget,
) -> Result<StableAmalgam, AmalgamError> {
    let shape = Shape::new(g0.clone(), g1.clone(), g2.clone(), emb1.clone(), emb2.clone())?;
    stable_amalgam(&shape, budget)
}

/// Pairs of base embeddings G0 -> G1, G0 -> G2 up to automorphisms of all
/// three groups; each class is represented by its lexicographically least
/// member (G0 automorphism applied first).
pub fn embedding_configurations(g0: &Group, g1: &Group, g2: &Group) -> Vec<(Embedding, Embedding)> {
    let a0 = crate::group::automorphisms(g0);
    let a1 = crate::group::automorphisms(g1);
    let a2 = crate::group::automorphisms(g2);
    let e1s = crate::group::enumerate_embeddings(g0, g1);
    let e2s = crate::group::enumerate_embeddings(g0, g2);
    let least = |e: &Embedding, beta: &Embedding, auts: &[Embedding]| -> Vec<u32> {
        auts.iter().map(|a| beta.map.iter().map(|&x| a.apply(e.apply(x))).collect::<Vec<u32>>()).min().expect("identity")
    };
    let mut seen: HashSet<(Vec<u32>, Vec<u32>)> = HashSet::new();
    let mut out = Vec::new();
    for e1 in &e1s {
        for e2 in &e2s {
            let key = a0.iter().map(|b| (least(e1, b, &a1), least(e2, b, &a2))).min().expect("identity");
            if seen.insert(key.clone()) {
                out.push((
                    Embedding { map: key.0, target_order: g1.order() },
                    Embedding { map: key.1, target_order: g2.order() },
                ));
            }
        }
    }
    out.sort_by(|a, b| (&a.0.map, &a.1.map).cmp(&(&b.0.map, &b.1.map)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawEntry {
    pub law: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub entries: Vec<LawEntry>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    fn push(&mut self, law: &'static str, pass: bool, detail: impl Into<String>) {
        self.entries.push(LawEntry { law, pass, detail: detail.into() });
    }
}

#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct LawOptions {
    pub budget: Budget,
    pub seed: u64,
}


fn sub_shape(shape: &Shape, h1: &Subgroup, h2: &Subgroup) -> Result<(Arc<Shape>, Embedding, Embedding), AmalgamError> {
    let (s1, in1) = shape.g1.subgroup_as_group(h1);
    let (s2, in2) = shape.g2.subgroup_as_group(h2);
    let pre1 = in1.preimages();
    let pre2 = in2.preimages();
    let e1: Vec<u32> = shape.g0.elements().map(|x| pre1[shape.emb1.apply(x) as usize].expect("contains base")).collect();
    let e2: Vec<u32> = shape.g0.elements().map(|x| pre2[shape.emb2.apply(x) as usize].expect("contains base")).collect();
    let e1 = Embedding::new(&shape.g0, &s1, e1)?;
    let e2 = Embedding::new(&shape.g0, &s2, e2)?;
    Ok((Shape::new(shape.g0.clone(), s1, s2, e1, e2)?, in1, in2))
}

/// Smallest proper intermediate subgroup ⟨G0, g⟩, if any.
fn intermediate(g: &Group, base: &Subgroup) -> Option<Subgroup> {
    for x in g.elements() {
        if base.contains(x) {
            continue;
        }
        let mut gens = base.members().to_vec();
        gens.push(x);
        let h = generated_subgroup(g, &gens).expect("in range");
        if h.order() < g.order() {
            return Some(h);
        }
    }
    None
}

fn random_relabel(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    use rand::seq::SliceRandom;
    let mut rest: Vec<u32> = (1..n as u32).collect();
    rest.shuffle(rng);
    std::iter::once(0).chain(rest).collect()
}

/// Checks disjointness, the per-try intersection law, symmetry,
/// monotonicity under intermediate subgroups, and uniqueness under relabeling.
pub fn verify_nf_laws(sa: &StableAmalgam, opts: LawOptions) -> LawReport {
    let mut rep = LawReport::default();
    let shape = &sa.shape;
    let all1: Vec<u32> = shape.g1.elements().collect();
    let all2: Vec<u32> = shape.g2.elements().collect();

    let p1: Vec<Perm> = all1.iter().map(|&g| sa.image1(g)).collect();
    let p2: Vec<Perm> = all2.iter().map(|&g| sa.image2(g)).collect();
    rep.push("disjointness", intersection_law(shape, &p1, &p2), "j1(G1) ∩ j2(G2) = j(G0) in G3");

    let mut bad_try = None;
    for (t, x) in enumerate_tries(shape).enumerate() {
        let q1: Vec<Perm> = all1.iter().map(|&g| x.perm(1, g)).collect();
        let q2: Vec<Perm> = all2.iter().map(|&g| x.perm(2, g)).collect();
        if !intersection_law(shape, &q1, &q2) {
            bad_try = Some(t);
            break;
        }
    }
    rep.push(
        "intersection",
        bad_try.is_none(),
        match bad_try {
            Some(t) => format!("fails in try {t}"),
            None => format!("holds in all {} tries", sa.certificate.tries),
        },
    );

    let g1g = &sa.gens1;
    let g2g = &sa.gens2;
    let mine = sa.marked_images(g1g, g2g);

    match stable_amalgam(&shape.swapped(), opts.budget) {
        Ok(sw) => {
            let gens: Vec<Perm> =
                g1g.iter().map(|&g| sw.image2(g)).chain(g2g.iter().map(|&g| sw.image1(g))).collect();
            let theirs = MarkedGroup::new(&gens);
            let pass = mine.same_as(&theirs);
            rep.push("symmetry", pass, format!("|G3| = {}, swapped |G3| = {}", sa.order, sw.order));
        }
        Err(e) => rep.push("symmetry", false, e.to_string()),
    }

    let base1 = shape.emb1.image();
    let base2 = shape.emb2.image();
    let full1 = Subgroup::whole(&shape.g1);
    let full2 = Subgroup::whole(&shape.g2);
    let mut pairs: Vec<(Subgroup, Subgroup)> = vec![(base1.clone(), full2.clone()), (full1.clone(), base2.clone())];
    let mid1 = intermediate(&shape.g1, &base1);
    let mid2 = intermediate(&shape.g2, &base2);
    if let Some(m) = &mid1 {
        pairs.push((m.clone(), full2.clone()));
    }
    if let Some(m) = &mid2 {
        pairs.push((full1.clone(), m.clone()));
    }
    if let (Some(a), Some(b)) = (&mid1, &mid2) {
        pairs.push((a.clone(), b.clone()));
    }
    let mut mono_ok = true;
    let mut mono_detail = Vec::new();
    for (h1, h2) in &pairs {
        let res = sub_shape(shape, h1, h2).and_then(|(sh, in1, in2)| {
            let sub = stable_amalgam(&sh, opts.budget)?;
            let s1 = sh.g1.generators();
            let s2 = sh.g2.generators();
            let inside = sa.marked_images(
                &s1.iter().map(|&g| in1.apply(g)).collect::<Vec<_>>(),
                &s2.iter().map(|&g| in2.apply(g)).collect::<Vec<_>>(),
            );
            let outside = sub.marked_images(&s1, &s2);
            Ok((inside.same_as(&outside), sub.order.clone()))
        });
        match res {
            Ok((ok, o)) => {
                mono_ok &= ok;
                mono_detail.push(format!("({},{})->{}{}", h1.order(), h2.order(), o, if ok { "" } else { " MISMATCH" }));
            }
            Err(e) => {
                mono_ok = false;
                mono_detail.push(format!("({},{}) {e}", h1.order(), h2.order()));
            }
        }
    }
    rep.push("monotonicity", mono_ok, mono_detail.join(", "));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sig0 = random_relabel(shape.g0.order(), &mut rng);
    let sig1 = random_relabel(shape.g1.order(), &mut rng);
    let sig2 = random_relabel(shape.g2.order(), &mut rng);
    let r0 = shape.g0.relabel(&sig0);
    let r1 = shape.g1.relabel(&sig1);
    let r2 = shape.g2.relabel(&sig2);
    let mut e1 = vec![0u32; shape.g0.order()];
    let mut e2 = vec![0u32; shape.g0.order()];
    for x in shape.g0.elements() {
        e1[sig0[x as usize] as usize] = sig1[shape.emb1.apply(x) as usize];
        e2[sig0[x as usize] as usize] = sig2[shape.emb2.apply(x) as usize];
    }
    let res = Embedding::new(&r0, &r1, e1)
        .and_then(|a| Embedding::new(&r0, &r2, e2).map(|b| (a, b)))
        .map_err(AmalgamError::from)
        .and_then(|(a, b)| stable_amalgam_of(&r0, &r1, &r2, &a, &b, opts.budget));
    match res {
        Ok(other) => {
            let m1: Vec<u32> = g1g.iter().map(|&g| sig1[g as usize]).collect();
            let m2: Vec<u32> = g2g.iter().map(|&g| sig2[g as usize]).collect();
            let pass = mine.same_as(&other.marked_images(&m1, &m2));
            rep.push("uniqueness", pass, format!("relabeled |G3| = {}", other.order));
        }
        Err(e) => rep.push("uniqueness", false, e.to_string()),
    }
    rep
}

/// Outcome of comparing actual commutation with the predicted criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommuteCheck {
    pub commute: bool,
    pub a_centralizes_base: bool,
    pub b_centralizes_base: bool,
    pub base_abelian: bool,
}

impl CommuteCheck {
    pub fn predicted(&self) -> bool {
        self.a_centralizes_base && self.b_centralizes_base && self.base_abelian
    }

    pub fn consistent(&self) -> bool {
        self.commute == self.predicted()
    }
}

/// Do j1(a), j2(b) commute in G3, and does that match "a, b centralize the
/// base and the base is abelian"?
pub fn commuting_characterization(sa: &StableAmalgam, a: u32, b: u32) -> Result<CommuteCheck, AmalgamError> {
    let s = &sa.shape;
    if a as usize >= s.g1.order() || b as usize >= s.g2.order() {
        return Err(GroupError::IndexOutOfRange(a.max(b) as usize).into());
    }
    if s.emb1.image().contains(a) {
        return Err(AmalgamError::ElementInBase { side: 1, elem: a });
    }
    if s.emb2.image().contains(b) {
        return Err(AmalgamError::ElementInBase { side: 2, elem: b });
    }
    let pa = sa.image1(a);
    let pb = sa.image2(b);
    let commute = pa.then(&pb) == pb.then(&pa);
    let c1 = centralizer(&s.g1, s.emb1.image().members())?;
    let c2 = centralizer(&s.g2, s.emb2.image().members())?;
    Ok(CommuteCheck {
        commute,
        a_centralizes_base: c1.contains(a),
        b_centralizes_base: c2.contains(b),
        base_abelian: s.g0.is_abelian(),
    })
}

/// The union of side images as a set, for quick membership tests.
pub fn side_image_set(sa: &StableAmalgam) -> HashSet<Perm> {
    let s = &sa.shape;
    s.g1.elements().map(|g| sa.image1(g)).chain(s.g2.elements().map(|g| sa.image2(g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::group::{enumerate_embeddings, Subgroup};

    fn shape(g0: &Group, g1: &Group, g2: &Group) -> Arc<Shape> {
        let e1 = enumerate_embeddings(g0, g1).remove(0);
        let e2 = enumerate_embeddings(g0, g2).remove(0);
        Shape::new(g0.clone(), g1.clone(), g2.clone(), e1, e2).unwrap()
    }

    #[test]
    fn make_try_examples() {
        let z4 = Group::cyclic(4);
        let t = Group::trivial();
        let s = shape(&t, &z4, &z4);
        let x = make_try(&s, None, None).unwrap();
        assert_eq!(x.i1, vec![0, 1, 2, 3]);
        let s = shape(&z4, &z4, &z4);
        let x = make_try(&s, None, None).unwrap();
        assert_eq!((x.i1.clone(), x.i2.clone()), (vec![0], vec![0]));
        let z2 = Group::cyclic(2);
        let s = shape(&z2, &z4, &z4);
        assert_eq!(make_try(&s, Some(&[0, 2]), None).unwrap_err(), AmalgamError::NotATransversal { side: 1 });
        assert_eq!(make_try(&s, Some(&[0]), None).unwrap_err(), AmalgamError::NotATransversal { side: 1 });
        assert_eq!(make_try(&s, Some(&[2, 3]), None).unwrap_err(), AmalgamError::IdentityNotRepresentative { side: 1 });
        assert!(make_try(&s, Some(&[0, 3]), Some(&[0, 1])).is_ok());
    }

    #[test]
    fn j_action_examples() {
        let z2 = Group::cyclic(2);
        let t = Group::trivial();
        let s = shape(&t, &z2, &z2);
        let x = make_try(&s, None, None).unwrap();
        assert_eq!(x.j_action(1, 1, (0, 0, 0)), (0, 1, 0));
        let d4 = corpus::dihedral(4);
        let s = shape(&z2, &d4, &d4);
        for x in enumerate_tries(&s) {
            for u in x.triples() {
                for l in 0..3u8 {
                    assert_eq!(x.j_action(l, 0, u), u);
                }
                assert_eq!(x.j_action(0, 1, u), (1 - u.0, u.1, u.2));
            }
        }
    }

    #[test]
    fn gx_examples() {
        let t = Group::trivial();
        let s = shape(&t, &t, &t);
        let g = build_gx(&make_try(&s, None, None).unwrap(), Budget::default()).unwrap();
        assert_eq!(g.order, BigUint::one());
        let z2 = Group::cyclic(2);
        let s = shape(&t, &z2, &z2);
        let g = build_gx(&make_try(&s, None, None).unwrap(), Budget::default()).unwrap();
        assert_eq!(g.perms1[0].degree(), 4);
        let c = g.carrier.unwrap();
        assert_eq!(c.group.order(), 4);
        assert!(c.group.is_abelian());
        let z4 = Group::cyclic(4);
        let s = shape(&z2, &z4, &z4);
        for x in enumerate_tries(&s) {
            let g = build_gx(&x, Budget::default()).unwrap();
            assert!(g.intersection_law(&s));
        }
    }

    #[test]
    fn perm_matches_j_action() {
        let z2 = Group::cyclic(2);
        let s3 = corpus::symmetric3();
        let s = shape(&z2, &s3, &s3);
        for x in enumerate_tries(&s).take(5) {
            let tr = x.triples();
            for side in 0..3u8 {
                let g = if side == 0 { &s.g0 } else { &s3 };
                for h in g.elements() {
                    let p = x.perm(side, h);
                    for (i, &u) in tr.iter().enumerate() {
                        let v = x.j_action(side, h, u);
                        assert_eq!(p.apply(i as u32), x.triple_index(v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn try_counts() {
        let t = Group::trivial();
        let z2 = Group::cyclic(2);
        let z4 = Group::cyclic(4);
        assert_eq!(enumerate_tries(&shape(&t, &z4, &z4)).count(), 1);
        assert_eq!(enumerate_tries(&shape(&z2, &z4, &z4)).count(), 4);
        let d4 = corpus::dihedral(4);
        let s = shape(&z2, &z2, &d4);
        assert_eq!(enumerate_tries(&s).count(), 8);
        let a: Vec<_> = sample_tries(&s, 7, 5).into_iter().map(|x| x.i2).collect();
        let b: Vec<_> = sample_tries(&s, 7, 5).into_iter().map(|x| x.i2).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn stable_amalgam_examples() {
        let t = Group::trivial();
        let z2 = Group::cyclic(2);
        let z3 = Group::cyclic(3);
        let z4 = Group::cyclic(4);
        let sa = stable_amalgam(&shape(&t, &z2, &z3), Budget::default()).unwrap();
        let g3 = &sa.tabled().unwrap().group;
        assert_eq!(g3.order(), 6);
        assert!(g3.is_abelian());
        let sa = stable_amalgam(&shape(&z2, &z4, &z4), Budget::default()).unwrap();
        let g3 = &sa.tabled().unwrap().group;
        assert_eq!(g3.order(), 8);
        assert!(g3.is_abelian());
        assert_eq!(g3.elements().filter(|&x| g3.elem_order(x) == 4).count(), 4);
        let s3 = corpus::symmetric3();
        let sa = stable_amalgam(&shape(&s3, &s3, &corpus::product(&[s3.clone(), z2.clone()])), Budget::default()).unwrap();
        assert_eq!(sa.order_usize(), Some(12));
        assert!(sa.certificate.within_bound);
    }

    #[test]
    fn known_orders() {
        let z2 = Group::cyclic(2);
        let s3 = corpus::symmetric3();
        let d4 = corpus::dihedral(4);
        let sa = stable_amalgam(&shape(&z2, &s3, &s3), Budget::default()).unwrap();
        assert_eq!(sa.order(), &BigUint::from(88_179_840u64));
        let c = Embedding::new(&z2, &d4, vec![0, 2]).unwrap();
        let r = Embedding::new(&z2, &d4, vec![0, 4]).unwrap();
        let sh = Shape::new(z2.clone(), d4.clone(), d4.clone(), c.clone(), c.clone()).unwrap();
        assert_eq!(stable_amalgam(&sh, Budget::default()).unwrap().order_usize(), Some(32));
        let sh = Shape::new(z2.clone(), d4.clone(), d4.clone(), r.clone(), r).unwrap();
        assert_eq!(stable_amalgam(&sh, Budget::default()).unwrap().order_usize(), Some(6_291_456));
    }

    #[test]
    fn laws_small() {
        let t = Group::trivial();
        let z2 = Group::cyclic(2);
        let z3 = Group::cyclic(3);
        let z4 = Group::cyclic(4);
        for s in [shape(&t, &z2, &z3), shape(&z2, &z4, &z4), shape(&z2, &corpus::symmetric3(), &z4)] {
            let sa = stable_amalgam(&s, Budget::default()).unwrap();
            let rep = verify_nf_laws(&sa, LawOptions::default());
            assert!(rep.all_pass(), "{:?}", rep);
        }
    }

    #[test]
    fn degenerate_side() {
        let z2 = Group::cyclic(2);
        let d4 = corpus::dihedral(4);
        let sa = stable_amalgam(&shape(&z2, &z2, &d4), Budget::default()).unwrap();
        assert_eq!(sa.order_usize(), Some(8));
    }

    #[test]
    fn commuting_examples() {
        let t = Group::trivial();
        let z2 = Group::cyclic(2);
        let z3 = Group::cyclic(3);
        let sa = stable_amalgam(&shape(&t, &z2, &z3), Budget::default()).unwrap();
        let c = commuting_characterization(&sa, 1, 2).unwrap();
        assert!(c.commute && c.consistent());
        assert_eq!(commuting_characterization(&sa, 0, 1), Err(AmalgamError::ElementInBase { side: 1, elem: 0 }));
        let s3 = corpus::symmetric3();
        let s3z2 = corpus::product(&[s3.clone(), z2.clone()]);
        // S3 x Z2 with S3 sitting at indices a*2.
        let emb = Embedding::new(&s3, &s3z2, (0..6).map(|x| x * 2).collect()).unwrap();
        let sh = Shape::new(s3.clone(), s3z2.clone(), s3z2.clone(), emb.clone(), emb).unwrap();
        let sa = stable_amalgam(&sh, Budget::default()).unwrap();
        let c = commuting_characterization(&sa, 1, 1).unwrap();
        assert!(c.a_centralizes_base && c.b_centralizes_base && !c.base_abelian);
        assert!(!c.commute && c.consistent());
        let s = shape(&z2, &s3, &s3);
        let sa = stable_amalgam(&s, Budget::default()).unwrap();
        let c = commuting_characterization(&sa, 4, 4).unwrap();
        assert!(!c.commute && c.consistent());
        let _ = Subgroup::trivial();
    }

    #[test]
    fn budget_refusal() {
        let z2 = Group::cyclic(2);
        let d4 = corpus::dihedral(4);
        let s = shape(&z2, &d4, &d4);
        let tiny = Budget { triples_per_try: 20_000, product_points: 10 };
        match stable_amalgam(&s, tiny) {
            Err(AmalgamError::BudgetExceeded(r)) => {
                assert_eq!(r.points, BigUint::from(64u32 * 32));
                assert!(r.log_log_bound > 0.0);
            }
            _ => panic!("expected refusal"),
        }
    }

    #[test]
    fn bound_is_loose() {
        assert!(within_try_bound(&BigUint::from(88_179_840u64), 2, 6, 6));
        assert!(!within_try_bound(&BigUint::from(3u32), 1, 1, 1));
        assert!(within_try_bound(&BigUint::one(), 1, 1, 1));
    }
}
