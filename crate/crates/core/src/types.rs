//! Quantifier-free types of tuples over a parameter subgroup, represented by
//! the marked subgroup they generate.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use thiserror::Error;

use crate::group::{Group, GroupTerm, Subgroup, Sym};
use crate::perm::{MarkedGroup, Perm, StabChain};

/// Marked groups up to this order get a Cayley-graph canonical form;
/// larger ones are compared through their permutation generators.
pub const CANON_LIMIT: usize = 1 << 17;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("index {0} out of range")]
    IndexOutOfRange(u32),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("types are over different parameter sets")]
    BaseMismatch,
    #[error("parameter set of order {0} is too large to canonicalize")]
    BaseTooLarge(usize),
}

/// Breadth-first numbering of a marked group from the identity, generators
/// tried in order, plus the labels of every marked element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleyForm {
    pub n: usize,
    pub k: usize,
    pub right: Vec<u32>,
    pub marks: Vec<u32>,
}

impl CayleyForm {
    pub fn table(&self) -> Group {
        let t = crate::group::table_from_cayley(self.n, self.k, &self.right);
        Group::from_table_unchecked(self.n, t)
    }

    /// Generator word (slot list) reaching each label.
    fn words(&self) -> Vec<Vec<usize>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.n];
        words[0] = Some(Vec::new());
        let mut queue = vec![0usize];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for s in 0..self.k {
                let y = self.right[x * self.k + s] as usize;
                if words[y].is_none() {
                    let mut w = words[x].clone().expect("reached");
                    w.push(s);
                    words[y] = Some(w);
                    queue.push(y);
                }
            }
            i += 1;
        }
        words.into_iter().map(|w| w.expect("connected")).collect()
    }

    fn walk(&self, mut x: u32, word: &[usize]) -> u32 {
        for &s in word {
            x = self.right[x as usize * self.k + s];
        }
        x
    }
}

fn bfs<S: Clone + Eq + Hash>(
    id: S,
    k: usize,
    step: impl Fn(&S, usize) -> S,
    limit: usize,
) -> Option<(Vec<u32>, HashMap<S, u32>)> {
    let mut states = vec![id.clone()];
    let mut index = HashMap::new();
    index.insert(id, 0u32);
    let mut right = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for s in 0..k {
            let y = step(&states[i], s);
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
    Some((right, index))
}

/// The parameter list as a marked group (every listed element is a
/// generator), plus a greedy generating subset chosen by list position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseForm {
    pub form: CayleyForm,
    pub gen_positions: Vec<usize>,
}

impl BaseForm {
    fn from_form(form: CayleyForm) -> BaseForm {
        let k = form.k;
        let mut span = vec![false; form.n];
        span[0] = true;
        let mut gens: Vec<usize> = Vec::new();
        for (pos, &label) in form.marks.iter().enumerate() {
            if span[label as usize] {
                continue;
            }
            gens.push(pos);
            let mut stack: Vec<u32> = (0..form.n as u32).filter(|&x| span[x as usize]).collect();
            while let Some(x) = stack.pop() {
                for &g in &gens {
                    let y = form.right[x as usize * k + g];
                    if !span[y as usize] {
                        span[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
        }
        BaseForm { form, gen_positions: gens }
    }

    fn of_table(h: &Group, base: &[u32]) -> BaseForm {
        let (right, index) = bfs(0u32, base.len(), |&x, s| h.mul(x, base[s]), usize::MAX).expect("unbounded");
        let n = index.len();
        let marks = base.iter().map(|b| index[b]).collect();
        Self::from_form(CayleyForm { n, k: base.len(), right, marks })
    }

    fn of_perms(degree: usize, base: &[Perm]) -> Result<BaseForm, TypeError> {
        let id = Perm::identity(degree);
        let (right, index) = bfs(id, base.len(), |x, s| x.then(&base[s]), CANON_LIMIT)
            .ok_or(TypeError::BaseTooLarge(CANON_LIMIT))?;
        let n = index.len();
        let marks = base.iter().map(|b| index[b]).collect();
        Ok(Self::from_form(CayleyForm { n, k: base.len(), right, marks }))
    }
}

#[derive(Debug, Clone)]
pub enum TypeBody {
    Canonical(CayleyForm),
    Marked { base: Vec<Perm>, tuple: Vec<Perm> },
}

/// tp_bs(ā, A, H): the isomorphism class of ⟨A ∪ ā⟩ with A marked pointwise
/// and ā marked as a tuple.
#[derive(Debug, Clone)]
pub struct QfType {
    arity: usize,
    base: BaseForm,
    order: BigUint,
    body: TypeBody,
}

impl QfType {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base(&self) -> &BaseForm {
        &self.base
    }

    /// Order of the generated marked subgroup.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn canonical(&self) -> Option<&CayleyForm> {
        match &self.body {
            TypeBody::Canonical(c) => Some(c),
            TypeBody::Marked { .. } => None,
        }
    }

    fn marked_gens(&self) -> Vec<Perm> {
        match &self.body {
            TypeBody::Marked { base, tuple } => {
                self.base.gen_positions.iter().map(|&p| base[p].clone()).chain(tuple.iter().cloned()).collect()
            }
            TypeBody::Canonical(c) => {
                let t = c.table();
                let nb = self.base.form.marks.len();
                self.base
                    .gen_positions
                    .iter()
                    .map(|&p| c.marks[p])
                    .chain(c.marks[nb..].iter().copied())
                    .map(|x| t.regular_perm(x))
                    .collect()
            }
        }
    }

    /// Does σ(ā, params) = e hold, for a term whose variables are the tuple
    /// and whose constants index the base list?
    pub fn satisfies(&self, term: &GroupTerm) -> bool {
        match &self.body {
            TypeBody::Canonical(c) => {
                let t = c.table();
                let nb = self.base.form.marks.len();
                let args: Vec<u32> = c.marks[nb..].to_vec();
                let consts: Vec<u32> = c.marks[..nb].to_vec();
                term.eval_in(&t, &args, &consts) == 0
            }
            TypeBody::Marked { base, tuple } => {
                let degree = base.first().or(tuple.first()).map_or(0, |p| p.degree());
                let consts: Vec<Perm> = base.clone();
                let v = term.eval_in(&crate::perm::PermOps(degree), tuple, &consts);
                v.is_identity()
            }
        }
    }

    /// The type over the sub-list of base positions `positions`.
    pub fn restrict(&self, positions: &[usize]) -> QfType {
        match &self.body {
            TypeBody::Canonical(c) => {
                let words = c.words();
                let nb = self.base.form.marks.len();
                let base: Vec<u32> = positions.iter().map(|&p| c.marks[p]).collect();
                let tuple: Vec<u32> = c.marks[nb..].to_vec();
                let step = |&x: &u32, m: u32| c.walk(x, &words[m as usize]);
                let bf = {
                    let (right, index) = bfs(0u32, base.len(), |x, s| step(x, base[s]), usize::MAX).expect("unbounded");
                    let marks = base.iter().map(|b| index[b]).collect();
                    BaseForm::from_form(CayleyForm { n: index.len(), k: base.len(), right, marks })
                };
                let gens: Vec<u32> =
                    bf.gen_positions.iter().map(|&p| base[p]).chain(tuple.iter().copied()).collect();
                let (right, index) = bfs(0u32, gens.len(), |x, s| step(x, gens[s]), usize::MAX).expect("unbounded");
                let marks = base.iter().chain(&tuple).map(|b| index[b]).collect();
                let n = index.len();
                QfType {
                    arity: self.arity,
                    base: bf,
                    order: BigUint::from(n),
                    body: TypeBody::Canonical(CayleyForm { n, k: gens.len(), right, marks }),
                }
            }
            TypeBody::Marked { base, tuple } => {
                let b: Vec<Perm> = positions.iter().map(|&p| base[p].clone()).collect();
                tp_bs_perms(&b, tuple).expect("restriction of a valid base")
            }
        }
    }

    /// mtable block of ⟨A ∪ ā⟩ plus the label lists of A and of ā.
    pub fn to_text(&self) -> Option<String> {
        let c = self.canonical()?;
        let nb = self.base.form.marks.len();
        let mut s = crate::io::format_mtable(&c.table());
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("base: {}\n", join(&c.marks[..nb])));
        s.push_str(&format!("tuple: {}\n", join(&c.marks[nb..])));
        Some(s)
    }
}

impl PartialEq for QfType {
    fn eq(&self, other: &QfType) -> bool {
        types_equal(self, other).unwrap_or(false)
    }
}

fn check_range(h: &Group, xs: &[u32]) -> Result<(), TypeError> {
    match xs.iter().find(|&&x| x as usize >= h.order()) {
        Some(&x) => Err(TypeError::IndexOutOfRange(x)),
        None => Ok(()),
    }
}

pub fn tp_bs(h: &Group, tuple: &[u32], a: &Subgroup) -> Result<QfType, TypeError> {
    tp_bs_list(h, tuple, a.members())
}

/// Type over an ordered parameter list; position i is parameter i.
pub fn tp_bs_list(h: &Group, tuple: &[u32], base: &[u32]) -> Result<QfType, TypeError> {
    check_range(h, tuple)?;
    check_range(h, base)?;
    let bf = BaseForm::of_table(h, base);
    let gens: Vec<u32> = bf.gen_positions.iter().map(|&p| base[p]).chain(tuple.iter().copied()).collect();
    let (right, index) = bfs(0u32, gens.len(), |&x, s| h.mul(x, gens[s]), usize::MAX).expect("unbounded");
    let marks = base.iter().chain(tuple).map(|b| index[b]).collect();
    let n = index.len();
    Ok(QfType {
        arity: tuple.len(),
        base: bf,
        order: BigUint::from(n),
        body: TypeBody::Canonical(CayleyForm { n, k: gens.len(), right, marks }),
    })
}

/// Type of a tuple of permutations over a list of permutations.
pub fn tp_bs_perms(base: &[Perm], tuple: &[Perm]) -> Result<QfType, TypeError> {
    let degree = base.first().or(tuple.first()).map_or(0, |p| p.degree());
    let bf = BaseForm::of_perms(degree, base)?;
    let gens: Vec<Perm> = bf.gen_positions.iter().map(|&p| base[p].clone()).chain(tuple.iter().cloned()).collect();
    let chain = StabChain::new(degree, &gens);
    let order = chain.order();
    let small = order <= BigUint::from(CANON_LIMIT);
    let body = if small {
        let pts = chain.base();
        let key = |p: &Perm| -> Vec<u32> { pts.iter().map(|&b| p.apply(b)).collect() };
        let (right, index) =
            bfs(pts.clone(), gens.len(), |x, s| x.iter().map(|&b| gens[s].apply(b)).collect(), usize::MAX)
                .expect("unbounded");
        let marks = base.iter().chain(tuple).map(|p| index[&key(p)]).collect();
        TypeBody::Canonical(CayleyForm { n: index.len(), k: gens.len(), right, marks })
    } else {
        TypeBody::Marked { base: base.to_vec(), tuple: tuple.to_vec() }
    };
    Ok(QfType { arity: tuple.len(), base: bf, order, body })
}

pub fn types_equal(p: &QfType, q: &QfType) -> Result<bool, TypeError> {
    if p.arity != q.arity {
        return Err(TypeError::ArityMismatch(p.arity, q.arity));
    }
    if p.base != q.base {
        return Err(TypeError::BaseMismatch);
    }
    if p.order != q.order {
        return Ok(false);
    }
    Ok(match (&p.body, &q.body) {
        (TypeBody::Canonical(a), TypeBody::Canonical(b)) => a == b,
        (TypeBody::Marked { .. }, TypeBody::Marked { .. }) => {
            MarkedGroup::new(&p.marked_gens()).same_as(&MarkedGroup::new(&q.marked_gens()))
        }
        _ => false,
    })
}

/// A pair of tuples from G with the same type over K whose joint types
/// with ā over K differ, and a term telling them apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWitness {
    pub m: usize,
    pub b1: Vec<u32>,
    pub b2: Vec<u32>,
    /// Vanishes at exactly one of b1, b2; constants are element indices of H.
    pub reason: GroupTerm,
    pub vanishes_at_first: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Split {
    DoesNotSplit,
    Witness(SplitWitness),
}

impl Split {
    pub fn holds(&self) -> bool {
        matches!(self, Split::DoesNotSplit)
    }
}

fn tuples(members: &[u32], m: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                members.iter().map(move |&x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// Searches m ≤ m_max for tuples of G agreeing over K but not over K ∪ ā.
pub fn does_not_split(h: &Group, a: &[u32], g: &Subgroup, k: &Subgroup, m_max: usize) -> Result<Split, TypeError> {
    check_range(h, a)?;
    check_range(h, g.members())?;
    check_range(h, k.members())?;
    for m in 1..=m_max {
        let all = tuples(g.members(), m);
        let mut classes: HashMap<CayleyForm, Vec<usize>> = HashMap::new();
        for (i, b) in all.iter().enumerate() {
            let t = tp_bs(h, b, k)?;
            classes.entry(t.canonical().expect("table types are canonical").clone()).or_default().push(i);
        }
        let mut best: Option<(usize, usize)> = None;
        for members in classes.values() {
            if members.len() < 2 {
                continue;
            }
            let first = members[0];
            let joint = |i: usize| -> Result<CayleyForm, TypeError> {
                let mut t = all[i].clone();
                t.extend_from_slice(a);
                Ok(tp_bs(h, &t, k)?.canonical().expect("canonical").clone())
            };
            let j0 = joint(first)?;
            for &other in &members[1..] {
                if joint(other)? != j0 {
                    if best.is_none_or(|bst| (first, other) < bst) {
                        best = Some((first, other));
                    }
                    break;
                }
            }
        }
        if let Some((i, j)) = best {
            let (reason, vanishes_at_first) = distinguishing_term(h, &all[i], &all[j], a, k);
            return Ok(Split::Witness(SplitWitness { m, b1: all[i].clone(), b2: all[j].clone(), reason, vanishes_at_first }));
        }
    }
    Ok(Split::DoesNotSplit)
}

/// Shortest word in (K-generators, b̄, ā) that is trivial at exactly one of
/// b1, b2; found by breadth-first search in the diagonal group.
fn distinguishing_term(h: &Group, b1: &[u32], b2: &[u32], a: &[u32], k: &Subgroup) -> (GroupTerm, bool) {
    let kg = h.generators_of(k.members());
    let m = b1.len();
    let mut letters: Vec<(Sym, u32, u32)> = Vec::new();
    for &x in &kg {
        letters.push((Sym::Const(x), x, x));
    }
    for i in 0..m {
        letters.push((Sym::Var(i), b1[i], b2[i]));
    }
    for &x in a {
        letters.push((Sym::Const(x), x, x));
    }
    let mut parent: HashMap<(u32, u32), Option<((u32, u32), usize)>> = HashMap::new();
    parent.insert((0, 0), None);
    let mut queue = vec![(0u32, 0u32)];
    let mut i = 0;
    while i < queue.len() {
        let (x, y) = queue[i];
        for (li, &(_, l1, l2)) in letters.iter().enumerate() {
            let next = (h.mul(x, l1), h.mul(y, l2));
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some(((x, y), li)));
            if (next.0 == 0) != (next.1 == 0) {
                let mut word = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, li))) = parent.get(&cur) {
                    word.push((letters[*li].0, false));
                    cur = *prev;
                }
                word.reverse();
                return (GroupTerm { arity: m, word }, next.0 == 0);
            }
            queue.push(next);
        }
        i += 1;
    }
    unreachable!("tuples with different joint types are separated by some word")
}

/// Result of checking that every small tuple of H has a catalog-definable
/// type over G.
#[derive(Debug, Clone)]
pub struct DefinabilityReport {
    pub checked: usize,
    pub undefinable: Vec<Vec<u32>>,
}

impl DefinabilityReport {
    pub fn holds(&self) -> bool {
        self.undefinable.is_empty()
    }
}

/// For each c̄ ∈ H^n with n ≤ n_max, is tp_bs(c̄, G, H) the type over G of
/// some n-tuple generated over G by a catalog realization s(G, ā)? Tuples
/// inside G are definable outright. Types of tuples in the closure of a
/// scheme realization count as definable (the catalog is taken closed
/// under domination).
pub fn check_extension_definable(
    g: &Group,
    h: &Group,
    emb: &crate::group::Embedding,
    catalog: &[crate::schemes::Scheme],
    n_max: usize,
) -> DefinabilityReport {
    let base: Vec<u32> = g.elements().map(|x| emb.apply(x)).collect();
    let in_g = emb.image();
    let mut report = DefinabilityReport { checked: 0, undefinable: Vec::new() };
    for n in 1..=n_max {
        let mut realizable: Vec<CayleyForm> = Vec::new();
        for s in catalog {
            for params in s.parameter_tuples(g) {
                if let Ok(ext) = s.apply(g, &params) {
                    let hb: Vec<u32> = g.elements().map(|x| ext.j0.apply(x)).collect();
                    let elems: Vec<u32> = ext.group.elements().collect();
                    for d in tuples(&elems, n) {
                        let t = tp_bs_list(&ext.group, &d, &hb).expect("in range");
                        realizable.push(t.canonical().expect("canonical").clone());
                    }
                }
            }
        }
        realizable.sort_by(|a, b| a.right.cmp(&b.right).then(a.marks.cmp(&b.marks)));
        realizable.dedup();
        let hel: Vec<u32> = h.elements().collect();
        for c in tuples(&hel, n) {
            report.checked += 1;
            if c.iter().all(|&x| in_g.contains(x)) {
                continue;
            }
            let t = tp_bs_list(h, &c, &base).expect("in range");
            let f = t.canonical().expect("canonical");
            if !realizable.iter().any(|r| r == f) {
                report.undefinable.push(c);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generated_subgroup, Subgroup};
    use proptest::prelude::*;

    fn v4() -> Group {
        Group::direct_product(&Group::cyclic(2), &Group::cyclic(2))
    }

    #[test]
    fn empty_tuple_is_type_of_base() {
        let z4 = Group::cyclic(4);
        let a = generated_subgroup(&z4, &[2]).unwrap();
        let p = tp_bs(&z4, &[], &a).unwrap();
        let q = tp_bs(&z4, &[], &a).unwrap();
        assert!(types_equal(&p, &q).unwrap());
        assert_eq!(p.order(), &BigUint::from(2u32));
    }

    #[test]
    fn z4_generators() {
        let z4 = Group::cyclic(4);
        let e = Subgroup::trivial();
        assert!(types_equal(&tp_bs(&z4, &[1], &e).unwrap(), &tp_bs(&z4, &[3], &e).unwrap()).unwrap());
        let all = Subgroup::whole(&z4);
        assert!(!types_equal(&tp_bs(&z4, &[1], &all).unwrap(), &tp_bs(&z4, &[3], &all).unwrap()).unwrap());
    }

    #[test]
    fn equality_examples() {
        let s3 = crate::corpus::symmetric3();
        let e = Subgroup::trivial();
        let p = tp_bs(&s3, &[1], &e).unwrap();
        assert!(types_equal(&p, &p).unwrap());
        assert!(types_equal(&p, &tp_bs(&s3, &[2], &e).unwrap()).unwrap());
        let r = tp_bs(&s3, &[4], &e).unwrap();
        assert!(!types_equal(&p, &r).unwrap());
        let two = tp_bs(&s3, &[1, 2], &e).unwrap();
        assert_eq!(types_equal(&p, &two), Err(TypeError::ArityMismatch(1, 2)));
        let other = tp_bs(&s3, &[1], &generated_subgroup(&s3, &[4]).unwrap()).unwrap();
        assert_eq!(types_equal(&p, &other), Err(TypeError::BaseMismatch));
    }

    #[test]
    fn split_examples() {
        let g = v4();
        // u = 2 (first factor), v = 1 (second factor).
        let w = does_not_split(&g, &[2], &Subgroup::whole(&g), &Subgroup::trivial(), 1).unwrap();
        match w {
            Split::Witness(w) => {
                assert_eq!(w.m, 1);
                assert_eq!((w.b1.clone(), w.b2.clone()), (vec![1], vec![2]));
                let v1 = crate::group::eval_term(&g, &w.reason, &w.b1).unwrap();
                let v2 = crate::group::eval_term(&g, &w.reason, &w.b2).unwrap();
                assert_eq!((v1 == 0, v2 == 0), (w.vanishes_at_first, !w.vanishes_at_first));
            }
            Split::DoesNotSplit => panic!("expected a witness"),
        }
        let all = Subgroup::whole(&g);
        assert!(does_not_split(&g, &[2], &all, &all, 2).unwrap().holds());
    }

    #[test]
    fn perm_and_table_types_agree() {
        let s3 = crate::corpus::symmetric3();
        let base: Vec<u32> = vec![0, 4, 5];
        let t = tp_bs_list(&s3, &[1], &base).unwrap();
        let bp: Vec<Perm> = base.iter().map(|&x| s3.regular_perm(x)).collect();
        let u = tp_bs_perms(&bp, &[s3.regular_perm(1)]).unwrap();
        assert!(types_equal(&t, &u).unwrap());
        assert!(t.canonical().is_some() && u.canonical().is_some());
    }

    #[test]
    fn satisfies_reads_terms() {
        let z4 = Group::cyclic(4);
        let t = tp_bs(&z4, &[2], &Subgroup::trivial()).unwrap();
        let sq = GroupTerm::new(1, vec![(Sym::Var(0), false), (Sym::Var(0), false)]).unwrap();
        assert!(t.satisfies(&sq));
        let u = tp_bs(&z4, &[1], &Subgroup::trivial()).unwrap();
        assert!(!u.satisfies(&sq));
        let inv = GroupTerm::new(1, vec![(Sym::Var(0), false), (Sym::Var(0), true)]).unwrap();
        assert!(u.satisfies(&inv));
    }

    proptest! {
        #[test]
        fn relabeling_fixing_base_preserves_type(seed in 0u64..500, x in 0u32..8) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let g = crate::corpus::dihedral(4);
            let base = generated_subgroup(&g, &[g.generators()[0]]).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut movable: Vec<u32> = g.elements().filter(|&y| !base.contains(y)).collect();
            let orig = movable.clone();
            movable.shuffle(&mut rng);
            let mut sigma: Vec<u32> = g.elements().collect();
            for (a, b) in orig.iter().zip(&movable) { sigma[*a as usize] = *b; }
            let h = g.relabel(&sigma);
            let p = tp_bs(&g, &[x], &base).unwrap();
            let q = tp_bs(&h, &[sigma[x as usize]], &base).unwrap();
            prop_assert!(types_equal(&p, &q).unwrap());
        }

        #[test]
        fn restriction_matches_direct(x in 0u32..8, y in 0u32..8) {
            let g = crate::corpus::dihedral(4);
            let all: Vec<u32> = g.elements().collect();
            let sub = generated_subgroup(&g, &[y]).unwrap();
            let positions: Vec<usize> = sub.members().iter().map(|&m| m as usize).collect();
            let full = tp_bs_list(&g, &[x], &all).unwrap();
            let direct = tp_bs(&g, &[x], &sub).unwrap();
            prop_assert!(types_equal(&full.restrict(&positions), &direct).unwrap());
        }

        #[test]
        fn larger_m_never_clears_a_witness(x in 0u32..8) {
            let g = crate::corpus::dihedral(4);
            let whole = Subgroup::whole(&g);
            let e = Subgroup::trivial();
            let one = does_not_split(&g, &[x], &whole, &e, 1).unwrap();
            let two = does_not_split(&g, &[x], &whole, &e, 2).unwrap();
            prop_assert!(one.holds() || !two.holds());
        }
    }
}
