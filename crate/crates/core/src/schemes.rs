//! Scheme constructors and the sequential and independent products of
//! scheme-defined extensions.

use num_bigint::BigUint;
use thiserror::Error;

use crate::amalgam::{stable_amalgam, AmalgamError, Budget, Shape, StableAmalgam, TABLE_LIMIT};
use crate::group::{automorphisms, center, centralizer, generated_subgroup, Embedding, Group, GroupError};
use crate::perm::{Perm, PermTable, StabChain};
use crate::types::{tp_bs_list, tp_bs_perms, types_equal, QfType, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("parameter is not of order two")]
    ParameterNotOrderTwo,
    #[error("tuple does not list the group exactly once")]
    NotAFullListing,
    #[error("precondition failed: {0}")]
    PreconditionFailed(&'static str),
    #[error("no order-two automorphism swaps the tuples")]
    NoSwapRealization,
    #[error("expected {expected} parameters, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("extension of order {0} is too large to table")]
    TooLarge(BigUint),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("transposed construction gave a different joint type")]
    SymmetryCheckFailed,
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// An operational scheme: parameter arity, output arity, a parameter
/// constraint and a constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    Trivial,
    /// One involution conjugating G onto a commuting copy.
    Cg,
    /// Four such involutions whose product is the order-two parameter.
    Gl,
    /// A new central element of order k.
    Ab(usize),
    /// A new commuting copy of K, given by a listing of K.
    AbMarked { k: Group, listing: Vec<u32> },
    /// An involution swapping two commuting tuples of length m.
    Gm(usize),
}

/// A one-step extension: the new group, G inside it, and the realizing tuple.
#[derive(Debug, Clone)]
pub struct Extension {
    pub group: Group,
    pub j0: Embedding,
    pub tuple: Vec<u32>,
}

/// The same extension as permutations, without tabling.
#[derive(Debug, Clone)]
pub struct PermExtension {
    pub j0: Vec<Perm>,
    pub tuple: Vec<Perm>,
}

/// h_{ā,π} on G × n: (g, i) -> (g a_i, π(i)); point (g, i) is g*n + i.
pub fn wreath_perm(g: &Group, a: &[u32], pi: &[usize]) -> Perm {
    let n = pi.len();
    let mut img = vec![0u32; g.order() * n];
    for x in g.elements() {
        for i in 0..n {
            img[x as usize * n + i] = (g.mul(x, a[i]) as usize * n + pi[i]) as u32;
        }
    }
    Perm::from_images(img).expect("bijection")
}

/// j_i(x): acts on copy i only.
fn copy_perm(g: &Group, n: usize, i: usize, x: u32) -> Perm {
    let mut a = vec![0u32; n];
    a[i] = x;
    wreath_perm(g, &a, &(0..n).collect::<Vec<_>>())
}

fn table_extension(g: &Group, p: &PermExtension) -> Result<Extension, SchemeError> {
    let degree = p.j0.first().map_or(0, |x| x.degree());
    let gens: Vec<Perm> = p.j0.iter().chain(&p.tuple).cloned().collect();
    let chain = StabChain::new(degree, &gens);
    let order = chain.order();
    let t = PermTable::new(&gens, &chain, TABLE_LIMIT).ok_or(SchemeError::TooLarge(order))?;
    let m: Vec<u32> = p.j0.iter().map(|x| t.label(x).expect("member")).collect();
    let j0 = Embedding::new(g, &t.group, m)?;
    let tuple = p.tuple.iter().map(|x| t.label(x).expect("member")).collect();
    Ok(Extension { group: t.group, j0, tuple })
}

fn regular_product_perms(g: &Group, k: &Group) -> (Vec<Perm>, impl Fn(u32) -> Perm) {
    let gk = Group::direct_product(g, k);
    let nk = k.order() as u32;
    let j0: Vec<Perm> = g.elements().map(|x| gk.regular_perm(x * nk)).collect();
    (j0, move |c: u32| gk.regular_perm(c))
}

impl Scheme {
    pub fn id(&self) -> String {
        match self {
            Scheme::Trivial => "trivial".into(),
            Scheme::Cg => "cg".into(),
            Scheme::Gl => "gl".into(),
            Scheme::Ab(k) => format!("ab({k})"),
            Scheme::AbMarked { k, .. } => format!("ab_marked({})", k.order()),
            Scheme::Gm(m) => format!("gm({m})"),
        }
    }

    pub fn k_s(&self) -> usize {
        match self {
            Scheme::Gl => 1,
            Scheme::Gm(m) => 2 * m,
            _ => 0,
        }
    }

    pub fn n_s(&self) -> usize {
        match self {
            Scheme::Trivial => 0,
            Scheme::Gl => 4,
            Scheme::AbMarked { listing, .. } => listing.len(),
            _ => 1,
        }
    }

    /// Does `params` satisfy the parameter constraint in G?
    pub fn realizes_p(&self, g: &Group, params: &[u32]) -> bool {
        self.check_params(g, params).is_ok()
    }

    fn check_params(&self, g: &Group, params: &[u32]) -> Result<(), SchemeError> {
        if params.len() != self.k_s() {
            return Err(SchemeError::ArityMismatch { expected: self.k_s(), got: params.len() });
        }
        if let Some(&x) = params.iter().find(|&&x| x as usize >= g.order()) {
            return Err(GroupError::IndexOutOfRange(x as usize).into());
        }
        match self {
            Scheme::Gl if g.elem_order(params[0]) != 2 => Err(SchemeError::ParameterNotOrderTwo),
            Scheme::Gm(m) => gm_preconditions(g, &params[..*m], &params[*m..]),
            Scheme::AbMarked { k, listing } => {
                let mut l = listing.clone();
                l.sort_unstable();
                if l != k.elements().collect::<Vec<_>>() {
                    Err(SchemeError::NotAFullListing)
                } else {
                    Ok(())
                }
            }
            Scheme::Ab(k) if *k < 2 => Err(SchemeError::PreconditionFailed("k >= 2")),
            _ => Ok(()),
        }
    }

    /// All parameter tuples from G realizing the constraint, lexicographic.
    pub fn parameter_tuples(&self, g: &Group) -> Vec<Vec<u32>> {
        let k = self.k_s();
        let mut out = Vec::new();
        let mut t = vec![0u32; k];
        loop {
            if self.realizes_p(g, &t) {
                out.push(t.clone());
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                t[i] += 1;
                if (t[i] as usize) < g.order() {
                    break;
                }
                t[i] = 0;
            }
        }
    }

    /// The constructor as permutations of a regular-type action.
    pub fn realize_perms(&self, g: &Group, params: &[u32]) -> Result<PermExtension, SchemeError> {
        self.check_params(g, params)?;
        Ok(match self {
            Scheme::Trivial => PermExtension { j0: g.elements().map(|x| g.regular_perm(x)).collect(), tuple: vec![] },
            Scheme::Cg => {
                let j0 = g.elements().map(|x| copy_perm(g, 2, 0, x)).collect();
                PermExtension { j0, tuple: vec![wreath_perm(g, &[0, 0], &[1, 0])] }
            }
            Scheme::Gl => {
                let a = params[0];
                let j0 = g.elements().map(|x| copy_perm(g, 3, 0, x)).collect();
                let tuple = gl_elements(g, a);
                PermExtension { j0, tuple }
            }
            Scheme::Ab(k) => {
                let z = Group::cyclic(*k);
                let (j0, c) = regular_product_perms(g, &z);
                PermExtension { j0, tuple: vec![c(1)] }
            }
            Scheme::AbMarked { k, listing } => {
                let (j0, c) = regular_product_perms(g, k);
                PermExtension { j0, tuple: listing.iter().map(|&x| c(x)).collect() }
            }
            Scheme::Gm(m) => {
                let phi = swap_automorphism(g, &params[..*m], &params[*m..])?;
                // G ⋊ <φ> acting on itself: (x, s) is 2x + s.
                let n = g.order();
                let pw = |s: usize, y: u32| if s == 0 { y } else { phi.apply(y) };
                let j0 = g
                    .elements()
                    .map(|h| {
                        let img: Vec<u32> =
                            (0..2 * n).map(|p| (2 * g.mul((p / 2) as u32, pw(p % 2, h)) as usize + p % 2) as u32).collect();
                        Perm::from_images(img).expect("bijection")
                    })
                    .collect();
                let c: Vec<u32> = (0..2 * n as u32).map(|p| p ^ 1).collect();
                PermExtension { j0, tuple: vec![Perm::from_images(c).expect("bijection")] }
            }
        })
    }

    /// Applies the constructor and tables the result.
    pub fn apply(&self, g: &Group, params: &[u32]) -> Result<Extension, SchemeError> {
        let p = self.realize_perms(g, params)?;
        table_extension(g, &p)
    }

    /// q_s(ā, G) as a type over the listed elements of G.
    pub fn output_type(&self, g: &Group, params: &[u32]) -> Result<QfType, SchemeError> {
        let ext = self.apply(g, params)?;
        let base: Vec<u32> = g.elements().map(|x| ext.j0.apply(x)).collect();
        Ok(tp_bs_list(&ext.group, &ext.tuple, &base)?)
    }
}

fn gl_elements(g: &Group, a: u32) -> Vec<Perm> {
    let pis: [[usize; 3]; 4] = [[1, 0, 2], [2, 1, 0], [2, 1, 0], [1, 0, 2]];
    let abar: [[u32; 3]; 4] = [[a, a, 0], [a, 0, a], [0, 0, 0], [0, 0, a]];
    (0..4).map(|l| wreath_perm(g, &abar[l], &pis[l])).collect()
}

/// G inside G≀Z2 on G × 2, `a` the swap.
pub fn apply_cg(g: &Group) -> Result<Extension, SchemeError> {
    Scheme::Cg.apply(g, &[])
}

/// The three involution clauses, in order: a has order two; a commutes
/// with no nontrivial element of G; G and a⁻¹Ga commute elementwise.
pub fn cg_postconditions(g: &Group, ext: &Extension, a: u32) -> [bool; 3] {
    let h = &ext.group;
    let order_two = h.elem_order(a) == 2;
    let none_commute = g.elements().skip(1).all(|b| !h.commute(a, ext.j0.apply(b)));
    let conj_commutes = g.elements().all(|x| {
        let y = h.conj(ext.j0.apply(x), a);
        g.elements().all(|z| h.commute(y, ext.j0.apply(z)))
    });
    [order_two, none_commute, conj_commutes]
}

/// The four-involution construction on G × 3.
pub fn apply_gl(g: &Group, a: u32) -> Result<Extension, SchemeError> {
    if a as usize >= g.order() {
        return Err(GroupError::IndexOutOfRange(a as usize).into());
    }
    Scheme::Gl.apply(g, &[a])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlReport {
    /// c0 c1 c2 c3 equals j0(a) on every point of G × 3.
    pub product_is_a: bool,
    pub orders_two: bool,
    /// Each c_l has the type over G of the cg involution.
    pub each_realizes_cg: bool,
    pub a_in_span: bool,
}

impl GlReport {
    pub fn holds(&self) -> bool {
        self.product_is_a && self.orders_two && self.each_realizes_cg && self.a_in_span
    }
}

pub fn gl_postconditions(g: &Group, a: u32) -> Result<GlReport, SchemeError> {
    let cs = gl_elements(g, a);
    let prod = cs.iter().fold(Perm::identity(3 * g.order()), |acc, c| acc.then(c));
    let product_is_a = prod == copy_perm(g, 3, 0, a);
    let ext = apply_gl(g, a)?;
    let h = &ext.group;
    let orders_two = ext.tuple.iter().all(|&c| h.elem_order(c) == 2);
    let base: Vec<u32> = g.elements().map(|x| ext.j0.apply(x)).collect();
    let q_cg = Scheme::Cg.output_type(g, &[])?;
    let mut each_realizes_cg = true;
    for &c in &ext.tuple {
        each_realizes_cg &= types_equal(&tp_bs_list(h, &[c], &base)?, &q_cg)?;
    }
    let span = generated_subgroup(h, &ext.tuple)?;
    Ok(GlReport { product_is_a, orders_two, each_realizes_cg, a_in_span: span.contains(ext.j0.apply(a)) })
}

/// G × K with the K-factor listed by `listing`.
pub fn apply_ab(g: &Group, k: &Group, listing: &[u32]) -> Result<Extension, SchemeError> {
    let s = Scheme::AbMarked { k: k.clone(), listing: listing.to_vec() };
    let ext = s.apply(g, &[])?;
    let h = &ext.group;
    let img = ext.j0.image();
    let span = generated_subgroup(h, &ext.tuple)?;
    if !ext.tuple.iter().all(|&c| g.elements().all(|x| h.commute(c, ext.j0.apply(x)))) {
        return Err(SchemeError::PostconditionFailed("new tuple commutes with G".into()));
    }
    if span.intersect(&img).order() != 1 {
        return Err(SchemeError::PostconditionFailed("new tuple meets G".into()));
    }
    let want = tp_bs_list(k, listing, &[])?;
    if !types_equal(&tp_bs_list(h, &ext.tuple, &[])?, &want)? {
        return Err(SchemeError::PostconditionFailed("tuple type over the empty set".into()));
    }
    Ok(ext)
}

fn gm_preconditions(g: &Group, a1: &[u32], a2: &[u32]) -> Result<(), SchemeError> {
    if !types_equal(&tp_bs_list(g, a1, &[])?, &tp_bs_list(g, a2, &[])?)? {
        return Err(SchemeError::PreconditionFailed("equal types over the empty set"));
    }
    let s1 = generated_subgroup(g, a1)?;
    let s2 = generated_subgroup(g, a2)?;
    if !s1.members().iter().all(|&x| s2.members().iter().all(|&y| g.commute(x, y))) {
        return Err(SchemeError::PreconditionFailed("the two tuples commute"));
    }
    if s1.intersect(&s2).order() != 1 {
        return Err(SchemeError::PreconditionFailed("trivial intersection"));
    }
    let both: Vec<u32> = a1.iter().chain(a2).copied().collect();
    let (sub, _) = g.subgroup_as_group(&generated_subgroup(g, &both)?);
    if center(&sub).order() != 1 {
        return Err(SchemeError::PreconditionFailed("trivial center"));
    }
    Ok(())
}

/// An automorphism of order ≤ 2 exchanging the tuples and fixing their
/// centralizer pointwise; first in automorphism enumeration order.
pub fn swap_automorphism(g: &Group, a1: &[u32], a2: &[u32]) -> Result<Embedding, SchemeError> {
    let both: Vec<u32> = a1.iter().chain(a2).copied().collect();
    let cm = centralizer(g, &both)?;
    automorphisms(g)
        .into_iter()
        .find(|phi| {
            a1.iter().zip(a2).all(|(&x, &y)| phi.apply(x) == y && phi.apply(y) == x)
                && cm.members().iter().all(|&x| phi.apply(x) == x)
                && g.elements().all(|x| phi.apply(phi.apply(x)) == x)
        })
        .ok_or(SchemeError::NoSwapRealization)
}

/// The swap extension G ⋊ Z2 and its involution.
pub fn apply_gm(g: &Group, a1: &[u32], a2: &[u32]) -> Result<Extension, SchemeError> {
    if a1.len() != a2.len() {
        return Err(SchemeError::ArityMismatch { expected: a1.len(), got: a2.len() });
    }
    let params: Vec<u32> = a1.iter().chain(a2).copied().collect();
    Scheme::Gm(a1.len()).apply(g, &params)
}

/// A scheme with concrete parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefEntry {
    pub scheme: Scheme,
    pub params: Vec<u32>,
}

impl DefEntry {
    pub fn new(scheme: Scheme, params: Vec<u32>) -> DefEntry {
        DefEntry { scheme, params }
    }
}

/// All (s, ā) with s from the catalog and ā of length ≤ `param_bound`.
pub fn def_entries(g: &Group, catalog: &[Scheme], param_bound: usize) -> Vec<DefEntry> {
    catalog
        .iter()
        .filter(|s| s.k_s() <= param_bound)
        .flat_map(|s| s.parameter_tuples(g).into_iter().map(move |p| DefEntry::new(s.clone(), p)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct OplusResult {
    pub group: Group,
    pub j: Embedding,
    pub tuples: Vec<Vec<u32>>,
    /// Per entry with parameters inside G: does its tuple still have the
    /// type over G that the scheme gives when applied to G directly?
    pub restriction: Vec<Option<bool>>,
}

/// Applies the entries one after another; each entry's parameters index the
/// stage reached so far.
pub fn oplus_apply(entries: &[DefEntry], g: &Group) -> Result<OplusResult, SchemeError> {
    let mut h = g.clone();
    let mut j = Embedding::identity(g);
    let mut tuples: Vec<Vec<u32>> = Vec::new();
    for e in entries {
        let ext = e.scheme.apply(&h, &e.params)?;
        for t in tuples.iter_mut() {
            for x in t.iter_mut() {
                *x = ext.j0.apply(*x);
            }
        }
        tuples.push(ext.tuple.clone());
        j = j.then(&ext.j0);
        h = ext.group;
    }
    let base: Vec<u32> = g.elements().map(|x| j.apply(x)).collect();
    let mut restriction = Vec::new();
    let mut stage_j = Embedding::identity(g);
    let mut stage = g.clone();
    for (e, t) in entries.iter().zip(&tuples) {
        // parameters index the stage at application time; map them to G if possible
        let in_g: Option<Vec<u32>> = e
            .params
            .iter()
            .map(|&p| stage_j.preimages()[p as usize])
            .collect::<Option<Vec<u32>>>();
        restriction.push(match in_g {
            Some(params) => {
                let q = e.scheme.output_type(g, &params)?;
                Some(types_equal(&tp_bs_list(&h, t, &base)?, &q)?)
            }
            None => None,
        });
        let ext = e.scheme.apply(&stage, &e.params)?;
        stage_j = stage_j.then(&ext.j0);
        stage = ext.group;
    }
    Ok(OplusResult { group: h, j, tuples, restriction })
}

#[derive(Debug, Clone, Copy)]
pub struct OtimesOptions {
    pub budget: Budget,
    /// Maximum word length of the term sweep; 0 disables it.
    pub word_len: usize,
    /// The sweep runs only when G3 has at most this many elements.
    pub sweep_limit: usize,
}

impl Default for OtimesOptions {
    fn default() -> Self {
        OtimesOptions { budget: Budget::default(), word_len: 6, sweep_limit: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sweep {
    Skipped,
    Checked { words: u64, violations: u64 },
}

pub struct OtimesResult {
    pub amalgam: StableAmalgam,
    pub c1: Vec<Perm>,
    pub c2: Vec<Perm>,
    pub joint: QfType,
    pub transposed: QfType,
    pub symmetric: bool,
    pub sweep: Sweep,
}

/// H1 = t1(G), H2 = t2(G), G3 their stable amalgam over G.
pub fn otimes_apply(t1: &DefEntry, t2: &DefEntry, g: &Group, opts: OtimesOptions) -> Result<OtimesResult, SchemeError> {
    let h1 = t1.scheme.apply(g, &t1.params)?;
    let h2 = t2.scheme.apply(g, &t2.params)?;
    let shape = Shape::new(g.clone(), h1.group.clone(), h2.group.clone(), h1.j0.clone(), h2.j0.clone())?;
    let sa = stable_amalgam(&shape, opts.budget)?;
    let base: Vec<Perm> = g.elements().map(|x| sa.image1(h1.j0.apply(x))).collect();
    let c1: Vec<Perm> = h1.tuple.iter().map(|&c| sa.image1(c)).collect();
    let c2: Vec<Perm> = h2.tuple.iter().map(|&c| sa.image2(c)).collect();
    let joint = tp_bs_perms(&base, &[c1.clone(), c2.clone()].concat())?;

    let st = stable_amalgam(&shape.swapped(), opts.budget)?;
    let base_t: Vec<Perm> = g.elements().map(|x| st.image2(h1.j0.apply(x))).collect();
    let d1: Vec<Perm> = h1.tuple.iter().map(|&c| st.image2(c)).collect();
    let d2: Vec<Perm> = h2.tuple.iter().map(|&c| st.image1(c)).collect();
    let transposed = tp_bs_perms(&base_t, &[d1, d2].concat())?;
    let symmetric = types_equal(&joint, &transposed)?;

    let sweep = match sa.tabled() {
        Some(t) if opts.word_len > 0 && t.group.order() <= opts.sweep_limit => {
            boxplus_sweep(g, t1, t2, &h1, &h2, t, opts.word_len)?
        }
        _ => Sweep::Skipped,
    };
    Ok(OtimesResult { amalgam: sa, c1, c2, joint, transposed, symmetric, sweep })
}

/// Over H+ = G3: σ(c̄1, c̄2, b̄) = e iff a fresh realization of each factor
/// over H+ satisfies the same equation with the other tuple as parameter.
fn boxplus_sweep(
    g: &Group,
    t1: &DefEntry,
    t2: &DefEntry,
    h1: &Extension,
    h2: &Extension,
    t: &crate::amalgam::Tabled,
    word_len: usize,
) -> Result<Sweep, SchemeError> {
    let hp = &t.group;
    let in1 = |x: u32| t.j1.apply(x);
    let in2 = |x: u32| t.j2.apply(x);
    let p1: Vec<u32> = t1.params.iter().map(|&x| in1(h1.j0.apply(x))).collect();
    let p2: Vec<u32> = t2.params.iter().map(|&x| in2(h2.j0.apply(x))).collect();
    let k1 = t1.scheme.realize_perms(hp, &p1)?;
    let k2 = t2.scheme.realize_perms(hp, &p2)?;
    let c1: Vec<u32> = h1.tuple.iter().map(|&c| in1(c)).collect();
    let c2: Vec<u32> = h2.tuple.iter().map(|&c| in2(c)).collect();
    let bs: Vec<u32> = g.generators().into_iter().map(|x| in1(h1.j0.apply(x))).collect();

    // Letters: (value in H+, perm in K1, perm in K2).
    let mut letters: Vec<(u32, Perm, Perm)> = Vec::new();
    for (i, &c) in c1.iter().enumerate() {
        letters.push((c, k1.tuple[i].clone(), k2.j0[c as usize].clone()));
    }
    for (i, &c) in c2.iter().enumerate() {
        letters.push((c, k1.j0[c as usize].clone(), k2.tuple[i].clone()));
    }
    for &b in &bs {
        letters.push((b, k1.j0[b as usize].clone(), k2.j0[b as usize].clone()));
    }
    let inverses: Vec<(u32, Perm, Perm)> =
        letters.iter().map(|(x, a, b)| (hp.inv(*x), a.inverse(), b.inverse())).collect();
    letters.extend(inverses);

    let d1 = k1.j0.first().map_or(0, |p| p.degree());
    let d2 = k2.j0.first().map_or(0, |p| p.degree());
    let mut words = 0u64;
    let mut violations = 0u64;
    let mut stack: Vec<(u32, Perm, Perm, usize)> = vec![(0, Perm::identity(d1), Perm::identity(d2), 0)];
    while let Some((x, a, b, len)) = stack.pop() {
        words += 1;
        if (x == 0) != (a.is_identity() && b.is_identity()) {
            violations += 1;
        }
        if len < word_len {
            for (lx, la, lb) in &letters {
                stack.push((hp.mul(x, *lx), a.then(la), b.then(lb), len + 1));
            }
        }
    }
    Ok(Sweep::Checked { words, violations })
}

/// First coordinates of tuples of G2 whose type over G1 is q_s(ā, G1) for
/// some parameters ā from G1. `emb` places G1 inside G2.
pub fn cp_set(s: &Scheme, g1: &Group, g2: &Group, emb: &Embedding) -> Result<Vec<u32>, SchemeError> {
    let base: Vec<u32> = g1.elements().map(|x| emb.apply(x)).collect();
    let n = s.n_s();
    let mut out: Vec<u32> = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    for params in s.parameter_tuples(g1) {
        let q = s.output_type(g1, &params)?;
        let mut c = vec![0u32; n];
        loop {
            if !out.contains(&c[0]) && types_equal(&tp_bs_list(g2, &c, &base)?, &q)? {
                out.push(c[0]);
            }
            let mut i = n;
            let mut done = true;
            while i > 0 {
                i -= 1;
                c[i] += 1;
                if (c[i] as usize) < g2.order() {
                    done = false;
                    break;
                }
                c[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::types::{does_not_split, tp_bs_list};

    #[test]
    fn cg_examples() {
        let t = Group::trivial();
        let e = apply_cg(&t).unwrap();
        assert_eq!(e.group.order(), 2);
        let z2 = Group::cyclic(2);
        let e = apply_cg(&z2).unwrap();
        assert_eq!(e.group.order(), 8);
        assert_eq!(cg_postconditions(&z2, &e, e.tuple[0]), [true; 3]);
        let z3 = Group::cyclic(3);
        let e = apply_cg(&z3).unwrap();
        assert_eq!(e.group.order(), 18);
        assert_eq!(cg_postconditions(&z3, &e, e.tuple[0]), [true; 3]);
    }

    #[test]
    fn gl_examples() {
        let z2 = Group::cyclic(2);
        let r = gl_postconditions(&z2, 1).unwrap();
        assert!(r.holds(), "{r:?}");
        let s3 = corpus::symmetric3();
        for a in 1..4 {
            assert!(gl_postconditions(&s3, a).unwrap().holds());
        }
        assert_eq!(apply_gl(&s3, 0).unwrap_err(), SchemeError::ParameterNotOrderTwo);
        assert_eq!(apply_gl(&s3, 4).unwrap_err(), SchemeError::ParameterNotOrderTwo);
    }

    #[test]
    fn ab_examples() {
        let s3 = corpus::symmetric3();
        let z2 = Group::cyclic(2);
        let e = apply_ab(&s3, &z2, &[0, 1]).unwrap();
        assert_eq!(e.group.order(), 12);
        let c = e.tuple[1];
        assert_eq!(e.group.elem_order(c), 2);
        assert!(center(&e.group).contains(c));
        let e = apply_ab(&Group::trivial(), &s3, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(e.group.order(), 6);
        assert_eq!(apply_ab(&s3, &z2, &[1, 1]).unwrap_err(), SchemeError::NotAFullListing);
    }

    #[test]
    fn gm_examples() {
        let s3 = corpus::symmetric3();
        let g = corpus::product(&[s3.clone(), s3.clone()]);
        // generators of the two factors: (x, e) is 6x, (e, y) is y.
        let a1 = [6, 6 * 4];
        let a2 = [1, 4];
        let e = apply_gm(&g, &a1, &a2).unwrap();
        assert_eq!(e.group.order(), 72);
        let c = e.tuple[0];
        for (&x, &y) in a1.iter().zip(&a2) {
            assert_eq!(e.group.conj(e.j0.apply(x), c), e.j0.apply(y));
        }
        let v4 = corpus::product(&[Group::cyclic(2), Group::cyclic(2)]);
        assert_eq!(
            apply_gm(&v4, &[2], &[1]).unwrap_err(),
            SchemeError::PreconditionFailed("trivial center")
        );
        assert_eq!(
            apply_gm(&s3, &[1], &[2]).unwrap_err(),
            SchemeError::PreconditionFailed("the two tuples commute")
        );
    }

    #[test]
    fn oplus_examples() {
        let g = corpus::symmetric3();
        let r = oplus_apply(&[], &g).unwrap();
        assert_eq!(r.group.order(), 6);
        let r = oplus_apply(&[DefEntry::new(Scheme::Ab(2), vec![]), DefEntry::new(Scheme::Ab(3), vec![])], &g).unwrap();
        assert_eq!(r.group.order(), 36);
        assert!(r.tuples.iter().all(|t| center(&r.group).contains(t[0])));
        let t = Group::trivial();
        let r = oplus_apply(&[DefEntry::new(Scheme::Cg, vec![]), DefEntry::new(Scheme::Cg, vec![])], &t).unwrap();
        assert_eq!(r.restriction, vec![Some(true), Some(true)]);
        assert_eq!(r.group.order(), 8);
    }

    #[test]
    fn otimes_examples() {
        let z2 = Group::cyclic(2);
        let ab2 = DefEntry::new(Scheme::Ab(2), vec![]);
        let ab3 = DefEntry::new(Scheme::Ab(3), vec![]);
        let r = otimes_apply(&ab2, &ab3, &z2, OtimesOptions::default()).unwrap();
        assert!(r.symmetric);
        let t = r.amalgam.tabled().unwrap();
        assert_eq!(t.group.order(), 12);
        assert!(t.group.is_abelian());
        assert_eq!(r.sweep, Sweep::Checked { words: r_words(6, 2 * 3), violations: 0 });
        let triv = DefEntry::new(Scheme::Trivial, vec![]);
        let cg = DefEntry::new(Scheme::Cg, vec![]);
        let r = otimes_apply(&cg, &triv, &z2, OtimesOptions::default()).unwrap();
        assert_eq!(r.amalgam.order_usize(), Some(8));
        let r = otimes_apply(&cg, &ab2, &z2, OtimesOptions::default()).unwrap();
        assert!(r.symmetric);
    }

    fn r_words(len: u32, letters: u64) -> u64 {
        (0..=len).map(|l| letters.pow(l)).sum()
    }

    #[test]
    fn cp_examples() {
        let g = corpus::symmetric3();
        let z2 = Group::cyclic(2);
        let e = apply_ab(&g, &z2, &[0, 1]).unwrap();
        let cp = cp_set(&Scheme::Ab(2), &g, &e.group, &e.j0).unwrap();
        assert!(cp.contains(&e.tuple[1]));
        assert!(cp_set(&Scheme::Ab(2), &g, &g, &Embedding::identity(&g)).unwrap().is_empty());
        let e = apply_cg(&g).unwrap();
        assert!(cp_set(&Scheme::Cg, &g, &e.group, &e.j0).unwrap().contains(&e.tuple[0]));
    }

    #[test]
    fn scheme_types_do_not_split() {
        let s3 = corpus::symmetric3();
        let e = apply_cg(&s3).unwrap();
        let g = e.j0.image();
        assert!(does_not_split(&e.group, &e.tuple, &g, &crate::group::Subgroup::trivial(), 2).unwrap().holds());
    }

    #[test]
    fn output_type_is_isomorphism_invariant() {
        let s3 = corpus::symmetric3();
        let sigma = [0u32, 3, 1, 2, 5, 4];
        let r = s3.relabel(&sigma);
        let q = Scheme::Gl.output_type(&s3, &[1]).unwrap();
        let ext = Scheme::Gl.apply(&r, &[sigma[1]]).unwrap();
        // base listed in the original element order
        let base: Vec<u32> = s3.elements().map(|x| ext.j0.apply(sigma[x as usize])).collect();
        assert!(types_equal(&tp_bs_list(&ext.group, &ext.tuple, &base).unwrap(), &q).unwrap());
    }
}
