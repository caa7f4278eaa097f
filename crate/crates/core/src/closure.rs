//! Bounded approximations of existentially closed locally finite groups:
//! Hall steps, one-step closures, EC certification and the chain-limit probe.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

use crate::amalgam::{stable_amalgam, AmalgamError, Budget, Shape};
use crate::corpus::small_groups;
use crate::group::{automorphisms, dedup_up_to_inner, enumerate_embeddings, for_each_embedding, generated_subgroup, subgroups, Embedding, Group, GroupError};
use crate::io::{format_embedding, format_mtable, parse_indices, parse_mtable, IoError};
use crate::schemes::{def_entries, otimes_apply, DefEntry, OtimesOptions, Scheme, SchemeError};
use crate::types::{tp_bs_list, types_equal, TypeError};

/// Largest pair bound the bundled corpus covers.
pub const MAX_BOUND: usize = 8;

#[derive(Debug, Error)]
pub enum ClosureError {
    #[error("bound {0} exceeds the corpus (at most {MAX_BOUND})")]
    BoundUnsupported(usize),
    #[error("stage of order {0} is too large to table")]
    TooLarge(BigUint),
    #[error("probe invalid: clause {0}")]
    ProbeInvalid(&'static str),
    #[error("empty chain")]
    EmptyChain,
    #[error("replay mismatch at stage {0}")]
    ReplayMismatch(usize),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("chain directory: {0}")]
    Storage(String),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl ClosureError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            ClosureError::Amalgam(AmalgamError::BudgetExceeded(_))
                | ClosureError::Scheme(SchemeError::Amalgam(AmalgamError::BudgetExceeded(_)))
        )
    }
}

/// A pair K ≤ L; `incl` is the inclusion of K.
#[derive(Debug, Clone)]
pub struct HallPair {
    pub l_name: &'static str,
    pub l: Group,
    pub k: Group,
    pub incl: Embedding,
}

impl HallPair {
    pub fn label(&self) -> String {
        format!("{}>{}", self.l_name, self.k.order())
    }
}

/// Pairs K ≤ L with |L| ≤ b, one per class under Aut(L), ordered by |L|,
/// corpus order, then subgroup order.
pub fn hall_pairs(b: usize) -> Result<Vec<HallPair>, ClosureError> {
    if b > MAX_BOUND {
        return Err(ClosureError::BoundUnsupported(b));
    }
    let mut ls: Vec<(&'static str, Group)> = small_groups().into_iter().filter(|(_, g)| g.order() <= b).collect();
    ls.sort_by_key(|(_, g)| g.order());
    let mut out = Vec::new();
    for (name, l) in ls {
        let auts = automorphisms(&l);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for s in subgroups(&l) {
            let key = auts
                .iter()
                .map(|a| {
                    let mut v: Vec<u32> = s.members().iter().map(|&x| a.apply(x)).collect();
                    v.sort_unstable();
                    v
                })
                .min()
                .expect("identity automorphism");
            if seen.insert(key) {
                let (k, incl) = l.subgroup_as_group(&s);
                out.push(HallPair { l_name: name, l: l.clone(), k, incl });
            }
        }
    }
    Ok(out)
}

/// Is there an embedding g: L -> T with g ∘ incl = f?
pub fn extends(pair: &HallPair, f: &Embedding, target: &Group) -> bool {
    if pair.k.order() == pair.l.order() {
        return true;
    }
    let mut found = false;
    for_each_embedding(&pair.l, target, &mut |e| {
        if pair.incl.map.iter().enumerate().all(|(x, &y)| e.map[y as usize] == f.map[x]) {
            found = true;
            false
        } else {
            true
        }
    });
    found
}

/// One adjunction: tuple ā_j over base K_j, after the prior steps `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogStep {
    pub scheme: String,
    pub tuple: Vec<u32>,
    pub base: Vec<u32>,
    pub w: Vec<usize>,
}

/// Steps of a construction, all indices in the final group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionLog {
    pub steps: Vec<LogStep>,
}

impl ConstructionLog {
    /// Every K_j lies in the span of G and the tuples listed in w_j.
    pub fn well_founded(&self, h: &Group, g_image: &[u32]) -> Result<bool, GroupError> {
        for s in &self.steps {
            let mut gens = g_image.to_vec();
            for &i in &s.w {
                gens.extend(&self.steps[i].tuple);
            }
            let span = generated_subgroup(h, &gens)?;
            if !s.base.iter().all(|&x| span.contains(x)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn map_all(&mut self, e: &Embedding) {
        for s in &mut self.steps {
            s.tuple.iter_mut().chain(s.base.iter_mut()).for_each(|x| *x = e.apply(*x));
        }
    }
}

#[derive(Debug, Clone)]
pub struct HallStep {
    pub group: Group,
    pub link: Embedding,
    pub log: ConstructionLog,
}

/// Repairs every deficiency of G of size ≤ b by amalgamating L into the
/// running stage over f(K).
pub fn hall_step(g: &Group, b: usize, budget: Budget) -> Result<HallStep, ClosureError> {
    let pairs = hall_pairs(b)?;
    let mut running = g.clone();
    let mut link = Embedding::identity(g);
    let mut log = ConstructionLog::default();
    for pair in &pairs {
        for f in dedup_up_to_inner(g, enumerate_embeddings(&pair.k, g)) {
            let f_run = f.then(&link);
            if extends(pair, &f_run, &running) {
                continue;
            }
            let shape = Shape::new(pair.k.clone(), running.clone(), pair.l.clone(), f_run.clone(), pair.incl.clone())?;
            let sa = stable_amalgam(&shape, budget)?;
            let t = sa.tabled().ok_or_else(|| ClosureError::TooLarge(sa.order().clone()))?.clone();
            log.map_all(&t.j1);
            let n = log.steps.len();
            log.steps.push(LogStep {
                scheme: format!("hall:{}", pair.label()),
                tuple: pair.l.generators().iter().map(|&x| t.j2.apply(x)).collect(),
                base: f_run.map.iter().map(|&x| t.j1.apply(x)).collect(),
                w: (0..n).collect(),
            });
            link = link.then(&t.j1);
            running = t.group;
        }
    }
    Ok(HallStep { group: running, link, log })
}

/// (operation id, parameters) behind one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub op: String,
    pub params: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct StageChain {
    pub stages: Vec<Group>,
    /// links[i]: stage i -> stage i+1.
    pub links: Vec<Embedding>,
    /// provenance[i]: how stage i+1 was made from stage i.
    pub provenance: Vec<Provenance>,
}

impl StageChain {
    pub fn new(g: Group) -> StageChain {
        StageChain { stages: vec![g], links: Vec::new(), provenance: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn last(&self) -> &Group {
        self.stages.last().expect("nonempty")
    }

    pub fn push(&mut self, g: Group, link: Embedding, p: Provenance) {
        self.stages.push(g);
        self.links.push(link);
        self.provenance.push(p);
    }

    /// Composite link from stage i to stage j ≥ i.
    pub fn link_between(&self, i: usize, j: usize) -> Embedding {
        self.links[i..j].iter().fold(Embedding::identity(&self.stages[i]), |acc, l| acc.then(l))
    }

    /// Rebuilds every stage from stage 0 and compares tables and links.
    pub fn replay(&self) -> Result<StageChain, ClosureError> {
        let mut c = StageChain::new(self.stages[0].clone());
        for (i, p) in self.provenance.iter().enumerate() {
            let (g, link) = apply_op(c.last(), p, Budget::default())?;
            if g.rows() != self.stages[i + 1].rows() || link != self.links[i] {
                return Err(ClosureError::ReplayMismatch(i + 1));
            }
            c.push(g, link, p.clone());
        }
        Ok(c)
    }

    /// stage_<i>.mtable, link_<i>.txt and a provenance manifest.
    pub fn save(&self, dir: &Path) -> Result<(), ClosureError> {
        let st = |e: std::io::Error| ClosureError::Storage(e.to_string());
        std::fs::create_dir_all(dir).map_err(st)?;
        for (i, g) in self.stages.iter().enumerate() {
            std::fs::write(dir.join(format!("stage_{i}.mtable")), format_mtable(g)).map_err(st)?;
        }
        for (i, l) in self.links.iter().enumerate() {
            std::fs::write(dir.join(format!("link_{i}.txt")), format_embedding("link", l) + "\n").map_err(st)?;
        }
        let mut m = String::new();
        for (i, p) in self.provenance.iter().enumerate() {
            m.push_str(&format!("{} {}", i, p.op));
            for x in &p.params {
                m.push_str(&format!(" {x}"));
            }
            m.push('\n');
        }
        std::fs::write(dir.join("provenance.txt"), m).map_err(st)
    }

    pub fn load(dir: &Path) -> Result<StageChain, ClosureError> {
        let st = |e: std::io::Error| ClosureError::Storage(e.to_string());
        let manifest = std::fs::read_to_string(dir.join("provenance.txt")).map_err(st)?;
        let mut provenance = Vec::new();
        for (no, line) in manifest.lines().enumerate() {
            let mut it = line.split_whitespace();
            let bad = || ClosureError::Storage(format!("provenance line {}", no + 1));
            let idx: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            if idx != no {
                return Err(bad());
            }
            let op = it.next().ok_or_else(bad)?.to_string();
            let params = it.map(|t| t.parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
            provenance.push(Provenance { op, params });
        }
        let read_stage = |i: usize| -> Result<Group, ClosureError> {
            let text = std::fs::read_to_string(dir.join(format!("stage_{i}.mtable"))).map_err(st)?;
            Ok(parse_mtable(&text)?)
        };
        let mut c = StageChain::new(read_stage(0)?);
        for (i, p) in provenance.into_iter().enumerate() {
            let g = read_stage(i + 1)?;
            let text = std::fs::read_to_string(dir.join(format!("link_{i}.txt"))).map_err(st)?;
            let map = parse_indices(text.trim(), "link", 1)?;
            let link = Embedding::new(&c.stages[i], &g, map)?;
            c.push(g, link, p);
        }
        Ok(c)
    }
}

fn catalog_op(catalog: &[Scheme]) -> String {
    format!("one_step:{}", catalog.iter().map(|s| s.id()).collect::<Vec<_>>().join(","))
}

fn parse_catalog(list: &str) -> Result<Vec<Scheme>, ClosureError> {
    list.split(',')
        .map(|s| match s {
            "cg" => Ok(Scheme::Cg),
            "gl" => Ok(Scheme::Gl),
            "trivial" => Ok(Scheme::Trivial),
            _ => s
                .strip_prefix("ab(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.parse().ok())
                .map(Scheme::Ab)
                .ok_or_else(|| ClosureError::UnknownOperation(s.to_string())),
        })
        .collect()
}

fn apply_op(g: &Group, p: &Provenance, budget: Budget) -> Result<(Group, Embedding), ClosureError> {
    match (p.op.as_str(), p.params.as_slice()) {
        ("hall_step", [b]) => {
            let s = hall_step(g, *b as usize, budget)?;
            Ok((s.group, s.link))
        }
        ("ab", [k]) => {
            let e = Scheme::Ab(*k as usize).apply(g, &[])?;
            Ok((e.group, e.j0))
        }
        (op, [bound]) if op.starts_with("one_step:") => {
            let catalog = parse_catalog(&op["one_step:".len()..])?;
            let r = one_step_closure(g, &catalog, *bound as usize, budget)?;
            Ok((r.group, r.j))
        }
        _ => Err(ClosureError::UnknownOperation(p.op.clone())),
    }
}

/// Stages built by repeated Hall steps; on failure returns the chain so far
/// and the error that stopped it.
pub fn hall_chain(g: &Group, b: usize, steps: usize, budget: Budget) -> (StageChain, Option<ClosureError>) {
    let mut c = StageChain::new(g.clone());
    for _ in 0..steps {
        match hall_step(c.last(), b, budget) {
            Ok(s) => c.push(s.group, s.link, Provenance { op: "hall_step".into(), params: vec![b as u32] }),
            Err(e) => return (c, Some(e)),
        }
    }
    (c, None)
}

#[derive(Debug, Clone)]
pub struct EcEntry {
    pub stage: usize,
    pub pair: String,
    pub f: Vec<u32>,
    /// Least stage j ≥ stage where f extends to L.
    pub extended_at: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct EcReport {
    pub bound: usize,
    pub entries: Vec<EcEntry>,
    pub pass: bool,
}

impl EcReport {
    pub fn failures(&self) -> impl Iterator<Item = &EcEntry> {
        self.entries.iter().filter(|e| e.extended_at.is_none())
    }
}

impl fmt::Display for EcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e.extended_at {
                Some(j) => writeln!(f, "stage {} {} f={:?} extends at {}", e.stage, e.pair, e.f, j)?,
                None => writeln!(f, "stage {} {} f={:?} FAIL", e.stage, e.pair, e.f)?,
            }
        }
        writeln!(f, "bound {} {}", self.bound, if self.pass { "PASS" } else { "FAIL" })
    }
}

/// For each stage with a successor (or the only stage), each pair and each
/// embedding of K up to inner automorphisms: the least stage extending it.
pub fn certify_ec(chain: &StageChain, b: usize) -> Result<EcReport, ClosureError> {
    if chain.is_empty() {
        return Err(ClosureError::EmptyChain);
    }
    let pairs = hall_pairs(b)?;
    let last = chain.len() - 1;
    let checked = if last == 0 { 0..1 } else { 0..last };
    let mut entries = Vec::new();
    for i in checked {
        let g = &chain.stages[i];
        for pair in &pairs {
            for f in dedup_up_to_inner(g, enumerate_embeddings(&pair.k, g)) {
                let mut at = None;
                let mut fj = f.clone();
                for j in i..=last {
                    if j > i {
                        fj = fj.then(&chain.links[j - 1]);
                    }
                    if extends(pair, &fj, &chain.stages[j]) {
                        at = Some(j);
                        break;
                    }
                }
                entries.push(EcEntry { stage: i, pair: pair.label(), f: f.map.clone(), extended_at: at });
            }
        }
    }
    let pass = entries.iter().all(|e| e.extended_at.is_some());
    Ok(EcReport { bound: b, entries, pass })
}

pub struct OneStep {
    pub group: Group,
    pub j: Embedding,
    pub entries: Vec<DefEntry>,
    /// c̄_t in the closure.
    pub tuples: Vec<Vec<u32>>,
    /// c̄_t realizes q_t over G.
    pub realizes: Vec<bool>,
    /// Joint type of (c̄_s, c̄_t) over G against the ⊗ product; None when
    /// that product is over budget.
    pub pairwise: Vec<((usize, usize), Option<bool>)>,
}

/// Realizes every catalog entry over G with parameters of length at most
/// `param_bound`, folding left to right with the stable amalgam over G.
pub fn one_step_closure(g: &Group, catalog: &[Scheme], param_bound: usize, budget: Budget) -> Result<OneStep, ClosureError> {
    let entries: Vec<DefEntry> =
        def_entries(g, catalog, param_bound).into_iter().filter(|e| e.scheme != Scheme::Trivial).collect();
    let mut acc = g.clone();
    let mut j = Embedding::identity(g);
    let mut tuples: Vec<Vec<u32>> = Vec::new();
    for e in &entries {
        let ext = e.scheme.apply(g, &e.params)?;
        let shape = Shape::new(g.clone(), acc.clone(), ext.group.clone(), j.clone(), ext.j0.clone())?;
        let sa = stable_amalgam(&shape, budget)?;
        let t = sa.tabled().ok_or_else(|| ClosureError::TooLarge(sa.order().clone()))?;
        for tu in tuples.iter_mut() {
            tu.iter_mut().for_each(|x| *x = t.j1.apply(*x));
        }
        tuples.push(ext.tuple.iter().map(|&x| t.j2.apply(x)).collect());
        j = j.then(&t.j1);
        acc = t.group.clone();
    }
    let base: Vec<u32> = g.elements().map(|x| j.apply(x)).collect();
    let mut realizes = Vec::new();
    for (e, tu) in entries.iter().zip(&tuples) {
        let q = e.scheme.output_type(g, &e.params)?;
        realizes.push(types_equal(&tp_bs_list(&acc, tu, &base)?, &q)?);
    }
    let mut pairwise = Vec::new();
    let opts = OtimesOptions { budget, word_len: 0, sweep_limit: 0 };
    for s in 0..entries.len() {
        for t in s + 1..entries.len() {
            let verdict = match otimes_apply(&entries[s], &entries[t], g, opts) {
                Ok(r) => {
                    let ours = tp_bs_list(&acc, &[tuples[s].clone(), tuples[t].clone()].concat(), &base)?;
                    Some(types_equal(&ours, &r.joint)?)
                }
                Err(SchemeError::Amalgam(AmalgamError::BudgetExceeded(_))) => None,
                Err(e) => return Err(e.into()),
            };
            pairwise.push(((s, t), verdict));
        }
    }
    Ok(OneStep { group: acc, j, entries, tuples, realizes, pairwise })
}

/// Stages built by repeated one-step closures.
pub fn one_step_chain(
    g: &Group,
    catalog: &[Scheme],
    param_bound: usize,
    steps: usize,
    budget: Budget,
) -> (StageChain, Option<ClosureError>) {
    let mut c = StageChain::new(g.clone());
    let op = catalog_op(catalog);
    for _ in 0..steps {
        match one_step_closure(c.last(), catalog, param_bound, budget) {
            Ok(r) => c.push(r.group, r.j, Provenance { op: op.clone(), params: vec![param_bound as u32] }),
            Err(e) => return (c, Some(e)),
        }
    }
    (c, None)
}

/// Does `a` embed into `b`?
pub fn embeds(a: &Group, b: &Group) -> bool {
    let mut found = false;
    for_each_embedding(a, b, &mut |_| {
        found = true;
        false
    });
    found
}

#[derive(Debug, Clone)]
pub struct CrossReport {
    /// (chain, stage, order, stage of the other chain it embeds into).
    pub entries: Vec<(u8, usize, usize, Option<usize>)>,
}

impl CrossReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.3.is_some())
    }
}

/// Every stage of order ≤ `max_order` of each chain embeds into some stage
/// of the other.
pub fn cross_embedding(a: &StageChain, b: &StageChain, max_order: usize) -> CrossReport {
    let mut entries = Vec::new();
    for (side, (x, y)) in [(a, b), (b, a)].into_iter().enumerate() {
        for (i, g) in x.stages.iter().enumerate() {
            if g.order() > max_order {
                continue;
            }
            let hit = y.stages.iter().position(|h| embeds(g, h));
            entries.push((side as u8 + 1, i, g.order(), hit));
        }
    }
    CrossReport { entries }
}

/// a_n in stage n+1 for each link; k the order of each a_n.
#[derive(Debug, Clone)]
pub struct ChainProbe {
    pub a: Vec<u32>,
    pub k: u32,
    /// Require a_n^i ∈ G_n iff i = k.
    pub newness: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeVariant {
    Successive,
    Factorial,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub variant: ProbeVariant,
    pub pass: bool,
    /// Terms covered, counted as words.
    pub terms: u64,
    /// Distinct evaluation states visited.
    pub states: u64,
    pub violation: Option<(usize, String)>,
    /// Factorial variant: the index from which the computed types agree.
    pub stabilized_from: Option<usize>,
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} terms {} states {}", self.variant, self.terms, self.states)?;
        if let Some((n, w)) = &self.violation {
            write!(f, " violation at n={n}: {w}")?;
        }
        if let Some(m) = self.stabilized_from {
            write!(f, " stable from {m}")?;
        }
        write!(f, " {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

/// b_n = a_0 ⋯ a_n in stage n+1.
pub fn probe_products(chain: &StageChain, probe: &ChainProbe) -> Vec<u32> {
    let mut b: Vec<u32> = Vec::new();
    for (n, &a) in probe.a.iter().enumerate() {
        let g = &chain.stages[n + 1];
        let prev = if n == 0 { 0 } else { chain.links[n].apply(b[n - 1]) };
        b.push(g.mul(prev, a));
    }
    b
}

fn validate_probe(chain: &StageChain, probe: &ChainProbe) -> Result<(), ClosureError> {
    if probe.a.len() + 1 != chain.len() && !(chain.len() == 1 && probe.a.is_empty()) {
        return Err(ClosureError::ProbeInvalid("A(b)"));
    }
    if probe.k < 2 {
        return Err(ClosureError::ProbeInvalid("A(c)"));
    }
    for (n, &a) in probe.a.iter().enumerate() {
        let g = &chain.stages[n + 1];
        if a as usize >= g.order() {
            return Err(ClosureError::ProbeInvalid("A(b)"));
        }
        let img = chain.links[n].image();
        if !img.members().iter().all(|&c| g.commute(a, c)) {
            return Err(ClosureError::ProbeInvalid("A(e)"));
        }
        if probe.newness {
            for i in 1..=probe.k {
                let p = g.pow(a, i);
                if (p == 0) != (i == probe.k) || img.contains(p) != (i == probe.k) {
                    return Err(ClosureError::ProbeInvalid("A(d)(β)"));
                }
            }
        }
    }
    Ok(())
}

fn word_count(letters: u64, len: usize) -> u64 {
    (0..=len as u32).fold(0u64, |acc, l| acc.saturating_add(letters.saturating_pow(l)))
}

/// Checks σ(b_n, c̄) = e in G_{n+1} iff σ(b_{n+1}, c̄) = e in G_{n+2} for all
/// words of length ≤ `term_budget` in y^±1 and constants from stage
/// min(n, `param_stage`). Without newness, also compares the types of
/// b_{m!} with the generators of stage `param_stage` along factorial indices.
pub fn chain_limit_probe(
    chain: &StageChain,
    probe: &ChainProbe,
    term_budget: usize,
    param_stage: usize,
) -> Result<ProbeReport, ClosureError> {
    if chain.is_empty() {
        return Err(ClosureError::EmptyChain);
    }
    validate_probe(chain, probe)?;
    let b = probe_products(chain, probe);
    let last = chain.len() - 1;
    let mut terms = 0u64;
    let mut states = 0u64;
    for n in 0..last.saturating_sub(1) {
        let (g1, g2) = (&chain.stages[n + 1], &chain.stages[n + 2]);
        let q = n.min(param_stage);
        let up1 = chain.link_between(q, n + 1);
        let up2 = up1.then(&chain.links[n + 1]);
        // (value in G_{n+1}, value in G_{n+2}, name)
        let mut letters: Vec<(u32, u32, String)> = vec![
            (b[n], b[n + 1], "y".into()),
            (g1.inv(b[n]), g2.inv(b[n + 1]), "y^-1".into()),
        ];
        for c in chain.stages[q].elements().skip(1) {
            letters.push((up1.apply(c), up2.apply(c), format!("c{c}")));
        }
        terms = terms.saturating_add(word_count(letters.len() as u64, term_budget));
        let mut seen: HashMap<(u32, u32), String> = HashMap::new();
        seen.insert((0, 0), String::new());
        let mut layer = vec![(0u32, 0u32)];
        for _ in 0..term_budget {
            let mut next = Vec::new();
            for &(x, y) in &layer {
                for (l1, l2, name) in &letters {
                    let s = (g1.mul(x, *l1), g2.mul(y, *l2));
                    if seen.contains_key(&s) {
                        continue;
                    }
                    let w = format!("{}{}{}", seen[&(x, y)], if seen[&(x, y)].is_empty() { "" } else { " " }, name);
                    if (s.0 == 0) != (s.1 == 0) {
                        return Ok(ProbeReport {
                            variant: ProbeVariant::Successive,
                            pass: false,
                            terms,
                            states: states + seen.len() as u64,
                            violation: Some((n, w)),
                            stabilized_from: None,
                        });
                    }
                    seen.insert(s, w);
                    next.push(s);
                }
            }
            layer = next;
        }
        states += seen.len() as u64;
    }
    if probe.newness {
        return Ok(ProbeReport {
            variant: ProbeVariant::Successive,
            pass: true,
            terms,
            states,
            violation: None,
            stabilized_from: None,
        });
    }
    let mut types = Vec::new();
    let mut f = 1usize;
    let mut n = 1usize;
    while f < last {
        if f >= param_stage {
            let up = chain.link_between(param_stage, f + 1);
            let consts: Vec<u32> = chain.stages[param_stage].generators().iter().map(|&c| up.apply(c)).collect();
            let t = tp_bs_list(&chain.stages[f + 1], &[vec![b[f]], consts].concat(), &[])?;
            types.push((f, t));
        }
        n += 1;
        f *= n;
    }
    let mut stabilized_from = types.last().map(|(m, _)| *m);
    for w in types.windows(2).rev() {
        if types_equal(&w[0].1, &w[1].1)? {
            stabilized_from = Some(w[0].0);
        } else {
            break;
        }
    }
    let pass = types.len() < 2 || types_equal(&types[types.len() - 2].1, &types[types.len() - 1].1)?;
    Ok(ProbeReport { variant: ProbeVariant::Factorial, pass, terms, states, violation: None, stabilized_from })
}

/// G_n = Z2^n by successive ab(2) adjunctions, a_n the new generator.
pub fn z2_diagonal_chain(stages: usize) -> Result<(StageChain, ChainProbe), ClosureError> {
    let mut c = StageChain::new(Group::trivial());
    let mut a = Vec::new();
    for _ in 1..stages {
        let e = Scheme::Ab(2).apply(c.last(), &[])?;
        a.push(e.tuple[0]);
        c.push(e.group, e.j0, Provenance { op: "ab".into(), params: vec![2] });
    }
    Ok((c, ChainProbe { a, k: 2, newness: true }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_catalog() {
        let p = hall_pairs(4).unwrap();
        let labels: Vec<String> = p.iter().map(|x| x.label()).collect();
        assert_eq!(labels, ["Z1>1", "Z2>1", "Z2>2", "Z3>1", "Z3>3", "Z4>1", "Z4>2", "Z4>4", "Z2xZ2>1", "Z2xZ2>2", "Z2xZ2>4"]);
        assert_eq!(hall_pairs(1).unwrap().len(), 1);
        assert!(matches!(hall_pairs(9), Err(ClosureError::BoundUnsupported(9))));
    }

    #[test]
    fn hall_examples() {
        let t = Group::trivial();
        let s = hall_step(&t, 2, Budget::default()).unwrap();
        assert_eq!(s.group.order(), 2);
        let s = hall_step(&t, 1, Budget::default()).unwrap();
        assert_eq!(s.group.order(), 1);
        assert!(s.log.steps.is_empty());

        let z2 = Group::cyclic(2);
        let s = hall_step(&z2, 4, Budget::default()).unwrap();
        let pair = hall_pairs(4).unwrap().into_iter().find(|p| p.label() == "Z4>2").unwrap();
        let f = Embedding::new(&pair.k, &z2, vec![0, 1]).unwrap();
        assert!(extends(&pair, &f.then(&s.link), &s.group));
        let img: Vec<u32> = z2.elements().map(|x| s.link.apply(x)).collect();
        assert!(s.log.well_founded(&s.group, &img).unwrap());
    }

    #[test]
    fn certify_examples() {
        let c = StageChain::new(Group::cyclic(2));
        let r = certify_ec(&c, 4).unwrap();
        assert!(!r.pass);
        assert!(r.failures().any(|e| e.pair == "Z4>2"));
        assert!(certify_ec(&c, 1).unwrap().pass);
        let (chain, err) = hall_chain(&Group::trivial(), 4, 3, Budget::default());
        assert!(err.is_none());
        assert!(certify_ec(&chain, 4).unwrap().pass);
        let mut short = chain.clone();
        short.stages.truncate(3);
        short.links.truncate(2);
        short.provenance.truncate(2);
        assert!(certify_ec(&short, 4).unwrap().pass);
    }

    #[test]
    fn replay_and_storage() {
        let (chain, _) = hall_chain(&Group::trivial(), 3, 2, Budget::default());
        chain.replay().unwrap();
        let dir = std::env::temp_dir().join(format!("lfg-chain-{}", std::process::id()));
        chain.save(&dir).unwrap();
        let back = StageChain::load(&dir).unwrap();
        assert_eq!(back.len(), chain.len());
        for (a, b) in back.stages.iter().zip(&chain.stages) {
            assert_eq!(a.rows(), b.rows());
        }
        back.replay().unwrap();
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn one_step_examples() {
        let t = Group::trivial();
        let r = one_step_closure(&t, &[Scheme::Ab(2)], 0, Budget::default()).unwrap();
        assert_eq!(r.group.order(), 2);
        let r = one_step_closure(&t, &[Scheme::Gl], 1, Budget::default()).unwrap();
        assert_eq!(r.group.order(), 1);
        assert!(r.entries.is_empty());
        let z2 = Group::cyclic(2);
        let r = one_step_closure(&z2, &[Scheme::Cg], 0, Budget::default()).unwrap();
        assert_eq!(r.group.order(), 8);
        let r = one_step_closure(&t, &[Scheme::Cg, Scheme::Ab(2), Scheme::Ab(3)], 0, Budget::default()).unwrap();
        assert_eq!(r.group.order(), 12);
        assert!(r.realizes.iter().all(|&x| x));
        assert!(r.pairwise.iter().all(|(_, v)| *v == Some(true)));
    }

    #[test]
    fn probe_examples() {
        let (chain, probe) = z2_diagonal_chain(6).unwrap();
        let r = chain_limit_probe(&chain, &probe, 4, 3).unwrap();
        assert!(r.pass, "{r}");
        let mut bad = probe.clone();
        bad.a[2] = chain.links[2].apply(1);
        assert!(matches!(chain_limit_probe(&chain, &bad, 2, 3), Err(ClosureError::ProbeInvalid("A(d)(β)"))));
        let single = StageChain::new(Group::trivial());
        let p = ChainProbe { a: vec![], k: 2, newness: true };
        assert!(chain_limit_probe(&single, &p, 6, 3).unwrap().pass);
        let mut loose = probe;
        loose.newness = false;
        let (long, _) = z2_diagonal_chain(8).unwrap();
        loose.a = z2_diagonal_chain(8).unwrap().1.a;
        let r = chain_limit_probe(&long, &loose, 2, 1).unwrap();
        assert_eq!(r.variant, ProbeVariant::Factorial);
        assert!(r.pass, "{r}");
    }

    #[test]
    fn cross_embedding_of_hall_chains() {
        let (a, _) = hall_chain(&Group::trivial(), 3, 2, Budget::default());
        let (b, _) = hall_chain(&Group::trivial(), 3, 2, Budget::default());
        assert!(cross_embedding(&a, &b, 64).holds());
    }
}
