//! The named check suites. Execution order is fixed, so reports are
//! reproducible byte for byte when timings are off.

use std::time::Instant;

use lfgroup::amalgam::{
    commuting_characterization, embedding_configurations, stable_amalgam_of, verify_nf_laws, Budget, LawOptions,
    StableAmalgam,
};
use lfgroup::closure::{
    certify_ec, chain_limit_probe, cross_embedding, hall_chain, one_step_chain, z2_diagonal_chain, StageChain,
};
use lfgroup::group::{generated_subgroup, Embedding, Group, Subgroup};
use lfgroup::schemes::{
    apply_ab, apply_cg, apply_gl, apply_gm, cg_postconditions, gl_postconditions, otimes_apply, DefEntry, Extension,
    OtimesOptions, Scheme, Sweep,
};
use lfgroup::types::{does_not_split, tp_bs_list, tp_bs_perms, types_equal, Split};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Record, SuiteReport, Verdict};
use crate::CliError;

pub const SUITES: [&str; 5] = ["amalgam-laws", "commuting", "schemes", "closure", "types"];

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub budget: Budget,
    pub m_max: usize,
    pub term_budget: usize,
    pub seed: u64,
    pub timings: bool,
    /// Hall and one-step steps in the closure suite.
    pub closure_steps: usize,
    pub closure_bound: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            budget: Budget::default(),
            m_max: 2,
            term_budget: 6,
            seed: 0,
            timings: false,
            closure_steps: 4,
            closure_bound: 4,
        }
    }
}

struct Sink {
    suite: &'static str,
    timings: bool,
    last: Instant,
    records: Vec<Record>,
}

impl Sink {
    fn push(&mut self, law: &str, instance: &str, verdict: Verdict, witness: Option<String>) {
        let now = Instant::now();
        let wall_ms = self.timings.then(|| (now - self.last).as_millis() as u64);
        self.last = now;
        self.records.push(Record {
            id: format!("{}-{:05}", self.suite, self.records.len()),
            suite: self.suite.to_string(),
            law: law.to_string(),
            instance: instance.to_string(),
            verdict,
            witness,
            wall_ms,
        });
    }

    fn check(&mut self, law: &str, instance: &str, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.push(law, instance, Verdict::Pass, None);
        } else {
            self.push(law, instance, Verdict::Fail, Some(witness()));
        }
    }
}

pub fn run_suite(name: &str, corpus: &[(String, Group)], cfg: &SuiteConfig) -> Result<SuiteReport, CliError> {
    let suite = SUITES.iter().find(|s| **s == name).ok_or_else(|| CliError::UnknownSuite(name.to_string()))?;
    let mut sink = Sink { suite, timings: cfg.timings, last: Instant::now(), records: Vec::new() };
    match *suite {
        "amalgam-laws" => amalgam_laws(corpus, cfg, &mut sink),
        "commuting" => commuting(corpus, cfg, &mut sink),
        "schemes" => schemes(corpus, cfg, &mut sink)?,
        "closure" => closure(cfg, &mut sink),
        _ => types(corpus, cfg, &mut sink)?,
    }
    Ok(SuiteReport { records: sink.records })
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

struct Config<'a> {
    names: [&'a str; 3],
    groups: [&'a Group; 3],
    emb1: Embedding,
    emb2: Embedding,
    index: usize,
}

impl Config<'_> {
    fn instance(&self) -> String {
        format!("{}<{},{} #{}", self.names[0], self.names[1], self.names[2], self.index)
    }

    fn witness(&self, seed: u64) -> String {
        format!(
            "lfg amalgam laws {} {} {} --emb1 {} --emb2 {} --seed {}",
            self.names[0],
            self.names[1],
            self.names[2],
            join(&self.emb1.map),
            join(&self.emb2.map),
            seed
        )
    }

    fn amalgam(&self, budget: Budget) -> Result<StableAmalgam, lfgroup::amalgam::AmalgamError> {
        let [g0, g1, g2] = self.groups;
        stable_amalgam_of(g0, g1, g2, &self.emb1, &self.emb2, budget)
    }
}

/// Every (G0, G1, G2) with |G0| ≤ 4, |G1|, |G2| ≤ 8 and every embedding
/// configuration up to automorphisms.
fn configurations(corpus: &[(String, Group)]) -> Vec<Config<'_>> {
    let mut out = Vec::new();
    for (n0, g0) in corpus.iter().filter(|(_, g)| g.order() <= 4) {
        for (n1, g1) in corpus.iter().filter(|(_, g)| g.order() <= 8) {
            for (n2, g2) in corpus.iter().filter(|(_, g)| g.order() <= 8) {
                for (index, (emb1, emb2)) in embedding_configurations(g0, g1, g2).into_iter().enumerate() {
                    out.push(Config { names: [n0, n1, n2], groups: [g0, g1, g2], emb1, emb2, index });
                }
            }
        }
    }
    out
}

fn amalgam_laws(corpus: &[(String, Group)], cfg: &SuiteConfig, sink: &mut Sink) {
    let opts = LawOptions { budget: cfg.budget, seed: cfg.seed };
    for c in configurations(corpus) {
        let inst = c.instance();
        match c.amalgam(cfg.budget) {
            Err(e) => sink.push("stable-amalgam", &inst, Verdict::Fail, Some(format!("{}: {e}", c.witness(cfg.seed)))),
            Ok(sa) => {
                for e in verify_nf_laws(&sa, opts).entries {
                    sink.check(e.law, &inst, e.pass, || format!("{}: {}", c.witness(cfg.seed), e.detail));
                }
                sink.check("per-try-bound", &inst, sa.certificate.within_bound, || c.witness(cfg.seed));
            }
        }
    }
}

fn commuting(corpus: &[(String, Group)], cfg: &SuiteConfig, sink: &mut Sink) {
    for c in configurations(corpus) {
        let inst = c.instance();
        let sa = match c.amalgam(cfg.budget) {
            Ok(sa) => sa,
            Err(e) => {
                sink.push("commuting-characterization", &inst, Verdict::Fail, Some(format!("{}: {e}", c.witness(cfg.seed))));
                continue;
            }
        };
        if sa.order_usize().is_none_or(|n| n > 200) {
            continue;
        }
        let [_, g1, g2] = c.groups;
        let (b1, b2) = (c.emb1.image(), c.emb2.image());
        let mut mismatch = None;
        'outer: for a in g1.elements().filter(|&a| !b1.contains(a)) {
            for b in g2.elements().filter(|&b| !b2.contains(b)) {
                match commuting_characterization(&sa, a, b) {
                    Ok(r) if r.consistent() => {}
                    Ok(r) => {
                        mismatch = Some(format!("a={a} b={b} commute={} predicted={}", r.commute, r.predicted()));
                        break 'outer;
                    }
                    Err(e) => {
                        mismatch = Some(format!("a={a} b={b}: {e}"));
                        break 'outer;
                    }
                }
            }
        }
        let ok = mismatch.is_none();
        sink.check("commuting-characterization", &inst, ok, || {
            format!("{}: {}", c.witness(cfg.seed), mismatch.unwrap_or_default())
        });
    }
}

fn split_record(sink: &mut Sink, inst: &str, ext: &Extension, params: &[u32], m_max: usize) {
    let g = ext.j0.image();
    let k_gens: Vec<u32> = params.iter().map(|&x| ext.j0.apply(x)).collect();
    let k = generated_subgroup(&ext.group, &k_gens).expect("in range");
    match does_not_split(&ext.group, &ext.tuple, &g, &k, m_max) {
        Ok(Split::DoesNotSplit) => sink.push("non-splitting", inst, Verdict::Pass, None),
        Ok(Split::Witness(w)) => sink.push(
            "non-splitting",
            inst,
            Verdict::Fail,
            Some(format!("m={} b1={} b2={} term={}", w.m, join(&w.b1), join(&w.b2), w.reason)),
        ),
        Err(e) => sink.push("non-splitting", inst, Verdict::Fail, Some(e.to_string())),
    }
}

fn schemes(corpus: &[(String, Group)], cfg: &SuiteConfig, sink: &mut Sink) -> Result<(), CliError> {
    for (name, g) in corpus {
        let inst = format!("cg {name}");
        match apply_cg(g) {
            Ok(ext) => {
                let [two, none, conj] = cg_postconditions(g, &ext, ext.tuple[0]);
                let w = || format!("lfg scheme apply cg {name}");
                sink.check("cg-order-two", &inst, two, w);
                sink.check("cg-no-centralizer", &inst, none, w);
                sink.check("cg-conjugate-commutes", &inst, conj, w);
                split_record(sink, &inst, &ext, &[], cfg.m_max);
            }
            Err(e) => sink.push("cg-order-two", &inst, Verdict::Fail, Some(e.to_string())),
        }
    }
    for (name, g) in corpus.iter().filter(|(n, _)| ["Z2", "S3", "Z2xZ2"].contains(&n.as_str())) {
        for a in g.elements().filter(|&a| g.elem_order(a) == 2) {
            let inst = format!("gl {name} a={a}");
            let w = || format!("lfg scheme apply gl {name} --param {a}");
            match (gl_postconditions(g, a), apply_gl(g, a)) {
                (Ok(r), Ok(ext)) => {
                    sink.check("gl-product", &inst, r.product_is_a, w);
                    sink.check("gl-orders", &inst, r.orders_two, w);
                    sink.check("gl-realizes-cg", &inst, r.each_realizes_cg, w);
                    sink.check("gl-span", &inst, r.a_in_span, w);
                    split_record(sink, &inst, &ext, &[a], cfg.m_max);
                }
                (Err(e), _) | (_, Err(e)) => sink.push("gl-product", &inst, Verdict::Fail, Some(e.to_string())),
            }
        }
    }
    let z2 = Group::cyclic(2);
    for (name, g) in corpus {
        let inst = format!("ab {name} Z2");
        match apply_ab(g, &z2, &[0, 1]) {
            Ok(ext) => {
                sink.push("ab-postconditions", &inst, Verdict::Pass, None);
                split_record(sink, &inst, &ext, &[], cfg.m_max);
            }
            Err(e) => sink.push("ab-postconditions", &inst, Verdict::Fail, Some(e.to_string())),
        }
    }
    if let Some((_, s3)) = corpus.iter().find(|(n, _)| n == "S3") {
        let g = Group::direct_product(s3, s3);
        let n = s3.order() as u32;
        let gens = s3.generators();
        let a1: Vec<u32> = gens.iter().map(|&x| x * n).collect();
        let inst = "gm S3xS3";
        match apply_gm(&g, &a1, &gens) {
            Ok(ext) => {
                let c = ext.tuple[0];
                let swaps = a1.iter().zip(&gens).all(|(&x, &y)| ext.group.conj(ext.j0.apply(x), c) == ext.j0.apply(y));
                sink.check("gm-swap", inst, swaps && ext.group.order() == 72, || format!("order {}", ext.group.order()));
            }
            Err(e) => sink.push("gm-swap", inst, Verdict::Fail, Some(e.to_string())),
        }
    }

    let catalog = [Scheme::Cg, Scheme::Ab(2), Scheme::Ab(3)];
    let opts = OtimesOptions { budget: cfg.budget, word_len: cfg.term_budget.min(4), sweep_limit: 256 };
    for (name, g) in corpus.iter().filter(|(_, g)| g.order() <= 6) {
        for i in 0..catalog.len() {
            for j in i..catalog.len() {
                let t1 = DefEntry::new(catalog[i].clone(), vec![]);
                let t2 = DefEntry::new(catalog[j].clone(), vec![]);
                let inst = format!("{} x {} over {name}", t1.scheme.id(), t2.scheme.id());
                match otimes_apply(&t1, &t2, g, opts) {
                    Ok(r) => {
                        sink.check("otimes-symmetry", &inst, r.symmetric, || "joint types differ".into());
                        sink.check("per-try-bound", &inst, r.amalgam.certificate.within_bound, || inst.clone());
                        let note = match r.sweep {
                            Sweep::Skipped => "skipped: amalgam not tabled or above sweep limit".to_string(),
                            Sweep::Checked { words, violations } => format!("words {words} violations {violations}"),
                        };
                        sink.push("otimes-term-sweep", &inst, Verdict::Info, Some(note));
                    }
                    Err(e) => sink.push("otimes-symmetry", &inst, Verdict::Fail, Some(e.to_string())),
                }
            }
        }
    }
    Ok(())
}

fn closure(cfg: &SuiteConfig, sink: &mut Sink) {
    let b = cfg.closure_bound;
    let steps = cfg.closure_steps;
    let triv = Group::trivial();
    let orders = |c: &StageChain| c.stages.iter().map(|g| g.order().to_string()).collect::<Vec<_>>().join(",");

    let (hall, err) = hall_chain(&triv, b, steps, cfg.budget);
    let inst = format!("hall steps={steps} b={b}");
    sink.check("hall-chain", &inst, err.is_none(), || {
        format!("stages {}: {}", orders(&hall), err.as_ref().map(|e| e.to_string()).unwrap_or_default())
    });
    ec_record(sink, "ec-hall", &inst, &hall, b);
    let replay = hall.replay();
    sink.check("replay-hall", &inst, replay.is_ok(), || replay.err().map(|e| e.to_string()).unwrap_or_default());
    let mut monotone = true;
    let mut before = None;
    for k in 1..=hall.len() {
        let mut p = hall.clone();
        p.stages.truncate(k);
        p.links.truncate(k - 1);
        p.provenance.truncate(k - 1);
        let pass = certify_ec(&p, b).map(|r| r.pass).unwrap_or(false);
        if before == Some(true) && !pass {
            monotone = false;
        }
        before = Some(pass);
    }
    sink.check("ec-monotone", &inst, monotone, || "a prefix passes but a longer one fails".into());

    let catalog = [Scheme::Cg, Scheme::Ab(2), Scheme::Ab(3)];
    let (one, err) = one_step_chain(&triv, &catalog, 0, steps, cfg.budget);
    let inst1 = format!("one-step cg,ab(2),ab(3) steps={steps} b={b}");
    sink.check("one-step-chain", &inst1, err.is_none(), || {
        format!("stages {}: {}", orders(&one), err.as_ref().map(|e| e.to_string()).unwrap_or_default())
    });
    ec_record(sink, "ec-one-step", &inst1, &one, b);

    let cross = cross_embedding(&hall, &one, 64);
    sink.check("cross-embedding", "hall vs one-step", cross.holds(), || {
        let bad: Vec<String> = cross
            .entries
            .iter()
            .filter(|e| e.3.is_none())
            .map(|e| format!("chain {} stage {} (order {})", e.0, e.1, e.2))
            .collect();
        format!("no embedding for {}", bad.join("; "))
    });

    let inst = format!("Z2^n stages=7 terms<={} params from stage 3", cfg.term_budget);
    match z2_diagonal_chain(7).and_then(|(c, p)| chain_limit_probe(&c, &p, cfg.term_budget, 3)) {
        Ok(r) => sink.check("chain-limit-probe", &inst, r.pass, || r.to_string()),
        Err(e) => sink.push("chain-limit-probe", &inst, Verdict::Fail, Some(e.to_string())),
    }
    let inst = "Z2^n stages=8 without newness, factorial indices";
    let run = z2_diagonal_chain(8).and_then(|(c, mut p)| {
        p.newness = false;
        chain_limit_probe(&c, &p, cfg.term_budget.min(4), 1)
    });
    match run {
        Ok(r) => sink.check("chain-limit-probe-factorial", inst, r.pass, || r.to_string()),
        Err(e) => sink.push("chain-limit-probe-factorial", inst, Verdict::Fail, Some(e.to_string())),
    }
}

fn ec_record(sink: &mut Sink, law: &str, inst: &str, chain: &StageChain, b: usize) {
    match certify_ec(chain, b) {
        Ok(r) => sink.check(law, inst, r.pass, || {
            let first = r.failures().next().expect("a failure");
            format!(
                "{} stages; stage {} pair {} f={} never extends",
                chain.len(),
                first.stage,
                first.pair,
                join(&first.f)
            )
        }),
        Err(e) => sink.push(law, inst, Verdict::Fail, Some(e.to_string())),
    }
}

fn types(corpus: &[(String, Group)], cfg: &SuiteConfig, sink: &mut Sink) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (name, g) in corpus {
        let mut agree = true;
        for x in g.elements() {
            let t = tp_bs_list(g, &[x], &[]).expect("in range");
            let p = tp_bs_perms(&[], &[g.regular_perm(x)]).expect("valid");
            agree &= types_equal(&t, &p).expect("comparable");
        }
        sink.check("type-representations-agree", name, agree, || format!("lfg type compute {name}"));

        let mut rest: Vec<u32> = (1..g.order() as u32).collect();
        rest.shuffle(&mut rng);
        let sigma: Vec<u32> = std::iter::once(0).chain(rest).collect();
        let r = g.relabel(&sigma);
        let mut invariant = true;
        for x in g.elements() {
            for y in g.elements() {
                let a = tp_bs_list(g, &[x, y], &[]).expect("in range");
                let b = tp_bs_list(&r, &[sigma[x as usize], sigma[y as usize]], &[]).expect("in range");
                invariant &= types_equal(&a, &b).expect("comparable");
            }
        }
        sink.check("type-relabel-invariant", name, invariant, || format!("sigma={}", join(&sigma)));

        let all: Vec<u32> = g.elements().collect();
        let mut restrict_ok = true;
        for x in g.elements() {
            let full = tp_bs_list(g, &[x], &all).expect("in range");
            let empty = tp_bs_list(g, &[x], &[]).expect("in range");
            restrict_ok &= types_equal(&full.restrict(&[]), &empty).expect("comparable");
        }
        sink.check("type-restrict", name, restrict_ok, || format!("lfg type compute {name}"));

        let ext = apply_ab(g, &Group::cyclic(2), &[0, 1]).expect("direct product");
        let split = does_not_split(&ext.group, &ext.tuple[1..], &ext.j0.image(), &Subgroup::trivial(), cfg.m_max);
        sink.check("central-does-not-split", name, matches!(split, Ok(Split::DoesNotSplit)), || format!("{split:?}"));
    }
    Ok(())
}
