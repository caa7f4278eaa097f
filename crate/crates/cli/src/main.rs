use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lfgroup::amalgam::{
    embedding_configurations, enumerate_tries, sample_tries, stable_amalgam, verify_nf_laws, AmalgamTry, Budget,
    LawOptions, Shape,
};
use lfgroup::closure::{certify_ec, chain_limit_probe, hall_chain, one_step_chain, z2_diagonal_chain, StageChain};
use lfgroup::group::{generated_subgroup, Embedding, Group};
use lfgroup::io::{format_embedding, format_indices, format_mtable, format_permutation};
use lfgroup::nf3::{nf3_amalgam, Nf3Request};
use lfgroup::schemes::{apply_ab, apply_cg, apply_gl, apply_gm, Extension, Scheme};
use lfgroup::types::{does_not_split, tp_bs_list, types_equal, Split};
use lfgroup_cli::{bundled_corpus_dir, load_corpus, load_group, parse_list, run_suite, CliError, SuiteConfig};

#[derive(Parser)]
#[command(name = "lfg", version, about = "Finite group amalgams, types and closure chains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Largest triple space built for one try.
    #[arg(long, global = true, default_value_t = 20_000)]
    budget_triples: usize,
    /// Largest total point count of the product over tries.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    budget_product: usize,
    #[arg(long, global = true, default_value_t = 2)]
    m_max: usize,
    #[arg(long, global = true, default_value_t = 6)]
    term_budget: usize,
    /// Output directory; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory of `NN_name.mtable` files.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add wall times to suite records.
    #[arg(long, global = true)]
    timings: bool,
}

impl Global {
    fn budget(&self) -> Budget {
        Budget { triples_per_try: self.budget_triples, product_points: self.budget_product }
    }
}

#[derive(Subcommand)]
enum Cmd {
    #[command(subcommand)]
    Group(GroupCmd),
    #[command(subcommand)]
    Type(TypeCmd),
    #[command(subcommand)]
    Split(SplitCmd),
    #[command(subcommand)]
    Amalgam(AmalgamCmd),
    #[command(subcommand)]
    Tries(TriesCmd),
    #[command(subcommand)]
    Nf3(Nf3Cmd),
    #[command(subcommand)]
    Scheme(SchemeCmd),
    #[command(subcommand)]
    Closure(ClosureCmd),
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Validate an mtable file.
    Check { file: PathBuf },
    /// Print a group (file or corpus name) as mtable.
    Show { group: String },
}

#[derive(Subcommand)]
enum TypeCmd {
    /// Quantifier-free type of a tuple over a base set.
    Compute {
        group: String,
        #[arg(long, default_value = "")]
        tuple: String,
        #[arg(long, default_value = "")]
        base: String,
    },
    Equal {
        group1: String,
        group2: String,
        #[arg(long, default_value = "")]
        tuple1: String,
        #[arg(long, default_value = "")]
        base1: String,
        #[arg(long, default_value = "")]
        tuple2: String,
        #[arg(long, default_value = "")]
        base2: String,
    },
}

#[derive(Subcommand)]
enum SplitCmd {
    /// Does tuple ā in H split over (G, K)? G and K are given by generators.
    Check {
        group: String,
        #[arg(long, default_value = "")]
        tuple: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "")]
        k: String,
    },
}

#[derive(Args)]
struct ShapeArgs {
    g0: String,
    g1: String,
    g2: String,
    /// Images of G0 in G1; defaults to the first configuration.
    #[arg(long)]
    emb1: Option<String>,
    #[arg(long)]
    emb2: Option<String>,
}

impl ShapeArgs {
    fn shape(&self) -> Result<std::sync::Arc<Shape>, Box<dyn std::error::Error>> {
        let g0 = load_group(&self.g0)?;
        let g1 = load_group(&self.g1)?;
        let g2 = load_group(&self.g2)?;
        let (e1, e2) = match (&self.emb1, &self.emb2) {
            (Some(a), Some(b)) => (Embedding::new(&g0, &g1, parse_list(a)?)?, Embedding::new(&g0, &g2, parse_list(b)?)?),
            (None, None) => embedding_configurations(&g0, &g1, &g2)
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Usage("G0 embeds in neither side".into()))?,
            _ => return Err(CliError::Usage("give both --emb1 and --emb2 or neither".into()).into()),
        };
        Ok(Shape::new(g0, g1, g2, e1, e2)?)
    }
}

#[derive(Subcommand)]
enum AmalgamCmd {
    /// Build G3 and print it with its two embeddings.
    Run(ShapeArgs),
    /// Check the amalgam laws on G3.
    Laws(ShapeArgs),
}

#[derive(Subcommand)]
enum TriesCmd {
    List {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    Sample {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum Nf3Cmd {
    Run {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Generators of L in G1.
        #[arg(long, default_value = "")]
        l: String,
        /// Generators of H0 in G0.
        #[arg(long, default_value = "")]
        h0: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeId {
    Cg,
    Gl,
    Ab,
    Gm,
}

#[derive(Subcommand)]
enum SchemeCmd {
    Apply {
        scheme: SchemeId,
        group: String,
        /// gl: the order-two element a; gm: the first tuple.
        #[arg(long, default_value = "")]
        param: String,
        /// gm: the second tuple.
        #[arg(long, default_value = "")]
        param2: String,
        /// ab: the group K, a file or corpus name.
        #[arg(long, default_value = "Z2")]
        k: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainOp {
    Hall,
    OneStep,
}

#[derive(Subcommand)]
enum ClosureCmd {
    Run {
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, value_enum, default_value = "hall")]
        op: ChainOp,
    },
    /// Certify a saved chain directory.
    Certify {
        dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Chain-limit probe on the Z2^n diagonal chain.
    Probe {
        #[arg(long, default_value_t = 7)]
        stages: usize,
        #[arg(long, default_value_t = 3)]
        param_stage: usize,
        /// Drop the newness condition (factorial indices).
        #[arg(long)]
        factorial: bool,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    Run { name: String },
}

type Outcome = Result<bool, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(g: &Global, name: &str, text: &str) -> Result<(), Box<dyn std::error::Error>> {
    match &g.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn ext_text(ext: &Extension) -> String {
    let mut s = format_mtable(&ext.group);
    s.push_str(&format_embedding("j0", &ext.j0));
    s.push('\n');
    s.push_str(&format_indices("tuple", &ext.tuple));
    s.push('\n');
    s
}

fn try_line(x: &AmalgamTry) -> String {
    format!("{}; {}", format_indices("i1", &x.i1), format_indices("i2", &x.i2))
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Group(GroupCmd::Check { file }) => {
            let grp = lfgroup_cli::parse_group_file(file)?;
            println!("ok: order {}{}", grp.order(), if grp.is_abelian() { ", abelian" } else { "" });
            Ok(true)
        }
        Cmd::Group(GroupCmd::Show { group }) => {
            emit(g, "group.mtable", &format_mtable(&load_group(group)?))?;
            Ok(true)
        }
        Cmd::Type(TypeCmd::Compute { group, tuple, base }) => {
            let h = load_group(group)?;
            let t = tp_bs_list(&h, &parse_list(tuple)?, &parse_list(base)?)?;
            let text = t.to_text().unwrap_or_else(|| format!("order {}\n", t.order()));
            emit(g, "type.txt", &text)?;
            Ok(true)
        }
        Cmd::Type(TypeCmd::Equal { group1, group2, tuple1, base1, tuple2, base2 }) => {
            let p = tp_bs_list(&load_group(group1)?, &parse_list(tuple1)?, &parse_list(base1)?)?;
            let q = tp_bs_list(&load_group(group2)?, &parse_list(tuple2)?, &parse_list(base2)?)?;
            println!("{}", if types_equal(&p, &q)? { "equal" } else { "different" });
            Ok(true)
        }
        Cmd::Split(SplitCmd::Check { group, tuple, g: gg, k }) => {
            let h = load_group(group)?;
            let sub_g = generated_subgroup(&h, &parse_list(gg)?)?;
            let sub_k = generated_subgroup(&h, &parse_list(k)?)?;
            match does_not_split(&h, &parse_list(tuple)?, &sub_g, &sub_k, g.m_max)? {
                Split::DoesNotSplit => {
                    println!("does not split (m <= {})", g.m_max);
                    Ok(true)
                }
                Split::Witness(w) => {
                    println!("splits: m={} {} {} term={}", w.m, format_indices("b1", &w.b1), format_indices("b2", &w.b2), w.reason);
                    Ok(false)
                }
            }
        }
        Cmd::Amalgam(AmalgamCmd::Run(s)) => {
            let sa = stable_amalgam(&s.shape()?, g.budget())?;
            let text = match sa.to_text() {
                Some(t) => t,
                None => {
                    let gens: Vec<String> = sa.marked().gens().iter().map(format_permutation).collect();
                    format!("order {}\ndegree {}\n{}\n", sa.order(), sa.degree(), gens.join("\n"))
                }
            };
            emit(g, "amalgam.txt", &text)?;
            Ok(true)
        }
        Cmd::Amalgam(AmalgamCmd::Laws(s)) => {
            let sa = stable_amalgam(&s.shape()?, g.budget())?;
            let report = verify_nf_laws(&sa, LawOptions { budget: g.budget(), seed: g.seed });
            for e in &report.entries {
                println!("{} {} {}", if e.pass { "PASS" } else { "FAIL" }, e.law, e.detail);
            }
            println!("order {} within bound {}", sa.order(), sa.certificate.within_bound);
            Ok(report.all_pass() && sa.certificate.within_bound)
        }
        Cmd::Tries(TriesCmd::List { shape, count }) => {
            let sh = shape.shape()?;
            println!("tries {}", sh.try_count());
            for x in enumerate_tries(&sh).take(*count) {
                println!("{}", try_line(&x));
            }
            Ok(true)
        }
        Cmd::Tries(TriesCmd::Sample { shape, count }) => {
            let sh = shape.shape()?;
            for x in sample_tries(&sh, g.seed, *count) {
                println!("{}", try_line(&x));
            }
            Ok(true)
        }
        Cmd::Nf3(Nf3Cmd::Run { shape, l, h0 }) => {
            let sh = shape.shape()?;
            let l = generated_subgroup(&sh.g1, &parse_list(l)?)?;
            let h0 = generated_subgroup(&sh.g0, &parse_list(h0)?)?;
            let req = Nf3Request::new(sh, l, h0)?;
            let r = nf3_amalgam(&req, g.budget())?;
            if let Some(t) = r.amalgam.to_text() {
                emit(g, "nf3.txt", &t)?;
            }
            println!(
                "order {} commuting pairs {} failures {} clause failures {}",
                r.amalgam.order(),
                r.certificate.pairs_checked,
                r.certificate.failures.len(),
                r.clause_failures.len()
            );
            Ok(r.certificate.holds() && r.clause_failures.is_empty())
        }
        Cmd::Scheme(SchemeCmd::Apply { scheme, group, param, param2, k }) => {
            let grp = load_group(group)?;
            let p = parse_list(param)?;
            let ext = match scheme {
                SchemeId::Cg => apply_cg(&grp)?,
                SchemeId::Gl => {
                    let a = *p.first().ok_or_else(|| CliError::Usage("gl needs --param a".into()))?;
                    apply_gl(&grp, a)?
                }
                SchemeId::Ab => {
                    let kg = load_group(k)?;
                    let listing: Vec<u32> = kg.elements().collect();
                    apply_ab(&grp, &kg, &listing)?
                }
                SchemeId::Gm => apply_gm(&grp, &p, &parse_list(param2)?)?,
            };
            emit(g, "extension.txt", &ext_text(&ext))?;
            Ok(true)
        }
        Cmd::Closure(ClosureCmd::Run { steps, bound, op }) => {
            let triv = Group::trivial();
            let (chain, err) = match op {
                ChainOp::Hall => hall_chain(&triv, *bound, *steps, g.budget()),
                ChainOp::OneStep => {
                    one_step_chain(&triv, &[Scheme::Cg, Scheme::Ab(2), Scheme::Ab(3)], 0, *steps, g.budget())
                }
            };
            let orders: Vec<String> = chain.stages.iter().map(|s| s.order().to_string()).collect();
            println!("stages {}", orders.join(" "));
            if let Some(dir) = &g.out {
                chain.save(dir)?;
            }
            if let Some(e) = &err {
                eprintln!("stopped: {e}");
            }
            Ok(err.is_none())
        }
        Cmd::Closure(ClosureCmd::Certify { dir, bound }) => {
            let chain = StageChain::load(dir)?;
            let r = certify_ec(&chain, *bound)?;
            print!("{r}");
            Ok(r.pass)
        }
        Cmd::Closure(ClosureCmd::Probe { stages, param_stage, factorial }) => {
            let (chain, mut probe) = z2_diagonal_chain(*stages)?;
            probe.newness = !factorial;
            let r = chain_limit_probe(&chain, &probe, g.term_budget, *param_stage)?;
            println!("{r}");
            Ok(r.pass)
        }
        Cmd::Suite(SuiteCmd::Run { name }) => {
            let dir = g.corpus.clone().unwrap_or_else(bundled_corpus_dir);
            let corpus = load_corpus(&dir)?;
            let cfg = SuiteConfig {
                budget: g.budget(),
                m_max: g.m_max,
                term_budget: g.term_budget,
                seed: g.seed,
                timings: g.timings,
                ..SuiteConfig::default()
            };
            let report = run_suite(name, &corpus, &cfg)?;
            emit(g, &format!("{name}.jsonl"), &report.to_jsonl())?;
            let (p, f, i) = report.summary();
            eprintln!("{name}: {p} pass, {f} fail, {i} info");
            Ok(report.passed())
        }
    }
}

