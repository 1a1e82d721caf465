//! `morita`: load, validate, construct, and certify finite pseudogroups.
//!
//! Exit status is 0 when everything verified, 1 when a structure failed a
//! law (the first witness is printed), and 2 when the input could not be
//! read or has the wrong shape.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use morita::action::{schein_complete_with, PseudoModule, SupportedAction, DEFAULT_IDEAL_LIMIT};
use morita::bimodule::EquivalenceBimodule;
use morita::enlargement::{
    bimodule_from_enlargement, check_certificate, enlarge_from_bimodule, joint_equivalence, DEFAULT_QUADRUPLE_LIMIT,
};
use morita::invariants::{is_zero_simplifying, summary};
use morita::io::{self, BimoduleFile, SemigroupRef};
use morita::presentation::Presentation;
use morita::quantale::{lcc_with, LccOptions, DEFAULT_CARRIER_LIMIT};
use morita::sheaf::{counit_iso, lcc_module_with, theta, unit_iso, QSheaf};
use morita::{bits, catalog, CayleyTable, InverseSemigroup, Pseudogroup};
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "morita", version, about = "Verifier for finite pseudogroups and their Morita equivalences")]
struct Cli {
    /// Bound for every enumeration (carriers, ideals, rook quadruples).
    #[arg(long, global = true)]
    max_size: Option<usize>,
    /// Suppress the human-readable report.
    #[arg(long, global = true)]
    quiet: bool,
    /// Write the machine-readable result here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Cayley table as an inverse semigroup and as a pseudogroup.
    Validate { table: PathBuf },
    /// Build and verify the quantale lcc(S).
    Lcc { table: PathBuf },
    /// Present a sup-lattice by generators and relations.
    Present { presentation: PathBuf },
    /// Validate a supported action, its module laws, and its completion.
    Module { action: PathBuf },
    /// Build the sheaf of an action's completion and check both round trips,
    /// or verify a sheaf file given with --tables.
    Sheaf {
        action: Option<PathBuf>,
        #[arg(long, conflicts_with = "action")]
        tables: Option<PathBuf>,
    },
    /// Verify an equivalence bimodule.
    Bimodule { bimodule: PathBuf },
    /// Build the rook-matrix enlargement of a bimodule; --out receives U.
    Enlarge {
        bimodule: PathBuf,
        /// Write the corner idempotents and both embeddings here.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
    /// Extract the bimodule eUf from an enlargement U.
    Extract {
        table: PathBuf,
        /// Idempotent e, by index or name.
        #[arg(long)]
        e: String,
        /// Idempotent f, by index or name.
        #[arg(long)]
        f: String,
    },
    /// Print the Morita invariants of a pseudogroup.
    Invariants { table: PathBuf },
    /// Dump a catalog entry as a Cayley table, or `atlas-M-N` as a bimodule file.
    Catalog {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Certify a Morita equivalence from S, T, and an (S, T)-bimodule.
    Certify { s: PathBuf, t: PathBuf, bimodule: PathBuf },
    /// Re-check a certificate document.
    Check { certificate: PathBuf },
}

enum Failure {
    Input(String),
    Verify(String),
}

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

fn verify(what: &str) -> impl Fn(&dyn Display) -> Failure + '_ {
    move |e| Failure::Verify(format!("{what}: {e}"))
}

struct Report {
    quiet: bool,
}

impl Report {
    fn line(&self, text: impl Display) {
        if !self.quiet {
            println!("{text}");
        }
    }
}

fn pseudogroup(table: &CayleyTable, what: &str) -> Result<Pseudogroup, Failure> {
    Pseudogroup::from_table(table).map_err(|e| verify(what)(&e))
}

fn element(s: &InverseSemigroup, text: &str) -> Result<usize, Failure> {
    let found = text.parse().ok().filter(|&i| i < s.len()).or_else(|| s.element_named(text));
    found.ok_or_else(|| input(format!("no element `{text}`")))
}

fn digest(rows: impl IntoIterator<Item = usize>) -> String {
    let mut hasher = Sha256::new();
    for v in rows {
        hasher.update((v as u64).to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

/// `atlas-M-N` names the bimodule of partial bijections from N points to M.
fn atlas_dimensions(name: &str) -> Option<(usize, usize)> {
    let (m, n) = name.strip_prefix("atlas-")?.split_once('-')?;
    Some((m.parse().ok()?, n.parse().ok()?))
}

fn write_out(out: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<(), Failure> {
    match out {
        Some(path) => io::write_json(path, value).map_err(input),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let r = Report { quiet: cli.quiet };
    let limit = |default: usize| cli.max_size.unwrap_or(default);
    match cli.command {
        Command::Validate { table } => {
            let raw = io::load_table(&table).map_err(input)?;
            let s = InverseSemigroup::validate(&raw).map_err(|e| verify("inverse semigroup")(&e))?;
            r.line(format!("inverse semigroup: {} elements, {} idempotents", s.len(), s.idempotents().len()));
            let p = Pseudogroup::new(s).map_err(|e| verify("pseudogroup")(&e))?;
            r.line(format!("pseudogroup: zero {}, identity {}", p.name(p.zero_element()), p.name(p.top())));
            write_out(&cli.out, &json!({ "size": p.len(), "idempotents": p.idempotents().len() }))
        }
        Command::Lcc { table } => {
            let s = pseudogroup(&io::load_table(&table).map_err(input)?, "pseudogroup")?;
            let q = lcc_with(&s, LccOptions { limit: limit(DEFAULT_CARRIER_LIMIT) }).map_err(|e| verify("lcc")(&e))?;
            q.verify().map_err(|e| verify("inverse quantal frame")(&e))?;
            let carrier: Vec<String> = q.lattice().members().iter().map(bits::to_bitstring).collect();
            let mult = digest((0..q.len()).flat_map(|a| (0..q.len()).map(move |b| (a, b))).map(|(a, b)| q.mul(a, b)));
            r.line(format!("lcc: {} elements, unit {}, mult sha256 {mult}", q.len(), bits::to_bitstring(q.element(q.unit()).bits())));
            for (i, c) in carrier.iter().enumerate() {
                r.line(format!("  {i:>4} {c}"));
            }
            write_out(&cli.out, &json!({ "carrier": carrier, "unit": q.unit(), "mult_sha256": mult }))
        }
        Command::Present { presentation } => {
            let file = io::load_presentation(&presentation).map_err(input)?;
            let p = Presentation::new(file.generators, file.relation_sets()).map_err(input)?;
            let lattice = p.present(limit(64)).map_err(|e| verify("presentation")(&e))?;
            let carrier: Vec<String> = lattice.carrier().iter().map(bits::to_bitstring).collect();
            r.line(format!("presented sup-lattice: {} elements from {} generators", carrier.len(), file.generators));
            for (i, c) in carrier.iter().enumerate() {
                r.line(format!("  {i:>4} {c}"));
            }
            let eta: Vec<usize> = (0..file.generators).map(|x| lattice.eta(x)).collect();
            write_out(&cli.out, &json!({ "carrier": carrier, "eta": eta }))
        }
        Command::Module { action } => {
            let (raw, tables) = io::load_action(&action).map_err(input)?;
            let s = pseudogroup(&raw, "pseudogroup")?;
            let a = SupportedAction::validate(&s, &tables).map_err(|e| verify("supported action")(&e))?;
            a.check_day().map_err(|e| verify("supported action")(&e))?;
            r.line(format!("supported action: {} elements", a.len()));
            match PseudoModule::new(&s, a.clone(), None) {
                Ok(_) => r.line("module: yes"),
                Err(e) => r.line(format!("module: no ({e})")),
            }
            let completion = schein_complete_with(&s, &a, limit(DEFAULT_IDEAL_LIMIT)).map_err(|e| verify("completion")(&e))?;
            r.line(format!("completion: {} elements", completion.module.len()));
            write_out(&cli.out, &completion.module.action().to_tables())
        }
        Command::Sheaf { action, tables } => {
            if let Some(path) = tables {
                let (raw, t) = io::load_sheaf(&path).map_err(input)?;
                let s = pseudogroup(&raw, "pseudogroup")?;
                let q = Arc::new(lcc_with(&s, LccOptions { limit: limit(DEFAULT_CARRIER_LIMIT) }).map_err(|e| verify("lcc")(&e))?);
                io::check_sheaf_action(&path, &t, q.len()).map_err(input)?;
                let xi = QSheaf::verify(q, &t).map_err(|e| verify("sheaf")(&e))?;
                counit_iso(&xi).map_err(|e| verify("counit")(&e))?;
                r.line(format!("sheaf: {} elements, {} local sections", xi.len(), xi.sections().count_ones(..)));
                return write_out(&cli.out, &xi.to_tables());
            }
            let path = action.ok_or_else(|| input("expected an action file or --tables"))?;
            let (raw, tables) = io::load_action(&path).map_err(input)?;
            let s = pseudogroup(&raw, "pseudogroup")?;
            let a = SupportedAction::validate(&s, &tables).map_err(|e| verify("supported action")(&e))?;
            let module = schein_complete_with(&s, &a, limit(DEFAULT_IDEAL_LIMIT)).map_err(|e| verify("completion")(&e))?.module;
            let q = Arc::new(lcc_with(&s, LccOptions { limit: limit(DEFAULT_CARRIER_LIMIT) }).map_err(|e| verify("lcc")(&e))?);
            let completion = lcc_module_with(&module, q, limit(DEFAULT_CARRIER_LIMIT)).map_err(|e| verify("sheaf")(&e))?;
            unit_iso(&module, &completion).map_err(|e| verify("unit")(&e))?;
            counit_iso(&completion.sheaf).map_err(|e| verify("counit")(&e))?;
            let sections = theta(&completion.sheaf).map_err(|e| verify("sections")(&e))?;
            r.line(format!(
                "sheaf: {} elements, {} local sections (= module of {} elements); unit and counit are isomorphisms",
                completion.sheaf.len(),
                sections.sections.len(),
                module.len()
            ));
            write_out(&cli.out, &completion.sheaf.to_tables())
        }
        Command::Bimodule { bimodule } => {
            let (s, t, tables) = io::load_bimodule(&bimodule).map_err(input)?;
            let (s, t) = (pseudogroup(&s, "S")?, pseudogroup(&t, "T")?);
            let b = EquivalenceBimodule::verify(&s, &t, &tables).map_err(|e| verify("equivalence bimodule")(&e))?;
            r.line(format!("equivalence bimodule: |S| = {}, |T| = {}, |X| = {}", s.len(), t.len(), b.len()));
            let dual = b.dual();
            r.line(format!("dual verified: |X̄| = {}", dual.len()));
            write_out(&cli.out, &dual.to_tables())
        }
        Command::Enlarge { bimodule, embeddings } => {
            let (s, t, tables) = io::load_bimodule(&bimodule).map_err(input)?;
            let (s, t) = (pseudogroup(&s, "S")?, pseudogroup(&t, "T")?);
            let b = EquivalenceBimodule::verify(&s, &t, &tables).map_err(|e| verify("equivalence bimodule")(&e))?;
            let w = enlarge_from_bimodule(&b, limit(DEFAULT_QUADRUPLE_LIMIT)).map_err(|e| verify("enlargement")(&e))?;
            r.line(format!("enlargement: |U| = {}, corners {} and {}", w.u.len(), w.e_s, w.e_t));
            r.line("E1 and E2 hold for both corners");
            if let Some(path) = embeddings {
                let maps = json!({ "e_s": w.e_s, "e_t": w.e_t, "s_embedding": w.s_embedding, "t_embedding": w.t_embedding });
                io::write_json(&path, &maps).map_err(input)?;
            }
            write_out(&cli.out, &w.u.to_table())
        }
        Command::Extract { table, e, f } => {
            let u = pseudogroup(&io::load_table(&table).map_err(input)?, "U")?;
            let (e, f) = (element(&u, &e)?, element(&u, &f)?);
            let x = bimodule_from_enlargement(&u, e, f).map_err(|err| verify("extraction")(&err))?;
            r.line(format!("bimodule eUf: |S| = {}, |T| = {}, |X| = {}", x.s_embedding.len(), x.t_embedding.len(), x.bimodule.len()));
            let file = BimoduleFile {
                s: SemigroupRef::Inline(x.bimodule.left().to_table()),
                t: SemigroupRef::Inline(x.bimodule.right().to_table()),
                tables: x.bimodule.to_tables(),
            };
            write_out(&cli.out, &file)
        }
        Command::Invariants { table } => {
            let s = pseudogroup(&io::load_table(&table).map_err(input)?, "pseudogroup")?;
            let routes = is_zero_simplifying(&s).map_err(|e| verify("invariants")(&e))?;
            let inv = summary(&s).map_err(|e| verify("invariants")(&e))?;
            r.line(format!("0-simplifying: {}", inv.zero_simplifying));
            r.line(format!("fundamental: {}", inv.fundamental));
            r.line(format!("idempotents: {}", inv.idempotents));
            r.line(format!("D-classes: {}", inv.d_classes));
            write_out(&cli.out, &json!({ "summary": inv, "routes": routes }))
        }
        Command::Catalog { name, list } => {
            if list || name.is_none() {
                for n in catalog::ENTRY_NAMES {
                    println!("{n}");
                }
                println!("atlas-M-N (bimodule over IM and IN, 1 <= M, N <= 4)");
                return Ok(());
            }
            let name = name.expect("checked");
            let value = match atlas_dimensions(&name) {
                Some((m, n)) => serde_json::to_value(BimoduleFile {
                    s: SemigroupRef::Path(format!("catalog:I{m}")),
                    t: SemigroupRef::Path(format!("catalog:I{n}")),
                    tables: catalog::atlas_tables(m, n).map_err(input)?,
                }),
                None => serde_json::to_value(catalog::by_name(&name).map_err(input)?),
            }
            .expect("values serialize");
            match &cli.out {
                Some(_) => write_out(&cli.out, &value),
                None => {
                    println!("{value}");
                    Ok(())
                }
            }
        }
        Command::Certify { s, t, bimodule } => {
            let (s_raw, t_raw) = (io::load_table(&s).map_err(input)?, io::load_table(&t).map_err(input)?);
            let (bs, bt, tables) = io::load_bimodule(&bimodule).map_err(input)?;
            if bs.mult != s_raw.mult || bt.mult != t_raw.mult {
                return Err(input("the bimodule file refers to different semigroups than the ones given"));
            }
            let (s, t) = (pseudogroup(&s_raw, "S")?, pseudogroup(&t_raw, "T")?);
            let cert = joint_equivalence(&s, &t, &tables, limit(DEFAULT_QUADRUPLE_LIMIT)).map_err(|e| verify("certify")(&e))?;
            check_certificate(&cert).map_err(|e| verify("certificate")(&e))?;
            r.line(format!("Morita equivalent as pseudogroups: |S| = {}, |T| = {}, |U| = {}", s.len(), t.len(), cert.u_size));
            r.line(format!("bimodule sha256 {}", cert.bimodule_hash));
            let (si, ti) = (&cert.invariants.s, &cert.invariants.t);
            r.line(format!("0-simplifying: {} / {}", si.zero_simplifying, ti.zero_simplifying));
            r.line(format!("fundamental: {} / {}", si.fundamental, ti.fundamental));
            r.line(format!("D-classes: {} / {}", si.d_classes, ti.d_classes));
            write_out(&cli.out, &cert)
        }
        Command::Check { certificate } => {
            let path: &Path = &certificate;
            let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let cert = io::parse(path, &text).map_err(input)?;
            check_certificate(&cert).map_err(|e| verify("certificate")(&e))?;
            r.line("certificate checks");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(message)) => {
            eprintln!("verification failed: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("input error: {message}");
            ExitCode::from(2)
        }
    }
}
