//! The `freecover` command line: folding, covers, towers, homology
//! representations, certificates, nilpotent and Whitehead checks, and
//! ribbon-surface reports.
//!
//! Exit codes: 0 for success or a found certificate/witness, 1 for a clean
//! negative ("not found", "false"), 2 for input errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use freecover_core::covers::{BasedCover, CoverTower, FiniteQuotient, Separation};
use freecover_core::homology::{
    deck_matrix, find_nonsurjectivity_certificate, is_epi_on_homology, lift_matrix, SearchConfig,
    SearchGoal,
};
use freecover_core::nilpotent::{is_epi_on_nilpotent_quotient, question_witness};
use freecover_core::stallings::graph_from_generators;
use freecover_core::surfaces::{
    disjointness_search, preserves_intersection_form, ribbon_family, DisjointnessVerdict,
    RoseRibbon,
};
use freecover_core::whitehead::{connectivity_report, whitehead_graph, whitehead_reduce};
use freecover_core::word::{Endomorphism, Word};
use freecover_core::{covers, Error};

#[derive(Parser)]
#[command(
    name = "freecover",
    version,
    about = "Exact homology representations of free-group endomorphisms on finite covers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Moduli for cover towers; single-cover commands use the first.
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3")]
    q: Vec<usize>,

    /// Maximum tower depth.
    #[arg(long, alias = "depth", global = true, default_value_t = 2)]
    max_depth: usize,

    /// Vertex budget per cover.
    #[arg(
        long,
        global = true,
        env = "FREECOVER_MAX_VERTICES",
        default_value_t = covers::DEFAULT_MAX_VERTICES
    )]
    max_vertices: usize,

    /// Truncation degree for nilpotent-quotient checks.
    #[arg(long, global = true, default_value_t = 6)]
    nilpotent_cap: usize,

    /// Seed recorded in outputs; used by randomized property drivers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Fold the subgroup graph generated by words.
    Fold {
        /// Generator words, e.g. "aab" "b".
        gens: Vec<String>,
        /// Ambient rank; inferred from the words when omitted.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Build the mod-q homology cover of the rank-n rose.
    Cover {
        #[arg(long)]
        n: usize,
    },
    /// Build the tower of mod-q homology covers to --max-depth.
    Tower {
        #[arg(long)]
        n: usize,
    },
    /// Find the smallest tower level separating a word.
    Separate {
        word: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Lift an endomorphism to a tower level and print its matrix.
    Homrep {
        #[arg(long)]
        phi: String,
        /// Tower level; 0 is the rose itself.
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Matrix of a deck transformation on the mod-q cover.
    Deck {
        #[arg(long)]
        n: usize,
        /// Deck element as its coordinate digits, e.g. "01".
        #[arg(long)]
        element: String,
    },
    /// Whether a lifted endomorphism is surjective on homology.
    CheckEpi {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Search the cover family for a non-surjectivity certificate.
    Certify {
        #[arg(long)]
        phi: String,
        #[arg(long, value_enum, default_value_t = Goal::NonEpi)]
        goal: Goal,
    },
    /// Whether the endomorphism is surjective on the class-(k-1)
    /// nilpotent quotient.
    Nilpotent {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Whitehead graph analysis of a word.
    Whitehead {
        word: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Run the end-to-end counterexample: a non-surjective endomorphism
    /// that is surjective on every nilpotent quotient.
    #[command(name = "witness-5")]
    Witness5 {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Ribbon-surface reports over the cover family.
    Surface {
        /// Cyclic order of half-edges at the rose vertex, e.g. "a b A B".
        #[arg(long)]
        rotation: String,
        #[command(subcommand)]
        action: SurfaceAction,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Goal {
    NonEpi,
    Nontrivial,
}

#[derive(Subcommand)]
enum SurfaceAction {
    /// Genus, boundary and pairing data of each family cover.
    Info,
    /// Whether the elevation lattice of a loop is isotropic everywhere.
    Isotropic {
        #[arg(long)]
        loop_word: String,
    },
    /// Search the family for an intersection witness between two loops.
    Disjoint {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Whether some deck-composed lift preserves the intersection form.
    Preserve {
        #[arg(long)]
        phi: String,
    },
}

#[derive(Serialize)]
struct ConfigEcho {
    q: Vec<usize>,
    max_depth: usize,
    max_vertices: usize,
    nilpotent_cap: usize,
    seed: u64,
}

/// A command result: verdicts carry both the JSON value and a one-line
/// text rendering; raw results (DOT, plain text) print as they are.
enum Outcome {
    Verdict {
        found: bool,
        value: serde_json::Value,
        summary: String,
    },
    Raw(String),
}

fn found(value: serde_json::Value, summary: impl Into<String>) -> Outcome {
    Outcome::Verdict {
        found: true,
        value,
        summary: summary.into(),
    }
}

fn not_found(value: serde_json::Value, summary: impl Into<String>) -> Outcome {
    Outcome::Verdict {
        found: false,
        value,
        summary: summary.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Verdict {
            found,
            value,
            summary,
        }) => {
            match cli.run.output {
                Format::Text => println!("{summary}"),
                _ => println!("{}", envelope(&cli.run, value)),
            }
            ExitCode::from(if found { 0 } else { 1 })
        }
        Ok(Outcome::Raw(text)) => {
            println!("{text}");
            ExitCode::from(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn envelope(run: &RunArgs, result: serde_json::Value) -> String {
    let out = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": ConfigEcho {
            q: run.q.clone(),
            max_depth: run.max_depth,
            max_vertices: run.max_vertices,
            nilpotent_cap: run.nilpotent_cap,
            seed: run.seed,
        },
        "result": result,
    });
    serde_json::to_string_pretty(&out).expect("serializable")
}

fn first_q(run: &RunArgs) -> Result<usize, Error> {
    run.q
        .first()
        .copied()
        .ok_or_else(|| Error::Parse("--q needs at least one modulus".into()))
}

fn infer_rank(texts: &[&str], explicit: Option<usize>) -> Result<usize, Error> {
    if let Some(r) = explicit {
        return Ok(r);
    }
    let mut max_index = 0usize;
    for text in texts {
        let probe = Word::parse(text, i32::MAX as usize)?;
        for &l in probe.letters() {
            max_index = max_index.max(l.unsigned_abs() as usize);
        }
    }
    Ok(max_index.max(2))
}

fn search_config(run: &RunArgs, goal: SearchGoal) -> SearchConfig {
    SearchConfig {
        q_list: run.q.clone(),
        max_depth: run.max_depth,
        max_vertices: run.max_vertices,
        goal,
    }
}

/// The cover of the requested tower level together with the endomorphism
/// rewritten for that level's base rose. Level 0 is the rose itself.
fn tower_level_cover(
    run: &RunArgs,
    phi: &Endomorphism,
    level: usize,
) -> Result<(BasedCover, Endomorphism, u128), Error> {
    if level == 0 {
        let cover = BasedCover::build(FiniteQuotient::trivial(phi.rank()));
        return Ok((cover, phi.clone(), 1));
    }
    let q = first_q(run)?;
    let tower = CoverTower::build(phi.rank(), q, level, run.max_vertices)?;
    let lifted = tower.lifted_endomorphism(level, phi)?;
    let cover = tower.levels()[level - 1].cover.clone();
    let degree = tower.total_degree();
    Ok((cover, lifted, degree))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let run = &cli.run;
    match &cli.command {
        Command::Fold { gens, rank } => {
            if gens.is_empty() {
                return Err(Error::Parse("fold needs at least one generator word".into()));
            }
            let texts: Vec<&str> = gens.iter().map(String::as_str).collect();
            let rank = infer_rank(&texts, *rank)?;
            let words = texts
                .iter()
                .map(|t| Word::parse(t, rank))
                .collect::<Result<Vec<_>, _>>()?;
            let graph = graph_from_generators(rank, &words)?;
            if run.output == Format::Dot {
                return Ok(Outcome::Raw(graph.to_dot()));
            }
            let summary = format!(
                "rank {} graph: {} vertices, {} edges, cycle rank {}, rose: {}",
                rank,
                graph.vertex_count(),
                graph.edge_count(),
                graph.cycle_rank()?,
                graph.is_rose()
            );
            Ok(found(
                json!({
                    "graph": graph.to_json(),
                    "is_rose": graph.is_rose(),
                    "cycle_rank": graph.cycle_rank()?,
                }),
                summary,
            ))
        }
        Command::Cover { n } => {
            let q = first_q(run)?;
            let cover = BasedCover::build(FiniteQuotient::mod_q(*n, q)?);
            if run.output == Format::Dot {
                return Ok(Outcome::Raw(cover.graph().to_dot()));
            }
            let summary = format!(
                "mod-{q} cover of the rank-{n} rose: {} sheets, homology rank {}",
                cover.degree(),
                cover.homology_rank()
            );
            Ok(found(cover.to_json(), summary))
        }
        Command::Tower { n } => {
            let q = first_q(run)?;
            let tower = CoverTower::build(*n, q, run.max_depth, run.max_vertices)?;
            tower.validate_descent()?;
            let levels: Vec<serde_json::Value> = tower
                .levels()
                .iter()
                .map(|level| {
                    json!({
                        "deck_order": level.cover.degree(),
                        "homology_rank": level.cover.homology_rank(),
                        "descent_witness": level.descent_witness.to_string(),
                    })
                })
                .collect();
            let summary = format!(
                "mod-{q} tower, depth {}: total degree {}",
                tower.depth(),
                tower.total_degree()
            );
            Ok(found(
                json!({
                    "q": q,
                    "depth": tower.depth(),
                    "total_degree": tower.total_degree().to_string(),
                    "levels": levels,
                }),
                summary,
            ))
        }
        Command::Separate { word, rank } => {
            let q = first_q(run)?;
            let rank = infer_rank(&[word.as_str()], *rank)?;
            let w = Word::parse(word, rank)?;
            match covers::separate_word(&w, q, run.max_depth, run.max_vertices)? {
                Separation::Separated { level } => Ok(found(
                    json!({ "word": w.to_string(), "separated": true, "level": level }),
                    format!("{w} separated at level {level}"),
                )),
                Separation::NotSeparated { levels_built } => Ok(not_found(
                    json!({
                        "word": w.to_string(),
                        "separated": false,
                        "levels_built": levels_built,
                    }),
                    format!("{w} not separated within {levels_built} levels"),
                )),
            }
        }
        Command::Homrep { phi, level } => {
            let phi = Endomorphism::parse(phi)?;
            let (cover, lifted, degree) = tower_level_cover(run, &phi, *level)?;
            let rep = lift_matrix(&cover, &lifted)?;
            let summary = format!(
                "lift of {phi} at level {level}: {}x{} matrix over a degree-{degree} cover",
                rep.matrix.rows(),
                rep.matrix.cols()
            );
            Ok(found(
                json!({
                    "endomorphism": phi.to_string(),
                    "q": if *level == 0 { None } else { Some(first_q(run)?) },
                    "level": level,
                    "cover_degree": degree.to_string(),
                    "dimension": rep.matrix.rows(),
                    "matrix": rep.matrix.to_string_rows(),
                }),
                summary,
            ))
        }
        Command::Deck { n, element } => {
            let q = first_q(run)?;
            let cover = BasedCover::build(FiniteQuotient::mod_q(*n, q)?);
            let g = cover.quotient().element_by_label(element)?;
            let rep = deck_matrix(&cover, g);
            let trace = rep.matrix.trace();
            let summary = format!(
                "deck element {element} on the mod-{q} cover of the rank-{n} rose: \
                 {}x{} matrix, trace {trace}",
                rep.matrix.rows(),
                rep.matrix.cols()
            );
            Ok(found(
                json!({
                    "element": element,
                    "dimension": rep.matrix.rows(),
                    "trace": trace.to_string(),
                    "matrix": rep.matrix.to_string_rows(),
                }),
                summary,
            ))
        }
        Command::CheckEpi { phi, level } => {
            let phi = Endomorphism::parse(phi)?;
            let (cover, lifted, degree) = tower_level_cover(run, &phi, *level)?;
            let rep = lift_matrix(&cover, &lifted)?;
            let epi = is_epi_on_homology(&rep.matrix)?;
            let value = json!({
                "endomorphism": phi.to_string(),
                "level": level,
                "cover_degree": degree.to_string(),
                "epi_on_homology": epi,
            });
            let summary = format!("{phi} at level {level}: epi on homology = {epi}");
            Ok(if epi {
                found(value, summary)
            } else {
                not_found(value, summary)
            })
        }
        Command::Certify { phi, goal } => {
            let phi = Endomorphism::parse(phi)?;
            let goal = match goal {
                Goal::NonEpi => SearchGoal::NonEpimorphism,
                Goal::Nontrivial => SearchGoal::Nontriviality,
            };
            let config = search_config(run, goal);
            match find_nonsurjectivity_certificate(&phi, &config)? {
                Some(cert) => {
                    let summary = format!(
                        "certificate for {phi}: q={:?} level={} degree={} verdict={}",
                        cert.q, cert.level, cert.cover_degree, cert.verdict
                    );
                    Ok(found(
                        serde_json::to_value(&cert).expect("serializable"),
                        summary,
                    ))
                }
                None => Ok(not_found(
                    json!({ "endomorphism": phi.to_string(), "certificate": "none found" }),
                    format!("no certificate for {phi} within the budget"),
                )),
            }
        }
        Command::Nilpotent { phi, k } => {
            let phi = Endomorphism::parse(phi)?;
            let epi = is_epi_on_nilpotent_quotient(&phi, *k)?;
            let value = json!({
                "endomorphism": phi.to_string(),
                "k": k,
                "epi_on_nilpotent_quotient": epi,
            });
            let summary = format!("{phi} on the class-{} quotient: epi = {epi}", k - 1);
            Ok(if epi {
                found(value, summary)
            } else {
                not_found(value, summary)
            })
        }
        Command::Whitehead { word, rank } => {
            let rank = infer_rank(&[word.as_str()], *rank)?;
            let w = Word::parse(word, rank)?;
            let graph = whitehead_graph(&w)?;
            if run.output == Format::Dot {
                return Ok(Outcome::Raw(graph.to_dot()));
            }
            let report = connectivity_report(&graph);
            let certified = report.connected_full && report.cut_vertices.is_empty();
            let reduction = match whitehead_reduce(&w) {
                Ok(r) => Some(r),
                Err(Error::CostGuard(_)) => None,
                Err(e) => return Err(e),
            };
            let summary = format!(
                "Wh({w}): connected={}, cut vertices=[{}], certified not separable={certified}",
                report.connected_full,
                report.cut_vertices.join(", ")
            );
            let value = json!({
                "word": w.to_string(),
                "edge_count": graph.edges().len(),
                "connectivity": report,
                "certified_not_separable": certified,
                "reduction": reduction,
            });
            Ok(if certified {
                found(value, summary)
            } else {
                not_found(value, summary)
            })
        }
        Command::Witness5 { n } => {
            let config = search_config(run, SearchGoal::NonEpimorphism);
            let report = question_witness(*n, run.nilpotent_cap, &config)?;
            let certified = report.homology_certificate.is_some();
            let summary = format!(
                "witness rank {n}: fold-surjective={}, nilpotent-epi up to cap={}, \
                 whitehead certified={}, homology certificate={}",
                report.fold_oracle_surjective,
                report.nilpotent_epi_levels.iter().all(|v| v.surjective),
                report.whitehead.certified_not_separable,
                certified
            );
            let value = serde_json::to_value(&report).expect("serializable");
            Ok(if certified {
                found(value, summary)
            } else {
                not_found(value, summary)
            })
        }
        Command::Surface { rotation, action } => {
            let tokens = rotation.split_whitespace().count();
            if tokens % 2 != 0 || tokens == 0 {
                return Err(Error::InvalidRotation(format!(
                    "--rotation needs an even number of half-edge symbols, got {tokens}"
                )));
            }
            let rank = tokens / 2;
            let rose = RoseRibbon::parse(rank, rotation)?;
            let family = ribbon_family(&rose, &run.q, run.max_depth, run.max_vertices)?;
            match action {
                SurfaceAction::Info => {
                    let covers: Vec<serde_json::Value> = family
                        .iter()
                        .map(|rc| {
                            json!({
                                "cover": rc.description,
                                "degree": rc.cover().degree(),
                                "genus": rc.genus(),
                                "boundary": rc.boundary_count(),
                                "euler_characteristic": rc.euler_characteristic(),
                                "closed_rank": rc.closed_rank(),
                                "pairing": rc.closed_pairing().to_string_rows(),
                            })
                        })
                        .collect();
                    let summary = format!(
                        "base surface genus {} with {} boundary components; {} covers built",
                        rose.genus(),
                        rose.boundary_count(),
                        family.len()
                    );
                    Ok(found(
                        json!({
                            "base_genus": rose.genus(),
                            "base_boundary": rose.boundary_count(),
                            "covers": covers,
                        }),
                        summary,
                    ))
                }
                SurfaceAction::Isotropic { loop_word } => {
                    let w = Word::parse(loop_word, rank)?;
                    let mut covers = Vec::new();
                    let mut all = true;
                    for rc in &family {
                        let set = rc.elevations(&w)?;
                        let isotropic = rc.is_isotropic(&set);
                        all &= isotropic;
                        covers.push(json!({
                            "cover": rc.description,
                            "closing_power": set.order,
                            "elevations": set.elevation_count,
                            "isotropic": isotropic,
                        }));
                    }
                    let value = json!({
                        "loop": w.to_string(),
                        "isotropic_in_family": all,
                        "covers": covers,
                    });
                    let summary = format!("V_{w} isotropic in every family cover: {all}");
                    Ok(if all {
                        found(value, summary)
                    } else {
                        not_found(value, summary)
                    })
                }
                SurfaceAction::Disjoint { x, y } => {
                    let x = Word::parse(x, rank)?;
                    let y = Word::parse(y, rank)?;
                    match disjointness_search(&x, &y, &family)? {
                        v @ DisjointnessVerdict::IntersectionWitnessed { .. } => {
                            let summary = match &v {
                                DisjointnessVerdict::IntersectionWitnessed {
                                    cover, value, ..
                                } => format!(
                                    "intersection of {x} and {y} witnessed at cover {cover} \
                                     (pairing {value})"
                                ),
                                _ => unreachable!(),
                            };
                            Ok(found(
                                serde_json::to_value(&v).expect("serializable"),
                                summary,
                            ))
                        }
                        v @ DisjointnessVerdict::NoWitnessInFamily => Ok(not_found(
                            serde_json::to_value(&v).expect("serializable"),
                            format!("no intersection witness for {x} and {y} in the family"),
                        )),
                    }
                }
                SurfaceAction::Preserve { phi } => {
                    let psi = Endomorphism::parse(phi)?;
                    let report = preserves_intersection_form(&psi, &family)?;
                    let pass = report.all_covers_pass;
                    let summary = format!(
                        "{psi} preserves the intersection form on all {} covers: {pass}",
                        report.covers.len()
                    );
                    let value = serde_json::to_value(&report).expect("serializable");
                    Ok(if pass {
                        found(value, summary)
                    } else {
                        not_found(value, summary)
                    })
                }
            }
        }
    }
}
