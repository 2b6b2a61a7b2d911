//! Command-line front end: decide extensions, search witnesses, enumerate
//! middle terms, render figures, and run the cross-check oracle.
//!
//! Exit codes: 0 when the queried object exists (or the command succeeded),
//! 1 when it provably does not exist, 2 on input errors.

mod render;

use clap::{Parser, Subcommand};
use hn_extend::{
    brute_force_e_permutation, decide, enumerate_middle_terms, find_e_permutation, parse_bundle,
    GenBounds, Leniency, TuplarPolygon, VectorBundle,
};
use render::{Output, RenderSpec, Style};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hn-extend",
    version,
    about = "Decide and enumerate extensions of vector bundles from their slope data"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether E arises as an extension of F by the subobject D
    Decide {
        /// Sub bundle, e.g. "O(1/2) + O(-1)"
        #[arg(long)]
        d: String,
        /// Middle bundle
        #[arg(long)]
        e: String,
        /// Quotient bundle
        #[arg(long)]
        f: String,
        /// Emit machine-readable JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Search for a slope rearrangement witness for the triple
    Permute {
        #[arg(long)]
        d: String,
        #[arg(long)]
        e: String,
        #[arg(long)]
        f: String,
        /// Waive the side conditions on slopes shared by both sides
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        json: bool,
    },
    /// List every middle term admitted by the pair (D, F)
    Enumerate {
        #[arg(long)]
        d: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        json: bool,
    },
    /// Draw overlaid slope polygons as SVG (default) or an ASCII grid
    Render {
        /// Sub bundle to draw
        #[arg(long)]
        d: Option<String>,
        /// Middle bundle to draw
        #[arg(long)]
        e: Option<String>,
        /// Quotient bundle to draw
        #[arg(long)]
        f: Option<String>,
        /// Witness polygon to draw, e.g. "(3/2, 3/2, 2/3)"
        #[arg(long)]
        witness: Option<String>,
        /// Render a character grid instead of SVG
        #[arg(long)]
        ascii: bool,
        #[arg(long, default_value_t = 640)]
        width: u32,
        #[arg(long, default_value_t = 480)]
        height: u32,
        /// Write to a file instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the deciders against brute force on random instances
    Oracle {
        #[arg(long)]
        max_rank: Option<usize>,
        #[arg(long)]
        max_denominator: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    init_threads();
    ExitCode::from(run(Cli::parse()))
}

/// HN_EXTEND_THREADS caps the worker pool used by parallel library calls.
fn init_threads() {
    if let Ok(raw) = std::env::var("HN_EXTEND_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn input_error(kind: &str, message: &str) -> u8 {
    println!("{}", json!({ "error": kind, "message": message }));
    eprintln!("error: {}", message);
    2
}

fn bundle(flag: &str, text: &str) -> Result<VectorBundle, u8> {
    parse_bundle(text)
        .map_err(|e| input_error("parse", &format!("--{} {:?}: {}", flag, text, e)))
}

/// A middle term whose rank or degree differs from D + F is rejected as an
/// input error rather than decided.
fn check_bookkeeping(d: &VectorBundle, e: &VectorBundle, f: &VectorBundle) -> Result<(), u8> {
    let rank = d.rank() + f.rank();
    let degree = d.degree() + f.degree();
    if e.rank() != rank || e.degree() != degree {
        println!(
            "{}",
            json!({
                "error": "rank-degree-mismatch",
                "expected": { "rank": rank, "degree": degree.to_string() },
                "middle": { "rank": e.rank(), "degree": e.degree().to_string() },
            })
        );
        eprintln!(
            "error: middle term has rank {} and degree {}, expected rank {} and degree {}",
            e.rank(),
            e.degree(),
            rank,
            degree
        );
        return Err(2);
    }
    Ok(())
}

fn run(cli: Cli) -> u8 {
    match cli.cmd {
        Cmd::Decide { d, e, f, json } => cmd_decide(&d, &e, &f, json).unwrap_or_else(|c| c),
        Cmd::Permute {
            d,
            e,
            f,
            lenient,
            json,
        } => cmd_permute(&d, &e, &f, lenient, json).unwrap_or_else(|c| c),
        Cmd::Enumerate { d, f, json } => cmd_enumerate(&d, &f, json).unwrap_or_else(|c| c),
        Cmd::Render {
            d,
            e,
            f,
            witness,
            ascii,
            width,
            height,
            out,
        } => cmd_render(
            d.as_deref(),
            e.as_deref(),
            f.as_deref(),
            witness.as_deref(),
            ascii,
            width,
            height,
            out.as_deref(),
        )
        .unwrap_or_else(|c| c),
        Cmd::Oracle {
            max_rank,
            max_denominator,
            seed,
            samples,
            json,
        } => cmd_oracle(max_rank, max_denominator, seed, samples, json).unwrap_or_else(|c| c),
    }
}

fn cmd_decide(d: &str, e: &str, f: &str, as_json: bool) -> Result<u8, u8> {
    let d = bundle("d", d)?;
    let e = bundle("e", e)?;
    let f = bundle("f", f)?;
    check_bookkeeping(&d, &e, &f)?;
    Ok(match decide(&d, &e, &f) {
        Some(chain) => {
            if as_json {
                let mut v = chain.to_json();
                v["exists"] = json!(true);
                println!("{}", v);
            } else {
                let stages: Vec<String> = chain.stages.iter().map(|s| s.to_string()).collect();
                println!("extension exists");
                println!("chain: {}", stages.join("  ->  "));
            }
            0
        }
        None => {
            if as_json {
                println!("{}", json!({ "exists": false, "chain": null, "witnesses": null }));
            } else {
                println!("no extension");
            }
            1
        }
    })
}

fn cmd_permute(d: &str, e: &str, f: &str, lenient: bool, as_json: bool) -> Result<u8, u8> {
    let d = bundle("d", d)?;
    let e = bundle("e", e)?;
    let f = bundle("f", f)?;
    check_bookkeeping(&d, &e, &f)?;
    let witness = if lenient {
        brute_force_e_permutation(&d, &e, &f, Leniency::SharedValues)
            .map_err(|err| input_error("cap-exceeded", &err.to_string()))?
    } else {
        find_e_permutation(&d, &e, &f)
    };
    Ok(match witness {
        Some(w) => {
            if as_json {
                println!("{}", json!({ "exists": true, "witness": w.to_json() }));
            } else {
                println!("witness: {}", w.polygon);
                println!("sub indices: {:?}", w.partition.s_d());
                println!("quotient indices: {:?}", w.partition.s_f());
            }
            0
        }
        None => {
            if as_json {
                println!("{}", json!({ "exists": false, "witness": null }));
            } else {
                println!("no witness");
            }
            1
        }
    })
}

fn cmd_enumerate(d: &str, f: &str, as_json: bool) -> Result<u8, u8> {
    let d = bundle("d", d)?;
    let f = bundle("f", f)?;
    let terms = enumerate_middle_terms(&d, &f);
    if as_json {
        let names: Vec<String> = terms.iter().map(|e| e.to_string()).collect();
        println!("{}", json!({ "middle_terms": names }));
    } else {
        for e in &terms {
            println!("{}", e);
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    d: Option<&str>,
    e: Option<&str>,
    f: Option<&str>,
    witness: Option<&str>,
    ascii: bool,
    width: u32,
    height: u32,
    out: Option<&std::path::Path>,
) -> Result<u8, u8> {
    let mut polygons = Vec::new();
    for (text, label, style) in [(d, "D", Style::Sub), (e, "E", Style::Mid), (f, "F", Style::Quot)]
    {
        if let Some(t) = text {
            let v = bundle(&label.to_lowercase(), t)?;
            polygons.push((label.to_string(), v.hn_polygon(), style));
        }
    }
    if let Some(t) = witness {
        let p = TuplarPolygon::parse(t)
            .map_err(|err| input_error("parse", &format!("--witness {:?}: {}", t, err)))?;
        polygons.push(("witness".to_string(), p, Style::Witness));
    }
    if polygons.is_empty() {
        return Err(input_error("render", "nothing to draw: pass --d, --e, --f, or --witness"));
    }
    let spec = RenderSpec {
        polygons,
        width,
        height,
        output: if ascii { Output::Ascii } else { Output::Svg },
    };
    let body = spec.render().map_err(|msg| input_error("render", &msg))?;
    match out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|err| input_error("io", &format!("{}: {}", path.display(), err)))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", body),
    }
    Ok(0)
}

fn cmd_oracle(
    max_rank: Option<usize>,
    max_denominator: Option<usize>,
    seed: Option<u64>,
    samples: Option<usize>,
    as_json: bool,
) -> Result<u8, u8> {
    let mut bounds = GenBounds::default();
    if let Some(r) = max_rank {
        bounds.max_rank = r;
    }
    if let Some(q) = max_denominator {
        bounds.max_denominator = q;
    }
    if let Some(s) = seed {
        bounds.seed = s;
    }
    if bounds.max_rank < 1 || bounds.max_denominator < 1 {
        return Err(input_error("bounds", "max-rank and max-denominator must be at least 1"));
    }
    let report = hn_extend::cross_check_report_with(
        &bounds,
        samples.unwrap_or(hn_extend::oracle::DEFAULT_SAMPLES),
    );
    if as_json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        print!("{}", report);
    }
    Ok(if report.has_failures() { 1 } else { 0 })
}
