//! `plog`: decide polymodal provability logics from the command line.
//!
//! Exit codes: 0 = theorem / valid / success, 1 = refuted / satisfiable,
//! 2 = usage or internal error, 3 = inconclusive (search cap exceeded).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use plog::decide::{glp3_decide, jlin_satisfy, Countermodel, Status, Verdict};
use plog::formula::{parse_formula, Worm};
use plog::ignatiev::{
    axis_defining_formula, closed_truthset, cover_k, glp_closed_decide, ordinal_worm,
    worm_ordinal,
};
use plog::jline::{enumerate_jlines, JLineShape};
use plog::kripke::FiniteFrame;
use plog::ordinal::Ordinal;
use plog::projection::build_projection;

const DEFAULT_CAP: u64 = 5000;

#[derive(Parser)]
#[command(name = "plog", version, about = "Decision procedures for polymodal provability logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    /// GLP.3 theoremhood via bounded J-line countermodel search
    Glp3,
    /// satisfiability over J-lines (refuted = satisfiable)
    Jlin,
    /// GLP theoremhood for closed formulas over Ignatiev's frame
    GlpClosed,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical rendering
    Parse {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide a formula
    Decide {
        #[arg(long, value_enum)]
        logic: Logic,
        /// Number of modalities for --logic jlin (default: the signature)
        #[arg(long)]
        n: Option<u32>,
        /// Search cap in worlds (default 5000; PLOG_CAP overrides)
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        json: bool,
        /// Write the countermodel as Graphviz DOT to this path
        #[arg(long)]
        dot: Option<PathBuf>,
        formula: String,
    },
    /// Print the truth set of a closed formula over Ignatiev's frame
    Truthset {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the verified defining formula of the main-axis point δ_ι
    AxisFormula {
        ordinal: String,
        #[arg(long)]
        json: bool,
    },
    /// Convert between worms and ordinals
    Worm {
        #[command(subcommand)]
        direction: WormCommand,
    },
    /// Build the projection of a hereditarily linear J-frame
    Project {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate J-line shapes up to a world count
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_size: u64,
    },
    /// Run the structural checks on a frame file
    CheckFrame {
        frame: PathBuf,
        #[arg(long)]
        json: bool,
        /// Write the frame as Graphviz DOT to this path
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Least k with <n-1>^k T -> <0>f provable, for closed consistent f
    CoverK {
        #[arg(long)]
        n: u32,
        formula: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum WormCommand {
    /// Ordinal denoted by a worm <i1>...<ik>T
    ToOrdinal {
        worm: String,
        #[arg(long)]
        json: bool,
    },
    /// Worm denoting an ordinal
    FromOrdinal {
        ordinal: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}

fn effective_cap(flag: Option<u64>) -> Result<u64, String> {
    if let Some(c) = flag {
        if c == 0 {
            return Err("cap must be at least 1".to_string());
        }
        return Ok(c);
    }
    match std::env::var("PLOG_CAP") {
        Ok(text) => text
            .parse::<u64>()
            .ok()
            .filter(|c| *c >= 1)
            .ok_or_else(|| format!("invalid PLOG_CAP value '{}'", text)),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Parse { formula, json } => {
            let f = parse_formula(&formula).map_err(|e| e.to_string())?;
            if json {
                print_json(&json!({"status": "ok", "formula": f.to_string()}));
            } else {
                println!("{}", f);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decide {
            logic,
            n,
            cap,
            json,
            dot,
            formula,
        } => {
            let f = parse_formula(&formula).map_err(|e| e.to_string())?;
            let cap = effective_cap(cap)?;
            if n.is_some() && logic != Logic::Jlin {
                return Err("--n applies only to --logic jlin".to_string());
            }
            let verdict = match logic {
                Logic::Glp3 => glp3_decide(&f, cap),
                Logic::Jlin => {
                    let n = n.unwrap_or_else(|| f.modal_signature().max(1));
                    jlin_satisfy(&f, n, cap).map_err(|e| e.to_string())?
                }
                Logic::GlpClosed => {
                    let closed = glp_closed_decide(&f).map_err(|e| e.to_string())?;
                    let witness = closed.witness.map(|p| p.to_string());
                    return finish_closed(closed.status, witness, json);
                }
            };
            if let (Some(path), Some(cm)) = (&dot, &verdict.countermodel) {
                let frame = cm.shape.materialize().map_err(|e| e.to_string())?;
                fs::write(path, frame.to_dot(Some(&cm.world))).map_err(|e| e.to_string())?;
            }
            finish_jline(&verdict, json)
        }
        Command::Truthset { formula, json } => {
            let f = parse_formula(&formula).map_err(|e| e.to_string())?;
            let set = closed_truthset(&f).map_err(|e| e.to_string())?;
            let lines = set.render_lines();
            if json {
                print_json(&json!({"status": "ok", "cells": lines}));
            } else if lines.is_empty() {
                println!("empty");
            } else {
                for line in lines {
                    println!("{}", line);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::AxisFormula { ordinal, json } => {
            let iota = Ordinal::parse(&ordinal).map_err(|e| e.to_string())?;
            let f = axis_defining_formula(&iota).map_err(|e| e.to_string())?;
            if json {
                print_json(&json!({"status": "ok", "formula": f.to_string()}));
            } else {
                println!("{}", f);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Worm { direction } => match direction {
            WormCommand::ToOrdinal { worm, json } => {
                let f = parse_formula(&worm).map_err(|e| e.to_string())?;
                let w = Worm::try_from_formula(&f).map_err(|e| e.to_string())?;
                let iota = worm_ordinal(&w);
                if json {
                    print_json(&json!({"status": "ok", "ordinal": iota.to_string()}));
                } else {
                    println!("{}", iota);
                }
                Ok(ExitCode::SUCCESS)
            }
            WormCommand::FromOrdinal { ordinal, json } => {
                let iota = Ordinal::parse(&ordinal).map_err(|e| e.to_string())?;
                let w = ordinal_worm(&iota).map_err(|e| e.to_string())?;
                if json {
                    print_json(&json!({"status": "ok", "worm": w.to_string()}));
                } else {
                    println!("{}", w);
                }
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Project { frame, json } => {
            let (frame, _) = load_frame(&frame)?;
            let (shape, _) = JLineShape::from_frame(&frame).map_err(|e| e.to_string())?;
            let spec = build_projection(&shape).map_err(|e| e.to_string())?;
            let value = spec.to_json();
            if json {
                print_json(&json!({"status": "ok", "projection": value}));
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { n, max_size } => {
            if n < 1 {
                return Err("--n must be at least 1".to_string());
            }
            let mut total = 0u64;
            for shape in enumerate_jlines(n, max_size) {
                println!("{} ({} worlds)", shape.render(), shape.world_count());
                total += 1;
            }
            println!("total: {}", total);
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckFrame { frame, json, dot } => {
            let (frame, valuation) = load_frame(&frame)?;
            if let Some(path) = &dot {
                let root = frame.find_root();
                fs::write(path, frame.to_dot(root.as_deref())).map_err(|e| e.to_string())?;
            }
            let _ = valuation;
            let j = frame.check_j_frame();
            let stratified = frame.check_stratified();
            let planes = frame.check_hl_planes();
            let direct = if j.holds {
                Some(frame.check_hl_direct().map_err(|e| e.to_string())?)
            } else {
                None
            };
            let all_hold =
                j.holds && stratified.holds && planes.holds && direct.as_ref().is_some_and(|r| r.holds);
            if json {
                let report = |r: &plog::kripke::FrameReport| {
                    json!({
                        "holds": r.holds,
                        "detail": r.detail,
                        "witness": r.witness,
                    })
                };
                print_json(&json!({
                    "status": if all_hold { "valid" } else { "invalid" },
                    "j_frame": report(&j),
                    "stratified": report(&stratified),
                    "hereditarily_linear": direct.as_ref().map(report),
                    "hereditarily_linear_planes": report(&planes),
                    "root": frame.find_root(),
                }));
            } else {
                print_report(&j);
                print_report(&stratified);
                match &direct {
                    Some(r) => print_report(r),
                    None => println!("hereditarily-linear: skipped (not a J-frame)"),
                }
                print_report(&planes);
                match frame.find_root() {
                    Some(r) => println!("root: {}", r),
                    None => println!("root: none"),
                }
            }
            Ok(if all_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::CoverK { n, formula, json } => {
            if n < 1 {
                return Err("--n must be at least 1".to_string());
            }
            let f = parse_formula(&formula).map_err(|e| e.to_string())?;
            let k = cover_k(&f, n).map_err(|e| e.to_string())?;
            if json {
                print_json(&json!({"status": "ok", "k": k}));
            } else {
                println!("{}", k);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_frame(path: &PathBuf) -> Result<(FiniteFrame, plog::kripke::Valuation), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    FiniteFrame::from_json(&value).map_err(|e| e.to_string())
}

fn print_report(r: &plog::kripke::FrameReport) {
    if r.holds {
        println!("{}: holds", r.property);
    } else {
        println!(
            "{}: fails ({}; witness {})",
            r.property,
            r.detail,
            r.witness.as_deref().unwrap_or_default().join(", ")
        );
    }
}

fn countermodel_json(cm: &Countermodel) -> Result<Value, String> {
    let frame = cm.shape.materialize().map_err(|e| e.to_string())?;
    let mut value = frame.to_json(&cm.valuation);
    value
        .as_object_mut()
        .unwrap()
        .insert("root".to_string(), Value::String(cm.world.clone()));
    Ok(value)
}

fn finish_jline(verdict: &Verdict, json: bool) -> Result<ExitCode, String> {
    let countermodel = verdict
        .countermodel
        .as_ref()
        .map(countermodel_json)
        .transpose()?;
    if json {
        print_json(&json!({
            "status": verdict.status.as_str(),
            "witness": verdict.countermodel.as_ref().map(|cm| cm.world.clone()),
            "countermodel": countermodel,
        }));
    } else {
        println!("{}", verdict.status.as_str());
        if let Some(cm) = countermodel {
            println!("countermodel: {}", cm);
        }
    }
    Ok(exit_for(verdict.status))
}

fn finish_closed(
    status: Status,
    witness: Option<String>,
    json: bool,
) -> Result<ExitCode, String> {
    if json {
        print_json(&json!({
            "status": status.as_str(),
            "witness": witness,
            "countermodel": Value::Null,
        }));
    } else {
        println!("{}", status.as_str());
        if let Some(w) = witness {
            println!("witness: {}", w);
        }
    }
    Ok(exit_for(status))
}

fn exit_for(status: Status) -> ExitCode {
    match status {
        Status::Theorem => ExitCode::SUCCESS,
        Status::Refuted => ExitCode::from(1),
        Status::Inconclusive => ExitCode::from(3),
    }
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string(value).unwrap());
}
