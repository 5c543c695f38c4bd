//! Command-line front end.
//!
//! Every subcommand reads an optional `--config FILE` of `key = value` lines
//! and accepts each of its keys as a `--key VALUE` flag. Exit status is 0
//! on a passing verdict, 2 on a failing one and 1 on any error.

mod commands;
pub mod config;
mod summary;

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde::{Deserialize, Serialize};

use crate::error::Result;
pub use config::{RunConfig, OUT_ROOT_ENV};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => EXIT_PASS,
            Outcome::Fail => EXIT_FAIL,
        }
    }
}

/// JSON envelope written by commands whose result is not a sweep report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub pass: bool,
    pub result: serde_json::Value,
}

const GN: &[&str] = &["sigma", "s", "theta", "p", "q", "r"];
const GRID: &[&str] = &["size", "length"];
const FAMILY: &[&str] = &["family", "width", "shell", "shells", "k", "radius", "seed", "count"];
const NS_RUN: &[&str] = &[
    "scenario",
    "size",
    "length",
    "nu",
    "dt",
    "t-end",
    "snapshot-every",
    "seed",
    "flux-n",
];

struct Spec {
    name: &'static str,
    about: &'static str,
    keys: Vec<&'static str>,
}

fn keys(groups: &[&[&'static str]]) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    out.push("out");
    out.sort_unstable();
    out.dedup();
    out
}

fn specs() -> Vec<Spec> {
    vec![
        Spec {
            name: "check",
            about: "Check a GN exponent tuple, or an energy-equality criterion when `kind` is set",
            keys: keys(&[GN, &["solve-theta", "kind", "time-p"]]),
        },
        Spec {
            name: "solve-theta",
            about: "Solve the balance relation for theta and check the resulting tuple",
            keys: keys(&[&["sigma", "s", "p", "q", "r"]]),
        },
        Spec {
            name: "classify-besov",
            about: "Place a Besov-form GN instance in the case analysis",
            keys: keys(&[GN, &["alpha"]]),
        },
        Spec {
            name: "verify-gn",
            about: "Dilation or family sweep of the GN ratio",
            keys: keys(&[
                GN,
                GRID,
                FAMILY,
                &["mode", "lambdas", "lambda-min", "lambda-max", "axis", "expect"],
            ]),
        },
        Spec {
            name: "verify-bernstein",
            about: "Bernstein slope sweep over spectral radii",
            keys: keys(&[
                GRID,
                FAMILY,
                &["order", "p", "q", "two-sided", "lambda-min", "lambda-max", "refine"],
            ]),
        },
        Spec {
            name: "verify-besov",
            about: "Besov-form GN ratio over a family",
            keys: keys(&[GN, GRID, FAMILY, &["alpha"]]),
        },
        Spec {
            name: "maximal-check",
            about: "Empirical constants of the pointwise maximal-function estimate",
            keys: keys(&[GRID, FAMILY, &["s", "thetas", "p", "refine"]]),
        },
        Spec {
            name: "ns-run",
            about: "Run a 2D Navier-Stokes scenario and emit its energy budget and flux",
            keys: keys(&[NS_RUN, &["save-trajectory", "residual-tol"]]),
        },
        Spec {
            name: "ns-flux",
            about: "Flux limit, Hölder chain and criterion norms of a trajectory",
            keys: keys(&[NS_RUN, &["trajectory", "kind", "time-p", "q"]]),
        },
        Spec {
            name: "report",
            about: "Aggregate run artifacts into one HTML summary",
            keys: keys(&[&["input"]]),
        },
    ]
}

fn build_cli(specs: &[Spec]) -> Command {
    let mut cmd = Command::new("aniso-gn")
        .version(crate::report::VERSION)
        .about("Mixed-norm inequality verifier")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in specs {
        let mut sub = Command::new(spec.name).about(spec.about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("Flat key = value file; flags override its entries"),
        );
        for key in &spec.keys {
            sub = sub.arg(
                Arg::new(*key)
                    .long(*key)
                    .value_name("VALUE")
                    .num_args(0..=1)
                    .default_missing_value("true")
                    .allow_negative_numbers(true)
                    .action(ArgAction::Set),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn flag_values(m: &ArgMatches, keys: &[&str]) -> BTreeMap<String, String> {
    keys.iter()
        .filter_map(|k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect()
}

fn load_config(name: &str, m: &ArgMatches, keys: &[&str]) -> Result<RunConfig> {
    let file = match m.get_one::<String>("config") {
        Some(path) => config::parse_config_text(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    RunConfig::new(name, file, flag_values(m, keys), keys)
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let specs = specs();
    let matches = match build_cli(&specs).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_PASS
                }
                _ => EXIT_ERROR,
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let spec = specs.iter().find(|s| s.name == name).expect("known subcommand");
    let result = load_config(name, sub, &spec.keys).and_then(|c| commands::dispatch(&c));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
