//! Static HTML summary of a directory of run artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{resolve_out, RunConfig, OUT_ROOT_ENV};
use super::{Outcome, RunRecord};
use crate::error::{Error, Result};
use crate::report::{verdict_name, SweepReport, VERSION};

pub const SUMMARY_FILE: &str = "summary.html";

enum Artifact {
    Sweep(SweepReport),
    Record(RunRecord),
}

/// Files under `dir`, sorted by path, skipping stored trajectories.
fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            if !path.join("manifest.json").exists() {
                walk(&path, out)?;
            }
        } else {
            out.push(path);
        }
    }
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn rel(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

fn input_dir(c: &RunConfig) -> PathBuf {
    match c.get("input") {
        Some(p) => PathBuf::from(p),
        None => match std::env::var_os(OUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => PathBuf::from(root),
            _ => PathBuf::from("."),
        },
    }
}

pub fn report(c: &RunConfig) -> Result<Outcome> {
    let root = input_dir(c);
    if !root.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "input directory {} does not exist",
            root.display()
        )));
    }
    let mut files = Vec::new();
    walk(&root, &mut files)?;

    let mut artifacts = Vec::new();
    let mut missing = Vec::new();
    for path in files.iter().filter(|p| p.extension().is_some_and(|e| e == "json")) {
        let text = std::fs::read_to_string(path)?;
        if let Ok(sweep) = serde_json::from_str::<SweepReport>(&text) {
            for ext in ["csv", "svg"] {
                let companion = path.with_extension(ext);
                if !companion.exists() {
                    missing.push(rel(&companion, &root));
                }
            }
            artifacts.push((path.clone(), Artifact::Sweep(sweep)));
        } else if let Ok(rec) = serde_json::from_str::<RunRecord>(&text) {
            artifacts.push((path.clone(), Artifact::Record(rec)));
        }
    }
    if artifacts.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no run artifacts (sweep or command JSON) found under {}",
            root.display()
        )));
    }
    if !missing.is_empty() {
        return Err(Error::InsufficientData(format!(
            "missing artifacts: {}",
            missing.join(", ")
        )));
    }
    let figures: Vec<&PathBuf> = files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();

    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str("<title>aniso-gn summary</title>\n");
    html.push_str(
        "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}\
         td,th{border:1px solid #bbb;padding:4px 8px;text-align:left}\
         .pass{color:#161}.fail{color:#a11}figure{display:inline-block;margin:1em}</style>\n",
    );
    html.push_str("</head>\n<body>\n");
    let _ = writeln!(html, "<h1>aniso-gn summary</h1>\n<p>library version {VERSION}</p>");
    html.push_str("<table>\n<tr><th>artifact</th><th>kind</th><th>outcome</th><th>detail</th><th>config</th></tr>\n");
    for (path, a) in &artifacts {
        let (kind, outcome, pass, detail, hash) = match a {
            Artifact::Sweep(s) => (
                s.label.clone(),
                verdict_name(s.verdict).to_string(),
                s.verdict == crate::report::SweepVerdict::Bounded,
                match (s.fitted_slope, s.r_squared, s.refinement_change) {
                    (Some(m), Some(r2), _) => format!("slope {m:.4}, R² {r2:.4}"),
                    (_, _, Some(d)) => format!("max ratio {:.4e}, refinement change {d:.4}", s.max_ratio),
                    _ => format!("max ratio {:.4e}", s.max_ratio),
                },
                s.config_hash.clone().unwrap_or_default(),
            ),
            Artifact::Record(r) => (
                r.command.clone(),
                if r.pass { "pass" } else { "fail" }.to_string(),
                r.pass,
                r.result
                    .get("verdict")
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.get("status").map_or_else(String::new, |s| s.to_string()),
                    })
                    .unwrap_or_default(),
                r.config_hash.clone(),
            ),
        };
        let _ = writeln!(
            html,
            "<tr><td>{}</td><td>{}</td><td class=\"{}\">{}</td><td>{}</td><td><code>{}</code></td></tr>",
            escape(&rel(path, &root)),
            escape(&kind),
            if pass { "pass" } else { "fail" },
            escape(&outcome),
            escape(&detail),
            escape(&hash[..hash.len().min(12)]),
        );
    }
    html.push_str("</table>\n");
    for fig in &figures {
        let svg = std::fs::read_to_string(fig)?;
        let _ = writeln!(
            html,
            "<figure>\n{}<figcaption>{}</figcaption>\n</figure>",
            svg,
            escape(&rel(fig, &root))
        );
    }
    html.push_str("</body>\n</html>\n");

    let out = match c.get("out") {
        Some(o) => resolve_out(Path::new(o)),
        None => root.clone(),
    };
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join(SUMMARY_FILE), html)?;
    println!(
        "{}: {} artifacts, {} figures",
        out.join(SUMMARY_FILE).display(),
        artifacts.len(),
        figures.len()
    );
    Ok(Outcome::Pass)
}
