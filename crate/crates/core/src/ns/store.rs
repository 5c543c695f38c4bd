//! On-disk trajectories: one field container per component and snapshot
//! plus `manifest.json` holding `{nu, dt, times, grid}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::VelocityTrajectory;
use crate::error::{Error, Result};
use crate::field::io::{load_field, save_field};
use crate::field::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub nu: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub grid: GridSpec,
}

fn snapshot_name(k: usize, component: usize) -> String {
    format!("snapshot_{k:05}_v{}.agnf", component + 1)
}

pub fn save_trajectory(traj: &VelocityTrajectory, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (k, (_, v)) in traj.snapshots.iter().enumerate() {
        for (c, f) in v.iter().enumerate() {
            save_field(f, &dir.join(snapshot_name(k, c)))?;
        }
    }
    let manifest = TrajectoryManifest {
        nu: traj.nu,
        dt: traj.dt,
        times: traj.times(),
        grid: traj.grid.clone(),
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

pub fn load_trajectory(dir: &Path) -> Result<VelocityTrajectory> {
    let manifest: TrajectoryManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
    let n = manifest.grid.dim();
    let mut snapshots = Vec::with_capacity(manifest.times.len());
    for (k, t) in manifest.times.iter().enumerate() {
        let v = (0..n)
            .map(|c| {
                let f = load_field(&dir.join(snapshot_name(k, c)))?;
                if f.grid() != &manifest.grid {
                    return Err(Error::GridMismatch);
                }
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        snapshots.push((*t, v));
    }
    Ok(VelocityTrajectory {
        grid: manifest.grid,
        nu: manifest.nu,
        dt: manifest.dt,
        snapshots,
    })
}
