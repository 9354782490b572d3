//! Staged failure propagation across the interdependent grid.
//!
//! Odd stages act on the communication side, even stages on the power side:
//!
//! 1. attack comm, prune comm to its giant component
//! 2. fail power nodes without an alive supporter, prune power to giant
//! 3. fail comm nodes whose supporter died, prune comm to giant
//! 4. as stage 2, and so on
//!
//! The run stops once two consecutive stages (one full comm + power round)
//! remove nothing.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::netgen::InterdependentGrid;
use crate::Side;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CascadeError {
    #[error("comm node {0} is out of range")]
    OutOfRange(usize),
    #[error("comm node {0} is already dead")]
    AlreadyDead(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub side: Side,
    /// Nodes removed at this stage (attack or lost support, plus pruning).
    pub removed_count: usize,
    pub removed_fraction: f64,
    pub alive_count: usize,
    pub giant_size: usize,
    /// `giant_size` over the side's original node count.
    pub functional_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeTrace {
    pub records: Vec<StageRecord>,
    pub converged: bool,
    pub final_mu_a: f64,
    pub final_mu_b: f64,
}

impl CascadeTrace {
    /// Number of stages run.
    pub fn stages(&self) -> usize {
        self.records.len()
    }

    /// Trace CSV, one row per stage.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "stage,side,removed_count,alive_count,giant_size,mu")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.stage,
                r.side,
                r.removed_count,
                r.alive_count,
                r.giant_size,
                r.functional_fraction
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CascadeOptions {
    /// Before the attack, prune comm to its giant component and power to
    /// supported nodes in its giant component.
    #[serde(default)]
    pub pre_prune: bool,
}

/// Marks the attacked comm nodes dead.
pub fn apply_attack(grid: &mut InterdependentGrid, attacked: &[usize]) -> Result<(), CascadeError> {
    let n = grid.comm().node_count();
    for &a in attacked {
        if a >= n {
            return Err(CascadeError::OutOfRange(a));
        }
        if !grid.comm().is_alive(a) {
            return Err(CascadeError::AlreadyDead(a));
        }
    }
    let comm = grid.comm_mut();
    for &a in attacked {
        // Repeats within `attacked` are ignored.
        comm.remove(a);
    }
    Ok(())
}

/// Kills every alive node outside the largest alive component. Ties go to
/// the component with the lowest node index.
pub fn prune_to_giant(g: &mut crate::graph::Graph) -> Vec<usize> {
    let labels = g.components();
    let doomed: Vec<usize> = g.alive_nodes().filter(|&v| !labels.in_giant(v)).collect();
    for &v in &doomed {
        g.remove(v);
    }
    doomed
}

/// Kills every alive power node with no alive supporter.
pub fn fail_unsupported_power(grid: &mut InterdependentGrid) -> Vec<usize> {
    let doomed: Vec<usize> = grid
        .power()
        .alive_nodes()
        .filter(|&b| {
            !grid
                .supporters_of(b)
                .iter()
                .any(|&a| grid.comm().is_alive(a))
        })
        .collect();
    let power = grid.power_mut();
    for &b in &doomed {
        power.remove(b);
    }
    doomed
}

/// Kills every alive comm node whose supporter is dead.
pub fn fail_unsupported_comm(grid: &mut InterdependentGrid) -> Vec<usize> {
    let doomed: Vec<usize> = grid
        .comm()
        .alive_nodes()
        .filter(|&a| !grid.power().is_alive(grid.support_of(a)))
        .collect();
    let comm = grid.comm_mut();
    for &a in &doomed {
        comm.remove(a);
    }
    doomed
}

/// Attacks `attacked` and propagates failures to the fixpoint, mutating
/// `grid` in place.
pub fn run_cascade(
    grid: &mut InterdependentGrid,
    attacked: &[usize],
    options: CascadeOptions,
) -> Result<CascadeTrace, CascadeError> {
    if options.pre_prune {
        prune_to_giant(grid.comm_mut());
        fail_unsupported_power(grid);
        prune_to_giant(grid.power_mut());
    }
    let alive_before = grid.comm().alive_count();
    apply_attack(grid, attacked)?;
    let attacked_count = alive_before - grid.comm().alive_count();

    let n_a = grid.comm().node_count();
    let n_b = grid.power().node_count();
    let mut records = Vec::new();
    let mut idle_stages = 0;
    let mut stage = 0;
    while idle_stages < 2 {
        stage += 1;
        let side = if stage % 2 == 1 {
            Side::Comm
        } else {
            Side::Power
        };
        let removed = match side {
            Side::Comm => {
                let support_losses = if stage == 1 {
                    attacked_count
                } else {
                    fail_unsupported_comm(grid).len()
                };
                support_losses + prune_to_giant(grid.comm_mut()).len()
            }
            Side::Power => {
                fail_unsupported_power(grid).len() + prune_to_giant(grid.power_mut()).len()
            }
        };
        let (graph, base) = match side {
            Side::Comm => (grid.comm(), n_a),
            Side::Power => (grid.power(), n_b),
        };
        // After pruning every alive node is in the giant.
        let giant_size = graph.alive_count();
        records.push(StageRecord {
            stage,
            side,
            removed_count: removed,
            removed_fraction: removed as f64 / base as f64,
            alive_count: graph.alive_count(),
            giant_size,
            functional_fraction: giant_size as f64 / base as f64,
        });
        idle_stages = if removed == 0 { idle_stages + 1 } else { 0 };
    }
    Ok(CascadeTrace {
        records,
        converged: true,
        final_mu_a: grid.comm().alive_count() as f64 / n_a as f64,
        final_mu_b: grid.power().alive_count() as f64 / n_b as f64,
    })
}
