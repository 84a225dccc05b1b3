//! Tab-separated policy table: one row per `(Γ, Y)` node, Γ-major.

use std::collections::BTreeSet;
use std::path::Path;

use fusionsim_core::mdp::MdpSolution;
use fusionsim_core::policies::PolicyTable;

use crate::error::{CliError, Result};

pub const TABLE_HEADER: &str = "gamma\ty\taction\trelative_value";

/// Floats use the shortest representation that parses back to the same bits.
pub fn render_table(solution: &MdpSolution) -> String {
    let grid = &solution.grid;
    let mut out = String::with_capacity(32 * grid.n_states() + TABLE_HEADER.len());
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for (gi, g) in grid.gammas().iter().enumerate() {
        for (yi, y) in grid.ys().iter().enumerate() {
            let s = grid.state_index(gi, yi);
            let z = grid.actions()[solution.policy[s]];
            out.push_str(&format!("{g}\t{y}\t{z}\t{}\n", solution.relative_values[s]));
        }
    }
    out
}

pub fn write_table(path: &Path, solution: &MdpSolution) -> Result<()> {
    std::fs::write(path, render_table(solution)).map_err(|e| CliError::io(path, e))
}

pub fn parse_table(path: &Path, text: &str) -> Result<PolicyTable> {
    let err = |line: usize, message: String| CliError::Table {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == TABLE_HEADER => {}
        _ => return Err(err(1, format!("expected header `{}`", TABLE_HEADER.replace('\t', "\\t")))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(err(i + 1, format!("expected 4 columns, found {}", cols.len())));
        }
        let mut vals = [0.0; 4];
        for (v, c) in vals.iter_mut().zip(&cols) {
            *v = c.parse().map_err(|_| err(i + 1, format!("`{c}` is not a number")))?;
        }
        rows.push((i + 1, vals));
    }
    let gammas = distinct(rows.iter().map(|r| r.1[0]));
    let ys = distinct(rows.iter().map(|r| r.1[1]));
    if rows.len() != gammas.len() * ys.len() {
        return Err(err(0, format!("{} rows do not form a full {}x{} grid", rows.len(), gammas.len(), ys.len())));
    }
    let mut actions = vec![f64::NAN; rows.len()];
    let mut values = vec![f64::NAN; rows.len()];
    for (line, [g, y, z, v]) in rows {
        let gi = gammas.iter().position(|&x| x == g).expect("collected");
        let yi = ys.iter().position(|&x| x == y).expect("collected");
        let s = gi * ys.len() + yi;
        if !actions[s].is_nan() {
            return Err(err(line, format!("duplicate node ({g}, {y})")));
        }
        actions[s] = z;
        values[s] = v;
    }
    PolicyTable::new(gammas, ys, actions, values).map_err(|e| err(0, e.to_string()))
}

pub fn read_table(path: &Path) -> Result<PolicyTable> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(path, &text)
}

fn distinct(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let set: BTreeSet<u64> = xs.map(|x| x.to_bits()).collect();
    let mut out: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
    out.sort_by(f64::total_cmp);
    out
}
