//! CSV and JSON report writers. All numeric columns carry 12 significant
//! digits so repeated runs with the same configuration are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::frontier::FrontierFunctions;
use crate::recursion::FGrid;

/// 12 significant digits, scientific notation.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rows `(n, x, F_n(x), argmax_a, branch)` for a family of tables.
pub fn f_table_csv(grids: &[FGrid]) -> String {
    let mut out = String::from("n,x,f,argmax_a,branch\n");
    for g in grids {
        for i in 0..g.values.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g.n,
                sig(g.x_at(i)),
                sig(g.values[i]),
                sig(g.argmax_a[i]),
                g.branch[i]
            );
        }
    }
    out
}

/// Rows `(y, H(y))` over the potential's grid.
pub fn frontier_h_csv(f: &FrontierFunctions) -> String {
    let mut out = String::from("y,H\n");
    for (i, h) in f.h.iter().enumerate() {
        let _ = writeln!(out, "{},{}", sig(i as f64 * f.h_step), sig(*h));
    }
    out
}

/// Rows `(x, G(x), g(x), a(x))` over the unit grid.
pub fn frontier_tables_csv(f: &FrontierFunctions) -> String {
    let mut out = String::from("x,G,g,a\n");
    for i in 0..f.big_g.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            sig(i as f64 * f.grid_step),
            sig(f.big_g[i]),
            sig(f.g[i]),
            sig(f.a[i])
        );
    }
    out
}

/// Rows `(k, gamma)` sampling the ratio objective.
pub fn objective_curve_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("k,gamma\n");
    for &(k, g) in samples {
        let _ = writeln!(out, "{},{}", sig(k), sig(g));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)
}
