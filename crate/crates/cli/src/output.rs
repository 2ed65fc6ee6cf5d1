//! Output formatting: 10-significant-digit rounding, CSV emission, and
//! atomic file writes.

use std::io::Write;
use std::path::Path;

use robust_newsvendor::baselines::SweepRow;

use crate::CliError;

/// Rounds to 10 significant digits for printing.
pub fn sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exponent = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(9 - exponent);
    (x * factor).round() / factor
}

/// One CSV line per sweep row, header
/// `B,policy,item,q,cost_upper,cost_lower,cost_true,evai`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("B,policy,item,q,cost_upper,cost_lower,cost_true,evai\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            sig10(row.budget),
            row.policy.tag(),
            row.item,
            sig10(row.q),
            sig10(row.cost_upper),
            sig10(row.cost_lower),
            sig10(row.cost_true),
            sig10(row.evai),
        ));
    }
    out
}

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let io_err = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}
