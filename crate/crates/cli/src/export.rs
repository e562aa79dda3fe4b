//! Bar-chart data export: one CSV row per chi entry.

use std::io::Write;

use crate::report::ChiWire;
use crate::CliError;

/// Writes `row,col,re,im` lines covering every entry of the chi matrix,
/// labels in the I/X/Y/Z (per qubit) convention. An all-zero chi is refused:
/// it cannot be a process matrix and usually means the report was truncated.
pub fn export_bar_chart_data(chi: &ChiWire, out: &mut dyn Write) -> Result<(), CliError> {
    let size = chi.size();
    if chi.entries.len() != size * size {
        return Err(CliError::Config(format!(
            "chi needs {} entries, found {}",
            size * size,
            chi.entries.len()
        )));
    }
    if chi.entries.iter().all(|[re, im]| *re == 0.0 && *im == 0.0) {
        return Err(CliError::Config("chi matrix is empty".into()));
    }
    let mut emit = |line: String| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(|e| CliError::Config(format!("write failed: {e}")))
    };
    emit("row,col,re,im".into())?;
    for r in 0..size {
        for c in 0..size {
            let [re, im] = chi.entries[r * size + c];
            emit(format!(
                "{},{},{:?},{:?}",
                chi.basis_labels[r], chi.basis_labels[c], re, im
            ))?;
        }
    }
    Ok(())
}
