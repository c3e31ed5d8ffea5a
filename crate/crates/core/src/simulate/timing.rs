use std::fmt::Write;

use crate::error::Result;
use crate::protocol::{baseline_slots, baseline_stages, proposed_slots};

/// Slot-count comparison between the two-phase method (`L + 1`) and
/// sector-sweep hierarchical search (`K² · log_K G_t`).
pub fn emit_timing_table(paths: &[usize], sectors: u64, g_t: u64) -> Result<String> {
    let baseline = baseline_slots(sectors, g_t)?;
    let (_, exact) = baseline_stages(sectors, g_t)?;
    let mut out = String::from("method                      slots\n");
    for &l in paths {
        let label = format!("proposed (L={l})");
        writeln!(out, "{label:<28}{}", proposed_slots(l)).expect("write to String");
    }
    let label = format!("baseline (K={sectors}, G_t={g_t})");
    write!(out, "{label:<28}{baseline}").expect("write to String");
    if !exact {
        out.push_str("  (log rounded up)");
    }
    out.push('\n');
    Ok(out)
}
