//! Region label, index and stability type at the canonical points.

use gevrey_lab::asymptotics::CANONICAL_POINTS;
use gevrey_lab::regions::{summary_row, ParamPoint};

fn main() -> gevrey_lab::Result<()> {
    for (name, a, b) in CANONICAL_POINTS {
        let r = summary_row(&ParamPoint::new(a, b)?);
        println!(
            "{name:>14}  ({a:.2}, {b:.2})  {:<3}  mu = {:<8.4}  {:?}",
            r.label,
            r.mu.unwrap_or(f64::NAN),
            r.stability
        );
    }
    Ok(())
}
