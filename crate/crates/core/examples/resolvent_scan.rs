//! Resolvent norm along the imaginary axis and its log-log slope.

use gevrey_lab::regions::ParamPoint;
use gevrey_lab::resolvent::{scan_and_fit, SpectrumModel};

fn main() -> gevrey_lab::Result<()> {
    let s = SpectrumModel::new(1.0, 2.0, 1_000_000_000, true)?;
    for (a, b) in [(0.5, 0.75), (0.75, 0.5), (0.1, 0.8)] {
        let r = scan_and_fit(&ParamPoint::new(a, b)?, &s, 1e4, 1e8, 33)?;
        println!(
            "({a}, {b})  slope {:.4} +/- {:.1e}  expected {:.4}  pass {}",
            r.slope, r.slope_ci, r.expected_slope, r.pass
        );
    }
    Ok(())
}
