//! Energy decay over a truncated spectrum and the fitted decay law.

use gevrey_lab::decay::{default_time_grid, simulate_decay, ModeState};
use gevrey_lab::regions::ParamPoint;
use gevrey_lab::resolvent::SpectrumModel;

fn main() -> gevrey_lab::Result<()> {
    let s = SpectrumModel::squares(200);
    let grid = default_time_grid(1e-2, 1e5, 281);
    for (a, b) in [(0.5, 0.75), (0.1, 0.8), (0.75, 0.0)] {
        let p = ParamPoint::new(a, b)?;
        let u0 = if b == 0.0 {
            ModeState::slow_polarized(&p, &s)?
        } else {
            ModeState::equidistributed(200)
        };
        let r = simulate_decay(&p, &s, &u0, &grid)?;
        println!("({a}, {b})  {:?}  horizon {:?}", r.fit, r.truncation_validity_horizon);
    }
    Ok(())
}
