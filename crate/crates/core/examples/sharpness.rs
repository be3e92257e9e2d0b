//! The resolvent bound is attained along the eigenvalue sequence.

use gevrey_lab::regions::ParamPoint;
use gevrey_lab::resolvent::{lower_bound_check, SpectrumModel};

fn main() -> gevrey_lab::Result<()> {
    let s = SpectrumModel::squares(10_000_000);
    let ns = [10, 100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000];
    for r in lower_bound_check(&ParamPoint::new(0.75, 0.5)?, &s, &ns)? {
        println!(
            "n = {:>8}  Im lambda = {:.3e}  scaled = {:.4}  |Re lambda| N = {:.6}",
            r.n, r.lambda, r.scaled, r.eigen_bound
        );
    }
    Ok(())
}
