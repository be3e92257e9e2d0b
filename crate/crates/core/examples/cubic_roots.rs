//! Certified mode eigenvalues against the companion-matrix oracle.

use gevrey_lab::cubic::{certified_roots, companion_roots, triple_distance};
use gevrey_lab::modal::char_coeffs;
use gevrey_lab::regions::ParamPoint;

fn main() -> gevrey_lab::Result<()> {
    let p = ParamPoint::new(0.75, 0.25)?;
    for mu in [1.0, 1e4, 1e8, 1e12] {
        let co = char_coeffs(mu, &p)?;
        let t = certified_roots(&co)?;
        let d = triple_distance(&t, &companion_roots(&co)?);
        println!(
            "mu = {mu:>7.0e}  lambda0 = {:.6e}  lambda+ = {:.6e}  vs oracle {d:.1e}  ({:?})",
            t.lambda0, t.lambda_plus, t.method
        );
    }
    Ok(())
}
