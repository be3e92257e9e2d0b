//! One mode exponential: contraction, agreement with Padé, and the energy identity.

use num_complex::Complex64;

use gevrey_lab::decay::{energy_derivative_check, expm_reference, ModePropagator};
use gevrey_lab::numeric::mat3;
use gevrey_lab::regions::ParamPoint;

fn main() -> gevrey_lab::Result<()> {
    let p = ParamPoint::new(0.4, 0.3)?;
    let x = [
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.2, 0.4),
        Complex64::new(0.5, -0.3),
    ];
    for mu in [1.0, 1e3, 1e6] {
        let m = ModePropagator::new(mu, &p)?;
        for t in [0.1, 1.0, 10.0] {
            let e = m.exp(t)?;
            let gap = mat3::max_abs_diff(&e, &expm_reference(&m.block.matrix, t));
            let (_, exact, rel) = energy_derivative_check(mu, &p, &x, t)?;
            println!(
                "mu = {mu:>5.0e}  t = {t:>4}  |e^Bt| = {:.12}  vs Pade {gap:.1e}  dE/dt = {exact:.4e} (rel {rel:.1e})",
                mat3::spectral_norm(&e)
            );
        }
    }
    Ok(())
}
