//! Leading terms of the discriminant and the relative error of the predicted eigenvalues.

use gevrey_lab::asymptotics::{asym_error_table, leading_terms};
use gevrey_lab::regions::ParamPoint;

fn main() -> gevrey_lab::Result<()> {
    let p = ParamPoint::new(0.5, 0.75)?;
    let (delta, q) = leading_terms(&p)?;
    println!(
        "Delta ~ {} mu^{}   q ~ {} mu^{}",
        delta.coefficient, delta.exponent, q.coefficient, q.exponent
    );
    let table = asym_error_table(&p, &[1e6, 1e8, 1e10, 1e12])?;
    for r in &table.rows {
        println!(
            "mu = {:>6.0e}  lambda0 {:.2e}  Re {:.2e}  Im {:.2e}",
            r.mu, r.err_lambda0, r.err_re_pm, r.err_im_pm
        );
    }
    Ok(())
}
