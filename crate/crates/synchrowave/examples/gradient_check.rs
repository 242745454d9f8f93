//! Verify the analytic reverse-mode gradients against central finite
//! differences, for the data-only loss and the composite loss with both
//! fixed and learnable line parameters.
//!
//! ```sh
//! cargo run --release -p synchrowave --example gradient_check
//! ```

use synchrowave::training::{run_gradient_check, GradCheckCase};

fn main() -> synchrowave::Result<()> {
    println!("{:<30} {:>12}", "case", "max rel err");
    let mut worst = 0.0f64;
    for (label, lambda, learnable) in [
        ("data-only (lambda = 0)", 0.0, false),
        ("composite, lambda = 0.3", 0.3, false),
        ("composite, lambda = 3", 3.0, false),
        ("learnable R/L, lambda = 0.3", 0.3, true),
        ("learnable R/L, lambda = 3", 3.0, true),
    ] {
        let report = run_gradient_check(&GradCheckCase {
            seed: 0,
            lambda,
            learnable_line: learnable,
            ..GradCheckCase::default()
        })?;
        worst = worst.max(report.max_relative_error);
        println!("{label:<30} {:>12.3e}", report.max_relative_error);
    }
    println!(
        "\nworst {:.3e} {} 1e-4",
        worst,
        if worst < 1e-4 { "<" } else { ">=" }
    );
    Ok(())
}
