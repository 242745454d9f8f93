//! The interpolated-crossing data-efficiency metric.
//!
//! Given MSE-vs-training-events curves for a baseline and an improved
//! model, each improved point asks: how many events would the baseline
//! need to reach the same error? The answer interpolates linearly on the
//! baseline curve; the summary is the median ratio.
//!
//! ```sh
//! cargo run --release -p synchrowave --example data_efficiency
//! ```

use synchrowave::sweep::data_efficiency;

fn main() -> synchrowave::Result<()> {
    let counts = [3usize, 5, 10, 20, 30, 40, 50];
    let baseline = [22.11, 19.06, 14.56, 10.83, 9.89, 8.69, 8.00];
    let improved = [9.30, 8.85, 8.87, 8.85, 8.08, 7.80, 7.40];

    let eff = data_efficiency(&counts, &baseline, &improved)?;
    println!("{:>6} | {:>9} | {:>16} | {:>7}", "events", "improved", "baseline needs", "ratio");
    for p in &eff.points {
        println!(
            "{:>6} | {:>9.2} | {:>13.1}{} | {:>7.2}",
            p.count,
            p.mse_phy,
            p.equivalent_count,
            if p.lower_bound { "+" } else { " " },
            p.ratio
        );
    }
    println!("\nmedian ratio: {:.2}x", eff.median_ratio);
    println!("(a '+' marks counts where the baseline never catches up inside the curve)");
    Ok(())
}
