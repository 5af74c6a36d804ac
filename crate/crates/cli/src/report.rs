use std::fmt::Write;

use qkdrate_core::{symmetric_rate, KeyRateReport};

use crate::CliError;

pub const SWEEP_HEADER: &str = "qber,mutual_info,adversary_bound,key_rate";

/// Key-value report with six decimals.
pub fn human(r: &KeyRateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mutual_info        {:.6}", r.mutual_info);
    let _ = writeln!(s, "adversary_bound    {:.6}", r.adversary_bound);
    let _ = writeln!(s, "rate               {:.6}", r.rate);
    let _ = writeln!(s, "rate_clamped       {:.6}", r.rate_clamped);
    match r.qber {
        Some(q) => {
            let _ = writeln!(s, "qber               {q:.6}");
        }
        None => {
            let _ = writeln!(s, "qber               undefined");
        }
    }
    if let Some(t) = &r.optimizer {
        let p = t.best_params;
        let _ = writeln!(s, "optimizer.evaluations        {}", t.evaluations);
        let _ = writeln!(s, "optimizer.feasible_grid      {}", t.feasible_grid_points);
        let _ = writeln!(s, "optimizer.refinement_sweeps  {}", t.refinement_sweeps);
        let _ = writeln!(
            s,
            "optimizer.best_params        x1={:.6} x2={:.6} x3={:.6} x4={:.6} theta={:.6}",
            p.x1(),
            p.x2(),
            p.x3(),
            p.x4(),
            p.theta()
        );
        let _ = writeln!(s, "optimizer.min_abs_corr       {:.6}", t.min_abs_correlation);
        let _ = writeln!(s, "optimizer.feasibility_margin {:.6e}", t.feasibility_margin);
    }
    if r.rate <= 0.0 {
        let _ = writeln!(s, "no positive key rate guaranteed");
    }
    s
}

/// Closed-form rates on `steps` linearly spaced QBER values in `[lo, hi]`.
pub fn sweep_csv(lo: f64, hi: f64, steps: usize) -> Result<String, CliError> {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for i in 0..steps {
        let q = if i + 1 == steps {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (steps - 1) as f64
        };
        let r = symmetric_rate(q)?;
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6},{:.6}",
            q, r.mutual_info, r.adversary_bound, r.rate
        );
    }
    Ok(out)
}
