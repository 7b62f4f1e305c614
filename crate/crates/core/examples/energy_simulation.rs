//! Star network of synthetic nodes: energy and reconstruction error per
//! report period for each strategy across the tolerance grid. One node per
//! class is deliberately misclassified as trend.

use rdclass::netsim::{simulate, CurveSet, Scenario, Strategy};
use rdclass::SignalClass;

fn main() -> rdclass::Result<()> {
    let mut scenario = Scenario::default().with_synthetic_nodes(20);
    for class in [SignalClass::Noisy, SignalClass::QuasiPeriodic] {
        if let Some(n) = scenario.nodes.iter_mut().find(|n| n.true_class == class) {
            n.assigned_class = SignalClass::Trend;
        }
    }
    let curves = CurveSet::from_synthetic(
        &scenario.generator,
        scenario.window_len,
        50,
        &scenario.xi_grid,
        scenario.energy.encoding()?,
        scenario.seed,
    )?;
    let report = simulate(&scenario, &curves)?;
    println!("report period {:.0} min", report.report_period_s / 60.0);
    println!(
        "{:>5} {:>15} {:>12} {:>12} {:>10}",
        "xi%", "strategy", "energy mJ", "bits", "error%"
    );
    for &xi in &scenario.xi_grid {
        for s in Strategy::ALL {
            let a = report
                .aggregate_for(s, None, xi)
                .expect("every strategy is simulated");
            println!(
                "{xi:>5} {s:>15} {:>12.4} {:>12.0} {:>10.3}",
                a.mean_energy * 1e3,
                a.mean_bits_sent,
                a.mean_distortion_pct
            );
        }
    }
    Ok(())
}
