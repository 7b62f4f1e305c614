//! Per-class average rate-distortion curves for LTC and DCT, measured on a
//! small synthetic corpus, plus the inverse lookup used by the simulator.

use rdclass::compression::{
    average_curve, class_curves, min_rate_for_tolerance, Algorithm, ErrorBudget,
    DEFAULT_EPS_GRID_PCT,
};
use rdclass::timeseries::gen_synthetic;
use rdclass::{SampleEncoding, SignalClass};

fn main() -> rdclass::Result<()> {
    let enc = SampleEncoding::new(16)?;
    let budgets = ErrorBudget::grid(&DEFAULT_EPS_GRID_PCT)?;
    let windows = SignalClass::ALL
        .iter()
        .flat_map(|&c| (0..40).map(move |i| gen_synthetic(c, 500, i)))
        .collect::<rdclass::Result<Vec<_>>>()?;

    for alg in [Algorithm::Ltc, Algorithm::Dct] {
        let curves = class_curves(&windows, alg, &budgets, enc)?;
        let classless = average_curve(&curves, &DEFAULT_EPS_GRID_PCT)?;
        println!("{alg}: rate at each distortion");
        print!("{:>15}", "distortion%");
        for d in DEFAULT_EPS_GRID_PCT {
            print!("{d:>7}");
        }
        println!();
        for c in curves.iter().chain([&classless]) {
            let name = c.class_label.map_or("classless", SignalClass::name);
            print!("{name:>15}");
            for d in DEFAULT_EPS_GRID_PCT {
                print!("{:>7.3}", c.rate_at(d));
            }
            println!();
        }
        let lookup = min_rate_for_tolerance(&classless, 4.0);
        println!("classless {alg} at 4%: {lookup:?}\n");
    }
    Ok(())
}
