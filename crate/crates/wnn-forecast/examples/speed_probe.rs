//! Prints single-threaded grid-search wall-clock for both candidate
//! layouts across horizons, on a benchmark-sized synthetic series.

use std::time::Instant;

use wnn_forecast::{grid_search, LambdaPolicy, Series, TuneOptions, Variant};

fn synthetic_retail(len: usize) -> Series {
    let v: Vec<f64> = (1..=len)
        .map(|t| {
            let t = t as f64;
            let seasonal = 1.0 + 0.18 * (std::f64::consts::TAU * t / 12.0).sin();
            let texture = 1.0 + 0.03 * (t * 0.7).sin() * (t * 0.13).cos();
            (150.0 + 1.1 * t) * seasonal * texture
        })
        .collect();
    Series::new(v).unwrap().with_period(12).unwrap()
}

fn main() {
    let s = synthetic_retail(338);
    let t = s.len();
    println!("horizon  I  cpto_s  fpto_s  ratio");
    let mut total_c = 0.0;
    let mut total_f = 0.0;
    for n in 3..=10 {
        let i_sets = wnn_forecast::sets_from_fraction(t, n, 0.3).unwrap();
        let mut times = [0.0f64; 2];
        for (slot, variant) in [Variant::Cpto, Variant::Fpto].into_iter().enumerate() {
            let opts = TuneOptions {
                variant,
                n,
                k_max: 10,
                w_max: 15,
                i_sets,
                lambda_policy: LambdaPolicy::PerFold,
                threads: 1,
            };
            let mut runs = Vec::new();
            for _ in 0..3 {
                let started = Instant::now();
                let r = grid_search(&s, &opts).unwrap();
                let _ = r.mape_star;
                runs.push(started.elapsed().as_secs_f64());
            }
            runs.sort_by(f64::total_cmp);
            times[slot] = runs[1];
        }
        total_c += times[0];
        total_f += times[1];
        println!(
            "{n:>7} {i_sets:>3} {:>8.4} {:>8.4} {:>6.3}",
            times[0],
            times[1],
            times[1] / times[0]
        );
    }
    println!("total    -  {total_c:>8.4} {total_f:>8.4} {:>6.3}", total_f / total_c);
}
