// Spike: V16 through the full criterion-4/6 pipeline.
use rayon::prelude::*;
use std::time::Instant;
use synchrowave::sim::*;
use synchrowave::sweep::data_efficiency;
use synchrowave::training::*;
use synchrowave::waveform::*;

fn main() {
    let ibr = GroundTruthIbr { envelope_amplitude: 3.0, envelope_tau: 0.3/60.0, saturation_scale: 20.0, ..GroundTruthIbr::default() };
    let sampling = SamplingConfig::sixty_hz(128, 2).unwrap();
    let line = LineParams::default();
    let events = generate_dataset(&DisturbanceConfig::default(), &ibr, &line, &sampling).unwrap();
    let grid = default_lambda_grid();
    let base = TrainConfig { max_iterations: 2500, learning_rate: 3e-3, patience: 800, eval_every: 100, ..TrainConfig::default() };

    let counts = [3usize, 5, 10, 20, 30, 40, 50];
    let t0 = Instant::now();
    let cells: Vec<(usize, u64)> = counts.iter().flat_map(|&c| [1u64,2,3].map(|s| (c,s))).collect();
    let res: Vec<(usize, f64, f64, f64)> = cells.par_iter().map(|&(count, seed)| {
        let split = split_events(80, count, 10, 20, seed).unwrap();
        let cfg = TrainConfig { seed, ..base };
        let dm = train_data_only(&events, &split, &cfg).unwrap();
        let preds = dm.predict(&events, &split.test_ids).unwrap();
        let mse_data = test_mse(&preds, &events, &split.test_ids).unwrap();
        let sel = select_lambda(&events, &split, &grid, TrainMode::PhysKnown, Some(line), &cfg).unwrap();
        let preds = sel.best.predict(&events, &split.test_ids).unwrap();
        let mse_phy = test_mse(&preds, &events, &split.test_ids).unwrap();
        (count, mse_data, mse_phy, sel.lambda_star)
    }).collect();
    let mut curve_d = Vec::new();
    let mut curve_p = Vec::new();
    for &c in &counts {
        let d: f64 = res.iter().filter(|r| r.0==c).map(|r| r.1).sum::<f64>()/3.0;
        let p: f64 = res.iter().filter(|r| r.0==c).map(|r| r.2).sum::<f64>()/3.0;
        let ls: Vec<f64> = res.iter().filter(|r| r.0==c).map(|r| r.3).collect();
        println!("count={c:>2}: data={d:.3e} phy={p:.3e} imp={:+.1}% lambdas={ls:?}", 100.0*(1.0-p/d));
        curve_d.push(d); curve_p.push(p);
    }
    let m3 = 100.0*(1.0-curve_p[0]/curve_d[0]);
    let m5 = 100.0*(1.0-curve_p[1]/curve_d[1]);
    let m10 = 100.0*(1.0-curve_p[2]/curve_d[2]);
    println!("criterion4 mean over {{3,5,10}}: {:+.2}%", (m3+m5+m10)/3.0);
    let eff = data_efficiency(&counts, &curve_d, &curve_p).unwrap();
    for p in &eff.points {
        println!("  eff @{:>2}: equiv={:.1}{} ratio={:.2}", p.count, p.equivalent_count, if p.lower_bound {"+"} else {" "}, p.ratio);
    }
    println!("criterion6 median ratio: {:.2}", eff.median_ratio);
    println!("elapsed {:?}", t0.elapsed());
}
