use sle4::loewner::*;

fn main() {
    let dt = 2e-4;
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for seed in 0..40u64 {
        let driver = sample_driver(4.0, 0.5, dt, seed).unwrap();
        let chain = LoewnerChain::from_driver(4.0, driver).unwrap();
        let mut prev_lo = f64::NEG_INFINITY;
        let mut prev_hi = f64::INFINITY;
        for i in 0..12 {
            let s = 0.45 * i as f64 / 12.0;
            match boundary_images(&chain, s, 0.5) {
                Ok((lo, hi)) => {
                    if !(lo <= 0.0 && hi >= 0.0) { println!("SIGN seed={seed} s={s:.3} {lo} {hi}"); fails += 1; }
                    let v = (prev_lo - lo).max(hi - prev_hi).max(0.0);
                    worst = worst.max(v);
                    if v > 0.05 { println!("MONO seed={seed} s={s:.3} viol={v:.3}"); fails += 1; }
                    prev_lo = lo; prev_hi = hi;
                }
                Err(e) => { println!("ERR seed={seed} s={s:.3}: {e}"); fails += 1; }
            }
        }
    }
    println!("worst monotonicity violation: {worst:.4}, issues: {fails}");
}
