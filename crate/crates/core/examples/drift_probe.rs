use aol_core::*;
use std::f64::consts::PI;

fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let half = n / 2;
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut dirs = Vec::with_capacity(2 * half);
    for i in 0..half {
        let z = (i as f64 + 0.5) / half as f64;
        let phi = 2.0 * PI * (i as f64 / golden).fract();
        let s = (1.0 - z * z).sqrt();
        let d = [s * phi.cos(), s * phi.sin(), z];
        dirs.push(d);
        dirs.push([-d[0], -d[1], -d[2]]);
    }
    dirs
}

fn main() {
    let grid = Grid::new(64).unwrap();
    let v = generate(&SynthSpec::power_law_rough(0.3, 1.0, 1), grid).unwrap();
    let u = apply_inverse_filter(&FilterSpec::helmholtz(1.0).unwrap(), &v);
    let fields = DefectFields::new(u, v, None);
    let spec = catalog(DefectLabel::D1);
    let ladder = default_epsilon_ladder(&grid).unwrap();
    println!("ladder: {:?}", ladder.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>());
    for &eps in &ladder {
        let mb = Mollifier::new(MollifierProfile::Bump, eps).unwrap();
        let mq = Mollifier::new(MollifierProfile::Quartic, eps).unwrap();
        let std_rule = XiQuadrature::standard();
        let b = defect_estimate(&spec, &fields, &mb, &std_rule).unwrap();
        let q = defect_estimate(&spec, &fields, &mq, &std_rule).unwrap();
        println!("eps {eps:.4}: bump {b:+.5e} quartic {q:+.5e}");
    }
    // converged reference at the end rungs
    let fib = XiQuadrature::equal_weight(24, fibonacci_directions(350));
    for &eps in &[ladder[0], ladder[ladder.len()-1]] {
        let mb = Mollifier::new(MollifierProfile::Bump, eps).unwrap();
        let mq = Mollifier::new(MollifierProfile::Quartic, eps).unwrap();
        let b = defect_estimate(&spec, &fields, &mb, &fib).unwrap();
        let q = defect_estimate(&spec, &fields, &mq, &fib).unwrap();
        println!("fib350 eps {eps:.4}: bump {b:+.5e} quartic {q:+.5e}");
    }
}
