use eisencalc::padic::*;
use eisencalc::arith::{rat, prime_power_rat};
fn main() {
    let t0 = std::time::Instant::now();
    for p in [2u64, 3, 5] {
        for t in [1i64, 2, 3] {
            for kind in [VectorKind::Spherical, VectorKind::Steinberg] {
                let f = match kind {
                    VectorKind::Spherical => LocalVector::spherical(p, SParam::half(t)),
                    _ => LocalVector::steinberg(p, SParam::half(t)),
                };
                for va in 0..=3i64 {
                    let alpha = prime_power_rat(p, va) * rat(7);
                    let bound = default_whittaker_shells(&f, &alpha, &rat(1));
                    let oracle = whittaker_oracle(&f, &alpha, &rat(1), bound, 1).unwrap();
                    let closed = whittaker_closed(&f, &alpha, &rat(1)).unwrap();
                    assert_eq!(oracle, closed, "p={p} t={t} va={va}");
                }
            }
        }
    }
    println!("full spherical/steinberg grid: {:?}", t0.elapsed());
}
