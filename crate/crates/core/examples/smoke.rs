use dspi_core::gnep::verify_equilibrium;
use dspi_core::ladder::{gen_ladder, ladder_equilibrium_construction, LadderSpec};

fn main() {
    // The budget-split profile keeps every path at F/(F+1), but an agent f
    // can drop its rung top-ups, spend x on the bottom arc (b_f, b_{f+1})
    // (covering rungs 1..f at once) and y on rung f+1. Closed form of the
    // best-response gap: max(0, (f - 1 - eps)) / ((2+eps) f (f+1)).
    for eps in [2.0_f64, 5.0] {
        for f_count in 1..=10usize {
            let inst = gen_ladder(&LadderSpec::continuous(f_count, eps));
            let profile = ladder_equilibrium_construction(f_count);
            let check = verify_equilibrium(&inst, &profile, 1e-6).unwrap();
            let predicted: f64 = (1..=f_count)
                .map(|f| {
                    let f = f as f64;
                    ((f - 1.0 - eps) / ((2.0 + eps) * f * (f + 1.0))).max(0.0)
                })
                .fold(0.0, f64::max);
            println!(
                "eps={eps} F={f_count:2}: measured gap {:.10}  predicted {:.10}  diff {:.2e}",
                check.max_gap().max(0.0),
                predicted,
                (check.max_gap().max(0.0) - predicted).abs()
            );
        }
    }
}
