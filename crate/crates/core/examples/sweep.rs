use nwsteiner::io::{gen_random, solve_instance, InstanceKind};

fn main() {
    let mut failures = 0usize;
    let which = std::env::var("SWEEP_KIND").unwrap_or_default();
    let kinds: Vec<InstanceKind> = match which.as_str() {
        "directed" => vec![InstanceKind::Dst, InstanceKind::BDrat, InstanceKind::QDrat],
        "undirected" => vec![InstanceKind::BUrst, InstanceKind::QUrst],
        "burst" => vec![InstanceKind::BUrst],
        "qurst" => vec![InstanceKind::QUrst],
        _ => vec![
            InstanceKind::Dst,
            InstanceKind::BDrat,
            InstanceKind::QDrat,
            InstanceKind::BUrst,
            InstanceKind::QUrst,
        ],
    };
    for kind in kinds {
        let runs: usize = std::env::var("SWEEP_RUNS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(400);
        for i in 0..runs {
            let n = 4 + (i % 11);
            let seed = 50_000 + i as u64;
            let density = [0.25, 0.4, 0.6, 0.9][i % 4];
            let inst = match gen_random(kind, n, density, (0.5, 10.0), seed) {
                Ok(inst) => inst,
                Err(e) => {
                    println!("{:?} gen n={n} seed={seed}: {e}", kind);
                    failures += 1;
                    continue;
                }
            };
            let t0 = std::time::Instant::now();
            let solved = solve_instance(&inst, None);
            if t0.elapsed().as_secs() >= 5 {
                eprintln!(
                    "slow: {:?} n={n} seed={seed} density={density} took {:?}",
                    kind,
                    t0.elapsed()
                );
            }
            match solved {
                Ok(report) => {
                    if let Some(b) = inst.budget {
                        let cap = (1.0 + inst.epsilon) * b + 1e-9 * (1.0 + b);
                        if report.tree.cost() > cap {
                            println!(
                                "{:?} n={n} seed={seed}: cost {} > cap {cap}",
                                kind,
                                report.tree.cost()
                            );
                            failures += 1;
                        }
                    }
                    if kind == InstanceKind::QDrat {
                        let q = inst.quota.unwrap();
                        if report.prize < q / 2.0 - 1e-9 {
                            println!("qdrat n={n} seed={seed}: prize {} < Q/2", report.prize);
                            failures += 1;
                        }
                    }
                    if report.tree.validate(&inst.graph).is_err() {
                        println!("{:?} n={n} seed={seed}: invalid tree", kind);
                        failures += 1;
                    }
                }
                Err(e) => {
                    println!("{:?} n={n} seed={seed}: {e}", kind);
                    failures += 1;
                }
            }
            if (i + 1) % 50 == 0 {
                eprintln!("{:?}: {}/{runs}", kind, i + 1);
            }
        }
        eprintln!("{:?}: done", kind);
    }
    println!("total failures: {failures}");
}
