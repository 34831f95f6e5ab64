//! Probe of the N=3 interval build at the acceptance scale (timing and
//! witness values printed for inspection).

use std::sync::Arc;
use std::time::Instant;

use puremix_core::certify::{
    certify_pure_mixing, entropy_covering_bound, periodic_density_check, ExactnessVerdict,
    MixingVerdict,
};
use puremix_core::graph::interval_graph;
use puremix_core::mixing::{build_pure_mixing, BuildOptions};
use puremix_core::num::to_f64;

#[test]
fn interval_three_stages_probe() {
    let t0 = Instant::now();
    let g = Arc::new(interval_graph());
    let result = build_pure_mixing(&g, 3, &BuildOptions::default()).unwrap();
    println!("build: {:?}", t0.elapsed());
    println!(
        "final grid gaps: {}, h pieces: {}",
        result.final_grid.len().saturating_sub(1),
        result.h.piece_count()
    );
    for (i, tiles) in result.stage_tiles.iter().enumerate() {
        println!(
            "stage {}: tiles {}, mesh {}",
            i,
            tiles.len(),
            to_f64(&result.stage_meshes[i])
        );
    }

    let t1 = Instant::now();
    let pm = certify_pure_mixing(&result.h, &result.resolution, None, 4, 64);
    println!("pure-mixing cert: {:?}", t1.elapsed());
    println!(
        "mixing verdict {:?} exponent {:?} window {} cover {}",
        pm.mixing.verdict, pm.mixing.exponent, pm.mixing.window, pm.mixing.cover_size
    );
    assert_eq!(pm.mixing.verdict, MixingVerdict::Mixing);
    assert!(matches!(pm.exactness.verdict, ExactnessVerdict::NotExact { .. }));
    assert!(pm.mixing.exponent.unwrap() <= 6);

    // Entropy bounds per stage tiling.
    let t2 = Instant::now();
    for (i, tiles) in result.stage_tiles.iter().enumerate() {
        let b = entropy_covering_bound(&result.h_work, tiles, 1, 6);
        println!("stage {} covering bound: {}", i, b.nats);
    }
    println!("entropy: {:?}", t2.elapsed());

    // Periodic density from seeds at the stage-2 mesh.
    let t3 = Instant::now();
    let eps = &result.stage_meshes[2];
    let pd = periodic_density_check(&result.h, eps, 64, 2, &result.seed_points);
    println!(
        "periodic: {:?}, orbits {}, max gap {}",
        t3.elapsed(),
        pd.orbits.len(),
        to_f64(&pd.max_gap)
    );
    println!("periodic pass: {}", pd.cert.passed());
    println!("total: {:?}", t0.elapsed());
}
