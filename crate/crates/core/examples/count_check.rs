use sandwich_lab::atlas::SurfaceKind;
use sandwich_lab::classify::classify_surface;

fn main() {
    let t0 = std::time::Instant::now();
    for p in [2u64, 3, 5, 7] {
        let c = classify_surface(SurfaceKind::ProjPlane, p).unwrap();
        println!("P2 p={p}: {} classes (expect {}), stats {:?}", c.class_count, p - 1, c.stats);
        assert_eq!(c.class_count as u64, p - 1);
    }
    for p in [2u64, 3, 5] {
        for d in 0..=3u32 {
            let c = classify_surface(SurfaceKind::Hirzebruch(d), p).unwrap();
            let expect = if d == 0 { p } else { p + 1 };
            println!("H_{d} p={p}: {} classes (expect {expect}), direct={} arr={} nil={}",
                c.class_count, c.stats.direct_route, c.stats.rejected_arrangement, c.stats.rejected_nilpotent);
            assert_eq!(c.class_count as u64, expect);
        }
    }
    println!("total time: {:?}", t0.elapsed());
}
