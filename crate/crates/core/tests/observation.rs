use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sc2_core::cacer::initial_agent;
use sc2_core::maps::{build_obstacle, clip_local, InfoMap, PerceptionMap};
use sc2_core::model::{MissionConfig, Mode, Point};
use sc2_core::policy::Policy;

fn info(cfg: &MissionConfig, drones: &[Point]) -> InfoMap {
    let mut m = PerceptionMap::new(cfg, Point::default());
    for &p in drones {
        m.stamp(p, Mode::Explore, cfg);
    }
    let o = build_obstacle(m.geom(), drones, Point::default(), cfg);
    InfoMap::new(m, o).unwrap()
}

/// A drone's action depends only on its own window: moving drones that are
/// far away leaves its observation and heading bit-for-bit unchanged.
#[test]
fn execution_is_decentralized() {
    let cfg = MissionConfig {
        obs_size: 9,
        hidden: 16,
        ..MissionConfig::default()
    };
    let agent = initial_agent(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let me = Point::new(-60.0, 20.0);
    // others stay beyond sensing plus safety range of the observed window
    let far = cfg.r_s * 2f64.sqrt() + 2.0 * cfg.r_s + cfg.r_o + cfg.cell;
    for _ in 0..20 {
        let others: Vec<Point> = (0..4)
            .map(|_| loop {
                let p = Point::new(rng.random_range(-200.0..200.0), rng.random_range(-200.0..200.0));
                if p.dist(me) > far {
                    break p;
                }
            })
            .collect();
        let mut shuffled = others.clone();
        shuffled.reverse();
        for q in shuffled.iter_mut() {
            let moved = *q + Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            if moved.dist(me) > far {
                *q = moved;
            }
        }
        let a = clip_local(&info(&cfg, &[vec![me], others].concat()), me, cfg.obs_size, cfg.r_s);
        let b = clip_local(&info(&cfg, &[vec![me], shuffled].concat()), me, cfg.obs_size, cfg.r_s);
        assert_eq!(a, b);
        assert_eq!(agent.heading(&a).to_bits(), agent.heading(&b).to_bits());
    }
}
