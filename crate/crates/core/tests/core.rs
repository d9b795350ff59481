use lfmca::{
    local_rule, plus_times, predict_by_simulation, run_to_fixed_point, simulate, step, step_with_threads,
    Cell, Configuration, Error, LNeighborhood, State,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Independent oracle: sum the neighbor spins directly.
fn oracle_step(x: &Configuration, nb: &LNeighborhood) -> Configuration {
    let n = x.n();
    Configuration::from_fn(n, |c| {
        if x.get(c).is_plus() {
            return State::Plus;
        }
        let mut sum = 0i32;
        for &k in nb.north() {
            sum += x.get(Cell::new(c.i, (c.j + k) % n)).spin();
        }
        for &k in nb.east() {
            sum += x.get(Cell::new((c.i + k) % n, c.j)).spin();
        }
        State::from_bool(sum > 0)
    })
}

fn random_config(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Configuration {
    Configuration::from_fn(n, |_| State::from_bool(rng.gen_bool(density)))
}

/// Grid side, offsets below `n` (so never colliding), and a seed.
fn instance() -> impl Strategy<Value = (Configuration, LNeighborhood)> {
    (2usize..24)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::btree_set(1..n, 1..=3),
                prop::collection::btree_set(1..n, 1..=3),
                any::<u64>(),
                0.05f64..0.95,
            )
        })
        .prop_map(|(n, north, east, seed, density)| {
            let north: Vec<usize> = north.into_iter().collect();
            let east: Vec<usize> = east.into_iter().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                random_config(&mut rng, n, density),
                LNeighborhood::new(&north, &east).unwrap(),
            )
        })
}

proptest! {
    #[test]
    fn step_matches_oracle((x, nb) in instance()) {
        prop_assert_eq!(step(&x, &nb).unwrap(), oracle_step(&x, &nb));
    }

    #[test]
    fn freezing_monotonicity((x, nb) in instance()) {
        prop_assert!(x.le(&step(&x, &nb).unwrap()));
    }

    #[test]
    fn rule_monotonicity((x, nb) in instance(), extra in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(extra);
        let y = Configuration::from_fn(x.n(), |c| State::from_bool(x.get(c).is_plus() || rng.gen_bool(0.3)));
        prop_assert!(x.le(&y));
        prop_assert!(step(&x, &nb).unwrap().le(&step(&y, &nb).unwrap()));
    }

    #[test]
    fn shift_equivariance((x, nb) in instance(), di in 0usize..64, dj in 0usize..64) {
        let (di, dj) = (di % x.n(), dj % x.n());
        prop_assert_eq!(
            step(&x.shifted(di, dj), &nb).unwrap(),
            step(&x, &nb).unwrap().shifted(di, dj)
        );
    }

    #[test]
    fn fixed_point_is_idempotent((x, nb) in instance()) {
        let (fp, steps) = run_to_fixed_point(&x, &nb).unwrap();
        prop_assert!(steps <= x.n() * x.n());
        prop_assert_eq!(step(&fp, &nb).unwrap(), fp.clone());
        prop_assert_eq!(simulate(&x, &nb, steps).unwrap(), fp);
    }

    #[test]
    fn step_is_deterministic_across_threads((x, nb) in instance(), threads in 1usize..5) {
        let a = step(&x, &nb).unwrap();
        prop_assert_eq!(&a, &step(&x, &nb).unwrap());
        prop_assert_eq!(&a, &step_with_threads(&x, &nb, threads).unwrap());
    }

    #[test]
    fn simulate_matches_repeated_oracle((x, nb) in instance(), t in 0usize..40) {
        let mut y = x.clone();
        for _ in 0..t {
            y = oracle_step(&y, &nb);
        }
        prop_assert_eq!(simulate(&x, &nb, t).unwrap(), y);
    }

    #[test]
    fn plus_times_are_exact((x, nb) in instance()) {
        let times = plus_times(&x, &nb).unwrap();
        let n = x.n();
        let (fp, _) = run_to_fixed_point(&x, &nb).unwrap();
        for c in x.cells() {
            match times[c.j * n + c.i] {
                None => prop_assert!(!fp.get(c).is_plus()),
                Some(0) => prop_assert!(x.get(c).is_plus()),
                Some(t) => {
                    prop_assert!(!simulate(&x, &nb, t - 1).unwrap().get(c).is_plus());
                    prop_assert!(simulate(&x, &nb, t).unwrap().get(c).is_plus());
                }
            }
        }
    }

    #[test]
    fn grid_text_round_trip((x, _nb) in instance()) {
        let text = x.to_text();
        prop_assert_eq!(Configuration::parse(&text).unwrap(), x.clone());
        prop_assert_eq!(Configuration::parse(text.trim_end()).unwrap(), x);
    }
}

#[test]
fn offsets_examples() {
    let toom = LNeighborhood::new(&[1], &[1]).unwrap();
    assert_eq!(toom.offsets(), vec![(0, 1), (1, 0)]);
    assert_eq!(
        LNeighborhood::new(&[1, 2, 3, 4], &[1, 2, 3])
            .unwrap()
            .offsets()
            .len(),
        7
    );
    assert_eq!(
        LNeighborhood::new(&[2, 4, 6], &[3, 6]).unwrap().offsets(),
        vec![(0, 2), (0, 4), (0, 6), (3, 0), (6, 0)]
    );
}

#[test]
fn ties_stay_minus() {
    use State::{Minus, Plus};
    assert_eq!(local_rule(Plus, &[Minus, Minus]), Plus);
    assert_eq!(local_rule(Minus, &[Plus, Plus]), Plus);
    assert_eq!(local_rule(Minus, &[Plus, Minus]), Minus);
    assert_eq!(local_rule(Minus, &[Plus, Plus, Minus, Minus]), Minus);
    assert_eq!(local_rule(Minus, &[Plus, Plus, Plus, Minus]), Plus);
    assert_eq!(
        local_rule(Minus, &[Plus, Plus, Plus, Minus, Minus, Minus, Minus]),
        Minus
    );
    assert_eq!(
        local_rule(Minus, &[Plus, Plus, Plus, Plus, Minus, Minus, Minus]),
        Plus
    );
}

#[test]
fn uniform_grids_are_fixed() {
    let nb = LNeighborhood::toom();
    for s in [State::Minus, State::Plus] {
        let x = Configuration::new(4, s);
        assert_eq!(step(&x, &nb).unwrap(), x);
        assert_eq!(run_to_fixed_point(&x, &nb).unwrap(), (x.clone(), 0));
    }
}

#[test]
fn lone_minus_cell_flips() {
    let mut x = Configuration::new(4, State::Plus);
    x.set(Cell::new(0, 0), State::Minus);
    let nb = LNeighborhood::toom();
    assert_eq!(step(&x, &nb).unwrap(), Configuration::new(4, State::Plus));
    assert!(predict_by_simulation(&x, &nb, 1, Cell::new(0, 0)).unwrap());
    assert!(!predict_by_simulation(&x, &nb, 0, Cell::new(0, 0)).unwrap());
    assert!(!predict_by_simulation(&x, &nb, 5, Cell::new(1, 0)).unwrap());
}

#[test]
fn minus_row_never_changes() {
    let x = Configuration::from_fn(4, |c| State::from_bool(c.j != 2));
    let nb = LNeighborhood::toom();
    for t in 0..=16 {
        assert_eq!(simulate(&x, &nb, t).unwrap(), x);
    }
}

#[test]
fn clamped_time_matches_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_config(&mut rng, 10, 0.5);
    let nb = LNeighborhood::new(&[1, 2], &[1]).unwrap();
    assert_eq!(
        simulate(&x, &nb, 100).unwrap(),
        simulate(&x, &nb, 1_000_000_000).unwrap()
    );
}

#[test]
fn seeded_toom_converges_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = random_config(&mut rng, 8, 0.5);
    let (_, steps) = run_to_fixed_point(&x, &LNeighborhood::toom()).unwrap();
    assert!(steps <= 64);
}

#[test]
fn colliding_offsets_rejected() {
    let x = Configuration::new(4, State::Minus);
    let nb = LNeighborhood::new(&[1, 5], &[1]).unwrap();
    assert!(matches!(step(&x, &nb), Err(Error::OffsetCollision { .. })));
    let nb = LNeighborhood::new(&[4], &[1]).unwrap();
    assert!(matches!(step(&x, &nb), Err(Error::OffsetCollision { .. })));
    assert!(LNeighborhood::new(&[], &[1]).is_err());
    assert!(LNeighborhood::new(&[0], &[1]).is_err());
}

#[test]
fn out_of_range_cell() {
    let x = Configuration::new(4, State::Minus);
    assert!(matches!(
        predict_by_simulation(&x, &LNeighborhood::toom(), 1, Cell::new(4, 0)),
        Err(Error::CellOutOfRange { .. })
    ));
}
