use lfgroup::amalgam::{build_gx, embedding_configurations, sample_tries, stable_amalgam, Budget, Shape};
use lfgroup::corpus::small_groups;
use lfgroup::group::Group;
use lfgroup::io::{format_mtable, parse_mtable};
use lfgroup::schemes::{apply_cg, cg_postconditions};
use lfgroup::types::{tp_bs_list, types_equal};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(max: usize) -> Vec<(&'static str, Group)> {
    small_groups().into_iter().filter(|(_, g)| g.order() <= max).collect()
}

fn shuffled(n: usize, seed: u64) -> Vec<u32> {
    let mut rest: Vec<u32> = (1..n as u32).collect();
    rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    std::iter::once(0).chain(rest).collect()
}

#[test]
fn mtable_round_trip() {
    for (_, g) in small_groups() {
        assert_eq!(parse_mtable(&format_mtable(&g)).unwrap().rows(), g.rows());
    }
}

#[test]
fn trivial_base_gives_direct_product() {
    let gs = corpus(4);
    for (_, g1) in &gs {
        for (_, g2) in &gs {
            let z1 = Group::trivial();
            let (e1, e2) = embedding_configurations(&z1, g1, g2).remove(0);
            let shape = Shape::new(z1, g1.clone(), g2.clone(), e1, e2).unwrap();
            let sa = stable_amalgam(&shape, Budget::default()).unwrap();
            assert_eq!(sa.order_usize(), Some(g1.order() * g2.order()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_tries_satisfy_intersection(i in 0usize..14, j in 0usize..14, seed in any::<u64>()) {
        let gs = small_groups();
        let (g1, g2) = (&gs[i].1, &gs[j].1);
        let z2 = Group::cyclic(2);
        let configs = embedding_configurations(&z2, g1, g2);
        prop_assume!(!configs.is_empty());
        let (e1, e2) = configs[seed as usize % configs.len()].clone();
        let shape = Shape::new(z2, g1.clone(), g2.clone(), e1, e2).unwrap();
        for x in sample_tries(&shape, seed, 3) {
            let gx = build_gx(&x, Budget::default()).unwrap();
            prop_assert!(gx.intersection_law(&shape));
        }
    }

    #[test]
    fn types_survive_relabeling(i in 0usize..14, seed in any::<u64>(), x in 0u32..8, y in 0u32..8) {
        let g = &small_groups()[i].1;
        let n = g.order() as u32;
        let (x, y) = (x % n, y % n);
        let sigma = shuffled(g.order(), seed);
        let r = g.relabel(&sigma);
        let a = tp_bs_list(g, &[x], &[y]).unwrap();
        let b = tp_bs_list(&r, &[sigma[x as usize]], &[sigma[y as usize]]).unwrap();
        prop_assert!(types_equal(&a, &b).unwrap());
    }

    #[test]
    fn cg_postconditions_after_relabeling(i in 0usize..14, seed in any::<u64>()) {
        let g = small_groups()[i].1.relabel(&shuffled(small_groups()[i].1.order(), seed));
        let ext = apply_cg(&g).unwrap();
        prop_assert_eq!(cg_postconditions(&g, &ext, ext.tuple[0]), [true; 3]);
        prop_assert_eq!(ext.group.order(), 2 * g.order() * g.order());
    }
}
