//! Brute-force oracles checked against the library, plus property tests on
//! randomly generated resolvable designs.

use std::collections::BTreeSet;

use crd_caching::scheme::{transmission_count, user_count};
use crd_caching::*;
use proptest::prelude::*;

fn catalog() -> Vec<(String, Resolution)> {
    let specs = [
        "example:1",
        "example:2",
        "example:3",
        "example:4",
        "example:5",
        "example:6",
        "example:7",
        "example:8",
        "example:9",
        "affine:n=2",
        "affine:n=3",
        "affine:n=4",
        "affine:n=5",
        "ag:q=2,m=3",
        "ag:q=3,m=3",
        "ag:q=2,m=4",
        "hadamard:m=1",
        "hadamard:m=2",
        "hadamard:m=3",
    ];
    specs
        .iter()
        .map(|s| {
            (
                s.to_string(),
                s.parse::<ConstructionSpec>().unwrap().build().unwrap(),
            )
        })
        .collect()
}

fn subsets(n: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    if n < len {
        return vec![];
    }
    let mut out = subsets(n - 1, len);
    for mut s in subsets(n - 1, len - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Every choice of one block per listed class.
fn block_choices(res: &Resolution, classes: &[usize]) -> Vec<Vec<usize>> {
    classes.iter().fold(vec![vec![]], |acc, &c| {
        acc.into_iter()
            .flat_map(|prefix| {
                res.classes()[c].iter().map(move |&blk| {
                    let mut p = prefix.clone();
                    p.push(blk);
                    p
                })
            })
            .collect()
    })
}

/// μ_i by evaluating every intersection as a set, with no shortcuts.
fn mu_oracle(res: &Resolution, i: usize) -> Option<usize> {
    let mut sizes = BTreeSet::new();
    for classes in subsets(res.r(), i) {
        for blocks in block_choices(res, &classes) {
            let mut common: BTreeSet<usize> =
                res.design().block(blocks[0]).iter().copied().collect();
            for &b in &blocks[1..] {
                let other: BTreeSet<usize> = res.design().block(b).iter().copied().collect();
                common = &common & &other;
            }
            sizes.insert(common.len());
        }
    }
    match sizes.len() {
        1 if !sizes.contains(&0) => sizes.into_iter().next(),
        _ => None,
    }
}

/// Largest `i` the oracle evaluates without exceeding a work budget.
fn oracle_depth(res: &Resolution) -> usize {
    let mut work = 0u64;
    let mut depth = 1;
    for i in 2..=res.r() {
        work += num_integer::binomial(res.r() as u64, i as u64) * (res.b_r() as u64).pow(i as u32);
        if work > 200_000 {
            break;
        }
        depth = i;
    }
    depth
}

#[test]
fn profiles_match_oracle() {
    for (name, res) in catalog() {
        let profile = crd_profile(&res).unwrap();
        for i in 2..=oracle_depth(&res) {
            assert_eq!(profile.mu(i), mu_oracle(&res, i), "{name}, i={i}");
        }
    }
}

#[test]
fn profiles_match_family_predictions() {
    for (name, res) in catalog() {
        let spec: ConstructionSpec = name.parse().unwrap();
        let Some(p) = spec.predicted() else { continue };
        assert_eq!(
            (res.v(), res.b(), res.r(), res.k()),
            (p.v, p.b, p.r, p.k),
            "{name}"
        );
        assert_eq!(mu_oracle(&res, 2), Some(p.mu2), "{name}");
        // three directions of these families are never uniformly independent
        assert_eq!(mu_oracle(&res, 3), None, "{name}");
        assert_eq!(crd_profile(&res).unwrap().crn, Some(2), "{name}");
    }
}

#[test]
fn mu_recursion_on_catalog() {
    for (name, res) in catalog() {
        let profile = crd_profile(&res).unwrap();
        for (&i, &mu) in &profile.mu {
            let prev = if i == 2 {
                res.k()
            } else {
                profile.mu(i - 1).unwrap()
            };
            assert_eq!(prev * res.k(), mu * res.v(), "{name}, i={i}");
        }
    }
}

fn exhaustive_counts(scheme: &SchemeInstance) -> (Vec<u64>, Vec<u64>) {
    let res = scheme.resolution();
    let mut per_subfile = vec![0u64; res.v()];
    let mut per_cache = vec![0u64; res.b()];
    for (u, user) in scheme.users().iter().enumerate() {
        for s in scheme.accessible(u).ones() {
            per_subfile[s] += 1;
        }
        for &c in &user.caches {
            per_cache[c] += 1;
        }
    }
    (per_subfile, per_cache)
}

#[test]
fn counting_closed_forms_on_catalog() {
    for (name, res) in catalog() {
        let profile = crd_profile(&res).unwrap();
        let mut zs = vec![1];
        zs.extend(profile.admissible_z().into_iter().filter(|&z| z > 1));
        for z in zs {
            let scheme = SchemeInstance::with_profile(res.clone(), profile.clone(), z, 1).unwrap();
            let (per_subfile, per_cache) = exhaustive_counts(&scheme);
            let subfile = users_per_subfile(res.r(), z, res.b_r());
            let cache = users_per_cache_subfile(res.r(), z, res.b_r());
            assert!(per_subfile.iter().all(|&c| c == subfile), "{name}, z={z}");
            assert!(per_cache.iter().all(|&c| c == cache), "{name}, z={z}");
        }
    }
}

#[test]
fn counting_closed_form_examples() {
    assert_eq!(users_per_subfile(2, 2, 3), 5);
    assert_eq!(users_per_subfile(4, 2, 2), 18);
    assert_eq!(users_per_cache_subfile(4, 2, 2), 6);
    assert_eq!(users_per_cache_subfile(5, 1, 7), 1);
}

/// Accessible fraction, transmissions per user and schedule shape for one scheme.
fn check_scheme(name: &str, res: &Resolution, profile: &CrdProfile, z: usize) {
    let users = user_count(&DesignParams::of(res), z) as usize;
    let scheme = SchemeInstance::with_profile(res.clone(), profile.clone(), z, users).unwrap();
    assert_eq!(scheme.user_count(), users, "{name}, z={z}");
    let v = res.v();
    let fraction = user_memory_fraction(profile, z, res.k(), v).unwrap();
    let mu = scheme.mu_z();
    let air = mu * (res.b_r() - 1).pow(z as u32);
    for u in 0..users {
        let held = scheme.accessible(u).count_ones(..);
        assert_eq!(
            fraction,
            Rational::new(held as i128, v as i128),
            "{name}, z={z}, user {u}"
        );
        assert_eq!(air + held, v, "{name}, z={z}");
    }
    let demands: Vec<usize> = (1..=users).collect();
    let schedule = build_delivery_schedule(&scheme, &demands).unwrap();
    let params = DesignParams::of(res);
    assert_eq!(
        schedule.transmissions.len() as u64,
        transmission_count(&params, z, profile.mu(z)).unwrap()
    );
    let mut appearances = vec![0usize; users];
    for t in &schedule.transmissions {
        assert_eq!(t.terms.len() as u64, coding_gain(z));
        for term in &t.terms {
            appearances[term.user] += 1;
        }
    }
    assert!(appearances.iter().all(|&a| a == air), "{name}, z={z}");
    assert_eq!(
        build_delivery_schedule(&scheme, &demands).unwrap(),
        schedule
    );
}

#[test]
fn accessible_fraction_and_air_counts_on_catalog() {
    for (name, res) in catalog() {
        let profile = crd_profile(&res).unwrap();
        let mut zs = vec![1];
        zs.extend(profile.admissible_z().into_iter().filter(|&z| z > 1));
        for z in zs {
            check_scheme(&name, &res, &profile, z);
        }
    }
}

#[test]
fn design_json_round_trip_on_catalog() {
    for (name, res) in catalog() {
        let json = serde_json::to_string(&res.to_file()).unwrap();
        let file: DesignFile = serde_json::from_str(&json).unwrap();
        let back = Resolution::from_file(&file).unwrap();
        assert_eq!(back, res, "{name}");
        assert_eq!(
            crd_profile(&back).unwrap(),
            crd_profile(&res).unwrap(),
            "{name}"
        );
    }
}

/// A random resolvable design: `r` independent shuffles of `b_r·k` points,
/// each cut into `b_r` blocks of size `k`.
fn random_resolution() -> impl Strategy<Value = Resolution> {
    (2usize..=4, 2usize..=4, 1usize..=4)
        .prop_flat_map(|(b_r, k, r)| {
            let v = b_r * k;
            let perm = Just((0..v).collect::<Vec<_>>()).prop_shuffle();
            (Just((b_r, k)), prop::collection::vec(perm, r))
        })
        .prop_map(|((b_r, k), perms)| {
            let v = b_r * k;
            let mut blocks = Vec::new();
            let mut classes = Vec::new();
            for perm in perms {
                let mut class = Vec::new();
                for chunk in perm.chunks(k) {
                    class.push(blocks.len());
                    blocks.push(chunk.to_vec());
                }
                classes.push(class);
            }
            let design = Design::from_zero_based(v, blocks).unwrap();
            Resolution::from_zero_based(design, classes).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_profiles_match_oracle(res in random_resolution()) {
        let profile = crd_profile(&res).unwrap();
        for i in 2..=res.r() {
            prop_assert_eq!(profile.mu(i), mu_oracle(&res, i));
        }
        for (&i, &mu) in &profile.mu {
            let prev = if i == 2 { res.k() } else { profile.mu(i - 1).unwrap() };
            prop_assert_eq!(prev * res.k(), mu * res.v());
        }
    }

    #[test]
    fn random_schemes_are_consistent(res in random_resolution()) {
        let profile = crd_profile(&res).unwrap();
        check_scheme("random", &res, &profile, 1);
        for z in profile.admissible_z().into_iter().filter(|&z| z > 1) {
            check_scheme("random", &res, &profile, z);
        }
    }

    #[test]
    fn random_designs_simulate(res in random_resolution(), seed in any::<u64>(), len in 0usize..40) {
        let profile = crd_profile(&res).unwrap();
        if let Some(&z) = profile.admissible_z().last() {
            let users = user_count(&DesignParams::of(&res), z) as usize;
            let report = verify_all(&res, z, users, len, seed, None).unwrap();
            prop_assert!(report.all_recovered());
        }
    }

    #[test]
    fn random_json_round_trip(res in random_resolution()) {
        let json = serde_json::to_string(&res.to_file()).unwrap();
        let back = Resolution::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, res);
    }

    #[test]
    fn subpacketization_identity_round_trips(k in 1u64..20, b_r in 1u64..8, r in 1u64..7, z in 1u32..5) {
        prop_assume!(u64::from(z) <= r);
        let users = num_integer::binomial(r, u64::from(z)) * b_r.pow(z);
        prop_assert_eq!(subpacketization_identity(k, users, r, z).unwrap(), k * b_r);
    }
}
