use std::collections::BTreeMap;

use mrhinf::search::enumerate_classes;
use mrhinf::DecimationPattern;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn totient(n: usize) -> usize {
    (1..=n).filter(|&k| gcd(n, k) == 1).count()
}

/// Burnside count of binary necklaces with `n` ones among `m` beads.
fn necklaces(m: usize, n: usize) -> u128 {
    let g = gcd(m, n);
    let sum: u128 = (1..=g).filter(|&d| g.is_multiple_of(d)).map(|d| totient(d) as u128 * binomial(m / d, n / d)).sum();
    sum / m as u128
}

#[test]
fn class_counts_match_burnside() {
    for m in 1..=16 {
        for n in 1..=m {
            let classes = enumerate_classes(m, n).unwrap();
            assert_eq!(classes.len() as u128, necklaces(m, n), "M = {m}, N = {n}");
        }
    }
}

#[test]
fn classes_partition_all_patterns() {
    for m in 1..=12 {
        let mut orbit_sizes: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        for mask in 1u32..(1 << m) {
            let bits: Vec<u8> = (0..m).map(|i| ((mask >> (m - 1 - i)) & 1) as u8).collect();
            let p = DecimationPattern::from_bits(&bits).unwrap();
            *orbit_sizes.entry(p.canonical().bits().to_vec()).or_default() += 1;
        }
        for n in 1..=m {
            let classes = enumerate_classes(m, n).unwrap();
            let mut covered = 0u128;
            for c in &classes {
                assert_eq!(c, &c.canonical());
                assert_eq!(c.retained(), n);
                let size = orbit_sizes[c.bits()];
                assert_eq!(size, c.rotations().len());
                covered += size as u128;
            }
            assert_eq!(covered, binomial(m, n), "M = {m}, N = {n}");
        }
    }
}

#[test]
fn classes_are_sorted_and_distinct() {
    let classes = enumerate_classes(9, 4).unwrap();
    assert!(classes.windows(2).all(|w| w[0].bits() < w[1].bits()));
}
