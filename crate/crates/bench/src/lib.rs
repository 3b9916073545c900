//! Shared fixtures for the benchmarks.

use logdrw::random::{self, Bounds};
use logdrw::{DrwElement, LocalModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn model(s: &str) -> LocalModel {
    s.parse().expect("valid model descriptor")
}

/// `count` seeded random elements of `W_m Lambda`.
pub fn elements(model: &LocalModel, m: u32, count: usize, seed: u64) -> Vec<DrwElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random::element(model, m, &mut rng, &Bounds::default()).expect("random element"))
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_are_seeded() {
        let m = super::model("poly:p=2,n=2,e=1,f=1");
        assert_eq!(super::elements(&m, 2, 4, 1), super::elements(&m, 2, 4, 1));
    }
}
