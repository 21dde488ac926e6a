use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recorded in run metadata next to every seed.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9): key = seed_from_u64(seed), stream = replica_id";

/// Independent random stream for one replica. Streams with different
/// `replica_id` never overlap, so results do not depend on scheduling.
pub fn replica_rng(seed: u64, replica_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica_id);
    rng
}
