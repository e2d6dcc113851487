// Copyright 2026 The psitomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Counter-based seed derivation.
//!
//! Every random quantity is drawn from a ChaCha stream whose seed is a pure
//! function of a root seed and a path of integer labels, so trials can run in
//! any order (or concurrently) and still see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `parent` and a label.
#[inline]
pub fn derive(parent: u64, label: u64) -> u64 {
    mix64(mix64(parent) ^ label.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Stream labels.
pub const STREAM_STATE: u64 = 1;
pub const STREAM_TRIAL: u64 = 2;
pub const STREAM_JITTER: u64 = 3;
pub const STREAM_SHOT: u64 = 4;
pub const STREAM_FIELD: u64 = 5;
pub const STREAM_POPULATIONS: u64 = 6;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_separates_labels_and_parents() {
        assert_ne!(derive(7, 0), derive(7, 1));
        assert_ne!(derive(7, 0), derive(8, 0));
        assert_eq!(derive(7, 3), derive(7, 3));
    }
}
