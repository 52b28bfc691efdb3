#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spndiff/cipher_model.hpp"

namespace spndiff {

/// splitmix64, the fixed PRNG behind keyed verification.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// `count` key assignments of `slots` words each; one 64-bit draw per word,
/// low 16 bits kept, keys drawn in order.
std::vector<KeyAssignment> draw_keys(std::size_t slots, std::size_t count, std::uint64_t seed);

enum class VerifyMode { kExhaustiveFixedKey, kKeyedAverage };

struct VerificationResult {
  Word input_diff = 0;
  Word output_diff = 0;
  VerifyMode mode = VerifyMode::kExhaustiveFixedKey;
  std::uint32_t count = 0;  // exhaustive mode
  double mean = 0.0;        // keyed mode: mean count over keys
  double stderr_ = 0.0;     // keyed mode: standard error of the mean
  std::vector<std::uint32_t> per_key_counts;  // keyed mode, in key order
  std::uint32_t keys_tested = 0;
  std::uint64_t seed = 0;
};

/// Counts pairs (x, x ^ a) with E(x) ^ E(x ^ a) = b by direct encryption.
/// a = 0 is rejected with PreconditionError.
VerificationResult verify_exhaustive(const CipherDescription& desc, const KeyAssignment& key, Word a, Word b);

/// verify_exhaustive averaged over `keys` splitmix64-drawn keys.
VerificationResult verify_keyed(const CipherDescription& desc, Word a, Word b, std::uint32_t keys, std::uint64_t seed,
                                unsigned jobs = 0);

/// Accepts "0x0424", "0424", or the nibble-group form "0000, 0100, 0010, 0100".
/// Throws std::invalid_argument on anything else.
Word parse_difference(std::string_view text);
/// Nibble-group form, e.g. 0x0424 -> "0000, 0100, 0010, 0100".
std::string format_nibbles(Word w);
/// "0x0424"
std::string hex16(Word w);

}  // namespace spndiff
