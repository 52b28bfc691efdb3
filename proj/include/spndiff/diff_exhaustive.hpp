#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spndiff/cipher_model.hpp"
#include "spndiff/probability.hpp"

namespace spndiff {

/// A block-level differential (a -> b) with its exact pair count.
struct Characteristic {
  Word input_diff = 0;
  Word output_diff = 0;
  std::uint32_t count = 0;

  /// count / 65536
  Rational probability() const { return Rational(count, kDomainSize); }
  bool operator==(const Characteristic&) const = default;
};

/// Result of an exhaustive scan over every input difference a != 0.
struct DiffDistribution {
  std::uint32_t max_count = 0;
  /// Every (a, b) with count == max_count, sorted by (a, b).
  std::vector<Characteristic> argmax;
  /// Every (a, b) with count >= the requested floor, sorted by (a, b).
  std::optional<std::vector<Characteristic>> full_table;
};

struct ScanOptions {
  std::optional<unsigned> rounds;           // replaces desc.rounds() when set
  unsigned jobs = 0;                        // 0: resolve_jobs() default
  std::optional<std::uint32_t> table_floor; // enables full_table export
};

/// Default floor for the sparse table export (probability 2^-13).
inline constexpr std::uint32_t kDefaultTableFloor = 8;

/// #{x : E(x ^ a) ^ E(x) = b} by enumeration of all 2^16 inputs.
std::uint32_t diff_count(const CipherDescription& desc, const KeyAssignment& key, Word a, Word b);

/// D(a, b) for every b, indexed by b.
std::vector<std::uint32_t> diff_histogram(const CipherDescription& desc, const KeyAssignment& key, Word a);

/// Exhaustive maximum of D(a, b) over a != 0. Output is independent of the
/// worker count.
DiffDistribution scan_max(const CipherDescription& desc, const KeyAssignment& key, const ScanOptions& opts = {});

/// All (a, b), a != 0, with count >= threshold (default: the scan maximum),
/// sorted by (a, b).
std::vector<Characteristic> top_characteristics(const CipherDescription& desc, const KeyAssignment& key,
                                                std::optional<std::uint32_t> threshold = std::nullopt,
                                                const ScanOptions& opts = {});

/// Core scan over a precomputed codebook (entry x = E(x)). Entries with
/// count >= collect_floor are gathered into full_table when the floor is set.
DiffDistribution scan_codebook(std::span<const Word> codebook, std::optional<std::uint32_t> collect_floor,
                               unsigned jobs);

}  // namespace spndiff
