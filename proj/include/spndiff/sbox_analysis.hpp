#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spndiff/cipher_model.hpp"
#include "spndiff/probability.hpp"

namespace spndiff {

/// Difference distribution table of a 4-bit S-box:
/// counts[a][b] = #{x : S(x ^ a) ^ S(x) = b}.
struct Ddt {
  std::string sbox_id;
  std::array<std::array<std::uint8_t, 16>, 16> counts{};

  /// Largest entry over a != 0.
  unsigned uniformity() const;
  /// Number of entries with a != 0 equal to uniformity().
  unsigned max_entries() const;
  std::uint8_t at(unsigned a, unsigned b) const { return counts[a & 0xF][b & 0xF]; }
};

Ddt compute_ddt(const SBox4& s);

/// max_{a != 0, b} counts[a][b] / 16, exact.
Rational max_diff_prob(const Ddt& ddt);

struct UniformityRow {
  std::string id;
  unsigned uniformity = 0;
  unsigned max_entries = 0;
  bool bijective = false;
};

/// One row per S-box, sorted by id. Throws PreconditionError on an empty list.
std::vector<UniformityRow> diff_uniformity_report(std::span<const SBox4> sboxes);

}  // namespace spndiff
