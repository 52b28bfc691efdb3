#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spndiff/cipher_model.hpp"
#include "spndiff/probability.hpp"
#include "spndiff/sbox_analysis.hpp"

namespace spndiff {

/// A concrete differential trail. round_diffs[0] is the input difference,
/// round_diffs[r] the difference after round r.
struct Trail {
  std::vector<Word> round_diffs;
  /// Per round, per nibble (nibble 0 first): DDT(in, out) / 16, 1 if inactive.
  std::vector<std::array<Dyadic, 4>> sbox_probs;
  unsigned active_count = 0;
  Dyadic probability;

  unsigned rounds() const { return static_cast<unsigned>(round_diffs.size()) - 1; }
  bool operator==(const Trail&) const = default;
};

struct BoundReport {
  unsigned rounds = 0;
  unsigned min_active = 0;
  Dyadic best_trail_prob;
  std::optional<unsigned> theorem_lower_bound;
};

enum class Objective { kMinActive, kBestProb };

/// Exact trail search over concrete 16-bit differences for descriptions whose
/// round template holds exactly one Sub layer. Linear layers move differences
/// deterministically; only S-boxes branch.
///
/// Results for r rounds are computed from 1 round upward and cached, since
/// each r-round search prunes with the optima of all shorter lengths.
class TrailSearch {
 public:
  explicit TrailSearch(const CipherDescription& desc);
  ~TrailSearch();
  TrailSearch(TrailSearch&&) noexcept;
  TrailSearch& operator=(TrailSearch&&) noexcept;

  unsigned min_active(unsigned rounds);
  Dyadic best_probability(unsigned rounds);

  /// Highest-probability trail; ties go to the lexicographically smallest
  /// difference sequence.
  Trail best_trail(unsigned rounds);
  /// Lexicographically smallest trail with min_active(rounds) active S-boxes.
  Trail min_active_trail(unsigned rounds);
  /// All optimal trails in lexicographic order, at most `limit` of them.
  std::vector<Trail> optimal_trails(unsigned rounds, Objective objective, std::size_t limit);

  /// Rebuilds a trail from its differences, checking every transition.
  /// Throws PreconditionError if some S-box transition has DDT count 0.
  Trail make_trail(std::span<const Word> round_diffs) const;

  /// Largest S-box transition probability over the Sub layer's S-boxes.
  Dyadic max_sbox_prob() const;
  /// DDT driving nibble n (0 = most significant).
  const Ddt& nibble_ddt(unsigned n) const;

 private:
  struct Engine;
  std::unique_ptr<Engine> engine_;
};

unsigned min_active_sboxes(const CipherDescription& desc, unsigned rounds);
Trail best_trail(const CipherDescription& desc, unsigned rounds);

/// min-active and best-probability summary; the theorem bound is filled in
/// for 4-round units.
BoundReport bound_report(TrailSearch& search, unsigned rounds);

/// Per-round active S-box splits (first, middle, middle, last) for a
/// 4-round unit whose two middle rounds hold i active S-boxes together.
struct TheoremCases {
  std::vector<std::array<unsigned, 4>> decompositions;
  unsigned total = 0;
};

/// Valid for 3 <= i <= 5; throws PreconditionError otherwise.
TheoremCases theorem_lower_bound(int i);

/// max_sbox_prob^(min_active_per_unit * units). Arguments must be positive
/// and max_sbox_prob <= 1.
Rational cipher_bound(unsigned min_active_per_unit, unsigned units, const Rational& max_sbox_prob);

}  // namespace spndiff
