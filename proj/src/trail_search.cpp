#include "spndiff/trail_search.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>

namespace spndiff {

namespace {

constexpr unsigned nibble_shift(unsigned n) { return 12 - 4 * n; }
constexpr unsigned nibble_of(Word w, unsigned n) { return (w >> nibble_shift(n)) & 0xF; }

struct Candidate {
  std::uint8_t out;
  std::uint8_t count;
};

}  // namespace

struct TrailSearch::Engine {
  std::array<Ddt, 4> ddts;
  // candidates[n][in]: nonzero outputs of nibble n's S-box for input
  // difference `in`, by decreasing count then increasing output.
  std::array<std::array<std::vector<Candidate>, 16>, 4> candidates;
  std::array<Dyadic, 17> count_prob;  // count / 16
  std::vector<Word> pre;              // linear layers before Sub, on differences
  std::vector<Word> post;             // linear layers after Sub
  std::vector<Word> post_inv;

  std::vector<unsigned> min_active;  // [r] for r >= 1; [0] = 0
  std::vector<Dyadic> best_prob;     // [r]; [0] = 1

  explicit Engine(const CipherDescription& desc) {
    const auto& layers = desc.round_template();
    std::size_t sub_index = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (!is_sub(layers[i])) continue;
      if (sub_index != layers.size()) {
        throw PreconditionError("trail search needs exactly one sub layer per round, " + desc.name() + " has more");
      }
      sub_index = i;
    }
    if (sub_index == layers.size()) {
      throw PreconditionError("trail search needs a sub layer, " + desc.name() + " has none");
    }
    const auto& sub = std::get<SubLayer>(layers[sub_index]);
    for (unsigned n = 0; n < 4; ++n) {
      ddts[n] = compute_ddt(desc.sbox(sub.ids[n]));
      for (unsigned in = 0; in < 16; ++in) {
        auto& c = candidates[n][in];
        for (unsigned out = 0; out < 16; ++out) {
          if (ddts[n].at(in, out) > 0) c.push_back({static_cast<std::uint8_t>(out), ddts[n].at(in, out)});
        }
        std::stable_sort(c.begin(), c.end(), [](const Candidate& l, const Candidate& r) { return l.count > r.count; });
      }
    }
    for (unsigned c = 0; c <= 16; ++c) count_prob[c] = Dyadic::ratio(c, 4);
    pre.resize(kDomainSize);
    post.resize(kDomainSize);
    post_inv.resize(kDomainSize);
    for (std::uint32_t d = 0; d < kDomainSize; ++d) {
      pre[d] = propagate_linear(desc, 0, sub_index, static_cast<Word>(d));
      post[d] = propagate_linear(desc, sub_index + 1, layers.size(), static_cast<Word>(d));
    }
    for (std::uint32_t d = 0; d < kDomainSize; ++d) post_inv[post[d]] = static_cast<Word>(d);
    min_active.push_back(0);
    best_prob.push_back(Dyadic::one());
  }

  static unsigned active_nibbles(Word s, std::array<unsigned, 4>& act) {
    unsigned k = 0;
    for (unsigned n = 0; n < 4; ++n) {
      if (nibble_of(s, n) != 0) act[k++] = n;
    }
    return k;
  }

  Dyadic row_max(unsigned n, unsigned in) const { return count_prob[candidates[n][in].front().count]; }

  // suffix[j] = product of row maxima of active nibbles j.. of s.
  void suffix_max(Word s, const std::array<unsigned, 4>& act, unsigned k, std::array<Dyadic, 5>& suffix) const {
    suffix[k] = Dyadic::one();
    for (unsigned j = k; j-- > 0;) suffix[j] = suffix[j + 1] * row_max(act[j], nibble_of(s, act[j]));
  }

  // Calls fn(next_diff, transition_prob) for every S-box output reachable
  // from S-box input s whose probability p satisfies keep(p), with nibble-
  // level pruning against the row maxima. keep must be monotone.
  template <typename Keep, typename Fn>
  void for_each_transition(Word s, Keep&& keep, Fn&& fn) const {
    std::array<unsigned, 4> act{};
    const unsigned k = active_nibbles(s, act);
    std::array<Dyadic, 5> suffix;
    suffix_max(s, act, k, suffix);
    auto rec = [&](auto&& self, unsigned j, Word t, const Dyadic& p) -> void {
      if (j == k) {
        fn(post[t], p);
        return;
      }
      const unsigned n = act[j];
      for (const auto& c : candidates[n][nibble_of(s, n)]) {
        const Dyadic q = p * count_prob[c.count];
        if (!keep(q * suffix[j + 1])) break;
        self(self, j + 1, static_cast<Word>(t | (c.out << nibble_shift(n))), q);
      }
    };
    rec(rec, 0, 0, Dyadic::one());
  }

  // Every S-box output reachable from s, ignoring probabilities.
  template <typename Fn>
  void for_each_output(Word s, Fn&& fn) const {
    std::array<unsigned, 4> act{};
    const unsigned k = active_nibbles(s, act);
    auto rec = [&](auto&& self, unsigned j, Word t) -> void {
      if (j == k) {
        fn(post[t]);
        return;
      }
      const unsigned n = act[j];
      for (const auto& c : candidates[n][nibble_of(s, n)]) {
        self(self, j + 1, static_cast<Word>(t | (c.out << nibble_shift(n))));
      }
    };
    rec(rec, 0, 0);
  }

  static unsigned active_count(Word s) {
    unsigned k = 0;
    for (unsigned n = 0; n < 4; ++n) k += nibble_of(s, n) != 0;
    return k;
  }

  // --- minimum active S-boxes -------------------------------------------------

  unsigned search_min_active(unsigned rounds) const {
    unsigned incumbent = std::numeric_limits<unsigned>::max();
    // seen[i][d]: smallest prefix weight with which round i was entered at d
    std::vector<std::vector<unsigned>> seen(rounds, std::vector<unsigned>(kDomainSize, incumbent));
    auto rec = [&](auto&& self, unsigned i, Word d, unsigned w) -> void {
      const Word s = pre[d];
      const unsigned here = w + active_count(s);
      if (here + min_active[rounds - i - 1] >= incumbent) return;
      if (seen[i][d] <= w) return;
      seen[i][d] = w;
      if (i + 1 == rounds) {
        incumbent = here;
        return;
      }
      for_each_output(s, [&](Word next) { self(self, i + 1, next, here); });
    };
    for (std::uint32_t d = 1; d < kDomainSize; ++d) rec(rec, 0, static_cast<Word>(d), 0);
    return incumbent;
  }

  // Lexicographic enumeration of trails with exactly `target` active
  // S-boxes; stops after `limit` trails.
  std::vector<std::vector<Word>> lex_min_active(unsigned rounds, unsigned target, std::size_t limit) const {
    std::vector<std::vector<Word>> found;
    std::vector<Word> path(rounds + 1);
    // failed[i][d]: smallest prefix weight known to admit no completion;
    // every larger prefix weight fails as well
    std::vector<std::vector<unsigned>> failed(rounds,
                                              std::vector<unsigned>(kDomainSize, std::numeric_limits<unsigned>::max()));
    auto rec = [&](auto&& self, unsigned i, Word d, unsigned w) -> std::size_t {
      const Word s = pre[d];
      const unsigned here = w + active_count(s);
      if (here + min_active[rounds - i - 1] > target) return 0;
      if (w >= failed[i][d]) return 0;
      std::size_t hits = 0;
      if (i + 1 == rounds) {
        if (here == target) {
          // any reachable output completes the trail
          std::vector<Word> nexts;
          for_each_output(s, [&](Word next) { nexts.push_back(next); });
          std::sort(nexts.begin(), nexts.end());
          for (Word next : nexts) {
            if (found.size() >= limit) break;
            path[i + 1] = next;
            found.push_back(path);
            ++hits;
          }
        }
      } else {
        std::vector<Word> nexts;
        for_each_output(s, [&](Word next) { nexts.push_back(next); });
        std::sort(nexts.begin(), nexts.end());
        for (Word next : nexts) {
          if (found.size() >= limit) break;
          path[i + 1] = next;
          hits += self(self, i + 1, next, here);
        }
      }
      if (hits == 0) failed[i][d] = std::min(failed[i][d], w);
      return hits;
    };
    for (std::uint32_t d = 1; d < kDomainSize && found.size() < limit; ++d) {
      path[0] = static_cast<Word>(d);
      rec(rec, 0, static_cast<Word>(d), 0);
    }
    return found;
  }

  // --- best probability ---------------------------------------------------------

  Dyadic search_best_prob(unsigned rounds) const {
    Dyadic incumbent;
    // seen[i][d]: largest prefix probability with which round i was entered at d
    std::vector<std::vector<Dyadic>> seen(rounds, std::vector<Dyadic>(kDomainSize));
    auto rec = [&](auto&& self, unsigned i, Word d, const Dyadic& p) -> void {
      if (i == rounds) {
        if (p > incumbent) incumbent = p;
        return;
      }
      if (i > 0) {
        if (seen[i][d] >= p) return;
        seen[i][d] = p;
      }
      const Dyadic& rest = best_prob[rounds - i - 1];
      for_each_transition(
          pre[d], [&](const Dyadic& q) { return p * q * rest > incumbent; },
          [&](Word next, const Dyadic& q) { self(self, i + 1, next, p * q); });
    };
    for (std::uint32_t d = 1; d < kDomainSize; ++d) rec(rec, 0, static_cast<Word>(d), Dyadic::one());
    return incumbent;
  }

  std::vector<std::vector<Word>> lex_best_prob(unsigned rounds, const Dyadic& target, std::size_t limit) const {
    std::vector<std::vector<Word>> found;
    std::vector<Word> path(rounds + 1);
    // failed[i][d]: largest prefix probability known to admit no optimal completion
    std::vector<std::vector<Dyadic>> failed(rounds, std::vector<Dyadic>(kDomainSize));
    auto rec = [&](auto&& self, unsigned i, Word d, const Dyadic& p) -> std::size_t {
      if (i == rounds) {
        if (p != target) return 0;
        found.push_back(path);
        return 1;
      }
      if (!failed[i][d].is_zero() && failed[i][d] >= p) return 0;
      const Dyadic& rest = best_prob[rounds - i - 1];
      std::vector<std::pair<Word, Dyadic>> nexts;
      for_each_transition(
          pre[d], [&](const Dyadic& q) { return p * q * rest >= target; },
          [&](Word next, const Dyadic& q) { nexts.emplace_back(next, q); });
      std::sort(nexts.begin(), nexts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
      std::size_t hits = 0;
      for (const auto& [next, q] : nexts) {
        if (found.size() >= limit) break;
        path[i + 1] = next;
        hits += self(self, i + 1, next, p * q);
      }
      if (hits == 0 && failed[i][d] < p) failed[i][d] = p;
      return hits;
    };
    for (std::uint32_t d = 1; d < kDomainSize && found.size() < limit; ++d) {
      path[0] = static_cast<Word>(d);
      rec(rec, 0, static_cast<Word>(d), Dyadic::one());
    }
    return found;
  }
};

TrailSearch::TrailSearch(const CipherDescription& desc) : engine_(std::make_unique<Engine>(desc)) {}
TrailSearch::~TrailSearch() = default;
TrailSearch::TrailSearch(TrailSearch&&) noexcept = default;
TrailSearch& TrailSearch::operator=(TrailSearch&&) noexcept = default;

namespace {
void check_rounds(unsigned rounds) {
  if (rounds < 1) throw PreconditionError("trail search needs rounds >= 1");
}
}  // namespace

unsigned TrailSearch::min_active(unsigned rounds) {
  check_rounds(rounds);
  while (engine_->min_active.size() <= rounds) {
    engine_->min_active.push_back(engine_->search_min_active(static_cast<unsigned>(engine_->min_active.size())));
  }
  return engine_->min_active[rounds];
}

Dyadic TrailSearch::best_probability(unsigned rounds) {
  check_rounds(rounds);
  while (engine_->best_prob.size() <= rounds) {
    engine_->best_prob.push_back(engine_->search_best_prob(static_cast<unsigned>(engine_->best_prob.size())));
  }
  return engine_->best_prob[rounds];
}

Trail TrailSearch::best_trail(unsigned rounds) {
  const Dyadic target = best_probability(rounds);
  const auto found = engine_->lex_best_prob(rounds, target, 1);
  return make_trail(found.front());
}

Trail TrailSearch::min_active_trail(unsigned rounds) {
  const unsigned target = min_active(rounds);
  const auto found = engine_->lex_min_active(rounds, target, 1);
  return make_trail(found.front());
}

std::vector<Trail> TrailSearch::optimal_trails(unsigned rounds, Objective objective, std::size_t limit) {
  std::vector<std::vector<Word>> found;
  if (objective == Objective::kBestProb) {
    found = engine_->lex_best_prob(rounds, best_probability(rounds), limit);
  } else {
    found = engine_->lex_min_active(rounds, min_active(rounds), limit);
  }
  std::vector<Trail> out;
  for (const auto& f : found) out.push_back(make_trail(f));
  return out;
}

Trail TrailSearch::make_trail(std::span<const Word> round_diffs) const {
  if (round_diffs.size() < 2) throw PreconditionError("a trail needs at least one round");
  if (round_diffs[0] == 0) throw PreconditionError("a trail needs a nonzero input difference");
  Trail t;
  t.round_diffs.assign(round_diffs.begin(), round_diffs.end());
  t.probability = Dyadic::one();
  for (std::size_t r = 0; r + 1 < round_diffs.size(); ++r) {
    const Word s = engine_->pre[round_diffs[r]];
    const Word out = engine_->post_inv[round_diffs[r + 1]];
    std::array<Dyadic, 4> probs;
    for (unsigned n = 0; n < 4; ++n) {
      const unsigned in_n = nibble_of(s, n);
      const unsigned out_n = nibble_of(out, n);
      const unsigned count = engine_->ddts[n].at(in_n, out_n);
      if (count == 0) {
        throw PreconditionError("round " + std::to_string(r + 1) + " nibble " + std::to_string(n) +
                                ": impossible S-box transition");
      }
      probs[n] = engine_->count_prob[count];
      t.active_count += in_n != 0;
      t.probability *= probs[n];
    }
    t.sbox_probs.push_back(probs);
  }
  return t;
}

Dyadic TrailSearch::max_sbox_prob() const {
  unsigned best = 0;
  for (const auto& d : engine_->ddts) best = std::max(best, d.uniformity());
  return Dyadic::ratio(best, 4);
}

const Ddt& TrailSearch::nibble_ddt(unsigned n) const { return engine_->ddts.at(n); }

unsigned min_active_sboxes(const CipherDescription& desc, unsigned rounds) {
  check_rounds(rounds);
  return TrailSearch(desc).min_active(rounds);
}

Trail best_trail(const CipherDescription& desc, unsigned rounds) {
  check_rounds(rounds);
  return TrailSearch(desc).best_trail(rounds);
}

BoundReport bound_report(TrailSearch& search, unsigned rounds) {
  BoundReport r;
  r.rounds = rounds;
  r.min_active = search.min_active(rounds);
  r.best_trail_prob = search.best_probability(rounds);
  if (rounds % 4 == 0) r.theorem_lower_bound = (rounds / 4) * theorem_lower_bound(3).total;
  return r;
}

TheoremCases theorem_lower_bound(int i) {
  if (i < 3 || i > 5) throw PreconditionError("theorem case i must lie in 3..5, got " + std::to_string(i));
  TheoremCases c;
  const unsigned first = 3, last = 4;
  // middle-round splits (a, i - a), listed balanced first
  std::vector<std::pair<unsigned, unsigned>> middles;
  switch (i) {
    case 3: middles = {{2, 1}, {1, 2}}; break;
    case 4: middles = {{2, 2}, {1, 3}, {3, 1}}; break;
    default: middles = {{2, 3}, {3, 2}, {1, 4}, {4, 1}}; break;
  }
  for (const auto& [a, b] : middles) c.decompositions.push_back({first, a, b, last});
  c.total = first + static_cast<unsigned>(i) + last;
  return c;
}

Rational cipher_bound(unsigned min_active_per_unit, unsigned units, const Rational& max_sbox_prob) {
  if (min_active_per_unit == 0 || units == 0) throw PreconditionError("cipher_bound arguments must be positive");
  if (max_sbox_prob <= 0 || max_sbox_prob > 1) throw PreconditionError("max S-box probability must lie in (0, 1]");
  const unsigned exponent = min_active_per_unit * units;
  const BigInt num = boost::multiprecision::pow(boost::multiprecision::numerator(max_sbox_prob), exponent);
  const BigInt den = boost::multiprecision::pow(boost::multiprecision::denominator(max_sbox_prob), exponent);
  return Rational(num, den);
}

}  // namespace spndiff
