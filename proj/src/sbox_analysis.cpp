#include "spndiff/sbox_analysis.hpp"

#include <algorithm>

namespace spndiff {

unsigned Ddt::uniformity() const {
  unsigned best = 0;
  for (unsigned a = 1; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) best = std::max<unsigned>(best, counts[a][b]);
  }
  return best;
}

unsigned Ddt::max_entries() const {
  const unsigned u = uniformity();
  unsigned n = 0;
  for (unsigned a = 1; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) n += counts[a][b] == u;
  }
  return n;
}

Ddt compute_ddt(const SBox4& s) {
  Ddt ddt;
  ddt.sbox_id = s.id;
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned x = 0; x < 16; ++x) ++ddt.counts[a][s(x ^ a) ^ s(x)];
  }
  return ddt;
}

Rational max_diff_prob(const Ddt& ddt) { return Rational(ddt.uniformity(), 16); }

std::vector<UniformityRow> diff_uniformity_report(std::span<const SBox4> sboxes) {
  if (sboxes.empty()) throw PreconditionError("uniformity report needs at least one sbox");
  std::vector<UniformityRow> rows;
  for (const auto& s : sboxes) {
    const Ddt ddt = compute_ddt(s);
    std::array<bool, 16> seen{};
    bool bijective = true;
    for (auto v : s.table) {
      bijective = bijective && !seen[v];
      seen[v] = true;
    }
    rows.push_back({s.id, ddt.uniformity(), ddt.max_entries(), bijective});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  return rows;
}

}  // namespace spndiff
