#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spndiff/cipher_model.hpp"
#include "spndiff/diff_exhaustive.hpp"
#include "spndiff/sbox_analysis.hpp"
#include "spndiff/trail_search.hpp"

namespace spndiff {

std::string tool_version();

// Published reference values for the SEPAR Enc-block (b16 chain).

struct PublishedMax {
  unsigned rounds;
  std::uint32_t max_count;
};
/// Maximum D(a, b) per number of chained b16 rounds. The published row for
/// zero rounds (16370) measures more than an empty b16 chain and has no
/// counterpart here.
inline constexpr std::array<PublishedMax, 4> kPublishedMaxCounts{{{1, 1016}, {2, 84}, {3, 22}, {4, 22}}};

struct PublishedPair {
  Word input_diff;
  Word output_diff;
};
/// High-probability characteristics published for four chained b16 rounds.
inline constexpr std::array<PublishedPair, 7> kPublishedCharacteristics{{
    {0x0424, 0x2A5A},
    {0x0494, 0x2A5A},
    {0x0704, 0x5D93},
    {0x0B24, 0x2A5A},
    {0x0B94, 0x2A5A},
    {0x0E04, 0x5D93},
    {0xCC80, 0x61E6},
}};

struct Table2Row {
  unsigned rounds = 0;
  std::uint32_t max_count = 0;
  std::optional<std::uint32_t> published;
};

/// scan_max at 1..max_rounds rounds, ascending.
std::vector<Table2Row> emit_table2(const CipherDescription& desc, const KeyAssignment& key, unsigned max_rounds,
                                   unsigned jobs = 0);

struct Table2Verdict {
  bool non_increasing = true;
  /// First round count whose maximum equals the previous round's.
  std::optional<unsigned> saturated_at;
  /// Every row with a published value equals it.
  bool matches_published = false;
  std::size_t compared_rows = 0;
};

Table2Verdict judge_table2(const std::vector<Table2Row>& rows);

struct Table3Entry {
  Word input_diff = 0;
  Word output_diff = 0;
  std::uint32_t diff_count = 0;      // from the codebook scan path
  std::uint32_t verified_count = 0;  // from direct encryption
  bool agree() const { return diff_count == verified_count; }
};

struct TheoremSummary {
  std::vector<std::pair<int, TheoremCases>> cases;  // i -> cases
  std::optional<unsigned> measured_min_active;      // 4-round unit
  Rational published_cipher_bound;                  // 10 per unit, 8 units, 2^-2
  std::optional<Rational> measured_cipher_bound;    // measured minimum, 8 units
};

struct ReportOptions {
  unsigned max_rounds = 4;
  unsigned jobs = 0;
  std::size_t top_limit = 64;  // cap on listed measured characteristics
  bool trails = true;
};

struct ReportBundle {
  std::string tool_version;
  std::string description_name;
  unsigned description_rounds = 0;
  std::vector<UniformityRow> table1;
  std::vector<Table2Row> table2;
  Table2Verdict table2_verdict;
  std::uint32_t table3_max_count = 0;
  std::vector<Characteristic> table3_measured;
  std::size_t table3_measured_total = 0;
  std::vector<Table3Entry> table3_published;
  std::vector<BoundReport> bounds;  // empty when the template has no single Sub layer
  std::string bounds_note;
  TheoremSummary theorem;
};

ReportBundle build_report(const CipherDescription& desc, const ReportOptions& opts = {});

std::string report_json(const ReportBundle& bundle);
std::string report_text(const ReportBundle& bundle);
std::string report_csv(const ReportBundle& bundle);

}  // namespace spndiff
