#include "spndiff/reports.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

#include "spndiff/verifier.hpp"

namespace spndiff {

std::string tool_version() { return std::string("spndiff ") + SPNDIFF_VERSION; }

std::vector<Table2Row> emit_table2(const CipherDescription& desc, const KeyAssignment& key, unsigned max_rounds,
                                   unsigned jobs) {
  if (max_rounds < 1) throw PreconditionError("max_rounds must be at least 1");
  std::vector<Table2Row> rows;
  for (unsigned r = 1; r <= max_rounds; ++r) {
    ScanOptions opts;
    opts.rounds = r;
    opts.jobs = jobs;
    Table2Row row{r, scan_max(desc, key, opts).max_count, std::nullopt};
    for (const auto& p : kPublishedMaxCounts) {
      if (p.rounds == r) row.published = p.max_count;
    }
    rows.push_back(row);
  }
  return rows;
}

Table2Verdict judge_table2(const std::vector<Table2Row>& rows) {
  Table2Verdict v;
  bool all_match = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      if (rows[i].max_count > rows[i - 1].max_count) v.non_increasing = false;
      if (!v.saturated_at && rows[i].max_count == rows[i - 1].max_count) v.saturated_at = rows[i].rounds;
    }
    if (rows[i].published) {
      ++v.compared_rows;
      all_match = all_match && *rows[i].published == rows[i].max_count;
    }
  }
  v.matches_published = v.compared_rows > 0 && all_match;
  return v;
}

ReportBundle build_report(const CipherDescription& desc, const ReportOptions& opts) {
  ReportBundle b;
  b.tool_version = tool_version();
  b.description_name = desc.name();
  b.description_rounds = desc.rounds();
  const KeyAssignment key = desc.zero_key();

  const auto used = desc.used_sboxes();
  if (!used.empty()) b.table1 = diff_uniformity_report(used);

  std::map<unsigned, DiffDistribution> scans;
  auto scan_at = [&](unsigned r) -> const DiffDistribution& {
    auto it = scans.find(r);
    if (it == scans.end()) {
      ScanOptions so;
      so.rounds = r;
      so.jobs = opts.jobs;
      it = scans.emplace(r, scan_max(desc, key, so)).first;
    }
    return it->second;
  };

  for (unsigned r = 1; r <= opts.max_rounds; ++r) {
    Table2Row row{r, scan_at(r).max_count, std::nullopt};
    for (const auto& p : kPublishedMaxCounts) {
      if (p.rounds == r) row.published = p.max_count;
    }
    b.table2.push_back(row);
  }
  b.table2_verdict = judge_table2(b.table2);

  const auto& full = scan_at(desc.rounds());
  b.table3_max_count = full.max_count;
  b.table3_measured_total = full.argmax.size();
  const std::size_t shown = std::min(full.argmax.size(), opts.top_limit);
  b.table3_measured.assign(full.argmax.begin(), full.argmax.begin() + static_cast<std::ptrdiff_t>(shown));
  for (const auto& p : kPublishedCharacteristics) {
    Table3Entry e;
    e.input_diff = p.input_diff;
    e.output_diff = p.output_diff;
    e.diff_count = diff_count(desc, key, p.input_diff, p.output_diff);
    e.verified_count = verify_exhaustive(desc, key, p.input_diff, p.output_diff).count;
    b.table3_published.push_back(e);
  }

  for (int i = 3; i <= 5; ++i) b.theorem.cases.emplace_back(i, theorem_lower_bound(i));
  b.theorem.published_cipher_bound = cipher_bound(theorem_lower_bound(3).total, 8, Rational(1, 4));

  if (opts.trails) {
    try {
      TrailSearch search(desc);
      for (unsigned r = 1; r <= opts.max_rounds; ++r) b.bounds.push_back(bound_report(search, r));
      if (opts.max_rounds >= 4) {
        b.theorem.measured_min_active = b.bounds[3].min_active;
        b.theorem.measured_cipher_bound =
            cipher_bound(b.bounds[3].min_active, 8, search.max_sbox_prob().to_rational());
      }
    } catch (const PreconditionError& e) {
      b.bounds_note = e.what();
    }
  } else {
    b.bounds_note = "trail search skipped";
  }
  return b;
}

namespace {

nlohmann::ordered_json characteristic_json(const Characteristic& c) {
  return {{"a_hex", hex16(c.input_diff)}, {"b_hex", hex16(c.output_diff)}, {"count", c.count}};
}

std::string opt_str(const std::optional<unsigned>& v) { return v ? std::to_string(*v) : "-"; }

}  // namespace

std::string report_json(const ReportBundle& b) {
  nlohmann::ordered_json j;
  j["toolVersion"] = b.tool_version;
  j["description"] = b.description_name;
  j["descriptionRounds"] = b.description_rounds;

  auto& t1 = j["table1"] = nlohmann::ordered_json::array();
  for (const auto& r : b.table1) {
    t1.push_back({{"sbox", r.id}, {"uniformity", r.uniformity}, {"maxEntries", r.max_entries},
                  {"bijective", r.bijective}, {"maxDiffProb", to_power_string(Rational(r.uniformity, 16))}});
  }

  auto& t2 = j["table2"];
  t2["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : b.table2) {
    nlohmann::ordered_json row{{"rounds", r.rounds}, {"maxCount", r.max_count}};
    row["published"] = r.published ? nlohmann::ordered_json(*r.published) : nlohmann::ordered_json(nullptr);
    row["verdict"] = !r.published ? "n/a" : (*r.published == r.max_count ? "match" : "mismatch");
    t2["rows"].push_back(row);
  }
  t2["nonIncreasing"] = b.table2_verdict.non_increasing;
  t2["saturatedAt"] = b.table2_verdict.saturated_at ? nlohmann::ordered_json(*b.table2_verdict.saturated_at)
                                                     : nlohmann::ordered_json(nullptr);
  t2["verdict"] = b.table2_verdict.matches_published ? "match" : "mismatch";

  auto& t3 = j["table3"];
  t3["rounds"] = b.description_rounds;
  t3["maxCount"] = b.table3_max_count;
  t3["measuredTotal"] = b.table3_measured_total;
  t3["measured"] = nlohmann::ordered_json::array();
  for (const auto& c : b.table3_measured) t3["measured"].push_back(characteristic_json(c));
  t3["published"] = nlohmann::ordered_json::array();
  for (const auto& e : b.table3_published) {
    t3["published"].push_back({{"a_hex", hex16(e.input_diff)},
                               {"b_hex", hex16(e.output_diff)},
                               {"a_nibbles", format_nibbles(e.input_diff)},
                               {"b_nibbles", format_nibbles(e.output_diff)},
                               {"diffCount", e.diff_count},
                               {"verifiedCount", e.verified_count},
                               {"agree", e.agree()}});
  }

  auto& th = j["theorem"];
  th["bounds"] = nlohmann::ordered_json::array();
  for (const auto& r : b.bounds) {
    nlohmann::ordered_json row{{"rounds", r.rounds},
                               {"minActive", r.min_active},
                               {"bestTrailProb", r.best_trail_prob.str()},
                               {"bestTrailLog2", r.best_trail_prob.log2()}};
    row["theoremLowerBound"] =
        r.theorem_lower_bound ? nlohmann::ordered_json(*r.theorem_lower_bound) : nlohmann::ordered_json(nullptr);
    th["bounds"].push_back(row);
  }
  if (!b.bounds_note.empty()) th["boundsNote"] = b.bounds_note;
  th["cases"] = nlohmann::ordered_json::array();
  for (const auto& [i, c] : b.theorem.cases) {
    th["cases"].push_back({{"i", i}, {"decompositions", c.decompositions}, {"total", c.total}});
  }
  th["publishedCipherBound"] = to_power_string(b.theorem.published_cipher_bound);
  th["measuredMinActive"] = b.theorem.measured_min_active ? nlohmann::ordered_json(*b.theorem.measured_min_active)
                                                           : nlohmann::ordered_json(nullptr);
  th["measuredCipherBound"] = b.theorem.measured_cipher_bound
                                  ? nlohmann::ordered_json(to_power_string(*b.theorem.measured_cipher_bound))
                                  : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string report_text(const ReportBundle& b) {
  std::ostringstream o;
  o << b.tool_version << "\n";
  o << "description: " << b.description_name << " (" << b.description_rounds << " rounds)\n\n";

  o << "S-box differential uniformity\n";
  o << "  sbox  uniformity  #max  bijective  max prob\n";
  for (const auto& r : b.table1) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-5s %10u  %4u  %-9s  %s\n", r.id.c_str(), r.uniformity, r.max_entries,
                  r.bijective ? "yes" : "no", to_power_string(Rational(r.uniformity, 16)).c_str());
    o << line;
  }

  o << "\nMaximum D(a,b), a != 0\n";
  o << "  rounds  maxCount  published  verdict\n";
  for (const auto& r : b.table2) {
    char line[128];
    std::snprintf(line, sizeof line, "  %6u  %8u  %9s  %s\n", r.rounds, r.max_count,
                  r.published ? std::to_string(*r.published).c_str() : "-",
                  !r.published ? "n/a" : (*r.published == r.max_count ? "match" : "mismatch"));
    o << line;
  }
  o << "  non-increasing: " << (b.table2_verdict.non_increasing ? "yes" : "no")
    << ", saturated at: " << opt_str(b.table2_verdict.saturated_at)
    << ", overall: " << (b.table2_verdict.matches_published ? "match" : "mismatch") << "\n";

  o << "\nTop characteristics at " << b.description_rounds << " rounds (count " << b.table3_max_count << ", "
    << b.table3_measured_total << " total)\n";
  for (const auto& c : b.table3_measured) {
    o << "  " << hex16(c.input_diff) << " -> " << hex16(c.output_diff) << "  " << c.count << "\n";
  }
  if (b.table3_measured.size() < b.table3_measured_total) {
    o << "  ... " << (b.table3_measured_total - b.table3_measured.size()) << " more\n";
  }

  o << "\nPublished characteristics at " << b.description_rounds << " rounds\n";
  for (const auto& e : b.table3_published) {
    o << "  " << format_nibbles(e.input_diff) << " -> " << format_nibbles(e.output_diff) << "  count "
      << e.diff_count << " (verified " << e.verified_count << ", " << (e.agree() ? "agree" : "DISAGREE") << ")\n";
  }

  o << "\nActive S-boxes and best trails\n";
  if (!b.bounds_note.empty()) o << "  " << b.bounds_note << "\n";
  for (const auto& r : b.bounds) {
    o << "  rounds " << r.rounds << ": min active " << r.min_active << ", best trail " << r.best_trail_prob.str()
      << " (2^" << r.best_trail_prob.log2() << ")";
    if (r.theorem_lower_bound) o << ", claimed lower bound " << *r.theorem_lower_bound;
    o << "\n";
  }
  for (const auto& [i, c] : b.theorem.cases) {
    o << "  case i=" << i << ":";
    for (const auto& d : c.decompositions) o << " " << d[0] << "+" << d[1] << "+" << d[2] << "+" << d[3];
    o << " -> " << c.total << "\n";
  }
  o << "  8 units at 10 active S-boxes, p=2^-2: " << to_power_string(b.theorem.published_cipher_bound) << "\n";
  if (b.theorem.measured_cipher_bound) {
    o << "  8 units at measured " << *b.theorem.measured_min_active
      << " active S-boxes: " << to_power_string(*b.theorem.measured_cipher_bound) << "\n";
  }
  return o.str();
}

std::string report_csv(const ReportBundle& b) {
  std::ostringstream o;
  o << "rounds,maxCount,published,verdict\n";
  for (const auto& r : b.table2) {
    o << r.rounds << "," << r.max_count << "," << (r.published ? std::to_string(*r.published) : "") << ","
      << (!r.published ? "n/a" : (*r.published == r.max_count ? "match" : "mismatch")) << "\n";
  }
  return o.str();
}

}  // namespace spndiff
