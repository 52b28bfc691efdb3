#include "spndiff/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spndiff/diff_exhaustive.hpp"
#include "spndiff/reports.hpp"
#include "spndiff/sbox_analysis.hpp"
#include "spndiff/trail_search.hpp"
#include "spndiff/verifier.hpp"

namespace spndiff {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string plain_hex(Word w) { return hex16(w).substr(2); }

KeyAssignment parse_key(const std::string& text, const CipherDescription& desc) {
  if (text.empty()) return desc.zero_key();
  KeyAssignment key;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      key.words.push_back(parse_difference(item));
    } catch (const std::invalid_argument&) {
      throw UsageError("bad key word '" + item + "'");
    }
  }
  if (key.words.size() != desc.key_slots()) {
    throw UsageError("--key needs " + std::to_string(desc.key_slots()) + " comma-separated word(s)");
  }
  return key;
}

Word parse_diff_arg(const std::string& text, const char* flag) {
  try {
    return parse_difference(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

// --- ddt ------------------------------------------------------------------------

void print_ddt_text(const Ddt& ddt, std::ostream& out) {
  out << "sbox " << ddt.sbox_id << "\n   ";
  for (unsigned b = 0; b < 16; ++b) {
    char h[8];
    std::snprintf(h, sizeof h, "%3X", b);
    out << h;
  }
  out << "\n";
  for (unsigned a = 0; a < 16; ++a) {
    char h[8];
    std::snprintf(h, sizeof h, "%2X ", a);
    out << h;
    for (unsigned b = 0; b < 16; ++b) {
      char c[8];
      std::snprintf(c, sizeof c, "%3u", static_cast<unsigned>(ddt.at(a, b)));
      out << c;
    }
    out << "\n";
  }
  out << "uniformity " << ddt.uniformity() << " (max diff prob " << to_power_string(max_diff_prob(ddt)) << ")\n";
}

Json ddt_json(const Ddt& ddt) {
  Json counts = Json::array();
  for (const auto& row : ddt.counts) {
    Json r = Json::array();
    for (auto v : row) r.push_back(static_cast<unsigned>(v));
    counts.push_back(r);
  }
  return {{"sbox", ddt.sbox_id}, {"counts", counts}, {"uniformity", ddt.uniformity()}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential analysis of 16-bit SPN ciphers", "spndiff"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  std::string out_fmt = "text";
  std::string desc_path;
  unsigned jobs = 0;
  auto add_common = [&](CLI::App* sub, bool desc_required) {
    auto* d = sub->add_option("--desc", desc_path, "cipher description file")->check(CLI::ExistingFile);
    if (desc_required) d->required();
    sub->add_option("--out", out_fmt, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--jobs", jobs, "worker threads (default: $SPNDIFF_JOBS or all cores)");
  };

  // ddt
  auto* ddt_cmd = app.add_subcommand("ddt", "difference distribution table of a 4-bit S-box");
  std::string sbox_id, sbox_hex;
  add_common(ddt_cmd, false);
  ddt_cmd->add_option("--sbox", sbox_id, "S-box id (default: all declared)");
  ddt_cmd->add_option("--hex", sbox_hex, "S-box given directly as 16 hex digits");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "exhaustive maximum of D(a,b) over all a != 0");
  std::optional<unsigned> rounds;
  std::optional<std::uint32_t> threshold, floor;
  std::string key_text;
  add_common(scan_cmd, true);
  scan_cmd->add_option("--rounds", rounds, "round count (default: from description)");
  scan_cmd->add_option("--threshold", threshold, "list every (a,b) with count >= threshold")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--floor", floor, "also export the sparse table of counts >= floor (json)")
      ->expected(0, 1)
      ->default_str(std::to_string(kDefaultTableFloor));
  scan_cmd->add_option("--key", key_text, "comma-separated hex key words (default: zero key)");

  // trails
  auto* trails_cmd = app.add_subcommand("trails", "minimum active S-boxes and best differential trails");
  std::string objective = "best-prob";
  bool enumerate_all = false;
  std::size_t limit = 1000;
  add_common(trails_cmd, true);
  trails_cmd->add_option("--rounds", rounds, "round count (default: from description)");
  trails_cmd->add_option("--objective", objective)->check(CLI::IsMember({"min-active", "best-prob"}));
  trails_cmd->add_flag("--enumerate-all-optimal", enumerate_all, "list every optimal trail");
  trails_cmd->add_option("--limit", limit, "cap on enumerated trails");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "count a differential by direct encryption");
  std::string a_text, b_text;
  std::optional<std::uint32_t> keys;
  std::uint64_t seed = 1;
  add_common(verify_cmd, true);
  verify_cmd->add_option("--a", a_text, "input difference (hex or nibble groups)")->required();
  verify_cmd->add_option("--b", b_text, "output difference (hex or nibble groups)")->required();
  verify_cmd->add_option("--keys", keys, "average over this many splitmix64 keys")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "splitmix64 seed");
  verify_cmd->add_option("--key", key_text, "fixed key for the exhaustive mode");
  verify_cmd->add_option("--rounds", rounds, "round count (default: from description)");

  // report
  auto* report_cmd = app.add_subcommand("report", "S-box, scan, characteristic and trail summary");
  unsigned max_rounds = 4;
  std::size_t top_limit = 64;
  bool no_trails = false;
  add_common(report_cmd, true);
  report_cmd->add_option("--max-rounds", max_rounds, "rounds covered by the scan table")->check(CLI::PositiveNumber);
  report_cmd->add_option("--top-limit", top_limit, "cap on listed characteristics");
  report_cmd->add_flag("--no-trails", no_trails, "skip the trail search");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ddt_cmd->parsed()) {
      std::vector<SBox4> boxes;
      if (!sbox_hex.empty()) {
        boxes.push_back(SBox4::from_hex(sbox_id.empty() ? "custom" : sbox_id, sbox_hex));
      } else {
        if (desc_path.empty()) throw UsageError("ddt needs --desc or --hex");
        const auto desc = load_description(desc_path);
        if (!sbox_id.empty()) {
          boxes.push_back(desc.sbox(sbox_id));
        } else {
          boxes = desc.sboxes();
        }
      }
      if (out_fmt == "json") {
        if (boxes.size() == 1) {
          out << ddt_json(compute_ddt(boxes[0])).dump(2) << "\n";
        } else {
          Json arr = Json::array();
          for (const auto& s : boxes) arr.push_back(ddt_json(compute_ddt(s)));
          out << arr.dump(2) << "\n";
        }
      } else if (out_fmt == "csv") {
        out << "sbox,a";
        for (unsigned b = 0; b < 16; ++b) out << "," << std::hex << std::uppercase << b << std::dec;
        out << "\n";
        for (const auto& s : boxes) {
          const Ddt ddt = compute_ddt(s);
          for (unsigned a = 0; a < 16; ++a) {
            out << s.id << "," << std::hex << std::uppercase << a << std::dec;
            for (unsigned b = 0; b < 16; ++b) out << "," << static_cast<unsigned>(ddt.at(a, b));
            out << "\n";
          }
        }
      } else {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
          if (i > 0) out << "\n";
          print_ddt_text(compute_ddt(boxes[i]), out);
        }
      }
      return kExitOk;
    }

    if (scan_cmd->parsed()) {
      const auto desc = load_description(desc_path);
      const auto key = parse_key(key_text, desc);
      ScanOptions opts;
      opts.rounds = rounds;
      opts.jobs = jobs;
      const unsigned eff_rounds = rounds.value_or(desc.rounds());
      const auto table = Evaluator(desc.with_rounds(eff_rounds), key).codebook();
      std::optional<std::uint32_t> collect = threshold;
      if (scan_cmd->count("--floor") > 0) {
        const std::uint32_t f = floor.value_or(kDefaultTableFloor);
        collect = collect ? std::min(*collect, f) : f;
      }
      const auto dist = scan_codebook(table, collect, jobs);
      std::vector<Characteristic> chars;
      if (threshold) {
        for (const auto& c : *dist.full_table) {
          if (c.count >= *threshold) chars.push_back(c);
        }
      } else {
        chars = dist.argmax;
      }
      if (out_fmt == "json") {
        Json j{{"cipher", desc.name()},
               {"rounds", eff_rounds},
               {"maxCount", dist.max_count},
               {"probability", std::to_string(dist.max_count) + "/65536"}};
        j["characteristics"] = Json::array();
        for (const auto& c : chars) {
          j["characteristics"].push_back({{"a_hex", hex16(c.input_diff)}, {"b_hex", hex16(c.output_diff)}, {"count", c.count}});
        }
        if (scan_cmd->count("--floor") > 0) {
          const std::uint32_t f = floor.value_or(kDefaultTableFloor);
          Json ft = Json::array();
          for (const auto& c : *dist.full_table) {
            if (c.count >= f) ft.push_back({{"a_hex", hex16(c.input_diff)}, {"b_hex", hex16(c.output_diff)}, {"count", c.count}});
          }
          j["fullTable"] = {{"floor", f}, {"entries", ft}};
        }
        out << j.dump(2) << "\n";
      } else if (out_fmt == "csv") {
        out << "a_hex,b_hex,count\n";
        for (const auto& c : chars) out << plain_hex(c.input_diff) << "," << plain_hex(c.output_diff) << "," << c.count << "\n";
      } else {
        out << "cipher " << desc.name() << ", rounds " << eff_rounds << "\n";
        out << "maxCount " << dist.max_count << " (" << dist.max_count << "/65536)\n";
        out << chars.size() << " characteristic(s)\n";
        for (const auto& c : chars) {
          out << "  " << hex16(c.input_diff) << " -> " << hex16(c.output_diff) << "  " << c.count << "\n";
        }
      }
      return kExitOk;
    }

    if (trails_cmd->parsed()) {
      const auto desc = load_description(desc_path);
      const unsigned r = rounds.value_or(desc.rounds());
      if (r < 1) throw PreconditionError("trail search needs rounds >= 1");
      TrailSearch search(desc);
      const unsigned min_active = search.min_active(r);
      const Objective obj = objective == "min-active" ? Objective::kMinActive : Objective::kBestProb;
      const Trail trail = obj == Objective::kMinActive ? search.min_active_trail(r) : search.best_trail(r);
      Rational bound = 1;
      const Rational max_prob = search.max_sbox_prob().to_rational();
      for (unsigned i = 0; i < min_active; ++i) bound *= max_prob;
      std::vector<Trail> all;
      if (enumerate_all) all = search.optimal_trails(r, obj, limit);

      auto trail_json = [](const Trail& t) {
        Json diffs = Json::array();
        for (Word d : t.round_diffs) diffs.push_back(hex16(d));
        return Json{{"diffs_hex", diffs},
                    {"probability", t.probability.str()},
                    {"log2", t.probability.log2()},
                    {"activeCount", t.active_count}};
      };
      if (out_fmt == "json") {
        Json j{{"rounds", r}, {"objective", objective}, {"minActive", min_active}, {"bestTrail", trail_json(trail)},
               {"bound", to_power_string(bound)}};
        if (enumerate_all) {
          j["optimalTrails"] = Json::array();
          for (const auto& t : all) j["optimalTrails"].push_back(trail_json(t));
        }
        out << j.dump(2) << "\n";
      } else {
        auto row = [&](const Trail& t) {
          std::string s;
          for (std::size_t i = 0; i < t.round_diffs.size(); ++i) {
            s += (out_fmt == "csv" ? plain_hex(t.round_diffs[i]) : hex16(t.round_diffs[i]));
            if (i + 1 < t.round_diffs.size()) s += out_fmt == "csv" ? ";" : " -> ";
          }
          return s;
        };
        if (out_fmt == "csv") {
          out << "diffs,activeCount,probability\n";
          for (const auto& t : enumerate_all ? all : std::vector<Trail>{trail}) {
            out << row(t) << "," << t.active_count << "," << t.probability.str() << "\n";
          }
        } else {
          out << "rounds " << r << ", min active S-boxes " << min_active << ", bound " << to_power_string(bound) << "\n";
          out << "trail: " << row(trail) << "\n";
          out << "  active " << trail.active_count << ", probability " << trail.probability.str() << " (2^"
              << trail.probability.log2() << ")\n";
          if (enumerate_all) {
            out << all.size() << " optimal trail(s)\n";
            for (const auto& t : all) out << "  " << row(t) << "  " << t.probability.str() << "\n";
          }
        }
      }
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      auto desc = load_description(desc_path);
      if (rounds) desc = desc.with_rounds(*rounds);
      const Word a = parse_diff_arg(a_text, "--a");
      const Word b = parse_diff_arg(b_text, "--b");
      Json j{{"cipher", desc.name()}, {"rounds", desc.rounds()}, {"a_hex", hex16(a)}, {"b_hex", hex16(b)}};
      if (keys) {
        const auto res = verify_keyed(desc, a, b, *keys, seed, jobs);
        j["mode"] = "keyed-average";
        j["keysTested"] = res.keys_tested;
        j["seed"] = res.seed;
        j["mean"] = res.mean;
        j["stderr"] = res.stderr_;
        j["perKeyCounts"] = res.per_key_counts;
        if (out_fmt == "json") {
          out << j.dump(2) << "\n";
        } else if (out_fmt == "csv") {
          out << "key_index,count\n";
          for (std::size_t k = 0; k < res.per_key_counts.size(); ++k) out << k << "," << res.per_key_counts[k] << "\n";
        } else {
          out << hex16(a) << " -> " << hex16(b) << ": mean count " << res.mean << " +/- " << res.stderr_ << " over "
              << res.keys_tested << " key(s), seed " << res.seed << "\n";
        }
      } else {
        const auto key = parse_key(key_text, desc);
        const auto res = verify_exhaustive(desc, key, a, b);
        const auto scanned = diff_count(desc, key, a, b);
        j["mode"] = "exhaustive-fixed-key";
        j["count"] = res.count;
        j["probability"] = std::to_string(res.count) + "/65536";
        j["diffCount"] = scanned;
        j["agree"] = scanned == res.count;
        if (out_fmt == "json") {
          out << j.dump(2) << "\n";
        } else if (out_fmt == "csv") {
          out << "a_hex,b_hex,count\n" << plain_hex(a) << "," << plain_hex(b) << "," << res.count << "\n";
        } else {
          out << hex16(a) << " -> " << hex16(b) << ": count " << res.count << "/65536"
              << (scanned == res.count ? "" : " (DISAGREES with scan)") << "\n";
        }
      }
      return kExitOk;
    }

    if (report_cmd->parsed()) {
      const auto desc = load_description(desc_path);
      ReportOptions opts;
      opts.max_rounds = max_rounds;
      opts.jobs = jobs;
      opts.top_limit = top_limit;
      opts.trails = !no_trails;
      const auto bundle = build_report(desc, opts);
      if (out_fmt == "json") {
        out << report_json(bundle);
      } else if (out_fmt == "csv") {
        out << report_csv(bundle);
      } else {
        out << report_text(bundle);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace spndiff
