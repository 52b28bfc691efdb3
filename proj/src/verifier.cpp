#include "spndiff/verifier.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spndiff/parallel.hpp"

namespace spndiff {

std::vector<KeyAssignment> draw_keys(std::size_t slots, std::size_t count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<KeyAssignment> keys(count);
  for (auto& k : keys) {
    k.words.resize(slots);
    for (auto& w : k.words) w = static_cast<Word>(rng.next() & 0xFFFF);
  }
  return keys;
}

namespace {

std::uint32_t count_by_encryption(const Evaluator& ev, Word a, Word b) {
  std::uint32_t n = 0;
  for (std::uint32_t x = 0; x < kDomainSize; ++x) {
    const Word xw = static_cast<Word>(x);
    n += (ev.forward(xw) ^ ev.forward(static_cast<Word>(xw ^ a))) == b;
  }
  return n;
}

void reject_zero(Word a) {
  if (a == 0) throw PreconditionError("input difference must be nonzero");
}

}  // namespace

VerificationResult verify_exhaustive(const CipherDescription& desc, const KeyAssignment& key, Word a, Word b) {
  reject_zero(a);
  VerificationResult r;
  r.input_diff = a;
  r.output_diff = b;
  r.mode = VerifyMode::kExhaustiveFixedKey;
  r.count = count_by_encryption(Evaluator(desc, key), a, b);
  r.keys_tested = 1;
  return r;
}

VerificationResult verify_keyed(const CipherDescription& desc, Word a, Word b, std::uint32_t keys, std::uint64_t seed,
                                unsigned jobs) {
  reject_zero(a);
  if (keys < 1) throw PreconditionError("keyed verification needs at least one key");
  const auto assignments = draw_keys(desc.key_slots(), keys, seed);
  VerificationResult r;
  r.input_diff = a;
  r.output_diff = b;
  r.mode = VerifyMode::kKeyedAverage;
  r.keys_tested = keys;
  r.seed = seed;
  r.per_key_counts.resize(keys);
  parallel_chunks(resolve_jobs(jobs), keys, 1, [&](unsigned, std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t k = begin; k < end; ++k) {
      r.per_key_counts[k] = count_by_encryption(Evaluator(desc, assignments[k]), a, b);
    }
  });
  double sum = 0;
  for (auto c : r.per_key_counts) sum += c;
  r.mean = sum / keys;
  if (keys > 1) {
    double ss = 0;
    for (auto c : r.per_key_counts) ss += (c - r.mean) * (c - r.mean);
    r.stderr_ = std::sqrt(ss / (keys - 1)) / std::sqrt(static_cast<double>(keys));
  }
  return r;
}

Word parse_difference(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto bad = [&] { return std::invalid_argument("cannot parse difference '" + std::string(text) + "'"); };

  if (text.find(',') != std::string_view::npos) {
    unsigned value = 0;
    int groups = 0;
    std::string_view rest = text;
    while (true) {
      const auto comma = rest.find(',');
      const auto group = trim(rest.substr(0, comma));
      if (group.size() != 4 || ++groups > 4) throw bad();
      for (char c : group) {
        if (c != '0' && c != '1') throw bad();
        value = (value << 1) | static_cast<unsigned>(c - '0');
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (groups != 4) throw bad();
    return static_cast<Word>(value);
  }

  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
  if (text.empty() || text.size() > 4) throw bad();
  unsigned value = 0;
  for (char c : text) {
    unsigned d;
    if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A' + 10);
    else throw bad();
    value = (value << 4) | d;
  }
  return static_cast<Word>(value);
}

std::string format_nibbles(Word w) {
  std::string out;
  for (int bit = 15; bit >= 0; --bit) {
    out.push_back(((w >> bit) & 1u) ? '1' : '0');
    if (bit % 4 == 0 && bit != 0) out += ", ";
  }
  return out;
}

std::string hex16(Word w) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", static_cast<unsigned>(w));
  return buf;
}

}  // namespace spndiff
