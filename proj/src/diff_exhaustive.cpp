#include "spndiff/diff_exhaustive.hpp"

#include <algorithm>
#include <bit>

#include "spndiff/parallel.hpp"

namespace spndiff {

namespace {

// Chunk of input differences claimed per work item.
constexpr std::uint32_t kChunk = 64;

struct WorkerResult {
  std::uint32_t best = 0;
  std::vector<Characteristic> argmax;
  std::vector<Characteristic> collected;
  // Histogram over output differences, counting unordered pairs; all-zero
  // between input differences.
  std::vector<std::uint32_t> hist;
};

bool by_pair(const Characteristic& l, const Characteristic& r) {
  return l.input_diff != r.input_diff ? l.input_diff < r.input_diff : l.output_diff < r.output_diff;
}

// Visits one representative x of every unordered pair {x, x ^ a}: the
// values with the top set bit of a cleared.
template <typename Fn>
inline void for_each_pair(Word a, Fn&& fn) {
  const unsigned h = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(a))) - 1;
  const std::uint32_t block = 1u << h;
  const std::uint32_t stride = block << 1;
  for (std::uint32_t hi = 0; hi < kDomainSize; hi += stride) {
    for (std::uint32_t lo = 0; lo < block; ++lo) fn(hi | lo);
  }
}

}  // namespace

std::uint32_t diff_count(const CipherDescription& desc, const KeyAssignment& key, Word a, Word b) {
  const auto table = Evaluator(desc, key).codebook();
  std::uint32_t n = 0;
  for (std::uint32_t x = 0; x < kDomainSize; ++x) n += (table[x ^ a] ^ table[x]) == b;
  return n;
}

std::vector<std::uint32_t> diff_histogram(const CipherDescription& desc, const KeyAssignment& key, Word a) {
  const auto table = Evaluator(desc, key).codebook();
  std::vector<std::uint32_t> hist(kDomainSize, 0);
  for (std::uint32_t x = 0; x < kDomainSize; ++x) ++hist[table[x ^ a] ^ table[x]];
  return hist;
}

DiffDistribution scan_codebook(std::span<const Word> codebook, std::optional<std::uint32_t> collect_floor,
                               unsigned jobs) {
  if (codebook.size() != kDomainSize) throw PreconditionError("codebook must have 65536 entries");
  jobs = resolve_jobs(jobs);
  std::vector<WorkerResult> results(jobs);
  const Word* table = codebook.data();

  parallel_chunks(jobs, kDomainSize, kChunk, [&](unsigned worker, std::uint32_t begin, std::uint32_t end) {
    WorkerResult& res = results[worker];
    if (res.hist.empty()) res.hist.assign(kDomainSize, 0);
    std::uint32_t* hist = res.hist.data();
    for (std::uint32_t av = std::max<std::uint32_t>(begin, 1); av < end; ++av) {
      const Word a = static_cast<Word>(av);
      std::uint32_t local = 0;
      for_each_pair(a, [&](std::uint32_t x) {
        const std::uint32_t c = ++hist[table[x] ^ table[x ^ a]];
        local = std::max(local, c);
      });
      const std::uint32_t local_count = 2 * local;
      const bool collect = collect_floor && local_count >= *collect_floor;
      if (local_count > res.best) {
        res.best = local_count;
        res.argmax.clear();
      }
      if (local_count == res.best || collect) {
        for_each_pair(a, [&](std::uint32_t x) {
          const Word b = table[x] ^ table[x ^ a];
          const std::uint32_t count = 2 * hist[b];
          if (count == 0) return;
          if (count == res.best) res.argmax.push_back({a, b, count});
          if (collect && count >= *collect_floor) res.collected.push_back({a, b, count});
          hist[b] = 0;
        });
      } else {
        for_each_pair(a, [&](std::uint32_t x) { hist[table[x] ^ table[x ^ a]] = 0; });
      }
    }
  });

  DiffDistribution out;
  for (const auto& r : results) out.max_count = std::max(out.max_count, r.best);
  std::vector<Characteristic> collected;
  for (auto& r : results) {
    if (r.best == out.max_count) out.argmax.insert(out.argmax.end(), r.argmax.begin(), r.argmax.end());
    collected.insert(collected.end(), r.collected.begin(), r.collected.end());
  }
  std::sort(out.argmax.begin(), out.argmax.end(), by_pair);
  if (collect_floor) {
    std::sort(collected.begin(), collected.end(), by_pair);
    out.full_table = std::move(collected);
  }
  return out;
}

DiffDistribution scan_max(const CipherDescription& desc, const KeyAssignment& key, const ScanOptions& opts) {
  const CipherDescription effective = opts.rounds ? desc.with_rounds(*opts.rounds) : desc;
  const auto table = Evaluator(effective, key).codebook();
  return scan_codebook(table, opts.table_floor, opts.jobs);
}

std::vector<Characteristic> top_characteristics(const CipherDescription& desc, const KeyAssignment& key,
                                                std::optional<std::uint32_t> threshold, const ScanOptions& opts) {
  if (threshold && *threshold < 1) throw PreconditionError("threshold must be at least 1");
  const CipherDescription effective = opts.rounds ? desc.with_rounds(*opts.rounds) : desc;
  const auto table = Evaluator(effective, key).codebook();
  if (!threshold) return scan_codebook(table, std::nullopt, opts.jobs).argmax;
  return *scan_codebook(table, threshold, opts.jobs).full_table;
}

}  // namespace spndiff
