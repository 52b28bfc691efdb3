#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "spndiff/diff_exhaustive.hpp"
#include "test_support.hpp"

using namespace spndiff;

namespace {

struct Frozen {
  unsigned rounds;
  std::uint32_t max_count;
  std::vector<std::pair<Word, Word>> argmax;
};

// Computed by oracle::naive_scan over oracle::heys_codebook.
const Frozen kToyFrozen[] = {
    {1, 32768, {{0x000B, 0x0010}, {0x00B0, 0x0020}, {0x0B00, 0x0040}, {0xB000, 0x0080}}},
    {2, 12288, {{0x00B0, 0x0202}, {0x0B00, 0x0220}}},
    {3, 2324, {{0xB0B0, 0x0808}}},
    {4, 214, {{0xB0BB, 0x0505}}},
};

ScanOptions rounds_opt(unsigned r, unsigned jobs = 0) {
  ScanOptions o;
  o.rounds = r;
  o.jobs = jobs;
  return o;
}

}  // namespace

TEST_CASE("trivial counts") {
  const auto id = testing::load("identity.cd");
  const auto ref = testing::load("separ-encblock-ref.cd");
  for (Word a : {Word{1}, Word{0x0424}, Word{0xFFFF}}) CHECK(diff_count(id, id.zero_key(), a, a) == 65536);
  CHECK(diff_count(ref, ref.zero_key(), 0, 0) == 65536);
  CHECK(diff_count(ref, ref.zero_key(), 0, 0x0001) == 0);
}

TEST_CASE("identity scan") {
  const auto id = testing::load("identity.cd");
  const auto d = scan_max(id, id.zero_key());
  CHECK(d.max_count == 65536);
  REQUIRE(d.argmax.size() == 65535);
  CHECK(d.argmax.front() == Characteristic{1, 1, 65536});
  CHECK(d.argmax.back() == Characteristic{0xFFFF, 0xFFFF, 65536});
  const auto top = top_characteristics(id, id.zero_key(), 65536);
  CHECK(top.size() == 65535);
  CHECK(std::all_of(top.begin(), top.end(), [](const Characteristic& c) { return c.input_diff == c.output_diff; }));
}

TEST_CASE("toy scan matches frozen oracle values") {
  const auto toy = testing::load("toy-heys.cd");
  for (const auto& f : kToyFrozen) {
    CAPTURE(f.rounds);
    const auto d = scan_max(toy, toy.zero_key(), rounds_opt(f.rounds));
    CHECK(d.max_count == f.max_count);
    REQUIRE(d.argmax.size() == f.argmax.size());
    for (std::size_t i = 0; i < f.argmax.size(); ++i) {
      CHECK(d.argmax[i].input_diff == f.argmax[i].first);
      CHECK(d.argmax[i].output_diff == f.argmax[i].second);
      CHECK(d.argmax[i].count == f.max_count);
    }
  }
}

TEST_CASE("histogram rows conserve pairs and are even") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  const auto table = Evaluator(ref, ref.zero_key()).codebook();
  std::mt19937 rng(5);
  for (int i = 0; i < 64; ++i) {
    const auto a = static_cast<Word>(1 + rng() % 65535);
    const auto hist = diff_histogram(ref, ref.zero_key(), a);
    std::uint64_t sum = 0;
    bool even = true;
    for (auto c : hist) {
      sum += c;
      even = even && c % 2 == 0;
    }
    CHECK(sum == 65536);
    CHECK(even);
    const auto b = static_cast<Word>(table[0] ^ table[a]);
    CHECK(hist[b] == diff_count(ref, ref.zero_key(), a, b));
  }
}

TEST_CASE("inverse symmetry") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  const auto inv = ref.inverted();
  const KeyAssignment key{{0x5A5A, 0x0F0F}};
  const auto table = Evaluator(ref, key).codebook();
  std::mt19937 rng(9);
  for (int i = 0; i < 32; ++i) {
    const auto a = static_cast<Word>(1 + rng() % 65535);
    const auto x = static_cast<Word>(rng());
    const Word b = i % 4 == 0 ? static_cast<Word>(rng()) : static_cast<Word>(table[x] ^ table[x ^ a]);
    CHECK(diff_count(ref, key, a, b) == diff_count(inv, key, b, a));
  }
}

TEST_CASE("whitening keys leave the distribution unchanged") {
  // One toy round is key, sub, perm: the key only whitens the input.
  const auto toy = testing::load("toy-heys.cd").with_rounds(1);
  ScanOptions opts;
  opts.table_floor = 2048;
  const auto base = scan_max(toy, toy.zero_key(), opts);
  std::mt19937 rng(13);
  for (int i = 0; i < 4; ++i) {
    const KeyAssignment key{{static_cast<Word>(rng())}};
    const auto d = scan_max(toy, key, opts);
    CHECK(d.max_count == base.max_count);
    CHECK(d.argmax == base.argmax);
    CHECK(*d.full_table == *base.full_table);
  }
  // Only whitening-type XORs: every round is xorconst then key.
  const auto keyed = testing::load("identity-keyed.cd");
  const auto d = scan_max(keyed, KeyAssignment{{0x1234}});
  CHECK(d.max_count == 65536);
  CHECK(d.argmax.size() == 65535);
}

TEST_CASE("inner round keys can change counts") {
  const auto toy = testing::load("toy-heys.cd");
  const auto a = diff_count(toy, toy.zero_key(), 0xB0BB, 0x0505);
  const auto b = diff_count(toy, KeyAssignment{{0x1234}}, 0xB0BB, 0x0505);
  CHECK(a == 214);
  CHECK(b == 248);
}

TEST_CASE("a trailing permutation maps the argmax") {
  // Two toy rounds spelled out as a single round, so the extra layer runs once.
  const std::string body = "name t\nsbox h E4D12FB83A6C5907\nrounds 1\nround\n"
                           "  key 0\n  sub h h h h\n  perm 0 4 8 12 1 5 9 13 2 6 10 14 3 7 11 15\n"
                           "  key 0\n  sub h h h h\n  perm 0 4 8 12 1 5 9 13 2 6 10 14 3 7 11 15\n";
  PermLayer l;
  for (unsigned i = 0; i < 16; ++i) l.source[i] = static_cast<std::uint8_t>((5 * i + 3) % 16);
  std::string perm = "  perm";
  for (unsigned i = 0; i < 16; ++i) perm += " " + std::to_string(l.source[i]);
  const auto plain = parse_description(body + "end\n");
  const auto longer = parse_description(body + perm + "\nend\n");
  const auto base = scan_max(plain, plain.zero_key());
  CHECK(base.max_count == 12288);
  const auto after = scan_max(longer, longer.zero_key());
  CHECK(after.max_count == base.max_count);
  std::vector<Characteristic> mapped;
  for (const auto& c : base.argmax) mapped.push_back({c.input_diff, apply_perm(l, c.output_diff), c.count});
  std::sort(mapped.begin(), mapped.end(), [](const Characteristic& x, const Characteristic& y) {
    return std::tie(x.input_diff, x.output_diff) < std::tie(y.input_diff, y.output_diff);
  });
  CHECK(after.argmax == mapped);
}

TEST_CASE("worker count does not change results") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  ScanOptions one = rounds_opt(2, 1), many = rounds_opt(2, 8);
  one.table_floor = many.table_floor = 256;
  const auto a = scan_max(ref, ref.zero_key(), one);
  const auto b = scan_max(ref, ref.zero_key(), many);
  CHECK(a.max_count == b.max_count);
  CHECK(a.argmax == b.argmax);
  REQUIRE(a.full_table);
  CHECK(*a.full_table == *b.full_table);
  CHECK(std::is_sorted(a.full_table->begin(), a.full_table->end(), [](const auto& x, const auto& y) {
    return std::tie(x.input_diff, x.output_diff) < std::tie(y.input_diff, y.output_diff);
  }));
}

TEST_CASE("top characteristics thresholds") {
  const auto toy = testing::load("toy-heys.cd");
  const auto opts = rounds_opt(1);
  CHECK_THROWS_AS(top_characteristics(toy, toy.zero_key(), 0, opts), PreconditionError);
  const auto top = top_characteristics(toy, toy.zero_key(), std::nullopt, opts);
  CHECK(top.size() == 4);
  const auto wider = top_characteristics(toy, toy.zero_key(), 16384, opts);
  CHECK(wider.size() > top.size());
  for (const auto& c : wider) {
    CHECK(c.count >= 16384);
    CHECK(c.count == diff_count(toy.with_rounds(1), toy.zero_key(), c.input_diff, c.output_diff));
  }
  CHECK(top.front().probability() == Rational(1, 2));
}

TEST_CASE("codebook scan agrees with the naive oracle on a small cipher") {
  const auto cb = oracle::heys_codebook(2, 0x0F0F);
  const auto d = scan_codebook(cb, std::nullopt, 0);
  const auto n = oracle::naive_scan(cb);
  CHECK(d.max_count == n.max_count);
  REQUIRE(d.argmax.size() == n.argmax.size());
  for (std::size_t i = 0; i < d.argmax.size(); ++i) {
    CHECK(d.argmax[i].input_diff == std::get<0>(n.argmax[i]));
    CHECK(d.argmax[i].output_diff == std::get<1>(n.argmax[i]));
  }
  CHECK_THROWS_AS(scan_codebook(std::span<const Word>(cb.data(), 100), std::nullopt, 1), PreconditionError);
}
