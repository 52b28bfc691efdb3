#include <doctest.h>

#include <random>

#include "spndiff/sbox_analysis.hpp"
#include "test_support.hpp"

using namespace spndiff;

namespace {

std::vector<SBox4> separ_sboxes() {
  return {SBox4::from_hex("s1", "1FB2035869C7DAE4"), SBox4::from_hex("s2", "6AF4ED9217CB0358"),
          SBox4::from_hex("s3", "C261035879BEADF4"), SBox4::from_hex("s4", "DB2703586CF1A49E")};
}

// Brute-force count straight from the definition.
unsigned direct(const SBox4& s, unsigned a, unsigned b) {
  unsigned n = 0;
  for (unsigned x = 0; x < 16; ++x) n += (s(x ^ a) ^ s(x)) == b;
  return n;
}

}  // namespace

TEST_CASE("ddt examples") {
  const auto s = separ_sboxes();
  const auto d1 = compute_ddt(s[0]);
  CHECK(d1.at(0, 0) == 16);
  CHECK(d1.at(1, 0xE) == 2);
  CHECK(max_diff_prob(d1) == Rational(1, 4));
  CHECK(max_diff_prob(compute_ddt(s[3])) == Rational(1, 4));
  CHECK(max_diff_prob(compute_ddt(SBox4::identity())) == Rational(1));
  CHECK(compute_ddt(SBox4::identity()).at(5, 5) == 16);
}

TEST_CASE("ddt matches the definition entry by entry") {
  for (const auto& s : separ_sboxes()) {
    const auto d = compute_ddt(s);
    for (unsigned a = 0; a < 16; ++a) {
      for (unsigned b = 0; b < 16; ++b) CHECK(d.at(a, b) == direct(s, a, b));
    }
  }
}

TEST_CASE("ddt invariants") {
  std::mt19937 rng(11);
  auto boxes = separ_sboxes();
  for (int i = 0; i < 16; ++i) {
    std::array<std::uint8_t, 16> t;
    for (unsigned x = 0; x < 16; ++x) t[x] = static_cast<std::uint8_t>(x);
    std::shuffle(t.begin(), t.end(), rng);
    boxes.emplace_back("r" + std::to_string(i), t);
  }
  for (const auto& s : boxes) {
    CAPTURE(s.id);
    const auto d = compute_ddt(s);
    const auto inv = compute_ddt(s.inverse("inv"));
    CHECK(d.at(0, 0) == 16);
    for (unsigned a = 0; a < 16; ++a) {
      unsigned row = 0, col = 0;
      for (unsigned b = 0; b < 16; ++b) {
        row += d.at(a, b);
        col += d.at(b, a);
        CHECK(d.at(a, b) % 2 == 0);
        CHECK(inv.at(b, a) == d.at(a, b));
        if (a == 0 && b != 0) CHECK(d.at(a, b) == 0);
      }
      CHECK(row == 16);
      CHECK(col == 16);
    }
    // Affine equivalence with XOR constants on input and output keeps the table.
    std::array<std::uint8_t, 16> shifted;
    for (unsigned x = 0; x < 16; ++x) shifted[x] = static_cast<std::uint8_t>(s(x ^ 0x9) ^ 0x5);
    CHECK(compute_ddt(SBox4("k", shifted)).counts == d.counts);
  }
}

TEST_CASE("uniformity report for the four published sboxes") {
  const auto rows = diff_uniformity_report(separ_sboxes());
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.uniformity == 4);
    CHECK(r.bijective);
  }
  CHECK(rows[1].id == "s2");
  CHECK(rows[1].max_entries == 18);
}

TEST_CASE("uniformity report ordering and errors") {
  const std::vector<SBox4> boxes{SBox4::from_hex("zz", "1FB2035869C7DAE4"), SBox4::identity("aa")};
  const auto rows = diff_uniformity_report(boxes);
  CHECK(rows[0].id == "aa");
  CHECK(rows[0].uniformity == 16);
  CHECK(rows[0].max_entries == 15);
  CHECK_THROWS_AS(diff_uniformity_report(std::span<const SBox4>{}), PreconditionError);
}
