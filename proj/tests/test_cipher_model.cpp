#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spndiff/cipher_model.hpp"
#include "test_support.hpp"

using namespace spndiff;

namespace {

CipherDescription one_layer(const std::string& layers, unsigned rounds = 1) {
  return parse_description("name t\n" + std::string(testing::kSeparSboxes) + "rounds " + std::to_string(rounds) +
                           "\nround\n" + layers + "\nend\n");
}

int error_line(const std::string& text) {
  try {
    parse_description(text);
  } catch (const DescriptionError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("sbox digits map input j to digit j") {
  const auto d = one_layer("sub s1 s1 s1 s1");
  const std::array<std::uint8_t, 16> expected{1, 15, 11, 2, 0, 3, 5, 8, 6, 9, 12, 7, 13, 10, 14, 4};
  CHECK(d.sbox("s1").table == expected);
  CHECK(d.sbox("s1").hex() == "1FB2035869C7DAE4");
}

TEST_CASE("single sub layer on zero input and its inverse") {
  const auto d = one_layer("sub s1 s1 s1 s1");
  CHECK(eval(d, d.zero_key(), 0x0000) == 0x1111);
  CHECK(eval_inverse(d, d.zero_key(), 0x1111) == 0x0000);
}

TEST_CASE("sub layer assigns ids[0] to the top nibble") {
  const auto d = one_layer("sub s1 s2 s3 s4");
  // s1(0)=1, s2(0)=6, s3(0)=C, s4(0)=D
  CHECK(eval(d, d.zero_key(), 0x0000) == 0x16CD);
}

TEST_CASE("reference description golden vector") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  CHECK(ref.rounds() == 4);
  CHECK(ref.key_slots() == 2);
  CHECK(eval(ref, ref.zero_key(), 0x0000) == 0x79FF);
  CHECK(eval(ref, KeyAssignment{{0x0001, 0x0002}}, 0x1234) == 0x83B7);
  const auto one = testing::load("separ-encblock-onesbox.cd");
  CHECK(eval(one, one.zero_key(), 0x0000) == 0x1E7E);
}

TEST_CASE("zero rounds is the identity") {
  const auto id = testing::load("identity.cd");
  CHECK(id.rounds() == 0);
  for (std::uint32_t x = 0; x < 65536; x += 97) CHECK(eval(id, id.zero_key(), static_cast<Word>(x)) == x);
  const auto ref0 = testing::load("separ-encblock-ref.cd").with_rounds(0);
  CHECK(eval(ref0, ref0.zero_key(), 0xBEEF) == 0xBEEF);
}

TEST_CASE("evaluator agrees with the layer-by-layer oracle") {
  std::mt19937_64 rng(7);
  for (const char* file : testing::kAllDescriptions) {
    const auto d = testing::load(file);
    for (int trial = 0; trial < 4; ++trial) {
      KeyAssignment key = d.zero_key();
      for (auto& w : key.words) w = static_cast<Word>(rng());
      Evaluator ev(d, key);
      for (int i = 0; i < 256; ++i) {
        const auto x = static_cast<Word>(rng());
        CHECK(ev.forward(x) == oracle::direct_eval(d, key.words, x));
      }
    }
  }
}

TEST_CASE("toy description matches the hand-coded cipher") {
  const auto toy = testing::load("toy-heys.cd");
  for (unsigned r = 0; r <= 4; ++r) {
    const auto d = toy.with_rounds(r);
    const auto cb = Evaluator(d, KeyAssignment{{0x3A94}}).codebook();
    const auto expected = oracle::heys_codebook(r, 0x3A94);
    CHECK(std::equal(cb.begin(), cb.end(), expected.begin()));
  }
}

TEST_CASE("every description is a bijection and inverts") {
  for (const char* file : testing::kAllDescriptions) {
    CAPTURE(file);
    const auto d = testing::load(file);
    KeyAssignment key = d.zero_key();
    for (std::size_t i = 0; i < key.words.size(); ++i) key.words[i] = static_cast<Word>(0x1357 * (i + 3));
    Evaluator ev(d, key);
    std::vector<bool> seen(65536, false);
    bool ok = true;
    for (std::uint32_t x = 0; x < 65536; ++x) {
      const Word y = ev.forward(static_cast<Word>(x));
      ok = ok && !seen[y] && ev.inverse(y) == x;
      seen[y] = true;
    }
    CHECK(ok);
  }
}

TEST_CASE("inverted description undoes the original") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  const auto inv = ref.inverted();
  const KeyAssignment key{{0xA1B2, 0xC3D4}};
  for (std::uint32_t x = 0; x < 65536; x += 131) {
    CHECK(eval(inv, key, eval(ref, key, static_cast<Word>(x))) == x);
  }
}

TEST_CASE("format and parse round trip") {
  for (const char* file : testing::kAllDescriptions) {
    const auto d = testing::load(file);
    const auto again = parse_description(format_description(d));
    CHECK(format_description(again) == format_description(d));
    CHECK(again.name() == d.name());
    CHECK(again.rounds() == d.rounds());
  }
}

TEST_CASE("linear propagation") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  // template: key, sub, perm, rotl, key
  CHECK(propagate_linear(ref, 2, 5, 0x0000) == 0x0000);
  CHECK(propagate_linear(ref, 2, 3, 0x8000) == 0x8000);
  CHECK(propagate_linear(ref, 2, 3, 0x4000) == 0x0800);
  CHECK(propagate_linear(ref, 3, 4, 0x0001) == 0x0080);
  CHECK(propagate_linear(ref, 4, 5, 0x1234) == 0x1234);
  CHECK_THROWS_AS(propagate_linear(ref, 1, 3, 0x0001), PreconditionError);
  CHECK_THROWS_AS(propagate_linear(ref, 3, 9, 0x0001), PreconditionError);
  CHECK(rotl16(0x8001, 1) == 0x0003);
  CHECK(rotl16(0x1234, 0) == 0x1234);
}

TEST_CASE("wrong key length is rejected") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  CHECK_THROWS_AS(eval(ref, KeyAssignment{{1}}, 0), PreconditionError);
  CHECK_THROWS_AS(eval_inverse(ref, KeyAssignment{{1, 2, 3}}, 0), PreconditionError);
}

TEST_CASE("parse errors carry line numbers") {
  const std::string head = "name t\nblockbits 16\n";
  CHECK(error_line(head + "sbox s1 1FB2035869C7DAE\n") == 3);
  CHECK(error_line(head + "sbox s1 1FB2035869C7DAEX\n") == 3);
  CHECK(error_line(head + "sbox s1 1FB2035869C7DAE1\n") == 3);
  CHECK(error_line(head + "rounds 1\nround\n  sub s1 s1 s1 s1\nend\n") == 5);
  CHECK(error_line("name t\nblockbits 32\n") == 2);
  CHECK(error_line(head + "rounds 1\nround\n  perm 0 1 2 3 4 5 6 7 8 9 10 11 12 13 14 14\nend\n") == 5);
  CHECK(error_line(head + "rounds 1\nround\n  rotl 16\nend\n") == 5);
  CHECK(error_line(head + "rounds 1\nround\n  xorconst 12G4\nend\n") == 5);
  CHECK(error_line(head + "rounds 1\nround\n  mix\nend\n") == 5);
  CHECK(error_line(head + "rounds 1\nround\nend\nround\nend\n") == 6);
  CHECK(error_line(head + "rounds 1\nround\n  key 0\n") == 4);
  CHECK(error_line(head + "rounds x\n") == 3);
  CHECK(error_line(head + "frobnicate 1\n") == 3);
  CHECK(error_line(head + "\n# comment\nsbox s1 1FB2035869C7DAE4\nsbox s1 1FB2035869C7DAE4\n") == 6);
}

TEST_CASE("whole-description errors") {
  CHECK_THROWS_AS(parse_description("blockbits 16\nrounds 1\nround\nend\n"), DescriptionError);
  CHECK_THROWS_AS(parse_description("name t\nround\nend\n"), DescriptionError);
  CHECK_THROWS_WITH_AS(parse_description("name t\nrounds 1\nround\n  key 1\nend\n"),
                       doctest::Contains("without gaps"), DescriptionError);
  CHECK_THROWS_AS(load_description(testing::data_path("missing.cd")), std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored") {
  const auto d = parse_description("# header\n\nname t   # trailing\nrounds 2\nround\n  # inside\n  rotl 3\nend\n");
  CHECK(eval(d, d.zero_key(), 0x0001) == 0x0040);
}

TEST_CASE("sbox validation") {
  CHECK_THROWS_AS(SBox4::from_hex("x", "0123456789ABCDEE"), DescriptionError);
  const auto s = SBox4::from_hex("s", "1FB2035869C7DAE4");
  const auto inv = s.inverse("s_inv");
  for (unsigned x = 0; x < 16; ++x) CHECK(inv(s(x)) == x);
  CHECK(SBox4::identity("i").hex() == "0123456789ABCDEF");
}

TEST_CASE("used sboxes and appended layers") {
  const auto ref = testing::load("separ-encblock-ref.cd");
  CHECK(ref.used_sboxes().size() == 4);
  CHECK(testing::load("separ-encblock-onesbox.cd").used_sboxes().size() == 1);
  const auto longer = ref.with_appended_layer(XorConstLayer{0x00FF});
  CHECK(eval(longer, longer.zero_key(), 0) != eval(ref, ref.zero_key(), 0));
}
