#include "spndiff/cipher_model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace spndiff {

DescriptionError::DescriptionError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

template <std::size_t N>
bool is_permutation_of_range(const std::array<std::uint8_t, N>& values) {
  std::array<bool, N> seen{};
  for (auto v : values) {
    if (v >= N || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

// --- SBox4 -------------------------------------------------------------------

SBox4::SBox4(std::string id_, const std::array<std::uint8_t, 16>& table_)
    : id(std::move(id_)), table(table_) {
  if (!is_permutation_of_range(table)) {
    throw DescriptionError(0, "sbox " + id + " is not a permutation of 0..15");
  }
}

SBox4 SBox4::from_hex(std::string id, std::string_view digits) {
  if (digits.size() != 16) {
    throw DescriptionError(0, "sbox " + id + " needs 16 hex digits, got " + std::to_string(digits.size()));
  }
  std::array<std::uint8_t, 16> t{};
  for (std::size_t j = 0; j < 16; ++j) {
    const int d = hex_digit(digits[j]);
    if (d < 0) throw DescriptionError(0, "sbox " + id + ": bad hex digit '" + std::string(1, digits[j]) + "'");
    t[j] = static_cast<std::uint8_t>(d);
  }
  return SBox4(std::move(id), t);
}

SBox4 SBox4::identity(std::string id) {
  std::array<std::uint8_t, 16> t{};
  for (std::uint8_t j = 0; j < 16; ++j) t[j] = j;
  return SBox4(std::move(id), t);
}

SBox4 SBox4::inverse(std::string inverse_id) const {
  std::array<std::uint8_t, 16> t{};
  for (std::uint8_t x = 0; x < 16; ++x) t[table[x]] = x;
  return SBox4(std::move(inverse_id), t);
}

std::string SBox4::hex() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  for (auto v : table) out.push_back(kDigits[v]);
  return out;
}

// --- CipherDescription --------------------------------------------------------

CipherDescription::CipherDescription(std::string name, std::vector<SBox4> sboxes,
                                     std::vector<LayerSpec> round_template, unsigned rounds)
    : name_(std::move(name)), sboxes_(std::move(sboxes)), template_(std::move(round_template)), rounds_(rounds) {
  std::set<std::string> ids;
  for (const auto& s : sboxes_) {
    if (!ids.insert(s.id).second) throw DescriptionError(0, "duplicate sbox id " + s.id);
    if (!is_permutation_of_range(s.table)) throw DescriptionError(0, "sbox " + s.id + " is not a permutation");
  }
  std::set<unsigned> slots;
  for (const auto& layer : template_) {
    if (const auto* sub = std::get_if<SubLayer>(&layer)) {
      for (const auto& id : sub->ids) {
        if (!ids.contains(id)) throw DescriptionError(0, "undeclared sbox id " + id);
      }
    } else if (const auto* perm = std::get_if<PermLayer>(&layer)) {
      if (!is_permutation_of_range(perm->source)) throw DescriptionError(0, "perm is not a permutation of 0..15");
    } else if (const auto* rot = std::get_if<RotLLayer>(&layer)) {
      if (rot->amount > 15) throw DescriptionError(0, "rotation " + std::to_string(rot->amount) + " out of range 0..15");
    } else if (const auto* key = std::get_if<KeyXorLayer>(&layer)) {
      slots.insert(key->slot);
    }
  }
  key_slots_ = static_cast<unsigned>(slots.size());
  if (!slots.empty() && *slots.rbegin() + 1 != key_slots_) {
    throw DescriptionError(0, "key slots must be numbered 0.." + std::to_string(key_slots_ - 1) + " without gaps");
  }
}

const SBox4& CipherDescription::sbox(std::string_view id) const {
  for (const auto& s : sboxes_) {
    if (s.id == id) return s;
  }
  throw DescriptionError(0, "undeclared sbox id " + std::string(id));
}

std::vector<SBox4> CipherDescription::used_sboxes() const {
  std::vector<SBox4> out;
  for (const auto& layer : template_) {
    if (const auto* sub = std::get_if<SubLayer>(&layer)) {
      for (const auto& id : sub->ids) {
        if (std::none_of(out.begin(), out.end(), [&](const SBox4& s) { return s.id == id; })) {
          out.push_back(sbox(id));
        }
      }
    }
  }
  return out;
}

CipherDescription CipherDescription::with_rounds(unsigned rounds) const {
  CipherDescription copy = *this;
  copy.rounds_ = rounds;
  return copy;
}

CipherDescription CipherDescription::with_appended_layer(LayerSpec layer) const {
  auto layers = template_;
  layers.push_back(std::move(layer));
  return CipherDescription(name_, sboxes_, std::move(layers), rounds_);
}

CipherDescription CipherDescription::inverted() const {
  std::vector<SBox4> inv_boxes;
  for (const auto& s : sboxes_) inv_boxes.push_back(s.inverse(s.id + "_inv"));
  std::vector<LayerSpec> layers;
  for (auto it = template_.rbegin(); it != template_.rend(); ++it) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, SubLayer>) {
            SubLayer inv;
            for (std::size_t n = 0; n < 4; ++n) inv.ids[n] = l.ids[n] + "_inv";
            layers.emplace_back(inv);
          } else if constexpr (std::is_same_v<T, PermLayer>) {
            PermLayer inv;
            for (std::uint8_t i = 0; i < 16; ++i) inv.source[l.source[i]] = i;
            layers.emplace_back(inv);
          } else if constexpr (std::is_same_v<T, RotLLayer>) {
            layers.emplace_back(RotLLayer{(16 - l.amount) % 16});
          } else {
            layers.emplace_back(l);
          }
        },
        *it);
  }
  return CipherDescription(name_ + "_inv", std::move(inv_boxes), std::move(layers), rounds_);
}

// --- parsing ------------------------------------------------------------------

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

unsigned parse_uint(std::string_view tok, int line, const char* what) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw DescriptionError(line, std::string("expected non-negative integer for ") + what + ", got '" +
                                     std::string(tok) + "'");
  }
  return v;
}

bool valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
}

void expect_args(const std::vector<std::string_view>& toks, std::size_t n, int line) {
  if (toks.size() != n + 1) {
    throw DescriptionError(line, "'" + std::string(toks[0]) + "' takes " + std::to_string(n) + " argument(s), got " +
                                     std::to_string(toks.size() - 1));
  }
}

}  // namespace

CipherDescription parse_description(std::string_view text) {
  std::string name;
  std::vector<SBox4> sboxes;
  std::vector<LayerSpec> layers;
  std::optional<unsigned> rounds;
  bool in_round = false;
  bool have_round = false;
  int round_line = 0;

  auto declared = [&](std::string_view id) {
    return std::any_of(sboxes.begin(), sboxes.end(), [&](const SBox4& s) { return s.id == id; });
  };

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string_view kw = toks[0];

    try {
      if (in_round) {
        if (kw == "end") {
          expect_args(toks, 0, lineno);
          in_round = false;
        } else if (kw == "sub") {
          expect_args(toks, 4, lineno);
          SubLayer sub;
          for (std::size_t n = 0; n < 4; ++n) {
            if (!declared(toks[n + 1])) {
              throw DescriptionError(lineno, "undeclared sbox id " + std::string(toks[n + 1]));
            }
            sub.ids[n] = std::string(toks[n + 1]);
          }
          layers.emplace_back(std::move(sub));
        } else if (kw == "perm") {
          expect_args(toks, 16, lineno);
          PermLayer perm;
          for (std::size_t i = 0; i < 16; ++i) {
            const unsigned v = parse_uint(toks[i + 1], lineno, "perm entry");
            if (v > 15) throw DescriptionError(lineno, "perm entry " + std::to_string(v) + " out of range 0..15");
            perm.source[i] = static_cast<std::uint8_t>(v);
          }
          if (!is_permutation_of_range(perm.source)) {
            throw DescriptionError(lineno, "perm is not a permutation of 0..15");
          }
          layers.emplace_back(perm);
        } else if (kw == "rotl") {
          expect_args(toks, 1, lineno);
          const unsigned r = parse_uint(toks[1], lineno, "rotl");
          if (r > 15) throw DescriptionError(lineno, "rotation " + std::to_string(r) + " out of range 0..15");
          layers.emplace_back(RotLLayer{r});
        } else if (kw == "xorconst") {
          expect_args(toks, 1, lineno);
          if (toks[1].size() != 4) throw DescriptionError(lineno, "xorconst needs 4 hex digits");
          unsigned v = 0;
          for (char c : toks[1]) {
            const int d = hex_digit(c);
            if (d < 0) throw DescriptionError(lineno, "xorconst: bad hex digit");
            v = (v << 4) | static_cast<unsigned>(d);
          }
          layers.emplace_back(XorConstLayer{static_cast<Word>(v)});
        } else if (kw == "key") {
          expect_args(toks, 1, lineno);
          layers.emplace_back(KeyXorLayer{parse_uint(toks[1], lineno, "key slot")});
        } else {
          throw DescriptionError(lineno, "unknown layer '" + std::string(kw) + "'");
        }
        continue;
      }

      if (kw == "name") {
        expect_args(toks, 1, lineno);
        if (!valid_identifier(toks[1])) throw DescriptionError(lineno, "invalid name '" + std::string(toks[1]) + "'");
        name = std::string(toks[1]);
      } else if (kw == "blockbits") {
        expect_args(toks, 1, lineno);
        if (parse_uint(toks[1], lineno, "blockbits") != kBlockBits) {
          throw DescriptionError(lineno, "only 16-bit blocks are supported");
        }
      } else if (kw == "sbox") {
        expect_args(toks, 2, lineno);
        if (!valid_identifier(toks[1])) throw DescriptionError(lineno, "invalid sbox id '" + std::string(toks[1]) + "'");
        if (declared(toks[1])) throw DescriptionError(lineno, "duplicate sbox id " + std::string(toks[1]));
        sboxes.push_back(SBox4::from_hex(std::string(toks[1]), toks[2]));
      } else if (kw == "rounds") {
        expect_args(toks, 1, lineno);
        rounds = parse_uint(toks[1], lineno, "rounds");
      } else if (kw == "round") {
        expect_args(toks, 0, lineno);
        if (have_round) throw DescriptionError(lineno, "only one round block is allowed");
        have_round = true;
        in_round = true;
        round_line = lineno;
      } else {
        throw DescriptionError(lineno, "unknown directive '" + std::string(kw) + "'");
      }
    } catch (const DescriptionError& e) {
      if (e.line() != 0) throw;
      throw DescriptionError(lineno, e.what());
    }
  }

  if (in_round) throw DescriptionError(round_line, "round block is not closed with 'end'");
  if (name.empty()) throw DescriptionError(0, "missing 'name' directive");
  if (!rounds) throw DescriptionError(0, "missing 'rounds' directive");
  return CipherDescription(std::move(name), std::move(sboxes), std::move(layers), *rounds);
}

CipherDescription load_description(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read description file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_description(ss.str());
}

std::string format_description(const CipherDescription& desc) {
  std::ostringstream out;
  out << "name " << desc.name() << "\n";
  out << "blockbits 16\n";
  for (const auto& s : desc.sboxes()) out << "sbox " << s.id << " " << s.hex() << "\n";
  out << "rounds " << desc.rounds() << "\n";
  out << "round\n";
  for (const auto& layer : desc.round_template()) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, SubLayer>) {
            out << "  sub " << l.ids[0] << " " << l.ids[1] << " " << l.ids[2] << " " << l.ids[3];
          } else if constexpr (std::is_same_v<T, PermLayer>) {
            out << "  perm";
            for (auto v : l.source) out << " " << static_cast<unsigned>(v);
          } else if constexpr (std::is_same_v<T, RotLLayer>) {
            out << "  rotl " << l.amount;
          } else if constexpr (std::is_same_v<T, XorConstLayer>) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(l.value));
            out << "  xorconst " << buf;
          } else {
            out << "  key " << l.slot;
          }
          out << "\n";
        },
        layer);
  }
  out << "end\n";
  return out.str();
}

// --- evaluation ---------------------------------------------------------------

Word rotl16(Word x, unsigned r) {
  r &= 15;
  if (r == 0) return x;
  return static_cast<Word>((x << r) | (x >> (16 - r)));
}

Word apply_perm(const PermLayer& perm, Word x) {
  Word out = 0;
  for (unsigned i = 0; i < 16; ++i) out |= static_cast<Word>(((x >> perm.source[i]) & 1u) << i);
  return out;
}

namespace {

void check_key(const CipherDescription& desc, const KeyAssignment& key) {
  if (key.words.size() != desc.key_slots()) {
    throw PreconditionError("key has " + std::to_string(key.words.size()) + " word(s), description expects " +
                            std::to_string(desc.key_slots()));
  }
}

}  // namespace

Evaluator::Evaluator(const CipherDescription& desc, const KeyAssignment& key) : rounds_(desc.rounds()) {
  check_key(desc, key);
  for (const auto& layer : desc.round_template()) {
    Step step{};
    if (const auto* sub = std::get_if<SubLayer>(&layer)) {
      step.kind = Step::Kind::kSub;
      std::array<const SBox4*, 4> boxes{};
      std::array<SBox4, 4> inverses{SBox4::identity(), SBox4::identity(), SBox4::identity(), SBox4::identity()};
      for (std::size_t n = 0; n < 4; ++n) {
        boxes[n] = &desc.sbox(sub->ids[n]);
        inverses[n] = boxes[n]->inverse("inv");
      }
      for (unsigned b = 0; b < 256; ++b) {
        const unsigned bh = b >> 4, bl = b & 0xF;
        // byte hi covers nibbles 0,1; byte lo covers nibbles 2,3
        step.hi[b] = static_cast<Word>(((*boxes[0])(bh) << 12) | ((*boxes[1])(bl) << 8));
        step.lo[b] = static_cast<Word>(((*boxes[2])(bh) << 4) | (*boxes[3])(bl));
        step.inv_hi[b] = static_cast<Word>((inverses[0](bh) << 12) | (inverses[1](bl) << 8));
        step.inv_lo[b] = static_cast<Word>((inverses[2](bh) << 4) | inverses[3](bl));
      }
    } else if (const auto* perm = std::get_if<PermLayer>(&layer)) {
      step.kind = Step::Kind::kPerm;
      PermLayer inv;
      for (std::uint8_t i = 0; i < 16; ++i) inv.source[perm->source[i]] = i;
      for (unsigned b = 0; b < 256; ++b) {
        step.lo[b] = apply_perm(*perm, static_cast<Word>(b));
        step.hi[b] = apply_perm(*perm, static_cast<Word>(b << 8));
        step.inv_lo[b] = apply_perm(inv, static_cast<Word>(b));
        step.inv_hi[b] = apply_perm(inv, static_cast<Word>(b << 8));
      }
    } else if (const auto* rot = std::get_if<RotLLayer>(&layer)) {
      step.kind = Step::Kind::kRotL;
      step.rot = rot->amount;
    } else if (const auto* c = std::get_if<XorConstLayer>(&layer)) {
      step.kind = Step::Kind::kXor;
      step.mask = c->value;
    } else {
      step.kind = Step::Kind::kXor;
      step.mask = key.words[std::get<KeyXorLayer>(layer).slot];
    }
    steps_.push_back(step);
  }
}

Word Evaluator::apply(const Step& s, Word x) {
  switch (s.kind) {
    case Step::Kind::kSub:
    case Step::Kind::kPerm:
      return static_cast<Word>(s.lo[x & 0xFF] | s.hi[x >> 8]);
    case Step::Kind::kRotL:
      return rotl16(x, s.rot);
    case Step::Kind::kXor:
      return static_cast<Word>(x ^ s.mask);
  }
  return x;
}

Word Evaluator::apply_inverse(const Step& s, Word x) {
  switch (s.kind) {
    case Step::Kind::kSub:
    case Step::Kind::kPerm:
      return static_cast<Word>(s.inv_lo[x & 0xFF] | s.inv_hi[x >> 8]);
    case Step::Kind::kRotL:
      return rotl16(x, 16 - s.rot);
    case Step::Kind::kXor:
      return static_cast<Word>(x ^ s.mask);
  }
  return x;
}

Word Evaluator::forward(Word x) const {
  for (unsigned r = 0; r < rounds_; ++r) {
    for (const auto& s : steps_) x = apply(s, x);
  }
  return x;
}

Word Evaluator::inverse(Word y) const {
  for (unsigned r = 0; r < rounds_; ++r) {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) y = apply_inverse(*it, y);
  }
  return y;
}

std::vector<Word> Evaluator::codebook() const {
  std::vector<Word> table(kDomainSize);
  for (std::uint32_t x = 0; x < kDomainSize; ++x) table[x] = static_cast<Word>(x);
  for (unsigned r = 0; r < rounds_; ++r) {
    for (const auto& s : steps_) {
      for (auto& v : table) v = apply(s, v);
    }
  }
  return table;
}

Word eval(const CipherDescription& desc, const KeyAssignment& key, Word x) {
  return Evaluator(desc, key).forward(x);
}

Word eval_inverse(const CipherDescription& desc, const KeyAssignment& key, Word y) {
  return Evaluator(desc, key).inverse(y);
}

Word propagate_linear(const CipherDescription& desc, std::size_t first, std::size_t last, Word delta) {
  const auto& layers = desc.round_template();
  if (first > last || last > layers.size()) {
    throw PreconditionError("layer range [" + std::to_string(first) + ", " + std::to_string(last) +
                            ") outside template of " + std::to_string(layers.size()) + " layer(s)");
  }
  for (std::size_t i = first; i < last; ++i) {
    const auto& layer = layers[i];
    if (is_sub(layer)) throw PreconditionError("layer " + std::to_string(i) + " is a sub layer");
    if (const auto* perm = std::get_if<PermLayer>(&layer)) {
      delta = apply_perm(*perm, delta);
    } else if (const auto* rot = std::get_if<RotLLayer>(&layer)) {
      delta = rotl16(delta, rot->amount);
    }
  }
  return delta;
}

}  // namespace spndiff
