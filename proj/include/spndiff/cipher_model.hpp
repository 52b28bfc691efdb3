#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spndiff {

/// A 16-bit block value or difference. Bit 15 is the most significant bit;
/// nibble 0 is bits 15..12.
using Word = std::uint16_t;

inline constexpr unsigned kBlockBits = 16;
inline constexpr std::uint32_t kDomainSize = 1u << kBlockBits;

/// Malformed or inconsistent cipher description. line() is 1-based, or 0
/// when the problem is not tied to a line of input.
class DescriptionError : public std::runtime_error {
 public:
  DescriptionError(int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bijective 4-bit S-box.
struct SBox4 {
  std::string id;
  std::array<std::uint8_t, 16> table{};

  /// Validates that `table` is a permutation of 0..15.
  SBox4(std::string id, const std::array<std::uint8_t, 16>& table);
  /// Parses 16 hex digits, digit j being the image of j.
  static SBox4 from_hex(std::string id, std::string_view digits);
  static SBox4 identity(std::string id = "id");

  std::uint8_t operator()(unsigned x) const { return table[x & 0xF]; }
  SBox4 inverse(std::string inverse_id) const;
  std::string hex() const;

  bool operator==(const SBox4&) const = default;
};

struct SubLayer {
  std::array<std::string, 4> ids;  // ids[0] drives the most significant nibble
  bool operator==(const SubLayer&) const = default;
};

struct PermLayer {
  std::array<std::uint8_t, 16> source{};  // output bit i takes input bit source[i]
  bool operator==(const PermLayer&) const = default;
};

struct RotLLayer {
  unsigned amount = 0;
  bool operator==(const RotLLayer&) const = default;
};

struct XorConstLayer {
  Word value = 0;
  bool operator==(const XorConstLayer&) const = default;
};

struct KeyXorLayer {
  unsigned slot = 0;
  bool operator==(const KeyXorLayer&) const = default;
};

using LayerSpec = std::variant<SubLayer, PermLayer, RotLLayer, XorConstLayer, KeyXorLayer>;

inline bool is_sub(const LayerSpec& layer) { return std::holds_alternative<SubLayer>(layer); }

/// One 16-bit word per key slot.
struct KeyAssignment {
  std::vector<Word> words;

  static KeyAssignment zero(std::size_t slots) { return {std::vector<Word>(slots, 0)}; }
  bool operator==(const KeyAssignment&) const = default;
};

/// A validated 16-bit SPN: a round template applied `rounds` times.
///
/// Immutable once constructed. Construction checks that every Sub layer
/// names a declared S-box, every Perm is a bit permutation, rotations are
/// in 0..15, and key slots are numbered 0..n-1 without gaps.
class CipherDescription {
 public:
  CipherDescription(std::string name, std::vector<SBox4> sboxes,
                    std::vector<LayerSpec> round_template, unsigned rounds);

  const std::string& name() const { return name_; }
  const std::vector<SBox4>& sboxes() const { return sboxes_; }
  const std::vector<LayerSpec>& round_template() const { return template_; }
  unsigned rounds() const { return rounds_; }
  unsigned key_slots() const { return key_slots_; }
  KeyAssignment zero_key() const { return KeyAssignment::zero(key_slots_); }

  /// Throws DescriptionError for unknown ids.
  const SBox4& sbox(std::string_view id) const;
  /// S-boxes referenced by Sub layers, in order of first use.
  std::vector<SBox4> used_sboxes() const;

  CipherDescription with_rounds(unsigned rounds) const;
  /// Same cipher with one more layer at the end of the round template.
  CipherDescription with_appended_layer(LayerSpec layer) const;
  /// The inverse cipher, as a description over inverse S-boxes.
  CipherDescription inverted() const;

  bool operator==(const CipherDescription&) const = default;

 private:
  std::string name_;
  std::vector<SBox4> sboxes_;
  std::vector<LayerSpec> template_;
  unsigned rounds_;
  unsigned key_slots_;
};

/// Parses the line-oriented description format. Errors carry line numbers.
CipherDescription parse_description(std::string_view text);
/// Reads and parses a description file.
CipherDescription load_description(const std::string& path);
/// Canonical text form; parse_description(format_description(d)) == d.
std::string format_description(const CipherDescription& desc);

/// Description and key compiled into table-driven layer steps.
class Evaluator {
 public:
  Evaluator(const CipherDescription& desc, const KeyAssignment& key);

  Word forward(Word x) const;
  Word inverse(Word y) const;

  /// forward() over the whole domain: entry x holds the ciphertext of x.
  std::vector<Word> codebook() const;

 private:
  struct Step {
    enum class Kind : std::uint8_t { kSub, kPerm, kRotL, kXor } kind;
    unsigned rot = 0;
    Word mask = 0;
    // Byte-sliced lookup: out = lo[x & 0xFF] | hi[x >> 8] (Sub, Perm).
    std::array<Word, 256> lo{};
    std::array<Word, 256> hi{};
    std::array<Word, 256> inv_lo{};
    std::array<Word, 256> inv_hi{};
  };

  static Word apply(const Step& s, Word x);
  static Word apply_inverse(const Step& s, Word x);

  std::vector<Step> steps_;
  unsigned rounds_;
};

/// Throws PreconditionError when key length does not match key_slots().
Word eval(const CipherDescription& desc, const KeyAssignment& key, Word x);
Word eval_inverse(const CipherDescription& desc, const KeyAssignment& key, Word y);

/// Pushes a difference through template layers [first, last). XOR layers
/// leave differences unchanged. Throws PreconditionError if the range
/// contains a Sub layer or lies outside the template.
Word propagate_linear(const CipherDescription& desc, std::size_t first, std::size_t last, Word delta);

// Raw layer primitives, shared with the trail search.
Word apply_perm(const PermLayer& perm, Word x);
Word rotl16(Word x, unsigned r);

}  // namespace spndiff
