#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace w2t {

// The fixed 32-symbol character set: a-z, apostrophe, period, dash, space,
// a noise marker, and the end-of-sequence symbol. eos doubles as the
// decoder's start-of-sequence token and never appears in stored text.
class Vocabulary {
 public:
  static constexpr int64_t kSize = 32;
  static constexpr int64_t kApostrophe = 26;
  static constexpr int64_t kPeriod = 27;
  static constexpr int64_t kDash = 28;
  static constexpr int64_t kSpace = 29;
  static constexpr int64_t kNoise = 30;
  static constexpr int64_t kEos = 31;

  static const Vocabulary& instance();

  int64_t size() const { return kSize; }

  // Rendering of one symbol: single characters, or "<noise>" / "<eos>".
  std::string symbol(int64_t index) const;

  // Index of a single text character; -1 if the character is not in the
  // set. The noise and eos markers are not reachable this way.
  int64_t index_of_char(char c) const;

  // Text (may contain "<noise>") -> symbol indices. Unknown characters are
  // an error; use normalize_transcript first.
  std::vector<int64_t> encode(const std::string& text) const;

  // Symbol indices -> text; eos symbols are dropped.
  std::string decode(const std::vector<int64_t>& indices) const;

 private:
  Vocabulary() = default;
};

}  // namespace w2t
