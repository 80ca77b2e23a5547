#include "w2t/vocab.hpp"

#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

const Vocabulary& Vocabulary::instance() {
  static const Vocabulary v;
  return v;
}

std::string Vocabulary::symbol(int64_t index) const {
  if (index >= 0 && index < 26) return std::string(1, static_cast<char>('a' + index));
  switch (index) {
    case kApostrophe: return "'";
    case kPeriod: return ".";
    case kDash: return "-";
    case kSpace: return " ";
    case kNoise: return "<noise>";
    case kEos: return "<eos>";
    default: throw std::out_of_range(strf("vocabulary: symbol index %lld out of range", (long long)index));
  }
}

int64_t Vocabulary::index_of_char(char c) const {
  if (c >= 'a' && c <= 'z') return c - 'a';
  switch (c) {
    case '\'': return kApostrophe;
    case '.': return kPeriod;
    case '-': return kDash;
    case ' ': return kSpace;
    default: return -1;
  }
}

std::vector<int64_t> Vocabulary::encode(const std::string& text) const {
  std::vector<int64_t> out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size();) {
    if (text.compare(i, 7, "<noise>") == 0) {
      out.push_back(kNoise);
      i += 7;
      continue;
    }
    const int64_t idx = index_of_char(text[i]);
    if (idx < 0) throw std::invalid_argument(strf("vocabulary: cannot encode character 0x%02x", (unsigned char)text[i]));
    out.push_back(idx);
    ++i;
  }
  return out;
}

std::string Vocabulary::decode(const std::vector<int64_t>& indices) const {
  std::string out;
  for (int64_t idx : indices) {
    if (idx == kEos) continue;
    out += symbol(idx);
  }
  return out;
}

}  // namespace w2t
