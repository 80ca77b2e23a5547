#include "w2t/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "w2t/common.hpp"
#include "w2t/corpus.hpp"
#include "w2t/vocab.hpp"

namespace w2t {

namespace {

// Two-row DP over generic token sequences.
template <typename T>
int64_t edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<std::string> split_words(const std::vector<int64_t>& symbols) {
  const Vocabulary& vocab = Vocabulary::instance();
  std::vector<std::string> words;
  std::string cur;
  for (int64_t s : symbols) {
    if (s == Vocabulary::kSpace) {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur += vocab.symbol(s);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

std::vector<int64_t> encode_transcript(const std::string& text) {
  // eos markers are stripped before scoring.
  std::string cleaned = text;
  for (size_t pos = cleaned.find("<eos>"); pos != std::string::npos; pos = cleaned.find("<eos>")) {
    cleaned.erase(pos, 5);
  }
  return Vocabulary::instance().encode(normalize_transcript(cleaned));
}

}  // namespace

int64_t levenshtein(const std::vector<int64_t>& a, const std::vector<int64_t>& b) { return edit_distance(a, b); }

int64_t levenshtein_words(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return edit_distance(a, b);
}

void EditStats::accumulate(const EditStats& other) {
  char_edits += other.char_edits;
  char_ref_len += other.char_ref_len;
  word_edits += other.word_edits;
  word_ref_len += other.word_ref_len;
}

double EditStats::cer() const {
  if (char_ref_len == 0) throw std::invalid_argument("cer: empty reference");
  return static_cast<double>(char_edits) / static_cast<double>(char_ref_len);
}

double EditStats::wer() const {
  if (word_ref_len == 0) throw std::invalid_argument("wer: empty reference");
  return static_cast<double>(word_edits) / static_cast<double>(word_ref_len);
}

EditStats score_pair(const std::string& hyp, const std::string& ref) {
  const std::vector<int64_t> ref_syms = encode_transcript(ref);
  if (ref_syms.empty()) throw std::invalid_argument("score_pair: empty reference");
  const std::vector<int64_t> hyp_syms = encode_transcript(hyp);

  EditStats st;
  st.char_edits = levenshtein(hyp_syms, ref_syms);
  st.char_ref_len = static_cast<int64_t>(ref_syms.size());

  const auto hyp_words = split_words(hyp_syms);
  const auto ref_words = split_words(ref_syms);
  st.word_edits = levenshtein_words(hyp_words, ref_words);
  st.word_ref_len = static_cast<int64_t>(ref_words.size());
  return st;
}

double cer(const std::string& hyp, const std::string& ref) { return score_pair(hyp, ref).cer(); }

double wer(const std::string& hyp, const std::string& ref) { return score_pair(hyp, ref).wer(); }

}  // namespace w2t
