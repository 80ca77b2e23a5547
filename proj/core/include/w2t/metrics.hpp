#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace w2t {

// Minimum number of insertions, deletions, and substitutions (unit costs).
int64_t levenshtein(const std::vector<int64_t>& a, const std::vector<int64_t>& b);
int64_t levenshtein_words(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Edit counts plus reference length, so corpus scores can be
// micro-averaged (total edits / total reference length).
struct EditStats {
  int64_t char_edits = 0;
  int64_t char_ref_len = 0;
  int64_t word_edits = 0;
  int64_t word_ref_len = 0;

  void accumulate(const EditStats& other);
  double cer() const;
  double wer() const;
};

// Scores one hypothesis/reference pair of transcripts. Both are normalized
// and encoded with the 32-symbol vocabulary first; eos markers are
// stripped. The reference must be non-empty.
EditStats score_pair(const std::string& hyp, const std::string& ref);

double cer(const std::string& hyp, const std::string& ref);
double wer(const std::string& hyp, const std::string& ref);

}  // namespace w2t
