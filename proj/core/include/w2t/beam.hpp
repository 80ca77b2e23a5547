#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/seq2seq.hpp"

namespace w2t {

struct Hypothesis {
  std::vector<int64_t> symbols;  // includes the terminating eos once finished
  double log_prob = 0.0;
  bool finished = false;

  // Length normalization counts every emitted symbol, eos included.
  double normalized_score() const {
    return symbols.empty() ? 0.0 : log_prob / static_cast<double>(symbols.size());
  }
};

struct BeamResult {
  Hypothesis best;
  std::vector<Hypothesis> nbest;  // sorted by normalized score
};

// Standard beam expansion over the vocabulary. Hypotheses emitting eos move
// to a finished pool and free their beam slot; the search ends when the
// live beam empties or max_len steps have run. The winner maximizes the
// length-normalized score over the finished pool, falling back to the best
// unfinished hypothesis when nothing finished. Ties break toward shorter,
// then lexicographically smaller, symbol sequences.
BeamResult beam_search(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc, int64_t beam_size,
                       int64_t max_len);

// Convenience wrapper: default max_len = 2 * S' + 10.
BeamResult beam_search(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc, int64_t beam_size);

// Log-probability of a complete symbol sequence (ending in eos) under the
// model; used for exhaustive scoring.
double sequence_log_prob(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc,
                         const std::vector<int64_t>& symbols);

}  // namespace w2t
