#include "w2t/beam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace w2t {

namespace {

std::vector<double> log_softmax(const Tensor& logits) {
  const auto& v = logits.values();
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  return out;
}

// Deterministic preference order: higher score first, then shorter, then
// lexicographically smaller symbols.
bool better(double score_a, const std::vector<int64_t>& sym_a, double score_b, const std::vector<int64_t>& sym_b) {
  if (score_a != score_b) return score_a > score_b;
  if (sym_a.size() != sym_b.size()) return sym_a.size() < sym_b.size();
  return sym_a < sym_b;
}

struct LiveHypothesis {
  Hypothesis hyp;
  DecoderState state;
};

}  // namespace

BeamResult beam_search(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc, int64_t beam_size,
                       int64_t max_len) {
  if (beam_size < 1) throw std::invalid_argument("beam_search: beam size must be >= 1");
  if (max_len < 1) throw std::invalid_argument("beam_search: max_len must be >= 1");
  const int64_t vocab = model.config().vocab_size;

  std::vector<LiveHypothesis> live;
  live.push_back({Hypothesis{}, model.initial_decoder_state()});
  std::vector<Hypothesis> pool;

  for (int64_t step = 0; step < max_len && !live.empty(); ++step) {
    struct Candidate {
      size_t parent;
      int64_t symbol;
      double log_prob;
      std::vector<int64_t> symbols;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(live.size() * static_cast<size_t>(vocab));

    std::vector<DecoderStepResult> steps(live.size());
    for (size_t i = 0; i < live.size(); ++i) {
      Tape tape(/*recording=*/false);
      const int64_t prev = live[i].hyp.symbols.empty() ? Vocabulary::kEos : live[i].hyp.symbols.back();
      steps[i] = model.decoder_step(tape, params, prev, live[i].state, enc);
      const std::vector<double> lp = log_softmax(steps[i].logits);
      for (int64_t y = 0; y < vocab; ++y) {
        Candidate c;
        c.parent = i;
        c.symbol = y;
        c.log_prob = live[i].hyp.log_prob + lp[static_cast<size_t>(y)];
        c.symbols = live[i].hyp.symbols;
        c.symbols.push_back(y);
        candidates.push_back(std::move(c));
      }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return better(a.log_prob, a.symbols, b.log_prob, b.symbols);
    });
    if (static_cast<int64_t>(candidates.size()) > beam_size) {
      candidates.resize(static_cast<size_t>(beam_size));
    }

    std::vector<LiveHypothesis> next;
    next.reserve(candidates.size());
    for (Candidate& c : candidates) {
      Hypothesis h;
      h.symbols = std::move(c.symbols);
      h.log_prob = c.log_prob;
      if (c.symbol == Vocabulary::kEos) {
        h.finished = true;
        pool.push_back(std::move(h));
      } else {
        next.push_back({std::move(h), steps[c.parent].state});
      }
    }
    live = std::move(next);
  }

  // Rank the finished pool by normalized score; unfinished survivors only
  // serve as a fallback when nothing finished.
  auto by_normalized = [](const Hypothesis& a, const Hypothesis& b) {
    return better(a.normalized_score(), a.symbols, b.normalized_score(), b.symbols);
  };
  std::sort(pool.begin(), pool.end(), by_normalized);

  BeamResult result;
  if (!pool.empty()) {
    result.best = pool.front();
    result.nbest.assign(pool.begin(), pool.begin() + std::min<size_t>(pool.size(), static_cast<size_t>(beam_size)));
  } else {
    std::vector<Hypothesis> unfinished;
    unfinished.reserve(live.size());
    for (LiveHypothesis& lh : live) unfinished.push_back(lh.hyp);
    std::sort(unfinished.begin(), unfinished.end(), by_normalized);
    if (unfinished.empty()) throw std::logic_error("beam_search: no hypothesis survived");
    result.best = unfinished.front();
    result.nbest.assign(unfinished.begin(),
                        unfinished.begin() + std::min<size_t>(unfinished.size(), static_cast<size_t>(beam_size)));
  }
  return result;
}

BeamResult beam_search(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc, int64_t beam_size) {
  return beam_search(model, params, enc, beam_size, 2 * enc.length() + 10);
}

double sequence_log_prob(const Seq2Seq& model, const ParameterSet& params, const EncoderStates& enc,
                         const std::vector<int64_t>& symbols) {
  if (symbols.empty() || symbols.back() != Vocabulary::kEos) {
    throw std::invalid_argument("sequence_log_prob: sequence must end with eos");
  }
  DecoderState state = model.initial_decoder_state();
  double total = 0.0;
  int64_t prev = Vocabulary::kEos;
  for (int64_t y : symbols) {
    Tape tape(/*recording=*/false);
    DecoderStepResult step = model.decoder_step(tape, params, prev, state, enc);
    total += log_softmax(step.logits)[static_cast<size_t>(y)];
    state = step.state;
    prev = y;
  }
  return total;
}

}  // namespace w2t
