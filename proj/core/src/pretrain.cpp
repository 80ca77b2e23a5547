#include "w2t/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "w2t/optim.hpp"

namespace w2t {

PretrainTarget pretrain_target_from_string(const std::string& s) {
  if (s == "fbank") return PretrainTarget::Fbank;
  if (s == "mfcc") return PretrainTarget::Mfcc;
  if (s == "multi") return PretrainTarget::Multi;
  throw std::invalid_argument(strf("pretrain: unknown target '%s' (expected fbank|mfcc|multi)", s.c_str()));
}

namespace {

Tensor target_tensor(const SpectralFeatures& f) {
  return Tensor::from({f.rows, f.cols}, f.data);
}

void check_counts(const FrameMatrix& frames, const SpectralFeatures& target, const char* what) {
  if (frames.num_frames != target.rows) {
    throw std::invalid_argument(strf("pretrain: utterance has %lld frames but %lld %s target rows",
                                     (long long)frames.num_frames, (long long)target.rows, what));
  }
}

Tensor predictions_matrix(Tape& tape, const RawEncoder& encoder, const ParameterSet& params, const FrameMatrix& frames,
                          const std::string& head) {
  std::vector<Tensor> rows;
  rows.reserve(static_cast<size_t>(frames.num_frames));
  for (int64_t s = 0; s < frames.num_frames; ++s) {
    rows.push_back(encoder.predict_features(tape, params, head, RawEncoder::frame_tensor(frames, s)));
  }
  return tape.stack_rows(rows);
}

}  // namespace

Tensor pretrain_loss_single(Tape& tape, const RawEncoder& encoder, const ParameterSet& params,
                            const FrameMatrix& frames, const SpectralFeatures& target, const std::string& head) {
  check_counts(frames, target, head.c_str());
  return tape.mse_loss(predictions_matrix(tape, encoder, params, frames, head), target_tensor(target));
}

Tensor pretrain_loss_multi(Tape& tape, const RawEncoder& encoder, const ParameterSet& params, const FrameMatrix& frames,
                           const SpectralFeatures& fbank, const SpectralFeatures& mfcc) {
  check_counts(frames, fbank, "fbank");
  check_counts(frames, mfcc, "mfcc");
  // Shared trunk pass per frame, both heads on the same map.
  std::vector<Tensor> fbank_rows, mfcc_rows;
  fbank_rows.reserve(static_cast<size_t>(frames.num_frames));
  mfcc_rows.reserve(static_cast<size_t>(frames.num_frames));
  for (int64_t s = 0; s < frames.num_frames; ++s) {
    const FrameEncoding enc = encoder.encode_frame(tape, params, RawEncoder::frame_tensor(frames, s));
    fbank_rows.push_back(encoder.apply_head(tape, params, "fbank", enc.feature_map));
    mfcc_rows.push_back(encoder.apply_head(tape, params, "mfcc", enc.feature_map));
  }
  const Tensor loss_a = tape.mse_loss(tape.stack_rows(fbank_rows), target_tensor(fbank));
  const Tensor loss_b = tape.mse_loss(tape.stack_rows(mfcc_rows), target_tensor(mfcc));
  return tape.add(loss_a, loss_b);
}

PretrainResult pretrain(const RawEncoderConfig& cfg, const std::vector<PretrainUtterance>& corpus,
                        const PretrainTask& task, uint64_t config_fingerprint) {
  if (corpus.empty()) throw std::invalid_argument("pretrain: empty corpus");
  for (const PretrainUtterance& u : corpus) {
    if (task.target != PretrainTarget::Mfcc && u.fbank.rows == 0) {
      throw std::invalid_argument(strf("pretrain: utterance '%s' is missing fbank targets", u.id.c_str()));
    }
    if (task.target != PretrainTarget::Fbank && u.mfcc.rows == 0) {
      throw std::invalid_argument(strf("pretrain: utterance '%s' is missing mfcc targets", u.id.c_str()));
    }
  }

  const RawEncoder encoder(cfg);
  ParameterSet params;
  Rng rng(mix_seed(task.seed, 0x70726574));  // init stream
  encoder.init_params(params, rng);
  if (task.target != PretrainTarget::Mfcc) encoder.init_head(params, "fbank", corpus[0].fbank.cols, rng);
  if (task.target != PretrainTarget::Fbank) encoder.init_head(params, "mfcc", corpus[0].mfcc.cols, rng);

  Optimizer opt(OptimizerConfig::momentum_sgd(task.learning_rate, task.momentum));

  auto utterance_loss = [&](Tape& tape, const PretrainUtterance& u) {
    switch (task.target) {
      case PretrainTarget::Fbank: return pretrain_loss_single(tape, encoder, params, u.frames, u.fbank, "fbank");
      case PretrainTarget::Mfcc: return pretrain_loss_single(tape, encoder, params, u.frames, u.mfcc, "mfcc");
      case PretrainTarget::Multi: return pretrain_loss_multi(tape, encoder, params, u.frames, u.fbank, u.mfcc);
    }
    throw std::logic_error("pretrain: unreachable");
  };

  PretrainResult result;
  int64_t steps = 0;
  bool capped = false;
  for (int64_t epoch = 0; epoch < task.epochs && !capped; ++epoch) {
    double epoch_loss = 0.0;
    int64_t in_batch = 0;
    for (size_t ui = 0; ui < corpus.size(); ++ui) {
      Tape tape;
      const Tensor loss = utterance_loss(tape, corpus[ui]);
      epoch_loss += loss.item();
      tape.backward(loss);
      ++in_batch;
      const bool last = ui + 1 == corpus.size();
      if (in_batch == task.batch_utterances || last) {
        params.scale_grads(1.0 / static_cast<double>(in_batch));
        opt.step(params);
        in_batch = 0;
        ++steps;
        if (task.max_steps > 0 && steps >= task.max_steps) {
          capped = true;
          break;
        }
      }
    }
    result.loss_trace.emplace_back(epoch, epoch_loss / static_cast<double>(corpus.size()));
  }

  result.steps_run = steps;
  result.checkpoint = Checkpoint::from_params(params, config_fingerprint, task.epochs);
  result.checkpoint.rng_state = rng.serialize();
  result.checkpoint.optimizer = opt.snapshot();
  return result;
}

Checkpoint export_transferred(const Checkpoint& ckpt) { return ckpt.restricted_to_trunk(); }

ComparisonMatrices emit_comparison(const RawEncoderConfig& cfg, const Checkpoint& ckpt,
                                   const PretrainUtterance& utterance, const std::string& out_prefix) {
  if (utterance.fbank.rows == 0) throw std::invalid_argument("emit_comparison: utterance has no fbank features");
  if (ckpt.params.count("head.fbank.1.weight") == 0) {
    throw std::invalid_argument("emit_comparison: checkpoint has no fbank head (pretrain with fbank or multi targets)");
  }
  const RawEncoder encoder(cfg);
  ParameterSet params;
  Rng rng(0);
  encoder.init_params(params, rng);
  encoder.init_head(params, "fbank", ckpt.params.at("head.fbank.1.weight").size(0), rng);
  if (ckpt.params.count("head.mfcc.1.weight") > 0) {
    encoder.init_head(params, "mfcc", ckpt.params.at("head.mfcc.1.weight").size(0), rng);
  }
  ckpt.load_into(params);

  Tape tape(/*recording=*/false);
  const Tensor pred = [&] {
    std::vector<Tensor> rows;
    for (int64_t s = 0; s < utterance.frames.num_frames; ++s) {
      rows.push_back(encoder.predict_features(tape, params, "fbank", RawEncoder::frame_tensor(utterance.frames, s)));
    }
    return tape.stack_rows(rows);
  }();

  ComparisonMatrices out;
  out.original = utterance.fbank;
  out.predicted = utterance.fbank;
  out.predicted.data = pred.values();

  // Side-by-side CSV: original D columns then predicted D columns per frame.
  {
    std::ofstream os(out_prefix + ".csv");
    if (!os) throw std::runtime_error(strf("emit_comparison: cannot write '%s.csv'", out_prefix.c_str()));
    for (int64_t s = 0; s < out.original.rows; ++s) {
      std::string line;
      for (int64_t d = 0; d < out.original.cols; ++d) line += strf(d ? ",%.9f" : "%.9f", out.original.at(s, d));
      for (int64_t d = 0; d < out.predicted.cols; ++d) line += strf(",%.9f", out.predicted.at(s, d));
      os << line << "\n";
    }
  }

  // Stacked grayscale image, original on top, predicted below, one column
  // per frame, low feature dimensions at the bottom.
  {
    const int64_t rows = out.original.cols, cols = out.original.rows;
    double lo = out.original.data[0], hi = out.original.data[0];
    for (double v : out.original.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : out.predicted.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi - lo > 1e-12 ? hi - lo : 1.0;
    std::ofstream os(out_prefix + ".pgm", std::ios::binary);
    if (!os) throw std::runtime_error(strf("emit_comparison: cannot write '%s.pgm'", out_prefix.c_str()));
    os << "P5\n" << cols << " " << (2 * rows + 1) << "\n255\n";
    auto put_matrix = [&](const SpectralFeatures& f) {
      for (int64_t d = rows - 1; d >= 0; --d) {
        for (int64_t s = 0; s < cols; ++s) {
          const double v = (f.at(s, d) - lo) / span;
          os.put(static_cast<char>(std::lround(v * 255.0)));
        }
      }
    };
    put_matrix(out.original);
    for (int64_t s = 0; s < cols; ++s) os.put(static_cast<char>(255));  // divider
    put_matrix(out.predicted);
  }
  return out;
}

}  // namespace w2t
