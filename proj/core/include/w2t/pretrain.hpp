#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/checkpoint.hpp"
#include "w2t/dsp.hpp"
#include "w2t/raw_encoder.hpp"

namespace w2t {

enum class PretrainTarget : uint8_t { Fbank = 1, Mfcc = 2, Multi = 3 };

PretrainTarget pretrain_target_from_string(const std::string& s);

struct PretrainTask {
  PretrainTarget target = PretrainTarget::Multi;
  int64_t epochs = 20;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int64_t batch_utterances = 1;
  uint64_t seed = 1234;
  // Optional hard cap on optimizer steps; <= 0 means no cap.
  int64_t max_steps = 0;
};

// One utterance prepared for regression: raw frames plus standardized
// spectral targets (the mfcc field may be empty for single-target runs and
// vice versa).
struct PretrainUtterance {
  std::string id;
  FrameMatrix frames;
  SpectralFeatures fbank;
  SpectralFeatures mfcc;
};

struct PretrainResult {
  std::vector<std::pair<int64_t, double>> loss_trace;  // (epoch, mean loss)
  Checkpoint checkpoint;
  int64_t steps_run = 0;
};

// Per-utterance regression loss: squared error summed over feature
// dimensions, averaged over frames.
Tensor pretrain_loss_single(Tape& tape, const RawEncoder& encoder, const ParameterSet& params,
                            const FrameMatrix& frames, const SpectralFeatures& target, const std::string& head);

// Two heads on a shared trunk; equals the sum of the two single losses at
// identical parameters.
Tensor pretrain_loss_multi(Tape& tape, const RawEncoder& encoder, const ParameterSet& params, const FrameMatrix& frames,
                           const SpectralFeatures& fbank, const SpectralFeatures& mfcc);

// Full training loop with momentum SGD; parameters are created from the
// task seed. Returns the per-epoch mean loss trace and the final
// checkpoint (which includes head parameters).
PretrainResult pretrain(const RawEncoderConfig& cfg, const std::vector<PretrainUtterance>& corpus,
                        const PretrainTask& task, uint64_t config_fingerprint = 0);

// Drops everything but the transferable trunk paths.
Checkpoint export_transferred(const Checkpoint& ckpt);

struct ComparisonMatrices {
  SpectralFeatures original;
  SpectralFeatures predicted;
};

// Original vs predicted standardized log-mel for one utterance, written as
// a side-by-side CSV (2*D columns per frame) and a stacked grayscale PGM.
ComparisonMatrices emit_comparison(const RawEncoderConfig& cfg, const Checkpoint& ckpt,
                                   const PretrainUtterance& utterance, const std::string& out_prefix);

}  // namespace w2t
