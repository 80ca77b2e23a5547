#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "w2t/beam.hpp"
#include "w2t/checkpoint.hpp"
#include "w2t/config.hpp"
#include "w2t/corpus.hpp"
#include "w2t/metrics.hpp"
#include "w2t/raw_encoder.hpp"
#include "w2t/seq2seq.hpp"

namespace w2t {

struct TrainUtterance {
  std::string id;
  FrameMatrix frames;
  std::string transcript;
  std::vector<int64_t> targets;  // vocabulary indices, ending with eos
};

TrainUtterance make_train_utterance(std::string id, FrameMatrix frames, const std::string& transcript);

struct JointModel {
  RawEncoder encoder;
  Seq2Seq seq;
  ParameterSet params;
};

// Fresh joint model with seeded initialization (derived from config.seed).
JointModel build_joint_model(const RunConfig& config);

// Trunk + recurrent encoder forward pass without gradient recording.
EncoderStates encode_utterance_states(const JointModel& model, const FrameMatrix& frames);

struct DecodedUtterance {
  std::string id;
  std::string text;
  Hypothesis best;
  std::vector<Hypothesis> nbest;
};

DecodedUtterance decode_one(const JointModel& model, const std::string& id, const FrameMatrix& frames,
                            int64_t beam_size, int64_t max_len_factor);

struct EpochMetrics {
  int64_t epoch = 0;
  double train_loss = 0.0;
  double dev_cer = -1.0;  // -1 when not evaluated this epoch
};

struct TrainResult {
  std::vector<EpochMetrics> trace;
  Checkpoint best_checkpoint;
  int64_t best_epoch = -1;
  double best_dev_cer = -1.0;
  Checkpoint final_checkpoint;
  int64_t frozen_parameter_count = 0;
};

struct TrainHooks {
  // Called at the start of every epoch, before any update of that epoch.
  std::function<void(int64_t epoch, const ParameterSet& params)> on_epoch_start;
  std::ostream* log = nullptr;
};

// Teacher-forced training with Adam. With a transferred checkpoint, trunk
// parameters are loaded and frozen for the first `freeze_epochs` epochs,
// then joint optimization continues to total_epochs. Dev CER is computed by
// beam search on eval epochs; the best-dev checkpoint is retained.
TrainResult train_joint(const RunConfig& config, const std::vector<TrainUtterance>& train,
                        const std::vector<TrainUtterance>& dev, const std::optional<Checkpoint>& transferred,
                        const TrainHooks& hooks = {});

// CSV: epoch,train_loss,dev_cer (dev_cer empty when not evaluated).
void write_metric_trace(const std::string& path, const std::vector<EpochMetrics>& trace);
void write_loss_trace(const std::string& path, const std::vector<std::pair<int64_t, double>>& trace);

}  // namespace w2t
