#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/dsp.hpp"
#include "w2t/params.hpp"
#include "w2t/tape.hpp"

namespace w2t {

struct ConvSpec {
  int64_t channels = 128;
  int64_t filter = 1;
  int64_t stride = 1;
};

// The strided 1-D conv stack plus the stacked-1x1 block that turns one raw
// frame into a channel map. The default geometry takes a 400-sample frame
// through lengths 81 -> 29 -> 20 -> 16. Regression heads (1x1 tanh then 1x1
// identity, mean-pooled) hang off the trunk during pretraining only and are
// excluded from the transferred parameter set.
struct RawEncoderConfig {
  std::vector<ConvSpec> convs = {{128, 80, 4}, {128, 25, 2}, {128, 10, 1}, {128, 5, 1}};
  int64_t nin_channels = 128;
  int64_t nin_layers = 3;
  double leakiness = 0.1;

  // Output channels of the trunk (feeds the recurrent encoder).
  int64_t output_dim() const { return nin_channels; }
  // Minimum frame width the first conv accepts.
  int64_t min_frame_len() const { return convs.empty() ? 1 : convs.front().filter; }

  // Same layout scaled to `channels` everywhere; used by fast test setups.
  static RawEncoderConfig with_channels(int64_t channels);
};

// Parameter paths whose values move into the joint model: the conv layers
// and the stacked-1x1 block, but not the regression heads.
bool is_trunk_path(const std::string& path);
std::vector<std::string> trunk_prefixes();

struct FrameEncoding {
  Tensor feature_map;  // [channels x L_final], after the trunk
  Tensor pooled;       // [channels], mean over time
};

class RawEncoder {
 public:
  explicit RawEncoder(RawEncoderConfig cfg) : cfg_(std::move(cfg)) {}

  const RawEncoderConfig& config() const { return cfg_; }

  void init_params(ParameterSet& params, Rng& rng) const;
  // Adds a named regression head producing `out_dim` channels.
  void init_head(ParameterSet& params, const std::string& head, int64_t out_dim, Rng& rng) const;

  FrameEncoding encode_frame(Tape& tape, const ParameterSet& params, const Tensor& frame) const;
  // Applies head `head` to an already-computed trunk map.
  Tensor apply_head(Tape& tape, const ParameterSet& params, const std::string& head, const Tensor& feature_map) const;
  // Trunk + one head in one pass.
  Tensor predict_features(Tape& tape, const ParameterSet& params, const std::string& head, const Tensor& frame) const;

  // One pooled vector per frame, frames processed independently.
  std::vector<Tensor> encode_utterance(Tape& tape, const ParameterSet& params, const FrameMatrix& fm) const;

  // Wraps one raw frame as a [1 x W] input tensor.
  static Tensor frame_tensor(const FrameMatrix& fm, int64_t index, bool requires_grad = false);

 private:
  RawEncoderConfig cfg_;
};

}  // namespace w2t
