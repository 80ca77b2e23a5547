#include "w2t/raw_encoder.hpp"

#include <stdexcept>

namespace w2t {

RawEncoderConfig RawEncoderConfig::with_channels(int64_t channels) {
  RawEncoderConfig cfg;
  for (ConvSpec& c : cfg.convs) c.channels = channels;
  cfg.nin_channels = channels;
  return cfg;
}

bool is_trunk_path(const std::string& path) {
  for (const std::string& prefix : trunk_prefixes()) {
    if (path.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

std::vector<std::string> trunk_prefixes() { return {"conv1.", "conv2.", "conv3.", "conv4.", "nin1."}; }

void RawEncoder::init_params(ParameterSet& params, Rng& rng) const {
  int64_t in_ch = 1;
  for (size_t i = 0; i < cfg_.convs.size(); ++i) {
    const ConvSpec& c = cfg_.convs[i];
    const std::string name = strf("conv%zu", i + 1);
    params.add(name + ".weight",
               glorot_uniform(rng, {c.channels, in_ch, c.filter}, in_ch * c.filter, c.channels * c.filter));
    params.add(name + ".bias", Tensor::zeros({c.channels}));
    in_ch = c.channels;
  }
  for (int64_t i = 0; i < cfg_.nin_layers; ++i) {
    const std::string name = strf("nin1.%lld", (long long)i);
    params.add(name + ".weight", glorot_uniform(rng, {cfg_.nin_channels, in_ch, 1}, in_ch, cfg_.nin_channels));
    params.add(name + ".bias", Tensor::zeros({cfg_.nin_channels}));
    in_ch = cfg_.nin_channels;
  }
}

void RawEncoder::init_head(ParameterSet& params, const std::string& head, int64_t out_dim, Rng& rng) const {
  const int64_t ch = cfg_.nin_channels;
  const std::string base = "head." + head;
  params.add(base + ".0.weight", glorot_uniform(rng, {ch, ch, 1}, ch, ch));
  params.add(base + ".0.bias", Tensor::zeros({ch}));
  params.add(base + ".1.weight", glorot_uniform(rng, {out_dim, ch, 1}, ch, out_dim));
  params.add(base + ".1.bias", Tensor::zeros({out_dim}));
}

FrameEncoding RawEncoder::encode_frame(Tape& tape, const ParameterSet& params, const Tensor& frame) const {
  if (frame.ndim() != 2 || frame.size(0) != 1) {
    throw std::invalid_argument(strf("encode_frame: frame must be [1 x W], got %s", shape_str(frame.shape()).c_str()));
  }
  Tensor x = frame;
  for (size_t i = 0; i < cfg_.convs.size(); ++i) {
    const std::string name = strf("conv%zu", i + 1);
    x = tape.conv1d(x, params.get(name + ".weight"), params.get(name + ".bias"), cfg_.convs[i].stride);
    x = tape.lrelu(x, cfg_.leakiness);
  }
  for (int64_t i = 0; i < cfg_.nin_layers; ++i) {
    const std::string name = strf("nin1.%lld", (long long)i);
    x = tape.conv1d(x, params.get(name + ".weight"), params.get(name + ".bias"), 1);
    x = tape.lrelu(x, cfg_.leakiness);
  }
  FrameEncoding enc;
  enc.feature_map = x;
  enc.pooled = tape.mean_pool_time(x);
  return enc;
}

Tensor RawEncoder::apply_head(Tape& tape, const ParameterSet& params, const std::string& head,
                              const Tensor& feature_map) const {
  const std::string base = "head." + head;
  if (!params.has(base + ".0.weight")) {
    throw std::invalid_argument(strf("apply_head: head '%s' has no parameters", head.c_str()));
  }
  Tensor x = tape.conv1d(feature_map, params.get(base + ".0.weight"), params.get(base + ".0.bias"), 1);
  x = tape.tanh(x);
  x = tape.conv1d(x, params.get(base + ".1.weight"), params.get(base + ".1.bias"), 1);
  return tape.mean_pool_time(x);
}

Tensor RawEncoder::predict_features(Tape& tape, const ParameterSet& params, const std::string& head,
                                    const Tensor& frame) const {
  return apply_head(tape, params, head, encode_frame(tape, params, frame).feature_map);
}

std::vector<Tensor> RawEncoder::encode_utterance(Tape& tape, const ParameterSet& params, const FrameMatrix& fm) const {
  std::vector<Tensor> out;
  out.reserve(static_cast<size_t>(fm.num_frames));
  for (int64_t s = 0; s < fm.num_frames; ++s) {
    out.push_back(encode_frame(tape, params, frame_tensor(fm, s)).pooled);
  }
  return out;
}

Tensor RawEncoder::frame_tensor(const FrameMatrix& fm, int64_t index, bool requires_grad) {
  std::vector<double> row(fm.frame(index), fm.frame(index) + fm.frame_len);
  return Tensor::from({1, fm.frame_len}, std::move(row), requires_grad);
}

}  // namespace w2t
