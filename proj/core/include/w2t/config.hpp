#pragma once

#include <cstdint>
#include <string>

#include "w2t/corpus.hpp"
#include "w2t/raw_encoder.hpp"
#include "w2t/seq2seq.hpp"

namespace w2t {

// Run-wide settings. Defaults reproduce the reference recipe: leakiness
// 0.1, 3x256 bidirectional encoder with total halving factor 8, 128-dim
// embedding, 512-unit decoder, momentum 0.9 / lr 0.01 pretraining, Adam lr
// 0.0005, freeze boundary at epoch 10 of 40, beam size 5.
struct RunConfig {
  uint64_t seed = 1234;

  // data / features
  int sample_rate_hz = 16000;
  int frame_ms = 25;
  int hop_ms = 10;
  int64_t n_mels = 40;
  int64_t n_ceps = 13;

  // model
  int64_t conv_channels = 128;
  double leakiness = 0.1;
  int64_t encoder_units = 256;
  int64_t encoder_layers = 3;
  int64_t decoder_units = 512;
  int64_t embed_dim = 128;
  std::string attention = "mlp";
  int64_t attention_hidden = 256;

  // pretraining
  std::string pretrain_target = "multi";  // fbank | mfcc | multi
  int64_t pretrain_epochs = 20;
  double pretrain_lr = 0.01;
  double pretrain_momentum = 0.9;
  int64_t pretrain_batch_utterances = 1;

  // joint training
  double train_lr = 0.0005;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int64_t freeze_epochs = 10;
  int64_t total_epochs = 40;
  int64_t train_batch_utterances = 1;
  int64_t eval_every = 1;
  double early_stop_dev_cer = -1.0;    // < 0 disables
  int64_t early_stop_min_epoch = 0;    // stop no earlier than this many epochs

  // decoding
  int64_t beam_size = 5;
  int64_t max_len_factor = 2;  // max_len = factor * S' + 10

  // synthetic corpus
  double motif_base_hz = 200.0;
  double motif_max_hz = 6500.0;
  double motif_noise_db = -30.0;

  RawEncoderConfig raw_encoder_config() const;
  Seq2SeqConfig seq2seq_config() const;
  SynthSpec synth_spec() const;

  // Hash over the architecture-determining subset (dims, feature geometry,
  // vocabulary); training-schedule settings do not participate, so a
  // pretraining checkpoint remains loadable by the joint trainer.
  uint64_t fingerprint() const;

  // Canonical "key = value" rendering of every field.
  std::string serialize() const;
};

// Parses a key-value config file ('#' comments, dotted keys). Unknown keys
// and malformed values are errors. Missing keys keep their defaults.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

void save_config(const std::string& path, const RunConfig& config);

}  // namespace w2t
