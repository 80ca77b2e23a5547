#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/params.hpp"
#include "w2t/tape.hpp"
#include "w2t/vocab.hpp"

namespace w2t {

enum class AttentionKind : uint8_t { Dot = 1, Bilinear = 2, Mlp = 3 };

AttentionKind attention_kind_from_string(const std::string& s);
std::string attention_kind_to_string(AttentionKind k);

struct Seq2SeqConfig {
  int64_t input_dim = 128;       // trunk output width
  int64_t encoder_units = 256;   // per direction
  int64_t encoder_layers = 3;    // each halves the sequence length
  int64_t decoder_units = 512;
  int64_t embed_dim = 128;
  AttentionKind attention = AttentionKind::Mlp;
  int64_t attention_hidden = 256;
  int64_t vocab_size = Vocabulary::kSize;

  int64_t encoder_output_dim() const { return 2 * encoder_units; }
  // Sequence length after the per-layer halving.
  int64_t subsampled_length(int64_t s) const;
  int64_t min_input_length() const { return int64_t(1) << encoder_layers; }
};

// Encoder states after the recurrent stack: one vector of width
// 2*encoder_units per kept timestep, plus the row-stacked matrix used for
// context computation.
struct EncoderStates {
  std::vector<Tensor> states;  // S' tensors of [2*encoder_units]
  Tensor matrix;               // [S' x 2*encoder_units]
  int64_t length() const { return static_cast<int64_t>(states.size()); }
};

struct DecoderState {
  Tensor hidden;   // [decoder_units]
  Tensor cell;     // [decoder_units]
  Tensor context;  // [encoder_output_dim], fed back into the next input
};

struct DecoderStepResult {
  Tensor logits;  // [vocab_size]
  DecoderState state;
  Tensor attention_weights;  // [S']
};

class Seq2Seq {
 public:
  explicit Seq2Seq(Seq2SeqConfig cfg) : cfg_(std::move(cfg)) {}

  const Seq2SeqConfig& config() const { return cfg_; }

  void init_params(ParameterSet& params, Rng& rng) const;

  // Runs the bidirectional stack over per-frame input vectors, keeping
  // every second timestep after each layer. Errors when the input is too
  // short to survive the halvings.
  EncoderStates encode(Tape& tape, const ParameterSet& params, const std::vector<Tensor>& inputs) const;

  // Alignment score of one encoder state against one decoder state.
  Tensor attention_score(Tape& tape, const ParameterSet& params, const Tensor& enc_state, const Tensor& dec_state) const;

  // Softmax-normalized weights and the weighted sum of encoder states.
  std::pair<Tensor, Tensor> attend(Tape& tape, const ParameterSet& params, const EncoderStates& enc,
                                   const Tensor& dec_state) const;

  DecoderState initial_decoder_state() const;

  // One decode step: input is the previous symbol's embedding concatenated
  // with the previous context; attention uses the updated hidden state; the
  // output projection sees [hidden, context].
  DecoderStepResult decoder_step(Tape& tape, const ParameterSet& params, int64_t prev_symbol,
                                 const DecoderState& state, const EncoderStates& enc) const;

  // Mean per-step negative log-likelihood under teacher forcing. The target
  // sequence must end with eos; eos also serves as the start symbol.
  Tensor teacher_forced_loss(Tape& tape, const ParameterSet& params, const EncoderStates& enc,
                             const std::vector<int64_t>& targets) const;

 private:
  Tensor lstm_gate(Tape& tape, const ParameterSet& params, const std::string& base, const char* gate, const Tensor& x,
                   const Tensor& h) const;
  std::pair<Tensor, Tensor> lstm_cell(Tape& tape, const ParameterSet& params, const std::string& base, const Tensor& x,
                                      const Tensor& h, const Tensor& c) const;
  void init_lstm(ParameterSet& params, const std::string& base, int64_t input_dim, int64_t units, Rng& rng) const;

  Seq2SeqConfig cfg_;
};

}  // namespace w2t
