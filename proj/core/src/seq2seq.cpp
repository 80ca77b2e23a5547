#include "w2t/seq2seq.hpp"

#include <stdexcept>

namespace w2t {

AttentionKind attention_kind_from_string(const std::string& s) {
  if (s == "dot") return AttentionKind::Dot;
  if (s == "bilinear") return AttentionKind::Bilinear;
  if (s == "mlp") return AttentionKind::Mlp;
  throw std::invalid_argument(strf("attention: unknown variant '%s' (expected dot|bilinear|mlp)", s.c_str()));
}

std::string attention_kind_to_string(AttentionKind k) {
  switch (k) {
    case AttentionKind::Dot: return "dot";
    case AttentionKind::Bilinear: return "bilinear";
    case AttentionKind::Mlp: return "mlp";
  }
  return "?";
}

int64_t Seq2SeqConfig::subsampled_length(int64_t s) const {
  for (int64_t l = 0; l < encoder_layers; ++l) s /= 2;
  return s;
}

void Seq2Seq::init_lstm(ParameterSet& params, const std::string& base, int64_t input_dim, int64_t units,
                        Rng& rng) const {
  for (const char* gate : {"i", "f", "g", "o"}) {
    params.add(strf("%s.wx_%s", base.c_str(), gate), glorot_uniform(rng, {units, input_dim}, input_dim, units));
    params.add(strf("%s.wh_%s", base.c_str(), gate), glorot_uniform(rng, {units, units}, units, units));
    params.add(strf("%s.b_%s", base.c_str(), gate), Tensor::zeros({units}));
  }
}

void Seq2Seq::init_params(ParameterSet& params, Rng& rng) const {
  // Encoder stack.
  int64_t in_dim = cfg_.input_dim;
  for (int64_t layer = 0; layer < cfg_.encoder_layers; ++layer) {
    for (const char* dir : {"fw", "bw"}) {
      init_lstm(params, strf("enc.lstm%lld.%s", (long long)layer, dir), in_dim, cfg_.encoder_units, rng);
    }
    in_dim = cfg_.encoder_output_dim();
  }

  // Decoder.
  params.add("dec.embed", glorot_uniform(rng, {cfg_.vocab_size, cfg_.embed_dim}, cfg_.vocab_size, cfg_.embed_dim));
  const int64_t dec_in = cfg_.embed_dim + cfg_.encoder_output_dim();
  init_lstm(params, "dec.lstm", dec_in, cfg_.decoder_units, rng);

  // Attention parameters per variant.
  const int64_t m = cfg_.encoder_output_dim();
  const int64_t n = cfg_.decoder_units;
  if (cfg_.attention == AttentionKind::Bilinear) {
    params.add("dec.attn.w", glorot_uniform(rng, {m, n}, n, m));
  } else if (cfg_.attention == AttentionKind::Mlp) {
    params.add("dec.attn.w", glorot_uniform(rng, {cfg_.attention_hidden, m + n}, m + n, cfg_.attention_hidden));
    params.add("dec.attn.v", glorot_uniform(rng, {cfg_.attention_hidden}, cfg_.attention_hidden, 1));
  } else if (m != n) {
    throw std::invalid_argument(strf("attention: dot variant needs matching widths, encoder %lld vs decoder %lld",
                                     (long long)m, (long long)n));
  }

  // Output projection over [hidden, context].
  params.add("dec.out.weight", glorot_uniform(rng, {cfg_.vocab_size, n + m}, n + m, cfg_.vocab_size));
  params.add("dec.out.bias", Tensor::zeros({cfg_.vocab_size}));
}

Tensor Seq2Seq::lstm_gate(Tape& tape, const ParameterSet& params, const std::string& base, const char* gate,
                          const Tensor& x, const Tensor& h) const {
  Tensor pre = tape.add(tape.matmul(params.get(strf("%s.wx_%s", base.c_str(), gate)), x),
                        tape.matmul(params.get(strf("%s.wh_%s", base.c_str(), gate)), h));
  return tape.add(pre, params.get(strf("%s.b_%s", base.c_str(), gate)));
}

std::pair<Tensor, Tensor> Seq2Seq::lstm_cell(Tape& tape, const ParameterSet& params, const std::string& base,
                                             const Tensor& x, const Tensor& h, const Tensor& c) const {
  const Tensor i = tape.sigmoid(lstm_gate(tape, params, base, "i", x, h));
  const Tensor f = tape.sigmoid(lstm_gate(tape, params, base, "f", x, h));
  const Tensor g = tape.tanh(lstm_gate(tape, params, base, "g", x, h));
  const Tensor o = tape.sigmoid(lstm_gate(tape, params, base, "o", x, h));
  const Tensor c_new = tape.add(tape.mul(f, c), tape.mul(i, g));
  const Tensor h_new = tape.mul(o, tape.tanh(c_new));
  return {h_new, c_new};
}

EncoderStates Seq2Seq::encode(Tape& tape, const ParameterSet& params, const std::vector<Tensor>& inputs) const {
  const int64_t s = static_cast<int64_t>(inputs.size());
  if (s < cfg_.min_input_length()) {
    throw std::invalid_argument(strf("encode: utterance too short after subsampling (%lld frames, need >= %lld)",
                                     (long long)s, (long long)cfg_.min_input_length()));
  }

  std::vector<Tensor> seq = inputs;
  const int64_t units = cfg_.encoder_units;
  for (int64_t layer = 0; layer < cfg_.encoder_layers; ++layer) {
    const std::string fw = strf("enc.lstm%lld.fw", (long long)layer);
    const std::string bw = strf("enc.lstm%lld.bw", (long long)layer);
    const int64_t len = static_cast<int64_t>(seq.size());

    std::vector<Tensor> fwd(static_cast<size_t>(len));
    {
      Tensor h = Tensor::zeros({units}), c = Tensor::zeros({units});
      for (int64_t t = 0; t < len; ++t) {
        auto [h2, c2] = lstm_cell(tape, params, fw, seq[static_cast<size_t>(t)], h, c);
        h = h2;
        c = c2;
        fwd[static_cast<size_t>(t)] = h;
      }
    }
    std::vector<Tensor> bwd(static_cast<size_t>(len));
    {
      Tensor h = Tensor::zeros({units}), c = Tensor::zeros({units});
      for (int64_t t = len - 1; t >= 0; --t) {
        auto [h2, c2] = lstm_cell(tape, params, bw, seq[static_cast<size_t>(t)], h, c);
        h = h2;
        c = c2;
        bwd[static_cast<size_t>(t)] = h;
      }
    }

    // Keep timesteps 1, 3, 5, ... so each layer emits floor(len/2) steps.
    std::vector<Tensor> next;
    next.reserve(static_cast<size_t>(len / 2));
    for (int64_t t = 1; t < len; t += 2) {
      next.push_back(tape.concat(fwd[static_cast<size_t>(t)], bwd[static_cast<size_t>(t)]));
    }
    seq = std::move(next);
  }

  EncoderStates enc;
  enc.states = std::move(seq);
  enc.matrix = tape.stack_rows(enc.states);
  return enc;
}

Tensor Seq2Seq::attention_score(Tape& tape, const ParameterSet& params, const Tensor& enc_state,
                                const Tensor& dec_state) const {
  switch (cfg_.attention) {
    case AttentionKind::Dot:
      if (enc_state.numel() != dec_state.numel()) {
        throw std::invalid_argument(strf("attention: dot variant needs matching widths, got %lld and %lld",
                                         (long long)enc_state.numel(), (long long)dec_state.numel()));
      }
      return tape.matmul(enc_state, dec_state);
    case AttentionKind::Bilinear:
      return tape.matmul(tape.matmul(enc_state, params.get("dec.attn.w")), dec_state);
    case AttentionKind::Mlp: {
      const Tensor joined = tape.concat(enc_state, dec_state);
      return tape.matmul(params.get("dec.attn.v"), tape.tanh(tape.matmul(params.get("dec.attn.w"), joined)));
    }
  }
  throw std::logic_error("attention: unreachable");
}

std::pair<Tensor, Tensor> Seq2Seq::attend(Tape& tape, const ParameterSet& params, const EncoderStates& enc,
                                          const Tensor& dec_state) const {
  if (enc.length() < 1) throw std::invalid_argument("attend: no encoder states");
  std::vector<Tensor> scores;
  scores.reserve(static_cast<size_t>(enc.length()));
  for (const Tensor& state : enc.states) {
    scores.push_back(attention_score(tape, params, state, dec_state));
  }
  const Tensor weights = tape.softmax(tape.concat(scores));
  const Tensor context = tape.matmul(weights, enc.matrix);
  return {weights, context};
}

DecoderState Seq2Seq::initial_decoder_state() const {
  DecoderState st;
  st.hidden = Tensor::zeros({cfg_.decoder_units});
  st.cell = Tensor::zeros({cfg_.decoder_units});
  st.context = Tensor::zeros({cfg_.encoder_output_dim()});
  return st;
}

DecoderStepResult Seq2Seq::decoder_step(Tape& tape, const ParameterSet& params, int64_t prev_symbol,
                                        const DecoderState& state, const EncoderStates& enc) const {
  if (prev_symbol < 0 || prev_symbol >= cfg_.vocab_size) {
    throw std::invalid_argument(strf("decoder_step: unknown symbol %lld", (long long)prev_symbol));
  }
  const Tensor embedded = tape.embedding(params.get("dec.embed"), prev_symbol);
  const Tensor input = tape.concat(embedded, state.context);
  auto [h, c] = lstm_cell(tape, params, "dec.lstm", input, state.hidden, state.cell);
  auto [weights, context] = attend(tape, params, enc, h);
  const Tensor proj_in = tape.concat(h, context);
  const Tensor logits = tape.add(tape.matmul(params.get("dec.out.weight"), proj_in), params.get("dec.out.bias"));

  DecoderStepResult res;
  res.logits = logits;
  res.state = DecoderState{h, c, context};
  res.attention_weights = weights;
  return res;
}

Tensor Seq2Seq::teacher_forced_loss(Tape& tape, const ParameterSet& params, const EncoderStates& enc,
                                    const std::vector<int64_t>& targets) const {
  if (targets.empty()) throw std::invalid_argument("teacher_forced_loss: empty target sequence");
  if (targets.back() != Vocabulary::kEos) {
    throw std::invalid_argument("teacher_forced_loss: target sequence must end with eos");
  }
  DecoderState state = initial_decoder_state();
  std::vector<Tensor> logit_rows;
  logit_rows.reserve(targets.size());
  int64_t prev = Vocabulary::kEos;  // start-of-sequence convention
  for (int64_t target : targets) {
    DecoderStepResult step = decoder_step(tape, params, prev, state, enc);
    logit_rows.push_back(step.logits);
    state = step.state;
    prev = target;
  }
  return tape.cross_entropy(tape.stack_rows(logit_rows), targets);
}

}  // namespace w2t
