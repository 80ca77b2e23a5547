#include "w2t/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

RawEncoderConfig RunConfig::raw_encoder_config() const {
  RawEncoderConfig cfg = RawEncoderConfig::with_channels(conv_channels);
  cfg.leakiness = leakiness;
  return cfg;
}

Seq2SeqConfig RunConfig::seq2seq_config() const {
  Seq2SeqConfig cfg;
  cfg.input_dim = conv_channels;
  cfg.encoder_units = encoder_units;
  cfg.encoder_layers = encoder_layers;
  cfg.decoder_units = decoder_units;
  cfg.embed_dim = embed_dim;
  cfg.attention = attention_kind_from_string(attention);
  cfg.attention_hidden = attention_hidden;
  return cfg;
}

SynthSpec RunConfig::synth_spec() const {
  SynthSpec spec;
  spec.sample_rate_hz = sample_rate_hz;
  spec.base_hz = motif_base_hz;
  spec.max_hz = motif_max_hz;
  spec.noise_db = motif_noise_db;
  return spec;
}

uint64_t RunConfig::fingerprint() const {
  const std::string arch = strf(
      "sr=%d;frame=%d;hop=%d;mels=%lld;ceps=%lld;conv=%lld;leak=%.17g;enc=%lldx%lld;dec=%lld;embed=%lld;att=%s,%lld;vocab=32",
      sample_rate_hz, frame_ms, hop_ms, (long long)n_mels, (long long)n_ceps, (long long)conv_channels, leakiness,
      (long long)encoder_units, (long long)encoder_layers, (long long)decoder_units, (long long)embed_dim,
      attention.c_str(), (long long)attention_hidden);
  return fnv1a64(arch);
}

namespace {

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument(strf("config: '%s' expects an integer, got '%s'", key.c_str(), v.c_str()));
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument(strf("config: '%s' expects a number, got '%s'", key.c_str(), v.c_str()));
  }
}

std::string fmt_double(double v) { return strf("%.17g", v); }

const std::map<std::string, Field>& field_table() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    auto add_int = [&t](const std::string& key, int64_t RunConfig::*member) {
      t[key] = Field{[member](const RunConfig& c) { return std::to_string(c.*member); },
                     [member, key](RunConfig& c, const std::string& v) { c.*member = parse_int(key, v); }};
    };
    auto add_i32 = [&t](const std::string& key, int RunConfig::*member) {
      t[key] = Field{[member](const RunConfig& c) { return std::to_string(c.*member); },
                     [member, key](RunConfig& c, const std::string& v) { c.*member = static_cast<int>(parse_int(key, v)); }};
    };
    auto add_dbl = [&t](const std::string& key, double RunConfig::*member) {
      t[key] = Field{[member](const RunConfig& c) { return fmt_double(c.*member); },
                     [member, key](RunConfig& c, const std::string& v) { c.*member = parse_double(key, v); }};
    };
    auto add_str = [&t](const std::string& key, std::string RunConfig::*member) {
      t[key] = Field{[member](const RunConfig& c) { return c.*member; },
                     [member](RunConfig& c, const std::string& v) { c.*member = v; }};
    };

    t["seed"] = Field{[](const RunConfig& c) { return std::to_string(c.seed); },
                      [](RunConfig& c, const std::string& v) { c.seed = static_cast<uint64_t>(parse_int("seed", v)); }};
    add_i32("data.sample_rate_hz", &RunConfig::sample_rate_hz);
    add_i32("data.frame_ms", &RunConfig::frame_ms);
    add_i32("data.hop_ms", &RunConfig::hop_ms);
    add_int("features.n_mels", &RunConfig::n_mels);
    add_int("features.n_ceps", &RunConfig::n_ceps);
    add_int("model.conv_channels", &RunConfig::conv_channels);
    add_dbl("model.leakiness", &RunConfig::leakiness);
    add_int("model.encoder_units", &RunConfig::encoder_units);
    add_int("model.encoder_layers", &RunConfig::encoder_layers);
    add_int("model.decoder_units", &RunConfig::decoder_units);
    add_int("model.embed_dim", &RunConfig::embed_dim);
    add_str("model.attention", &RunConfig::attention);
    add_int("model.attention_hidden", &RunConfig::attention_hidden);
    add_str("pretrain.target", &RunConfig::pretrain_target);
    add_int("pretrain.epochs", &RunConfig::pretrain_epochs);
    add_dbl("pretrain.lr", &RunConfig::pretrain_lr);
    add_dbl("pretrain.momentum", &RunConfig::pretrain_momentum);
    add_int("pretrain.batch_utterances", &RunConfig::pretrain_batch_utterances);
    add_dbl("train.lr", &RunConfig::train_lr);
    add_dbl("train.adam_beta1", &RunConfig::adam_beta1);
    add_dbl("train.adam_beta2", &RunConfig::adam_beta2);
    add_dbl("train.adam_eps", &RunConfig::adam_eps);
    add_int("train.freeze_epochs", &RunConfig::freeze_epochs);
    add_int("train.total_epochs", &RunConfig::total_epochs);
    add_int("train.batch_utterances", &RunConfig::train_batch_utterances);
    add_int("train.eval_every", &RunConfig::eval_every);
    add_dbl("train.early_stop_dev_cer", &RunConfig::early_stop_dev_cer);
    add_int("train.early_stop_min_epoch", &RunConfig::early_stop_min_epoch);
    add_int("decode.beam_size", &RunConfig::beam_size);
    add_int("decode.max_len_factor", &RunConfig::max_len_factor);
    add_dbl("corpus.motif_base_hz", &RunConfig::motif_base_hz);
    add_dbl("corpus.motif_max_hz", &RunConfig::motif_max_hz);
    add_dbl("corpus.motif_noise_db", &RunConfig::motif_noise_db);
    return t;
  }();
  return table;
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* key) {
    if (v <= 0) throw std::invalid_argument(strf("config: '%s' must be positive", key));
  };
  positive(c.sample_rate_hz, "data.sample_rate_hz");
  positive(c.frame_ms, "data.frame_ms");
  positive(c.hop_ms, "data.hop_ms");
  positive(static_cast<double>(c.n_mels), "features.n_mels");
  positive(static_cast<double>(c.n_ceps), "features.n_ceps");
  if (c.n_ceps > c.n_mels) throw std::invalid_argument("config: features.n_ceps must not exceed features.n_mels");
  positive(static_cast<double>(c.conv_channels), "model.conv_channels");
  if (c.leakiness < 0 || c.leakiness >= 1) throw std::invalid_argument("config: model.leakiness must be in [0, 1)");
  positive(static_cast<double>(c.encoder_units), "model.encoder_units");
  positive(static_cast<double>(c.encoder_layers), "model.encoder_layers");
  positive(static_cast<double>(c.decoder_units), "model.decoder_units");
  positive(static_cast<double>(c.embed_dim), "model.embed_dim");
  attention_kind_from_string(c.attention);  // validates the name
  positive(static_cast<double>(c.attention_hidden), "model.attention_hidden");
  if (c.pretrain_target != "fbank" && c.pretrain_target != "mfcc" && c.pretrain_target != "multi") {
    throw std::invalid_argument(strf("config: pretrain.target must be fbank|mfcc|multi, got '%s'", c.pretrain_target.c_str()));
  }
  positive(c.pretrain_lr, "pretrain.lr");
  if (c.pretrain_momentum < 0 || c.pretrain_momentum >= 1) {
    throw std::invalid_argument("config: pretrain.momentum must be in [0, 1)");
  }
  positive(c.train_lr, "train.lr");
  if (c.freeze_epochs < 0) throw std::invalid_argument("config: train.freeze_epochs must be >= 0");
  positive(static_cast<double>(c.total_epochs), "train.total_epochs");
  positive(static_cast<double>(c.beam_size), "decode.beam_size");
  positive(static_cast<double>(c.eval_every), "train.eval_every");
  positive(static_cast<double>(c.pretrain_batch_utterances), "pretrain.batch_utterances");
  positive(static_cast<double>(c.train_batch_utterances), "train.batch_utterances");
}

}  // namespace

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [key, field] : field_table()) {
    out += key + " = " + field.get(*this) + "\n";
  }
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream is(text);
  std::string line;
  int64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(strf("config: line %lld is not 'key = value'", (long long)lineno));
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const auto& table = field_table();
    auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument(strf("config: unknown key '%s'", key.c_str()));
    it->second.set(config, value);
  }
  validate(config);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(strf("config: cannot open '%s'", path.c_str()));
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

void save_config(const std::string& path, const RunConfig& config) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(strf("config: cannot write '%s'", path.c_str()));
  os << config.serialize();
  if (!os) throw std::runtime_error(strf("config: write failed for '%s'", path.c_str()));
}

}  // namespace w2t
