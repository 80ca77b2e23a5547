#include "w2t/train.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "w2t/optim.hpp"
#include "w2t/vocab.hpp"

namespace w2t {

namespace {
constexpr uint64_t kJointInitStream = 0x6a6f696e74;
}

TrainUtterance make_train_utterance(std::string id, FrameMatrix frames, const std::string& transcript) {
  TrainUtterance u;
  u.id = std::move(id);
  u.frames = std::move(frames);
  u.transcript = normalize_transcript(transcript);
  u.targets = Vocabulary::instance().encode(u.transcript);
  u.targets.push_back(Vocabulary::kEos);
  return u;
}

JointModel build_joint_model(const RunConfig& config) {
  JointModel model{RawEncoder(config.raw_encoder_config()), Seq2Seq(config.seq2seq_config()), ParameterSet{}};
  Rng rng(mix_seed(config.seed, kJointInitStream));
  model.encoder.init_params(model.params, rng);
  model.seq.init_params(model.params, rng);
  return model;
}

EncoderStates encode_utterance_states(const JointModel& model, const FrameMatrix& frames) {
  Tape tape(/*recording=*/false);
  const std::vector<Tensor> pooled = model.encoder.encode_utterance(tape, model.params, frames);
  return model.seq.encode(tape, model.params, pooled);
}

DecodedUtterance decode_one(const JointModel& model, const std::string& id, const FrameMatrix& frames,
                            int64_t beam_size, int64_t max_len_factor) {
  const EncoderStates enc = encode_utterance_states(model, frames);
  const int64_t max_len = max_len_factor * enc.length() + 10;
  const BeamResult beam = beam_search(model.seq, model.params, enc, beam_size, max_len);

  DecodedUtterance out;
  out.id = id;
  out.text = Vocabulary::instance().decode(beam.best.symbols);
  out.best = beam.best;
  out.nbest = beam.nbest;
  return out;
}

namespace {

double evaluate_dev_cer(const JointModel& model, const std::vector<TrainUtterance>& dev, const RunConfig& config) {
  EditStats total;
  for (const TrainUtterance& u : dev) {
    const DecodedUtterance d = decode_one(model, u.id, u.frames, config.beam_size, config.max_len_factor);
    total.accumulate(score_pair(d.text, u.transcript));
  }
  return total.cer();
}

}  // namespace

TrainResult train_joint(const RunConfig& config, const std::vector<TrainUtterance>& train,
                        const std::vector<TrainUtterance>& dev, const std::optional<Checkpoint>& transferred,
                        const TrainHooks& hooks) {
  if (train.empty()) throw std::invalid_argument("train_joint: empty training corpus");

  JointModel model = build_joint_model(config);
  Rng rng(mix_seed(config.seed, kJointInitStream + 1));

  TrainResult result;
  if (transferred.has_value()) {
    if (transferred->config_fingerprint != config.fingerprint()) {
      throw std::runtime_error(strf("train_joint: checkpoint fingerprint %016llx does not match config fingerprint %016llx",
                                    (unsigned long long)transferred->config_fingerprint,
                                    (unsigned long long)config.fingerprint()));
    }
    // Every trunk path must be supplied; extra paths (e.g. regression
    // heads) are ignored.
    Checkpoint trunk = transferred->restricted_to_trunk();
    for (const auto& [path, t] : model.params.all()) {
      if (is_trunk_path(path) && trunk.params.count(path) == 0) {
        throw std::runtime_error(strf("train_joint: transferred checkpoint is missing trunk parameter '%s'", path.c_str()));
      }
    }
    trunk.load_into(model.params);
    for (const std::string& prefix : trunk_prefixes()) model.params.freeze_prefix(prefix);
    result.frozen_parameter_count = model.params.frozen_parameter_count();
    if (hooks.log != nullptr) {
      (*hooks.log) << strf("frozen: %lld params\n", (long long)result.frozen_parameter_count);
    }
  }

  Optimizer opt(OptimizerConfig::adam(config.train_lr, config.adam_beta1, config.adam_beta2, config.adam_eps));

  for (int64_t epoch = 0; epoch < config.total_epochs; ++epoch) {
    if (hooks.on_epoch_start) hooks.on_epoch_start(epoch, model.params);
    if (transferred.has_value() && epoch == config.freeze_epochs && !model.params.frozen_paths().empty()) {
      model.params.unfreeze_all();
      if (hooks.log != nullptr) (*hooks.log) << strf("unfroze transferred parameters at epoch %lld\n", (long long)epoch);
    }

    double epoch_loss = 0.0;
    int64_t in_batch = 0;
    for (size_t ui = 0; ui < train.size(); ++ui) {
      const TrainUtterance& u = train[ui];
      Tape tape;
      const std::vector<Tensor> pooled = model.encoder.encode_utterance(tape, model.params, u.frames);
      const EncoderStates enc = model.seq.encode(tape, model.params, pooled);
      const Tensor loss = model.seq.teacher_forced_loss(tape, model.params, enc, u.targets);
      epoch_loss += loss.item();
      tape.backward(loss);
      ++in_batch;
      if (in_batch == config.train_batch_utterances || ui + 1 == train.size()) {
        model.params.scale_grads(1.0 / static_cast<double>(in_batch));
        opt.step(model.params);
        in_batch = 0;
      }
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = epoch_loss / static_cast<double>(train.size());

    const bool eval_now = !dev.empty() && (epoch % config.eval_every == 0 || epoch + 1 == config.total_epochs);
    if (eval_now) {
      metrics.dev_cer = evaluate_dev_cer(model, dev, config);
      if (result.best_epoch < 0 || metrics.dev_cer < result.best_dev_cer) {
        result.best_epoch = epoch;
        result.best_dev_cer = metrics.dev_cer;
        result.best_checkpoint = Checkpoint::from_params(model.params, config.fingerprint(), epoch);
        result.best_checkpoint.rng_state = rng.serialize();
        result.best_checkpoint.optimizer = opt.snapshot();
      }
    }
    result.trace.push_back(metrics);
    if (hooks.log != nullptr) {
      if (metrics.dev_cer >= 0.0) {
        (*hooks.log) << strf("epoch %lld: train_loss %.6f dev_cer %.4f\n", (long long)epoch, metrics.train_loss, metrics.dev_cer);
      } else {
        (*hooks.log) << strf("epoch %lld: train_loss %.6f\n", (long long)epoch, metrics.train_loss);
      }
    }

    if (config.early_stop_dev_cer >= 0.0 && metrics.dev_cer >= 0.0 && metrics.dev_cer <= config.early_stop_dev_cer &&
        epoch + 1 >= config.early_stop_min_epoch) {
      break;
    }
  }

  result.final_checkpoint = Checkpoint::from_params(model.params, config.fingerprint(),
                                                    result.trace.empty() ? 0 : result.trace.back().epoch + 1);
  result.final_checkpoint.rng_state = rng.serialize();
  result.final_checkpoint.optimizer = opt.snapshot();
  if (result.best_epoch < 0) {
    result.best_checkpoint = result.final_checkpoint;
    result.best_epoch = result.final_checkpoint.epoch;
  }
  return result;
}

void write_metric_trace(const std::string& path, const std::vector<EpochMetrics>& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(strf("trace: cannot write '%s'", path.c_str()));
  os << "epoch,train_loss,dev_cer\n";
  for (const EpochMetrics& m : trace) {
    if (m.dev_cer >= 0.0) {
      os << strf("%lld,%.17g,%.17g\n", (long long)m.epoch, m.train_loss, m.dev_cer);
    } else {
      os << strf("%lld,%.17g,\n", (long long)m.epoch, m.train_loss);
    }
  }
  if (!os) throw std::runtime_error(strf("trace: write failed for '%s'", path.c_str()));
}

void write_loss_trace(const std::string& path, const std::vector<std::pair<int64_t, double>>& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(strf("trace: cannot write '%s'", path.c_str()));
  os << "epoch,mean_loss\n";
  for (const auto& [epoch, loss] : trace) os << strf("%lld,%.17g\n", (long long)epoch, loss);
  if (!os) throw std::runtime_error(strf("trace: write failed for '%s'", path.c_str()));
}

}  // namespace w2t
