#include "w2t/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "w2t/raw_encoder.hpp"

namespace w2t {

namespace {
constexpr char kMagic[8] = {'W', '2', 'T', 'C', 'K', 'P', 'T', '\0'};
}

Checkpoint Checkpoint::from_params(const ParameterSet& params, uint64_t fingerprint, int64_t epoch) {
  Checkpoint ckpt;
  ckpt.config_fingerprint = fingerprint;
  ckpt.epoch = epoch;
  for (const auto& [path, t] : params.all()) ckpt.params.emplace(path, t.clone());
  return ckpt;
}

void Checkpoint::load_into(ParameterSet& target) const {
  for (const auto& [path, stored] : params) {
    if (!target.has(path)) {
      throw std::runtime_error(strf("checkpoint: parameter '%s' does not exist in the model", path.c_str()));
    }
    Tensor t = target.get(path);
    if (t.shape() != stored.shape()) {
      throw std::runtime_error(strf("checkpoint: parameter '%s' has shape %s, model expects %s", path.c_str(),
                                    shape_str(stored.shape()).c_str(), shape_str(t.shape()).c_str()));
    }
    t.values() = stored.values();
  }
}

Checkpoint Checkpoint::restricted_to_trunk() const {
  Checkpoint out;
  out.version = version;
  out.config_fingerprint = config_fingerprint;
  out.epoch = epoch;
  out.rng_state = rng_state;
  for (const auto& [path, t] : params) {
    if (is_trunk_path(path)) out.params.emplace(path, t.clone());
  }
  for (const std::string& prefix : trunk_prefixes()) {
    bool found = false;
    for (const auto& [path, t] : out.params) {
      if (path.rfind(prefix, 0) == 0) {
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error(strf("checkpoint: expected trunk parameters under '%s'", prefix.c_str()));
  }
  return out;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(strf("checkpoint: cannot write '%s'", path.c_str()));
  os.write(kMagic, 8);
  put_u32(os, ckpt.version);
  put_u64(os, ckpt.config_fingerprint);
  put_i64(os, ckpt.epoch);
  put_string(os, ckpt.rng_state);

  put_u64(os, ckpt.params.size());
  for (const auto& [name, t] : ckpt.params) {
    put_string(os, name);
    put_u32(os, static_cast<uint32_t>(t.ndim()));
    for (int64_t d : t.shape()) put_i64(os, d);
    put_f64_array(os, t.values());
  }

  if (ckpt.optimizer.has_value()) {
    const OptimizerSnapshot& snap = *ckpt.optimizer;
    put_u8(os, static_cast<uint8_t>(snap.config.kind));
    put_f64(os, snap.config.learning_rate);
    put_f64(os, snap.config.momentum);
    put_f64(os, snap.config.beta1);
    put_f64(os, snap.config.beta2);
    put_f64(os, snap.config.eps);
    put_i64(os, snap.step_count);
    put_u64(os, snap.buffers.size());
    for (const auto& [name, bufs] : snap.buffers) {
      put_string(os, name);
      put_f64_array(os, bufs.first);
      put_f64_array(os, bufs.second);
    }
  } else {
    put_u8(os, 0);
  }
  if (!os) throw std::runtime_error(strf("checkpoint: write failed for '%s'", path.c_str()));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(strf("checkpoint: cannot open '%s'", path.c_str()));
  char magic[8];
  is.read(magic, 8);
  if (is.gcount() != 8 || !std::equal(magic, magic + 8, kMagic)) {
    throw std::runtime_error(strf("checkpoint: '%s' has wrong magic", path.c_str()));
  }

  Checkpoint ckpt;
  ckpt.version = get_u32(is);
  if (ckpt.version != 1) throw std::runtime_error(strf("checkpoint: unsupported version %u", ckpt.version));
  ckpt.config_fingerprint = get_u64(is);
  ckpt.epoch = get_i64(is);
  ckpt.rng_state = get_string(is);

  const uint64_t count = get_u64(is);
  for (uint64_t i = 0; i < count; ++i) {
    const std::string name = get_string(is);
    const uint32_t ndim = get_u32(is);
    Shape shape(ndim);
    for (uint32_t d = 0; d < ndim; ++d) shape[d] = get_i64(is);
    std::vector<double> values = get_f64_array(is);
    ckpt.params.emplace(name, Tensor::from(std::move(shape), std::move(values)));
  }

  const uint8_t opt_kind = get_u8(is);
  if (opt_kind != 0) {
    OptimizerSnapshot snap;
    snap.config.kind = static_cast<OptimizerKind>(opt_kind);
    snap.config.learning_rate = get_f64(is);
    snap.config.momentum = get_f64(is);
    snap.config.beta1 = get_f64(is);
    snap.config.beta2 = get_f64(is);
    snap.config.eps = get_f64(is);
    snap.step_count = get_i64(is);
    const uint64_t nbuf = get_u64(is);
    for (uint64_t i = 0; i < nbuf; ++i) {
      const std::string name = get_string(is);
      std::vector<double> m1 = get_f64_array(is);
      std::vector<double> m2 = get_f64_array(is);
      snap.buffers.emplace(name, std::make_pair(std::move(m1), std::move(m2)));
    }
    ckpt.optimizer = std::move(snap);
  }
  return ckpt;
}

}  // namespace w2t
