#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "w2t/optim.hpp"
#include "w2t/params.hpp"

namespace w2t {

// Versioned snapshot of named parameters plus training metadata.
// Little-endian binary with a magic string and length-prefixed named fp64
// arrays; save -> load -> save is byte-identical.
struct Checkpoint {
  uint32_t version = 1;
  uint64_t config_fingerprint = 0;
  int64_t epoch = 0;
  std::string rng_state;
  std::map<std::string, Tensor> params;  // values only
  std::optional<OptimizerSnapshot> optimizer;

  static Checkpoint from_params(const ParameterSet& params, uint64_t fingerprint, int64_t epoch);

  // Copies all stored values into matching parameters; throws if a stored
  // path is absent from the model or shaped differently.
  void load_into(ParameterSet& params) const;

  // Keeps only parameters whose path matches the trunk prefixes; optimizer
  // state is dropped.
  Checkpoint restricted_to_trunk() const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace w2t
