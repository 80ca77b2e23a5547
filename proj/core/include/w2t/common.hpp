#pragma once

#include <cstdarg>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace w2t {

// printf-style formatting into a std::string.
std::string strf(const char* fmt, ...);

// FNV-1a 64-bit hash, used for config fingerprints.
uint64_t fnv1a64(const std::string& s);

// SplitMix64 step, used to derive independent seeds from a base seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Deterministic random source. All distribution transforms are implemented
// here (not via std:: distributions, whose output is implementation-defined)
// so that a seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double normal();

  // Uniform integer in [lo, hi], inclusive, rejection-sampled.
  int64_t uniform_int(int64_t lo, int64_t hi);

  std::string serialize() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 gen_;
};

// ---- Little-endian binary I/O -------------------------------------------
// Byte order is pinned explicitly so serialized artifacts are
// platform-independent and byte-reproducible.

void put_u8(std::ostream& os, uint8_t v);
void put_u32(std::ostream& os, uint32_t v);
void put_u64(std::ostream& os, uint64_t v);
void put_i64(std::ostream& os, int64_t v);
void put_f64(std::ostream& os, double v);
void put_string(std::ostream& os, const std::string& s);
void put_f64_array(std::ostream& os, const std::vector<double>& v);

uint8_t get_u8(std::istream& is);
uint32_t get_u32(std::istream& is);
uint64_t get_u64(std::istream& is);
int64_t get_i64(std::istream& is);
double get_f64(std::istream& is);
std::string get_string(std::istream& is);
std::vector<double> get_f64_array(std::istream& is);

// Resolves an output path against the W2T_OUT_DIR environment variable:
// relative paths are placed under that directory when it is set.
std::string resolve_out_path(const std::string& path);

}  // namespace w2t
