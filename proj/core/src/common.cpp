#include "w2t/common.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace w2t {

std::string strf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  const int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args);
  va_end(args);
  return out;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw std::invalid_argument(strf("uniform_int: empty range [%lld, %lld]", (long long)lo, (long long)hi));
  const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<int64_t>(gen_());  // full 64-bit range
  const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return lo + static_cast<int64_t>(x % range);
}

std::string Rng::serialize() const {
  std::ostringstream oss;
  oss << gen_;
  return oss.str();
}

void Rng::restore(const std::string& state) {
  std::istringstream iss(state);
  iss >> gen_;
  if (!iss) throw std::runtime_error("Rng::restore: malformed state string");
}

// ---- Little-endian binary I/O -------------------------------------------

void put_u8(std::ostream& os, uint8_t v) { os.put(static_cast<char>(v)); }

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_i64(std::ostream& os, int64_t v) { put_u64(os, static_cast<uint64_t>(v)); }

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<uint64_t>(v)); }

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_f64_array(std::ostream& os, const std::vector<double>& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}

static void read_exact(std::istream& is, char* buf, size_t n) {
  is.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<size_t>(is.gcount()) != n) throw std::runtime_error("binary read: unexpected end of stream");
}

uint8_t get_u8(std::istream& is) {
  char c;
  read_exact(is, &c, 1);
  return static_cast<uint8_t>(c);
}

uint32_t get_u32(std::istream& is) {
  char b[4];
  read_exact(is, b, 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is) {
  char b[8];
  read_exact(is, b, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

int64_t get_i64(std::istream& is) { return static_cast<int64_t>(get_u64(is)); }

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

std::string get_string(std::istream& is) {
  const uint32_t n = get_u32(is);
  std::string s(n, '\0');
  if (n > 0) read_exact(is, s.data(), n);
  return s;
}

std::vector<double> get_f64_array(std::istream& is) {
  const uint64_t n = get_u64(is);
  std::vector<double> v(n);
  for (uint64_t i = 0; i < n; ++i) v[i] = get_f64(is);
  return v;
}

std::string resolve_out_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* base = std::getenv("W2T_OUT_DIR");
  if (base == nullptr || base[0] == '\0') return path;
  std::string out(base);
  if (out.back() != '/') out.push_back('/');
  return out + path;
}

}  // namespace w2t
