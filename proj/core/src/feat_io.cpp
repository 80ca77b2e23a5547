#include "w2t/feat_io.hpp"

#include <fstream>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

namespace {

constexpr char kFramesMagic[8] = {'W', '2', 'T', 'F', 'R', 'M', '1', '\0'};
constexpr char kFeatMagic[8] = {'W', '2', 'T', 'F', 'E', 'A', '1', '\0'};
constexpr char kStatsMagic[8] = {'W', '2', 'T', 'S', 'T', 'A', '1', '\0'};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(strf("feat_io: cannot write '%s'", path.c_str()));
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(strf("feat_io: cannot open '%s'", path.c_str()));
  return is;
}

void check_magic(std::istream& is, const char* magic, const std::string& path) {
  char buf[8];
  is.read(buf, 8);
  if (is.gcount() != 8 || !std::equal(buf, buf + 8, magic)) {
    throw std::runtime_error(strf("feat_io: '%s' has wrong magic", path.c_str()));
  }
}

}  // namespace

void save_frames(const std::string& path, const FrameMatrix& fm) {
  auto os = open_out(path);
  os.write(kFramesMagic, 8);
  put_i64(os, fm.num_frames);
  put_i64(os, fm.frame_len);
  put_u32(os, static_cast<uint32_t>(fm.frame_ms));
  put_u32(os, static_cast<uint32_t>(fm.hop_ms));
  put_u32(os, static_cast<uint32_t>(fm.sample_rate_hz));
  put_f64_array(os, fm.data);
  if (!os) throw std::runtime_error(strf("feat_io: write failed for '%s'", path.c_str()));
}

FrameMatrix load_frames(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, kFramesMagic, path);
  FrameMatrix fm;
  fm.num_frames = get_i64(is);
  fm.frame_len = get_i64(is);
  fm.frame_ms = static_cast<int>(get_u32(is));
  fm.hop_ms = static_cast<int>(get_u32(is));
  fm.sample_rate_hz = static_cast<int>(get_u32(is));
  fm.data = get_f64_array(is);
  if (static_cast<int64_t>(fm.data.size()) != fm.num_frames * fm.frame_len) {
    throw std::runtime_error(strf("feat_io: '%s' is inconsistent", path.c_str()));
  }
  return fm;
}

void save_features(const std::string& path, const SpectralFeatures& f) {
  auto os = open_out(path);
  os.write(kFeatMagic, 8);
  put_u8(os, static_cast<uint8_t>(f.kind));
  put_u8(os, f.standardized ? 1 : 0);
  put_i64(os, f.rows);
  put_i64(os, f.cols);
  put_f64_array(os, f.data);
  put_f64_array(os, f.mean);
  put_f64_array(os, f.std_dev);
  if (!os) throw std::runtime_error(strf("feat_io: write failed for '%s'", path.c_str()));
}

SpectralFeatures load_features(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, kFeatMagic, path);
  SpectralFeatures f;
  f.kind = static_cast<FeatureKind>(get_u8(is));
  f.standardized = get_u8(is) != 0;
  f.rows = get_i64(is);
  f.cols = get_i64(is);
  f.data = get_f64_array(is);
  f.mean = get_f64_array(is);
  f.std_dev = get_f64_array(is);
  if (static_cast<int64_t>(f.data.size()) != f.rows * f.cols) {
    throw std::runtime_error(strf("feat_io: '%s' is inconsistent", path.c_str()));
  }
  return f;
}

void save_stats(const std::string& path, const FeatureStats& fbank, const FeatureStats& mfcc) {
  auto os = open_out(path);
  os.write(kStatsMagic, 8);
  put_f64_array(os, fbank.mean);
  put_f64_array(os, fbank.std_dev);
  put_f64_array(os, mfcc.mean);
  put_f64_array(os, mfcc.std_dev);
  if (!os) throw std::runtime_error(strf("feat_io: write failed for '%s'", path.c_str()));
}

void load_stats(const std::string& path, FeatureStats& fbank, FeatureStats& mfcc) {
  auto is = open_in(path);
  check_magic(is, kStatsMagic, path);
  fbank.mean = get_f64_array(is);
  fbank.std_dev = get_f64_array(is);
  mfcc.mean = get_f64_array(is);
  mfcc.std_dev = get_f64_array(is);
}

}  // namespace w2t
