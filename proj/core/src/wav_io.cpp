#include "w2t/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

namespace {

uint32_t rd_u32(std::istream& is) { return get_u32(is); }

uint16_t rd_u16(std::istream& is) {
  char b[2];
  is.read(b, 2);
  if (is.gcount() != 2) throw std::runtime_error("wav: truncated file");
  return static_cast<uint16_t>(static_cast<unsigned char>(b[0]) | (static_cast<unsigned char>(b[1]) << 8));
}

void wr_u16(std::ostream& os, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

std::string rd_tag(std::istream& is) {
  char b[4];
  is.read(b, 4);
  if (is.gcount() != 4) throw std::runtime_error("wav: truncated file");
  return std::string(b, 4);
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(strf("wav: cannot open '%s'", path.c_str()));

  if (rd_tag(is) != "RIFF") throw std::runtime_error(strf("wav: '%s' is not a RIFF file", path.c_str()));
  rd_u32(is);  // riff payload size
  if (rd_tag(is) != "WAVE") throw std::runtime_error(strf("wav: '%s' is not a WAVE file", path.c_str()));

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0, format = 0;
  uint32_t sample_rate = 0;
  Waveform w;

  while (is.peek() != EOF) {
    const std::string tag = rd_tag(is);
    const uint32_t size = rd_u32(is);
    if (tag == "fmt ") {
      format = rd_u16(is);
      channels = rd_u16(is);
      sample_rate = rd_u32(is);
      rd_u32(is);  // byte rate
      rd_u16(is);  // block align
      bits = rd_u16(is);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw std::runtime_error(strf("wav: '%s' has data before fmt chunk", path.c_str()));
      if (format != 1) throw std::runtime_error(strf("wav: '%s' uses format %u; only PCM (1) is supported", path.c_str(), format));
      if (channels != 1) throw std::runtime_error(strf("wav: '%s' has %u channels; only mono is supported", path.c_str(), channels));
      if (bits != 16) throw std::runtime_error(strf("wav: '%s' has %u-bit samples; only 16-bit is supported", path.c_str(), bits));
      const uint32_t count = size / 2;
      w.samples.resize(count);
      for (uint32_t i = 0; i < count; ++i) {
        const int16_t s = static_cast<int16_t>(rd_u16(is));
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      if (size % 2 != 0) is.seekg(1, std::ios::cur);
      w.sample_rate_hz = static_cast<int>(sample_rate);
      return w;
    } else {
      // Skip unknown chunks (LIST, fact, ...), honoring padding.
      is.seekg(size + (size % 2), std::ios::cur);
    }
  }
  throw std::runtime_error(strf("wav: '%s' has no data chunk", path.c_str()));
}

void write_wav(const std::string& path, const Waveform& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(strf("wav: cannot write '%s'", path.c_str()));

  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  const uint32_t sr = static_cast<uint32_t>(w.sample_rate_hz);

  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(os, 16);
  wr_u16(os, 1);   // PCM
  wr_u16(os, 1);   // mono
  put_u32(os, sr);
  put_u32(os, sr * 2);
  wr_u16(os, 2);   // block align
  wr_u16(os, 16);  // bits
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (double x : w.samples) {
    const double c = x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
    wr_u16(os, static_cast<uint16_t>(static_cast<int16_t>(std::lround(c * 32767.0))));
  }
  if (!os) throw std::runtime_error(strf("wav: write failed for '%s'", path.c_str()));
}

}  // namespace w2t
