#pragma once

#include <string>
#include <vector>

namespace w2t {

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;
};

// Reads a single-channel PCM16 little-endian RIFF/WAVE file. Any other
// encoding (compressed, multi-channel, other bit depths) is rejected with a
// descriptive error. Samples are scaled by 1/32768 so the int16 range maps
// into [-1, 1).
Waveform read_wav(const std::string& path);

// Writes samples as mono PCM16; values are clamped to [-1, 1] and scaled by
// 32767.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace w2t
