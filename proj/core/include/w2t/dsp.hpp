#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/wav_io.hpp"

namespace w2t {

// S x W matrix of raw sample windows, 25 ms long with a 10 ms hop by
// default. Rows carry the unmodified samples; spectral ops apply their own
// window function.
struct FrameMatrix {
  std::vector<double> data;  // row-major, S x W
  int64_t num_frames = 0;
  int64_t frame_len = 0;
  int frame_ms = 25;
  int hop_ms = 10;
  int sample_rate_hz = 16000;

  const double* frame(int64_t s) const { return data.data() + s * frame_len; }
};

enum class FeatureKind : uint8_t { LogMel = 1, Mfcc = 2 };

struct SpectralFeatures {
  std::vector<double> data;  // row-major, S x D
  int64_t rows = 0;
  int64_t cols = 0;
  FeatureKind kind = FeatureKind::LogMel;
  bool standardized = false;
  std::vector<double> mean;  // per-dimension stats applied, when standardized
  std::vector<double> std_dev;

  double at(int64_t s, int64_t d) const { return data[s * cols + d]; }
};

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> std_dev;
};

// Scales samples so the largest magnitude becomes 1; all-zero input is
// returned unchanged. Empty input is an error.
Waveform normalize_waveform(const Waveform& w);

// Splits into frame_ms windows every hop_ms; the tail shorter than one
// window is dropped. Errors if the signal is shorter than one window.
FrameMatrix frame_signal(const Waveform& w, int frame_ms = 25, int hop_ms = 10);

// Triangular mel filterbank applied to the Hann-windowed power spectrum,
// then log(x + 1e-10). Filters span 0 Hz to Nyquist on the scale
// 2595*log10(1 + f/700); FFT size is the next power of two >= frame_len.
SpectralFeatures log_mel_spectrogram(const FrameMatrix& fm, int64_t n_mels);

// Orthonormal DCT-II of each log-mel row, keeping coefficients
// 0..n_ceps-1.
SpectralFeatures mfcc(const FrameMatrix& fm, int64_t n_mels, int64_t n_ceps);

// Population mean/std per dimension over all frames of all utterances;
// dimensions with std < 1e-8 get std = 1.
FeatureStats fit_standardizer(const std::vector<SpectralFeatures>& corpus);
SpectralFeatures apply_standardizer(const SpectralFeatures& f, const FeatureStats& stats);

// One frame per line, fixed 9-decimal formatting.
void write_features_csv(const std::string& path, const SpectralFeatures& f);

// Filterbank construction details, exposed for inspection: row-major
// [n_mels x (fft_size/2 + 1)] weights and the filter center frequencies.
struct MelFilterbank {
  std::vector<double> weights;
  int64_t n_mels = 0;
  int64_t n_bins = 0;
  std::vector<double> center_hz;

  double at(int64_t m, int64_t k) const { return weights[m * n_bins + k]; }
};
MelFilterbank make_mel_filterbank(int64_t n_mels, int64_t fft_size, int sample_rate_hz);

double hz_to_mel(double hz);
double mel_to_hz(double mel);
int64_t next_pow2(int64_t n);

}  // namespace w2t
