#include "w2t/dsp.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

namespace {

constexpr double kLogFloor = 1e-10;

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Symmetric Hann window of length w.
std::vector<double> hann_window(int64_t w) {
  std::vector<double> win(static_cast<size_t>(w));
  for (int64_t n = 0; n < w; ++n) {
    win[static_cast<size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(n) / static_cast<double>(w - 1));
  }
  return win;
}

// Power spectrum bins 0..fft/2 of one Hann-windowed, zero-padded frame.
std::vector<double> frame_power_spectrum(const double* frame, int64_t w, const std::vector<double>& win, int64_t fft_size) {
  std::vector<std::complex<double>> buf(static_cast<size_t>(fft_size), {0.0, 0.0});
  for (int64_t n = 0; n < w; ++n) buf[static_cast<size_t>(n)] = frame[n] * win[static_cast<size_t>(n)];
  fft_inplace(buf);
  std::vector<double> power(static_cast<size_t>(fft_size / 2 + 1));
  for (int64_t k = 0; k <= fft_size / 2; ++k) {
    power[static_cast<size_t>(k)] = std::norm(buf[static_cast<size_t>(k)]);
  }
  return power;
}

std::vector<double> log_mel_frame(const std::vector<double>& power, const MelFilterbank& fb) {
  std::vector<double> out(static_cast<size_t>(fb.n_mels));
  for (int64_t m = 0; m < fb.n_mels; ++m) {
    double acc = 0.0;
    for (int64_t k = 0; k < fb.n_bins; ++k) acc += fb.at(m, k) * power[static_cast<size_t>(k)];
    out[static_cast<size_t>(m)] = std::log(acc + kLogFloor);
  }
  return out;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

int64_t next_pow2(int64_t n) {
  int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Waveform normalize_waveform(const Waveform& w) {
  if (w.samples.empty()) throw std::invalid_argument("normalize_waveform: empty input");
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::fabs(s));
  Waveform out = w;
  if (peak > 0.0) {
    for (double& s : out.samples) s /= peak;
  }
  return out;
}

FrameMatrix frame_signal(const Waveform& w, int frame_ms, int hop_ms) {
  if (frame_ms <= 0 || hop_ms <= 0) throw std::invalid_argument("frame_signal: window and hop must be positive");
  const int64_t win = static_cast<int64_t>(frame_ms) * w.sample_rate_hz / 1000;
  const int64_t hop = static_cast<int64_t>(hop_ms) * w.sample_rate_hz / 1000;
  const int64_t n = static_cast<int64_t>(w.samples.size());
  if (n < win) {
    throw std::invalid_argument(strf("frame_signal: signal of %lld samples is shorter than one %lld-sample window",
                                     (long long)n, (long long)win));
  }
  FrameMatrix fm;
  fm.frame_len = win;
  fm.frame_ms = frame_ms;
  fm.hop_ms = hop_ms;
  fm.sample_rate_hz = w.sample_rate_hz;
  fm.num_frames = (n - win) / hop + 1;
  fm.data.resize(static_cast<size_t>(fm.num_frames * win));
  for (int64_t s = 0; s < fm.num_frames; ++s) {
    const double* src = w.samples.data() + s * hop;
    std::copy(src, src + win, fm.data.begin() + s * win);
  }
  return fm;
}

MelFilterbank make_mel_filterbank(int64_t n_mels, int64_t fft_size, int sample_rate_hz) {
  if (n_mels < 1) throw std::invalid_argument("mel filterbank: n_mels must be >= 1");
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_bins = fft_size / 2 + 1;
  fb.weights.assign(static_cast<size_t>(n_mels * fb.n_bins), 0.0);

  const double nyquist = static_cast<double>(sample_rate_hz) / 2.0;
  const double mel_hi = hz_to_mel(nyquist);
  // n_mels + 2 equally spaced mel points from 0 Hz to Nyquist; triangle m
  // spans [edge m, edge m+2] and peaks at edge m+1.
  std::vector<double> edges_hz(static_cast<size_t>(n_mels + 2));
  for (int64_t m = 0; m < n_mels + 2; ++m) {
    edges_hz[static_cast<size_t>(m)] = mel_to_hz(mel_hi * static_cast<double>(m) / static_cast<double>(n_mels + 1));
  }
  fb.center_hz.assign(edges_hz.begin() + 1, edges_hz.end() - 1);

  for (int64_t m = 0; m < n_mels; ++m) {
    const double lo = edges_hz[static_cast<size_t>(m)];
    const double mid = edges_hz[static_cast<size_t>(m + 1)];
    const double hi = edges_hz[static_cast<size_t>(m + 2)];
    for (int64_t k = 0; k < fb.n_bins; ++k) {
      const double f = static_cast<double>(k) * static_cast<double>(sample_rate_hz) / static_cast<double>(fft_size);
      double wgt = 0.0;
      if (f > lo && f < hi) {
        wgt = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
      fb.weights[static_cast<size_t>(m * fb.n_bins + k)] = wgt;
    }
  }
  return fb;
}

SpectralFeatures log_mel_spectrogram(const FrameMatrix& fm, int64_t n_mels) {
  if (n_mels < 1) throw std::invalid_argument("log_mel_spectrogram: n_mels must be >= 1");
  const int64_t fft_size = next_pow2(fm.frame_len);
  const MelFilterbank fb = make_mel_filterbank(n_mels, fft_size, fm.sample_rate_hz);
  const std::vector<double> win = hann_window(fm.frame_len);

  SpectralFeatures out;
  out.kind = FeatureKind::LogMel;
  out.rows = fm.num_frames;
  out.cols = n_mels;
  out.data.resize(static_cast<size_t>(out.rows * out.cols));
  for (int64_t s = 0; s < fm.num_frames; ++s) {
    const auto power = frame_power_spectrum(fm.frame(s), fm.frame_len, win, fft_size);
    const auto mel = log_mel_frame(power, fb);
    std::copy(mel.begin(), mel.end(), out.data.begin() + s * n_mels);
  }
  return out;
}

SpectralFeatures mfcc(const FrameMatrix& fm, int64_t n_mels, int64_t n_ceps) {
  if (n_ceps > n_mels) {
    throw std::invalid_argument(strf("mfcc: n_ceps=%lld exceeds n_mels=%lld", (long long)n_ceps, (long long)n_mels));
  }
  if (n_ceps < 1) throw std::invalid_argument("mfcc: n_ceps must be >= 1");
  const SpectralFeatures mel = log_mel_spectrogram(fm, n_mels);

  SpectralFeatures out;
  out.kind = FeatureKind::Mfcc;
  out.rows = mel.rows;
  out.cols = n_ceps;
  out.data.resize(static_cast<size_t>(out.rows * out.cols));

  const double d = static_cast<double>(n_mels);
  for (int64_t s = 0; s < mel.rows; ++s) {
    for (int64_t k = 0; k < n_ceps; ++k) {
      double acc = 0.0;
      for (int64_t j = 0; j < n_mels; ++j) {
        acc += mel.at(s, j) * std::cos(M_PI * static_cast<double>(k) * (2.0 * static_cast<double>(j) + 1.0) / (2.0 * d));
      }
      const double scale = k == 0 ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
      out.data[static_cast<size_t>(s * n_ceps + k)] = scale * acc;
    }
  }
  return out;
}

FeatureStats fit_standardizer(const std::vector<SpectralFeatures>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("fit_standardizer: empty corpus");
  const int64_t dims = corpus[0].cols;
  for (const auto& f : corpus) {
    if (f.cols != dims) {
      throw std::invalid_argument(strf("fit_standardizer: dimension mismatch, %lld vs %lld", (long long)f.cols, (long long)dims));
    }
  }
  FeatureStats stats;
  stats.mean.assign(static_cast<size_t>(dims), 0.0);
  stats.std_dev.assign(static_cast<size_t>(dims), 0.0);

  int64_t total = 0;
  for (const auto& f : corpus) {
    total += f.rows;
    for (int64_t s = 0; s < f.rows; ++s) {
      for (int64_t d = 0; d < dims; ++d) stats.mean[static_cast<size_t>(d)] += f.at(s, d);
    }
  }
  if (total == 0) throw std::invalid_argument("fit_standardizer: corpus has no frames");
  for (double& m : stats.mean) m /= static_cast<double>(total);

  for (const auto& f : corpus) {
    for (int64_t s = 0; s < f.rows; ++s) {
      for (int64_t d = 0; d < dims; ++d) {
        const double diff = f.at(s, d) - stats.mean[static_cast<size_t>(d)];
        stats.std_dev[static_cast<size_t>(d)] += diff * diff;
      }
    }
  }
  for (double& v : stats.std_dev) {
    v = std::sqrt(v / static_cast<double>(total));
    if (v < 1e-8) v = 1.0;
  }
  return stats;
}

SpectralFeatures apply_standardizer(const SpectralFeatures& f, const FeatureStats& stats) {
  if (static_cast<int64_t>(stats.mean.size()) != f.cols) {
    throw std::invalid_argument(strf("apply_standardizer: stats have %zu dims, features have %lld", stats.mean.size(),
                                     (long long)f.cols));
  }
  SpectralFeatures out = f;
  for (int64_t s = 0; s < f.rows; ++s) {
    for (int64_t d = 0; d < f.cols; ++d) {
      out.data[static_cast<size_t>(s * f.cols + d)] =
          (f.at(s, d) - stats.mean[static_cast<size_t>(d)]) / stats.std_dev[static_cast<size_t>(d)];
    }
  }
  out.standardized = true;
  out.mean = stats.mean;
  out.std_dev = stats.std_dev;
  return out;
}

void write_features_csv(const std::string& path, const SpectralFeatures& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(strf("features: cannot write '%s'", path.c_str()));
  for (int64_t s = 0; s < f.rows; ++s) {
    std::string line;
    for (int64_t d = 0; d < f.cols; ++d) {
      if (d > 0) line += ",";
      line += strf("%.9f", f.at(s, d));
    }
    os << line << "\n";
  }
  if (!os) throw std::runtime_error(strf("features: write failed for '%s'", path.c_str()));
}

}  // namespace w2t
