#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2t/common.hpp"
#include "w2t/wav_io.hpp"

namespace w2t {

struct Utterance {
  std::string id;
  std::string audio_path;
  std::string transcript;  // normalized, vocabulary symbols only
  // Cache paths filled by feature extraction (empty until then).
  std::string frames_path;
  std::string fbank_path;
  std::string mfcc_path;
};

struct Manifest {
  std::string split;  // train | dev | test
  std::vector<Utterance> utterances;
};

// Lowercases, collapses whitespace runs to single spaces, trims, keeps the
// text symbols of the vocabulary, and maps everything else to the noise
// marker. Idempotent.
std::string normalize_transcript(const std::string& raw);

// Parameters of the synthetic tone corpus. Each symbol is a fixed 100 ms
// motif: a base tone with harmonics, base frequencies spaced uniformly on
// the mel scale so distinct symbols occupy distinct filterbank regions.
struct SynthSpec {
  int sample_rate_hz = 16000;
  double motif_ms = 100.0;
  double base_hz = 200.0;
  double max_hz = 6500.0;
  double noise_db = -30.0;  // relative to the tone amplitude
  double amplitude = 0.45;
};

// Deterministic waveform for a normalized transcript: one motif per symbol
// plus seeded Gaussian noise. Same (transcript, seed) -> identical samples.
Waveform synth_utterance(const std::string& transcript, uint64_t seed, const SynthSpec& spec = SynthSpec());

struct CorpusSpec {
  std::string symbols = "abcdefghijklmnopqrstuvwxyz ";  // sampling alphabet
  int64_t utterance_count = 20;
  int64_t min_len = 3;
  int64_t max_len = 8;
  uint64_t seed = 1234;
  SynthSpec synth;
};

struct BuiltCorpus {
  Manifest train, dev, test;
};

// Writes PCM16 audio plus train/dev/test manifests (80/10/10 split,
// deterministic in the seed) under out_dir.
BuiltCorpus build_corpus(const CorpusSpec& spec, const std::string& out_dir);

// Manifest file format: one record per line, tab-separated
// (id, audio_path, transcript).
void save_manifest(const std::string& path, const Manifest& m);
Manifest load_manifest(const std::string& path, bool check_audio_exists = true);

}  // namespace w2t
