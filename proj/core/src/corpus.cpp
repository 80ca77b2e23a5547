#include "w2t/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "w2t/dsp.hpp"
#include "w2t/vocab.hpp"

namespace w2t {

std::string normalize_transcript(const std::string& raw) {
  const Vocabulary& vocab = Vocabulary::instance();
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  bool emitted_any = false;

  auto emit = [&](const std::string& piece) {
    if (pending_space && emitted_any) out += ' ';
    pending_space = false;
    out += piece;
    emitted_any = true;
  };

  for (size_t i = 0; i < raw.size();) {
    if (raw.compare(i, 7, "<noise>") == 0) {
      emit("<noise>");
      i += 7;
      continue;
    }
    const char c = raw[i];
    ++i;
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (vocab.index_of_char(lower) >= 0) {
      emit(std::string(1, lower));
    } else {
      emit("<noise>");
    }
  }
  return out;
}

Waveform synth_utterance(const std::string& transcript, uint64_t seed, const SynthSpec& spec) {
  if (transcript.empty()) throw std::invalid_argument("synth_utterance: empty transcript");
  const Vocabulary& vocab = Vocabulary::instance();
  const std::vector<int64_t> symbols = vocab.encode(transcript);

  const int64_t motif_len = static_cast<int64_t>(std::llround(spec.motif_ms * spec.sample_rate_hz / 1000.0));
  const int64_t ramp_len = std::min<int64_t>(motif_len / 8, spec.sample_rate_hz * 5 / 1000);

  // Base frequencies uniform on the mel scale across the 31 text symbols;
  // uniform-Hz spacing would crowd the low filterbank region.
  const double mel_lo = hz_to_mel(spec.base_hz);
  const double mel_hi = hz_to_mel(spec.max_hz);
  auto base_freq = [&](int64_t sym) {
    return mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(sym) / 30.0);
  };

  static constexpr double kHarmonicAmps[3] = {0.7, 0.2, 0.1};
  const double nyquist_cap = 0.95 * spec.sample_rate_hz / 2.0;

  Waveform w;
  w.sample_rate_hz = spec.sample_rate_hz;
  w.samples.assign(static_cast<size_t>(motif_len * static_cast<int64_t>(symbols.size())), 0.0);

  for (size_t si = 0; si < symbols.size(); ++si) {
    const double f0 = base_freq(symbols[si]);
    double* dst = w.samples.data() + static_cast<int64_t>(si) * motif_len;
    for (int64_t n = 0; n < motif_len; ++n) {
      const double t = static_cast<double>(n) / spec.sample_rate_hz;
      double x = 0.0;
      for (int h = 0; h < 3; ++h) {
        const double f = f0 * (h + 1);
        if (f > nyquist_cap) break;
        x += kHarmonicAmps[h] * std::sin(2.0 * M_PI * f * t);
      }
      // Raised-cosine on/off ramps avoid clicks at motif boundaries.
      double env = 1.0;
      if (n < ramp_len) env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(n) / static_cast<double>(ramp_len));
      else if (n >= motif_len - ramp_len) {
        env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(motif_len - 1 - n) / static_cast<double>(ramp_len));
      }
      dst[n] = spec.amplitude * env * x;
    }
  }

  Rng rng(mix_seed(seed, fnv1a64(transcript)));
  const double noise_sigma = spec.amplitude * std::pow(10.0, spec.noise_db / 20.0);
  for (double& s : w.samples) {
    s += noise_sigma * rng.normal();
    s = std::clamp(s, -1.0, 1.0);
  }
  return w;
}

namespace {

std::string random_transcript(Rng& rng, const std::string& symbols, int64_t len) {
  // No leading/trailing space and no space runs, so the result is already
  // in normalized form.
  std::string text;
  while (static_cast<int64_t>(text.size()) < len) {
    const char c = symbols[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(symbols.size()) - 1))];
    if (c == ' ') {
      if (text.empty() || text.back() == ' ' || static_cast<int64_t>(text.size()) == len - 1) continue;
    }
    text.push_back(c);
  }
  return text;
}

}  // namespace

BuiltCorpus build_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  if (spec.utterance_count < 1) throw std::invalid_argument("build_corpus: utterance count must be >= 1");
  if (spec.min_len < 1 || spec.max_len < spec.min_len) throw std::invalid_argument("build_corpus: invalid length range");
  if (spec.symbols.empty()) throw std::invalid_argument("build_corpus: empty symbol set");
  for (char c : spec.symbols) {
    if (Vocabulary::instance().index_of_char(c) < 0) {
      throw std::invalid_argument(strf("build_corpus: symbol 0x%02x not in vocabulary", (unsigned char)c));
    }
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw std::runtime_error(strf("build_corpus: cannot create '%s': %s", out_dir.c_str(), ec.message().c_str()));

  Rng rng(spec.seed);
  std::vector<Utterance> utts;
  for (int64_t i = 0; i < spec.utterance_count; ++i) {
    const int64_t len = rng.uniform_int(spec.min_len, spec.max_len);
    Utterance u;
    u.id = strf("utt_%04lld", (long long)i);
    u.transcript = random_transcript(rng, spec.symbols, len);
    u.audio_path = (fs::path(out_dir) / "wav" / (u.id + ".wav")).string();
    const Waveform w = synth_utterance(u.transcript, mix_seed(spec.seed, static_cast<uint64_t>(i)), spec.synth);
    write_wav(u.audio_path, w);
    utts.push_back(std::move(u));
  }

  // Deterministic 80/10/10 split: shuffle indices with the same seed stream.
  std::vector<int64_t> order(utts.size());
  std::iota(order.begin(), order.end(), 0);
  for (int64_t i = static_cast<int64_t>(order.size()) - 1; i > 0; --i) {
    const int64_t j = rng.uniform_int(0, i);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  const int64_t n = spec.utterance_count;
  const int64_t n_train = n * 8 / 10;
  const int64_t n_dev = n / 10;

  BuiltCorpus built;
  built.train.split = "train";
  built.dev.split = "dev";
  built.test.split = "test";
  for (int64_t i = 0; i < n; ++i) {
    const Utterance& u = utts[static_cast<size_t>(order[static_cast<size_t>(i)])];
    if (i < n_train) built.train.utterances.push_back(u);
    else if (i < n_train + n_dev) built.dev.utterances.push_back(u);
    else built.test.utterances.push_back(u);
  }

  save_manifest((fs::path(out_dir) / "manifest.train.tsv").string(), built.train);
  save_manifest((fs::path(out_dir) / "manifest.dev.tsv").string(), built.dev);
  save_manifest((fs::path(out_dir) / "manifest.test.tsv").string(), built.test);
  return built;
}

void save_manifest(const std::string& path, const Manifest& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(strf("manifest: cannot write '%s'", path.c_str()));
  for (const Utterance& u : m.utterances) {
    os << u.id << "\t" << u.audio_path << "\t" << u.transcript << "\n";
  }
  if (!os) throw std::runtime_error(strf("manifest: write failed for '%s'", path.c_str()));
}

Manifest load_manifest(const std::string& path, bool check_audio_exists) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(strf("manifest: cannot open '%s'", path.c_str()));
  Manifest m;
  std::set<std::string> seen;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw std::runtime_error(strf("manifest: '%s' line %lld is not id<TAB>path<TAB>transcript", path.c_str(), (long long)lineno));
    }
    Utterance u;
    u.id = line.substr(0, t1);
    u.audio_path = line.substr(t1 + 1, t2 - t1 - 1);
    u.transcript = line.substr(t2 + 1);
    if (!seen.insert(u.id).second) {
      throw std::runtime_error(strf("manifest: '%s' has duplicate id '%s'", path.c_str(), u.id.c_str()));
    }
    if (check_audio_exists && !std::filesystem::exists(u.audio_path)) {
      throw std::runtime_error(strf("manifest: audio file '%s' (utterance '%s') does not exist", u.audio_path.c_str(), u.id.c_str()));
    }
    m.utterances.push_back(std::move(u));
  }
  return m;
}

}  // namespace w2t
