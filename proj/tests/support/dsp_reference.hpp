#pragma once

#include <cstdint>
#include <vector>

namespace w2t::testing {

// Straight-line spectral feature reference, coded independently of the
// library (naive O(N^2) DFT, inline filterbank construction). Used only to
// cross-check the production path.

std::vector<double> reference_log_mel_frame(const std::vector<double>& frame, int sample_rate_hz, int64_t n_mels);

std::vector<double> reference_mfcc_frame(const std::vector<double>& frame, int sample_rate_hz, int64_t n_mels,
                                         int64_t n_ceps);

}  // namespace w2t::testing
