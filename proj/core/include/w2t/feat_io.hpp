#pragma once

#include <string>

#include "w2t/dsp.hpp"

namespace w2t {

// Binary caches for frame matrices, feature matrices, and standardizer
// stats. All fixed-layout little-endian fp64, so cached artifacts are
// byte-reproducible.

void save_frames(const std::string& path, const FrameMatrix& fm);
FrameMatrix load_frames(const std::string& path);

void save_features(const std::string& path, const SpectralFeatures& f);
SpectralFeatures load_features(const std::string& path);

void save_stats(const std::string& path, const FeatureStats& fbank, const FeatureStats& mfcc);
void load_stats(const std::string& path, FeatureStats& fbank, FeatureStats& mfcc);

}  // namespace w2t
