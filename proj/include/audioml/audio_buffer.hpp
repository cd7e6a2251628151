#pragma once

#include <Eigen/Dense>

#include "audioml/errors.hpp"

namespace audioml {

// Time-domain carrier used by every module. Samples are dimensionless
// amplitudes, nominal range [-1, 1]; multichannel data is interleaved per
// frame: samples[frame * channels + ch].
//
// Invariants: sample_rate > 0, channels >= 1, samples.size() divisible by
// channels.
struct AudioBuffer {
  Eigen::VectorXd samples;
  int sample_rate = 0;
  int channels = 1;

  AudioBuffer() = default;
  AudioBuffer(Eigen::VectorXd s, int sr, int ch = 1)
      : samples(std::move(s)), sample_rate(sr), channels(ch) {}

  Eigen::Index num_frames() const {
    return channels > 0 ? samples.size() / channels : 0;
  }

  bool is_mono() const { return channels == 1; }

  void validate() const {
    if (sample_rate <= 0) throw ValueError("AudioBuffer: sample_rate must be > 0");
    if (channels < 1) throw ValueError("AudioBuffer: channels must be >= 1");
    if (samples.size() % channels != 0)
      throw ValueError("AudioBuffer: sample count not divisible by channels");
  }
};

inline void require_mono(const AudioBuffer& x, const char* who) {
  if (!x.is_mono())
    throw ValueError(std::string(who) + ": mono buffer required, got " +
                     std::to_string(x.channels) + " channels");
}

}  // namespace audioml
