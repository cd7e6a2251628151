// Time-domain audio augmentations. Every operator is pure given an explicit
// Rng, so stochastic pipelines replay bit-identically from a seed and views
// can fan out across threads without shared state.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "audioml/audio_buffer.hpp"
#include "audioml/errors.hpp"
#include "audioml/rng.hpp"

namespace audioml::augment {

enum class TransformKind {
  random_resized_crop,
  polarity_inversion,
  gain,
  noise,
  high_low_pass,
  delay,
  pitch_shift,
  reverb,
};

const char* transform_kind_name(TransformKind kind);

// One transform plus its parameter ranges. Fields beyond the active kind's
// own parameters are ignored; defaults follow the common music-augmentation
// settings documented in the README.
struct TransformSpec {
  TransformKind kind = TransformKind::polarity_inversion;
  double p = 1.0;  // apply probability in [0,1]

  Eigen::Index n_samples = 0;  // random_resized_crop, required

  double gain_db_min = -6.0;
  double gain_db_max = 0.0;

  double snr_min = 0.3;  // noise-to-signal RMS ratio
  double snr_max = 0.5;

  double lowpass_cutoff_min_hz = 2200.0;
  double lowpass_cutoff_max_hz = 4000.0;
  double highpass_cutoff_min_hz = 200.0;
  double highpass_cutoff_max_hz = 1200.0;

  double delay_min_ms = 100.0;
  double delay_max_ms = 500.0;
  double delay_interval_ms = 1.0;
  double volume_factor = 0.5;

  int semitone_min = -12;
  int semitone_max = 12;

  double room_size_min = 0.0;
  double room_size_max = 1.0;
};

struct AugmentationPipeline {
  std::uint64_t seed = 0;
  int num_views = 1;
  std::vector<TransformSpec> transforms;
};

// Deterministic kernels. These take their parameters as plain values; the
// random_* wrappers below draw the values from an Rng first.
AudioBuffer crop_at(const AudioBuffer& x, Eigen::Index offset,
                    Eigen::Index n_samples);
AudioBuffer polarity_inversion(const AudioBuffer& x);
AudioBuffer apply_gain_db(const AudioBuffer& x, double gain_db);
AudioBuffer lowpass_filter(const AudioBuffer& x, double cutoff_hz);
AudioBuffer highpass_filter(const AudioBuffer& x, double cutoff_hz);
AudioBuffer apply_delay(const AudioBuffer& x, double delay_ms,
                        double volume_factor);
AudioBuffer pitch_shift_by(const AudioBuffer& x, int semitones);
AudioBuffer apply_reverb(const AudioBuffer& x, double room_size);

// Stochastic operators. Each consumes a documented number of draws from the
// stream: crop 1 (offset), gain 1, noise 1 + 2 per sample, filter 2
// (branch then cutoff), delay 1 (grid index), pitch 1, reverb 1.
AudioBuffer random_resized_crop(const AudioBuffer& x, Eigen::Index n_samples,
                                Rng& rng);
AudioBuffer random_gain(const AudioBuffer& x, double min_db, double max_db,
                        Rng& rng);
AudioBuffer add_noise(const AudioBuffer& x, double snr_min, double snr_max,
                      Rng& rng);
AudioBuffer high_low_pass(const AudioBuffer& x, double lowpass_min_hz,
                          double lowpass_max_hz, double highpass_min_hz,
                          double highpass_max_hz, Rng& rng);
AudioBuffer random_delay(const AudioBuffer& x, double min_ms, double max_ms,
                         double interval_ms, double volume_factor, Rng& rng);
AudioBuffer random_pitch_shift(const AudioBuffer& x, int semitone_min,
                               int semitone_max, Rng& rng);
AudioBuffer random_reverb(const AudioBuffer& x, double room_size_min,
                          double room_size_max, Rng& rng);

// Applies one spec: the first draw from the stream gates against p, the
// remaining draws parameterize the transform.
AudioBuffer apply_transform(const AudioBuffer& x, const TransformSpec& spec,
                            Rng& stream);

// Runs the whole pipeline for every view. View v, transform i draws from the
// child stream (seed, v, i), so outputs do not depend on n_threads and
// inserting a transform leaves other streams untouched.
std::vector<AudioBuffer> apply_pipeline(const AugmentationPipeline& pipeline,
                                        const AudioBuffer& x,
                                        int n_threads = 1);

// Parses the pipeline JSON {seed, num_views, transforms: [{kind, p, params}]}.
// Unknown keys, unknown kinds, inverted ranges, and out-of-domain values are
// rejected with the offending field path in the message.
AugmentationPipeline parse_pipeline_spec(const std::string& json_text);

}  // namespace audioml::augment
