#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "audioml/audio_buffer.hpp"

namespace audioml::spectral {

// Complex frequency-by-time grid. Invariants: data has n_fft/2 + 1 rows and
// ceil(signal_length / hop_length) columns (centered framing).
struct ComplexSpectrogram {
  Eigen::MatrixXcd data;
  int n_fft = 0;
  int hop_length = 0;
  int sample_rate = 0;
};

enum class Scale { linear_magnitude, power, decibel, mel, cqt };

// Real frequency-like-by-time grid with axis metadata. Rows are frequency
// bins (bin_frequencies_hz gives the center of each), columns are frames
// hop_length samples apart.
struct RealMatrix {
  Eigen::MatrixXd data;
  Scale scale = Scale::linear_magnitude;
  std::vector<double> bin_frequencies_hz;
  int hop_length = 0;
  int sample_rate = 0;
};

// Triangular mel filterbank, weights shape (n_mels, n_fft/2 + 1). Rows with
// empty support (n_mels too large for the FFT resolution) are listed in
// empty_filters; building one is a warning, not an error.
struct MelFilterbank {
  Eigen::MatrixXd weights;
  double f_min = 0.0;
  double f_max = 0.0;
  std::vector<double> center_frequencies_hz;
  std::vector<int> empty_filters;
};

// Constant-Q parameters. Center frequency of bin k is f_min * 2^(k / B);
// quality factor Q = 1 / (2^(1/B) - 1) holds frequency/bandwidth constant.
struct CqtParams {
  double f_min = 32.7032;  // C1
  int bins_per_octave = 24;
  int n_bins = 168;
  int hop_length = 512;

  double quality() const {
    return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
  }
  double center_frequency(int k) const {
    return f_min * std::pow(2.0, static_cast<double>(k) / bins_per_octave);
  }
};

// Periodic Hann window of length n: w[i] = 0.5 - 0.5 cos(2 pi i / n).
Eigen::VectorXd hann_window(int n);

// Hann-windowed centered STFT with reflect padding of n_fft/2 on each side.
// Output shape (n_fft/2 + 1, ceil(len / hop_length)). Requires mono input,
// even n_fft >= 2, 1 <= hop_length <= n_fft.
ComplexSpectrogram stft(const AudioBuffer& x, int n_fft, int hop_length);

// Overlap-add inverse with squared-window normalization; result cropped or
// zero-padded to expected_length. Rejects window/hop pairs whose overlapped
// squared windows vanish somewhere in the output span.
AudioBuffer istft(const ComplexSpectrogram& spec, Eigen::Index expected_length);

// Elementwise |z| (power=1) or |z|^2 (power=2).
RealMatrix magnitude(const ComplexSpectrogram& spec, int power = 1);

enum class DbKind { amplitude, power };

// ref_max replaces ref with the matrix maximum (image-export convention);
// dynamic_range_db, when set, clamps the result to [max - range, max].
struct DbParams {
  DbKind kind = DbKind::power;
  double ref = 1.0;
  bool ref_max = false;
  double floor_db = -100.0;  // amin = 10^(floor_db / 10) for power input
  std::optional<double> dynamic_range_db;
};

// k log10(max(x, amin) / ref) with k = 20 for amplitude input and 10 for
// power input, amin = 10^(floor_db / k). Monotone nondecreasing in x.
RealMatrix to_decibels(const RealMatrix& m, const DbParams& params);

// Mel scale used throughout: linear 3f/200 below 1000 Hz, then
// 15 + ln(f/1000) / (ln(6.4)/27). mel(0)=0, mel(1000)=15, mel(6400)=42.
double mel_scale(double hz);
double mel_to_hz(double mel);

// n_mels triangles with peaks at n_mels + 2 equally spaced mel points in
// [mel(f_min), mel(f_max)], sampled at FFT bin frequencies and
// area-normalized by 2 / (f_upper - f_lower).
MelFilterbank mel_filterbank(int sample_rate, int n_fft, int n_mels,
                             double f_min, double f_max);

// mel_filterbank weights times magnitude(stft(x), power).
RealMatrix melspectrogram(const AudioBuffer& x, int n_fft, int hop_length,
                          int n_mels, double f_min, double f_max,
                          int power = 2);

// Direct constant-Q projection: per bin k a Hann window of length
// N_k = ceil(Q sr / f_k) centered at each frame position m * hop, projected
// onto exp(-2 pi i f_k t / sr) and scaled by 1 / N_k; samples outside the
// signal are zero. Output is the magnitude, shape (n_bins, ceil(len / hop)).
RealMatrix cqt(const AudioBuffer& x, const CqtParams& params);

}  // namespace audioml::spectral
