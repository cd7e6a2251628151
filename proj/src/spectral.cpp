#include "audioml/spectral.hpp"

#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

namespace audioml::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Reflection without edge repetition (period 2L - 2), so padded content
// mirrors the signal the way centered analysis expects.
Eigen::Index reflect_index(Eigen::Index i, Eigen::Index len) {
  if (len == 1) return 0;
  const Eigen::Index period = 2 * (len - 1);
  Eigen::Index j = i % period;
  if (j < 0) j += period;
  if (j >= len) j = period - j;
  return j;
}

Eigen::Index ceil_div(Eigen::Index a, Eigen::Index b) { return (a + b - 1) / b; }

void check_stft_args(const AudioBuffer& x, int n_fft, int hop_length) {
  require_mono(x, "stft");
  if (n_fft < 2 || n_fft % 2 != 0)
    throw ValueError("stft: n_fft must be even and >= 2, got " +
                     std::to_string(n_fft));
  if (hop_length < 1)
    throw ValueError("stft: hop_length must be >= 1, got " +
                     std::to_string(hop_length));
  if (hop_length > n_fft)
    throw ValueError("stft: hop_length > n_fft makes reconstruction "
                     "impossible (" + std::to_string(hop_length) + " > " +
                     std::to_string(n_fft) + ")");
  if (x.samples.size() == 0) throw ValueError("stft: empty signal");
}

}  // namespace

Eigen::VectorXd hann_window(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

ComplexSpectrogram stft(const AudioBuffer& x, int n_fft, int hop_length) {
  check_stft_args(x, n_fft, hop_length);
  const Eigen::Index len = x.samples.size();
  const Eigen::Index n_frames = ceil_div(len, hop_length);
  const int n_bins = n_fft / 2 + 1;
  const Eigen::VectorXd window = hann_window(n_fft);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> freq;

  ComplexSpectrogram spec;
  spec.data.resize(n_bins, n_frames);
  spec.n_fft = n_fft;
  spec.hop_length = hop_length;
  spec.sample_rate = x.sample_rate;

  const Eigen::Index half = n_fft / 2;
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    const Eigen::Index start = t * hop_length - half;  // centered at t * hop
    for (int i = 0; i < n_fft; ++i)
      frame[static_cast<std::size_t>(i)] =
          x.samples[reflect_index(start + i, len)] * window[i];
    fft.fwd(freq, frame);
    for (int k = 0; k < n_bins; ++k)
      spec.data(k, t) = freq[static_cast<std::size_t>(k)];
  }
  return spec;
}

AudioBuffer istft(const ComplexSpectrogram& spec,
                  Eigen::Index expected_length) {
  const int n_fft = spec.n_fft;
  const int hop = spec.hop_length;
  if (n_fft < 2 || n_fft % 2 != 0 || hop < 1)
    throw ValueError("istft: invalid n_fft/hop metadata");
  if (spec.data.rows() != n_fft / 2 + 1)
    throw ValueError("istft: spectrogram rows do not match n_fft/2 + 1");
  if (expected_length < 0) throw ValueError("istft: negative expected_length");
  const Eigen::Index n_frames = spec.data.cols();
  if (n_frames == 0) throw ValueError("istft: empty spectrogram");

  const Eigen::VectorXd window = hann_window(n_fft);
  const Eigen::Index padded_len =
      (n_frames - 1) * static_cast<Eigen::Index>(hop) + n_fft;
  Eigen::VectorXd num = Eigen::VectorXd::Zero(padded_len);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(padded_len);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> freq(static_cast<std::size_t>(n_fft / 2 + 1));
  std::vector<double> frame;

  for (Eigen::Index t = 0; t < n_frames; ++t) {
    for (int k = 0; k <= n_fft / 2; ++k)
      freq[static_cast<std::size_t>(k)] = spec.data(k, t);
    fft.inv(frame, freq);  // length n_fft, includes the 1/n_fft scaling
    const Eigen::Index base = t * hop;
    for (int i = 0; i < n_fft; ++i) {
      num[base + i] += window[i] * frame[static_cast<std::size_t>(i)];
      den[base + i] += window[i] * window[i];
    }
  }

  // Per-sample normalization reconstructs exactly wherever overlapped
  // squared windows are nonvanishing; a vanishing spot inside the output
  // span means the window/hop pair cannot reconstruct.
  const Eigen::Index offset = n_fft / 2;
  AudioBuffer out(Eigen::VectorXd::Zero(expected_length), spec.sample_rate, 1);
  for (Eigen::Index j = 0; j < expected_length; ++j) {
    const Eigen::Index i = j + offset;
    if (i >= padded_len) break;  // beyond analysis coverage: stays zero
    if (den[i] < 1e-10)
      throw ValueError("istft: window/hop pair violates the overlap-add "
                       "condition (squared-window sum vanishes at sample " +
                       std::to_string(static_cast<long long>(j)) + ")");
    out.samples[j] = num[i] / den[i];
  }
  return out;
}

RealMatrix magnitude(const ComplexSpectrogram& spec, int power) {
  if (power != 1 && power != 2)
    throw ValueError("magnitude: power must be 1 or 2, got " +
                     std::to_string(power));
  RealMatrix m;
  if (power == 1)
    m.data = spec.data.cwiseAbs();
  else
    m.data = spec.data.cwiseAbs2();
  m.scale = power == 1 ? Scale::linear_magnitude : Scale::power;
  m.hop_length = spec.hop_length;
  m.sample_rate = spec.sample_rate;
  m.bin_frequencies_hz.resize(static_cast<std::size_t>(spec.data.rows()));
  for (Eigen::Index k = 0; k < spec.data.rows(); ++k)
    m.bin_frequencies_hz[static_cast<std::size_t>(k)] =
        static_cast<double>(k) * spec.sample_rate / spec.n_fft;
  return m;
}

RealMatrix to_decibels(const RealMatrix& m, const DbParams& params) {
  if (params.ref <= 0.0 && !params.ref_max)
    throw ValueError("to_decibels: ref must be positive");
  if ((m.data.array() < 0.0).any())
    throw ValueError("to_decibels: negative entries in input");
  const double k = params.kind == DbKind::amplitude ? 20.0 : 10.0;
  const double amin = std::pow(10.0, params.floor_db / k);
  double ref = params.ref_max ? m.data.maxCoeff() : params.ref;
  if (ref < amin) ref = amin;  // silence-only input still yields finite dB

  RealMatrix out = m;
  out.scale = Scale::decibel;
  out.data = k * (m.data.array().max(amin).log10() -
                  std::log10(ref)).matrix();
  if (params.dynamic_range_db) {
    if (*params.dynamic_range_db <= 0.0)
      throw ValueError("to_decibels: dynamic range must be positive");
    const double top = out.data.maxCoeff();
    out.data = out.data.array().max(top - *params.dynamic_range_db).matrix();
  }
  return out;
}

double mel_scale(double hz) {
  if (hz < 0.0) throw ValueError("mel_scale: negative frequency");
  constexpr double kBreak = 1000.0;
  constexpr double kLinearSlope = 3.0 / 200.0;  // 15 mel at 1 kHz
  if (hz < kBreak) return hz * kLinearSlope;
  // 27 mel per ln(6.4); the x/x form keeps mel(6400) = 42 exact.
  return 15.0 + 27.0 * (std::log(hz / kBreak) / std::log(6.4));
}

double mel_to_hz(double mel) {
  if (mel < 0.0) throw ValueError("mel_to_hz: negative mel");
  constexpr double kBreakMel = 15.0;
  if (mel < kBreakMel) return mel * 200.0 / 3.0;
  return 1000.0 * std::exp((mel - kBreakMel) / 27.0 * std::log(6.4));
}

MelFilterbank mel_filterbank(int sample_rate, int n_fft, int n_mels,
                             double f_min, double f_max) {
  if (sample_rate <= 0) throw ValueError("mel_filterbank: sample_rate must be > 0");
  if (n_fft < 2 || n_fft % 2 != 0)
    throw ValueError("mel_filterbank: n_fft must be even and >= 2");
  if (n_mels < 1) throw ValueError("mel_filterbank: n_mels must be >= 1");
  const double nyquist = sample_rate / 2.0;
  if (!(0.0 <= f_min && f_min < f_max))
    throw ValueError("mel_filterbank: need 0 <= f_min < f_max");
  if (f_max > nyquist)
    throw ValueError("mel_filterbank: f_max " + std::to_string(f_max) +
                     " exceeds Nyquist " + std::to_string(nyquist));

  const int n_bins = n_fft / 2 + 1;
  const double mel_lo = mel_scale(f_min);
  const double mel_hi = mel_scale(f_max);
  std::vector<double> hz_points(static_cast<std::size_t>(n_mels) + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    hz_points[static_cast<std::size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  MelFilterbank fb;
  fb.f_min = f_min;
  fb.f_max = f_max;
  fb.weights = Eigen::MatrixXd::Zero(n_mels, n_bins);
  fb.center_frequencies_hz.assign(hz_points.begin() + 1,
                                  hz_points.end() - 1);

  for (int m = 0; m < n_mels; ++m) {
    const double lower = hz_points[static_cast<std::size_t>(m)];
    const double center = hz_points[static_cast<std::size_t>(m) + 1];
    const double upper = hz_points[static_cast<std::size_t>(m) + 2];
    const double norm = 2.0 / (upper - lower);
    bool any = false;
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double rising = (f - lower) / (center - lower);
      const double falling = (upper - f) / (upper - center);
      const double w = std::max(0.0, std::min(rising, falling));
      if (w > 0.0) any = true;
      fb.weights(m, k) = w * norm;
    }
    if (!any) fb.empty_filters.push_back(m);
  }
  return fb;
}

RealMatrix melspectrogram(const AudioBuffer& x, int n_fft, int hop_length,
                          int n_mels, double f_min, double f_max, int power) {
  const MelFilterbank fb =
      mel_filterbank(x.sample_rate, n_fft, n_mels, f_min, f_max);
  const RealMatrix mag = magnitude(stft(x, n_fft, hop_length), power);
  RealMatrix out;
  out.data = fb.weights * mag.data;
  out.scale = Scale::mel;
  out.hop_length = hop_length;
  out.sample_rate = x.sample_rate;
  out.bin_frequencies_hz = fb.center_frequencies_hz;
  return out;
}

RealMatrix cqt(const AudioBuffer& x, const CqtParams& params) {
  require_mono(x, "cqt");
  if (params.f_min <= 0.0) throw ValueError("cqt: f_min must be > 0");
  if (params.bins_per_octave < 1) throw ValueError("cqt: bins_per_octave must be >= 1");
  if (params.n_bins < 1) throw ValueError("cqt: n_bins must be >= 1");
  if (params.hop_length < 1) throw ValueError("cqt: hop_length must be >= 1");
  const double nyquist = x.sample_rate / 2.0;
  const double top = params.center_frequency(params.n_bins - 1);
  if (top >= nyquist)
    throw ValueError("cqt: top bin center " + std::to_string(top) +
                     " Hz is at or above Nyquist " + std::to_string(nyquist));

  const Eigen::Index len = x.samples.size();
  const double q = params.quality();
  const Eigen::Index longest = static_cast<Eigen::Index>(
      std::ceil(q * x.sample_rate / params.f_min));
  if (len <= longest)
    throw ValueError("cqt: signal (" + std::to_string(static_cast<long long>(len)) +
                     " samples) must be longer than the longest kernel (" +
                     std::to_string(static_cast<long long>(longest)) + ")");

  const Eigen::Index n_frames = ceil_div(len, params.hop_length);
  RealMatrix out;
  out.data.resize(params.n_bins, n_frames);
  out.scale = Scale::cqt;
  out.hop_length = params.hop_length;
  out.sample_rate = x.sample_rate;
  out.bin_frequencies_hz.resize(static_cast<std::size_t>(params.n_bins));

  for (int k = 0; k < params.n_bins; ++k) {
    const double f_k = params.center_frequency(k);
    out.bin_frequencies_hz[static_cast<std::size_t>(k)] = f_k;
    const Eigen::Index n_k =
        static_cast<Eigen::Index>(std::ceil(q * x.sample_rate / f_k));
    const Eigen::VectorXd window = hann_window(static_cast<int>(n_k));
    // Kernel indexed by window offset; the absolute-time phase factor would
    // be unimodular and drops out of the magnitude.
    Eigen::VectorXcd kernel(n_k);
    const double omega = 2.0 * kPi * f_k / x.sample_rate;
    for (Eigen::Index n = 0; n < n_k; ++n)
      kernel[n] = window[n] * std::complex<double>(std::cos(omega * n),
                                                   -std::sin(omega * n));
    for (Eigen::Index m = 0; m < n_frames; ++m) {
      const Eigen::Index start =
          m * static_cast<Eigen::Index>(params.hop_length) - n_k / 2;
      const Eigen::Index lo = std::max<Eigen::Index>(0, -start);
      const Eigen::Index hi = std::min<Eigen::Index>(n_k, len - start);
      std::complex<double> acc(0.0, 0.0);
      for (Eigen::Index n = lo; n < hi; ++n)
        acc += x.samples[start + n] * kernel[n];
      out.data(k, m) = std::abs(acc) / static_cast<double>(n_k);
    }
  }
  return out;
}

}  // namespace audioml::spectral
