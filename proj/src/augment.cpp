#include "audioml/augment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "audioml/spectral.hpp"

namespace audioml::augment {

namespace {

constexpr double kPi = std::numbers::pi;

// Second-order section, RBJ cookbook coefficients, Q = 1/sqrt(2). One causal
// pass (transposed direct form II); no zero-phase double filtering.
AudioBuffer biquad(const AudioBuffer& x, double cutoff_hz, bool highpass) {
  require_mono(x, "high_low_pass");
  const double nyquist = 0.5 * x.sample_rate;
  if (!(cutoff_hz > 0.0 && cutoff_hz < nyquist))
    throw ValueError("filter cutoff " + std::to_string(cutoff_hz) +
                     " Hz outside (0, " + std::to_string(nyquist) + ")");
  const double w0 = 2.0 * kPi * cutoff_hz / x.sample_rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * (1.0 / std::sqrt(2.0)));
  double b0, b1, b2;
  if (highpass) {
    b0 = (1.0 + cw) / 2.0;
    b1 = -(1.0 + cw);
    b2 = (1.0 + cw) / 2.0;
  } else {
    b0 = (1.0 - cw) / 2.0;
    b1 = 1.0 - cw;
    b2 = (1.0 - cw) / 2.0;
  }
  const double a0 = 1.0 + alpha;
  const double a1 = -2.0 * cw;
  const double a2 = 1.0 - alpha;
  b0 /= a0;
  b1 /= a0;
  b2 /= a0;
  const double na1 = a1 / a0;
  const double na2 = a2 / a0;

  AudioBuffer y(Eigen::VectorXd(x.samples.size()), x.sample_rate, 1);
  double s1 = 0.0, s2 = 0.0;
  for (Eigen::Index n = 0; n < x.samples.size(); ++n) {
    const double in = x.samples[n];
    const double out = b0 * in + s1;
    s1 = b1 * in - na1 * out + s2;
    s2 = b2 * in - na2 * out;
    y.samples[n] = out;
  }
  return y;
}

Eigen::Index delay_in_samples(double delay_ms, int sample_rate) {
  return static_cast<Eigen::Index>(
      std::lround(delay_ms * sample_rate / 1000.0));
}

double wrap_phase(double phi) {
  // Maps to (-pi, pi].
  const double wrapped = phi - 2.0 * kPi * std::floor((phi + kPi) / (2.0 * kPi));
  return wrapped <= -kPi ? wrapped + 2.0 * kPi : wrapped;
}

void check_range(double lo, double hi, const char* what) {
  if (!(lo <= hi))
    throw ValueError(std::string(what) + ": min " + std::to_string(lo) +
                     " exceeds max " + std::to_string(hi));
}

}  // namespace

const char* transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::random_resized_crop: return "random_resized_crop";
    case TransformKind::polarity_inversion: return "polarity_inversion";
    case TransformKind::gain: return "gain";
    case TransformKind::noise: return "noise";
    case TransformKind::high_low_pass: return "high_low_pass";
    case TransformKind::delay: return "delay";
    case TransformKind::pitch_shift: return "pitch_shift";
    case TransformKind::reverb: return "reverb";
  }
  return "?";
}

AudioBuffer crop_at(const AudioBuffer& x, Eigen::Index offset,
                    Eigen::Index n_samples) {
  require_mono(x, "random_resized_crop");
  if (n_samples < 1)
    throw ValueError("random_resized_crop: n_samples must be >= 1");
  if (offset < 0 || offset + n_samples > x.samples.size())
    throw ValueError("random_resized_crop: slice [" + std::to_string(offset) +
                     ", " + std::to_string(offset + n_samples) +
                     ") outside signal of length " +
                     std::to_string(x.samples.size()));
  return AudioBuffer(x.samples.segment(offset, n_samples), x.sample_rate, 1);
}

AudioBuffer polarity_inversion(const AudioBuffer& x) {
  return AudioBuffer(-x.samples, x.sample_rate, x.channels);
}

AudioBuffer apply_gain_db(const AudioBuffer& x, double gain_db) {
  const double scale = std::pow(10.0, gain_db / 20.0);
  return AudioBuffer(scale * x.samples, x.sample_rate, x.channels);
}

AudioBuffer lowpass_filter(const AudioBuffer& x, double cutoff_hz) {
  return biquad(x, cutoff_hz, /*highpass=*/false);
}

AudioBuffer highpass_filter(const AudioBuffer& x, double cutoff_hz) {
  return biquad(x, cutoff_hz, /*highpass=*/true);
}

AudioBuffer apply_delay(const AudioBuffer& x, double delay_ms,
                        double volume_factor) {
  require_mono(x, "delay");
  if (delay_ms < 0.0) throw ValueError("delay: delay_ms must be >= 0");
  if (volume_factor < 0.0)
    throw ValueError("delay: volume_factor must be >= 0");
  const Eigen::Index d = delay_in_samples(delay_ms, x.sample_rate);
  AudioBuffer y(x.samples, x.sample_rate, 1);
  const Eigen::Index len = x.samples.size();
  if (d < len)
    y.samples.tail(len - d) += volume_factor * x.samples.head(len - d);
  return y;
}

AudioBuffer pitch_shift_by(const AudioBuffer& x, int semitones) {
  require_mono(x, "pitch_shift");
  if (semitones < -12 || semitones > 12)
    throw ValueError("pitch_shift: semitones must lie in [-12, 12]");
  if (semitones == 0) return x;

  const double ratio = std::pow(2.0, semitones / 12.0);
  const int n_fft = 1024;
  const int hop = 256;
  const Eigen::Index len = x.samples.size();

  // Phase-vocoder time stretch to len * ratio samples at unchanged pitch.
  const spectral::ComplexSpectrogram grid = spectral::stft(x, n_fft, hop);
  const Eigen::Index n_bins = grid.data.rows();
  const Eigen::Index n_frames = grid.data.cols();
  const double rate = 1.0 / ratio;

  Eigen::VectorXd phase_acc(n_bins);
  for (Eigen::Index k = 0; k < n_bins; ++k)
    phase_acc[k] = std::arg(grid.data(k, 0));
  Eigen::VectorXd phi_adv(n_bins);
  for (Eigen::Index k = 0; k < n_bins; ++k)
    phi_adv[k] = 2.0 * kPi * static_cast<double>(k) * hop / n_fft;

  std::vector<Eigen::VectorXcd> frames;
  for (Eigen::Index j = 0;; ++j) {
    const double t = static_cast<double>(j) * rate;
    if (t >= static_cast<double>(n_frames)) break;
    const Eigen::Index i0 = static_cast<Eigen::Index>(t);
    const Eigen::Index i1 = std::min(i0 + 1, n_frames - 1);
    const double frac = t - static_cast<double>(i0);

    Eigen::VectorXcd frame(n_bins);
    for (Eigen::Index k = 0; k < n_bins; ++k) {
      const double mag = (1.0 - frac) * std::abs(grid.data(k, i0)) +
                         frac * std::abs(grid.data(k, i1));
      frame[k] = std::polar(mag, phase_acc[k]);
      const double dphi = wrap_phase(std::arg(grid.data(k, i1)) -
                                     std::arg(grid.data(k, i0)) - phi_adv[k]);
      phase_acc[k] += phi_adv[k] + dphi;
    }
    frames.push_back(std::move(frame));
  }

  spectral::ComplexSpectrogram stretched_grid;
  stretched_grid.n_fft = n_fft;
  stretched_grid.hop_length = hop;
  stretched_grid.sample_rate = x.sample_rate;
  stretched_grid.data.resize(n_bins, static_cast<Eigen::Index>(frames.size()));
  for (Eigen::Index c = 0; c < stretched_grid.data.cols(); ++c)
    stretched_grid.data.col(c) = frames[static_cast<std::size_t>(c)];

  const Eigen::Index stretched_len = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(len) * ratio));
  const AudioBuffer stretched = spectral::istft(stretched_grid, stretched_len);

  // Resample the stretch back to the input length: reading at speed `ratio`
  // undoes the duration change and scales all frequencies by `ratio`.
  AudioBuffer out(Eigen::VectorXd::Zero(len), x.sample_rate, 1);
  for (Eigen::Index t = 0; t < len; ++t) {
    const double pos = static_cast<double>(t) * ratio;
    const Eigen::Index ip = static_cast<Eigen::Index>(pos);
    if (ip >= stretched_len) break;
    const double frac = pos - static_cast<double>(ip);
    const double a = stretched.samples[ip];
    const double b = (ip + 1 < stretched_len) ? stretched.samples[ip + 1] : 0.0;
    out.samples[t] = (1.0 - frac) * a + frac * b;
  }
  return out;
}

AudioBuffer apply_reverb(const AudioBuffer& x, double room_size) {
  require_mono(x, "reverb");
  if (room_size < 0.0 || room_size > 1.0)
    throw ValueError("reverb: room_size must lie in [0, 1]");
  const Eigen::Index len = x.samples.size();
  const int sr = x.sample_rate;

  // Schroeder network: four parallel feedback combs (averaged), then two
  // series allpasses; feedback gain grows with room size but stays < 1.
  const double comb_ms[4] = {29.7, 37.1, 41.1, 43.7};
  const double g = 0.7 + 0.28 * room_size;
  Eigen::VectorXd wet = Eigen::VectorXd::Zero(len);
  for (double ms : comb_ms) {
    const Eigen::Index d = std::max<Eigen::Index>(1, delay_in_samples(ms, sr));
    Eigen::VectorXd y(len);
    for (Eigen::Index n = 0; n < len; ++n)
      y[n] = x.samples[n] + (n >= d ? g * y[n - d] : 0.0);
    wet += y;
  }
  wet *= 0.25;

  const double allpass_ms[2] = {5.0, 1.7};
  const double ag = 0.7;
  for (double ms : allpass_ms) {
    const Eigen::Index d = std::max<Eigen::Index>(1, delay_in_samples(ms, sr));
    Eigen::VectorXd y(len);
    for (Eigen::Index n = 0; n < len; ++n) {
      const double xd = n >= d ? wet[n - d] : 0.0;
      const double yd = n >= d ? y[n - d] : 0.0;
      y[n] = -ag * wet[n] + xd + ag * yd;
    }
    wet = y;
  }

  return AudioBuffer(0.5 * x.samples + 0.5 * wet, sr, 1);
}

AudioBuffer random_resized_crop(const AudioBuffer& x, Eigen::Index n_samples,
                                Rng& rng) {
  require_mono(x, "random_resized_crop");
  if (n_samples < 1)
    throw ValueError("random_resized_crop: n_samples must be >= 1");
  if (x.samples.size() < n_samples)
    throw ValueError("random_resized_crop: signal shorter than n_samples");
  const Eigen::Index offset = static_cast<Eigen::Index>(
      rng.uniform_int(0, x.samples.size() - n_samples));
  return crop_at(x, offset, n_samples);
}

AudioBuffer random_gain(const AudioBuffer& x, double min_db, double max_db,
                        Rng& rng) {
  check_range(min_db, max_db, "gain range");
  return apply_gain_db(x, rng.uniform(min_db, max_db));
}

AudioBuffer add_noise(const AudioBuffer& x, double snr_min, double snr_max,
                      Rng& rng) {
  if (snr_min < 0.0) throw ValueError("noise: ratio must be >= 0");
  check_range(snr_min, snr_max, "noise range");
  const double ratio = rng.uniform(snr_min, snr_max);
  const Eigen::Index len = x.samples.size();
  if (len == 0) return x;
  const double rms =
      std::sqrt(x.samples.squaredNorm() / static_cast<double>(len));
  if (rms == 0.0 || ratio == 0.0) return x;
  AudioBuffer y(x.samples, x.sample_rate, x.channels);
  const double std_dev = ratio * rms;
  for (Eigen::Index i = 0; i < len; ++i)
    y.samples[i] += std_dev * rng.normal();
  return y;
}

AudioBuffer high_low_pass(const AudioBuffer& x, double lowpass_min_hz,
                          double lowpass_max_hz, double highpass_min_hz,
                          double highpass_max_hz, Rng& rng) {
  check_range(lowpass_min_hz, lowpass_max_hz, "lowpass range");
  check_range(highpass_min_hz, highpass_max_hz, "highpass range");
  const bool lowpass = rng.uniform() < 0.5;
  if (lowpass)
    return lowpass_filter(x, rng.uniform(lowpass_min_hz, lowpass_max_hz));
  return highpass_filter(x, rng.uniform(highpass_min_hz, highpass_max_hz));
}

AudioBuffer random_delay(const AudioBuffer& x, double min_ms, double max_ms,
                         double interval_ms, double volume_factor, Rng& rng) {
  if (min_ms < 0.0) throw ValueError("delay: min_ms must be >= 0");
  if (interval_ms < 1.0)
    throw ValueError("delay: interval_ms must be >= 1 ms");
  if (volume_factor < 0.0)
    throw ValueError("delay: volume_factor must be >= 0");
  check_range(min_ms, max_ms, "delay range");
  const std::int64_t count = static_cast<std::int64_t>(
      std::floor((max_ms - min_ms) / interval_ms + 1e-9)) + 1;
  const std::int64_t idx = rng.uniform_int(0, count - 1);
  const double d = min_ms + static_cast<double>(idx) * interval_ms;
  return apply_delay(x, d, volume_factor);
}

AudioBuffer random_pitch_shift(const AudioBuffer& x, int semitone_min,
                               int semitone_max, Rng& rng) {
  if (semitone_min < -12 || semitone_max > 12)
    throw ValueError("pitch_shift: range must lie within [-12, 12]");
  check_range(semitone_min, semitone_max, "semitone range");
  const int s = static_cast<int>(rng.uniform_int(semitone_min, semitone_max));
  return pitch_shift_by(x, s);
}

AudioBuffer random_reverb(const AudioBuffer& x, double room_size_min,
                          double room_size_max, Rng& rng) {
  if (room_size_min < 0.0 || room_size_max > 1.0)
    throw ValueError("reverb: range must lie within [0, 1]");
  check_range(room_size_min, room_size_max, "room size range");
  return apply_reverb(x, rng.uniform(room_size_min, room_size_max));
}

AudioBuffer apply_transform(const AudioBuffer& x, const TransformSpec& spec,
                            Rng& stream) {
  if (spec.p < 0.0 || spec.p > 1.0)
    throw ValueError("apply probability must lie in [0, 1]");
  // First draw gates the transform; draws in [0,1) make p = 1 a sure apply.
  if (!(stream.uniform() < spec.p)) return x;
  switch (spec.kind) {
    case TransformKind::random_resized_crop:
      return random_resized_crop(x, spec.n_samples, stream);
    case TransformKind::polarity_inversion:
      return polarity_inversion(x);
    case TransformKind::gain:
      return random_gain(x, spec.gain_db_min, spec.gain_db_max, stream);
    case TransformKind::noise:
      return add_noise(x, spec.snr_min, spec.snr_max, stream);
    case TransformKind::high_low_pass:
      return high_low_pass(x, spec.lowpass_cutoff_min_hz,
                           spec.lowpass_cutoff_max_hz,
                           spec.highpass_cutoff_min_hz,
                           spec.highpass_cutoff_max_hz, stream);
    case TransformKind::delay:
      return random_delay(x, spec.delay_min_ms, spec.delay_max_ms,
                          spec.delay_interval_ms, spec.volume_factor, stream);
    case TransformKind::pitch_shift:
      return random_pitch_shift(x, spec.semitone_min, spec.semitone_max,
                                stream);
    case TransformKind::reverb:
      return random_reverb(x, spec.room_size_min, spec.room_size_max, stream);
  }
  throw ValueError("unknown transform kind");
}

std::vector<AudioBuffer> apply_pipeline(const AugmentationPipeline& pipeline,
                                        const AudioBuffer& x, int n_threads) {
  if (pipeline.num_views < 1)
    throw ValueError("pipeline: num_views must be >= 1");
  const Rng root(pipeline.seed);
  std::vector<AudioBuffer> views(static_cast<std::size_t>(pipeline.num_views));

  const auto run_view = [&](int v) {
    AudioBuffer current = x;
    for (std::size_t i = 0; i < pipeline.transforms.size(); ++i) {
      Rng stream = root.child(static_cast<std::uint64_t>(v),
                              static_cast<std::uint64_t>(i));
      current = apply_transform(current, pipeline.transforms[i], stream);
    }
    views[static_cast<std::size_t>(v)] = std::move(current);
  };

  if (n_threads <= 1 || pipeline.num_views == 1) {
    for (int v = 0; v < pipeline.num_views; ++v) run_view(v);
    return views;
  }

  const int workers = std::min(n_threads, pipeline.num_views);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int v = w; v < pipeline.num_views; v += workers) run_view(v);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return views;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ParseError("pipeline spec: " + path + ": " + why);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::pair<double, double> require_range(const json& v,
                                        const std::string& path) {
  if (!v.is_array() || v.size() != 2)
    fail(path, "expected a [min, max] pair");
  const double lo = require_number(v[0], path + "[0]");
  const double hi = require_number(v[1], path + "[1]");
  if (lo > hi) fail(path, "min exceeds max");
  return {lo, hi};
}

int require_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

TransformSpec parse_transform(const json& t, const std::string& path) {
  if (!t.is_object()) fail(path, "expected an object");
  reject_unknown_keys(t, path, {"kind", "p", "params"});
  if (!t.contains("kind")) fail(path + ".kind", "missing");
  if (!t["kind"].is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = t["kind"].get<std::string>();

  TransformSpec spec;
  if (t.contains("p")) {
    spec.p = require_number(t["p"], path + ".p");
    if (spec.p < 0.0 || spec.p > 1.0) fail(path + ".p", "outside [0, 1]");
  }
  const json params = t.contains("params") ? t["params"] : json::object();
  if (!params.is_object()) fail(path + ".params", "expected an object");
  const std::string pp = path + ".params";

  if (kind == "random_resized_crop") {
    spec.kind = TransformKind::random_resized_crop;
    reject_unknown_keys(params, pp, {"n_samples"});
    if (!params.contains("n_samples")) fail(pp + ".n_samples", "missing");
    const int n = require_int(params["n_samples"], pp + ".n_samples");
    if (n < 1) fail(pp + ".n_samples", "must be >= 1");
    spec.n_samples = n;
  } else if (kind == "polarity_inversion") {
    spec.kind = TransformKind::polarity_inversion;
    reject_unknown_keys(params, pp, {});
  } else if (kind == "gain") {
    spec.kind = TransformKind::gain;
    reject_unknown_keys(params, pp, {"gain_db_range"});
    if (params.contains("gain_db_range"))
      std::tie(spec.gain_db_min, spec.gain_db_max) =
          require_range(params["gain_db_range"], pp + ".gain_db_range");
  } else if (kind == "noise") {
    spec.kind = TransformKind::noise;
    reject_unknown_keys(params, pp, {"snr_range"});
    if (params.contains("snr_range")) {
      std::tie(spec.snr_min, spec.snr_max) =
          require_range(params["snr_range"], pp + ".snr_range");
      if (spec.snr_min < 0.0) fail(pp + ".snr_range", "min must be >= 0");
    }
  } else if (kind == "high_low_pass") {
    spec.kind = TransformKind::high_low_pass;
    reject_unknown_keys(params, pp,
                        {"lowpass_cutoff_range", "highpass_cutoff_range"});
    if (params.contains("lowpass_cutoff_range")) {
      std::tie(spec.lowpass_cutoff_min_hz, spec.lowpass_cutoff_max_hz) =
          require_range(params["lowpass_cutoff_range"],
                        pp + ".lowpass_cutoff_range");
      if (spec.lowpass_cutoff_min_hz <= 0.0)
        fail(pp + ".lowpass_cutoff_range", "cutoffs must be > 0");
    }
    if (params.contains("highpass_cutoff_range")) {
      std::tie(spec.highpass_cutoff_min_hz, spec.highpass_cutoff_max_hz) =
          require_range(params["highpass_cutoff_range"],
                        pp + ".highpass_cutoff_range");
      if (spec.highpass_cutoff_min_hz <= 0.0)
        fail(pp + ".highpass_cutoff_range", "cutoffs must be > 0");
    }
  } else if (kind == "delay") {
    spec.kind = TransformKind::delay;
    reject_unknown_keys(params, pp,
                        {"delay_range_ms", "delay_interval_ms",
                         "volume_factor"});
    if (params.contains("delay_range_ms")) {
      std::tie(spec.delay_min_ms, spec.delay_max_ms) =
          require_range(params["delay_range_ms"], pp + ".delay_range_ms");
      if (spec.delay_min_ms < 0.0)
        fail(pp + ".delay_range_ms", "min must be >= 0");
    }
    if (params.contains("delay_interval_ms")) {
      spec.delay_interval_ms =
          require_number(params["delay_interval_ms"], pp + ".delay_interval_ms");
      if (spec.delay_interval_ms < 1.0)
        fail(pp + ".delay_interval_ms", "must be >= 1 ms");
    }
    if (params.contains("volume_factor")) {
      spec.volume_factor =
          require_number(params["volume_factor"], pp + ".volume_factor");
      if (spec.volume_factor < 0.0)
        fail(pp + ".volume_factor", "must be >= 0");
    }
  } else if (kind == "pitch_shift") {
    spec.kind = TransformKind::pitch_shift;
    reject_unknown_keys(params, pp, {"semitone_range"});
    if (params.contains("semitone_range")) {
      const json& r = params["semitone_range"];
      if (!r.is_array() || r.size() != 2)
        fail(pp + ".semitone_range", "expected a [min, max] pair");
      spec.semitone_min = require_int(r[0], pp + ".semitone_range[0]");
      spec.semitone_max = require_int(r[1], pp + ".semitone_range[1]");
      if (spec.semitone_min > spec.semitone_max)
        fail(pp + ".semitone_range", "min exceeds max");
      if (spec.semitone_min < -12 || spec.semitone_max > 12)
        fail(pp + ".semitone_range", "must lie within [-12, 12]");
    }
  } else if (kind == "reverb") {
    spec.kind = TransformKind::reverb;
    reject_unknown_keys(params, pp, {"room_size_range"});
    if (params.contains("room_size_range")) {
      std::tie(spec.room_size_min, spec.room_size_max) =
          require_range(params["room_size_range"], pp + ".room_size_range");
      if (spec.room_size_min < 0.0 || spec.room_size_max > 1.0)
        fail(pp + ".room_size_range", "must lie within [0, 1]");
    }
  } else {
    fail(path + ".kind", "unknown transform kind '" + kind + "'");
  }
  return spec;
}

}  // namespace

AugmentationPipeline parse_pipeline_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("pipeline spec: malformed JSON: ") +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("pipeline spec: expected an object");
  reject_unknown_keys(doc, "$", {"seed", "num_views", "transforms"});

  AugmentationPipeline pipeline;
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_integer() && !s.is_number_unsigned())
      fail("$.seed", "expected an integer");
    if (s.is_number_integer() && !s.is_number_unsigned() &&
        s.get<std::int64_t>() < 0)
      fail("$.seed", "must be >= 0");
    pipeline.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("num_views")) {
    pipeline.num_views = require_int(doc["num_views"], "$.num_views");
    if (pipeline.num_views < 1) fail("$.num_views", "must be >= 1");
  }
  if (doc.contains("transforms")) {
    const json& arr = doc["transforms"];
    if (!arr.is_array()) fail("$.transforms", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      pipeline.transforms.push_back(parse_transform(
          arr[i], "$.transforms[" + std::to_string(i) + "]"));
  }
  return pipeline;
}

}  // namespace audioml::augment
