#include "audioml/audio_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace audioml::io {

namespace {

// All RIFF integers are little-endian; assemble bytes explicitly so the
// reader is endian-agnostic.
std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(static_cast<std::uint32_t>(p[0]) |
                                    (static_cast<std::uint32_t>(p[1]) << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

float bits_to_float(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::uint32_t float_to_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  return bits;
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_wav: cannot open file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("load_wav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format_tag = 0, channels = 0, bits_per_sample = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t size = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size())
      throw ParseError("load_wav: truncated chunk '" + std::string(id, 4) +
                       "' in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw ParseError("load_wav: fmt chunk too small in " + path);
      format_tag = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits_per_sample = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw ParseError("load_wav: missing fmt chunk in " + path);
  if (data == nullptr) throw ParseError("load_wav: missing data chunk in " + path);
  if (format_tag != 1 && format_tag != 3)
    throw ParseError("load_wav: unsupported codec (format tag " +
                     std::to_string(format_tag) +
                     "); only PCM int16 (1) and IEEE float32 (3) are read: " +
                     path);
  if (format_tag == 1 && bits_per_sample != 16)
    throw ParseError("load_wav: unsupported PCM precision " +
                     std::to_string(bits_per_sample) + " bits (want 16): " +
                     path);
  if (format_tag == 3 && bits_per_sample != 32)
    throw ParseError("load_wav: unsupported float precision " +
                     std::to_string(bits_per_sample) + " bits (want 32): " +
                     path);
  if (channels < 1) throw ParseError("load_wav: zero channels in " + path);
  if (sample_rate == 0) throw ParseError("load_wav: zero sample rate in " + path);

  const std::size_t bytes_per = bits_per_sample / 8;
  const std::size_t count = data_size / bytes_per;
  if (count % channels != 0)
    throw ParseError("load_wav: data size not divisible by frame size in " +
                     path);

  Eigen::VectorXd samples(static_cast<Eigen::Index>(count));
  if (format_tag == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::int16_t s =
          static_cast<std::int16_t>(read_u16(data + 2 * i));
      samples[static_cast<Eigen::Index>(i)] = static_cast<double>(s) / 32768.0;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      samples[static_cast<Eigen::Index>(i)] =
          static_cast<double>(bits_to_float(read_u32(data + 4 * i)));
  }
  return AudioBuffer(std::move(samples), static_cast<int>(sample_rate),
                     static_cast<int>(channels));
}

void save_wav(const AudioBuffer& buffer, const std::string& path,
              BitDepth bit_depth) {
  buffer.validate();
  if (buffer.samples.size() == 0)
    throw ValueError("save_wav: refusing to write empty buffer");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_wav: cannot open for write: " + path);

  const std::uint16_t format_tag = bit_depth == BitDepth::pcm16 ? 1 : 3;
  const std::uint16_t bits = bit_depth == BitDepth::pcm16 ? 16 : 32;
  const std::uint16_t channels = static_cast<std::uint16_t>(buffer.channels);
  const std::uint32_t sr = static_cast<std::uint32_t>(buffer.sample_rate);
  const std::uint16_t block_align =
      static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t n = static_cast<std::uint32_t>(buffer.samples.size());
  const std::uint32_t data_size = n * (bits / 8);

  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, format_tag);
  write_u16(out, channels);
  write_u32(out, sr);
  write_u32(out, sr * block_align);  // byte rate
  write_u16(out, block_align);
  write_u16(out, bits);
  out.write("data", 4);
  write_u32(out, data_size);

  if (bit_depth == BitDepth::pcm16) {
    for (Eigen::Index i = 0; i < buffer.samples.size(); ++i) {
      double scaled = std::lround(buffer.samples[i] * 32768.0);
      if (scaled > 32767.0) scaled = 32767.0;
      if (scaled < -32768.0) scaled = -32768.0;
      write_u16(out, static_cast<std::uint16_t>(
                         static_cast<std::int16_t>(scaled)));
    }
  } else {
    for (Eigen::Index i = 0; i < buffer.samples.size(); ++i)
      write_u32(out, float_to_bits(static_cast<float>(buffer.samples[i])));
  }
  if (!out) throw IoError("save_wav: write failed: " + path);
}

AudioBuffer downmix_to_mono(const AudioBuffer& buffer) {
  buffer.validate();
  if (buffer.channels == 1) return buffer;
  const Eigen::Index frames = buffer.num_frames();
  Eigen::VectorXd mono(frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < buffer.channels; ++c)
      acc += buffer.samples[f * buffer.channels + c];
    mono[f] = acc / buffer.channels;
  }
  return AudioBuffer(std::move(mono), buffer.sample_rate, 1);
}

}  // namespace audioml::io
