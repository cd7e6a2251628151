#pragma once

#include <string>

#include "audioml/audio_buffer.hpp"

namespace audioml::io {

enum class BitDepth { pcm16, float32 };

// Reads a RIFF/WAVE file holding 16-bit integer PCM (format tag 1) or 32-bit
// IEEE float PCM (format tag 3). Int16 samples map to doubles by s / 32768.
// Compressed codecs, other bit depths, and non-RIFF content are rejected with
// distinct diagnostics.
AudioBuffer load_wav(const std::string& path);

// Writes a canonical 44-byte header plus data chunk. pcm16 rounds and
// saturates to [-32768, 32767]; float32 is lossless for float-valued samples.
void save_wav(const AudioBuffer& buffer, const std::string& path,
              BitDepth bit_depth);

// Unweighted per-frame channel mean; sample_rate preserved. Mono in, same
// buffer out.
AudioBuffer downmix_to_mono(const AudioBuffer& buffer);

}  // namespace audioml::io
