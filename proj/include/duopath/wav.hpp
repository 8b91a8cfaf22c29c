#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "duopath/common.hpp"

namespace duopath {

enum class WavFormat { pcm16, float32 };

/// Interleaved-free audio buffer; samples are doubles in [-1, 1] nominal range.
struct AudioBuffer {
  double sample_rate = 16000.0;
  std::vector<std::vector<double>> channels;
  WavFormat source_format = WavFormat::pcm16;

  int n_channels() const { return static_cast<int>(channels.size()); }
  std::size_t n_samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void write_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace detail

/// Reads a RIFF/WAVE file. Supported encodings: 16-bit PCM and 32-bit IEEE
/// float (plain or WAVE_FORMAT_EXTENSIBLE); anything else is rejected with a
/// clear error. Resampling is out of scope, so callers must check the rate.
inline AudioBuffer read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* samples = nullptr;
  std::size_t data_len = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const std::uint32_t len = detail::read_u32(data.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > data.size()) break;
    if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
      format_tag = detail::read_u16(data.data() + body);
      channels = detail::read_u16(data.data() + body + 2);
      rate = detail::read_u32(data.data() + body + 4);
      bits = detail::read_u16(data.data() + body + 14);
      if (format_tag == 0xFFFE && len >= 40) {
        // extensible: first two bytes of the SubFormat GUID carry the real tag
        format_tag = detail::read_u16(data.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      samples = data.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word aligned
  }

  if (!have_fmt || samples == nullptr) throw IoError("WAV missing fmt or data chunk: " + path);
  if (channels == 0) throw IoError("WAV has zero channels: " + path);

  AudioBuffer buf;
  buf.sample_rate = static_cast<double>(rate);
  buf.channels.resize(channels);

  if (format_tag == 1 && bits == 16) {
    buf.source_format = WavFormat::pcm16;
    const std::size_t frames = data_len / (2u * channels);
    for (auto& ch : buf.channels) ch.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::uint16_t c = 0; c < channels; ++c) {
        const unsigned char* p = samples + 2 * (i * channels + c);
        const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        buf.channels[c][i] = static_cast<double>(v) / 32768.0;
      }
    }
  } else if (format_tag == 3 && bits == 32) {
    buf.source_format = WavFormat::float32;
    const std::size_t frames = data_len / (4u * channels);
    for (auto& ch : buf.channels) ch.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::uint16_t c = 0; c < channels; ++c) {
        float v = 0.0f;
        std::memcpy(&v, samples + 4 * (i * channels + c), 4);
        buf.channels[c][i] = static_cast<double>(v);
      }
    }
  } else {
    throw IoError("unsupported WAV encoding (want 16-bit PCM or 32-bit float), got format tag " +
                  std::to_string(format_tag) + " with " + std::to_string(bits) + " bits: " + path);
  }
  return buf;
}

/// Writes a RIFF/WAVE file in the requested encoding. PCM output is rounded
/// and clamped to [-1, 1); float output is written verbatim.
inline void write_wav(const std::string& path, const AudioBuffer& buf, WavFormat format) {
  require(!buf.channels.empty(), "write_wav: no channels");
  const std::size_t frames = buf.n_samples();
  for (const auto& ch : buf.channels) {
    require(ch.size() == frames, "write_wav: channels differ in length");
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot create WAV file: " + path);

  const std::uint16_t channels = static_cast<std::uint16_t>(buf.n_channels());
  const std::uint16_t bits = (format == WavFormat::pcm16) ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_len = static_cast<std::uint32_t>(frames * block);
  const bool is_float = format == WavFormat::float32;
  // float files carry a fact chunk for player compatibility
  const std::uint32_t riff_len = 4 + (8 + 16) + (is_float ? 8 + 4 : 0) + (8 + data_len);

  f.write("RIFF", 4);
  detail::write_u32(f, riff_len);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  detail::write_u32(f, 16);
  detail::write_u16(f, is_float ? 3 : 1);
  detail::write_u16(f, channels);
  detail::write_u32(f, static_cast<std::uint32_t>(buf.sample_rate));
  detail::write_u32(f, static_cast<std::uint32_t>(buf.sample_rate) * block);
  detail::write_u16(f, block);
  detail::write_u16(f, bits);
  if (is_float) {
    f.write("fact", 4);
    detail::write_u32(f, 4);
    detail::write_u32(f, static_cast<std::uint32_t>(frames));
  }
  f.write("data", 4);
  detail::write_u32(f, data_len);

  if (format == WavFormat::pcm16) {
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::uint16_t c = 0; c < channels; ++c) {
        double v = buf.channels[c][i] * 32768.0;
        v = std::max(-32768.0, std::min(32767.0, std::round(v)));
        detail::write_u16(f, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
      }
    }
  } else {
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::uint16_t c = 0; c < channels; ++c) {
        const float v = static_cast<float>(buf.channels[c][i]);
        char b[4];
        std::memcpy(b, &v, 4);
        f.write(b, 4);
      }
    }
  }
  if (!f) throw IoError("failed while writing WAV: " + path);
}

}  // namespace duopath
