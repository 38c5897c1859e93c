#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "opra/core/bands.hpp"

namespace opra::io {

struct WavData {
  std::vector<std::vector<double>> channels;  // [channel][sample], -1..1 nominal
  double sample_rate_hz = 0.0;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration_s() const { return frames() / sample_rate_hz; }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

/// Linear-PCM RIFF/WAVE reader: 16/24/32-bit integer and 32/64-bit float,
/// any channel count.
inline WavData read_wav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open audio file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ValidationError("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, n_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t chunk_len = detail::read_u32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && chunk_len >= 16) {
      format = detail::read_u16(chunk + 8);
      n_channels = detail::read_u16(chunk + 10);
      rate = detail::read_u32(chunk + 12);
      bits = detail::read_u16(chunk + 22);
      if (format == 0xFFFE && chunk_len >= 40)  // extensible: subformat GUID
        format = detail::read_u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min<std::uint32_t>(chunk_len,
                                         static_cast<std::uint32_t>(bytes.size() - pos - 8));
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  if (!data || n_channels == 0 || rate == 0)
    throw ValidationError("malformed WAVE file: " + path);

  std::size_t bytes_per_sample = bits / 8;
  if ((format == 1 && bits != 16 && bits != 24 && bits != 32) ||
      (format == 3 && bits != 32 && bits != 64) || (format != 1 && format != 3))
    throw ValidationError("unsupported WAVE encoding in " + path + ": format " +
                          std::to_string(format) + ", " + std::to_string(bits) + " bits");

  std::size_t n_frames = data_len / (bytes_per_sample * n_channels);
  WavData out;
  out.sample_rate_hz = static_cast<double>(rate);
  out.channels.assign(n_channels, std::vector<double>(n_frames));
  for (std::size_t frame = 0; frame < n_frames; ++frame) {
    for (std::size_t ch = 0; ch < n_channels; ++ch) {
      const unsigned char* p = data + (frame * n_channels + ch) * bytes_per_sample;
      double v = 0.0;
      if (format == 1 && bits == 16) {
        std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        v = static_cast<double>(s) / 32768.0;
      } else if (format == 1 && bits == 24) {
        std::int32_t s = (p[0] << 8) | (p[1] << 16) | (p[2] << 24);
        v = static_cast<double>(s >> 8) / 8388608.0;
      } else if (format == 1 && bits == 32) {
        std::int32_t s;
        std::memcpy(&s, p, 4);
        v = static_cast<double>(s) / 2147483648.0;
      } else if (format == 3 && bits == 32) {
        float f;
        std::memcpy(&f, p, 4);
        v = static_cast<double>(f);
      } else {
        double d;
        std::memcpy(&d, p, 8);
        v = d;
      }
      out.channels[ch][frame] = v;
    }
  }
  return out;
}

/// IEEE float32 writer (one chunk layout, canonical bytes).
inline void write_wav(const std::string& path, const std::vector<std::vector<double>>& channels,
                      double sample_rate_hz) {
  if (channels.empty() || channels.front().empty())
    throw ValidationError("write_wav: no samples");
  std::size_t n_frames = channels.front().size();
  for (const auto& ch : channels)
    if (ch.size() != n_frames) throw ValidationError("write_wav: ragged channels");

  std::uint16_t n_channels = static_cast<std::uint16_t>(channels.size());
  std::uint32_t rate = static_cast<std::uint32_t>(sample_rate_hz);
  std::uint32_t data_len = static_cast<std::uint32_t>(n_frames * n_channels * 4);

  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot create audio file: " + path);
  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    file.write(reinterpret_cast<const char*>(b), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF)};
    file.write(reinterpret_cast<const char*>(b), 2);
  };

  file.write("RIFF", 4);
  put_u32(36 + data_len);
  file.write("WAVE", 4);
  file.write("fmt ", 4);
  put_u32(16);
  put_u16(3);  // IEEE float
  put_u16(n_channels);
  put_u32(rate);
  put_u32(rate * n_channels * 4);
  put_u16(n_channels * 4);
  put_u16(32);
  file.write("data", 4);
  put_u32(data_len);
  for (std::size_t frame = 0; frame < n_frames; ++frame)
    for (std::size_t ch = 0; ch < n_channels; ++ch) {
      float f = static_cast<float>(channels[ch][frame]);
      file.write(reinterpret_cast<const char*>(&f), 4);
    }
  if (!file) throw ValidationError("write failed: " + path);
}

}  // namespace opra::io
