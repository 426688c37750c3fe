#include "rsed/wav.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rsed/types.hpp"

namespace rsed {
namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::ostream& os, uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), b.size());
}

void put_u16(std::ostream& os, uint16_t v) {
  const std::array<char, 2> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b.data(), b.size());
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) {
    return DataError("malformed WAV (" + why + "): " + path.string());
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("missing RIFF/WAVE header");
  }

  WavData out;
  bool have_fmt = false;
  int format_tag = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw fail("chunk overruns file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      format_tag = read_u16(bytes.data() + body);
      out.channels = read_u16(bytes.data() + body + 2);
      out.sample_rate = static_cast<int>(read_u32(bytes.data() + body + 4));
      out.bits_per_sample = read_u16(bytes.data() + body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real tag in the sub-format GUID.
      if (format_tag == 0xFFFE && size >= 26) format_tag = read_u16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (format_tag != 1) throw fail("not PCM");
      if (out.bits_per_sample == 16) {
        const std::size_t n = size / 2;
        out.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          out.samples[i] = static_cast<int16_t>(read_u16(bytes.data() + body + 2 * i));
        }
      }
      return out;
    }
    pos = body + size + (size & 1u);
  }
  throw fail(have_fmt ? "no data chunk" : "no fmt chunk");
}

void write_wav(const std::filesystem::path& path, std::span<const int16_t> samples,
               int sample_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write WAV file: " + path.string());
  const auto data_bytes = static_cast<uint32_t>(samples.size() * 2);
  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(os, 16);
  put_u16(os, 1);  // PCM
  put_u16(os, 1);  // mono
  put_u32(os, static_cast<uint32_t>(sample_rate));
  put_u32(os, static_cast<uint32_t>(sample_rate * 2));
  put_u16(os, 2);
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (int16_t s : samples) put_u16(os, static_cast<uint16_t>(s));
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace rsed
