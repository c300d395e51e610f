#include "avse/wave.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "avse/error.hpp"

namespace avse {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

MultichannelWave MultichannelWave::zeros(std::size_t num_channels, std::size_t num_samples,
                                         double sample_rate) {
  MultichannelWave w;
  w.sample_rate = sample_rate;
  w.channels.assign(num_channels, std::vector<double>(num_samples, 0.0));
  return w;
}

void MultichannelWave::validate() const {
  if (channels.empty()) throw InvalidInput("wave has no channels");
  const auto n = channels.front().size();
  for (std::size_t m = 1; m < channels.size(); ++m) {
    if (channels[m].size() != n) {
      throw InvalidInput("wave channel " + std::to_string(m) + " has " +
                         std::to_string(channels[m].size()) + " samples, expected " +
                         std::to_string(n));
    }
  }
  if (!(sample_rate > 0.0)) throw InvalidInput("wave sample rate must be positive");
}

MultichannelWave read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) -> IoError {
    return IoError("malformed WAV file " + path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("missing RIFF/WAVE header");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto* chunk = bytes.data() + pos;
    const auto size = load<std::uint32_t>(chunk + 4);
    const std::size_t avail = bytes.size() - pos - 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > avail) throw fail("bad fmt chunk");
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) throw fail("bad extensible fmt chunk");
        format = load<std::uint16_t>(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, avail);
    }
    pos += 8 + size + (size & 1u);
  }
  if (channels == 0 || rate == 0) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw fail("unsupported sample format (format " + std::to_string(format) + ", " +
               std::to_string(bits) + " bits); expected 16-bit PCM or 32-bit float");
  }
  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data_size / frame_bytes;

  auto wave = MultichannelWave::zeros(channels, frames, static_cast<double>(rate));
  for (std::size_t n = 0; n < frames; ++n) {
    const auto* frame = data + n * frame_bytes;
    for (std::size_t m = 0; m < channels; ++m) {
      wave.channels[m][n] =
          pcm16 ? load<std::int16_t>(frame + 2 * m) / 32768.0
                : static_cast<double>(load<float>(frame + 4 * m));
    }
  }
  return wave;
}

void write_wav(const std::filesystem::path& path, const MultichannelWave& wave,
               SampleFormat format) {
  wave.validate();
  const auto channels = static_cast<std::uint16_t>(wave.num_channels());
  const std::uint16_t bits = format == SampleFormat::kPcm16 ? 16 : 32;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(wave.sample_rate));
  const std::uint32_t block = channels * (bits / 8u);
  const auto frames = wave.num_samples();
  const auto data_size = static_cast<std::uint32_t>(frames * block);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  store<std::uint32_t>(out, 36 + data_size);
  out.append("WAVEfmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, format == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, rate);
  store<std::uint32_t>(out, rate * block);
  store<std::uint16_t>(out, static_cast<std::uint16_t>(block));
  store<std::uint16_t>(out, bits);
  out.append("data");
  store<std::uint32_t>(out, data_size);
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t m = 0; m < channels; ++m) {
      const double v = wave.channels[m][n];
      if (format == SampleFormat::kPcm16) {
        const double q = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
        store<std::int16_t>(out, static_cast<std::int16_t>(q));
      } else {
        store<float>(out, static_cast<float>(v));
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write WAV file " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing WAV file " + path.string());
}

void write_wav(const std::filesystem::path& path, std::span<const double> mono,
               double sample_rate, SampleFormat format) {
  MultichannelWave w;
  w.sample_rate = sample_rate;
  w.channels.emplace_back(mono.begin(), mono.end());
  write_wav(path, w, format);
}

}  // namespace avse
