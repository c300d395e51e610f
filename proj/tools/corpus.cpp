// Writes a small synthetic corpus (speech-like and noise WAVs) for simulate.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

#include "avse/error.hpp"
#include "avse/random.hpp"
#include "avse/synth.hpp"
#include "avse/wave.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  CLI::App app{"Synthetic speech/noise corpus"};
  std::string out;
  std::size_t speech = 12, noise = 8;
  double seconds = 12.0, rate = 16000.0;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "output directory (speech/ and noise/ are created)")->required();
  app.add_option("--speech", speech, "number of speech files");
  app.add_option("--noise", noise, "number of noise files");
  app.add_option("--seconds", seconds, "length of each file");
  app.add_option("--rate", rate, "sample rate");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path root(out);
    fs::create_directories(root / "speech");
    fs::create_directories(root / "noise");
    char name[64];
    for (std::size_t i = 0; i < speech; ++i) {
      std::snprintf(name, sizeof name, "speech_%03zu.wav", i);
      avse::write_wav(root / "speech" / name,
                      avse::synth_speech(seconds, rate, avse::Rng::derive_seed(seed, i)), rate);
    }
    const avse::NoiseKind kinds[] = {avse::NoiseKind::kWhite, avse::NoiseKind::kPink,
                                     avse::NoiseKind::kBrown, avse::NoiseKind::kBabble};
    for (std::size_t i = 0; i < noise; ++i) {
      const auto kind = kinds[i % 4];
      std::snprintf(name, sizeof name, "noise_%03zu_%s.wav", i, avse::to_string(kind).c_str());
      avse::write_wav(root / "noise" / name,
                      avse::synth_noise(kind, seconds, rate, avse::Rng::derive_seed(seed, 1000 + i)),
                      rate);
    }
    std::printf("wrote %zu speech and %zu noise files to %s\n", speech, noise, out.c_str());
  } catch (const avse::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
