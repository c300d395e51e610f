// Synthetic test signals: a speech-like source (voiced syllables with formants,
// fricatives and pauses) and coloured noises. Used to build small corpora for
// tests and demos; every generator is deterministic in its seed.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace avse {

std::vector<double> synth_speech(double seconds, double sample_rate, std::uint64_t seed);

enum class NoiseKind { kWhite, kPink, kBrown, kBabble };

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

// Peak-normalized to 0.5.
std::vector<double> synth_noise(NoiseKind kind, double seconds, double sample_rate,
                                std::uint64_t seed);

}  // namespace avse
