// End-to-end enhancement: per-channel STFT -> delay-and-sum -> total power ->
// mask (oracle IRM, GRU, or none) -> gain -> inverse STFT, in a whole-signal
// form and a hop-by-hop streaming form that produce identical samples.
#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avse/beamformer.hpp"
#include "avse/gru.hpp"
#include "avse/stft.hpp"
#include "avse/wave.hpp"

namespace avse {

enum class MaskSource { kOracle, kGru, kNone };
enum class OutputNormalization { kPeak, kNone };

MaskSource mask_source_from_string(const std::string& name);
std::string to_string(MaskSource source);
OutputNormalization normalization_from_string(const std::string& name);
std::string to_string(OutputNormalization normalization);

struct PipelineConfig {
  StftConfig stft;
  MaskSource mask_source = MaskSource::kNone;
  OutputNormalization normalization = OutputNormalization::kPeak;
  double peak_level = 0.9;
  // The beam is aligned to the array origin; when set, it is delayed by this
  // microphone's TDoA so the output lines up with that microphone's signal.
  std::optional<std::size_t> align_to_mic = 0;
};

struct PipelineInputs {
  const MultichannelWave* mixture = nullptr;
  const TdoaTrajectory* trajectory = nullptr;
  const MultichannelWave* target_images = nullptr;  // oracle mode
  const MultichannelWave* noise_images = nullptr;   // oracle mode
  const GruPostfilter* model = nullptr;             // gru mode
};

struct EnhanceResult {
  std::vector<double> output;  // mixture length, before output normalization
  ComplexSpectrogram beam;     // Y
  PowerSpectrogram total_power;
  MaskSpectrogram mask;        // empty in kNone mode
};

// Throws InvalidInput/InvalidConfig when the inputs do not fit the mode.
void check_pipeline_inputs(const PipelineInputs& inputs, const PipelineConfig& config);

EnhanceResult enhance(const PipelineInputs& inputs, const PipelineConfig& config);

// Peak normalization to config.peak_level (no-op for kNone or silent input).
void normalize_output(std::vector<double>& signal, const PipelineConfig& config);

// Hop-by-hop form of enhance().
class StreamingEnhancer {
 public:
  StreamingEnhancer(std::size_t num_channels, const PipelineConfig& config,
                    const GruPostfilter* model = nullptr);

  // Consumes one hop per channel (plus the oracle component hops in oracle
  // mode) and writes `hop` output samples. `tdoas` is the vector for frame
  // next_frame(); it is only read when this push completes a frame. Before
  // the first frame the output is zeros and false is returned.
  bool push(std::span<const std::span<const double>> hop, std::span<const double> tdoas,
            std::span<double> out,
            std::span<const std::span<const double>> target_hop = {},
            std::span<const std::span<const double>> noise_hop = {});

  // Final hop of overlap-add tail.
  std::vector<double> flush();

  std::size_t next_frame() const { return frames_; }
  std::size_t num_channels() const { return beam_.num_channels(); }
  const PipelineConfig& config() const { return config_; }

 private:
  PipelineConfig config_;
  BeamformerStream beam_;
  std::optional<GruState> gru_;
  const GruPostfilter* model_ = nullptr;
  std::vector<StreamingStft> target_stfts_;
  std::vector<StreamingStft> noise_stfts_;
  StreamingIstft istft_;
  BeamformerFrame frame_;
  std::vector<std::vector<Complex>> scratch_;
  std::vector<std::span<const Complex>> views_;
  std::vector<double> speech_power_, noise_power_;
  std::vector<double> features_, mask_, gain_;
  std::vector<Complex> out_frame_;
  bool started_ = false;
  std::size_t frames_ = 0;
};

struct LatencyReport {
  double algorithmic_ms = 0.0;  // (N + hop) / rate
  double hop_ms = 0.0;          // real-time budget per hop
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  double real_time_factor = 0.0;  // compute time / audio duration
  std::size_t hops = 0;
};

double algorithmic_latency_ms(const StftConfig& config);

struct StreamResult {
  std::vector<double> output;  // mixture length, before output normalization
  LatencyReport latency;
};

// Drives StreamingEnhancer over a whole recording, timing every push.
StreamResult run_streaming(const PipelineInputs& inputs, const PipelineConfig& config);

LatencyReport summarize_latency(std::vector<double> hop_ms, const StftConfig& config,
                                double audio_seconds);

}  // namespace avse
