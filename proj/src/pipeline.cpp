#include "avse/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "avse/error.hpp"
#include "avse/postfilter.hpp"

namespace avse {

namespace {

void check_components(const MultichannelWave* w, const MultichannelWave& mixture,
                      const char* name) {
  if (w == nullptr) throw InvalidConfig(std::string("oracle mode requires the ") + name + " file");
  w->validate();
  if (w->num_channels() != mixture.num_channels() || w->num_samples() != mixture.num_samples()) {
    throw InvalidInput(std::string("oracle ") + name + " images do not match the mixture shape");
  }
}

}  // namespace

MaskSource mask_source_from_string(const std::string& name) {
  if (name == "oracle") return MaskSource::kOracle;
  if (name == "gru") return MaskSource::kGru;
  if (name == "none") return MaskSource::kNone;
  throw InvalidConfig("unknown mask source '" + name + "' (oracle, gru, none)");
}

std::string to_string(MaskSource source) {
  switch (source) {
    case MaskSource::kOracle: return "oracle";
    case MaskSource::kGru: return "gru";
    case MaskSource::kNone: return "none";
  }
  return "none";
}

OutputNormalization normalization_from_string(const std::string& name) {
  if (name == "peak") return OutputNormalization::kPeak;
  if (name == "none") return OutputNormalization::kNone;
  throw InvalidConfig("unknown output normalization '" + name + "' (peak, none)");
}

std::string to_string(OutputNormalization normalization) {
  return normalization == OutputNormalization::kPeak ? "peak" : "none";
}

void check_pipeline_inputs(const PipelineInputs& in, const PipelineConfig& config) {
  config.stft.validate();
  if (in.mixture == nullptr) throw InvalidConfig("no mixture given");
  if (in.trajectory == nullptr) throw InvalidConfig("no TDoA trajectory given");
  const auto& mix = *in.mixture;
  mix.validate();
  if (mix.sample_rate != config.stft.sample_rate) {
    throw InvalidInput("mixture sample rate " + std::to_string(mix.sample_rate) +
                       " Hz, pipeline expects " + std::to_string(config.stft.sample_rate));
  }
  if (mix.num_samples() == 0) throw InvalidInput("mixture is empty");
  const auto& traj = *in.trajectory;
  traj.validate();
  if (traj.num_mics != mix.num_channels()) {
    throw InvalidInput("TDoA trajectory has " + std::to_string(traj.num_mics) +
                       " microphones, mixture has " + std::to_string(mix.num_channels()) +
                       " channels");
  }
  const std::size_t frames = num_frames(mix.num_samples(), config.stft);
  if (traj.num_frames() < frames) {
    throw InvalidInput("TDoA trajectory has " + std::to_string(traj.num_frames()) +
                       " frames, mixture needs " + std::to_string(frames));
  }
  if (config.align_to_mic && *config.align_to_mic >= mix.num_channels()) {
    throw InvalidConfig("reference microphone " + std::to_string(*config.align_to_mic + 1) +
                        " does not exist");
  }
  if (config.mask_source == MaskSource::kOracle) {
    check_components(in.target_images, mix, "target");
    check_components(in.noise_images, mix, "noise");
  }
  if (config.mask_source == MaskSource::kGru) {
    if (in.model == nullptr) throw InvalidConfig("gru mode requires a weights file");
    if (in.model->input_dim() != 2 * config.stft.bins() ||
        in.model->output_dim() != config.stft.bins()) {
      throw InvalidWeights("weights map " + std::to_string(in.model->input_dim()) + " -> " +
                           std::to_string(in.model->output_dim()) + ", pipeline needs " +
                           std::to_string(2 * config.stft.bins()) + " -> " +
                           std::to_string(config.stft.bins()));
    }
  }
}

EnhanceResult enhance(const PipelineInputs& in, const PipelineConfig& config) {
  check_pipeline_inputs(in, config);
  const auto& mix = *in.mixture;
  const auto& traj = *in.trajectory;

  EnhanceResult r;
  const auto specs = multichannel_stft(mix, config.stft);
  r.beam = delay_and_sum(specs, traj);
  r.total_power = total_power_reference(specs);

  ComplexSpectrogram z;
  switch (config.mask_source) {
    case MaskSource::kNone:
      z = r.beam;
      break;
    case MaskSource::kOracle: {
      const auto s = multichannel_stft(*in.target_images, config.stft);
      const auto b = multichannel_stft(*in.noise_images, config.stft);
      r.mask = ideal_ratio_mask(s, b);
      z = apply_gain(r.beam, mask_to_gain(r.mask));
      break;
    }
    case MaskSource::kGru: {
      const auto features = make_features(r.beam, r.total_power, *in.model);
      r.mask = gru_infer(features, *in.model);
      z = apply_gain(r.beam, mask_to_gain(r.mask));
      break;
    }
  }
  if (config.align_to_mic) {
    for (std::size_t l = 0; l < z.frames(); ++l) {
      delay_frame(z.frame(l), traj.at(l)[*config.align_to_mic], config.stft.frame_size);
    }
  }
  r.output = istft(z, mix.num_samples());
  return r;
}

void normalize_output(std::vector<double>& signal, const PipelineConfig& config) {
  if (config.normalization != OutputNormalization::kPeak) return;
  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const double g = config.peak_level / peak;
  for (auto& v : signal) v *= g;
}

StreamingEnhancer::StreamingEnhancer(std::size_t num_channels, const PipelineConfig& config,
                                     const GruPostfilter* model)
    : config_(config), beam_(num_channels, config.stft), model_(model), istft_(config.stft) {
  const std::size_t bins = config_.stft.bins();
  if (config_.align_to_mic && *config_.align_to_mic >= num_channels) {
    throw InvalidConfig("reference microphone " + std::to_string(*config_.align_to_mic + 1) +
                        " does not exist");
  }
  if (config_.mask_source == MaskSource::kGru) {
    if (model_ == nullptr) throw InvalidConfig("gru mode requires a weights file");
    if (model_->input_dim() != 2 * bins || model_->output_dim() != bins) {
      throw InvalidWeights("weights dimensions do not match the STFT configuration");
    }
    gru_.emplace(*model_);
    features_.resize(2 * bins);
  }
  if (config_.mask_source == MaskSource::kOracle) {
    for (std::size_t m = 0; m < num_channels; ++m) {
      target_stfts_.emplace_back(config_.stft);
      noise_stfts_.emplace_back(config_.stft);
    }
    scratch_.assign(2 * num_channels, std::vector<Complex>(bins));
    views_.resize(num_channels);
    speech_power_.resize(bins);
    noise_power_.resize(bins);
  }
  mask_.resize(bins);
  gain_.resize(bins);
  out_frame_.resize(bins);
}

bool StreamingEnhancer::push(std::span<const std::span<const double>> hop,
                             std::span<const double> tdoas, std::span<double> out,
                             std::span<const std::span<const double>> target_hop,
                             std::span<const std::span<const double>> noise_hop) {
  const std::size_t h = config_.stft.hop_size;
  if (out.size() != h) throw InvalidInput("stream output buffer must hold one hop");
  const std::size_t m_count = beam_.num_channels();
  const bool oracle = config_.mask_source == MaskSource::kOracle;
  if (oracle && (target_hop.size() != m_count || noise_hop.size() != m_count)) {
    throw InvalidInput("oracle stream needs target and noise hops for every channel");
  }

  const bool ready = beam_.push(hop, tdoas, frame_);
  if (oracle) {
    for (std::size_t m = 0; m < m_count; ++m) {
      target_stfts_[m].push(target_hop[m], scratch_[m]);
      noise_stfts_[m].push(noise_hop[m], scratch_[m_count + m]);
    }
  }
  if (!ready) {
    std::fill(out.begin(), out.end(), 0.0);
    return false;
  }

  switch (config_.mask_source) {
    case MaskSource::kNone:
      std::copy(frame_.beam.begin(), frame_.beam.end(), out_frame_.begin());
      break;
    case MaskSource::kOracle:
      for (std::size_t m = 0; m < m_count; ++m) views_[m] = scratch_[m];
      total_power_frame(views_, speech_power_);
      for (std::size_t m = 0; m < m_count; ++m) views_[m] = scratch_[m_count + m];
      total_power_frame(views_, noise_power_);
      ideal_ratio_mask_frame(speech_power_, noise_power_, mask_);
      mask_to_gain_frame(mask_, gain_);
      apply_gain_frame(frame_.beam, gain_, out_frame_);
      break;
    case MaskSource::kGru:
      raw_feature_frame(frame_.beam, frame_.power, model_->weights().epsilon, features_);
      model_->normalize(features_, features_);
      gru_->step(features_, mask_);
      mask_to_gain_frame(mask_, gain_);
      apply_gain_frame(frame_.beam, gain_, out_frame_);
      break;
  }
  if (config_.align_to_mic) {
    delay_frame(out_frame_, tdoas[*config_.align_to_mic], config_.stft.frame_size);
  }
  istft_.push(out_frame_, out);
  ++frames_;
  return true;
}

std::vector<double> StreamingEnhancer::flush() { return istft_.flush(); }

double algorithmic_latency_ms(const StftConfig& config) {
  return static_cast<double>(config.frame_size + config.hop_size) / config.sample_rate * 1000.0;
}

LatencyReport summarize_latency(std::vector<double> hop_ms, const StftConfig& config,
                                double audio_seconds) {
  LatencyReport r;
  r.algorithmic_ms = algorithmic_latency_ms(config);
  r.hop_ms = config.hop_seconds() * 1000.0;
  r.hops = hop_ms.size();
  if (hop_ms.empty()) return r;
  double total = 0.0;
  for (double v : hop_ms) total += v;
  std::sort(hop_ms.begin(), hop_ms.end());
  // nearest-rank percentiles
  auto pct = [&](double p) {
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(hop_ms.size())));
    return hop_ms[std::max<std::size_t>(rank, 1) - 1];
  };
  r.p50_ms = pct(50.0);
  r.p95_ms = pct(95.0);
  r.max_ms = hop_ms.back();
  r.real_time_factor = audio_seconds > 0.0 ? total / 1000.0 / audio_seconds : 0.0;
  return r;
}

StreamResult run_streaming(const PipelineInputs& in, const PipelineConfig& config) {
  check_pipeline_inputs(in, config);
  const auto& mix = *in.mixture;
  const auto& traj = *in.trajectory;
  const std::size_t m_count = mix.num_channels();
  const std::size_t n = mix.num_samples();
  const std::size_t h = config.stft.hop_size;
  const std::size_t padded = std::max(n, config.stft.frame_size);
  const std::size_t hops = padded / h;
  const bool oracle = config.mask_source == MaskSource::kOracle;

  // Zero-extend short inputs to one frame, as the whole-signal STFT does.
  auto padded_copy = [&](const MultichannelWave& w) {
    auto c = w.channels;
    for (auto& ch : c) ch.resize(padded, 0.0);
    return c;
  };
  const auto x = padded_copy(mix);
  std::vector<std::vector<double>> s, b;
  if (oracle) {
    s = padded_copy(*in.target_images);
    b = padded_copy(*in.noise_images);
  }

  StreamingEnhancer enhancer(m_count, config, in.model);
  std::vector<std::span<const double>> hop(m_count), s_hop, b_hop;
  if (oracle) {
    s_hop.resize(m_count);
    b_hop.resize(m_count);
  }
  std::vector<double> block(h);
  StreamResult r;
  r.output.reserve(padded + h);
  std::vector<double> times;
  times.reserve(hops);
  for (std::size_t p = 0; p < hops; ++p) {
    for (std::size_t m = 0; m < m_count; ++m) {
      hop[m] = std::span<const double>(x[m]).subspan(p * h, h);
      if (oracle) {
        s_hop[m] = std::span<const double>(s[m]).subspan(p * h, h);
        b_hop[m] = std::span<const double>(b[m]).subspan(p * h, h);
      }
    }
    const auto tdoas = traj.at(std::min(enhancer.next_frame(), traj.num_frames() - 1));
    const auto t0 = std::chrono::steady_clock::now();
    const bool emitted = enhancer.push(hop, tdoas, block, s_hop, b_hop);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (emitted) r.output.insert(r.output.end(), block.begin(), block.end());
  }
  const auto tail = enhancer.flush();
  r.output.insert(r.output.end(), tail.begin(), tail.end());
  r.output.resize(n, 0.0);
  r.latency = summarize_latency(std::move(times), config.stft,
                                static_cast<double>(n) / config.stft.sample_rate);
  return r;
}

}  // namespace avse
