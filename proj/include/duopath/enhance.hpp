#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "duopath/common.hpp"
#include "duopath/erb.hpp"
#include "duopath/stft.hpp"

namespace duopath {

/// One instance of the monaural enhancer slot. Implementations consume one
/// mono spectrum per frame and emit one set of band gains per frame, all in
/// [0, 1]. An enhancer with look-ahead L emits, on input frame l, the gains
/// for frame l - L (it may use everything up to l to compute them); the first
/// L outputs are priming values that callers aligned on the delay discard.
/// Instances are stateful and bound to a single stream.
class Enhancer {
 public:
  virtual ~Enhancer() = default;
  virtual BandGains process(const MonoSpectrum& spec) = 0;
  virtual int lookahead_frames() const = 0;
  virtual void reset() = 0;
};

/// All gains 1, no look-ahead. Composing with the gain application is the
/// identity, which is what makes the dual-path reconstruction test exact.
class PassthroughEnhancer final : public Enhancer {
 public:
  explicit PassthroughEnhancer(int n_bands) : n_bands_(n_bands) {}

  BandGains process(const MonoSpectrum&) override { return BandGains::ones(n_bands_); }
  int lookahead_frames() const override { return 0; }
  void reset() override {}

 private:
  int n_bands_;
};

/// Per-band Wiener-style gains from an aligned clean reference:
///   g[b] = clamp(E_clean[b] / max(E_noisy[b], eps), 0, 1).
/// Scale-invariant: scaling both inputs by the same factor leaves gains
/// unchanged.
inline BandGains oracle_wiener(const MonoSpectrum& spec, const MonoSpectrum& clean_ref,
                               const ErbFilterbank& bank) {
  require_stream(spec.frame_index == clean_ref.frame_index,
                 "oracle_wiener: noisy and reference frames misaligned");
  require(spec.n_bins() == clean_ref.n_bins(), "oracle_wiener: bin count mismatch");
  const auto noisy = band_energies(spec, bank);
  const auto clean = band_energies(clean_ref, bank);
  BandGains out;
  out.g.resize(noisy.size());
  for (std::size_t b = 0; b < noisy.size(); ++b) {
    out.g[b] = clamp01(clean[b] / std::max(noisy[b], kEps));
  }
  return out;
}

/// Stateful wrapper around oracle_wiener. The caller must hand over the
/// reference spectrum for the same frame before each process() call.
class OracleWienerEnhancer final : public Enhancer {
 public:
  explicit OracleWienerEnhancer(ErbFilterbank bank) : bank_(std::move(bank)) {}

  void set_reference(MonoSpectrum ref) { ref_ = std::move(ref); }

  BandGains process(const MonoSpectrum& spec) override {
    require_stream(ref_.has_value(), "OracleWienerEnhancer: no reference for this frame");
    BandGains g = oracle_wiener(spec, *ref_, bank_);
    ref_.reset();
    return g;
  }

  int lookahead_frames() const override { return 0; }
  void reset() override { ref_.reset(); }

 private:
  ErbFilterbank bank_;
  std::optional<MonoSpectrum> ref_;
};

struct SpectralSubtractionParams {
  double beta = 1.5;            // oversubtraction
  double floor = 0.05;          // gain floor
  double track_smoothing = 0.8; // band energy smoothing inside the noise tracker
  double gain_smoothing = 0.95; // band energy smoothing for the gain rule
  double min_bias = 2.5;        // bias compensation for the windowed minimum
  double window_seconds = 1.5;  // minimum-statistics window
  int init_frames = 10;         // leading frames assumed noise-dominant
  int lookahead_frames = 3;     // 30 ms at 10 ms frames, mirroring the DNN slot
};

/// Per-band noise energy tracker: exponentially smoothed band energies with a
/// windowed minimum (sub-window minima ring), bias compensated. The first
/// init_frames frames seed the estimate directly.
class NoiseTracker {
 public:
  NoiseTracker(int n_bands, const SpectralSubtractionParams& p, double frames_per_second)
      : params_(p) {
    const double window_frames = std::max(1.0, p.window_seconds * frames_per_second);
    sub_len_ = std::max(1, static_cast<int>(window_frames / kSubwindows));
    smoothed_.assign(static_cast<std::size_t>(n_bands), 0.0);
    current_min_.assign(static_cast<std::size_t>(n_bands), kHuge);
    estimate_.assign(static_cast<std::size_t>(n_bands), 0.0);
  }

  void update(std::span<const double> energy) {
    const double lam = params_.track_smoothing;
    for (std::size_t b = 0; b < smoothed_.size(); ++b) {
      smoothed_[b] = frame_count_ == 0 ? energy[b] : lam * smoothed_[b] + (1.0 - lam) * energy[b];
    }
    ++frame_count_;

    if (frame_count_ <= params_.init_frames) {
      // running mean over the leading noise-dominant frames
      for (std::size_t b = 0; b < estimate_.size(); ++b) {
        estimate_[b] += (energy[b] - estimate_[b]) / static_cast<double>(frame_count_);
      }
    }

    for (std::size_t b = 0; b < current_min_.size(); ++b) {
      current_min_[b] = std::min(current_min_[b], smoothed_[b]);
    }
    if (++sub_pos_ == sub_len_) {
      ring_.push_back(current_min_);
      if (static_cast<int>(ring_.size()) > kSubwindows) ring_.pop_front();
      std::fill(current_min_.begin(), current_min_.end(), kHuge);
      sub_pos_ = 0;
    }

    if (frame_count_ > params_.init_frames) {
      for (std::size_t b = 0; b < estimate_.size(); ++b) {
        double m = current_min_[b];
        for (const auto& sub : ring_) m = std::min(m, sub[b]);
        if (m == kHuge) m = smoothed_[b];
        estimate_[b] = params_.min_bias * m;
      }
    }
  }

  std::span<const double> estimate() const { return estimate_; }

  void reset() {
    frame_count_ = 0;
    sub_pos_ = 0;
    ring_.clear();
    std::fill(smoothed_.begin(), smoothed_.end(), 0.0);
    std::fill(current_min_.begin(), current_min_.end(), kHuge);
    std::fill(estimate_.begin(), estimate_.end(), 0.0);
  }

 private:
  static constexpr int kSubwindows = 10;
  static constexpr double kHuge = 1e300;

  SpectralSubtractionParams params_;
  int sub_len_ = 1;
  int sub_pos_ = 0;
  std::int64_t frame_count_ = 0;
  std::vector<double> smoothed_;
  std::vector<double> current_min_;
  std::vector<double> estimate_;
  std::deque<std::vector<double>> ring_;
};

/// Gain rule given a frame's (smoothed) band energies and the noise estimate:
///   g[b] = clamp( max(E - beta * N, floor * E) / max(E, eps), floor, 1 ).
inline BandGains spectral_subtraction_gains(std::span<const double> energy,
                                            std::span<const double> noise,
                                            const SpectralSubtractionParams& p) {
  BandGains out;
  out.g.resize(energy.size());
  for (std::size_t b = 0; b < energy.size(); ++b) {
    const double num = std::max(energy[b] - p.beta * noise[b], p.floor * energy[b]);
    double g = num / std::max(energy[b], kEps);
    g = std::max(p.floor, std::min(1.0, g));
    out.g[b] = g;
  }
  return out;
}

/// Classical fallback enhancer: spectral subtraction over ERB band energies
/// with minimum-statistics noise tracking. With look-ahead L, gains emitted
/// for frame l - L see a noise estimate already updated through frame l.
/// Gains are computed from the smoothed band energies so that single-frame
/// noise spikes do not punch through the subtraction.
class SpectralSubtractionEnhancer final : public Enhancer {
 public:
  SpectralSubtractionEnhancer(ErbFilterbank bank, const SpectralSubtractionParams& params,
                              double frames_per_second)
      : bank_(std::move(bank)),
        params_(params),
        tracker_(bank_.n_bands(), params, frames_per_second) {
    require_config(params.lookahead_frames >= 0, "spectral subtraction: negative look-ahead");
    require_config(params.floor >= 0.0 && params.floor <= 1.0,
                   "spectral subtraction: floor must be in [0, 1]");
  }

  BandGains process(const MonoSpectrum& spec) override {
    auto energy = band_energies(spec, bank_);
    tracker_.update(energy);

    const double lam = params_.gain_smoothing;
    if (smoothed_.empty()) {
      smoothed_ = energy;
    } else {
      for (std::size_t b = 0; b < smoothed_.size(); ++b) {
        smoothed_[b] = lam * smoothed_[b] + (1.0 - lam) * energy[b];
      }
    }

    pending_.push_back(smoothed_);
    if (static_cast<int>(pending_.size()) <= params_.lookahead_frames) {
      return BandGains::ones(bank_.n_bands());  // priming
    }
    auto target = std::move(pending_.front());
    pending_.pop_front();
    return spectral_subtraction_gains(target, tracker_.estimate(), params_);
  }

  int lookahead_frames() const override { return params_.lookahead_frames; }

  void reset() override {
    tracker_.reset();
    pending_.clear();
    smoothed_.clear();
  }

 private:
  ErbFilterbank bank_;
  SpectralSubtractionParams params_;
  NoiseTracker tracker_;
  std::vector<double> smoothed_;
  std::deque<std::vector<double>> pending_;
};

/// Multiplies both channels of a frame by the same real per-bin gains. The
/// per-bin complex ratio between channels is untouched, which is exactly the
/// IPD/ILD preservation property.
inline StereoSpectrum apply_common_gain(const StereoSpectrum& x, std::span<const double> bin_gains) {
  x.check();
  require(static_cast<int>(bin_gains.size()) == x.n_bins(), "apply_common_gain: gain count mismatch");
  for (double g : bin_gains) {
    require(std::isfinite(g) && g >= 0.0, "apply_common_gain: gains must be finite and nonnegative");
  }
  StereoSpectrum out = x;
  for (std::size_t k = 0; k < bin_gains.size(); ++k) {
    out.left.bins[k] *= bin_gains[k];
    out.right.bins[k] *= bin_gains[k];
  }
  return out;
}

}  // namespace duopath
