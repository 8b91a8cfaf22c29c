#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "duopath/common.hpp"
#include "duopath/fft.hpp"

namespace duopath {

/// Frame geometry shared by every stage of a stream.
///
/// Defaults are 16 kHz, 10 ms hop, 20 ms window, no zero padding (161 bins).
/// The analysis/synthesis window is the square-root Hann (sine) window, which
/// is constant-overlap-add when applied on both sides and hop divides
/// window_len. Analysis->synthesis round trip delays the signal by
/// window_len - hop samples.
struct FrameParams {
  double sample_rate = 16000.0;
  int hop = 160;
  int window_len = 320;
  int fft_len = 320;

  int n_bins() const { return fft_len / 2 + 1; }

  double frame_ms() const { return 1000.0 * hop / sample_rate; }

  /// Analysis-synthesis latency in samples.
  int stft_latency() const { return window_len - hop; }

  void validate() const {
    require_config(sample_rate > 0, "FrameParams: sample_rate must be positive");
    require_config(hop > 0 && window_len > 0, "FrameParams: hop and window_len must be positive");
    require_config(window_len % hop == 0, "FrameParams: hop must divide window_len");
    require_config(fft_len >= window_len, "FrameParams: fft_len must be >= window_len");
  }

  /// Same 10 ms / 20 ms geometry at another sample rate.
  static FrameParams for_rate(double rate) {
    require_config(rate > 0 && std::fmod(rate, 100.0) == 0.0,
                   "FrameParams: sample rate must be a positive multiple of 100 Hz");
    FrameParams p;
    p.sample_rate = rate;
    p.hop = static_cast<int>(rate / 100.0);
    p.window_len = 2 * p.hop;
    p.fft_len = p.window_len;
    return p;
  }
};

/// sqrt-Hann == sine window: sin(pi n / N), periodic.
inline std::vector<double> sqrt_hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = std::sin(kPi * i / n);
  }
  return w;
}

/// One channel's half spectrum for one frame (fft_len/2 + 1 bins).
struct MonoSpectrum {
  std::vector<cplx> bins;
  std::int64_t frame_index = 0;

  int n_bins() const { return static_cast<int>(bins.size()); }

  static MonoSpectrum zeros(int n_bins, std::int64_t frame_index = 0) {
    MonoSpectrum s;
    s.bins.assign(static_cast<std::size_t>(n_bins), cplx(0.0, 0.0));
    s.frame_index = frame_index;
    return s;
  }
};

/// Two channels of the same frame.
struct StereoSpectrum {
  MonoSpectrum left, right;

  std::int64_t frame_index() const { return left.frame_index; }
  int n_bins() const { return left.n_bins(); }

  void check() const {
    require_stream(left.frame_index == right.frame_index,
                   "StereoSpectrum: channels disagree on frame index");
    require_stream(left.bins.size() == right.bins.size(),
                   "StereoSpectrum: channels disagree on bin count");
  }

  static StereoSpectrum zeros(int n_bins, std::int64_t frame_index = 0) {
    return {MonoSpectrum::zeros(n_bins, frame_index), MonoSpectrum::zeros(n_bins, frame_index)};
  }
};

/// Windowed forward transform of one full window of samples.
inline MonoSpectrum analyze(std::span<const double> samples, const FrameParams& params,
                            std::int64_t frame_index = 0) {
  params.validate();
  require_config(static_cast<int>(samples.size()) == params.window_len,
                 "analyze: input length must equal window_len");
  const auto window = sqrt_hann_window(params.window_len);
  const std::size_t n = static_cast<std::size_t>(params.fft_len);
  std::vector<cplx> buf(n, cplx(0.0, 0.0));
  for (int i = 0; i < params.window_len; ++i) {
    buf[static_cast<std::size_t>(i)] = window[static_cast<std::size_t>(i)] * samples[static_cast<std::size_t>(i)];
  }
  std::vector<cplx> full(n);
  Fft(n).forward(buf, full);
  MonoSpectrum out;
  out.frame_index = frame_index;
  out.bins.assign(full.begin(), full.begin() + params.n_bins());
  return out;
}

/// Streaming analysis: push hop-sized chunks, get one spectrum per chunk.
/// The internal buffer is primed with window_len - hop zeros so that frame l
/// covers input samples [ (l+1)*hop - window_len, (l+1)*hop ).
class StftAnalyzer {
 public:
  explicit StftAnalyzer(const FrameParams& params)
      : params_(params),
        fft_(static_cast<std::size_t>(params.fft_len)),
        window_(sqrt_hann_window(params.window_len)),
        buffer_(static_cast<std::size_t>(params.window_len), 0.0),
        windowed_(static_cast<std::size_t>(params.fft_len), cplx(0.0, 0.0)),
        full_(static_cast<std::size_t>(params.fft_len)) {
    params.validate();
  }

  const FrameParams& params() const { return params_; }
  std::int64_t next_frame_index() const { return next_frame_; }

  MonoSpectrum push(std::span<const double> hop_samples) {
    require_stream(static_cast<int>(hop_samples.size()) == params_.hop,
                   "StftAnalyzer: chunk length must equal hop");
    const std::size_t win = buffer_.size();
    const std::size_t hop = static_cast<std::size_t>(params_.hop);
    std::copy(buffer_.begin() + static_cast<std::ptrdiff_t>(hop), buffer_.end(), buffer_.begin());
    std::copy(hop_samples.begin(), hop_samples.end(), buffer_.end() - static_cast<std::ptrdiff_t>(hop));
    for (std::size_t i = 0; i < win; ++i) {
      windowed_[i] = window_[i] * buffer_[i];
    }
    fft_.forward(windowed_, full_);
    MonoSpectrum out;
    out.frame_index = next_frame_++;
    out.bins.assign(full_.begin(), full_.begin() + params_.n_bins());
    return out;
  }

  void reset() {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    next_frame_ = 0;
  }

 private:
  FrameParams params_;
  Fft fft_;
  std::vector<double> window_;
  std::vector<double> buffer_;
  std::vector<cplx> windowed_;
  std::vector<cplx> full_;
  std::int64_t next_frame_ = 0;
};

/// Streaming overlap-add synthesis: one spectrum in, hop samples out.
/// flush() drains the window_len - hop samples still in the overlap buffer.
class StftSynthesizer {
 public:
  explicit StftSynthesizer(const FrameParams& params)
      : params_(params),
        fft_(static_cast<std::size_t>(params.fft_len)),
        window_(sqrt_hann_window(params.window_len)),
        ola_(static_cast<std::size_t>(params.window_len), 0.0),
        full_(static_cast<std::size_t>(params.fft_len)),
        time_(static_cast<std::size_t>(params.fft_len)) {
    params.validate();
    // COLA normalization: sum over overlapping frames of window^2 at any
    // offset. For the sine window at hop | window_len this is window_len/(2*hop).
    double cola = 0.0;
    for (int i = 0; i < params.window_len; i += params.hop) {
      const double w = window_[static_cast<std::size_t>(i)];
      cola += w * w;
    }
    require_config(cola > 0, "StftSynthesizer: window fails COLA at this hop");
    inv_cola_ = 1.0 / cola;
  }

  const FrameParams& params() const { return params_; }

  /// Returns hop samples of finished output.
  std::vector<double> push(const MonoSpectrum& spec) {
    require_stream(spec.n_bins() == params_.n_bins(),
                   "StftSynthesizer: inconsistent spectrum size");
    const std::size_t n = static_cast<std::size_t>(params_.fft_len);
    // rebuild the full spectrum by Hermitian symmetry; DC and Nyquist are
    // forced real so the inverse transform of a real-signal spectrum stays real
    full_[0] = cplx(spec.bins[0].real(), 0.0);
    for (std::size_t k = 1; k < spec.bins.size(); ++k) {
      if (2 * k == n) {
        full_[k] = cplx(spec.bins[k].real(), 0.0);
      } else {
        full_[k] = spec.bins[k];
        full_[n - k] = std::conj(spec.bins[k]);
      }
    }
    fft_.inverse(full_, time_);

    const std::size_t win = static_cast<std::size_t>(params_.window_len);
    const std::size_t hop = static_cast<std::size_t>(params_.hop);
    for (std::size_t i = 0; i < win; ++i) {
      ola_[i] += window_[i] * time_[i].real();
    }
    std::vector<double> out(hop);
    for (std::size_t i = 0; i < hop; ++i) {
      out[i] = ola_[i] * inv_cola_;
    }
    std::copy(ola_.begin() + static_cast<std::ptrdiff_t>(hop), ola_.end(), ola_.begin());
    std::fill(ola_.end() - static_cast<std::ptrdiff_t>(hop), ola_.end(), 0.0);
    return out;
  }

  /// Remaining window_len - hop tail after the last frame.
  std::vector<double> flush() {
    const std::size_t tail = static_cast<std::size_t>(params_.stft_latency());
    std::vector<double> out(tail);
    for (std::size_t i = 0; i < tail; ++i) {
      out[i] = ola_[i] * inv_cola_;
    }
    std::fill(ola_.begin(), ola_.end(), 0.0);
    return out;
  }

  void reset() { std::fill(ola_.begin(), ola_.end(), 0.0); }

 private:
  FrameParams params_;
  Fft fft_;
  std::vector<double> window_;
  std::vector<double> ola_;
  std::vector<cplx> full_;
  std::vector<cplx> time_;
  double inv_cola_ = 1.0;
};

/// Offline analysis of a whole signal. Output frame l covers input samples
/// [ (l+1)*hop - window_len, (l+1)*hop ), i.e. the stream is primed with
/// zeros, and the signal is zero-padded at the end to a whole number of hops.
inline std::vector<MonoSpectrum> analyze_signal(std::span<const double> x,
                                                const FrameParams& params) {
  StftAnalyzer analyzer(params);
  const std::size_t hop = static_cast<std::size_t>(params.hop);
  const std::size_t frames = (x.size() + hop - 1) / hop;
  std::vector<MonoSpectrum> out;
  out.reserve(frames);
  std::vector<double> chunk(hop, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    std::fill(chunk.begin(), chunk.end(), 0.0);
    const std::size_t begin = f * hop;
    const std::size_t len = std::min(hop, x.size() - begin);
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(begin),
              x.begin() + static_cast<std::ptrdiff_t>(begin + len), chunk.begin());
    out.push_back(analyzer.push(chunk));
  }
  return out;
}

/// Offline overlap-add of a frame sequence; output length is
/// frames*hop + (window_len - hop). Feeding analyze_signal(x) back in yields
/// x delayed by window_len - hop samples.
inline std::vector<double> synthesize(std::span<const MonoSpectrum> spectra,
                                      const FrameParams& params) {
  StftSynthesizer synth(params);
  std::vector<double> out;
  out.reserve(spectra.size() * static_cast<std::size_t>(params.hop) +
              static_cast<std::size_t>(params.stft_latency()));
  for (const auto& s : spectra) {
    auto chunk = synth.push(s);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  auto tail = synth.flush();
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace duopath
