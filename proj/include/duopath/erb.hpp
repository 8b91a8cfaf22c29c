#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "duopath/common.hpp"
#include "duopath/stft.hpp"

namespace duopath {

/// Glasberg-Moore ERB-rate map, in ERB units.
inline double erb_rate(double freq_hz) {
  return 21.4 * std::log10(1.0 + 0.00437 * freq_hz);
}

inline double erb_rate_inverse(double rate) {
  return (std::pow(10.0, rate / 21.4) - 1.0) / 0.00437;
}

/// Per-band gains in [0, 1].
struct BandGains {
  std::vector<double> g;

  int n_bands() const { return static_cast<int>(g.size()); }

  static BandGains ones(int n_bands) {
    BandGains b;
    b.g.assign(static_cast<std::size_t>(n_bands), 1.0);
    return b;
  }
};

/// Triangular filterbank with band centers equally spaced on the ERB-rate
/// scale from DC to Nyquist. Adjacent triangles interpolate linearly in
/// ERB-rate, so for every bin the weights over bands sum to exactly 1
/// (partition of unity); the first and last bands are half triangles.
class ErbFilterbank {
 public:
  struct Band {
    int first_bin = 0;
    std::vector<double> w;  // contiguous nonzero weights starting at first_bin
    double center_hz = 0.0;

    int end_bin() const { return first_bin + static_cast<int>(w.size()); }
  };

  ErbFilterbank(int n_bands, int n_bins, double sample_rate) {
    require_config(n_bands >= 2, "ErbFilterbank: need at least 2 bands");
    require_config(n_bands <= n_bins, "ErbFilterbank: more bands than bins");
    require_config(sample_rate > 0, "ErbFilterbank: bad sample rate");
    n_bands_ = n_bands;
    n_bins_ = n_bins;
    sample_rate_ = sample_rate;

    const double nyquist = sample_rate / 2.0;
    const double bin_hz = nyquist / static_cast<double>(n_bins - 1);
    const double rate_max = erb_rate(nyquist);
    std::vector<double> center_rate(static_cast<std::size_t>(n_bands));
    for (int b = 0; b < n_bands; ++b) {
      center_rate[static_cast<std::size_t>(b)] = rate_max * b / (n_bands - 1);
    }

    bands_.resize(static_cast<std::size_t>(n_bands));
    for (int b = 0; b < n_bands; ++b) {
      bands_[static_cast<std::size_t>(b)].center_hz =
          erb_rate_inverse(center_rate[static_cast<std::size_t>(b)]);
    }

    // each bin sits between two adjacent centers; split its unit weight
    // linearly in ERB-rate between the flanking bands
    std::vector<std::vector<double>> dense(static_cast<std::size_t>(n_bands),
                                           std::vector<double>(static_cast<std::size_t>(n_bins), 0.0));
    int seg = 0;
    for (int k = 0; k < n_bins; ++k) {
      const double r = erb_rate(k * bin_hz);
      while (seg < n_bands - 2 && r > center_rate[static_cast<std::size_t>(seg + 1)]) {
        ++seg;
      }
      const double lo = center_rate[static_cast<std::size_t>(seg)];
      const double hi = center_rate[static_cast<std::size_t>(seg + 1)];
      double t = (r - lo) / (hi - lo);
      t = std::clamp(t, 0.0, 1.0);
      dense[static_cast<std::size_t>(seg)][static_cast<std::size_t>(k)] = 1.0 - t;
      dense[static_cast<std::size_t>(seg + 1)][static_cast<std::size_t>(k)] = t;
    }

    for (int b = 0; b < n_bands; ++b) {
      auto& row = dense[static_cast<std::size_t>(b)];
      int first = 0;
      while (first < n_bins && row[static_cast<std::size_t>(first)] == 0.0) ++first;
      int last = n_bins - 1;
      while (last >= first && row[static_cast<std::size_t>(last)] == 0.0) --last;
      auto& band = bands_[static_cast<std::size_t>(b)];
      band.first_bin = std::min(first, n_bins - 1);
      if (last >= first) {
        band.w.assign(row.begin() + first, row.begin() + last + 1);
      }
    }
  }

  int n_bands() const { return n_bands_; }
  int n_bins() const { return n_bins_; }
  double sample_rate() const { return sample_rate_; }
  const Band& band(int b) const { return bands_[static_cast<std::size_t>(b)]; }

  /// weight of band b at bin k (0 outside the band's support)
  double weight(int b, int k) const {
    const Band& band = bands_[static_cast<std::size_t>(b)];
    if (k < band.first_bin || k >= band.end_bin()) return 0.0;
    return band.w[static_cast<std::size_t>(k - band.first_bin)];
  }

 private:
  int n_bands_ = 0;
  int n_bins_ = 0;
  double sample_rate_ = 0.0;
  std::vector<Band> bands_;
};

inline ErbFilterbank design_erb_filterbank(int n_bands, int n_bins, double sample_rate) {
  return ErbFilterbank(n_bands, n_bins, sample_rate);
}

/// energy[b] = sum_k w[b][k] |spec[k]|^2
inline std::vector<double> band_energies(const MonoSpectrum& spec, const ErbFilterbank& bank) {
  require(spec.n_bins() == bank.n_bins(), "band_energies: bin count mismatch");
  std::vector<double> energy(static_cast<std::size_t>(bank.n_bands()), 0.0);
  for (int b = 0; b < bank.n_bands(); ++b) {
    const auto& band = bank.band(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < band.w.size(); ++i) {
      acc += band.w[i] * std::norm(spec.bins[static_cast<std::size_t>(band.first_bin) + i]);
    }
    energy[static_cast<std::size_t>(b)] = acc;
  }
  return energy;
}

/// bin_gain[k] = sum_b w[b][k] g[b]; linear and monotone in g, and every bin
/// gain lies between min(g) and max(g) by partition of unity.
inline std::vector<double> interpolate_gains(const BandGains& gains, const ErbFilterbank& bank) {
  require(gains.n_bands() == bank.n_bands(), "interpolate_gains: band count mismatch");
  std::vector<double> bin_gain(static_cast<std::size_t>(bank.n_bins()), 0.0);
  for (int b = 0; b < bank.n_bands(); ++b) {
    const auto& band = bank.band(b);
    const double g = gains.g[static_cast<std::size_t>(b)];
    for (std::size_t i = 0; i < band.w.size(); ++i) {
      bin_gain[static_cast<std::size_t>(band.first_bin) + i] += band.w[i] * g;
    }
  }
  return bin_gain;
}

}  // namespace duopath
