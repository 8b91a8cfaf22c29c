#pragma once

#include <vector>

#include "duopath/common.hpp"
#include "duopath/stft.hpp"

namespace duopath {

/// Complex 2-vector, one microphone channel per component.
struct Cv2 {
  cplx m1{0.0, 0.0};
  cplx m2{0.0, 0.0};
};

inline cplx inner(const Cv2& a, const Cv2& b) {
  // <a, b> = a^H b
  return std::conj(a.m1) * b.m1 + std::conj(a.m2) * b.m2;
}

inline double norm2(const Cv2& a) { return std::norm(a.m1) + std::norm(a.m2); }

/// Fixed phase convention: the first component is made real and nonnegative;
/// if it is (numerically) zero, the second component is instead. Rotating by a
/// global phase does not change any beamformer output, but a fixed convention
/// makes vectors comparable across frames and tests deterministic.
inline Cv2 normalize_phase(Cv2 a) {
  const cplx pivot = (std::abs(a.m1) >= 1e-9) ? a.m1 : a.m2;
  const double mag = std::abs(pivot);
  if (mag == 0.0) return a;
  const cplx rot = std::conj(pivot) / mag;
  return {a.m1 * rot, a.m2 * rot};
}

/// Unit L2 norm plus the phase convention.
inline Cv2 normalize_steering(Cv2 a) {
  const double n = std::sqrt(norm2(a));
  if (n == 0.0) return a;
  a.m1 /= n;
  a.m2 /= n;
  return normalize_phase(a);
}

/// 2x2 Hermitian matrix stored Hermitian-by-construction:
///   [ e11   e12 ]
///   [ e12*  e22 ]
struct Herm2 {
  double e11 = 0.0;
  double e22 = 0.0;
  cplx e12{0.0, 0.0};

  double trace() const { return e11 + e22; }

  static Herm2 identity_scaled(double eps) { return {eps, eps, cplx(0.0, 0.0)}; }
};

/// Builds a Herm2 from four dense entries, enforcing Hermitian symmetry
/// within tol relative to the matrix magnitude.
inline Herm2 herm2_from_elements(cplx a11, cplx a12, cplx a21, cplx a22, double tol = 1e-9) {
  const double scale = std::abs(a11) + std::abs(a12) + std::abs(a21) + std::abs(a22);
  const double bound = tol * std::max(scale, 1.0);
  require(std::abs(a11.imag()) <= bound && std::abs(a22.imag()) <= bound &&
              std::abs(a12 - std::conj(a21)) <= bound,
          "herm2_from_elements: matrix is not Hermitian within tolerance");
  return {a11.real(), a22.real(), cplx(0.5) * (a12 + std::conj(a21))};
}

/// Per-bin steering vectors for one path.
struct SteeringVector {
  std::vector<Cv2> bins;

  int n_bins() const { return static_cast<int>(bins.size()); }

  static SteeringVector constant(Cv2 v, int n_bins) {
    SteeringVector s;
    s.bins.assign(static_cast<std::size_t>(n_bins), normalize_steering(v));
    return s;
  }
};

/// Per-bin 2x2 Hermitian PSD spatial covariance.
struct SpatialCovariance {
  std::vector<Herm2> bins;

  int n_bins() const { return static_cast<int>(bins.size()); }

  static SpatialCovariance initial(int n_bins, double eps = 1e-6) {
    SpatialCovariance r;
    r.bins.assign(static_cast<std::size_t>(n_bins), Herm2::identity_scaled(eps));
    return r;
  }
};

/// Per-bin speech presence mask in [0, 1].
struct SpeechMask {
  std::vector<double> m;

  int n_bins() const { return static_cast<int>(m.size()); }
};

/// Delay-and-sum beamformer: d = a^H x per bin.
inline MonoSpectrum dsbf(const StereoSpectrum& x, const SteeringVector& a) {
  x.check();
  require(x.n_bins() == a.n_bins(), "dsbf: bin count mismatch");
  MonoSpectrum d;
  d.frame_index = x.frame_index();
  d.bins.resize(x.left.bins.size());
  for (std::size_t k = 0; k < d.bins.size(); ++k) {
    const Cv2& ak = a.bins[k];
    d.bins[k] = std::conj(ak.m1) * x.left.bins[k] + std::conj(ak.m2) * x.right.bins[k];
  }
  return d;
}

/// Spatial image of a mono signal along a steering vector: y_m = d * a_m.
inline StereoSpectrum spatial_image(const MonoSpectrum& d, const SteeringVector& a) {
  require(d.n_bins() == a.n_bins(), "spatial_image: bin count mismatch");
  StereoSpectrum y = StereoSpectrum::zeros(d.n_bins(), d.frame_index);
  for (std::size_t k = 0; k < d.bins.size(); ++k) {
    y.left.bins[k] = d.bins[k] * a.bins[k].m1;
    y.right.bins[k] = d.bins[k] * a.bins[k].m2;
  }
  return y;
}

/// Speech presence mask M = min(||c|| / ||x||, 1), with M = 0 where the input
/// bin is (numerically) silent. c and x must be the same frame.
inline SpeechMask compute_mask(const StereoSpectrum& c, const StereoSpectrum& x) {
  c.check();
  x.check();
  require(c.n_bins() == x.n_bins(), "compute_mask: bin count mismatch");
  require_stream(c.frame_index() == x.frame_index(), "compute_mask: frames misaligned");
  SpeechMask mask;
  mask.m.resize(c.left.bins.size());
  for (std::size_t k = 0; k < mask.m.size(); ++k) {
    const double nx = std::sqrt(std::norm(x.left.bins[k]) + std::norm(x.right.bins[k]));
    if (nx < 1e-12) {
      mask.m[k] = 0.0;
      continue;
    }
    const double nc = std::sqrt(std::norm(c.left.bins[k]) + std::norm(c.right.bins[k]));
    mask.m[k] = std::min(nc / nx, 1.0);
  }
  return mask;
}

/// Mask-gated exponential SCM update, per bin:
///   gamma = 1 - M (1 - alpha);  R' = gamma R + (1 - gamma) x x^H.
/// Convex combination of Hermitian PSD terms, so the result stays PSD.
inline void update_scm(SpatialCovariance& r, const StereoSpectrum& x, const SpeechMask& mask,
                       double alpha) {
  require_config(alpha > 0.0 && alpha < 1.0, "update_scm: alpha must be in (0, 1)");
  x.check();
  require(r.n_bins() == x.n_bins() && r.n_bins() == mask.n_bins(),
          "update_scm: bin count mismatch");
  for (std::size_t k = 0; k < r.bins.size(); ++k) {
    const double gamma = 1.0 - mask.m[k] * (1.0 - alpha);
    const double w = 1.0 - gamma;
    if (w == 0.0) continue;
    const cplx xl = x.left.bins[k];
    const cplx xr = x.right.bins[k];
    Herm2& rk = r.bins[k];
    rk.e11 = gamma * rk.e11 + w * std::norm(xl);
    rk.e22 = gamma * rk.e22 + w * std::norm(xr);
    rk.e12 = gamma * rk.e12 + w * xl * std::conj(xr);
  }
}

/// Closed-form principal eigenvector of a 2x2 Hermitian PSD matrix, unit norm,
/// phase convention applied. When the eigenvalue gap is below
/// tie_rel * trace(R) the previous vector is returned instead (temporal
/// smoothness beats an arbitrary choice inside a degenerate eigenspace).
inline Cv2 principal_eigvec(const Herm2& r, const Cv2& previous, double tie_rel = 1e-12) {
  const double tr = r.e11 + r.e22;
  const double off = std::abs(r.e12);
  const double d = r.e11 - r.e22;
  const double gap = std::sqrt(d * d + 4.0 * off * off);  // lambda_max - lambda_min
  if (gap <= tie_rel * std::abs(tr)) {
    return previous;
  }
  const double lambda = 0.5 * (tr + gap);
  // (R - lambda I) v = 0 has two equivalent column solutions; pick the better
  // conditioned one
  const Cv2 v1{r.e12, cplx(lambda - r.e11, 0.0)};
  const Cv2 v2{cplx(lambda - r.e22, 0.0), std::conj(r.e12)};
  const Cv2& v = (norm2(v1) >= norm2(v2)) ? v1 : v2;
  if (norm2(v) == 0.0) {
    return previous;
  }
  return normalize_steering(v);
}

/// Unit vector orthogonal to a: b = [-conj(a2), conj(a1)], phase convention
/// applied. a^H b == 0 exactly by construction.
inline Cv2 orthogonal_complement(const Cv2& a) {
  return normalize_steering({-std::conj(a.m2), std::conj(a.m1)});
}

inline SteeringVector orthogonal_complement(const SteeringVector& a) {
  SteeringVector b;
  b.bins.resize(a.bins.size());
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    b.bins[k] = orthogonal_complement(a.bins[k]);
  }
  return b;
}

/// The fixed non-adaptive steering pair: [1, 1]/sqrt(2) and [1, -1]/sqrt(2)
/// in every bin. Mutually orthogonal, so the pair forms a unitary basis.
inline std::pair<SteeringVector, SteeringVector> fixed_steering_nsv(int n_bins) {
  const double s = 1.0 / std::sqrt(2.0);
  return {SteeringVector::constant({cplx(s, 0.0), cplx(s, 0.0)}, n_bins),
          SteeringVector::constant({cplx(s, 0.0), cplx(-s, 0.0)}, n_bins)};
}

/// Hermitian angle between two unit vectors, in degrees.
inline double hermitian_angle_deg(const Cv2& a, const Cv2& b) {
  const double na = std::sqrt(norm2(a));
  const double nb = std::sqrt(norm2(b));
  if (na == 0.0 || nb == 0.0) return 90.0;
  double c = std::abs(inner(a, b)) / (na * nb);
  c = std::min(c, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

/// Frobenius norm of P P^H - I for the basis P = [a, b]; zero iff the pair is
/// orthonormal.
inline double unitarity_defect(const Cv2& a, const Cv2& b) {
  // P P^H = a a^H + b b^H
  const double m11 = std::norm(a.m1) + std::norm(b.m1) - 1.0;
  const double m22 = std::norm(a.m2) + std::norm(b.m2) - 1.0;
  const cplx m12 = a.m1 * std::conj(a.m2) + b.m1 * std::conj(b.m2);
  return std::sqrt(m11 * m11 + m22 * m22 + 2.0 * std::norm(m12));
}

}  // namespace duopath
