#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Error taxonomy. Numerical contract violations are exceptions; degenerate
// states that are valid outcomes (d_p = 0) are not.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : Error { using Error::Error; };
struct NotPD : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct UndefinedSpace : Error { using Error::Error; };
struct DegenerateStencil : Error { using Error::Error; };
struct InvalidEpsilon : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct NonConvexProfile : Error { using Error::Error; };
struct NotToric : Error { using Error::Error; };
struct PositiveDimensional : Error { using Error::Error; };
struct NumericallyDegenerate : Error { using Error::Error; };
struct BallTouchesAtom : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic random streams.
//
// Every consumer derives its engine from (master_seed, experiment_id, index),
// so a sample is reproducible no matter in which order, or on how many
// threads, the samples are drawn. Gaussians come from an explicit Box-Muller
// on 53-bit uniforms; std::*_distribution is avoided because its sequences
// are implementation-defined.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t experiment_id,
            std::uint64_t index)
      : eng_(splitmix64(splitmix64(master_seed ^ 0x6c62272e07bb0142ULL) ^
                        splitmix64(experiment_id)) ^
             splitmix64(index + 0x100000001b3ULL)) {}

  // Uniform in (0,1]; never returns 0 so logs are safe.
  double uniform01() {
    const std::uint64_t bits = eng_() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  cplx cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Sweep verdict shared by the convergence diagnostics: a sweep passes when
// the deviations never increase (beyond atol) and the final value has dropped
// below `factor` times the first.
// ---------------------------------------------------------------------------

inline bool trend_pass(const std::vector<double>& v, double factor,
                       double atol = 1e-9) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + atol) return false;
  }
  return v.back() <= factor * v.front() + atol;
}

// FNV-1a over raw bytes; used for content hashes of cached objects.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace lab
