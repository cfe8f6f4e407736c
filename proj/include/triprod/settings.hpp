#ifndef TRIPROD_SETTINGS_HPP
#define TRIPROD_SETTINGS_HPP

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace triprod {

/// Fixed numerical tolerances shared by every module.
///
/// The values are constants so that pass/fail decisions are reproducible;
/// `settings()` returns the one process-wide record.
struct Settings {
  double group_tol = 1e-12;        // |g^T J g - J| entrywise
  double det_tol = 1e-10;          // |det g - 1|
  double roundtrip_tol = 1e-10;    // Iwasawa reassembly error
  double orthogonality_tol = 1e-12;
  double rank_threshold = 1e-9;    // singular-value cutoff for tangent rank
  double pole_tol = 1e-14;         // distance to a Gamma pole
};

inline const Settings& settings() {
  static const Settings s{};
  return s;
}

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (bad dimension, non-orthogonal input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that fails the SO(d,1)^0 invariants.
class InvalidElement : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Worker count for parallel quadrature: TRIPROD_THREADS, else hardware parallelism.
inline unsigned thread_count() {
  if (const char* env = std::getenv("TRIPROD_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace triprod

#endif  // TRIPROD_SETTINGS_HPP
