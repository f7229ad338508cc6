#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace scma {

using cplx = std::complex<double>;

/// Raised for parameter, dimension and contract violations detected by the
/// library. Callers that need to map failures onto exit codes catch this.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation refuses to run (enumeration caps, root finder
/// failures surfaced to the caller).
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernels that have an OpenMP path take this switch. `Serial` is the
/// reference implementation; both paths must produce identical results.
enum class Execution { Serial, Parallel };

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace scma
