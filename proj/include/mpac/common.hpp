#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mpac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  NotFound,
  ShapeMismatch,
  ParseError,
  InvalidData,
  InvalidInput,
  NumericalError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Same kind, message prefixed with where it happened.
  Error with_context(const std::string& context) const {
    return Error(kind_, context + ": " + what());
  }

private:
  ErrorKind kind_;
};

/// ||A^T A - I||_F
double orthonormality_defect(const Matrix& a);

/// Worker count from MPAC_THREADS, defaulting to 1 when unset or invalid.
int threads_from_env();

/// Runs fn(0..count-1) over up to `threads` workers. Each index runs
/// exactly once; the lowest-index exception, if any, is rethrown after join.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mpac
