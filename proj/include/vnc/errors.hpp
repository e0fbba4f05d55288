#pragma once

#include <stdexcept>
#include <string>

namespace vnc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Metric evaluation produced a matrix that is not symmetric positive
/// definite, or an inversion hit reciprocal condition number < 1e-12.
struct MetricSingular : Error {
  using Error::Error;
};

/// A finite-difference or other numeric evaluation produced non-finite
/// values, or a simulation state stopped being finite.
struct NumericalFailure : Error {
  using Error::Error;
};

/// The stacked constraint one-forms lost rank at the evaluated point.
struct RankDeficientConstraints : Error {
  using Error::Error;
};

/// The constraint distribution and the input distribution intersect at the
/// evaluated point: the coupling matrix C is numerically singular.
struct TransversalityFailure : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// Too few usable samples for a fit (e.g. the log-decay fit floor removed
/// almost everything).
struct InsufficientData : Error {
  using Error::Error;
};

/// Invalid run configuration (non-positive step, inconsistent sizes, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Text input (expression, system file, CSV) failed to parse.
/// Carries a 1-based line/column when known; 0 means unknown.
struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& what, int line_ = 0, int column_ = 0)
      : Error(line_ > 0 ? what + " (line " + std::to_string(line_) + ", column " +
                              std::to_string(column_) + ")"
                        : what),
        line(line_),
        column(column_) {}
};

}  // namespace vnc
