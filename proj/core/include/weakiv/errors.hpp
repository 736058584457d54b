#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace weakiv {

/// Base class for every recoverable failure raised by this library.
/// Catching weakiv::Error is sufficient to absorb all data- or
/// numerics-driven failures; logic bugs surface as other exception types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset construction and projection.
struct DimensionMismatch : Error { using Error::Error; };
struct RankDeficientInstruments : Error { using Error::Error; };
struct ExogenousMismatch : Error { using Error::Error; };

// Estimators.
struct RankDeficientDesign : Error { using Error::Error; };
struct WeakRankFailure : Error { using Error::Error; };
struct LeverageOne : Error { using Error::Error; };
struct SingularGram : Error { using Error::Error; };

// Diagnostics.
struct MultipleEndogenous : Error { using Error::Error; };
struct NoExcludedInstruments : Error { using Error::Error; };
struct NonpositiveVariance : Error { using Error::Error; };
struct DegenerateFirstStage : Error { using Error::Error; };
struct DegenerateResidual : Error { using Error::Error; };
struct InvalidGrid : Error { using Error::Error; };

// Simulation.
struct InvalidCovariance : Error { using Error::Error; };
struct InvalidSweepValue : Error { using Error::Error; };

// Ingestion.
struct FileNotFound : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct SingleLevelCategorical : Error { using Error::Error; };
struct EmptyAfterFiltering : Error { using Error::Error; };

/// Cell-level CSV failure; remembers where it happened.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& detail)
      : Error("row " + std::to_string(row) + ", column '" + column +
              "': " + detail),
        row_(row),
        column_(std::move(column)) {}

  /// 1-based data row (header not counted).
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace weakiv
