#pragma once

#include <stdexcept>
#include <string>

namespace csmc {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every raw weight is exactly zero: total weight collapse, the run aborts.
struct AllZeroWeights : Error {
  explicit AllZeroWeights(const std::string& where)
      : Error("all weights are zero in " + where) {}
};

// A vector that should be a probability distribution is not.
struct InvalidDistribution : Error {
  using Error::Error;
};

// A scheme needs a density view the model does not provide.
struct MissingDensity : Error {
  using Error::Error;
};

// A scheme needs state_dim == 1 (or another dimension constraint).
struct DimensionUnsupported : Error {
  using Error::Error;
};

// The rejection loop of the maximal-coupling sampler hit its cap.
struct RejectionBudgetExceeded : Error {
  long iterations;
  explicit RejectionBudgetExceeded(long iters)
      : Error("rejection sampler exceeded " + std::to_string(iters) +
              " iterations"),
        iterations(iters) {}
};

// A simulated state acquired a non-finite coordinate (model blow-up).
struct NonFiniteState : Error {
  using Error::Error;
};

// An exact recursion lost all mass at some time index.
struct ZeroMass : Error {
  int time_index;
  explicit ZeroMass(int n)
      : Error("zero mass in exact recursion at time " + std::to_string(n)),
        time_index(n) {}
};

// MLMC accuracy outside (0, 1).
struct InvalidAccuracy : Error {
  using Error::Error;
};

// Config file could not be parsed; carries the 1-based line number.
struct ParseError : Error {
  int line;
  ParseError(int line_no, const std::string& what)
      : Error("parse error at line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

// Config parsed but a field has an inadmissible value.
struct ValidationError : Error {
  std::string field;
  ValidationError(std::string field_name, const std::string& what)
      : Error("invalid config field '" + field_name + "': " + what),
        field(std::move(field_name)) {}
};

}  // namespace csmc
