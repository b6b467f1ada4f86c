#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swarmnet {

/// Coarse failure class; the CLI maps it onto its exit codes.
enum class ErrorCategory { io, usage, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class RankError : public Error {
 public:
  explicit RankError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class SeriesTooShortError : public Error {
 public:
  explicit SeriesTooShortError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class HorizonError : public Error {
 public:
  HorizonError(const std::string& what, int max_feasible)
      : Error(ErrorCategory::usage, what), max_feasible_(max_feasible) {}
  int max_feasible() const noexcept { return max_feasible_; }

 private:
  int max_feasible_;
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Unknown magic, version, or truncated payload in a binary artifact.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Numeric failures that carry the step (or epoch/batch) at which they happened.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::int64_t step)
      : Error(ErrorCategory::numeric, what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

class PoisonedGradientError : public NumericError {
 public:
  explicit PoisonedGradientError(std::int64_t step);
};

class PoisonedModelError : public NumericError {
 public:
  explicit PoisonedModelError(const std::string& tensor_name);
};

class SimulationDivergedError : public NumericError {
 public:
  explicit SimulationDivergedError(std::int64_t step);
};

class RolloutDivergedError : public NumericError {
 public:
  explicit RolloutDivergedError(std::int64_t step);
};

class NormalizationUndefinedError : public NumericError {
 public:
  NormalizationUndefinedError() : NumericError("natural-skip loss is zero; L_norm undefined", -1) {}
};

class TrainingAbortedError : public NumericError {
 public:
  TrainingAbortedError(int epoch, int batch);
  int epoch() const noexcept { return epoch_; }
  int batch() const noexcept { return batch_; }

 private:
  int epoch_;
  int batch_;
};

}  // namespace swarmnet
