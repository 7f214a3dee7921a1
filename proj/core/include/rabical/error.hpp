#pragma once

#include <stdexcept>
#include <string>

namespace rabical {

// Failure classes surfaced by the pipeline. Precondition violations inside
// the numerical modules use the standard exceptions (std::invalid_argument,
// std::out_of_range, std::domain_error); the classes below carry the
// categories that map onto distinct process exit codes.
enum class ErrorClass {
  kConfig,
  kMissingInput,
  kNumerical,
  kIo,
};

const char* error_class_name(ErrorClass c);
int exit_code_for(ErrorClass c);

class PipelineError : public std::runtime_error {
 public:
  PipelineError(ErrorClass c, const std::string& what)
      : std::runtime_error(what), class_(c) {}

  ErrorClass error_class() const { return class_; }

 private:
  ErrorClass class_;
};

class ConfigError : public PipelineError {
 public:
  explicit ConfigError(const std::string& what)
      : PipelineError(ErrorClass::kConfig, what) {}
};

class MissingInputError : public PipelineError {
 public:
  explicit MissingInputError(const std::string& what)
      : PipelineError(ErrorClass::kMissingInput, what) {}
};

// Raised when a numerical stage produces no usable result, e.g. every
// Rabi fit of a map was excluded.
class NumericalError : public PipelineError {
 public:
  explicit NumericalError(const std::string& what)
      : PipelineError(ErrorClass::kNumerical, what) {}
};

class IoError : public PipelineError {
 public:
  explicit IoError(const std::string& what)
      : PipelineError(ErrorClass::kIo, what) {}
};

}  // namespace rabical
