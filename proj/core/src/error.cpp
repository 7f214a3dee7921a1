#include "rabical/error.hpp"

namespace rabical {

const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::kConfig:
      return "config_error";
    case ErrorClass::kMissingInput:
      return "missing_input";
    case ErrorClass::kNumerical:
      return "numerical_failure";
    case ErrorClass::kIo:
      return "io_error";
  }
  return "unknown";
}

int exit_code_for(ErrorClass c) {
  switch (c) {
    case ErrorClass::kConfig:
      return 2;
    case ErrorClass::kMissingInput:
      return 3;
    case ErrorClass::kNumerical:
      return 4;
    case ErrorClass::kIo:
      return 5;
  }
  return 1;
}

}  // namespace rabical
