#pragma once

#include <stdexcept>
#include <string>

namespace hopf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define HOPF_DECLARE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

HOPF_DECLARE_ERROR(NonFiniteIntegrand)
HOPF_DECLARE_ERROR(UnsupportedScheme)
HOPF_DECLARE_ERROR(DomainMismatch)
HOPF_DECLARE_ERROR(InvalidCocycle)
HOPF_DECLARE_ERROR(NonCompactSubgroup)
HOPF_DECLARE_ERROR(UncertifiedOrbit)
HOPF_DECLARE_ERROR(OutsideCore)
HOPF_DECLARE_ERROR(EmptySample)
HOPF_DECLARE_ERROR(ParseError)
HOPF_DECLARE_ERROR(ConfigError)
HOPF_DECLARE_ERROR(TaskError)
HOPF_DECLARE_ERROR(NoSuchTask)

#undef HOPF_DECLARE_ERROR

}  // namespace hopf
