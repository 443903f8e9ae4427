#pragma once

#include <stdexcept>
#include <string>

namespace cbgfe {

// Base of every library error. `kind()` is the short name used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CBGFE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

CBGFE_DEFINE_ERROR(MissingCell)
CBGFE_DEFINE_ERROR(DuplicateCell)
CBGFE_DEFINE_ERROR(NonNumeric)
CBGFE_DEFINE_ERROR(HorizonTooLarge)
CBGFE_DEFINE_ERROR(AccuracyOutOfRange)
CBGFE_DEFINE_ERROR(SingularPrecision)
CBGFE_DEFINE_ERROR(AllZeroMass)
CBGFE_DEFINE_ERROR(EmptyChain)
CBGFE_DEFINE_ERROR(LengthMismatch)
CBGFE_DEFINE_ERROR(DimensionMismatch)
CBGFE_DEFINE_ERROR(CollinearDesign)
CBGFE_DEFINE_ERROR(UnknownUnit)
CBGFE_DEFINE_ERROR(InvalidArgument)
CBGFE_DEFINE_ERROR(IoError)

#undef CBGFE_DEFINE_ERROR

}  // namespace cbgfe
