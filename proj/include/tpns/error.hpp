#pragma once

#include <stdexcept>
#include <string>

namespace tpns {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define TPNS_DEFINE_ERROR(Name)                                                \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}       \
  }

// mesh
TPNS_DEFINE_ERROR(NonDivisibleStep);
TPNS_DEFINE_ERROR(DegenerateDomain);
TPNS_DEFINE_ERROR(MisalignedLayout);
TPNS_DEFINE_ERROR(GeometryMisaligned);
// elements
TPNS_DEFINE_ERROR(InvalidBarycentric);
TPNS_DEFINE_ERROR(UnsupportedOrder);
TPNS_DEFINE_ERROR(RegionMismatch);
// linalg
TPNS_DEFINE_ERROR(IndexOutOfRange);
TPNS_DEFINE_ERROR(SingularMatrix);
// assembly
TPNS_DEFINE_ERROR(MissingInterfaceTags);
TPNS_DEFINE_ERROR(NonMatchingInterface);
TPNS_DEFINE_ERROR(MissingBoundaryValue);
// stepping / twogrid
TPNS_DEFINE_ERROR(SolverFailure);
TPNS_DEFINE_ERROR(NotNested);
TPNS_DEFINE_ERROR(MissingCorrection);
TPNS_DEFINE_ERROR(SingularPressureBlock);
// wellbore
TPNS_DEFINE_ERROR(EmptyOutlet);
// cli_io
TPNS_DEFINE_ERROR(ParseError);
TPNS_DEFINE_ERROR(UnknownKey);
TPNS_DEFINE_ERROR(TypeMismatch);
TPNS_DEFINE_ERROR(InvariantViolation);
TPNS_DEFINE_ERROR(IoError);

#undef TPNS_DEFINE_ERROR

} // namespace tpns
