#pragma once

#include <stdexcept>
#include <string>

namespace qlip {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still report the specific kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define QLIP_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                        \
    public:                                                            \
        using Error::Error;                                            \
        const char* kind() const noexcept override { return #Name; }   \
    }

QLIP_DEFINE_ERROR(NonHermitianInput);
QLIP_DEFINE_ERROR(DimensionMismatch);
QLIP_DEFINE_ERROR(InvalidArgument);
QLIP_DEFINE_ERROR(TooLarge);
QLIP_DEFINE_ERROR(IterationLimit);
QLIP_DEFINE_ERROR(InvalidMetric);
QLIP_DEFINE_ERROR(InvalidMeasure);
QLIP_DEFINE_ERROR(SpaceMismatch);
QLIP_DEFINE_ERROR(NotAState);
QLIP_DEFINE_ERROR(InvalidState);
QLIP_DEFINE_ERROR(NotStrictlyPositive);
QLIP_DEFINE_ERROR(NormalizationError);
QLIP_DEFINE_ERROR(InvalidUnitSpec);
QLIP_DEFINE_ERROR(ConfigError);
QLIP_DEFINE_ERROR(UnknownScenario);
QLIP_DEFINE_ERROR(IoError);

#undef QLIP_DEFINE_ERROR

} // namespace qlip
