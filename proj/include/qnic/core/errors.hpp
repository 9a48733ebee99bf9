#pragma once

#include <stdexcept>
#include <string>

namespace qnic {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QNIC_DEFINE_ERROR(Name)                 \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

QNIC_DEFINE_ERROR(DomainError);
QNIC_DEFINE_ERROR(TruncationError);
QNIC_DEFINE_ERROR(QuadratureFailure);
QNIC_DEFINE_ERROR(InsecureChannel);
QNIC_DEFINE_ERROR(InsufficientData);
QNIC_DEFINE_ERROR(DegenerateFrame);
QNIC_DEFINE_ERROR(UnsupportedTask);
QNIC_DEFINE_ERROR(UnsupportedAttack);
QNIC_DEFINE_ERROR(RateNonPositive);
QNIC_DEFINE_ERROR(InsufficientAccepted);
QNIC_DEFINE_ERROR(ConfigError);

#undef QNIC_DEFINE_ERROR

} // namespace qnic
