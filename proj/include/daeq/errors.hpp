#pragma once

#include <stdexcept>
#include <string>

namespace daeq {

// Base for every failure raised by the library. Verdicts (for example a
// share that fails verification) are returned as values, not thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DAEQ_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

DAEQ_DEFINE_ERROR(ParamGenerationError);
DAEQ_DEFINE_ERROR(ParseError);
DAEQ_DEFINE_ERROR(MessageOutOfRange);
DAEQ_DEFINE_ERROR(NotFound);
DAEQ_DEFINE_ERROR(NotPowerOfBase);
DAEQ_DEFINE_ERROR(WrongCount);
DAEQ_DEFINE_ERROR(DuplicateIndex);
DAEQ_DEFINE_ERROR(EncodeOverflow);
DAEQ_DEFINE_ERROR(DecodeDeadZone);
DAEQ_DEFINE_ERROR(ShapeMismatch);
DAEQ_DEFINE_ERROR(MissingShare);
DAEQ_DEFINE_ERROR(AbortInsufficientQual);
DAEQ_DEFINE_ERROR(AbortDisputeUnresolvable);
DAEQ_DEFINE_ERROR(AbortInsufficientDecryptors);
DAEQ_DEFINE_ERROR(PlanViolatesHonestMajority);
DAEQ_DEFINE_ERROR(InfeasiblePartition);
DAEQ_DEFINE_ERROR(ConfigError);
DAEQ_DEFINE_ERROR(AccessViolation);

#undef DAEQ_DEFINE_ERROR

}  // namespace daeq
