#pragma once

#include <stdexcept>
#include <string>

namespace tomoed {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define TOMOED_DEFINE_ERROR(name)                 \
  struct name : Error {                           \
    using Error::Error;                           \
  };

TOMOED_DEFINE_ERROR(DimensionMismatch)
TOMOED_DEFINE_ERROR(NotHermitian)
TOMOED_DEFINE_ERROR(NotPSD)
TOMOED_DEFINE_ERROR(NotUnitary)
TOMOED_DEFINE_ERROR(NotNormalized)
TOMOED_DEFINE_ERROR(RankDeficient)
TOMOED_DEFINE_ERROR(BadBasis)
TOMOED_DEFINE_ERROR(InvalidModel)
TOMOED_DEFINE_ERROR(InfeasiblePoint)
TOMOED_DEFINE_ERROR(InfeasibleTruth)
TOMOED_DEFINE_ERROR(ZeroProbability)
TOMOED_DEFINE_ERROR(ZeroProbabilityOutcome)
TOMOED_DEFINE_ERROR(SolverMaxIter)
TOMOED_DEFINE_ERROR(SingularNormalEquations)
TOMOED_DEFINE_ERROR(InfeasibleTraceCap)
TOMOED_DEFINE_ERROR(NotIdentifiable)
TOMOED_DEFINE_ERROR(TruncationNotIdentifiable)
TOMOED_DEFINE_ERROR(AllZero)
TOMOED_DEFINE_ERROR(CertificateFailed)
TOMOED_DEFINE_ERROR(EmptyGrid)
TOMOED_DEFINE_ERROR(UnknownExample)
TOMOED_DEFINE_ERROR(ParseError)

#undef TOMOED_DEFINE_ERROR

}  // namespace tomoed
