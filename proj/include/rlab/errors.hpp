#pragma once

#include <stdexcept>

namespace rlab {

// Base class of everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define RLAB_DEFINE_ERROR(NAME) \
  struct NAME : Error {         \
    using Error::Error;         \
  }

// measures
RLAB_DEFINE_ERROR(SupportMismatch);
RLAB_DEFINE_ERROR(AbsoluteContinuityViolation);
RLAB_DEFINE_ERROR(QuadratureNonConvergence);
RLAB_DEFINE_ERROR(OrderOutOfRange);
RLAB_DEFINE_ERROR(DivisionByZeroSupport);
RLAB_DEFINE_ERROR(IntegralDiverges);
RLAB_DEFINE_ERROR(LogOfZero);
RLAB_DEFINE_ERROR(NegativeFunctionValue);
RLAB_DEFINE_ERROR(UnsupportedDensity);

// autodiff / networks
RLAB_DEFINE_ERROR(ShapeMismatch);
RLAB_DEFINE_ERROR(NonScalarOutput);
RLAB_DEFINE_ERROR(SaturatedDiscriminator);

// losses
RLAB_DEFINE_ERROR(EmptyBatch);
RLAB_DEFINE_ERROR(BatchLengthMismatch);
RLAB_DEFINE_ERROR(InvalidInterval);

// theorem checks
RLAB_DEFINE_ERROR(ZeroDensitySum);
RLAB_DEFINE_ERROR(ConstraintViolated);
RLAB_DEFINE_ERROR(DegenerateDenominator);

// evaluation
RLAB_DEFINE_ERROR(InsufficientSamples);
RLAB_DEFINE_ERROR(DimensionMismatch);
RLAB_DEFINE_ERROR(MatrixSqrtNonConvergence);

// training / cli
RLAB_DEFINE_ERROR(ConfigInvalid);
RLAB_DEFINE_ERROR(WrongDatasetKind);
RLAB_DEFINE_ERROR(SpecParseError);

#undef RLAB_DEFINE_ERROR

}  // namespace rlab
