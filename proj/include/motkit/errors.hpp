#pragma once

#include <stdexcept>
#include <string>

namespace motkit {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MOTKIT_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                          \
        explicit Name(const std::string& msg) : Error(msg) {}      \
    }

// geometry
MOTKIT_DEFINE_ERROR(SingularTransform);

// cmc
MOTKIT_DEFINE_ERROR(InsufficientCorrespondences);
MOTKIT_DEFINE_ERROR(DegenerateConfiguration);
MOTKIT_DEFINE_ERROR(NoConsensus);
MOTKIT_DEFINE_ERROR(MissingFrame);

// motion
MOTKIT_DEFINE_ERROR(InvalidMeasurement);
MOTKIT_DEFINE_ERROR(NumericalFailure);

// appearance
MOTKIT_DEFINE_ERROR(ZeroVector);
MOTKIT_DEFINE_ERROR(NoObservations);
MOTKIT_DEFINE_ERROR(DimensionMismatch);

// association / numerics shapes
MOTKIT_DEFINE_ERROR(ShapeMismatch);

// tracker
MOTKIT_DEFINE_ERROR(NonMonotonicFrame);
MOTKIT_DEFINE_ERROR(StreamMisalignment);

// metrics
MOTKIT_DEFINE_ERROR(EmptyGroundTruth);
MOTKIT_DEFINE_ERROR(NoTruePositives);

// numerics
MOTKIT_DEFINE_ERROR(ZeroAlpha);
MOTKIT_DEFINE_ERROR(IndexOutOfRange);
MOTKIT_DEFINE_ERROR(NonUnitVector);
MOTKIT_DEFINE_ERROR(NumericalSingularity);

// sim
MOTKIT_DEFINE_ERROR(ConfigInvalid);
MOTKIT_DEFINE_ERROR(UnknownPreset);

// io
MOTKIT_DEFINE_ERROR(ParseError);
MOTKIT_DEFINE_ERROR(NegativeDimensions);
MOTKIT_DEFINE_ERROR(InconsistentDimension);
MOTKIT_DEFINE_ERROR(IoFailure);

#undef MOTKIT_DEFINE_ERROR

}  // namespace motkit
