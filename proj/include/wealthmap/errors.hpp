#pragma once

#include <stdexcept>
#include <string>

namespace wealthmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateId : Error { using Error::Error; };
struct NegativeRadius : Error { using Error::Error; };
struct InvalidCoordinate : Error { using Error::Error; };
struct EmptyZone : Error { using Error::Error; };
struct MalformedHeader : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct MalformedRecord : Error { using Error::Error; };
struct UnknownCluster : Error { using Error::Error; };
struct AllMissingColumn : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct EmptyCluster : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct ZeroVarianceTarget : Error { using Error::Error; };
struct TooFewRows : Error { using Error::Error; };
struct TooManyFeatures : Error { using Error::Error; };
struct MissingCover : Error { using Error::Error; };
struct ModelNotTree : Error { using Error::Error; };

}  // namespace wealthmap
