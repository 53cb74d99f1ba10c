#pragma once

#include <stdexcept>
#include <string>

namespace sphrs {

/// A pixel coordinate outside the domain of a projection.
class CoordinateDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Perspective projection of a point at or behind the camera plane.
class BehindCameraError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Collinear or otherwise degenerate point sets.
class DegenerateGeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, mismatched dimensions or unsupported combinations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unsupported image files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphrs
