#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace treelimit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPointError : Error {
    using Error::Error;
};

struct TangencyError : Error {
    using Error::Error;
};

struct MalformedWordError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct InvalidEnergyError : Error {
    using Error::Error;
};

struct InvalidSubtreeError : Error {
    using Error::Error;
};

struct EllipticActionError : Error {
    using Error::Error;
};

struct DegenerateLengthError : Error {
    using Error::Error;
};

// Metric fails the four-point precondition; carries the offending quadruple.
struct NotTreeLikeError : Error {
    std::array<int, 4> quadruple{};
    double delta = 0.0;
    double diameter = 0.0;
    NotTreeLikeError(const std::string& msg, std::array<int, 4> quad, double d, double diam)
        : Error(msg), quadruple(quad), delta(d), diameter(diam) {}
};

// Sample map distorts tree distances beyond tolerance; carries the worst pair.
struct NonIsometricActionError : Error {
    int sample_a = -1;
    int sample_b = -1;
    double distortion = 0.0;
    NonIsometricActionError(const std::string& msg, int a, int b, double dist)
        : Error(msg), sample_a(a), sample_b(b), distortion(dist) {}
};

struct ConfigError : Error {
    std::string field;
    ConfigError(const std::string& msg, std::string field_name)
        : Error(msg), field(std::move(field_name)) {}
};

}  // namespace treelimit
