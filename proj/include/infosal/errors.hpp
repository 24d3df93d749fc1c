#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace infosal {

// Base for every error the library raises on bad input. Anything else that
// escapes (std::bad_alloc, logic errors) is an internal failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

// Too few samples for the requested dimensionality (N < 2^D).
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

// Zero denominator in a metric whose value is then undefined.
class UndefinedError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed file content. `location` is a byte offset for binary formats and
// a 1-based line number for text formats.
class FormatError : public Error {
public:
    enum class Unit { byte, line, file };

    FormatError(const std::string& what, Unit unit, std::size_t location)
        : Error(what), unit_(unit), location_(location) {}

    Unit unit() const noexcept { return unit_; }
    std::size_t location() const noexcept { return location_; }

private:
    Unit unit_;
    std::size_t location_;
};

}  // namespace infosal
