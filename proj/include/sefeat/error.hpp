#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sefeat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input is not a PE file we can lay out. Carries the structure that
/// failed validation and the file offset where it was expected.
class MalformedPe : public Error {
public:
    MalformedPe(std::string structure, std::uint64_t offset, const std::string& detail);

    const std::string& structure() const noexcept { return structure_; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::string structure_;
    std::uint64_t offset_;
};

/// A span does not fit inside the byte buffer it is applied to.
class OutOfBounds : public Error {
public:
    using Error::Error;
};

class EmptyChunk : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid synthetic PE spec or corpus recipe. `location` is "file:line"
/// when the spec came from a text file, otherwise a field name.
class SpecError : public Error {
public:
    SpecError(std::string location, const std::string& detail);

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

}  // namespace sefeat
