#include "sefeat/error.hpp"

#include <fmt/format.h>

namespace sefeat {

MalformedPe::MalformedPe(std::string structure, std::uint64_t offset, const std::string& detail)
    : Error(fmt::format("malformed PE: {} at offset {:#x}: {}", structure, offset, detail)),
      structure_(std::move(structure)),
      offset_(offset) {}

SpecError::SpecError(std::string location, const std::string& detail)
    : Error(fmt::format("{}: {}", location, detail)), location_(std::move(location)) {}

}  // namespace sefeat
