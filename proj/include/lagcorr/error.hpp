#ifndef LAGCORR_ERROR_HPP
#define LAGCORR_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagcorr {

// Every failure raised by the library carries a short machine-readable kind
// (DegenerateLattice, NonTransverse, ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("SyntaxError", what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace lagcorr

#endif
