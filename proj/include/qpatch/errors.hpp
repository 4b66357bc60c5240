#ifndef QPATCH_ERRORS_HPP
#define QPATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qpatch {

// Error taxonomy shared by the library and the CLI exit codes:
// config -> bad parameter combinations chosen at setup time
// usage  -> a call that violates an operation's preconditions
// format -> malformed or truncated on-disk data
// training -> optimizer divergence, carries the epoch it happened in
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

struct TrainingError : std::runtime_error {
    TrainingError(const std::string& what, int epoch_index)
        : std::runtime_error(what), epoch(epoch_index) {}
    int epoch;
};

}  // namespace qpatch

#endif  // QPATCH_ERRORS_HPP
