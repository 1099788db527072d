#pragma once

#include <stdexcept>

namespace wqm {

/// Invalid run configuration or malformed config text.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A replay was requested that the recorded data cannot support.
class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (time-stamp series, trace, table).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A statistic was requested on data that does not define it.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wqm
