#pragma once

#include <stdexcept>

namespace afv {

// Error taxonomy, mapped to CLI exit codes in tools/afv.cpp:
//   ValidationError    -> 2   (bad arguments, malformed input, contract violations)
//   IoError            -> 3   (missing files, unreadable/unwritable paths, truncation)
//   DegenerateStatError-> 4   (statistics undefined on the given data, e.g. zero variance)

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateStatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace afv
