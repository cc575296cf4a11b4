#pragma once

#include <stdexcept>

namespace ccm {

// Error taxonomy mapped to process exit codes by the command-line layer:
// io_error -> 1, data_error and the std domain/argument errors -> 2,
// consistency_error -> 4.  Threshold verdicts are plain return values.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ccm
