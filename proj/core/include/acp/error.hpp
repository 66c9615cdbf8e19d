#pragma once

#include <stdexcept>
#include <string>

namespace acp {

// Base for every exception the runtime throws across module boundaries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace acp
