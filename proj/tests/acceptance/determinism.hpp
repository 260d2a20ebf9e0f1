#pragma once

#include <string>

namespace acceptance {

struct DeterminismResult {
    bool identical = false;
    std::string detail;
};

// Runs every acceptance scenario twice (one and two worker threads) and compares CSV bytes.
DeterminismResult check_determinism();

}  // namespace acceptance
