#pragma once

#include <string>
#include <vector>

namespace motkit {

// Outcome of one self-check suite: worst error observed across all cases and
// whether it stayed inside the suite's tolerance.
struct MathCheckResult {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
    int cases = 0;
};

// Reversible column recurrence: forward-then-inverse reconstruction on 100
// random 16x16 grids with residual scales spanning [0.1, 10].
MathCheckResult mathcheck_revcol();

// Angular-margin hinge loss: analytic gradient vs. central finite differences
// on 1000 active triplets, plus exact-zero gradients on inactive ones.
MathCheckResult mathcheck_adaloss();

// Relative-position attention bias: manual lookups, translation invariance,
// displacement-sign symmetry, and bounds errors.
MathCheckResult mathcheck_attention();

// suite is one of "revcol", "adaloss", "attention", "all".
// Throws ConfigInvalid on any other name.
std::vector<MathCheckResult> run_mathcheck(const std::string& suite);

// One fixed-width report line per result.
std::string format_mathcheck(const std::vector<MathCheckResult>& results);

}  // namespace motkit
