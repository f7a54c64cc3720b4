#pragma once

namespace modsynth {

/// Exit codes: 0 success, 1 input error, 2 ran but found no feasible solution.
int run_cli(int argc, char** argv);

}  // namespace modsynth
