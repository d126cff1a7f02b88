#pragma once

#include <stdexcept>
#include <string>

namespace windh2 {

/// Malformed input: bad model structure, bad config value, bad file row.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The solver itself misbehaved (iteration cap, numerical breakdown).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-loop execution failed: an LP came back infeasible/unbounded where
/// it must not, or a transition left storage outside its bounds.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace windh2
