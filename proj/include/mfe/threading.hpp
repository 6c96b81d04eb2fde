#pragma once

#include <functional>

namespace mfe {

/// Process-wide worker cap for parallel fan-out (Monte-Carlo trials, noise
/// replications, frequency grids). Zero means hardware concurrency.
void set_thread_limit(int n);
int thread_limit();

/// Runs fn(i) for i in [0, n); results must be written to pre-sized slots so
/// the reduction stays index-ordered and deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mfe
