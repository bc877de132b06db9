#pragma once

#include <cstddef>

namespace topocp {

/// Worker count used by the OpenMP kernels. Reads TOPOCP_THREADS on first use
/// (0 or unset = runtime default).
int max_threads();

/// Overrides the worker cap; 0 restores the runtime default.
void set_max_threads(int n);

}  // namespace topocp
