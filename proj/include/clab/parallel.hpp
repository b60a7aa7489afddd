#pragma once

#include <functional>

namespace clab {

/// Worker cap: CARLEMAN_LAB_THREADS when set, otherwise the machine core count.
int thread_cap();

/// Runs fn(i) for i in [0, count). Work items must be independent; callers get
/// determinism by writing into preassigned slots.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace clab
