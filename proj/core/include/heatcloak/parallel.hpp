#pragma once

namespace heatcloak {

/// Worker threads used by the parallel loops (n >= 1).
void set_thread_count(int n);
int thread_count();

}  // namespace heatcloak
