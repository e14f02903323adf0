#include "heatcloak/parallel.hpp"

#include <omp.h>

#include <stdexcept>

namespace heatcloak {

void set_thread_count(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
  omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace heatcloak
