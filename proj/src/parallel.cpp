#include "saa/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace saa::exec {

namespace {
Mode g_mode = Mode::parallel;
}

Mode default_mode() { return g_mode; }

void set_default_mode(Mode mode) { g_mode = mode; }

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
  if (n == 1) g_mode = Mode::serial;
}

}  // namespace saa::exec
