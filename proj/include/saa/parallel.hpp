#pragma once

namespace saa::exec {

// Hot kernels (per-month objective/gradient accumulation, grid sweeps,
// permutation repetitions) carry both an OpenMP path and a plain serial
// path. Reductions store per-slot results and sum them in index order, so
// the two paths produce bit-identical output regardless of thread count;
// tests/test_parallel.cpp asserts this and bench/ compares their speed.
enum class Mode { serial, parallel };

// Process-wide default used when callers do not pass a mode explicitly.
Mode default_mode();
void set_default_mode(Mode mode);

// 0 = leave the OpenMP runtime default.
void set_threads(int n);

}  // namespace saa::exec
