// Times the OpenMP replication loop against the serial reference on one
// three-source design and verifies the two produce identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "evbma/simulate.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool identical(const std::vector<evbma::ReplicationResult>& a,
               const std::vector<evbma::ReplicationResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].rep_index != b[r].rep_index || a[r].cells.size() != b[r].cells.size())
      return false;
    for (std::size_t c = 0; c < a[r].cells.size(); ++c) {
      const auto& x = a[r].cells[c];
      const auto& y = b[r].cells[c];
      if (x.count != y.count || x.bma_estimate != y.bma_estimate ||
          x.standard_estimate != y.standard_estimate || x.weights != y.weights)
        return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 400;
  const int threads = argc > 2 ? std::atoi(argv[2]) : 4;
  if (reps < 1 || threads < 1) {
    std::fprintf(stderr, "usage: %s [reps] [threads]\n", argv[0]);
    return 1;
  }

  evbma::DesignPoint design = evbma::build_benchmark_model(evbma::ModelId::Model3, 1.0, 750);
  design.replications = reps;
  design.weight_checkpoints.clear();

  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = evbma::run_design_serial(design);
  const double serial_s = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  const auto parallel = evbma::run_design(design, threads);
  const double parallel_s = seconds_since(t1);

  std::printf("replications:      %d (T = %d, 3 sources)\n", reps, design.horizon);
  std::printf("serial reference:  %.3f s  (%.1f reps/s)\n", serial_s, reps / serial_s);
  std::printf("openmp x%-2d:        %.3f s  (%.1f reps/s)\n", threads, parallel_s,
              reps / parallel_s);
  std::printf("speedup:           %.2fx\n", serial_s / parallel_s);

  if (!identical(serial, parallel)) {
    std::printf("results:           MISMATCH\n");
    return 1;
  }
  std::printf("results:           identical\n");
  return 0;
}
