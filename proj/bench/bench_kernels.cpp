// Compares the OpenMP similarity kernel against the serial reference on
// matrices sized like a dense harbor scene, and times the assignment solver.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shiptrack/assignment.hpp"
#include "shiptrack/bbox.hpp"

using namespace shiptrack;

namespace {

std::vector<BBox> random_boxes(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 1800.0);
  std::uniform_real_distribution<double> dim(20.0, 160.0);
  std::vector<BBox> boxes;
  boxes.reserve(n);
  for (int i = 0; i < n; ++i) boxes.emplace_back(pos(rng), pos(rng), dim(rng), dim(rng));
  return boxes;
}

template <typename F>
double time_ms(F&& fn, int repeats) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time\n");
#endif

  std::mt19937_64 rng(7);

  std::printf("\nsimilarity matrix fill (TIoU), serial vs parallel\n");
  std::printf("%8s %12s %12s %8s\n", "size", "serial ms", "parallel ms", "speedup");
  for (int n : {128, 512, 1024, 2048}) {
    const auto preds = random_boxes(n, rng);
    const auto dets = random_boxes(n, rng);
    const int repeats = n <= 512 ? 20 : 5;

    volatile double sink = 0.0;
    const double serial = time_ms(
        [&] { sink = similarity_matrix_serial(preds, dets, SimilarityMetric::TIoU).sum(); },
        repeats);
    const double parallel = time_ms(
        [&] { sink = similarity_matrix(preds, dets, SimilarityMetric::TIoU).sum(); }, repeats);
    (void)sink;
    std::printf("%8d %12.3f %12.3f %7.2fx\n", n, serial, parallel, serial / parallel);
  }

  std::printf("\nassignment solve (gated at 0.1)\n");
  std::printf("%8s %12s\n", "size", "ms");
  for (int n : {16, 32, 64}) {
    const auto preds = random_boxes(n, rng);
    const auto dets = random_boxes(n, rng);
    const auto sim = similarity_matrix(preds, dets, SimilarityMetric::TIoU);
    const double ms = time_ms([&] { (void)solve_assignment(sim, 0.1); }, 10);
    std::printf("%8d %12.3f\n", n, ms);
  }
  return 0;
}
