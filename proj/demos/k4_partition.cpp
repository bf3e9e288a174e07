// Balanced bipartition of K4: run the circuit at increasing b and watch the
// post-selected distribution concentrate on the six balanced cuts.

#include <cstdio>

#include "qanneal/qanneal.hpp"

int main() {
  using namespace qanneal;
  const auto graph = make_graph_instance(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 1.0, 1.0, 1.0);
  const auto cost = graph_partition_cost(graph);
  const auto truth = brute_force_min(cost);

  std::printf("min cost %.3f on %zu states\n", truth.min_value, truth.argmin.size());
  for (unsigned b : {1U, 2U, 4U, 8U, 16U}) {
    const auto post = postselect_zero(run_circuit(cost, b));
    double on_min = 0.0;
    for (Bits x : truth.argmin) on_min += std::norm(post.search[x]);
    std::printf("b=%2u  P0=%.6f  expected repetitions=%8.2f  mass on minima=%.6f\n", b,
                post.probability, 1.0 / post.probability, on_min);
  }
}
