// Trains a small network on a random planar curve and prints which input
// points the network glues, next to the two Betti-number estimates.

#include "ovh/ovh.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  ovh::CurvesConfig cfg;
  cfg.n = 120;
  cfg.width = 20;
  cfg.epochs = 300;
  cfg.learning_rate = 1e-3;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;

  const auto t = ovh::run_curve_trial(cfg, seed);
  std::printf("curve a=%.3f b=%.3f, final mse %.3g\n", t.a, t.b, t.training.final_loss);
  std::printf("%zu populated regions, %zu overlap classes\n", t.decomposition.size(), t.overlap.size());
  for (std::size_t c = 0; c < t.overlap.size(); ++c) {
    std::printf("  class %zu:", c);
    for (auto p : t.overlap.classes[c]) std::printf(" %.2f", t.data.inputs(static_cast<Eigen::Index>(p), 0));
    std::printf("\n");
  }
  std::printf("betti at eps=%.2f  persistent (outputs): b0=%zu b1=%zu  quotient (inputs): b0=%zu b1=%zu\n",
              cfg.epsilon, t.persistent_betti[0], t.persistent_betti[1], t.quotient_betti[0],
              t.quotient_betti[1]);
  return 0;
}
