// Thresholds beta*(sigma) for a few nonlinearities on the planted
// submatrix model and on half-normal signal entries.

#include <cstdio>

#include "nlap/nlap.hpp"

int main() {
  using nlap::SigmaSpec;
  const SigmaSpec sigmas[] = {
      SigmaSpec::zero(),
      SigmaSpec::tanh(1.0, 1.0),
      SigmaSpec::tanh(1.70975544, 0.58384115),
      SigmaSpec::zshaped(7.55, 4.49, -5.34),
      SigmaSpec::step({0.0}, {0.0, 1.0}),
  };
  const nlap::ModelSpec models[] = {nlap::ModelSpec::planted_submatrix(), nlap::ModelSpec::half_normal()};

  std::printf("%-60s %10s %10s\n", "sigma", "delta_1", "|N(0,1)|");
  for (const auto& s : sigmas) {
    std::printf("%-60s", s.to_json().dump().c_str());
    for (const auto& m : models) std::printf(" %10.6f", nlap::beta_star(s, m));
    std::printf("\n");
  }

  const nlap::ThresholdSolver solver(sigmas[2], models[0]);
  std::printf("\nbest tanh, planted submatrix: bulk edge %.6f\n", solver.bulk_edge());
  for (double beta : {0.5, 0.755, 1.0, 1.2, 1.5}) {
    const nlap::TheoryResult r = solver.predict(beta);
    std::printf("  beta %.3f  theta %.6f  lambda1 %.6f  outlier %s\n", beta, r.theta, r.lambda1_predicted,
                r.has_outlier ? "yes" : "no");
  }
  return 0;
}
