// One planted instance: top eigenvalue of the compressed sigma-Laplacian
// against the predicted outlier, and the same for sigma = 0.

#include <cstdio>
#include <cstdlib>

#include "nlap/nlap.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const double beta = argc > 2 ? std::strtod(argv[2], nullptr) : 1.2;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 2024;

  const nlap::ModelSpec model = nlap::ModelSpec::planted_submatrix(beta);
  const nlap::Instance inst = nlap::sample_observation(model, n, seed);
  std::printf("n = %zu, beta = %.3f, support size %zu\n", n, beta, inst.support().size());

  for (const auto& sigma : {nlap::SigmaSpec::zero(), nlap::SigmaSpec::tanh(1.70975544, 0.58384115)}) {
    const nlap::LaplacianTop top = nlap::laplacian_top(inst.y_hat, sigma, true);
    const nlap::TheoryResult th = nlap::predicted_lambda1(sigma, model, beta);
    std::printf("%-45s lambda1 %.4f  predicted %.4f  bulk edge %.4f  overlap %.3f\n", sigma.to_json().dump().c_str(),
                top.lambda1, th.lambda1_predicted, th.bulk_edge_plus, nlap::overlap(top.v1, inst.x));
  }
  std::printf("max row sum %.4f\n", nlap::max_row_statistic(inst.y_hat));
  return 0;
}
