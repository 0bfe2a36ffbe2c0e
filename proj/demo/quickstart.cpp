// Minimal usage example: certified min-max regret for a misspecified
// Bernoulli problem, plus the implied add-beta smoothing at zero counts.

#include <iostream>

#include "ubatch/ubatch.hpp"

int main() {
    using namespace ubatch;

    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 1001);     // data-generating family Phi
    cfg.theta = HypothesisSet::interval(0.01, 0.99);  // hypothesis class Theta
    cfg.N = 100;
    cfg.lambda = 200.0;         // update exponent scaled to the 1/2N objective
    cfg.epsilon = 1e-4 / 200.0;  // certified gap target, nats

    RegretReport rep = solve(cfg);
    std::cout << "2N * regret = " << rep.normalized_2n() << " (certified gap "
              << 2.0 * cfg.N * rep.gap() << " in 2N units, " << rep.iterations
              << " iterations)\n";

    auto table = predictive_from_prior(cfg.grid, rep.final_prior, cfg.N);
    auto beta = add_beta(table, 0);
    std::cout << "implied add-beta at empty counts: " << beta.beta << "\n";
    return 0;
}
