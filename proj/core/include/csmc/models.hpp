#pragma once

#include <string>
#include <vector>

#include "csmc/diffusion.hpp"
#include "csmc/model.hpp"

namespace csmc {

// Level-indexed coupled model builder. make(l) for l >= 1 pairs the level-l
// fine dynamics with the level-(l-1) coarse dynamics; make(0) pairs level 0
// with itself (perfectly coupled), which is what the plain level-0 estimator
// runs on.
struct LevelModelFamily {
  std::string name;
  int state_dim = 1;
  std::function<FeynmanKacModel(int fine_level)> make;
};

// Bernoulli-logistic observation density for the 1-D OU example:
// g(x) = (b e^x + a) / (1 + e^x), 0 < a < b < 1,
// G(x, y) = g(x)^y (1 - g(x))^(1-y), y in {0, 1}.
struct OuObservationParams {
  double a = 0.2;
  double b = 0.8;
};

double ou_emission_prob(double x, const OuObservationParams& obs);

// Simulates the hidden chain at the given level from x* and draws one
// Bernoulli observation per unit time; count observations are returned.
std::vector<int> synthesize_ou_observations(int count, int level,
                                            double x_star,
                                            const OuObservationParams& obs,
                                            RngStream rng);

// Coupled OU model at levels (l, l-1): closed-form N(alpha_l x, beta_l)
// marginal kernels with densities, synchronous-Euler coupled kernel, and a
// fast Gaussian predictive-mixture evaluator.
FeynmanKacModel make_ou_coupled_model(int fine_level, double x_star,
                                      const OuObservationParams& obs,
                                      std::vector<int> observations);

LevelModelFamily make_ou_family(double x_star, const OuObservationParams& obs,
                                std::vector<int> observations);

// Generic Euler-discretized diffusion with linear drift scale*x, constant
// noise, and the logistic observation model applied to coordinate 0.
// No density views: IR/MCR (and W when dim == 1) only.
struct LinearDiffusionParams {
  int dim = 1;
  double drift_scale = -1.5;
  double noise = 1.0;
  double x_star = 1.0;
};

FeynmanKacModel make_linear_diffusion_model(int fine_level,
                                            const LinearDiffusionParams& p,
                                            const OuObservationParams& obs,
                                            std::vector<int> observations);

LevelModelFamily make_linear_diffusion_family(const LinearDiffusionParams& p,
                                              const OuObservationParams& obs,
                                              std::vector<int> observations);

}  // namespace csmc
