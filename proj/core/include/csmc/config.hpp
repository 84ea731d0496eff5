#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csmc/schemes.hpp"

namespace csmc {

// Flat key=value run configuration (documented schema; '#' comments).
// Unknown keys are parse errors; semantic violations are validation errors
// naming the field.
struct RunConfig {
  std::string model;       // "ou" | "finite" | "diffusion"
  std::string model_path;  // finite fixture path
  SchemeId scheme = SchemeId::IR;
  int level = 0;
  int horizon = 1;
  long particles = 0;
  int replicates = 1;
  std::uint64_t seed = 0;

  std::string phi = "identity";
  double phi_param = 1.0;
  std::string out;

  double ou_x_star = 1.0;
  double ou_a = 0.2;
  double ou_b = 0.8;

  int diffusion_dim = 1;
  double diffusion_drift_scale = -1.5;
  double diffusion_noise = 1.0;
  double diffusion_x_star = 1.0;

  std::string obs_source = "synth";  // "synth" | "file"
  std::string obs_path;
  std::optional<std::uint64_t> obs_seed;

  double mlmc_epsilon = 0.0;  // 0: unset
  double mlmc_constant = 1.0;
  std::optional<int> mlmc_levels;

  std::vector<int> sweep_levels;
  std::vector<int> sweep_horizons;

  long max_rejection_iterations = 1'000'000;

  int state_dim() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace csmc
