#include "csmc/config.hpp"

#include <fstream>
#include <sstream>

#include "csmc/errors.hpp"

namespace csmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError(line, "empty list entry");
    out.push_back(static_cast<int>(parse_long(item, line)));
  }
  if (out.empty()) throw ParseError(line, "empty list");
  return out;
}

void validate(const RunConfig& cfg, bool seed_set, bool particles_set,
              bool model_set, bool scheme_set) {
  if (!model_set) throw ValidationError("model", "required");
  if (!scheme_set) throw ValidationError("scheme", "required");
  if (!seed_set) throw ValidationError("seed", "required (no wall-clock default)");
  if (!particles_set) throw ValidationError("particles", "required");

  if (cfg.model != "ou" && cfg.model != "finite" && cfg.model != "diffusion")
    throw ValidationError("model", "must be one of ou|finite|diffusion");
  if (cfg.model == "finite" && cfg.model_path.empty())
    throw ValidationError("model.path", "required for finite models");
  if (cfg.particles < 1) throw ValidationError("particles", "must be >= 1");
  if (cfg.replicates < 1) throw ValidationError("replicates", "must be >= 1");
  if (cfg.level < 0) throw ValidationError("level", "must be >= 0");
  if (cfg.horizon < 0) throw ValidationError("horizon", "must be >= 0");
  if (cfg.phi != "identity" && cfg.phi != "clipped-abs" &&
      cfg.phi != "indicator-threshold")
    throw ValidationError(
        "phi", "must be one of identity|clipped-abs|indicator-threshold");
  if (cfg.obs_source != "synth" && cfg.obs_source != "file")
    throw ValidationError("obs.source", "must be synth|file");
  if (cfg.obs_source == "file" && cfg.obs_path.empty())
    throw ValidationError("obs.path", "required when obs.source=file");
  if (!(cfg.ou_a > 0.0 && cfg.ou_a < cfg.ou_b && cfg.ou_b < 1.0))
    throw ValidationError("ou.a", "need 0 < ou.a < ou.b < 1");
  if (cfg.diffusion_dim < 1)
    throw ValidationError("diffusion.dim", "must be >= 1");
  if (!(cfg.diffusion_noise > 0.0))
    throw ValidationError("diffusion.noise", "must be > 0");
  if (cfg.mlmc_epsilon != 0.0 &&
      !(cfg.mlmc_epsilon > 0.0 && cfg.mlmc_epsilon < 1.0))
    throw ValidationError("mlmc.epsilon", "must lie in (0,1)");
  if (!(cfg.mlmc_constant > 0.0))
    throw ValidationError("mlmc.constant", "must be > 0");
  if (cfg.mlmc_levels && *cfg.mlmc_levels < 1)
    throw ValidationError("mlmc.levels", "must be >= 1");
  if (cfg.max_rejection_iterations < 1)
    throw ValidationError("max_rejection_iterations", "must be >= 1");
  for (int l : cfg.sweep_levels)
    if (l < 0) throw ValidationError("sweep.levels", "levels must be >= 0");
  for (int h : cfg.sweep_horizons)
    if (h < 1) throw ValidationError("sweep.horizons", "horizons must be >= 1");

  // Capability checks the config can already see.
  if (cfg.scheme == SchemeId::W && cfg.state_dim() != 1)
    throw ValidationError("scheme",
                          "W requires a 1-D state space, model has dim " +
                              std::to_string(cfg.state_dim()));
  if (cfg.scheme == SchemeId::MC && cfg.model == "diffusion")
    throw ValidationError(
        "scheme", "MC requires kernel density views; model 'diffusion' has none");
}

}  // namespace

int RunConfig::state_dim() const {
  return model == "diffusion" ? diffusion_dim : 1;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool seed_set = false, particles_set = false, model_set = false,
       scheme_set = false;

  std::stringstream ss(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(ss, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");

    if (key == "model") {
      cfg.model = value;
      model_set = true;
    } else if (key == "model.path") {
      cfg.model_path = value;
    } else if (key == "scheme") {
      const auto s = scheme_from_string(value);
      if (!s) throw ParseError(line_no, "unknown scheme '" + value + "'");
      cfg.scheme = *s;
      scheme_set = true;
    } else if (key == "level") {
      cfg.level = static_cast<int>(parse_long(value, line_no));
    } else if (key == "horizon") {
      cfg.horizon = static_cast<int>(parse_long(value, line_no));
    } else if (key == "particles") {
      cfg.particles = parse_long(value, line_no);
      particles_set = true;
    } else if (key == "replicates") {
      cfg.replicates = static_cast<int>(parse_long(value, line_no));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, line_no);
      seed_set = true;
    } else if (key == "phi") {
      cfg.phi = value;
    } else if (key == "phi.param") {
      cfg.phi_param = parse_double(value, line_no);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "ou.x_star") {
      cfg.ou_x_star = parse_double(value, line_no);
    } else if (key == "ou.a") {
      cfg.ou_a = parse_double(value, line_no);
    } else if (key == "ou.b") {
      cfg.ou_b = parse_double(value, line_no);
    } else if (key == "diffusion.dim") {
      cfg.diffusion_dim = static_cast<int>(parse_long(value, line_no));
    } else if (key == "diffusion.drift_scale") {
      cfg.diffusion_drift_scale = parse_double(value, line_no);
    } else if (key == "diffusion.noise") {
      cfg.diffusion_noise = parse_double(value, line_no);
    } else if (key == "diffusion.x_star") {
      cfg.diffusion_x_star = parse_double(value, line_no);
    } else if (key == "obs.source") {
      cfg.obs_source = value;
    } else if (key == "obs.path") {
      cfg.obs_path = value;
    } else if (key == "obs.seed") {
      cfg.obs_seed = parse_u64(value, line_no);
    } else if (key == "mlmc.epsilon") {
      cfg.mlmc_epsilon = parse_double(value, line_no);
    } else if (key == "mlmc.constant") {
      cfg.mlmc_constant = parse_double(value, line_no);
    } else if (key == "mlmc.levels") {
      cfg.mlmc_levels = static_cast<int>(parse_long(value, line_no));
    } else if (key == "sweep.levels") {
      cfg.sweep_levels = parse_int_list(value, line_no);
    } else if (key == "sweep.horizons") {
      cfg.sweep_horizons = parse_int_list(value, line_no);
    } else if (key == "max_rejection_iterations") {
      cfg.max_rejection_iterations = parse_long(value, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  validate(cfg, seed_set, particles_set, model_set, scheme_set);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace csmc
