#include "afnlab/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace afn {

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  f >> j;
  ExperimentConfig cfg;
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.b = j.value("b", cfg.b);
  if (j.contains("caps")) {
    const auto& c = j["caps"];
    cfg.caps.depth_n = c.value("depth_n", cfg.caps.depth_n);
    cfg.caps.depth_k = c.value("depth_k", cfg.caps.depth_k);
    cfg.caps.phi_cap = c.value("phi_cap", cfg.caps.phi_cap);
    cfg.caps.j_max = c.value("j_max", cfg.caps.j_max);
    cfg.caps.n_max = c.value("n_max", cfg.caps.n_max);
    cfg.caps.grid_cells = c.value("grid_cells", cfg.caps.grid_cells);
  }
  if (j.contains("norm")) {
    const auto& n = j["norm"];
    cfg.epsilon = n.value("epsilon", cfg.epsilon);
    cfg.theta = n.value("theta", cfg.theta);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.outputs = j.value("outputs", cfg.outputs);
  if (j.contains("observables"))
    cfg.observables = j["observables"].get<std::vector<std::string>>();
  cfg.mc_samples = j.value("mc_samples", cfg.mc_samples);
  cfg.burn_in = j.value("burn_in", cfg.burn_in);
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.alpha > 0)) throw std::invalid_argument("config: alpha must be > 0");
  if (!(cfg.b > 0 && cfg.b <= 1)) throw std::invalid_argument("config: b in (0,1]");
  if (cfg.caps.depth_n < 16 || cfg.caps.depth_k < 1 || cfg.caps.phi_cap < 4 ||
      cfg.caps.j_max < 1 || cfg.caps.n_max < 1 || cfg.caps.grid_cells < 16)
    throw std::invalid_argument("config: all caps must be positive and sane");
  if (!(cfg.epsilon > 0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (cfg.observables.size() < 2)
    throw std::invalid_argument("config: two observables required");
}

} // namespace afn
