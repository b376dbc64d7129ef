#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace afn {

struct ExperimentCaps {
  long long depth_n = 20000;
  int depth_k = 48;
  long long phi_cap = 2048;
  long long j_max = 64;
  long long n_max = 512;
  long long grid_cells = 8192;
};

struct ExperimentConfig {
  double alpha = 0.5;
  double b = 1.0;
  ExperimentCaps caps;
  double epsilon = 0.1;
  double theta = 0.0;  // 0 = take it from the certificate
  std::uint64_t seed = 1;
  std::string outputs = "out";
  std::vector<std::string> observables = {"tentY", "tentY"};
  long long mc_samples = 10000000;
  long long burn_in = 10000;
};

ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);  // throws std::invalid_argument

} // namespace afn
