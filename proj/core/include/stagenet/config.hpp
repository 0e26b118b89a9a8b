#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stagenet/chain.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

// Flat `key = value` configuration with `#` comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text,
                                     const std::string& origin = "<string>");

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  long get_long(const std::string& key, long def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct KeySpec {
  std::string key;
  std::string default_value;
  std::string description;
};

// All tunables behind the CLI: priors, sampler schedule, operation matrix,
// simulation/benchmark shape, subsampling. Every key here is also a CLI flag.
struct Settings {
  double prior_c = 5.0, prior_d = 0.5;
  double prior_c2 = 0.0, prior_d2 = 0.5;
  double prior_p1 = 3.0, prior_q1 = 2.0, prior_p2 = 3.0, prior_q2 = 2.0;
  double prior_alpha_a = 1.0, prior_alpha_b = 1.0;
  double prior_v_a = 1.0, prior_v_b = 1.0;
  double prior_v = 2.0, prior_lambda = 0.05;

  int mcmc_inner = 40;
  int mcmc_outer = 50;
  long mcmc_burn_in = 500;
  int mcmc_thinning = 1;
  double mcmc_step_a = 0.3, mcmc_step_b = 0.3;
  bool mcmc_adapt = true;
  std::string mcmc_coef_redraw = "posterior_fit";  // or "conditional_prior"

  double op[3][3] = {{1.0, 0.0, 0.0}, {0.0, 0.8, 0.2}, {0.3, 0.4, 0.3}};

  int sim_genes = 5, sim_regions = 5, sim_stages = 4, sim_persons = 20;
  double sim_density = 0.3;

  int bench_replicates = 10;
  double min_support = 0.15;
  int rf_trees = 100, rf_max_iters = 10;

  int sub_genes = 15, sub_regions = 5, sub_runs = 10;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "json";

  static const std::vector<KeySpec>& keys();
  void apply(const KeyValueConfig& config);

  Dims make_dims() const;
  PriorConfig make_prior(const Dims& dims) const;
  McmcConfig make_mcmc() const;
};

}  // namespace stagenet
