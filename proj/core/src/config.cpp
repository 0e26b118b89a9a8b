#include "stagenet/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace stagenet {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text,
                                            const std::string& origin) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(origin + ":" + std::to_string(lineno) +
                      ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    config.entries_[key] = value;
  }
  return config;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& def) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? def : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double def) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw DataError("config key `" + key + "`: not a number: " + it->second);
  }
  return v;
}

int KeyValueConfig::get_int(const std::string& key, int def) const {
  return static_cast<int>(get_long(key, def));
}

long KeyValueConfig::get_long(const std::string& key, long def) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  char* end = nullptr;
  const long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw DataError("config key `" + key + "`: not an integer: " + it->second);
  }
  return v;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t def) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw DataError("config key `" + key + "`: not an integer: " + it->second);
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool def) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw DataError("config key `" + key + "`: not a boolean: " + v);
}

const std::vector<KeySpec>& Settings::keys() {
  static const std::vector<KeySpec> specs = {
      {"prior.c", "5", "stage-1 mean prior location"},
      {"prior.d", "0.5", "stage-1 mean prior variance"},
      {"prior.c2", "0", "increment mean prior location"},
      {"prior.d2", "0.5", "increment mean prior variance"},
      {"prior.p1", "3", "sigma1^2 inverse-gamma shape"},
      {"prior.q1", "2", "sigma1^2 inverse-gamma scale"},
      {"prior.p2", "3", "sigma2^2 inverse-gamma shape"},
      {"prior.q2", "2", "sigma2^2 inverse-gamma scale"},
      {"prior.alpha_a", "1", "intercept prior location"},
      {"prior.alpha_b", "1", "slope prior location"},
      {"prior.v_a", "1", "intercept prior scale entry"},
      {"prior.v_b", "1", "slope prior scale entry"},
      {"prior.v", "2", "coefficient sigma^2 shape parameter"},
      {"prior.lambda", "0.05", "coefficient sigma^2 scale parameter"},
      {"mcmc.inner_iterations", "40", "model moves per transition per sweep"},
      {"mcmc.outer_sweeps", "50", "outer sweeps"},
      {"mcmc.burn_in", "500", "burn-in (inner iterations per transition)"},
      {"mcmc.thinning", "1", "sample thinning"},
      {"mcmc.step_a", "0.3", "intercept random-walk step"},
      {"mcmc.step_b", "0.3", "slope random-walk step"},
      {"mcmc.adapt_steps", "true", "adapt steps during burn-in"},
      {"mcmc.coef_redraw", "posterior_fit",
       "coefficient redraw on structural moves (posterior_fit|conditional_prior)"},
      {"op.none.add", "1", "P(Add) with no regulations"},
      {"op.none.delete", "0", "P(Delete) with no regulations"},
      {"op.none.swap", "0", "P(Swap) with no regulations"},
      {"op.all.add", "0", "P(Add) when fully regulated"},
      {"op.all.delete", "0.8", "P(Delete) when fully regulated"},
      {"op.all.swap", "0.2", "P(Swap) when fully regulated"},
      {"op.other.add", "0.3", "P(Add) otherwise"},
      {"op.other.delete", "0.4", "P(Delete) otherwise"},
      {"op.other.swap", "0.3", "P(Swap) otherwise"},
      {"sim.genes", "5", "genes"},
      {"sim.regions", "5", "regions"},
      {"sim.stages", "4", "stages"},
      {"sim.persons_per_stage", "20", "persons observed at each stage"},
      {"sim.density", "0.3", "true-network regulation density"},
      {"bench.replicates", "10", "benchmark replicates"},
      {"bench.min_support", "0.15", "edge support threshold"},
      {"rf.trees", "100", "random-forest trees"},
      {"rf.max_iters", "10", "random-forest imputation iterations"},
      {"sub.genes", "15", "genes per subsampled run"},
      {"sub.regions", "5", "regions per subsampled run"},
      {"sub.runs", "10", "number of subsampled runs"},
      {"seed", "1", "random seed"},
      {"threads", "1", "worker threads for replicates/sub-runs"},
      {"format", "json", "output format (json|tsv)"},
  };
  return specs;
}

void Settings::apply(const KeyValueConfig& c) {
  prior_c = c.get_double("prior.c", prior_c);
  prior_d = c.get_double("prior.d", prior_d);
  prior_c2 = c.get_double("prior.c2", prior_c2);
  prior_d2 = c.get_double("prior.d2", prior_d2);
  prior_p1 = c.get_double("prior.p1", prior_p1);
  prior_q1 = c.get_double("prior.q1", prior_q1);
  prior_p2 = c.get_double("prior.p2", prior_p2);
  prior_q2 = c.get_double("prior.q2", prior_q2);
  prior_alpha_a = c.get_double("prior.alpha_a", prior_alpha_a);
  prior_alpha_b = c.get_double("prior.alpha_b", prior_alpha_b);
  prior_v_a = c.get_double("prior.v_a", prior_v_a);
  prior_v_b = c.get_double("prior.v_b", prior_v_b);
  prior_v = c.get_double("prior.v", prior_v);
  prior_lambda = c.get_double("prior.lambda", prior_lambda);
  mcmc_inner = c.get_int("mcmc.inner_iterations", mcmc_inner);
  mcmc_outer = c.get_int("mcmc.outer_sweeps", mcmc_outer);
  mcmc_burn_in = c.get_long("mcmc.burn_in", mcmc_burn_in);
  mcmc_thinning = c.get_int("mcmc.thinning", mcmc_thinning);
  mcmc_step_a = c.get_double("mcmc.step_a", mcmc_step_a);
  mcmc_step_b = c.get_double("mcmc.step_b", mcmc_step_b);
  mcmc_adapt = c.get_bool("mcmc.adapt_steps", mcmc_adapt);
  mcmc_coef_redraw = c.get_string("mcmc.coef_redraw", mcmc_coef_redraw);
  op[0][0] = c.get_double("op.none.add", op[0][0]);
  op[0][1] = c.get_double("op.none.delete", op[0][1]);
  op[0][2] = c.get_double("op.none.swap", op[0][2]);
  op[1][0] = c.get_double("op.all.add", op[1][0]);
  op[1][1] = c.get_double("op.all.delete", op[1][1]);
  op[1][2] = c.get_double("op.all.swap", op[1][2]);
  op[2][0] = c.get_double("op.other.add", op[2][0]);
  op[2][1] = c.get_double("op.other.delete", op[2][1]);
  op[2][2] = c.get_double("op.other.swap", op[2][2]);
  sim_genes = c.get_int("sim.genes", sim_genes);
  sim_regions = c.get_int("sim.regions", sim_regions);
  sim_stages = c.get_int("sim.stages", sim_stages);
  sim_persons = c.get_int("sim.persons_per_stage", sim_persons);
  sim_density = c.get_double("sim.density", sim_density);
  bench_replicates = c.get_int("bench.replicates", bench_replicates);
  min_support = c.get_double("bench.min_support", min_support);
  rf_trees = c.get_int("rf.trees", rf_trees);
  rf_max_iters = c.get_int("rf.max_iters", rf_max_iters);
  sub_genes = c.get_int("sub.genes", sub_genes);
  sub_regions = c.get_int("sub.regions", sub_regions);
  sub_runs = c.get_int("sub.runs", sub_runs);
  seed = c.get_u64("seed", seed);
  threads = c.get_int("threads", threads);
  format = c.get_string("format", format);
  if (format != "json" && format != "tsv") {
    throw DataError("format must be json or tsv");
  }
  if (mcmc_coef_redraw != "posterior_fit" &&
      mcmc_coef_redraw != "conditional_prior") {
    throw DataError("mcmc.coef_redraw must be posterior_fit or conditional_prior");
  }
}

Dims Settings::make_dims() const {
  Dims dims;
  dims.stages = sim_stages;
  dims.genes = sim_genes;
  dims.regions = sim_regions;
  dims.persons_per_stage.assign(sim_stages, sim_persons);
  dims.validate();
  return dims;
}

PriorConfig Settings::make_prior(const Dims& dims) const {
  PriorConfig p;
  p.c.assign(dims.cells(), prior_c);
  p.d.assign(dims.cells(), prior_d);
  p.c2 = prior_c2;
  p.d2 = prior_d2;
  p.p1 = prior_p1;
  p.q1 = prior_q1;
  p.p2 = prior_p2;
  p.q2 = prior_q2;
  p.alpha_a = prior_alpha_a;
  p.alpha_b = prior_alpha_b;
  p.v_a = prior_v_a;
  p.v_b = prior_v_b;
  p.v = prior_v;
  p.lambda = prior_lambda;
  p.validate(dims);
  return p;
}

McmcConfig Settings::make_mcmc() const {
  McmcConfig m;
  m.inner_iterations = mcmc_inner;
  m.outer_sweeps = mcmc_outer;
  m.burn_in = mcmc_burn_in;
  m.thinning = mcmc_thinning;
  m.seed = seed;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m.op_matrix.p[r][c] = op[r][c];
  }
  m.step_a = mcmc_step_a;
  m.step_b = mcmc_step_b;
  m.adapt_steps = mcmc_adapt;
  m.coef_redraw = mcmc_coef_redraw == "conditional_prior"
                      ? McmcConfig::CoefRedraw::kConditionalPrior
                      : McmcConfig::CoefRedraw::kPosteriorFit;
  m.validate();
  return m;
}

}  // namespace stagenet
