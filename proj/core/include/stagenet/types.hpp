#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagenet {

// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerically degenerate computation (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem dimensions. Genes, regions and stages are 0-based internally;
// file formats and report strings use 1-based indices.
struct Dims {
  int stages = 0;   // T >= 2
  int genes = 0;    // G >= 1
  int regions = 0;  // R >= 1
  std::vector<int> persons_per_stage;  // n_t, length T

  int cells() const { return genes * regions; }
  int transitions() const { return stages - 1; }
  int total_persons() const;
  void validate() const;
};

struct TargetId {
  int gene = 0;
  int region = 0;
  bool operator==(const TargetId&) const = default;
};

inline int cell_index(const Dims& dims, TargetId t) {
  return t.gene * dims.regions + t.region;
}
inline TargetId target_from_cell(const Dims& dims, int cell) {
  return TargetId{cell / dims.regions, cell % dims.regions};
}

struct RegulatorAssignment {
  bool regulated = false;
  TargetId source{};  // meaningful only when regulated

  static RegulatorAssignment not_regulated() { return {}; }
  static RegulatorAssignment regulated_by(TargetId s) { return {true, s}; }
};

// Per stage transition, each (gene, region) target is either not regulated
// or regulated by exactly one source cell. The representation enforces the
// exactly-one constraint; admissibility (no self-regulation) is checked by
// validate_model and by all generators.
class RegulatoryModel {
 public:
  static constexpr int kNotRegulated = -1;

  RegulatoryModel() = default;
  explicit RegulatoryModel(const Dims& dims);

  int source(int transition, int cell) const {
    return source_[check(transition)][cell];
  }
  void set_source(int transition, int cell, int source_cell);
  void clear(int transition, int cell) {
    set_source(transition, cell, kNotRegulated);
  }
  bool is_regulated(int transition, int cell) const {
    return source(transition, cell) != kNotRegulated;
  }
  RegulatorAssignment assignment(int transition, TargetId target) const;
  void assign(int transition, TargetId target, RegulatorAssignment a);

  int regulation_count(int transition) const;
  int total_regulations() const;

  int transitions() const { return static_cast<int>(source_.size()); }
  int cells() const { return cells_; }
  const Dims& dims() const { return dims_; }

  bool operator==(const RegulatoryModel& other) const {
    return source_ == other.source_;
  }

 private:
  int check(int transition) const {
    if (transition < 0 || transition >= transitions()) {
      throw std::out_of_range("RegulatoryModel: transition out of range");
    }
    return transition;
  }
  Dims dims_{};
  int cells_ = 0;
  std::vector<std::vector<int>> source_;  // [transition][cell]
};

struct Coef {
  double a = 0.0;  // intercept
  double b = 0.0;  // slope on the source's previous-stage value
};

// Intercept/slope pairs, defined exactly for the regulated entries of the
// associated RegulatoryModel.
class RegulationCoefficients {
 public:
  RegulationCoefficients() = default;
  explicit RegulationCoefficients(const Dims& dims);

  bool has(int transition, int cell) const { return has_[transition][cell]; }
  const Coef& at(int transition, int cell) const;
  void set(int transition, int cell, Coef c);
  void erase(int transition, int cell);

  int count() const;
  // Empty when the coefficient domain equals the model's regulated set.
  std::vector<std::string> domain_mismatches(const RegulatoryModel& model) const;

 private:
  std::vector<std::vector<Coef>> coef_;
  std::vector<std::vector<char>> has_;
};

struct GlobalParams {
  std::vector<double> mu;  // stage-1 means, one per cell
  double sigma1_sq = 1.0;
  double mu2 = 0.0;
  double sigma2_sq = 1.0;

  void validate(const Dims& dims) const;
};

// Hyperparameters of all prior distributions. Defaults follow the reference
// configuration: c = 5, d = 0.5, c2 = 0, d2 = 0.5, p = 3, q = 2,
// alpha = (1, 1), V = identity, v = 2, lambda = 0.05.
struct PriorConfig {
  std::vector<double> c;  // stage-1 mean prior locations, one per cell
  std::vector<double> d;  // stage-1 mean prior variances, one per cell
  double c2 = 0.0;
  double d2 = 0.5;
  double p1 = 3.0, q1 = 2.0;  // sigma1^2 ~ IG(p1, q1)
  double p2 = 3.0, q2 = 2.0;  // sigma2^2 ~ IG(p2, q2)
  double alpha_a = 1.0, alpha_b = 1.0;
  double v_a = 1.0, v_b = 1.0;  // V diagonal entries; slope variance is v^2/v_b
  double v = 2.0;
  double lambda = 0.05;

  static PriorConfig defaults(const Dims& dims);
  void validate(const Dims& dims) const;
  double slope_prior_scale() const { return v * v / v_b; }
};

// Per-model-class probabilities of proposing Add/Delete/Swap.
struct OperationMatrix {
  enum Row { kNoRelationship = 0, kAllRegulated = 1, kOtherCase = 2 };
  enum Col { kAdd = 0, kDelete = 1, kSwap = 2 };

  double p[3][3] = {{1.0, 0.0, 0.0}, {0.0, 0.8, 0.2}, {0.3, 0.4, 0.3}};

  void validate() const;
};

// One person's expression block: layers for stages 1..death_stage, each of
// dims.cells() values. The observation mask is true exactly at the death
// stage for simulated data; real data may have unobserved entries there too.
struct Person {
  int id = 0;
  int death_stage = 1;  // 1-based, layers exist for stages 1..death_stage
  std::vector<double> values;     // [stage0 * cells + cell]
  std::vector<std::uint8_t> observed;

  double value(int stage0, int cell, int cells) const {
    return values[static_cast<std::size_t>(stage0) * cells + cell];
  }
};

struct ExpressionDataset {
  Dims dims;
  std::vector<Person> persons;

  double value(int person, int stage0, int cell) const {
    return persons[person].values[index(person, stage0, cell)];
  }
  void set_value(int person, int stage0, int cell, double v) {
    persons[person].values[index(person, stage0, cell)] = v;
  }
  bool observed(int person, int stage0, int cell) const {
    return persons[person].observed[index(person, stage0, cell)] != 0;
  }

  // Validates structural invariants and recomputes dims.persons_per_stage.
  void finalize();
  void sort_persons_by_id();

 private:
  std::size_t index(int person, int stage0, int cell) const {
    return static_cast<std::size_t>(stage0) * dims.cells() + cell;
  }
};

}  // namespace stagenet
