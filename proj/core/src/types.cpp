#include "stagenet/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stagenet {

int Dims::total_persons() const {
  return std::accumulate(persons_per_stage.begin(), persons_per_stage.end(), 0);
}

void Dims::validate() const {
  if (stages < 2) throw DataError("Dims: need at least two stages");
  if (genes < 1 || regions < 1) throw DataError("Dims: need genes, regions >= 1");
  if (static_cast<int>(persons_per_stage.size()) != stages) {
    throw DataError("Dims: persons_per_stage length must equal stage count");
  }
  for (int n : persons_per_stage) {
    if (n < 0) throw DataError("Dims: negative person count");
  }
  if (total_persons() < 1) throw DataError("Dims: no persons");
}

RegulatoryModel::RegulatoryModel(const Dims& dims)
    : dims_(dims),
      cells_(dims.cells()),
      source_(dims.transitions(), std::vector<int>(dims.cells(), kNotRegulated)) {}

void RegulatoryModel::set_source(int transition, int cell, int source_cell) {
  auto& row = source_[check(transition)];
  if (cell < 0 || cell >= cells_) {
    throw std::out_of_range("RegulatoryModel: cell out of range");
  }
  if (source_cell != kNotRegulated && (source_cell < 0 || source_cell >= cells_)) {
    throw std::out_of_range("RegulatoryModel: source cell out of range");
  }
  row[cell] = source_cell;
}

RegulatorAssignment RegulatoryModel::assignment(int transition,
                                                TargetId target) const {
  const int s = source(transition, cell_index(dims_, target));
  if (s == kNotRegulated) return RegulatorAssignment::not_regulated();
  return RegulatorAssignment::regulated_by(target_from_cell(dims_, s));
}

void RegulatoryModel::assign(int transition, TargetId target,
                             RegulatorAssignment a) {
  set_source(transition, cell_index(dims_, target),
             a.regulated ? cell_index(dims_, a.source) : kNotRegulated);
}

int RegulatoryModel::regulation_count(int transition) const {
  const auto& row = source_[check(transition)];
  return static_cast<int>(
      std::count_if(row.begin(), row.end(), [](int s) { return s >= 0; }));
}

int RegulatoryModel::total_regulations() const {
  int total = 0;
  for (int tr = 0; tr < transitions(); ++tr) total += regulation_count(tr);
  return total;
}

RegulationCoefficients::RegulationCoefficients(const Dims& dims)
    : coef_(dims.transitions(), std::vector<Coef>(dims.cells())),
      has_(dims.transitions(), std::vector<char>(dims.cells(), 0)) {}

const Coef& RegulationCoefficients::at(int transition, int cell) const {
  if (!has_[transition][cell]) {
    throw std::out_of_range("RegulationCoefficients: no coefficients for entry");
  }
  return coef_[transition][cell];
}

void RegulationCoefficients::set(int transition, int cell, Coef c) {
  coef_[transition][cell] = c;
  has_[transition][cell] = 1;
}

void RegulationCoefficients::erase(int transition, int cell) {
  has_[transition][cell] = 0;
}

int RegulationCoefficients::count() const {
  int total = 0;
  for (const auto& row : has_) {
    total += static_cast<int>(std::count(row.begin(), row.end(), 1));
  }
  return total;
}

std::vector<std::string> RegulationCoefficients::domain_mismatches(
    const RegulatoryModel& model) const {
  std::vector<std::string> out;
  for (int tr = 0; tr < model.transitions(); ++tr) {
    for (int c = 0; c < model.cells(); ++c) {
      const bool reg = model.is_regulated(tr, c);
      const bool have = has_[tr][c] != 0;
      if (reg != have) {
        out.push_back("transition " + std::to_string(tr + 2) + " cell " +
                      std::to_string(c) +
                      (reg ? ": regulated but no coefficients"
                           : ": coefficients without regulation"));
      }
    }
  }
  return out;
}

void GlobalParams::validate(const Dims& dims) const {
  if (static_cast<int>(mu.size()) != dims.cells()) {
    throw DataError("GlobalParams: mu size mismatch");
  }
  if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) {
    throw DataError("GlobalParams: variances must be positive");
  }
}

PriorConfig PriorConfig::defaults(const Dims& dims) {
  PriorConfig p;
  p.c.assign(dims.cells(), 5.0);
  p.d.assign(dims.cells(), 0.5);
  return p;
}

void PriorConfig::validate(const Dims& dims) const {
  const auto cells = static_cast<std::size_t>(dims.cells());
  if (c.size() != cells || d.size() != cells) {
    throw DataError("PriorConfig: c/d size mismatch");
  }
  for (double x : d) {
    if (!(x > 0.0)) throw DataError("PriorConfig: d entries must be positive");
  }
  if (!(d2 > 0.0) || !(q1 > 0.0) || !(q2 > 0.0) || !(p1 > 0.0) || !(p2 > 0.0)) {
    throw DataError("PriorConfig: variance hyperparameters must be positive");
  }
  if (!(v_a > 0.0) || !(v_b > 0.0) || !(v > 0.0) || !(lambda > 0.0)) {
    throw DataError("PriorConfig: coefficient hyperparameters must be positive");
  }
}

void OperationMatrix::validate() const {
  for (int r = 0; r < 3; ++r) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      if (p[r][c] < 0.0) throw DataError("OperationMatrix: negative probability");
      sum += p[r][c];
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw DataError("OperationMatrix: row must sum to 1");
    }
  }
  if (p[kNoRelationship][kDelete] != 0.0 || p[kNoRelationship][kSwap] != 0.0) {
    throw DataError("OperationMatrix: empty model only admits Add");
  }
  if (p[kAllRegulated][kAdd] != 0.0) {
    throw DataError("OperationMatrix: fully regulated model cannot Add");
  }
}

void ExpressionDataset::finalize() {
  if (dims.stages < 2 || dims.genes < 1 || dims.regions < 1) {
    throw DataError("ExpressionDataset: bad dimensions");
  }
  dims.persons_per_stage.assign(dims.stages, 0);
  const auto layer = static_cast<std::size_t>(dims.cells());
  for (const auto& p : persons) {
    if (p.death_stage < 1 || p.death_stage > dims.stages) {
      throw DataError("ExpressionDataset: person " + std::to_string(p.id) +
                      " has death stage out of range");
    }
    const auto expect = layer * static_cast<std::size_t>(p.death_stage);
    if (p.values.size() != expect || p.observed.size() != expect) {
      throw DataError("ExpressionDataset: person " + std::to_string(p.id) +
                      " has wrong value block size");
    }
    dims.persons_per_stage[p.death_stage - 1] += 1;
  }
  dims.validate();
}

void ExpressionDataset::sort_persons_by_id() {
  std::sort(persons.begin(), persons.end(),
            [](const Person& a, const Person& b) { return a.id < b.id; });
}

}  // namespace stagenet
