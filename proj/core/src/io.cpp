#include "stagenet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stagenet {

using nlohmann::json;

namespace {

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string transition_label(int tr) {
  return std::to_string(tr + 1) + "->" + std::to_string(tr + 2);
}

json target_json(const Dims& dims, int cell) {
  const TargetId t = target_from_cell(dims, cell);
  return json{{"gene", t.gene + 1}, {"region", t.region + 1}};
}

json edges_json(const RegulatoryModel& model,
                const std::vector<std::vector<double>>* support) {
  const Dims& dims = model.dims();
  json transitions = json::array();
  for (int tr = 0; tr < model.transitions(); ++tr) {
    json edges = json::array();
    for (int cell = 0; cell < model.cells(); ++cell) {
      const int src = model.source(tr, cell);
      if (src == RegulatoryModel::kNotRegulated) continue;
      json e{{"target", target_json(dims, cell)},
             {"source", target_json(dims, src)}};
      e["support"] = support ? (*support)[tr][cell] : 1.0;
      edges.push_back(std::move(e));
    }
    transitions.push_back(json{{"from", tr + 1}, {"to", tr + 2},
                               {"edges", std::move(edges)}});
  }
  return transitions;
}

json meta_json(const MetaMap& meta) {
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

json params_json(const GlobalParams& p) {
  return json{{"mu", p.mu},
              {"sigma1_sq", p.sigma1_sq},
              {"mu2", p.mu2},
              {"sigma2_sq", p.sigma2_sq}};
}

json dims_json(const Dims& dims) {
  return json{{"genes", dims.genes},
              {"regions", dims.regions},
              {"stages", dims.stages}};
}

json metrics_row_json(const TransitionMetrics& m) {
  json row{{"true_edges", m.true_edges},
           {"detected", m.detected},
           {"correct", m.correct},
           {"defined", m.defined}};
  if (m.defined) {
    row["detection"] = m.detection;
    row["recall"] = m.recall;
    row["error"] = m.error;
    row["precision"] = m.precision;
    row["f1"] = m.f1;
  }
  return row;
}

}  // namespace

std::string format_edge(TargetId target, TargetId source, double support) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d,%d - %d,%d (%.2f%%)", target.gene + 1,
                target.region + 1, source.gene + 1, source.region + 1,
                support * 100.0);
  return buf;
}

std::string format_number4(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string dataset_to_csv(const ExpressionDataset& data) {
  std::ostringstream out;
  out << "person_id,death_stage,gene,region,stage,value,observed\n";
  const int cells = data.dims.cells();
  for (const Person& p : data.persons) {
    for (int s = 0; s < p.death_stage; ++s) {
      for (int cell = 0; cell < cells; ++cell) {
        const TargetId t = target_from_cell(data.dims, cell);
        const bool obs = p.observed[static_cast<std::size_t>(s) * cells + cell];
        out << p.id << ',' << p.death_stage << ',' << (t.gene + 1) << ','
            << (t.region + 1) << ',' << (s + 1) << ','
            << fmt_value(p.values[static_cast<std::size_t>(s) * cells + cell])
            << ',' << (obs ? 1 : 0) << '\n';
      }
    }
  }
  return out.str();
}

void write_dataset(const ExpressionDataset& data, const std::string& path) {
  write_text_file(path, dataset_to_csv(data));
}

ExpressionDataset dataset_from_csv(const std::string& text,
                                   const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw DataError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "person_id,death_stage,gene,region,stage,value,observed") {
    fail("bad header, expected person_id,death_stage,gene,region,stage,value,observed");
  }

  struct Row {
    int person, death, gene, region, stage, observed;
    double value;
    bool has_value;
    int lineno;
  };
  std::vector<Row> rows;
  int max_gene = 0, max_region = 0, max_death = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 7) fail("expected 7 comma-separated fields");
    Row r{};
    r.lineno = lineno;
    try {
      r.person = std::stoi(fields[0]);
      r.death = std::stoi(fields[1]);
      r.gene = std::stoi(fields[2]);
      r.region = std::stoi(fields[3]);
      r.stage = std::stoi(fields[4]);
      r.has_value = !fields[5].empty();
      r.value = r.has_value ? std::stod(fields[5]) : 0.0;
      r.observed = std::stoi(fields[6]);
    } catch (const std::exception&) {
      fail("malformed field");
    }
    if (r.gene < 1 || r.region < 1 || r.stage < 1 || r.death < 1) {
      fail("indices must be 1-based positive");
    }
    if (r.stage > r.death) {
      fail("stage " + std::to_string(r.stage) + " exceeds death stage " +
           std::to_string(r.death) + " (data not produced)");
    }
    if (r.observed != 0 && r.observed != 1) fail("observed must be 0 or 1");
    if (r.observed == 1 && !r.has_value) fail("observed row with missing value");
    max_gene = std::max(max_gene, r.gene);
    max_region = std::max(max_region, r.region);
    max_death = std::max(max_death, r.death);
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");

  ExpressionDataset ds;
  ds.dims.genes = max_gene;
  ds.dims.regions = max_region;
  ds.dims.stages = std::max(max_death, 2);
  const int cells = ds.dims.cells();

  std::map<int, int> person_index;  // id -> index in ds.persons
  std::map<std::tuple<int, int, int, int>, int> seen;  // key -> line
  for (const Row& r : rows) {
    lineno = r.lineno;
    auto it = person_index.find(r.person);
    if (it == person_index.end()) {
      Person p;
      p.id = r.person;
      p.death_stage = r.death;
      p.values.assign(static_cast<std::size_t>(r.death) * cells, 0.0);
      p.observed.assign(p.values.size(), 0);
      person_index[r.person] = static_cast<int>(ds.persons.size());
      ds.persons.push_back(std::move(p));
      it = person_index.find(r.person);
    }
    Person& p = ds.persons[it->second];
    if (p.death_stage != r.death) {
      fail("person " + std::to_string(r.person) + " has conflicting death stages");
    }
    const auto key = std::make_tuple(r.person, r.gene, r.region, r.stage);
    const auto [sit, inserted] = seen.emplace(key, r.lineno);
    if (!inserted) {
      fail("duplicate entry for person " + std::to_string(r.person) + " gene " +
           std::to_string(r.gene) + " region " + std::to_string(r.region) +
           " stage " + std::to_string(r.stage) + " (first at line " +
           std::to_string(sit->second) + ")");
    }
    const std::size_t k =
        static_cast<std::size_t>(r.stage - 1) * cells +
        (r.gene - 1) * ds.dims.regions + (r.region - 1);
    p.values[k] = r.value;
    p.observed[k] = static_cast<std::uint8_t>(r.observed);
  }
  ds.sort_persons_by_id();
  ds.finalize();
  return ds;
}

ExpressionDataset load_dataset(const std::string& path) {
  return dataset_from_csv(read_text_file(path), path);
}

std::string network_to_json(const RegulatoryModel& model,
                            const std::vector<std::vector<double>>* support,
                            const GlobalParams* params, const MetaMap& meta) {
  json doc;
  json m = meta_json(meta);
  m.update(dims_json(model.dims()));
  doc["meta"] = std::move(m);
  doc["transitions"] = edges_json(model, support);
  doc["params"] = params ? params_json(*params) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::string network_to_tsv(const RegulatoryModel& model,
                           const std::vector<std::vector<double>>* support) {
  std::ostringstream out;
  out << "transition\tdetected_regulatory_relationships\n";
  const Dims& dims = model.dims();
  for (int tr = 0; tr < model.transitions(); ++tr) {
    out << transition_label(tr);
    for (int cell = 0; cell < model.cells(); ++cell) {
      const int src = model.source(tr, cell);
      if (src == RegulatoryModel::kNotRegulated) continue;
      out << '\t'
          << format_edge(target_from_cell(dims, cell), target_from_cell(dims, src),
                         support ? (*support)[tr][cell] : 1.0);
    }
    out << '\n';
  }
  return out.str();
}

RegulatoryModel network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("network JSON parse error: ") + e.what());
  }
  try {
    Dims dims;
    dims.genes = doc.at("meta").at("genes").get<int>();
    dims.regions = doc.at("meta").at("regions").get<int>();
    dims.stages = doc.at("meta").at("stages").get<int>();
    dims.persons_per_stage.assign(dims.stages, 0);
    RegulatoryModel model(dims);
    for (const auto& tr_doc : doc.at("transitions")) {
      const int tr = tr_doc.at("from").get<int>() - 1;
      if (tr < 0 || tr >= dims.transitions()) {
        throw DataError("network JSON: transition out of range");
      }
      for (const auto& e : tr_doc.at("edges")) {
        const TargetId target{e.at("target").at("gene").get<int>() - 1,
                              e.at("target").at("region").get<int>() - 1};
        const TargetId source{e.at("source").at("gene").get<int>() - 1,
                              e.at("source").at("region").get<int>() - 1};
        model.set_source(tr, cell_index(dims, target), cell_index(dims, source));
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("network JSON: ") + e.what());
  }
}

std::string summary_to_json(const ChainSummary& summary,
                            const NetworkEstimate& estimate, const MetaMap& meta) {
  const Dims& dims = summary.dims;
  json doc;
  json m = meta_json(meta);
  m.update(dims_json(dims));
  doc["meta"] = std::move(m);
  doc["transitions"] = edges_json(estimate.model, &estimate.support);
  // attach the full per-target frequency maps
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    json freqs = json::array();
    for (int cell = 0; cell < dims.cells(); ++cell) {
      json configs = json::array();
      for (const auto& [key, f] : summary.config_freq[tr][cell]) {
        json c;
        c["source"] = key < 0 ? json(nullptr) : target_json(dims, key);
        c["frequency"] = f;
        configs.push_back(std::move(c));
      }
      freqs.push_back(json{{"target", target_json(dims, cell)},
                           {"configurations", std::move(configs)}});
    }
    doc["transitions"][tr]["frequencies"] = std::move(freqs);
  }
  GlobalParams p;
  p.mu = summary.mu_mean;
  p.sigma1_sq = summary.sigma1_sq_mean;
  p.mu2 = summary.mu2_mean;
  p.sigma2_sq = summary.sigma2_sq_mean;
  doc["params"] = params_json(p);
  doc["diagnostics"] = json{{"retained", summary.retained},
                            {"model_accept_rate", summary.model_accept_rate},
                            {"coeff_accept_a", summary.coeff_accept_a},
                            {"coeff_accept_b", summary.coeff_accept_b}};
  return doc.dump(2) + "\n";
}

std::string metrics_to_json(const MetricsReport& report, const MetaMap& meta) {
  json doc;
  doc["meta"] = meta_json(meta);
  json rows = json::array();
  for (std::size_t tr = 0; tr < report.per_transition.size(); ++tr) {
    json row = metrics_row_json(report.per_transition[tr]);
    row["transition"] = transition_label(static_cast<int>(tr));
    rows.push_back(std::move(row));
  }
  json total = metrics_row_json(report.total);
  total["transition"] = "total";
  rows.push_back(std::move(total));
  doc["metrics"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string metrics_to_tsv(const MetricsReport& report) {
  std::ostringstream out;
  out << "transition\tdetection\trecall\terror\tprecision\tf1\n";
  auto row = [&](const std::string& label, const TransitionMetrics& m) {
    out << label;
    if (m.defined) {
      out << '\t' << format_number4(m.detection) << '\t'
          << format_number4(m.recall) << '\t' << format_number4(m.error) << '\t'
          << format_number4(m.precision) << '\t' << format_number4(m.f1);
    } else {
      for (int i = 0; i < 5; ++i) out << "\tundefined";
    }
    out << '\n';
  };
  for (std::size_t tr = 0; tr < report.per_transition.size(); ++tr) {
    row(transition_label(static_cast<int>(tr)), report.per_transition[tr]);
  }
  row("total", report.total);
  return out.str();
}

namespace {

json index_stats_json(const IndexStats& s) {
  return json{{"mean", s.mean}, {"var", s.var}, {"replicates", s.n}};
}

std::string index_stats_tsv(const IndexStats& s) {
  if (s.n == 0) return "undefined";
  return format_number4(s.mean) + " (" + format_number4(s.var) + ")";
}

}  // namespace

std::string benchmark_to_json(const BenchmarkReport& report, const MetaMap& meta) {
  json doc;
  json m = meta_json(meta);
  m.update(dims_json(report.dims));
  doc["meta"] = std::move(m);
  json methods = json::array();
  for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
    json rows = json::array();
    const int trs = report.dims.transitions();
    for (int row = 0; row <= trs; ++row) {
      const BenchCell& cell = report.table[mi][row];
      rows.push_back(json{
          {"transition", row < trs ? transition_label(row) : "total"},
          {"detection", index_stats_json(cell.detection)},
          {"recall", index_stats_json(cell.recall)},
          {"error", index_stats_json(cell.error)},
          {"f1", index_stats_json(cell.f1)}});
    }
    methods.push_back(json{{"name", method_name(report.methods[mi])},
                           {"rows", std::move(rows)}});
  }
  doc["methods"] = std::move(methods);
  return doc.dump(2) + "\n";
}

std::string benchmark_to_tsv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "index\ttransition";
  for (Method m : report.methods) out << '\t' << method_name(m);
  out << '\n';
  const int trs = report.dims.transitions();
  const char* index_names[4] = {"Detection", "Recall", "Error", "F1"};
  for (int row = 0; row <= trs; ++row) {
    const std::string label = row < trs ? transition_label(row) : "total";
    for (int idx = 0; idx < 4; ++idx) {
      out << index_names[idx] << '\t' << label;
      for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
        const BenchCell& cell = report.table[mi][row];
        const IndexStats& s = idx == 0   ? cell.detection
                              : idx == 1 ? cell.recall
                              : idx == 2 ? cell.error
                                         : cell.f1;
        out << '\t' << index_stats_tsv(s);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string subsample_to_json(const SubsampleReport& report, const Dims& dims,
                              const MetaMap& meta) {
  json doc;
  json m = meta_json(meta);
  m.update(dims_json(dims));
  doc["meta"] = std::move(m);
  doc["gene_weights"] = report.gene_weights;
  doc["region_weights"] = report.region_weights;
  json runs = json::array();
  for (std::size_t run = 0; run < report.run_genes.size(); ++run) {
    json genes = json::array(), regions = json::array();
    for (int g : report.run_genes[run]) genes.push_back(g + 1);
    for (int r : report.run_regions[run]) regions.push_back(r + 1);
    runs.push_back(json{{"run", run + 1}, {"genes", std::move(genes)},
                        {"regions", std::move(regions)}});
  }
  doc["runs"] = std::move(runs);
  json edges = json::array();
  for (const SubsampleEdge& e : report.edges) {
    edges.push_back(json{
        {"run", e.run},
        {"from", e.transition + 1},
        {"to", e.transition + 2},
        {"target", json{{"gene", e.target.gene + 1}, {"region", e.target.region + 1}}},
        {"source", json{{"gene", e.source.gene + 1}, {"region", e.source.region + 1}}},
        {"support", e.support}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

std::string subsample_to_tsv(const SubsampleReport& report, const Dims& dims) {
  std::ostringstream out;
  out << "transition\tedge\trun\n";
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    for (const SubsampleEdge& e : report.edges) {
      if (e.transition != tr) continue;
      out << transition_label(tr) << '\t'
          << format_edge(e.target, e.source, e.support) << '\t' << e.run << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace stagenet
