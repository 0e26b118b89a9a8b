#pragma once

#include <map>
#include <string>
#include <vector>

#include "stagenet/bench.hpp"
#include "stagenet/chain.hpp"
#include "stagenet/metrics.hpp"
#include "stagenet/subsample.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

// Long-form CSV, one row per produced cell:
//   person_id,death_stage,gene,region,stage,value,observed
// Indices are 1-based; `value` may be empty only when observed = 0.
void write_dataset(const ExpressionDataset& data, const std::string& path);
std::string dataset_to_csv(const ExpressionDataset& data);
ExpressionDataset load_dataset(const std::string& path);
ExpressionDataset dataset_from_csv(const std::string& text,
                                   const std::string& origin = "<string>");

// "3,2 - 5,2 (21.50%)": target gene,region - source gene,region (support).
std::string format_edge(TargetId target, TargetId source, double support);

// Numbers in report tables: up to four decimals, trailing zeros trimmed.
std::string format_number4(double x);

using MetaMap = std::map<std::string, std::string>;

std::string network_to_json(const RegulatoryModel& model,
                            const std::vector<std::vector<double>>* support,
                            const GlobalParams* params, const MetaMap& meta);
std::string network_to_tsv(const RegulatoryModel& model,
                           const std::vector<std::vector<double>>* support);
RegulatoryModel network_from_json(const std::string& text);

// Full inference output: detected edges plus per-target configuration
// frequency maps and posterior parameter means.
std::string summary_to_json(const ChainSummary& summary,
                            const NetworkEstimate& estimate, const MetaMap& meta);

std::string metrics_to_json(const MetricsReport& report, const MetaMap& meta);
std::string metrics_to_tsv(const MetricsReport& report);

std::string benchmark_to_json(const BenchmarkReport& report, const MetaMap& meta);
std::string benchmark_to_tsv(const BenchmarkReport& report);

std::string subsample_to_json(const SubsampleReport& report, const Dims& dims,
                              const MetaMap& meta);
std::string subsample_to_tsv(const SubsampleReport& report, const Dims& dims);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace stagenet
