#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mics/anti_mics.hpp"
#include "mics/exec_model.hpp"
#include "mics/mc_model.hpp"
#include "mics/multi_mics.hpp"
#include "mics/simulator.hpp"
#include "mics/taskgen.hpp"
#include "mics/traces.hpp"

namespace mics {

using Json = nlohmann::ordered_json;

/// Output `sort_keys`-free and always with a trailing newline, so files
/// compare byte-for-byte across runs.
std::string dump_json(const Json& j);

Json distribution_json(const EmpiricalDistribution& dist);
Json levels_json(const WcetLevels& levels, const std::string& task_label);
Json anti_mics_json(const AntiMicsResult& result, const EmpiricalDistribution& dist);
Json design_report_json(const DesignReport& report);
Json sim_metrics_json(const SimMetrics& metrics);
Json sweep_json(const SweepResult& result);

Json regime_model_json(const RegimeModelSpec& spec);
RegimeModelSpec regime_model_from_json(const Json& j);

Json gen_spec_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const Json& j);

/// taskset-v1 plus the optional per-task `exec_model` object.
struct LoadedTaskSet {
  McTaskSet set;
  std::map<std::string, RegimeModelSpec> exec_models;
  std::vector<std::filesystem::path> trace_files;  // resolved, in task order
};

/// trace_path entries are resolved against `base_dir`. Tasks with a trace get
/// a distribution built against their wcet_hi; a missing p_ovrun is then
/// recomputed from it.
LoadedTaskSet taskset_from_json(const Json& j, const std::filesystem::path& base_dir);
LoadedTaskSet load_taskset(const std::filesystem::path& path);

/// `trace_paths` maps task id to the trace_path string to write.
Json taskset_json(const McTaskSet& set, const std::map<std::string, std::string>& trace_paths = {},
                  const std::map<std::string, RegimeModelSpec>& exec_models = {});

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mics
