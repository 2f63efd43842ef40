#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mics/types.hpp"

namespace mics {

/// Measured execution times of one task, in the order they were observed.
/// Replay depends on that order, so nothing here ever sorts `samples`.
struct ExecutionTrace {
  std::string task_label;
  std::vector<Micros> samples;
  std::string source;
};

/// Throws EmptyTrace / ParseError(0, ...) when the samples are unusable.
ExecutionTrace make_trace(std::string task_label, std::vector<Micros> samples,
                          std::string source = {});

enum class TraceFormat { CsvV1 };

TraceFormat parse_trace_format(std::string_view id);
std::string_view to_string(TraceFormat format);

/// csv-v1: one positive integer (us) per line, `#` starts a comment line.
/// The comment lines `# task: <label>` and `# source: <text>` are metadata.
ExecutionTrace parse_trace(std::string_view text, std::string default_label,
                           TraceFormat format = TraceFormat::CsvV1);
std::string format_trace(const ExecutionTrace& trace, TraceFormat format = TraceFormat::CsvV1);

ExecutionTrace load_trace(const std::filesystem::path& path,
                          TraceFormat format = TraceFormat::CsvV1);
void save_trace(const std::filesystem::path& path, const ExecutionTrace& trace,
                TraceFormat format = TraceFormat::CsvV1);

/// Sorted view of a trace together with its WCET^HI; the substrate of the
/// empirical coverage function alpha(t) = #{samples <= t} / n.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(const ExecutionTrace& trace, Micros wcet_hi);

  const std::string& task_label() const noexcept { return label_; }
  std::span<const Micros> sorted_samples() const noexcept { return sorted_; }
  std::size_t n() const noexcept { return sorted_.size(); }
  Micros wcet_hi() const noexcept { return wcet_hi_; }
  Micros min_sample() const noexcept { return sorted_.front(); }
  Micros max_sample() const noexcept { return sorted_.back(); }

  /// Distinct sample values, ascending, and the number of samples <= each.
  std::span<const Micros> distinct_values() const noexcept { return distinct_; }
  std::span<const std::int64_t> cumulative_counts() const noexcept { return cumulative_; }

  /// Number of samples <= t (0 for t below every sample).
  std::int64_t count_le(Micros t) const noexcept;
  double alpha(Micros t) const noexcept;

  double mean() const noexcept;
  /// Population standard deviation.
  double stddev() const noexcept;

 private:
  std::string label_;
  std::vector<Micros> sorted_;
  std::vector<Micros> distinct_;
  std::vector<std::int64_t> cumulative_;
  Micros wcet_hi_;
};

EmpiricalDistribution build_distribution(const ExecutionTrace& trace, Micros wcet_hi);

inline double alpha(const EmpiricalDistribution& dist, Micros t) { return dist.alpha(t); }

/// 1 - alpha(t), computed from counts so it carries no cancellation error.
inline double overrun_fraction(const EmpiricalDistribution& dist, Micros t) {
  const auto n = static_cast<std::int64_t>(dist.n());
  return static_cast<double>(n - dist.count_le(t)) / static_cast<double>(n);
}

/// Sup-norm distance between the ECDF of the first floor(split*n) samples and
/// the ECDF of all n samples. Callers compare the result against a threshold
/// (kDefaultStabilityThreshold) to judge whether n is large enough.
double stability_check(const ExecutionTrace& trace, double split);

inline constexpr double kDefaultStabilityThreshold = 0.02;

}  // namespace mics
