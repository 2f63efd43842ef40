#include "mics/traces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mics/error.hpp"
#include "mics/kernels.hpp"

namespace mics {
namespace {

constexpr std::string_view kTaskTag = "task:";
constexpr std::string_view kSourceTag = "source:";

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string single_line(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return out;
}

Micros parse_sample(std::string_view field, std::size_t line) {
  Micros v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec == std::errc::result_out_of_range) throw ParseError(line, "sample out of range");
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line, "non-numeric sample");
  }
  if (v <= 0) throw ParseError(line, "non-positive sample");
  return v;
}

}  // namespace

ExecutionTrace make_trace(std::string task_label, std::vector<Micros> samples, std::string source) {
  if (samples.empty()) throw EmptyTrace();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] <= 0) throw ParseError(i + 1, "non-positive sample");
  }
  return {std::move(task_label), std::move(samples), std::move(source)};
}

TraceFormat parse_trace_format(std::string_view id) {
  if (id == "csv-v1") return TraceFormat::CsvV1;
  throw ConfigError("unknown trace format '" + std::string(id) + "'");
}

std::string_view to_string(TraceFormat) { return "csv-v1"; }

ExecutionTrace parse_trace(std::string_view text, std::string default_label, TraceFormat) {
  ExecutionTrace trace{std::move(default_label), {}, {}};
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (body.starts_with(kTaskTag)) {
        trace.task_label = std::string(trim(body.substr(kTaskTag.size())));
      } else if (body.starts_with(kSourceTag)) {
        trace.source = std::string(trim(body.substr(kSourceTag.size())));
      }
      continue;
    }
    trace.samples.push_back(parse_sample(line, line_no));
  }
  if (trace.samples.empty()) throw EmptyTrace();
  return trace;
}

std::string format_trace(const ExecutionTrace& trace, TraceFormat) {
  std::string out;
  out.reserve(trace.samples.size() * 8 + 64);
  if (!trace.task_label.empty()) out += "# task: " + single_line(trace.task_label) + "\n";
  if (!trace.source.empty()) out += "# source: " + single_line(trace.source) + "\n";
  char buf[24];
  for (Micros v : trace.samples) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
    out.push_back('\n');
  }
  return out;
}

ExecutionTrace load_trace(const std::filesystem::path& path, TraceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read trace '" + path.string() + "'");
  return parse_trace(buf.str(), path.stem().string(), format);
}

void save_trace(const std::filesystem::path& path, const ExecutionTrace& trace,
                TraceFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write trace '" + path.string() + "'");
  out << format_trace(trace, format);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EmpiricalDistribution::EmpiricalDistribution(const ExecutionTrace& trace, Micros wcet_hi)
    : label_(trace.task_label), wcet_hi_(wcet_hi) {
  if (trace.samples.empty()) throw EmptyTrace();
  if (wcet_hi <= 0) throw ConfigError("wcet_hi must be positive");
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const Micros v = trace.samples[i];
    if (v <= 0) throw ParseError(i + 1, "non-positive sample");
    if (v > wcet_hi) throw SampleExceedsWcetHi(i, v, wcet_hi);
  }
  // EET/SEET numerators are kept exact in int64.
  constexpr auto kLimit = std::int64_t{1} << 62;
  if (static_cast<std::int64_t>(trace.samples.size()) > kLimit / wcet_hi) {
    throw ConfigError("n * wcet_hi too large for exact arithmetic");
  }

  sorted_ = trace.samples;
  std::sort(sorted_.begin(), sorted_.end());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (distinct_.empty() || distinct_.back() != sorted_[i]) {
      distinct_.push_back(sorted_[i]);
      cumulative_.push_back(0);
    }
    cumulative_.back() = static_cast<std::int64_t>(i + 1);
  }
}

std::int64_t EmpiricalDistribution::count_le(Micros t) const noexcept {
  return std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
}

double EmpiricalDistribution::alpha(Micros t) const noexcept {
  if (t >= wcet_hi_) return 1.0;
  return static_cast<double>(count_le(t)) / static_cast<double>(n());
}

double EmpiricalDistribution::mean() const noexcept {
  long double sum = 0;
  for (Micros v : sorted_) sum += v;
  return static_cast<double>(sum / sorted_.size());
}

double EmpiricalDistribution::stddev() const noexcept {
  const long double mu = mean();
  long double acc = 0;
  for (Micros v : sorted_) acc += (v - mu) * (v - mu);
  return static_cast<double>(std::sqrt(acc / sorted_.size()));
}

EmpiricalDistribution build_distribution(const ExecutionTrace& trace, Micros wcet_hi) {
  return EmpiricalDistribution(trace, wcet_hi);
}

double stability_check(const ExecutionTrace& trace, double split) {
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  const std::size_t n = trace.samples.size();
  const auto head = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
  if (head < 2 || n - head < 2) {
    throw TooFewSamples("need at least 2 samples on each side of the split (n = " +
                        std::to_string(n) + ")");
  }

  std::vector<Micros> all = trace.samples;
  std::vector<Micros> first(trace.samples.begin(), trace.samples.begin() + head);
  std::sort(all.begin(), all.end());
  std::sort(first.begin(), first.end());

  // Both ECDFs are right-continuous steps that only jump at sample values, so
  // the supremum is attained at one of the distinct values of `all`.
  std::vector<double> f_all;
  std::vector<double> f_first;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n;) {
    const Micros v = all[i];
    while (i < n && all[i] == v) ++i;
    while (j < head && first[j] <= v) ++j;
    f_all.push_back(static_cast<double>(i) / static_cast<double>(n));
    f_first.push_back(static_cast<double>(j) / static_cast<double>(head));
  }
  return kernels::max_abs_diff(f_all, f_first);
}

}  // namespace mics
