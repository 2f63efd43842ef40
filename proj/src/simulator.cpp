#include "mics/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "mics/error.hpp"
#include "mics/format.hpp"
#include "mics/seed.hpp"

namespace mics {

std::string LcHiPolicy::name() const {
  return drops() ? "drop" : "extend(" + format_double(gamma) + ")";
}

LcHiPolicy parse_lc_hi_policy(const std::string& text) {
  if (text == "drop") return LcHiPolicy::drop();
  const std::string prefix = "extend:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    double g = 0.0;
    try {
      std::size_t used = 0;
      g = std::stod(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
    } catch (const std::exception&) {
      throw ConfigError("bad extend factor '" + tail + "'");
    }
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("extend factor must lie in (0, 1]");
    return LcHiPolicy::extend_period(g);
  }
  throw ConfigError("unknown LC policy '" + text + "' (expected drop or extend:<gamma>)");
}

std::size_t WindowMaxSelector::select(std::span<const Micros> levels,
                                      std::span<const Micros> recent) const {
  if (recent.empty()) return 0;
  const Micros need = *std::max_element(recent.begin(), recent.end());
  for (std::size_t i = levels.size(); i-- > 0;) {
    if (levels[i] >= need) return i;
  }
  return 0;
}

std::string_view to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::Release: return "release";
    case SimEventKind::Start: return "start";
    case SimEventKind::Preempt: return "preempt";
    case SimEventKind::Complete: return "complete";
    case SimEventKind::LevelChange: return "level_change";
    case SimEventKind::ModeSwitch: return "mode_switch";
    case SimEventKind::Drop: return "drop";
  }
  return "?";
}

void SimConfig::validate() const {
  task_set.validate();
  if ((horizon.us > 0) == (horizon.hyperperiods > 0.0)) {
    throw ConfigError("horizon must be given either in us or in hyper-periods, and be > 0");
  }
  if (horizon.us < 0 || horizon.hyperperiods < 0.0) throw ConfigError("horizon must be > 0");
  if (level_window < 1) throw ConfigError("level_window must be >= 1");
  if (level_overhead < 0) throw ConfigError("level_overhead must be >= 0");
  if (!(lc_policy_hi.gamma >= 0.0 && lc_policy_hi.gamma <= 1.0)) {
    throw ConfigError("LC HI-mode gamma must lie in [0, 1]");
  }
  for (const auto& [id, model] : exec_models) {
    const bool known = std::any_of(task_set.tasks.begin(), task_set.tasks.end(),
                                   [&](const McTask& t) { return t.id == id; });
    if (!known) throw ConfigError("exec model for unknown task '" + id + "'");
    model.validate();
  }
}

namespace {

constexpr Micros kNever = std::numeric_limits<Micros>::max();

struct Job {
  std::uint64_t uid = 0;
  std::size_t task = 0;
  Micros release = 0;
  Micros deadline = 0;
  Micros period_eff = 0;
  double edf_key = 0.0;  // virtual deadline for HC jobs in LO mode
  Micros exec = 0;
  Micros done = 0;
  Micros overhead = 0;  // pending level-change overhead
  Micros budget = 0;
  std::size_t level = 0;
  bool hi = false;
};

struct TaskState {
  const McTask* task = nullptr;
  std::unique_ptr<ExecSource> source;
  Micros next_release = 0;
  Micros last_deadline = 0;
  std::deque<Micros> history;
  std::size_t level = 0;
  double u_nominal = 0.0;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    selector_ = cfg_.selector ? cfg_.selector : std::make_shared<WindowMaxSelector>();

    sorted_ = cfg_.task_set.tasks;
    std::sort(sorted_.begin(), sorted_.end(),
              [](const McTask& a, const McTask& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      TaskState st;
      st.task = &sorted_[i];
      st.source = make_source(sorted_[i], sub_seed(cfg_.seed, i));
      st.u_nominal = static_cast<double>(sorted_[i].lo_budget()) / static_cast<double>(sorted_[i].period);
      if (!sorted_[i].is_hc()) u_lc_nominal_ += st.u_nominal;
      states_.push_back(std::move(st));
    }

    m_.hyperperiod_us = cfg_.task_set.hyperperiod();
    if (cfg_.horizon.us > 0) {
      horizon_ = cfg_.horizon.us;
    } else {
      const double h = std::ceil(cfg_.horizon.hyperperiods * static_cast<double>(m_.hyperperiod_us));
      if (!(h < 4e18)) throw HyperperiodOverflow("horizon does not fit in 64-bit microseconds");
      horizon_ = static_cast<Micros>(h);
    }
    m_.horizon_us = horizon_;

    const double u_hc_lo = utilization(cfg_.task_set, Criticality::HC, Mode::LO);
    const double u_hc_hi = utilization(cfg_.task_set, Criticality::HC, Mode::HI);
    u_hc_hi_ = u_hc_hi;
    const SchedPolicy policy = cfg_.lc_policy_hi.as_sched_policy();
    const EdfVdVerdict full = edfvd_test(u_lc_nominal_, u_hc_lo, u_hc_hi, policy);
    m_.unverified = !full.schedulable;
    scale_ = lc_scale();
    m_.x = full.schedulable ? full.x : edfvd_test(scale_ * u_lc_nominal_, u_hc_lo, u_hc_hi, policy).x;

    for (auto& st : states_) {
      if (!st.task->is_hc() && lc_period(st) == kNever) st.next_release = kNever;
    }
  }

  SimResult run() {
    while (true) {
      release_due();
      dispatch();
      const Micros t = next_event_time();
      if (t == kNever) break;
      advance(t);
      settle_running();
      expire_deadlines();
      maybe_return_to_lo();
    }
    finish();
    return {m_, std::move(events_)};
  }

 private:
  std::unique_ptr<ExecSource> make_source(const McTask& t, std::uint64_t seed) const {
    if (auto it = cfg_.exec_models.find(t.id); it != cfg_.exec_models.end()) {
      return make_regime_source(it->second, t.wcet_hi, seed);
    }
    if (t.trace) return make_replay_source(t.trace);
    if (t.distribution) return make_bootstrap_source(t.distribution, seed);
    return make_constant_source(t.lo_budget());
  }

  void log(SimEventKind kind, std::size_t task, std::string detail) {
    if (!cfg_.record_events) return;
    events_.push_back({now_, kind, task < sorted_.size() ? sorted_[task].id : std::string{},
                       std::move(detail)});
  }

  double lc_scale() const {
    if (!cfg_.scale_lc_admission || u_lc_nominal_ <= 0.0) return 1.0;
    double u_hc_lo = 0.0;
    for (const auto& st : states_) {
      if (st.task->is_hc()) {
        u_hc_lo += static_cast<double>(st.task->levels.levels[st.level]) /
                   static_cast<double>(st.task->period);
      }
    }
    double bound = 0.0;
    try {
      bound = lc_utilization_bound(u_hc_lo, u_hc_hi_, cfg_.lc_policy_hi.gamma);
    } catch (const InfeasibleHcLoad&) {
      bound = 0.0;
    }
    return std::min(1.0, bound / u_lc_nominal_);
  }

  Micros stretched(Micros period, double factor) const {
    if (factor >= 1.0 - 1e-12) return period;
    if (factor <= 1e-12) return kNever;
    const double p = std::ceil(static_cast<double>(period) / factor);
    return p < 4e18 ? static_cast<Micros>(p) : kNever;
  }

  Micros lc_period(const TaskState& st) const {
    if (mode_ == Mode::HI) {
      return cfg_.lc_policy_hi.drops() ? kNever : stretched(st.task->period, cfg_.lc_policy_hi.gamma);
    }
    return stretched(st.task->period, scale_);
  }

  void refresh_lc_releases() {
    for (auto& st : states_) {
      if (st.task->is_hc()) continue;
      if (lc_period(st) == kNever) {
        st.next_release = kNever;
      } else if (st.next_release == kNever) {
        st.next_release = std::max(now_, st.last_deadline);
      }
    }
  }

  void update_scale() {
    const double s = lc_scale();
    const bool lowered = s < scale_;
    scale_ = s;
    if (mode_ == Mode::LO && lowered) revoke_lc();
    refresh_lc_releases();
  }

  // Drop the latest-deadline LC jobs whose window is denser than the current
  // admitted rate until the admitted LC load fits again.
  void revoke_lc() {
    double load = 0.0, bound = 0.0;
    auto target = [&](std::size_t i) { return scale_ * states_[i].u_nominal; };
    std::vector<char> has_job(states_.size(), 0);
    for (const Job& j : jobs_) {
      if (sorted_[j.task].is_hc()) continue;
      has_job[j.task] = 1;
      load += static_cast<double>(j.budget) / static_cast<double>(j.period_eff);
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (sorted_[i].is_hc()) continue;
      bound += target(i);
      if (!has_job[i]) load += target(i);
    }
    while (load > bound + 1e-12) {
      std::optional<std::size_t> victim;
      for (std::size_t k = 0; k < jobs_.size(); ++k) {
        const Job& j = jobs_[k];
        if (sorted_[j.task].is_hc()) continue;
        const double u = static_cast<double>(j.budget) / static_cast<double>(j.period_eff);
        if (u <= target(j.task) + 1e-15) continue;
        if (!victim || j.deadline > jobs_[*victim].deadline ||
            (j.deadline == jobs_[*victim].deadline && j.task > jobs_[*victim].task)) {
          victim = k;
        }
      }
      if (!victim) break;
      const Job& j = jobs_[*victim];
      load -= static_cast<double>(j.budget) / static_cast<double>(j.period_eff) - target(j.task);
      ++m_.lc_jobs_revoked;
      log(SimEventKind::Drop, j.task, "revoked");
      remove_job(*victim);
    }
  }

  void remove_job(std::size_t k) {
    if (running_ && *running_ == jobs_[k].uid) running_.reset();
    jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(k));
  }

  Job* running_job() {
    if (!running_) return nullptr;
    for (auto& j : jobs_) {
      if (j.uid == *running_) return &j;
    }
    throw InvariantViolation("running job vanished");
  }

  void release_due() {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      auto& st = states_[i];
      if (st.next_release == now_ && now_ < horizon_) release(i);
    }
  }

  void release(std::size_t i) {
    auto& st = states_[i];
    const McTask& t = *st.task;
    Job j;
    j.uid = next_uid_++;
    j.task = i;
    j.release = now_;
    j.exec = st.source->next();
    if (j.exec <= 0 || j.exec > t.wcet_hi) {
      throw InvariantViolation("execution time " + std::to_string(j.exec) + " of task " + t.id +
                               " outside (0, wcet_hi]");
    }
    bool level_changed = false;
    if (t.is_hc()) {
      j.period_eff = t.period;
      j.deadline = now_ + t.period;
      if (mode_ == Mode::HI) {
        j.hi = true;
        j.budget = t.wcet_hi;
        j.edf_key = static_cast<double>(j.deadline);
      } else {
        std::size_t lvl = 0;
        if (cfg_.level_policy == LevelPolicy::MultiLevel) {
          const std::vector<Micros> recent(st.history.begin(), st.history.end());
          lvl = selector_->select(t.levels.levels, recent);
          if (lvl >= t.levels.size()) throw InvariantViolation("level selector out of range");
        }
        if (lvl != st.level) {
          j.overhead += cfg_.level_overhead;
          ++m_.level_changes;
          log(SimEventKind::LevelChange, i,
              "select L" + std::to_string(st.level + 1) + "->L" + std::to_string(lvl + 1));
          st.level = lvl;
          level_changed = true;
        }
        j.level = lvl;
        j.budget = t.levels.levels[lvl];
        j.edf_key = static_cast<double>(now_) + m_.x * static_cast<double>(t.period);
      }
      ++m_.hc_jobs_released;
      st.next_release = now_ + t.period;
    } else {
      const Micros pe = lc_period(st);
      if (pe == kNever) throw InvariantViolation("LC release while suspended");
      j.period_eff = pe;
      j.deadline = now_ + pe;
      j.budget = t.lo_budget();
      j.edf_key = static_cast<double>(j.deadline);
      st.last_deadline = j.deadline;
      st.next_release = now_ + pe;
      ++m_.lc_jobs_released;
    }
    log(SimEventKind::Release, i, "deadline=" + std::to_string(j.deadline));
    jobs_.push_back(j);
    if (level_changed) update_scale();
  }

  static bool before(const Job& a, const Job& b) {
    if (a.edf_key != b.edf_key) return a.edf_key < b.edf_key;
    return a.task < b.task;
  }

  void dispatch() {
    if (jobs_.empty()) return;
    const Job* best = &jobs_.front();
    for (const Job& j : jobs_) {
      if (before(j, *best)) best = &j;
    }
    Job* cur = running_job();
    if (cur && !(best->edf_key < cur->edf_key)) return;
    if (cur == best) return;
    if (cur) log(SimEventKind::Preempt, cur->task, "by " + sorted_[best->task].id);
    running_ = best->uid;
    log(SimEventKind::Start, best->task, {});
  }

  // Own-work target of the running job: completion, or budget exhaustion for
  // an HC job under a LO-mode level.
  static Micros work_limit(const Job& j, bool hc) {
    return hc && !j.hi ? std::min(j.exec, j.budget) : j.exec;
  }

  Micros next_event_time() {
    Micros t = kNever;
    for (const auto& st : states_) {
      if (st.next_release != kNever && st.next_release < horizon_) t = std::min(t, st.next_release);
    }
    for (const Job& j : jobs_) t = std::min(t, j.deadline);
    if (const Job* r = running_job()) {
      t = std::min(t, now_ + r->overhead + work_limit(*r, sorted_[r->task].is_hc()) - r->done);
    }
    return t;
  }

  void advance(Micros t) {
    const Micros dt = t - now_;
    if (dt < 0) throw InvariantViolation("time went backwards");
    if (Job* r = running_job()) {
      const Micros o = std::min(dt, r->overhead);
      r->overhead -= o;
      r->done += dt - o;
    }
    (mode_ == Mode::LO ? m_.time_lo : m_.time_hi) += dt;
    now_ = t;
  }

  void settle_running() {
    Job* r = running_job();
    if (!r || r->overhead > 0) return;
    const bool hc = sorted_[r->task].is_hc();
    if (r->done == r->exec) {
      complete(*r);
    } else if (hc && !r->hi && r->done == r->budget) {
      exhaust(*r);
    }
  }

  void complete(Job& j) {
    auto& st = states_[j.task];
    if (st.task->is_hc()) {
      ++m_.hc_jobs_completed;
      st.history.push_back(j.exec);
      while (st.history.size() > cfg_.level_window) st.history.pop_front();
    } else {
      ++m_.lc_jobs_completed;
    }
    waste_sum_ += static_cast<double>(j.budget - j.exec) / static_cast<double>(j.budget);
    ++completed_;
    log(SimEventKind::Complete, j.task,
        "exec=" + std::to_string(j.exec) + " budget=" + std::to_string(j.budget));
    for (std::size_t k = 0; k < jobs_.size(); ++k) {
      if (jobs_[k].uid == j.uid) {
        remove_job(k);
        break;
      }
    }
  }

  void exhaust(Job& j) {
    auto& st = states_[j.task];
    const McTask& t = *st.task;
    if (cfg_.level_policy == LevelPolicy::MultiLevel && j.level > 0) {
      const std::size_t from = j.level;
      j.level -= 1;
      j.budget = t.levels.levels[j.level];
      j.overhead += cfg_.level_overhead;
      ++m_.level_changes;
      log(SimEventKind::LevelChange, j.task,
          "escalate L" + std::to_string(from + 1) + "->L" + std::to_string(j.level + 1));
      st.level = j.level;
      update_scale();
      return;
    }
    log(SimEventKind::ModeSwitch, j.task,
        "LO->HI executed=" + std::to_string(j.done) + " level1=" + std::to_string(t.levels.top()));
    mode_ = Mode::HI;
    ++m_.mode_switches;
    for (std::size_t k = jobs_.size(); k-- > 0;) {
      Job& other = jobs_[k];
      if (sorted_[other.task].is_hc()) {
        other.hi = true;
        other.budget = sorted_[other.task].wcet_hi;
        other.edf_key = static_cast<double>(other.deadline);
      } else {
        ++m_.lc_jobs_dropped;
        log(SimEventKind::Drop, other.task, "mode_switch");
        remove_job(k);
      }
    }
    refresh_lc_releases();
  }

  void expire_deadlines() {
    for (std::size_t k = 0; k < jobs_.size();) {
      if (jobs_[k].deadline <= now_) {
        const std::size_t task = jobs_[k].task;
        ++(sorted_[task].is_hc() ? m_.hc_deadline_misses : m_.lc_deadline_misses);
        log(SimEventKind::Drop, task, "deadline_miss");
        remove_job(k);
      } else {
        ++k;
      }
    }
  }

  void maybe_return_to_lo() {
    if (mode_ != Mode::HI) return;
    for (const Job& j : jobs_) {
      if (sorted_[j.task].is_hc()) return;
    }
    mode_ = Mode::LO;
    log(SimEventKind::ModeSwitch, sorted_.size(), "HI->LO");
    update_scale();
  }

  void finish() {
    m_.end_time = now_;
    for (const auto& st : states_) {
      if (!st.task->is_hc()) {
        m_.lc_jobs_nominal += static_cast<std::uint64_t>((horizon_ + st.task->period - 1) / st.task->period);
      }
      m_.trace_wraps += st.source->wraps();
    }
    m_.qos = m_.lc_jobs_nominal > 0
                 ? static_cast<double>(m_.lc_jobs_completed) / static_cast<double>(m_.lc_jobs_nominal)
                 : 1.0;
    m_.util_waste = completed_ > 0 ? waste_sum_ / static_cast<double>(completed_) : 0.0;
    m_.mode_switches_per_hyperperiod = static_cast<double>(m_.mode_switches) *
                                       static_cast<double>(m_.hyperperiod_us) /
                                       static_cast<double>(horizon_);
  }

  SimConfig cfg_;
  std::shared_ptr<const LevelSelector> selector_;
  std::vector<McTask> sorted_;
  std::vector<TaskState> states_;
  std::vector<Job> jobs_;
  std::optional<std::uint64_t> running_;
  std::uint64_t next_uid_ = 0;
  Micros now_ = 0;
  Micros horizon_ = 0;
  Mode mode_ = Mode::LO;
  double scale_ = 1.0;
  double u_lc_nominal_ = 0.0;
  double u_hc_hi_ = 0.0;
  double waste_sum_ = 0.0;
  std::uint64_t completed_ = 0;
  SimMetrics m_;
  std::vector<SimEvent> events_;
};

}  // namespace

SimResult run(const SimConfig& config) { return Engine(config).run(); }

std::string event_log_csv(std::span<const SimEvent> events) {
  std::string out = "time_us,event,task_id,detail\n";
  for (const auto& e : events) {
    out += std::to_string(e.time);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += e.task_id;
    out += ',';
    out += e.detail;
    out += '\n';
  }
  return out;
}

}  // namespace mics
