#include "forge/orchestrator/job.hpp"

#include <ctime>

namespace forge::orchestrator {

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::planning: return "planning";
    case JobState::awaiting_refinement: return "awaiting_refinement";
    case JobState::awaiting_confirmation: return "awaiting_confirmation";
    case JobState::generating: return "generating";
    case JobState::documenting: return "documenting";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "unknown";
}

bool is_terminal(JobState state) { return state == JobState::done || state == JobState::failed; }

bool transition_allowed(JobState from, JobState to) {
  if (is_terminal(from)) return false;
  if (to == JobState::failed) return true;
  switch (from) {
    case JobState::planning: return to == JobState::awaiting_refinement;
    case JobState::awaiting_refinement: return to == JobState::awaiting_confirmation;
    case JobState::awaiting_confirmation: return to == JobState::generating;
    case JobState::generating: return to == JobState::documenting;
    case JobState::documenting: return to == JobState::done;
    default: return false;
  }
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

nlohmann::ordered_json to_json(const JobEvent& e) {
  return {{"seq", e.seq}, {"timestamp", e.timestamp}, {"phase", e.phase}, {"message", e.message}};
}

nlohmann::ordered_json to_json(const JobSnapshot& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["state"] = to_string(s.state);
  j["busy"] = s.busy;
  j["plan"] = planner::to_json(s.plan);
  auto& history = j["quality_history"] = nlohmann::ordered_json::array();
  for (const auto& q : s.quality_history) {
    history.push_back({{"specificity", q.specificity},
                       {"completeness", q.completeness},
                       {"technical_accuracy", q.technical_accuracy},
                       {"overall", q.overall}});
  }
  j["proposed_files"] = s.proposed_files;
  if (s.tree) {
    j["files"] = s.tree->paths();
  } else {
    j["files"] = nullptr;
  }
  j["used_fallback"] = s.used_fallback;
  if (s.doc) {
    std::vector<std::string> titles;
    for (const auto& sec : s.doc->sections) titles.push_back(sec.title);
    j["documentation_sections"] = titles;
  } else {
    j["documentation_sections"] = nullptr;
  }
  auto& events = j["events"] = nlohmann::ordered_json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  j["error"] = s.error ? nlohmann::ordered_json(*s.error) : nlohmann::ordered_json();
  return j;
}

Job::Job(std::string id, planner::PackagePlan plan, std::filesystem::path workspace)
    : id_(std::move(id)), workspace_(std::move(workspace)), plan_(std::move(plan)) {
  append_locked("planning", "job created");
}

JobState Job::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Job::append_locked(const std::string& phase, const std::string& message) {
  events_.push_back({events_.size(), utc_timestamp(), phase, message});
  changed_.notify_all();
}

void Job::transition(JobState to, const std::string& message) {
  std::lock_guard lock(mutex_);
  if (!transition_allowed(state_, to)) {
    throw InvalidTransition("job " + id_ + " cannot move from " + std::string(to_string(state_)) + " to " +
                            std::string(to_string(to)));
  }
  if (to == JobState::documenting && (!tree_ || tree_->empty())) {
    throw InvalidTransition("job " + id_ + " has no files to document");
  }
  state_ = to;
  append_locked(std::string(to_string(to)), message);
}

void Job::fail(const std::string& phase, const std::string& message) {
  std::lock_guard lock(mutex_);
  if (is_terminal(state_)) return;
  state_ = JobState::failed;
  error_ = phase + ": " + message;
  append_locked("failed", *error_);
}

void Job::log(const std::string& phase, const std::string& message) {
  std::lock_guard lock(mutex_);
  append_locked(phase, message);
}

bool Job::try_acquire() {
  std::lock_guard lock(mutex_);
  if (busy_) return false;
  busy_ = true;
  return true;
}

void Job::release() {
  std::lock_guard lock(mutex_);
  busy_ = false;
  changed_.notify_all();
}

void Job::set_plan(planner::PackagePlan plan) {
  std::lock_guard lock(mutex_);
  plan_ = std::move(plan);
}

void Job::set_quality_history(std::vector<planner::QualityScore> history) {
  std::lock_guard lock(mutex_);
  quality_history_ = std::move(history);
}

void Job::set_proposed_files(std::vector<std::string> files) {
  std::lock_guard lock(mutex_);
  proposed_files_ = std::move(files);
}

void Job::set_tree(PackageTree tree, bool used_fallback) {
  std::lock_guard lock(mutex_);
  tree_ = std::move(tree);
  used_fallback_ = used_fallback;
}

void Job::set_doc(documenter::DocBundle doc) {
  std::lock_guard lock(mutex_);
  doc_ = std::move(doc);
}

planner::PackagePlan Job::plan() const {
  std::lock_guard lock(mutex_);
  return plan_;
}

JobSnapshot Job::snapshot() const {
  std::lock_guard lock(mutex_);
  return {id_,   state_, busy_,           plan_,  quality_history_, proposed_files_,
          tree_, doc_,   used_fallback_,  events_, error_,          workspace_};
}

std::size_t Job::event_count() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

std::vector<JobEvent> Job::events_since(std::size_t first) const {
  std::lock_guard lock(mutex_);
  if (first >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(first), events_.end()};
}

bool Job::wait_for_events(std::size_t seen, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] { return events_.size() > seen || is_terminal(state_); });
}

}  // namespace forge::orchestrator
