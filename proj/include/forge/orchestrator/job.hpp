#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/common/errors.hpp"
#include "forge/common/package_tree.hpp"
#include "forge/documenter/docs.hpp"
#include "forge/planner/plan.hpp"

namespace forge::orchestrator {

enum class JobState { planning, awaiting_refinement, awaiting_confirmation, generating, documenting, done, failed };

std::string_view to_string(JobState state);
bool is_terminal(JobState state);

/// planning -> awaiting_refinement -> awaiting_confirmation -> generating ->
/// documenting -> done, and failed from any non-terminal state.
bool transition_allowed(JobState from, JobState to);

class InvalidTransition : public Error {
 public:
  using Error::Error;
};

class UnknownJob : public Error {
 public:
  using Error::Error;
};

struct JobEvent {
  std::size_t seq = 0;  // 0-based position in the log
  std::string timestamp;
  std::string phase;
  std::string message;
};

struct JobSnapshot {
  std::string id;
  JobState state = JobState::planning;
  bool busy = false;
  planner::PackagePlan plan;
  std::vector<planner::QualityScore> quality_history;
  std::vector<std::string> proposed_files;
  std::optional<PackageTree> tree;
  std::optional<documenter::DocBundle> doc;
  bool used_fallback = false;
  std::vector<JobEvent> events;
  std::optional<std::string> error;
  std::filesystem::path workspace;
};

/// JSON view of a snapshot: file paths instead of file contents.
nlohmann::ordered_json to_json(const JobSnapshot& snapshot);
nlohmann::ordered_json to_json(const JobEvent& event);

/// Shared job record. The worker that holds the busy flag is the only
/// writer; readers take snapshots. The event log only grows.
class Job {
 public:
  Job(std::string id, planner::PackagePlan plan, std::filesystem::path workspace);

  const std::string& id() const noexcept { return id_; }
  const std::filesystem::path& workspace() const noexcept { return workspace_; }

  JobState state() const;
  /// Throws InvalidTransition for a move the table forbids, and for entering
  /// documenting without a non-empty tree.
  void transition(JobState to, const std::string& message);
  void fail(const std::string& phase, const std::string& message);
  void log(const std::string& phase, const std::string& message);

  /// Claims the job for one worker; false when another holds it.
  bool try_acquire();
  void release();

  void set_plan(planner::PackagePlan plan);
  void set_quality_history(std::vector<planner::QualityScore> history);
  void set_proposed_files(std::vector<std::string> files);
  void set_tree(PackageTree tree, bool used_fallback);
  void set_doc(documenter::DocBundle doc);

  planner::PackagePlan plan() const;
  JobSnapshot snapshot() const;
  std::size_t event_count() const;
  std::vector<JobEvent> events_since(std::size_t first) const;
  /// Waits until the log holds more than `seen` events or the job is terminal.
  /// Returns false on timeout.
  bool wait_for_events(std::size_t seen, std::chrono::milliseconds timeout) const;

 private:
  void append_locked(const std::string& phase, const std::string& message);

  const std::string id_;
  const std::filesystem::path workspace_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  JobState state_ = JobState::planning;
  bool busy_ = false;
  planner::PackagePlan plan_;
  std::vector<planner::QualityScore> quality_history_;
  std::vector<std::string> proposed_files_;
  std::optional<PackageTree> tree_;
  std::optional<documenter::DocBundle> doc_;
  bool used_fallback_ = false;
  std::vector<JobEvent> events_;
  std::optional<std::string> error_;
};

/// UTC "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

}  // namespace forge::orchestrator
