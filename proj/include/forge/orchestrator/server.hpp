#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "forge/orchestrator/pipeline.hpp"

namespace forge::orchestrator {

/// Runs jobs for the HTTP API, one worker thread per phase. A job stops at
/// awaiting_refinement and awaiting_confirmation unless it was submitted as
/// non-interactive.
class JobManager {
 public:
  explicit JobManager(const Engine& engine);
  ~JobManager();

  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  std::shared_ptr<Job> submit(const PackageRequest& request, bool non_interactive = false);
  /// Throws UnknownJob.
  std::shared_ptr<Job> get(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Throws UnknownJob, InvalidInput or InvalidTransition (wrong state, or a
  /// worker still owns the job).
  void refine(const std::string& id, const std::string& feedback);
  /// awaiting_refinement: accepts the plan. awaiting_confirmation: confirms
  /// the file list and starts generation.
  void confirm(const std::string& id);

  /// Blocks until no worker holds the job.
  void wait_idle(const std::string& id, std::chrono::milliseconds timeout = std::chrono::seconds(30)) const;

  const Engine& engine() const noexcept { return engine_; }

 private:
  template <typename F>
  void spawn(const std::shared_ptr<Job>& job, F&& work);
  std::shared_ptr<Job> acquire(const std::string& id);

  const Engine& engine_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::thread> workers_;
};

struct ServerOptions {
  std::chrono::milliseconds heartbeat{15000};
};

/// HTTP API over a JobManager:
///   POST /api/jobs, GET /api/jobs, GET /api/jobs/{id},
///   POST /api/jobs/{id}/refine, POST /api/jobs/{id}/confirm,
///   GET /api/jobs/{id}/events (server-sent events),
///   GET /api/jobs/{id}/package.zip | documentation.md | report.json
class ApiServer {
 public:
  explicit ApiServer(JobManager& jobs, ServerOptions options = {});
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Blocks serving requests until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses a POST /api/jobs body. Features are "Name: description" strings or
/// {"name", "description"} objects. Throws InvalidInput.
PackageRequest request_from_json(const nlohmann::json& body, bool* non_interactive = nullptr);

}  // namespace forge::orchestrator
