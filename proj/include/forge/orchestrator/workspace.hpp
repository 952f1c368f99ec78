#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace forge::orchestrator {

/// Random 16-hex-digit token.
std::string new_job_id();

/// True when p lies inside dir after lexical normalisation.
bool path_within(const std::filesystem::path& dir, const std::filesystem::path& p);

/// One job's directory, workspace_root/<job-id>. Every write goes through
/// here and is recorded, so tests can audit where a job wrote.
class Workspace {
 public:
  Workspace(const std::filesystem::path& root, const std::string& job_id);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Throws InvalidPath when the relative path leaves the job directory.
  std::filesystem::path resolve(std::string_view relative) const;
  std::filesystem::path write_file(std::string_view relative, std::string_view content);
  /// Records a path written by someone else; throws InvalidPath when outside.
  void record(const std::filesystem::path& p);
  std::vector<std::filesystem::path> written() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace forge::orchestrator
