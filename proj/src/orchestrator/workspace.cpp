#include "forge/orchestrator/workspace.hpp"

#include <fstream>
#include <random>

#include "forge/common/errors.hpp"

namespace forge::orchestrator {

namespace fs = std::filesystem;

std::string new_job_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t v = 0;
  {
    std::lock_guard lock(mutex);
    v = rng();
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool path_within(const fs::path& dir, const fs::path& p) {
  const fs::path base = fs::weakly_canonical(fs::absolute(dir));
  const fs::path target = fs::weakly_canonical(fs::absolute(p));
  const auto rel = target.lexically_relative(base);
  if (rel.empty()) return false;
  const auto first = *rel.begin();
  return first != ".." && first != ".";
}

Workspace::Workspace(const fs::path& root, const std::string& job_id) : dir_(fs::absolute(root / job_id)) {
  if (job_id.empty() || job_id.find('/') != std::string::npos || job_id.find("..") != std::string::npos) {
    throw InvalidPath("bad job id '" + job_id + "'");
  }
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError(dir_, "cannot create job directory (" + ec.message() + ")");
}

fs::path Workspace::resolve(std::string_view relative) const {
  const fs::path rel(relative);
  if (relative.empty() || rel.is_absolute()) throw InvalidPath("workspace path must be relative: '" +
                                                               std::string(relative) + "'");
  const fs::path p = (dir_ / rel).lexically_normal();
  if (!path_within(dir_, p)) throw InvalidPath("path leaves the job directory: '" + std::string(relative) + "'");
  return p;
}

fs::path Workspace::write_file(std::string_view relative, std::string_view content) {
  const fs::path p = resolve(relative);
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError(p.parent_path(), "cannot create directory (" + ec.message() + ")");
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(p, "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError(p, "write failed");
  record(p);
  return p;
}

void Workspace::record(const fs::path& p) {
  if (!path_within(dir_, p)) throw InvalidPath("write outside the job directory: " + p.string());
  std::lock_guard lock(mutex_);
  written_.push_back(fs::absolute(p).lexically_normal());
}

std::vector<fs::path> Workspace::written() const {
  std::lock_guard lock(mutex_);
  return written_;
}

}  // namespace forge::orchestrator
