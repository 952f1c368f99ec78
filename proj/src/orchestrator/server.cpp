#include "forge/orchestrator/server.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "forge/generator/fallback.hpp"
#include "forge/planner/judge.hpp"

namespace forge::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

JobManager::JobManager(const Engine& engine) : engine_(engine) {}

JobManager::~JobManager() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (auto& t : workers) {
    if (t.joinable()) t.join();
  }
}

template <typename F>
void JobManager::spawn(const std::shared_ptr<Job>& job, F&& work) {
  std::lock_guard lock(mutex_);
  workers_.emplace_back([job, work = std::forward<F>(work)]() mutable {
    try {
      work();
    } catch (const std::exception& e) {
      job->fail(std::string(to_string(job->state())), e.what());
    }
    job->release();
  });
}

std::shared_ptr<Job> JobManager::submit(const PackageRequest& request, bool non_interactive) {
  auto job = engine_.create_job(request);
  job->try_acquire();
  {
    std::lock_guard lock(mutex_);
    jobs_[job->id()] = job;
  }
  spawn(job, [this, job, non_interactive] {
    engine_.plan(*job);
    if (!non_interactive || job->state() != JobState::awaiting_refinement) return;
    engine_.approve_plan(*job);
    engine_.confirm_files(*job);
    engine_.build(*job);
  });
  return job;
}

std::shared_ptr<Job> JobManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw UnknownJob("no job '" + id + "'");
  return it->second;
}

std::vector<std::string> JobManager::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, job] : jobs_) out.push_back(id);
  return out;
}

std::shared_ptr<Job> JobManager::acquire(const std::string& id) {
  auto job = get(id);
  if (!job->try_acquire()) {
    throw InvalidTransition("job " + id + " is busy in " + std::string(to_string(job->state())));
  }
  return job;
}

void JobManager::refine(const std::string& id, const std::string& feedback) {
  auto job = acquire(id);
  try {
    if (job->state() != JobState::awaiting_refinement) {
      throw InvalidTransition("refine needs awaiting_refinement, job is " + std::string(to_string(job->state())));
    }
    if (feedback.find_first_not_of(" \t\r\n") == std::string::npos) throw InvalidInput("feedback is empty");
  } catch (...) {
    job->release();
    throw;
  }
  spawn(job, [this, job, feedback] { engine_.refine(*job, feedback); });
}

void JobManager::confirm(const std::string& id) {
  auto job = acquire(id);
  try {
    switch (job->state()) {
      case JobState::awaiting_refinement:
        engine_.approve_plan(*job);
        job->release();
        return;
      case JobState::awaiting_confirmation:
        engine_.confirm_files(*job);
        break;
      default:
        throw InvalidTransition("confirm is not allowed in state " + std::string(to_string(job->state())));
    }
  } catch (...) {
    job->release();
    throw;
  }
  spawn(job, [this, job] { engine_.build(*job); });
}

void JobManager::wait_idle(const std::string& id, std::chrono::milliseconds timeout) const {
  auto job = get(id);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (job->snapshot().busy) {
    if (std::chrono::steady_clock::now() > deadline) throw Error("timed out waiting for job " + id);
    job->wait_for_events(job->event_count(), std::chrono::milliseconds(50));
  }
}

PackageRequest request_from_json(const json& body, bool* non_interactive) {
  if (!body.is_object()) throw InvalidInput("request body must be a JSON object");
  PackageRequest r;
  try {
    r.name = body.at("name").get<std::string>();
    r.description = body.value("description", std::string());
    for (const auto& f : body.value("features", json::array())) {
      if (f.is_string()) {
        r.features.push_back(parse_feature_arg(f.get<std::string>()));
      } else if (f.is_object()) {
        planner::FeatureSpec spec;
        spec.name = f.at("name").get<std::string>();
        spec.raw_description = f.value("description", spec.name);
        r.features.push_back(std::move(spec));
      } else {
        throw InvalidInput("features must be strings or objects");
      }
    }
    if (body.contains("code_template") && body.at("code_template").is_string()) {
      r.code_template = body.at("code_template").get<std::string>();
    }
    if (non_interactive != nullptr) *non_interactive = body.value("non_interactive", false);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad job request: ") + e.what());
  }
  return r;
}

struct ApiServer::Impl {
  JobManager& jobs;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> stopping{false};

  Impl(JobManager& j, ServerOptions o) : jobs(j), options(o) {}
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

template <typename F>
void handle(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const UnknownJob& e) {
    send_error(res, 404, e.what());
  } catch (const InvalidTransition& e) {
    send_error(res, 409, e.what());
  } catch (const InvalidInput& e) {
    send_error(res, 400, e.what());
  } catch (const planner::InvalidPlan& e) {
    send_error(res, 400, e.what());
  } catch (const generator::InvalidFeatureName& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

bool read_file(const fs::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

std::size_t parse_cursor(const std::string& value) {
  std::size_t pos = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size()) throw InvalidInput("bad event cursor '" + value + "'");
  return n;
}

std::string sse_frame(const JobEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.phase + "\ndata: " + to_json(e).dump() + "\n\n";
}

}  // namespace

ApiServer::ApiServer(JobManager& jobs, ServerOptions options) : impl_(std::make_unique<Impl>(jobs, options)) {
  auto& srv = impl_->server;
  Impl* self = impl_.get();

  srv.Post("/api/jobs", [self](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      const auto body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
      if (body.is_discarded()) throw InvalidInput("request body is not JSON");
      bool non_interactive = false;
      const auto request = request_from_json(body, &non_interactive);
      const auto job = self->jobs.submit(request, non_interactive);
      send_json(res, 201, {{"id", job->id()}, {"state", to_string(job->state())}});
    });
  });

  srv.Get("/api/jobs", [self](const httplib::Request&, httplib::Response& res) {
    handle(res, [&] {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& id : self->jobs.ids()) {
        list.push_back({{"id", id}, {"state", to_string(self->jobs.get(id)->state())}});
      }
      send_json(res, 200, {{"jobs", list}});
    });
  });

  srv.Get(R"(/api/jobs/([0-9a-f]+))", [self](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] { send_json(res, 200, to_json(self->jobs.get(req.matches[1])->snapshot())); });
  });

  srv.Post(R"(/api/jobs/([0-9a-f]+)/refine)", [self](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      const auto body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
      if (!body.is_object() || !body.contains("feedback") || !body.at("feedback").is_string()) {
        throw InvalidInput("refine needs a JSON body with a feedback string");
      }
      const std::string id = req.matches[1];
      self->jobs.refine(id, body.at("feedback").get<std::string>());
      send_json(res, 202, {{"id", id}, {"state", to_string(self->jobs.get(id)->state())}});
    });
  });

  srv.Post(R"(/api/jobs/([0-9a-f]+)/confirm)", [self](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      const std::string id = req.matches[1];
      self->jobs.confirm(id);
      send_json(res, 200, {{"id", id}, {"state", to_string(self->jobs.get(id)->state())}});
    });
  });

  srv.Get(R"(/api/jobs/([0-9a-f]+)/events)", [self](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      auto job = self->jobs.get(req.matches[1]);
      std::size_t cursor = 0;
      if (req.has_header("Last-Event-ID")) {
        cursor = parse_cursor(req.get_header_value("Last-Event-ID")) + 1;
      } else if (req.has_param("from")) {
        cursor = parse_cursor(req.get_param_value("from"));
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [self, job, cursor](std::size_t, httplib::DataSink& sink) mutable {
            if (self->stopping) {
              sink.done();
              return true;
            }
            const bool terminal = is_terminal(job->state());
            const auto fresh = job->events_since(cursor);
            for (const auto& e : fresh) {
              const auto frame = sse_frame(e);
              if (!sink.write(frame.data(), frame.size())) return false;
              cursor = e.seq + 1;
            }
            if (terminal && job->events_since(cursor).empty()) {
              sink.done();
              return true;
            }
            if (fresh.empty() && !job->wait_for_events(cursor, self->options.heartbeat)) {
              static constexpr std::string_view beat = ": heartbeat\n\n";
              if (!sink.write(beat.data(), beat.size())) return false;
            }
            return true;
          });
    });
  });

  const auto artifact = [self](const char* file, const char* mime) {
    return [self, file, mime](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        auto job = self->jobs.get(req.matches[1]);
        if (job->state() != JobState::done) {
          throw InvalidTransition(std::string(file) + " is not available while the job is " +
                                  std::string(to_string(job->state())));
        }
        std::string content;
        if (!read_file(job->workspace() / file, content)) throw Error(std::string("cannot read ") + file);
        res.status = 200;
        res.set_content(std::move(content), mime);
      });
    };
  };
  srv.Get(R"(/api/jobs/([0-9a-f]+)/package\.zip)", artifact("package.zip", "application/zip"));
  srv.Get(R"(/api/jobs/([0-9a-f]+)/documentation\.md)", artifact("DOCUMENTATION.md", "text/markdown; charset=utf-8"));
  srv.Get(R"(/api/jobs/([0-9a-f]+)/report\.json)", artifact("report.json", "application/json"));

  srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ApiServer::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port < 0) throw Error("cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ApiServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace forge::orchestrator
