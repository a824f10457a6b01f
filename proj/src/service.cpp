#include "moon/service.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "moon/encode.hpp"
#include "moon/error.hpp"
#include "moon/session_log.hpp"

namespace moon {

namespace {

constexpr std::size_t kIdLength = 24;
constexpr std::string_view kIdAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

HttpResult ok(const Json& data, int status = 200) {
  return {status, Json{{"ok", true}, {"data", data}}.dump()};
}

HttpResult error(int status, std::string_view code, const std::string& message,
                 const Json& fields = Json::array()) {
  return {status, Json{{"ok", false},
                       {"error",
                        {{"code", code}, {"message", message}, {"fields", fields}}}}
                      .dump()};
}

HttpResult from_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NotFound: return error(404, "not_found", e.what());
    case ErrorKind::Sequencing:
    case ErrorKind::NotReady: return error(409, to_string(e.kind()), e.what());
    case ErrorKind::SessionOver: return error(410, "session_over", e.what());
    case ErrorKind::Io: return error(500, "io", e.what());
    default: break;
  }
  // Validation messages start with "field '<name>'".
  Json fields = Json::array();
  const std::string msg = e.what();
  const std::string prefix = "field '";
  if (msg.rfind(prefix, 0) == 0) {
    const auto end = msg.find('\'', prefix.size());
    if (end != std::string::npos)
      fields.push_back({{"field", msg.substr(prefix.size(), end - prefix.size())},
                        {"message", msg}});
  }
  return error(400, to_string(e.kind()), msg, fields);
}

std::string base64(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_id(const std::string& id) {
  return id.size() == kIdLength &&
         id.find_first_not_of(kIdAlphabet) == std::string::npos;
}

}  // namespace

struct SessionService::Entry {
  std::mutex mutex;
  std::string id;
  std::string created_at;
  std::ofstream file;
  std::unique_ptr<JournaledSession> session;

  LineSink sink() {
    return [this](std::string_view line) {
      file.write(line.data(), static_cast<std::streamsize>(line.size()));
      file.flush();
      if (!file) fail(ErrorKind::Io, "failed to append to journal of " + id);
    };
  }
};

SessionService::SessionService(ServiceOptions options)
    : options_(std::move(options)),
      id_state_(options_.id_seed ? *options_.id_seed
                                 : (std::uint64_t{std::random_device{}()} << 32) ^
                                       std::random_device{}()) {
  std::filesystem::create_directories(options_.data_dir);
  recover();
}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

std::string SessionService::fresh_id() {
  std::lock_guard lock(id_mutex_);
  std::mt19937_64 gen(id_state_);
  for (;;) {
    std::string id;
    for (std::size_t i = 0; i < kIdLength; ++i)
      id += kIdAlphabet[gen() % kIdAlphabet.size()];
    id_state_ = gen();
    std::shared_lock map_lock(map_mutex_);
    if (!sessions_.contains(id) &&
        !std::filesystem::exists(options_.data_dir / (id + ".jsonl")))
      return id;
  }
}

void SessionService::recover() {
  for (const auto& dirent : std::filesystem::directory_iterator(options_.data_dir)) {
    const auto& path = dirent.path();
    if (path.extension() != ".jsonl" || !valid_id(path.stem().string())) continue;
    std::string content;
    {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      content = ss.str();
    }
    // Drop a torn trailing record so new records start on a fresh line.
    const auto last_newline = content.rfind('\n');
    const std::size_t valid = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (valid == 0) continue;
    content.resize(valid);
    std::filesystem::resize_file(path, valid);

    auto entry = std::make_shared<Entry>();
    entry->id = path.stem().string();
    entry->file.open(path, std::ios::binary | std::ios::app);
    std::istringstream in(content);
    entry->session = std::make_unique<JournaledSession>(
        JournaledSession::replay(in, entry->sink()));
    const Json first = Json::parse(content.substr(0, content.find('\n')));
    entry->created_at = first["payload"].value("created_at", "");
    sessions_.emplace(entry->id, std::move(entry));
  }
}

std::shared_ptr<SessionService::Entry> SessionService::find(
    const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorKind::NotFound, "unknown session '" + id + "'");
  return it->second;
}

HttpResult SessionService::health() const {
  return ok({{"status", "ok"}, {"sessions", session_count()}});
}

HttpResult SessionService::create_session(const std::string& body) {
  try {
    SessionConfig config = session_config_from_json(parse_json(body));
    auto entry = std::make_shared<Entry>();
    entry->id = fresh_id();
    entry->created_at = utc_now();
    entry->file.open(options_.data_dir / (entry->id + ".jsonl"),
                     std::ios::binary | std::ios::trunc);
    if (!entry->file) fail(ErrorKind::Io, "cannot create journal for " + entry->id);
    entry->session = std::make_unique<JournaledSession>(
        std::move(config), entry->sink(), Json{{"created_at", entry->created_at}});
    Json data = {{"session_id", entry->id}, {"created_at", entry->created_at}};
    {
      std::unique_lock lock(map_mutex_);
      sessions_.emplace(entry->id, std::move(entry));
    }
    return ok(data, 201);
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResult SessionService::session_status(const std::string& id) {
  try {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    const SessionState& s = entry->session->state();
    Json data = {{"session_id", id},
                 {"created_at", entry->created_at},
                 {"status", to_string(s.status())},
                 {"procedure", to_string(s.config().procedure)},
                 {"presentation", to_string(s.config().presentation)},
                 {"trial_count", s.trials().size()},
                 {"reversals_so_far", s.reversals().size()},
                 {"reversals_target", s.config().reversals_to_stop},
                 {"current_m", s.current_m()}};
    data["pending_trial"] =
        s.has_pending_trial() ? to_json(s.trials().back()) : Json(nullptr);
    return ok(data);
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResult SessionService::next_stimulus(const std::string& id) {
  try {
    auto entry = find(id);
    Trial trial;
    SessionConfig config;
    {
      std::lock_guard lock(entry->mutex);
      trial = entry->session->next_stimulus();
      config = entry->session->state().config();
    }
    // Rendering happens outside the session lock.
    const StereoScene scene = trial_scene(config, trial.stimulus_m, trial.index);
    const RasterImage image =
        present(render_stereo(config.rig, scene), config.presentation);
    Json data = to_json(trial);
    data["presentation"] = to_string(config.presentation);
    data["width_px"] = image.width();
    data["height_px"] = image.height();
    data["moon_angular_diameter_deg"] = scene.moon.angular_diameter.deg();
    data["image_png_base64"] = base64(encode_image(image, ImageFormat::Png));
    return ok(data);
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResult SessionService::submit_response(const std::string& id,
                                           const std::string& body) {
  try {
    auto entry = find(id);
    const Response response = response_from_json(parse_json(body));
    std::lock_guard lock(entry->mutex);
    entry->session->record_response(response);
    const SessionState& s = entry->session->state();
    return ok({{"status", to_string(s.status())},
               {"reversals_so_far", s.reversals().size()}});
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResult SessionService::results(const std::string& id) {
  try {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    const SessionState& s = entry->session->state();
    return ok({{"pse", s.estimate_pse()},
               {"trial_count", s.trials().size()},
               {"reversals", s.reversals()},
               {"log_url", "/v1/sessions/" + id + "/log"}});
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResult SessionService::session_log(const std::string& id) {
  try {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    std::ifstream in(options_.data_dir / (id + ".jsonl"), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {200, ss.str(), "application/x-ndjson"};
  } catch (const Error& e) {
    return from_error(e);
  }
}

void SessionService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/v1/health", [this, reply](const httplib::Request&,
                                         httplib::Response& res) {
    reply(res, health());
  });
  server.Post("/v1/sessions", [this, reply](const httplib::Request& req,
                                            httplib::Response& res) {
    reply(res, create_session(req.body));
  });
  server.Get(R"(/v1/sessions/([A-Za-z0-9]+))",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, session_status(req.matches[1]));
             });
  auto next = [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, next_stimulus(req.matches[1]));
  };
  server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/next)", next);
  server.Post(R"(/v1/sessions/([A-Za-z0-9]+)/next)", next);
  server.Post(R"(/v1/sessions/([A-Za-z0-9]+)/responses)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, submit_response(req.matches[1], req.body));
              });
  server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/results)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, results(req.matches[1]));
             });
  server.Get(R"(/v1/sessions/([A-Za-z0-9]+)/log)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, session_log(req.matches[1]));
             });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty())
      res.set_content(error(res.status, "http", "no such route").body,
                      "application/json");
  });
}

void serve(SessionService& service, const std::string& host, int port,
           const std::function<void()>& on_listening) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  // Block before any server thread exists so only the waiter sees them.
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  server.set_socket_options([](int sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    fail(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  if (on_listening) on_listening();
  std::atomic<bool> done{false};
  std::thread waiter([&] {
    const timespec tick{0, 200'000'000};
    while (!done.load()) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0) {
        server.stop();
        return;
      }
    }
  });
  server.listen_after_bind();
  done = true;
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
}

}  // namespace moon
