#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "moon/experiment.hpp"
#include "moon/io.hpp"
#include "moon/service.hpp"
#include "test_scenes.hpp"

namespace moon {
namespace {

namespace fs = std::filesystem;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("moon_service_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ServiceOptions options(std::uint64_t seed = 1) const { return {dir_, seed}; }

  static Json body(const HttpResult& r) { return Json::parse(r.body); }

  static std::string config_body(double start_m = 1.5) {
    return to_json(testing::staircase_config(start_m)).dump();
  }

  static std::string create(SessionService& svc) {
    const auto r = svc.create_session(config_body());
    EXPECT_EQ(r.status, 201) << r.body;
    return body(r)["data"]["session_id"];
  }

  // Runs one trial through the service with the observer's answer.
  static HttpResult step(SessionService& svc, const std::string& id,
                         const SimulatedObserver& obs) {
    const auto next = svc.next_stimulus(id);
    EXPECT_EQ(next.status, 200) << next.body;
    const Trial trial = trial_from_json(body(next)["data"]);
    return svc.submit_response(
        id, to_json(obs.respond(trial, Procedure::Staircase1Up1Down)).dump());
  }

  fs::path dir_;
};

TEST_F(ServiceTest, CreateSession) {
  SessionService svc(options());
  const auto r = svc.create_session(config_body());
  EXPECT_EQ(r.status, 201);
  const Json j = body(r);
  EXPECT_TRUE(j["ok"].get<bool>());
  const std::string id = j["data"]["session_id"];
  EXPECT_GE(id.size(), 16u);
  EXPECT_TRUE(fs::exists(dir_ / (id + ".jsonl")));
}

TEST_F(ServiceTest, InvalidConfigIs400WithField) {
  SessionService svc(options());
  Json cfg = to_json(testing::staircase_config());
  cfg["start_m"] = -1;
  const auto r = svc.create_session(cfg.dump());
  EXPECT_EQ(r.status, 400);
  const Json j = body(r);
  EXPECT_FALSE(j["ok"].get<bool>());
  ASSERT_EQ(j["error"]["fields"].size(), 1u);
  EXPECT_EQ(j["error"]["fields"][0]["field"], "start_m");
  EXPECT_EQ(svc.create_session("{not json").status, 400);
}

TEST_F(ServiceTest, DistinctIdsForIdenticalConfigs) {
  SessionService svc(options());
  EXPECT_NE(create(svc), create(svc));
}

TEST_F(ServiceTest, StimulusSequencing) {
  SessionService svc(options());
  const std::string id = create(svc);
  const auto first = svc.next_stimulus(id);
  ASSERT_EQ(first.status, 200);
  const Json data = body(first)["data"];
  EXPECT_EQ(data["trial_index"], 0);
  EXPECT_EQ(data["presentation"], "SideBySide");
  EXPECT_EQ(data["width_px"], 2 * testing::reference_rig().width_px);
  EXPECT_FALSE(data["image_png_base64"].get<std::string>().empty());
  EXPECT_EQ(data["image_png_base64"].get<std::string>().rfind("iVBORw0KGgo", 0), 0u);

  EXPECT_EQ(svc.next_stimulus(id).status, 409);
  const auto ok = svc.submit_response(id, R"({"trial_index": 0, "judgment": "Larger"})");
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(body(ok)["data"]["status"], "Active");
  EXPECT_EQ(svc.submit_response(id, R"({"trial_index": 0, "judgment": "Larger"})").status, 409);
  EXPECT_EQ(body(svc.next_stimulus(id))["data"]["trial_index"], 1);
  EXPECT_EQ(svc.submit_response(id, R"({"trial_index": 1, "judgment": "Bigger"})").status, 400);
}

TEST_F(ServiceTest, UnknownSession) {
  SessionService svc(options());
  EXPECT_EQ(svc.next_stimulus("nope").status, 404);
  EXPECT_EQ(svc.results("nope").status, 404);
  EXPECT_EQ(svc.session_status("nope").status, 404);
  EXPECT_EQ(svc.submit_response("nope", R"({"trial_index":0,"judgment":"Larger"})").status, 404);
}

TEST_F(ServiceTest, ResultsOfActiveSessionIs409) {
  SessionService svc(options());
  const std::string id = create(svc);
  EXPECT_EQ(svc.results(id).status, 409);
}

TEST_F(ServiceTest, SimulatedSessionEndToEnd) {
  SessionService svc(options());
  const std::string id = create(svc);
  const SimulatedObserver obs(1.25, 0.05, 2024);
  Json last;
  for (int i = 0; i < 500; ++i) {
    const auto r = step(svc, id, obs);
    ASSERT_EQ(r.status, 200) << r.body;
    last = body(r)["data"];
    if (last["status"] == "Complete") break;
  }
  EXPECT_EQ(last["status"], "Complete");
  EXPECT_EQ(last["reversals_so_far"], 8);
  EXPECT_EQ(svc.next_stimulus(id).status, 410);
  const auto res = svc.results(id);
  ASSERT_EQ(res.status, 200);
  const Json data = body(res)["data"];
  EXPECT_LT(std::abs(data["pse"].get<double>() - 1.25), 0.05);
  EXPECT_EQ(data["log_url"], "/v1/sessions/" + id + "/log");

  const auto log = svc.session_log(id);
  EXPECT_EQ(log.content_type, "application/x-ndjson");
  EXPECT_NE(log.body.find("\"type\":\"complete\""), std::string::npos);
}

TEST_F(ServiceTest, RestartRestoresSessions) {
  std::string id;
  Json before;
  const SimulatedObserver obs(1.4, 0.05, 8);
  {
    SessionService svc(options(11));
    id = create(svc);
    for (int i = 0; i < 6; ++i) step(svc, id, obs);
    svc.next_stimulus(id);  // leave a trial pending
    before = body(svc.session_status(id))["data"];
  }
  // Simulate a torn write at crash time.
  {
    std::ofstream f(dir_ / (id + ".jsonl"), std::ios::app | std::ios::binary);
    f << R"({"index":99,"ty)";
  }
  SessionService svc(options(12));
  EXPECT_EQ(svc.session_count(), 1u);
  EXPECT_EQ(body(svc.session_status(id))["data"], before);
  EXPECT_EQ(svc.next_stimulus(id).status, 409);

  const Trial pending = trial_from_json(before["pending_trial"]);
  EXPECT_EQ(svc.submit_response(id, to_json(obs.respond(pending, Procedure::Staircase1Up1Down)).dump())
                .status,
            200);
  for (int i = 0; i < 500; ++i)
    if (body(step(svc, id, obs))["data"]["status"] == "Complete") break;
  EXPECT_EQ(svc.results(id).status, 200);

  // The journal is still a clean sequence of records.
  std::ifstream in(dir_ / (id + ".jsonl"));
  std::string line;
  int index = 0;
  while (std::getline(in, line)) EXPECT_EQ(Json::parse(line)["index"], index++);
}

TEST_F(ServiceTest, ConcurrentSessions) {
  SessionService svc(options());
  std::vector<std::thread> workers;
  std::atomic<int> completed{0};
  for (int w = 0; w < 8; ++w)
    workers.emplace_back([&, w] {
      const std::string id = create(svc);
      const SimulatedObserver obs(1.0 + 0.05 * w, 0.02, static_cast<std::uint64_t>(w));
      for (int i = 0; i < 500; ++i)
        if (body(step(svc, id, obs))["data"]["status"] == "Complete") {
          ++completed;
          break;
        }
    });
  for (auto& t : workers) t.join();
  EXPECT_EQ(completed.load(), 8);
  EXPECT_EQ(svc.session_count(), 8u);
}

TEST_F(ServiceTest, HttpRoutes) {
  SessionService svc(options());
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_TRUE(Json::parse(health->body)["ok"].get<bool>());

  auto created = client.Post("/v1/sessions", config_body(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = Json::parse(created->body)["data"]["session_id"];

  auto next = client.Post("/v1/sessions/" + id + "/next", "", "application/json");
  ASSERT_TRUE(next);
  EXPECT_EQ(next->status, 200);
  auto again = client.Get("/v1/sessions/" + id + "/next");
  EXPECT_EQ(again->status, 409);
  auto resp = client.Post("/v1/sessions/" + id + "/responses",
                          R"({"trial_index":0,"judgment":"Smaller","latency_ms":250})",
                          "application/json");
  EXPECT_EQ(resp->status, 200);
  auto status = client.Get("/v1/sessions/" + id);
  EXPECT_EQ(status->status, 200);
  EXPECT_EQ(Json::parse(status->body)["data"]["trial_count"], 1);
  EXPECT_EQ(client.Get("/v1/sessions/" + id + "/results")->status, 409);
  EXPECT_EQ(client.Get("/v1/sessions/unknownsession/results")->status, 404);
  auto missing = client.Get("/v1/nothing");
  EXPECT_EQ(missing->status, 404);
  EXPECT_FALSE(Json::parse(missing->body)["ok"].get<bool>());
  auto log = client.Get("/v1/sessions/" + id + "/log");
  EXPECT_EQ(log->status, 200);
  EXPECT_EQ(log->get_header_value("Content-Type"), "application/x-ndjson");

  server.stop();
  listener.join();
}

}  // namespace
}  // namespace moon
