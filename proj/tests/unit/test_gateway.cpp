#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "ec/direct_solve.hpp"
#include "ec/gateway/api.hpp"
#include "ec/gateway/config.hpp"
#include "ec/gateway/http_adapter.hpp"
#include "ec/gateway/http_server.hpp"
#include "ec/gateway/session_store.hpp"
#include "ec/scripted_adapter.hpp"
#include "test_support.hpp"

using namespace ec;
using namespace ec::gateway;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ec_gateway_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

GatewayConfig test_config() {
  GatewayConfig cfg;
  cfg.pipeline.adapter_timeout = std::chrono::milliseconds(5000);
  return cfg;
}

Api offline_api(GatewayConfig cfg = test_config()) {
  return Api(cfg, std::make_shared<pipeline::ScriptedAdapter>(pipeline::offline_adapter()));
}

std::string error_code(const ApiResponse& r) { return r.body.at("error").at("code").get<std::string>(); }

// Serves an Api on a free port for the lifetime of the object.
class LiveServer {
 public:
  explicit LiveServer(Api& api) : server_(api) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.listen(); });
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  HttpServer server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Config, FlagsBeatEnvironmentBeatFile) {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  const auto file = dir / "ec.conf";
  std::ofstream(file) << "# gateway\nport = 9000\nsamples = 3\nhost = 0.0.0.0\n";
  const auto from_file = resolve_config(file, {}, {});
  EXPECT_EQ(from_file.port, 9000);
  EXPECT_EQ(from_file.pipeline.samples, 3u);
  const auto with_env = resolve_config(file, {{"EC_PORT", "9100"}, {"EC_API_KEY", "sk-test"}}, {});
  EXPECT_EQ(with_env.port, 9100);
  EXPECT_EQ(with_env.host, "0.0.0.0");
  EXPECT_EQ(with_env.api_key, "sk-test");
  const auto with_flag = resolve_config(file, {{"EC_PORT", "9100"}}, {{"port", "9200"}});
  EXPECT_EQ(with_flag.port, 9200);
  const auto defaults = resolve_config(std::nullopt, {}, {});
  EXPECT_EQ(defaults.port, 8080);
  EXPECT_EQ(defaults.adapter, "offline");
  std::filesystem::remove_all(dir);
}

TEST(Config, RejectsSecretsAndBadValues) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return std::string();
  };
  EXPECT_EQ(code([] { (void)parse_config_text("api_key = sk-123\n"); }), "BadConfig");
  EXPECT_EQ(code([] { (void)parse_config_text("colour = blue\n"); }), "BadConfig");
  EXPECT_EQ(code([] { (void)parse_config_text("port 80\n"); }), "BadConfig");
  EXPECT_EQ(code([] { (void)resolve_config(std::nullopt, {}, {{"samples", "9"}}); }), "BadConfig");
  EXPECT_EQ(code([] { (void)resolve_config(std::nullopt, {}, {{"adapter", "psychic"}}); }), "BadConfig");
  EXPECT_EQ(code([] { (void)resolve_config(std::nullopt, {}, {{"adapter", "scripted"}}); }), "BadConfig");
  EXPECT_EQ(parse_config_text("  port = 1 # note\n\n").at("port"), "1");
}

TEST(Store, IdsAreRandomHex) {
  const auto a = SessionStore::new_id(), b = SessionStore::new_id();
  EXPECT_EQ(a.size(), 32u);
  EXPECT_NE(a, b);
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(Store, SnapshotsSurviveRestart) {
  const auto dir = scratch("store");
  std::string id;
  {
    SessionStore store(dir);
    id = store.create();
    auto lease = store.acquire(id);
    lease.session().query = "remember me";
    lease.commit();
  }
  SessionStore again(dir);
  EXPECT_EQ(again.size(), 1u);
  EXPECT_EQ(again.get(id).query, "remember me");
  std::filesystem::remove_all(dir);
}

TEST(Store, OneRequestAtATime) {
  SessionStore store;
  const auto id = store.create();
  {
    auto lease = store.acquire(id);
    try {
      (void)store.acquire(id);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "SessionBusy");
    }
  }
  EXPECT_NO_THROW((void)store.acquire(id));
}

TEST(Store, ExpiredSessionsAreDropped) {
  const auto dir = scratch("expiry");
  std::filesystem::create_directories(dir / "sessions");
  auto s = pipeline::new_session("0123456789abcdef0123456789abcdef");
  s.updated_at -= 7200;
  std::ofstream(dir / "sessions" / (s.id + ".json")) << pipeline::to_json(s).dump();
  SessionStore store(dir, std::chrono::seconds(3600));
  try {
    (void)store.get(s.id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "SessionExpired");
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "sessions" / (s.id + ".json")));
  std::filesystem::remove_all(dir);
}

TEST(Api, StatusCodes) {
  EXPECT_EQ(status_for("SessionNotFound"), 404);
  EXPECT_EQ(status_for("SessionExpired"), 410);
  EXPECT_EQ(status_for("SessionBusy"), 409);
  EXPECT_EQ(status_for("ValidationFailed"), 422);
  EXPECT_EQ(status_for("AdapterTimeout"), 504);
  EXPECT_EQ(status_for("SomethingElse"), 500);
}

TEST(Api, HealthAndSchemas) {
  auto api = offline_api();
  auto h = api.handle("GET", "/v1/healthz", "");
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(h.body.at("status"), "ok");
  auto s = api.handle("GET", "/v1/schemas", "");
  EXPECT_EQ(s.status, 200);
  EXPECT_EQ(s.body.size(), 6u);
}

TEST(Api, UnknownRoutesAndSessions) {
  auto api = offline_api();
  EXPECT_EQ(api.handle("GET", "/v1/nothing", "").status, 404);
  auto r = api.handle("GET", "/v1/sessions/feedfacefeedfacefeedfacefeedface", "");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(error_code(r), "SessionNotFound");
  EXPECT_EQ(api.handle("DELETE", "/v1/sessions", "").status, 405);
  EXPECT_EQ(api.handle("POST", "/v1/solve", "{not json").status, 400);
}

TEST(Api, EvConversationOverJson) {
  auto api = offline_api();
  auto created = api.handle("POST", "/v1/sessions", "");
  ASSERT_EQ(created.status, 201);
  const std::string id = created.body.at("session_id");
  const std::string path = "/v1/sessions/" + id + "/messages";
  auto first = api.handle("POST", path, json{{"text", "I need help optimizing my EV charging schedule"}}.dump());
  ASSERT_EQ(first.status, 200);
  EXPECT_EQ(first.body.at("phase"), "eliciting");
  EXPECT_EQ(first.body.at("kind"), "ev_charging");
  EXPECT_EQ(first.body.at("questions").size(), 5u);
  auto second =
      api.handle("POST", path, json{{"text", "1. 15\n2. 70\n3. home\n4. 12\n5. 0.14*4, 0.06*8"}}.dump());
  ASSERT_EQ(second.status, 200);
  EXPECT_EQ(second.body.at("phase"), "done");
  EXPECT_NEAR(second.body.at("solution").at("objective").get<double>(), 4.2, 1e-6);
  const auto& x = second.body.at("solution").at("variables").at(0).at("values");
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(x.at(t).get<double>(), 0.0, 1e-9);
  auto snapshot = api.handle("GET", "/v1/sessions/" + id, "");
  EXPECT_EQ(snapshot.body.at("phase"), "done");
  EXPECT_EQ(api.handle("POST", path, "{}").status, 400);
}

TEST(Api, GeneralQuestionTimeoutIs504) {
  Api api(test_config(), std::make_shared<pipeline::ScriptedAdapter>(
                             pipeline::ScriptedAdapter::from_file(test::fixture("scripts/timeouts.json"))));
  const std::string id = api.handle("POST", "/v1/sessions", "").body.at("session_id");
  auto r = api.handle("POST", "/v1/sessions/" + id + "/messages",
                      json{{"text", "How can I reduce my energy bill?"}}.dump());
  EXPECT_EQ(r.status, 504);
  EXPECT_EQ(error_code(r), "AdapterTimeout");
  EXPECT_EQ(api.handle("GET", "/v1/sessions/" + id, "").body.at("phase"), "awaiting_query");
}

TEST(Api, DirectSolveMatchesLibrary) {
  auto api = offline_api();
  const auto params = test::read_json(test::fixture("params/pv.json"));
  auto r = api.handle("POST", "/v1/solve", json{{"kind", "pv_sizing"}, {"params", params}}.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_NEAR(r.body.at("variables").at(0).at("value").get<double>(), 300.0, 1e-6);
  const auto lib = pipeline::direct_solve_json(problems::params_from_json(problems::ProblemKind::PvSizing, params));
  EXPECT_EQ(r.body.dump(), lib.dump());
}

TEST(Api, ValidationErrorsCarryFieldDetails) {
  auto api = offline_api();
  auto params = test::read_json(test::fixture("params/batsize.json"));
  params["efficiency"] = 1.3;
  auto r = api.handle("POST", "/v1/solve", json{{"kind", "battery_sizing"}, {"params", params}}.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("error").at("details").at(0).at("field"), "efficiency");
  auto k = api.handle("POST", "/v1/solve", json{{"kind", "toaster"}, {"params", json::object()}}.dump());
  EXPECT_EQ(k.status, 422);
  EXPECT_EQ(error_code(k), "UnknownKind");
}

TEST(Api, BearerTokenGuardsEverythingButHealth) {
  auto cfg = test_config();
  cfg.bearer_token = "s3cret";
  auto api = offline_api(cfg);
  EXPECT_EQ(api.handle("GET", "/v1/schemas", "").status, 401);
  EXPECT_EQ(api.handle("GET", "/v1/schemas", "", "Bearer wrong").status, 401);
  EXPECT_EQ(api.handle("GET", "/v1/schemas", "", "Bearer s3cret").status, 200);
  EXPECT_EQ(api.handle("GET", "/v1/healthz", "").status, 200);
}

TEST(Api, FinishedSessionsAppendTraces) {
  auto cfg = test_config();
  cfg.data_dir = scratch("traces");
  auto api = offline_api(cfg);
  const std::string id = api.handle("POST", "/v1/sessions", "").body.at("session_id");
  const std::string path = "/v1/sessions/" + id + "/messages";
  (void)api.handle("POST", path, json{{"text", "Is a heat pump worth it?"}}.dump());
  auto done = api.handle("POST", path, json{{"text", "1. mild\n2. 0.15\n3. 3000\n4. 2000\n5. 200"}}.dump());
  ASSERT_EQ(done.body.at("phase"), "done") << done.body.dump();
  const auto lines = test::read_text(cfg.data_dir / "traces.jsonl");
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 5);
  std::filesystem::remove_all(cfg.data_dir);
}

TEST(Http, CorsHeadersAndPreflight) {
  auto cfg = test_config();
  cfg.cors_origin = "http://localhost:5173";
  auto api = offline_api(cfg);
  LiveServer server(api);
  httplib::Client client("127.0.0.1", server.port());
  auto pre = client.Options("/v1/sessions");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Headers").find("Authorization"), std::string::npos);
  auto health = client.Get("/v1/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");
  auto created = client.Post("/v1/sessions", "", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(json::parse(created->body).at("session_id").get<std::string>().size(), 32u);
}

TEST(Http, ServesStaticFilesWhenConfigured) {
  auto cfg = test_config();
  cfg.ui_dir = scratch("ui");
  std::filesystem::create_directories(cfg.ui_dir);
  std::ofstream(cfg.ui_dir / "index.html") << "<html>ok</html>";
  auto api = offline_api(cfg);
  {
    LiveServer server(api);
    httplib::Client client("127.0.0.1", server.port());
    auto page = client.Get("/index.html");
    ASSERT_TRUE(page);
    EXPECT_EQ(page->body, "<html>ok</html>");
  }
  std::filesystem::remove_all(cfg.ui_dir);
}

TEST(HttpAdapter, ReadsChoicesAndTopsUp) {
  httplib::Server fake;
  std::atomic<int> calls{0};
  std::string seen_auth;
  fake.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    seen_auth = req.get_header_value("Authorization");
    const auto body = json::parse(req.body);
    EXPECT_EQ(body.at("model"), "m");
    // Ignores n and always returns one choice.
    res.set_content(json{{"choices", {{{"message", {{"content", "reply " + std::to_string(calls.load())}}}}}}}.dump(),
                    "application/json");
  });
  fake.Post("/broken/chat/completions",
            [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = fake.bind_to_any_port("127.0.0.1");
  std::thread t([&] { fake.listen_after_bind(); });

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpModelAdapter adapter(base + "/v1", "m", "key", std::chrono::milliseconds(5000));
  pipeline::PromptRequest req;
  req.text = "hello";
  const auto out = adapter.complete(req, 3);
  EXPECT_EQ(out, (std::vector<std::string>{"reply 1", "reply 2", "reply 3"}));
  EXPECT_EQ(seen_auth, "Bearer key");

  HttpModelAdapter broken(base + "/broken", "m", "", std::chrono::milliseconds(5000));
  try {
    (void)broken.complete(req, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "AdapterHttpError");
  }
  fake.stop();
  t.join();
}
