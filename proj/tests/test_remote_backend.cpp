#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include "polarsim/errors.hpp"
#include "polarsim/remote_backend.hpp"

using namespace polarsim;
using json = nlohmann::json;

namespace {

constexpr const char* kKeyVar = "POLARSIM_TEST_REMOTE_KEY";

// Local chat-completion stub on an ephemeral port.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      {
        std::lock_guard lock(mutex_);
        auth_ = req.get_header_value("Authorization");
        bodies_.push_back(req.body);
      }
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int hits() const { return hits_.load(); }
  std::string auth() const {
    std::lock_guard lock(mutex_);
    return auth_;
  }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  mutable std::mutex mutex_;
  std::string auth_;
  std::vector<std::string> bodies_;
};

std::string completion(const std::string& text) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
}

BackendConfig config_for(const std::string& url) {
  BackendConfig config;
  config.kind = BackendKind::remote;
  config.endpoint = url;
  config.model_id = "test-model";
  config.temperature = 0.5;
  config.api_key_env_var = kKeyVar;
  config.max_retries = 2;
  config.timeout = std::chrono::milliseconds(2000);
  config.backoff_initial = std::chrono::milliseconds(1);
  config.backoff_cap = std::chrono::milliseconds(4);
  return config;
}

GenerationRequest request() {
  GenerationRequest r;
  r.agent_name = "A";
  r.political_standpoint = "Republican";
  r.persona = "You are a tester.";
  r.trigger = "Topic: t\n\nContext: c";
  r.instruction = "Say hi.";
  return r;
}

class RemoteBackendTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv(kKeyVar, "sk-test", 1); }
  void TearDown() override { ::unsetenv(kKeyVar); }
};

}  // namespace

TEST_F(RemoteBackendTest, UnreachableEndpointMakesRetriesPlusOneAttempts) {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  probe.stop();
  RemoteBackend backend(config_for("http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"));
  EXPECT_THROW(backend.generate(request()), BackendFailure);
  EXPECT_EQ(backend.attempts(), 3u);
}

TEST_F(RemoteBackendTest, ServerErrorsAreRetriedAgainstStub) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("busy", "text/plain");
  });
  RemoteBackend backend(config_for(stub.url()));
  EXPECT_THROW(backend.generate(request()), BackendFailure);
  EXPECT_EQ(stub.hits(), 3);
}

TEST_F(RemoteBackendTest, RecoversAfterTransientFailures) {
  std::atomic<int> calls{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 429;
      return;
    }
    res.set_content(completion("hello there"), "application/json");
  });
  RemoteBackend backend(config_for(stub.url()));
  EXPECT_EQ(backend.generate(request()), "hello there");
  EXPECT_EQ(stub.hits(), 3);
}

TEST_F(RemoteBackendTest, ClientErrorsFailImmediately) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  RemoteBackend backend(config_for(stub.url()));
  EXPECT_THROW(backend.generate(request()), BackendFailure);
  EXPECT_EQ(stub.hits(), 1);
}

TEST_F(RemoteBackendTest, BlankCompletionsBecomeEmptyCompletion) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("   "), "application/json");
  });
  RemoteBackend backend(config_for(stub.url()));
  EXPECT_THROW(backend.generate(request()), EmptyCompletion);
  EXPECT_EQ(stub.hits(), 3);
}

TEST_F(RemoteBackendTest, SendsBearerKeyAndChatBody) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("ok"), "application/json");
  });
  RemoteBackend backend(config_for(stub.url()));
  ASSERT_EQ(backend.generate(request()), "ok");
  EXPECT_EQ(stub.auth(), "Bearer sk-test");
  const json body = json::parse(stub.bodies().at(0));
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.5);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], assemble_prompt(request()));
}

TEST_F(RemoteBackendTest, AdmissionIsBoundedByMaxInFlight) {
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    const int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --active;
    res.set_content(completion("ok"), "application/json");
  });
  auto config = config_for(stub.url());
  config.max_in_flight = 2;
  RemoteBackend backend(config);
  std::vector<std::jthread> callers;
  for (int i = 0; i < 8; ++i) callers.emplace_back([&] { backend.generate(request()); });
  callers.clear();
  EXPECT_EQ(stub.hits(), 8);
  EXPECT_LE(peak.load(), 2);
}

TEST_F(RemoteBackendTest, KeyComesOnlyFromTheEnvironment) {
  ::unsetenv(kKeyVar);
  EXPECT_THROW(RemoteBackend(config_for("http://127.0.0.1:1/v1/chat/completions")), ConfigError);
  ::setenv(kKeyVar, "", 1);
  EXPECT_THROW(RemoteBackend::api_key_from_env(kKeyVar), ConfigError);
  ::setenv(kKeyVar, "abc", 1);
  EXPECT_EQ(RemoteBackend::api_key_from_env(kKeyVar), "abc");
}

TEST(RemoteBackendStatic, ExtractCompletion) {
  EXPECT_EQ(RemoteBackend::extract_completion(json::parse(completion("hi"))), "hi");
  EXPECT_FALSE(RemoteBackend::extract_completion(json::parse(R"({"choices": []})")).has_value());
  EXPECT_FALSE(RemoteBackend::extract_completion(json::parse(R"({"error": "x"})")).has_value());
}

TEST(RemoteBackendStatic, ParseEndpoint) {
  const auto e = parse_endpoint("https://api.example.com/v1/chat/completions");
  EXPECT_EQ(e.origin, "https://api.example.com");
  EXPECT_EQ(e.path, "/v1/chat/completions");
  const auto local = parse_endpoint("http://127.0.0.1:8080/x");
  EXPECT_EQ(local.origin, "http://127.0.0.1:8080");
  EXPECT_EQ(local.path, "/x");
  EXPECT_THROW(parse_endpoint("not a url"), ConfigError);
}
