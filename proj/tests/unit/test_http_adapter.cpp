#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "acp/tools/http_adapter.hpp"
#include "oracles.hpp"

using namespace acp;

namespace {

class StubServer : public ::testing::Test {
protected:
    void SetUp() override {
        server_.Post("/echo", [](const httplib::Request& req, httplib::Response& res) {
            res.set_content(req.body, "application/json");
        });
        server_.Get("/query", [](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json j = nlohmann::json::object();
            for (const auto& [k, v] : req.params) j[k] = v;
            j["auth"] = req.get_header_value("Authorization");
            j["trace"] = req.get_header_value("X-Trace");
            res.set_content(j.dump(), "application/json");
        });
        server_.Put("/put", [](const httplib::Request&, httplib::Response& res) { res.set_content("put", "text/plain"); });
        server_.Get("/boom", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("upstream exploded", "text/plain");
        });
        server_.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(400));
            res.set_content("late", "text/plain");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ToolAdapterPtr tool(std::string name = "stub", std::string auth_env = "") {
        HttpToolConfig cfg;
        cfg.base_url = "http://127.0.0.1:" + std::to_string(port_);
        cfg.auth_env = std::move(auth_env);
        return make_http_tool(oracle::simple_schema(std::move(name), "echo", {"q"}, {"answer"}), cfg);
    }

    static AgentRequest req(std::string method, std::string endpoint, std::vector<BodyParam> body) {
        AgentRequest r;
        r.method = std::move(method);
        r.endpoint = std::move(endpoint);
        r.body = std::move(body);
        return r;
    }

    static CallContext ctx(int ms = 2000) {
        CallContext c;
        c.node = "h.1";
        c.timeout = std::chrono::milliseconds(ms);
        return c;
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST_F(StubServer, FunctionPostsJsonObjectBody) {
    auto out = tool()->call(req("FUNCTION", "echo", {{"q", "caf\xC3\xA9 \"x\""}, {"n", "2"}}), ctx());
    auto j = nlohmann::json::parse(out);
    EXPECT_EQ(j["q"], "caf\xC3\xA9 \"x\"");
    EXPECT_EQ(j["n"], "2");
}

TEST_F(StubServer, GetSendsQueryStringAndHeaders) {
    auto r = req("GET", "/query", {{"city", "Lisbon & Porto"}, {"days", "3"}});
    r.headers.push_back({"X-Trace", "abc"});
    auto j = nlohmann::json::parse(tool()->call(r, ctx()));
    EXPECT_EQ(j["city"], "Lisbon & Porto");
    EXPECT_EQ(j["days"], "3");
    EXPECT_EQ(j["trace"], "abc");
}

TEST_F(StubServer, CredentialsComeFromTheEnvironment) {
    ::setenv("ACP_TEST_HTTP_SECRET", "s3cret", 1);
    auto j = nlohmann::json::parse(tool("stub", "ACP_TEST_HTTP_SECRET")->call(req("GET", "query", {}), ctx()));
    EXPECT_EQ(j["auth"], "Bearer s3cret");
    ::unsetenv("ACP_TEST_HTTP_SECRET");
    j = nlohmann::json::parse(tool("stub", "ACP_TEST_HTTP_SECRET")->call(req("GET", "query", {}), ctx()));
    EXPECT_EQ(j["auth"], "");
}

TEST_F(StubServer, PutIsRouted) {
    EXPECT_EQ(tool()->call(req("PUT", "put", {{"a", "b"}}), ctx()), "put");
}

TEST_F(StubServer, ServerErrorRaisesToolErrorWithStatus) {
    try {
        tool()->call(req("GET", "boom", {}), ctx());
        FAIL();
    } catch (const ToolError& e) {
        EXPECT_EQ(std::string(e.what()), "HTTP 500: upstream exploded");
    }
}

TEST_F(StubServer, SlowResponseExceedsTimeout) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        tool()->call(req("GET", "slow", {}), ctx(100));
        FAIL();
    } catch (const ToolError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("transport error", 0), 0u) << e.what();
    }
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(390));
}

TEST_F(StubServer, UnsupportedMethodIsAToolError) {
    EXPECT_THROW(tool()->call(req("TRACE", "echo", {}), ctx()), ToolError);
}

TEST(HttpConfig, RejectsMalformedBaseUrls) {
    auto schema = oracle::simple_schema("x", "e", {}, {"v"});
    for (const char* url : {"", "https://example.com", "http://host/path", "ftp://h", "http://"}) {
        HttpToolConfig cfg;
        cfg.base_url = url;
        EXPECT_THROW(make_http_tool(schema, cfg), Error) << url;
    }
}

TEST(HttpConfig, DefaultAuthEnvName) {
    EXPECT_EQ(default_auth_env("open-meteo"), "ACP_TOOL_OPEN_METEO_KEY");
}

TEST(HttpConfig, ClosedPortIsTransportError) {
    HttpToolConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";
    auto t = make_http_tool(oracle::simple_schema("x", "e", {}, {"v"}), cfg);
    AgentRequest r;
    r.method = "GET";
    r.endpoint = "e";
    CallContext c;
    c.timeout = std::chrono::milliseconds(300);
    EXPECT_THROW(t->call(r, c), ToolError);
}
