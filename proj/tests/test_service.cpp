#include <doctest.h>

#include <httplib.h>

#include <json.hpp>
#include <fstream>
#include <thread>

#include "lfr/alpha_mask.hpp"
#include "lfr/error.hpp"
#include "lfr/image_io.hpp"
#include "lfr/pipeline.hpp"
#include "lfr/refocus.hpp"
#include "lfr/service.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace lfr;
using json = nlohmann::json;

namespace {

const SyntheticLightField& scene() {
  static const auto s = fixtures::two_layer(0.0, 1.0, {12, 12, 31, 31}, 5, 44, 44, 51, 1.5, 3);
  return s;
}

std::string header(const HttpReply& r, const std::string& name) {
  for (const auto& [k, v] : r.headers)
    if (k == name) return v;
  return {};
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string reason(const HttpReply& r) { return json::parse(r.body).value("error", ""); }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("fifo gate admits in ticket order") {
    FifoGate gate;
    std::vector<std::uint64_t> admitted;
    std::vector<std::thread> threads;
    {
      auto first = gate.enter();  // hold the gate while the others queue up
      for (int i = 0; i < 8; ++i)
        threads.emplace_back([&] {
          auto turn = gate.enter();
          admitted.push_back(turn.ticket());
        });
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      CHECK(admitted.empty());
    }
    for (auto& t : threads) t.join();
    REQUIRE(admitted.size() == 8);
    for (std::size_t i = 0; i < admitted.size(); ++i) CHECK(admitted[i] == i + 1);
  }

  TEST_CASE("stable hash") {
    CHECK(stable_hash("") == "cbf29ce484222325");
    CHECK(stable_hash("a") == "af63dc4c8601ec8c");
    CHECK(stable_hash("abc") != stable_hash("acb"));
  }

  TEST_CASE("job keys depend on rois and config only") {
    const std::vector<RoiSpec> rois{{{1, 2, 3, 4}}};
    PipelineConfig cfg;
    const auto k = RefocusService::job_key(rois, cfg);
    CHECK(k.size() == 16);
    CHECK(RefocusService::job_key(rois, cfg) == k);
    auto other = cfg;
    other.alpha_default = 1.2;
    CHECK(RefocusService::job_key(rois, other) != k);
    CHECK(RefocusService::job_key({{{1, 2, 3, 5}}}, cfg) != k);
    CHECK(RefocusService::job_key({{{1, 2, 3, 4}, DepthRange::wide}}, cfg) != k);
  }

  TEST_CASE("meta, middle SAI and health") {
    RefocusService svc(scene().lf, {});
    const auto meta = json::parse(svc.meta().body);
    CHECK(meta["grid"] == json::array({5, 5}));
    CHECK(meta["spatial"] == json::array({44, 44}));
    CHECK(meta["channels"] == 3);
    CHECK(meta["sparse"] == false);
    const auto png = svc.middle_sai();
    CHECK(png.content_type == "image/png");
    CHECK(decode_png(bytes_of(png.body)).image.height() == 44);
    CHECK(svc.health().status == 200);

    RefocusService sparse(extract_cross(scene().lf), {});
    CHECK(json::parse(sparse.meta().body)["sparse"] == true);
  }

  TEST_CASE("empty roi list refocuses uniformly") {
    RefocusService svc(scene().lf, {});
    const auto r = svc.refocus(R"({"rois": [], "mode": "dense", "alpha_default": 1.0})");
    REQUIRE(r.status == 200);
    CHECK(header(r, "X-Level-Count") == "1");
    const auto img = decode_png(bytes_of(r.body)).image;
    CHECK(img == decode_png(encode_png(refocus(scene().lf, 1.0))).image);
  }

  TEST_CASE("results are cached and masks retrievable") {
    RefocusService svc(scene().lf, {});
    const std::string body = R"({"rois": [{"rect": [12, 12, 31, 31], "phi": "narrow"}], "mode": "dense"})";
    const auto first = svc.refocus(body);
    REQUIRE(first.status == 200);
    CHECK(header(first, "X-Cache") == "miss");
    const auto second = svc.refocus(body);
    CHECK(header(second, "X-Cache") == "hit");
    CHECK(second.body == first.body);
    CHECK(svc.jobs_executed() == 1);
    CHECK(svc.cache_size() == 1);

    const auto key = header(first, "X-Job-Key");
    const auto mask_reply = svc.mask(key);
    REQUIRE(mask_reply.status == 200);
    const auto mask = decode_amsk(bytes_of(mask_reply.body));
    CHECK(mask.width == 44);
    CHECK(mask.quantized);
    const auto direct = run_dense(scene().lf, {{{12, 12, 31, 31}}}, {});
    CHECK(mask == direct.mask);
    CHECK(svc.mask("0000000000000000").status == 404);
    CHECK(svc.mask("").status == 400);
  }

  TEST_CASE("request validation reasons") {
    RefocusService svc(scene().lf, {});
    auto check = [&](const std::string& body, int status, const std::string& why) {
      const auto r = svc.refocus(body);
      CHECK(r.status == status);
      CHECK(reason(r) == why);
    };
    check("{", 400, "malformed_json");
    check("[]", 400, "malformed_request");
    check(R"({"mode": "dense"})", 400, "malformed_request");
    check(R"({"rois": [{"rect": [1, 2]}]})", 400, "malformed_rois");
    check(R"({"rois": [{"rect": [1, 2, 3, 4], "phi": "deep"}]})", 400, "malformed_rois");
    check(R"({"rois": [{"rect": [0, 0, 44, 10]}]})", 422, "roi_out_of_bounds");
    check(R"({"rois": [], "mode": "fast"})", 422, "invalid_mode");
    check(R"({"rois": [], "restore": "yes"})", 400, "malformed_request");
    check(R"({"rois": [], "alpha_default": "x"})", 400, "malformed_request");
    CHECK(svc.jobs_executed() == 0);

    RefocusService sparse(extract_cross(scene().lf), {});
    const auto r = sparse.refocus(R"({"rois": [], "mode": "dense"})");
    CHECK(r.status == 422);
    CHECK(reason(r) == "dense_requires_full_grid");
  }

  TEST_CASE("restore failure is reported in a header") {
    PipelineConfig cfg;
    cfg.restore_command = "/nonexistent/lf-restore";
    RefocusService svc(extract_cross(scene().lf), cfg);
    const auto r = svc.refocus(R"({"rois": [], "mode": "sparse", "restore": true})");
    CHECK(r.status == 200);
    CHECK_FALSE(header(r, "X-Restore-Error").empty());
  }

  TEST_CASE("http round trip") {
    RefocusService svc(scene().lf, {});
    testutil::TempDir ui;
    std::ofstream(ui / "index.html") << "<html>roi</html>";
    HttpServer server(svc, {"127.0.0.1", 0, ui.path()});
    const int port = server.bind();
    std::thread t([&] { server.listen(); });

    httplib::Client cli("127.0.0.1", port);
    for (int i = 0; i < 100 && !cli.Get("/healthz"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto meta = cli.Get("/lf/meta");
    REQUIRE(meta);
    CHECK(meta->status == 200);
    CHECK(json::parse(meta->body)["grid"] == json::array({5, 5}));

    auto sai = cli.Get("/lf/middle-sai");
    REQUIRE(sai);
    CHECK(sai->get_header_value("Content-Type") == "image/png");

    const std::string body = R"({"rois": [{"rect": [2, 2, 20, 20], "phi": "wide"}], "mode": "sparse"})";
    auto res = cli.Post("/refocus", body, "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto key = res->get_header_value("X-Job-Key");
    CHECK(res->body == svc.refocus(body).body);

    auto mask = cli.Get("/refocus/mask?job=" + key);
    REQUIRE(mask);
    CHECK(mask->status == 200);
    CHECK(decode_amsk(bytes_of(mask->body)).height == 44);

    auto bad = cli.Post("/refocus", R"({"rois": [{"rect": [0, 0, 99, 99]}]})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(json::parse(bad->body)["error"] == "roi_out_of_bounds");

    auto page = cli.Get("/index.html");
    REQUIRE(page);
    CHECK(page->body == "<html>roi</html>");

    server.stop();
    t.join();
  }

  TEST_CASE("concurrent requests are all answered") {
    RefocusService svc(scene().lf, {});
    std::vector<std::thread> threads;
    std::vector<HttpReply> replies(4);
    for (int i = 0; i < 4; ++i)
      threads.emplace_back([&, i] {
        replies[i] = svc.refocus(json{{"rois", json::array({{{"rect", {i, i, 20 + i, 20 + i}}}})}}.dump());
      });
    for (auto& t : threads) t.join();
    for (const auto& r : replies) CHECK(r.status == 200);
    CHECK(svc.jobs_executed() == 4);
  }

  TEST_CASE("bind addresses") {
    CHECK(parse_bind_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
    CHECK(parse_bind_address(":9000").first == "0.0.0.0");
    CHECK_THROWS_AS(parse_bind_address("localhost"), ValidationError);
    CHECK_THROWS_AS(parse_bind_address("h:99999"), ValidationError);
    CHECK_THROWS_AS(parse_bind_address("h:12x"), ValidationError);
  }
}
