#include <doctest.h>

#include <sstream>
#include <thread>

#include <httplib.h>

#include "energysaver/core/json.hpp"
#include "energysaver/core/power.hpp"
#include "energysaver/ingestd/daemon.hpp"
#include "energysaver/simdevice/publisher.hpp"
#include "energysaver/util/time.hpp"
#include "energysaver/wirebus/broker.hpp"
#include "energysaver/wirebus/client.hpp"
#include "energysaver/wirebus/topic.hpp"
#include "testutil.hpp"

using namespace energysaver;
using core::SensorId;

namespace {

struct Pipeline {
    testutil::TempDir dir{"ingest"};
    std::unique_ptr<wirebus::Broker> broker;
    std::unique_ptr<tsstore::Store> store;
    forecast::ForecastRegistry registry;
    std::unique_ptr<ingestd::IngestDaemon> daemon;
    std::unique_ptr<wirebus::Client> publisher;

    explicit Pipeline(std::vector<std::string> api_tokens = {}) {
        wirebus::Broker::Options bopts;
        bopts.listen_host = "127.0.0.1";
        bopts.port = 0;
        bopts.tokens = {"tok"};
        broker = wirebus::Broker::serve(bopts);

        store = tsstore::Store::open(dir.path());

        ingestd::IngestConfig cfg;
        cfg.broker_host = "127.0.0.1";
        cfg.broker_port = broker->port();
        cfg.broker_token = "tok";
        cfg.data_dir = dir.path();
        cfg.http_host = "127.0.0.1";
        cfg.http_port = 0;
        cfg.api_tokens = std::move(api_tokens);
        cfg.backoff_base_ms = 50;
        cfg.backoff_cap_ms = 400;
        daemon = ingestd::IngestDaemon::start(cfg, *store, &registry);

        wirebus::Client::Options copts;
        copts.host = "127.0.0.1";
        copts.port = broker->port();
        copts.client_id = "test-pub";
        copts.token = "tok";
        publisher = wirebus::Client::connect(copts);
        wait_connected();
    }

    void wait_connected() {
        for (int i = 0; i < 500 && !daemon->broker_connected(); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        REQUIRE(daemon->broker_connected());
    }

    void publish_reading(const std::string& sensor, std::int64_t ts) {
        const auto reading = core::make_reading(SensorId(sensor), ts, 127.0, 2.0, 600.0);
        publisher->publish(wirebus::reading_topic(SensorId(sensor)),
                           core::reading_to_payload(reading));
    }

    void publish_raw(const std::string& sensor, const std::string& payload) {
        publisher->publish("energysaver/" + sensor + "/reading", payload);
    }

    bool wait_received(std::uint64_t want, int timeout_ms = 5000) {
        for (int waited = 0; waited < timeout_ms; waited += 10) {
            if (daemon->stats().received() >= want) return true;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        return daemon->stats().received() >= want;
    }

    httplib::Client http() {
        httplib::Client client("127.0.0.1", daemon->http_port());
        client.set_read_timeout(5, 0);
        return client;
    }
};

}  // namespace

TEST_CASE("valid reading flows broker -> daemon -> store -> http") {
    Pipeline pipe;
    pipe.publish_reading("s1", 1000);
    REQUIRE(pipe.wait_received(1));
    for (int i = 0; i < 200 && pipe.store->count("s1") == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.store->count("s1") == 1);
    CHECK(pipe.daemon->stats().accepted() == 1);

    auto http = pipe.http();
    const auto res = http.Get("/api/v1/sensors/s1/latest");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["ts_ms"] == 1000);
    CHECK(body["power"] == 254.0);
}

TEST_CASE("malformed payloads are counted and the daemon keeps running") {
    Pipeline pipe;
    pipe.publish_raw("s1", "not json");
    REQUIRE(pipe.wait_received(1));
    CHECK(pipe.daemon->stats().rejected(ingestd::RejectReason::Malformed) == 1);

    pipe.publish_reading("s1", 2000);
    REQUIRE(pipe.wait_received(2));
    for (int i = 0; i < 200 && pipe.store->count("s1") == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.store->count("s1") == 1);
    CHECK(pipe.daemon->stats().accepted() == 1);
}

TEST_CASE("replayed timestamps are rejected as non-monotonic") {
    Pipeline pipe;
    pipe.publish_reading("s1", 5000);
    pipe.publish_reading("s1", 5000);  // duplicate
    REQUIRE(pipe.wait_received(2));
    for (int i = 0; i < 200 && pipe.daemon->stats().accepted() == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.daemon->stats().accepted() == 1);
    CHECK(pipe.daemon->stats().rejected(ingestd::RejectReason::NonMonotonicTimestamp) == 1);
    CHECK(pipe.store->count("s1") == 1);
}

TEST_CASE("out-of-range readings are rejected with the validation reason") {
    Pipeline pipe;
    const auto reading = core::make_reading(SensorId("s1"), 100, 500.0, 2.0, 600.0);  // 500 V
    pipe.publish_raw("s1", core::reading_to_payload(reading));
    REQUIRE(pipe.wait_received(1));
    for (int i = 0; i < 200 && pipe.daemon->stats().rejected_total() == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.daemon->stats().rejected(ingestd::RejectReason::VoltageOutOfRange) == 1);
    CHECK(pipe.store->count("s1") == 0);
}

TEST_CASE("stats identity holds under interleaved valid and invalid publishes") {
    Pipeline pipe;
    std::int64_t ts = 0;
    int published = 0;
    for (int round = 0; round < 30; ++round) {
        pipe.publish_reading("s1", ts += 1000);
        ++published;
        if (round % 3 == 0) {
            pipe.publish_raw("s1", "garbage");
            ++published;
        }
        if (round % 5 == 0) {
            pipe.publish_reading("s1", ts);  // duplicate timestamp
            ++published;
        }
    }
    REQUIRE(pipe.wait_received(static_cast<std::uint64_t>(published)));
    const auto& stats = pipe.daemon->stats();
    CHECK(stats.received() == static_cast<std::uint64_t>(published));
    CHECK(stats.received() == stats.accepted() + stats.rejected_total());

    auto http = pipe.http();
    const auto res = http.Get("/api/v1/stats");
    REQUIRE(res);
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["received"] == stats.received());
    CHECK(body["accepted"] == stats.accepted());
}

TEST_CASE("http requires a bearer token when tokens are configured") {
    Pipeline pipe({"web-secret"});
    auto http = pipe.http();

    const auto no_token = http.Get("/api/v1/stats");
    REQUIRE(no_token);
    CHECK(no_token->status == 401);
    const auto parsed = nlohmann::json::parse(no_token->body);
    CHECK(parsed.contains("error"));

    const auto wrong = http.Get("/api/v1/stats", {{"Authorization", "Bearer nope"}});
    REQUIRE(wrong);
    CHECK(wrong->status == 401);

    const auto right = http.Get("/api/v1/stats", {{"Authorization", "Bearer web-secret"}});
    REQUIRE(right);
    CHECK(right->status == 200);
}

TEST_CASE("sensor listing, readings ranges and parameter validation") {
    Pipeline pipe;
    for (int i = 1; i <= 5; ++i) pipe.publish_reading("s1", i * 1000);
    pipe.publish_reading("s2", 1000);
    REQUIRE(pipe.wait_received(6));
    for (int i = 0; i < 200 && pipe.daemon->stats().accepted() < 6; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto http = pipe.http();
    const auto sensors = http.Get("/api/v1/sensors");
    REQUIRE(sensors);
    const auto list = nlohmann::json::parse(sensors->body);
    REQUIRE(list["sensors"].size() == 2);
    CHECK(list["sensors"][0]["sensor_id"] == "s1");
    CHECK(list["sensors"][0]["count"] == 5);

    const auto range = http.Get("/api/v1/sensors/s1/readings?from_ms=2000&to_ms=4000");
    REQUIRE(range);
    const auto docs = nlohmann::json::parse(range->body);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0]["ts_ms"] == 2000);
    CHECK(docs[1]["ts_ms"] == 3000);

    CHECK(http.Get("/api/v1/sensors/unknown/latest")->status == 404);
    CHECK(http.Get("/api/v1/sensors/unknown/readings")->status == 404);
    CHECK(http.Get("/api/v1/sensors/s1/readings?from_ms=abc")->status == 400);
    CHECK(http.Get("/api/v1/sensors/s1/readings?from_ms=5&to_ms=1")->status == 400);
}

TEST_CASE("csv export over http matches the store byte for byte") {
    Pipeline pipe;
    for (int i = 1; i <= 10; ++i) pipe.publish_reading("s1", i * 1000);
    REQUIRE(pipe.wait_received(10));
    for (int i = 0; i < 200 && pipe.store->count("s1") < 10; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    std::ostringstream direct;
    pipe.store->export_csv("s1", 2000, 9000, direct);

    auto http = pipe.http();
    const auto res = http.Get("/api/v1/sensors/s1/export.csv?from_ms=2000&to_ms=9000");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == direct.str());
    CHECK(res->get_header_value("Content-Type").substr(0, 8) == "text/csv");
}

TEST_CASE("forecast endpoint: 404 before any report, then the registered report") {
    Pipeline pipe;
    auto http = pipe.http();
    CHECK(http.Get("/api/v1/sensors/s1/forecast/latest")->status == 404);

    nlohmann::json fake;
    fake["sensor"] = "s1";
    fake["mse"] = 0.01;
    pipe.registry.put("s1", fake);
    const auto res = http.Get("/api/v1/sensors/s1/forecast/latest");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body) == fake);
}

TEST_CASE("forecast endpoint falls back to the persisted report") {
    Pipeline pipe;
    // A report persisted by an earlier process: registry is empty, only the
    // store has it.
    nlohmann::json report;
    report["sensor"] = "s2";
    report["rmse"] = 0.05;
    nlohmann::json doc;
    doc["sensor_id"] = forecast::forecast_store_key(SensorId("s2"));
    doc["ts_ms"] = 12345;
    doc["report_json"] = report.dump();
    pipe.store->append(tsstore::Document::from_object(doc));

    auto http = pipe.http();
    const auto res = http.Get("/api/v1/sensors/s2/forecast/latest");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body) == report);

    // internal forecast logs never show up in the sensor listing
    const auto sensors = http.Get("/api/v1/sensors");
    const auto listing = nlohmann::json::parse(sensors->body);
    for (const auto& entry : listing["sensors"])
        CHECK(entry["sensor_id"].get<std::string>().rfind("__forecast__", 0) != 0);
}

TEST_CASE("a real forecast job feeds the http endpoint through the registry") {
    Pipeline pipe;
    // Two months of hourly history appended directly to the store.
    const std::int64_t start = util::civil_to_epoch_ms(2019, 1, 1);
    const std::int64_t end = util::civil_to_epoch_ms(2019, 3, 1);
    simdevice::LoadProfile profile;
    profile.seed = 3;
    for (std::int64_t ts = start; ts < end; ts += util::kMsPerHour)
        pipe.store->append(tsstore::Document::from_reading(
            simdevice::generate_reading(profile, SensorId("hist"), ts, 3600.0)));

    forecast::JobConfig job;
    job.train.window_len = 48;
    job.train.epochs = 3;
    job.train.hidden_size = 6;
    job.train.seed = 1;
    job.step_ms = util::kMsPerHour;
    job.now_ms = end;
    const auto report = forecast::run_forecast_job(*pipe.store, SensorId("hist"), job,
                                                   &pipe.registry);
    CHECK(report.one_step.rmse == doctest::Approx(std::sqrt(report.one_step.mse)).epsilon(1e-12));

    // Leakage guard: the scaler saw the training side only, so its bounds are
    // exactly the indexed training min/max and the normalized training max is 1.
    {
        const auto series = forecast::aggregate_store_series(*pipe.store, SensorId("hist"),
                                                             job.step_ms);
        const auto boundary = util::month_floor_ms(series.ts_ms.back());
        const auto [train_raw, test_raw] = forecast::split_by_boundary(series, boundary);
        const auto indexed_train = forecast::fixed_base_index(train_raw, report.base_value);
        const auto [lo, hi] =
            std::minmax_element(indexed_train.values.begin(), indexed_train.values.end());
        CHECK(report.scaler_min == doctest::Approx(*lo).epsilon(1e-12));
        CHECK(report.scaler_max == doctest::Approx(*hi).epsilon(1e-12));
        const forecast::Scaler scaler(report.scaler_min, report.scaler_max);
        CHECK(scaler.normalize(*hi) == doctest::Approx(1.0).epsilon(1e-12));
    }

    auto http = pipe.http();
    const auto res = http.Get("/api/v1/sensors/hist/forecast/latest");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["sensor"] == "hist");
    CHECK(body["trained_at_ms"] == end);
    CHECK(body["train_range"]["from_ms"] == start);
    // persisted copy exists under the reserved key
    CHECK(pipe.store->count(forecast::forecast_store_key(SensorId("hist"))) == 1);

    // rerunning on the frozen store with the same seed reproduces the report
    const auto again = forecast::run_forecast_job(*pipe.store, SensorId("hist"), job,
                                                  &pipe.registry);
    CHECK(again.canonical() == report.canonical());
}

TEST_CASE("daemon reconnects after a broker restart and keeps ingesting") {
    Pipeline pipe;
    pipe.publish_reading("s1", 1000);
    REQUIRE(pipe.wait_received(1));

    const auto port = pipe.broker->port();
    pipe.publisher->disconnect();
    pipe.broker->stop();
    pipe.broker.reset();

    wirebus::Broker::Options bopts;
    bopts.listen_host = "127.0.0.1";
    bopts.port = port;  // same port so the daemon's reconnect finds it
    bopts.tokens = {"tok"};
    pipe.broker = wirebus::Broker::serve(bopts);
    pipe.wait_connected();

    wirebus::Client::Options copts;
    copts.host = "127.0.0.1";
    copts.port = port;
    copts.client_id = "test-pub2";
    copts.token = "tok";
    pipe.publisher = wirebus::Client::connect(copts);
    pipe.publish_reading("s1", 2000);
    REQUIRE(pipe.wait_received(2));
    for (int i = 0; i < 200 && pipe.store->count("s1") < 2; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.store->count("s1") == 2);
}

TEST_CASE("simdevice loopback conservation through the daemon") {
    Pipeline pipe;
    simdevice::PublishOptions sim;
    sim.broker_host = "127.0.0.1";
    sim.broker_port = pipe.broker->port();
    sim.token = "tok";
    sim.sensor = SensorId("meter");
    sim.profile.seed = 6;
    sim.interval_s = 600.0;
    sim.start_ms = 0;
    sim.count = 100;
    sim.speedup = 0.0;
    CHECK(simdevice::publish_loop(sim) == 100);
    REQUIRE(pipe.wait_received(100));
    for (int i = 0; i < 500 && pipe.store->count("meter") < 100; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(pipe.store->count("meter") == 100);
    CHECK(pipe.daemon->stats().accepted() == 100);
}
