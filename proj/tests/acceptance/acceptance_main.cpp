// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>

#include "energysaver/core/json.hpp"
#include "energysaver/core/power.hpp"
#include "energysaver/forecast/job.hpp"
#include "energysaver/forecast/predict.hpp"
#include "energysaver/forecast/schedule.hpp"
#include "energysaver/ingestd/daemon.hpp"
#include "energysaver/simdevice/publisher.hpp"
#include "energysaver/tsstore/store.hpp"
#include "energysaver/util/log.hpp"
#include "energysaver/util/time.hpp"
#include "energysaver/wirebus/broker.hpp"
#include "energysaver/wirebus/client.hpp"

#include "../frame_gen.hpp"
#include "../testutil.hpp"

using namespace energysaver;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli_path;

struct Check {
    int number;
    const char* title;
    std::function<bool(std::string&)> run;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool expect(bool cond, std::string& detail, const std::string& what) {
    if (!cond && detail.empty()) detail = what;
    return cond;
}

// --- 1: codec soundness --------------------------------------------------

bool check_codec(std::string& detail) {
    const auto start = Clock::now();
    util::Rng rng(101);
    for (int i = 0; i < 10000; ++i) {
        const wirebus::Frame frame = testutil::random_frame(rng);
        const auto bytes = wirebus::encode_frame(frame);
        auto decoded = wirebus::decode_frame(bytes);
        if (!std::holds_alternative<wirebus::Frame>(decoded))
            return expect(false, detail, "valid frame failed to decode");
        if (!(std::get<wirebus::Frame>(decoded) == frame))
            return expect(false, detail, "frame round trip is not the identity");
        if (wirebus::encode_frame(std::get<wirebus::Frame>(decoded)) != bytes)
            return expect(false, detail, "re-encoding differs");
    }
    // 10,000 fuzz inputs: random strings plus mutated valid encodings
    for (int i = 0; i < 10000; ++i) {
        std::vector<std::uint8_t> bytes;
        if (i % 5 == 4) {
            bytes.resize(rng.bounded(64 * 1024));
            for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.bounded(256));
        } else if (i % 5 == 3) {
            bytes.resize(rng.bounded(64));
            for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.bounded(256));
        } else {
            bytes = wirebus::encode_frame(testutil::random_frame(rng));
            const std::size_t flips = 1 + rng.bounded(8);
            for (std::size_t k = 0; k < flips && !bytes.empty(); ++k)
                bytes[rng.bounded(bytes.size())] = static_cast<std::uint8_t>(rng.bounded(256));
            if (rng.uniform() < 0.25 && !bytes.empty()) bytes.resize(rng.bounded(bytes.size()));
        }
        (void)wirebus::decode_frame(bytes);  // must return without crashing
    }
    const double elapsed = seconds_since(start);
    return expect(elapsed < 10.0, detail,
                  "codec checks took " + std::to_string(elapsed) + " s (limit 10)");
}

// --- 2: end-to-end conservation -------------------------------------------

bool check_end_to_end(std::string& detail) {
    const auto start = Clock::now();
    testutil::TempDir dir("accept_e2e");

    wirebus::Broker::Options bopts;
    bopts.listen_host = "127.0.0.1";
    bopts.port = 0;
    bopts.tokens = {"tok"};
    auto broker = wirebus::Broker::serve(bopts);
    auto store = tsstore::Store::open(dir.path());

    ingestd::IngestConfig cfg;
    cfg.broker_host = "127.0.0.1";
    cfg.broker_port = broker->port();
    cfg.broker_token = "tok";
    cfg.data_dir = dir.path();
    cfg.http_host = "127.0.0.1";
    cfg.http_port = 0;
    auto daemon = ingestd::IngestDaemon::start(cfg, *store);
    while (!daemon->broker_connected() && seconds_since(start) < 10.0)
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    if (!expect(daemon->broker_connected(), detail, "daemon never subscribed")) return false;

    simdevice::PublishOptions sim;
    sim.broker_host = "127.0.0.1";
    sim.broker_port = broker->port();
    sim.token = "tok";
    sim.sensor = core::SensorId("e2e");
    sim.profile.seed = 7;
    sim.interval_s = 600.0;
    sim.start_ms = util::civil_to_epoch_ms(2019, 1, 1);
    sim.count = 5000;
    sim.speedup = 0.0;
    const auto published = simdevice::publish_loop(sim);
    if (!expect(published == 5000, detail, "publisher stopped early")) return false;

    while (daemon->stats().received() < 5000 && seconds_since(start) < 25.0)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    if (!expect(daemon->stats().received() == 5000, detail,
                "received " + std::to_string(daemon->stats().received()) + " of 5000"))
        return false;
    if (!expect(store->count("e2e") == 5000, detail,
                "store holds " + std::to_string(store->count("e2e")) + " of 5000"))
        return false;

    httplib::Client http("127.0.0.1", daemon->http_port());
    http.set_read_timeout(30, 0);
    const auto res = http.Get("/api/v1/sensors/e2e/export.csv");
    if (!expect(res && res->status == 200, detail, "export.csv request failed")) return false;
    const auto lines = static_cast<std::size_t>(
        std::count(res->body.begin(), res->body.end(), '\n'));
    if (!expect(lines == 5001, detail,
                "export.csv has " + std::to_string(lines) + " lines, want 5001"))
        return false;

    daemon->stop();
    broker->stop();
    const double elapsed = seconds_since(start);
    return expect(elapsed < 30.0, detail,
                  "end-to-end took " + std::to_string(elapsed) + " s (limit 30)");
}

// --- 3: authentication gates ----------------------------------------------

bool check_auth_gates(std::string& detail) {
    wirebus::Broker::Options bopts;
    bopts.listen_host = "127.0.0.1";
    bopts.port = 0;
    bopts.tokens = {"right"};
    auto broker = wirebus::Broker::serve(bopts);

    auto sock = wirebus::Socket::connect_tcp("127.0.0.1", broker->port());
    wirebus::write_frame(sock, wirebus::Connect{"c", "wrong"});
    const auto reply = wirebus::read_frame(sock, wirebus::kMaxFrameBytes, 2000);
    const auto* ack = std::get_if<wirebus::ConnAck>(&reply);
    if (!expect(ack != nullptr && ack->status == wirebus::kStatusAuthFailure, detail,
                "wrong token did not get ConnAck status 1"))
        return false;
    bool closed = false;
    try {
        std::uint8_t byte;
        sock.recv_exact(&byte, 1, 2000);
    } catch (const wirebus::ConnectionClosed&) {
        closed = true;
    } catch (const wirebus::ConnectionError&) {
        closed = true;
    }
    if (!expect(closed, detail, "connection stayed open after auth failure")) return false;
    broker->stop();

    testutil::TempDir dir("accept_auth");
    auto store = tsstore::Store::open(dir.path());
    ingestd::IngestConfig cfg;
    cfg.broker_host.clear();  // HTTP only
    cfg.data_dir = dir.path();
    cfg.http_host = "127.0.0.1";
    cfg.http_port = 0;
    cfg.api_tokens = {"secret"};
    auto daemon = ingestd::IngestDaemon::start(cfg, *store);
    httplib::Client http("127.0.0.1", daemon->http_port());
    const auto unauth = http.Get("/api/v1/stats");
    if (!expect(unauth && unauth->status == 401, detail, "request without bearer token not 401"))
        return false;
    const auto auth = http.Get("/api/v1/stats", {{"Authorization", "Bearer secret"}});
    if (!expect(auth && auth->status == 200, detail, "valid bearer token rejected")) return false;
    daemon->stop();
    return true;
}

// --- 4: store oracle equivalence -------------------------------------------

bool check_store_oracle(std::string& detail) {
    testutil::TempDir dir("accept_store");
    util::Rng rng(404);

    std::vector<std::string> oracle;  // canonical lines, ascending ts
    std::vector<std::int64_t> stamps;
    auto store = tsstore::Store::open(dir.path());
    std::int64_t ts = 0;
    for (int i = 0; i < 10000; ++i) {
        ts += 1 + static_cast<std::int64_t>(rng.bounded(20));
        nlohmann::json obj;
        obj["sensor_id"] = "s1";
        obj["ts_ms"] = ts;
        obj["power"] = rng.uniform(0.0, 4000.0);
        const auto doc = tsstore::Document::from_object(std::move(obj));
        store->append(doc);
        oracle.push_back(doc.canonical());
        stamps.push_back(ts);
    }

    const auto naive_range = [&](std::int64_t from, std::int64_t to) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < stamps.size(); ++i)
            if (stamps[i] >= from && stamps[i] < to) out.push_back(oracle[i]);
        return out;
    };
    const auto agree = [&](const tsstore::Store& s) {
        util::Rng qrng(808);
        for (int q = 0; q < 1000; ++q) {
            std::int64_t a = static_cast<std::int64_t>(qrng.bounded(static_cast<std::uint64_t>(ts + 50)));
            std::int64_t b = static_cast<std::int64_t>(qrng.bounded(static_cast<std::uint64_t>(ts + 50)));
            if (a > b) std::swap(a, b);
            const auto got = s.query_range("s1", a, b);
            const auto want = naive_range(a, b);
            if (got.size() != want.size()) return false;
            for (std::size_t i = 0; i < got.size(); ++i)
                if (got[i].canonical() != want[i]) return false;
        }
        return true;
    };

    if (!expect(agree(*store), detail, "query_range disagrees with the naive oracle")) return false;
    store.reset();
    auto reopened = tsstore::Store::open(dir.path());
    if (!expect(agree(*reopened), detail, "reopened store disagrees with the naive oracle"))
        return false;
    return expect(reopened->count("s1") == 10000, detail, "reopened count mismatch");
}

// --- 5: gradient check -------------------------------------------------------

bool check_gradients(std::string& detail) {
    const auto start = Clock::now();
    util::Rng rng(31415);
    for (int trial = 0; trial < 100; ++trial) {
        const int hidden = 1 + static_cast<int>(rng.bounded(4));
        const int window_len = 1 + static_cast<int>(rng.bounded(5));
        forecast::LstmModel model = forecast::LstmModel::random_init(hidden, rng, 0.5);
        std::vector<double> window(static_cast<std::size_t>(window_len));
        for (auto& x : window) x = rng.uniform(-1.0, 1.0);
        const double target = rng.uniform(-1.0, 1.0);

        forecast::LstmCache cache;
        forecast::lstm_forward(model, window, cache);
        const auto analytic = forecast::lstm_backward(model, cache, target);

        auto params = model.params();
        constexpr double eps = 1e-5;
        for (std::size_t k = 0; k < params.size(); ++k) {
            const double saved = params[k];
            params[k] = saved + eps;
            const double up = forecast::lstm_forward(model, window);
            params[k] = saved - eps;
            const double down = forecast::lstm_forward(model, window);
            params[k] = saved;
            const double numeric = (0.5 * (up - target) * (up - target) -
                                    0.5 * (down - target) * (down - target)) /
                                   (2.0 * eps);
            // relative error with a small floor so near-zero gradients compare
            // on the finite-difference noise scale
            const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-4});
            if (std::abs(analytic[k] - numeric) > 1e-4 * denom)
                return expect(false, detail,
                              "gradient mismatch at trial " + std::to_string(trial) + " param " +
                                  std::to_string(k));
        }
    }
    const double elapsed = seconds_since(start);
    return expect(elapsed < 60.0, detail,
                  "gradient checks took " + std::to_string(elapsed) + " s (limit 60)");
}

// --- 6: metric identities ----------------------------------------------------

bool check_metrics(std::string& detail) {
    util::Rng rng(161803);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.bounded(128);
        std::vector<double> p(n), a(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.uniform(-100.0, 100.0);
            a[i] = rng.uniform(-100.0, 100.0);
        }
        const auto m = forecast::evaluate(p, a);
        if (std::abs(m.rmse - std::sqrt(m.mse)) > 1e-12)
            return expect(false, detail, "rmse != sqrt(mse)");
        if (m.mae > m.rmse + 1e-15) return expect(false, detail, "mae > rmse");
        const auto zero = forecast::evaluate(p, p);
        if (zero.mse != 0.0 || zero.rmse != 0.0 || zero.mae != 0.0)
            return expect(false, detail, "evaluate(p, p) != (0, 0, 0)");
    }
    // spot value: mse 0.0017 pairs with rmse 0.0412310563
    const double rmse = std::sqrt(0.0017);
    if (!expect(std::abs(rmse - 0.041231056256176606) <= 1e-12, detail, "sqrt(0.0017) drifted"))
        return false;
    char rounded[16];
    std::snprintf(rounded, sizeof(rounded), "%.3f", rmse);
    return expect(std::string(rounded) == "0.041", detail,
                  "sqrt(0.0017) does not round to the reported 0.041");
}

// --- 7: desk-scale forecasting quality ----------------------------------------

bool check_forecast_quality(std::string& detail) {
    const auto start = Clock::now();
    testutil::TempDir dir("accept_fc");
    auto store = tsstore::Store::open(dir.path());

    // Six simulated months, hourly readings, default profile, fixed seed.
    simdevice::LoadProfile profile;
    profile.seed = 20190101;
    const core::SensorId sensor("quality");
    const std::int64_t start_ts = util::civil_to_epoch_ms(2019, 1, 1);
    const std::int64_t end_ts = util::civil_to_epoch_ms(2019, 7, 1);
    for (std::int64_t ts = start_ts; ts < end_ts; ts += util::kMsPerHour)
        store->append(tsstore::Document::from_reading(
            simdevice::generate_reading(profile, sensor, ts, 3600.0)));

    forecast::JobConfig job;
    job.train.window_len = 90;
    job.train.epochs = 100;
    job.train.batch_size = 32;
    job.train.hidden_size = 16;
    job.train.seed = 42;
    job.step_ms = util::kMsPerHour;
    job.now_ms = end_ts;
    const auto report = forecast::run_forecast_job(*store, sensor, job);

    // Persistence baseline on the identical normalized series: rebuild the
    // job's published preprocessing and predict each value by its predecessor.
    const auto series = forecast::aggregate_store_series(*store, sensor, job.step_ms);
    const auto boundary = util::month_floor_ms(series.ts_ms.back());
    const auto [train_raw, test_raw] = forecast::split_by_boundary(series, boundary);
    const auto month = forecast::first_full_month(train_raw, job.step_ms);
    const double base = forecast::mean_in_range(train_raw, month->first, month->second);
    const auto indexed = forecast::fixed_base_index(series, base);
    const auto scaler = forecast::Scaler::fit(
        std::span<const double>(indexed.values).first(train_raw.size()));
    std::vector<double> persistence, actual;
    for (std::size_t i = train_raw.size(); i < indexed.values.size(); ++i) {
        persistence.push_back(scaler.normalize(indexed.values[i - 1]));
        actual.push_back(scaler.normalize(indexed.values[i]));
    }
    const auto baseline = forecast::evaluate(persistence, actual);

    std::fprintf(stderr, "[info] forecast quality: lstm rmse %.5f, persistence rmse %.5f\n",
                 report.one_step.rmse, baseline.rmse);
    if (!expect(report.one_step.rmse < 0.15, detail,
                "one-step rmse " + std::to_string(report.one_step.rmse) + " >= 0.15"))
        return false;
    if (!expect(report.one_step.rmse <= 0.9 * baseline.rmse, detail,
                "one-step rmse " + std::to_string(report.one_step.rmse) +
                    " does not beat persistence " + std::to_string(baseline.rmse) + " by 10%"))
        return false;
    const double elapsed = seconds_since(start);
    return expect(elapsed < 300.0, detail,
                  "forecast quality took " + std::to_string(elapsed) + " s (limit 300)");
}

// --- 8: dataset construction ---------------------------------------------------

bool check_dataset_split(std::string& detail) {
    simdevice::LoadProfile profile;
    profile.seed = 88;
    forecast::Series series{core::SensorId("ds"), {}, {}};
    const std::int64_t start_ts = util::civil_to_epoch_ms(2019, 1, 1);
    const std::int64_t end_ts = util::civil_to_epoch_ms(2019, 9, 1);
    for (std::int64_t ts = start_ts; ts < end_ts; ts += 10 * util::kMsPerMinute) {
        series.ts_ms.push_back(ts);
        series.values.push_back(simdevice::sample_power_w(profile, ts));
    }

    const auto [train, test] =
        forecast::split_by_boundary(series, util::civil_to_epoch_ms(2019, 8, 1));
    const double fraction =
        static_cast<double>(train.size()) / static_cast<double>(series.size());
    std::fprintf(stderr, "[info] dataset: %zu points, train fraction %.4f\n", series.size(),
                 fraction);
    if (!expect(std::abs(fraction - 0.87) <= 0.01, detail,
                "train fraction " + std::to_string(fraction) + " outside 0.87 +/- 0.01"))
        return false;

    const auto scaler = forecast::Scaler::fit(series.values);
    const auto ds = forecast::WindowedDataset::make(series.values, scaler, 90);
    return expect(ds.size() == series.size() - 90, detail,
                  "window count != length - 90");
}

// --- 9: scheduler calendar ------------------------------------------------------

bool check_first_business_day(std::string& detail) {
    for (int year = 2015; year <= 2030; ++year) {
        for (int month = 1; month <= 12; ++month) {
            int day = 1;
            while (true) {
                const int wd = testutil::weekday_oracle(year, month, day);
                if (wd != 0 && wd != 6) break;
                ++day;
            }
            if (forecast::first_business_day(year, static_cast<unsigned>(month)) != day)
                return expect(false, detail,
                              "mismatch at " + std::to_string(year) + "-" + std::to_string(month));
        }
    }
    if (!expect(forecast::first_business_day(2019, 6) == 3, detail, "June 2019 != 3")) return false;
    return expect(forecast::first_business_day(2019, 9) == 2, detail, "September 2019 != 2");
}

// --- 10: demo determinism ----------------------------------------------------------

std::pair<int, std::string> run_command(const std::string& cmd) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, out};
    char buf[4096];
    std::size_t n;
    while ((n = ::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    const int status = ::pclose(pipe);
    return {status, out};
}

bool check_demo_determinism(std::string& detail) {
    if (g_cli_path.empty()) return expect(false, detail, "--cli path not provided");
    const std::string cmd = "'" + g_cli_path + "' demo --seed 42 --months 2 2>/dev/null";
    const auto [status1, out1] = run_command(cmd);
    if (!expect(status1 == 0, detail, "first demo run exited nonzero")) return false;
    const auto [status2, out2] = run_command(cmd);
    if (!expect(status2 == 0, detail, "second demo run exited nonzero")) return false;
    if (!expect(!out1.empty(), detail, "demo printed nothing")) return false;
    if (!expect(out1 == out2, detail, "demo reports differ between runs")) return false;

    const auto parsed = nlohmann::json::parse(out1, nullptr, false);
    if (!expect(!parsed.is_discarded(), detail, "demo output is not JSON")) return false;
    const double mse = parsed.at("mse").get<double>();
    const double rmse = parsed.at("rmse").get<double>();
    const double mae = parsed.at("mae").get<double>();
    return expect(std::isfinite(mse) && std::isfinite(rmse) && std::isfinite(mae), detail,
                  "demo metrics are not finite");
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
    log::set_level(log::Level::warn);

    const std::vector<Check> checks = {
        {1, "codec soundness: 10k round trips, 10k fuzz inputs, < 10 s", check_codec},
        {2, "end-to-end conservation: 5000 readings, store count, csv lines", check_end_to_end},
        {3, "authentication gates: broker status 1, http 401", check_auth_gates},
        {4, "store oracle equivalence: 1000 ranges over 10k docs, reopen", check_store_oracle},
        {5, "gradient check: 100 models vs central differences", check_gradients},
        {6, "metric identities and the reported mse/rmse pair", check_metrics},
        {7, "forecast quality: rmse < 0.15 and beats persistence by 10%", check_forecast_quality},
        {8, "dataset split: 0.87 +/- 0.01 train fraction, window count", check_dataset_split},
        {9, "first business day vs brute-force calendar 2015-2030", check_first_business_day},
        {10, "demo determinism: byte-identical reports for --seed 42", check_demo_determinism},
    };

    int failures = 0;
    for (const auto& check : checks) {
        const auto start = Clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = check.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(start);
        if (ok) {
            std::printf("[PASS] criterion %2d (%5.1fs): %s\n", check.number, elapsed, check.title);
        } else {
            ++failures;
            std::printf("[FAIL] criterion %2d (%5.1fs): %s -- %s\n", check.number, elapsed,
                        check.title, detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, checks.size());
    return failures == 0 ? 0 : 1;
}
