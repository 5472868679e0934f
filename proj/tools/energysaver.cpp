// Command-line entry point wiring the pipeline together: broker, ingestion
// daemon, device simulator, forecast jobs, and the one-command demo.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "energysaver/cliconfig.hpp"
#include "energysaver/core/json.hpp"
#include "energysaver/forecast/job.hpp"
#include "energysaver/forecast/schedule.hpp"
#include "energysaver/ingestd/daemon.hpp"
#include "energysaver/simdevice/publisher.hpp"
#include "energysaver/tsstore/store.hpp"
#include "energysaver/util/log.hpp"
#include "energysaver/util/time.hpp"
#include "energysaver/wirebus/broker.hpp"
#include "energysaver/wirebus/socket.hpp"

namespace fs = std::filesystem;
using namespace energysaver;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
}

void wait_for_interrupt() {
    while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    log::infof("shutting down");
}

std::int64_t parse_start_or_die(const std::string& text) {
    const auto parsed = util::parse_iso8601(text);
    if (!parsed)
        throw std::runtime_error("cannot parse timestamp '" + text +
                                 "', want e.g. 2019-01-01T00:00:00Z");
    return *parsed;
}

cli::GlobalConfig load_config_if_set(const std::string& path) {
    if (path.empty()) return {};
    return cli::load_global_config(path);
}

struct DemoOptions {
    int months = 3;
    double interval_s = 600.0;
    std::uint64_t seed = 42;
    std::string sensor = "s1";
    std::string data_dir;  // empty: temp dir, removed afterwards
    std::int64_t step_s = 3600;
    forecast::TrainConfig train;
    std::string start = "2019-01-01T00:00:00Z";
};

int run_demo(const DemoOptions& options) {
    const std::int64_t start_ms = parse_start_or_die(options.start);
    std::int64_t end_ms = start_ms;
    for (int m = 0; m < options.months; ++m) end_ms = util::next_month_start_ms(end_ms);
    const auto interval_ms = static_cast<std::int64_t>(options.interval_s * 1000.0);
    const std::uint64_t count = static_cast<std::uint64_t>((end_ms - start_ms) / interval_ms);

    fs::path data_dir;
    bool ephemeral_dir = false;
    if (options.data_dir.empty()) {
        std::string tmpl = (fs::temp_directory_path() / "energysaver_demo_XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        data_dir = tmpl;
        ephemeral_dir = true;
    } else {
        data_dir = options.data_dir;
    }

    int exit_code = 0;
    {
        const std::string token = "demo-token";
        wirebus::Broker::Options broker_opts;
        broker_opts.listen_host = "127.0.0.1";
        broker_opts.port = 0;
        broker_opts.tokens = {token};
        auto broker = wirebus::Broker::serve(broker_opts);

        auto store = tsstore::Store::open(data_dir);
        forecast::ForecastRegistry registry;

        ingestd::IngestConfig ingest_cfg;
        ingest_cfg.broker_host = "127.0.0.1";
        ingest_cfg.broker_port = broker->port();
        ingest_cfg.broker_token = token;
        ingest_cfg.data_dir = data_dir;
        ingest_cfg.http_host = "127.0.0.1";
        ingest_cfg.http_port = 0;
        ingest_cfg.backoff_base_ms = 100;
        auto daemon = ingestd::IngestDaemon::start(ingest_cfg, *store, &registry);

        // Publishing before the daemon's subscription is live would lose the
        // first readings (QoS 0 drops messages with no matching subscriber).
        const auto subscribe_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
        while (!daemon->broker_connected() && std::chrono::steady_clock::now() < subscribe_deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        if (!daemon->broker_connected()) throw std::runtime_error("demo: daemon never subscribed");

        simdevice::PublishOptions sim;
        sim.broker_host = "127.0.0.1";
        sim.broker_port = broker->port();
        sim.token = token;
        sim.sensor = core::SensorId(options.sensor);
        sim.profile.seed = options.seed;
        sim.interval_s = options.interval_s;
        sim.start_ms = start_ms;
        sim.count = count;
        sim.speedup = 0.0;  // full speed
        const std::uint64_t published = simdevice::publish_loop(sim);
        log::infof("demo: published %llu readings", static_cast<unsigned long long>(published));

        // Drain: everything published over a live loopback session must land.
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(120);
        while (daemon->stats().received() < published &&
               std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        if (daemon->stats().received() < published) {
            log::errorf("demo: ingested only %llu of %llu readings",
                        static_cast<unsigned long long>(daemon->stats().received()),
                        static_cast<unsigned long long>(published));
            exit_code = 1;
        }

        if (exit_code == 0) {
            forecast::JobConfig job;
            job.train = options.train;
            job.train.seed = options.seed;
            job.step_ms = options.step_s * 1000;
            job.now_ms = end_ms;  // simulated clock keeps reports reproducible
            const auto report =
                forecast::run_forecast_job(*store, core::SensorId(options.sensor), job, &registry);
            std::cout << report.canonical() << "\n";
        }

        daemon->stop();
        broker->stop();
    }
    if (ephemeral_dir) {
        std::error_code ec;
        fs::remove_all(data_dir, ec);
    }
    return exit_code;
}

forecast::JobConfig job_config_from(const cli::ForecastSection& section) {
    forecast::JobConfig job;
    job.train = section.train;
    job.step_ms = section.step_s * 1000;
    return job;
}

}  // namespace

int main(int argc, char** argv) {
    install_signal_handlers();
    CLI::App app{"energy monitoring pipeline: pub/sub broker, ingestion daemon, "
                 "device simulator and LSTM load forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with per-component sections")
        ->envname("ENERGYSAVER_CONFIG");

    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    // ---- broker ----------------------------------------------------------
    auto* broker_cmd = app.add_subcommand("broker", "run the message broker");
    std::string broker_listen;
    std::vector<std::string> broker_tokens;
    std::int64_t broker_max_frame = 0;
    broker_cmd->add_option("--listen", broker_listen, "host:port (default 0.0.0.0:1883)");
    broker_cmd->add_option("--token", broker_tokens, "accepted auth token (repeatable)");
    broker_cmd->add_option("--max-frame-bytes", broker_max_frame, "frame size cap");

    // ---- ingest ----------------------------------------------------------
    auto* ingest_cmd = app.add_subcommand("ingest", "run the ingestion daemon and HTTP API");
    std::string ingest_broker, ingest_http, ingest_data_dir, ingest_filter;
    std::string ingest_broker_token;
    std::vector<std::string> ingest_api_tokens;
    ingest_cmd->add_option("--broker", ingest_broker, "broker host:port");
    ingest_cmd->add_option("--broker-token", ingest_broker_token, "broker auth token")
        ->envname("ENERGYSAVER_TOKEN");
    ingest_cmd->add_option("--http-listen", ingest_http, "HTTP host:port (default 0.0.0.0:5000)");
    ingest_cmd->add_option("--data-dir", ingest_data_dir, "store directory");
    ingest_cmd->add_option("--api-token", ingest_api_tokens, "HTTP bearer token (repeatable)");
    ingest_cmd->add_option("--topic-filter", ingest_filter, "subscription filter");

    // ---- simdevice -------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simdevice", "publish synthetic readings");
    std::string sim_sensor, sim_broker, sim_token, sim_start, sim_profile_path;
    double sim_interval = 0.0, sim_speedup = -1.0, sim_voltage = 0.0;
    std::int64_t sim_count = -1;
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--sensor", sim_sensor, "sensor id");
    sim_cmd->add_option("--broker", sim_broker, "broker host:port");
    sim_cmd->add_option("--token", sim_token, "broker auth token")->envname("ENERGYSAVER_TOKEN");
    sim_cmd->add_option("--interval", sim_interval, "seconds between readings (default 600)");
    sim_cmd->add_option("--start", sim_start, "first timestamp, ISO-8601 UTC");
    sim_cmd->add_option("--count", sim_count, "number of readings to publish");
    sim_cmd->add_option("--speedup", sim_speedup, "0 = as fast as possible, k = interval/k wall time");
    sim_cmd->add_option("--supply-voltage", sim_voltage, "default 127");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "load profile seed");
    sim_cmd->add_option("--profile", sim_profile_path, "JSON file with load profile fields");
    double sim_base = 0, sim_weekday = 0, sim_weekend = 0, sim_diurnal = 0;
    double sim_spike_p = 0, sim_spike_m = 0, sim_noise = 0;
    auto* sim_base_opt = sim_cmd->add_option("--base-power", sim_base, "base draw in watts");
    auto* sim_weekday_opt = sim_cmd->add_option("--weekday-factor", sim_weekday, "");
    auto* sim_weekend_opt = sim_cmd->add_option("--weekend-factor", sim_weekend, "");
    auto* sim_diurnal_opt = sim_cmd->add_option("--diurnal-amplitude", sim_diurnal, "");
    auto* sim_spike_p_opt = sim_cmd->add_option("--spike-probability", sim_spike_p, "");
    auto* sim_spike_m_opt = sim_cmd->add_option("--spike-multiplier", sim_spike_m, "");
    auto* sim_noise_opt = sim_cmd->add_option("--noise-sigma", sim_noise, "");

    // ---- forecast --------------------------------------------------------
    auto* forecast_cmd = app.add_subcommand("forecast", "training and prediction jobs");
    forecast_cmd->require_subcommand(1);
    std::string fc_sensor, fc_data_dir, fc_optimizer;
    int fc_window = 0, fc_epochs = 0, fc_batch = 0, fc_hidden = 0, fc_repeats = 1;
    double fc_lr = 0.0;
    std::int64_t fc_step = 0;
    std::uint64_t fc_seed = 0;
    const auto add_common = [&](CLI::App* cmd, bool needs_sensor) {
        auto* opt = cmd->add_option("--sensor", fc_sensor, "sensor id");
        if (needs_sensor) opt->required();
        cmd->add_option("--data-dir", fc_data_dir, "store directory")->required();
        cmd->add_option("--window", fc_window, "sliding window length (default 90)");
        cmd->add_option("--epochs", fc_epochs, "training epochs (default 100)");
        cmd->add_option("--batch", fc_batch, "mini-batch size (default 32)");
        cmd->add_option("--hidden", fc_hidden, "LSTM hidden size (default 64)");
        cmd->add_option("--seed", fc_seed, "training seed");
        cmd->add_option("--lr", fc_lr, "learning rate (default 1e-3)");
        cmd->add_option("--optimizer", fc_optimizer, "adam|sgd");
        cmd->add_option("--step", fc_step, "aggregation step in seconds (default 600)");
    };
    auto* fc_run = forecast_cmd->add_subcommand("run", "train and evaluate once, print the report");
    add_common(fc_run, true);
    fc_run->add_option("--repeats", fc_repeats, "run k seeds and report mean metrics");
    auto* fc_sched = forecast_cmd->add_subcommand(
        "schedule", "run monthly on the first business day at 02:00 local");
    add_common(fc_sched, true);
    auto* fc_dataset = forecast_cmd->add_subcommand("dataset", "dataset tooling");
    fc_dataset->require_subcommand(1);
    auto* fc_export = fc_dataset->add_subcommand("export", "write the aggregated series as CSV");
    add_common(fc_export, true);
    std::string fc_csv_path;
    fc_export->add_option("--csv", fc_csv_path, "output path")->required();

    // ---- demo ------------------------------------------------------------
    auto* demo_cmd = app.add_subcommand(
        "demo", "in-process broker + daemon + simulator + one forecast job");
    DemoOptions demo;
    demo.train.epochs = 5;
    demo.train.hidden_size = 12;
    demo.train.window_len = 90;
    demo.train.batch_size = 32;
    demo_cmd->add_option("--months", demo.months, "simulated span in calendar months (default 3)");
    demo_cmd->add_option("--interval", demo.interval_s, "simulated seconds between readings");
    demo_cmd->add_option("--seed", demo.seed, "seed for the profile and training");
    demo_cmd->add_option("--sensor", demo.sensor, "sensor id");
    demo_cmd->add_option("--data-dir", demo.data_dir, "keep data here instead of a temp dir");
    demo_cmd->add_option("--step", demo.step_s, "aggregation step in seconds (default 3600)");
    demo_cmd->add_option("--epochs", demo.train.epochs, "training epochs (default 5)");
    demo_cmd->add_option("--hidden", demo.train.hidden_size, "hidden size (default 12)");
    demo_cmd->add_option("--window", demo.train.window_len, "window length (default 90)");
    demo_cmd->add_option("--batch", demo.train.batch_size, "batch size (default 32)");
    demo_cmd->add_option("--start", demo.start, "simulated start, ISO-8601 UTC");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (verbose) log::set_level(log::Level::debug);

    try {
        cli::GlobalConfig cfg = load_config_if_set(config_path);

        if (broker_cmd->parsed()) {
            if (broker_cmd->count("--listen")) cfg.wirebus.listen = broker_listen;
            if (broker_cmd->count("--token"))
                cfg.wirebus.tokens.insert(cfg.wirebus.tokens.end(), broker_tokens.begin(),
                                          broker_tokens.end());
            if (broker_cmd->count("--max-frame-bytes"))
                cfg.wirebus.max_frame_bytes = static_cast<std::size_t>(broker_max_frame);
            if (cfg.wirebus.tokens.empty())
                throw std::runtime_error("broker needs at least one --token");
            wirebus::Broker::Options opts;
            const auto [host, port] = wirebus::split_host_port(cfg.wirebus.listen, 1883);
            opts.listen_host = host;
            opts.port = port;
            opts.tokens = cfg.wirebus.tokens;
            opts.max_frame_bytes = cfg.wirebus.max_frame_bytes;
            auto broker = wirebus::Broker::serve(opts);
            wait_for_interrupt();
            broker->stop();
            return 0;
        }

        if (ingest_cmd->parsed()) {
            auto& icfg = cfg.ingestd;
            if (ingest_cmd->count("--broker")) {
                const auto [host, port] = wirebus::split_host_port(ingest_broker, 1883);
                icfg.broker_host = host;
                icfg.broker_port = port;
            }
            if (ingest_cmd->count("--broker-token") || !ingest_broker_token.empty())
                icfg.broker_token = ingest_broker_token;
            if (ingest_cmd->count("--http-listen")) {
                const auto [host, port] = wirebus::split_host_port(ingest_http, 5000);
                icfg.http_host = host;
                icfg.http_port = port;
            }
            if (ingest_cmd->count("--data-dir")) icfg.data_dir = ingest_data_dir;
            if (ingest_cmd->count("--api-token"))
                icfg.api_tokens.insert(icfg.api_tokens.end(), ingest_api_tokens.begin(),
                                       ingest_api_tokens.end());
            if (ingest_cmd->count("--topic-filter")) icfg.topic_filter = ingest_filter;

            auto store = tsstore::Store::open(icfg.data_dir);
            forecast::ForecastRegistry registry;
            auto daemon = ingestd::IngestDaemon::start(icfg, *store, &registry);
            wait_for_interrupt();
            daemon->stop();
            return 0;
        }

        if (sim_cmd->parsed()) {
            auto& scfg = cfg.simdevice;
            if (sim_cmd->count("--sensor")) scfg.sensor = sim_sensor;
            if (sim_cmd->count("--broker")) scfg.broker = sim_broker;
            if (sim_cmd->count("--token") || !sim_token.empty()) scfg.token = sim_token;
            if (sim_cmd->count("--interval")) scfg.interval_s = sim_interval;
            if (sim_cmd->count("--start")) scfg.start = sim_start;
            if (sim_cmd->count("--count")) scfg.count = static_cast<std::uint64_t>(sim_count);
            if (sim_cmd->count("--speedup")) scfg.speedup = sim_speedup;
            if (sim_cmd->count("--supply-voltage")) scfg.supply_voltage = sim_voltage;
            if (!sim_profile_path.empty()) {
                std::ifstream in(sim_profile_path);
                if (!in) throw std::runtime_error("cannot open profile '" + sim_profile_path + "'");
                const auto parsed = nlohmann::json::parse(in, nullptr, false);
                if (parsed.is_discarded())
                    throw std::runtime_error("profile file is not valid JSON");
                scfg.profile = cli::load_profile_from_json(parsed, "profile");
            }
            if (sim_seed_opt->count()) scfg.profile.seed = sim_seed;
            if (sim_base_opt->count()) scfg.profile.base_power_w = sim_base;
            if (sim_weekday_opt->count()) scfg.profile.weekday_factor = sim_weekday;
            if (sim_weekend_opt->count()) scfg.profile.weekend_factor = sim_weekend;
            if (sim_diurnal_opt->count()) scfg.profile.diurnal_amplitude = sim_diurnal;
            if (sim_spike_p_opt->count()) scfg.profile.spike_probability = sim_spike_p;
            if (sim_spike_m_opt->count()) scfg.profile.spike_multiplier = sim_spike_m;
            if (sim_noise_opt->count()) scfg.profile.noise_sigma = sim_noise;
            simdevice::check_profile(scfg.profile);

            simdevice::PublishOptions opts;
            const auto [host, port] = wirebus::split_host_port(scfg.broker, 1883);
            opts.broker_host = host;
            opts.broker_port = port;
            opts.token = scfg.token;
            opts.sensor = core::SensorId(scfg.sensor);
            opts.profile = scfg.profile;
            opts.supply_voltage = scfg.supply_voltage;
            opts.interval_s = scfg.interval_s;
            opts.start_ms = parse_start_or_die(scfg.start);
            opts.count = scfg.count;
            opts.speedup = scfg.speedup;
            opts.stop = &g_interrupted;
            const auto published = simdevice::publish_loop(opts);
            std::cout << published << "\n";
            return 0;
        }

        if (forecast_cmd->parsed()) {
            auto& fcfg = cfg.forecast;
            if (fc_window > 0) fcfg.train.window_len = fc_window;
            if (fc_epochs > 0) fcfg.train.epochs = fc_epochs;
            if (fc_batch > 0) fcfg.train.batch_size = fc_batch;
            if (fc_hidden > 0) fcfg.train.hidden_size = fc_hidden;
            if (fc_lr > 0) fcfg.train.learning_rate = fc_lr;
            if (!fc_optimizer.empty())
                fcfg.train.optimizer = forecast::optimizer_from_string(fc_optimizer);
            if (fc_seed != 0) fcfg.train.seed = fc_seed;
            if (fc_step > 0) fcfg.step_s = fc_step;

            auto store = tsstore::Store::open(fc_data_dir);
            const core::SensorId sensor(fc_sensor);

            if (fc_run->parsed()) {
                forecast::JobConfig job = job_config_from(fcfg);
                if (fc_repeats <= 1) {
                    const auto report = forecast::run_forecast_job(*store, sensor, job);
                    std::cout << report.canonical() << "\n";
                } else {
                    double mse = 0, rmse = 0, mae = 0;
                    for (int r = 0; r < fc_repeats; ++r) {
                        job.train.seed = fcfg.train.seed + static_cast<std::uint64_t>(r);
                        const auto report = forecast::run_forecast_job(*store, sensor, job);
                        std::printf("run seed=%llu mse=%.6f rmse=%.6f mae=%.6f\n",
                                    static_cast<unsigned long long>(job.train.seed),
                                    report.one_step.mse, report.one_step.rmse,
                                    report.one_step.mae);
                        mse += report.one_step.mse;
                        rmse += report.one_step.rmse;
                        mae += report.one_step.mae;
                    }
                    std::printf("mean over %d runs: mse=%.6f rmse=%.6f mae=%.6f\n", fc_repeats,
                                mse / fc_repeats, rmse / fc_repeats, mae / fc_repeats);
                }
                return 0;
            }

            if (fc_sched->parsed()) {
                forecast::ForecastRegistry registry;
                auto scheduler = forecast::MonthlyScheduler::start([&] {
                    forecast::JobConfig job = job_config_from(fcfg);
                    try {
                        const auto report =
                            forecast::run_forecast_job(*store, sensor, job, &registry);
                        std::cout << report.canonical() << "\n";
                    } catch (const forecast::JobError& e) {
                        log::errorf("forecast job skipped: %s", e.what());
                    }
                });
                wait_for_interrupt();
                scheduler->stop();
                return 0;
            }

            if (fc_export->parsed()) {
                const auto series =
                    forecast::aggregate_store_series(*store, sensor, fcfg.step_s * 1000);
                std::ofstream out(fc_csv_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open '" + fc_csv_path + "'");
                out << "timestamp,value\n";
                for (std::size_t i = 0; i < series.size(); ++i)
                    out << util::format_iso8601_ms(series.ts_ms[i]) << ','
                        << tsstore::csv_format_double(series.values[i]) << '\n';
                log::infof("wrote %zu rows to %s", series.size(), fc_csv_path.c_str());
                return 0;
            }
        }

        if (demo_cmd->parsed()) {
            demo.train.seed = demo.seed;
            return run_demo(demo);
        }
    } catch (const std::exception& e) {
        log::errorf("%s", e.what());
        return 1;
    }
    return 0;
}
