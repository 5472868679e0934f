#include "energysaver/ingestd/daemon.hpp"

#include <atomic>
#include <charconv>
#include <limits>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "energysaver/core/json.hpp"
#include "energysaver/core/power.hpp"
#include "energysaver/util/backoff.hpp"
#include "energysaver/util/log.hpp"
#include "energysaver/wirebus/client.hpp"

namespace energysaver::ingestd {

namespace {

RejectReason reason_from_verdict(core::ValidationReason reason) {
    switch (reason) {
        case core::ValidationReason::VoltageOutOfRange: return RejectReason::VoltageOutOfRange;
        case core::ValidationReason::CurrentOutOfRange: return RejectReason::CurrentOutOfRange;
        case core::ValidationReason::NonMonotonicTimestamp:
            return RejectReason::NonMonotonicTimestamp;
        case core::ValidationReason::PowerMismatch: return RejectReason::PowerMismatch;
        case core::ValidationReason::Ok: break;
    }
    return RejectReason::Malformed;
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& reason) {
    send_json(res, status, nlohmann::json{{"error", reason}});
}

bool parse_ms_param(const httplib::Request& req, const char* name, std::int64_t fallback,
                    std::int64_t& out) {
    if (!req.has_param(name)) {
        out = fallback;
        return true;
    }
    const std::string raw = req.get_param_value(name);
    const auto result = std::from_chars(raw.data(), raw.data() + raw.size(), out);
    return result.ec == std::errc() && result.ptr == raw.data() + raw.size();
}

constexpr std::string_view kForecastKeyPrefix = "__forecast__";

}  // namespace

struct IngestDaemon::Impl {
    IngestConfig config;
    tsstore::Store* store = nullptr;
    forecast::ForecastRegistry* registry = nullptr;
    IngestStats stats;

    httplib::Server http;
    std::uint16_t http_port = 0;
    std::thread http_thread;

    std::thread ingest_thread;
    std::atomic<bool> stopping{false};
    std::atomic<bool> connected{false};

    std::mutex client_mu;
    wirebus::Client* active_client = nullptr;  // for shutdown only

    void ingest_loop();
    void handle_payload(const wirebus::Client::Message& msg);
    void setup_routes();
    bool authorized(const httplib::Request& req) const;
};

bool IngestDaemon::Impl::authorized(const httplib::Request& req) const {
    if (config.api_tokens.empty()) return true;
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.size() <= kBearer.size() || header.compare(0, kBearer.size(), kBearer) != 0)
        return false;
    const std::string token = header.substr(kBearer.size());
    for (const auto& accepted : config.api_tokens)
        if (token == accepted) return true;
    return false;
}

void IngestDaemon::Impl::handle_payload(const wirebus::Client::Message& msg) {
    stats.on_received();
    const core::PowerReading reading = core::reading_from_payload(msg.payload_text());
    const core::SensorProfile profile = config.profile_for(reading.sensor);
    const auto previous = store->last_ts(reading.sensor.str());
    const auto verdict = core::validate_reading(reading, profile, previous);
    if (!verdict.accepted) {
        stats.on_rejected(reason_from_verdict(verdict.reason),
                          std::string("validation failed: ") + core::to_string(verdict.reason) +
                              " for sensor " + reading.sensor.str());
        return;
    }
    try {
        store->append(tsstore::Document::from_reading(reading));
    } catch (const tsstore::AppendError& e) {
        stats.on_rejected(RejectReason::StoreRejected, e.what());
        return;
    }
    stats.on_accepted();
}

void IngestDaemon::Impl::ingest_loop() {
    util::Backoff backoff(config.backoff_base_ms, config.backoff_cap_ms);
    while (!stopping.load()) {
        std::unique_ptr<wirebus::Client> client;
        try {
            wirebus::Client::Options copts;
            copts.host = config.broker_host;
            copts.port = config.broker_port;
            copts.client_id = "ingestd";
            copts.token = config.broker_token;
            client = wirebus::Client::connect(copts);
            client->subscribe(config.topic_filter);
            {
                std::lock_guard<std::mutex> lock(client_mu);
                active_client = client.get();
            }
            connected.store(true);
            backoff.reset();
            log::infof("ingestd: subscribed to '%s' on %s:%u", config.topic_filter.c_str(),
                       config.broker_host.c_str(), static_cast<unsigned>(config.broker_port));

            while (!stopping.load()) {
                auto msg = client->receive(250);
                if (!msg) continue;
                try {
                    handle_payload(*msg);
                } catch (const core::PayloadError& e) {
                    stats.on_rejected(RejectReason::Malformed, e.what());
                }
            }
        } catch (const std::exception& e) {
            if (!stopping.load()) log::warnf("ingestd: broker link lost: %s", e.what());
        }
        connected.store(false);
        // Unpublish before destroying: stop() may be holding the pointer to
        // shut the socket down.
        {
            std::lock_guard<std::mutex> lock(client_mu);
            active_client = nullptr;
        }
        client.reset();
        if (stopping.load()) break;
        const auto delay = backoff.next_delay_ms();
        log::infof("ingestd: reconnecting in %ld ms", static_cast<long>(delay));
        std::int64_t slept = 0;
        while (slept < delay && !stopping.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            slept += 50;
        }
    }
}

void IngestDaemon::Impl::setup_routes() {
    const auto guard = [this](const httplib::Request& req, httplib::Response& res) {
        if (authorized(req)) return true;
        send_error(res, 401, "missing or invalid bearer token");
        return false;
    };

    http.Get("/api/v1/sensors", [this, guard](const httplib::Request& req, httplib::Response& res) {
        if (!guard(req, res)) return;
        nlohmann::json sensors = nlohmann::json::array();
        for (const auto& sensor : store->sensors()) {
            if (sensor.rfind(kForecastKeyPrefix, 0) == 0) continue;  // internal
            sensors.push_back({{"sensor_id", sensor}, {"count", store->count(sensor)}});
        }
        send_json(res, 200, nlohmann::json{{"sensors", std::move(sensors)}});
    });

    http.Get(R"(/api/v1/sensors/([A-Za-z0-9_\-]+)/latest)",
             [this, guard](const httplib::Request& req, httplib::Response& res) {
                 if (!guard(req, res)) return;
                 const auto doc = store->latest(req.matches[1].str());
                 if (!doc) {
                     send_error(res, 404, "unknown sensor");
                     return;
                 }
                 res.status = 200;
                 res.set_content(doc->canonical(), "application/json");
             });

    http.Get(R"(/api/v1/sensors/([A-Za-z0-9_\-]+)/readings)",
             [this, guard](const httplib::Request& req, httplib::Response& res) {
                 if (!guard(req, res)) return;
                 const std::string sensor = req.matches[1].str();
                 std::int64_t from_ms, to_ms;
                 if (!parse_ms_param(req, "from_ms", 0, from_ms) ||
                     !parse_ms_param(req, "to_ms", std::numeric_limits<std::int64_t>::max(), to_ms) ||
                     from_ms > to_ms) {
                     send_error(res, 400, "from_ms/to_ms must be integers with from_ms <= to_ms");
                     return;
                 }
                 if (store->count(sensor) == 0) {
                     send_error(res, 404, "unknown sensor");
                     return;
                 }
                 std::string out = "[";
                 bool first = true;
                 for (const auto& doc : store->query_range(sensor, from_ms, to_ms)) {
                     if (!first) out.push_back(',');
                     out += doc.canonical();
                     first = false;
                 }
                 out.push_back(']');
                 res.status = 200;
                 res.set_content(out, "application/json");
             });

    http.Get(R"(/api/v1/sensors/([A-Za-z0-9_\-]+)/export\.csv)",
             [this, guard](const httplib::Request& req, httplib::Response& res) {
                 if (!guard(req, res)) return;
                 const std::string sensor = req.matches[1].str();
                 std::int64_t from_ms, to_ms;
                 if (!parse_ms_param(req, "from_ms", 0, from_ms) ||
                     !parse_ms_param(req, "to_ms", std::numeric_limits<std::int64_t>::max(), to_ms) ||
                     from_ms > to_ms) {
                     send_error(res, 400, "from_ms/to_ms must be integers with from_ms <= to_ms");
                     return;
                 }
                 if (store->count(sensor) == 0) {
                     send_error(res, 404, "unknown sensor");
                     return;
                 }
                 std::ostringstream out;
                 store->export_csv(sensor, from_ms, to_ms, out);
                 res.status = 200;
                 res.set_content(out.str(), "text/csv");
             });

    http.Get(R"(/api/v1/sensors/([A-Za-z0-9_\-]+)/forecast/latest)",
             [this, guard](const httplib::Request& req, httplib::Response& res) {
                 if (!guard(req, res)) return;
                 const std::string sensor = req.matches[1].str();
                 if (registry != nullptr) {
                     if (const auto report = registry->latest(sensor)) {
                         res.status = 200;
                         res.set_content(report->dump(), "application/json");
                         return;
                     }
                 }
                 // Fall back to the persisted report, if any.
                 const auto doc = store->latest(std::string(kForecastKeyPrefix) + sensor);
                 if (doc) {
                     const auto it = doc->fields().find("report_json");
                     if (it != doc->fields().end() && it->is_string()) {
                         res.status = 200;
                         res.set_content(it->get<std::string>(), "application/json");
                         return;
                     }
                 }
                 send_error(res, 404, "no forecast for sensor");
             });

    http.Get("/api/v1/stats", [this, guard](const httplib::Request& req, httplib::Response& res) {
        if (!guard(req, res)) return;
        send_json(res, 200, stats.to_json());
    });
}

IngestDaemon::IngestDaemon() : impl_(std::make_unique<Impl>()) {}

IngestDaemon::~IngestDaemon() { stop(); }

std::unique_ptr<IngestDaemon> IngestDaemon::start(IngestConfig config, tsstore::Store& store,
                                                  forecast::ForecastRegistry* registry) {
    config.validate();
    auto daemon = std::unique_ptr<IngestDaemon>(new IngestDaemon());
    auto& impl = *daemon->impl_;
    impl.config = std::move(config);
    impl.store = &store;
    impl.registry = registry;
    impl.setup_routes();

    if (impl.config.http_port == 0) {
        const int port = impl.http.bind_to_any_port(impl.config.http_host);
        if (port <= 0)
            throw std::runtime_error("ingestd: cannot bind HTTP listener on " +
                                     impl.config.http_host);
        impl.http_port = static_cast<std::uint16_t>(port);
    } else {
        if (!impl.http.bind_to_port(impl.config.http_host, impl.config.http_port))
            throw std::runtime_error("ingestd: cannot bind HTTP listener on " +
                                     impl.config.http_host + ":" +
                                     std::to_string(impl.config.http_port));
        impl.http_port = impl.config.http_port;
    }
    impl.http_thread = std::thread([&impl] { impl.http.listen_after_bind(); });
    impl.http.wait_until_ready();
    log::infof("ingestd: http api on %s:%u", impl.config.http_host.c_str(),
               static_cast<unsigned>(impl.http_port));

    if (!impl.config.broker_host.empty())
        impl.ingest_thread = std::thread([&impl] { impl.ingest_loop(); });
    return daemon;
}

const IngestStats& IngestDaemon::stats() const { return impl_->stats; }

std::uint16_t IngestDaemon::http_port() const { return impl_->http_port; }

bool IngestDaemon::broker_connected() const { return impl_->connected.load(); }

void IngestDaemon::stop() {
    if (!impl_ || impl_->stopping.exchange(true)) return;
    {
        std::lock_guard<std::mutex> lock(impl_->client_mu);
        if (impl_->active_client != nullptr) impl_->active_client->shutdown();
    }
    if (impl_->ingest_thread.joinable()) impl_->ingest_thread.join();
    impl_->http.stop();
    if (impl_->http_thread.joinable()) impl_->http_thread.join();
    log::infof("ingestd: stopped");
}

}  // namespace energysaver::ingestd
