#pragma once

#include <memory>

#include "energysaver/forecast/job.hpp"
#include "energysaver/ingestd/config.hpp"
#include "energysaver/ingestd/stats.hpp"
#include "energysaver/tsstore/store.hpp"

namespace energysaver::ingestd {

/// The server side of the pipeline: subscribes to reading topics, validates
/// and persists payloads, and serves the HTTP API. The store and registry
/// must outlive the daemon. An empty broker_host runs the HTTP API only.
class IngestDaemon {
public:
    static std::unique_ptr<IngestDaemon> start(IngestConfig config, tsstore::Store& store,
                                               forecast::ForecastRegistry* registry = nullptr);

    ~IngestDaemon();
    IngestDaemon(const IngestDaemon&) = delete;
    IngestDaemon& operator=(const IngestDaemon&) = delete;

    const IngestStats& stats() const;
    std::uint16_t http_port() const;
    bool broker_connected() const;

    /// Cooperative shutdown; drains the in-flight append before returning.
    void stop();

private:
    IngestDaemon();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace energysaver::ingestd
