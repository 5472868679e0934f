#include "energysaver/wirebus/broker.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "energysaver/util/log.hpp"
#include "energysaver/wirebus/framing.hpp"
#include "energysaver/wirebus/topic.hpp"

namespace energysaver::wirebus {

namespace {

struct Session {
    Socket sock;
    std::mutex write_mu;
    std::string client_id;
    bool live = false;                  // authenticated
    std::vector<std::string> filters;   // guarded by the broker state mutex
};

}  // namespace

struct Broker::Impl {
    Options options;
    std::unordered_set<std::string> tokens;
    Listener listener;
    std::thread accept_thread;

    std::atomic<bool> stopping{false};

    mutable std::mutex state_mu;
    std::vector<std::shared_ptr<Session>> connections;  // pre-auth and live

    std::mutex reap_mu;
    std::condition_variable reap_cv;
    std::size_t active_handlers = 0;

    void accept_loop();
    void handle_connection(std::shared_ptr<Session> session);
    void forward_publish(const Publish& publish, const std::vector<std::uint8_t>& raw,
                         const Session* from);
    void drop_connection(const std::shared_ptr<Session>& session);
    bool authenticate(Session& session, const Connect& connect);

    void send_status_and_close(Session& session, std::uint8_t status) {
        try {
            std::lock_guard<std::mutex> lock(session.write_mu);
            write_frame(session.sock, ConnAck{status});
        } catch (const ConnectionError&) {
        }
        session.sock.shutdown_both();
    }
};

Broker::Broker() : impl_(std::make_unique<Impl>()) {}

Broker::~Broker() { stop(); }

std::unique_ptr<Broker> Broker::serve(Options options) {
    auto broker = std::unique_ptr<Broker>(new Broker());
    auto& impl = *broker->impl_;
    impl.options = options;
    impl.tokens.insert(options.tokens.begin(), options.tokens.end());
    impl.listener = Listener::bind_tcp(options.listen_host, options.port);
    log::infof("broker listening on %s:%u", options.listen_host.c_str(),
               static_cast<unsigned>(impl.listener.port()));
    impl.accept_thread = std::thread([&impl] { impl.accept_loop(); });
    return broker;
}

std::uint16_t Broker::port() const { return impl_->listener.port(); }

std::size_t Broker::live_sessions() const {
    std::lock_guard<std::mutex> lock(impl_->state_mu);
    return static_cast<std::size_t>(
        std::count_if(impl_->connections.begin(), impl_->connections.end(),
                      [](const auto& s) { return s->live; }));
}

void Broker::stop() {
    if (!impl_ || impl_->stopping.exchange(true)) return;
    impl_->listener.shutdown();
    {
        std::lock_guard<std::mutex> lock(impl_->state_mu);
        for (auto& session : impl_->connections) session->sock.shutdown_both();
    }
    if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
    std::unique_lock<std::mutex> lock(impl_->reap_mu);
    impl_->reap_cv.wait(lock, [this] { return impl_->active_handlers == 0; });
    impl_->listener.close();
    log::infof("broker stopped");
}

void Broker::Impl::accept_loop() {
    while (!stopping.load()) {
        auto sock = listener.accept(250);
        if (!sock) continue;
        if (stopping.load()) break;
        auto session = std::make_shared<Session>();
        session->sock = std::move(*sock);
        {
            std::lock_guard<std::mutex> lock(state_mu);
            connections.push_back(session);
        }
        {
            std::lock_guard<std::mutex> lock(reap_mu);
            ++active_handlers;
        }
        std::thread([this, session] {
            handle_connection(session);
            std::lock_guard<std::mutex> lock(reap_mu);
            --active_handlers;
            reap_cv.notify_all();
        }).detach();
    }
}

bool Broker::Impl::authenticate(Session& session, const Connect& connect) {
    if (tokens.count(connect.token) == 0) {
        log::warnf("broker: rejected connect from client '%s' (bad token)",
                   connect.client_id.c_str());
        send_status_and_close(session, kStatusAuthFailure);
        return false;
    }
    std::shared_ptr<Session> kicked;
    {
        std::lock_guard<std::mutex> lock(state_mu);
        for (auto& other : connections) {
            if (other.get() != &session && other->live && other->client_id == connect.client_id) {
                kicked = other;
                break;
            }
        }
        session.client_id = connect.client_id;
        session.live = true;
    }
    if (kicked) {
        log::warnf("broker: client id '%s' reconnected, closing previous session",
                   connect.client_id.c_str());
        kicked->sock.shutdown_both();
    }
    std::lock_guard<std::mutex> lock(session.write_mu);
    write_frame(session.sock, ConnAck{kStatusOk});
    return true;
}

void Broker::Impl::handle_connection(std::shared_ptr<Session> session) {
    const std::size_t max_bytes = options.max_frame_bytes;
    try {
        // First frame must be a valid Connect with an accepted token.
        Frame first = read_frame(session->sock, max_bytes, 10000);
        const auto* connect = std::get_if<Connect>(&first);
        if (connect == nullptr) {
            send_status_and_close(*session, kStatusMalformed);
            drop_connection(session);
            return;
        }
        if (!authenticate(*session, *connect)) {
            drop_connection(session);
            return;
        }

        while (!stopping.load()) {
            const auto raw = read_raw_frame(session->sock, max_bytes, -1);
            auto decoded = decode_frame(raw, max_bytes);
            if (auto* err = std::get_if<DecodeError>(&decoded)) throw MalformedFrame(*err);
            const Frame& frame = std::get<Frame>(decoded);

            if (const auto* publish = std::get_if<Publish>(&frame)) {
                forward_publish(*publish, raw, session.get());
            } else if (const auto* subscribe = std::get_if<Subscribe>(&frame)) {
                // Register and ack under the session's write lock so the
                // SubAck precedes any forwarded match.
                std::lock_guard<std::mutex> wlock(session->write_mu);
                {
                    std::lock_guard<std::mutex> slock(state_mu);
                    auto& filters = session->filters;
                    if (std::find(filters.begin(), filters.end(), subscribe->filter) ==
                        filters.end())
                        filters.push_back(subscribe->filter);
                }
                write_frame(session->sock, SubAck{kStatusOk});
            } else if (std::holds_alternative<PingReq>(frame)) {
                std::lock_guard<std::mutex> wlock(session->write_mu);
                write_frame(session->sock, PingResp{});
            } else if (std::holds_alternative<Disconnect>(frame)) {
                break;
            } else {
                // Connect replay or a server-only frame from a client.
                send_status_and_close(*session, kStatusMalformed);
                break;
            }
        }
    } catch (const MalformedFrame& err) {
        log::warnf("broker: closing '%s': %s", session->client_id.c_str(), err.what());
        send_status_and_close(*session, kStatusMalformed);
    } catch (const ConnectionError&) {
        // peer went away; normal teardown
    }
    drop_connection(session);
}

void Broker::Impl::forward_publish(const Publish& publish, const std::vector<std::uint8_t>& raw,
                                   const Session* from) {
    (void)from;  // self-delivery is allowed when the publisher subscribed
    std::vector<std::shared_ptr<Session>> targets;
    {
        std::lock_guard<std::mutex> lock(state_mu);
        for (auto& session : connections) {
            if (!session->live) continue;
            const bool matches =
                std::any_of(session->filters.begin(), session->filters.end(),
                            [&](const std::string& f) { return topic_matches(f, publish.topic); });
            if (matches) targets.push_back(session);
        }
    }
    for (auto& target : targets) {
        try {
            std::lock_guard<std::mutex> lock(target->write_mu);
            target->sock.send_all(raw.data(), raw.size());
        } catch (const ConnectionError&) {
            target->sock.shutdown_both();  // reader thread cleans up
        }
    }
}

void Broker::Impl::drop_connection(const std::shared_ptr<Session>& session) {
    {
        std::lock_guard<std::mutex> lock(state_mu);
        connections.erase(std::remove(connections.begin(), connections.end(), session),
                          connections.end());
    }
    // Shutdown only: a forwarder may still hold the session and be mid-send,
    // so the fd must stay reserved until the last owner drops it.
    session->sock.shutdown_both();
}

}  // namespace energysaver::wirebus
