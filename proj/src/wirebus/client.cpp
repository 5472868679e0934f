#include "energysaver/wirebus/client.hpp"

#include "energysaver/wirebus/topic.hpp"

namespace energysaver::wirebus {

Client::Client(const Options& options) : options_(options) {}

Client::~Client() {
    try {
        disconnect();
    } catch (...) {
    }
}

std::unique_ptr<Client> Client::connect(const Options& options) {
    auto client = std::unique_ptr<Client>(new Client(options));
    client->sock_ = Socket::connect_tcp(options.host, options.port, options.io_timeout_ms);
    write_frame(client->sock_, Connect{options.client_id, options.token},
                options.max_frame_bytes);
    const Frame reply = read_frame(client->sock_, options.max_frame_bytes,
                                   options.io_timeout_ms, options.io_timeout_ms);
    const auto* ack = std::get_if<ConnAck>(&reply);
    if (ack == nullptr) throw ProtocolError("expected ConnAck after Connect");
    if (ack->status == kStatusAuthFailure) throw AuthError("broker rejected token");
    if (ack->status != kStatusOk)
        throw ProtocolError("connect failed with status " + std::to_string(ack->status));
    return client;
}

void Client::publish(std::string_view topic, std::span<const std::uint8_t> payload) {
    if (!valid_publish_topic(topic))
        throw std::invalid_argument("invalid publish topic '" + std::string(topic) + "'");
    Publish frame;
    frame.topic.assign(topic);
    frame.payload.assign(payload.begin(), payload.end());
    write_frame(sock_, frame, options_.max_frame_bytes);
}

void Client::publish(std::string_view topic, std::string_view payload) {
    publish(topic, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()));
}

Frame Client::read_one(int timeout_ms_first_byte) {
    return read_frame(sock_, options_.max_frame_bytes, timeout_ms_first_byte,
                      options_.io_timeout_ms);
}

void Client::subscribe(std::string_view filter) {
    if (!valid_filter(filter))
        throw std::invalid_argument("invalid filter '" + std::string(filter) + "'");
    write_frame(sock_, Subscribe{std::string(filter)}, options_.max_frame_bytes);
    while (true) {
        Frame frame = read_one(options_.io_timeout_ms);
        if (auto* ack = std::get_if<SubAck>(&frame)) {
            if (ack->status != kStatusOk)
                throw ProtocolError("subscribe failed with status " + std::to_string(ack->status));
            return;
        }
        if (auto* publish = std::get_if<Publish>(&frame)) {
            inbox_.push_back(Message{std::move(publish->topic), std::move(publish->payload)});
            continue;
        }
        throw ProtocolError("unexpected frame while waiting for SubAck");
    }
}

std::optional<Client::Message> Client::receive(int timeout_ms) {
    if (!inbox_.empty()) {
        Message m = std::move(inbox_.front());
        inbox_.pop_front();
        return m;
    }
    if (!sock_.wait_readable(timeout_ms)) return std::nullopt;
    Frame frame = read_one(options_.io_timeout_ms);
    if (auto* publish = std::get_if<Publish>(&frame))
        return Message{std::move(publish->topic), std::move(publish->payload)};
    if (auto* ack = std::get_if<ConnAck>(&frame)) {
        if (ack->status == kStatusMalformed)
            throw ProtocolError("broker flagged this connection as malformed");
    }
    throw ProtocolError("unexpected frame kind " +
                        std::string(to_string(frame_kind(frame))));
}

void Client::ping() {
    write_frame(sock_, PingReq{}, options_.max_frame_bytes);
    while (true) {
        Frame frame = read_one(options_.io_timeout_ms);
        if (std::holds_alternative<PingResp>(frame)) return;
        if (auto* publish = std::get_if<Publish>(&frame)) {
            inbox_.push_back(Message{std::move(publish->topic), std::move(publish->payload)});
            continue;
        }
        throw ProtocolError("unexpected frame while waiting for PingResp");
    }
}

void Client::disconnect() {
    if (!sock_.valid()) return;
    try {
        write_frame(sock_, Disconnect{}, options_.max_frame_bytes);
    } catch (const ConnectionError&) {
    }
    sock_.close();
}

void Client::shutdown() { sock_.shutdown_both(); }

}  // namespace energysaver::wirebus
