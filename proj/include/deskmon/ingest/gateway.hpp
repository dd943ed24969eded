#pragma once

#include "deskmon/ingest/session_state.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace deskmon::ingest {

struct GatewayConfig {
    std::string address = "127.0.0.1";
    /// 0 picks an ephemeral port.
    unsigned short tcp_port = 0;
    /// WebSocket listener; nullopt disables it, 0 picks an ephemeral port.
    std::optional<unsigned short> ws_port = 0;
    std::size_t max_frame_bytes = kDefaultMaxFrameBytes;
    /// Delay applied before each sample-batch reply (backpressure, tests).
    std::function<std::chrono::microseconds()> ack_delay;
    /// Defaults to a steady clock started by start().
    ConnectionHandler::ServerClock clock;
};

/// TCP (length-prefixed frames) and WebSocket (text frames) listeners in
/// front of one IngestSession. One thread per connection.
class GatewayServer {
public:
    GatewayServer(IngestSession& session, GatewayConfig config);
    ~GatewayServer();

    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    void start();
    /// Closes listeners and connections, joins all threads.
    void stop();

    unsigned short tcp_port() const;
    std::optional<unsigned short> ws_port() const;
    std::size_t connections_accepted() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocking client connection. Subclasses differ only in framing.
class GatewayConnection {
public:
    virtual ~GatewayConnection() = default;

    virtual void send(const Message& m) = 0;
    virtual Message receive() = 0;
    virtual void close() = 0;

    Message request(const Message& m)
    {
        send(m);
        return receive();
    }

    /// Runs `probes` four-timestamp exchanges and returns the local min-rtt estimate.
    ClockEstimate sync_clock(const std::function<RawTime()>& client_clock, int probes = 8);
};

class TcpGatewayClient : public GatewayConnection {
public:
    TcpGatewayClient(const std::string& host, unsigned short port);
    ~TcpGatewayClient() override;

    void send(const Message& m) override;
    Message receive() override;
    void close() override;
    /// Writes raw bytes (for malformed-frame tests).
    void send_bytes(std::string_view bytes);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class WsGatewayClient : public GatewayConnection {
public:
    WsGatewayClient(const std::string& host, unsigned short port);
    ~WsGatewayClient() override;

    void send(const Message& m) override;
    Message receive() override;
    void close() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace deskmon::ingest
