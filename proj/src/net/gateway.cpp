#include "deskmon/ingest/gateway.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <sys/socket.h>

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

namespace deskmon::ingest {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

Err frame_err(const FrameError& e)
{
    return Err{"frame_" + std::string(to_string(e.code())), e.what()};
}

}  // namespace

struct GatewayServer::Impl {
    IngestSession& session;
    GatewayConfig config;
    asio::io_context io;
    std::unique_ptr<tcp::acceptor> tcp_acceptor;
    std::unique_ptr<tcp::acceptor> ws_acceptor;
    std::atomic<bool> running{false};
    std::atomic<std::size_t> accepted{0};
    std::vector<std::thread> listeners;

    std::mutex conn_mu;
    std::list<std::thread> workers;
    std::list<int> live_fds;

    Impl(IngestSession& s, GatewayConfig c) : session(s), config(std::move(c)) {}

    std::unique_ptr<tcp::acceptor> listen(unsigned short port)
    {
        auto a = std::make_unique<tcp::acceptor>(io);
        const tcp::endpoint ep(asio::ip::make_address(config.address), port);
        a->open(ep.protocol());
        a->set_option(asio::socket_base::reuse_address(true));
        a->bind(ep);
        a->listen();
        return a;
    }

    std::optional<Message> dispatch(ConnectionHandler& handler, const Message& m)
    {
        auto reply = handler.handle(m);
        if (reply && std::holds_alternative<SampleBatch>(m) && config.ack_delay) {
            std::this_thread::sleep_for(config.ack_delay());
        }
        return reply;
    }

    void track(int fd)
    {
        std::lock_guard lock(conn_mu);
        live_fds.push_back(fd);
    }

    void untrack(int fd)
    {
        std::lock_guard lock(conn_mu);
        live_fds.remove(fd);
    }

    void serve_tcp(tcp::socket socket)
    {
        const int fd = socket.native_handle();
        track(fd);
        ConnectionHandler handler(session, config.clock);
        FrameReader reader(config.max_frame_bytes);
        std::array<char, 64 * 1024> buf{};
        boost::system::error_code ec;
        while (running) {
            const auto n = socket.read_some(asio::buffer(buf), ec);
            if (ec) break;
            reader.feed(std::string_view(buf.data(), n));
            bool fatal = false;
            while (true) {
                std::optional<Message> reply;
                try {
                    auto m = reader.next();
                    if (!m) break;
                    reply = dispatch(handler, *m);
                } catch (const FrameError& e) {
                    reply = frame_err(e);
                    // An oversized prefix leaves the stream unsynchronized.
                    fatal = e.code() == FrameErrorCode::too_large;
                }
                if (reply) asio::write(socket, asio::buffer(encode_frame(*reply)), ec);
                if (ec || fatal) break;
            }
            if (ec || fatal) break;
        }
        untrack(fd);
        socket.shutdown(tcp::socket::shutdown_both, ec);
        socket.close(ec);
    }

    void serve_ws(tcp::socket socket)
    {
        const int fd = socket.native_handle();
        track(fd);
        try {
            websocket::stream<tcp::socket> ws(std::move(socket));
            ws.read_message_max(config.max_frame_bytes);
            ws.accept();
            ConnectionHandler handler(session, config.clock);
            beast::flat_buffer buffer;
            while (running) {
                buffer.clear();
                ws.read(buffer);
                std::optional<Message> reply;
                try {
                    reply = dispatch(handler, decode_body(beast::buffers_to_string(buffer.data())));
                } catch (const FrameError& e) {
                    reply = frame_err(e);
                }
                if (reply) {
                    ws.text(true);
                    ws.write(asio::buffer(encode_body(*reply)));
                }
            }
        } catch (const std::exception&) {
            // Peer closed or protocol failure; the connection simply ends.
        }
        untrack(fd);
    }

    void accept_loop(tcp::acceptor& acceptor, bool websocket_mode)
    {
        while (running) {
            boost::system::error_code ec;
            tcp::socket socket(io);
            acceptor.accept(socket, ec);
            if (ec) {
                if (!running) return;
                continue;
            }
            ++accepted;
            std::lock_guard lock(conn_mu);
            if (!running) return;
            workers.emplace_back([this, websocket_mode, s = std::move(socket)]() mutable {
                if (websocket_mode) {
                    serve_ws(std::move(s));
                } else {
                    serve_tcp(std::move(s));
                }
            });
        }
    }
};

GatewayServer::GatewayServer(IngestSession& session, GatewayConfig config)
    : impl_(std::make_unique<Impl>(session, std::move(config)))
{
}

GatewayServer::~GatewayServer()
{
    stop();
}

void GatewayServer::start()
{
    if (impl_->running) return;
    if (!impl_->config.clock) impl_->config.clock = steady_session_clock();
    impl_->tcp_acceptor = impl_->listen(impl_->config.tcp_port);
    if (impl_->config.ws_port) impl_->ws_acceptor = impl_->listen(*impl_->config.ws_port);
    impl_->running = true;
    impl_->listeners.emplace_back([this] { impl_->accept_loop(*impl_->tcp_acceptor, false); });
    if (impl_->ws_acceptor) impl_->listeners.emplace_back([this] { impl_->accept_loop(*impl_->ws_acceptor, true); });
}

void GatewayServer::stop()
{
    if (!impl_->running.exchange(false)) return;
    for (auto* a : {impl_->tcp_acceptor.get(), impl_->ws_acceptor.get()}) {
        if (!a) continue;
        // shutdown() wakes a thread blocked in accept(); close() alone does not.
        ::shutdown(a->native_handle(), SHUT_RDWR);
    }
    for (auto& t : impl_->listeners) t.join();
    impl_->listeners.clear();
    for (auto* a : {impl_->tcp_acceptor.get(), impl_->ws_acceptor.get()}) {
        if (!a) continue;
        boost::system::error_code ec;
        a->close(ec);
    }
    std::list<std::thread> workers;
    {
        std::lock_guard lock(impl_->conn_mu);
        for (int fd : impl_->live_fds) ::shutdown(fd, SHUT_RDWR);
        workers.swap(impl_->workers);
    }
    for (auto& t : workers) t.join();
}

unsigned short GatewayServer::tcp_port() const
{
    return impl_->tcp_acceptor ? impl_->tcp_acceptor->local_endpoint().port() : 0;
}

std::optional<unsigned short> GatewayServer::ws_port() const
{
    if (!impl_->ws_acceptor) return std::nullopt;
    return impl_->ws_acceptor->local_endpoint().port();
}

std::size_t GatewayServer::connections_accepted() const
{
    return impl_->accepted;
}

ClockEstimate GatewayConnection::sync_clock(const std::function<RawTime()>& client_clock, int probes)
{
    ClockEstimator local;
    for (int i = 0; i < probes; ++i) {
        const RawTime t0 = client_clock();
        const auto reply = request(ClockProbe{t0});
        const auto* r = std::get_if<ClockReply>(&reply);
        if (!r) throw std::runtime_error("expected clock_reply, got " + std::string(message_type(reply)));
        const RawTime t3 = client_clock();
        send(ClockDone{t0, t3});
        local.add_probe(t0, r->t1, r->t2, t3);
    }
    if (!local.best()) throw std::runtime_error("no usable clock probe");
    return *local.best();
}

struct TcpGatewayClient::Impl {
    asio::io_context io;
    tcp::socket socket{io};
    FrameReader reader;
};

TcpGatewayClient::TcpGatewayClient(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>())
{
    tcp::resolver resolver(impl_->io);
    asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
    impl_->socket.set_option(tcp::no_delay(true));
}

TcpGatewayClient::~TcpGatewayClient()
{
    close();
}

void TcpGatewayClient::send(const Message& m)
{
    send_bytes(encode_frame(m));
}

void TcpGatewayClient::send_bytes(std::string_view bytes)
{
    asio::write(impl_->socket, asio::buffer(bytes.data(), bytes.size()));
}

Message TcpGatewayClient::receive()
{
    std::array<char, 64 * 1024> buf{};
    while (true) {
        if (auto m = impl_->reader.next()) return *m;
        const auto n = impl_->socket.read_some(asio::buffer(buf));
        impl_->reader.feed(std::string_view(buf.data(), n));
    }
}

void TcpGatewayClient::close()
{
    boost::system::error_code ec;
    if (!impl_->socket.is_open()) return;
    impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
    impl_->socket.close(ec);
}

struct WsGatewayClient::Impl {
    asio::io_context io;
    websocket::stream<tcp::socket> ws{io};
    bool open = false;
};

WsGatewayClient::WsGatewayClient(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>())
{
    tcp::resolver resolver(impl_->io);
    asio::connect(impl_->ws.next_layer(), resolver.resolve(host, std::to_string(port)));
    impl_->ws.handshake(host + ":" + std::to_string(port), "/");
    impl_->ws.text(true);
    impl_->open = true;
}

WsGatewayClient::~WsGatewayClient()
{
    close();
}

void WsGatewayClient::send(const Message& m)
{
    impl_->ws.write(asio::buffer(encode_body(m)));
}

Message WsGatewayClient::receive()
{
    beast::flat_buffer buffer;
    impl_->ws.read(buffer);
    return decode_body(beast::buffers_to_string(buffer.data()));
}

void WsGatewayClient::close()
{
    if (!impl_->open) return;
    impl_->open = false;
    boost::system::error_code ec;
    impl_->ws.close(websocket::close_code::normal, ec);
}

}  // namespace deskmon::ingest
