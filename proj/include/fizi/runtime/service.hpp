#pragma once

// HTTP + WebSocket service for the browser UI. Static assets are served from
// a directory; "/ws" upgrades to the message channel described in
// protocol.hpp. Runs on its own thread; the frame loop only talks to it
// through publish_*() and the control queue.

#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "fizi/error.hpp"

namespace fizi::runtime {

namespace service_detail {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

inline const char* kFallbackPage =
    "<!doctype html><html><head><title>fizi</title></head><body>"
    "<p>UI assets are not installed. Connect a client to <code>/ws</code>.</p>"
    "</body></html>";

inline std::string mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".png") return "image/png";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".ico") return "image/x-icon";
    return "application/octet-stream";
}

struct Outgoing {
    std::shared_ptr<const std::string> payload;
    bool binary = false;
    bool lossy = false;
};

class Hub;

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, std::shared_ptr<Hub> hub) : ws_(std::move(socket)), hub_(std::move(hub)) {}

    void start(http::request<http::string_body> req);
    void enqueue(Outgoing msg) {
        if (msg.lossy) {
            // At most one pending video message; newer frames are dropped
            // while the client is behind.
            for (std::size_t i = writing_ ? 1 : 0; i < queue_.size(); ++i)
                if (queue_[i].lossy) return;
        }
        queue_.push_back(std::move(msg));
        if (!writing_) write_next();
    }

private:
    void read_next();
    void write_next() {
        if (queue_.empty()) {
            writing_ = false;
            return;
        }
        writing_ = true;
        const Outgoing& m = queue_.front();
        ws_.binary(m.binary);
        ws_.async_write(net::buffer(*m.payload), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->close();
            self->queue_.pop_front();
            self->write_next();
        });
    }
    void close();

    websocket::stream<beast::tcp_stream> ws_;
    std::shared_ptr<Hub> hub_;
    beast::flat_buffer buffer_;
    std::deque<Outgoing> queue_;
    bool writing_ = false;
    bool closed_ = false;
};

// State shared by the acceptor and all sessions. Touched only on the I/O thread.
class Hub : public std::enable_shared_from_this<Hub> {
public:
    using Handler = std::function<std::vector<std::string>(const std::string&)>;

    Hub(std::filesystem::path assets, Handler handler) : assets_(std::move(assets)), handler_(std::move(handler)) {}

    void add(const std::shared_ptr<WsSession>& s) { sessions_.insert(s); }
    void remove(const std::shared_ptr<WsSession>& s) { sessions_.erase(s); }
    void broadcast(const Outgoing& m) {
        for (const auto& s : sessions_) s->enqueue(m);
    }
    std::size_t size() const { return sessions_.size(); }
    void clear() { sessions_.clear(); }
    std::vector<std::string> handle(const std::string& text) { return handler_(text); }

    http::response<http::string_body> serve_static(const http::request<http::string_body>& req) const {
        http::response<http::string_body> res;
        res.version(req.version());
        res.keep_alive(false);
        res.set(http::field::server, "fizi");
        if (req.method() != http::verb::get && req.method() != http::verb::head) {
            res.result(http::status::method_not_allowed);
            res.body() = "method not allowed";
            res.prepare_payload();
            return res;
        }
        std::string target(req.target());
        if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
        if (target.empty() || target.back() == '/') target += "index.html";
        if (target.find("..") != std::string::npos || target.front() != '/') {
            res.result(http::status::bad_request);
            res.body() = "bad path";
            res.prepare_payload();
            return res;
        }
        const auto path = assets_ / target.substr(1);
        std::ifstream in(path, std::ios::binary);
        if (in) {
            std::ostringstream body;
            body << in.rdbuf();
            res.result(http::status::ok);
            res.set(http::field::content_type, mime_type(path));
            res.body() = std::move(body).str();
        } else if (target == "/index.html") {
            res.result(http::status::ok);
            res.set(http::field::content_type, "text/html");
            res.body() = kFallbackPage;
        } else {
            res.result(http::status::not_found);
            res.body() = "not found";
        }
        res.prepare_payload();
        if (req.method() == http::verb::head) res.body().clear();
        return res;
    }

private:
    std::filesystem::path assets_;
    Handler handler_;
    std::set<std::shared_ptr<WsSession>> sessions_;
};

inline void WsSession::start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->hub_->add(self);
        self->read_next();
    });
}

inline void WsSession::read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return self->close();
        std::string text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        if (self->ws_.got_text()) {
            for (auto& reply : self->hub_->handle(text))
                self->enqueue({std::make_shared<const std::string>(std::move(reply)), false, false});
        }
        self->read_next();
    });
}

inline void WsSession::close() {
    if (closed_) return;
    closed_ = true;
    hub_->remove(shared_from_this());
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, std::shared_ptr<Hub> hub) : stream_(std::move(socket)), hub_(std::move(hub)) {}

    void start() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            self->on_request();
        });
    }

private:
    void on_request() {
        if (websocket::is_upgrade(req_)) {
            if (req_.target() == "/ws") {
                stream_.expires_never();
                std::make_shared<WsSession>(stream_.release_socket(), hub_)->start(std::move(req_));
                return;
            }
        }
        res_ = hub_->serve_static(req_);
        http::async_write(stream_, res_, [self = shared_from_this()](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    beast::tcp_stream stream_;
    std::shared_ptr<Hub> hub_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    http::response<http::string_body> res_;
};

}  // namespace service_detail

class UiService {
public:
    /// Returns the replies to send back to the originating client.
    using MessageHandler = std::function<std::vector<std::string>(const std::string&)>;

    /// Binds immediately; throws ConfigError when the address cannot be bound.
    UiService(const std::string& host, const std::string& port, std::filesystem::path assets, MessageHandler handler)
        : hub_(std::make_shared<service_detail::Hub>(std::move(assets), std::move(handler))), acceptor_(ioc_) {
        namespace net = service_detail::net;
        using service_detail::tcp;
        boost::system::error_code ec;
        tcp::resolver resolver(ioc_);
        auto results = resolver.resolve(host, port, ec);
        if (ec || results.empty()) throw ConfigError("serve: cannot resolve " + host + ":" + port);
        const tcp::endpoint ep = *results.begin();
        acceptor_.open(ep.protocol(), ec);
        if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
        if (!ec) acceptor_.bind(ep, ec);
        if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
        if (ec) throw ConfigError("serve: cannot bind " + host + ":" + port + ": " + ec.message());
        port_ = acceptor_.local_endpoint().port();
        accept_next();
        thread_ = std::thread([this] { ioc_.run(); });
    }

    UiService(const UiService&) = delete;
    UiService& operator=(const UiService&) = delete;
    ~UiService() { stop(); }

    unsigned short port() const { return port_; }

    /// Lossless, in order.
    void publish_text(std::string msg) { post({std::make_shared<const std::string>(std::move(msg)), false, false}); }

    /// Lossy: dropped for clients that still have a video message pending.
    void publish_binary(std::string msg) { post({std::make_shared<const std::string>(std::move(msg)), true, true}); }

    void stop() {
        if (!thread_.joinable()) return;
        ioc_.stop();
        thread_.join();
        // Breaks the hub <-> session ownership cycle once no handler can run.
        hub_->clear();
    }

private:
    void post(service_detail::Outgoing m) {
        service_detail::net::post(ioc_, [hub = hub_, m = std::move(m)] { hub->broadcast(m); });
    }

    void accept_next() {
        acceptor_.async_accept(service_detail::net::make_strand(ioc_),
                               [this](boost::system::error_code ec, service_detail::tcp::socket socket) {
                                   if (!ec)
                                       std::make_shared<service_detail::HttpSession>(std::move(socket), hub_)->start();
                                   if (acceptor_.is_open()) accept_next();
                               });
    }

    service_detail::net::io_context ioc_{1};
    std::shared_ptr<service_detail::Hub> hub_;
    service_detail::tcp::acceptor acceptor_;
    unsigned short port_ = 0;
    std::thread thread_;
};

}  // namespace fizi::runtime
