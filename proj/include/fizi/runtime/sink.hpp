#pragma once

// Newline-delimited command records and where they go.

#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/write.hpp>
#include <json.hpp>

#include "fizi/drive.hpp"
#include "fizi/error.hpp"
#include "fizi/interface.hpp"

namespace fizi::runtime {

/// Fixed 4-decimal rendering; values that round to zero print as 0.0000.
inline std::string fixed4(double v) {
    double r = std::round(v * 1e4) / 1e4;
    if (r == 0.0) r = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", r);
    return buf;
}

/// {"t":<ms>,"steering":<s>,"throttle":<th>}
inline std::string format_command(const DriveCommand& c) {
    return "{\"t\":" + std::to_string(c.timestamp) + ",\"steering\":" + fixed4(c.steering) +
           ",\"throttle\":" + fixed4(c.throttle) + "}";
}

/// Record written by the emit_command action.
inline std::string format_event(const InterfaceEvent& e) {
    return "{\"t\":" + std::to_string(e.timestamp) + ",\"event\":\"" + to_string(e.kind) + "\",\"zone\":" +
           nlohmann::json(e.zone_id).dump() + ",\"value\":" + fixed4(e.value) + "}";
}

class CommandSink {
public:
    virtual ~CommandSink() = default;
    /// Writes one record plus newline. Throws SinkError.
    virtual void write_line(const std::string& line) = 0;
};

class StreamSink : public CommandSink {
public:
    explicit StreamSink(std::ostream& out) : out_(out) {}

    void write_line(const std::string& line) override {
        for (int attempt = 0; attempt < 2; ++attempt) {
            out_.clear();
            out_ << line << '\n';
            out_.flush();
            if (out_) return;
        }
        throw SinkError("output stream write failed");
    }

private:
    std::ostream& out_;
};

class TcpSink : public CommandSink {
public:
    TcpSink(std::string host, std::string port) : host_(std::move(host)), port_(std::move(port)) { connect(); }

    void write_line(const std::string& line) override {
        const std::string payload = line + "\n";
        boost::system::error_code ec;
        boost::asio::write(*socket_, boost::asio::buffer(payload), ec);
        if (!ec) return;
        // One reconnect-and-retry before giving up.
        try {
            connect();
        } catch (const SinkError&) {
            throw SinkError("tcp sink: write failed: " + ec.message());
        }
        boost::asio::write(*socket_, boost::asio::buffer(payload), ec);
        if (ec) throw SinkError("tcp sink: write failed after retry: " + ec.message());
    }

private:
    void connect() {
        boost::system::error_code ec;
        boost::asio::ip::tcp::resolver resolver(io_);
        auto endpoints = resolver.resolve(host_, port_, ec);
        if (ec) throw SinkError("tcp sink: cannot resolve " + host_ + ":" + port_ + ": " + ec.message());
        socket_ = std::make_unique<boost::asio::ip::tcp::socket>(io_);
        boost::asio::connect(*socket_, endpoints, ec);
        if (ec) throw SinkError("tcp sink: cannot connect to " + host_ + ":" + port_ + ": " + ec.message());
    }

    boost::asio::io_context io_;
    std::string host_;
    std::string port_;
    std::unique_ptr<boost::asio::ip::tcp::socket> socket_;
};

struct HostPort {
    std::string host;
    std::string port;
};

inline HostPort parse_host_port(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw ConfigError("expected HOST:PORT, got \"" + text + "\"");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

/// "stdout" or "tcp:HOST:PORT".
inline std::unique_ptr<CommandSink> open_sink(const std::string& spec, std::ostream& stdout_stream) {
    if (spec == "stdout") return std::make_unique<StreamSink>(stdout_stream);
    if (spec.rfind("tcp:", 0) == 0) {
        const auto hp = parse_host_port(spec.substr(4));
        return std::make_unique<TcpSink>(hp.host, hp.port);
    }
    throw ConfigError("sink must be stdout or tcp:HOST:PORT, got \"" + spec + "\"");
}

}  // namespace fizi::runtime
