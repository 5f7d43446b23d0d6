#include "biohybrid/error.hpp"
#include "biohybrid/transport.hpp"

#include <spdlog/spdlog.h>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace biohybrid {

UdpEndpoint UdpEndpoint::parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw Error(Errc::BadConfig, "expected host:port, got '" + text + "'");
    }
    UdpEndpoint ep;
    ep.host = text.substr(0, colon);
    try {
        const int port = std::stoi(text.substr(colon + 1));
        if (port <= 0 || port > 65535) throw std::out_of_range("port");
        ep.port = static_cast<std::uint16_t>(port);
    } catch (const std::exception&) {
        throw Error(Errc::BadConfig, "bad port in '" + text + "'");
    }
    return ep;
}

std::string UdpEndpoint::to_string() const { return host + ":" + std::to_string(port); }

namespace {

sockaddr_in resolve(const UdpEndpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw Error(Errc::BadConfig, "cannot resolve " + ep.host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
    return addr;
}

}  // namespace

UdpTransport::UdpTransport(std::uint16_t listen_port, std::map<PartnerRole, UdpEndpoint> peers)
    : peers_(std::move(peers)) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw Error(Errc::NodeStartupFailure, std::string("socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(listen_port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string reason = std::strerror(errno);
        ::close(fd_);
        throw Error(Errc::NodeStartupFailure, "bind port " + std::to_string(listen_port) + ": " + reason);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    ::fcntl(fd_, F_SETFL, ::fcntl(fd_, F_GETFL) | O_NONBLOCK);
}

UdpTransport::~UdpTransport() {
    if (fd_ >= 0) ::close(fd_);
}

void UdpTransport::send(PartnerRole /*from*/, PartnerRole to, const Octets& octets, double /*at_ms*/) {
    auto it = peers_.find(to);
    if (it == peers_.end()) {
        spdlog::warn("udp: no address configured for {}", to_string(to));
        return;
    }
    const sockaddr_in addr = resolve(it->second);
    const auto n = ::sendto(fd_, octets.data(), octets.size(), 0,
                            reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
    if (n != static_cast<ssize_t>(octets.size())) {
        spdlog::warn("udp: send to {} failed: {}", it->second.to_string(), std::strerror(errno));
        return;
    }
    ++sent_;
}

bool UdpTransport::wait_readable(int timeout_ms) const {
    pollfd p{fd_, POLLIN, 0};
    return ::poll(&p, 1, timeout_ms) > 0;
}

void UdpTransport::deliver_until(double now_ms, const DeliveryHandler& handler) {
    std::uint8_t buf[64];
    for (;;) {
        const auto n = ::recv(fd_, buf, sizeof buf, 0);
        if (n < 0) break;
        auto packet = try_decode(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
        auto from = packet ? role_from_tag(packet->r1) : std::nullopt;
        if (!from) {
            ++dropped_;
            continue;
        }
        Delivery d;
        d.time_ms = now_ms;
        d.from = *from;
        d.to = PartnerRole::Synapse;  // filled in by the owning node loop
        std::copy(buf, buf + kPacketSize, d.octets.begin());
        handler(d);
    }
}

}  // namespace biohybrid
