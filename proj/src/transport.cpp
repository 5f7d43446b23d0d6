#include "biohybrid/transport.hpp"

#include "biohybrid/error.hpp"

#include <algorithm>

namespace biohybrid {

void LinkProfile::validate() const {
    if (static_delay_ms < 0.0 || jitter_ms < 0.0 || loss_prob < 0.0 || loss_prob > 1.0) {
        throw Error(Errc::BadConfig, "link profile needs delay >= 0, jitter >= 0, loss in [0, 1]");
    }
}

SimScheduler::SimScheduler(std::uint64_t seed) : seed_(seed) {}

Rng& SimScheduler::link_rng(const LinkKey& key) {
    auto it = rngs_.find(key);
    if (it == rngs_.end()) {
        const std::string name = "link/" + std::string(to_string(key.first)) + "->" +
                                 std::string(to_string(key.second));
        it = rngs_.emplace(key, make_stream(seed_, name)).first;
    }
    return it->second;
}

std::optional<double> SimScheduler::send(const LinkProfile& link, PartnerRole from, PartnerRole to,
                                         const Octets& octets, double send_ms) {
    const LinkKey key{from, to};
    auto& rng = link_rng(key);
    if (link.loss_prob > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < link.loss_prob) {
        return std::nullopt;
    }
    double jitter = 0.0;
    if (link.jitter_ms > 0.0) {
        jitter = std::uniform_real_distribution<double>(-link.jitter_ms, link.jitter_ms)(rng);
    }
    double at = std::max(send_ms, send_ms + link.static_delay_ms + jitter);
    if (link.preserve_order) {
        if (auto it = last_delivery_.find(key); it != last_delivery_.end()) at = std::max(at, it->second);
        last_delivery_[key] = at;
    }
    schedule({at, from, to, octets});
    return std::max(at, now_);
}

void SimScheduler::schedule(Delivery delivery) {
    delivery.time_ms = std::max(delivery.time_ms, now_);
    queue_.push({delivery, next_sequence_++});
}

std::vector<Delivery> SimScheduler::run_until(double t_end) {
    std::vector<Delivery> out;
    run_until(t_end, [&](const Delivery& d) { out.push_back(d); });
    return out;
}

void SimScheduler::run_until(double t_end, const DeliveryHandler& handler) {
    while (!queue_.empty() && queue_.top().delivery.time_ms <= t_end) {
        Delivery d = queue_.top().delivery;
        queue_.pop();
        now_ = std::max(now_, d.time_ms);
        handler(d);
    }
    now_ = std::max(now_, t_end);
}

SimTransport::SimTransport(std::uint64_t seed,
                           std::map<std::pair<PartnerRole, PartnerRole>, LinkProfile> links)
    : scheduler_(seed), links_(std::move(links)) {
    for (const auto& [key, profile] : links_) profile.validate();
}

const LinkProfile& SimTransport::link(PartnerRole from, PartnerRole to) const {
    static const LinkProfile ideal{};
    auto it = links_.find({from, to});
    return it == links_.end() ? ideal : it->second;
}

void SimTransport::send(PartnerRole from, PartnerRole to, const Octets& octets, double at_ms) {
    if (!scheduler_.send(link(from, to), from, to, octets, at_ms)) ++lost_;
}

void SimTransport::deliver_until(double now_ms, const DeliveryHandler& handler) {
    scheduler_.run_until(now_ms, handler);
}

}  // namespace biohybrid
