#include "biohybrid/connectome.hpp"
#include "biohybrid/error.hpp"
#include "biohybrid/synapse_hub.hpp"

#include <doctest.h>

#include <sstream>

using namespace biohybrid;

namespace {

constexpr std::uint32_t kAnpre = 1, kAnpost = 2, kBn = 3;

HubConfig quiet_config(double abm = 0.6, double bam = 0.5) {
    HubConfig cfg;
    cfg.memristor.noise_sigma = 0.0;
    cfg.initial_weights = {{"ABm", abm}, {"BAm", bam}};
    return cfg;
}

AerPacket primary(std::uint32_t id, std::uint32_t dt) { return {kPrimaryTag, id, 0, dt}; }
AerPacket secondary(std::uint32_t id, EventKind kind, std::uint32_t ts) {
    return {kSecondaryTag, id, secondary_kind_code(kind), ts};
}

template <class T>
std::vector<T> entries_of(const SynapseHub& hub) {
    std::vector<T> out;
    for (const auto& e : hub.log()) {
        if (const auto* x = std::get_if<T>(&e)) out.push_back(*x);
    }
    return out;
}

}  // namespace

TEST_CASE("canned connectome") {
    const auto m = ConnectivityMatrix::canned();
    REQUIRE(m.entries().size() == 2);
    const auto* abm = m.find("ABm");
    REQUIRE(abm);
    CHECK(abm->pre_neuron_id == kAnpre);
    CHECK(abm->post_neuron_id == kBn);
    CHECK(abm->post_partner == PartnerRole::Secondary);
    CHECK(abm->pathway == Pathway::Forward);
    const auto* bam = m.find("BAm");
    REQUIRE(bam);
    CHECK(bam->pre_neuron_id == kBn);
    CHECK(bam->post_neuron_id == kAnpost);
    CHECK(bam->post_partner == PartnerRole::Primary);
    CHECK(bam->pathway == Pathway::Reverse);
    CHECK(m.outgoing(999).empty());
    CHECK(m.knows_neuron(kAnpost));
    CHECK_FALSE(m.knows_neuron(999));
}

TEST_CASE("connectome text format") {
    const auto m = load_connectome("# comment\n\nABm 1 3 secondary forward\nBAm 3 2 primary reverse  # tail\n");
    CHECK(m.entries().size() == 2);
    CHECK(load_connectome(format_connectome(m)).entries().size() == 2);
    CHECK(load_connectome("").empty());

    auto code_of = [](const char* text) {
        try {
            load_connectome(text);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::InputIoError;
    };
    CHECK(code_of("S 4 4 secondary forward\n") == Errc::SelfLoop);
    CHECK(code_of("S 1 3 secondary forward\nS 2 3 secondary forward\n") == Errc::DuplicateSynapseId);
    CHECK(code_of("S 1 3 secondary\n") == Errc::BadConfig);
    CHECK(code_of("S 1 3 hub forward\n") == Errc::BadConfig);
    CHECK(code_of("S 1 3 secondary sideways\n") == Errc::BadConfig);
    CHECK(code_of("S 1 3 secondary forward extra\n") == Errc::BadConfig);
    CHECK(code_of("S 1 16777216 secondary forward\n") == Errc::BadConfig);
}

TEST_CASE("presynaptic spike stimulates with the programmed weight") {
    // Thresholds that make a lone spike a no-change event, so the weight is untouched.
    HubConfig cfg = quiet_config(0.6);
    cfg.bcm = {0.5, 20.0};
    SynapseHub hub(ConnectivityMatrix::canned(), cfg, 1);
    const auto r = hub.on_packet(primary(kAnpre, 100), PartnerRole::Primary);
    CHECK(r.status == PacketStatus::Accepted);
    REQUIRE(r.outbound.size() == 1);
    CHECK(r.outbound[0].destination == PartnerRole::Secondary);
    CHECK(r.outbound[0].packet == AerPacket{kSynapseTag, kBn, weight_to_byte(0.6), 100});
    CHECK(weight_to_byte(0.6) == 153);
}

TEST_CASE("program-then-stimulate") {
    // A lone spike is 1 Hz: LTD with default thresholds.
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(0.6), 1);
    const auto r = hub.on_packet(primary(kAnpre, 100), PartnerRole::Primary);
    const double expected = 0.6 - 0.05 * 0.6;
    CHECK(hub.device("ABm").weight() == doctest::Approx(expected));
    REQUIRE(r.outbound.size() == 1);
    CHECK(r.outbound[0].packet.r2 == weight_to_byte(expected));
}

TEST_CASE("postsynaptic spike with a silent presynaptic neuron depresses the reverse synapse") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(0.6, 0.5), 1);
    const auto r = hub.on_packet(primary(kAnpost, 250), PartnerRole::Primary);
    CHECK(r.status == PacketStatus::Accepted);
    CHECK(r.outbound.empty());
    const auto records = entries_of<PlasticityRecord>(hub);
    REQUIRE(records.size() == 1);
    CHECK(records[0].synapse_id == "BAm");
    CHECK(records[0].decision == PlasticityDecision::LTD);
    CHECK(records[0].abs_time == 250);
    CHECK(hub.device("BAm").weight() == doctest::Approx(0.5 * 0.95));
    CHECK(hub.device("ABm").weight() == 0.6);
}

TEST_CASE("fast presynaptic firing potentiates the reverse synapse") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 1);
    // BN APs every 40 ms (25 Hz) on the hub axis, anchored by a primary packet.
    hub.on_packet(primary(kAnpre, 1000), PartnerRole::Primary);
    for (std::uint32_t t = 1040; t <= 2000; t += 40) hub.on_packet(secondary(kBn, EventKind::ForcedAp, t), PartnerRole::Secondary);
    hub.on_packet(primary(kAnpost, 1000), PartnerRole::Primary);  // at 2000
    const auto records = entries_of<PlasticityRecord>(hub);
    CHECK(records.back().synapse_id == "BAm");
    CHECK(records.back().decision == PlasticityDecision::LTP);
    CHECK(records.back().abs_time == 2000);
}

TEST_CASE("PSPs are logged but neither learn nor propagate") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 1);
    const auto r = hub.on_packet(secondary(kBn, EventKind::Psp, 50), PartnerRole::Secondary);
    CHECK(r.status == PacketStatus::Accepted);
    CHECK(r.outbound.empty());
    CHECK(entries_of<PlasticityRecord>(hub).empty());
    REQUIRE(entries_of<NetworkEvent>(hub).size() == 1);
    CHECK(entries_of<NetworkEvent>(hub)[0].kind == EventKind::Psp);
    CHECK(hub.history(kBn) == nullptr);
}

TEST_CASE("BN action potentials are relayed to ANPOST") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(0.3, 0.5), 1);
    const auto r = hub.on_packet(secondary(kBn, EventKind::ForcedAp, 70), PartnerRole::Secondary);
    REQUIRE(r.outbound.size() == 1);
    CHECK(r.outbound[0].destination == PartnerRole::Primary);
    CHECK(r.outbound[0].packet.neuron_id == kAnpost);
    CHECK(r.outbound[0].packet.r2 == weight_to_byte(0.5));
}

TEST_CASE("bad packets are dropped without output") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 1);
    CHECK(hub.on_packet(primary(999, 10), PartnerRole::Primary).status == PacketStatus::UnknownNeuron);
    CHECK(hub.on_packet({kSecondaryTag, kBn, 7, 10}, PartnerRole::Secondary).status ==
          PacketStatus::MalformedEventKind);
    CHECK(hub.on_packet({kPrimaryTag, kAnpre, 1, 10}, PartnerRole::Primary).status ==
          PacketStatus::MalformedEventKind);
    CHECK(hub.on_packet({kSynapseTag, kBn, 0, 10}, PartnerRole::Synapse).status == PacketStatus::UnknownSource);
    CHECK(hub.log().empty());
    CHECK(hub.dropped_unknown_neuron() == 1);
    CHECK(hub.dropped_malformed() == 2);
    // The two rejected primary packets still advanced the relative-time chain.
    CHECK(hub.clock().last_primary_abs == 20);
    hub.on_packet(primary(kAnpre, 5), PartnerRole::Primary);
    CHECK(entries_of<NetworkEvent>(hub).back().abs_time == 25);
}

TEST_CASE("log length is accepted packets plus evaluations") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 3);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const auto pick = rng() % 4;
        if (pick == 0) hub.on_packet(primary(kAnpre, rng() % 30), PartnerRole::Primary);
        if (pick == 1) hub.on_packet(primary(kAnpost, rng() % 30), PartnerRole::Primary);
        if (pick == 2) hub.on_packet(secondary(kBn, EventKind::ForcedAp, to_ts24(hub.clock().last_primary_abs + 3)), PartnerRole::Secondary);
        if (pick == 3) hub.on_packet(secondary(kBn, EventKind::Psp, to_ts24(hub.clock().last_primary_abs + 3)), PartnerRole::Secondary);
    }
    CHECK(hub.log().size() == hub.accepted() + hub.evaluations());
    for (const auto& rec : entries_of<PlasticityRecord>(hub)) CHECK(hub.matrix().find(rec.synapse_id));
}

TEST_CASE("every forward spike yields one packet per outgoing synapse") {
    ConnectivityMatrix m;
    m.add({"S1", 1, 3, PartnerRole::Secondary, Pathway::Forward});
    m.add({"S2", 1, 4, PartnerRole::Secondary, Pathway::Forward});
    m.add({"S3", 1, 2, PartnerRole::Primary, Pathway::Forward});
    SynapseHub hub(m, HubConfig{}, 1);
    const auto r = hub.on_packet(primary(1, 10), PartnerRole::Primary);
    CHECK(r.outbound.size() == 3);
}

TEST_CASE("export") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 1);
    std::ostringstream ev0, pl0;
    export_log(hub, ev0, pl0);
    CHECK(ev0.str() == "abs_time_ms,neuron_id,source,kind\n");
    CHECK(pl0.str() == "abs_time_ms,synapse_id,decision,weight_after\n");

    HubConfig cfg = quiet_config(0.6);
    cfg.bcm = {0.5, 20.0};
    SynapseHub one(ConnectivityMatrix::canned(), cfg, 1);
    one.on_packet(primary(kAnpre, 100), PartnerRole::Primary);
    std::ostringstream ev, pl;
    export_log(one, ev, pl);
    CHECK(ev.str() == "abs_time_ms,neuron_id,source,kind\n100,1,primary,spike\n");
    CHECK(pl.str() == "abs_time_ms,synapse_id,decision,weight_after\n100,ABm,NoChange,0.600000000\n");
}

TEST_CASE("late secondary reports are sorted into place on export") {
    SynapseHub hub(ConnectivityMatrix::canned(), quiet_config(), 1);
    hub.on_packet(primary(kAnpre, 100), PartnerRole::Primary);
    hub.on_packet(primary(kAnpre, 100), PartnerRole::Primary);  // 200
    hub.on_packet(secondary(kBn, EventKind::Psp, 105), PartnerRole::Secondary);
    std::ostringstream ev, pl;
    export_log(hub, ev, pl);
    CHECK(ev.str() ==
          "abs_time_ms,neuron_id,source,kind\n100,1,primary,spike\n105,3,secondary,psp\n200,1,primary,spike\n");
}
