#pragma once

#include "biohybrid/protocol.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace biohybrid {

enum class Pathway { Forward, Reverse };

std::string_view to_string(Pathway pathway);

struct SynapseEntry {
    std::string synapse_id;
    std::uint32_t pre_neuron_id = 0;
    std::uint32_t post_neuron_id = 0;
    PartnerRole post_partner = PartnerRole::Secondary;
    Pathway pathway = Pathway::Forward;
};

// Neuron ids of the three-neuron network. Ids are global across partners
// because the hub keys spike histories by id alone.
struct NeuronIds {
    std::uint32_t anpre = 1;
    std::uint32_t anpost = 2;
    std::uint32_t bn = 3;
};

class ConnectivityMatrix {
public:
    // Throws Error{DuplicateSynapseId} or Error{SelfLoop}.
    void add(SynapseEntry entry);

    const std::vector<SynapseEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    std::vector<const SynapseEntry*> outgoing(std::uint32_t pre) const;
    std::vector<const SynapseEntry*> incoming(std::uint32_t post) const;
    const SynapseEntry* find(std::string_view synapse_id) const;
    bool knows_neuron(std::uint32_t id) const;

    // ANPRE -> ABm -> BN (forward) and BN -> BAm -> ANPOST (reverse).
    static ConnectivityMatrix canned(const NeuronIds& ids = {});

private:
    std::vector<SynapseEntry> entries_;
};

// One entry per line: `synapse_id pre_id post_id post_partner pathway`, with
// post_partner in {primary, secondary} and pathway in {forward, reverse}.
// Blank lines and `#` comments are ignored.
ConnectivityMatrix load_connectome(std::string_view text);
ConnectivityMatrix load_connectome_file(const std::string& path);

std::string format_connectome(const ConnectivityMatrix& matrix);

}  // namespace biohybrid
