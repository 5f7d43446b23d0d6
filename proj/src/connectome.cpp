#include "biohybrid/connectome.hpp"

#include "biohybrid/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace biohybrid {

std::string_view to_string(Pathway pathway) {
    return pathway == Pathway::Forward ? "forward" : "reverse";
}

void ConnectivityMatrix::add(SynapseEntry entry) {
    if (entry.pre_neuron_id == entry.post_neuron_id) {
        throw Error(Errc::SelfLoop, "synapse " + entry.synapse_id + " connects neuron " +
                                        std::to_string(entry.pre_neuron_id) + " to itself");
    }
    if (find(entry.synapse_id) != nullptr) {
        throw Error(Errc::DuplicateSynapseId, entry.synapse_id);
    }
    entries_.push_back(std::move(entry));
}

std::vector<const SynapseEntry*> ConnectivityMatrix::outgoing(std::uint32_t pre) const {
    std::vector<const SynapseEntry*> out;
    for (const auto& e : entries_) {
        if (e.pre_neuron_id == pre) out.push_back(&e);
    }
    return out;
}

std::vector<const SynapseEntry*> ConnectivityMatrix::incoming(std::uint32_t post) const {
    std::vector<const SynapseEntry*> out;
    for (const auto& e : entries_) {
        if (e.post_neuron_id == post) out.push_back(&e);
    }
    return out;
}

const SynapseEntry* ConnectivityMatrix::find(std::string_view synapse_id) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const SynapseEntry& e) { return e.synapse_id == synapse_id; });
    return it == entries_.end() ? nullptr : &*it;
}

bool ConnectivityMatrix::knows_neuron(std::uint32_t id) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const SynapseEntry& e) {
        return e.pre_neuron_id == id || e.post_neuron_id == id;
    });
}

ConnectivityMatrix ConnectivityMatrix::canned(const NeuronIds& ids) {
    ConnectivityMatrix m;
    m.add({"ABm", ids.anpre, ids.bn, PartnerRole::Secondary, Pathway::Forward});
    m.add({"BAm", ids.bn, ids.anpost, PartnerRole::Primary, Pathway::Reverse});
    return m;
}

ConnectivityMatrix load_connectome(std::string_view text) {
    ConnectivityMatrix matrix;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string id, partner, pathway;
        std::int64_t pre = -1, post = -1;
        if (!(fields >> id)) continue;
        const auto where = "connectome line " + std::to_string(line_no);
        if (!(fields >> pre >> post >> partner >> pathway)) {
            throw Error(Errc::BadConfig, where + ": expected 5 fields");
        }
        std::string extra;
        if (fields >> extra) throw Error(Errc::BadConfig, where + ": trailing field '" + extra + "'");
        if (pre < 0 || post < 0 || pre > kField24Mask || post > kField24Mask) {
            throw Error(Errc::BadConfig, where + ": neuron id out of 24-bit range");
        }
        auto role = parse_role(partner);
        if (!role || *role == PartnerRole::Synapse) {
            throw Error(Errc::BadConfig, where + ": post partner must be primary or secondary");
        }
        Pathway pw;
        if (pathway == "forward") {
            pw = Pathway::Forward;
        } else if (pathway == "reverse") {
            pw = Pathway::Reverse;
        } else {
            throw Error(Errc::BadConfig, where + ": pathway must be forward or reverse");
        }
        matrix.add({id, static_cast<std::uint32_t>(pre), static_cast<std::uint32_t>(post), *role, pw});
    }
    return matrix;
}

ConnectivityMatrix load_connectome_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InputIoError, "cannot open connectome " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_connectome(buf.str());
}

std::string format_connectome(const ConnectivityMatrix& matrix) {
    std::ostringstream out;
    for (const auto& e : matrix.entries()) {
        out << e.synapse_id << ' ' << e.pre_neuron_id << ' ' << e.post_neuron_id << ' '
            << to_string(e.post_partner) << ' ' << to_string(e.pathway) << '\n';
    }
    return out.str();
}

}  // namespace biohybrid
