#include "streamcc/petri_net.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "streamcc/errors.hpp"

namespace streamcc {

Marking::Marking(std::initializer_list<Entry> entries) {
    for (const auto& [place, tokens] : entries) add(place, tokens);
}

std::uint32_t Marking::count(PlaceIndex place) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), place,
                               [](const Entry& e, PlaceIndex p) { return e.first < p; });
    return (it != entries_.end() && it->first == place) ? it->second : 0;
}

void Marking::add(PlaceIndex place, std::uint32_t tokens) {
    if (tokens == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), place,
                               [](const Entry& e, PlaceIndex p) { return e.first < p; });
    if (it != entries_.end() && it->first == place) {
        it->second += tokens;
    } else {
        entries_.insert(it, {place, tokens});
    }
}

bool Marking::remove(PlaceIndex place) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), place,
                               [](const Entry& e, PlaceIndex p) { return e.first < p; });
    if (it == entries_.end() || it->first != place) return false;
    if (--it->second == 0) entries_.erase(it);
    return true;
}

std::uint64_t Marking::total() const noexcept {
    return std::accumulate(entries_.begin(), entries_.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const Entry& e) { return acc + e.second; });
}

std::size_t Marking::hash() const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& [place, tokens] : entries_) {
        h ^= (static_cast<std::size_t>(place) << 32) ^ tokens;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return h;
}

std::optional<PlaceIndex> PetriNet::place_index(std::string_view id) const {
    auto it = place_lookup_.find(std::string(id));
    if (it == place_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<TransitionIndex> PetriNet::transition_index(std::string_view id) const {
    auto it = transition_lookup_.find(std::string(id));
    if (it == transition_lookup_.end()) return std::nullopt;
    return it->second;
}

std::span<const TransitionIndex> PetriNet::transitions_labeled(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return {};
    return it->second;
}

std::size_t PetriNet::arc_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : transitions_) n += t.inputs.size() + t.outputs.size();
    return n;
}

Marking PetriNet::marking(const std::map<std::string, std::uint32_t>& tokens) const {
    Marking m;
    for (const auto& [id, count] : tokens) {
        auto p = place_index(id);
        if (!p) throw ValidationError("marking references unknown place '" + id + "'");
        m.add(*p, count);
    }
    return m;
}

std::map<std::string, std::uint32_t> PetriNet::named(const Marking& m) const {
    std::map<std::string, std::uint32_t> out;
    for (const auto& [place, tokens] : m.entries()) out[places_.at(place)] = tokens;
    return out;
}

std::string PetriNet::format(const Marking& m) const {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (const auto& [place, tokens] : m.entries()) {
        if (!first) os << ',';
        first = false;
        os << places_.at(place);
        if (tokens > 1) os << '^' << tokens;
    }
    os << ']';
    return os.str();
}

PetriNetBuilder& PetriNetBuilder::place(std::string id, std::uint32_t initial_tokens) {
    places_.emplace_back(std::move(id), initial_tokens);
    return *this;
}

PetriNetBuilder& PetriNetBuilder::transition(std::string id, std::optional<ActivityLabel> label) {
    transitions_.emplace_back(std::move(id), std::move(label));
    return *this;
}

PetriNetBuilder& PetriNetBuilder::arc(std::string source, std::string target) {
    arcs_.emplace_back(std::move(source), std::move(target));
    return *this;
}

PetriNetBuilder& PetriNetBuilder::final_tokens(std::string place, std::uint32_t tokens) {
    final_.emplace_back(std::move(place), tokens);
    final_declared_ = true;
    return *this;
}

PetriNetBuilder& PetriNetBuilder::declare_final() {
    final_declared_ = true;
    return *this;
}

PetriNet PetriNetBuilder::build() const {
    PetriNet net;

    std::vector<std::string> place_ids;
    for (const auto& [id, _] : places_) place_ids.push_back(id);
    std::sort(place_ids.begin(), place_ids.end());
    if (std::adjacent_find(place_ids.begin(), place_ids.end()) != place_ids.end())
        throw ValidationError("duplicate place id '" + *std::adjacent_find(place_ids.begin(), place_ids.end()) + "'");

    std::vector<std::pair<std::string, std::optional<ActivityLabel>>> transitions = transitions_;
    std::sort(transitions.begin(), transitions.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < transitions.size(); ++i) {
        if (transitions[i].first == transitions[i - 1].first)
            throw ValidationError("duplicate transition id '" + transitions[i].first + "'");
    }

    net.places_ = place_ids;
    for (PlaceIndex i = 0; i < net.places_.size(); ++i) net.place_lookup_.emplace(net.places_[i], i);
    for (TransitionIndex i = 0; i < transitions.size(); ++i) {
        const auto& [id, label] = transitions[i];
        if (net.place_lookup_.count(id))
            throw ValidationError("id '" + id + "' is used by both a place and a transition");
        if (label && label->empty())
            throw ValidationError("transition '" + id + "' has an empty label; use no label for silent transitions");
        net.transitions_.push_back(Transition{id, label, {}, {}});
        net.transition_lookup_.emplace(id, i);
        if (label) net.by_label_[*label].push_back(i);
    }

    std::set<std::pair<std::string, std::string>> seen_arcs;
    for (const auto& [source, target] : arcs_) {
        if (!seen_arcs.emplace(source, target).second)
            throw ValidationError("duplicate arc " + source + " -> " + target +
                                  " (weighted arcs are not supported)");
        auto sp = net.place_index(source);
        auto st = net.transition_index(source);
        auto tp = net.place_index(target);
        auto tt = net.transition_index(target);
        if (!sp && !st) throw ValidationError("arc source '" + source + "' does not exist");
        if (!tp && !tt) throw ValidationError("arc target '" + target + "' does not exist");
        if (sp && tt) {
            net.transitions_[*tt].inputs.push_back(*sp);
        } else if (st && tp) {
            net.transitions_[*st].outputs.push_back(*tp);
        } else {
            throw ValidationError("arc " + source + " -> " + target + " must connect a place and a transition");
        }
    }
    for (auto& t : net.transitions_) {
        std::sort(t.inputs.begin(), t.inputs.end());
        std::sort(t.outputs.begin(), t.outputs.end());
    }

    for (const auto& [id, tokens] : places_) net.initial_.add(*net.place_index(id), tokens);
    for (const auto& [id, tokens] : final_) {
        auto p = net.place_index(id);
        if (!p) throw ValidationError("final marking references unknown place '" + id + "'");
        net.final_.add(*p, tokens);
    }
    net.has_final_ = final_declared_;
    return net;
}

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t) {
    for (PlaceIndex p : net.transition(t).inputs) {
        if (m.count(p) == 0) return false;
    }
    return true;
}

std::vector<TransitionIndex> enabled_transitions(const PetriNet& net, const Marking& m) {
    std::vector<TransitionIndex> out;
    for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
        if (is_enabled(net, m, t)) out.push_back(t);
    }
    return out;
}

Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t) {
    const Transition& tr = net.transition(t);
    Marking next = m;
    for (PlaceIndex p : tr.inputs) {
        if (!next.remove(p))
            throw FiringNotEnabled("transition '" + tr.id + "' is not enabled in " + net.format(m));
    }
    for (PlaceIndex p : tr.outputs) next.add(p);
    return next;
}

bool is_final(const PetriNet& net, const Marking& m) {
    return m == net.final_marking();
}

}  // namespace streamcc
