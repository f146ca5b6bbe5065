#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace streamcc {

using PlaceIndex = std::uint32_t;
using TransitionIndex = std::uint32_t;
using ActivityLabel = std::string;

/// Multiset of tokens over places, stored sparsely and sorted by place index.
///
/// Zero counts are never stored, so two markings compare equal iff they hold the
/// same tokens. Place indices follow the owning net's sorted place ids, which makes
/// iteration order stable across runs.
class Marking {
public:
    using Entry = std::pair<PlaceIndex, std::uint32_t>;

    Marking() = default;
    Marking(std::initializer_list<Entry> entries);

    std::uint32_t count(PlaceIndex place) const noexcept;
    void add(PlaceIndex place, std::uint32_t tokens = 1);
    /// Removes one token; returns false (and leaves the marking untouched) if the place is empty.
    bool remove(PlaceIndex place);

    std::uint64_t total() const noexcept;
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const Entry> entries() const noexcept { return entries_; }

    std::size_t hash() const noexcept;

    friend bool operator==(const Marking&, const Marking&) = default;
    friend auto operator<=>(const Marking&, const Marking&) = default;

private:
    std::vector<Entry> entries_;
};

struct MarkingHash {
    std::size_t operator()(const Marking& m) const noexcept { return m.hash(); }
};

struct Transition {
    std::string id;
    /// Absent for silent transitions.
    std::optional<ActivityLabel> label;
    std::vector<PlaceIndex> inputs;
    std::vector<PlaceIndex> outputs;

    bool silent() const noexcept { return !label.has_value(); }
};

/// Labeled place/transition net with initial and final markings. Immutable once built.
class PetriNet {
public:
    const std::vector<std::string>& places() const noexcept { return places_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    const Transition& transition(TransitionIndex t) const { return transitions_.at(t); }

    std::optional<PlaceIndex> place_index(std::string_view id) const;
    std::optional<TransitionIndex> transition_index(std::string_view id) const;

    /// Transitions carrying `label`, in transition id order.
    std::span<const TransitionIndex> transitions_labeled(std::string_view label) const;

    const Marking& initial_marking() const noexcept { return initial_; }
    const Marking& final_marking() const noexcept { return final_; }
    bool has_final_marking() const noexcept { return has_final_; }

    std::size_t arc_count() const noexcept;

    /// Builds a marking from place ids; throws ValidationError for unknown ids.
    Marking marking(const std::map<std::string, std::uint32_t>& tokens) const;
    std::map<std::string, std::uint32_t> named(const Marking& m) const;
    std::string format(const Marking& m) const;

private:
    friend class PetriNetBuilder;

    std::vector<std::string> places_;
    std::vector<Transition> transitions_;
    std::unordered_map<std::string, PlaceIndex> place_lookup_;
    std::unordered_map<std::string, TransitionIndex> transition_lookup_;
    std::unordered_map<std::string, std::vector<TransitionIndex>> by_label_;
    Marking initial_;
    Marking final_;
    bool has_final_ = false;
};

/// Collects places, transitions and arcs by id and produces a validated PetriNet.
///
/// Places and transitions are re-indexed in sorted id order on build(), so the
/// indices of the resulting net do not depend on insertion order.
class PetriNetBuilder {
public:
    PetriNetBuilder& place(std::string id, std::uint32_t initial_tokens = 0);
    PetriNetBuilder& transition(std::string id, std::optional<ActivityLabel> label);
    PetriNetBuilder& arc(std::string source, std::string target);
    PetriNetBuilder& final_tokens(std::string place, std::uint32_t tokens = 1);
    /// Marks the final marking as specified even if it ends up empty.
    PetriNetBuilder& declare_final();

    /// Throws ValidationError on duplicate ids, dangling or duplicated arcs,
    /// place-to-place or transition-to-transition arcs, and unknown marking places.
    PetriNet build() const;

private:
    std::vector<std::pair<std::string, std::uint32_t>> places_;
    std::vector<std::pair<std::string, std::optional<ActivityLabel>>> transitions_;
    std::vector<std::pair<std::string, std::string>> arcs_;
    std::vector<std::pair<std::string, std::uint32_t>> final_;
    bool final_declared_ = false;
};

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t);
std::vector<TransitionIndex> enabled_transitions(const PetriNet& net, const Marking& m);
/// Throws FiringNotEnabled if `t` is not enabled in `m`.
Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t);
bool is_final(const PetriNet& net, const Marking& m);

}  // namespace streamcc

template <>
struct std::hash<streamcc::Marking> {
    std::size_t operator()(const streamcc::Marking& m) const noexcept { return m.hash(); }
};
