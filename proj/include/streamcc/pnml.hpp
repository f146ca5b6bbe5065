#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "streamcc/petri_net.hpp"

namespace streamcc {

struct PnmlOptions {
    /// Case-insensitive ECMAScript regex; a matching transition name makes the transition silent.
    std::string silent_pattern = "^(tau.*|τ)$";
    /// Overrides any final marking annotated in the document.
    std::optional<std::map<std::string, std::uint32_t>> final_marking;
};

/// Reads the supported PNML subset: a single net (optionally wrapped in one page)
/// with places, transitions and unit-weight arcs. A final marking is taken from
/// `options.final_marking` or from a net-level `<finalmarkings>` element.
PetriNet load_pnml(std::istream& source, const PnmlOptions& options = {});
PetriNet load_pnml_file(const std::filesystem::path& path, const PnmlOptions& options = {});

/// Parses `{"final_marking": {"place": count, ...}}`.
std::map<std::string, std::uint32_t> load_final_marking(std::istream& source);
std::map<std::string, std::uint32_t> load_final_marking_file(const std::filesystem::path& path);

/// Writes `net` as PNML, including the final marking annotation and silent transitions
/// as unnamed transitions.
void write_pnml(std::ostream& out, const PetriNet& net, const std::string& net_id = "net");

bool is_silent_name(const std::string& name, const PnmlOptions& options = {});

}  // namespace streamcc
