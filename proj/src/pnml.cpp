#include "streamcc/pnml.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <regex>

#include <json.hpp>

#include "streamcc/errors.hpp"
#include "xml_dom.hpp"

namespace streamcc {

using detail::XmlElement;

namespace {

std::uint32_t parse_count(const std::string& text, std::size_t line, const char* what) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(std::string("invalid ") + what + " '" + text + "'", line);
    return value;
}

std::string required_id(const XmlElement& e) {
    auto id = e.attribute("id");
    if (!id || id->empty()) throw ParseError("<" + e.name + "> without id attribute", e.line);
    return std::string(*id);
}

bool marked_invisible(const XmlElement& transition) {
    for (const XmlElement* tool : transition.children_named("toolspecific")) {
        auto activity = tool->attribute("activity");
        if (activity && *activity == "$invisible$") return true;
    }
    return false;
}

}  // namespace

bool is_silent_name(const std::string& name, const PnmlOptions& options) {
    if (name.empty()) return true;
    const std::regex pattern(options.silent_pattern, std::regex::ECMAScript | std::regex::icase);
    return std::regex_match(name, pattern);
}

PetriNet load_pnml(std::istream& source, const PnmlOptions& options) {
    auto root = detail::parse_xml(source);
    const XmlElement* net = nullptr;
    if (root->name == "net") {
        net = root.get();
    } else {
        auto nets = root->children_named("net");
        if (nets.size() != 1)
            throw ValidationError("expected exactly one <net> element, found " + std::to_string(nets.size()));
        net = nets.front();
    }

    const XmlElement* content = net;
    auto pages = net->children_named("page");
    if (pages.size() > 1) throw ValidationError("PNML documents with multiple pages are not supported");
    if (pages.size() == 1) content = pages.front();

    const std::regex silent(options.silent_pattern, std::regex::ECMAScript | std::regex::icase);
    PetriNetBuilder builder;
    for (const auto& child : content->children) {
        const XmlElement& e = *child;
        if (e.name == "place") {
            std::uint32_t tokens = 0;
            if (const XmlElement* im = e.child("initialMarking")) {
                if (auto text = im->text_child()) tokens = parse_count(*text, im->line, "initial marking");
            }
            builder.place(required_id(e), tokens);
        } else if (e.name == "transition") {
            std::optional<ActivityLabel> label;
            if (const XmlElement* name = e.child("name")) label = name->text_child();
            if (label && (label->empty() || std::regex_match(*label, silent))) label.reset();
            if (marked_invisible(e)) label.reset();
            builder.transition(required_id(e), label);
        } else if (e.name == "arc") {
            auto src = e.attribute("source");
            auto tgt = e.attribute("target");
            if (!src || !tgt) throw ParseError("<arc> requires source and target attributes", e.line);
            if (const XmlElement* ins = e.child("inscription")) {
                if (auto text = ins->text_child()) {
                    if (parse_count(*text, ins->line, "arc inscription") != 1)
                        throw ValidationError("weighted arc " + std::string(*src) + " -> " + std::string(*tgt) +
                                              " is not supported (line " + std::to_string(e.line) + ")");
                }
            }
            builder.arc(std::string(*src), std::string(*tgt));
        }
    }

    if (options.final_marking) {
        for (const auto& [place, tokens] : *options.final_marking) builder.final_tokens(place, tokens);
        builder.declare_final();
    } else if (const XmlElement* finals = net->child("finalmarkings")) {
        builder.declare_final();
        if (const XmlElement* marking = finals->child("marking")) {
            for (const XmlElement* p : marking->children_named("place")) {
                auto idref = p->attribute("idref");
                if (!idref) throw ParseError("final marking <place> without idref", p->line);
                auto text = p->text_child();
                std::uint32_t tokens = text ? parse_count(*text, p->line, "final marking") : 1;
                if (tokens > 0) builder.final_tokens(std::string(*idref), tokens);
            }
        }
    }
    return builder.build();
}

PetriNet load_pnml_file(const std::filesystem::path& path, const PnmlOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open model file '" + path.string() + "'");
    return load_pnml(in, options);
}

std::map<std::string, std::uint32_t> load_final_marking(std::istream& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid final-marking JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("final_marking") || !doc["final_marking"].is_object())
        throw ParseError("final-marking JSON must contain a \"final_marking\" object");
    std::map<std::string, std::uint32_t> out;
    for (const auto& [place, count] : doc["final_marking"].items()) {
        if (!count.is_number_unsigned())
            throw ParseError("final-marking count for '" + place + "' must be a non-negative integer");
        out[place] = count.get<std::uint32_t>();
    }
    return out;
}

std::map<std::string, std::uint32_t> load_final_marking_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open final-marking file '" + path.string() + "'");
    return load_final_marking(in);
}

void write_pnml(std::ostream& out, const PetriNet& net, const std::string& net_id) {
    using detail::xml_escape;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n";
    out << "  <net id=\"" << xml_escape(net_id)
        << "\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n";
    out << "    <page id=\"page0\">\n";
    for (PlaceIndex p = 0; p < net.places().size(); ++p) {
        out << "      <place id=\"" << xml_escape(net.places()[p]) << "\">";
        if (auto tokens = net.initial_marking().count(p))
            out << "<initialMarking><text>" << tokens << "</text></initialMarking>";
        out << "</place>\n";
    }
    for (const Transition& t : net.transitions()) {
        out << "      <transition id=\"" << xml_escape(t.id) << "\">";
        if (t.label) out << "<name><text>" << xml_escape(*t.label) << "</text></name>";
        out << "</transition>\n";
    }
    std::size_t arc = 0;
    for (const Transition& t : net.transitions()) {
        for (PlaceIndex p : t.inputs)
            out << "      <arc id=\"a" << arc++ << "\" source=\"" << xml_escape(net.places()[p]) << "\" target=\""
                << xml_escape(t.id) << "\"/>\n";
        for (PlaceIndex p : t.outputs)
            out << "      <arc id=\"a" << arc++ << "\" source=\"" << xml_escape(t.id) << "\" target=\""
                << xml_escape(net.places()[p]) << "\"/>\n";
    }
    out << "    </page>\n";
    if (net.has_final_marking()) {
        out << "    <finalmarkings>\n      <marking>\n";
        for (const auto& [place, tokens] : net.final_marking().entries())
            out << "        <place idref=\"" << xml_escape(net.places()[place]) << "\"><text>" << tokens
                << "</text></place>\n";
        out << "      </marking>\n    </finalmarkings>\n";
    }
    out << "  </net>\n</pnml>\n";
}

}  // namespace streamcc
