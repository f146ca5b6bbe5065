#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamcc::detail {

/// Minimal element tree built on expat. Namespace prefixes are stripped from names.
struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<std::unique_ptr<XmlElement>> children;
    std::string text;
    std::size_t line = 0;

    std::optional<std::string_view> attribute(std::string_view key) const;
    const XmlElement* child(std::string_view child_name) const;
    std::vector<const XmlElement*> children_named(std::string_view child_name) const;
    /// Trimmed text of the `<text>` child, the pattern PNML uses for names and values.
    std::optional<std::string> text_child() const;
};

/// Throws ParseError with the offending line on malformed XML.
std::unique_ptr<XmlElement> parse_xml(std::istream& in);

std::string xml_escape(std::string_view raw);
std::string trim(std::string_view s);

}  // namespace streamcc::detail
