#include "xml_dom.hpp"

#include <expat.h>

#include "streamcc/errors.hpp"

namespace streamcc::detail {

namespace {

std::string local_name(const char* qualified) {
    std::string_view name(qualified);
    auto colon = name.rfind(':');
    return std::string(colon == std::string_view::npos ? name : name.substr(colon + 1));
}

struct Builder {
    XML_Parser parser;
    std::unique_ptr<XmlElement> root;
    std::vector<XmlElement*> stack;

    static void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
        auto* self = static_cast<Builder*>(data);
        auto element = std::make_unique<XmlElement>();
        element->name = local_name(name);
        element->line = XML_GetCurrentLineNumber(self->parser);
        for (std::size_t i = 0; attrs[i]; i += 2) element->attributes.emplace_back(attrs[i], attrs[i + 1]);
        XmlElement* raw = element.get();
        if (self->stack.empty()) {
            self->root = std::move(element);
        } else {
            self->stack.back()->children.push_back(std::move(element));
        }
        self->stack.push_back(raw);
    }

    static void on_end(void* data, const XML_Char*) { static_cast<Builder*>(data)->stack.pop_back(); }

    static void on_text(void* data, const XML_Char* s, int len) {
        auto* self = static_cast<Builder*>(data);
        if (!self->stack.empty()) self->stack.back()->text.append(s, static_cast<std::size_t>(len));
    }
};

}  // namespace

std::optional<std::string_view> XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return std::string_view(v);
    }
    return std::nullopt;
}

const XmlElement* XmlElement::child(std::string_view child_name) const {
    for (const auto& c : children) {
        if (c->name == child_name) return c.get();
    }
    return nullptr;
}

std::vector<const XmlElement*> XmlElement::children_named(std::string_view child_name) const {
    std::vector<const XmlElement*> out;
    for (const auto& c : children) {
        if (c->name == child_name) out.push_back(c.get());
    }
    return out;
}

std::optional<std::string> XmlElement::text_child() const {
    const XmlElement* t = child("text");
    if (!t) return std::nullopt;
    return trim(t->text);
}

std::unique_ptr<XmlElement> parse_xml(std::istream& in) {
    Builder builder;
    builder.parser = XML_ParserCreate(nullptr);
    XML_SetUserData(builder.parser, &builder);
    XML_SetElementHandler(builder.parser, &Builder::on_start, &Builder::on_end);
    XML_SetCharacterDataHandler(builder.parser, &Builder::on_text);

    char buf[1 << 14];
    bool done = false;
    while (!done) {
        in.read(buf, sizeof(buf));
        auto len = in.gcount();
        done = len < static_cast<std::streamsize>(sizeof(buf));
        if (XML_Parse(builder.parser, buf, static_cast<int>(len), done) == XML_STATUS_ERROR) {
            std::string message = std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(builder.parser));
            auto line = XML_GetCurrentLineNumber(builder.parser);
            XML_ParserFree(builder.parser);
            throw ParseError(message, line);
        }
    }
    XML_ParserFree(builder.parser);
    if (!builder.root) throw ParseError("empty XML document");
    return std::move(builder.root);
}

std::string xml_escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace streamcc::detail
