#pragma once

// Minimal element tree over Expat. Keeps names, attributes (document order)
// and the line each element starts on; character data is ignored.

#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <expat.h>

#include "fizi/error.hpp"

namespace fizi::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    long line = 0;
    std::vector<Element> children;

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : attributes)
            if (k == key) return &v;
        return nullptr;
    }
};

class ParseError : public FormatError {
public:
    ParseError(const std::string& msg, long line) : FormatError(msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

inline Element parse(std::string_view text) {
    struct State {
        XML_Parser parser;
        Element root;
        std::vector<Element*> stack;
        bool have_root = false;
    } st;
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw FormatError("xml: cannot create parser");
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(
        parser.get(),
        [](void* ud, const XML_Char* name, const XML_Char** atts) {
            auto* s = static_cast<State*>(ud);
            Element e;
            e.name = name;
            e.line = static_cast<long>(XML_GetCurrentLineNumber(s->parser));
            for (int i = 0; atts[i]; i += 2) e.attributes.emplace_back(atts[i], atts[i + 1]);
            if (s->stack.empty()) {
                s->root = std::move(e);
                s->have_root = true;
                s->stack.push_back(&s->root);
            } else {
                auto& kids = s->stack.back()->children;
                kids.push_back(std::move(e));
                s->stack.push_back(&kids.back());
            }
        },
        [](void* ud, const XML_Char*) { static_cast<State*>(ud)->stack.pop_back(); });
    if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) == XML_STATUS_ERROR) {
        const long line = static_cast<long>(XML_GetCurrentLineNumber(parser.get()));
        throw ParseError("xml line " + std::to_string(line) + ": " + XML_ErrorString(XML_GetErrorCode(parser.get())),
                         line);
    }
    if (!st.have_root) throw ParseError("xml: no root element", 1);
    return std::move(st.root);
}

/// Strict decimal parse of the whole string.
inline std::optional<double> to_number(std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last) return std::nullopt;
    return v;
}

inline std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
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

}  // namespace fizi::xml
