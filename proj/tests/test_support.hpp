#pragma once

#include <expat.h>

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pubtrend/error.hpp"
#include "pubtrend/transport.hpp"

namespace pubtrend::testing {

/// Element tree summary of an XML document parsed with expat.
struct XmlElement {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<int> children;  // indices into XmlDocument::elements
    int parent = -1;
};

struct XmlDocument {
    bool well_formed = false;
    std::string error;
    std::vector<XmlElement> elements;

    [[nodiscard]] std::vector<const XmlElement*> find(const std::string& name,
                                                      const std::string& cls = {}) const {
        std::vector<const XmlElement*> out;
        for (const auto& e : elements) {
            if (e.name != name) continue;
            if (!cls.empty()) {
                const auto it = e.attributes.find("class");
                if (it == e.attributes.end() || it->second != cls) continue;
            }
            out.push_back(&e);
        }
        return out;
    }

    [[nodiscard]] std::vector<const XmlElement*> children_named(const XmlElement& parent,
                                                                const std::string& name) const {
        std::vector<const XmlElement*> out;
        for (const int i : parent.children) {
            if (elements[static_cast<std::size_t>(i)].name == name) {
                out.push_back(&elements[static_cast<std::size_t>(i)]);
            }
        }
        return out;
    }
};

inline XmlDocument parse_xml(const std::string& text) {
    struct State {
        XmlDocument doc;
        std::vector<int> stack;
    } state;
    XML_Parser parser = XML_ParserCreate("UTF-8");
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(
        parser,
        [](void* data, const XML_Char* name, const XML_Char** attrs) {
            auto& s = *static_cast<State*>(data);
            XmlElement e;
            e.name = name;
            for (int i = 0; attrs[i] != nullptr; i += 2) e.attributes[attrs[i]] = attrs[i + 1];
            e.parent = s.stack.empty() ? -1 : s.stack.back();
            const int index = static_cast<int>(s.doc.elements.size());
            if (e.parent >= 0) s.doc.elements[static_cast<std::size_t>(e.parent)].children.push_back(index);
            s.doc.elements.push_back(std::move(e));
            s.stack.push_back(index);
        },
        [](void* data, const XML_Char*) { static_cast<State*>(data)->stack.pop_back(); });
    const auto status = XML_Parse(parser, text.data(), static_cast<int>(text.size()), 1);
    state.doc.well_formed = status == XML_STATUS_OK;
    if (!state.doc.well_formed) {
        state.doc.error = std::string(XML_ErrorString(XML_GetErrorCode(parser))) + " at line " +
                          std::to_string(XML_GetCurrentLineNumber(parser));
    }
    XML_ParserFree(parser);
    return state.doc;
}

/// "x1,y1 x2,y2 ..." -> coordinate pairs.
inline std::vector<std::pair<double, double>> parse_points(const std::string& points) {
    std::vector<std::pair<double, double>> out;
    std::istringstream in(points);
    std::string pair;
    while (in >> pair) {
        const auto comma = pair.find(',');
        out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
    return out;
}

/// Returns queued responses in order and records every URL it was asked for.
class ScriptedTransport final : public Transport {
  public:
    void push(int status, std::string body) { script_.push_back(TransportResponse{status, std::move(body)}); }
    void push_failure() { script_.push_back(std::nullopt); }

    TransportResponse get(const std::string& url) override {
        urls.push_back(url);
        if (script_.empty()) throw std::logic_error("ScriptedTransport: script exhausted for " + url);
        auto next = std::move(script_.front());
        script_.pop_front();
        if (!next) throw Error(ErrorKind::TransportFailure, "scripted connection failure");
        return *next;
    }

    std::vector<std::string> urls;

  private:
    std::deque<std::optional<TransportResponse>> script_;
};

/// Answers every URL with a count derived from the URL, so that any query is
/// servable without a script.
class EchoCountTransport final : public Transport {
  public:
    TransportResponse get(const std::string& url) override {
        ++calls;
        const auto count = std::hash<std::string>{}(url) % 1000;
        return {200, R"({"esearchresult":{"count":")" + std::to_string(count) + R"("}})"};
    }
    std::atomic<int> calls{0};
};

/// Fails the test run loudly if used.
class ForbiddenTransport final : public Transport {
  public:
    TransportResponse get(const std::string& url) override {
        throw std::logic_error("network transport used unexpectedly for " + url);
    }
};

inline std::string esearch_body(long long count) {
    return R"({"header":{"type":"esearch","version":"0.3"},"esearchresult":{"count":")" +
           std::to_string(count) + R"("}})";
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("pubtrend-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

}  // namespace pubtrend::testing
