// Maps JSON pointers back to source positions so schema diagnostics can name
// a line. nlohmann::json 3.11 keeps no positions after parsing.

#include <cctype>
#include <string>
#include <vector>

#include "cpcl/scenario.hpp"

namespace cpcl {

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::optional<std::size_t> find(const std::vector<std::string>& tokens) {
        skip_ws();
        std::size_t best = pos_;
        for (const auto& tok : tokens) {
            skip_ws();
            if (at_end()) return best;
            const char c = text_[pos_];
            if (c == '{') {
                if (!enter_member(tok)) return best;
            } else if (c == '[') {
                if (!enter_element(tok)) return best;
            } else {
                return best;
            }
            skip_ws();
            best = pos_;
        }
        return best;
    }

    TextPosition position_of(std::size_t offset) const {
        TextPosition p;
        for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++p.line;
                p.column = 1;
            } else {
                ++p.column;
            }
        }
        return p;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool read_string(std::string* out) {
        if (at_end() || text_[pos_] != '"') return false;
        ++pos_;
        while (!at_end() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                ++pos_;
                if (at_end()) return false;
            }
            if (out) out->push_back(text_[pos_]);
            ++pos_;
        }
        if (at_end()) return false;
        ++pos_;
        return true;
    }

    bool skip_value() {
        skip_ws();
        if (at_end()) return false;
        const char c = text_[pos_];
        if (c == '"') return read_string(nullptr);
        if (c == '{' || c == '[') {
            const char close = c == '{' ? '}' : ']';
            ++pos_;
            skip_ws();
            if (!at_end() && text_[pos_] == close) {
                ++pos_;
                return true;
            }
            while (true) {
                if (c == '{') {
                    skip_ws();
                    if (!read_string(nullptr)) return false;
                    skip_ws();
                    if (at_end() || text_[pos_] != ':') return false;
                    ++pos_;
                }
                if (!skip_value()) return false;
                skip_ws();
                if (at_end()) return false;
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (text_[pos_] == close) {
                    ++pos_;
                    return true;
                }
                return false;
            }
        }
        // number or literal
        const std::size_t start = pos_;
        while (!at_end() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        return pos_ > start;
    }

    bool enter_member(const std::string& key) {
        ++pos_;  // '{'
        while (true) {
            skip_ws();
            if (at_end() || text_[pos_] == '}') return false;
            std::string name;
            if (!read_string(&name)) return false;
            skip_ws();
            if (at_end() || text_[pos_] != ':') return false;
            ++pos_;
            skip_ws();
            if (name == key) return true;
            if (!skip_value()) return false;
            skip_ws();
            if (at_end() || text_[pos_] != ',') return false;
            ++pos_;
        }
    }

    bool enter_element(const std::string& token) {
        std::size_t index = 0;
        try {
            index = std::stoul(token);
        } catch (...) {
            return false;
        }
        ++pos_;  // '['
        for (std::size_t i = 0;; ++i) {
            skip_ws();
            if (at_end() || text_[pos_] == ']') return false;
            if (i == index) return true;
            if (!skip_value()) return false;
            skip_ws();
            if (at_end() || text_[pos_] != ',') return false;
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_pointer(std::string_view pointer) {
    std::vector<std::string> tokens;
    if (pointer.empty()) return tokens;
    std::size_t i = pointer.front() == '/' ? 1 : 0;
    std::string cur;
    for (; i <= pointer.size(); ++i) {
        if (i == pointer.size() || pointer[i] == '/') {
            tokens.push_back(cur);
            cur.clear();
        } else if (pointer[i] == '~' && i + 1 < pointer.size()) {
            cur.push_back(pointer[i + 1] == '1' ? '/' : '~');
            ++i;
        } else {
            cur.push_back(pointer[i]);
        }
    }
    return tokens;
}

}  // namespace

std::optional<TextPosition> locate_json_pointer(std::string_view text, std::string_view pointer) {
    Scanner scanner(text);
    const auto offset = scanner.find(split_pointer(pointer));
    if (!offset) return std::nullopt;
    return scanner.position_of(*offset);
}

}  // namespace cpcl
