#pragma once

// Builds a design from a matrix written out entry by entry, e.g.
//   "z1, -z2*; z2, z1*"                      (complex variables)
//   "x1+ix2, -x3+ix4; x3+ix4, x1-ix2"        (real variables)
// Rows are separated by ';' and entries by ','. An entry is a linear
// expression in x<k> (real) or z<k> / z<k>* (complex, z_k = x_{2k-1} + i x_{2k})
// with numeric and 'i' coefficients, parentheses, and implicit products.

#include "cliffstbc/design.hpp"

#include <cctype>
#include <map>
#include <string>

namespace cliffstbc {

namespace detail {

struct LinearForm {
    cd constant{0.0, 0.0};
    std::map<int, cd> coef;  // 0-based real variable -> coefficient

    bool is_constant() const {
        for (const auto& [k, c] : coef)
            if (c != cd{}) return false;
        return true;
    }
    LinearForm& operator+=(const LinearForm& o) {
        constant += o.constant;
        for (const auto& [k, c] : o.coef) coef[k] += c;
        return *this;
    }
    LinearForm scaled(cd s) const {
        LinearForm r;
        r.constant = constant * s;
        for (const auto& [k, c] : coef) r.coef[k] = c * s;
        return r;
    }
};

class TemplateParser {
public:
    explicit TemplateParser(std::string s) : s_(std::move(s)) {}

    LinearForm parse_entry() {
        LinearForm f = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected character");
        return f;
    }
    bool used_x = false;
    bool used_z = false;

private:
    [[noreturn]] void error(const std::string& why) const {
        throw std::invalid_argument("design template: " + why + " in '" + s_ + "' at " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    LinearForm expr() {
        LinearForm acc;
        bool first = true;
        for (;;) {
            char c = peek();
            double sign = 1.0;
            if (c == '+' || c == '-') {
                sign = c == '-' ? -1.0 : 1.0;
                ++pos_;
            } else if (!first) {
                break;
            }
            acc += term().scaled(sign);
            first = false;
            c = peek();
            if (c != '+' && c != '-') break;
        }
        return acc;
    }
    static bool starts_factor(char c) {
        return c == '(' || c == 'i' || c == 'x' || c == 'z' || c == '.' || std::isdigit(static_cast<unsigned char>(c));
    }
    LinearForm term() {
        LinearForm acc = factor();
        while (starts_factor(peek())) {
            LinearForm rhs = factor();
            if (acc.is_constant()) acc = rhs.scaled(acc.constant);
            else if (rhs.is_constant()) acc = acc.scaled(rhs.constant);
            else error("product of two variables");
        }
        return acc;
    }
    int index() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error("variable without index");
        return std::stoi(s_.substr(start, pos_ - start));
    }
    LinearForm factor() {
        const char c = peek();
        LinearForm f;
        if (c == '(') {
            ++pos_;
            f = expr();
            if (peek() != ')') error("missing ')'");
            ++pos_;
        } else if (c == 'i') {
            ++pos_;
            f.constant = I_UNIT;
        } else if (c == 'x') {
            ++pos_;
            const int k = index();
            if (k < 1) error("variable index must be positive");
            f.coef[k - 1] = 1.0;
            used_x = true;
        } else if (c == 'z') {
            ++pos_;
            const int k = index();
            if (k < 1) error("variable index must be positive");
            bool conj = false;
            if (pos_ < s_.size() && s_[pos_] == '*') {
                conj = true;
                ++pos_;
            }
            f.coef[2 * (k - 1)] = 1.0;
            f.coef[2 * (k - 1) + 1] = conj ? -I_UNIT : I_UNIT;
            used_z = true;
        } else if (c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            f.constant = v;
        } else {
            error("unexpected character");
        }
        return f;
    }

    std::string s_;
    std::size_t pos_ = 0;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

// K = 0 infers the variable count from the highest index used.
inline LinearSpaceTimeDesign design_from_template(const std::string& name, const std::string& text, int K = 0) {
    std::vector<std::vector<detail::LinearForm>> rows;
    bool used_x = false, used_z = false;
    int max_var = -1;
    for (const std::string& row_text : detail::split(text, ';')) {
        std::vector<detail::LinearForm> row;
        for (const std::string& entry : detail::split(row_text, ',')) {
            detail::TemplateParser p(entry);
            detail::LinearForm f = p.parse_entry();
            if (f.constant != cd{}) throw std::invalid_argument("design template: entry has a constant term");
            used_x |= p.used_x;
            used_z |= p.used_z;
            for (const auto& [k, c] : f.coef) max_var = std::max(max_var, k);
            row.push_back(std::move(f));
        }
        rows.push_back(std::move(row));
    }
    if (used_x && used_z) throw std::invalid_argument("design template: mixes x and z variables");
    if (rows.empty() || rows.front().empty()) throw std::invalid_argument("design template: empty");
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw std::invalid_argument("design template: ragged rows");
    if (K == 0) K = used_z ? 2 * ((max_var + 2) / 2) : max_var + 1;
    if (max_var >= K) throw std::invalid_argument("design template: variable index exceeds K");

    LinearSpaceTimeDesign d;
    d.name = name;
    d.T = static_cast<int>(rows.size());
    d.NT = static_cast<int>(rows.front().size());
    d.weights.assign(static_cast<std::size_t>(K), CMatrix::Zero(d.T, d.NT));
    for (int r = 0; r < d.T; ++r)
        for (int c = 0; c < d.NT; ++c)
            for (const auto& [k, v] : rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].coef)
                d.weights[static_cast<std::size_t>(k)](r, c) += v;
    d.partition = singleton_partition(K);
    return d;
}

}  // namespace cliffstbc
