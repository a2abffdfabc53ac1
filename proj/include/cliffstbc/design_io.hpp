#pragma once

// Plain-text serialization for designs and signal sets.
//
//   design <name>
//   T <rows>
//   NT <cols>
//   K <count>
//   partition {1,5} {2,6} ...        (1-based variable indices)
//   weight 1
//   <re+imi> <re+imi> ...            (T lines of NT entries)
//   weight 2
//   ...
//
//   signalset <label>
//   dim <d>
//   points <n>
//   <x1> ... <xd>                    (n lines)
//
// Numbers are written with 17 significant digits, so reading back gives the
// same doubles. Lines starting with '#' are ignored.

#include "cliffstbc/design.hpp"
#include "cliffstbc/signal_sets.hpp"
#include "cliffstbc/template.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cliffstbc {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_complex(cd v) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
    return buf;
}

inline cd parse_complex(const std::string& tok) {
    const char* s = tok.c_str();
    char* end = nullptr;
    const double re = std::strtod(s, &end);
    if (end == s) throw std::invalid_argument("bad complex entry '" + tok + "'");
    if (*end == '\0') return {re, 0.0};
    const char* im_start = end;
    const double im = std::strtod(im_start, &end);
    if (end == im_start || *end != 'i' || end[1] != '\0') throw std::invalid_argument("bad complex entry '" + tok + "'");
    return {re, im};
}

inline double parse_double(const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw std::invalid_argument("bad number '" + tok + "'");
    return v;
}

// Reads the next non-comment, non-blank line split into whitespace tokens.
inline bool next_tokens(std::istream& in, std::vector<std::string>& toks) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        toks.clear();
        for (std::string t; ls >> t;) toks.push_back(t);
        return true;
    }
    return false;
}

inline std::vector<std::string> expect_line(std::istream& in, const std::string& key, std::size_t min_tokens = 2) {
    std::vector<std::string> t;
    if (!next_tokens(in, t)) throw std::invalid_argument("unexpected end of file, wanted '" + key + "'");
    if (t.front() != key) throw std::invalid_argument("expected '" + key + "', found '" + t.front() + "'");
    if (t.size() < min_tokens) throw std::invalid_argument("line '" + key + "' is incomplete");
    return t;
}

inline int parse_int(const std::string& tok) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument("bad integer '" + tok + "'");
    return v;
}

inline Partition parse_partition(const std::vector<std::string>& toks) {
    Partition p;
    std::string joined;
    for (std::size_t i = 1; i < toks.size(); ++i) joined += toks[i];
    std::size_t pos = 0;
    while (pos < joined.size()) {
        if (joined[pos] != '{') throw std::invalid_argument("partition: expected '{'");
        const auto close = joined.find('}', pos);
        if (close == std::string::npos) throw std::invalid_argument("partition: missing '}'");
        std::vector<int> grp;
        for (const std::string& v : split(joined.substr(pos + 1, close - pos - 1), ',')) {
            const std::string t = v.size() > 1 && v[0] == 'x' ? v.substr(1) : v;
            grp.push_back(parse_int(t) - 1);
        }
        p.push_back(grp);
        pos = close + 1;
    }
    return p;
}

}  // namespace detail

inline void write_design(std::ostream& out, const LinearSpaceTimeDesign& d) {
    out << "design " << (d.name.empty() ? "unnamed" : d.name) << "\n";
    out << "T " << d.T << "\nNT " << d.NT << "\nK " << d.K() << "\npartition";
    for (const auto& grp : d.partition) {
        out << " {";
        for (std::size_t i = 0; i < grp.size(); ++i) out << (i ? "," : "") << grp[i] + 1;
        out << "}";
    }
    out << "\n";
    for (int k = 0; k < d.K(); ++k) {
        out << "weight " << k + 1 << "\n";
        const CMatrix& w = d.weights[static_cast<std::size_t>(k)];
        for (int r = 0; r < d.T; ++r) {
            for (int c = 0; c < d.NT; ++c) out << (c ? " " : "") << detail::fmt_complex(w(r, c));
            out << "\n";
        }
    }
}

inline LinearSpaceTimeDesign read_design(std::istream& in) {
    LinearSpaceTimeDesign d;
    auto head = detail::expect_line(in, "design", 1);
    for (std::size_t i = 1; i < head.size(); ++i) d.name += (i > 1 ? " " : "") + head[i];
    d.T = detail::parse_int(detail::expect_line(in, "T")[1]);
    d.NT = detail::parse_int(detail::expect_line(in, "NT")[1]);
    const int K = detail::parse_int(detail::expect_line(in, "K")[1]);
    if (d.T <= 0 || d.NT <= 0 || K <= 0) throw std::invalid_argument("design dimensions must be positive");
    d.partition = detail::parse_partition(detail::expect_line(in, "partition", 1));
    std::vector<std::string> t;
    for (int k = 0; k < K; ++k) {
        const auto wl = detail::expect_line(in, "weight");
        if (detail::parse_int(wl[1]) != k + 1) throw std::invalid_argument("weights out of order");
        CMatrix w(d.T, d.NT);
        for (int r = 0; r < d.T; ++r) {
            if (!detail::next_tokens(in, t)) throw std::invalid_argument("weight matrix truncated");
            if (static_cast<int>(t.size()) != d.NT) throw std::invalid_argument("weight row has the wrong length");
            for (int c = 0; c < d.NT; ++c) w(r, c) = detail::parse_complex(t[static_cast<std::size_t>(c)]);
        }
        d.weights.push_back(w);
    }
    validate_shape(d);
    return d;
}

inline void save_design(const std::string& path, const LinearSpaceTimeDesign& d) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_design(f, d);
}

inline LinearSpaceTimeDesign load_design(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    return read_design(f);
}

inline void write_signal_set(std::ostream& out, const SignalSet& s) {
    out << "signalset " << (s.label.empty() ? "unnamed" : s.label) << "\n";
    out << "dim " << s.dim << "\npoints " << s.points.size() << "\n";
    for (const auto& p : s.points) {
        for (int j = 0; j < s.dim; ++j) out << (j ? " " : "") << detail::fmt_double(p(j));
        out << "\n";
    }
}

inline SignalSet read_signal_set(std::istream& in) {
    SignalSet s;
    auto head = detail::expect_line(in, "signalset", 1);
    for (std::size_t i = 1; i < head.size(); ++i) s.label += (i > 1 ? " " : "") + head[i];
    s.dim = detail::parse_int(detail::expect_line(in, "dim")[1]);
    const int n = detail::parse_int(detail::expect_line(in, "points")[1]);
    if (s.dim <= 0 || n <= 0) throw std::invalid_argument("signal set dimensions must be positive");
    std::vector<std::string> t;
    for (int i = 0; i < n; ++i) {
        if (!detail::next_tokens(in, t) || static_cast<int>(t.size()) != s.dim) throw std::invalid_argument("bad signal point line");
        RVector p(s.dim);
        for (int j = 0; j < s.dim; ++j) p(j) = detail::parse_double(t[static_cast<std::size_t>(j)]);
        s.points.push_back(p);
    }
    return s;
}

}  // namespace cliffstbc
