#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mslab/grid.hpp"

namespace mslab {

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plain-text key-value manifest with [section] headers. '#' starts a
/// comment; keys are unique within a section.
class Manifest {
public:
    static Manifest parseFile(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ManifestError("manifest: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parseText(ss.str(), path);
    }

    static Manifest parseText(const std::string& text, const std::string& name = "<text>") {
        Manifest m;
        m.name_ = name;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ManifestError(name + ":" + std::to_string(lineno) +
                                        ": unterminated section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw ManifestError(name + ":" + std::to_string(lineno) + ": empty section name");
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ManifestError(name + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty())
                throw ManifestError(name + ":" + std::to_string(lineno) + ": empty key");
            if (section.empty())
                throw ManifestError(name + ":" + std::to_string(lineno) +
                                    ": key outside any section");
            auto& sec = m.sections_[section];
            if (sec.count(key))
                throw ManifestError(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                                    section + "." + key + "'");
            sec[key] = val;
        }
        return m;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string getString(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end())
            throw ManifestError(name_ + ": missing section [" + section + "]");
        auto k = s->second.find(key);
        if (k == s->second.end())
            throw ManifestError(name_ + ": missing field '" + section + "." + key + "'");
        return k->second;
    }

    std::string getString(const std::string& section, const std::string& key,
                          const std::string& dflt) const {
        return has(section, key) ? getString(section, key) : dflt;
    }

    double getDouble(const std::string& section, const std::string& key) const {
        return toDouble(getString(section, key), section + "." + key);
    }
    double getDouble(const std::string& section, const std::string& key, double dflt) const {
        return has(section, key) ? getDouble(section, key) : dflt;
    }

    long getInt(const std::string& section, const std::string& key) const {
        const std::string v = getString(section, key);
        std::size_t pos = 0;
        long out = 0;
        try {
            out = std::stol(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size())
            throw ManifestError(name_ + ": field '" + section + "." + key +
                                "' is not an integer: '" + v + "'");
        return out;
    }
    long getInt(const std::string& section, const std::string& key, long dflt) const {
        return has(section, key) ? getInt(section, key) : dflt;
    }

    std::vector<double> getDoubleList(const std::string& section, const std::string& key) const {
        const std::string v = getString(section, key);
        std::vector<double> out;
        std::istringstream in(v);
        std::string tok;
        while (in >> tok) {
            if (!tok.empty() && tok.back() == ',') tok.pop_back();
            if (tok.empty()) continue;
            out.push_back(toDouble(tok, section + "." + key));
        }
        if (out.empty())
            throw ManifestError(name_ + ": field '" + section + "." + key + "' is empty");
        return out;
    }

    const std::string& name() const { return name_; }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    double toDouble(const std::string& v, const std::string& where) const {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size())
            throw ManifestError(name_ + ": field '" + where + "' is not a number: '" + v + "'");
        return out;
    }

    std::string name_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// 17 significant digits round-trips IEEE doubles exactly.
inline std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Accumulates rows in memory and lands them with write-temp-then-rename so a
/// crash never leaves a partial report.
class CsvWriter {
public:
    CsvWriter(std::filesystem::path path, std::vector<std::string> header)
        : path_(std::move(path)) {
        std::string h;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) h += ',';
            h += header[i];
        }
        ncols_ = header.size();
        body_ = h + "\n";
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != ncols_)
            throw std::invalid_argument("csv: row width " + std::to_string(cells.size()) +
                                        " does not match header width " + std::to_string(ncols_));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
    }

    void commit() const {
        const std::filesystem::path dir = path_.parent_path();
        if (!dir.empty()) std::filesystem::create_directories(dir);
        const std::filesystem::path tmp = path_.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("csv: cannot open " + tmp.string());
            out << body_;
            if (!out) throw std::runtime_error("csv: write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path_);
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::size_t ncols_ = 0;
    std::string body_;
};

/// Grid block of a manifest: [grid] dim, lo, hi (dim numbers each), nx, nt, T.
inline SpaceTimeGrid gridFromManifest(const Manifest& m) {
    SpaceTimeGrid g;
    g.dim = int(m.getInt("grid", "dim"));
    if (g.dim != 1 && g.dim != 2) throw ManifestError("grid.dim must be 1 or 2");
    const std::vector<double> lo = m.getDoubleList("grid", "lo");
    const std::vector<double> hi = m.getDoubleList("grid", "hi");
    if (int(lo.size()) != g.dim || int(hi.size()) != g.dim)
        throw ManifestError("grid.lo / grid.hi must have 'dim' entries");
    for (int a = 0; a < g.dim; ++a) {
        g.lo[a] = lo[std::size_t(a)];
        g.hi[a] = hi[std::size_t(a)];
    }
    g.nx = int(m.getInt("grid", "nx"));
    g.nt = int(m.getInt("grid", "nt"));
    g.T = m.getDouble("grid", "T");
    g.validate();
    return g;
}

/// Geometric s-grid from [weight] s_min, s_max, s_count.
inline std::vector<double> sGridFromManifest(const Manifest& m) {
    const double sMin = m.getDouble("weight", "s_min");
    const double sMax = m.getDouble("weight", "s_max");
    const int count = int(m.getInt("weight", "s_count"));
    if (sMin <= 0.0 || sMax < sMin) throw ManifestError("weight: need 0 < s_min <= s_max");
    if (count < 1) throw ManifestError("weight: s_count must be >= 1");
    std::vector<double> out;
    if (count == 1) {
        out.push_back(sMin);
        return out;
    }
    const double r = std::log(sMax / sMin) / (count - 1);
    for (int i = 0; i < count; ++i) out.push_back(sMin * std::exp(r * i));
    return out;
}

inline Point x0FromManifest(const Manifest& m, int dim) {
    const std::vector<double> x0 = m.getDoubleList("weight", "x0");
    if (int(x0.size()) != dim) throw ManifestError("weight.x0 must have 'dim' entries");
    Point p{0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[a] = x0[std::size_t(a)];
    return p;
}

}  // namespace mslab
