#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "ddc2d/core.hpp"

namespace ddc {

enum class IcKind { Zero, Random, File };

/// Flat key = value run configuration; see load_config for the key set.
struct Config {
    double prandtl = 1.0;
    double lewis_beta = 1.0;
    double aspect_xi = 1.0;
    int nx = 32;
    int nz = 16;
    double dt = 0.01;
    double t_end = 1.0;
    std::uint64_t seed = 0;
    IcKind ic_kind = IcKind::Zero;
    double ic_amplitude = 1.0;
    std::string ic_path;
    BoundaryFlux flux;
    double lifting_epsilon = -1.0; // < 0 means auto
    ConstantsConfig constants;
    std::string output_dir = ".";
    int snapshot_every = 0; // 0 = off
    int diag_every = 1;
    bool strict = false;

    bool operator==(const Config& o) const {
        return prandtl == o.prandtl && lewis_beta == o.lewis_beta && aspect_xi == o.aspect_xi &&
               nx == o.nx && nz == o.nz && dt == o.dt && t_end == o.t_end && seed == o.seed &&
               ic_kind == o.ic_kind && ic_amplitude == o.ic_amplitude && ic_path == o.ic_path &&
               flux == o.flux && lifting_epsilon == o.lifting_epsilon &&
               constants.c0 == o.constants.c0 && constants.c1 == o.constants.c1 &&
               constants.c2 == o.constants.c2 && constants.c3 == o.constants.c3 &&
               constants.c4 == o.constants.c4 && constants.c5 == o.constants.c5 &&
               output_dir == o.output_dir && snapshot_every == o.snapshot_every &&
               diag_every == o.diag_every && strict == o.strict;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + v + "'", line);
    }
}

inline long long parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse integer '" + v + "'", line);
    }
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("cannot parse boolean '" + v + "'", line);
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Parse the flat key = value format. '#' starts a comment; unknown
/// keys, unparsable values and violated basic ranges raise ConfigError
/// with the offending line number. Keys:
///   prandtl, lewis_beta, aspect_xi, nx, nz, dt, t_end, seed, strict
///   ic.kind = zero | random(<amplitude>) | file(<path>)
///   flux.qu.m / flux.qu.a / flux.qu.b   (repeated triples; qt, qs alike)
///   lifting.epsilon = auto | <width in (0, 1/2]>
///   constants.c0 .. constants.c5
///   output.dir, snapshot.every_steps, diag.every_steps
inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string raw;
    int line = 0;
    auto flux_list = [&](const std::string& key) -> std::vector<FluxMode>* {
        if (key.rfind("flux.qu.", 0) == 0) return &cfg.flux.qu;
        if (key.rfind("flux.qt.", 0) == 0) return &cfg.flux.qt;
        if (key.rfind("flux.qs.", 0) == 0) return &cfg.flux.qs;
        return nullptr;
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = detail::trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value", line);
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("expected key = value", line);

        if (key == "prandtl") cfg.prandtl = detail::parse_double(val, line);
        else if (key == "lewis_beta") cfg.lewis_beta = detail::parse_double(val, line);
        else if (key == "aspect_xi") cfg.aspect_xi = detail::parse_double(val, line);
        else if (key == "nx") cfg.nx = static_cast<int>(detail::parse_int(val, line));
        else if (key == "nz") cfg.nz = static_cast<int>(detail::parse_int(val, line));
        else if (key == "dt") cfg.dt = detail::parse_double(val, line);
        else if (key == "t_end") cfg.t_end = detail::parse_double(val, line);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(val, line));
        else if (key == "strict") cfg.strict = detail::parse_bool(val, line);
        else if (key == "ic.kind") {
            if (val == "zero") {
                cfg.ic_kind = IcKind::Zero;
            } else if (val.rfind("random(", 0) == 0 && val.back() == ')') {
                cfg.ic_kind = IcKind::Random;
                cfg.ic_amplitude = detail::parse_double(val.substr(7, val.size() - 8), line);
            } else if (val.rfind("file(", 0) == 0 && val.back() == ')') {
                cfg.ic_kind = IcKind::File;
                cfg.ic_path = val.substr(5, val.size() - 6);
                if (cfg.ic_path.empty())
                    throw ConfigError("ic.kind file() needs a path", line);
            } else {
                throw ConfigError("ic.kind must be zero, random(a) or file(path)", line);
            }
        } else if (auto* list = flux_list(key)) {
            const char field = key.back();
            if (key.size() < 9 || (field != 'm' && field != 'a' && field != 'b') ||
                key[key.size() - 2] != '.')
                throw ConfigError("unknown key '" + key + "'", line);
            if (field == 'm') {
                list->push_back({static_cast<int>(detail::parse_int(val, line)), 0.0, 0.0});
            } else {
                if (list->empty())
                    throw ConfigError("flux coefficient before its mode index", line);
                if (field == 'a') list->back().a = detail::parse_double(val, line);
                else list->back().b = detail::parse_double(val, line);
            }
        } else if (key == "lifting.epsilon") {
            if (val == "auto") cfg.lifting_epsilon = -1.0;
            else cfg.lifting_epsilon = detail::parse_double(val, line);
        } else if (key == "constants.c0") cfg.constants.c0 = detail::parse_double(val, line);
        else if (key == "constants.c1") cfg.constants.c1 = detail::parse_double(val, line);
        else if (key == "constants.c2") cfg.constants.c2 = detail::parse_double(val, line);
        else if (key == "constants.c3") cfg.constants.c3 = detail::parse_double(val, line);
        else if (key == "constants.c4") cfg.constants.c4 = detail::parse_double(val, line);
        else if (key == "constants.c5") cfg.constants.c5 = detail::parse_double(val, line);
        else if (key == "output.dir") cfg.output_dir = val;
        else if (key == "snapshot.every_steps") cfg.snapshot_every = static_cast<int>(detail::parse_int(val, line));
        else if (key == "diag.every_steps") cfg.diag_every = static_cast<int>(detail::parse_int(val, line));
        else throw ConfigError("unknown key '" + key + "'", line);
    }

    if (!(cfg.prandtl > 0.0) || !(cfg.lewis_beta > 0.0) || !(cfg.aspect_xi > 0.0))
        throw ConfigError("prandtl, lewis_beta and aspect_xi must be positive");
    if (cfg.nx < 8 || cfg.nx % 2 != 0 || cfg.nz < 8)
        throw ConfigError("need even nx >= 8 and nz >= 8");
    if (!(cfg.dt > 0.0) || !(cfg.t_end >= 0.0))
        throw ConfigError("need dt > 0 and t_end >= 0");
    if (cfg.lifting_epsilon >= 0.0 && (cfg.lifting_epsilon <= 0.0 || cfg.lifting_epsilon > 0.5))
        throw ConfigError("lifting.epsilon must be auto or lie in (0, 1/2]");
    if (cfg.diag_every < 1 || cfg.snapshot_every < 0)
        throw ConfigError("diag.every_steps >= 1 and snapshot.every_steps >= 0 required");
    try {
        cfg.flux.validate(cfg.nx);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Emit a file parse_config reads back to an identical Config.
inline std::string serialize_config(const Config& cfg) {
    std::ostringstream out;
    using detail::fmt17;
    out << "prandtl = " << fmt17(cfg.prandtl) << "\n";
    out << "lewis_beta = " << fmt17(cfg.lewis_beta) << "\n";
    out << "aspect_xi = " << fmt17(cfg.aspect_xi) << "\n";
    out << "nx = " << cfg.nx << "\n";
    out << "nz = " << cfg.nz << "\n";
    out << "dt = " << fmt17(cfg.dt) << "\n";
    out << "t_end = " << fmt17(cfg.t_end) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "strict = " << (cfg.strict ? "true" : "false") << "\n";
    switch (cfg.ic_kind) {
    case IcKind::Zero: out << "ic.kind = zero\n"; break;
    case IcKind::Random: out << "ic.kind = random(" << fmt17(cfg.ic_amplitude) << ")\n"; break;
    case IcKind::File: out << "ic.kind = file(" << cfg.ic_path << ")\n"; break;
    }
    auto dump_flux = [&](const char* name, const std::vector<FluxMode>& modes) {
        for (const auto& m : modes) {
            out << "flux." << name << ".m = " << m.m << "\n";
            out << "flux." << name << ".a = " << fmt17(m.a) << "\n";
            out << "flux." << name << ".b = " << fmt17(m.b) << "\n";
        }
    };
    dump_flux("qu", cfg.flux.qu);
    dump_flux("qt", cfg.flux.qt);
    dump_flux("qs", cfg.flux.qs);
    if (cfg.lifting_epsilon < 0.0) out << "lifting.epsilon = auto\n";
    else out << "lifting.epsilon = " << fmt17(cfg.lifting_epsilon) << "\n";
    out << "constants.c0 = " << fmt17(cfg.constants.c0) << "\n";
    out << "constants.c1 = " << fmt17(cfg.constants.c1) << "\n";
    out << "constants.c2 = " << fmt17(cfg.constants.c2) << "\n";
    out << "constants.c3 = " << fmt17(cfg.constants.c3) << "\n";
    out << "constants.c4 = " << fmt17(cfg.constants.c4) << "\n";
    out << "constants.c5 = " << fmt17(cfg.constants.c5) << "\n";
    out << "output.dir = " << cfg.output_dir << "\n";
    out << "snapshot.every_steps = " << cfg.snapshot_every << "\n";
    out << "diag.every_steps = " << cfg.diag_every << "\n";
    return out.str();
}

} // namespace ddc
