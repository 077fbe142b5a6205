#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fractent/errors.hpp"
#include "fractent/experiment.hpp"

namespace fractent {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed for '" + key + "': " + v);
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    // "4,8,12" and ranges "1:30,70:99".
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(static_cast<int>(parse_int(key, item)));
        } else {
            const int lo = static_cast<int>(parse_int(key, trim(item.substr(0, colon))));
            const int hi = static_cast<int>(parse_int(key, trim(item.substr(colon + 1))));
            if (hi < lo) throw ConfigError("config: empty range in '" + key + "': " + item);
            for (int n = lo; n <= hi; ++n) out.push_back(n);
        }
    }
    return out;
}

std::string format_double(double x) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_int_list(const std::vector<int>& xs) {
    // Compress consecutive runs back into lo:hi ranges.
    std::string out;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j + 1 < xs.size() && xs[j + 1] == xs[j] + 1) ++j;
        if (!out.empty()) out += ",";
        if (j > i + 1)
            out += std::to_string(xs[i]) + ":" + std::to_string(xs[j]);
        else if (j == i + 1)
            out += std::to_string(xs[i]) + "," + std::to_string(xs[j]);
        else
            out += std::to_string(xs[i]);
        i = j + 1;
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value on line " + std::to_string(lineno));
        if (!kv.emplace(key, value).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }

    ExperimentConfig cfg;
    cfg.supports.clear();
    std::map<int, ExperimentConfig::Support> supports;

    for (const auto& [key, value] : kv) {
        if (key == "name") {
            cfg.name = value;
        } else if (key == "model") {
            if (value == "su2") cfg.model = ExperimentConfig::Model::Su2;
            else if (value == "so4") cfg.model = ExperimentConfig::Model::So4;
            else if (value == "su3") cfg.model = ExperimentConfig::Model::Su3;
            else throw ConfigError("config: model must be su2 | so4 | su3");
        } else if (key == "two_s") {
            cfg.two_s = static_cast<int>(parse_int(key, value));
        } else if (key == "L") {
            cfg.L = static_cast<int>(parse_int(key, value));
        } else if (key == "seed") {
            cfg.seed = parse_u64(key, value);
        } else if (key == "profile") {
            if (value != "equal" && value != "type_i" && value != "type_ii")
                throw ConfigError("config: profile must be equal | type_i | type_ii");
            cfg.profile = value;
        } else if (key == "zero_count") {
            if (value != "none" && value != "k2" && value != "k4")
                throw ConfigError("config: zero_count must be none | k2 | k4");
            cfg.zero_count = value;
        } else if (key == "zero_mode") {
            if (value != "support" && value != "product")
                throw ConfigError("config: zero_mode must be support | product");
            cfg.zero_mode = value;
        } else if (key == "target_dimension") {
            cfg.target_dimension = parse_double(key, value);
        } else if (key == "tolerance") {
            cfg.tolerance = parse_double(key, value);
        } else if (key == "trim") {
            cfg.trim = parse_double(key, value);
        } else if (key == "n_set") {
            if (value != "all") cfg.n_set = parse_int_list(key, value);
        } else if (key == "df_k_list") {
            cfg.df_k_list = parse_int_list(key, value);
        } else {
            // supportN.field
            const auto dot = key.find('.');
            if (dot == std::string::npos || key.rfind("support", 0) != 0)
                throw ConfigError("config: unknown key '" + key + "'");
            const std::string head = key.substr(0, dot);
            const std::string field = key.substr(dot + 1);
            int index = 1;
            if (head != "support") {
                const std::string suffix = head.substr(7);
                index = static_cast<int>(parse_int(key, suffix));
                if (index < 1 || index > 16) throw ConfigError("config: bad support index in '" + key + "'");
            }
            auto& sup = supports[index];
            if (field == "kind") {
                if (value != "cantor" && value != "teepee" && value != "basis")
                    throw ConfigError("config: support kind must be cantor | teepee | basis");
                sup.kind = value;
            } else if (field == "N") {
                sup.n_keep = static_cast<int>(parse_int(key, value));
            } else if (field == "inv_r") {
                sup.inv_r = static_cast<int>(parse_int(key, value));
            } else if (field == "k") {
                sup.k = static_cast<int>(parse_int(key, value));
            } else if (field == "axis") {
                if (value != "phi" && value != "theta")
                    throw ConfigError("config: axis must be phi | theta");
                sup.axis = value;
            } else if (field == "pattern") {
                if (value != "spread" && value != "random")
                    throw ConfigError("config: pattern must be spread | random");
                sup.pattern = value;
            } else if (field == "pattern_seed") {
                sup.pattern_seed = parse_u64(key, value);
            } else if (field == "theta_fixed") {
                sup.theta_fixed = parse_double(key, value);
            } else if (field == "phi_fixed") {
                sup.phi_fixed = parse_double(key, value);
            } else if (field == "theta_max") {
                sup.theta_max = parse_double(key, value);
            } else if (field == "quadrature_nodes") {
                sup.quadrature_nodes = static_cast<int>(parse_int(key, value));
            } else if (field == "M") {
                sup.basis_m = parse_int_list(key, value);
            } else if (field == "pair") {
                sup.pair = static_cast<int>(parse_int(key, value));
            } else if (field == "teepee") {
                if (value != "true" && value != "false")
                    throw ConfigError("config: teepee must be true | false");
                sup.teepee = value == "true";
            } else {
                throw ConfigError("config: unknown support field '" + field + "'");
            }
        }
    }

    for (auto& [index, sup] : supports) cfg.supports.push_back(std::move(sup));
    if (cfg.supports.empty()) throw ConfigError("config: at least one support block required");
    if (cfg.L < 2) throw ConfigError("config: L must be >= 2");
    if (cfg.two_s < 1) throw ConfigError("config: two_s must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "name = " << cfg.name << "\n";
    out << "model = "
        << (cfg.model == ExperimentConfig::Model::Su2
                ? "su2"
                : cfg.model == ExperimentConfig::Model::So4 ? "so4" : "su3")
        << "\n";
    out << "two_s = " << cfg.two_s << "\n";
    out << "L = " << cfg.L << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "profile = " << cfg.profile << "\n";
    out << "zero_count = " << cfg.zero_count << "\n";
    out << "zero_mode = " << cfg.zero_mode << "\n";
    if (cfg.target_dimension) out << "target_dimension = " << format_double(*cfg.target_dimension) << "\n";
    out << "tolerance = " << format_double(cfg.tolerance) << "\n";
    out << "trim = " << format_double(cfg.trim) << "\n";
    out << "n_set = " << (cfg.n_set.empty() ? "all" : format_int_list(cfg.n_set)) << "\n";
    if (!cfg.df_k_list.empty()) out << "df_k_list = " << format_int_list(cfg.df_k_list) << "\n";
    for (std::size_t i = 0; i < cfg.supports.size(); ++i) {
        const auto& sup = cfg.supports[i];
        const std::string head = "support" + std::to_string(i + 1) + ".";
        out << head << "kind = " << sup.kind << "\n";
        if (sup.kind == "basis") {
            out << head << "M = " << format_int_list(sup.basis_m) << "\n";
            continue;
        }
        out << head << "N = " << sup.n_keep << "\n";
        out << head << "inv_r = " << sup.inv_r << "\n";
        out << head << "k = " << sup.k << "\n";
        out << head << "axis = " << sup.axis << "\n";
        out << head << "pattern = " << sup.pattern << "\n";
        if (sup.pattern == "random") out << head << "pattern_seed = " << sup.pattern_seed << "\n";
        out << head << "theta_fixed = " << format_double(sup.theta_fixed) << "\n";
        out << head << "phi_fixed = " << format_double(sup.phi_fixed) << "\n";
        if (sup.kind == "teepee" || sup.teepee) {
            out << head << "theta_max = " << format_double(sup.theta_max) << "\n";
            out << head << "quadrature_nodes = " << sup.quadrature_nodes << "\n";
        }
        out << head << "pair = " << sup.pair << "\n";
        out << head << "teepee = " << (sup.teepee ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace fractent
