#include "moderr/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace moderr {

namespace {

constexpr std::uint32_t kMatrixMagic = 0x4D455252u;  // "MERR"
constexpr std::uint32_t kMatrixVersion = 1u;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

bool ConfigMap::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (trim(raw.substr(used)).empty()) return v;
    } catch (...) {
    }
    throw ConfigError("config value [" + section + "] " + key + " = '" + raw +
                      "' is not a number");
}

int ConfigMap::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const long v = std::stol(raw, &used, 10);
        if (trim(raw.substr(used)).empty()) return static_cast<int>(v);
    } catch (...) {
    }
    throw ConfigError("config value [" + section + "] " + key + " = '" + raw +
                      "' is not an integer");
}

std::uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used, 10);
        if (trim(raw.substr(used)).empty()) return v;
    } catch (...) {
    }
    throw ConfigError("config value [" + section + "] " + key + " = '" + raw +
                      "' is not an unsigned integer");
}

bool ConfigMap::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw ConfigError("config value [" + section + "] " + key + " = '" + raw +
                      "' is not a boolean");
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections[section][key] = value;
}

void ConfigMap::merge_overrides(const ConfigMap& overrides) {
    for (const auto& [section, entries] : overrides.sections)
        for (const auto& [key, value] : entries) sections[section][key] = value;
}

std::string ConfigMap::serialize() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, entries] : sections) {
        if (!first) out << "\n";
        first = false;
        out << "[" << section << "]\n";
        for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
    }
    return out.str();
}

ConfigMap ConfigMap::parse(std::istream& in) {
    ConfigMap config;
    std::string line;
    std::string section = "global";
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError("config line " + std::to_string(line_number) +
                                  ": unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_number) +
                                  ": empty section name");
            config.sections[section];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
        config.sections[section][key] = value;
    }
    return config;
}

ConfigMap ConfigMap::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
}

std::string format_g17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_matrix_binary(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const std::uint32_t header[4] = {kMatrixMagic, static_cast<std::uint32_t>(m.rows()),
                                     static_cast<std::uint32_t>(m.cols()), kMatrixVersion};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    if (!out) throw ConfigError("write failed: " + path);
}

Matrix read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    std::uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kMatrixMagic)
        throw ConfigError("not a matrix file (bad magic): " + path);
    if (header[3] != kMatrixVersion)
        throw ConfigError("unsupported matrix file version in " + path);
    Matrix m(header[1], header[2]);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            m(i, j) = v;
        }
    if (!in) throw ConfigError("truncated matrix file: " + path);
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << format_g17(m(i, j));
        }
        out << "\n";
    }
}

void write_vector_csv(const std::string& path, const Vector& v) {
    write_matrix_csv(path, v);
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "iter,mean_err,cov_err,mean_step,cov_step\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < trace.means.size(); ++i) {
        const double mean_err = i < trace.mean_errors.size() ? trace.mean_errors[i] : nan;
        const double cov_err = i < trace.cov_errors.size() ? trace.cov_errors[i] : nan;
        const double mean_step = i < trace.mean_steps.size() ? trace.mean_steps[i] : nan;
        const double cov_step = i < trace.cov_steps.size() ? trace.cov_steps[i] : nan;
        out << i << "," << format_g17(mean_err) << "," << format_g17(cov_err) << ","
            << format_g17(mean_step) << "," << format_g17(cov_step) << "\n";
    }
}

void write_ensemble_csv(const std::string& path, const ParticleEnsemble& ensemble) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "particle_index,weight";
    for (Eigen::Index k = 0; k < ensemble.dim(); ++k) out << ",u_" << (k + 1);
    out << "\n";
    for (Eigen::Index j = 0; j < ensemble.size(); ++j) {
        out << j << "," << format_g17(ensemble.weights[j]);
        for (Eigen::Index k = 0; k < ensemble.dim(); ++k)
            out << "," << format_g17(ensemble.particles(k, j));
        out << "\n";
    }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ",";
        out << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_g17(row[i]);
        }
        out << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
}

}  // namespace moderr
