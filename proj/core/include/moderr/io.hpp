#pragma once

#include <map>
#include <string>
#include <vector>

#include "moderr/gaussian.hpp"
#include "moderr/particles.hpp"

namespace moderr {

/// Key = value configuration grouped into [section] blocks. Lines starting
/// with '#' or ';' are comments. Values keep their string form until queried.
struct ConfigMap {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Later values win key by key.
    void merge_overrides(const ConfigMap& overrides);

    std::string serialize() const;
    static ConfigMap parse(std::istream& in);
    static ConfigMap parse_string(const std::string& text);
    static ConfigMap parse_file(const std::string& path);
};

/// Shortest round-trip decimal form (17 significant digits).
std::string format_g17(double value);

/// Dense binary matrix format: four little-endian uint32 header fields
/// (magic 0x4D455252 "MERR", rows, cols, version = 1) followed by rows*cols
/// row-major IEEE float64 values.
void write_matrix_binary(const std::string& path, const Matrix& m);
Matrix read_matrix_binary(const std::string& path);

void write_matrix_csv(const std::string& path, const Matrix& m);
void write_vector_csv(const std::string& path, const Vector& v);

/// iter,mean_err,cov_err,mean_step,cov_step rows, one per iteration.
void write_trace_csv(const std::string& path, const IterationTrace& trace);

/// particle_index,weight,u_1..u_d rows.
void write_ensemble_csv(const std::string& path, const ParticleEnsemble& ensemble);

/// Generic CSV table: header once, then rows of 17-digit floats.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace moderr
