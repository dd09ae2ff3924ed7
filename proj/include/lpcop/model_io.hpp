#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpcop/logistic.hpp"
#include "lpcop/maxent.hpp"
#include "lpcop/pipeline.hpp"
#include "lpcop/table.hpp"

namespace lpcop::io {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& file, std::size_t line, const std::string& what);
};

// Two-column observation file: header row, one observation per row.
struct PairColumns {
  std::string x_name, y_name;
  std::vector<double> xs, ys;
};
PairColumns read_pairs_csv(const std::filesystem::path& path);

// Contingency matrix: header = column labels (first cell is a corner label),
// first column = row labels. Numeric labels become atom values; otherwise
// ordinals 1..I / 1..J are used.
ContingencyTable read_table_csv(const std::filesystem::path& path);

// Multi-column numeric file for the feature matrix.
struct NamedColumns {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
NamedColumns read_columns_csv(const std::filesystem::path& path);

// "name,value" rows (external solver coefficients); a non-numeric first row
// is treated as a header and skipped.
std::vector<std::pair<std::string, double>> read_name_value_csv(
    const std::filesystem::path& path);

// Versioned model file ("lpcop-model/1"), stable key order; doubles
// round-trip exactly, so a reloaded model evaluates bit-identically.
struct Provenance {
  std::string input_hash;
  std::string config;
  std::uint64_t seed = 0;
};
std::string model_to_json(const MaxEntCopulaModel& m, const Provenance& prov);
MaxEntCopulaModel model_from_json(const std::string& text);
void save_model(const MaxEntCopulaModel& m, const Provenance& prov,
                const std::filesystem::path& path);
MaxEntCopulaModel load_model(const std::filesystem::path& path);

// FNV-1a 64 of a file's bytes, for provenance stamping.
std::string hash_file(const std::filesystem::path& path);

std::string equation_string(const MaxEntCopulaModel& m);

void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels,
                      const std::vector<double>& values, const std::string& corner);
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& fm);
std::string feature_schema_json(const FeatureMatrix& fm);

std::string format_double(double v);  // shortest exact decimal form

}  // namespace lpcop::io
