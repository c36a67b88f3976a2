#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "snnfra/core.hpp"

namespace snnfra {

struct Interaction {
  std::size_t drug = 0;    // row in the drug FeatureMatrix
  std::size_t target = 0;  // row in the target FeatureMatrix
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// Approved (drug, target) pairs in file order, duplicates dropped.
struct InteractionSet {
  std::vector<Interaction> pairs;
  std::size_t duplicates_removed = 0;

  std::size_t size() const noexcept { return pairs.size(); }
};

/// Averaged upper-approximation degree per candidate pair.
struct FruaScoreTable {
  std::vector<PairKey> keys;
  std::vector<double> degrees;
  std::size_t m_used = 0;

  std::size_t size() const noexcept { return keys.size(); }
};

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);
/// Fixed six-digit rendering used for scores.
std::string format_score(double value);
double parse_double(std::string_view cell, std::size_t row, std::size_t col);

std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a whole text file into lines, dropping a trailing empty line and any CR.
std::vector<std::string> read_lines(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see partial output.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

// Feature matrix CSV: `id,f1,...,fd`.
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);
FeatureMatrix parse_feature_matrix(const std::vector<std::string>& lines, const std::string& source);
void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix);

// Interaction CSV: `drug_id,target_id`.
InteractionSet load_interactions(const std::filesystem::path& path, const FeatureMatrix& drugs,
                                 const FeatureMatrix& targets);
void write_interactions(const std::filesystem::path& path, const InteractionSet& interactions,
                        const FeatureMatrix& drugs, const FeatureMatrix& targets);

// Score CSV: `drug_id,target_id,frua_score`, six decimals.
void write_score_table(const std::filesystem::path& path, const FruaScoreTable& scores);
FruaScoreTable load_score_table(const std::filesystem::path& path);
std::string render_score_table(const FruaScoreTable& scores);

/// Pair dataset CSV: `drug_id,target_id,label` followed by the optional
/// reserved columns `synthetic` and `frua_score`, then feature columns.
struct PairTable {
  PairDataset data;
  std::vector<std::string> feature_names;
  std::vector<std::uint8_t> synthetic;  // empty when the column is absent
};

struct PairWriteOptions {
  bool features = true;
  bool scores = false;
  const std::vector<std::uint8_t>* synthetic = nullptr;
  const std::vector<std::string>* feature_names = nullptr;
};

void write_pair_dataset(const std::filesystem::path& path, const PairDataset& data, const PairWriteOptions& options);
std::string render_pair_dataset(const PairDataset& data, const PairWriteOptions& options);
PairTable load_pair_dataset(const std::filesystem::path& path);

}  // namespace snnfra
