#include "snnfra/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "snnfra/error.hpp"

namespace snnfra {

namespace fs = std::filesystem;

namespace {

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line); }

Label parse_label(std::string_view cell, const std::string& source, std::size_t line) {
  if (cell == "1") return Label::positive;
  if (cell == "0") return Label::negative;
  fail(ErrorCode::InvalidValue, where(source, line) + ": label must be 0 or 1, got '" + std::string(cell) + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

double parse_double(std::string_view cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != last)
    fail(ErrorCode::InvalidValue, "cannot parse '" + std::string(cell) + "' at (row " + std::to_string(row) +
                                      ", col " + std::to_string(col) + ")");
  if (!std::isfinite(v))
    fail(ErrorCode::InvalidValue,
         "non-finite value at (row " + std::to_string(row) + ", col " + std::to_string(col) + ")");
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_text_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

FeatureMatrix parse_feature_matrix(const std::vector<std::string>& lines, const std::string& source) {
  if (lines.empty()) fail(ErrorCode::FormatError, source + ": missing header");
  auto header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "id")
    fail(ErrorCode::FormatError, source + ": missing header (first column must be 'id')");
  const std::size_t d = header.size() - 1;
  if (d == 0) fail(ErrorCode::FormatError, source + ": no feature columns");
  if (lines.size() == 1) fail(ErrorCode::EmptyMatrix, source + ": header only, no rows");

  std::vector<EntityId> ids;
  std::vector<double> values;
  ids.reserve(lines.size() - 1);
  values.reserve((lines.size() - 1) * d);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size())
      fail(ErrorCode::FormatError, where(source, r + 1) + ": expected " + std::to_string(header.size()) +
                                       " cells, got " + std::to_string(cells.size()));
    ids.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_double(cells[c], r - 1, c - 1));
  }
  std::vector<std::string> names(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  return FeatureMatrix(std::move(ids), DenseMatrix(n, d, std::move(values)), std::move(names));
}

FeatureMatrix load_feature_matrix(const fs::path& path) { return parse_feature_matrix(read_lines(path), path.string()); }

void write_feature_matrix(const fs::path& path, const FeatureMatrix& matrix) {
  std::string out = "id";
  for (const auto& name : matrix.feature_names) out += "," + name;
  out += '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += matrix.ids[i];
    for (double v : matrix.row(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

InteractionSet load_interactions(const fs::path& path, const FeatureMatrix& drugs, const FeatureMatrix& targets) {
  const auto lines = read_lines(path);
  const std::string source = path.string();
  if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"drug_id", "target_id"})
    fail(ErrorCode::FormatError, source + ": missing header 'drug_id,target_id'");
  InteractionSet set;
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split_csv_line(lines[r]);
    if (cells.size() != 2) fail(ErrorCode::FormatError, where(source, r + 1) + ": expected 2 cells");
    auto d = drugs.find(cells[0]);
    if (!d) fail(ErrorCode::UnknownEntity, where(source, r + 1) + ": unknown drug '" + cells[0] + "'");
    auto t = targets.find(cells[1]);
    if (!t) fail(ErrorCode::UnknownEntity, where(source, r + 1) + ": unknown target '" + cells[1] + "'");
    const std::uint64_t key = static_cast<std::uint64_t>(*d) * targets.size() + *t;
    if (!seen.insert(key).second) {
      ++set.duplicates_removed;
      continue;
    }
    set.pairs.push_back({*d, *t});
  }
  return set;
}

void write_interactions(const fs::path& path, const InteractionSet& interactions, const FeatureMatrix& drugs,
                        const FeatureMatrix& targets) {
  std::string out = "drug_id,target_id\n";
  for (const auto& p : interactions.pairs) out += drugs.ids[p.drug] + "," + targets.ids[p.target] + "\n";
  write_text_atomic(path, out);
}

std::string render_score_table(const FruaScoreTable& scores) {
  require(scores.keys.size() == scores.degrees.size(), "score table: key/degree count mismatch");
  std::string out = "drug_id,target_id,frua_score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores.degrees[i];
    if (!(s >= 0.0 && s <= 1.0))
      fail(ErrorCode::InvalidValue, "score " + format_double(s) + " outside [0,1] for (" + scores.keys[i].drug + ", " +
                                        scores.keys[i].target + ")");
    out += scores.keys[i].drug + "," + scores.keys[i].target + "," + format_score(s) + "\n";
  }
  return out;
}

void write_score_table(const fs::path& path, const FruaScoreTable& scores) {
  write_text_atomic(path, render_score_table(scores));
}

FruaScoreTable load_score_table(const fs::path& path) {
  const auto lines = read_lines(path);
  const std::string source = path.string();
  if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"drug_id", "target_id", "frua_score"})
    fail(ErrorCode::FormatError, source + ": missing header 'drug_id,target_id,frua_score'");
  FruaScoreTable table;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split_csv_line(lines[r]);
    if (cells.size() != 3) fail(ErrorCode::FormatError, where(source, r + 1) + ": expected 3 cells");
    const double s = parse_double(cells[2], r - 1, 2);
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::InvalidValue, where(source, r + 1) + ": score outside [0,1]");
    table.keys.push_back({cells[0], cells[1]});
    table.degrees.push_back(s);
  }
  return table;
}

std::string render_pair_dataset(const PairDataset& data, const PairWriteOptions& options) {
  const bool with_synthetic = options.synthetic != nullptr;
  if (with_synthetic) require(options.synthetic->size() == data.size(), "synthetic flag count mismatch");
  std::string out = "drug_id,target_id,label";
  if (with_synthetic) out += ",synthetic";
  if (options.scores) out += ",frua_score";
  if (options.features) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      out += ',';
      if (options.feature_names && options.feature_names->size() == data.dim())
        out += (*options.feature_names)[j];
      else
        out += "f" + std::to_string(j + 1);
    }
  }
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    require(s.label != Label::unannotated, "pair dataset CSV holds only labeled samples");
    out += s.drug + "," + s.target + "," + (s.label == Label::positive ? "1" : "0");
    if (with_synthetic) out += (*options.synthetic)[i] ? ",1" : ",0";
    if (options.scores) {
      out += ',';
      if (s.frua_score) out += format_score(*s.frua_score);
    }
    if (options.features) {
      for (double v : s.features) {
        out += ',';
        out += format_double(v);
      }
    }
    out += '\n';
  }
  return out;
}

void write_pair_dataset(const fs::path& path, const PairDataset& data, const PairWriteOptions& options) {
  write_text_atomic(path, render_pair_dataset(data, options));
}

PairTable load_pair_dataset(const fs::path& path) {
  const auto lines = read_lines(path);
  const std::string source = path.string();
  if (lines.empty()) fail(ErrorCode::FormatError, source + ": missing header");
  auto header = split_csv_line(lines[0]);
  if (header.size() < 3 || header[0] != "drug_id" || header[1] != "target_id" || header[2] != "label")
    fail(ErrorCode::FormatError, source + ": header must start with 'drug_id,target_id,label'");
  std::size_t col = 3;
  int synthetic_col = -1, score_col = -1;
  if (col < header.size() && header[col] == "synthetic") synthetic_col = static_cast<int>(col++);
  if (col < header.size() && header[col] == "frua_score") score_col = static_cast<int>(col++);
  const std::size_t first_feature = col;

  PairTable table;
  table.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_feature), header.end());
  table.data = PairDataset(table.feature_names.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size())
      fail(ErrorCode::FormatError, where(source, r + 1) + ": expected " + std::to_string(header.size()) + " cells");
    PairSample s;
    s.drug = cells[0];
    s.target = cells[1];
    s.label = parse_label(cells[2], source, r + 1);
    if (synthetic_col >= 0) {
      const auto& c = cells[static_cast<std::size_t>(synthetic_col)];
      if (c != "0" && c != "1") fail(ErrorCode::InvalidValue, where(source, r + 1) + ": synthetic must be 0 or 1");
      table.synthetic.push_back(c == "1" ? 1 : 0);
    }
    if (score_col >= 0 && !cells[static_cast<std::size_t>(score_col)].empty()) {
      const double v = parse_double(cells[static_cast<std::size_t>(score_col)], r - 1, static_cast<std::size_t>(score_col));
      if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidValue, where(source, r + 1) + ": score outside [0,1]");
      s.frua_score = v;
    }
    s.features.reserve(header.size() - first_feature);
    for (std::size_t c = first_feature; c < cells.size(); ++c) s.features.push_back(parse_double(cells[c], r - 1, c));
    table.data.add(std::move(s));
  }
  return table;
}

}  // namespace snnfra
