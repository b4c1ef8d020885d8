#include "subkern/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "subkern/errors.hpp"

namespace subkern::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && end == text.data() + text.size();
}

}  // namespace

RankingsFile load_rankings(const fs::path& path) {
  auto in = open_in(path);
  RankingsFile file;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (text.substr(0, 3) == "#n=") {
        if (have_header) fail_at(path, lineno, "repeated #n= header");
        if (!parse_number(text.substr(3), file.n) || file.n < 1) {
          fail_at(path, lineno, "bad #n= header");
        }
        have_header = true;
      }
      continue;
    }
    if (!have_header) fail_at(path, lineno, "ranking before the #n= header");
    try {
      file.rankings.push_back(parse_ranking(text, file.n));
    } catch (const InputError& e) {
      fail_at(path, lineno, e.what());
    }
  }
  if (!have_header) throw InputError(path.string() + ": missing #n= header");
  return file;
}

void save_rankings(const fs::path& path, int n,
                   const std::vector<OrderedPartition>& rankings) {
  auto out = open_out(path);
  out << "#n=" << n << '\n';
  for (const auto& r : rankings) out << format_ranking(r) << '\n';
}

std::vector<int> load_labels(const fs::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (lineno == 1 && text == "row_index,label") continue;
    const auto cells = split_csv(text);
    std::size_t row = 0;
    int label = 0;
    if (cells.size() != 2 || !parse_number(cells[0], row) || !parse_number(cells[1], label)) {
      fail_at(path, lineno, "expected 'row_index,label'");
    }
    if (row != labels.size()) fail_at(path, lineno, "rows must be listed 0..m-1 in order");
    if (label != 1 && label != -1) fail_at(path, lineno, "label must be +1 or -1");
    labels.push_back(label);
  }
  return labels;
}

void save_labels(const fs::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  out << "row_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

LabeledRankingDataset load_dataset(const fs::path& rankings, const fs::path& labels) {
  auto file = load_rankings(rankings);
  LabeledRankingDataset data;
  data.n = file.n;
  data.rankings = std::move(file.rankings);
  data.labels = load_labels(labels);
  data.validate();
  return data;
}

FeatureMatrix load_features(const fs::path& path) {
  auto in = open_in(path);
  FeatureMatrix m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split_csv(text);
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "id") {
        fail_at(path, lineno, "expected header 'id,f1,...,fd'");
      }
      m.cols = static_cast<int>(cells.size()) - 1;
      have_header = true;
      continue;
    }
    if (static_cast<int>(cells.size()) != m.cols + 1) {
      fail_at(path, lineno, "expected " + std::to_string(m.cols + 1) + " columns");
    }
    int id = -1;
    if (!parse_number(cells[0], id) || id != m.rows) {
      fail_at(path, lineno, "ids must be listed 0..n-1 in order");
    }
    for (int c = 1; c <= m.cols; ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) fail_at(path, lineno, "malformed number");
      m.values.push_back(v);
    }
    ++m.rows;
  }
  if (!have_header) throw InputError(path.string() + ": empty feature file");
  return m;
}

void save_features(const fs::path& path, const FeatureMatrix& features) {
  auto out = open_out(path);
  out << "id";
  for (int c = 0; c < features.cols; ++c) out << ",f" << c + 1;
  out << '\n';
  for (int r = 0; r < features.rows; ++r) {
    out << r;
    for (int c = 0; c < features.cols; ++c) out << ',' << format_double(features.at(r, c));
    out << '\n';
  }
}

void save_graph(const fs::path& path, const InformationGraph& g) {
  auto out = open_out(path);
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << '\n';
  }
}

void save_feature_map(const fs::path& path, const FeatureMap& phi) {
  auto out = open_out(path);
  out << "object_id,value\n";
  for (std::size_t j = 0; j < phi.values.size(); ++j) {
    out << j << ',' << format_double(phi.values[j]) << '\n';
  }
}

void save_feature_maps(const fs::path& path, const FeatureMapBatch& maps) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < maps.m; ++i) {
    const auto row = maps.row(i);
    for (std::size_t j = 0; j < maps.n; ++j) {
      if (j > 0) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

void save_gram_csv(const fs::path& path, const GramMatrix& k) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < k.m; ++i) {
    for (std::size_t j = 0; j < k.m; ++j) {
      if (j > 0) out << ',';
      out << format_double(k.at(i, j));
    }
    out << '\n';
  }
}

GramMatrix load_gram_csv(const fs::path& path) {
  auto in = open_in(path);
  GramMatrix k;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split_csv(text);
    if (k.m == 0) k.m = cells.size();
    if (cells.size() != k.m) fail_at(path, lineno, "ragged Gram row");
    for (auto cell : cells) {
      double v = 0.0;
      if (!parse_number(cell, v)) fail_at(path, lineno, "malformed number");
      k.values.push_back(v);
    }
  }
  if (k.values.size() != k.m * k.m) throw InputError(path.string() + ": Gram matrix is not square");
  k.ranking_ids.resize(k.m);
  for (std::size_t i = 0; i < k.m; ++i) k.ranking_ids[i] = i;
  return k;
}

namespace {

void put_le(std::ostream& out, std::uint64_t value, int bytes) {
  for (int b = 0; b < bytes; ++b) out.put(static_cast<char>((value >> (8 * b)) & 0xff));
}

std::uint64_t get_le(std::istream& in, int bytes, const fs::path& path) {
  std::uint64_t value = 0;
  for (int b = 0; b < bytes; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw InputError(path.string() + ": truncated binary Gram file");
    }
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return value;
}

}  // namespace

void save_gram_binary(const fs::path& path, const GramMatrix& k) {
  auto out = open_out(path, true);
  out.write("GRAM", 4);
  put_le(out, kGramBinaryVersion, 4);
  put_le(out, k.m, 8);
  for (double v : k.values) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
}

GramMatrix load_gram_binary(const fs::path& path) {
  auto in = open_in(path, true);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "GRAM") {
    throw InputError(path.string() + ": not a binary Gram file");
  }
  const auto version = get_le(in, 4, path);
  if (version != kGramBinaryVersion) {
    throw InputError(path.string() + ": unsupported Gram version " + std::to_string(version));
  }
  GramMatrix k;
  k.m = get_le(in, 8, path);
  k.values.resize(k.m * k.m);
  for (double& v : k.values) v = std::bit_cast<double>(get_le(in, 8, path));
  k.ranking_ids.resize(k.m);
  for (std::size_t i = 0; i < k.m; ++i) k.ranking_ids[i] = i;
  return k;
}

}  // namespace subkern::io
