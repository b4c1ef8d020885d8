#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "subkern/classify.hpp"
#include "subkern/isotonic.hpp"
#include "subkern/kernels.hpp"
#include "subkern/ranking.hpp"
#include "subkern/submodular.hpp"

namespace subkern::io {

/// 17 significant digits ("%.17g"), which round-trips every double.
std::string format_double(double x);

/// Rankings file: "#n=<count>" header, then one ranking per line in the
/// parse_ranking syntax. Blank lines and other '#' lines are skipped.
/// Errors name the file and line number.
struct RankingsFile {
  int n = 0;
  std::vector<OrderedPartition> rankings;
};
RankingsFile load_rankings(const std::filesystem::path& path);
void save_rankings(const std::filesystem::path& path, int n,
                   const std::vector<OrderedPartition>& rankings);

/// Labels CSV "row_index,label", labels in {-1, +1}, rows 0..m-1 in order.
std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const std::vector<int>& labels);

LabeledRankingDataset load_dataset(const std::filesystem::path& rankings,
                                   const std::filesystem::path& labels);

/// Feature CSV: header "id,f1,...,fd", then ids 0..n-1 in order.
FeatureMatrix load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const FeatureMatrix& features);

/// Edge list "u v weight", nonzero edges sorted by (u, v).
void save_graph(const std::filesystem::path& path, const InformationGraph& g);

/// One feature map as "object_id,value" rows.
void save_feature_map(const std::filesystem::path& path, const FeatureMap& phi);
/// All feature maps, one CSV row per ranking, one column per object.
void save_feature_maps(const std::filesystem::path& path, const FeatureMapBatch& maps);

/// Gram matrix as plain CSV rows (no header).
void save_gram_csv(const std::filesystem::path& path, const GramMatrix& k);
GramMatrix load_gram_csv(const std::filesystem::path& path);

/// Binary Gram: "GRAM", u32 version (1), u64 m, then m*m f64, row-major,
/// all little-endian.
inline constexpr std::uint32_t kGramBinaryVersion = 1;
void save_gram_binary(const std::filesystem::path& path, const GramMatrix& k);
GramMatrix load_gram_binary(const std::filesystem::path& path);

}  // namespace subkern::io
