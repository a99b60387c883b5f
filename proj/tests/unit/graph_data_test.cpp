#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

#include "samgog/errors.hpp"
#include "samgog/graph_data.hpp"
#include "samgog/rng.hpp"
#include "test_util.hpp"

using namespace samgog;
using samgog::testing::TempDir;
using samgog::testing::write_file;

namespace {

// Two graphs: a triangle with one self-loop and one duplicated edge, then a
// single edge written without the space after the comma and with CRLF.
void write_tiny(const std::filesystem::path& dir) {
  write_file(dir / "TINY_A.txt", "1, 2\n2, 1\n2, 3\n3, 1\n1, 3\n3, 3\n4,5\r\n5,4\r\n");
  write_file(dir / "TINY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  write_file(dir / "TINY_graph_labels.txt", "-1\n1\n");
  write_file(dir / "TINY_node_labels.txt", "7\n3\n7\n3\n0\n");
}

GraphDataset two_class_dataset(int n0, int n1) {
  GraphDataset ds;
  ds.name = "fixture";
  ds.num_classes = 2;
  ds.class_values = {0, 1};
  for (int i = 0; i < n0 + n1; ++i) {
    InputGraph g;
    g.id = i;
    g.num_nodes = 1 + i % 7;
    g.label = i < n0 ? 0 : 1;
    ds.graphs.push_back(g);
  }
  return ds;
}

}  // namespace

TEST(ParseTudataset, MinimalFilesParseWithCanonicalEdges) {
  TempDir tmp;
  write_tiny(tmp.path());
  const auto ds = parse_tudataset(tmp.path(), "TINY");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.num_classes, 2);
  EXPECT_EQ(ds.class_values, (std::vector<long long>{-1, 1}));
  EXPECT_EQ(ds.graphs[0].num_nodes, 3);
  EXPECT_EQ(ds.graphs[0].edges, (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(ds.graphs[1].edges, (std::vector<Edge>{{0, 1}}));
  EXPECT_EQ(*ds.graphs[0].label, 0);
  EXPECT_EQ(*ds.graphs[1].label, 1);
  EXPECT_EQ(ds.num_node_labels, 3);
  EXPECT_EQ(ds.graphs[0].node_labels, (std::vector<int>{2, 1, 2}));
  EXPECT_EQ(ds.graphs[1].node_labels, (std::vector<int>{1, 0}));
}

TEST(ParseTudataset, AcceptsNamedSubdirectory) {
  TempDir tmp;
  std::filesystem::create_directories(tmp.path() / "TINY");
  write_tiny(tmp.path() / "TINY");
  EXPECT_EQ(parse_tudataset(tmp.path(), "TINY").size(), 2u);
}

TEST(ParseTudataset, MissingMandatoryFileIsNamed) {
  TempDir tmp;
  write_tiny(tmp.path());
  std::filesystem::remove(tmp.path() / "TINY_graph_indicator.txt");
  try {
    parse_tudataset(tmp.path(), "TINY");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("TINY_graph_indicator.txt"), std::string::npos);
  }
}

TEST(ParseTudataset, CrossGraphEdgeReportsLine) {
  TempDir tmp;
  write_tiny(tmp.path());
  write_file(tmp.path() / "TINY_A.txt", "1, 2\n3, 4\n");
  try {
    parse_tudataset(tmp.path(), "TINY");
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("TINY_A.txt:2"), std::string::npos) << e.what();
  }
}

TEST(ParseTudataset, OutOfRangeNodeIsRejected) {
  TempDir tmp;
  write_tiny(tmp.path());
  write_file(tmp.path() / "TINY_A.txt", "1, 9\n");
  EXPECT_THROW(parse_tudataset(tmp.path(), "TINY"), IntegrityError);
}

TEST(ParseTudataset, GarbageTokenIsParseError) {
  TempDir tmp;
  write_tiny(tmp.path());
  write_file(tmp.path() / "TINY_A.txt", "1, x\n");
  EXPECT_THROW(parse_tudataset(tmp.path(), "TINY"), ParseError);
}

TEST(ParseTudataset, WriteThenParseRoundTrips) {
  TempDir tmp;
  const auto original = make_planted_dataset(PlantedConfig{.num_graphs = 30}, 11);
  write_tudataset(original, tmp.path(), "RT");
  const auto back = parse_tudataset(tmp.path(), "RT");
  ASSERT_EQ(back.size(), original.size());
  for (std::size_t g = 0; g < back.size(); ++g) {
    EXPECT_EQ(back.graphs[g].num_nodes, original.graphs[g].num_nodes);
    EXPECT_EQ(back.graphs[g].edges, original.graphs[g].edges);
    EXPECT_EQ(back.graphs[g].node_labels, original.graphs[g].node_labels);
    EXPECT_EQ(back.graphs[g].label, original.graphs[g].label);
  }
}

TEST(BuildFeatures, NodeLabelOneHot) {
  TempDir tmp;
  write_tiny(tmp.path());
  const auto ds = build_features(parse_tudataset(tmp.path(), "TINY"), FeatureScheme::node_label_onehot);
  EXPECT_EQ(ds.feature_dim, 3);
  Matrix expected(3, 3);
  expected << 0, 0, 1, 0, 1, 0, 0, 0, 1;
  EXPECT_EQ(ds.graphs[0].features, expected);
}

TEST(BuildFeatures, DegreeOneHotCapsIntoLastBucket) {
  TempDir tmp;
  write_tiny(tmp.path());
  const auto ds = build_features(parse_tudataset(tmp.path(), "TINY"), FeatureScheme::degree_onehot, 2);
  EXPECT_EQ(ds.feature_dim, 2);
  // Triangle degrees are 2, which land in bucket 1; the edge's degrees are 1.
  for (int i = 0; i < 3; ++i) EXPECT_EQ(ds.graphs[0].features(i, 1), 1.0);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(ds.graphs[1].features(i, 1), 1.0);
}

TEST(SizeImbalance, HandFixtures) {
  EXPECT_DOUBLE_EQ(compute_size_imbalance_ratio(std::vector<int>{10, 10, 10, 10, 50}), 5.0);
  EXPECT_DOUBLE_EQ(compute_size_imbalance_ratio(std::vector<int>(12, 4)), 1.0);
  std::vector<int> sizes(100);
  std::iota(sizes.begin(), sizes.end(), 1);
  EXPECT_NEAR(compute_size_imbalance_ratio(sizes), 90.5 / 40.5, 1e-12);
  const auto part = head_tail_partition(sizes);
  EXPECT_EQ(part.head.size(), 20u);
  EXPECT_EQ(part.head.front(), 80);  // id of size 81
}

TEST(SizeImbalance, TooFewGraphsThrow) {
  EXPECT_THROW(compute_size_imbalance_ratio(std::vector<int>{1, 2, 3, 4}), Error);
}

TEST(HeadTail, EqualSizesResolveTowardHigherIds) {
  const auto part = head_tail_partition(std::vector<int>(10, 3));
  EXPECT_EQ(part.head, (std::vector<int>{8, 9}));
  EXPECT_EQ(part.tail.size(), 8u);
}

TEST(HeadTail, MatchesSortOracleOnRandomSizes) {
  CounterRng rng(5);
  std::vector<int> sizes(50);
  for (auto& s : sizes) s = 1 + static_cast<int>(rng.below(12));
  std::vector<int> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::pair(sizes[a], a) > std::pair(sizes[b], b); });
  std::vector<int> head(order.begin(), order.begin() + 10);
  std::sort(head.begin(), head.end());
  const auto part = head_tail_partition(sizes);
  EXPECT_EQ(part.head, head);
  for (int h : part.head)
    for (int t : part.tail) EXPECT_GE(sizes[h], sizes[t]);
}

TEST(ClassSplit, NineToOneOnTwoHundredGraphs) {
  const auto ds = two_class_dataset(100, 100);
  const auto split = make_class_imbalanced_split(ds, 9.0, 0.5, 0.1, 3);
  EXPECT_EQ(split.train_idx.size(), 100u);
  int minority = 0;
  for (int i : split.train_idx) minority += *ds.graphs[i].label == 1;
  EXPECT_EQ(minority, 10);
  EXPECT_DOUBLE_EQ(compute_class_imbalance_ratio(ds, split.train_idx), 9.0);
  EXPECT_EQ(split.val_idx.size(), 20u);
  EXPECT_EQ(split.test_idx.size(), 80u);
  std::set<int> all(split.train_idx.begin(), split.train_idx.end());
  all.insert(split.val_idx.begin(), split.val_idx.end());
  all.insert(split.test_idx.begin(), split.test_idx.end());
  EXPECT_EQ(all.size(), 200u);
}

TEST(ClassSplit, SameSeedSameSplitDifferentSeedDiffers) {
  const auto ds = two_class_dataset(60, 40);
  const auto a = make_class_imbalanced_split(ds, 2.0, 0.5, 0.2, 9);
  const auto b = make_class_imbalanced_split(ds, 2.0, 0.5, 0.2, 9);
  const auto c = make_class_imbalanced_split(ds, 2.0, 0.5, 0.2, 10);
  EXPECT_EQ(a.train_idx, b.train_idx);
  EXPECT_EQ(a.test_idx, b.test_idx);
  EXPECT_NE(a.train_idx, c.train_idx);
}

TEST(ClassSplit, RatioWithinOneGraphForRandomRequests) {
  CounterRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n0 = 100 + static_cast<int>(rng.below(40));
    const int n1 = 100 + static_cast<int>(rng.below(40));
    const auto ds = two_class_dataset(n0, n1);
    const double rho = 1.0 + 8.0 * rng.uniform();
    const auto split = make_class_imbalanced_split(ds, rho, 0.3, 0.1, trial);
    const int majority_class = n0 >= n1 ? 0 : 1;
    int minor = 0;
    for (int i : split.train_idx) minor += *ds.graphs[i].label != majority_class;
    const int major = static_cast<int>(split.train_idx.size()) - minor;
    // Ratio after moving at most one graph between the classes brackets rho.
    EXPECT_LE(static_cast<double>(major - 1) / (minor + 1), rho + 1e-12);
    EXPECT_GE(static_cast<double>(major + 1) / std::max(minor - 1, 1), rho - 1e-12);
  }
}

TEST(ClassSplit, InfeasibleRatioThrows) {
  const auto ds = two_class_dataset(100, 100);
  EXPECT_THROW(make_class_imbalanced_split(ds, 9.0, 0.9, 0.05, 1), FeasibilityError);
}

TEST(SplitFile, RoundTripsThroughText) {
  const auto ds = two_class_dataset(30, 20);
  auto split = make_class_imbalanced_split(ds, 2.0, 0.4, 0.2, 4);
  std::stringstream buffer;
  write_split(buffer, split);
  EXPECT_EQ(buffer.str().rfind("# ", 0), 0u);
  const auto back = read_split(buffer);
  EXPECT_EQ(back.train_idx, split.train_idx);
  EXPECT_EQ(back.val_idx, split.val_idx);
  EXPECT_EQ(back.test_idx, split.test_idx);
  EXPECT_EQ(back.seed, split.seed);
  ASSERT_TRUE(back.rho_class);
  EXPECT_DOUBLE_EQ(*back.rho_class, *split.rho_class);
}

TEST(SplitSpec, OverlapIsRejected) {
  const auto ds = two_class_dataset(5, 5);
  SplitSpec split;
  split.train_idx = {0, 1, 6};
  split.test_idx = {1, 2};
  EXPECT_THROW(split.validate(ds), IntegrityError);
}

TEST(PlantedDataset, DeterministicAndWithinBounds) {
  PlantedConfig cfg;
  cfg.num_graphs = 40;
  const auto a = make_planted_dataset(cfg, 8);
  const auto b = make_planted_dataset(cfg, 8);
  ASSERT_EQ(a.size(), 40u);
  int class1 = 0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    EXPECT_EQ(a.graphs[g].edges, b.graphs[g].edges);
    EXPECT_GE(a.graphs[g].num_nodes, cfg.min_nodes);
    EXPECT_LE(a.graphs[g].num_nodes, cfg.max_nodes);
    class1 += *a.graphs[g].label;
  }
  EXPECT_EQ(class1, 20);
  a.validate();
}

// Real benchmark files are only checked when their directories are provided.
TEST(RealDatasets, PtcMrStatistics) {
  const char* dir = std::getenv("SAMGOG_PTC_MR_DIR");
  if (dir == nullptr || *dir == '\0') GTEST_SKIP() << "SAMGOG_PTC_MR_DIR not set";
  const auto ds = build_features(parse_tudataset(dir, "PTC_MR"), FeatureScheme::node_label_onehot);
  ASSERT_EQ(ds.size(), 344u);
  EXPECT_EQ(ds.num_classes, 2);
  EXPECT_EQ(ds.feature_dim, 18);
  double nodes = 0.0;
  for (const auto& g : ds.graphs) nodes += g.num_nodes;
  EXPECT_NEAR(nodes / 344.0, 14.3, 0.05);
}

TEST(RealDatasets, DdNodeLabelFeatureWidth) {
  const char* dir = std::getenv("SAMGOG_DD_DIR");
  if (dir == nullptr || *dir == '\0') GTEST_SKIP() << "SAMGOG_DD_DIR not set";
  const auto ds = build_features(parse_tudataset(dir, "DD"), FeatureScheme::node_label_onehot);
  EXPECT_EQ(ds.feature_dim, 89);
}
