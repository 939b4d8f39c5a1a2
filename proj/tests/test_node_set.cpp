#include <gtest/gtest.h>

#include "radiocast/node_set.hpp"

using radiocast::NodeSet;

TEST(NodeSet, InsertEraseContains) {
  NodeSet s(10);
  EXPECT_TRUE(s.empty());
  s.insert(3);
  s.insert(7);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(4));
  EXPECT_FALSE(s.contains(-1));
  EXPECT_FALSE(s.contains(10));
  EXPECT_EQ(s.size(), 2u);
  s.erase(3);
  EXPECT_EQ(s.to_vector(), std::vector<int>{7});
  EXPECT_THROW(s.insert(10), std::out_of_range);
  EXPECT_THROW(s.erase(-1), std::out_of_range);
}

TEST(NodeSet, AlgebraAndIteration) {
  NodeSet a(8, {0, 1, 2, 5}), b(8, {2, 3, 5});
  EXPECT_EQ((a | b).to_vector(), (std::vector<int>{0, 1, 2, 3, 5}));
  EXPECT_EQ((a & b).to_vector(), (std::vector<int>{2, 5}));
  EXPECT_EQ((a - b).to_vector(), (std::vector<int>{0, 1}));
  EXPECT_TRUE(a.intersects(b));
  EXPECT_EQ(a.intersection_size(b), 2u);
  EXPECT_TRUE(NodeSet(8, {2, 5}).is_subset_of(a));
  EXPECT_FALSE(b.is_subset_of(a));
  EXPECT_EQ(a.first(), 0);
  EXPECT_EQ(a.next(2), 5);
  EXPECT_EQ(a.next(5), -1);
  EXPECT_EQ(NodeSet(8).first(), -1);
}

TEST(NodeSet, WideUniverse) {
  NodeSet a(200), b(200);
  for (int v : {0, 63, 64, 65, 130, 199}) a.insert(v);
  b.insert(64);
  b.insert(199);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ((a & b).to_vector(), (std::vector<int>{64, 199}));
  EXPECT_EQ(a.next(65), 130);
  EXPECT_EQ(NodeSet::full(130).size(), 130u);
  std::vector<int> seen;
  a.for_each([&](int v) { seen.push_back(v); });
  EXPECT_EQ(seen, a.to_vector());
}

TEST(NodeSet, EqualityIncludesUniverse) {
  EXPECT_EQ(NodeSet(5, {1, 2}), NodeSet(5, {2, 1}));
  EXPECT_NE(NodeSet(5, {1}), NodeSet(5, {2}));
}
