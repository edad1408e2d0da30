#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conebellman/cone.hpp"
#include "conebellman/errors.hpp"

namespace conebellman {
namespace {

ValueObject vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return ValueObject::orthant(v);
}

ValueObject diag(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return ValueObject::psd(m);
}

TEST(ConeNorm, OrthantIsDotProduct) {
  EXPECT_DOUBLE_EQ(cone_norm(vec({1, 1}), vec({2, 3})), 5.0);
  EXPECT_DOUBLE_EQ(cone_norm(vec({1, 2}), vec({0, 0})), 0.0);
}

TEST(ConeNorm, PsdIsTrace) {
  EXPECT_DOUBLE_EQ(cone_norm(diag(1, 1), diag(1, 2)), 3.0);
}

TEST(ConeNorm, RejectsBadArguments) {
  try {
    (void)cone_norm(vec({1, 0}), vec({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInteriorWeight);
  }
  try {
    (void)cone_norm(vec({1, 1}), vec({1, -1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInCone);
  }
  try {
    (void)cone_norm(vec({1, 1}), diag(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConeMismatch);
  }
}

TEST(ConeNorm, LinearAndPositiveOnRandomElements) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = vec({u(rng) + 0.1, u(rng) + 0.1, u(rng) + 0.1});
    const Eigen::Vector3d a(u(rng), u(rng), u(rng));
    const Eigen::Vector3d b(u(rng), u(rng), u(rng));
    const double sum = cone_norm(w, ValueObject::orthant(a + b));
    EXPECT_NEAR(sum, cone_norm(w, ValueObject::orthant(a)) +
                         cone_norm(w, ValueObject::orthant(b)),
                1e-12 * (1.0 + sum));
    EXPECT_GE(sum, 0.0);
  }
}

TEST(ValueObject, PsdRejectsAsymmetry) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0.5, 0.4, 1;
  EXPECT_THROW((void)ValueObject::psd(m), Error);
  EXPECT_THROW((void)ValueObject::psd(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST(ValueObject, ConeMembership) {
  EXPECT_TRUE(vec({0, 1}).in_cone());
  EXPECT_FALSE(vec({0, 1}).in_interior());
  EXPECT_FALSE(vec({-1e-6, 1}).in_cone());
  EXPECT_TRUE(vec({-1e-12, 1}).in_cone());
  EXPECT_TRUE(diag(1, 0).in_cone());
  EXPECT_FALSE(diag(1, -1).in_cone());
  EXPECT_TRUE(diag(1, 2).in_interior());
}

TEST(PartialOrder, SpecCases) {
  EXPECT_EQ(partial_order(vec({0, 0}), vec({1, 2})), Ordering::kLeq);
  EXPECT_EQ(partial_order(vec({1, 2}), vec({2, 1})), Ordering::kUnordered);
  EXPECT_EQ(partial_order(diag(1, 1), diag(2, 2)), Ordering::kLeq);
  EXPECT_EQ(partial_order(vec({2, 2}), vec({1, 2})), Ordering::kGeq);
  EXPECT_EQ(partial_order(vec({1, 2}), vec({1, 2})), Ordering::kEqual);
}

TEST(PartialOrder, AntisymmetricAndTransitive) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = vec({double(u(rng)), double(u(rng))});
    const auto b = vec({double(u(rng)), double(u(rng))});
    const auto c = vec({double(u(rng)), double(u(rng))});
    const auto ab = partial_order(a, b);
    const auto ba = partial_order(b, a);
    if (ab == Ordering::kLeq) {
      EXPECT_EQ(ba, Ordering::kGeq);
    }
    if (ab == Ordering::kEqual || ab == Ordering::kUnordered) {
      EXPECT_EQ(ba, ab);
    }
    const auto bc = partial_order(b, c);
    const bool a_le_b = ab == Ordering::kLeq || ab == Ordering::kEqual;
    const bool b_le_c = bc == Ordering::kLeq || bc == Ordering::kEqual;
    if (a_le_b && b_le_c) {
      const auto ac = partial_order(a, c);
      EXPECT_TRUE(ac == Ordering::kLeq || ac == Ordering::kEqual);
    }
  }
}

TEST(MinOfOrderedSet, SpecCases) {
  std::vector<ValueObject> three{vec({1, 2}), vec({2, 1}), vec({0, 0})};
  auto [index, value] = min_of_ordered_set(three);
  EXPECT_EQ(index, 2u);
  EXPECT_EQ(value.vector(), Eigen::Vector2d(0, 0));

  std::vector<ValueObject> pair{vec({1, 2}), vec({2, 1})};
  EXPECT_EQ(min_of_ordered_set(pair).first, 0u);

  std::vector<ValueObject> scalars{vec({3}), vec({1}), vec({2})};
  EXPECT_EQ(min_of_ordered_set(scalars).first, 1u);
}

TEST(MinOfOrderedSet, EmptyThrows) {
  try {
    (void)min_of_ordered_set({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySet);
  }
}

TEST(ConeTag, DimensionMustBePositive) {
  EXPECT_THROW((void)ConeTag::orthant(0), Error);
  EXPECT_THROW((void)ConeTag::psd(0), Error);
  EXPECT_EQ(ConeTag::orthant(2), ConeTag::orthant(2));
  EXPECT_FALSE(ConeTag::orthant(2) == ConeTag::psd(2));
}

}  // namespace
}  // namespace conebellman
