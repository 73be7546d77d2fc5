#include <gtest/gtest.h>

#include "mpnn_lab/mlp.hpp"
#include "mpnn_lab/rng.hpp"

using namespace mpnn_lab;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Vector random_vector(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

MLPSpec random_mlp(Rng& rng) {
  std::vector<DenseLayer> layers;
  layers.push_back({random_matrix(5, 4, rng), random_vector(5, rng), Activation::ReLU});
  layers.push_back({random_matrix(6, 5, rng), random_vector(6, rng), Activation::ReLU});
  layers.push_back({random_matrix(3, 6, rng), random_vector(3, rng), Activation::Identity});
  return MLPSpec(std::move(layers));
}

}  // namespace

TEST(MLP, ForwardMatchesEigenOracle) {
  Rng rng(1);
  const auto m = random_mlp(rng);
  for (int t = 0; t < 20; ++t) {
    const Vector x = random_vector(4, rng);
    Vector h = x;
    for (const auto& l : m.layers()) {
      h = l.weight * h + l.bias;
      if (l.activation == Activation::ReLU) h = h.cwiseMax(0.0);
    }
    EXPECT_LT((mlp_forward(m, x) - h).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MLP, RowwiseForwardMatchesSingleForward) {
  Rng rng(2);
  const auto m = random_mlp(rng);
  Matrix x(7, 4);
  for (Eigen::Index i = 0; i < 7; ++i) x.row(i) = random_vector(4, rng).transpose();
  const Matrix y = mlp_forward_rows(m, x);
  for (Eigen::Index i = 0; i < 7; ++i) EXPECT_EQ(Vector(y.row(i).transpose()), mlp_forward(m, x.row(i).transpose()));
}

TEST(MLP, LipschitzUpperBoundDominatesProbes) {
  Rng rng(3);
  const auto m = random_mlp(rng);
  const double lip = mlp_lipschitz_upper(m);
  for (int t = 0; t < 2000; ++t) {
    const Vector x = random_vector(4, rng);
    const Vector y = x + 0.01 * random_vector(4, rng);
    const double num = (mlp_forward(m, x) - mlp_forward(m, y)).cwiseAbs().maxCoeff();
    const double den = (x - y).cwiseAbs().maxCoeff();
    EXPECT_LE(num, lip * den * (1 + 1e-12));
  }
}

TEST(MLP, InducedNormAndFormalBias) {
  Eigen::MatrixXd w(2, 3);
  w << 1, -2, 0.5, -4, 0, 1;
  EXPECT_EQ(induced_inf_norm(w), 5.0);
  Vector b(2);
  b << 0.25, -0.75;
  const auto m = single_layer(w, b);
  EXPECT_EQ(formal_bias(m), 0.75);
  EXPECT_EQ(mlp_lipschitz_upper(m), 5.0);
  EXPECT_EQ(formal_bias(single_layer(w, b, Activation::ReLU)), 0.25);
}

TEST(MLP, AffineFormCollapsesIdentityLayers) {
  Rng rng(4);
  std::vector<DenseLayer> layers{{random_matrix(3, 2, rng), random_vector(3, rng), Activation::Identity},
                                 {random_matrix(2, 3, rng), random_vector(2, rng), Activation::Identity}};
  const MLPSpec m(layers);
  ASSERT_TRUE(m.affine());
  const auto [a, c] = affine_form(m);
  for (int t = 0; t < 10; ++t) {
    const Vector x = random_vector(2, rng);
    EXPECT_LT((mlp_forward(m, x) - (a * x + c)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(affine_form(random_mlp(rng)), std::invalid_argument);
}

TEST(MLP, Validation) {
  Rng rng(5);
  EXPECT_THROW(MLPSpec(std::vector<DenseLayer>{}), std::invalid_argument);
  EXPECT_THROW(single_layer(random_matrix(2, 2, rng), random_vector(3, rng)), std::invalid_argument);
  EXPECT_THROW(MLPSpec(std::vector<DenseLayer>{{random_matrix(2, 2, rng), random_vector(2, rng), Activation::ReLU},
                        {random_matrix(2, 3, rng), random_vector(2, rng), Activation::ReLU}}),
               std::invalid_argument);
  EXPECT_THROW(mlp_forward(random_mlp(rng), Vector::Zero(3)), std::invalid_argument);
  EXPECT_EQ(parse_activation("relu"), Activation::ReLU);
  EXPECT_THROW(parse_activation("tanh"), std::invalid_argument);
}

TEST(MLP, ScalingMultipliesLipschitzBound) {
  Rng rng(6);
  const auto m = random_mlp(rng);
  EXPECT_NEAR(mlp_lipschitz_upper(scaled(m, 0.5)), mlp_lipschitz_upper(m) * 0.125, 1e-12);
}
