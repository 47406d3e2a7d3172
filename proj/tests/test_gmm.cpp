#include <psif/gmm.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace psif;

TEST_CASE("gmm with one component gives unit responsibilities") {
  const auto table = fixtures::make_random_table(15, 4, 3);
  const auto model = gmm_fit(table, 1, 10, 42);
  REQUIRE(model.responsibilities.rows() == 15);
  for (Eigen::Index w = 0; w < 15; ++w) {
    REQUIRE(model.responsibilities(w, 0) == 1.0);
  }
}

TEST_CASE("gmm separates two well-separated clusters") {
  Rng rng(5);
  WordVectorTable table;
  const int d = 4;
  table.dim = d;
  table.vectors.resize(100, d);
  for (int w = 0; w < 100; ++w) {
    table.tokens.push_back("w" + std::to_string(w));
    table.index.emplace(table.tokens.back(), w);
    const double center = w < 50 ? 10.0 : -10.0;
    table.vectors(w, 0) = center + 0.1 * rng.normal();
    for (int c = 1; c < d; ++c) table.vectors(w, c) = 0.1 * rng.normal();
  }
  const auto model = gmm_fit(table, 2, 50, 11);
  int confident = 0;
  for (Eigen::Index w = 0; w < 100; ++w) {
    if (model.responsibilities.row(w).maxCoeff() >= 0.99) ++confident;
  }
  REQUIRE(confident >= 95);
}

TEST_CASE("gmm responsibilities are a proper posterior") {
  const auto table = fixtures::make_random_table(40, 6, 9);
  const auto model = gmm_fit(table, 4, 30, 17);
  for (Eigen::Index w = 0; w < model.responsibilities.rows(); ++w) {
    double sum = 0.0;
    for (int j = 0; j < model.num_components(); ++j) {
      REQUIRE(model.responsibilities(w, j) >= 0.0);
      sum += model.responsibilities(w, j);
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("gmm log-likelihood is nondecreasing") {
  const auto table = fixtures::make_random_table(50, 5, 29);
  const auto model = gmm_fit(table, 3, 40, 7);
  REQUIRE(model.loglik_history.size() >= 2);
  for (std::size_t t = 1; t < model.loglik_history.size(); ++t) {
    REQUIRE(model.loglik_history[t] >= model.loglik_history[t - 1] - 1e-9);
  }
}

TEST_CASE("gmm determinism and vocabulary bound") {
  const auto table = fixtures::make_random_table(30, 4, 31);
  const auto m1 = gmm_fit(table, 3, 20, 77);
  const auto m2 = gmm_fit(table, 3, 20, 77);
  REQUIRE(m1.means == m2.means);
  REQUIRE(m1.responsibilities == m2.responsibilities);
  REQUIRE(m1.loglik_history == m2.loglik_history);

  REQUIRE_THROWS_WITH(gmm_fit(table, 31, 20, 1),
                      Catch::Matchers::ContainsSubstring("exceeds vocabulary"));
}

TEST_CASE("gmm responsibilities pass through as partition weights") {
  const auto table = fixtures::make_random_table(20, 4, 37);
  const auto model = gmm_fit(table, 2, 15, 3);
  const auto pw = as_partition_weights(model);
  REQUIRE(pw.K == 2);
  REQUIRE(pw.weights == model.responsibilities);
  REQUIRE(pw.tokens == model.tokens);
}

TEST_CASE("gmm save/load round-trip") {
  fixtures::TempDir dir;
  const auto table = fixtures::make_random_table(20, 4, 41);
  const auto model = gmm_fit(table, 2, 15, 5);
  save_gmm(dir.str("model"), model);
  const auto back = load_gmm(dir.str("model"));
  REQUIRE(back.means == model.means);
  REQUIRE(back.responsibilities == model.responsibilities);
  REQUIRE(back.tokens == model.tokens);
  REQUIRE(back.dim == model.dim);
  REQUIRE(back.seed == model.seed);
}
