#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "swsds/wmd.hpp"

using namespace swsds;
using Docs = std::vector<std::string>;

namespace {

EmbeddingStore random_store(std::mt19937_64& rng, int words, Eigen::Index dim, double spread = 1.0) {
  std::normal_distribution<double> normal(0, spread);
  EmbeddingStore store(dim);
  for (int w = 0; w < words; ++w) {
    EmbeddingStore::Vector v(dim);
    for (auto& x : v) x = normal(rng);
    store.insert("w" + std::to_string(w), v);
  }
  return store;
}

Docs random_doc(std::mt19937_64& rng, int vocabulary, int max_distinct, int max_len = 8) {
  std::uniform_int_distribution<int> pick(0, vocabulary - 1);
  const int distinct = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_distinct));
  std::vector<std::string> words;
  while (static_cast<int>(words.size()) < distinct) {
    auto w = "w" + std::to_string(pick(rng));
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
  }
  Docs doc = words;
  const int extra = static_cast<int>(rng() % static_cast<unsigned>(max_len - distinct + 1));
  for (int i = 0; i < extra; ++i) doc.push_back(words[rng() % words.size()]);
  std::shuffle(doc.begin(), doc.end(), rng);
  return doc;
}

double lp_oracle(const Docs& a, const Docs& b, const EmbeddingStore& store) {
  const auto wa = nbow(std::span<const std::string>(a), store), wb = nbow(std::span<const std::string>(b), store);
  std::vector<double> s(wa.weights.data(), wa.weights.data() + wa.size());
  std::vector<double> d(wb.weights.data(), wb.weights.data() + wb.size());
  std::vector<std::vector<double>> c(s.size(), std::vector<double>(d.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      const auto& x = *store.find(wa.keys[i]);
      const auto& y = *store.find(wb.keys[j]);
      double sq = 0;
      for (Eigen::Index k = 0; k < x.size(); ++k) sq += (x[k] - y[k]) * (x[k] - y[k]);
      c[i][j] = std::sqrt(sq);
    }
  }
  return oracle::transport_lp(s, d, c);
}

double dist(const Docs& a, const Docs& b, const EmbeddingStore& store) {
  return wmd_distance(std::span<const std::string>(a), std::span<const std::string>(b), store);
}

}  // namespace

TEST_CASE("resolve") {
  EmbeddingStore store(2);
  store.insert("Apple", Eigen::Vector2d(1, 0));
  CHECK(resolve("Apple=244397", store) == "Apple");
  store.insert("Apple=244397", Eigen::Vector2d(0, 1));
  CHECK(resolve("Apple=244397", store) == "Apple=244397");
  CHECK(resolve("Apple", store) == "Apple");
  CHECK_FALSE(resolve("pear", store).has_value());
  CHECK_FALSE(resolve("pear=1", store).has_value());
}

TEST_CASE("nbow") {
  EmbeddingStore store(1);
  store.insert("a", Eigen::VectorXd::Constant(1, 0.0));
  store.insert("b", Eigen::VectorXd::Constant(1, 1.0));
  Docs doc = {"a", "b", "a", "oov"};
  auto w = nbow(std::span<const std::string>(doc), store);
  CHECK(w.keys == Docs{"a", "b"});
  CHECK(w.weights[0] == doctest::Approx(2.0 / 3));
  CHECK(w.weights[1] == doctest::Approx(1.0 / 3));
  Docs dup = {"b", "b", "b"};
  CHECK(nbow(std::span<const std::string>(dup), store).weights[0] == 1.0);
  Docs oov = {"x", "y"};
  CHECK_THROWS_AS(nbow(std::span<const std::string>(oov), store), EmptyDocumentError);
  Docs a = {"a"};
  CHECK_THROWS_AS(dist(a, oov, store), EmptyDocumentError);
}

TEST_CASE("wmd: identical documents and single words") {
  std::mt19937_64 rng(3);
  auto store = random_store(rng, 10, 5);
  Docs d = {"w1", "w2", "w2", "w7"};
  Docs shuffled = {"w2", "w7", "w1", "w2"};
  CHECK(dist(d, d, store) == 0.0);
  CHECK(dist(d, shuffled, store) == 0.0);
  Docs a = {"w3"}, b = {"w8", "w8"};
  const double euclid = (*store.find("w3") - *store.find("w8")).norm();
  CHECK(dist(a, b, store) == doctest::Approx(euclid).epsilon(1e-14));
  CHECK(wcd(std::span<const std::string>(a), std::span<const std::string>(b), store) ==
        doctest::Approx(euclid).epsilon(1e-14));
  CHECK(rwmd(std::span<const std::string>(a), std::span<const std::string>(b), store) ==
        doctest::Approx(euclid).epsilon(1e-14));
  CHECK(wcd(std::span<const std::string>(d), std::span<const std::string>(d), store) == 0.0);
  CHECK(rwmd(std::span<const std::string>(d), std::span<const std::string>(d), store) == 0.0);
}

TEST_CASE("wmd: matches the exhaustive LP oracle on small documents") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto store = random_store(rng, 8, 1 + static_cast<Eigen::Index>(rng() % 6));
    const auto a = random_doc(rng, 8, 4), b = random_doc(rng, 8, 4);
    const double expected = lp_oracle(a, b, store);
    CHECK(std::abs(dist(a, b, store) - expected) <= 1e-9);
  }
}

TEST_CASE("wmd: plan marginals and non-negativity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto store = random_store(rng, 30, 4);
    const auto a = random_doc(rng, 30, 10, 14), b = random_doc(rng, 30, 10, 14);
    auto r = wmd(std::span<const std::string>(a), std::span<const std::string>(b), store);
    std::map<std::string, double> rows, cols;
    double objective = 0;
    for (const auto& f : r.plan.flows) {
      CHECK(f.mass > 0);
      rows[f.from] += f.mass;
      cols[f.to] += f.mass;
      objective += f.mass * (*store.find(f.from) - *store.find(f.to)).norm();
    }
    for (Eigen::Index i = 0; i < r.source.size(); ++i) CHECK(std::abs(rows[r.source.keys[i]] - r.source.weights[i]) <= 1e-9);
    for (Eigen::Index j = 0; j < r.target.size(); ++j) CHECK(std::abs(cols[r.target.keys[j]] - r.target.weights[j]) <= 1e-9);
    CHECK(std::abs(objective - r.distance) <= 1e-9);
    CHECK(std::abs(r.source.weights.sum() - 1) <= 1e-12);
  }
}

TEST_CASE("wmd: metric axioms on seeded triples") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto store = random_store(rng, 12, 3);
    const auto a = random_doc(rng, 12, 5), b = random_doc(rng, 12, 5), c = random_doc(rng, 12, 5);
    CHECK(dist(a, a, store) == 0.0);
    CHECK(std::abs(dist(a, b, store) - dist(b, a, store)) <= 1e-9);
    CHECK(dist(a, c, store) <= dist(a, b, store) + dist(b, c, store) + 1e-9);
  }
}

TEST_CASE("lower bounds: each is at most wmd") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    auto store = random_store(rng, 10, 4);
    const auto a = random_doc(rng, 10, 5), b = random_doc(rng, 10, 5);
    const auto sa = std::span<const std::string>(a), sb = std::span<const std::string>(b);
    const double w = dist(a, b, store);
    CHECK(wcd(sa, sb, store) <= w + 1e-12);
    CHECK(rwmd(sa, sb, store) <= w + 1e-12);
  }
}

TEST_CASE("lower bounds: wcd <= rwmd <= wmd chain on random small documents") {
  std::mt19937_64 rng(15);
  int wcd_above_rwmd = 0, rwmd_above_wmd = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto store = random_store(rng, 10, 4);
    const auto a = random_doc(rng, 10, 5), b = random_doc(rng, 10, 5);
    const auto sa = std::span<const std::string>(a), sb = std::span<const std::string>(b);
    const double c = wcd(sa, sb, store), r = rwmd(sa, sb, store), w = dist(a, b, store);
    if (c > r + 1e-12) ++wcd_above_rwmd;
    if (r > w + 1e-12) ++rwmd_above_wmd;
  }
  CHECK(rwmd_above_wmd == 0);
  CHECK(wcd_above_rwmd == 0);
}

TEST_CASE("sense keys separate a polysemous word's meanings") {
  EmbeddingStore store(2);
  store.insert("Apple", Eigen::Vector2d(0, 0));
  store.insert("Apple=244397", Eigen::Vector2d(-5, 0));
  store.insert("Apple=244396", Eigen::Vector2d(5, 0));
  store.insert("pear", Eigen::Vector2d(-5, 1));
  store.insert("eat", Eigen::Vector2d(0, 3));
  Docs query = {"eat", "pear"};
  Docs right = {"eat", "Apple=244397"}, wrong = {"eat", "Apple=244396"};
  CHECK(dist(query, right, store) < dist(query, wrong, store));
  Docs plain = {"eat", "Apple"};
  CHECK(dist(query, right, store) < dist(query, plain, store));
}

TEST_CASE("classify_pair") {
  std::mt19937_64 rng(16);
  auto store = random_store(rng, 5, 3);
  Docs a = {"w0", "w1"}, b = {"w2"};
  const auto sa = std::span<const std::string>(a), sb = std::span<const std::string>(b);
  CHECK(classify_pair(sa, sa, store, 0.0) == PairDecision::match);
  CHECK(classify_pair(sa, sa, store, 3.5) == PairDecision::match);
  const double w = dist(a, b, store);
  CHECK(classify_pair(sa, sb, store, w) == PairDecision::match);
  CHECK(classify_pair(sa, sb, store, w * 0.99) == PairDecision::no_match);
  CHECK_THROWS_AS(classify_pair(sa, sb, store, std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST_CASE("cosine ground metric") {
  EmbeddingStore store(2);
  store.insert("x", Eigen::Vector2d(1, 0));
  store.insert("y", Eigen::Vector2d(0, 2));
  store.insert("z", Eigen::Vector2d(3, 0));
  Docs x = {"x"}, y = {"y"}, z = {"z"};
  CHECK(wmd_distance(std::span<const std::string>(x), std::span<const std::string>(y), store, GroundMetric::cosine) ==
        doctest::Approx(1.0));
  CHECK(wmd_distance(std::span<const std::string>(x), std::span<const std::string>(z), store, GroundMetric::cosine) ==
        doctest::Approx(0.0));
}

TEST_CASE("solve_transport: validation") {
  Eigen::VectorXd s(2), d(2);
  s << 0.5, 0.5;
  d << 0.7, 0.3;
  Eigen::MatrixXd c = Eigen::MatrixXd::Ones(2, 2);
  CHECK_NOTHROW(solve_transport(s, d, c));
  CHECK_THROWS_AS(solve_transport(s, d, Eigen::MatrixXd::Ones(2, 3)), DimensionMismatchError);
  Eigen::VectorXd bad(2);
  bad << 0.5, 0.6;
  CHECK_THROWS_AS(solve_transport(s, bad, c), InvalidArgument);
  bad << 1.2, -0.2;
  CHECK_THROWS_AS(solve_transport(s, bad, c), InvalidArgument);
  CHECK_THROWS_AS(solve_transport(Eigen::VectorXd(0), Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)), InvalidArgument);
}

TEST_CASE("solve_transport: degenerate and larger problems") {
  std::mt19937_64 rng(21);
  SUBCASE("zero-mass rows and integer ties") {
    for (int trial = 0; trial < 300; ++trial) {
      const int m = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 4);
      // integer masses with frequent zeros and coinciding partial sums force degenerate pivots
      std::vector<double> s(m), d(n);
      int total = 0;
      for (auto& x : s) total += static_cast<int>(x = static_cast<double>(rng() % 3));
      if (total == 0) s[0] = total = 1;
      int left = total;
      for (int j = 0; j + 1 < n; ++j) left -= static_cast<int>(d[j] = static_cast<double>(rng() % (left + 1)));
      d[n - 1] = left;
      std::vector<std::vector<double>> cost(m, std::vector<double>(n));
      Eigen::MatrixXd c(m, n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = cost[i][j] = static_cast<double>(rng() % 3);
      auto sol = solve_transport(Eigen::Map<Eigen::VectorXd>(s.data(), m), Eigen::Map<Eigen::VectorXd>(d.data(), n), c);
      CHECK(std::abs(sol.objective - oracle::transport_lp(s, d, cost)) <= 1e-9);
      CHECK((sol.flow.array() >= 0).all());
    }
  }
  SUBCASE("40 x 40 random problem agrees with its dual bound") {
    const int m = 40, n = 40;
    Eigen::VectorXd s = Eigen::VectorXd::NullaryExpr(m, [&] { return 0.1 + (rng() % 1000) / 1000.0; });
    Eigen::VectorXd d = Eigen::VectorXd::NullaryExpr(n, [&] { return 0.1 + (rng() % 1000) / 1000.0; });
    s /= s.sum();
    d /= d.sum();
    Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return (rng() % 10000) / 100.0; });
    auto sol = solve_transport(s, d, c);
    CHECK((sol.flow.rowwise().sum() - s).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((sol.flow.colwise().sum().transpose() - d).cwiseAbs().maxCoeff() <= 1e-9);
    // no single improving 2x2 swap remains
    double best_gain = 0;
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            if (sol.flow(i, j) > 1e-12 && sol.flow(k, l) > 1e-12)
              best_gain = std::max(best_gain, c(i, j) + c(k, l) - c(i, l) - c(k, j));
    CHECK(best_gain <= 1e-9);
  }
}

TEST_CASE("float scalar") {
  BasicEmbeddingStore<float> store(2);
  store.insert("a", Eigen::Vector2f(0, 0));
  store.insert("b", Eigen::Vector2f(3, 4));
  Docs a = {"a"}, b = {"b"};
  CHECK(wmd_distance(std::span<const std::string>(a), std::span<const std::string>(b), store) == doctest::Approx(5.0f));
}
