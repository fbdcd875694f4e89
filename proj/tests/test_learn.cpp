#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "relnet/learn.hpp"
#include "relnet/retweet.hpp"

using namespace relnet;

namespace {

LinearBatch random_linear_batch(int n, int dim, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::bernoulli_distribution on(0.3);
  std::vector<Eigen::Triplet<double>> trip;
  LinearBatch b;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c)
      if (on(rng)) trip.emplace_back(r, c, u(rng));
    b.labels.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(classes)));
  }
  b.x.resize(n, dim);
  b.x.setFromTriplets(trip.begin(), trip.end());
  return b;
}

}  // namespace

TEST_CASE("gradient check of a scalar quadratic probe") {
  struct Probe {
    using Scalar = double;
    using Vec = Eigen::VectorXd;
    Vec w = Vec::Ones(1);
    Vec& parameters() { return w; }
    double loss(int) const { return w(0) * w(0); }
    Vec gradient(int) const { return 2 * w; }
  } probe;
  const auto r = gradient_check(probe, 0);
  CHECK(r.checked == 1);
  CHECK(r.max_relative_error < 1e-6);
}

TEST_CASE("linear model gradient") {
  auto b = random_linear_batch(40, 30, 5, 1);
  LinearModel<long double> m(5, 30, 1e-3L);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 0.5);
  for (Eigen::Index i = 0; i < m.parameters().size(); ++i) m.parameters()(i) = n(rng);
  const auto r = gradient_check(m, b, 1e-5, 200, 3);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("char cnn gradient") {
  CharCnnConfig c;
  c.encoder = {20, 4, {3, 4, 5}, {3, 3, 3}};
  c.dense_dim = 2;
  c.hidden = 6;
  c.names = 2;
  CharCnnModel<double> m(c);
  m.init(5);
  std::vector<CharSample> batch;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 6; ++i) {
    CharSample s;
    for (int j = 0; j < 2; ++j) {
      std::vector<int> ids(5 + rng() % 4);
      for (auto& x : ids) x = static_cast<int>(rng() % 20);
      s.names.push_back(ids);
    }
    s.dense = Eigen::VectorXd::Random(2);
    s.label = i % 5;
    batch.push_back(s);
  }
  auto ml = m.cast<long double>();
  const auto r = gradient_check(ml, batch, 1e-5, 200, 9);
  MESSAGE("charcnn max rel " << r.max_relative_error);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("retweet model gradient") {
  for (auto variant : {RetweetVariant::Baseline, RetweetVariant::Aware}) {
    RetweetModelConfig c;
    c.variant = variant;
    c.text_dim = 12;
    c.text_proj = 4;
    c.relation_embed = 3;
    c.phrase_encoder = {10, 3, {3, 4, 5}, {2, 2, 2}};
    c.hidden = 5;
    RetweetModel<double> m(c);
    m.init(7);
    std::vector<RetweetInput> batch;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 8; ++i) {
      RetweetInput in;
      in.text = {{static_cast<int>(rng() % 6), 1.0}, {6 + static_cast<int>(rng() % 6), 2.0}};
      in.extras = Eigen::Vector3d::Random();
      in.category = i % 5;
      in.phrase = {1 + i % 3, 2, 3, 4, 5, static_cast<int>(rng() % 10)};
      in.label = i % 2;
      batch.push_back(in);
    }
    auto ml = m.cast<long double>();
    const auto r = gradient_check(ml, batch, 1e-5, 200, 10);
    MESSAGE(retweet_variant_name(variant) << " max rel " << r.max_relative_error);
    CHECK(r.max_relative_error < 1e-4);
  }
}

// Splits

namespace {

std::size_t user_overlap(const std::vector<std::pair<std::string, std::string>>& dyads, const SplitPlan& plan) {
  std::array<std::set<std::string>, 3> users;
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    auto& s = users[static_cast<std::size_t>(plan.assignment[i])];
    s.insert(dyads[i].first);
    s.insert(dyads[i].second);
  }
  std::size_t n = 0;
  for (int p = 0; p < 3; ++p)
    for (int q = p + 1; q < 3; ++q)
      for (const auto& u : users[p]) n += users[q].count(u);
  return n;
}

}  // namespace

TEST_CASE("shared users keep dyads together") {
  const std::vector<std::pair<std::string, std::string>> d = {{"a", "b"}, {"b", "c"}, {"x", "y"}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto plan = split_user_disjoint(d, {8, 1, 1}, seed);
    CHECK(plan.assignment[0] == plan.assignment[1]);
  }
}

TEST_CASE("disjoint dyads split by ratio") {
  std::vector<std::pair<std::string, std::string>> d;
  for (int i = 0; i < 10; ++i) d.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
  const auto plan = split_user_disjoint(d, {8, 1, 1}, 3);
  CHECK(plan.counts == std::array<std::size_t, 3>{8, 1, 1});
  CHECK(plan.components == 10);
  CHECK_THROWS_AS(split_user_disjoint(d, {8, 0, 1}, 3), ConfigError);
}

TEST_CASE("random dyad graphs split without user overlap") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<std::string, std::string>> d;
    std::vector<int> strata;
    const int users = 20 + static_cast<int>(rng() % 300);
    for (int i = 0; i < 200; ++i) {
      const auto a = rng() % static_cast<std::uint64_t>(users), b = rng() % static_cast<std::uint64_t>(users);
      if (a == b) continue;
      d.emplace_back("u" + std::to_string(std::min(a, b)), "u" + std::to_string(std::max(a, b)));
      strata.push_back(static_cast<int>(rng() % 5));
    }
    CHECK(user_overlap(d, split_user_disjoint(d, {8, 1, 1}, trial)) == 0);
    CHECK(user_overlap(d, split_user_disjoint(d, {8, 1, 1}, trial, strata)) == 0);
  }
}

TEST_CASE("oversized component goes to train with a warning") {
  std::vector<std::pair<std::string, std::string>> d;
  for (int i = 0; i < 9; ++i) d.emplace_back("hub", "f" + std::to_string(i));
  d.emplace_back("p", "q");
  const auto plan = split_user_disjoint(d, {1, 1, 1}, 0);
  CHECK(plan.warnings.size() == 1);
  CHECK(plan.assignment[0] == Partition::Train);
}

TEST_CASE("stratified split reaches every partition per class") {
  std::vector<std::pair<std::string, std::string>> d;
  std::vector<int> strata;
  for (int c = 0; c < 5; ++c) {
    const int n = c == 0 ? 500 : 20;
    for (int i = 0; i < n; ++i) {
      d.emplace_back("c" + std::to_string(c) + "a" + std::to_string(i), "c" + std::to_string(c) + "b" + std::to_string(i));
      strata.push_back(c);
    }
  }
  const auto plan = split_user_disjoint(d, {8, 1, 1}, 4, strata);
  for (int c = 0; c < 5; ++c)
    for (int p = 0; p < 3; ++p) {
      std::size_t n = 0;
      for (std::size_t i = 0; i < d.size(); ++i) n += strata[i] == c && plan.assignment[i] == static_cast<Partition>(p);
      CHECK(n >= 1);
    }
}

TEST_CASE("balanced sets") {
  SplitPlan plan;
  std::vector<int> labels;
  auto add = [&](int label, Partition p, int n) {
    for (int i = 0; i < n; ++i) {
      labels.push_back(label);
      plan.assignment.push_back(p);
    }
  };
  add(0, Partition::Train, 100);
  add(1, Partition::Train, 20);
  const int test_counts[] = {50, 30, 10};
  for (int c = 0; c < 3; ++c) add(c, Partition::Test, test_counts[c]);
  add(0, Partition::Validation, 3);
  add(1, Partition::Validation, 3);
  add(2, Partition::Validation, 3);
  add(2, Partition::Train, 5);

  const auto sets = make_balanced_sets(plan, labels, 100, 1, 3);
  std::array<int, 3> train{}, test{};
  for (auto i : sets.train) ++train[static_cast<std::size_t>(labels[i])];
  for (auto i : sets.test) ++test[static_cast<std::size_t>(labels[i])];
  CHECK(train == std::array<int, 3>{100, 100, 100});
  CHECK(test == std::array<int, 3>{10, 10, 10});
  // Minority upsampling keeps every original member.
  std::set<std::size_t> distinct;
  for (auto i : sets.train)
    if (labels[i] == 1) distinct.insert(i);
  CHECK(distinct.size() == 20);
  for (auto i : sets.test) CHECK(plan.assignment[i] == Partition::Test);

  auto broken = plan;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 2 && broken.assignment[i] == Partition::Validation) broken.assignment[i] = Partition::Train;
  CHECK_THROWS_AS(make_balanced_sets(broken, labels, 10, 1, 3), Error);
}

// Linear model training

namespace {

SparseRows dense_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (rows[r][c] != 0) t.emplace_back(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
  SparseRows x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  x.setFromTriplets(t.begin(), t.end());
  return x;
}

}  // namespace

TEST_CASE("separable two-class data") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 400; ++i) {
    const int c = i % 2;
    rows.push_back({(c ? 3.0 : -3.0) + 0.5 * n(rng), n(rng), 1.0});
    y.push_back(c);
  }
  LinearTrainConfig cfg;
  cfg.classes = 2;
  cfg.seed = 1;
  const auto r = train_linear(dense_rows(rows), y, cfg);
  const auto pred = r.model.predict(dense_rows(rows));
  int correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
  CHECK(correct / 400.0 >= 0.99);
  const auto p = r.model.predict_proba(dense_rows(rows));
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("identical inputs learn the class priors") {
  std::vector<std::vector<double>> rows(500, {1.0, 2.0});
  std::vector<int> y;
  for (int i = 0; i < 500; ++i) y.push_back(i < 300 ? 0 : (i < 450 ? 1 : 2));
  LinearTrainConfig cfg;
  cfg.classes = 3;
  cfg.epochs = 300;
  cfg.batch = 500;
  cfg.l2 = 0;
  const auto r = train_linear(dense_rows(rows), y, cfg);
  const Eigen::VectorXd p = r.model.predict_proba(dense_rows({{1.0, 2.0}})).row(0).transpose();
  CHECK(std::abs(p(0) - 0.6) < 0.02);
  CHECK(std::abs(p(1) - 0.3) < 0.02);
  CHECK(std::abs(p(2) - 0.1) < 0.02);
}

TEST_CASE("zero epochs give a uniform softmax") {
  auto b = random_linear_batch(20, 8, 5, 2);
  LinearTrainConfig cfg;
  cfg.epochs = 0;
  const auto r = train_linear(b.x, b.labels, cfg);
  const auto p = r.model.predict_proba(b.x);
  CHECK((p.array() - 0.2).abs().maxCoeff() < 1e-15);
  CHECK(r.epoch_losses.empty());
}

TEST_CASE("full-batch loss never increases") {
  auto b = random_linear_batch(200, 30, 5, 6);
  LinearTrainConfig cfg;
  cfg.batch = 200;
  cfg.lr = 0.3;
  cfg.epochs = 40;
  const auto r = train_linear(b.x, b.labels, cfg);
  for (std::size_t e = 1; e < r.epoch_losses.size(); ++e) CHECK(r.epoch_losses[e] <= r.epoch_losses[e - 1]);
}

TEST_CASE("linear training is deterministic and persists") {
  auto b = random_linear_batch(120, 15, 5, 7);
  LinearTrainConfig cfg;
  cfg.seed = 3;
  const auto a = train_linear(b.x, b.labels, cfg);
  const auto c = train_linear(b.x, b.labels, cfg);
  CHECK(a.model.parameters() == c.model.parameters());
  std::stringstream ss;
  save_linear_model(ss, a.model, 3);
  const auto back = load_linear_model(ss);
  CHECK(back.parameters() == a.model.parameters());
  CHECK(back.inverse_scale() == a.model.inverse_scale());
  CHECK_THROWS_AS(train_linear(b.x, std::vector<int>(120, 1), cfg), Error);
}

// Evaluation

TEST_CASE("closed-form F1") {
  const std::vector<int> truth = {0, 0, 0, 1, 1, 2};
  const std::vector<int> pred = {0, 0, 1, 1, 0, 0};
  const auto r = evaluate(pred, truth, 3);
  CHECK(r.confusion(0, 0) == 2);
  CHECK(r.confusion(1, 0) == 1);
  CHECK(r.precision(0) == 0.5);
  CHECK(r.recall(0) == 2.0 / 3.0);
  CHECK(r.f1(0) == 2 * 0.5 * (2.0 / 3.0) / (0.5 + 2.0 / 3.0));
  CHECK(r.f1(1) == 0.5);
  CHECK(r.f1(2) == 0.0);
  CHECK(r.macro_f1 == doctest::Approx((r.f1(0) + r.f1(1) + r.f1(2)) / 3).epsilon(1e-12));

  const auto perfect = evaluate(truth, truth, 3);
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.accuracy == 1.0);
}

TEST_CASE("majority and random baselines") {
  std::vector<int> truth;
  const int counts[] = {620, 300, 50, 20, 10};
  for (int c = 0; c < 5; ++c) truth.insert(truth.end(), static_cast<std::size_t>(counts[c]), c);
  const auto maj = evaluate(majority_predictions(truth.size(), 0), truth);
  CHECK(maj.f1(0) == doctest::Approx(2 * 0.62 / 1.62));
  CHECK(maj.macro_f1 == doctest::Approx(2 * 0.62 / 1.62 / 5));

  std::vector<int> balanced;
  for (int c = 0; c < 5; ++c) balanced.insert(balanced.end(), 400, c);
  double sum = 0;
  for (std::uint64_t s = 0; s < 20; ++s)
    sum += evaluate(uniform_random_predictions(balanced.size(), 5, s), balanced).macro_f1;
  CHECK(std::abs(sum / 20 - 0.2) <= 0.02);

  const auto prev = class_prevalence(truth);
  CHECK(prev[0] == doctest::Approx(0.62));
  const auto prop = proportional_random_predictions(100000, prev, 1);
  const auto got = class_prevalence(prop);
  for (int c = 0; c < 5; ++c) CHECK(std::abs(got[static_cast<std::size_t>(c)] - prev[static_cast<std::size_t>(c)]) < 0.01);
}

// Character CNN

namespace {

// Category is carried by a two-letter marker inside the username.
std::vector<CharSample> marker_samples(int per_class, const CharAlphabet& alphabet, std::uint64_t seed) {
  static const char* markers[] = {"qx", "zv", "jk", "wy", "fh"};
  std::mt19937_64 rng(seed);
  const std::string letters = "abcdeilmnoprstu";
  auto word = [&](int len) {
    std::string s;
    for (int i = 0; i < len; ++i) s += letters[rng() % letters.size()];
    return s;
  };
  std::vector<CharSample> out;
  for (int i = 0; i < per_class * 5; ++i) {
    const int c = i % 5;
    CharSample s;
    const std::string user = word(2 + static_cast<int>(rng() % 4)) + markers[c] + word(static_cast<int>(rng() % 4));
    s.names = {alphabet.encode(user), alphabet.encode(word(6)), alphabet.encode(word(5)), alphabet.encode(word(3))};
    s.dense = Eigen::VectorXd::Zero(1);
    s.label = c;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("char cnn learns a username marker rule") {
  const auto alphabet = CharAlphabet::build({"abcdefghijklmnopqrstuvwxyz"});
  CharCnnConfig mc;
  mc.encoder = {alphabet.size(), 8, {3, 4, 5}, {12, 12, 12}};
  mc.dense_dim = 1;
  mc.hidden = 32;
  CharCnnTrainConfig tc;
  tc.adam.lr = 3e-3;
  tc.adam.warmup_steps = 20;
  tc.epochs = 6;
  tc.batch = 16;
  const auto train = marker_samples(120, alphabet, 1);
  const auto test = marker_samples(40, alphabet, 2);
  std::vector<int> truth;
  for (const auto& s : test) truth.push_back(s.label);
  Eigen::VectorXd first;
  for (std::uint64_t seed : {11u, 12u}) {
    tc.seed = seed;
    const auto m = train_charcnn(train, mc, tc);
    const auto r = evaluate(m.predict(test), truth);
    MESSAGE("seed " << seed << " accuracy " << r.accuracy);
    CHECK(r.accuracy >= 0.95);
    if (first.size() == 0) first = m.parameters();
    else CHECK(first != m.parameters());
  }
  // Short names are padded and still give finite outputs.
  CharCnnModel<double> m(mc);
  m.init(1);
  CharSample tiny;
  tiny.names = {alphabet.encode(""), alphabet.encode("a"), alphabet.encode("é"), alphabet.encode("ab")};
  tiny.dense = Eigen::VectorXd::Zero(1);
  CHECK(tiny.names[0].size() == 5);
  CHECK(tiny.names[2][0] == CharAlphabet::kOutOfAlphabet);
  CHECK(m.predict_proba({tiny}).allFinite());
}

TEST_CASE("char cnn persistence") {
  const auto alphabet = CharAlphabet::build({"hello world", "abc"});
  CharCnnConfig mc;
  mc.encoder = {alphabet.size(), 4, {3, 4, 5}, {2, 3, 4}};
  mc.dense_dim = 2;
  mc.hidden = 5;
  CharCnnModel<double> m(mc);
  m.init(3);
  std::stringstream ss;
  save_charcnn_model(ss, m, alphabet, 3);
  CharAlphabet back_alphabet;
  const auto back = load_charcnn_model(ss, &back_alphabet);
  CHECK(back.parameters() == m.parameters());
  CHECK(back_alphabet.size() == alphabet.size());
  CHECK(back_alphabet.encode("hello") == alphabet.encode("hello"));
}
