#include "relnet/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace relnet {

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Validation: return "validation";
    case Partition::Test: return "test";
  }
  return "?";
}

std::vector<std::size_t> SplitPlan::members(Partition p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == p) out.push_back(i);
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

SplitPlan split_user_disjoint(const std::vector<std::pair<std::string, std::string>>& dyad_users,
                              std::array<double, 3> ratios, std::uint64_t seed, const std::vector<int>& strata) {
  for (double r : ratios)
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
  if (!strata.empty() && strata.size() != dyad_users.size()) throw Error("strata count does not match the dyads");
  SplitPlan plan;
  plan.seed = seed;
  const std::size_t n = dyad_users.size();
  plan.assignment.assign(n, Partition::Train);
  if (n == 0) return plan;

  std::unordered_map<std::string, std::size_t> first_dyad;
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* u : {&dyad_users[i].first, &dyad_users[i].second}) {
      auto [it, fresh] = first_dyad.emplace(*u, i);
      if (!fresh) uf.unite(i, it->second);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> comps;
  comps.reserve(by_root.size());
  for (auto& [root, members] : by_root) comps.push_back(std::move(members));
  plan.components = comps.size();

  std::mt19937_64 rng(derive_seed(seed, "split"));
  std::shuffle(comps.begin(), comps.end(), rng);
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  // A component belongs to the stratum most of its dyads carry (lowest on ties).
  auto stratum_of = [&](const std::vector<std::size_t>& comp) {
    if (strata.empty()) return 0;
    std::map<int, std::size_t> votes;
    for (std::size_t i : comp) ++votes[strata[i]];
    return std::max_element(votes.begin(), votes.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->first;
  };
  std::map<int, std::size_t> stratum_size;
  std::vector<int> comp_stratum(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    comp_stratum[c] = stratum_of(comps[c]);
    stratum_size[comp_stratum[c]] += comps[c].size();
  }

  const double total_ratio = ratios[0] + ratios[1] + ratios[2];
  const double largest_share = *std::max_element(ratios.begin(), ratios.end()) / total_ratio;
  std::map<int, std::array<std::size_t, 3>> filled;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const auto& comp = comps[c];
    const double size = static_cast<double>(stratum_size[comp_stratum[c]]);
    auto& counts = filled[comp_stratum[c]];
    int dest = 0;
    if (static_cast<double>(comp.size()) > largest_share * static_cast<double>(n)) {
      plan.warnings.push_back("component of " + std::to_string(comp.size()) +
                              " dyads exceeds the largest partition target; assigned to train");
    } else {
      double best_need = -1e300;
      for (int p = 0; p < 3; ++p) {
        const double need = ratios[p] / total_ratio * size - static_cast<double>(counts[p]);
        if (need > best_need) {
          best_need = need;
          dest = p;
        }
      }
    }
    for (std::size_t i : comp) plan.assignment[i] = static_cast<Partition>(dest);
    counts[static_cast<std::size_t>(dest)] += comp.size();
    plan.counts[static_cast<std::size_t>(dest)] += comp.size();
  }
  return plan;
}

BalancedSets make_balanced_sets(const SplitPlan& plan, const std::vector<int>& labels, std::size_t per_class_train_n,
                                std::uint64_t seed, int num_classes) {
  if (labels.size() != plan.assignment.size()) throw Error("label count does not match the split plan");
  std::array<std::vector<std::vector<std::size_t>>, 3> by_class;
  for (auto& v : by_class) v.assign(static_cast<std::size_t>(num_classes), {});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw Error("label out of range");
    by_class[static_cast<std::size_t>(plan.assignment[i])][static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (int p = 0; p < 3; ++p)
    for (int c = 0; c < num_classes; ++c)
      if (by_class[p][static_cast<std::size_t>(c)].empty())
        throw Error("class " + std::to_string(c) + " absent from the " +
                    std::string(partition_name(static_cast<Partition>(p))) + " partition");

  BalancedSets out;
  for (int c = 0; c < num_classes; ++c) {
    std::mt19937_64 rng(derive_seed(seed, "balanced-train", static_cast<std::uint64_t>(c)));
    auto pool = by_class[0][static_cast<std::size_t>(c)];
    if (pool.size() >= per_class_train_n) {
      for (std::size_t i = 0; i < per_class_train_n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      pool.resize(per_class_train_n);
      out.train.insert(out.train.end(), pool.begin(), pool.end());
    } else {
      out.train.insert(out.train.end(), pool.begin(), pool.end());
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t i = pool.size(); i < per_class_train_n; ++i) out.train.push_back(pool[pick(rng)]);
    }
  }
  auto downsample = [&](int p, std::vector<std::size_t>& dest, std::string_view tag) {
    std::size_t smallest = SIZE_MAX;
    for (const auto& v : by_class[p]) smallest = std::min(smallest, v.size());
    for (int c = 0; c < num_classes; ++c) {
      std::mt19937_64 rng(derive_seed(seed, tag, static_cast<std::uint64_t>(c)));
      auto pool = by_class[p][static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < smallest; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      pool.resize(smallest);
      std::sort(pool.begin(), pool.end());
      dest.insert(dest.end(), pool.begin(), pool.end());
    }
  };
  downsample(1, out.validation, "balanced-validation");
  downsample(2, out.test, "balanced-test");
  return out;
}

namespace {

SparseRows select_rows(const SparseRows& x, const std::vector<std::size_t>& rows) {
  SparseRows out(static_cast<Eigen::Index>(rows.size()), x.cols());
  Eigen::VectorXi nnz(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    nnz(static_cast<Eigen::Index>(i)) = static_cast<int>(x.row(static_cast<Eigen::Index>(rows[i])).nonZeros());
  out.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (SparseRows::InnerIterator it(x, static_cast<Eigen::Index>(rows[i])); it; ++it)
      out.insert(static_cast<Eigen::Index>(i), it.col()) = it.value();
  out.makeCompressed();
  return out;
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v(i));
    os << buf << '\n';
  }
}

Eigen::VectorXd read_vector(std::istream& is, Eigen::Index n, const char* what) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string tok;
    if (!(is >> tok)) throw ParseError(0, std::string("truncated ") + what);
    try {
      v(i) = std::stod(tok);
    } catch (const std::exception&) {
      throw ParseError(0, std::string("bad number in ") + what + ": " + tok);
    }
  }
  return v;
}

void expect_word(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word) throw ParseError(0, "expected '" + word + "' in model file, got '" + tok + "'");
}

void skip_comments(std::istream& is) {
  while (is.peek() == '#') {
    std::string line;
    std::getline(is, line);
  }
}

}  // namespace

LinearTrainResult train_linear(const SparseRows& x, const std::vector<int>& labels, const LinearTrainConfig& config) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != labels.size()) throw Error("bad training set");
  if (config.batch < 1 || config.epochs < 0) throw ConfigError("batch must be >= 1 and epochs >= 0");
  std::vector<int> seen(static_cast<std::size_t>(config.classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= config.classes) throw Error("label out of range");
    seen[static_cast<std::size_t>(y)] = 1;
  }
  if (std::accumulate(seen.begin(), seen.end(), 0) < 2) throw Error("training needs at least two classes");

  LinearTrainResult result{LinearModel<double>(config.classes, static_cast<int>(x.cols()), config.l2), {}};
  auto& model = result.model;
  Eigen::VectorXd max_abs = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index r = 0; r < x.outerSize(); ++r)
    for (SparseRows::InnerIterator it(x, r); it; ++it) max_abs(it.col()) = std::max(max_abs(it.col()), std::abs(it.value()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) model.inverse_scale()(c) = max_abs(c) > 0 ? 1.0 / max_abs(c) : 1.0;

  const LinearBatch full{x, labels};
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(config.seed, "linear"));
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      LinearBatch b{select_rows(x, rows), {}};
      for (auto r : rows) b.labels.push_back(labels[r]);
      const double l = model.loss_and_gradient(b, &grad);
      if (!std::isfinite(l) || !grad.allFinite())
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                    std::to_string(start) + " (lr " + std::to_string(config.lr) + "); lower the learning rate");
      model.parameters() -= config.lr * grad;
    }
    const double l = model.loss(full);
    if (!std::isfinite(l)) throw Error("non-finite loss after epoch " + std::to_string(epoch));
    result.epoch_losses.push_back(l);
  }
  return result;
}

void save_linear_model(std::ostream& os, const LinearModel<double>& m, std::uint64_t seed) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", m.l2());
  os << "relnet-linear 1\nseed " << seed << "\nclasses " << m.classes() << "\ndim " << m.dim() << "\nl2 " << buf
     << "\ninverse_scale\n";
  write_vector(os, m.inverse_scale());
  os << "parameters\n";
  write_vector(os, m.parameters());
}

LinearModel<double> load_linear_model(std::istream& is) {
  skip_comments(is);
  expect_word(is, "relnet-linear");
  expect_word(is, "1");
  std::uint64_t seed = 0;
  int classes = 0, dim = 0;
  double l2 = 0;
  expect_word(is, "seed");
  is >> seed;
  expect_word(is, "classes");
  is >> classes;
  expect_word(is, "dim");
  is >> dim;
  expect_word(is, "l2");
  is >> l2;
  if (!is || classes < 1 || dim < 0) throw ParseError(0, "bad linear model header");
  LinearModel<double> m(classes, dim, l2);
  expect_word(is, "inverse_scale");
  m.inverse_scale() = read_vector(is, dim, "inverse_scale");
  expect_word(is, "parameters");
  m.parameters() = read_vector(is, m.parameters().size(), "parameters");
  return m;
}

CharCnnModel<double> train_charcnn(const std::vector<CharSample>& samples, const CharCnnConfig& model_config,
                                   const CharCnnTrainConfig& config) {
  if (samples.empty()) throw Error("empty training set");
  if (config.batch < 1 || config.epochs < 0) throw ConfigError("batch must be >= 1 and epochs >= 0");
  std::vector<int> seen(static_cast<std::size_t>(model_config.classes), 0);
  for (const auto& s : samples) {
    if (s.label < 0 || s.label >= model_config.classes) throw Error("label out of range");
    seen[static_cast<std::size_t>(s.label)] = 1;
  }
  if (std::accumulate(seen.begin(), seen.end(), 0) < 2) throw Error("training needs at least two classes");

  CharCnnModel<double> model(model_config);
  model.init(derive_seed(config.seed, "charcnn-init"));
  Adam adam(config.adam, model.parameters().size());
  std::mt19937_64 order_rng(derive_seed(config.seed, "charcnn-order"));
  std::mt19937_64 dropout_rng(derive_seed(config.seed, "charcnn-dropout"));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad;
  std::vector<CharSample> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      const double l = model.loss_and_gradient(batch, &grad, &dropout_rng);
      if (!std::isfinite(l) || !grad.allFinite())
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " + std::to_string(start));
      adam.step(model.parameters(), grad);
    }
  }
  return model;
}

namespace {

std::string hex_encode(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out += digits[c >> 4];
    out += digits[c & 15];
  }
  return out;
}

std::string hex_decode(const std::string& s) {
  if (s.size() % 2) throw ParseError(0, "odd-length hex string");
  auto val = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw ParseError(0, "bad hex digit");
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); i += 2) out += static_cast<char>(val(s[i]) * 16 + val(s[i + 1]));
  return out;
}

}  // namespace

void save_charcnn_model(std::ostream& os, const CharCnnModel<double>& m, const CharAlphabet& alphabet,
                        std::uint64_t seed) {
  const auto& c = m.config();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", c.dropout);
  os << "relnet-charcnn 1\nseed " << seed << "\nalphabet " << c.encoder.alphabet << "\nembed_dim "
     << c.encoder.embed_dim << "\nkernels " << c.encoder.kernel_sizes[0] << ' ' << c.encoder.kernel_sizes[1] << ' '
     << c.encoder.kernel_sizes[2] << "\nfilters " << c.encoder.filters[0] << ' ' << c.encoder.filters[1] << ' '
     << c.encoder.filters[2] << "\nnames " << c.names << "\ndense_dim " << c.dense_dim << "\nhidden " << c.hidden
     << "\nclasses " << c.classes << "\ndropout " << buf << "\nchars " << alphabet.chars().size() << '\n';
  for (const auto& ch : alphabet.chars()) os << hex_encode(ch) << '\n';
  os << "parameters\n";
  write_vector(os, m.parameters());
}

CharCnnModel<double> load_charcnn_model(std::istream& is, CharAlphabet* alphabet) {
  skip_comments(is);
  expect_word(is, "relnet-charcnn");
  expect_word(is, "1");
  CharCnnConfig c;
  std::uint64_t seed = 0;
  std::size_t nchars = 0;
  expect_word(is, "seed");
  is >> seed;
  expect_word(is, "alphabet");
  is >> c.encoder.alphabet;
  expect_word(is, "embed_dim");
  is >> c.encoder.embed_dim;
  expect_word(is, "kernels");
  is >> c.encoder.kernel_sizes[0] >> c.encoder.kernel_sizes[1] >> c.encoder.kernel_sizes[2];
  expect_word(is, "filters");
  is >> c.encoder.filters[0] >> c.encoder.filters[1] >> c.encoder.filters[2];
  expect_word(is, "names");
  is >> c.names;
  expect_word(is, "dense_dim");
  is >> c.dense_dim;
  expect_word(is, "hidden");
  is >> c.hidden;
  expect_word(is, "classes");
  is >> c.classes;
  expect_word(is, "dropout");
  is >> c.dropout;
  expect_word(is, "chars");
  is >> nchars;
  if (!is) throw ParseError(0, "bad char-CNN model header");
  std::vector<std::string> chars(nchars);
  for (auto& ch : chars) {
    std::string tok;
    if (!(is >> tok)) throw ParseError(0, "truncated alphabet");
    ch = hex_decode(tok);
  }
  if (alphabet) *alphabet = CharAlphabet::from_chars(std::move(chars));
  CharCnnModel<double> m(c);
  expect_word(is, "parameters");
  m.parameters() = read_vector(is, m.parameters().size(), "parameters");
  return m;
}

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth, int num_classes) {
  if (truth.empty()) throw Error("empty test set");
  if (predicted.size() != truth.size()) throw Error("prediction count does not match the test set");
  EvalReport r;
  r.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 || predicted[i] >= num_classes)
      throw Error("class index out of range");
    ++r.confusion(truth[i], predicted[i]);
  }
  r.precision.resize(num_classes);
  r.recall.resize(num_classes);
  r.f1.resize(num_classes);
  r.support = r.confusion.rowwise().sum();
  const Eigen::VectorXi predicted_totals = r.confusion.colwise().sum().transpose();
  for (int c = 0; c < num_classes; ++c) {
    const double tp = r.confusion(c, c);
    r.precision(c) = predicted_totals(c) > 0 ? tp / predicted_totals(c) : 0.0;
    r.recall(c) = r.support(c) > 0 ? tp / r.support(c) : 0.0;
    const double s = r.precision(c) + r.recall(c);
    r.f1(c) = s > 0 ? 2.0 * r.precision(c) * r.recall(c) / s : 0.0;
  }
  r.macro_f1 = r.f1.mean();
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(truth.size());
  return r;
}

std::vector<int> uniform_random_predictions(std::size_t n, int num_classes, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "uniform-baseline"));
  std::uniform_int_distribution<int> pick(0, num_classes - 1);
  std::vector<int> out(n);
  for (auto& p : out) p = pick(rng);
  return out;
}

std::vector<int> proportional_random_predictions(std::size_t n, const std::vector<double>& prevalence,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "proportional-baseline"));
  std::discrete_distribution<int> pick(prevalence.begin(), prevalence.end());
  std::vector<int> out(n);
  for (auto& p : out) p = pick(rng);
  return out;
}

std::vector<int> majority_predictions(std::size_t n, int majority_class) { return std::vector<int>(n, majority_class); }

std::vector<double> class_prevalence(const std::vector<int>& labels, int num_classes) {
  std::vector<double> p(static_cast<std::size_t>(num_classes), 0.0);
  if (labels.empty()) return p;
  for (int y : labels) p.at(static_cast<std::size_t>(y)) += 1.0;
  for (auto& v : p) v /= static_cast<double>(labels.size());
  return p;
}

namespace {

std::string class_label(int c, int num_classes) {
  return num_classes == kNumCategories ? std::string(category_name(category_from_index(c))) : std::to_string(c);
}

}  // namespace

std::string format_eval_table(const std::string& title, const EvalReport& r) {
  std::ostringstream os;
  const int k = static_cast<int>(r.f1.size());
  os << title << '\n' << std::left << std::setw(16) << "class" << std::right << std::setw(10) << "precision"
     << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(10) << "support" << '\n';
  os << std::fixed << std::setprecision(4);
  for (int c = 0; c < k; ++c)
    os << std::left << std::setw(16) << class_label(c, k) << std::right << std::setw(10) << r.precision(c)
       << std::setw(10) << r.recall(c) << std::setw(10) << r.f1(c) << std::setw(10) << r.support(c) << '\n';
  os << std::left << std::setw(16) << "macro" << std::right << std::setw(30) << r.macro_f1 << '\n';
  os << std::left << std::setw(16) << "accuracy" << std::right << std::setw(30) << r.accuracy << '\n';
  return os.str();
}

std::vector<std::string> eval_rows(const std::string& model, const EvalReport& r) {
  std::vector<std::string> rows;
  const int k = static_cast<int>(r.f1.size());
  char buf[256];
  for (int c = 0; c < k; ++c) {
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f\t%d", r.precision(c), r.recall(c), r.f1(c), r.support(c));
    rows.push_back(model + '\t' + class_label(c, k) + buf);
  }
  std::snprintf(buf, sizeof buf, "\tNA\tNA\t%.6f\t%d", r.macro_f1, r.support.sum());
  rows.push_back(model + "\tmacro" + buf);
  return rows;
}

}  // namespace relnet
