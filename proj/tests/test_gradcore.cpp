#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gradcheck.hpp"
#include "ibts/adam.hpp"
#include "ibts/random.hpp"
#include "ibts/tensor.hpp"

using namespace ibts;
using ibts::testing::gradcheck;

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(static_cast<size_t>(numel(shape)));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor(shape, std::move(v));
}

}  // namespace

TEST_CASE("tensor construction and shape errors") {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.shape() == Shape{2, 3});
  CHECK_THROWS_AS(Tensor({2, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor::scalar(1.0).item() + Tensor({2}, {1, 2}).item(), std::invalid_argument);
}

TEST_CASE("matmul forward: identity times A returns A") {
  Tensor I({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor A({3, 2}, {1, 2, 3, 4, 5, 6});
  Tensor C = matmul(I, A);
  for (size_t i = 0; i < A.data().size(); ++i) CHECK(C.data()[i] == A.data()[i]);
}

TEST_CASE("matmul shape mismatch names the op and shapes") {
  Tensor A({2, 3}, std::vector<double>(6, 1.0));
  Tensor B({4, 2}, std::vector<double>(8, 1.0));
  try {
    matmul(A, B);
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("(2,3)") != std::string::npos);
    CHECK(msg.find("(4,2)") != std::string::npos);
  }
}

TEST_CASE("chain rule through product-sum: d/dx sum(x*y) == y") {
  Tape tape;
  Tensor x0({2, 2}, {1, 2, 3, 4});
  Tensor y0({2, 2}, {5, 6, 7, 8});
  Tensor x = tape.watch(x0);
  Tensor z = sum_all(mul(x, y0));
  auto grads = tape.backward(z);
  Tensor gx = grads.at(x);
  for (size_t i = 0; i < 4; ++i) CHECK(gx.data()[i] == doctest::Approx(y0.data()[i]));
}

TEST_CASE("backward requires scalar output") {
  Tape tape;
  Tensor x = tape.watch(Tensor({2}, {1, 2}));
  Tensor y = mul_scalar(x, 2.0);
  CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
}

TEST_CASE("leaves off the path to the output get zero gradient") {
  Tape tape;
  Tensor x = tape.watch(Tensor({2}, {1, 2}));
  Tensor unused = tape.watch(Tensor({3}, {1, 2, 3}));
  auto grads = tape.backward(sum_all(x));
  Tensor gu = grads.at(unused);
  for (double g : gu.data()) CHECK(g == 0.0);
}

TEST_CASE("no silent NaN: domain errors on log, sqrt, div") {
  CHECK_THROWS_AS(log_op(Tensor({2}, {1.0, 0.0})), std::domain_error);
  CHECK_THROWS_AS(log_op(Tensor({1}, {-1.0})), std::domain_error);
  CHECK_THROWS_AS(sqrt_op(Tensor({1}, {-0.5})), std::domain_error);
  CHECK_THROWS_AS(div(Tensor({2}, {1, 2}), Tensor({2}, {1, 0})), std::domain_error);
  CHECK_THROWS_AS(div_scalar(Tensor({1}, {1}), 0.0), std::domain_error);
}

TEST_CASE("broadcasting follows right-aligned rules") {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({3}, {10, 20, 30});
  Tensor c = add(a, b);
  CHECK(c.shape() == Shape{2, 3});
  CHECK(c.data()[0] == 11);
  CHECK(c.data()[5] == 36);
  CHECK_THROWS_AS(add(Tensor({2, 3}, std::vector<double>(6, 0.0)), Tensor({2}, {1, 2})), std::invalid_argument);

  Tensor d({2, 1, 2}, {1, 2, 3, 4});
  Tensor e({3, 1}, {1, 2, 3});
  Tensor f = mul(d, e);
  CHECK(f.shape() == Shape{2, 3, 2});
  // element [1, 2, 0] = d[1,0,0] * e[2,0] = 3 * 3
  CHECK(f.data()[(1 * 3 + 2) * 2 + 0] == 9);
}

TEST_CASE("softmax rows sum to one and stay finite for large logits") {
  Tensor x({2, 3}, {1000.0, 1001.0, 1002.0, -1000.0, 0.0, 1000.0});
  Tensor y = softmax_last(x);
  for (int r = 0; r < 2; ++r) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
      double v = y.data()[static_cast<size_t>(r * 3 + j)];
      CHECK(std::isfinite(v));
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  Tensor ls = log_softmax_last(x);
  for (double v : ls.data()) CHECK(std::isfinite(v));
}

TEST_CASE("reductions over each axis, with and without keepdims") {
  Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor s0 = sum_axis(x, 0, false);
  CHECK(s0.shape() == Shape{3});
  CHECK(s0.data() == std::vector<double>{5, 7, 9});
  Tensor s1 = sum_axis(x, 1, true);
  CHECK(s1.shape() == Shape{2, 1});
  CHECK(s1.data() == std::vector<double>{6, 15});
  Tensor m1 = mean_axis(x, -1, false);
  CHECK(m1.data() == std::vector<double>{2, 5});
  CHECK(mean_all(x).item() == doctest::Approx(3.5));
}

TEST_CASE("slice and concat round trip") {
  Tensor x({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8});
  Tensor left = slice(x, 1, 0, 2);
  Tensor right = slice(x, 1, 2, 4);
  Tensor back = concat_last({left, right});
  CHECK(back.shape() == x.shape());
  CHECK(back.data() == x.data());
  CHECK_THROWS_AS(slice(x, 1, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(concat_last({x, Tensor({3, 4}, std::vector<double>(12, 0.0))}), std::invalid_argument);
}

TEST_CASE("gradient check: every differentiable op at random points") {
  Rng rng(20240817);
  struct Case {
    const char* name;
    testing::BuildFn build;
    Shape shape;
    double lo, hi;
  };
  std::vector<Case> cases = {
      {"sigmoid", [](Tape*, const std::vector<Tensor>& in) { return sum_all(sigmoid(in[0])); }, {2, 3}, -2, 2},
      {"tanh", [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(tanh_op(in[0]), in[0])); }, {2, 3}, -2, 2},
      {"elu", [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(elu(in[0]), in[0])); }, {2, 3}, -2, 2},
      {"exp", [](Tape*, const std::vector<Tensor>& in) { return sum_all(exp_op(in[0])); }, {2, 3}, -1, 1},
      {"log", [](Tape*, const std::vector<Tensor>& in) { return sum_all(log_op(in[0])); }, {2, 3}, 0.2, 3},
      {"sqrt", [](Tape*, const std::vector<Tensor>& in) { return sum_all(sqrt_op(in[0])); }, {2, 3}, 0.2, 3},
      {"abs", [](Tape*, const std::vector<Tensor>& in) { return sum_all(abs_op(in[0])); }, {2, 3}, 0.3, 2},
      {"smooth_abs",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(smooth_abs(in[0], 1e-8)); },
       {2, 3},
       -2,
       2},
      {"clamp",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(clamp(in[0], -0.5, 0.5), in[0])); },
       {2, 3},
       -2,
       2},
      {"softmax",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(softmax_last(in[0]), in[0])); },
       {2, 4},
       -2,
       2},
      {"log_softmax",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(log_softmax_last(in[0]), in[0])); },
       {2, 4},
       -2,
       2},
      {"add_bcast", [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(add(in[0], in[1]), in[0])); },
       {2, 3}, -2, 2},
      {"div",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(div(in[0], add_scalar(in[1], 3.0))); },
       {2, 3},
       0.5,
       2},
      {"matmul",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(matmul(in[0], in[1]), matmul(in[0], in[1]))); },
       {3, 3},
       -1,
       1},
      {"transpose",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(matmul(in[0], transpose_last2(in[1]))); },
       {2, 3},
       -1,
       1},
      {"slice_concat",
       [](Tape*, const std::vector<Tensor>& in) {
         Tensor s = concat_last({slice(in[0], 1, 1, 3), slice(in[1], 1, 0, 2)});
         return sum_all(mul(s, s));
       },
       {2, 3},
       -1,
       1},
      {"reductions",
       [](Tape*, const std::vector<Tensor>& in) {
         Tensor m = mean_axis(in[0], 0, true);
         return sum_all(mul(sub(in[0], m), sub(in[0], m)));
       },
       {3, 2},
       -1,
       1},
      {"reshape",
       [](Tape*, const std::vector<Tensor>& in) { return sum_all(mul(reshape(in[0], {6}), reshape(in[1], {6}))); },
       {2, 3},
       -1,
       1},
  };
  for (auto& c : cases) {
    CAPTURE(c.name);
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<Tensor> inputs = {random_tensor(c.shape, rng, c.lo, c.hi), random_tensor(c.shape, rng, c.lo, c.hi)};
      auto r = gradcheck(c.build, inputs);
      CHECK_MESSAGE(r.max_rel_err < 1e-4, c.name, " rep ", rep, ": rel err ", r.max_rel_err, " analytic ",
                    r.worst_analytic, " numeric ", r.worst_numeric);
    }
  }
}

TEST_CASE("gradient check: second-matmul-operand and batched forms") {
  Rng rng(7);
  Tensor a = random_tensor({2, 3, 4}, rng);
  Tensor b = random_tensor({2, 4, 2}, rng);
  Tensor w = random_tensor({4, 2}, rng);
  auto build_batched = [](Tape*, const std::vector<Tensor>& in) {
    Tensor c = matmul(in[0], in[1]);
    return sum_all(mul(c, c));
  };
  CHECK(gradcheck(build_batched, {a, b}).max_rel_err < 1e-4);
  auto build_shared = [](Tape*, const std::vector<Tensor>& in) {
    Tensor c = matmul(in[0], in[1]);
    return sum_all(mul(c, c));
  };
  CHECK(gradcheck(build_shared, {a, w}).max_rel_err < 1e-4);
}

TEST_CASE("straight-through estimator: binary forward, identity backward") {
  Rng rng(42);
  Shape shape{4, 3};
  Tensor pi = random_tensor(shape, rng, 0.1, 0.9);
  Tensor u = random_tensor(shape, rng, 0.0, 1.0);
  Tensor w = random_tensor(shape, rng, -1.0, 1.0);

  Tensor m_plain = sample_bernoulli_ste(pi, u);
  for (size_t i = 0; i < m_plain.data().size(); ++i) {
    double expect = u.data()[i] < pi.data()[i] ? 1.0 : 0.0;
    CHECK(m_plain.data()[i] == expect);
  }

  Tape tape;
  Tensor pi_leaf = tape.watch(pi);
  Tensor loss = sum_all(mul(sample_bernoulli_ste(pi_leaf, u), w));
  auto grads = tape.backward(loss);
  Tensor gpi = grads.at(pi_leaf);
  for (size_t i = 0; i < gpi.data().size(); ++i) CHECK(gpi.data()[i] == doctest::Approx(w.data()[i]));

  CHECK_THROWS_AS(sample_bernoulli_ste(Tensor({1}, {1.5}), Tensor({1}, {0.5})), std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_ste(Tensor({1}, {-0.2}), Tensor({1}, {0.5})), std::invalid_argument);
}

TEST_CASE("straight-through surrogate matches finite differences with frozen draws") {
  Rng rng(99);
  Shape shape{3, 2};
  Tensor x = random_tensor(shape, rng, -1.0, 1.0);
  Tensor u = random_tensor(shape, rng, 0.0, 1.0);
  Tensor w = random_tensor(shape, rng, -1.0, 1.0);
  // pre-activation -> sigmoid -> mask -> weighted sum; FD path linearizes the
  // sampler around the base point.
  Tensor pi0 = sigmoid(x);
  Tensor m0 = sample_bernoulli_ste(pi0, u);
  auto build = [&](Tape* tape, const std::vector<Tensor>& in) {
    Tensor pi = sigmoid(in[0]);
    Tensor m = tape ? sample_bernoulli_ste(pi, u) : add(sub(pi, pi0), m0);
    return sum_all(mul(m, w));
  };
  auto r = gradcheck(build, {x});
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("adam: first step moves by about lr in the gradient sign direction") {
  ParamSet params{{"p", Tensor({3}, {1.0, -2.0, 0.5})}};
  std::map<std::string, Tensor> grads{{"p", Tensor({3}, {0.4, -0.3, 2.0})}};
  Adam opt({.lr = 0.01});
  std::vector<double> before = params.at("p").data();
  opt.step(params, grads);
  for (size_t i = 0; i < 3; ++i) {
    double delta = params.at("p").data()[i] - before[i];
    double sign = grads.at("p").data()[i] > 0 ? 1.0 : -1.0;
    CHECK(delta == doctest::Approx(-0.01 * sign).epsilon(1e-3));
  }
}

TEST_CASE("adam: two steps match a hand-rolled reference with bias correction") {
  AdamConfig cfg{.lr = 0.1, .beta1 = 0.9, .beta2 = 0.999, .eps = 1e-8, .weight_decay = 0.0};
  ParamSet params{{"p", Tensor({1}, {0.7})}};
  Adam opt(cfg);
  double g1 = 0.3, g2 = -0.2;
  opt.step(params, {{"p", Tensor({1}, {g1})}});
  opt.step(params, {{"p", Tensor({1}, {g2})}});

  double m = 0, v = 0, p = 0.7;
  for (int t = 1; t <= 2; ++t) {
    double g = t == 1 ? g1 : g2;
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    double mhat = m / (1 - std::pow(cfg.beta1, t));
    double vhat = v / (1 - std::pow(cfg.beta2, t));
    p -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  CHECK(params.at("p").item() == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("adam: decoupled weight decay shrinks parameters with zero gradient") {
  ParamSet params{{"p", Tensor({1}, {2.0})}};
  Adam opt({.lr = 0.1, .weight_decay = 0.5});
  opt.step(params, {{"p", Tensor({1}, {0.0})}});
  CHECK(params.at("p").item() == doctest::Approx(2.0 * (1.0 - 0.1 * 0.5)));
}

TEST_CASE("rng: identical seeds give identical streams, derive gives independent ones") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(123);
  Rng d1 = c.derive(1);
  c.uniform();  // consuming the parent must not change derived streams
  Rng d1_again = Rng(123).derive(1);
  for (int i = 0; i < 10; ++i) CHECK(d1.uniform() == d1_again.uniform());
  Rng d2 = Rng(123).derive(2);
  bool all_equal = true;
  Rng d1_fresh = Rng(123).derive(1);
  for (int i = 0; i < 10; ++i) all_equal = all_equal && (d1_fresh.uniform() == d2.uniform());
  CHECK_FALSE(all_equal);
}

TEST_CASE("rng: normal moments are sane") {
  Rng rng(5);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.05);
  CHECK(std::abs(s2 / n - 1.0) < 0.05);
}
