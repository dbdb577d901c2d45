#include <cmath>

#include "doctest.h"
#include "fedledger/errors.hpp"
#include "fedledger/nn/adam.hpp"
#include "fedledger/nn/autoencoder.hpp"
#include "fedledger/nn/trainer.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fedledger;
using namespace fedledger::nn;

TEST_CASE("init_model is deterministic and counts parameters") {
  const auto spec = ArchitectureSpec::symmetric(10, {4, 2});
  CHECK(spec.encoder_widths == std::vector<std::size_t>{10, 4, 2});
  CHECK(spec.decoder_widths == std::vector<std::size_t>{2, 4, 10});
  const auto a = init_model(spec, 7);
  const auto b = init_model(spec, 7);
  CHECK(bit_equal(a, b));
  CHECK(a.size() == (10 * 4 + 4) + (4 * 2 + 2) + (2 * 4 + 4) + (4 * 10 + 10));
  CHECK(a.size() == 116);
  CHECK_FALSE(bit_equal(a, init_model(spec, 8)));
  for (std::size_t l = 0; l < a.shapes.size(); ++l) {
    const double limit = std::sqrt(6.0 / (a.shapes[l].rows + a.shapes[l].cols));
    for (double w : a.weights(l)) CHECK(std::abs(w) <= limit);
    for (double bias : a.bias(l)) CHECK(bias == 0.0);
  }
}

TEST_CASE("shallow and deep layer tables") {
  const auto shallow = ArchitectureSpec::shallow(128);
  CHECK(shallow.encoder_widths == std::vector<std::size_t>{128, 128, 64, 32, 16, 8, 4, 2});
  CHECK(shallow.decoder_widths == std::vector<std::size_t>{2, 4, 8, 16, 32, 64, 128, 128});
  const auto deep = ArchitectureSpec::deep(50);
  CHECK(deep.encoder_widths.size() == 12);
  CHECK(deep.encoder_widths[1] == 2048);
  CHECK(deep.encoder_widths.back() == 2);
  // Tanh sits on the bottleneck and the output only.
  for (std::size_t l = 0; l < shallow.layer_count(); ++l)
    CHECK(shallow.uses_tanh(l) == (l == 6 || l == 13));
}

TEST_CASE("invalid architectures are configuration errors") {
  auto spec = ArchitectureSpec::symmetric(10, {4, 2});
  spec.decoder_widths = {2, 5, 10};
  CHECK_THROWS_AS(init_model(spec, 1), ConfigError);
  spec = ArchitectureSpec::symmetric(10, {0, 2});
  CHECK_THROWS_AS(init_model(spec, 1), ConfigError);
  spec = ArchitectureSpec::symmetric(10, {4, 2});
  spec.input_dim = 9;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("forward with zero weights yields zero output") {
  const auto spec = ArchitectureSpec::symmetric(10, {4, 2});
  ParamVector params(spec.layer_shapes(), 0.0);
  Rng rng(3);
  const auto batch = testing_helpers::random_rows(testing_helpers::small_layout(), 5, rng);
  const auto out = forward(params, spec, batch);
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("forward matches a hand computed pass") {
  // encoder 2-2-2 / decoder 2-2-2 with identity weights and a bias on the
  // first layer: leaky, tanh (bottleneck), leaky, tanh (output).
  const auto spec = ArchitectureSpec::symmetric(2, {2, 2});
  ParamVector params(spec.layer_shapes(), 0.0);
  for (std::size_t l = 0; l < 4; ++l) {
    auto w = params.weights(l);
    w[0] = 1.0;
    w[3] = 1.0;
  }
  params.bias(0)[1] = 0.05;
  Matrix x(1, 2);
  x(0, 0) = 0.5;
  x(0, 1) = -0.25;
  const auto out = forward(params, spec, x);
  const double h0 = 0.5, h1 = 0.4 * (-0.25 + 0.05);
  const double z0 = std::tanh(h0), z1 = std::tanh(h1);
  const double d0 = z0, d1 = 0.4 * z1;
  CHECK(out(0, 0) == doctest::Approx(std::tanh(d0)).epsilon(1e-15));
  CHECK(out(0, 1) == doctest::Approx(std::tanh(d1)).epsilon(1e-15));
}

TEST_CASE("forward output stays strictly inside (-1, 1)") {
  const auto spec = ArchitectureSpec::symmetric(10, {8, 4, 2});
  Rng rng(11);
  const auto layout = testing_helpers::small_layout();
  for (int trial = 0; trial < 20; ++trial) {
    const auto params = init_model(spec, trial);
    const auto out = forward(params, spec, testing_helpers::random_rows(layout, 8, rng));
    for (double v : out.data) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("forward rejects a width mismatch") {
  const auto spec = ArchitectureSpec::symmetric(10, {4, 2});
  CHECK_THROWS_AS(forward(init_model(spec, 1), spec, Matrix(2, 9)), ShapeError);
}

namespace {

SegmentLayout fixture_layout() {
  SegmentLayout layout;
  layout.categorical = {{0, 2}};
  layout.numerical = {2};
  layout.width = 3;
  return layout;
}

}  // namespace

TEST_CASE("reconstruction loss hand fixture") {
  // target one-hot (1,0) vs mapped probabilities (0.8, 0.2); numeric 0.5 vs 0.3
  const std::vector<double> target{1.0, 0.0, 0.5};
  const std::vector<double> output{2 * 0.8 - 1, 2 * 0.2 - 1, 0.3};
  const auto lb = reconstruction_loss(fixture_layout(), target, output, 2.0 / 3.0);
  const double bce = -(std::log(0.8) + std::log(0.8)) / 2.0;
  CHECK(lb.bce_part == doctest::Approx(bce).epsilon(1e-12));
  CHECK(lb.bce_part == doctest::Approx(0.22314).epsilon(1e-5));
  CHECK(lb.mse_part == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(std::abs(lb.total - 0.16210) < 1e-5);
  CHECK(lb.total == lb.theta_mix * lb.bce_part + (1 - lb.theta_mix) * lb.mse_part);
  CHECK(kDefaultThetaMix == 2.0 / 3.0);
}

TEST_CASE("reconstruction loss of a saturated perfect reconstruction is ~0") {
  const std::vector<double> target{1.0, 0.0, 0.5};
  const std::vector<double> output{1.0, -1.0, 0.5};
  const auto lb = reconstruction_loss(fixture_layout(), target, output, 2.0 / 3.0);
  CHECK(lb.total >= 0.0);
  CHECK(lb.total <= 1 * -std::log(1 - 1e-6) + 1e-15);
}

TEST_CASE("reconstruction loss rejects non-finite output") {
  const std::vector<double> target{1.0, 0.0, 0.5};
  const std::vector<double> output{NAN, 0.0, 0.5};
  CHECK_THROWS_AS(reconstruction_loss(fixture_layout(), target, output, 0.5), NumericError);
}

TEST_CASE("loss decomposition holds for random rows") {
  const auto layout = testing_helpers::small_layout();
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto t = testing_helpers::random_rows(layout, 1, rng);
    std::vector<double> y(layout.width);
    for (double& v : y) v = uniform(rng, -0.999, 0.999);
    const double theta = uniform01(rng);
    const auto lb = reconstruction_loss(layout, t.row(0), y, theta);
    CHECK(lb.bce_part >= 0.0);
    CHECK(lb.mse_part >= 0.0);
    CHECK(lb.total == theta * lb.bce_part + (1 - theta) * lb.mse_part);
  }
}

TEST_CASE("backward matches central finite differences on random models") {
  const auto layout = testing_helpers::small_layout();
  Rng rng(2024);
  const std::vector<std::vector<std::size_t>> hiddens{{4, 2}, {6, 2}, {5, 3, 2}, {3, 2}, {7, 2}};
  double worst = 0.0;
  for (int model = 0; model < 20; ++model) {
    const auto spec = ArchitectureSpec::symmetric(10, hiddens[model % hiddens.size()]);
    auto params = init_model(spec, 100 + model);
    for (std::size_t l = 0; l < params.shapes.size(); ++l)
      for (double& b : params.bias(l)) b = uniform(rng, -0.3, 0.3);
    REQUIRE(params.size() <= 200);
    const auto batch = testing_helpers::random_rows(layout, 3, rng);
    const auto analytic = backward(params, spec, batch, layout, 2.0 / 3.0).gradient;
    auto loss_at = [&](const std::vector<double>& v) {
      ParamVector p = params;
      p.values = v;
      const auto losses = row_losses(p, spec, batch, layout, 2.0 / 3.0);
      double s = 0.0;
      for (const auto& lb : losses) s += lb.total;
      return s / static_cast<double>(losses.size());
    };
    const auto numeric = oracles::central_differences(loss_at, params.values, 1e-4);
    for (std::size_t i = 0; i < numeric.size(); ++i)
      worst = std::max(worst, oracles::relative_error(analytic.values[i], numeric[i]));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("backward of a two-row batch is the mean of per-row gradients") {
  const auto layout = testing_helpers::small_layout();
  const auto spec = ArchitectureSpec::symmetric(10, {4, 2});
  const auto params = init_model(spec, 3);
  Rng rng(9);
  const auto batch = testing_helpers::random_rows(layout, 2, rng);
  const auto both = backward(params, spec, batch, layout, 0.6).gradient;
  const auto g0 = backward(params, spec, gather_rows(batch, std::vector<std::size_t>{0}), layout, 0.6).gradient;
  const auto g1 = backward(params, spec, gather_rows(batch, std::vector<std::size_t>{1}), layout, 0.6).gradient;
  for (std::size_t i = 0; i < both.size(); ++i)
    CHECK(both.values[i] == doctest::Approx(0.5 * (g0.values[i] + g1.values[i])).epsilon(1e-12));
}

TEST_CASE("gradient at a saturated perfect reconstruction is ~0") {
  // A 1-hidden model whose output layer is driven deep into saturation
  // through its bias, reproducing a target of all-ones categorical slots.
  SegmentLayout layout;
  layout.categorical = {{0, 1}, {1, 1}};
  layout.width = 2;
  const auto spec = ArchitectureSpec::symmetric(2, {2});
  ParamVector params(spec.layer_shapes(), 0.0);
  params.bias(1)[0] = 30.0;
  params.bias(1)[1] = 30.0;
  Matrix batch(1, 2, 1.0);
  const auto res = backward(params, spec, batch, layout, 1.0);
  for (double g : res.gradient.values) CHECK(std::abs(g) < 1e-12);
  CHECK(res.mean_loss.total < 1e-5);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParamVector p(std::vector<LayerShape>{{2, 2}}, 0.25);
  const ParamVector before = p;
  AdamState state(p.size(), {});
  adam_step(p, p.zeros_like(), state);
  CHECK(bit_equal(p, before));
  for (double m : state.m) CHECK(m == 0.0);
  for (double v : state.v) CHECK(v == 0.0);
  CHECK(state.step_count == 1);
}

TEST_CASE("adam: first step with unit gradient moves by ~lr") {
  ParamVector p(std::vector<LayerShape>{{1, 0}}, 0.0);  // a single bias
  REQUIRE(p.size() == 1);
  ParamVector g = p;
  g.values[0] = 1.0;
  AdamState state(1, {});
  adam_step(p, g, state);
  // m_hat = v_hat = 1 -> delta = -lr / (1 + eps)
  CHECK(p.values[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(std::abs(p.values[0] + 0.001) < 1e-10);
}

TEST_CASE("adam: identical inputs give identical results") {
  Rng rng(4);
  ParamVector p(std::vector<LayerShape>{{3, 4}}, 0.0);
  for (double& v : p.values) v = normal(rng);
  ParamVector g = p;
  for (double& v : g.values) v = normal(rng);
  AdamState s1(p.size(), {}), s2(p.size(), {});
  ParamVector p1 = p, p2 = p;
  for (int i = 0; i < 3; ++i) {
    adam_step(p1, g, s1);
    adam_step(p2, g, s2);
  }
  CHECK(bit_equal(p1, p2));
  CHECK(s1 == s2);
  ParamVector bad(std::vector<LayerShape>{{2, 2}}, 0.0);
  CHECK_THROWS_AS(adam_step(bad, g, s1), ShapeError);
}

TEST_CASE("train_iterations contracts") {
  const auto layout = testing_helpers::small_layout();
  const auto spec = ArchitectureSpec::symmetric(10, {8, 4, 2});
  Rng data_rng(77);
  const auto data = testing_helpers::random_rows(layout, 100, data_rng);

  SUBCASE("zero iterations") {
    auto params = init_model(spec, 1);
    const auto before = params;
    AdamState state(params.size(), {});
    Rng rng(1);
    TrainOptions opt;
    opt.iterations = 0;
    train_iterations(params, state, spec, layout, data, opt, rng);
    CHECK(bit_equal(params, before));
  }
  SUBCASE("repeat runs are bit-identical") {
    auto run = [&] {
      auto params = init_model(spec, 1);
      AdamState state(params.size(), {});
      Rng rng(42);
      TrainOptions opt;
      opt.iterations = 50;
      train_iterations(params, state, spec, layout, data, opt, rng);
      return params;
    };
    CHECK(bit_equal(run(), run()));
  }
  SUBCASE("loss decreases after 1000 iterations") {
    // A structured table: the second categorical attribute and the first
    // numeric slot are functions of the first attribute.
    nn::Matrix table(100, layout.width);
    Rng rng(5);
    for (std::size_t i = 0; i < 100; ++i) {
      const std::size_t a = uniform_index(rng, 4);
      table(i, a) = 1.0;
      table(i, 4 + a % 3) = 1.0;
      table(i, 7) = 0.2 * static_cast<double>(a);
      table(i, 8) = uniform01(rng);
      table(i, 9) = 0.5;
    }
    auto params = init_model(spec, 3);
    auto mean_loss = [&](const ParamVector& p) {
      double s = 0.0;
      for (const auto& lb : row_losses(p, spec, table, layout, 2.0 / 3.0)) s += lb.total;
      return s / 100.0;
    };
    const double before = mean_loss(params);
    AdamState state(params.size(), {});
    TrainOptions opt;
    opt.iterations = 1000;
    train_iterations(params, state, spec, layout, table, opt, rng);
    CHECK(state.step_count == 1000);
    CHECK(mean_loss(params) < before);
  }
  SUBCASE("early stopping can end a round early") {
    auto params = init_model(spec, 1);
    AdamState state(params.size(), {});
    Rng rng(8);
    TrainOptions opt;
    opt.iterations = 100000;
    opt.early_stopping = EarlyStopping{};
    const auto stats = train_iterations(params, state, spec, layout, data, opt, rng);
    CHECK(stats.steps < 100000);
    CHECK(stats.steps == state.step_count);
  }
  SUBCASE("empty data") {
    auto params = init_model(spec, 1);
    AdamState state(params.size(), {});
    Rng rng(1);
    CHECK_THROWS_AS(train_iterations(params, state, spec, layout, Matrix(0, 10), TrainOptions{}, rng),
                    ConfigError);
  }
}

TEST_CASE("parameter checkpoints round-trip bit-exactly") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = ArchitectureSpec::symmetric(5 + trial, {3, 2});
    auto params = init_model(spec, trial);
    for (double& v : params.values) v = normal(rng, 0.0, 1e3);
    params.values[0] = -0.0;
    const auto bytes = serialize(params);
    CHECK(bytes[0] == 'F');
    CHECK(bytes[3] == 'E');
    CHECK(bytes[4] == 1);  // version, little-endian
    CHECK(bit_equal(deserialize(bytes), params));
  }
  auto bytes = serialize(init_model(ArchitectureSpec::symmetric(4, {2}), 1));
  bytes[0] = 'X';
  CHECK_THROWS_AS(deserialize(bytes), DataError);
  bytes[0] = 'F';
  bytes.pop_back();
  CHECK_THROWS_AS(deserialize(bytes), DataError);
}
