#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "skt/diagnostics.hpp"
#include "skt/io.hpp"
#include "support.hpp"

using namespace skt;

namespace {

ReferenceMoments std_normal_ref(Index d) { return gaussian_reference(Vector::Zero(d), Vector::Ones(d)); }

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("Gaussian reference moments") {
    Vector m(2), v(2);
    m << 1.0, -2.0;
    v << 0.5, 3.0;
    const ReferenceMoments r = gaussian_reference(m, v);
    CHECK(r.mean_x2(0) == doctest::Approx(1.5));
    CHECK(r.mean_x2(1) == doctest::Approx(7.0));
    CHECK(r.var_x2(0) == doctest::Approx(4 * 1 * 0.5 + 2 * 0.25));
    CHECK(r.var_x2(1) == doctest::Approx(4 * 4 * 3.0 + 2 * 9.0));
  }

  TEST_CASE("an ensemble matching the reference has zero bias") {
    RowMatrix x(2, 1);
    x << -1.0, 1.0;
    // Ensemble mean 0, mean of squares 1 equal the N(0, 1) values.
    const BiasReport b = squared_bias(x, std_normal_ref(1));
    CHECK(b.b1_sq == 0.0);
    CHECK(b.b2_sq == 0.0);
    CHECK(b.low_bias());
  }

  TEST_CASE("one-dimensional worked example") {
    RowMatrix x(2, 1);
    x << 0.0, 1.0;
    const BiasReport b = squared_bias(x, std_normal_ref(1));
    CHECK(b.b1_sq == doctest::Approx(0.25));
    // E[x²] estimate 0.5 against 1, Var[x²] = 2.
    CHECK(b.b2_sq == doctest::Approx(0.25 / 2.0));
    CHECK_FALSE(b.low_bias());
  }

  TEST_CASE("matches a direct recomputation and ignores particle order") {
    const RowMatrix x = test::normal_draws(300, 4, 1);
    Vector m(4), v(4);
    m << 0.1, 0.2, -0.3, 0.0;
    v << 1.0, 2.0, 0.5, 1.5;
    const ReferenceMoments ref = gaussian_reference(m, v);
    double b1 = 0.0, b2 = 0.0;
    for (Index k = 0; k < 4; ++k) {
      const double e1 = x.col(k).mean();
      const double e2 = x.col(k).array().square().mean();
      b1 += (e1 - m(k)) * (e1 - m(k)) / v(k);
      b2 += (e2 - ref.mean_x2(k)) * (e2 - ref.mean_x2(k)) / ref.var_x2(k);
    }
    const BiasReport b = squared_bias(x, ref);
    CHECK(b.b1_sq == doctest::Approx(b1 / 4));
    CHECK(b.b2_sq == doctest::Approx(b2 / 4));

    RowMatrix rev = x.colwise().reverse();
    const BiasReport r = squared_bias(rev, ref);
    CHECK(r.b1_sq == doctest::Approx(b.b1_sq).epsilon(1e-13));
    CHECK(r.b2_sq == doctest::Approx(b.b2_sq).epsilon(1e-13));
  }

  TEST_CASE("exact draws have bias of order 1/J") {
    // For iid draws E[b₁²] = 1/J and E[b₂²] = 1/J.
    for (Index j : {100, 1000, 10000}) {
      double b1 = 0.0, b2 = 0.0;
      for (std::uint64_t s = 0; s < 20; ++s) {
        const BiasReport b = squared_bias(test::normal_draws(j, 5, 100 + s), std_normal_ref(5));
        b1 += b.b1_sq / 20;
        b2 += b.b2_sq / 20;
      }
      CHECK(b1 * static_cast<double>(j) == doctest::Approx(1.0).epsilon(0.3));
      CHECK(b2 * static_cast<double>(j) == doctest::Approx(1.0).epsilon(0.3));
    }
  }

  TEST_CASE("shape mismatches are configuration errors") {
    CHECK_THROWS_AS(squared_bias(RowMatrix::Zero(3, 2), std_normal_ref(3)), ConfigError);
    ReferenceMoments bad = std_normal_ref(2);
    bad.var_x(1) = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("reference from samples") {
    const RowMatrix x = test::normal_draws(200000, 2, 2);
    const ReferenceMoments r = reference_from_samples(x);
    CHECK(r.mean_x.cwiseAbs().maxCoeff() < 0.01);
    CHECK((r.var_x.array() - 1.0).abs().maxCoeff() < 0.02);
    CHECK((r.mean_x2.array() - 1.0).abs().maxCoeff() < 0.02);
    CHECK((r.var_x2.array() - 2.0).abs().maxCoeff() < 0.05);
    CHECK_THROWS_AS(reference_from_samples(test::normal_draws(10, 2, 3)), ConfigError);
    RowMatrix constant = test::normal_draws(2000, 2, 4);
    constant.col(1).setConstant(3.0);
    CHECK_THROWS_AS(reference_from_samples(constant), ConfigError);
  }

  TEST_CASE("reference file round trip and report json") {
    const auto dir = std::filesystem::temp_directory_path() / "skt_diag";
    Vector m(3), v(3);
    m << 0.1, 1e-7, -5.0;
    v << 0.3, 2.0, 1e-3;
    const ReferenceMoments ref = gaussian_reference(m, v);
    write_reference_moments(dir / "ref.csv", ref);
    const ReferenceMoments back = read_reference_moments(dir / "ref.csv");
    CHECK(back.mean_x == ref.mean_x);
    CHECK(back.var_x == ref.var_x);
    CHECK(back.mean_x2 == ref.mean_x2);
    CHECK(back.var_x2 == ref.var_x2);

    io::write_text(dir / "bad.csv", "dim,mean_x,var_x,mean_x2,var_x2\n0,1,1,1,1\n1,1,x,1,1\n");
    try {
      read_reference_moments(dir / "bad.csv");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
    }

    const auto j = nlohmann::json::parse(bias_report_json(squared_bias(test::normal_draws(50, 3, 5), ref)));
    CHECK(j.contains("b1_sq"));
    CHECK(j.contains("b2_sq"));
    CHECK(j["per_dim"].size() == 3);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("field reconstruction") {
    models::ModelOptions o;
    o.name = "heat";
    o.heat.grid = 16;
    o.heat.obs_blocks = 8;
    o.heat.steps = 50;
    o.heat.order = 10;
    o.heat.truth_order = 12;
    const models::BenchmarkModel m = models::make_model(o);
    // θ and −θ with μ_K = 0 cancel.
    RowMatrix x = test::normal_draws(2, m.spec.dim, 6);
    x(0, 1) = 0.0;
    x.row(1) = x.row(0);
    x.block(1, 3, 1, 10) *= -1.0;
    const Matrix f = reconstruct_field(x, m);
    CHECK(f.rows() == 16);
    CHECK(f.cols() == 16);
    CHECK(f.cwiseAbs().maxCoeff() < 1e-12);
    // A single particle reproduces its own field.
    const Vector own = m.field(x.row(0).transpose());
    const Matrix g = reconstruct_field(x.topRows(1), m);
    for (Index r = 0; r < 16; ++r)
      for (Index c = 0; c < 16; ++c) CHECK(g(r, c) == doctest::Approx(own(r * 16 + c)));
  }
}
