#include <doctest.h>

#include <cmath>

#include "hqt/analytics.hpp"

using namespace hqt;
using analytics::FormulaId;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("formula spot values") {
  SUBCASE("case-i probability at a pole qubit") {
    const double alpha2 = 1.0;
    const double x2 = std::exp(-2.0 * alpha2);
    CHECK(analytics::eval_formula(FormulaId::Eq16_Pi, cplx(1.0), cplx(0.0), alpha2) ==
          doctest::Approx(1.0 / (4.0 * (1.0 + x2))).epsilon(1e-14));
  }
  SUBCASE("average fidelity approaches one for macroscopic amplitudes") {
    CHECK(std::abs(analytics::eval_formula(FormulaId::Eq21_Fbar, cplx(1.0), cplx(0.0), 1e8) -
                   1.0) < 1e-6);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(analytics::eval_formula(FormulaId::P0, cplx(1.0), cplx(1.0), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytics::eval_formula(FormulaId::P0, cplx(1.0), cplx(0.0), 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("bloch averages of closed-form integrands") {
  SUBCASE("constant function") {
    CHECK(analytics::bloch_average([](const QubitParams&) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("squared interference term averages to x^4/3") {
    const double alpha2 = 1.0;
    const double x2 = std::exp(-2.0 * alpha2);
    const double got = analytics::bloch_average([&](const QubitParams& q) {
      const double t = 2.0 * x2 * (std::conj(q.a()) * q.b()).real();
      return t * t;
    });
    CHECK(std::abs(got - x2 * x2 / 3.0) < 1e-9);
  }
  SUBCASE("|a-b|^2 averages to one") {
    const double got = analytics::bloch_average(
        [](const QubitParams& q) { return std::norm(q.a() - q.b()); });
    CHECK(std::abs(got - 1.0) < 1e-9);
  }
  SUBCASE("resolution guard") {
    CHECK_THROWS_AS(analytics::bloch_average([](const QubitParams&) { return 1.0; }, 1, 64),
                    std::invalid_argument);
  }
}

TEST_CASE("weighted sum of printed fidelities reproduces the closed form") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const QubitParams q{kPi * uniform01(rng), 2.0 * kPi * uniform01(rng)};
    const double alpha2 = 0.3 + 7.7 * uniform01(rng);
    const double eq19 = analytics::eval_formula(FormulaId::Eq19_Favg, q.a(), q.b(), alpha2);
    const double eq20 = analytics::eval_formula(FormulaId::Eq20_Favg, q.a(), q.b(), alpha2);
    CHECK(std::abs(eq19 - eq20) <= 1e-12);
  }
}

TEST_CASE("quadrature of the closed form matches its Bloch-averaged form") {
  for (double alpha2 : {1.0, 2.5, 5.0}) {
    const double quad = analytics::bloch_average([&](const QubitParams& q) {
      return analytics::eval_formula(FormulaId::Eq20_Favg, q.a(), q.b(), alpha2);
    });
    const double closed = analytics::eval_formula(FormulaId::Eq21_Fbar, cplx(1.0), cplx(0.0), alpha2);
    CHECK(std::abs(quad - closed) < 1e-12);
  }
}

TEST_CASE("quadrature converges at the default resolution") {
  const double alpha2 = 1.0;
  const auto integrand = [&](const QubitParams& q) {
    return analytics::eval_formula(FormulaId::Eq20_Favg, q.a(), q.b(), alpha2);
  };
  const double base = analytics::bloch_average(integrand, 64, 64);
  const double fine = analytics::bloch_average(integrand, 128, 128);
  CHECK(std::abs(base - fine) < 1e-9);
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  const auto nodes = analytics::gauss_legendre(8);
  double integral = 0.0;
  for (const auto& [x, w] : nodes) integral += w * (x * x * x * x - 2.0 * x * x + 0.5);
  // int_{-1}^{1} x^4 - 2x^2 + 1/2 dx = 2/5 - 4/3 + 1
  CHECK(integral == doctest::Approx(2.0 / 5.0 - 4.0 / 3.0 + 1.0).epsilon(1e-13));
}

TEST_CASE("sweep tables") {
  SUBCASE("oracle column rises monotonically over the grid") {
    analytics::SweepSpec spec;
    for (double a2 = 1.0; a2 <= 8.0 + 1e-9; a2 += 0.5) spec.alpha2_grid.push_back(a2);
    spec.n_theta = 16;  // plenty for a monotonicity check
    spec.n_phi = 16;
    const auto table = analytics::sweep(spec, analytics::SweepEngine::Oracle);
    REQUIRE(table.rows.size() == 15);
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      CHECK(table.rows[i].fbar_oracle >= table.rows[i - 1].fbar_oracle - 1e-12);
  }
  SUBCASE("single formula row echoes the closed form") {
    analytics::SweepSpec spec;
    spec.alpha2_grid = {5.0};
    const auto table = analytics::sweep(spec, analytics::SweepEngine::Formula);
    CHECK(table.rows[0].fbar_formula ==
          doctest::Approx(analytics::eval_formula(FormulaId::Eq21_Fbar, cplx(1.0), cplx(0.0), 5.0))
              .epsilon(1e-14));
    CHECK(table.rows[0].delta_abs2 == doctest::Approx(kPi * kPi / 80.0).epsilon(1e-14));
  }
  SUBCASE("deviation columns stay within the documented discrepancy scale") {
    analytics::SweepSpec spec;
    spec.alpha2_grid = {1.0, 5.0};
    spec.n_theta = 32;
    spec.n_phi = 32;
    const auto table = analytics::sweep(spec, analytics::SweepEngine::Both);
    CHECK(table.rows[0].abs_dev < 1e-2);  // x^2-order gap at alpha^2 = 1
    CHECK(table.rows[1].abs_dev < 1e-6);  // negligible once x^2 ~ 1e-5
  }
  SUBCASE("oracle fidelities are finite and inside [0, 1]") {
    analytics::SweepSpec spec;
    spec.alpha2_grid = {0.5, 4.0};
    spec.n_theta = 8;
    spec.n_phi = 8;
    const auto table = analytics::sweep(spec, analytics::SweepEngine::Both);
    for (const auto& row : table.rows) {
      CHECK(std::isfinite(row.fbar_formula));
      CHECK(std::isfinite(row.fbar_oracle));
      CHECK(row.fbar_oracle >= 0.0);
      CHECK(row.fbar_oracle <= 1.0);
    }
  }
  SUBCASE("grid validation") {
    analytics::SweepSpec spec;
    CHECK_THROWS_AS(analytics::sweep(spec, analytics::SweepEngine::Formula),
                    std::invalid_argument);
    spec.alpha2_grid = {2.0, 1.0};
    CHECK_THROWS_AS(analytics::sweep(spec, analytics::SweepEngine::Formula),
                    std::invalid_argument);
    spec.alpha2_grid = {-1.0, 1.0};
    CHECK_THROWS_AS(analytics::sweep(spec, analytics::SweepEngine::Formula),
                    std::invalid_argument);
  }
}
