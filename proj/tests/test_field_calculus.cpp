#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "corona/field_io.hpp"
#include "corona/function_spec.hpp"
#include "corona/grid.hpp"
#include "corona/wirtinger.hpp"

using namespace corona;

namespace {
constexpr double kPi = std::numbers::pi;

// Second-order constants measured at n_theta = 2 n_r over n_r = 16..256, h = 1/n_r.
constexpr double kFdHoloC = 7.5;   // measured 5.91 for z^2
constexpr double kFdZbarC = 1.0;   // measured 0.822 for conj(z)
constexpr double kMidpointC = 1.0; // measured 0.785 for |z|^2

ScalarField zbar(const PolarGrid& g) {
  return ScalarField::sample(g, [](cplx z) { return std::conj(z); });
}
}  // namespace

TEST(PolarGrid, SmallestGridLayout) {
  PolarGrid g = make_polar_grid(2, 4);
  EXPECT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.radius(0), 0.25);
  EXPECT_DOUBLE_EQ(g.radius(1), 0.75);
  EXPECT_NEAR(g.total_weight(), kPi, 1e-12 * kPi);
}

TEST(PolarGrid, NodeCountAndWeightSum) {
  PolarGrid g(128, 256);
  EXPECT_EQ(g.size(), 32768u);
  EXPECT_NEAR(g.total_weight(), kPi, 1e-12 * kPi);
  for (int i = 0; i < g.n_r(); ++i) {
    EXPECT_GT(g.radius(i), 0.0);
    EXPECT_LT(g.radius(i), 1.0);
  }
}

TEST(PolarGrid, RejectsTooSmall) {
  EXPECT_THROW(make_polar_grid(1, 4), CoronaError);
  EXPECT_THROW(make_polar_grid(2, 3), CoronaError);
}

TEST(ScalarField, GridMismatchIsRejected) {
  ScalarField a(PolarGrid(4, 8)), b(PolarGrid(4, 16));
  EXPECT_THROW(a += b, CoronaError);
  EXPECT_THROW(ScalarField(PolarGrid(4, 8), std::vector<cplx>(3)), CoronaError);
}

TEST(FunctionSpec, EvaluatesBasicVariants) {
  EXPECT_EQ(FunctionSpec::parse("poly:0,1")(0.5), cplx(0.5));
  EXPECT_EQ(FunctionSpec::parse("blaschke:0.5")(0.5), cplx(0.0));
  const cplx v = FunctionSpec::parse("poly:1,-2,1")(cplx(0, 1));
  EXPECT_NEAR(std::abs(v - cplx(0, -2)), 0.0, 1e-15);
}

TEST(FunctionSpec, ParsesComplexLiteralsAndCombinators) {
  auto s = FunctionSpec::parse("poly:1+2i,-0.5i");
  EXPECT_NEAR(std::abs(s(1.0) - cplx(1.0, 1.5)), 0.0, 1e-15);
  auto sum = FunctionSpec::parse("poly:0,1 + 2*poly:1");  // z + 2
  EXPECT_NEAR(std::abs(sum(0.25) - cplx(2.25)), 0.0, 1e-15);
  auto prod = FunctionSpec::parse("(poly:0,1)*(poly:1,-1)");  // z (1 - z)
  EXPECT_NEAR(std::abs(prod(0.5) - cplx(0.25)), 0.0, 1e-15);
  auto rat = FunctionSpec::parse("rat:(poly:-0.5,1)/(poly:1,-0.5)");
  auto bl = FunctionSpec::parse("blaschke:0.5");
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.7, 0.3), cplx(0.0, -1.0)}) EXPECT_NEAR(std::abs(rat(z) - bl(z)), 0.0, 1e-15);
  auto neg = FunctionSpec::parse("-poly:0,1");
  EXPECT_NEAR(std::abs(neg(0.5) + 0.5), 0.0, 1e-15);
  auto im = FunctionSpec::parse("poly:i,-i");
  EXPECT_NEAR(std::abs(im(2.0) - cplx(0, -1)), 0.0, 1e-15);
}

TEST(FunctionSpec, TextRoundTrip) {
  for (const char* t : {"poly:1+2i,-0.5i,3", "blaschke:0.5;-0.25+0.5i", "rat:(poly:1,2)/(poly:3,1)",
                        "(poly:0,1)+(2.5*(blaschke:0.1))", "(poly:0,0,1)*(poly:1,-1)"}) {
    const auto s = FunctionSpec::parse(t);
    const auto back = FunctionSpec::parse(s.to_string());
    for (cplx z : {cplx(0.3, -0.2), cplx(-0.9, 0.1), cplx(0.0, 1.0)}) EXPECT_EQ(s(z), back(z)) << t;
  }
}

TEST(FunctionSpec, ParseErrors) {
  EXPECT_THROW(FunctionSpec::parse(""), CoronaError);
  EXPECT_THROW(FunctionSpec::parse("poly:"), CoronaError);
  EXPECT_THROW(FunctionSpec::parse("sin:1"), CoronaError);
  EXPECT_THROW(FunctionSpec::parse("poly:1,2)"), CoronaError);
  EXPECT_THROW(FunctionSpec::parse("blaschke:1.5"), CoronaError);
  EXPECT_THROW(FunctionSpec::parse("rat:(poly:1)/(poly:0)"), CoronaError);
}

TEST(FunctionSpec, ZeroDenominatorNamesThePoint) {
  // 1/(z - 0.5): denominator vanishes inside the disc
  auto s = FunctionSpec::parse("rat:(poly:1)/(poly:-0.5,1)");
  try {
    s(0.5);
    FAIL() << "expected an evaluation error";
  } catch (const CoronaError& e) {
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
  }
}

TEST(FunctionSpec, Derivatives) {
  auto d = FunctionSpec::parse("poly:0,0,1").derivative();
  EXPECT_NEAR(std::abs(d(0.3) - cplx(0.6)), 0.0, 1e-15);
  EXPECT_EQ(FunctionSpec::parse("poly:1").derivative()(0.7), cplx(0.0));
  // d/dz (z - 0.5)/(1 - 0.5 z) = 0.75 / (1 - 0.5 z)^2
  auto db = spec_derivative(FunctionSpec::parse("blaschke:0.5"));
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.6, 0.6), cplx(1.0, 0.0)}) {
    const cplx want = 0.75 / ((1.0 - 0.5 * z) * (1.0 - 0.5 * z));
    EXPECT_NEAR(std::abs(db(z) - want), 0.0, 1e-14);
  }
}

TEST(FunctionSpec, DerivativeMatchesCentralDifference) {
  // finite-difference oracle along the real and imaginary directions
  for (const char* t : {"blaschke:0.5;-0.3+0.4i", "rat:(poly:1,2,0.5i)/(poly:3,1)",
                        "(poly:0,1)*(blaschke:0.2i) + 0.5*poly:1,1,1"}) {
    const auto s = FunctionSpec::parse(t);
    const auto ds = s.derivative();
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3), cplx(0.6, -0.6)}) {
      const double e = 1e-5;
      const cplx fd = (s(z + e) - s(z - e)) / (2 * e);
      EXPECT_NEAR(std::abs(ds(z) - fd), 0.0, 1e-8) << t;
      const cplx fdi = (s(z + cplx(0, e)) - s(z - cplx(0, e))) / cplx(0, 2 * e);
      EXPECT_NEAR(std::abs(ds(z) - fdi), 0.0, 1e-8) << t;
    }
  }
}

TEST(Wirtinger, HolomorphicInputIsSecondOrderSmall) {
  for (int nr : {32, 64, 128}) {
    PolarGrid g(nr, 2 * nr);
    const double h = 1.0 / nr;
    auto u = ScalarField::sample(g, [](cplx z) { return z * z; });
    EXPECT_LE(sup_norm(wirtinger_dbar_fd(u), 0.9), kFdHoloC * h * h) << nr;
  }
}

TEST(Wirtinger, ConjugateGivesOne) {
  for (int nr : {32, 64, 128}) {
    PolarGrid g(nr, 2 * nr);
    const double h = 1.0 / nr;
    EXPECT_LE(sup_norm(wirtinger_dbar_fd(zbar(g)) - ScalarField(g, 1.0), 0.9), kFdZbarC * h * h);
  }
}

TEST(Wirtinger, ZeroStaysExactlyZero) {
  PolarGrid g(16, 32);
  EXPECT_TRUE(wirtinger_dbar_fd(ScalarField(g)).is_zero());
  PolarGrid tiny(2, 4);
  EXPECT_TRUE(wirtinger_dbar_fd(ScalarField(tiny, 3.0)).is_zero());
}

TEST(Wirtinger, LinearToMachinePrecision) {
  std::mt19937 rng(7);
  std::normal_distribution<double> n01;
  PolarGrid g(24, 48);
  for (int trial = 0; trial < 5; ++trial) {
    ScalarField u(g), v(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
      u[n] = {n01(rng), n01(rng)};
      v[n] = {n01(rng), n01(rng)};
    }
    const cplx a(n01(rng), n01(rng)), b(n01(rng), n01(rng));
    const ScalarField lhs = wirtinger_dbar_fd(a * u + b * v);
    const ScalarField rhs = a * wirtinger_dbar_fd(u) + b * wirtinger_dbar_fd(v);
    const double scale = sup_norm(lhs);
    EXPECT_LE(sup_norm(lhs - rhs), 1e-13 * scale);
  }
}

TEST(Wirtinger, ConvergesSecondOrderForSpecs) {
  for (const char* t : {"poly:1,2,-1,0.5i", "blaschke:0.5;-0.3+0.4i", "rat:(poly:1,2)/(poly:3,1)"}) {
    const auto s = FunctionSpec::parse(t);
    const double coarse = sup_norm(wirtinger_dbar_fd(s.sample(PolarGrid(64, 128))), 0.9);
    const double fine = sup_norm(wirtinger_dbar_fd(s.sample(PolarGrid(128, 256))), 0.9);
    EXPECT_GE(coarse / fine, 3.0) << t;
  }
}

TEST(Wirtinger, LeibnizDefectIsSecondOrder) {
  const auto f = FunctionSpec::parse("blaschke:0.5;-0.3+0.4i");
  auto mixed = [](cplx z) { return std::conj(z) * z * z + 2.0 * std::conj(z) * std::conj(z); };
  double prev = 0.0;
  for (int nr : {32, 64, 128}) {
    PolarGrid g(nr, 2 * nr);
    const ScalarField fs = f.sample(g), w = ScalarField::sample(g, mixed);
    const double d = sup_norm(wirtinger_dbar_fd(fs * w) - fs * wirtinger_dbar_fd(w), 0.9);
    if (prev > 0.0) {
      EXPECT_GE(prev / d, 3.0);
    }
    prev = d;
  }
}

TEST(SupNorm, Examples) {
  PolarGrid g(10, 16);
  auto z = ScalarField::sample(g, [](cplx w) { return w; });
  EXPECT_NEAR(sup_norm(z), 1.0 - 1.0 / 20.0, 1e-15);
  EXPECT_EQ(sup_norm(ScalarField(g)), 0.0);
  EXPECT_EQ(sup_norm(ScalarField(g, cplx(3, 4))), 5.0);
  EXPECT_NEAR(sup_norm(z, 0.5), 0.45, 1e-15);
  EXPECT_THROW(sup_norm(z, 0.0), CoronaError);
  EXPECT_THROW(sup_norm(z, 1.5), CoronaError);
}

TEST(Integrate, Examples) {
  PolarGrid g(64, 128);
  EXPECT_NEAR(std::abs(integrate(ScalarField(g, 1.0)) - kPi), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(integrate(ScalarField::sample(g, [](cplx z) { return z; }))), 0.0, 1e-12);
  for (int nr : {32, 64, 128}) {
    PolarGrid gg(nr, 2 * nr);
    const cplx I = integrate(ScalarField::sample(gg, [](cplx z) { return std::norm(z); }));
    EXPECT_LE(std::abs(I - kPi / 2), kMidpointC / (nr * nr));
  }
}

TEST(FieldCsv, HeaderLayoutAndRoundTrip) {
  PolarGrid g(3, 4);
  auto u = ScalarField::sample(g, [](cplx z) { return std::exp(z) / 3.0; });
  std::ostringstream os;
  write_field_csv(os, u);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "i,k,r,theta,re,im");
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream is(text);
  const ScalarField back = read_field_csv(is);
  ASSERT_TRUE(back.grid() == g);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_EQ(back[n], u[n]);  // 17 digits round-trip exactly
}

TEST(FieldCsv, TruncationNamesLine) {
  PolarGrid g(3, 4);
  std::ostringstream os;
  write_field_csv(os, ScalarField(g, 1.0));
  std::string text = os.str();
  // drop the second half of the last row
  text = text.substr(0, text.size() - 6);
  std::istringstream is(text);
  try {
    read_field_csv(is, "h_1.csv");
    FAIL() << "expected a load error";
  } catch (const CoronaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 13"), std::string::npos) << e.what();
  }
  // whole rows missing
  std::string partial = os.str();
  partial = partial.substr(0, partial.rfind('\n', partial.size() - 2) + 1);
  std::istringstream is2(partial);
  EXPECT_THROW(read_field_csv(is2, "h_1.csv"), CoronaError);
}
